//! Gaussian elimination over any [`Scalar`] field.
//!
//! Exact fields pivot on any nonzero entry; floats use partial pivoting and
//! a zero threshold relative to the largest input entry.

use crate::scalar::Scalar;

/// Reduced row echelon form of a matrix: the nonzero rows and their pivot columns.
#[derive(Clone, Debug)]
pub struct RowEchelon<S> {
    pub rows: Vec<Vec<S>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

fn max_abs<S: Scalar>(rows: &[Vec<S>]) -> f64 {
    rows.iter().flatten().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

fn threshold<S: Scalar>(rows: &[Vec<S>], tol: f64) -> f64 {
    if S::EXACT {
        0.0
    } else {
        tol * max_abs(rows).max(1.0)
    }
}

pub fn row_reduce<S: Scalar>(input: &[Vec<S>], cols: usize, tol: f64) -> RowEchelon<S> {
    let thr = threshold(input, tol);
    let mut m: Vec<Vec<S>> = input.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let best = (r..m.len())
            .filter(|&i| !m[i][c].is_zero_within(thr))
            .max_by(|&a, &b| m[a][c].to_f64().abs().total_cmp(&m[b][c].to_f64().abs()));
        let Some(p) = best else {
            for row in m.iter_mut().skip(r) {
                row[c] = S::zero();
            }
            continue;
        };
        m.swap(r, p);
        let inv = S::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        m[r][c] = S::one();
        for i in 0..m.len() {
            if i == r || m[i][c].is_exact_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in 0..cols {
                if m[r][j].is_exact_zero() {
                    continue;
                }
                let v = m[i][j].clone() - f.clone() * m[r][j].clone();
                m[i][j] = if v.is_zero_within(thr) { S::zero() } else { v };
            }
            m[i][c] = S::zero();
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    RowEchelon { rows: m, pivots, cols }
}

impl<S: Scalar> RowEchelon<S> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Basis of the solution space of `M x = 0`; one vector per free column,
    /// with that free variable set to one.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let free: Vec<usize> = (0..self.cols).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); self.cols];
                v[f] = S::one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    v[p] = -row[f].clone();
                }
                v
            })
            .collect()
    }

    /// Residual of `v` after eliminating the pivot columns with the rows of
    /// this echelon form; zero iff `v` lies in the row space.
    pub fn reduce(&self, v: &[S]) -> Vec<S> {
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = out[p].clone();
            if f.is_exact_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(row) {
                *o = o.clone() - f.clone() * x.clone();
            }
        }
        out
    }
}

pub fn rank<S: Scalar>(rows: &[Vec<S>], cols: usize, tol: f64) -> usize {
    row_reduce(rows, cols, tol).rank()
}

pub fn nullspace<S: Scalar>(rows: &[Vec<S>], cols: usize, tol: f64) -> Vec<Vec<S>> {
    row_reduce(rows, cols, tol).nullspace()
}

/// Determinant by elimination (exact for exact fields).
pub fn determinant<S: Scalar>(square: &[Vec<S>]) -> S {
    let n = square.len();
    let mut m = square.to_vec();
    let mut det = S::one();
    for c in 0..n {
        let best = (c..n)
            .filter(|&i| !m[i][c].is_exact_zero())
            .max_by(|&a, &b| m[a][c].to_f64().abs().total_cmp(&m[b][c].to_f64().abs()));
        let Some(p) = best else { return S::zero() };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let piv = m[c][c].clone();
        det = det * piv.clone();
        for i in c + 1..n {
            if m[i][c].is_exact_zero() {
                continue;
            }
            let f = m[i][c].clone() / piv.clone();
            for j in c..n {
                m[i][j] = m[i][j].clone() - f.clone() * m[c][j].clone();
            }
        }
    }
    det
}
