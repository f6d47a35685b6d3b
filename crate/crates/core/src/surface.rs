//! Extrinsic geometry of a chart and finite-difference checks of the
//! support-function identities.
//!
//! Conventions: `ε_N = (-1)^ν`, `A = -∇̃N`, `H = ε_N tr A`, `f_i = ⟨N, X_i⟩`.
//! The second fundamental form is assembled from the frames,
//! `b_kl = ⟨η, ∂_k T_l + ½[T_k, T_l]⟩`, so `η` enters only through its value;
//! its derivatives are reserved for the independent side of each check.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::chart::{AmbientData, Frame, ImmersionChart, Md, Vd, MAX_DIM};
use crate::error::{GeoError, Result};

pub const DEFAULT_H: f64 = 1e-3;

/// Residual maxima below this are treated as round-off when estimating
/// convergence order.
pub const NOISE_FLOOR: f64 = 1e-8;

const ZERO_MD: Md = [[0.0; MAX_DIM]; MAX_DIM];

/// Geometry at one parameter point, in fixed buffers.
#[derive(Clone, Copy, Debug)]
pub struct PointCore {
    pub n: usize,
    pub d: usize,
    pub frame: Frame,
    pub g: Md,
    pub ginv: Md,
    /// `L⁻¹` for `g = L Lᵀ`; rows give an orthonormal tangent frame.
    pub linv: Md,
    pub sqrt_det: f64,
    pub eta: Vd,
    /// Second fundamental form in coordinates (symmetrized).
    pub b: Md,
    /// `A` in coordinates: `A ∂_l = Σ_k a[k][l] ∂_k`.
    pub a: Md,
    /// `A` in the orthonormal frame (symmetrized).
    pub shape: Md,
    /// `‖A − Aᵀ‖_F` before symmetrization.
    pub asym: f64,
    pub mean_curvature: f64,
    pub a_norm_sq: f64,
    pub ric_normal: f64,
}

/// Serializable per-point record.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct HypersurfacePointData {
    pub u: Vec<f64>,
    pub frame: Vec<Vec<f64>>,
    pub metric: Vec<Vec<f64>>,
    pub normal: Vec<f64>,
    pub supports: Vec<f64>,
    pub shape: Vec<Vec<f64>>,
    pub mean_curvature: f64,
    pub a_norm_sq: f64,
    pub ric_normal: f64,
    pub eps_n: f64,
}

impl HypersurfacePointData {
    /// `f_X = ⟨η, X⟩`.
    pub fn support_function(&self, x: &[f64], eps: &[i8]) -> f64 {
        self.normal.iter().zip(x).zip(eps).map(|((a, b), e)| *e as f64 * a * b).sum()
    }

    pub fn gauss_map(&self) -> &[f64] {
        &self.normal
    }
}

fn block(m: &Md, r: usize, c: usize) -> Vec<Vec<f64>> {
    (0..r).map(|i| m[i][..c].to_vec()).collect()
}

/// Cholesky of the leading `n×n` block; `None` unless positive definite.
fn cholesky(g: &Md, n: usize) -> Option<Md> {
    let mut l = ZERO_MD;
    for i in 0..n {
        for j in 0..=i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

fn lower_inverse(l: &Md, n: usize) -> Md {
    let mut inv = ZERO_MD;
    for i in 0..n {
        inv[i][i] = 1.0 / l[i][i];
        for j in 0..i {
            let mut s = 0.0;
            for k in j..i {
                s += l[i][k] * inv[k][j];
            }
            inv[i][j] = -s / l[i][i];
        }
    }
    inv
}

/// `L⁻¹ M L⁻ᵀ`.
fn congruence(linv: &Md, m: &Md, n: usize) -> Md {
    let mut tmp = ZERO_MD;
    for a in 0..n {
        for l in 0..n {
            let mut s = 0.0;
            for k in 0..=a {
                s += linv[a][k] * m[k][l];
            }
            tmp[a][l] = s;
        }
    }
    let mut out = ZERO_MD;
    for a in 0..n {
        for b in 0..n {
            let mut s = 0.0;
            for l in 0..=b {
                s += tmp[a][l] * linv[b][l];
            }
            out[a][b] = s;
        }
    }
    out
}

fn frob_n(m: &Md, n: usize) -> f64 {
    let mut s = 0.0;
    for row in m.iter().take(n) {
        for x in row.iter().take(n) {
            s += x * x;
        }
    }
    s.sqrt()
}

/// Builds [`PointCore`] from the frame, its partial derivatives
/// (`dframe[k].t[l] = ∂_k T_l`) and the oriented unit normal.
pub fn point_core(chart: &ImmersionChart, frame: &Frame, dframe: &[Frame], eta: &Vd, u: &[f64]) -> Result<PointCore> {
    let data = chart.ambient_data();
    let (n, d) = (chart.dim(), chart.ambient_dim());
    let mut g = ZERO_MD;
    for k in 0..n {
        for l in k..n {
            let v = data.dot(&frame.t[k], &frame.t[l]);
            g[k][l] = v;
            g[l][k] = v;
        }
    }
    let l = cholesky(&g, n).ok_or_else(|| GeoError::NonSpacelike { u: u.to_vec() })?;
    let linv = lower_inverse(&l, n);
    let mut ginv = ZERO_MD;
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for a in i.max(j)..n {
                s += linv[a][i] * linv[a][j];
            }
            ginv[i][j] = s;
        }
    }
    let sqrt_det = (0..n).map(|i| l[i][i]).product();

    let mut braw = ZERO_MD;
    for k in 0..n {
        for m in 0..n {
            let br = data.bracket(&frame.t[k], &frame.t[m]);
            let mut v = [0.0; MAX_DIM];
            for i in 0..d {
                v[i] = dframe[k].t[m][i] + 0.5 * br[i];
            }
            braw[k][m] = data.dot(eta, &v);
        }
    }
    let shape_raw = congruence(&linv, &braw, n);
    let mut asym = 0.0;
    let mut b = ZERO_MD;
    let mut shape = ZERO_MD;
    for i in 0..n {
        for j in 0..n {
            asym += (shape_raw[i][j] - shape_raw[j][i]).powi(2);
            b[i][j] = 0.5 * (braw[i][j] + braw[j][i]);
            shape[i][j] = 0.5 * (shape_raw[i][j] + shape_raw[j][i]);
        }
    }
    let mut a = ZERO_MD;
    for k in 0..n {
        for m in 0..n {
            let mut s = 0.0;
            for q in 0..n {
                s += ginv[k][q] * b[q][m];
            }
            a[k][m] = s;
        }
    }
    let eps_n = chart.eps_n();
    let trace: f64 = (0..n).map(|i| shape[i][i]).sum();
    let a_norm_sq = frob_n(&shape, n).powi(2);
    Ok(PointCore {
        n,
        d,
        frame: *frame,
        g,
        ginv,
        linv,
        sqrt_det,
        eta: *eta,
        b,
        a,
        shape,
        asym: asym.sqrt(),
        mean_curvature: eps_n * trace,
        a_norm_sq,
        ric_normal: data.ricci(eta),
    })
}

impl PointCore {
    pub fn support(&self, data: &AmbientData, x: &Vd) -> f64 {
        data.dot(&self.eta, x)
    }

    /// Coordinates of `X^⊤`: solves `g a = (⟨X, T_k⟩)_k`.
    pub fn tangent_coords(&self, data: &AmbientData, x: &Vd) -> Vd {
        let mut r = [0.0; MAX_DIM];
        for (k, rk) in r.iter_mut().enumerate().take(self.n) {
            *rk = data.dot(x, &self.frame.t[k]);
        }
        self.mul_ginv(&r)
    }

    /// Coordinates of `X_j^⊤` for a basis vector: `⟨X_j, T_k⟩ = ε_j T_k^j`.
    fn basis_tangent_coords(&self, data: &AmbientData, j: usize) -> Vd {
        let mut r = [0.0; MAX_DIM];
        for (k, rk) in r.iter_mut().enumerate().take(self.n) {
            *rk = data.eps[j] * self.frame.t[k][j];
        }
        self.mul_ginv(&r)
    }

    fn mul_ginv(&self, r: &Vd) -> Vd {
        let mut out = [0.0; MAX_DIM];
        for k in 0..self.n {
            let mut s = 0.0;
            for l in 0..self.n {
                s += self.ginv[k][l] * r[l];
            }
            out[k] = s;
        }
        out
    }

    fn apply_a(&self, v: &Vd) -> Vd {
        let mut out = [0.0; MAX_DIM];
        for k in 0..self.n {
            let mut s = 0.0;
            for l in 0..self.n {
                s += self.a[k][l] * v[l];
            }
            out[k] = s;
        }
        out
    }

    fn inner(&self, x: &Vd, y: &Vd) -> f64 {
        let mut s = 0.0;
        for k in 0..self.n {
            for l in 0..self.n {
                s += x[k] * self.g[k][l] * y[l];
            }
        }
        s
    }

    pub fn to_data(&self, u: &[f64], data: &AmbientData, eps_n: f64) -> HypersurfacePointData {
        let (n, d) = (self.n, self.d);
        HypersurfacePointData {
            u: u.to_vec(),
            frame: block(&self.frame.t, n, d),
            metric: block(&self.g, n, n),
            normal: self.eta[..d].to_vec(),
            supports: (0..d).map(|i| data.eps[i] * self.eta[i]).collect(),
            shape: block(&self.shape, n, n),
            mean_curvature: self.mean_curvature,
            a_norm_sq: self.a_norm_sq,
            ric_normal: self.ric_normal,
            eps_n,
        }
    }

    /// `n − rank(A)` with eigenvalues below `tol·max(1, max|λ|)` counted as zero.
    pub fn nullity(&self, tol: f64) -> usize {
        let eig = self.eigenvalues();
        let top = eig.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        eig.iter().filter(|x| x.abs() <= tol * top).count()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_fn(self.n, self.n, |i, j| self.shape[i][j]);
        let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// `‖A − (tr A / n) I‖_F`.
    pub fn umbilicity_defect(&self) -> f64 {
        let n = self.n;
        let tr: f64 = (0..n).map(|i| self.shape[i][i]).sum::<f64>() / n as f64;
        let mut m = self.shape;
        for (i, row) in m.iter_mut().enumerate().take(n) {
            row[i] -= tr;
        }
        frob_n(&m, n)
    }
}

/// Offsets around `u` at which frames are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StencilKind {
    /// `u` and `u ± h e_k`.
    Small,
    /// Adds `u ± 2h e_k` and `u ± h e_k ± h e_l` for nested differences.
    Full,
}

struct Stencil {
    n: usize,
    kind: StencilKind,
    frames: Vec<Frame>,
    etas: Vec<Vd>,
    offsets: Vec<[i8; MAX_DIM]>,
    point: Vec<f64>,
}

impl Stencil {
    fn new(n: usize, kind: StencilKind) -> Self {
        let mut offsets = vec![[0i8; MAX_DIM]];
        for k in 0..n {
            for (mag, s) in [(1, 1), (1, -1), (2, 1), (2, -1)] {
                let mut o = [0i8; MAX_DIM];
                o[k] = mag * s;
                offsets.push(o);
            }
        }
        if kind == StencilKind::Full {
            for k in 0..n {
                for l in k + 1..n {
                    for (sk, sl) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                        let mut o = [0i8; MAX_DIM];
                        o[k] = sk;
                        o[l] = sl;
                        offsets.push(o);
                    }
                }
            }
        }
        let len = offsets.len();
        Self { n, kind, frames: vec![Frame::default(); len], etas: vec![[0.0; MAX_DIM]; len], offsets, point: vec![0.0; n] }
    }

    #[inline]
    fn single(k: usize, s: i8, mag: i8) -> usize {
        1 + 4 * k + 2 * (mag as usize - 1) + usize::from(s < 0)
    }

    #[inline]
    fn pair(&self, k: usize, sk: i8, l: usize, sl: i8) -> usize {
        let (k, sk, l, sl) = if k < l { (k, sk, l, sl) } else { (l, sl, k, sk) };
        let n = self.n;
        let p = k * (2 * n - k - 1) / 2 + (l - k - 1);
        1 + 4 * n + 4 * p + 2 * usize::from(sk < 0) + usize::from(sl < 0)
    }

    /// Index of `u + h(a·e_k + b·e_l)` for the offsets the stencil holds.
    fn at(&self, k: usize, a: i8, l: usize, b: i8) -> usize {
        match (a, b) {
            (0, 0) => 0,
            (a, 0) => Self::single(k, a.signum(), a.abs()),
            (0, b) => Self::single(l, b.signum(), b.abs()),
            _ if k == l => {
                let t = a + b;
                if t == 0 {
                    0
                } else {
                    Self::single(k, t.signum(), t.abs())
                }
            }
            _ => self.pair(k, a, l, b),
        }
    }

    fn fill(&mut self, chart: &ImmersionChart, u: &[f64], h: f64) -> Result<()> {
        let reach = 2.0 * h;
        for k in 0..self.n {
            if u[k] - reach < chart.lower()[k] || u[k] + reach > chart.upper()[k] {
                return Err(GeoError::DomainViolation { u: u.to_vec() });
            }
        }
        for i in 0..self.offsets.len() {
            for k in 0..self.n {
                self.point[k] = u[k] + h * self.offsets[i][k] as f64;
            }
            chart.eval_frame(&self.point, &mut self.frames[i]);
            self.etas[i] = chart.normal_from_frame(&self.frames[i], &self.point)?;
        }
        Ok(())
    }

    /// Core at `u + h(a e_k)` (or the center when `a = 0`).
    fn core_at(&self, chart: &ImmersionChart, u: &[f64], h: f64, k: usize, a: i8) -> Result<PointCore> {
        let n = self.n;
        let d = n + 1;
        let center = self.at(k, a, k, 0);
        let mut dframe = [Frame::default(); MAX_DIM];
        for (m, df) in dframe.iter_mut().enumerate().take(n) {
            let (p, q) = (self.at(k, a, m, 1), self.at(k, a, m, -1));
            let f = &self.frames;
            if a == 0 {
                // Fourth order at the center keeps A symmetric to round-off.
                let (p2, q2) = (Self::single(m, 1, 2), Self::single(m, -1, 2));
                for l in 0..n {
                    for i in 0..d {
                        df.t[l][i] = (8.0 * (f[p].t[l][i] - f[q].t[l][i]) - (f[p2].t[l][i] - f[q2].t[l][i])) / (12.0 * h);
                    }
                }
            } else {
                for l in 0..n {
                    for i in 0..d {
                        df.t[l][i] = (f[p].t[l][i] - f[q].t[l][i]) / (2.0 * h);
                    }
                }
            }
        }
        let mut pt = [0.0; MAX_DIM];
        pt[..n].copy_from_slice(&u[..n]);
        pt[k] += h * a as f64;
        point_core(chart, &self.frames[center], &dframe[..n], &self.etas[center], &pt[..n])
    }
}

/// Everything the lemma checks need at one point.
#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub core: PointCore,
    /// `df[j][k] = ∂_k f_j`.
    pub df: Md,
    /// `deta[k] = ∂_k η`.
    pub deta: Md,
    /// `Δ f_j` (full stencil only).
    pub lap: Option<Vd>,
    /// `∂_k H` (full stencil only).
    pub dh: Option<Vd>,
}

fn local_geometry_with(st: &mut Stencil, chart: &ImmersionChart, u: &[f64], h: f64) -> Result<LocalGeometry> {
    let data = chart.ambient_data();
    let (n, d) = (chart.dim(), chart.ambient_dim());
    st.fill(chart, u, h)?;
    let core = st.core_at(chart, u, h, 0, 0)?;
    let mut deta = ZERO_MD;
    let mut df = ZERO_MD;
    for k in 0..n {
        let (p, q) = (Stencil::single(k, 1, 1), Stencil::single(k, -1, 1));
        for i in 0..d {
            deta[k][i] = (st.etas[p][i] - st.etas[q][i]) / (2.0 * h);
            df[i][k] = data.eps[i] * deta[k][i];
        }
    }
    if st.kind == StencilKind::Small {
        return Ok(LocalGeometry { core, df, deta, lap: None, dh: None });
    }
    let mut dh = [0.0; MAX_DIM];
    let mut lap = [0.0; MAX_DIM];
    for k in 0..n {
        let mut flux = [[0.0; MAX_DIM]; 2];
        let mut hm = [0.0; 2];
        for (side, a) in [(0usize, 1i8), (1, -1)] {
            let c = st.core_at(chart, u, h, k, a)?;
            hm[side] = c.mean_curvature;
            // ∂_l f_j at u + a h e_k
            let mut grad = ZERO_MD;
            for l in 0..n {
                let (p, q) = (st.at(k, a, l, 1), st.at(k, a, l, -1));
                for j in 0..d {
                    grad[j][l] = data.eps[j] * (st.etas[p][j] - st.etas[q][j]) / (2.0 * h);
                }
            }
            for j in 0..d {
                let mut s = 0.0;
                for l in 0..n {
                    s += c.ginv[k][l] * grad[j][l];
                }
                flux[side][j] = c.sqrt_det * s;
            }
        }
        dh[k] = (hm[0] - hm[1]) / (2.0 * h);
        for j in 0..d {
            lap[j] += (flux[0][j] - flux[1][j]) / (2.0 * h);
        }
    }
    for x in lap.iter_mut().take(d) {
        *x /= core.sqrt_det;
    }
    Ok(LocalGeometry { core, df, deta, lap: Some(lap), dh: Some(dh) })
}

pub fn local_geometry(chart: &ImmersionChart, u: &[f64], h: f64, kind: StencilKind) -> Result<LocalGeometry> {
    chart.check_domain(u)?;
    let mut st = Stencil::new(chart.dim(), kind);
    local_geometry_with(&mut st, chart, u, h)
}

/// Point data with the shape operator from central differences of the frame.
pub fn point_data(chart: &ImmersionChart, u: &[f64], h: f64) -> Result<HypersurfacePointData> {
    let lg = local_geometry(chart, u, h, StencilKind::Small)?;
    Ok(lg.core.to_data(u, chart.ambient_data(), chart.eps_n()))
}

pub fn support_function(chart: &ImmersionChart, pd: &HypersurfacePointData, x: &[f64]) -> f64 {
    pd.support_function(x, chart.ambient().signature().signs())
}

/// Residuals of every pointwise identity at one point; `None` where not applicable.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PointResidues {
    pub normal_orthogonality: f64,
    pub normal_unit: f64,
    pub shape_symmetry: f64,
    pub lemma31: f64,
    pub lemma32: f64,
    pub lemma34: f64,
    pub lemma35: Option<f64>,
    pub gauss_duality: f64,
    pub gauss_duality_corrected: f64,
    pub mean_curvature: f64,
    pub a_norm: f64,
    pub ric_normal: f64,
    pub support_x: Option<f64>,
    pub nullity: usize,
    pub umbilicity_defect: f64,
    pub cs_gap: f64,
    pub threshold: f64,
    pub projection: Option<f64>,
    pub jacobi: Option<f64>,
    pub pi_norm: Option<f64>,
    pub homothety: Option<f64>,
    pub eta: Vec<f64>,
}

/// Residual of the quadratic support identity: `max_l |Σ_{i,j} c_jl^i ε_j f_i f_j|`.
pub fn lemma31_residual(data: &AmbientData, f: &Vd) -> f64 {
    let mut acc = [0.0; MAX_DIM];
    for &(j, l, i, c) in &data.terms {
        acc[l] += c * data.eps[j] * f[i] * f[j];
    }
    acc[..data.d].iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn supports(data: &AmbientData, eta: &Vd) -> Vd {
    let mut f = [0.0; MAX_DIM];
    for i in 0..data.d {
        f[i] = data.eps[i] * eta[i];
    }
    f
}

/// Per-`j` residuals of the gradient (3.2), squared-gradient (3.4) and
/// Laplacian (3.5) identities.
pub fn lemma_residuals(chart: &ImmersionChart, lg: &LocalGeometry) -> (Vd, Vd, Option<Vd>) {
    let data = chart.ambient_data();
    let c = &lg.core;
    let (n, d) = (c.n, c.d);
    let f = supports(data, &c.eta);
    let mut xt = ZERO_MD;
    for (j, row) in xt.iter_mut().enumerate().take(d) {
        *row = c.basis_tangent_coords(data, j);
    }
    let mut r32 = [0.0; MAX_DIM];
    let mut r34 = [0.0; MAX_DIM];
    let mut r35 = [0.0; MAX_DIM];
    for j in 0..d {
        let axj = c.apply_a(&xt[j]);
        // ½ Σ_{i,l} c_lj^i ε_l f_i X_l^⊤ and the scalars of (3.4)
        let mut conn = [0.0; MAX_DIM];
        let mut cross = 0.0;
        let mut w = [0.0; MAX_DIM];
        for &(l, jj, i, cc) in &data.terms {
            if jj != j {
                continue;
            }
            let coef = cc * data.eps[l] * f[i];
            for k in 0..n {
                conn[k] += 0.5 * coef * xt[l][k];
            }
            cross += c.inner(&xt[l], &axj) * coef;
            w[l] += cc * f[i];
        }
        let quarter: f64 = (0..d).map(|l| 0.25 * data.eps[l] * w[l] * w[l]).sum();
        let mut grad = [0.0; MAX_DIM];
        for k in 0..n {
            for m in 0..n {
                grad[k] += c.ginv[k][m] * lg.df[j][m];
            }
        }
        let mut diff = [0.0; MAX_DIM];
        for k in 0..n {
            diff[k] = grad[k] - (-axj[k] + conn[k]);
        }
        r32[j] = c.inner(&diff, &diff).max(0.0).sqrt();
        let lhs34 = c.inner(&grad, &grad);
        let rhs34 = c.inner(&axj, &axj) - cross + quarter;
        r34[j] = (lhs34 - rhs34).abs();
        if let (Some(lap), Some(dh)) = (&lg.lap, &lg.dh) {
            let xh: f64 = (0..n).map(|k| xt[j][k] * dh[k]).sum();
            let eps_n = chart.eps_n();
            let rhs = -eps_n * xh - eps_n * (c.a_norm_sq + c.ric_normal) * f[j];
            r35[j] = (lap[j] - rhs).abs();
        }
    }
    (r32, r34, lg.lap.map(|_| r35))
}

/// Frobenius residuals of `dη = −A` and of `dη = −A − ½ ad(·)η` in the
/// orthonormal tangent frame.
pub fn gauss_duality_residuals(chart: &ImmersionChart, lg: &LocalGeometry) -> (f64, f64) {
    let data = chart.ambient_data();
    let c = &lg.core;
    let n = c.n;
    let mut lit = ZERO_MD;
    let mut cor = ZERO_MD;
    for k in 0..n {
        let br = data.bracket(&c.frame.t[k], &c.eta);
        for l in 0..n {
            let j = data.dot(&lg.deta[k], &c.frame.t[l]);
            lit[k][l] = j + c.b[k][l];
            cor[k][l] = lit[k][l] + 0.5 * data.dot(&br, &c.frame.t[l]);
        }
    }
    (frob_n(&congruence(&c.linv, &lit, n), n), frob_n(&congruence(&c.linv, &cor, n), n))
}

/// `max(||π_X η|² − (1 − f_X²)|, ||X^⊤|² − |π_X η|²|)` for a unit `X` in a
/// Riemannian ambient.
pub fn projection_residual(data: &AmbientData, core: &PointCore, x: &Vd) -> (f64, f64) {
    let fx = core.support(data, x);
    let mut pi = [0.0; MAX_DIM];
    for i in 0..data.d {
        pi[i] = core.eta[i] - fx * x[i];
    }
    let pi2 = data.dot(&pi, &pi);
    let xt = core.tangent_coords(data, x);
    let xt2 = core.inner(&xt, &xt);
    (((pi2 - (1.0 - fx * fx)).abs()).max((xt2 - pi2).abs()), pi2.max(0.0).sqrt())
}

/// Pullback of the ambient product under `η` against `(H/n)² g`, relative.
pub fn homothety_deviation(lg: &LocalGeometry, data: &AmbientData) -> f64 {
    let c = &lg.core;
    let n = c.n;
    let factor = (c.mean_curvature / n as f64).powi(2);
    let mut pull = ZERO_MD;
    for k in 0..n {
        for l in 0..n {
            pull[k][l] = data.dot(&lg.deta[k], &lg.deta[l]);
        }
    }
    let mut o = congruence(&c.linv, &pull, n);
    for (i, row) in o.iter_mut().enumerate().take(n) {
        row[i] -= factor;
    }
    frob_n(&o, n) / (factor * (n as f64).sqrt())
}

/// Options for a grid scan.
#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub h: f64,
    pub stencil: StencilKind,
    /// Reference element for support-function statistics.
    pub x: Option<Vd>,
    /// Relative tolerance of the nullity count.
    pub tol: f64,
}

/// Uniform tensor grid kept `margin` away from the domain boundary.
#[derive(Clone, Debug, Serialize)]
pub struct Grid {
    pub per_axis: usize,
    pub margin: f64,
    pub axes: Vec<Vec<f64>>,
}

impl Grid {
    pub fn new(chart: &ImmersionChart, per_axis: usize, margin: f64) -> Result<Self> {
        Self::in_box(chart, per_axis, margin, 1.0)
    }

    /// Grid on the central sub-box scaled by `fraction`.
    pub fn in_box(chart: &ImmersionChart, per_axis: usize, margin: f64, fraction: f64) -> Result<Self> {
        if per_axis < 2 {
            return Err(GeoError::InvalidParam { name: "grid".into(), message: "at least 2 points per axis".into() });
        }
        let axes = (0..chart.dim())
            .map(|k| {
                let (lo, hi) = (chart.lower()[k], chart.upper()[k]);
                let mid = 0.5 * (lo + hi);
                let half = 0.5 * (hi - lo) * fraction - margin;
                if half <= 0.0 {
                    return Err(GeoError::InvalidParam { name: "grid".into(), message: "margin exceeds domain".into() });
                }
                Ok((0..per_axis).map(|i| mid - half + 2.0 * half * i as f64 / (per_axis - 1) as f64).collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Ok(Self { per_axis, margin, axes })
    }

    pub fn len(&self) -> usize {
        self.per_axis.pow(self.axes.len() as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let n = self.axes.len();
        let mut out = vec![0; n];
        for k in (0..n).rev() {
            out[k] = idx % self.per_axis;
            idx /= self.per_axis;
        }
        out
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx).iter().enumerate().map(|(k, &i)| self.axes[k][i]).collect()
    }
}

/// Evaluates every pointwise residual at `u`.
pub fn residues_at(chart: &ImmersionChart, u: &[f64], opts: &ScanOptions) -> Result<PointResidues> {
    let mut st = Stencil::new(chart.dim(), opts.stencil);
    residues_with(&mut st, chart, u, opts)
}

fn residues_with(st: &mut Stencil, chart: &ImmersionChart, u: &[f64], opts: &ScanOptions) -> Result<PointResidues> {
    let data = chart.ambient_data();
    let lg = local_geometry_with(st, chart, u, opts.h)?;
    let c = &lg.core;
    let (n, d) = (c.n, c.d);
    let mut orth = 0.0f64;
    for k in 0..n {
        let scale = data.dot(&c.frame.t[k], &c.frame.t[k]).abs().sqrt().max(1e-300);
        orth = orth.max((data.dot(&c.eta, &c.frame.t[k]) / scale).abs());
    }
    let unit = (data.dot(&c.eta, &c.eta) - chart.eps_n()).abs();
    let f = supports(data, &c.eta);
    let (r32, r34, r35) = lemma_residuals(chart, &lg);
    let max_d = |v: &Vd| v[..d].iter().fold(0.0f64, |m, x| m.max(*x));
    let (gl, gc) = gauss_duality_residuals(chart, &lg);
    let tr: f64 = (0..n).map(|i| c.shape[i][i]).sum();
    let riemannian = !chart.is_lorentzian();
    let (projection, pi_norm) = match (&opts.x, riemannian) {
        (Some(x), true) => {
            let (r, p) = projection_residual(data, c, x);
            (Some(r), Some(p))
        }
        _ => (None, None),
    };
    let jacobi = match (&opts.x, &lg.lap) {
        (Some(x), Some(lap)) if riemannian => {
            let lap_x: f64 = (0..d).map(|j| x[j] * lap[j]).sum();
            let fx = c.support(data, x);
            Some((lap_x + (c.ric_normal + c.a_norm_sq) * fx).abs())
        }
        _ => None,
    };
    let homothety = (chart.is_lorentzian() && c.mean_curvature.abs() > 1e-12).then(|| homothety_deviation(&lg, data));
    Ok(PointResidues {
        normal_orthogonality: orth,
        normal_unit: unit,
        shape_symmetry: c.asym,
        lemma31: lemma31_residual(data, &f),
        lemma32: max_d(&r32),
        lemma34: max_d(&r34),
        lemma35: r35.as_ref().map(max_d),
        gauss_duality: gl,
        gauss_duality_corrected: gc,
        mean_curvature: c.mean_curvature,
        a_norm: c.a_norm_sq.sqrt(),
        ric_normal: c.ric_normal,
        support_x: opts.x.as_ref().map(|x| c.support(data, x)),
        nullity: c.nullity(opts.tol),
        umbilicity_defect: c.umbilicity_defect(),
        cs_gap: c.a_norm_sq - tr * tr / n as f64,
        threshold: c.mean_curvature.powi(2) + n as f64 * c.ric_normal,
        projection,
        jacobi,
        pi_norm,
        homothety,
        eta: c.eta[..d].to_vec(),
    })
}

/// Residues at every grid point, in grid order.
pub fn scan(chart: &ImmersionChart, grid: &Grid, opts: &ScanOptions) -> Result<Vec<PointResidues>> {
    let n = chart.dim();
    (0..grid.len())
        .into_par_iter()
        .map_init(
            || Stencil::new(n, opts.stencil),
            |st, idx| {
                let u = grid.point(idx);
                residues_with(st, chart, &u, opts)
            },
        )
        .collect()
}

/// Summary statistics of one residual family.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Stat {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub argmin: Vec<f64>,
    pub argmax: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_ratio: Option<f64>,
}

impl Stat {
    pub fn of(grid: &Grid, values: impl Iterator<Item = (usize, f64)>) -> Option<Self> {
        let mut count = 0;
        let (mut min, mut max, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        let (mut amin, mut amax) = (0, 0);
        for (i, v) in values {
            count += 1;
            sum += v;
            if v < min || count == 1 {
                min = v;
                amin = i;
            }
            if v > max || count == 1 {
                max = v;
                amax = i;
            }
        }
        (count > 0).then(|| Stat {
            count,
            min,
            max,
            mean: sum / count as f64,
            argmin: grid.point(amin),
            argmax: grid.point(amax),
            convergence_ratio: None,
        })
    }

    pub fn spread(&self) -> f64 {
        self.max - self.min
    }

    /// Population standard deviation.
    pub fn stddev(values: &[f64]) -> f64 {
        if values.is_empty() {
            return 0.0;
        }
        let m = values.iter().sum::<f64>() / values.len() as f64;
        (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
    }
}

/// `max_h / max_{h/2}`, or `None` when the coarse maximum is below [`NOISE_FLOOR`].
pub fn convergence_ratio(coarse_max: f64, fine_max: f64) -> Option<f64> {
    (coarse_max > NOISE_FLOOR).then(|| coarse_max / fine_max)
}

/// Transversality of the chart to `X` on a grid; a sampled statement only.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TransversalityScan {
    pub min_abs_support: f64,
    pub positive: usize,
    pub negative: usize,
    /// Grid-adjacent pairs with opposite strict signs.
    pub sign_changes: usize,
    pub transversal: bool,
    pub sampled_only: bool,
}

pub fn transversality_from_values(grid: &Grid, values: &[f64], tol: f64) -> TransversalityScan {
    let n = grid.axes.len();
    let sign = |v: f64| if v > tol { 1 } else if v < -tol { -1 } else { 0 };
    let mut changes = 0;
    for (idx, v) in values.iter().enumerate() {
        let mi = grid.multi_index(idx);
        let mut stride = 1;
        for k in (0..n).rev() {
            if mi[k] + 1 < grid.per_axis && sign(*v) * sign(values[idx + stride]) < 0 {
                changes += 1;
            }
            stride *= grid.per_axis;
        }
    }
    let min_abs = values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let positive = values.iter().filter(|v| sign(**v) > 0).count();
    let negative = values.iter().filter(|v| sign(**v) < 0).count();
    TransversalityScan {
        min_abs_support: min_abs,
        positive,
        negative,
        sign_changes: changes,
        transversal: min_abs > tol && (positive == 0 || negative == 0),
        sampled_only: true,
    }
}

pub fn transversality_scan(chart: &ImmersionChart, x: &Vd, grid: &Grid, tol: f64) -> Result<TransversalityScan> {
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|idx| chart.normal(&grid.point(idx)).map(|eta| chart.ambient_data().dot(&eta, x)))
        .collect::<Result<_>>()?;
    Ok(transversality_from_values(grid, &values, tol))
}

/// Nullity of the shape operator at one point.
pub fn gauss_nullity(chart: &ImmersionChart, u: &[f64], h: f64, tol: f64) -> Result<usize> {
    Ok(local_geometry(chart, u, h, StencilKind::Small)?.core.nullity(tol))
}

/// Mean curvature spread over a grid; errors when above `tol`.
pub fn require_constant_h(chart: &ImmersionChart, grid: &Grid, h: f64, tol: f64) -> Result<f64> {
    let hs: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map_init(
            || Stencil::new(chart.dim(), StencilKind::Small),
            |st, idx| local_geometry_with(st, chart, &grid.point(idx), h).map(|lg| lg.core.mean_curvature),
        )
        .collect::<Result<_>>()?;
    let (lo, hi) = hs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
    let spread = hi - lo;
    if spread > tol {
        return Err(GeoError::NonConstantMeanCurvature { spread });
    }
    Ok(0.5 * (hi + lo))
}

/// `|Δf_X + (Ric_G(N,N) + |A|²) f_X|` at `u`; the caller certifies constant `H`.
pub fn jacobi_residual(chart: &ImmersionChart, u: &[f64], x: &Vd, h: f64) -> Result<f64> {
    if chart.is_lorentzian() {
        return Err(GeoError::WrongAmbient("Riemannian"));
    }
    let lg = local_geometry(chart, u, h, StencilKind::Full)?;
    let data = chart.ambient_data();
    let lap = lg.lap.expect("full stencil");
    let lap_x: f64 = (0..chart.ambient_dim()).map(|j| x[j] * lap[j]).sum();
    Ok((lap_x + (lg.core.ric_normal + lg.core.a_norm_sq) * lg.core.support(data, x)).abs())
}

/// Outcome of the gradient-bound chain at one point.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct GradientBound {
    /// `|∇f_X|` by Richardson-extrapolated central differences.
    pub grad_norm: f64,
    pub pi_norm: f64,
    pub a_norm: f64,
    /// `max_{l,i ≤ n} |c_{l,n+1}^i|` in the adapted basis.
    pub c_max: f64,
    /// Explicit constant with `|∇f_X| ≤ C |π_X η|`.
    pub constant: f64,
    /// `√C₁ (|A||X^⊤| + ½ Σ_{i≤n} |f_i|) − |∇f_X|`, the first link of the chain.
    pub chain_slack: f64,
    /// `C |π_X η| − |∇f_X|`.
    pub slack: f64,
}

/// Orthonormal basis of a Riemannian algebra ending with the unit `x`.
pub fn adapted_basis(d: usize, x: &Vd) -> Result<Vec<Vd>> {
    let nx = x[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
    if (nx - 1.0).abs() > 1e-10 {
        return Err(GeoError::NonUnitVector);
    }
    let mut basis: Vec<Vd> = Vec::with_capacity(d);
    let mut last = [0.0; MAX_DIM];
    last[..d].copy_from_slice(&x[..d]);
    let mut all = vec![last];
    for e in 0..d {
        if all.len() == d {
            break;
        }
        let mut v = [0.0; MAX_DIM];
        v[e] = 1.0;
        for w in &all {
            let p: f64 = (0..d).map(|i| v[i] * w[i]).sum();
            for i in 0..d {
                v[i] -= p * w[i];
            }
        }
        let nv = v[..d].iter().map(|a| a * a).sum::<f64>().sqrt();
        if nv > 1e-6 {
            for a in v.iter_mut() {
                *a /= nv;
            }
            all.push(v);
        }
    }
    basis.extend(all.into_iter().skip(1));
    basis.push(last);
    Ok(basis)
}

pub fn gradient_bound_check(chart: &ImmersionChart, u: &[f64], x: &Vd, h: f64) -> Result<GradientBound> {
    if chart.is_lorentzian() {
        return Err(GeoError::WrongAmbient("Riemannian"));
    }
    let data = chart.ambient_data();
    let (n, d) = (chart.dim(), chart.ambient_dim());
    let basis = adapted_basis(d, x)?;
    // c'_{l,n+1}^i = ⟨[w_l, w_{n+1}], w_i⟩ in the adapted orthonormal basis.
    let mut c_max = 0.0f64;
    for l in 0..n {
        let br = data.bracket(&basis[l], &basis[d - 1]);
        for w in basis.iter().take(n) {
            c_max = c_max.max(data.dot(&br, w).abs());
        }
    }
    let lg = local_geometry(chart, u, h, StencilKind::Small)?;
    let c = &lg.core;
    let fx_at = |p: &[f64]| chart.normal(p).map(|eta| data.dot(&eta, x));
    let mut p = u.to_vec();
    let mut grad = [0.0; MAX_DIM];
    for k in 0..n {
        let mut diff = |step: f64| -> Result<f64> {
            p[k] = u[k] + step;
            let a = fx_at(&p)?;
            p[k] = u[k] - step;
            let b = fx_at(&p)?;
            p[k] = u[k];
            Ok((a - b) / (2.0 * step))
        };
        let coarse = diff(h)?;
        let fine = diff(0.5 * h)?;
        grad[k] = (4.0 * fine - coarse) / 3.0;
    }
    let mut g_up = [0.0; MAX_DIM];
    for k in 0..n {
        for l in 0..n {
            g_up[k] += c.ginv[k][l] * grad[l];
        }
    }
    let grad_norm = c.inner(&g_up, &g_up).max(0.0).sqrt();
    let xt = c.tangent_coords(data, x);
    let xt_norm = c.inner(&xt, &xt).max(0.0).sqrt();
    let s: f64 = basis.iter().take(n).map(|w| data.dot(&c.eta, w).abs()).sum();
    let a_norm = c.a_norm_sq.sqrt();
    let c1 = 1.0f64.max(n as f64 * c_max).max(n as f64 * c_max * c_max);
    let chain = c1.sqrt() * (a_norm * xt_norm + 0.5 * s);
    let (_, pi_norm) = projection_residual(data, c, x);
    let constant = 2.0 * c1.sqrt() * a_norm.max(1.0) * (0.5 * (n as f64).sqrt()).max(1.0);
    Ok(GradientBound {
        grad_norm,
        pi_norm,
        a_norm,
        c_max,
        constant,
        chain_slack: chain - grad_norm,
        slack: constant * pi_norm - grad_norm,
    })
}

/// Lorentzian threshold and umbilicity quantities at one point.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ThresholdReport {
    pub mean_curvature: f64,
    pub ric_normal: f64,
    /// `H² + n Ric_G(N,N)`.
    pub threshold: f64,
    pub umbilicity_defect: f64,
    /// `|A|² − H²/n`.
    pub cs_gap: f64,
}

pub fn umbilicity_and_threshold(chart: &ImmersionChart, pd: &HypersurfacePointData) -> Result<ThresholdReport> {
    if !chart.is_lorentzian() {
        return Err(GeoError::WrongAmbient("Lorentzian"));
    }
    let n = pd.shape.len();
    let tr: f64 = (0..n).map(|i| pd.shape[i][i]).sum();
    let mut defect = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = pd.shape[i][j] - if i == j { tr / n as f64 } else { 0.0 };
            defect += v * v;
        }
    }
    let h = pd.mean_curvature;
    Ok(ThresholdReport {
        mean_curvature: h,
        ric_normal: pd.ric_normal,
        threshold: h * h + n as f64 * pd.ric_normal,
        umbilicity_defect: defect.sqrt(),
        cs_gap: pd.a_norm_sq - h * h / n as f64,
    })
}

/// Max relative deviation of `η^*⟨,⟩` from `(H/n)² g` over a grid.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct HomothetyReport {
    pub factor: f64,
    pub max_relative_deviation: f64,
    pub max_umbilicity_defect: f64,
}

pub fn homothety_check(chart: &ImmersionChart, grid: &Grid, h: f64, tol: f64) -> Result<HomothetyReport> {
    if !chart.is_lorentzian() {
        return Err(GeoError::WrongAmbient("Lorentzian"));
    }
    let data = chart.ambient_data();
    let per: Vec<(f64, f64, f64)> = (0..grid.len())
        .into_par_iter()
        .map_init(
            || Stencil::new(chart.dim(), StencilKind::Small),
            |st, idx| {
                let u = grid.point(idx);
                let lg = local_geometry_with(st, chart, &u, h)?;
                Ok((lg.core.umbilicity_defect(), lg.core.mean_curvature, if lg.core.mean_curvature.abs() > tol {
                    homothety_deviation(&lg, data)
                } else {
                    f64::NAN
                }))
            },
        )
        .collect::<Result<_>>()?;
    let defect = per.iter().fold(0.0f64, |m, p| m.max(p.0));
    if defect > tol {
        return Err(GeoError::NotUmbilicalOrMinimal(format!("umbilicity defect {defect:e}")));
    }
    if per.iter().any(|p| p.1.abs() <= tol) {
        return Err(GeoError::NotUmbilicalOrMinimal("H = 0".into()));
    }
    let n = chart.dim() as f64;
    let mean_h = per.iter().map(|p| p.1).sum::<f64>() / per.len() as f64;
    Ok(HomothetyReport {
        factor: (mean_h / n).powi(2),
        max_relative_deviation: per.iter().fold(0.0f64, |m, p| m.max(p.2)),
        max_umbilicity_defect: defect,
    })
}

/// Which support-function identities a verification run covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaSet {
    All,
    L31,
    L32,
    L34,
    L35,
}

impl std::str::FromStr for LemmaSet {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Self::All),
            "31" | "3.1" => Ok(Self::L31),
            "32" | "3.2" => Ok(Self::L32),
            "34" | "3.4" => Ok(Self::L34),
            "35" | "3.5" => Ok(Self::L35),
            _ => Err(GeoError::InvalidParam { name: "lemma".into(), message: format!("unknown lemma {s:?}") }),
        }
    }
}

impl LemmaSet {
    fn includes(self, name: &str) -> bool {
        match self {
            Self::All => true,
            Self::L31 => name == "lemma31",
            Self::L32 => name == "lemma32",
            Self::L34 => name == "lemma34",
            Self::L35 => name == "lemma35",
        }
    }
}

/// Pass thresholds of the pointwise checks, applied to the grid maximum.
pub const CHECK_TOLERANCES: &[(&str, f64)] = &[
    ("normal_orthogonality", 1e-10),
    ("normal_unit", 1e-10),
    ("shape_symmetry", 1e-8),
    ("lemma31", 1e-12),
    ("lemma32", 1e-6),
    ("lemma34", 1e-6),
    ("lemma35", 1e-5),
    ("gauss_duality", 1e-5),
    ("gauss_duality_corrected", 1e-5),
    ("projection", 1e-12),
];

/// Admissible `max_h / max_{h/2}` for second-order differencing.
pub const RATIO_WINDOW: [f64; 2] = [3.5, 4.5];

const RATIO_CHECKS: &[&str] = &["lemma32", "lemma34", "lemma35"];

pub fn check_tolerance(name: &str) -> Option<f64> {
    CHECK_TOLERANCES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub grid: usize,
    pub h: f64,
    /// Relative tolerance of rank decisions.
    pub tol: f64,
    pub x: Option<Vd>,
    pub lemmas: LemmaSet,
    /// Repeat at `h/2` to estimate the convergence ratio.
    pub convergence: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckVerdict {
    pub passed: bool,
    pub max: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_window: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SurfaceReport {
    pub fixture: String,
    pub algebra: String,
    pub grid: usize,
    pub h: f64,
    pub per_check: BTreeMap<String, Stat>,
    pub verdicts: BTreeMap<String, CheckVerdict>,
}

impl SurfaceReport {
    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|v| v.passed)
    }
}

/// A verification run together with the raw per-point residues at `h`.
#[derive(Clone, Debug)]
pub struct SurfaceRun {
    pub report: SurfaceReport,
    pub grid: Grid,
    pub residues: Vec<PointResidues>,
}

type Extract = fn(&PointResidues) -> Option<f64>;

const EXTRACTORS: &[(&str, Extract)] = &[
    ("normal_orthogonality", |p| Some(p.normal_orthogonality)),
    ("normal_unit", |p| Some(p.normal_unit)),
    ("shape_symmetry", |p| Some(p.shape_symmetry)),
    ("lemma31", |p| Some(p.lemma31)),
    ("lemma32", |p| Some(p.lemma32)),
    ("lemma34", |p| Some(p.lemma34)),
    ("lemma35", |p| p.lemma35),
    ("gauss_duality", |p| Some(p.gauss_duality)),
    ("gauss_duality_corrected", |p| Some(p.gauss_duality_corrected)),
    ("gauss_nullity", |p| Some(p.nullity as f64)),
    ("mean_curvature", |p| Some(p.mean_curvature)),
    ("shape_norm", |p| Some(p.a_norm)),
    ("ric_normal", |p| Some(p.ric_normal)),
    ("support_x", |p| p.support_x),
    ("projection", |p| p.projection),
    ("jacobi", |p| p.jacobi),
    ("umbilicity_defect", |p| Some(p.umbilicity_defect)),
    ("cs_gap", |p| Some(p.cs_gap)),
    ("threshold", |p| Some(p.threshold)),
    ("homothety", |p| p.homothety),
];

fn stats(grid: &Grid, res: &[PointResidues], lemmas: LemmaSet) -> BTreeMap<String, Stat> {
    EXTRACTORS
        .iter()
        .filter(|(name, _)| !name.starts_with("lemma") || lemmas.includes(name))
        .filter_map(|(name, f)| {
            Stat::of(grid, res.iter().enumerate().filter_map(|(i, p)| f(p).map(|v| (i, v)))).map(|s| (name.to_string(), s))
        })
        .collect()
}

/// Scans the chart on a uniform grid kept `2h` inside the domain.
pub fn verify(chart: &ImmersionChart, opts: &VerifyOptions) -> Result<SurfaceRun> {
    if !(opts.h > 0.0) {
        return Err(GeoError::InvalidParam { name: "h".into(), message: "must be positive".into() });
    }
    let grid = Grid::new(chart, opts.grid, 2.0 * opts.h * (1.0 + 1e-9))?;
    let stencil = if matches!(opts.lemmas, LemmaSet::All | LemmaSet::L35) { StencilKind::Full } else { StencilKind::Small };
    let scan_opts = ScanOptions { h: opts.h, stencil, x: opts.x, tol: opts.tol };
    let residues = scan(chart, &grid, &scan_opts)?;
    let mut per_check = stats(&grid, &residues, opts.lemmas);
    if opts.convergence {
        let fine = scan(chart, &grid, &ScanOptions { h: 0.5 * opts.h, ..scan_opts })?;
        let fine_stats = stats(&grid, &fine, opts.lemmas);
        for (name, st) in per_check.iter_mut() {
            if name.starts_with("lemma") && name != "lemma31" || name.starts_with("gauss_duality") {
                if let Some(f) = fine_stats.get(name) {
                    st.convergence_ratio = convergence_ratio(st.max, f.max);
                }
            }
        }
    }
    let verdicts = per_check
        .iter()
        .filter_map(|(name, st)| {
            let tolerance = check_tolerance(name)?;
            let windowed = RATIO_CHECKS.contains(&name.as_str());
            let ratio_ok = match (windowed, st.convergence_ratio) {
                (true, Some(r)) => (RATIO_WINDOW[0]..=RATIO_WINDOW[1]).contains(&r),
                _ => true,
            };
            Some((
                name.clone(),
                CheckVerdict {
                    passed: st.max <= tolerance && ratio_ok,
                    max: st.max,
                    tolerance,
                    ratio_window: windowed.then_some(RATIO_WINDOW),
                },
            ))
        })
        .collect();
    Ok(SurfaceRun {
        report: SurfaceReport {
            fixture: chart.id().to_string(),
            algebra: chart.ambient().name().to_string(),
            grid: opts.grid,
            h: opts.h,
            per_check,
            verdicts,
        },
        grid,
        residues,
    })
}

/// Unit reference element: the time reference on Lorentzian charts, the
/// normalized orientation anchor otherwise.
pub fn default_reference(chart: &ImmersionChart) -> Vd {
    if let Some(t) = chart.time_reference() {
        return *t;
    }
    let data = chart.ambient_data();
    let mut x = [0.0; MAX_DIM];
    for (i, r) in chart.anchor().reference.iter().enumerate() {
        x[i] = *r;
    }
    let q = data.dot(&x, &x).abs().sqrt();
    for v in x.iter_mut() {
        *v /= q;
    }
    x
}

/// `Ric_G(N, N) = −¼ B(η, η)`.
pub fn ricci_in_normal_direction(pd: &HypersurfacePointData) -> f64 {
    pd.ric_normal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::chart;

    fn sphere(r: f64) -> ImmersionChart {
        chart::sphere(&catalog::euclidean(3), r).unwrap()
    }

    #[test]
    fn sphere_shape_operator_closed_form() {
        for r in [1.0, 2.0] {
            let c = sphere(r);
            for u in [[0.0, 0.0], [0.4, -1.1], [1.5, 1.5]] {
                let pd = point_data(&c, &u, 1e-4).unwrap();
                for i in 0..2 {
                    for j in 0..2 {
                        let want = if i == j { -1.0 / r } else { 0.0 };
                        assert!((pd.shape[i][j] - want).abs() < 1e-6, "{:?}", pd.shape);
                    }
                }
                assert!((pd.mean_curvature + 2.0 / r).abs() < 1e-6);
                assert!((pd.a_norm_sq - 2.0 / (r * r)).abs() < 1e-6);
                assert_eq!(pd.ric_normal, 0.0);
            }
        }
    }

    #[test]
    fn north_pole_support() {
        let c = sphere(1.0);
        let pd = point_data(&c, &[0.0, 0.0], DEFAULT_H).unwrap();
        assert!((support_function(&c, &pd, &[0.0, 0.0, 1.0]) - 1.0).abs() < 1e-15);
        assert_eq!(pd.gauss_map(), pd.normal.as_slice());
    }

    #[test]
    fn slice_in_product_is_totally_geodesic() {
        let c = catalog::immersion_by_id("subgroup_slice").unwrap();
        let pd = point_data(&c, &[0.3, -0.2, 0.5], DEFAULT_H).unwrap();
        assert!(pd.shape.iter().flatten().all(|x| x.abs() < 1e-8));
        assert!(pd.ric_normal.abs() < 1e-12);
        assert!((pd.normal[3] - 1.0).abs() < 1e-12);
        assert!((support_function(&c, &pd, &[0.0, 0.0, 0.0, 1.0]) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn stencil_indexing_is_a_bijection() {
        for n in 1..=4 {
            let st = Stencil::new(n, StencilKind::Full);
            let mut seen = vec![false; st.offsets.len()];
            for k in 0..n {
                for l in 0..n {
                    for a in -1i8..=1 {
                        for b in -1i8..=1 {
                            if k == l && (a != 0 || b != 0) && a + b == 0 {
                                continue;
                            }
                            let i = st.at(k, a, l, b);
                            let mut want = [0i8; MAX_DIM];
                            want[k] += a;
                            want[l] += b;
                            assert_eq!(st.offsets[i], want);
                            seen[i] = true;
                        }
                    }
                }
            }
            assert!(seen.iter().all(|s| *s));
        }
    }

    #[test]
    fn quadratic_support_identity_vanishes_for_arbitrary_supports() {
        for id in ["oscillator:m=2", "sl2r", "u2", "product"] {
            let data = AmbientData::new(&catalog::algebra_by_id(id).unwrap().to_f64());
            let mut f = [0.0; MAX_DIM];
            for (i, x) in f.iter_mut().enumerate().take(data.d) {
                *x = (i as f64 * 0.77 + 0.3).sin() * 3.0;
            }
            assert!(lemma31_residual(&data, &f) < 1e-12, "{id}");
        }
    }

    #[test]
    fn adapted_basis_is_orthonormal() {
        let mut x = [0.0; MAX_DIM];
        x[0] = 0.6;
        x[2] = 0.8;
        let b = adapted_basis(4, &x).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b[3], x);
        for i in 0..4 {
            for j in 0..4 {
                let dot: f64 = (0..4).map(|k| b[i][k] * b[j][k]).sum();
                assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn domain_margin_is_enforced() {
        let c = sphere(1.0);
        assert!(matches!(point_data(&c, &[1.9995, 0.0], DEFAULT_H), Err(GeoError::DomainViolation { .. })));
    }
}
