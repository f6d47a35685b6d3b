//! Metric Lie algebras given by structure constants in an orthonormal basis.
//!
//! Conventions: `[X_i, X_j] = Σ_k c_ij^k X_k`, `⟨X_i, X_j⟩ = ε_j δ_ij`, and for
//! left-invariant fields of a bi-invariant metric
//!
//! * `∇_X Y = ½[X, Y]`
//! * `R(X, Y)Z = -¼[[X, Y], Z]`
//! * `Ric(X, Y) = -¼ B(X, Y)` with `B` the Killing form.

use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::linalg::{self, RowEchelon};
use crate::report::{CheckReport, ResidualTracker};
use crate::scalar::Scalar;

/// Relative tolerance for float ranks, signs and orthonormality tests.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Signs `ε_j` of an orthonormal basis; at most one is negative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MetricSignature {
    signs: Vec<i8>,
}

impl MetricSignature {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(GeoError::InvalidSignature("empty".into()));
        }
        if let Some(s) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(GeoError::InvalidSignature(format!("entry {s} is not +1 or -1")));
        }
        let index = signs.iter().filter(|s| **s < 0).count();
        if index > 1 {
            return Err(GeoError::IndexTooLarge(index));
        }
        Ok(Self { signs })
    }

    pub fn riemannian(dim: usize) -> Self {
        Self { signs: vec![1; dim] }
    }

    /// Lorentzian signature with the last basis vector timelike.
    pub fn lorentzian(dim: usize) -> Self {
        let mut signs = vec![1; dim];
        signs[dim - 1] = -1;
        Self { signs }
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn eps(&self, i: usize) -> i8 {
        self.signs[i]
    }

    pub fn index(&self) -> usize {
        self.signs.iter().filter(|s| **s < 0).count()
    }

    pub fn is_lorentzian(&self) -> bool {
        self.index() == 1
    }

    /// `ε_N = (-1)^ν`.
    pub fn normal_sign(&self) -> i8 {
        if self.is_lorentzian() {
            -1
        } else {
            1
        }
    }

    pub fn timelike_axis(&self) -> Option<usize> {
        self.signs.iter().position(|s| *s < 0)
    }
}

/// Coefficients of an element of the algebra in the orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraVector<S>(Vec<S>);

impl<S: Scalar> AlgebraVector<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        Self(coeffs)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![S::zero(); dim])
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = S::one();
        v
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self(coeffs.iter().map(|&c| S::from_i64(c)).collect())
    }

    pub fn coeffs(&self) -> &[S] {
        &self.0
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.0.iter().all(|c| c.is_zero_within(tol))
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a.clone() + b.clone()).collect())
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a.clone() - b.clone()).collect())
    }

    pub fn scale(&self, s: &S) -> Self {
        Self(self.0.iter().map(|a| a.clone() * s.clone()).collect())
    }

    pub fn to_f64(&self) -> AlgebraVector<f64> {
        AlgebraVector(self.0.iter().map(Scalar::to_f64).collect())
    }
}

/// Linearly independent vectors spanning a subspace of the algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis<S> {
    vectors: Vec<AlgebraVector<S>>,
}

impl<S: Scalar> SubspaceBasis<S> {
    pub fn new(vectors: Vec<AlgebraVector<S>>, tol: f64) -> Result<Self> {
        if let Some(first) = vectors.first() {
            let dim = first.len();
            if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
                return Err(GeoError::DimensionMismatch { expected: dim, found: v.len() });
            }
            let rows: Vec<Vec<S>> = vectors.iter().map(|v| v.coeffs().to_vec()).collect();
            if linalg::rank(&rows, dim, tol) != vectors.len() {
                return Err(GeoError::DependentBasis);
            }
        }
        Ok(Self { vectors })
    }

    pub fn zero() -> Self {
        Self { vectors: Vec::new() }
    }

    pub fn vectors(&self) -> &[AlgebraVector<S>] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    fn echelon(&self, ambient_dim: usize, tol: f64) -> RowEchelon<S> {
        let rows: Vec<Vec<S>> = self.vectors.iter().map(|v| v.coeffs().to_vec()).collect();
        linalg::row_reduce(&rows, ambient_dim, tol)
    }

    pub fn contains(&self, v: &AlgebraVector<S>, tol: f64) -> bool {
        let e = self.echelon(v.len(), tol);
        let thr = if S::EXACT { 0.0 } else { tol * v.coeffs().iter().map(|x| x.to_f64().abs()).fold(1.0, f64::max) };
        e.reduce(v.coeffs()).iter().all(|x| x.is_zero_within(thr))
    }

    pub fn spans_same(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && other.vectors.iter().all(|v| self.contains(v, tol))
            && self.vectors.iter().all(|v| other.contains(v, tol))
    }
}

/// Which variant of the Levi-Civita connection to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldMode {
    /// Both arguments are left-invariant fields: `½[v, w]`.
    LeftInvariant,
    /// `v` is a tangent vector at a point and `w` has frozen coefficients:
    /// `½ Σ ε_i ⟨v, X_i⟩ w_j c_ij^k X_k`.
    Pointwise,
}

/// Result of the sectional-curvature formula.
#[derive(Clone, Debug, PartialEq)]
pub enum Sectional<S> {
    Value(S),
    /// `[x, y]` is nonzero but null, so `ε_[x,y]` is undefined.
    UndefinedNullBracket,
}

impl<S: Scalar> Sectional<S> {
    pub fn value(&self) -> Option<&S> {
        match self {
            Sectional::Value(v) => Some(v),
            Sectional::UndefinedNullBracket => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Semisimplicity<S> {
    pub semisimple: bool,
    pub killing_determinant: S,
    /// A nonzero vector in the radical of the Killing form when it is degenerate.
    pub null_vector: Option<AlgebraVector<S>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureWitness<S> {
    /// 0-based positions of the offending pair within the subspace basis.
    pub pair: (usize, usize),
    pub bracket: AlgebraVector<S>,
    /// Component of the bracket left over after eliminating the span.
    pub outside: AlgebraVector<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubalgebraCheck<S> {
    pub closed: bool,
    pub witness: Option<ClosureWitness<S>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Codim1Construction<S> {
    /// Orthogonal complement of a non-null central vector.
    CenterOrthogonal { normal: AlgebraVector<S> },
    /// Hyperplane containing the derived algebra (hence an ideal).
    DerivedHyperplane,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Codim1Subalgebra<S> {
    pub basis: SubspaceBasis<S>,
    pub construction: Codim1Construction<S>,
}

/// A Lie algebra with a bi-invariant metric, in an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricLieAlgebra<S> {
    name: String,
    labels: Vec<String>,
    signature: MetricSignature,
    dense: Vec<S>,
    terms: Vec<(usize, usize, usize, S)>,
}

fn default_labels(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("X{i}")).collect()
}

impl<S: Scalar> MetricLieAlgebra<S> {
    /// Builds an algebra from a dense tensor indexed `(i·d + j)·d + k`.
    /// No identity is enforced here; see [`MetricLieAlgebra::validate`].
    pub fn from_dense(name: &str, signature: MetricSignature, dense: Vec<S>) -> Result<Self> {
        let d = signature.dim();
        if dense.len() != d * d * d {
            return Err(GeoError::DimensionMismatch { expected: d * d * d, found: dense.len() });
        }
        let mut alg = Self { name: name.to_string(), labels: default_labels(d), signature, dense, terms: Vec::new() };
        alg.rebuild_terms();
        Ok(alg)
    }

    /// Builds an algebra from brackets `[X_i, X_j] ∋ value·X_k` (0-based),
    /// filling in `c_ji^k = -c_ij^k`.
    pub fn from_brackets(
        name: &str,
        signature: MetricSignature,
        entries: impl IntoIterator<Item = (usize, usize, usize, S)>,
    ) -> Result<Self> {
        let d = signature.dim();
        let mut dense = vec![S::zero(); d * d * d];
        for (i, j, k, v) in entries {
            let m = i.max(j).max(k);
            if m >= d {
                return Err(GeoError::DimensionMismatch { expected: d, found: m + 1 });
            }
            if i == j {
                return Err(GeoError::Parse(format!("bracket of X{} with itself", i + 1)));
            }
            dense[(i * d + j) * d + k] = v.clone();
            dense[(j * d + i) * d + k] = -v;
        }
        Self::from_dense(name, signature, dense)
    }

    pub fn abelian(name: &str, signature: MetricSignature) -> Self {
        let d = signature.dim();
        Self::from_dense(name, signature, vec![S::zero(); d * d * d]).expect("sizes agree")
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.dim(), "one label per basis vector");
        self.labels = labels;
        self
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Copy with a single slot `c_ij^k` overwritten (its mirror is left alone).
    pub fn with_constant(&self, i: usize, j: usize, k: usize, value: S) -> Self {
        let d = self.dim();
        let mut out = self.clone();
        out.dense[(i * d + j) * d + k] = value;
        out.rebuild_terms();
        out
    }

    fn rebuild_terms(&mut self) {
        let d = self.dim();
        self.terms.clear();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let c = &self.dense[(i * d + j) * d + k];
                    if !c.is_exact_zero() {
                        self.terms.push((i, j, k, c.clone()));
                    }
                }
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.signature.dim()
    }

    pub fn signature(&self) -> &MetricSignature {
        &self.signature
    }

    pub fn eps(&self, i: usize) -> S {
        S::from_i64(self.signature.eps(i) as i64)
    }

    /// `c_ij^k`.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> &S {
        let d = self.dim();
        &self.dense[(i * d + j) * d + k]
    }

    /// Nonzero `(i, j, k, c_ij^k)` entries.
    pub fn nonzero_constants(&self) -> &[(usize, usize, usize, S)] {
        &self.terms
    }

    pub fn is_abelian(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_f64(&self) -> MetricLieAlgebra<f64> {
        let mut out = MetricLieAlgebra::from_dense(
            &self.name,
            self.signature.clone(),
            self.dense.iter().map(Scalar::to_f64).collect(),
        )
        .expect("same shape");
        out.labels = self.labels.clone();
        out
    }

    fn check_dim(&self, v: &AlgebraVector<S>) -> Result<()> {
        if v.len() != self.dim() {
            return Err(GeoError::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        Ok(())
    }

    pub fn basis_vector(&self, i: usize) -> AlgebraVector<S> {
        AlgebraVector::basis(self.dim(), i)
    }

    /// `⟨v, w⟩ = Σ ε_i v_i w_i`.
    pub fn dot(&self, v: &AlgebraVector<S>, w: &AlgebraVector<S>) -> S {
        let mut acc = S::zero();
        for (i, (a, b)) in v.coeffs().iter().zip(w.coeffs()).enumerate() {
            if a.is_exact_zero() || b.is_exact_zero() {
                continue;
            }
            let p = a.clone() * b.clone();
            acc = if self.signature.eps(i) > 0 { acc + p } else { acc - p };
        }
        acc
    }

    /// Sign of `⟨v, v⟩`, or `None` for a (numerically) null vector.
    pub fn sign_of(&self, v: &AlgebraVector<S>, tol: f64) -> Option<i32> {
        match self.dot(v, v).signum_within(tol) {
            0 => None,
            s => Some(s),
        }
    }

    pub(crate) fn bracket_unchecked(&self, v: &AlgebraVector<S>, w: &AlgebraVector<S>) -> AlgebraVector<S> {
        let mut out = vec![S::zero(); self.dim()];
        for (i, j, k, c) in &self.terms {
            let (a, b) = (&v.coeffs()[*i], &w.coeffs()[*j]);
            if a.is_exact_zero() || b.is_exact_zero() {
                continue;
            }
            out[*k] = out[*k].clone() + a.clone() * b.clone() * c.clone();
        }
        AlgebraVector(out)
    }

    /// `[v, w]_k = Σ_{i,j} v_i w_j c_ij^k`.
    pub fn bracket(&self, v: &AlgebraVector<S>, w: &AlgebraVector<S>) -> Result<AlgebraVector<S>> {
        self.check_dim(v)?;
        self.check_dim(w)?;
        Ok(self.bracket_unchecked(v, w))
    }

    /// Matrix of `ad(v)`: entry `[l][k]` is the `X_l` coefficient of `[v, X_k]`.
    pub fn ad_matrix(&self, v: &AlgebraVector<S>) -> Vec<Vec<S>> {
        let d = self.dim();
        let mut m = vec![vec![S::zero(); d]; d];
        for (i, k, l, c) in &self.terms {
            let a = &v.coeffs()[*i];
            if a.is_exact_zero() {
                continue;
            }
            m[*l][*k] = m[*l][*k].clone() + a.clone() * c.clone();
        }
        m
    }

    pub fn levi_civita(&self, v: &AlgebraVector<S>, w: &AlgebraVector<S>, mode: FieldMode) -> Result<AlgebraVector<S>> {
        self.check_dim(v)?;
        self.check_dim(w)?;
        let half = S::from_ratio(1, 2);
        match mode {
            FieldMode::LeftInvariant => Ok(self.bracket_unchecked(v, w).scale(&half)),
            FieldMode::Pointwise => {
                let d = self.dim();
                let mut out = vec![S::zero(); d];
                for i in 0..d {
                    // α_i = ε_i ⟨v, X_i⟩
                    let alpha = self.eps(i) * self.dot(v, &self.basis_vector(i));
                    if alpha.is_exact_zero() {
                        continue;
                    }
                    for (ii, j, k, c) in &self.terms {
                        if *ii != i || w.coeffs()[*j].is_exact_zero() {
                            continue;
                        }
                        out[*k] = out[*k].clone() + alpha.clone() * w.coeffs()[*j].clone() * c.clone();
                    }
                }
                Ok(AlgebraVector(out).scale(&half))
            }
        }
    }

    /// `R(x, y)z = -¼[[x, y], z]`.
    pub fn curvature_tensor(
        &self,
        x: &AlgebraVector<S>,
        y: &AlgebraVector<S>,
        z: &AlgebraVector<S>,
    ) -> Result<AlgebraVector<S>> {
        let xy = self.bracket(x, y)?;
        let r = self.bracket(&xy, z)?;
        Ok(r.scale(&S::from_ratio(-1, 4)))
    }

    /// `K(x, y) = ¼ ε_x ε_y ε_[x,y] |[x,y]|²` for an orthonormal pair.
    pub fn sectional_curvature(&self, x: &AlgebraVector<S>, y: &AlgebraVector<S>, tol: f64) -> Result<Sectional<S>> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let (xx, yy, xy) = (self.dot(x, x), self.dot(y, y), self.dot(x, y));
        let unit = |q: &S| (q.abs_value() - S::one()).is_zero_within(tol);
        if !unit(&xx) || !unit(&yy) || !xy.is_zero_within(tol) {
            return Err(GeoError::DegeneratePlane);
        }
        let (ex, ey) = (S::from_i64(xx.signum_within(tol) as i64), S::from_i64(yy.signum_within(tol) as i64));
        let b = self.bracket_unchecked(x, y);
        if b.is_zero_within(tol) {
            return Ok(Sectional::Value(S::zero()));
        }
        let bb = self.dot(&b, &b);
        let eb = match bb.signum_within(tol) {
            0 => return Ok(Sectional::UndefinedNullBracket),
            s => S::from_i64(s as i64),
        };
        let norm_sq = eb.clone() * bb;
        Ok(Sectional::Value(S::from_ratio(1, 4) * ex * ey * eb * norm_sq))
    }

    /// Sectional curvature of the plane spanned by any nondegenerate pair:
    /// `¼⟨[x,y],[x,y]⟩ / (⟨x,x⟩⟨y,y⟩ - ⟨x,y⟩²)`. Stays inside the field, so it
    /// is exact for pairs whose normalization would need new square roots.
    pub fn plane_curvature(&self, x: &AlgebraVector<S>, y: &AlgebraVector<S>, tol: f64) -> Result<Sectional<S>> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let q = self.dot(x, x) * self.dot(y, y) - self.dot(x, y) * self.dot(x, y);
        if q.is_zero_within(tol) {
            return Err(GeoError::DegeneratePlane);
        }
        let b = self.bracket_unchecked(x, y);
        if b.is_zero_within(tol) {
            return Ok(Sectional::Value(S::zero()));
        }
        let bb = self.dot(&b, &b);
        if bb.is_zero_within(tol) {
            return Ok(Sectional::UndefinedNullBracket);
        }
        Ok(Sectional::Value(S::from_ratio(1, 4) * bb / q))
    }

    /// `⟨R(x,y)y, x⟩ / (⟨x,x⟩⟨y,y⟩ - ⟨x,y⟩²)` through the curvature tensor.
    pub fn curvature_route_sectional(&self, x: &AlgebraVector<S>, y: &AlgebraVector<S>, tol: f64) -> Result<S> {
        let q = self.dot(x, x) * self.dot(y, y) - self.dot(x, y) * self.dot(x, y);
        if q.is_zero_within(tol) {
            return Err(GeoError::DegeneratePlane);
        }
        let r = self.curvature_tensor(x, y, y)?;
        Ok(self.dot(&r, x) / q)
    }

    /// `B_ij = tr(ad X_i ad X_j) = Σ_{k,l} c_ik^l c_jl^k`.
    pub fn killing_matrix(&self) -> Vec<Vec<S>> {
        let d = self.dim();
        let mut b = vec![vec![S::zero(); d]; d];
        for (i, k, l, c1) in &self.terms {
            for (j, l2, k2, c2) in &self.terms {
                if l2 == l && k2 == k {
                    b[*i][*j] = b[*i][*j].clone() + c1.clone() * c2.clone();
                }
            }
        }
        b
    }

    fn bilinear(&self, m: &[Vec<S>], v: &AlgebraVector<S>, w: &AlgebraVector<S>) -> S {
        let mut acc = S::zero();
        for (i, a) in v.coeffs().iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in w.coeffs().iter().enumerate() {
                if b.is_exact_zero() || m[i][j].is_exact_zero() {
                    continue;
                }
                acc = acc + a.clone() * b.clone() * m[i][j].clone();
            }
        }
        acc
    }

    pub fn killing_form(&self, v: &AlgebraVector<S>, w: &AlgebraVector<S>) -> Result<S> {
        self.check_dim(v)?;
        self.check_dim(w)?;
        Ok(self.bilinear(&self.killing_matrix(), v, w))
    }

    /// Ricci matrix `-¼ B` in the orthonormal basis.
    pub fn ricci_matrix(&self) -> Vec<Vec<S>> {
        let q = S::from_ratio(-1, 4);
        self.killing_matrix()
            .into_iter()
            .map(|row| row.into_iter().map(|x| x * q.clone()).collect())
            .collect()
    }

    /// `Ric(v, w) = -¼ B(v, w)`.
    pub fn ricci(&self, v: &AlgebraVector<S>, w: &AlgebraVector<S>) -> Result<S> {
        Ok(S::from_ratio(-1, 4) * self.killing_form(v, w)?)
    }

    /// `Σ_k ε_k ⟨R(v, X_k)X_k, w⟩`, the trace of the curvature tensor.
    pub fn ricci_by_contraction(&self, v: &AlgebraVector<S>, w: &AlgebraVector<S>) -> Result<S> {
        self.check_dim(v)?;
        self.check_dim(w)?;
        let mut acc = S::zero();
        for k in 0..self.dim() {
            let xk = self.basis_vector(k);
            let r = self.curvature_tensor(v, &xk, &xk)?;
            acc = acc + self.eps(k) * self.dot(&r, w);
        }
        Ok(acc)
    }

    /// Directional Ricci curvature `Ric(v, v) / ⟨v, v⟩` (equals `ε_v Ric(v, v)` for unit `v`).
    pub fn ricci_directional(&self, v: &AlgebraVector<S>, tol: f64) -> Result<S> {
        let vv = self.dot(v, v);
        if vv.is_zero_within(tol) {
            return Err(GeoError::NullVector);
        }
        Ok(self.ricci(v, v)? / vv)
    }

    /// Joint kernel of all `ad(X_i)`.
    pub fn center(&self, tol: f64) -> SubspaceBasis<S> {
        let d = self.dim();
        let mut rows = vec![vec![S::zero(); d]; d * d];
        for (i, j, k, c) in &self.terms {
            rows[i * d + k][*j] = c.clone();
        }
        let ns = linalg::nullspace(&rows, d, tol);
        SubspaceBasis { vectors: ns.into_iter().map(AlgebraVector).collect() }
    }

    /// `[g, g]`, spanned by the brackets of basis pairs.
    pub fn derived_algebra(&self, tol: f64) -> SubspaceBasis<S> {
        let d = self.dim();
        let mut rows = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                rows.push(self.bracket_unchecked(&self.basis_vector(i), &self.basis_vector(j)).into_coeffs());
            }
        }
        let e = linalg::row_reduce(&rows, d, tol);
        SubspaceBasis { vectors: e.rows.into_iter().map(AlgebraVector).collect() }
    }

    /// Cartan's criterion: semisimple iff the Killing form is nondegenerate.
    pub fn is_semisimple(&self, tol: f64) -> Semisimplicity<S> {
        let b = self.killing_matrix();
        let det = linalg::determinant(&b);
        let semisimple = if S::EXACT {
            !det.is_exact_zero()
        } else {
            linalg::rank(&b, self.dim(), tol) == self.dim()
        };
        let null_vector = if semisimple {
            None
        } else {
            linalg::nullspace(&b, self.dim(), tol).into_iter().next().map(AlgebraVector)
        };
        Semisimplicity { semisimple, killing_determinant: det, null_vector }
    }

    /// Closure of `span(h)` under the bracket, with a witness on failure.
    pub fn is_subalgebra(&self, h: &SubspaceBasis<S>, tol: f64) -> Result<SubalgebraCheck<S>> {
        for v in h.vectors() {
            self.check_dim(v)?;
        }
        let h = SubspaceBasis::new(h.vectors.clone(), tol)?;
        let echelon = h.echelon(self.dim(), tol);
        let vs = h.vectors();
        for a in 0..vs.len() {
            for b in a + 1..vs.len() {
                let br = self.bracket_unchecked(&vs[a], &vs[b]);
                let thr = if S::EXACT { 0.0 } else { tol * br.coeffs().iter().map(|x| x.to_f64().abs()).fold(1.0, f64::max) };
                let outside = AlgebraVector(echelon.reduce(br.coeffs()));
                if !outside.is_zero_within(thr) {
                    return Ok(SubalgebraCheck {
                        closed: false,
                        witness: Some(ClosureWitness { pair: (a, b), bracket: br, outside }),
                    });
                }
            }
        }
        Ok(SubalgebraCheck { closed: true, witness: None })
    }

    /// `v^⊥` with respect to the metric.
    pub fn orthogonal_complement(&self, v: &AlgebraVector<S>, tol: f64) -> SubspaceBasis<S> {
        let row: Vec<S> = v.coeffs().iter().enumerate().map(|(i, c)| self.eps(i) * c.clone()).collect();
        let ns = linalg::nullspace(&[row], self.dim(), tol);
        SubspaceBasis { vectors: ns.into_iter().map(AlgebraVector).collect() }
    }

    /// A codimension-one subalgebra: `Z^⊥` for a non-null central `Z` when
    /// one exists, otherwise a hyperplane through `[g, g]` completed with
    /// standard basis vectors in index order.
    pub fn codim1_subalgebra(&self, tol: f64) -> Option<Codim1Subalgebra<S>> {
        let d = self.dim();
        let center = self.center(tol);
        if let Some(z) = self.non_null_in(&center, tol) {
            let perp = self.orthogonal_complement(&z, tol);
            if perp.dim() == d - 1 && self.is_subalgebra(&perp, tol).is_ok_and(|c| c.closed) {
                return Some(Codim1Subalgebra {
                    basis: perp,
                    construction: Codim1Construction::CenterOrthogonal { normal: z },
                });
            }
        }
        let derived = self.derived_algebra(tol);
        if derived.dim() > d - 1 {
            return None;
        }
        let mut vectors = derived.vectors.clone();
        for i in 0..d {
            if vectors.len() == d - 1 {
                break;
            }
            let mut trial = vectors.clone();
            trial.push(self.basis_vector(i));
            if SubspaceBasis::new(trial.clone(), tol).is_ok() {
                vectors = trial;
            }
        }
        let basis = SubspaceBasis::new(vectors, tol).ok()?;
        self.is_subalgebra(&basis, tol)
            .ok()
            .filter(|c| c.closed)
            .map(|_| Codim1Subalgebra { basis, construction: Codim1Construction::DerivedHyperplane })
    }

    fn non_null_in(&self, space: &SubspaceBasis<S>, tol: f64) -> Option<AlgebraVector<S>> {
        let vs = space.vectors();
        if let Some(v) = vs.iter().find(|v| self.sign_of(v, tol).is_some()) {
            return Some(v.clone());
        }
        for a in 0..vs.len() {
            for b in a + 1..vs.len() {
                let s = vs[a].plus(&vs[b]);
                if self.sign_of(&s, tol).is_some() {
                    return Some(s);
                }
            }
        }
        None
    }

    /// Residuals of antisymmetry, Jacobi, ad-invariance and the trace identities.
    pub fn validate(&self, tol: f64) -> CheckReport {
        let d = self.dim();
        let c = |i: usize, j: usize, k: usize| &self.dense[(i * d + j) * d + k];

        let mut anti = ResidualTracker::new("antisymmetry", tol);
        let mut adinv = ResidualTracker::new("ad_invariance", tol);
        let mut trace = ResidualTracker::new("trace", tol);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    anti.push(c(i, j, k).clone() + c(j, i, k).clone(), &[i, j, k]);
                    adinv.push(c(i, j, k).clone() * self.eps(k) - c(j, k, i).clone() * self.eps(i), &[i, j, k]);
                }
                trace.push(c(i, j, i).clone(), &[i, j, i]);
                trace.push(c(i, i, j).clone(), &[i, i, j]);
            }
        }

        let mut jacobi = ResidualTracker::new("jacobi", tol);
        let mut jac = vec![S::zero(); d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for x in jac.iter_mut() {
                        *x = S::zero();
                    }
                    for m in 0..d {
                        for (a, b, cc) in [(i, j, k), (j, k, i), (k, i, j)] {
                            let first = c(a, b, m);
                            if first.is_exact_zero() {
                                continue;
                            }
                            for (l, slot) in jac.iter_mut().enumerate() {
                                let second = c(m, cc, l);
                                if second.is_exact_zero() {
                                    continue;
                                }
                                *slot = slot.clone() + first.clone() * second.clone();
                            }
                        }
                    }
                    for (l, r) in jac.iter().enumerate() {
                        jacobi.push(r.clone(), &[i, j, k, l]);
                    }
                }
            }
        }

        let checks = vec![anti.finish(), jacobi.finish(), adinv.finish(), trace.finish()];
        CheckReport {
            subject: self.name.clone(),
            arithmetic: if S::EXACT { "exact" } else { "float" }.to_string(),
            tolerance: if S::EXACT { 0.0 } else { tol },
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    /// Re-expresses the algebra in another orthonormal basis (rows in the
    /// current coordinates).
    pub fn rebased(&self, basis: &[AlgebraVector<S>], tol: f64) -> Result<Self> {
        let d = self.dim();
        if basis.len() != d {
            return Err(GeoError::DimensionMismatch { expected: d, found: basis.len() });
        }
        let mut signs = Vec::with_capacity(d);
        for (a, wa) in basis.iter().enumerate() {
            self.check_dim(wa)?;
            for (b, wb) in basis.iter().enumerate().skip(a + 1) {
                let _ = b;
                if !self.dot(wa, wb).is_zero_within(tol) {
                    return Err(GeoError::DegenerateGram);
                }
            }
            let n = self.dot(wa, wa);
            if !(n.abs_value() - S::one()).is_zero_within(tol) {
                return Err(GeoError::NonUnitVector);
            }
            signs.push(n.signum_within(tol) as i8);
        }
        let signature = MetricSignature::new(signs)?;
        let mut entries = Vec::new();
        for a in 0..d {
            for b in a + 1..d {
                let br = self.bracket_unchecked(&basis[a], &basis[b]);
                for (cidx, wc) in basis.iter().enumerate() {
                    let v = S::from_i64(signature.eps(cidx) as i64) * self.dot(&br, wc);
                    let v = if v.is_zero_within(tol) { S::zero() } else { v };
                    if !v.is_exact_zero() {
                        entries.push((a, b, cidx, v));
                    }
                }
            }
        }
        Ok(MetricLieAlgebra::from_brackets(&self.name, signature, entries)?.with_labels(self.labels.clone()))
    }
}

/// Output of [`orthonormalize`]: the algebra and its new basis in the input coordinates.
#[derive(Clone, Debug)]
pub struct Orthonormalized<S> {
    pub algebra: MetricLieAlgebra<S>,
    pub basis: Vec<AlgebraVector<S>>,
}

fn gram_dot<S: Scalar>(gram: &[Vec<S>], v: &[S], w: &[S]) -> S {
    let mut acc = S::zero();
    for (i, a) in v.iter().enumerate() {
        if a.is_exact_zero() {
            continue;
        }
        for (j, b) in w.iter().enumerate() {
            if b.is_exact_zero() || gram[i][j].is_exact_zero() {
                continue;
            }
            acc = acc + a.clone() * b.clone() * gram[i][j].clone();
        }
    }
    acc
}

fn axpy<S: Scalar>(y: &mut [S], a: &S, x: &[S]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_exact_zero() {
            *yi = yi.clone() + a.clone() * xi.clone();
        }
    }
}

/// Gram–Schmidt for an indefinite metric.
///
/// `gram` is the matrix of scalar products of the input basis and `raw` the
/// structure tensor in that basis (dense, `(i·d + j)·d + k`). A null pivot
/// `a` is paired with the first later vector `b` with `⟨a, b⟩ ≠ 0`; the pair is
/// replaced by `(a ± b')/√(2|⟨a,b⟩|)` where `b'` is `b` made null, so that the
/// oscillator basis `(P, X, Y, Q)` becomes `(U, X, Y, V)` with
/// `U = (P + Q)/√2`, `V = (P - Q)/√2`.
pub fn orthonormalize<S: Scalar>(name: &str, gram: &[Vec<S>], raw: &[S], tol: f64) -> Result<Orthonormalized<S>> {
    let d = gram.len();
    if gram.iter().any(|r| r.len() != d) {
        return Err(GeoError::DimensionMismatch { expected: d, found: gram.iter().map(Vec::len).max().unwrap_or(0) });
    }
    if raw.len() != d * d * d {
        return Err(GeoError::DimensionMismatch { expected: d * d * d, found: raw.len() });
    }
    for i in 0..d {
        for j in 0..i {
            if !(gram[i][j].clone() - gram[j][i].clone()).is_zero_within(tol) {
                return Err(GeoError::NotSymmetric);
            }
        }
    }
    let scale = gram.iter().flatten().map(|x| x.to_f64().abs()).fold(1.0, f64::max);
    let thr = tol * scale;

    let mut work: Vec<Vec<S>> = (0..d).map(|i| AlgebraVector::<S>::basis(d, i).into_coeffs()).collect();
    let mut out: Vec<Option<(Vec<S>, i8)>> = vec![None; d];

    let project_rest = |work: &mut Vec<Vec<S>>, out: &[Option<(Vec<S>, i8)>], w: &[S], eps: i8| {
        for (idx, u) in work.iter_mut().enumerate() {
            if out[idx].is_some() {
                continue;
            }
            let coef = gram_dot(gram, u, w) * S::from_i64(-(eps as i64));
            axpy(u, &coef, w);
        }
    };

    for a in 0..d {
        if out[a].is_some() {
            continue;
        }
        let va = work[a].clone();
        let naa = gram_dot(gram, &va, &va);
        if !naa.is_zero_within(thr) {
            let eps = naa.signum_within(thr) as i8;
            let root = naa.abs_value().try_sqrt().ok_or_else(|| GeoError::NotRepresentable(format!("sqrt({})", naa.render())))?;
            let w: Vec<S> = va.iter().map(|x| x.clone() / root.clone()).collect();
            out[a] = Some((w.clone(), eps));
            project_rest(&mut work, &out, &w, eps);
            continue;
        }
        let partner = (a + 1..d).find(|&b| out[b].is_none() && !gram_dot(gram, &va, &work[b]).is_zero_within(thr));
        let Some(b) = partner else {
            return Err(GeoError::DegenerateGram);
        };
        let p = gram_dot(gram, &va, &work[b]);
        let nbb = gram_dot(gram, &work[b], &work[b]);
        // b' = b - ⟨b,b⟩/(2p) a is null with ⟨a, b'⟩ = p.
        let mut vb = work[b].clone();
        axpy(&mut vb, &(-(nbb / (S::from_i64(2) * p.clone()))), &va);
        let two_p = S::from_i64(2) * p.clone();
        let root = two_p.abs_value().try_sqrt().ok_or_else(|| GeoError::NotRepresentable(format!("sqrt({})", two_p.render())))?;
        let plus: Vec<S> = va.iter().zip(&vb).map(|(x, y)| (x.clone() + y.clone()) / root.clone()).collect();
        let minus: Vec<S> = va.iter().zip(&vb).map(|(x, y)| (x.clone() - y.clone()) / root.clone()).collect();
        // ⟨a+b', a+b'⟩ = 2p, ⟨a-b', a-b'⟩ = -2p.
        let sp = p.signum_within(thr) as i8;
        out[a] = Some((plus.clone(), sp));
        out[b] = Some((minus.clone(), -sp));
        project_rest(&mut work, &out, &plus, sp);
        project_rest(&mut work, &out, &minus, -sp);
    }

    let (basis, signs): (Vec<Vec<S>>, Vec<i8>) = out.into_iter().map(|o| o.expect("every slot assigned")).unzip();
    let index = signs.iter().filter(|s| **s < 0).count();
    if index > 1 {
        return Err(GeoError::IndexTooLarge(index));
    }
    let signature = MetricSignature::new(signs)?;

    let bracket_raw = |v: &[S], w: &[S]| {
        let mut r = vec![S::zero(); d];
        for (i, a) in v.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in w.iter().enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                for (k, slot) in r.iter_mut().enumerate() {
                    let c = &raw[(i * d + j) * d + k];
                    if !c.is_exact_zero() {
                        *slot = slot.clone() + a.clone() * b.clone() * c.clone();
                    }
                }
            }
        }
        r
    };
    let mut entries = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            let br = bracket_raw(&basis[a], &basis[b]);
            for (c, wc) in basis.iter().enumerate() {
                let v = S::from_i64(signature.eps(c) as i64) * gram_dot(gram, &br, wc);
                if !v.is_zero_within(if S::EXACT { 0.0 } else { thr }) {
                    entries.push((a, b, c, v));
                }
            }
        }
    }
    let algebra = MetricLieAlgebra::from_brackets(name, signature, entries)?;
    Ok(Orthonormalized { algebra, basis: basis.into_iter().map(AlgebraVector).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::scalar::Exact;

    fn ex(s: &str) -> Exact {
        s.parse().unwrap()
    }

    fn v(c: &[i64]) -> AlgebraVector<Exact> {
        AlgebraVector::from_ints(c)
    }

    #[test]
    fn signature_rules() {
        assert!(MetricSignature::new(vec![1, -1, -1]).is_err());
        assert!(MetricSignature::new(vec![1, 0]).is_err());
        let s = MetricSignature::lorentzian(3);
        assert_eq!((s.index(), s.normal_sign(), s.timelike_axis()), (1, -1, Some(2)));
        assert_eq!(MetricSignature::riemannian(2).normal_sign(), 1);
    }

    #[test]
    fn su2_connection_and_curvature() {
        let g = catalog::su2();
        let (e1, e2, e3) = (v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1]));
        assert_eq!(g.bracket(&e1, &e2).unwrap(), e3);
        assert_eq!(g.levi_civita(&e1, &e2, FieldMode::LeftInvariant).unwrap(), e3.scale(&ex("1/2")));
        assert_eq!(g.levi_civita(&e1, &e2, FieldMode::Pointwise).unwrap(), e3.scale(&ex("1/2")));
        assert_eq!(g.levi_civita(&e2, &e2, FieldMode::LeftInvariant).unwrap(), v(&[0, 0, 0]));
        // -¼[[e1,e2],e2] = -¼[e3,e2] = ¼e1
        assert_eq!(g.curvature_tensor(&e1, &e2, &e2).unwrap(), e1.scale(&ex("1/4")));
        assert_eq!(g.sectional_curvature(&e1, &e2, 0.0).unwrap(), Sectional::Value(ex("1/4")));
        let b = g.killing_matrix();
        for (i, row) in b.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert_eq!(*x, if i == j { ex("-2") } else { ex("0") });
            }
        }
        assert_eq!(g.ricci(&e1, &e1).unwrap(), ex("1/2"));
        assert_eq!(g.ricci_by_contraction(&e1, &e1).unwrap(), ex("1/2"));
        let ss = g.is_semisimple(0.0);
        assert!(ss.semisimple);
        assert_eq!(ss.killing_determinant, ex("-8"));
        assert_eq!(g.center(0.0).dim(), 0);
        assert!(g.codim1_subalgebra(0.0).is_none());
    }

    #[test]
    fn dimension_errors() {
        let g = catalog::su2();
        assert!(matches!(g.bracket(&v(&[1, 0]), &v(&[0, 1, 0])), Err(GeoError::DimensionMismatch { .. })));
        assert!(matches!(g.sectional_curvature(&v(&[1, 0, 0]), &v(&[1, 0, 0]), 0.0), Err(GeoError::DegeneratePlane)));
    }

    #[test]
    fn abelian_everything_vanishes() {
        let g = catalog::euclidean(3);
        let (x, y) = (v(&[1, 2, 3]), v(&[-1, 0, 4]));
        assert_eq!(g.bracket(&x, &y).unwrap(), v(&[0, 0, 0]));
        assert_eq!(g.killing_form(&x, &y).unwrap(), ex("0"));
        assert_eq!(g.center(0.0).dim(), 3);
        assert!(!g.is_semisimple(0.0).semisimple);
        let c = g.codim1_subalgebra(0.0).unwrap();
        assert_eq!(c.basis.dim(), 2);
        assert!(g.validate(0.0).passed);
    }

    #[test]
    fn oscillator_curvature_values() {
        let g = catalog::oscillator(1, false).unwrap();
        let (u, x, y, vv) = (g.basis_vector(0), g.basis_vector(1), g.basis_vector(2), g.basis_vector(3));
        assert_eq!(g.sectional_curvature(&vv, &x, 0.0).unwrap(), Sectional::Value(ex("-1/8")));
        assert_eq!(g.sectional_curvature(&vv, &y, 0.0).unwrap(), Sectional::Value(ex("-1/8")));
        assert_eq!(g.sectional_curvature(&vv, &u, 0.0).unwrap(), Sectional::Value(ex("0")));
        assert_eq!(g.curvature_tensor(&vv, &u, &u).unwrap(), v(&[0, 0, 0, 0]));
        // [X, Y] = P is null and nonzero.
        assert_eq!(g.sectional_curvature(&x, &y, 0.0).unwrap(), Sectional::UndefinedNullBracket);
        assert_eq!(g.ricci(&vv, &vv).unwrap(), ex("1/4"));
        assert_eq!(g.ricci_directional(&vv, 0.0).unwrap(), ex("-1/4"));
        // aV + X with a = 2 is timelike; the plane curvature is a²/(8(1−a²)).
        let w = vv.scale(&ex("2")).plus(&x);
        assert_eq!(g.plane_curvature(&w, &y, 0.0).unwrap(), Sectional::Value(ex("-1/6")));
        assert_eq!(g.curvature_route_sectional(&w, &y, 0.0).unwrap(), ex("-1/6"));
    }

    #[test]
    fn oscillator_structure() {
        for m in 1..=3 {
            let g = catalog::oscillator(m, false).unwrap();
            let d = g.dim();
            let r = Exact::one() / Exact::sqrt2();
            let mut p = AlgebraVector::zeros(d).into_coeffs();
            p[0] = r.clone();
            p[d - 1] = r;
            let p = AlgebraVector::new(p);
            let center = g.center(0.0);
            assert_eq!(center.dim(), 1);
            assert!(center.contains(&p, 0.0));
            let ss = g.is_semisimple(0.0);
            assert!(!ss.semisimple);
            let nv = ss.null_vector.unwrap();
            let b = g.killing_matrix();
            for row in &b {
                let s = row.iter().zip(nv.coeffs()).fold(Exact::zero(), |a, (x, y)| a + x.clone() * y.clone());
                assert!(s.is_zero());
            }
            // B = -2m q⊗q with q(w) the Q-coefficient of w; q(U) = 1/√2.
            assert_eq!(b[0][0], Exact::from_i64(-(m as i64)));
            let c1 = g.codim1_subalgebra(0.0).unwrap();
            assert_eq!(c1.construction, Codim1Construction::DerivedHyperplane);
            assert!(c1.basis.contains(&p, 0.0));
        }
    }

    #[test]
    fn subalgebra_witness_for_u_x_y() {
        let g = catalog::oscillator(1, false).unwrap();
        let h = SubspaceBasis::new(vec![g.basis_vector(0), g.basis_vector(1), g.basis_vector(2)], 0.0).unwrap();
        let check = g.is_subalgebra(&h, 0.0).unwrap();
        assert!(!check.closed);
        let w = check.witness.unwrap();
        assert_eq!(w.pair, (1, 2));
        let r = Exact::one() / Exact::sqrt2();
        assert_eq!(w.bracket.coeffs(), &[r.clone(), Exact::zero(), Exact::zero(), r.clone()]);
        assert_eq!(w.outside.coeffs(), &[Exact::zero(), Exact::zero(), Exact::zero(), r]);
        assert!(matches!(
            g.is_subalgebra(&SubspaceBasis { vectors: vec![g.basis_vector(0), g.basis_vector(0)] }, 0.0),
            Err(GeoError::DependentBasis)
        ));
    }

    #[test]
    fn validate_localizes_antisymmetry_break() {
        let g = catalog::su2();
        let bad = g.with_constant(0, 1, 2, ex("2"));
        let rep = bad.validate(0.0);
        assert!(!rep.passed);
        let anti = rep.entry("antisymmetry").unwrap();
        assert!(!anti.passed);
        assert_eq!(anti.location.as_deref(), Some(&[1, 2, 3][..]));
        assert_eq!(anti.max_residual_exact.as_deref(), Some("1/1"));
    }

    #[test]
    fn literal_oscillator_breaks_ad_invariance() {
        let g = catalog::oscillator(2, true).unwrap();
        let rep = g.validate(0.0);
        assert!(rep.entry("antisymmetry").unwrap().passed);
        assert!(rep.entry("jacobi").unwrap().passed);
        let adinv = rep.entry("ad_invariance").unwrap();
        assert!(!adinv.passed);
        assert!(adinv.violations > 0);
    }

    #[test]
    fn orthonormalize_identity_gram_is_noop() {
        let g = catalog::su2();
        let d = 3;
        let gram: Vec<Vec<Exact>> =
            (0..d).map(|i| (0..d).map(|j| if i == j { Exact::one() } else { Exact::zero() }).collect()).collect();
        let mut raw = vec![Exact::zero(); 27];
        for (i, j, k, c) in g.nonzero_constants() {
            raw[(i * d + j) * d + k] = c.clone();
        }
        let o = orthonormalize("su2", &gram, &raw, 0.0).unwrap();
        assert_eq!(o.algebra.nonzero_constants(), g.nonzero_constants());
        assert_eq!(o.basis, (0..3).map(|i| g.basis_vector(i)).collect::<Vec<_>>());
    }

    #[test]
    fn orthonormalize_errors() {
        let z = Exact::zero;
        let o = Exact::one;
        let raw = vec![Exact::zero(); 8];
        let degenerate = vec![vec![o(), o()], vec![o(), o()]];
        assert_eq!(orthonormalize("x", &degenerate, &raw, 0.0).unwrap_err(), GeoError::DegenerateGram);
        let neg = vec![vec![-o(), z()], vec![z(), -o()]];
        assert_eq!(orthonormalize("x", &neg, &raw, 0.0).unwrap_err(), GeoError::IndexTooLarge(2));
        let asym = vec![vec![o(), o()], vec![z(), o()]];
        assert_eq!(orthonormalize("x", &asym, &raw, 0.0).unwrap_err(), GeoError::NotSymmetric);
        let irr = vec![vec![Exact::from_i64(3), z()], vec![z(), o()]];
        assert!(matches!(orthonormalize("x", &irr, &raw, 0.0), Err(GeoError::NotRepresentable(_))));
    }

    #[test]
    fn u2_codim1_is_su2() {
        let g = catalog::u2();
        let c = g.codim1_subalgebra(0.0).unwrap();
        assert!(matches!(c.construction, Codim1Construction::CenterOrthogonal { .. }));
        let su2 = SubspaceBasis::new((0..3).map(|i| g.basis_vector(i)).collect(), 0.0).unwrap();
        assert!(c.basis.spans_same(&su2, 0.0));
        assert!(g.is_subalgebra(&su2, 0.0).unwrap().closed);
    }

    #[test]
    fn float_path_matches_exact_path() {
        let g = catalog::sl2r();
        let f = g.to_f64();
        let (x, y) = (v(&[1, 2, 0]), v(&[0, 1, 3]));
        let k = g.plane_curvature(&x, &y, 0.0).unwrap().value().unwrap().to_f64();
        let kf = *f.plane_curvature(&x.to_f64(), &y.to_f64(), DEFAULT_TOL).unwrap().value().unwrap();
        assert!((k - kf).abs() < 1e-14);
        let rep = f.validate(DEFAULT_TOL);
        assert!(rep.passed);
        assert_eq!(rep.arithmetic, "float");
    }

    #[test]
    fn rebased_preserves_curvature() {
        let g = catalog::su2().to_f64();
        let (c, s) = (0.6f64, 0.8f64);
        let basis = vec![
            AlgebraVector::new(vec![c, s, 0.0]),
            AlgebraVector::new(vec![-s, c, 0.0]),
            AlgebraVector::new(vec![0.0, 0.0, 1.0]),
        ];
        let r = g.rebased(&basis, 1e-12).unwrap();
        assert!(r.validate(1e-12).passed);
        let k = *r.sectional_curvature(&r.basis_vector(0), &r.basis_vector(2), 1e-12).unwrap().value().unwrap();
        assert!((k - 0.25).abs() < 1e-14);
    }
}
