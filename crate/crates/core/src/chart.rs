//! Parametric hypersurfaces given by left-trivialized tangent frames.
//!
//! A chart maps a parameter box `D ⊂ R^n` into `G^{n+1}`; what the numerics
//! see is `T_k(u) = φ(u)^{-1} ∂_k φ(u) ∈ g`. Every vector lives in a fixed
//! stack buffer of length [`MAX_DIM`] so grid scans never allocate.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::{AlgebraVector, MetricLieAlgebra, SubspaceBasis};
use crate::error::{GeoError, Result};
use crate::linalg;
use crate::scalar::{Exact, Scalar};

/// Largest ambient dimension supported by charts.
pub const MAX_DIM: usize = 8;

pub type Vd = [f64; MAX_DIM];
pub type Md = [[f64; MAX_DIM]; MAX_DIM];

/// Coordinate scale of the stereographic sphere chart.
pub const SPHERE_SCALE: f64 = 2.0;

/// Rows `t[k]`, `k < n`, hold `T_k(u)`.
#[derive(Clone, Copy, Debug)]
pub struct Frame {
    pub t: Md,
}

impl Default for Frame {
    fn default() -> Self {
        Self { t: [[0.0; MAX_DIM]; MAX_DIM] }
    }
}

/// Declared global properties of the surface a chart represents. `None`
/// means unknown; none of these is ever inferred from samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GlobalTraits {
    pub compact: Option<bool>,
    pub complete: Option<bool>,
    pub proper: Option<bool>,
    pub bounded_gauss_map: Option<bool>,
}

/// The normal at the domain center satisfies `sign·⟨η, reference⟩ > 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrientationAnchor {
    pub reference: Vec<f64>,
    pub sign: i8,
}

/// Height function of a graph: a Gaussian bump plus an optional hyperboloid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeightSpec {
    pub amp: f64,
    pub width: f64,
    /// Stretch of the bump along the first parameter axis.
    pub aspect: f64,
    /// `√(r² + |u|²)` is added when set.
    pub hyperboloid: Option<f64>,
}

impl HeightSpec {
    pub const FLAT: HeightSpec = HeightSpec { amp: 0.0, width: 1.0, aspect: 1.0, hyperboloid: None };

    /// Gradient of the height at `u`.
    fn gradient(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        let w2 = self.width * self.width;
        let q: f64 = u.iter().enumerate().map(|(k, x)| if k == 0 { (x / self.aspect).powi(2) } else { x * x }).sum();
        let bump = if self.amp == 0.0 { 0.0 } else { self.amp * (-q / (2.0 * w2)).exp() };
        let root = self.hyperboloid.map(|r| (r * r + u.iter().map(|x| x * x).sum::<f64>()).sqrt());
        for k in 0..n {
            let dq = if k == 0 { 2.0 * u[0] / (self.aspect * self.aspect) } else { 2.0 * u[k] };
            out[k] = -bump * dq / (2.0 * w2) + root.map_or(0.0, |s| u[k] / s);
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum ExpKind {
    Zero,
    /// `M³ = -θ² M`.
    Rotation(f64),
    /// `M³ = θ² M`.
    Hyperbolic(f64),
    /// `M³ = 0`.
    Nilpotent,
    General,
}

/// `t ↦ exp(t·ad h)` for one generator.
#[derive(Clone, Debug)]
struct AdExp {
    m: Md,
    m2: Md,
    kind: ExpKind,
    dense: DMatrix<f64>,
}

fn mat_mul(a: &Md, b: &Md, d: usize) -> Md {
    let mut out = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..d {
        for k in 0..d {
            if a[i][k] == 0.0 {
                continue;
            }
            for j in 0..d {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn frob(a: &Md, d: usize) -> f64 {
    (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum::<f64>().sqrt()
}

impl AdExp {
    fn new(m: Md, d: usize) -> Self {
        let m2 = mat_mul(&m, &m, d);
        let m3 = mat_mul(&m2, &m, d);
        let nm = frob(&m, d);
        let kind = if nm == 0.0 {
            ExpKind::Zero
        } else {
            let dot: f64 = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| m3[i][j] * m[i][j]).sum();
            let lambda = dot / (nm * nm);
            let mut res = 0.0f64;
            for i in 0..d {
                for j in 0..d {
                    res = res.max((m3[i][j] - lambda * m[i][j]).abs());
                }
            }
            let scale = nm.powi(3).max(1.0);
            if res > 1e-13 * scale {
                ExpKind::General
            } else if lambda.abs() <= 1e-13 * scale {
                ExpKind::Nilpotent
            } else if lambda < 0.0 {
                ExpKind::Rotation((-lambda).sqrt())
            } else {
                ExpKind::Hyperbolic(lambda.sqrt())
            }
        };
        let dense = DMatrix::from_fn(d, d, |i, j| m[i][j]);
        Self { m, m2, kind, dense }
    }

    /// `exp(t M)`.
    fn exp(&self, t: f64, d: usize) -> Md {
        let (a, b) = match self.kind {
            ExpKind::Zero => (0.0, 0.0),
            ExpKind::Nilpotent => (t, 0.5 * t * t),
            ExpKind::Rotation(th) => ((t * th).sin() / th, (1.0 - (t * th).cos()) / (th * th)),
            ExpKind::Hyperbolic(th) => ((t * th).sinh() / th, ((t * th).cosh() - 1.0) / (th * th)),
            ExpKind::General => {
                let e = (&self.dense * t).exp();
                let mut out = [[0.0; MAX_DIM]; MAX_DIM];
                for i in 0..d {
                    for j in 0..d {
                        out[i][j] = e[(i, j)];
                    }
                }
                return out;
            }
        };
        let mut out = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..d {
            for j in 0..d {
                out[i][j] = a * self.m[i][j] + b * self.m2[i][j];
            }
            out[i][i] += 1.0;
        }
        out
    }
}

/// Coordinates of the second kind on a subgroup:
/// `s(u) = exp(u_1 h_1)···exp(u_n h_n)`, whose left-trivialized frame is
/// `T_k = exp(-u_n ad h_n)···exp(-u_{k+1} ad h_{k+1}) h_k`.
#[derive(Clone, Debug)]
struct SecondKind {
    gens: Vec<Vd>,
    exps: Vec<AdExp>,
}

impl SecondKind {
    fn new(alg: &MetricLieAlgebra<f64>, gens: Vec<Vd>) -> Self {
        let d = alg.dim();
        let exps = gens
            .iter()
            .map(|g| {
                let ad = alg.ad_matrix(&AlgebraVector::new(g[..d].to_vec()));
                let mut m = [[0.0; MAX_DIM]; MAX_DIM];
                for i in 0..d {
                    m[i][..d].copy_from_slice(&ad[i]);
                }
                AdExp::new(m, d)
            })
            .collect();
        Self { gens, exps }
    }

    fn eval(&self, u: &[f64], d: usize, out: &mut Frame) {
        let n = self.gens.len();
        let mut es = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
        for m in 0..n {
            es[m] = self.exps[m].exp(-u[m], d);
        }
        for k in 0..n {
            let mut v = self.gens[k];
            for e in es.iter().take(n).skip(k + 1) {
                let mut w = [0.0; MAX_DIM];
                for i in 0..d {
                    let mut s = 0.0;
                    for j in 0..d {
                        s += e[i][j] * v[j];
                    }
                    w[i] = s;
                }
                v = w;
            }
            out.t[k] = v;
        }
    }
}

pub type FrameFn = Arc<dyn Fn(&[f64], &mut Frame) + Send + Sync>;

#[derive(Clone)]
enum ChartKind {
    /// Stereographic chart of a round sphere in an abelian ambient, north pole at `u = 0`.
    Sphere { r: f64 },
    /// `s(u)·exp(h(u) ν)` with `ν` central: `T_k = ω_k + ∂_k h ν`.
    Graph { base: SecondKind, nu: Vd, height: HeightSpec },
    Custom(FrameFn),
}

/// Structure data of the ambient in flat float form.
#[derive(Clone, Debug)]
pub struct AmbientData {
    pub d: usize,
    pub eps: Vd,
    pub terms: Vec<(usize, usize, usize, f64)>,
    pub killing: Md,
}

impl AmbientData {
    pub fn new(alg: &MetricLieAlgebra<f64>) -> Self {
        let d = alg.dim();
        let mut eps = [0.0; MAX_DIM];
        for (i, e) in eps.iter_mut().enumerate().take(d) {
            *e = alg.signature().eps(i) as f64;
        }
        let kb = alg.killing_matrix();
        let mut killing = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..d {
            killing[i][..d].copy_from_slice(&kb[i]);
        }
        Self { d, eps, terms: alg.nonzero_constants().to_vec(), killing }
    }

    #[inline]
    pub fn dot(&self, a: &Vd, b: &Vd) -> f64 {
        let mut s = 0.0;
        for i in 0..self.d {
            s += self.eps[i] * a[i] * b[i];
        }
        s
    }

    #[inline]
    pub fn bracket(&self, a: &Vd, b: &Vd) -> Vd {
        let mut out = [0.0; MAX_DIM];
        for &(i, j, k, c) in &self.terms {
            out[k] += c * a[i] * b[j];
        }
        out
    }

    /// `Ric(v, v) = -¼ B(v, v)`.
    pub fn ricci(&self, v: &Vd) -> f64 {
        let mut s = 0.0;
        for i in 0..self.d {
            for j in 0..self.d {
                s += self.killing[i][j] * v[i] * v[j];
            }
        }
        -0.25 * s
    }
}

#[derive(Clone)]
pub struct ImmersionChart {
    id: String,
    name: String,
    ambient_exact: MetricLieAlgebra<Exact>,
    ambient: MetricLieAlgebra<f64>,
    data: AmbientData,
    n: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    kind: ChartKind,
    anchor: OrientationAnchor,
    time_reference: Option<Vd>,
    orientation: f64,
    traits: GlobalTraits,
}

impl std::fmt::Debug for ImmersionChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImmersionChart")
            .field("id", &self.id)
            .field("ambient", &self.ambient.name())
            .field("n", &self.n)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("anchor", &self.anchor)
            .finish()
    }
}

fn to_vd(v: &[f64]) -> Vd {
    let mut out = [0.0; MAX_DIM];
    out[..v.len()].copy_from_slice(v);
    out
}

/// Determinant of the leading `n×n` block (partial pivoting).
fn det_small(mut m: Md, n: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..n {
        let mut p = c;
        for r in c + 1..n {
            if m[r][c].abs() > m[p][c].abs() {
                p = r;
            }
        }
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            if f != 0.0 {
                for j in c..n {
                    m[r][j] -= f * m[c][j];
                }
            }
        }
    }
    det
}

/// Highest-index basis vector that is central and non-null; it must be the
/// timelike axis for Lorentzian ambients.
fn central_axis(alg: &MetricLieAlgebra<Exact>) -> Result<usize> {
    let center = alg.center(0.0);
    let candidates = (0..alg.dim()).rev().filter(|&i| center.contains(&alg.basis_vector(i), 0.0));
    let pick = match alg.signature().timelike_axis() {
        Some(t) => candidates.into_iter().find(|&i| i == t),
        None => candidates.into_iter().next(),
    };
    pick.ok_or_else(|| GeoError::InvalidParam {
        name: "ambient".into(),
        message: format!("{} has no central basis vector usable as graph direction", alg.name()),
    })
}

impl ImmersionChart {
    #[allow(clippy::too_many_arguments)]
    fn build(
        name: &str,
        ambient_exact: &MetricLieAlgebra<Exact>,
        n: usize,
        lo: Vec<f64>,
        hi: Vec<f64>,
        kind: ChartKind,
        anchor: OrientationAnchor,
        traits: GlobalTraits,
    ) -> Result<Self> {
        let d = ambient_exact.dim();
        if d > MAX_DIM || n + 1 != d {
            return Err(GeoError::DimensionMismatch { expected: d.min(MAX_DIM), found: n + 1 });
        }
        if lo.len() != n || hi.len() != n || lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(GeoError::InvalidParam { name: "domain".into(), message: "bad parameter box".into() });
        }
        let ambient = ambient_exact.to_f64();
        let data = AmbientData::new(&ambient);
        let time_reference = ambient.signature().timelike_axis().map(|t| {
            let mut v = [0.0; MAX_DIM];
            v[t] = 1.0;
            v
        });
        let mut chart = Self {
            id: name.to_string(),
            name: name.to_string(),
            ambient_exact: ambient_exact.clone(),
            ambient,
            data,
            n,
            lo,
            hi,
            kind,
            anchor,
            time_reference,
            orientation: 1.0,
            traits,
        };
        let c = chart.center();
        let mut fr = Frame::default();
        chart.eval_frame(&c, &mut fr);
        let raw = chart.raw_normal(&fr, &c)?;
        let reference = to_vd(&chart.anchor.reference);
        let q = chart.data.dot(&raw, &raw).abs().sqrt();
        let s = chart.data.dot(&raw, &reference) / (q * chart.data.dot(&reference, &reference).abs().sqrt().max(1e-300));
        if s.abs() < 1e-8 {
            return Err(GeoError::NormalSignAmbiguous);
        }
        chart.orientation = chart.anchor.sign as f64 * s.signum();
        Ok(chart)
    }

    /// A chart from user-supplied frames; used for fixtures outside the catalog.
    pub fn custom(
        name: &str,
        ambient: &MetricLieAlgebra<Exact>,
        lo: Vec<f64>,
        hi: Vec<f64>,
        anchor: OrientationAnchor,
        traits: GlobalTraits,
        frames: FrameFn,
    ) -> Result<Self> {
        let n = ambient.dim() - 1;
        Self::build(name, ambient, n, lo, hi, ChartKind::Custom(frames), anchor, traits)
    }

    pub fn with_id(mut self, id: &str) -> Self {
        self.id = id.to_string();
        self
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn with_traits(mut self, traits: GlobalTraits) -> Self {
        self.traits = traits;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ambient(&self) -> &MetricLieAlgebra<f64> {
        &self.ambient
    }

    pub fn ambient_exact(&self) -> &MetricLieAlgebra<Exact> {
        &self.ambient_exact
    }

    pub fn ambient_data(&self) -> &AmbientData {
        &self.data
    }

    /// Hypersurface dimension `n`.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.n + 1
    }

    pub fn lower(&self) -> &[f64] {
        &self.lo
    }

    pub fn upper(&self) -> &[f64] {
        &self.hi
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn anchor(&self) -> &OrientationAnchor {
        &self.anchor
    }

    pub fn traits(&self) -> GlobalTraits {
        self.traits
    }

    pub fn is_lorentzian(&self) -> bool {
        self.time_reference.is_some()
    }

    /// `ε_N = (-1)^ν`.
    pub fn eps_n(&self) -> f64 {
        if self.is_lorentzian() {
            -1.0
        } else {
            1.0
        }
    }

    pub fn time_reference(&self) -> Option<&Vd> {
        self.time_reference.as_ref()
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.n && u.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| *x >= *a && *x <= *b)
    }

    pub fn check_domain(&self, u: &[f64]) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            Err(GeoError::DomainViolation { u: u.to_vec() })
        }
    }

    /// Frame at `u` without a domain check.
    pub fn eval_frame(&self, u: &[f64], out: &mut Frame) {
        let d = self.n + 1;
        match &self.kind {
            ChartKind::Sphere { r } => {
                // Inverse stereographic projection of v = u / SPHERE_SCALE.
                let n = self.n;
                let mut v = [0.0; MAX_DIM];
                for k in 0..n {
                    v[k] = u[k] / SPHERE_SCALE;
                }
                let s = 1.0 + v[..n].iter().map(|x| x * x).sum::<f64>();
                let c = r / (s * s * SPHERE_SCALE);
                for k in 0..n {
                    for i in 0..n {
                        let delta = if i == k { s } else { 0.0 };
                        out.t[k][i] = 2.0 * c * (delta - 2.0 * v[i] * v[k]);
                    }
                    out.t[k][n] = -4.0 * c * v[k];
                }
            }
            ChartKind::Graph { base, nu, height } => {
                base.eval(u, d, out);
                let mut grad = [0.0; MAX_DIM];
                height.gradient(u, &mut grad[..self.n]);
                for k in 0..self.n {
                    for i in 0..d {
                        out.t[k][i] += grad[k] * nu[i];
                    }
                }
            }
            ChartKind::Custom(f) => f(u, out),
        }
    }

    pub fn frame(&self, u: &[f64]) -> Result<Frame> {
        self.check_domain(u)?;
        let mut f = Frame::default();
        self.eval_frame(u, &mut f);
        Ok(f)
    }

    /// Unnormalized, unoriented normal: `η_i = ε_i (-1)^i det(T without column i)`.
    fn raw_normal(&self, fr: &Frame, u: &[f64]) -> Result<Vd> {
        let (n, d) = (self.n, self.n + 1);
        let mut w = [0.0; MAX_DIM];
        let mut scale = 1.0;
        for k in 0..n {
            scale *= fr.t[k][..d].iter().map(|x| x * x).sum::<f64>().sqrt();
        }
        for (i, wi) in w.iter_mut().enumerate().take(d) {
            let mut m = [[0.0; MAX_DIM]; MAX_DIM];
            for k in 0..n {
                let mut c = 0;
                for j in 0..d {
                    if j != i {
                        m[k][c] = fr.t[k][j];
                        c += 1;
                    }
                }
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            *wi = self.data.eps[i] * sign * det_small(m, n);
        }
        let norm = w[..d].iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 1e-12 * scale) {
            return Err(GeoError::RankDeficientFrame { u: u.to_vec() });
        }
        Ok(w)
    }

    /// Oriented unit normal for a frame evaluated at `u`.
    pub fn normal_from_frame(&self, fr: &Frame, u: &[f64]) -> Result<Vd> {
        let raw = self.raw_normal(fr, u)?;
        let q = self.data.dot(&raw, &raw);
        let norm2 = raw.iter().map(|x| x * x).sum::<f64>();
        if q.abs() <= 1e-12 * norm2 {
            return Err(GeoError::DegenerateInducedMetric);
        }
        if q.signum() != self.eps_n() {
            return Err(GeoError::NonSpacelike { u: u.to_vec() });
        }
        let s = self.orientation / q.abs().sqrt();
        let mut eta = [0.0; MAX_DIM];
        for i in 0..=self.n {
            eta[i] = s * raw[i];
        }
        if let Some(x) = &self.time_reference {
            if self.data.dot(&eta, x) >= 0.0 {
                return Err(GeoError::TimeOrientationConflict { u: u.to_vec() });
            }
        }
        Ok(eta)
    }

    pub fn normal(&self, u: &[f64]) -> Result<Vd> {
        let fr = self.frame(u)?;
        self.normal_from_frame(&fr, u)
    }

    /// `max_{k<l} |∂_k T_l − ∂_l T_k + [T_k, T_l]|` by central differences.
    pub fn maurer_cartan_residual(&self, u: &[f64], h: f64) -> Result<f64> {
        let (n, d) = (self.n, self.n + 1);
        let mut plus = vec![Frame::default(); n];
        let mut minus = vec![Frame::default(); n];
        let mut p = u.to_vec();
        for k in 0..n {
            p[k] = u[k] + h;
            self.check_domain(&p)?;
            self.eval_frame(&p, &mut plus[k]);
            p[k] = u[k] - h;
            self.check_domain(&p)?;
            self.eval_frame(&p, &mut minus[k]);
            p[k] = u[k];
        }
        let fr = self.frame(u)?;
        let mut worst = 0.0f64;
        for k in 0..n {
            for l in k + 1..n {
                let br = self.data.bracket(&fr.t[k], &fr.t[l]);
                for i in 0..d {
                    let dk_tl = (plus[k].t[l][i] - minus[k].t[l][i]) / (2.0 * h);
                    let dl_tk = (plus[l].t[k][i] - minus[l].t[k][i]) / (2.0 * h);
                    worst = worst.max((dk_tl - dl_tk + br[i]).abs());
                }
            }
        }
        Ok(worst)
    }
}

/// Declared traits of the catalog families.
pub fn default_traits(name: &str) -> GlobalTraits {
    let t = |c, cp, p, b| GlobalTraits { compact: c, complete: cp, proper: p, bounded_gauss_map: b };
    match name {
        "sphere" | "su2_in_u2" => t(Some(true), Some(true), Some(true), None),
        "hyperbolic_graph" => t(Some(false), Some(true), Some(true), Some(false)),
        "affine_subspace" => t(Some(false), Some(true), Some(true), Some(true)),
        _ => GlobalTraits::default(),
    }
}

fn basis_vd(d: usize, i: usize) -> Vd {
    let _ = d;
    let mut v = [0.0; MAX_DIM];
    v[i] = 1.0;
    v
}

/// Round sphere of radius `r` in an abelian Riemannian ambient, outward normal.
pub fn sphere(ambient: &MetricLieAlgebra<Exact>, r: f64) -> Result<ImmersionChart> {
    let d = ambient.dim();
    if !ambient.is_abelian() || ambient.signature().index() != 0 {
        return Err(GeoError::WrongAmbient("abelian Riemannian"));
    }
    if d < 2 {
        return Err(GeoError::InvalidParam { name: "ambient".into(), message: "dimension at least 2".into() });
    }
    let n = d - 1;
    let anchor = OrientationAnchor { reference: basis_vd(d, n)[..d].to_vec(), sign: 1 };
    ImmersionChart::build(
        &format!("sphere:r={r}"),
        ambient,
        n,
        vec![-2.0; n],
        vec![2.0; n],
        ChartKind::Sphere { r },
        anchor,
        default_traits("sphere"),
    )
    .map(|c| c.renamed("sphere"))
}

/// Graph `s(u)·exp(h(u) ν)` over the hyperplane orthogonal to the central axis `ν`.
pub fn graph(ambient: &MetricLieAlgebra<Exact>, height: HeightSpec) -> Result<ImmersionChart> {
    let d = ambient.dim();
    let axis = central_axis(ambient)?;
    let gens: Vec<usize> = (0..d).filter(|&i| i != axis).collect();
    graph_over(ambient, &gens, axis, height, [-1.0, 1.0], "graph")
}

fn graph_over(
    ambient: &MetricLieAlgebra<Exact>,
    gens: &[usize],
    axis: usize,
    height: HeightSpec,
    box1: [f64; 2],
    name: &str,
) -> Result<ImmersionChart> {
    let d = ambient.dim();
    let vs: Vec<AlgebraVector<Exact>> = gens.iter().map(|&i| ambient.basis_vector(i)).collect();
    let sub = SubspaceBasis::new(vs, 0.0)?;
    if !ambient.is_subalgebra(&sub, 0.0)?.closed {
        return Err(GeoError::InvalidParam { name: "ambient".into(), message: "base is not a subalgebra".into() });
    }
    let f = ambient.to_f64();
    let base = SecondKind::new(&f, gens.iter().map(|&i| basis_vd(d, i)).collect());
    let nu = basis_vd(d, axis);
    let lorentzian = ambient.signature().is_lorentzian();
    let anchor = OrientationAnchor { reference: nu[..d].to_vec(), sign: if lorentzian { -1 } else { 1 } };
    let n = d - 1;
    ImmersionChart::build(
        name,
        ambient,
        n,
        vec![box1[0]; n],
        vec![box1[1]; n],
        ChartKind::Graph { base, nu, height },
        anchor,
        default_traits(name),
    )
}

/// Hyperboloid `{⟨x,x⟩ = -r²}` as the graph `u ↦ (u, √(r² + |u|²))` in Minkowski space.
pub fn hyperbolic_graph(ambient: &MetricLieAlgebra<Exact>, r: f64) -> Result<ImmersionChart> {
    if !ambient.is_abelian() || !ambient.signature().is_lorentzian() {
        return Err(GeoError::WrongAmbient("Minkowski"));
    }
    let d = ambient.dim();
    let axis = ambient.signature().timelike_axis().expect("Lorentzian");
    let gens: Vec<usize> = (0..d).filter(|&i| i != axis).collect();
    let height = HeightSpec { hyperboloid: Some(r), ..HeightSpec::FLAT };
    graph_over(ambient, &gens, axis, height, [-1.0, 1.0], "hyperbolic_graph")
}

/// Lateral class of the connected subgroup with Lie algebra `span` (1-based
/// catalog indices, converted to 0-based by the caller); the codimension-one
/// subalgebra of the ambient is used when `span` is absent.
pub fn subgroup_slice(ambient: &MetricLieAlgebra<Exact>, span: Option<&[usize]>, t: f64) -> Result<ImmersionChart> {
    let vectors: Vec<AlgebraVector<Exact>> = match span {
        Some(idx) => idx.iter().map(|&i| ambient.basis_vector(i)).collect(),
        None => ambient
            .codim1_subalgebra(0.0)
            .ok_or_else(|| GeoError::InvalidParam {
                name: "span".into(),
                message: format!("{} has no codimension-one subalgebra", ambient.name()),
            })?
            .basis
            .vectors()
            .to_vec(),
    };
    subgroup_slice_with_basis(ambient, vectors, t)
}

/// Slice through the identity spanned by arbitrary exact generators.
pub fn subgroup_slice_with_basis(
    ambient: &MetricLieAlgebra<Exact>,
    vectors: Vec<AlgebraVector<Exact>>,
    t: f64,
) -> Result<ImmersionChart> {
    let d = ambient.dim();
    if vectors.len() + 1 != d {
        return Err(GeoError::DimensionMismatch { expected: d - 1, found: vectors.len() });
    }
    let sub = SubspaceBasis::new(vectors.clone(), 0.0)?;
    let check = ambient.is_subalgebra(&sub, 0.0)?;
    if !check.closed {
        return Err(GeoError::InvalidParam { name: "span".into(), message: "not a subalgebra".into() });
    }
    let gram: Vec<Vec<Exact>> = vectors.iter().map(|a| vectors.iter().map(|b| ambient.dot(a, b)).collect()).collect();
    if linalg::determinant(&gram).is_exact_zero() {
        return Err(GeoError::DegenerateInducedMetric);
    }
    // Normal direction at the identity: the orthogonal complement of the span.
    let rows: Vec<Vec<Exact>> = vectors
        .iter()
        .map(|v| v.coeffs().iter().enumerate().map(|(i, c)| ambient.eps(i) * c.clone()).collect())
        .collect();
    let normal = linalg::nullspace(&rows, d, 0.0).into_iter().next().ok_or(GeoError::DegenerateInducedMetric)?;
    let mut reference: Vec<f64> = normal.iter().map(Scalar::to_f64).collect();
    let lorentzian = ambient.signature().is_lorentzian();
    if lorentzian {
        reference = vec![0.0; d];
        reference[ambient.signature().timelike_axis().expect("Lorentzian")] = 1.0;
    }
    let f = ambient.to_f64();
    let gens: Vec<Vd> = vectors.iter().map(|v| to_vd(&v.to_f64().into_coeffs())).collect();
    let base = SecondKind::new(&f, gens);
    let n = d - 1;
    let anchor = OrientationAnchor { reference, sign: if lorentzian { -1 } else { 1 } };
    let name = "subgroup_slice";
    let chart = ImmersionChart::build(
        name,
        ambient,
        n,
        vec![-1.0; n],
        vec![1.0; n],
        ChartKind::Graph { base, nu: [0.0; MAX_DIM], height: HeightSpec::FLAT },
        anchor,
        GlobalTraits::default(),
    )?;
    let _ = t;
    // A slice whose induced metric is indefinite is caught at the center.
    chart.normal(&chart.center())?;
    // Declared compact when the ambient Killing form is negative definite on
    // the span (compact semisimple subgroup).
    let kb = ambient.killing_matrix();
    let restricted: Vec<Vec<f64>> = vectors
        .iter()
        .map(|a| vectors.iter().map(|b| -bilinear(&kb, a, b)).collect())
        .collect();
    let compact = nalgebra::DMatrix::from_fn(n, n, |i, j| restricted[i][j]).cholesky().is_some();
    Ok(chart.with_traits(GlobalTraits {
        compact: compact.then_some(true),
        complete: Some(true),
        proper: compact.then_some(true),
        bounded_gauss_map: Some(true),
    }))
}

fn bilinear(m: &[Vec<Exact>], a: &AlgebraVector<Exact>, b: &AlgebraVector<Exact>) -> f64 {
    let mut s = 0.0;
    for (i, x) in a.coeffs().iter().enumerate() {
        for (j, y) in b.coeffs().iter().enumerate() {
            s += m[i][j].to_f64() * x.to_f64() * y.to_f64();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn sphere_frame_is_orthogonal_to_position() {
        let c = sphere(&catalog::euclidean(3), 1.5).unwrap();
        for u in [[0.0, 0.0], [0.3, -0.7], [1.9, 1.2]] {
            let fr = c.frame(&u).unwrap();
            let eta = c.normal(&u).unwrap();
            let v = [u[0] / SPHERE_SCALE, u[1] / SPHERE_SCALE];
            let s = 1.0 + v[0] * v[0] + v[1] * v[1];
            let x = [2.0 * v[0] / s, 2.0 * v[1] / s, (1.0 - v[0] * v[0] - v[1] * v[1]) / s];
            for i in 0..3 {
                assert!((eta[i] - x[i]).abs() < 1e-14, "outward unit normal");
            }
            for k in 0..2 {
                let dot: f64 = (0..3).map(|i| fr.t[k][i] * x[i]).sum();
                assert!(dot.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn second_kind_frames_satisfy_maurer_cartan() {
        let c = subgroup_slice(&catalog::u2(), Some(&[0, 1, 2]), 0.0).unwrap();
        for u in [[0.1, 0.2, -0.3], [0.5, -0.5, 0.7]] {
            assert!(c.maurer_cartan_residual(&u, 1e-3).unwrap() < 1e-6);
        }
        let osc = catalog::oscillator(1, false).unwrap();
        // span{U, X1, Y1} is not closed; span{X1, Y1, V} is not either.
        assert!(subgroup_slice(&osc, Some(&[0, 1, 2]), 0.0).is_err());
    }

    #[test]
    fn lorentzian_normals_are_future_pointing_against_t() {
        let c = hyperbolic_graph(&catalog::minkowski(3), 1.0).unwrap();
        let eta = c.normal(&[0.4, -0.2]).unwrap();
        let t = c.time_reference().unwrap();
        assert!(c.ambient_data().dot(&eta, t) < 0.0);
        assert!((c.ambient_data().dot(&eta, &eta) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_slice_is_rejected() {
        let osc = catalog::oscillator(1, false).unwrap();
        let r = Exact::one() / Exact::sqrt2();
        let p = AlgebraVector::new(vec![r.clone(), Exact::zero(), Exact::zero(), r]);
        let err = subgroup_slice_with_basis(&osc, vec![p, osc.basis_vector(1), osc.basis_vector(2)], 0.0);
        assert_eq!(err.unwrap_err(), GeoError::DegenerateInducedMetric);
    }

    #[test]
    fn ad_exponential_closed_forms() {
        let alg = catalog::su2().to_f64();
        let sk = SecondKind::new(&alg, vec![basis_vd(3, 0)]);
        assert!(matches!(sk.exps[0].kind, ExpKind::Rotation(t) if (t - 1.0).abs() < 1e-14));
        let e = sk.exps[0].exp(0.7, 3);
        let dense = (sk.exps[0].dense.clone() * 0.7).exp();
        for i in 0..3 {
            for j in 0..3 {
                assert!((e[i][j] - dense[(i, j)]).abs() < 1e-13);
            }
        }
    }
}
