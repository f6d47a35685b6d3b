//! Builtin algebras and immersions, addressed by ids of the form
//! `name:key=val,key=val`. The keys `ambient` and `factor` take the rest of
//! the id as their value, so they must come last:
//! `sphere:r=1.5,ambient=euclidean:n=3`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::algebra::{orthonormalize, MetricLieAlgebra, MetricSignature, DEFAULT_TOL};
use crate::chart::{self, GlobalTraits, ImmersionChart};
use crate::error::{GeoError, Result};
use crate::scalar::{Exact, Scalar};

/// Parsed catalog id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogId {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

const NESTED_KEYS: [&str; 2] = ["ambient", "factor"];

impl FromStr for CatalogId {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, mut rest) = match s.split_once(':') {
            Some((n, r)) => (n, r),
            None => (s, ""),
        };
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(GeoError::UnknownCatalog(s.to_string()));
        }
        let mut params = BTreeMap::new();
        while !rest.is_empty() {
            let (key, after) = rest
                .split_once('=')
                .ok_or_else(|| GeoError::Parse(format!("expected key=value in {rest:?}")))?;
            let key = key.trim();
            let (value, next) = if NESTED_KEYS.contains(&key) {
                (after, "")
            } else {
                match after.split_once(',') {
                    Some((v, n)) => (v, n),
                    None => (after, ""),
                }
            };
            if params.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(GeoError::InvalidParam { name: key.to_string(), message: "given twice".into() });
            }
            rest = next;
        }
        Ok(Self { name: name.to_string(), params })
    }
}

impl fmt::Display for CatalogId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        let mut sep = ':';
        let (nested, plain): (Vec<_>, Vec<_>) = self.params.iter().partition(|(k, _)| NESTED_KEYS.contains(&k.as_str()));
        for (k, v) in plain.into_iter().chain(nested) {
            write!(f, "{sep}{k}={v}")?;
            sep = ',';
        }
        Ok(())
    }
}

struct Params<'a> {
    id: &'a CatalogId,
    used: Vec<&'static str>,
}

impl<'a> Params<'a> {
    fn new(id: &'a CatalogId) -> Self {
        Self { id, used: Vec::new() }
    }

    fn raw(&mut self, key: &'static str) -> Option<&'a str> {
        self.used.push(key);
        self.id.params.get(key).map(String::as_str)
    }

    fn parse<T: FromStr>(&mut self, key: &'static str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| GeoError::InvalidParam { name: key.into(), message: format!("cannot parse {v:?}") }),
        }
    }

    fn positive_usize(&mut self, key: &'static str, default: usize) -> Result<usize> {
        let v = self.parse(key, default)?;
        if v == 0 {
            return Err(GeoError::InvalidParam { name: key.into(), message: "must be at least 1".into() });
        }
        Ok(v)
    }

    fn positive_f64(&mut self, key: &'static str, default: f64) -> Result<f64> {
        let v: f64 = self.parse(key, default)?;
        if !(v.is_finite() && v > 0.0) {
            return Err(GeoError::InvalidParam { name: key.into(), message: format!("must be positive, got {v}") });
        }
        Ok(v)
    }

    fn finish(self) -> Result<()> {
        match self.id.params.keys().find(|k| !self.used.contains(&k.as_str())) {
            Some(k) => Err(GeoError::InvalidParam { name: k.clone(), message: format!("not accepted by {}", self.id.name) }),
            None => Ok(()),
        }
    }
}

/// Description of one catalog family for listings.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CatalogEntry {
    pub kind: &'static str,
    pub name: &'static str,
    pub params: &'static str,
    pub example: &'static str,
}

pub fn catalog_entries() -> Vec<CatalogEntry> {
    let a = |name, params, example| CatalogEntry { kind: "algebra", name, params, example };
    let i = |name, params, example| CatalogEntry { kind: "immersion", name, params, example };
    vec![
        a("euclidean", "n (default 3)", "euclidean:n=3"),
        a("minkowski", "n (default 3), last axis timelike", "minkowski:n=3"),
        a("su2", "scale (default 1): metric scale·δ", "su2:scale=2"),
        a("u2", "", "u2"),
        a("sl2r", "", "sl2r"),
        a("oscillator", "m (default 1), literal (default false)", "oscillator:m=2"),
        a("product", "time (default -1), factor (default su2)", "product:time=-1,factor=su2"),
        i("sphere", "r (default 1), ambient (default euclidean:n=3)", "sphere:r=1.5,ambient=euclidean:n=3"),
        i("graph", "amp, width, aspect, hyperboloid, ambient (default product:time=-1,factor=su2)", "graph:amp=0.1,ambient=u2"),
        i("hyperbolic_graph", "r (default 1), ambient (default minkowski:n=3)", "hyperbolic_graph:r=2"),
        i("subgroup_slice", "t (default 0), span (codim1 if omitted), ambient (default product:time=-1,factor=su2)", "subgroup_slice:t=0"),
        i("su2_in_u2", "", "su2_in_u2"),
        i("affine_subspace", "normal (default last axis), ambient (default euclidean:n=3)", "affine_subspace:normal=3,ambient=minkowski:n=3"),
    ]
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn euclidean(n: usize) -> MetricLieAlgebra<Exact> {
    MetricLieAlgebra::abelian(&format!("euclidean:n={n}"), MetricSignature::riemannian(n)).with_labels(labels("e", n))
}

/// `R^n` with the last axis timelike.
pub fn minkowski(n: usize) -> MetricLieAlgebra<Exact> {
    let mut l = labels("e", n - 1);
    l.push("t".into());
    MetricLieAlgebra::abelian(&format!("minkowski:n={n}"), MetricSignature::lorentzian(n)).with_labels(l)
}

/// `[e1,e2] = e3` cyclically, metric `scale·δ`, in the orthonormal basis `e_i/√scale`.
pub fn su2_scaled(scale: &Exact) -> Result<MetricLieAlgebra<Exact>> {
    if scale.signum() <= 0 {
        return Err(GeoError::InvalidParam { name: "scale".into(), message: "must be positive".into() });
    }
    let root = scale
        .try_sqrt()
        .ok_or_else(|| GeoError::InvalidParam { name: "scale".into(), message: format!("sqrt({scale}) leaves Q(sqrt2)") })?;
    let c = Exact::one() / root;
    let name = if *scale == Exact::one() { "su2".to_string() } else { format!("su2:scale={scale}") };
    let entries = [(0, 1, 2), (1, 2, 0), (2, 0, 1)].map(|(i, j, k)| (i, j, k, c.clone()));
    Ok(MetricLieAlgebra::from_brackets(&name, MetricSignature::riemannian(3), entries)?.with_labels(labels("e", 3)))
}

pub fn su2() -> MetricLieAlgebra<Exact> {
    su2_scaled(&Exact::one()).expect("unit scale")
}

/// `su(2) ⊕ R` with the center spanned by the last basis vector `z`.
pub fn u2() -> MetricLieAlgebra<Exact> {
    let one = Exact::one();
    let entries = [(0, 1, 2), (1, 2, 0), (2, 0, 1)].map(|(i, j, k)| (i, j, k, one.clone()));
    MetricLieAlgebra::from_brackets("u2", MetricSignature::riemannian(4), entries)
        .expect("valid")
        .with_labels(vec!["e1".into(), "e2".into(), "e3".into(), "z".into()])
}

/// `sl(2,R)` with its Killing form as metric, orthonormalized from `(h, e, f)`:
/// `A = h/(2√2)`, `B = (e+f)/(2√2)`, `C = (e−f)/(2√2)` with `C` timelike.
pub fn sl2r() -> MetricLieAlgebra<Exact> {
    let ex = Exact::from_i64;
    let (d, mut raw) = (3, vec![Exact::zero(); 27]);
    let mut set = |i: usize, j: usize, k: usize, v: i64| {
        raw[(i * d + j) * d + k] = ex(v);
        raw[(j * d + i) * d + k] = ex(-v);
    };
    set(0, 1, 1, 2); // [h,e] = 2e
    set(0, 2, 2, -2); // [h,f] = -2f
    set(1, 2, 0, 1); // [e,f] = h
    let gram = vec![vec![ex(8), ex(0), ex(0)], vec![ex(0), ex(0), ex(4)], vec![ex(0), ex(4), ex(0)]];
    orthonormalize("sl2r", &gram, &raw, DEFAULT_TOL)
        .expect("Killing form of sl(2,R) is nondegenerate")
        .algebra
        .with_labels(vec!["A".into(), "B".into(), "C".into()])
}

/// Oscillator raw data in the basis `(P, X_1..X_m, Y_1..Y_m, Q)`.
/// `literal` replaces `[X_i, Y_i] = P` by `[X_i, Y_j] = P` for all `i, j`.
pub fn oscillator_raw(m: usize, literal: bool) -> (Vec<Vec<Exact>>, Vec<Exact>) {
    let d = 2 * m + 2;
    let (p, q) = (0, d - 1);
    let x = |i: usize| 1 + i;
    let y = |i: usize| 1 + m + i;
    let mut raw = vec![Exact::zero(); d * d * d];
    let mut set = |i: usize, j: usize, k: usize, v: i64| {
        raw[(i * d + j) * d + k] = Exact::from_i64(v);
        raw[(j * d + i) * d + k] = Exact::from_i64(-v);
    };
    for i in 0..m {
        if literal {
            for j in 0..m {
                set(x(i), y(j), p, 1);
            }
        } else {
            set(x(i), y(i), p, 1);
        }
        set(q, x(i), y(i), 1);
        set(q, y(i), x(i), -1);
    }
    let mut gram = vec![vec![Exact::zero(); d]; d];
    for (i, row) in gram.iter_mut().enumerate().take(d - 1).skip(1) {
        row[i] = Exact::one();
    }
    gram[p][q] = Exact::one();
    gram[q][p] = Exact::one();
    (gram, raw)
}

/// Oscillator algebra in the orthonormal basis `(U, X_1..X_m, Y_1..Y_m, V)`,
/// `U = (P+Q)/√2`, `V = (P−Q)/√2`.
pub fn oscillator(m: usize, literal: bool) -> Result<MetricLieAlgebra<Exact>> {
    if m == 0 {
        return Err(GeoError::InvalidParam { name: "m".into(), message: "must be at least 1".into() });
    }
    let (gram, raw) = oscillator_raw(m, literal);
    let name = if literal { format!("oscillator:literal=true,m={m}") } else { format!("oscillator:m={m}") };
    let mut l = vec!["U".to_string()];
    l.extend(labels("X", m));
    l.extend(labels("Y", m));
    l.push("V".into());
    Ok(orthonormalize(&name, &gram, &raw, DEFAULT_TOL)?.algebra.with_labels(l))
}

/// `R × H` with the `R` factor of sign `time` appended as the last basis vector `t`.
pub fn product(time: i8, factor: &MetricLieAlgebra<Exact>) -> Result<MetricLieAlgebra<Exact>> {
    if factor.signature().index() != 0 {
        return Err(GeoError::InvalidParam { name: "factor".into(), message: "must be Riemannian".into() });
    }
    if time != 1 && time != -1 {
        return Err(GeoError::InvalidParam { name: "time".into(), message: "must be 1 or -1".into() });
    }
    let d = factor.dim() + 1;
    let mut signs = factor.signature().signs().to_vec();
    signs.push(time);
    let entries: Vec<_> = factor.nonzero_constants().iter().filter(|(i, j, _, _)| i < j).cloned().collect();
    let name = format!("product:time={time},factor={}", factor.name());
    let mut l = factor.labels().to_vec();
    l.push("t".into());
    debug_assert_eq!(l.len(), d);
    Ok(MetricLieAlgebra::from_brackets(&name, MetricSignature::new(signs)?, entries)?.with_labels(l))
}

pub fn catalog_algebra(id: &CatalogId) -> Result<MetricLieAlgebra<Exact>> {
    let mut p = Params::new(id);
    let alg = match id.name.as_str() {
        "euclidean" => euclidean(p.positive_usize("n", 3)?),
        "minkowski" => {
            let n = p.positive_usize("n", 3)?;
            if n < 2 {
                return Err(GeoError::InvalidParam { name: "n".into(), message: "Lorentzian needs n >= 2".into() });
            }
            minkowski(n)
        }
        "su2" => su2_scaled(&p.parse("scale", Exact::one())?)?,
        "u2" => u2(),
        "sl2r" => sl2r(),
        "oscillator" => oscillator(p.positive_usize("m", 1)?, p.parse("literal", false)?)?,
        "product" => {
            let time: i8 = p.parse("time", -1)?;
            let factor: CatalogId = p.raw("factor").unwrap_or("su2").parse()?;
            product(time, &catalog_algebra(&factor)?)?
        }
        _ => return Err(GeoError::UnknownCatalog(id.to_string())),
    };
    p.finish()?;
    Ok(alg)
}

pub fn algebra_by_id(s: &str) -> Result<MetricLieAlgebra<Exact>> {
    catalog_algebra(&s.parse()?)
}

pub fn is_immersion_name(name: &str) -> bool {
    catalog_entries().iter().any(|e| e.kind == "immersion" && e.name == name)
}

fn ambient(p: &mut Params, default: &str) -> Result<MetricLieAlgebra<Exact>> {
    let id: CatalogId = p.raw("ambient").unwrap_or(default).parse()?;
    catalog_algebra(&id)
}

/// Parses a 1-based index list such as `1+2+4`.
fn index_list(p: &mut Params, key: &'static str, dim: usize) -> Result<Option<Vec<usize>>> {
    let Some(raw) = p.raw(key) else { return Ok(None) };
    raw.split('+')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(i) if (1..=dim).contains(&i) => Ok(i - 1),
            _ => Err(GeoError::InvalidParam { name: key.into(), message: format!("bad index {t:?}") }),
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

pub fn catalog_immersion(id: &CatalogId) -> Result<ImmersionChart> {
    let mut p = Params::new(id);
    let chart = match id.name.as_str() {
        "sphere" => {
            let r = p.positive_f64("r", 1.0)?;
            let amb = ambient(&mut p, "euclidean:n=3")?;
            chart::sphere(&amb, r)?
        }
        "hyperbolic_graph" => {
            let r = p.positive_f64("r", 1.0)?;
            let amb = ambient(&mut p, "minkowski:n=3")?;
            chart::hyperbolic_graph(&amb, r)?
        }
        "graph" => {
            let spec = chart::HeightSpec {
                amp: p.parse("amp", 0.1)?,
                width: p.positive_f64("width", 0.5)?,
                aspect: p.positive_f64("aspect", 1.0)?,
                hyperboloid: match p.raw("hyperboloid") {
                    None => None,
                    Some(v) => Some(v.parse::<f64>().ok().filter(|r| *r > 0.0).ok_or_else(|| {
                        GeoError::InvalidParam { name: "hyperboloid".into(), message: format!("bad radius {v:?}") }
                    })?),
                },
            };
            let amb = ambient(&mut p, "product:time=-1,factor=su2")?;
            chart::graph(&amb, spec)?
        }
        "subgroup_slice" => {
            let t: f64 = p.parse("t", 0.0)?;
            let amb = ambient(&mut p, "product:time=-1,factor=su2")?;
            let span = index_list(&mut p, "span", amb.dim())?;
            chart::subgroup_slice(&amb, span.as_deref(), t)?
        }
        "su2_in_u2" => chart::subgroup_slice(&u2(), Some(&[0, 1, 2]), 0.0)?.renamed("su2_in_u2"),
        "affine_subspace" => {
            let amb = ambient(&mut p, "euclidean:n=3")?;
            let normal = index_list(&mut p, "normal", amb.dim())?;
            let axis = match normal.as_deref() {
                None => amb.dim() - 1,
                Some([i]) => *i,
                Some(_) => return Err(GeoError::InvalidParam { name: "normal".into(), message: "one axis expected".into() }),
            };
            if !amb.is_abelian() {
                return Err(GeoError::InvalidParam { name: "ambient".into(), message: "must be abelian".into() });
            }
            let span: Vec<usize> = (0..amb.dim()).filter(|i| *i != axis).collect();
            chart::subgroup_slice(&amb, Some(&span), 0.0)?
                .renamed("affine_subspace")
                .with_traits(chart::default_traits("affine_subspace"))
        }
        _ => return Err(GeoError::UnknownCatalog(id.to_string())),
    };
    p.finish()?;
    Ok(chart.with_id(&id.to_string()))
}

pub fn immersion_by_id(s: &str) -> Result<ImmersionChart> {
    catalog_immersion(&s.parse()?)
}

/// Declared global properties used only for hypothesis bookkeeping.
pub fn traits_of(name: &str) -> GlobalTraits {
    chart::default_traits(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraVector;

    fn ex(s: &str) -> Exact {
        s.parse().unwrap()
    }

    #[test]
    fn id_grammar() {
        let id: CatalogId = "sphere:r=1.5,ambient=euclidean:n=3".parse().unwrap();
        assert_eq!(id.name, "sphere");
        assert_eq!(id.params["r"], "1.5");
        assert_eq!(id.params["ambient"], "euclidean:n=3");
        assert_eq!(id.to_string(), "sphere:r=1.5,ambient=euclidean:n=3");
        let id: CatalogId = "product:factor=su2:scale=2".parse().unwrap();
        assert_eq!(id.params["factor"], "su2:scale=2");
        assert!("u2".parse::<CatalogId>().unwrap().params.is_empty());
        assert!("x:y".parse::<CatalogId>().is_err());
    }

    #[test]
    fn unknown_and_invalid() {
        assert!(matches!(algebra_by_id("so5"), Err(GeoError::UnknownCatalog(_))));
        assert!(matches!(algebra_by_id("oscillator:m=0"), Err(GeoError::InvalidParam { .. })));
        assert!(matches!(algebra_by_id("euclidean:n=3,m=2"), Err(GeoError::InvalidParam { .. })));
        assert!(matches!(algebra_by_id("su2:scale=3"), Err(GeoError::InvalidParam { .. })));
    }

    #[test]
    fn every_algebra_validates_exactly() {
        for id in [
            "euclidean:n=1",
            "euclidean:n=4",
            "minkowski:n=3",
            "su2",
            "su2:scale=2",
            "su2:scale=1/4",
            "u2",
            "sl2r",
            "oscillator:m=1",
            "oscillator:m=3",
            "product",
            "product:time=1,factor=su2",
            "product:factor=euclidean:n=2",
        ] {
            let alg = algebra_by_id(id).unwrap();
            let rep = alg.validate(0.0);
            assert!(rep.passed, "{id}: {rep:?}");
            assert!(rep.checks.iter().all(|c| c.max_residual == 0.0), "{id}");
        }
    }

    #[test]
    fn oscillator_brackets_in_raw_basis() {
        let alg = oscillator(1, false).unwrap();
        let r2 = Exact::sqrt2();
        let inv = Exact::one() / r2.clone();
        let u = AlgebraVector::from_ints(&[1, 0, 0, 0]);
        let v = AlgebraVector::from_ints(&[0, 0, 0, 1]);
        // P = (U+V)/√2, Q = (U−V)/√2
        let p = u.plus(&v).scale(&inv);
        let q = u.minus(&v).scale(&inv);
        let x = AlgebraVector::from_ints(&[0, 1, 0, 0]);
        let y = AlgebraVector::from_ints(&[0, 0, 1, 0]);
        assert_eq!(alg.bracket(&x, &y).unwrap(), p);
        assert_eq!(alg.bracket(&q, &x).unwrap(), y);
        assert_eq!(alg.bracket(&q, &y).unwrap(), x.scale(&ex("-1")));
        assert_eq!(alg.dot(&p, &q), Exact::one());
        assert_eq!(alg.dot(&p, &p), Exact::zero());
        assert_eq!(alg.signature().signs(), &[1, 1, 1, -1]);
    }

    #[test]
    fn sl2r_brackets() {
        let alg = sl2r();
        assert_eq!(alg.signature().signs(), &[1, 1, -1]);
        let inv = Exact::one() / Exact::sqrt2();
        let e = |i| alg.basis_vector(i);
        assert_eq!(alg.bracket(&e(0), &e(1)).unwrap(), e(2).scale(&inv));
        assert_eq!(alg.bracket(&e(0), &e(2)).unwrap(), e(1).scale(&inv));
        assert_eq!(alg.bracket(&e(1), &e(2)).unwrap(), e(0).scale(&-inv));
    }

    #[test]
    fn product_has_central_time() {
        let alg = algebra_by_id("product").unwrap();
        assert_eq!(alg.dim(), 4);
        assert_eq!(alg.signature().signs(), &[1, 1, 1, -1]);
        let c = alg.center(0.0);
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&alg.basis_vector(3), 0.0));
    }
}
