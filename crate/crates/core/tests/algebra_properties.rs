//! Exact identities of bi-invariant metric Lie algebras over random inputs.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use liegeo_core::algebra::{orthonormalize, Sectional};
use liegeo_core::catalog;
use liegeo_core::{AlgebraVector, Exact, MetricLieAlgebra, Scalar};

const ALGEBRAS: &[&str] = &[
    "euclidean:n=3",
    "minkowski:n=4",
    "su2",
    "su2:scale=2",
    "u2",
    "sl2r",
    "oscillator:m=1",
    "oscillator:m=2",
    "oscillator:m=3",
    "product:time=-1,factor=su2",
    "product:time=1,factor=u2",
];

fn algebra(i: usize) -> MetricLieAlgebra<Exact> {
    catalog::algebra_by_id(ALGEBRAS[i]).unwrap()
}

fn exact_vector(coeffs: &[i64]) -> AlgebraVector<Exact> {
    AlgebraVector::new(coeffs.iter().map(|&c| Exact::from_i64(c)).collect())
}

fn random_vector(rng: &mut ChaCha8Rng, d: usize) -> AlgebraVector<Exact> {
    let c: Vec<i64> = (0..d).map(|_| rng.gen_range(-4..=4)).collect();
    exact_vector(&c)
}

/// Algebra index plus three integer vectors sized to it.
fn algebra_and_vectors() -> impl Strategy<Value = (usize, Vec<i64>, Vec<i64>, Vec<i64>)> {
    (0..ALGEBRAS.len()).prop_flat_map(|i| {
        let d = algebra(i).dim();
        let v = || proptest::collection::vec(-3i64..=3, d);
        (Just(i), v(), v(), v())
    })
}

#[test]
fn ricci_routes_agree_on_200_seeded_pairs() {
    for (a, id) in ALGEBRAS.iter().enumerate() {
        let alg = algebra(a);
        let fl = alg.to_f64();
        let mut rng = ChaCha8Rng::seed_from_u64(a as u64);
        for _ in 0..200 {
            let (v, w) = (random_vector(&mut rng, alg.dim()), random_vector(&mut rng, alg.dim()));
            let killing = alg.ricci(&v, &w).unwrap();
            let contraction = alg.ricci_by_contraction(&v, &w).unwrap();
            assert_eq!(killing, contraction, "{id}");
            let (vf, wf) = (v.to_f64(), w.to_f64());
            let kf = fl.ricci(&vf, &wf).unwrap();
            let cf = fl.ricci_by_contraction(&vf, &wf).unwrap();
            assert!((kf - cf).abs() <= 1e-12, "{id}: {kf} vs {cf}");
            assert!((kf - killing.to_f64()).abs() <= 1e-12, "{id}");
        }
    }
}

#[test]
fn oscillator_ricci_along_v() {
    for m in 1..=3 {
        let alg = catalog::oscillator(m, false).unwrap();
        let v = alg.basis_vector(2 * m + 1);
        let quarter_m = Exact::ratio(m as i64, 4);
        assert_eq!(alg.ricci(&v, &v).unwrap(), quarter_m);
        assert_eq!(alg.ricci_directional(&v, 0.0).unwrap(), -quarter_m);
    }
}

#[test]
fn su2_planes_have_curvature_one_quarter() {
    let alg = catalog::su2().to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 100 {
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let nx = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let x: Vec<f64> = x.iter().map(|c| c / nx).collect();
        let p: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let y: Vec<f64> = y.iter().zip(&x).map(|(b, a)| b - p * a).collect();
        let ny = y.iter().map(|c| c * c).sum::<f64>().sqrt();
        if ny < 1e-3 {
            continue;
        }
        let y: Vec<f64> = y.iter().map(|c| c / ny).collect();
        let k = alg.sectional_curvature(&AlgebraVector::new(x), &AlgebraVector::new(y), 1e-12).unwrap();
        assert!((k.value().unwrap() - 0.25).abs() <= 1e-12);
        checked += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn weyl_relation((a, x, y, z) in algebra_and_vectors()) {
        let alg = algebra(a);
        let (x, y, z) = (exact_vector(&x), exact_vector(&y), exact_vector(&z));
        let lhs = alg.dot(&alg.bracket(&x, &y).unwrap(), &z);
        let rhs = alg.dot(&x, &alg.bracket(&y, &z).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn first_bianchi_identity((a, x, y, z) in algebra_and_vectors()) {
        let alg = algebra(a);
        let (x, y, z) = (exact_vector(&x), exact_vector(&y), exact_vector(&z));
        let s = alg
            .curvature_tensor(&x, &y, &z)
            .unwrap()
            .plus(&alg.curvature_tensor(&y, &z, &x).unwrap())
            .plus(&alg.curvature_tensor(&z, &x, &y).unwrap());
        prop_assert!(s.is_zero_within(0.0));
    }

    #[test]
    fn curvature_tensor_symmetries((a, x, y, z) in algebra_and_vectors()) {
        let alg = algebra(a);
        let (x, y, z) = (exact_vector(&x), exact_vector(&y), exact_vector(&z));
        let rxy = alg.curvature_tensor(&x, &y, &z).unwrap();
        let ryx = alg.curvature_tensor(&y, &x, &z).unwrap();
        prop_assert!(rxy.plus(&ryx).is_zero_within(0.0));
        // ⟨R(x,y)z, z⟩ = 0
        prop_assert!(alg.dot(&rxy, &z).is_exact_zero());
    }

    #[test]
    fn sectional_routes_agree((a, x, y, _z) in algebra_and_vectors()) {
        let alg = algebra(a);
        let (x, y) = (exact_vector(&x), exact_vector(&y));
        match alg.plane_curvature(&x, &y, 0.0) {
            Ok(Sectional::Value(k)) => {
                prop_assert_eq!(alg.curvature_route_sectional(&x, &y, 0.0).unwrap(), k);
            }
            Ok(Sectional::UndefinedNullBracket) => {
                prop_assert!(alg.dot(&alg.bracket(&x, &y).unwrap(), &alg.bracket(&x, &y).unwrap()).is_exact_zero());
            }
            Err(_) => {
                let q = alg.dot(&x, &x) * alg.dot(&y, &y) - alg.dot(&x, &y) * alg.dot(&x, &y);
                prop_assert!(q.is_exact_zero());
            }
        }
    }

    #[test]
    fn basis_planes_match_general_formula(a in 0..ALGEBRAS.len(), i in 0usize..8, j in 0usize..8) {
        let alg = algebra(a);
        let d = alg.dim();
        let (i, j) = (i % d, j % d);
        prop_assume!(i != j);
        let (x, y) = (alg.basis_vector(i), alg.basis_vector(j));
        let orth = alg.sectional_curvature(&x, &y, 0.0).unwrap();
        let general = alg.plane_curvature(&x, &y, 0.0).unwrap();
        match (orth, general) {
            (Sectional::Value(k1), Sectional::Value(k2)) => prop_assert_eq!(k1, k2),
            (Sectional::UndefinedNullBracket, Sectional::UndefinedNullBracket) => {}
            (o, g) => prop_assert!(false, "{:?} vs {:?}", o, g),
        }
    }

    #[test]
    fn orthonormalize_then_validate(a in 0..ALGEBRAS.len(), seed in any::<u64>()) {
        let alg = algebra(a).to_f64();
        let d = alg.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Unit lower-triangular change of basis: invertible by construction.
        let mut p = vec![vec![0.0; d]; d];
        for (i, row) in p.iter_mut().enumerate() {
            row[i] = 1.0;
            for c in row.iter_mut().take(i) {
                *c = rng.gen_range(-1.0..=1.0);
            }
        }
        let rows: Vec<AlgebraVector<f64>> = p.iter().map(|r| AlgebraVector::new(r.clone())).collect();
        let gram: Vec<Vec<f64>> = rows.iter().map(|r| rows.iter().map(|s| alg.dot(r, s)).collect()).collect();
        let mut raw = vec![0.0; d * d * d];
        for i in 0..d {
            for j in 0..d {
                // [b_i, b_j] in the new basis: solve P^T c = [b_i, b_j] by forward substitution on rows.
                let b = alg.bracket(&rows[i], &rows[j]).unwrap();
                let mut c = b.coeffs().to_vec();
                let mut coords = vec![0.0; d];
                for k in (0..d).rev() {
                    coords[k] = c[k];
                    for (l, cl) in c.iter_mut().enumerate() {
                        *cl -= coords[k] * p[k][l];
                    }
                }
                for k in 0..d {
                    raw[(i * d + j) * d + k] = coords[k];
                }
            }
        }
        let on = orthonormalize("rebased", &gram, &raw, 1e-9).unwrap().algebra;
        prop_assert!(on.validate(1e-9).passed);
        prop_assert_eq!(on.signature().index(), alg.signature().index());
        let scalar = |g: &MetricLieAlgebra<f64>| -> f64 {
            (0..g.dim()).map(|i| g.eps(i) * g.ricci(&g.basis_vector(i), &g.basis_vector(i)).unwrap()).sum()
        };
        prop_assert!((scalar(&on) - scalar(&alg)).abs() <= 1e-9);
    }
}
