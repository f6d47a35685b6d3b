//! Hypersurface fixtures: closed forms, theorem shadows and one counterexample.

use std::sync::Arc;

use liegeo_core::algebra::{Codim1Construction, SubspaceBasis};
use liegeo_core::catalog;
use liegeo_core::chart::{self, Frame, GlobalTraits, ImmersionChart, OrientationAnchor};
use liegeo_core::surface::{self, Grid, LemmaSet, StencilKind, VerifyOptions, DEFAULT_H};
use liegeo_core::theorem::{self, limits, ReportOptions, Status, TheoremId, Verdict};
use liegeo_core::{AlgebraVector, Exact, Scalar};

fn margin(h: f64) -> f64 {
    2.0 * h * (1.0 + 1e-9)
}

/// Geodesic sphere of radius `rho` about the identity of SU(2), through
/// `exp(rho·X(θ, φ))` with `X` the unit vector of spherical angles. For unit
/// `X` and `ad_X` acting as a rotation on `X^⊥`, the left-trivialized
/// derivative is `sin(rho) ∂X − (1 − cos(rho)) [X, ∂X]`.
fn geodesic_sphere(rho: f64) -> ImmersionChart {
    let su2 = catalog::su2();
    let bracket = |a: &[f64; 3], b: &[f64; 3]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let frames = Arc::new(move |u: &[f64], out: &mut Frame| {
        let (th, ph) = (u[0], u[1]);
        let x = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
        let dx = [[th.cos() * ph.cos(), th.cos() * ph.sin(), -th.sin()], [-th.sin() * ph.sin(), th.sin() * ph.cos(), 0.0]];
        for (row, d) in out.t.iter_mut().zip(&dx) {
            let b = bracket(&x, d);
            for a in 0..3 {
                row[a] = rho.sin() * d[a] - (1.0 - rho.cos()) * b[a];
            }
        }
    });
    let center = [1.55f64, 0.0];
    let reference = vec![center[0].sin() * center[1].cos(), center[0].sin() * center[1].sin(), center[0].cos()];
    let traits = GlobalTraits { compact: Some(true), complete: Some(true), proper: Some(true), bounded_gauss_map: None };
    ImmersionChart::custom(
        "geodesic_sphere",
        &su2,
        vec![0.8, -0.75],
        vec![2.3, 0.75],
        OrientationAnchor { reference, sign: 1 },
        traits,
        frames,
    )
    .unwrap()
}

#[test]
fn su2_bracket_is_the_cross_product() {
    let su2 = catalog::su2();
    let e = |i| su2.basis_vector(i);
    assert_eq!(su2.bracket(&e(0), &e(1)).unwrap(), e(2));
    assert_eq!(su2.bracket(&e(1), &e(2)).unwrap(), e(0));
    assert_eq!(su2.bracket(&e(2), &e(0)).unwrap(), e(1));
}

#[test]
fn geodesic_sphere_frames_are_compatible() {
    let c = geodesic_sphere(1.0);
    for u in [[1.0, 0.0], [1.55, 0.3], [2.0, -0.5]] {
        assert!(c.maurer_cartan_residual(&u, 1e-4).unwrap() < 1e-6, "{u:?}");
    }
}

#[test]
fn geodesic_sphere_is_umbilical_with_cot_curvature() {
    // Principal curvatures of a geodesic sphere of radius rho in S³(2) are ½cot(rho/2).
    let rho = 1.0;
    let c = geodesic_sphere(rho);
    let k = 0.5 / (rho / 2.0f64).tan();
    let pd = surface::point_data(&c, &[1.3, 0.2], 1e-4).unwrap();
    assert!((pd.mean_curvature.abs() - 2.0 * k).abs() < 1e-6, "{}", pd.mean_curvature);
    assert!((pd.a_norm_sq - 2.0 * k * k).abs() < 1e-6);
}

/// A compact cmc hypersurface of a semisimple group whose shape operator is
/// everywhere invertible: the Gauss-map nullity conclusion fails pointwise.
#[test]
fn geodesic_sphere_violates_gauss_nullity() {
    let c = geodesic_sphere(1.0);
    let r = theorem::hypersurface_report(&c, &ReportOptions { grid: 8, ..Default::default() }).unwrap();
    let t42 = r.get(TheoremId::T42);
    assert!(t42.hypotheses_checked.iter().all(|h| h.status == Status::Holds), "{t42:?}");
    assert_eq!(t42.verdict, Verdict::Violated);
    let w = t42.witness.as_ref().expect("violated verdicts carry a witness");
    assert_eq!(w.check, "gauss_nullity_at_least_one");
    assert_eq!(w.point.len(), 2);
    assert_eq!(t42.conclusion("gauss_nullity_at_least_one").unwrap().stat.as_ref().unwrap().max, 0.0);
}

#[test]
fn great_sphere_has_full_nullity() {
    // rho = π is the totally geodesic equator of S³(2).
    let c = geodesic_sphere(std::f64::consts::PI);
    let r = theorem::hypersurface_report(&c, &ReportOptions { grid: 6, ..Default::default() }).unwrap();
    let t42 = r.get(TheoremId::T42);
    assert_eq!(t42.verdict, Verdict::Consistent);
    assert_eq!(t42.conclusion("gauss_nullity_at_least_one").unwrap().stat.as_ref().unwrap().min, 2.0);
}

#[test]
fn bump_graph_needs_the_bracket_term_in_gauss_duality() {
    let c = catalog::immersion_by_id("graph:amp=0.3,width=0.4,ambient=u2").unwrap();
    let g = Grid::new(&c, 6, margin(DEFAULT_H)).unwrap();
    let (mut literal, mut corrected) = (0.0f64, 0.0f64);
    for i in 0..g.len() {
        let lg = surface::local_geometry(&c, &g.point(i), DEFAULT_H, StencilKind::Small).unwrap();
        let (l, k) = surface::gauss_duality_residuals(&c, &lg);
        literal = literal.max(l);
        corrected = corrected.max(k);
    }
    assert!(corrected < 1e-5, "{corrected}");
    assert!(literal > 1e-2, "{literal}");
}

#[test]
fn gradient_bound_holds_on_a_riemannian_bump() {
    let c = catalog::immersion_by_id("graph:amp=0.3,width=0.4,ambient=u2").unwrap();
    let x = surface::default_reference(&c);
    let g = Grid::new(&c, 6, margin(4.0 * DEFAULT_H)).unwrap();
    for i in 0..g.len() {
        let b = surface::gradient_bound_check(&c, &g.point(i), &x, DEFAULT_H).unwrap();
        assert!(b.chain_slack >= limits::GRADIENT_SLACK, "{b:?}");
        assert!(b.slack >= limits::GRADIENT_SLACK, "{b:?}");
    }
    let r = theorem::hypersurface_report(&c, &ReportOptions { grid: 8, ..Default::default() }).unwrap();
    let t44 = r.get(TheoremId::T44);
    assert!(t44.conclusion("gradient_bound_slack").unwrap().passed);
    assert!(t44.conclusion("gradient_chain_slack").unwrap().passed);
}

#[test]
fn hyperbolic_graph_homothety() {
    for r in [1.0, 2.0] {
        let c = catalog::immersion_by_id(&format!("hyperbolic_graph:r={r}")).unwrap();
        let g = Grid::new(&c, 16, margin(DEFAULT_H)).unwrap();
        let hr = surface::homothety_check(&c, &g, DEFAULT_H, 1e-6).unwrap();
        assert!(hr.max_umbilicity_defect < 1e-8, "{hr:?}");
        assert!((hr.factor - 1.0 / (r * r)).abs() < 1e-6, "{hr:?}");
        assert!(hr.max_relative_deviation < 1e-6, "{hr:?}");
    }
}

#[test]
fn homothety_rejects_riemannian_and_minimal() {
    let sphere = catalog::immersion_by_id("sphere").unwrap();
    let g = Grid::new(&sphere, 4, margin(DEFAULT_H)).unwrap();
    assert!(surface::homothety_check(&sphere, &g, DEFAULT_H, 1e-6).is_err());
    let slice = catalog::immersion_by_id("subgroup_slice").unwrap();
    let g = Grid::new(&slice, 4, margin(DEFAULT_H)).unwrap();
    assert!(surface::homothety_check(&slice, &g, DEFAULT_H, 1e-6).is_err());
}

#[test]
fn su2_in_u2_totally_geodesic_shadow_on_32_cubed() {
    let c = catalog::immersion_by_id("su2_in_u2").unwrap();
    let r = theorem::hypersurface_report(&c, &ReportOptions { grid: 32, ..Default::default() }).unwrap();
    let t41 = r.get(TheoremId::T41);
    assert_eq!(t41.verdict, Verdict::Consistent, "{t41:?}");
    let stat = |name: &str| t41.conclusion(name).unwrap().stat.clone().unwrap();
    assert!(stat("shape_operator_zero").max < 1e-8);
    assert!(stat("ricci_normal_zero").max < 1e-12);
    assert!(stat("support_function_constant").max < 1e-8);
    let tr = t41.hypothesis("transversal_to_x").unwrap();
    assert_eq!(tr.status, Status::Holds);
    assert!((tr.value.unwrap() - 1.0).abs() <= 1e-10);
    assert_eq!(r.get(TheoremId::T43).verdict, Verdict::Consistent);
}

#[test]
fn lorentzian_slice_reports() {
    let c = catalog::immersion_by_id("subgroup_slice").unwrap();
    let r = theorem::hypersurface_report(&c, &ReportOptions { grid: 8, ..Default::default() }).unwrap();
    for id in [TheoremId::T51, TheoremId::T54, TheoremId::L53] {
        assert_eq!(r.get(id).verdict, Verdict::Consistent, "{id:?}");
    }
    let t51 = r.get(TheoremId::T51);
    assert_eq!(t51.fact("ric_normal_max"), Some("0e0"));
}

#[test]
fn hyperbolic_graph_umbilical_suite() {
    let c = catalog::immersion_by_id("hyperbolic_graph").unwrap();
    let r = theorem::hypersurface_report(&c, &ReportOptions { grid: 12, ..Default::default() }).unwrap();
    let t54 = r.get(TheoremId::T54);
    // Unbounded hyperbolic image: inapplicable, yet the pointwise suite holds.
    assert_eq!(t54.verdict, Verdict::Inapplicable);
    assert_eq!(t54.hypothesis("bounded_gauss_image").unwrap().status, Status::Fails);
    for name in ["totally_umbilical", "gauss_map_homothety"] {
        assert!(t54.conclusion(name).unwrap().passed, "{name}");
    }
    // H² = 4 stays strictly above -n inf Ric = 0: the equality needs the global hypothesis.
    let eq = t54.conclusion("threshold_equality").unwrap();
    assert!(!eq.passed);
    assert!((eq.stat.as_ref().unwrap().min - 4.0).abs() < 1e-6);
    let factor: f64 = t54.fact("homothety_factor").unwrap().parse().unwrap();
    assert!((factor - 1.0).abs() < 1e-6);
    let c: Vec<f64> =
        ["0.25", "0.5", "1"].iter().map(|f| t54.fact(&format!("c_sampled_box_{f}")).unwrap().parse().unwrap()).collect();
    assert!(c[0] < c[1] && c[1] < c[2], "{c:?}");
}

#[test]
fn laplacian_check_on_sphere_passes_at_grid_16() {
    let c = catalog::immersion_by_id("sphere:r=1,ambient=euclidean:n=3").unwrap();
    let opts = VerifyOptions { grid: 16, h: DEFAULT_H, tol: 1e-6, x: None, lemmas: LemmaSet::L35, convergence: true };
    let run = surface::verify(&c, &opts).unwrap();
    assert!(run.report.passed(), "{:?}", run.report.verdicts);
    let v = &run.report.verdicts["lemma35"];
    assert!(v.max < 1e-5);
}

#[test]
fn ricci_in_normal_direction_examples() {
    let slice = catalog::immersion_by_id("subgroup_slice").unwrap();
    let pd = surface::point_data(&slice, &[0.1, 0.2, -0.1], DEFAULT_H).unwrap();
    assert_eq!(surface::ricci_in_normal_direction(&pd), 0.0);
    let hyp = catalog::immersion_by_id("hyperbolic_graph").unwrap();
    let pd = surface::point_data(&hyp, &[0.3, -0.4], DEFAULT_H).unwrap();
    assert_eq!(surface::ricci_in_normal_direction(&pd), 0.0);
}

#[test]
fn codim1_subalgebras_of_riemannian_catalog() {
    for id in ["euclidean:n=3", "su2", "su2:scale=2", "u2", "product:time=1,factor=su2"] {
        let alg = catalog::algebra_by_id(id).unwrap();
        let r = theorem::algebra_report(&alg).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent, "{id}: {r:?}");
        let center = r.fact("center_dim").unwrap() != "0";
        assert_eq!(r.fact("codim1_found"), Some(if center { "true" } else { "false" }), "{id}");
    }
    let u2 = catalog::u2();
    let sub = u2.codim1_subalgebra(0.0).unwrap();
    assert!(matches!(sub.construction, Codim1Construction::CenterOrthogonal { .. }));
    let su2_span = SubspaceBasis::new((0..3).map(|i| u2.basis_vector(i)).collect(), 0.0).unwrap();
    assert!(sub.basis.spans_same(&su2_span, 0.0));
    let osc = catalog::oscillator(2, false).unwrap();
    assert_eq!(theorem::algebra_report(&osc).unwrap().verdict, Verdict::Inapplicable);
}

fn p_vector(m: usize) -> AlgebraVector<Exact> {
    // P = (U + V)/√2.
    let d = 2 * m + 2;
    let half_root = Exact::sqrt2() * Exact::ratio(1, 2);
    let mut c = vec![Exact::zero(); d];
    c[0] = half_root.clone();
    c[d - 1] = half_root;
    AlgebraVector::new(c)
}

#[test]
fn audit_subalgebra_fixtures() {
    let alg = catalog::oscillator(1, false).unwrap();
    let (x, y) = (alg.basis_vector(1), alg.basis_vector(2));
    let pxy = SubspaceBasis::new(vec![p_vector(1), x.clone(), y.clone()], 0.0).unwrap();
    let check = alg.is_subalgebra(&pxy, 0.0).unwrap();
    assert!(check.closed && check.witness.is_none());

    let uxy = SubspaceBasis::new(vec![alg.basis_vector(0), x, y], 0.0).unwrap();
    let check = alg.is_subalgebra(&uxy, 0.0).unwrap();
    assert!(!check.closed);
    let w = check.witness.expect("non-closure carries a witness");
    assert!(!w.outside.is_zero_within(0.0));
}

#[test]
fn audit_literal_oscillator() {
    let alg = catalog::algebra_by_id("oscillator:m=2,literal=true").unwrap_or_else(|_| catalog::oscillator(2, true).unwrap());
    let report = alg.validate(0.0);
    assert!(!report.passed);
    let adinv = report.entry("ad_invariance").unwrap();
    assert!(!adinv.passed && adinv.violations > 0);
    let loc = adinv.location.as_ref().expect("localized residual");
    assert_eq!(loc.len(), 3);
    assert!(loc.iter().all(|&i| (1..=alg.dim()).contains(&i)));
    assert!(report.entry("antisymmetry").unwrap().passed);
}

#[test]
fn degenerate_lateral_class_is_rejected() {
    let osc = catalog::oscillator(1, false).unwrap();
    let basis = vec![p_vector(1), osc.basis_vector(1), osc.basis_vector(2)];
    let Err(err) = chart::subgroup_slice_with_basis(&osc, basis, 0.0) else { panic!("null normal accepted") };
    assert_eq!(err.to_string(), "degenerate induced metric");
}
