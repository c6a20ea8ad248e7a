use genconvex::exhaustion::{build_exhaustion_symmetric, convex_post_compose, AffinePiece};
use genconvex::families::{circle_samples, eval, BasisFunction, Dim, FunctionFamily, Point, Structure};
use genconvex::gelfand::embed;
use genconvex::grid::Grid;
use genconvex::hull::{compute_hull, HullMode, HullProblem, HullVerdict};
use genconvex::exhaustion::ExhaustionFunction;
use genconvex::scenario::Scenario;
use std::sync::OnceLock;
use num_complex::Complex64;
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn z(re: f64, im: f64) -> Point {
    Point::complex(&[Complex64::new(re, im)]).unwrap()
}

fn disc_point() -> impl Strategy<Value = Point> {
    (0.0..0.98f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| z(r * t.cos(), r * t.sin()))
}

fn plane_point() -> impl Strategy<Value = Point> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y)| Point::real(vec![x, y]).unwrap())
}

/// Independent check of a rejection: re-evaluates the certificate through the basis.
fn certificate_violation(family: &FunctionFamily, s: &[Point], omega: &Point, mode: HullMode, c: f64, v: &HullVerdict) -> f64 {
    let cert = v.certificate.as_ref().expect("non-member without certificate");
    let combo = |p: &Point| -> f64 {
        cert.coefficients.iter().enumerate().map(|(i, a)| a * eval(&family.basis()[i], p).unwrap()).sum()
    };
    match mode {
        HullMode::Modulus => {
            let k = cert.monomial.expect("modulus certificate names a monomial");
            let m = |p: &Point| family.monomial(k, p).unwrap().norm();
            m(omega) - c * s.iter().map(m).fold(0.0, f64::max)
        }
        HullMode::C => combo(omega) - c * s.iter().map(|p| combo(p).abs()).fold(0.0, f64::max),
        HullMode::Cone => combo(omega) - c * s.iter().map(combo).fold(f64::NEG_INFINITY, f64::max),
        HullMode::Linear => combo(omega) - s.iter().map(combo).fold(f64::NEG_INFINITY, f64::max),
    }
}

fn disc_exhaustion() -> &'static ExhaustionFunction {
    static P: OnceLock<ExhaustionFunction> = OnceLock::new();
    P.get_or_init(|| {
        let sc = Scenario::builtin("disc").unwrap();
        let built = build_exhaustion_symmetric(sc.family(), &sc.grid, &sc.chains[0], &sc.options().exhaustion).unwrap();
        built.built().expect("disc construction succeeds").clone()
    })
}

fn cone_family() -> FunctionFamily {
    FunctionFamily::cone_sample(
        Dim::complex(1),
        vec![
            BasisFunction::re_monomial(vec![1]),
            BasisFunction::im_monomial(vec![1]),
            BasisFunction::re_monomial(vec![2]),
        ],
    )
    .unwrap()
    .symmetrize()
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn evaluation_is_finite_and_repeatable(p in disc_point(), d in 1u32..7) {
        let fam = FunctionFamily::monomials(1, d, false).unwrap();
        let a = fam.features(&p).unwrap();
        let b = fam.features(&p).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.iter().all(|v| v.is_finite()));
        prop_assert_eq!(a[0], 1.0);
    }

    #[test]
    fn degree_monotonicity(n in 1usize..3, d in 1u32..5, laurent in any::<bool>()) {
        let small = FunctionFamily::monomials(n, d, laurent).unwrap().descriptions();
        let big = FunctionFamily::monomials(n, d + 1, laurent).unwrap().descriptions();
        for s in &small {
            prop_assert!(big.contains(s), "{} missing at degree {}", s, d + 1);
        }
    }

    #[test]
    fn symmetrize_is_idempotent(p in disc_point()) {
        let base = FunctionFamily::cone_sample(
            Dim::complex(1),
            vec![BasisFunction::re_monomial(vec![1]), BasisFunction::im_monomial(vec![3])],
        ).unwrap();
        let once = base.symmetrize().unwrap();
        let twice = once.symmetrize().unwrap();
        prop_assert_eq!(once.descriptions(), twice.descriptions());
        for i in 0..base.len() {
            prop_assert_eq!(base.eval(i, &p).unwrap(), once.eval(i, &p).unwrap());
        }
        prop_assert_eq!(once.eval(0, &p).unwrap(), 1.0);
    }

    #[test]
    fn embedding_is_columnwise(s in prop::collection::vec(disc_point(), 1..8), t in prop::collection::vec(disc_point(), 1..8)) {
        let fam = FunctionFamily::monomials(1, 4, false).unwrap();
        let mut st = s.clone();
        st.extend(t);
        let full = embed(&fam, &st).unwrap();
        let part = embed(&fam, &s).unwrap();
        for j in 0..s.len() {
            prop_assert_eq!(full.column(j), part.column(j));
        }
    }

    #[test]
    fn functionals_of_features_are_evaluations(coeffs in prop::collection::vec(-3.0..3.0f64, 3), pts in prop::collection::vec(plane_point(), 100)) {
        let fam = FunctionFamily::affine(2).unwrap();
        let m = embed(&fam, &pts).unwrap();
        for (j, p) in pts.iter().enumerate() {
            let via_features: f64 = coeffs.iter().zip(m.column(j)).map(|(a, f)| a * f).sum();
            let direct = coeffs[0] + coeffs[1] * p.coords()[0] + coeffs[2] * p.coords()[1];
            prop_assert!((via_features - direct).abs() <= 1e-12);
            prop_assert!((fam.eval_combination(&coeffs, p).unwrap() - direct).abs() <= 1e-12);
        }
    }

    #[test]
    fn samples_belong_to_their_hull(s in prop::collection::vec(disc_point(), 1..10)) {
        let fam = FunctionFamily::monomials(1, 3, false).unwrap();
        let cone = cone_family();
        for (family, mode) in [(&fam, HullMode::Linear), (&fam, HullMode::C), (&fam, HullMode::Modulus), (&cone, HullMode::Cone)] {
            let problem = HullProblem::new(family, &s, mode, 1.0, TOL).unwrap();
            for p in &s {
                prop_assert!(problem.query(p).unwrap().member, "{} mode", mode);
            }
        }
    }

    #[test]
    fn certificates_are_sound(s in prop::collection::vec(disc_point(), 1..10), q in prop::collection::vec(disc_point(), 8), c in 1.0..4.0f64) {
        let fam = FunctionFamily::monomials(1, 3, false).unwrap();
        let cone = cone_family();
        let cases = [(&fam, HullMode::Linear, 1.0), (&fam, HullMode::C, c), (&fam, HullMode::Modulus, c), (&cone, HullMode::Cone, c)];
        for (family, mode, cc) in cases {
            let problem = HullProblem::new(family, &s, mode, cc, TOL).unwrap();
            for omega in &q {
                let v = problem.query(omega).unwrap();
                if !v.member {
                    let viol = certificate_violation(family, &s, omega, mode, cc, &v);
                    prop_assert!(viol >= v.gap / 2.0, "{} mode: violation {} < gap/2 = {}", mode, viol, v.gap / 2.0);
                    prop_assert!(v.gap > 0.0);
                }
            }
        }
    }

    #[test]
    fn c_hulls_are_nested(s in prop::collection::vec(disc_point(), 1..8), q in prop::collection::vec(disc_point(), 12), c1 in 1.0..3.0f64, dc in 0.0..3.0f64) {
        let fam = FunctionFamily::monomials(1, 3, false).unwrap();
        for mode in [HullMode::C, HullMode::Modulus] {
            let small = HullProblem::new(&fam, &s, mode, c1, TOL).unwrap();
            let big = HullProblem::new(&fam, &s, mode, c1 + dc, TOL).unwrap();
            for omega in &q {
                if small.query(omega).unwrap().member {
                    prop_assert!(big.query(omega).unwrap().member);
                }
            }
        }
    }

    #[test]
    fn hulls_grow_with_the_sample(s in prop::collection::vec(plane_point(), 1..8), extra in prop::collection::vec(plane_point(), 1..6), q in prop::collection::vec(plane_point(), 16)) {
        let fam = FunctionFamily::affine(2).unwrap();
        let mut t = s.clone();
        t.extend(extra);
        let hs = HullProblem::new(&fam, &s, HullMode::Linear, 1.0, TOL).unwrap();
        let ht = HullProblem::new(&fam, &t, HullMode::Linear, 1.0, TOL).unwrap();
        for omega in q.iter().chain(&s) {
            if hs.query(omega).unwrap().member {
                prop_assert!(ht.query(omega).unwrap().member);
            }
        }
    }

    #[test]
    fn grid_hulls_are_idempotent(idx in prop::collection::vec(0usize..10_000, 1..7)) {
        let grid = Grid::rect([0.0, 0.0], [1.0, 1.0], 20, 1).unwrap();
        let fam = FunctionFamily::affine(2).unwrap();
        let s: Vec<Point> = idx.iter().map(|&i| grid.point(i % grid.len()).clone()).collect();
        let first = compute_hull(&fam, &s, &grid, 1.0, HullMode::Linear, TOL).unwrap().members();
        let again: Vec<Point> = first.iter().map(|&i| grid.point(i).clone()).collect();
        let second = compute_hull(&fam, &again, &grid, 1.0, HullMode::Linear, TOL).unwrap().members();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn modulus_members_on_circles_are_linear_members(r in 0.2..0.9f64, d in 1u32..5, extra in 1usize..20, rho in 0.0..(1.0f64 / 3.0), t in 0.0..std::f64::consts::TAU) {
        // For |ω| <= r/3 and n > 2d the truncated Poisson kernel 1 + 2 Re Σ_{k<=d} (ω̄ z/r²)^k is
        // nonnegative on the circle and the n-point rule integrates it exactly against z^k, k <= d.
        let n = 2 * d as usize + extra;
        let s = circle_samples(Complex64::new(0.0, 0.0), r, n);
        let omega = z(rho * r * t.cos(), rho * r * t.sin());
        let fam = FunctionFamily::monomials(1, d, false).unwrap();
        let doubled = FunctionFamily::monomials(1, 2 * d, false).unwrap();
        prop_assert!(HullProblem::new(&doubled, &s, HullMode::Modulus, 1.0, TOL).unwrap().query(&omega).unwrap().member);
        prop_assert!(HullProblem::new(&fam, &s, HullMode::Linear, 1.0, TOL).unwrap().query(&omega).unwrap().member);
    }

    #[test]
    fn linear_members_are_modulus_members(s in prop::collection::vec(disc_point(), 1..8), q in prop::collection::vec(disc_point(), 12), d in 1u32..5) {
        let fam = FunctionFamily::monomials(1, d, false).unwrap();
        let linear = HullProblem::new(&fam, &s, HullMode::Linear, 1.0, TOL).unwrap();
        let modulus = HullProblem::new(&fam, &s, HullMode::Modulus, 1.0, 1e-7).unwrap();
        for omega in &q {
            if linear.query(omega).unwrap().member {
                prop_assert!(modulus.query(omega).unwrap().member);
            }
        }
    }

    #[test]
    fn post_composition_keeps_order(slopes in prop::collection::vec(0.1..3.0f64, 1..4), intercepts in prop::collection::vec(-1.0..1.0f64, 4), a in disc_point(), b in disc_point()) {
        let p = disc_exhaustion();
        let xi: Vec<AffinePiece> = slopes.iter().zip(&intercepts).map(|(&slope, &intercept)| AffinePiece { slope, intercept }).collect();
        let q = convex_post_compose(p, &xi).unwrap();
        let (pa, pb) = (p.eval(&a, 0).unwrap(), p.eval(&b, 0).unwrap());
        let (qa, qb) = (q.eval(&a, 0).unwrap(), q.eval(&b, 0).unwrap());
        if pa <= pb {
            prop_assert!(qa <= qb + 1e-9);
        }
        if pb <= pa {
            prop_assert!(qb <= qa + 1e-9);
        }
    }
}

#[test]
fn every_family_starts_with_the_constant() {
    let fams = [
        FunctionFamily::affine(3).unwrap(),
        FunctionFamily::monomials(2, 3, true).unwrap(),
        cone_family(),
        FunctionFamily::linear_span(Dim::real(1), vec![BasisFunction::affine(vec![2.0], 0.5)]).unwrap(),
    ];
    for fam in &fams {
        assert!(fam.contains_constants());
        let p = Point::new(vec![0.3; fam.dim().len()], fam.dim()).unwrap();
        assert_eq!(fam.eval(0, &p).unwrap(), 1.0);
    }
    assert_eq!(fams[1].structure(), Structure::AlgebraRealParts);
}

#[test]
fn constants_only_family_is_rejected_by_hulls() {
    let fam = FunctionFamily::cone_sample(Dim::real(1), vec![]).unwrap();
    assert!(fam.is_degenerate());
    let s = vec![Point::real(vec![0.0]).unwrap()];
    assert!(HullProblem::new(&fam, &s, HullMode::Cone, 1.0, TOL).is_err());
}
