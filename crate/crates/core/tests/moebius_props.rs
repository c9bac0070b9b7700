mod common;

use common::{angle, point, sl2r};
use proptest::prelude::*;
use totally_elliptic::moebius::{
    classify_element, commutator_class, reflection, rotation_about, rotation_data, ElementClass, Geodesic,
    HPoint, Isometry, ProjectiveMatrix,
};

const TOL: f64 = 1e-9;

fn expected_class(abs_trace: f64) -> ElementClass {
    if abs_trace < 2.0 - TOL {
        ElementClass::EllipticRegular
    } else if abs_trace > 2.0 + TOL {
        ElementClass::Hyperbolic
    } else {
        ElementClass::Parabolic
    }
}

fn scale(m: &ProjectiveMatrix) -> f64 {
    m.entries().iter().map(|z| z.norm()).fold(1.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100_000))]

    #[test]
    fn classification_is_a_trichotomy_and_conjugation_invariant(m in sl2r(), g in sl2r()) {
        let [a, _, _, d] = m.real_entries().unwrap();
        let class = classify_element(&m, TOL);
        if m.is_identity(TOL) {
            prop_assert_eq!(class, ElementClass::Identity);
        } else {
            prop_assert_eq!(class, expected_class((a + d).abs()));
        }
        // conjugation moves |tr| by round-off only; skip draws sitting on a boundary
        prop_assume!(((a + d).abs() - 2.0).abs() > 1e-6 && m.distance_to_identity() > 1e-6);
        prop_assert_eq!(classify_element(&m.conjugate_by(&g), TOL), class);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn rotation_round_trip(p in point(), theta in angle()) {
        let m = rotation_about(&p, theta).unwrap();
        let (t, c) = rotation_data(&m, TOL).unwrap();
        prop_assert!((t - theta).abs() < 1e-9, "angle {} vs {}", t, theta);
        prop_assert!(c.distance(&p) < 1e-9, "centre {} vs {}", c, p);
    }

    #[test]
    fn elliptic_commutators_are_identity_or_hyperbolic(p in point(), theta in angle(), x in sl2r(), fixing in any::<bool>(), phi in angle()) {
        let a = rotation_about(&p, theta).unwrap();
        let x = if fixing { rotation_about(&p, phi).unwrap() } else { x };
        let moved = x.act_point(p).distance(&p);
        // |tr| − 2 grows like sinh²(d/2); stay clear of the ambiguity band
        prop_assume!(moved < 1e-12 || moved > 1e-3);
        let (class, _) = commutator_class(&a, &x, TOL).unwrap();
        prop_assert!(class == ElementClass::Identity || class == ElementClass::Hyperbolic, "{}", class);
        prop_assert_eq!(class == ElementClass::Identity, moved < 1e-8);
    }

    // inputs from a compact region: products of SL(2) matrices with entries of
    // size S carry relative round-off of order ε·S²
    #[test]
    fn reflection_decomposition(
        p in (-1.5..1.5f64, 0.4..3.0f64).prop_map(|(x, y)| HPoint::new(x, y).unwrap()),
        theta in angle(),
        x in sl2r().prop_filter("moderate entries", |m| scale(m) < 8.0),
    ) {
        let xp = x.act_point(p);
        prop_assume!(xp.distance(&p) > 1e-3);
        let a = rotation_about(&p, theta).unwrap();
        let conj = x * a.inverse() * x.inverse();
        let sigma = reflection(&Geodesic::through(&p, &xp).unwrap());
        // σ₁ = A∘σ and σ₂ = σ∘(XA⁻¹X⁻¹) must themselves be reflections
        let s1 = Isometry::from_moebius(a).compose(&sigma);
        let s2 = sigma.compose(&Isometry::from_moebius(conj));
        for (s, fixed) in [(s1, p), (s2, xp)] {
            prop_assert!(s.is_reversing());
            prop_assert!(s.compose(&s).matrix().is_identity(1e-8));
            prop_assert!((s.act(fixed.z()) - fixed.z()).norm() < 1e-8 * (1.0 + fixed.z().norm()));
        }
        let a_back = s1.compose(&sigma).as_moebius(1e-8 * scale(&a)).unwrap();
        prop_assert!(a_back.distance(&a) <= 1e-8 * scale(&a));
        let conj_back = sigma.compose(&s2).as_moebius(1e-8 * scale(&conj)).unwrap();
        prop_assert!(conj_back.distance(&conj) <= 1e-8 * scale(&conj));
        let comm = a.commutator(&x);
        let back = s1.compose(&s2).as_moebius(1e-8 * scale(&comm)).unwrap();
        prop_assert!(back.distance(&comm) <= 1e-8 * scale(&comm));
    }
}
