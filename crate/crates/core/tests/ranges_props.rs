use morrey_core::morrey::MorreyParams;
use morrey_core::ranges::{
    embedding_exponents, extrapolation_region_full, extrapolation_region_limited_power, extrapolation_region_power,
    hl_general_sufficient, hl_necessity_class, hl_power_range, hl_power_verdict, identify_space, space_is_trivial,
    Verdict,
};
use morrey_core::weights::{ap_membership_power, conjugate, sigma_w_power, theta_power};
use proptest::prelude::*;

fn params(n: usize) -> impl Strategy<Value = (MorreyParams, f64)> {
    let nf = n as f64;
    (1.0..6.0f64, -nf..nf, 0.0..nf, -0.99 * nf..3.0 * nf)
        .prop_map(move |(p, l1, l2, beta)| (MorreyParams::new(p, l1, l2, n).unwrap(), beta))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn predicates_are_total((mp, beta) in prop_oneof![params(1), params(2)], alpha in -1.0..3.0f64) {
        let n = mp.n;
        let _ = space_is_trivial(&mp, beta);
        let _ = identify_space(&mp, beta);
        let _ = hl_necessity_class(&mp);
        let _ = hl_power_range(&mp);
        let _ = hl_power_verdict(&mp, beta);
        let _ = hl_general_sufficient(&mp, 1.0 + alpha.abs(), 1.0 + beta / n as f64);
        let _ = extrapolation_region_full(mp.p, 1.5 + alpha.abs(), 0.5, n).map(|r| r.contains(mp.lambda1, mp.lambda2, alpha));
        let _ = extrapolation_region_power(mp.p, beta, (mp.lambda1, mp.lambda2), n);
        let _ = extrapolation_region_limited_power(mp.p, 1.0, mp.p * 2.0, beta, (mp.lambda1, mp.lambda2), n);
        let _ = embedding_exponents(&mp);
        let _ = ap_membership_power(beta, mp.p, n);
    }

    #[test]
    fn identification_is_idempotent((mp, beta) in prop_oneof![params(1), params(2)]) {
        if let Ok((target, b2)) = identify_space(&mp, beta) {
            prop_assert_eq!(target.lambda2, 0.0);
            let (again, b3) = identify_space(&target, b2).unwrap();
            prop_assert_eq!(again, target);
            prop_assert_eq!(b3, b2);
        }
    }

    #[test]
    fn power_range_is_nonempty((mp, _b) in prop_oneof![params(1), params(2)]) {
        let n = mp.n as f64;
        prop_assume!(mp.lambda1 + mp.lambda2 < n && mp.lambda2 < n - 1e-6);
        let r = hl_power_range(&mp).unwrap();
        prop_assert!(r.hi > r.lo);
        prop_assert!(r.lo >= -n);
        let mid = if r.hi.is_finite() { 0.5 * (r.lo + r.hi) } else { r.lo + 1.0 };
        prop_assert!(r.contains(mid));
        let v = hl_power_verdict(&mp, mid).unwrap().verdict;
        prop_assert!(v == Verdict::Bounded || v == Verdict::TrivialSpace, "{:?}", v);
    }

    #[test]
    fn verdict_matches_range_away_from_endpoints((mp, beta) in params(1)) {
        let Ok(r) = hl_power_range(&mp) else { return Ok(()) };
        prop_assume!((beta - r.lo).abs() > 1e-6 && (beta - r.hi).abs() > 1e-6);
        let v = hl_power_verdict(&mp, beta).unwrap().verdict;
        match v {
            Verdict::Bounded => prop_assert!(r.contains(beta)),
            Verdict::Unbounded => prop_assert!(!r.contains(beta)),
            Verdict::TrivialSpace => {}
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }

    /// With a constant base weight the α-interval of the general sufficient
    /// condition sits inside the sharp β-interval.
    #[test]
    fn alpha_interval_inside_beta_interval(p in 1.0..5.0f64, l1 in 0.0..0.9f64, frac in 0.01..0.99f64, t in 0.0..1.0f64) {
        let l2 = (1.0 - l1) * frac;
        let mp = MorreyParams::new(p, l1, l2, 1).unwrap();
        let (admissible, alpha_hi) = hl_general_sufficient(&mp, f64::INFINITY, 1.0).unwrap();
        prop_assert!(admissible);
        let r = hl_power_range(&mp).unwrap();
        let alpha = t * alpha_hi;
        prop_assert!(r.contains(alpha), "α = {} outside {:?}", alpha, r);
        prop_assert!(alpha_hi <= r.hi);
    }

    #[test]
    fn conjugate_is_an_involution(p in 1.0001..50.0f64) {
        let q = conjugate(p);
        prop_assert!((1.0 / p + 1.0 / q - 1.0).abs() < 1e-12);
        prop_assert!((conjugate(q) - p).abs() < 1e-9 * p);
    }

    #[test]
    fn ap_classes_increase_with_p(beta in -0.99..4.0f64, p in 1.0..5.0f64, dp in 0.0..3.0f64) {
        if ap_membership_power(beta, p, 1).unwrap() {
            prop_assert!(ap_membership_power(beta, p + dp, 1).unwrap());
        }
    }

    #[test]
    fn sigma_and_theta_formulas(beta in -1.99..4.0f64) {
        let s = sigma_w_power(beta, 2).unwrap();
        if beta >= 0.0 {
            prop_assert!(s.is_infinite());
        } else {
            prop_assert!((s * beta + 2.0).abs() < 1e-12);
        }
        prop_assert!((theta_power(beta, 2).unwrap() - 1.0 - beta / 2.0).abs() < 1e-15);
    }
}

#[test]
fn classical_ranges() {
    let samko = hl_power_range(&MorreyParams::new(2.0, 0.5, 0.0, 1).unwrap()).unwrap();
    assert_eq!((samko.lo, samko.hi, samko.lo_closed), (-0.5, 1.5, true));
    let ks = hl_power_range(&MorreyParams::new(2.0, 0.0, 0.5, 1).unwrap()).unwrap();
    assert_eq!((ks.lo, ks.hi, ks.lo_closed), (-1.0, 3.0, false));
    let mp = MorreyParams::new(2.0, 0.5, 0.0, 1).unwrap();
    assert_eq!(hl_power_verdict(&mp, -0.5).unwrap().verdict, Verdict::Boundary { included: true });
    assert_eq!(hl_power_verdict(&mp, 1.5).unwrap().verdict, Verdict::Boundary { included: false });
}
