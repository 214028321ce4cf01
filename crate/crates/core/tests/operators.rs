use morrey_core::czops::{hilbert_naive, hilbert_truncated, TruncationSpec};
use morrey_core::discretize::{Analytic, GridFunction, GridSpec};
use morrey_core::maximal::{maximal_brute, maximal_fast, MaximalConfig};
use proptest::collection::vec;
use proptest::prelude::*;

fn grid(n: usize, m: usize, values: Vec<f64>) -> GridFunction {
    GridFunction::from_values(&GridSpec::new(n, 4.0, m).unwrap(), values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_equals_brute_1d(v in vec(0.0..10.0f64, 64)) {
        let f = grid(1, 64, v);
        let cfg = MaximalConfig::for_dim(1);
        let a = maximal_fast(&f, &cfg).unwrap();
        let b = maximal_brute(&f, &cfg).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
        }
    }

    #[test]
    fn fast_equals_brute_2d(v in vec(0.0..10.0f64, 256)) {
        let f = grid(2, 16, v);
        let cfg = MaximalConfig::for_dim(2);
        let a = maximal_fast(&f, &cfg).unwrap();
        let b = maximal_brute(&f, &cfg).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
        }
    }

    #[test]
    fn maximal_is_monotone(v in vec(0.0..10.0f64, 64), d in vec(0.0..5.0f64, 64)) {
        let g: Vec<f64> = v.iter().zip(&d).map(|(a, b)| a + b).collect();
        let cfg = MaximalConfig::for_dim(1);
        let mf = maximal_fast(&grid(1, 64, v), &cfg).unwrap();
        let mg = maximal_fast(&grid(1, 64, g), &cfg).unwrap();
        for (x, y) in mf.values().iter().zip(mg.values()) {
            prop_assert!(x <= &(y * (1.0 + 1e-12)));
        }
    }

    #[test]
    fn maximal_is_homogeneous(v in vec(0.0..10.0f64, 256), c in 0.0..100.0f64) {
        let f = grid(2, 16, v);
        let cfg = MaximalConfig::for_dim(2);
        let a = maximal_fast(&f.scaled(c), &cfg).unwrap();
        let b = maximal_fast(&f, &cfg).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - c * y).abs() <= 1e-12 * (c * y).max(1.0));
        }
    }

    #[test]
    fn maximal_dominates_input(v in vec(0.0..10.0f64, 64)) {
        let f = grid(1, 64, v);
        let mf = maximal_fast(&f, &MaximalConfig::for_dim(1)).unwrap();
        for (x, y) in f.values().iter().zip(mf.values()) {
            prop_assert!(x <= &(y * (1.0 + 1e-12)));
        }
    }

    #[test]
    fn hilbert_is_linear(u in vec(-1.0..1.0f64, 128), v in vec(-1.0..1.0f64, 128), a in -3.0..3.0f64) {
        let t = TruncationSpec::default();
        let sum: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + y).collect();
        let hu = hilbert_truncated(&grid(1, 128, u), &t).unwrap();
        let hv = hilbert_truncated(&grid(1, 128, v), &t).unwrap();
        let hs = hilbert_truncated(&grid(1, 128, sum), &t).unwrap();
        for i in 0..128 {
            let want = a * hu.values()[i] + hv.values()[i];
            prop_assert!((hs.values()[i] - want).abs() < 1e-10);
        }
    }

    #[test]
    fn hilbert_fft_matches_naive(v in vec(-1.0..1.0f64, 128), eps in 0.05..1.0f64) {
        let f = grid(1, 128, v);
        let t = TruncationSpec { epsilon: Some(eps) };
        let a = hilbert_truncated(&f, &t).unwrap();
        let b = hilbert_naive(&f, &t).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn hilbert_maps_even_to_odd(half in vec(-1.0..1.0f64, 64)) {
        let mut v: Vec<f64> = half.iter().rev().copied().collect();
        v.extend(half.iter().copied());
        let h = hilbert_naive(&grid(1, 128, v), &TruncationSpec::default()).unwrap();
        for i in 0..64 {
            prop_assert!((h.values()[i] + h.values()[127 - i]).abs() < 1e-12);
        }
    }
}

#[test]
fn far_field_decay_of_indicator() {
    // For χ_{(-1,1)} and x > 1, the uncentered maximal function is 2/(x + 1),
    // attained by the window [-1, x].
    let spec = GridSpec::new(1, 16.0, 4096).unwrap();
    let chi = GridFunction::from_analytic(&spec, Analytic::Indicator { coef: 1.0, center: [0.0, 0.0], radius: 1.0 });
    let mf = maximal_fast(&chi, &MaximalConfig::for_dim(1)).unwrap();
    let x = 8.0 + spec.h() / 2.0;
    let got = mf.value_at([x, 0.0]).unwrap();
    let exact = 2.0 / (x + 1.0);
    // Dyadic window lengths lose at most a factor two.
    assert!(got <= exact * (1.0 + 1e-9) && got >= exact / 2.0, "{got} vs {exact}");
    assert!(got * x > 0.9 && got * x < 2.0);
}
