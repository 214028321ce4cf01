//! Truncated Hilbert transform on the line and operator-norm probes.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::discretize::GridFunction;
use crate::error::{Error, Result};
use crate::geometry::BallFamily;
use crate::maximal::{maximal_fast, MaximalConfig};
use crate::morrey::{morrey_norm, MorreyParams, Normalization};
use crate::weights::Weight;

/// Inner cutoff of the kernel; `None` means one grid step.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub epsilon: Option<f64>,
}

impl TruncationSpec {
    /// Smallest cell offset kept by the kernel: offsets `d` with `|d| h > ε`.
    fn min_offset(&self, f: &GridFunction) -> Result<usize> {
        let spec = f.spec();
        let h = spec.h();
        let eps = self.epsilon.unwrap_or(h);
        if !(eps > 0.0 && eps <= spec.half_width()) {
            return Err(Error::InvalidParameter(format!("cutoff must lie in (0, R], got {eps}")));
        }
        // Offsets are integers; the small slack keeps |d| h = ε excluded.
        Ok((eps / h * (1.0 + 1e-12)).floor() as usize + 1)
    }
}

fn check_input(f: &GridFunction) -> Result<()> {
    if f.spec().n() != 1 {
        return Err(Error::Dimension(f.spec().n()));
    }
    if f.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("Hilbert transform needs finite samples".into()));
    }
    Ok(())
}

/// `Hf(x) = Σ_{ε < |x−y|} f(y)/(x−y) h`, without the `1/π` factor.
pub fn hilbert_truncated(f: &GridFunction, trunc: &TruncationSpec) -> Result<GridFunction> {
    check_input(f)?;
    let d0 = trunc.min_offset(f)?;
    let m = f.spec().samples();
    let size = (2 * m).next_power_of_two() * 2;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);

    let mut a: Vec<Complex<f64>> = vec![Complex::default(); size];
    for (slot, &v) in a.iter_mut().zip(f.values()) {
        slot.re = v;
    }
    // Kernel K[d] = 1/d at index d mod size; h cancels against the cell width.
    let mut k: Vec<Complex<f64>> = vec![Complex::default(); size];
    for d in d0..m {
        let v = 1.0 / d as f64;
        k[d].re = v;
        k[size - d].re = -v;
    }
    fwd.process(&mut a);
    fwd.process(&mut k);
    for (x, y) in a.iter_mut().zip(&k) {
        *x *= *y;
    }
    inv.process(&mut a);
    let scale = 1.0 / size as f64;
    GridFunction::from_values(f.spec(), a[..m].iter().map(|c| c.re * scale).collect())
}

/// Direct O(m²) evaluation of [`hilbert_truncated`].
pub fn hilbert_naive(f: &GridFunction, trunc: &TruncationSpec) -> Result<GridFunction> {
    check_input(f)?;
    let d0 = trunc.min_offset(f)? as isize;
    let vals = f.values();
    let m = vals.len() as isize;
    let out = (0..m)
        .map(|i| {
            (0..m)
                .filter(|j| (i - j).abs() >= d0)
                .map(|j| vals[j as usize] / (i - j) as f64)
                .sum()
        })
        .collect();
    GridFunction::from_values(f.spec(), out)
}

pub trait Operator: Sync {
    fn apply(&self, f: &GridFunction) -> Result<GridFunction>;
    fn name(&self) -> String;
}

pub struct Identity;

impl Operator for Identity {
    fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        Ok(f.clone())
    }
    fn name(&self) -> String {
        "identity".into()
    }
}

pub struct Scaled(pub f64);

impl Operator for Scaled {
    fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        Ok(f.scaled(self.0))
    }
    fn name(&self) -> String {
        format!("{}*identity", self.0)
    }
}

/// `M|f|`.
pub struct Maximal(pub MaximalConfig);

impl Operator for Maximal {
    fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        maximal_fast(&f.abs_pow(1.0), &self.0)
    }
    fn name(&self) -> String {
        "maximal".into()
    }
}

pub struct Hilbert(pub TruncationSpec);

impl Operator for Hilbert {
    fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        hilbert_truncated(f, &self.0)
    }
    fn name(&self) -> String {
        "hilbert".into()
    }
}

/// `max_f ‖op f‖ / ‖f‖` over the catalog; zero-norm inputs are skipped.
pub fn operator_norm_lower_bound(
    op: &dyn Operator,
    w: &Weight,
    params: &MorreyParams,
    family: &BallFamily,
    catalog: &[GridFunction],
) -> Result<f64> {
    let mut best: Option<f64> = None;
    for (k, f) in catalog.iter().enumerate() {
        let nf = morrey_norm(f, w, params, family, Normalization::RadiusPower)?.value;
        if nf == 0.0 || !nf.is_finite() {
            log::warn!("catalog entry {k} has norm {nf}; skipped");
            continue;
        }
        let g = op.apply(f)?;
        let ng = morrey_norm(&g, w, params, family, Normalization::RadiusPower)?.value;
        let r = ng / nf;
        best = Some(best.map_or(r, |b: f64| b.max(r)));
    }
    best.ok_or_else(|| Error::InvalidParameter("no catalog entry has a finite nonzero norm".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{Analytic, GridSpec};
    use crate::geometry::Strategy;
    use approx::assert_relative_eq;

    fn chi(s: &GridSpec) -> GridFunction {
        GridFunction::from_analytic(s, Analytic::Indicator { coef: 1.0, center: [0.0, 0.0], radius: 1.0 })
    }

    #[test]
    fn log_three_at_two() {
        for m in [1024, 4096] {
            let s = GridSpec::new(1, 8.0, m).unwrap();
            let g = hilbert_truncated(&chi(&s), &TruncationSpec::default()).unwrap();
            let v = g.value_at([2.0 + 1e-9, 0.0]).unwrap();
            assert!((v - 3f64.ln()).abs() < 2.0 * s.h(), "{v}");
        }
    }

    #[test]
    fn fft_matches_naive() {
        let s = GridSpec::new(1, 4.0, 256).unwrap();
        let f = GridFunction::from_fn(&s, |y| (y[0] * 1.7).sin() * (-y[0] * y[0]).exp());
        for t in [TruncationSpec::default(), TruncationSpec { epsilon: Some(0.3) }] {
            let a = hilbert_truncated(&f, &t).unwrap();
            let b = hilbert_naive(&f, &t).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn antisymmetry_and_linearity() {
        let s = GridSpec::new(1, 4.0, 256).unwrap();
        let even = GridFunction::from_fn(&s, |y| (-y[0] * y[0]).exp());
        let h = hilbert_naive(&even, &TruncationSpec::default()).unwrap();
        let v = h.values();
        for i in 0..v.len() {
            assert!((v[i] + v[v.len() - 1 - i]).abs() < 1e-12);
        }
        let odd = GridFunction::from_fn(&s, |y| y[0] * (-y[0] * y[0]).exp());
        let g = GridFunction::from_fn(&s, |y| (y[0] - 0.3).cos());
        let t = TruncationSpec::default();
        let combo = GridFunction::from_values(
            &s,
            odd.values().iter().zip(g.values()).map(|(a, b)| 2.0 * a - 0.5 * b).collect(),
        )
        .unwrap();
        let lhs = hilbert_truncated(&combo, &t).unwrap();
        let ho = hilbert_truncated(&odd, &t).unwrap();
        let hg = hilbert_truncated(&g, &t).unwrap();
        for i in 0..lhs.values().len() {
            let rhs = 2.0 * ho.values()[i] - 0.5 * hg.values()[i];
            assert!((lhs.values()[i] - rhs).abs() < 1e-11);
        }
    }

    #[test]
    fn rejects_plane_and_bad_cutoff() {
        let s = GridSpec::new(2, 4.0, 16).unwrap();
        assert!(hilbert_truncated(&GridFunction::zeros(&s), &TruncationSpec::default()).is_err());
        let s1 = GridSpec::new(1, 4.0, 64).unwrap();
        let t = TruncationSpec { epsilon: Some(-1.0) };
        assert!(hilbert_truncated(&GridFunction::zeros(&s1), &t).is_err());
    }

    #[test]
    fn norm_probe_examples() {
        let s = GridSpec::new(1, 16.0, 1024).unwrap();
        let w = Weight::constant(1).unwrap();
        let p = MorreyParams::new(2.0, 0.5, 0.0, 1).unwrap();
        let fam = BallFamily::new(Strategy::All, 10, 2);
        let cat = vec![chi(&s), GridFunction::zeros(&s), chi(&s).scaled(3.0)];
        assert_relative_eq!(operator_norm_lower_bound(&Identity, &w, &p, &fam, &cat).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(operator_norm_lower_bound(&Scaled(2.0), &w, &p, &fam, &cat).unwrap(), 2.0, epsilon = 1e-12);
        assert!(operator_norm_lower_bound(&Identity, &w, &p, &fam, &[GridFunction::zeros(&s)]).is_err());
    }
}
