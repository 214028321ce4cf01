//! Strong, weak and two-weight Morrey functionals over finite ball families.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretize::{GridFunction, Quadrature};
use crate::error::{check_dim, Error, Result};
use crate::geometry::{enumerate, unit_ball_measure, Ball, BallFamily};
use crate::ranges::{space_is_trivial, Triviality};
use crate::weights::Weight;

/// `(p, λ₁, λ₂)` in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorreyParams {
    pub p: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub n: usize,
}

impl MorreyParams {
    pub fn new(p: f64, lambda1: f64, lambda2: f64, n: usize) -> Result<Self> {
        check_dim(n)?;
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
        }
        if !lambda1.is_finite() || !lambda2.is_finite() {
            return Err(Error::InvalidParameter("λ must be finite".into()));
        }
        Ok(Self { p, lambda1, lambda2, n })
    }

    /// `λ₁ + λ₂(1 + β/n)`.
    pub fn effective_lambda(&self, beta: f64) -> f64 {
        self.lambda1 + self.lambda2 * (1.0 + beta / self.n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `r^{λ₁}`.
    #[default]
    RadiusPower,
    /// `|B|^{λ₁/n}`.
    MeasurePower,
}

/// `N(B) w(B)^{λ₂/n}`.
pub fn normalizer(params: &MorreyParams, norm: Normalization, ball: &Ball, w_ball: f64) -> f64 {
    let n = params.n as f64;
    let base = match norm {
        Normalization::RadiusPower => ball.radius.powf(params.lambda1),
        Normalization::MeasurePower => (unit_ball_measure(params.n) * ball.radius.powi(params.n as i32))
            .powf(params.lambda1 / n),
    };
    base * w_ball.powf(params.lambda2 / n)
}

/// A supremum over a finite family: a lower bound for the true norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub argmax_ball: Option<Ball>,
    pub balls_examined: usize,
    pub family: Option<BallFamily>,
    /// Always true: a finite family bounds the norm from below.
    pub one_sided: bool,
    /// Analytic triviality verdict when the weight is a power.
    pub triviality: Option<Triviality>,
}

/// Ball functionals of one function against one weight, with the quadrature
/// tables built once.
#[derive(Debug, Clone)]
pub struct MorreyFunctional {
    quad: Quadrature,
    params: MorreyParams,
    norm: Normalization,
}

impl MorreyFunctional {
    pub fn new(f: &GridFunction, w: &Weight, params: &MorreyParams, norm: Normalization) -> Result<Self> {
        if params.n != f.spec().n() {
            return Err(Error::InvalidParameter("parameter and grid dimensions differ".into()));
        }
        let fp = f.abs_pow(params.p);
        Ok(Self { quad: Quadrature::new(&fp, w)?, params: *params, norm })
    }

    pub fn params(&self) -> &MorreyParams {
        &self.params
    }

    /// `None` when `w(B) = 0`.
    pub fn strong(&self, ball: &Ball) -> Option<f64> {
        let wb = self.quad.weight_measure(ball);
        if !(wb > 0.0) {
            return None;
        }
        let mass = self.quad.integral(ball).value;
        if mass == 0.0 {
            return Some(0.0);
        }
        let d = normalizer(&self.params, self.norm, ball, wb);
        Some((mass / d).powf(1.0 / self.params.p))
    }

    /// `sup_s s · w({|f|^p > s} ∩ B)`, attained as `s` increases to a piece level.
    fn level_sup(&self, ball: &Ball) -> f64 {
        let mut levels: Vec<(f64, f64)> = self
            .quad
            .pieces(ball)
            .into_iter()
            .filter(|p| p.weight > 0.0 && p.mass > 0.0)
            .map(|p| (p.mass / p.weight, p.weight))
            .collect();
        if levels.iter().any(|(l, _)| l.is_infinite()) {
            return f64::INFINITY;
        }
        levels.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut acc = 0.0;
        let mut best = 0.0f64;
        for (l, w) in levels {
            acc += w;
            best = best.max(l * acc);
        }
        best
    }

    /// Weak functional, always `|B|`-normalized. `levels` are values of `t`;
    /// `None` uses every piece level approached from below.
    pub fn weak(&self, ball: &Ball, levels: Option<&[f64]>) -> Option<f64> {
        let wb = self.quad.weight_measure(ball);
        if !(wb > 0.0) {
            return None;
        }
        let sup = match levels {
            None => self.level_sup(ball),
            Some(ts) => {
                let pieces = self.quad.pieces(ball);
                ts.iter()
                    .map(|&t| {
                        let s = t.powf(self.params.p);
                        let mass: f64 = pieces
                            .iter()
                            .filter(|p| p.weight > 0.0 && p.mass / p.weight > s)
                            .map(|p| p.weight)
                            .sum();
                        s * mass
                    })
                    .fold(0.0, f64::max)
            }
        };
        if sup == 0.0 {
            return Some(0.0);
        }
        // Chebyshev: the level supremum never exceeds the mass; this only
        // removes rounding in the products above.
        let sup = sup.min(self.quad.integral(ball).value);
        let d = normalizer(&self.params, Normalization::MeasurePower, ball, wb);
        Some((sup / d).powf(1.0 / self.params.p))
    }

    /// `w(B)` as seen by the quadrature.
    pub fn weight_measure(&self, ball: &Ball) -> f64 {
        self.quad.weight_measure(ball)
    }

    /// `∫_B |f|^p w`.
    pub fn mass(&self, ball: &Ball) -> f64 {
        self.quad.integral(ball).value
    }

    pub fn strong_sup(&self, balls: &[Ball]) -> (f64, Option<Ball>) {
        argmax(balls, |b| self.strong(b))
    }

    pub fn weak_sup(&self, balls: &[Ball], levels: Option<&[f64]>) -> (f64, Option<Ball>) {
        argmax(balls, |b| self.weak(b, levels))
    }
}

/// Parallel evaluation followed by a sequential first-maximum scan, so ties
/// resolve the same way on every run.
fn argmax(balls: &[Ball], f: impl Fn(&Ball) -> Option<f64> + Sync) -> (f64, Option<Ball>) {
    let vals: Vec<Option<f64>> = balls.par_iter().map(&f).collect();
    let mut best = (0.0, None);
    for (b, v) in balls.iter().zip(vals) {
        if let Some(v) = v {
            if best.1.is_none() || v > best.0 {
                best = (v, Some(*b));
            }
        }
    }
    best
}

fn triviality_for(params: &MorreyParams, w: &Weight) -> Option<Triviality> {
    w.radial_exponent().and_then(|b| space_is_trivial(params, b).ok())
}

/// One strong ball functional.
pub fn ball_functional(
    f: &GridFunction,
    w: &Weight,
    params: &MorreyParams,
    ball: &Ball,
    norm: Normalization,
) -> Result<f64> {
    MorreyFunctional::new(f, w, params, norm)?
        .strong(ball)
        .ok_or_else(|| Error::Precondition(format!("w(B) = 0 on {ball:?}")))
}

pub fn morrey_norm(
    f: &GridFunction,
    w: &Weight,
    params: &MorreyParams,
    family: &BallFamily,
    norm: Normalization,
) -> Result<NormEstimate> {
    let balls = enumerate(family, f.spec())?;
    let mut est = morrey_norm_over(f, w, params, &balls, norm)?;
    est.family = Some(*family);
    Ok(est)
}

/// As [`morrey_norm`] over an explicit list of balls.
pub fn morrey_norm_over(
    f: &GridFunction,
    w: &Weight,
    params: &MorreyParams,
    balls: &[Ball],
    norm: Normalization,
) -> Result<NormEstimate> {
    if balls.is_empty() {
        return Err(Error::InvalidParameter("ball family is empty".into()));
    }
    let fun = MorreyFunctional::new(f, w, params, norm)?;
    let (value, argmax_ball) = fun.strong_sup(balls);
    if value.is_infinite() {
        log::debug!("divergent ball functional at {argmax_ball:?}");
    }
    Ok(NormEstimate {
        value,
        argmax_ball,
        balls_examined: balls.len(),
        family: None,
        one_sided: true,
        triviality: triviality_for(params, w),
    })
}

pub fn weak_morrey_norm(
    f: &GridFunction,
    w: &Weight,
    params: &MorreyParams,
    family: &BallFamily,
    levels: Option<&[f64]>,
) -> Result<NormEstimate> {
    if let Some(ts) = levels {
        if ts.is_empty() || ts.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::InvalidParameter("levels must be a nonempty set of positive values".into()));
        }
    }
    let balls = enumerate(family, f.spec())?;
    let fun = MorreyFunctional::new(f, w, params, Normalization::MeasurePower)?;
    let (value, argmax_ball) = fun.weak_sup(&balls, levels);
    Ok(NormEstimate {
        value,
        argmax_ball,
        balls_examined: balls.len(),
        family: Some(*family),
        one_sided: true,
        triviality: triviality_for(params, w),
    })
}

/// A positive set function on balls. `w_ball` is `w(B)` for the weight of the
/// norm.
pub trait BallGauge: Sync {
    fn gauge(&self, ball: &Ball, w_ball: f64) -> f64;
}

impl<F: Fn(&Ball, f64) -> f64 + Sync> BallGauge for F {
    fn gauge(&self, ball: &Ball, w_ball: f64) -> f64 {
        self(ball, w_ball)
    }
}

/// `u(B) = r^{λ₁} w(B)^{λ₂/n}`.
#[derive(Debug, Clone, Copy)]
pub struct MorreyGauge(pub MorreyParams);

impl BallGauge for MorreyGauge {
    fn gauge(&self, ball: &Ball, w_ball: f64) -> f64 {
        normalizer(&self.0, Normalization::RadiusPower, ball, w_ball)
    }
}

/// `sup_B (u(B)^{-1} ∫_B |f|^p w)^{1/p}`.
pub fn two_weight_norm(
    f: &GridFunction,
    u: &dyn BallGauge,
    w: &Weight,
    p: f64,
    family: &BallFamily,
) -> Result<NormEstimate> {
    let params = MorreyParams::new(p, 0.0, 0.0, f.spec().n())?;
    let balls = enumerate(family, f.spec())?;
    let fun = MorreyFunctional::new(f, w, &params, Normalization::RadiusPower)?;
    let gauges: Vec<f64> = balls.iter().map(|b| u.gauge(b, fun.weight_measure(b))).collect();
    if let Some((b, g)) = balls.iter().zip(&gauges).find(|(_, g)| !(**g > 0.0)) {
        return Err(Error::InvalidParameter(format!("u(B) = {g} is not positive on {b:?}")));
    }
    let indexed: Vec<(Ball, f64)> = balls.iter().copied().zip(gauges).collect();
    let vals: Vec<f64> = indexed
        .par_iter()
        .map(|(b, g)| {
            let m = fun.mass(b);
            if m == 0.0 {
                0.0
            } else {
                (m / g).powf(1.0 / p)
            }
        })
        .collect();
    let mut value = 0.0;
    let mut argmax_ball = None;
    for ((b, _), v) in indexed.iter().zip(vals) {
        if argmax_ball.is_none() || v > value {
            value = v;
            argmax_ball = Some(*b);
        }
    }
    Ok(NormEstimate {
        value,
        argmax_ball,
        balls_examined: balls.len(),
        family: Some(*family),
        one_sided: true,
        triviality: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{Analytic, GridSpec};
    use crate::geometry::Strategy;
    use approx::assert_relative_eq;

    fn spec() -> GridSpec {
        GridSpec::new(1, 16.0, 4096).unwrap()
    }

    fn chi(s: &GridSpec) -> GridFunction {
        GridFunction::from_analytic(s, Analytic::Indicator { coef: 1.0, center: [0.0, 0.0], radius: 1.0 })
    }

    fn fam() -> BallFamily {
        BallFamily::new(Strategy::All, 12, 3)
    }

    #[test]
    fn functional_examples() {
        let s = spec();
        let w = Weight::constant(1).unwrap();
        let p = MorreyParams::new(1.0, 0.5, 0.0, 1).unwrap();
        let b = Ball::centered(1.0).unwrap();
        assert_relative_eq!(
            ball_functional(&chi(&s), &w, &p, &b, Normalization::RadiusPower).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        let zero = GridFunction::zeros(&s);
        assert_eq!(ball_functional(&zero, &w, &p, &b, Normalization::RadiusPower).unwrap(), 0.0);
        let p0 = MorreyParams::new(1.0, 0.0, 0.0, 1).unwrap();
        assert_relative_eq!(
            ball_functional(&chi(&s), &w, &p0, &Ball::centered(4.0).unwrap(), Normalization::RadiusPower).unwrap(),
            2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn norm_examples() {
        let s = spec();
        let w = Weight::constant(1).unwrap();
        let p = MorreyParams::new(1.0, 0.5, 0.0, 1).unwrap();
        let est = morrey_norm(&chi(&s), &w, &p, &fam(), Normalization::RadiusPower).unwrap();
        assert_relative_eq!(est.value, 2.0, epsilon = 1e-12);
        assert_eq!(est.argmax_ball, Some(Ball::centered(1.0).unwrap()));
        assert!(est.one_sided);
        let twice = morrey_norm(&chi(&s).scaled(2.0), &w, &p, &fam(), Normalization::RadiusPower).unwrap();
        assert_relative_eq!(twice.value, 2.0 * est.value, epsilon = 1e-12);
        let zero = morrey_norm(&GridFunction::zeros(&s), &w, &p, &fam(), Normalization::RadiusPower).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn weak_examples() {
        let s = spec();
        let w = Weight::constant(1).unwrap();
        let p = MorreyParams::new(1.0, 0.5, 0.0, 1).unwrap();
        let weak = weak_morrey_norm(&chi(&s), &w, &p, &fam(), None).unwrap();
        let strong = morrey_norm(&chi(&s), &w, &p, &fam(), Normalization::MeasurePower).unwrap();
        assert_relative_eq!(weak.value, strong.value, epsilon = 1e-12);
        assert_relative_eq!(strong.value, 2f64.sqrt(), epsilon = 1e-12);
        let explicit = weak_morrey_norm(&chi(&s), &w, &p, &fam(), Some(&[0.5, 0.999])).unwrap();
        assert_relative_eq!(explicit.value, 0.999 * 2f64.sqrt(), epsilon = 1e-12);
        assert!(weak_morrey_norm(&chi(&s), &w, &p, &fam(), Some(&[])).is_err());
    }

    #[test]
    fn normalization_ratio_is_exact() {
        let s = spec();
        let w = Weight::power(0.3, 1).unwrap();
        let p = MorreyParams::new(2.0, 0.4, 0.2, 1).unwrap();
        let f = chi(&s);
        let a = MorreyFunctional::new(&f, &w, &p, Normalization::RadiusPower).unwrap();
        let b = MorreyFunctional::new(&f, &w, &p, Normalization::MeasurePower).unwrap();
        for ball in [Ball::centered(0.5).unwrap(), Ball::on_line(1.0, 0.25).unwrap()] {
            let ratio = a.strong(&ball).unwrap() / b.strong(&ball).unwrap();
            assert_relative_eq!(ratio, 2f64.powf(0.4 / 2.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn two_weight_gauges() {
        let s = spec();
        let w = Weight::power(0.5, 1).unwrap();
        let p = MorreyParams::new(2.0, 0.25, 0.5, 1).unwrap();
        let f = chi(&s);
        let direct = morrey_norm(&f, &w, &p, &fam(), Normalization::RadiusPower).unwrap();
        let tw = two_weight_norm(&f, &MorreyGauge(p), &w, 2.0, &fam()).unwrap();
        assert_relative_eq!(tw.value, direct.value, epsilon = 1e-12);
        let one = |_: &Ball, _: f64| 1.0;
        let plain = two_weight_norm(&f, &one, &w, 2.0, &fam()).unwrap();
        assert_relative_eq!(plain.value, (4.0f64 / 3.0).sqrt(), epsilon = 1e-12);
        let bad = |_: &Ball, _: f64| 0.0;
        assert!(two_weight_norm(&f, &bad, &w, 2.0, &fam()).is_err());
    }

    #[test]
    fn divergence_propagates() {
        let s = spec();
        let w = Weight::power(0.0, 1).unwrap();
        let p = MorreyParams::new(1.0, 0.0, 0.0, 1).unwrap();
        let f = GridFunction::from_analytic(&s, Analytic::Radial { coef: 1.0, exponent: -1.0, radius: 1.0 });
        let est = morrey_norm(&f, &w, &p, &fam(), Normalization::RadiusPower).unwrap();
        assert!(est.value.is_infinite());
        assert_eq!(est.argmax_ball.unwrap().center_norm(), 0.0);
    }
}
