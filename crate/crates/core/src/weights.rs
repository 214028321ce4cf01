//! Power weights `|x|^β`, shifted products `|x|^α |x|^β`, and sampled weights,
//! with exact predicates and lower-bound estimators for the A_p, A_1 and
//! reverse-Hölder functionals.
//!
//! Estimators never fail on divergence: a non-integrable power on some ball
//! yields `f64::INFINITY`, so a parameter sweep can keep going.

use crate::discretize::{GridFunction, GridSpec};
use crate::error::{check_dim, Error, Result};
use crate::geometry::{Ball, Point};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerWeight {
    beta: f64,
    n: usize,
}

impl PowerWeight {
    pub fn new(beta: f64, n: usize) -> Result<Self> {
        check_dim(n)?;
        if !(beta > -(n as f64)) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power weight |x|^{beta} is not locally integrable in dimension {n}"
            )));
        }
        Ok(Self { beta, n })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// `|x|^α · base(x)` with `α >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedPowerWeight {
    alpha: f64,
    base: PowerWeight,
}

impl ShiftedPowerWeight {
    pub fn new(alpha: f64, base: PowerWeight) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("shift exponent must be >= 0, got {alpha}")));
        }
        Ok(Self { alpha, base })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn base(&self) -> &PowerWeight {
        &self.base
    }
}

/// Analytic facts attached to a weight.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightMeta {
    /// `(p, member of A_p)` pairs.
    pub ap_class: Vec<(f64, bool)>,
    /// `sup{σ : w ∈ RH_σ}`, possibly infinite.
    pub sigma_w: Option<f64>,
    /// Exponent in `w(B(0,r))/w(B(0,R)) <= c (r/R)^{nθ}`.
    pub theta: Option<f64>,
}

impl WeightMeta {
    pub fn for_power(beta: f64, n: usize, ps: &[f64]) -> Result<Self> {
        let ap_class = ps
            .iter()
            .map(|&p| ap_membership_power(beta, p, n).map(|m| (p, m)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            ap_class,
            sigma_w: Some(sigma_w_power(beta, n)?),
            theta: Some(theta_power(beta, n)?),
        })
    }
}

/// A weight sampled on a grid, piecewise constant on cells.
#[derive(Debug, Clone)]
pub struct SampledWeight {
    values: GridFunction,
    meta: Option<WeightMeta>,
}

#[derive(Debug, Clone)]
pub enum Weight {
    Power(PowerWeight),
    Shifted(ShiftedPowerWeight),
    Sampled(SampledWeight),
}

const META_EXPONENTS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 4.0];

impl Weight {
    pub fn power(beta: f64, n: usize) -> Result<Self> {
        PowerWeight::new(beta, n).map(Weight::Power)
    }

    pub fn constant(n: usize) -> Result<Self> {
        Self::power(0.0, n)
    }

    pub fn shifted(alpha: f64, beta: f64, n: usize) -> Result<Self> {
        ShiftedPowerWeight::new(alpha, PowerWeight::new(beta, n)?).map(Weight::Shifted)
    }

    /// Wraps a nonnegative grid function as a weight.
    pub fn sampled(values: GridFunction) -> Result<Self> {
        if values.values().iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParameter("sampled weight must be nonnegative".into()));
        }
        Ok(Weight::Sampled(SampledWeight { values, meta: None }))
    }

    pub fn sampled_with_meta(values: GridFunction, meta: WeightMeta) -> Result<Self> {
        match Self::sampled(values)? {
            Weight::Sampled(s) => Ok(Weight::Sampled(SampledWeight { meta: Some(meta), ..s })),
            _ => unreachable!(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Weight::Power(p) => p.n,
            Weight::Shifted(s) => s.base.n,
            Weight::Sampled(s) => s.values.spec().n(),
        }
    }

    /// Total exponent when the weight is a pure power of `|x|`.
    pub fn radial_exponent(&self) -> Option<f64> {
        match self {
            Weight::Power(p) => Some(p.beta),
            Weight::Shifted(s) => Some(s.alpha + s.base.beta),
            Weight::Sampled(_) => None,
        }
    }

    pub fn sampled_values(&self) -> Option<&GridFunction> {
        match self {
            Weight::Sampled(s) => Some(&s.values),
            _ => None,
        }
    }

    pub fn meta(&self) -> Option<WeightMeta> {
        match self {
            Weight::Power(p) => WeightMeta::for_power(p.beta, p.n, &META_EXPONENTS).ok(),
            Weight::Shifted(s) => {
                // σ_{|x|^α w} >= σ_w; the product is itself a power, so use it directly.
                let total = s.alpha + s.base.beta;
                WeightMeta::for_power(total, s.base.n, &META_EXPONENTS).ok()
            }
            Weight::Sampled(s) => s.meta.clone(),
        }
    }

    pub fn eval(&self, y: Point) -> f64 {
        match self {
            Weight::Power(_) | Weight::Shifted(_) => {
                let g = self.radial_exponent().unwrap();
                if g == 0.0 {
                    1.0
                } else {
                    y[0].hypot(y[1]).powf(g)
                }
            }
            Weight::Sampled(s) => s.values.value_at(y).unwrap_or(0.0),
        }
    }
}

/// `p' = p/(p-1)`, with `1' = ∞` and `∞' = 1`.
pub fn conjugate(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// `|x|^β ∈ A_p`: `-n < β <= 0` for `p = 1`, `-n < β < n(p-1)` for `p > 1`.
pub fn ap_membership_power(beta: f64, p: f64, n: usize) -> Result<bool> {
    check_dim(n)?;
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("A_p needs p >= 1, got {p}")));
    }
    let nf = n as f64;
    if beta <= -nf {
        return Ok(false);
    }
    Ok(if p == 1.0 { beta <= 0.0 } else { beta < nf * (p - 1.0) })
}

/// `σ_w` for `|x|^β`: infinite for `β >= 0`, `-n/β` otherwise.
pub fn sigma_w_power(beta: f64, n: usize) -> Result<f64> {
    PowerWeight::new(beta, n)?;
    Ok(if beta >= 0.0 { f64::INFINITY } else { -(n as f64) / beta })
}

/// `θ = 1 + β/n` for `|x|^β`.
pub fn theta_power(beta: f64, n: usize) -> Result<f64> {
    PowerWeight::new(beta, n)?;
    Ok(1.0 + beta / n as f64)
}

/// `∫_B w^t` together with the measure of `B`, both computed on the same path
/// so that `w ≡ 1` gives a ratio of exactly one.
fn power_mass_and_measure(w: &Weight, t: f64, ball: &Ball, grid: &GridSpec) -> Result<(f64, f64)> {
    if w.n() != grid.n() {
        return Err(Error::InvalidParameter(format!(
            "weight dimension {} does not match grid dimension {}",
            w.n(),
            grid.n()
        )));
    }
    let n = grid.n();
    match w {
        Weight::Sampled(s) => {
            if s.values.spec() != grid {
                return Err(Error::InvalidParameter("sampled weight lives on a different grid".into()));
            }
            let mut mass = 0.0;
            let mut meas = 0.0;
            for (idx, len) in grid.cells_meeting_ball(ball) {
                let v = s.values.values()[idx];
                let vt = if v == 0.0 && t < 0.0 { f64::INFINITY } else { v.powf(t) };
                mass += vt * len;
                meas += len;
            }
            Ok((mass, meas))
        }
        _ => {
            let gamma = w.radial_exponent().unwrap() * t;
            if n == 1 {
                let a = ball.center[0] - ball.radius;
                let b = ball.center[0] + ball.radius;
                Ok((quad::power_interval(gamma, a, b), b - a))
            } else if ball.center_norm() == 0.0 {
                Ok((quad::power_ball(gamma, ball.radius, 2), ball.measure(2)))
            } else {
                let h = grid.h();
                let mut mass = 0.0;
                let mut meas = 0.0;
                for (idx, len) in grid.cells_meeting_ball(ball) {
                    let c = grid.cell_center(idx);
                    let cell_mass = if grid.touches_origin(idx) {
                        quad::power_corner_square(gamma, h)
                    } else {
                        c[0].hypot(c[1]).powf(gamma) * len
                    };
                    mass += cell_mass;
                    meas += len;
                }
                Ok((mass, meas))
            }
        }
    }
}

fn essinf(w: &Weight, ball: &Ball, grid: &GridSpec) -> f64 {
    match w {
        Weight::Sampled(s) => grid
            .cells_meeting_ball(ball)
            .map(|(idx, _)| s.values.values()[idx])
            .fold(f64::INFINITY, f64::min),
        _ => {
            let g = w.radial_exponent().unwrap();
            let (near, far) = ball.radial_extent();
            if g > 0.0 {
                near.powf(g)
            } else if g < 0.0 {
                far.powf(g)
            } else {
                1.0
            }
        }
    }
}

fn require_balls(balls: &[Ball]) -> Result<()> {
    if balls.is_empty() {
        Err(Error::InvalidParameter("ball family is empty".into()))
    } else {
        Ok(())
    }
}

/// Max over `balls` of `(w(B)/|B|)(w^{1-p'}(B)/|B|)^{p-1}`, a lower bound for
/// `[w]_{A_p}`.
pub fn ap_constant_estimate(w: &Weight, p: f64, balls: &[Ball], grid: &GridSpec) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("A_p estimate needs p > 1, got {p}")));
    }
    require_balls(balls)?;
    let dual = 1.0 - conjugate(p);
    let mut best = 0.0f64;
    for b in balls {
        let (wb, meas) = power_mass_and_measure(w, 1.0, b, grid)?;
        let (vb, _) = power_mass_and_measure(w, dual, b, grid)?;
        if meas == 0.0 {
            continue;
        }
        let val = (wb / meas) * (vb / meas).powf(p - 1.0);
        if val.is_infinite() {
            return Ok(f64::INFINITY);
        }
        best = best.max(val);
    }
    Ok(best)
}

/// Max over `balls` of `(w(B)/|B|) / essinf_B w`.
pub fn a1_constant_estimate(w: &Weight, balls: &[Ball], grid: &GridSpec) -> Result<f64> {
    require_balls(balls)?;
    let mut best = 0.0f64;
    for b in balls {
        let (wb, meas) = power_mass_and_measure(w, 1.0, b, grid)?;
        if meas == 0.0 {
            continue;
        }
        let inf = essinf(w, b, grid);
        if inf == 0.0 {
            return Ok(f64::INFINITY);
        }
        best = best.max(wb / meas / inf);
    }
    Ok(best)
}

/// Max over `balls` of `(avg_B w^σ)^{1/σ} / avg_B w`.
pub fn rh_check(w: &Weight, sigma: f64, balls: &[Ball], grid: &GridSpec) -> Result<f64> {
    if !(sigma > 1.0) {
        return Err(Error::InvalidParameter(format!("reverse Hölder exponent must exceed 1, got {sigma}")));
    }
    require_balls(balls)?;
    let mut best = 0.0f64;
    for b in balls {
        let (ws, meas) = power_mass_and_measure(w, sigma, b, grid)?;
        let (w1, _) = power_mass_and_measure(w, 1.0, b, grid)?;
        if meas == 0.0 || w1 == 0.0 {
            continue;
        }
        let val = (ws / meas).powf(1.0 / sigma) / (w1 / meas);
        if val.is_infinite() {
            return Ok(f64::INFINITY);
        }
        best = best.max(val);
    }
    Ok(best)
}

/// Subset of a ball used by [`measure_comparison_defect`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Ball(Ball),
    /// `inner <= |y - center| < outer`.
    Annulus { center: Point, inner: f64, outer: f64 },
}

impl Region {
    fn outer_ball(&self) -> Ball {
        match *self {
            Region::Ball(b) => b,
            Region::Annulus { center, outer, .. } => Ball { center, radius: outer },
        }
    }

    fn mass_and_measure(&self, w: &Weight, grid: &GridSpec) -> Result<(f64, f64)> {
        match *self {
            Region::Ball(b) => power_mass_and_measure(w, 1.0, &b, grid),
            Region::Annulus { center, inner, outer } => {
                let (mo, so) = power_mass_and_measure(w, 1.0, &Ball { center, radius: outer }, grid)?;
                if inner <= 0.0 {
                    return Ok((mo, so));
                }
                let (mi, si) = power_mass_and_measure(w, 1.0, &Ball { center, radius: inner }, grid)?;
                Ok((mo - mi, so - si))
            }
        }
    }
}

/// Max over pairs `E ⊂ B` of `[w(E)/w(B)] / (|E|/|B|)^{1/σ'}`.
pub fn measure_comparison_defect(
    w: &Weight,
    sigma: f64,
    pairs: &[(Region, Ball)],
    grid: &GridSpec,
) -> Result<f64> {
    if !(sigma > 1.0) {
        return Err(Error::InvalidParameter(format!("σ must exceed 1, got {sigma}")));
    }
    let inv_sp = 1.0 / conjugate(sigma);
    let mut best = 0.0f64;
    for (e, b) in pairs {
        if !b.contains_ball(&e.outer_ball()) {
            return Err(Error::InvalidParameter(format!("region {e:?} is not contained in {b:?}")));
        }
        let (we, me) = e.mass_and_measure(w, grid)?;
        let (wb, mb) = power_mass_and_measure(w, 1.0, b, grid)?;
        if me == 0.0 || wb == 0.0 {
            continue;
        }
        best = best.max((we / wb) / (me / mb).powf(inv_sp));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid1() -> GridSpec {
        GridSpec::new(1, 16.0, 4096).unwrap()
    }

    fn origin_balls(radii: &[f64]) -> Vec<Ball> {
        radii.iter().map(|&r| Ball::centered(r).unwrap()).collect()
    }

    #[test]
    fn membership_examples() {
        assert!(ap_membership_power(0.0, 2.0, 1).unwrap());
        assert!(ap_membership_power(-0.5, 1.0, 1).unwrap());
        assert!(!ap_membership_power(1.5, 2.0, 1).unwrap());
        assert!(ap_membership_power(-1.5, 2.0, 2).unwrap());
        assert!(ap_membership_power(0.5, 0.5, 1).is_err());
    }

    #[test]
    fn constant_weight_has_unit_constants() {
        let w = Weight::constant(1).unwrap();
        let balls = vec![
            Ball::centered(1.0).unwrap(),
            Ball::on_line(3.0, 0.5).unwrap(),
            Ball::on_line(-2.0, 4.0).unwrap(),
        ];
        let g = grid1();
        assert_relative_eq!(ap_constant_estimate(&w, 2.0, &balls, &g).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(ap_constant_estimate(&w, 3.5, &balls, &g).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(a1_constant_estimate(&w, &balls, &g).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(rh_check(&w, 2.0, &balls, &g).unwrap(), 1.0, epsilon = 1e-14);

        let g2 = GridSpec::new(2, 4.0, 64).unwrap();
        let w2 = Weight::constant(2).unwrap();
        let balls2 = vec![Ball::centered(1.0).unwrap(), Ball::new([1.0, 1.0], 0.7).unwrap()];
        assert_relative_eq!(ap_constant_estimate(&w2, 2.0, &balls2, &g2).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ap_of_sqrt_weight_is_scale_invariant() {
        // (1/2r)∫_{-r}^{r}|t|^{1/2} · (1/2r)∫|t|^{-1/2} = (2/3)·2 = 4/3 for every r.
        let w = Weight::power(0.5, 1).unwrap();
        for r in [1.0, 0.1, 0.01, 1e-4] {
            let v = ap_constant_estimate(&w, 2.0, &origin_balls(&[r]), &grid1()).unwrap();
            assert_relative_eq!(v, 4.0 / 3.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn ap_diverges_outside_class() {
        let w = Weight::power(1.5, 1).unwrap();
        let v = ap_constant_estimate(&w, 2.0, &origin_balls(&[1.0, 0.1, 0.01]), &grid1()).unwrap();
        assert!(v.is_infinite());
    }

    #[test]
    fn a1_examples() {
        let w = Weight::power(-0.5, 1).unwrap();
        let v = a1_constant_estimate(&w, &origin_balls(&[1.0]), &grid1()).unwrap();
        assert_relative_eq!(v, 2.0, epsilon = 1e-14);
        let w = Weight::power(0.5, 1).unwrap();
        assert!(a1_constant_estimate(&w, &origin_balls(&[1.0, 0.5]), &grid1())
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn rh_examples() {
        let w = Weight::power(-0.5, 1).unwrap();
        let v = rh_check(&w, 1.5, &origin_balls(&[1.0]), &grid1()).unwrap();
        assert_relative_eq!(v, 4f64.powf(2.0 / 3.0) / 2.0, epsilon = 1e-13);
        assert_relative_eq!(v, 1.2599, epsilon = 1e-4);
        assert!(rh_check(&w, 2.5, &origin_balls(&[1.0, 0.1]), &grid1()).unwrap().is_infinite());
        assert!(rh_check(&w, 1.0, &origin_balls(&[1.0]), &grid1()).is_err());
    }

    #[test]
    fn sigma_and_theta() {
        assert!(sigma_w_power(0.0, 1).unwrap().is_infinite());
        assert_relative_eq!(sigma_w_power(-1.0, 2).unwrap(), 2.0);
        assert!(sigma_w_power(1.0, 1).unwrap().is_infinite());
        assert!(sigma_w_power(-1.0, 1).is_err());
        assert_eq!(theta_power(0.0, 1).unwrap(), 1.0);
        assert_eq!(theta_power(1.0, 1).unwrap(), 2.0);
        assert_eq!(theta_power(-1.0, 2).unwrap(), 0.5);
        assert!(theta_power(-2.0, 2).is_err());
    }

    #[test]
    fn sigma_w_matches_rh_sweep() {
        // |x|^{-1} in the plane: RH_σ iff σ < 2.
        let g = GridSpec::new(2, 4.0, 64).unwrap();
        let w = Weight::power(-1.0, 2).unwrap();
        let balls = origin_balls(&[1.0, 0.5]);
        assert!(rh_check(&w, 1.9, &balls, &g).unwrap().is_finite());
        assert!(rh_check(&w, 2.1, &balls, &g).unwrap().is_infinite());
    }

    #[test]
    fn measure_comparison_examples() {
        let g = grid1();
        let b = Ball::centered(1.0).unwrap();
        let w = Weight::power(-0.5, 1).unwrap();
        assert_relative_eq!(
            measure_comparison_defect(&w, 1.5, &[(Region::Ball(b), b)], &g).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        for r in [0.5, 0.1, 0.01] {
            let e = Ball::centered(r).unwrap();
            let v = measure_comparison_defect(&w, 1.5, &[(Region::Ball(e), b)], &g).unwrap();
            assert_relative_eq!(v, r.powf(1.0 / 6.0), max_relative = 1e-12);
        }
        let one = Weight::constant(1).unwrap();
        let e = Ball::on_line(0.5, 0.25).unwrap();
        let v = measure_comparison_defect(&one, 3.0, &[(Region::Ball(e), b)], &g).unwrap();
        assert_relative_eq!(v, 0.25f64.powf(1.0 / 3.0), max_relative = 1e-12);

        let outside = Ball::on_line(2.0, 0.5).unwrap();
        assert!(measure_comparison_defect(&one, 2.0, &[(Region::Ball(outside), b)], &g).is_err());
    }

    #[test]
    fn annulus_region() {
        let g = grid1();
        let b = Ball::centered(1.0).unwrap();
        let e = Region::Annulus { center: [0.0, 0.0], inner: 0.5, outer: 1.0 };
        let one = Weight::constant(1).unwrap();
        let v = measure_comparison_defect(&one, 2.0, &[(e, b)], &g).unwrap();
        assert_relative_eq!(v, 0.5f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn shifted_weight_is_a_power() {
        let w = Weight::shifted(0.3, -0.5, 1).unwrap();
        assert_relative_eq!(w.radial_exponent().unwrap(), -0.2, epsilon = 1e-15);
        assert!(Weight::shifted(-0.1, 0.0, 1).is_err());
        let m = w.meta().unwrap();
        assert_relative_eq!(m.sigma_w.unwrap(), 5.0, epsilon = 1e-12);
    }
}
