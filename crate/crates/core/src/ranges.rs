//! Closed-form parameter-range predicates: triviality, space identification,
//! the sharp power-weight range for the maximal operator, sufficiency bounds
//! and extrapolation regions.
//!
//! Inequalities are evaluated in double precision; values within `TOL` of an
//! endpoint are reported as [`Verdict::Boundary`].

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::morrey::MorreyParams;
use crate::weights::conjugate;

pub const TOL: f64 = 1e-12;

fn near(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= TOL * (1.0 + a.abs().max(b.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Triviality {
    /// Only the zero function has finite norm.
    Trivial,
    /// `λ₁ + λ₂ = n`: an `L^∞`-type space.
    LInfinity,
    /// `λ₁ + λ₂(1 + β/n) = 0`.
    Degenerate,
    NonTrivial,
}

pub fn space_is_trivial(params: &MorreyParams, beta: f64) -> Result<Triviality> {
    let n = params.n as f64;
    if !(beta > -n) {
        return Err(Error::InvalidParameter(format!("β = {beta} is not above -n")));
    }
    let eff = params.effective_lambda(beta);
    let sum = params.lambda1 + params.lambda2;
    Ok(if near(sum, n) {
        Triviality::LInfinity
    } else if sum > n || (eff < 0.0 && !near(eff, 0.0)) {
        Triviality::Trivial
    } else if near(eff, 0.0) {
        Triviality::Degenerate
    } else {
        Triviality::NonTrivial
    })
}

/// `(p, λ₁, λ₂, β) ↦ ((p, λ₁ + λ₂, 0), β(1 − λ₂/n))`.
pub fn identify_space(params: &MorreyParams, beta: f64) -> Result<(MorreyParams, f64)> {
    let n = params.n as f64;
    let eff = params.effective_lambda(beta);
    let sum = params.lambda1 + params.lambda2;
    if !(eff > 0.0) {
        return Err(Error::Precondition(format!("λ₁ + λ₂(1+β/n) > 0 fails: {eff}")));
    }
    if !(sum > 0.0 && sum < n) {
        return Err(Error::Precondition(format!("0 < λ₁ + λ₂ < n fails: {sum}")));
    }
    let target = MorreyParams::new(params.p, sum, 0.0, params.n)?;
    Ok((target, beta * (1.0 - params.lambda2 / n)))
}

/// `q = (np + λ₁)/(n − λ₂)`: boundedness of M forces `w ∈ A_q`.
pub fn hl_necessity_class(params: &MorreyParams) -> Result<f64> {
    let n = params.n as f64;
    if params.lambda2 >= n {
        return Err(Error::Precondition(format!("λ₂ < n fails: {}", params.lambda2)));
    }
    if params.lambda1 < 0.0 || params.lambda2 < 0.0 {
        return Err(Error::Precondition("λ₁, λ₂ >= 0 fails".into()));
    }
    Ok((n * params.p + params.lambda1) / (n - params.lambda2))
}

/// Interval of β; the right end is always open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerRange {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
}

impl PowerRange {
    pub fn contains(&self, beta: f64) -> bool {
        (beta > self.lo || (self.lo_closed && beta == self.lo)) && beta < self.hi
    }
}

/// β for which M is bounded on the power-weighted space: the closed-open
/// interval `[n(λ₁+λ₂−n), n(λ₁+λ₂+n(p−1)))/(n−λ₂)` cut to `β > −n`, or
/// `(−n−λ₁, ∞)` when `λ₂ = n`.
pub fn hl_power_range(params: &MorreyParams) -> Result<PowerRange> {
    let n = params.n as f64;
    let (l1, l2, p) = (params.lambda1, params.lambda2, params.p);
    let sum = l1 + l2;
    if sum > n && !near(sum, n) {
        return Err(Error::Precondition(format!("λ₁ + λ₂ <= n fails: {sum}")));
    }
    if near(l2, n) {
        if !(l1 > -n * p && l1 < 0.0) {
            return Err(Error::Precondition(format!("-np < λ₁ < 0 fails for λ₂ = n: λ₁ = {l1}")));
        }
        return Ok(PowerRange { lo: -n - l1, hi: f64::INFINITY, lo_closed: false });
    }
    if l2 > n {
        return Err(Error::Precondition(format!("λ₂ <= n fails: {l2}")));
    }
    let d = n - l2;
    let lo = n * (sum - n) / d;
    let hi = n * (sum + n * (p - 1.0)) / d;
    Ok(if lo <= -n {
        PowerRange { lo: -n, hi, lo_closed: false }
    } else {
        PowerRange { lo, hi, lo_closed: true }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Verdict {
    Bounded,
    Unbounded,
    TrivialSpace,
    /// Within the tolerance band of an endpoint; `included` tells whether the
    /// endpoint belongs to the range.
    Boundary { included: bool },
    OutsideTheory,
}

impl Verdict {
    /// Bounded or an included endpoint.
    pub fn is_bounded(&self) -> bool {
        matches!(self, Verdict::Bounded | Verdict::Boundary { included: true })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Bounded => "bounded",
            Verdict::Unbounded => "unbounded",
            Verdict::TrivialSpace => "trivial-space",
            Verdict::Boundary { included: true } => "boundary-included",
            Verdict::Boundary { included: false } => "boundary-excluded",
            Verdict::OutsideTheory => "outside-theory",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeVerdict {
    pub verdict: Verdict,
    pub citation: String,
    pub binding: String,
}

impl RangeVerdict {
    fn new(verdict: Verdict, citation: &str, binding: impl Into<String>) -> Self {
        Self { verdict, citation: citation.into(), binding: binding.into() }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

pub const CITE_SHARP: &str = "sharp-power-range";
pub const CITE_LIMIT: &str = "sharp-power-range-limit";
pub const CITE_TRIVIAL: &str = "triviality";

/// Verdict for M on the space with weight `|x|^β`.
pub fn hl_power_verdict(params: &MorreyParams, beta: f64) -> Result<RangeVerdict> {
    let n = params.n as f64;
    match space_is_trivial(params, beta)? {
        Triviality::Trivial => {
            return Ok(RangeVerdict::new(
                Verdict::TrivialSpace,
                CITE_TRIVIAL,
                "λ₁ + λ₂(1+β/n) < 0 or λ₁ + λ₂ > n",
            ))
        }
        Triviality::Degenerate => {
            return Ok(RangeVerdict::new(
                Verdict::Boundary { included: true },
                CITE_LIMIT,
                "λ₁ + λ₂(1+β/n) = 0",
            ))
        }
        _ => {}
    }
    let limit = near(params.lambda2, n);
    let cite = if limit { CITE_LIMIT } else { CITE_SHARP };
    let range = match hl_power_range(params) {
        Ok(r) => r,
        Err(e) => return Ok(RangeVerdict::new(Verdict::OutsideTheory, cite, e.to_string())),
    };
    let left = if limit { "β > -n-λ₁" } else { "λ₁+λ₂-n <= β(1-λ₂/n)" };
    let right = "β(1-λ₂/n) < λ₁+λ₂+n(p-1)";
    Ok(if near(beta, range.lo) {
        RangeVerdict::new(Verdict::Boundary { included: range.lo_closed }, cite, left)
    } else if beta < range.lo {
        RangeVerdict::new(Verdict::Unbounded, cite, left)
    } else if near(beta, range.hi) {
        RangeVerdict::new(Verdict::Boundary { included: false }, cite, right)
    } else if beta > range.hi {
        RangeVerdict::new(Verdict::Unbounded, cite, right)
    } else {
        RangeVerdict::new(Verdict::Bounded, cite, "")
    })
}

/// `(admissible, α_hi)` for `|x|^α w` with `w ∈ A_p`: admissible iff
/// `0 < λ₁σ'_w + λ₂ < n`, and `α < n(λ₁+λ₂θ)/(n−λ₂)` (no bound when `λ₂ = n`).
pub fn hl_general_sufficient(params: &MorreyParams, sigma_w: f64, theta: f64) -> Result<(bool, f64)> {
    let n = params.n as f64;
    let (l1, l2) = (params.lambda1, params.lambda2);
    if l2 < 0.0 {
        return Err(Error::Precondition(format!("λ₂ >= 0 fails: {l2}")));
    }
    if l2 > n && !near(l2, n) {
        return Err(Error::Precondition(format!("λ₂ <= n fails: {l2}")));
    }
    if !(sigma_w > 1.0) {
        return Err(Error::InvalidParameter(format!("σ_w must exceed 1, got {sigma_w}")));
    }
    let t = l1 * conjugate(sigma_w) + l2;
    let alpha_hi = if near(l2, n) { f64::INFINITY } else { n * (l1 + l2 * theta) / (n - l2) };
    Ok((t > 0.0 && t < n, alpha_hi))
}

/// One inequality of an extrapolation region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Constraint {
    /// `0 <= λ₂ <= n`.
    Lambda2Range,
    /// `λ₁σ'_w + λ₂ > 0`.
    PositiveCombination,
    /// `λ₁σ'_w + λ₂ < bound`.
    CombinationBelow { bound: f64 },
    /// `0 <= α < n(λ₁+λ₂θ)/(n−λ₂)`, unbounded when `λ₂ = n`.
    AlphaBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationRegion {
    pub n: usize,
    pub sigma_prime: f64,
    pub theta: f64,
    pub constraints: Vec<Constraint>,
}

impl ExtrapolationRegion {
    fn holds(&self, c: &Constraint, l1: f64, l2: f64, alpha: f64) -> bool {
        let n = self.n as f64;
        let combo = l1 * self.sigma_prime + l2;
        match *c {
            Constraint::Lambda2Range => (0.0..=n).contains(&l2),
            Constraint::PositiveCombination => combo > 0.0,
            Constraint::CombinationBelow { bound } => combo < bound,
            Constraint::AlphaBound => {
                alpha >= 0.0 && (l2 == n || alpha < n * (l1 + l2 * self.theta) / (n - l2))
            }
        }
    }

    pub fn contains(&self, lambda1: f64, lambda2: f64, alpha: f64) -> bool {
        self.constraints.iter().all(|c| self.holds(c, lambda1, lambda2, alpha))
    }

    /// The constraints that fail at the point.
    pub fn violated(&self, lambda1: f64, lambda2: f64, alpha: f64) -> Vec<Constraint> {
        self.constraints
            .iter()
            .filter(|c| !self.holds(c, lambda1, lambda2, alpha))
            .copied()
            .collect()
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    Ok(())
}

pub fn extrapolation_region_full(p: f64, sigma_w: f64, theta: f64, n: usize) -> Result<ExtrapolationRegion> {
    check_p(p)?;
    check_dim(n)?;
    if !(sigma_w > 1.0) {
        return Err(Error::InvalidParameter(format!("σ_w must exceed 1, got {sigma_w}")));
    }
    Ok(ExtrapolationRegion {
        n,
        sigma_prime: conjugate(sigma_w),
        theta,
        constraints: vec![
            Constraint::Lambda2Range,
            Constraint::PositiveCombination,
            Constraint::CombinationBelow { bound: n as f64 },
            Constraint::AlphaBound,
        ],
    })
}

/// `max(0, β − n(p−1)) < λ₁ + λ₂(1+β/n) < n + β` and `λ₁ + λ₂ < n`.
pub fn extrapolation_region_power(p: f64, beta: f64, lambda: (f64, f64), n: usize) -> Result<bool> {
    check_p(p)?;
    check_dim(n)?;
    let nf = n as f64;
    if !(beta > -nf) {
        return Err(Error::InvalidParameter(format!("β = {beta} is not above -n")));
    }
    let eff = lambda.0 + lambda.1 * (1.0 + beta / nf);
    Ok((beta - nf * (p - 1.0)).max(0.0) < eff && eff < nf + beta && lambda.0 + lambda.1 < nf)
}

fn check_limited(p: f64, p_minus: f64, p_plus: f64) -> Result<()> {
    if !(p_minus > 0.0 && p_minus < p && p < p_plus) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < p₋ < p < p₊, got p₋ = {p_minus}, p = {p}, p₊ = {p_plus}"
        )));
    }
    Ok(())
}

/// Limited-range region for `w ∈ A_{p/p₋}` with `σ_w > (p₊/p)'`.
pub fn extrapolation_region_limited_region(
    p: f64,
    p_minus: f64,
    p_plus: f64,
    sigma_w: f64,
    theta: f64,
    n: usize,
) -> Result<ExtrapolationRegion> {
    check_limited(p, p_minus, p_plus)?;
    check_dim(n)?;
    let need = conjugate(p_plus / p);
    if !(sigma_w > need) {
        return Err(Error::Precondition(format!("σ_w > (p₊/p)' = {need} fails: σ_w = {sigma_w}")));
    }
    let sp = conjugate(sigma_w);
    let bound = n as f64 * (1.0 - p / p_plus * sp);
    Ok(ExtrapolationRegion {
        n,
        sigma_prime: sp,
        theta,
        constraints: vec![
            Constraint::Lambda2Range,
            Constraint::PositiveCombination,
            Constraint::CombinationBelow { bound },
            Constraint::AlphaBound,
        ],
    })
}

#[allow(clippy::too_many_arguments)]
pub fn extrapolation_region_limited(
    p: f64,
    p_minus: f64,
    p_plus: f64,
    sigma_w: f64,
    theta: f64,
    lambda: (f64, f64),
    alpha: f64,
    n: usize,
) -> Result<bool> {
    let r = extrapolation_region_limited_region(p, p_minus, p_plus, sigma_w, theta, n)?;
    Ok(r.contains(lambda.0, lambda.1, alpha))
}

/// Power-weight limited-range region:
/// `max(0, β − n(p/p₋ − 1)) < λ₁ + λ₂(1+β/n) < n(1 − p₋/p₊) + β` and
/// `λ₁ + λ₂ < n(1 − p/p₊)`.
pub fn extrapolation_region_limited_power(
    p: f64,
    p_minus: f64,
    p_plus: f64,
    beta: f64,
    lambda: (f64, f64),
    n: usize,
) -> Result<bool> {
    check_limited(p, p_minus, p_plus)?;
    check_dim(n)?;
    let nf = n as f64;
    if !(beta > -nf) {
        return Err(Error::InvalidParameter(format!("β = {beta} is not above -n")));
    }
    let eff = lambda.0 + lambda.1 * (1.0 + beta / nf);
    let lower = (beta - nf * (p / p_minus - 1.0)).max(0.0);
    let upper = nf * (1.0 - p_minus / p_plus) + beta;
    Ok(lower < eff && eff < upper && lambda.0 + lambda.1 < nf * (1.0 - p / p_plus))
}

/// `(q, s)` with `L^q(w^s)` embedded in the Morrey space:
/// `q = pn/(n−λ₁−λ₂)`, `s = (n−λ₂)/(n−λ₁−λ₂)`.
pub fn embedding_exponents(params: &MorreyParams) -> Result<(f64, f64)> {
    let n = params.n as f64;
    let (l1, l2) = (params.lambda1, params.lambda2);
    if l1 < 0.0 || l2 < 0.0 {
        return Err(Error::Precondition("λ₁, λ₂ >= 0 fails".into()));
    }
    let d = n - l1 - l2;
    if !(d > 0.0) {
        return Err(Error::Precondition(format!("λ₁ + λ₂ < n fails: {}", l1 + l2)));
    }
    Ok((params.p * n / d, (n - l2) / d))
}
