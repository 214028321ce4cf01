//! Balls, the I/II/III classification and deterministic ball families.
//!
//! Every family is a finite dyadic lattice, so a supremum over it is a lower
//! bound of the true norm.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::discretize::GridSpec;
use crate::error::{Error, Result};
use crate::morrey::MorreyParams;
use crate::weights::Weight;

/// A point of R^n stored in two slots; the second is zero when n = 1.
pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn centered(radius: f64) -> Result<Self> {
        Self::new([0.0, 0.0], radius)
    }

    pub fn on_line(x: f64, radius: f64) -> Result<Self> {
        Self::new([x, 0.0], radius)
    }

    pub fn center_norm(&self) -> f64 {
        self.center[0].hypot(self.center[1])
    }

    /// Lebesgue measure of the ball in R^n.
    pub fn measure(&self, n: usize) -> f64 {
        unit_ball_measure(n) * self.radius.powi(n as i32)
    }

    pub fn contains_point(&self, y: Point) -> bool {
        let d = (y[0] - self.center[0]).hypot(y[1] - self.center[1]);
        d < self.radius
    }

    /// Closed containment of `other` in `self`, with a relative slack.
    pub fn contains_ball(&self, other: &Ball) -> bool {
        let d = (other.center[0] - self.center[0]).hypot(other.center[1] - self.center[1]);
        d + other.radius <= self.radius * (1.0 + 1e-12)
    }

    /// Smallest and largest distance from the origin over the closed ball.
    pub fn radial_extent(&self) -> (f64, f64) {
        let c = self.center_norm();
        ((c - self.radius).max(0.0), c + self.radius)
    }

    pub fn dilate(&self, factor: f64) -> Ball {
        Ball {
            center: [self.center[0] * factor, self.center[1] * factor],
            radius: self.radius * factor,
        }
    }
}

/// `c_n = |B(0,1)|`.
pub fn unit_ball_measure(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => PI,
        _ => panic!("unsupported dimension {n}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BallType {
    /// Centered at the origin.
    I,
    /// Off the origin with `r <= |x|/4`.
    II,
    /// Off the origin with `r > |x|/4`.
    III,
}

pub fn classify(ball: &Ball) -> BallType {
    let c = ball.center_norm();
    if c == 0.0 {
        BallType::I
    } else if ball.radius <= c / 4.0 {
        BallType::II
    } else {
        BallType::III
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    All,
    #[serde(rename = "type-i-ii")]
    TypeIAndII,
    #[serde(rename = "type-ii")]
    TypeIIOnly,
}

impl Strategy {
    fn admits(self, t: BallType) -> bool {
        match self {
            Strategy::All => true,
            Strategy::TypeIAndII => t != BallType::III,
            Strategy::TypeIIOnly => t == BallType::II,
        }
    }
}

/// Radial lattice of centers `|x| = R base^{-k}`, `0 <= k <= levels`, crossed
/// with `angles` directions in 2D (both signs in 1D). Type-II radii are
/// `|x|/4 base^{-j}`, `0 <= j <= radial_levels`; type-I and type-III radii run
/// over `R base^{-k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BallFamily {
    pub strategy: Strategy,
    pub base: f64,
    pub levels: u32,
    pub radial_levels: u32,
    pub angles: u32,
}

impl Default for BallFamily {
    fn default() -> Self {
        Self {
            strategy: Strategy::All,
            base: 2.0,
            levels: 16,
            radial_levels: 2,
            angles: 8,
        }
    }
}

impl BallFamily {
    pub fn new(strategy: Strategy, levels: u32, radial_levels: u32) -> Self {
        Self {
            strategy,
            levels,
            radial_levels,
            ..Self::default()
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.base > 1.0) {
            return Err(Error::InvalidParameter(format!("lattice base must exceed 1, got {}", self.base)));
        }
        if self.angles == 0 {
            return Err(Error::InvalidParameter("angular count must be positive".into()));
        }
        Ok(())
    }
}

/// Enumerates the family on the domain of `spec`. The order is fixed: type I
/// radii from large to small, then each center from far to near with its radii
/// from large to small.
pub fn enumerate(family: &BallFamily, spec: &GridSpec) -> Result<Vec<Ball>> {
    family.validate()?;
    let r_dom = spec.half_width();
    let scales: Vec<f64> = (0..=family.levels)
        .map(|k| r_dom * family.base.powi(-(k as i32)))
        .collect();

    let mut balls = Vec::new();
    if family.strategy.admits(BallType::I) {
        for &r in &scales {
            balls.push(Ball { center: [0.0, 0.0], radius: r });
        }
    }

    let directions: Vec<Point> = match spec.n() {
        1 => vec![[1.0, 0.0], [-1.0, 0.0]],
        _ => (0..family.angles)
            .map(|a| {
                let t = 2.0 * PI * a as f64 / family.angles as f64;
                [t.cos(), t.sin()]
            })
            .collect(),
    };

    for &c in &scales {
        for d in &directions {
            let center = [c * d[0], c * d[1]];
            if family.strategy.admits(BallType::III) {
                for &r in scales.iter().filter(|&&r| r > c / 4.0) {
                    balls.push(Ball { center, radius: r });
                }
            }
            if family.strategy.admits(BallType::II) {
                for j in 0..=family.radial_levels {
                    let r = c / 4.0 * family.base.powi(-(j as i32));
                    balls.push(Ball { center, radius: r });
                }
            }
        }
    }
    Ok(balls)
}

/// The type-II balls `B(x, |x|/4 base^{-j})` with `|x| = scale` in every
/// lattice direction.
pub fn type_ii_ring(scale: f64, radial_levels: u32, spec: &GridSpec, angles: u32) -> Vec<Ball> {
    let dirs: Vec<Point> = match spec.n() {
        1 => vec![[1.0, 0.0], [-1.0, 0.0]],
        _ => (0..angles.max(1))
            .map(|a| {
                let t = 2.0 * PI * a as f64 / angles.max(1) as f64;
                [t.cos(), t.sin()]
            })
            .collect(),
    };
    let mut out = Vec::new();
    for d in dirs {
        for j in 0..=radial_levels {
            out.push(Ball {
                center: [scale * d[0], scale * d[1]],
                radius: scale / 4.0 * 2f64.powi(-(j as i32)),
            });
        }
    }
    out
}

/// Whether the supremum may be restricted to type-II balls: the power form
/// `λ₁ + λ₂(1+β/n) > 0` when the weight is a (shifted) power, otherwise
/// `λ₁ σ'_w + λ₂ > 0` from the weight's reverse-Hölder metadata.
pub fn reduction_admissible(params: &MorreyParams, w: &Weight) -> Result<bool> {
    let n = params.n as f64;
    if let Some(beta) = w.radial_exponent() {
        return Ok(params.lambda1 + params.lambda2 * (1.0 + beta / n) > 0.0);
    }
    match w.meta().and_then(|m| m.sigma_w) {
        Some(sigma) => {
            let sp = crate::weights::conjugate(sigma);
            Ok(params.lambda1 * sp + params.lambda2 > 0.0)
        }
        None => Err(Error::MissingMetadata(
            "reduction test needs a power exponent or sigma_w".into(),
        )),
    }
}
