//! Uniform grids on `[-R, R]^n`, grid functions with optional analytic tags,
//! weighted quadrature over balls, and the witness catalog.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{Ball, Point};
use crate::morrey::MorreyParams;
use crate::quad;
use crate::weights::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGridSpec")]
pub struct GridSpec {
    n: usize,
    half_width: f64,
    samples: usize,
}

#[derive(Deserialize)]
struct RawGridSpec {
    n: usize,
    half_width: f64,
    samples: usize,
}

impl TryFrom<RawGridSpec> for GridSpec {
    type Error = Error;
    fn try_from(r: RawGridSpec) -> Result<Self> {
        GridSpec::new(r.n, r.half_width, r.samples)
    }
}

impl GridSpec {
    /// `samples` cells per axis; must be a power of two, at least 16.
    pub fn new(n: usize, half_width: f64, samples: usize) -> Result<Self> {
        check_dim(n)?;
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidParameter(format!("half-width must be positive, got {half_width}")));
        }
        if samples < 16 || !samples.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "samples per axis must be a power of two >= 16, got {samples}"
            )));
        }
        Ok(Self { n, half_width, samples })
    }

    /// `R = 16` with `2^12` cells in 1D or `2^9` per axis in 2D.
    pub fn default_for(n: usize) -> Result<Self> {
        let m = if n == 1 { 1 << 12 } else { 1 << 9 };
        Self::new(n, 16.0, m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.samples as f64
    }

    /// Total number of cells.
    pub fn len(&self) -> usize {
        self.samples.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Twice as many cells on the same domain.
    pub fn refined(&self) -> Self {
        Self { samples: self.samples * 2, ..*self }
    }

    /// Twice the domain at the same spacing.
    pub fn widened(&self) -> Self {
        Self {
            half_width: self.half_width * 2.0,
            samples: self.samples * 2,
            ..*self
        }
    }

    fn axis_center(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.h()
    }

    pub fn cell_center(&self, idx: usize) -> Point {
        if self.n == 1 {
            [self.axis_center(idx), 0.0]
        } else {
            let m = self.samples;
            [self.axis_center(idx % m), self.axis_center(idx / m)]
        }
    }

    fn axis_index(&self, x: f64) -> Option<usize> {
        let t = ((x + self.half_width) / self.h()).floor();
        if t < 0.0 || t >= self.samples as f64 || t.is_nan() {
            None
        } else {
            Some(t as usize)
        }
    }

    /// Cell containing `y`, if inside the domain.
    pub fn index_of(&self, y: Point) -> Option<usize> {
        let ix = self.axis_index(y[0])?;
        if self.n == 1 {
            Some(ix)
        } else {
            Some(self.axis_index(y[1])? * self.samples + ix)
        }
    }

    /// Whether the cell has a corner (2D) or an endpoint (1D) at the origin.
    pub fn touches_origin(&self, idx: usize) -> bool {
        let m = self.samples;
        let near = |i: usize| i == m / 2 - 1 || i == m / 2;
        if self.n == 1 {
            near(idx)
        } else {
            near(idx % m) && near(idx / m)
        }
    }

    fn clip_1d(&self, ball: &Ball) -> Option<(f64, f64)> {
        let lo = (ball.center[0] - ball.radius).max(-self.half_width);
        let hi = (ball.center[0] + ball.radius).min(self.half_width);
        (lo < hi).then_some((lo, hi))
    }

    /// In 2D, for each row meeting the ball, the inclusive column range of
    /// cells whose centers lie inside it.
    fn rows_2d(&self, ball: &Ball) -> Vec<(usize, usize, usize)> {
        let m = self.samples as f64;
        let h = self.h();
        let r = ball.radius;
        let [cx, cy] = ball.center;
        let to_idx = |x: f64| (x + self.half_width) / h - 0.5;
        let lo_row = (to_idx(cy - r).floor() + 1.0).max(0.0);
        let hi_row = (to_idx(cy + r).ceil() - 1.0).min(m - 1.0);
        let mut rows = Vec::new();
        if lo_row > hi_row {
            return rows;
        }
        for iy in lo_row as usize..=hi_row as usize {
            let dy = self.axis_center(iy) - cy;
            let s2 = r * r - dy * dy;
            if s2 <= 0.0 {
                continue;
            }
            let s = s2.sqrt();
            let lo = (to_idx(cx - s).floor() + 1.0).max(0.0);
            let hi = (to_idx(cx + s).ceil() - 1.0).min(m - 1.0);
            if lo <= hi {
                rows.push((iy, lo as usize, hi as usize));
            }
        }
        rows
    }

    /// Cells meeting the ball with the measure of the part counted: the exact
    /// overlap length in 1D, `h^2` for cells whose centers lie inside in 2D.
    pub fn cells_meeting_ball(&self, ball: &Ball) -> impl Iterator<Item = (usize, f64)> {
        let mut out = Vec::new();
        let h = self.h();
        if self.n == 1 {
            if let Some((lo, hi)) = self.clip_1d(ball) {
                let i0 = self.axis_index(lo).unwrap_or(0);
                let i1 = self.axis_index(hi).unwrap_or(self.samples - 1);
                for i in i0..=i1 {
                    let u = self.axis_center(i) - 0.5 * h;
                    let len = (hi.min(u + h) - lo.max(u)).max(0.0);
                    if len > 0.0 {
                        out.push((i, len));
                    }
                }
            }
        } else {
            let m = self.samples;
            for (iy, a, b) in self.rows_2d(ball) {
                for ix in a..=b {
                    out.push((iy * m + ix, h * h));
                }
            }
        }
        out.into_iter()
    }

    /// Whether `ball` leaves the domain by more than one cell.
    pub fn escapes(&self, ball: &Ball) -> bool {
        let lim = self.half_width + self.h();
        (0..self.n).any(|k| (ball.center[k] - ball.radius) < -lim || (ball.center[k] + ball.radius) > lim)
    }
}

/// Closed-form description of a grid function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Analytic {
    /// `coef |y|^exponent` on `|y| < radius`, zero outside.
    Radial { coef: f64, exponent: f64, radius: f64 },
    /// `coef` on the open ball, zero outside.
    Indicator { coef: f64, center: Point, radius: f64 },
}

impl Analytic {
    pub fn eval(&self, y: Point) -> f64 {
        match *self {
            Analytic::Radial { coef, exponent, radius } => {
                let t = y[0].hypot(y[1]);
                if t < radius {
                    coef * t.powf(exponent)
                } else {
                    0.0
                }
            }
            Analytic::Indicator { coef, center, radius } => {
                if (y[0] - center[0]).hypot(y[1] - center[1]) < radius {
                    coef
                } else {
                    0.0
                }
            }
        }
    }

    fn abs_pow(&self, p: f64) -> Self {
        match *self {
            Analytic::Radial { coef, exponent, radius } => Analytic::Radial {
                coef: coef.abs().powf(p),
                exponent: exponent * p,
                radius,
            },
            Analytic::Indicator { coef, center, radius } => Analytic::Indicator {
                coef: coef.abs().powf(p),
                center,
                radius,
            },
        }
    }

    fn scaled(&self, c: f64) -> Self {
        match *self {
            Analytic::Radial { coef, exponent, radius } => Analytic::Radial { coef: coef * c, exponent, radius },
            Analytic::Indicator { coef, center, radius } => Analytic::Indicator { coef: coef * c, center, radius },
        }
    }

    /// `g(y) = f(δ y)`.
    fn dilated(&self, delta: f64) -> Self {
        match *self {
            Analytic::Radial { coef, exponent, radius } => Analytic::Radial {
                coef: coef * delta.powf(exponent),
                exponent,
                radius: radius / delta,
            },
            Analytic::Indicator { coef, center, radius } => Analytic::Indicator {
                coef,
                center: [center[0] / delta, center[1] / delta],
                radius: radius / delta,
            },
        }
    }

    fn support_radius(&self) -> f64 {
        match *self {
            Analytic::Radial { radius, .. } => radius,
            Analytic::Indicator { center, radius, .. } => center[0].hypot(center[1]) + radius,
        }
    }

    /// `∫_u^v f(t) |t|^gamma dt` on the line.
    fn integral_1d(&self, gamma: f64, u: f64, v: f64) -> f64 {
        let (coef, g, a, b) = match *self {
            Analytic::Radial { coef, exponent, radius } => (coef, gamma + exponent, u.max(-radius), v.min(radius)),
            Analytic::Indicator { coef, center, radius } => {
                (coef, gamma, u.max(center[0] - radius), v.min(center[0] + radius))
            }
        };
        if b <= a || coef == 0.0 {
            0.0
        } else {
            coef * quad::power_interval(g, a, b)
        }
    }
}

/// Samples at cell midpoints, row-major in 2D.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<f64>,
    tag: Option<Analytic>,
}

impl GridFunction {
    pub fn from_fn(spec: &GridSpec, f: impl Fn(Point) -> f64) -> Self {
        let values = (0..spec.len()).map(|i| f(spec.cell_center(i))).collect();
        Self { spec: *spec, values, tag: None }
    }

    pub fn from_values(spec: &GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} values, got {}",
                spec.len(),
                values.len()
            )));
        }
        Ok(Self { spec: *spec, values, tag: None })
    }

    /// Samples `tag` at midpoints and keeps it for exact integration.
    pub fn from_analytic(spec: &GridSpec, tag: Analytic) -> Self {
        let mut g = Self::from_fn(spec, |y| tag.eval(y));
        g.tag = Some(tag);
        g
    }

    pub fn zeros(spec: &GridSpec) -> Self {
        Self::from_fn(spec, |_| 0.0)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tag(&self) -> Option<&Analytic> {
        self.tag.as_ref()
    }

    /// Value of the cell containing `y`.
    pub fn value_at(&self, y: Point) -> Option<f64> {
        self.spec.index_of(y).map(|i| self.values[i])
    }

    /// `|f|^p`, keeping the tag.
    pub fn abs_pow(&self, p: f64) -> Self {
        Self {
            spec: self.spec,
            values: self.values.iter().map(|v| v.abs().powf(p)).collect(),
            tag: self.tag.map(|t| t.abs_pow(p)),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            spec: self.spec,
            values: self.values.iter().map(|v| v * c).collect(),
            tag: self.tag.map(|t| t.scaled(c)),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            spec: self.spec,
            values: self.values.iter().map(|&v| f(v)).collect(),
            tag: None,
        }
    }

    /// Cells whose Lebesgue mass is infinite.
    pub fn singular_cells(&self) -> Vec<usize> {
        self.cell_masses()
            .iter()
            .enumerate()
            .filter(|(_, m)| m.is_infinite())
            .map(|(i, _)| i)
            .collect()
    }

    /// Unweighted `∫_cell f`, exact on tagged cells touching the origin.
    pub fn cell_masses(&self) -> Vec<f64> {
        let s = &self.spec;
        let h = s.h();
        let vol = h.powi(s.n as i32);
        (0..s.len())
            .map(|i| match (self.tag, s.n) {
                (Some(t), 1) => {
                    let u = s.axis_center(i) - 0.5 * h;
                    t.integral_1d(0.0, u, u + h)
                }
                (Some(Analytic::Radial { coef, exponent, radius }), _)
                    if s.touches_origin(i) && radius >= h * std::f64::consts::SQRT_2 =>
                {
                    coef * quad::power_corner_square(exponent, h)
                }
                _ => zero_safe_mul(self.values[i], vol),
            })
            .collect()
    }

    /// Radius of a ball about the origin containing the support.
    pub fn support_radius(&self) -> f64 {
        if let Some(t) = self.tag {
            return t.support_radius();
        }
        let half_diag = 0.5 * self.spec.h() * (self.spec.n as f64).sqrt();
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| {
                let c = self.spec.cell_center(i);
                c[0].hypot(c[1]) + half_diag
            })
            .fold(0.0, f64::max)
    }

    /// Columns `x[,y],value` with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.spec.n == 1 {
            w.write_record(["x", "value"])?;
        } else {
            w.write_record(["x", "y", "value"])?;
        }
        for (i, v) in self.values.iter().enumerate() {
            let c = self.spec.cell_center(i);
            if self.spec.n == 1 {
                w.write_record([c[0].to_string(), v.to_string()])?;
            } else {
                w.write_record([c[0].to_string(), c[1].to_string(), v.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format of [`GridFunction::write_csv`], recovering the grid
    /// from the coordinates.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let n = rdr.headers()?.len().saturating_sub(1);
        check_dim(n)?;
        let mut coords = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k)
                    .ok_or_else(|| Error::InvalidParameter("short CSV record".into()))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidParameter(format!("bad number in CSV: {e}")))
            };
            coords.push([parse(0)?, if n == 2 { parse(1)? } else { 0.0 }]);
            values.push(parse(n)?);
        }
        let m = if n == 1 {
            values.len()
        } else {
            (values.len() as f64).sqrt().round() as usize
        };
        if m < 2 || m.pow(n as u32) != values.len() {
            return Err(Error::InvalidParameter(format!("{} rows do not form a grid", values.len())));
        }
        let x0 = coords[0][0];
        let half_width = -x0 * m as f64 / (m as f64 - 1.0);
        let spec = GridSpec::new(n, half_width, m)?;
        let tol = 1e-9 * half_width.max(1.0);
        for (i, c) in coords.iter().enumerate() {
            let e = spec.cell_center(i);
            if (c[0] - e[0]).abs() > tol || (c[1] - e[1]).abs() > tol {
                return Err(Error::InvalidParameter(format!("row {i} is off the grid")));
            }
        }
        Self::from_values(&spec, values)
    }
}

fn zero_safe_mul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// Running sums that keep infinite terms as a separate count, so a range sum
/// is never `∞ - ∞`.
#[derive(Debug, Clone)]
pub(crate) struct Prefix {
    sum: Vec<f64>,
    inf: Vec<u32>,
}

impl Prefix {
    pub(crate) fn new(xs: impl Iterator<Item = f64>) -> Self {
        let mut sum = vec![0.0];
        let mut inf = vec![0u32];
        for x in xs {
            let (s, k) = (*sum.last().unwrap(), *inf.last().unwrap());
            if x.is_infinite() {
                sum.push(s);
                inf.push(k + 1);
            } else {
                sum.push(s + x);
                inf.push(k);
            }
        }
        Self { sum, inf }
    }

    /// Sum of terms `a..b`.
    pub(crate) fn range(&self, a: usize, b: usize) -> f64 {
        if b <= a {
            0.0
        } else if self.inf[b] > self.inf[a] {
            f64::INFINITY
        } else {
            self.sum[b] - self.sum[a]
        }
    }
}

#[derive(Debug, Clone)]
enum WeightView {
    Radial(f64),
    Sampled(GridFunction),
}

/// Result of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// The ball leaves the domain by more than one cell.
    pub truncated: bool,
}

/// A `(∫ f w, ∫ w)` pair over one piece of a ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub mass: f64,
    pub weight: f64,
}

/// Precomputed cell masses of `f w` and `w` for repeated ball queries.
///
/// In 1D every piece is the exact overlap of a cell with the ball; tagged
/// functions and power weights are integrated in closed form on each piece.
/// In 2D a cell counts when its center lies in the ball; the four cells at
/// the origin are integrated in closed form against radial powers.
#[derive(Debug, Clone)]
pub struct Quadrature {
    spec: GridSpec,
    f: GridFunction,
    weight: WeightView,
    mass_pre: Prefix,
    weight_pre: Prefix,
}

const SINGULAR_SPLITS: i32 = 60;

impl Quadrature {
    pub fn new(f: &GridFunction, w: &Weight) -> Result<Self> {
        let view = match w.sampled_values() {
            Some(g) => {
                if g.spec() != f.spec() {
                    return Err(Error::InvalidParameter("weight and function live on different grids".into()));
                }
                WeightView::Sampled(g.clone())
            }
            None => {
                if w.n() != f.spec().n() {
                    return Err(Error::InvalidParameter(format!(
                        "weight dimension {} does not match grid dimension {}",
                        w.n(),
                        f.spec().n()
                    )));
                }
                WeightView::Radial(w.radial_exponent().unwrap())
            }
        };
        Ok(Self::build(f, view))
    }

    /// Against `|x|^gamma` for any real `gamma`, integrable or not.
    pub fn with_power(f: &GridFunction, gamma: f64) -> Self {
        Self::build(f, WeightView::Radial(gamma))
    }

    fn build(f: &GridFunction, weight: WeightView) -> Self {
        let spec = *f.spec();
        let mut q = Self {
            spec,
            f: f.clone(),
            weight,
            mass_pre: Prefix::new(std::iter::empty()),
            weight_pre: Prefix::new(std::iter::empty()),
        };
        if spec.n == 1 {
            let h = spec.h();
            let edge = |i: usize| spec.axis_center(i) - 0.5 * h;
            q.mass_pre = Prefix::new((0..spec.samples).map(|i| q.piece_mass_1d(i, edge(i), edge(i) + h)));
            q.weight_pre = Prefix::new((0..spec.samples).map(|i| q.piece_weight_1d(i, edge(i), edge(i) + h)));
        } else {
            // Row prefix sums with stride m + 1 are stored as one long array
            // with a zero term between rows.
            let m = spec.samples;
            let masses: Vec<f64> = (0..spec.len()).map(|i| q.cell_mass_2d(i)).collect();
            let weights: Vec<f64> = (0..spec.len()).map(|i| q.cell_weight_2d(i)).collect();
            let with_gaps = |xs: &[f64]| -> Vec<f64> {
                let mut out = Vec::with_capacity(m * (m + 1));
                for row in xs.chunks(m) {
                    out.extend_from_slice(row);
                    out.push(0.0);
                }
                out
            };
            q.mass_pre = Prefix::new(with_gaps(&masses).into_iter());
            q.weight_pre = Prefix::new(with_gaps(&weights).into_iter());
        }
        q
    }

    fn piece_weight_1d(&self, i: usize, u: f64, v: f64) -> f64 {
        match &self.weight {
            WeightView::Radial(g) => quad::power_interval(*g, u, v),
            WeightView::Sampled(w) => zero_safe_mul(w.values[i], v - u),
        }
    }

    fn piece_mass_1d(&self, i: usize, u: f64, v: f64) -> f64 {
        match (self.f.tag, &self.weight) {
            (Some(t), WeightView::Radial(g)) => t.integral_1d(*g, u, v),
            (Some(t), WeightView::Sampled(w)) => zero_safe_mul(w.values[i], t.integral_1d(0.0, u, v)),
            (None, _) => zero_safe_mul(self.f.values[i], self.piece_weight_1d(i, u, v)),
        }
    }

    fn origin_radial(&self) -> Option<(f64, f64)> {
        match self.f.tag {
            Some(Analytic::Radial { coef, exponent, radius })
                if radius >= self.spec.h() * std::f64::consts::SQRT_2 =>
            {
                Some((coef, exponent))
            }
            _ => None,
        }
    }

    fn cell_weight_2d(&self, i: usize) -> f64 {
        let h = self.spec.h();
        match &self.weight {
            WeightView::Radial(g) => {
                if self.spec.touches_origin(i) {
                    quad::power_corner_square(*g, h)
                } else {
                    let c = self.spec.cell_center(i);
                    c[0].hypot(c[1]).powf(*g) * h * h
                }
            }
            WeightView::Sampled(w) => zero_safe_mul(w.values[i], h * h),
        }
    }

    fn cell_mass_2d(&self, i: usize) -> f64 {
        let h = self.spec.h();
        if self.spec.touches_origin(i) {
            if let Some((coef, a)) = self.origin_radial() {
                return match &self.weight {
                    WeightView::Radial(g) => zero_safe_mul(coef, quad::power_corner_square(a + *g, h)),
                    WeightView::Sampled(w) => {
                        zero_safe_mul(w.values[i], coef * quad::power_corner_square(a, h))
                    }
                };
            }
        }
        zero_safe_mul(self.f.values[i], self.cell_weight_2d(i))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    fn sum_1d(&self, ball: &Ball, pre: &Prefix, piece: impl Fn(usize, f64, f64) -> f64) -> f64 {
        let Some((lo, hi)) = self.spec.clip_1d(ball) else {
            return 0.0;
        };
        let h = self.spec.h();
        let last = self.spec.samples - 1;
        let i0 = self.spec.axis_index(lo).unwrap_or(0);
        let i1 = self.spec.axis_index(hi).unwrap_or(last).min(last);
        let edge = |i: usize| self.spec.axis_center(i) - 0.5 * h;
        if i0 == i1 {
            return piece(i0, lo, hi);
        }
        let a = piece(i0, lo, edge(i0) + h);
        let b = piece(i1, edge(i1), hi.min(edge(i1) + h));
        a + pre.range(i0 + 1, i1) + b
    }

    fn sum_2d(&self, ball: &Ball, pre: &Prefix) -> f64 {
        let stride = self.spec.samples + 1;
        self.spec
            .rows_2d(ball)
            .into_iter()
            .map(|(iy, a, b)| pre.range(iy * stride + a, iy * stride + b + 1))
            .sum()
    }

    /// `∫_B f w` over the part of `B` inside the domain.
    pub fn integral(&self, ball: &Ball) -> Integral {
        let value = if self.spec.n == 1 {
            self.sum_1d(ball, &self.mass_pre, |i, u, v| self.piece_mass_1d(i, u, v))
        } else {
            self.sum_2d(ball, &self.mass_pre)
        };
        Integral {
            value,
            truncated: self.spec.escapes(ball),
        }
    }

    /// `w(B)` over the part of `B` inside the domain; exact for origin-centered
    /// discs against radial powers in 2D.
    pub fn weight_measure(&self, ball: &Ball) -> f64 {
        if self.spec.n == 1 {
            return self.sum_1d(ball, &self.weight_pre, |i, u, v| self.piece_weight_1d(i, u, v));
        }
        if let WeightView::Radial(g) = &self.weight {
            if ball.center_norm() == 0.0 && ball.radius <= self.spec.half_width {
                return quad::power_ball(*g, ball.radius, 2);
            }
        }
        self.sum_2d(ball, &self.weight_pre)
    }

    /// The ball split into cell pieces, for level-set functionals. In 1D a
    /// tagged radial singularity at the origin is further split into
    /// geometric shells; an innermost shell of infinite mass is dropped, which
    /// keeps the result a lower bound.
    pub fn pieces(&self, ball: &Ball) -> Vec<Piece> {
        let mut out = Vec::new();
        if self.spec.n == 2 {
            let m = self.spec.samples;
            for (iy, a, b) in self.spec.rows_2d(ball) {
                for ix in a..=b {
                    let i = iy * m + ix;
                    out.push(Piece { mass: self.cell_mass_2d(i), weight: self.cell_weight_2d(i) });
                }
            }
            return out;
        }
        let singular = matches!(self.f.tag, Some(Analytic::Radial { exponent, .. }) if exponent < 0.0);
        for (i, _) in self.spec.cells_meeting_ball(ball) {
            let h = self.spec.h();
            let e = self.spec.axis_center(i) - 0.5 * h;
            let (lo, hi) = self.spec.clip_1d(ball).unwrap();
            let (u, v) = (lo.max(e), hi.min(e + h));
            if singular && (u == 0.0 || v == 0.0) {
                let far = if u == 0.0 { v } else { u };
                let mut outer = 1.0;
                for k in 1..=SINGULAR_SPLITS {
                    let inner = 2f64.powi(-k);
                    let (a, b) = ordered(far * inner, far * outer);
                    out.push(Piece {
                        mass: self.piece_mass_1d(i, a, b),
                        weight: self.piece_weight_1d(i, a, b),
                    });
                    outer = inner;
                }
                let (a, b) = ordered(0.0, far * outer);
                let rest = self.piece_mass_1d(i, a, b);
                if rest.is_finite() {
                    out.push(Piece { mass: rest, weight: self.piece_weight_1d(i, a, b) });
                }
            } else {
                out.push(Piece {
                    mass: self.piece_mass_1d(i, u, v),
                    weight: self.piece_weight_1d(i, u, v),
                });
            }
        }
        out
    }
}

fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// `∫_B f w` with a truncation flag; see [`Quadrature`] for the rule.
pub fn integrate(f: &GridFunction, w: &Weight, ball: &Ball) -> Result<Integral> {
    let q = Quadrature::new(f, w)?;
    let r = q.integral(ball);
    if r.truncated {
        log::warn!("ball {ball:?} leaves the domain; integral truncated");
    }
    Ok(r)
}

/// `(∫ |f|^q |x|^gamma)^{1/q}` over the whole domain.
pub fn lebesgue_norm_power(f: &GridFunction, gamma: f64, q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::InvalidParameter(format!("exponent must be positive, got {q}")));
    }
    let g = f.abs_pow(q);
    let quad = Quadrature::with_power(&g, gamma);
    let dom = Ball::centered(f.spec().half_width() * (f.spec().n() as f64).sqrt() * 1.01)?;
    Ok(quad.integral(&dom).value.powf(1.0 / q))
}

/// Test functions from the necessity arguments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessKind {
    CharBall { center: Point, radius: f64 },
    /// `|y|^{-n}` on the unit ball.
    SingularPower,
    /// `((w + ε)/(1 + ε))^{-(n-λ₂)/(pn-n+λ₁+λ₂)}` on the unit ball.
    DualPower { epsilon: f64 },
    /// Indicator of `B(2e₁, 1/2)`.
    OffsetBump,
}

impl WitnessKind {
    pub fn label(&self) -> String {
        match self {
            WitnessKind::CharBall { center, radius } => {
                format!("char-ball({},{};{})", center[0], center[1], radius)
            }
            WitnessKind::SingularPower => "singular-power".into(),
            WitnessKind::DualPower { epsilon } => format!("dual-power({epsilon})"),
            WitnessKind::OffsetBump => "offset-bump".into(),
        }
    }
}

/// Exponent of the dual-power witness.
pub fn dual_power_exponent(params: &MorreyParams) -> Result<f64> {
    let n = params.n as f64;
    let den = params.p * n - n + params.lambda1 + params.lambda2;
    if den == 0.0 {
        return Err(Error::Precondition("pn - n + λ₁ + λ₂ must be nonzero".into()));
    }
    Ok(-(n - params.lambda2) / den)
}

pub fn build_witness(kind: &WitnessKind, spec: &GridSpec, params: &MorreyParams, w: &Weight) -> Result<GridFunction> {
    if params.n != spec.n() {
        return Err(Error::InvalidParameter("parameter and grid dimensions differ".into()));
    }
    let fits = |r: f64| {
        if r > spec.half_width() {
            Err(Error::Domain(format!("witness support radius {r} exceeds the domain")))
        } else {
            Ok(())
        }
    };
    match *kind {
        WitnessKind::CharBall { center, radius } => {
            let tag = Analytic::Indicator { coef: 1.0, center, radius };
            fits(tag.support_radius())?;
            Ball::new(center, radius)?;
            Ok(GridFunction::from_analytic(spec, tag))
        }
        WitnessKind::SingularPower => {
            fits(1.0)?;
            let n = spec.n() as f64;
            Ok(GridFunction::from_analytic(spec, Analytic::Radial { coef: 1.0, exponent: -n, radius: 1.0 }))
        }
        WitnessKind::OffsetBump => {
            let tag = Analytic::Indicator { coef: 1.0, center: [2.0, 0.0], radius: 0.5 };
            fits(tag.support_radius())?;
            Ok(GridFunction::from_analytic(spec, tag))
        }
        WitnessKind::DualPower { epsilon } => {
            if !(epsilon >= 0.0) {
                return Err(Error::InvalidParameter(format!("ε must be >= 0, got {epsilon}")));
            }
            fits(1.0)?;
            let e = dual_power_exponent(params)?;
            let norm = (1.0 + epsilon).powf(e);
            if let (Some(beta), true) = (w.radial_exponent(), epsilon == 0.0) {
                return Ok(GridFunction::from_analytic(
                    spec,
                    Analytic::Radial { coef: 1.0, exponent: beta * e, radius: 1.0 },
                ));
            }
            let g = GridFunction::from_fn(spec, |y| {
                if y[0].hypot(y[1]) < 1.0 {
                    (w.eval(y) + epsilon).powf(e) / norm
                } else {
                    0.0
                }
            });
            if g.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Precondition("dual power is infinite where w vanishes; use ε > 0".into()));
            }
            Ok(g)
        }
    }
}

/// `g(x) = f(δx)` on the same grid.
pub fn dilate(f: &GridFunction, delta: f64) -> Result<GridFunction> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("dilation factor must be positive, got {delta}")));
    }
    let spec = f.spec;
    let reach = f.support_radius() / delta;
    if reach > spec.half_width * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("dilated support reaches {reach}, beyond the domain")));
    }
    if let Some(t) = f.tag {
        return Ok(GridFunction::from_analytic(&spec, t.dilated(delta)));
    }
    Ok(GridFunction::from_fn(&spec, |y| {
        f.value_at([y[0] * delta, y[1] * delta]).unwrap_or(0.0)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn s1() -> GridSpec {
        GridSpec::new(1, 16.0, 4096).unwrap()
    }

    fn params(p: f64, l1: f64, l2: f64, n: usize) -> MorreyParams {
        MorreyParams::new(p, l1, l2, n).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(1, 16.0, 8).is_err());
        assert!(GridSpec::new(1, 16.0, 100).is_err());
        assert!(GridSpec::new(3, 16.0, 64).is_err());
        assert!(GridSpec::new(1, 0.0, 64).is_err());
        let s = GridSpec::new(2, 1.0, 16).unwrap();
        assert_eq!(s.len(), 256);
        assert_eq!(s.h(), 0.125);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<GridSpec>(&json).unwrap(), s);
        assert!(serde_json::from_str::<GridSpec>(r#"{"n":1,"half_width":1,"samples":20}"#).is_err());
    }

    #[test]
    fn integrate_examples() {
        let s = s1();
        let one = GridFunction::from_fn(&s, |_| 1.0);
        let w1 = Weight::constant(1).unwrap();
        let b = Ball::centered(1.0).unwrap();
        assert!((integrate(&one, &w1, &b).unwrap().value - 2.0).abs() <= s.h());

        let wsq = Weight::power(0.5, 1).unwrap();
        assert_relative_eq!(integrate(&one, &wsq, &b).unwrap().value, 4.0 / 3.0, epsilon = 1e-12);

        let chi = build_witness(
            &WitnessKind::CharBall { center: [0.0, 0.0], radius: 1.0 },
            &s,
            &params(1.0, 0.0, 0.0, 1),
            &w1,
        )
        .unwrap();
        assert_eq!(integrate(&chi, &w1, &Ball::on_line(2.0, 1.0).unwrap()).unwrap().value, 0.0);
    }

    #[test]
    fn truncation_flag() {
        let s = GridSpec::new(1, 2.0, 64).unwrap();
        let one = GridFunction::from_fn(&s, |_| 1.0);
        let w = Weight::constant(1).unwrap();
        let r = integrate(&one, &w, &Ball::on_line(1.5, 2.0).unwrap()).unwrap();
        assert!(r.truncated);
        assert_relative_eq!(r.value, 2.5, epsilon = 1e-12);
        assert!(!integrate(&one, &w, &Ball::centered(1.0).unwrap()).unwrap().truncated);
    }

    #[test]
    fn witness_examples() {
        let s = s1();
        let w1 = Weight::constant(1).unwrap();
        let p = params(2.0, 0.5, 0.0, 1);
        let chi = build_witness(&WitnessKind::CharBall { center: [0.0, 0.0], radius: 1.0 }, &s, &p, &w1).unwrap();
        assert!(chi.values().iter().all(|&v| v == 0.0 || v == 1.0));

        for eps in [0.0, 0.3, 2.0] {
            let d = build_witness(&WitnessKind::DualPower { epsilon: eps }, &s, &p, &w1).unwrap();
            for (i, v) in d.values().iter().enumerate() {
                let c = s.cell_center(i)[0].abs();
                assert_relative_eq!(*v, if c < 1.0 { 1.0 } else { 0.0 }, epsilon = 1e-14);
            }
        }

        let sp = build_witness(&WitnessKind::SingularPower, &s, &p, &w1).unwrap();
        assert_eq!(sp.tag().unwrap().eval([0.25, 0.0]), 4.0);
        let v = sp.value_at([0.25 + 1e-9, 0.0]).unwrap();
        assert!((v - 4.0).abs() < 4.0 * 4.0 * s.h());

        let zero_den = params(1.0, 0.5, -0.5, 1);
        assert!(build_witness(&WitnessKind::DualPower { epsilon: 0.0 }, &s, &zero_den, &w1).is_err());
    }

    #[test]
    fn dual_power_on_power_weight_is_radial() {
        let s = s1();
        let w = Weight::power(0.5, 1).unwrap();
        let p = params(2.0, 0.5, 0.0, 1);
        let d = build_witness(&WitnessKind::DualPower { epsilon: 0.0 }, &s, &p, &w).unwrap();
        // e = -1/1.5
        match d.tag().unwrap() {
            Analytic::Radial { exponent, .. } => assert_relative_eq!(*exponent, -0.5 / 1.5, epsilon = 1e-15),
            _ => panic!("expected radial tag"),
        }
    }

    #[test]
    fn dilate_examples() {
        let s = s1();
        let w1 = Weight::constant(1).unwrap();
        let p = params(1.0, 0.0, 0.0, 1);
        let chi = build_witness(&WitnessKind::CharBall { center: [0.0, 0.0], radius: 1.0 }, &s, &p, &w1).unwrap();
        assert_eq!(dilate(&chi, 1.0).unwrap(), chi);
        let half = GridFunction::from_analytic(
            &s,
            Analytic::Indicator { coef: 1.0, center: [0.0, 0.0], radius: 0.5 },
        );
        assert_eq!(dilate(&chi, 2.0).unwrap().values(), half.values());

        let sp = build_witness(&WitnessKind::SingularPower, &s, &p, &w1).unwrap();
        let d = dilate(&sp, 2.0).unwrap();
        assert_relative_eq!(d.tag().unwrap().eval([0.25, 0.0]), 2.0, epsilon = 1e-15);
        assert!(dilate(&sp, 1.0 / 32.0).is_err());

        let untagged = chi.map(|v| v);
        assert_eq!(dilate(&untagged, 2.0).unwrap().values(), half.values());
    }

    #[test]
    fn charball_reproduces_weight_mass() {
        let s = s1();
        let w = Weight::power(-0.5, 1).unwrap();
        let p = params(1.0, 0.0, 0.0, 1);
        let chi = build_witness(&WitnessKind::CharBall { center: [0.3, 0.0], radius: 0.7 }, &s, &p, &w).unwrap();
        let b = Ball::on_line(0.0, 2.0).unwrap();
        let got = integrate(&chi, &w, &b).unwrap().value;
        assert_relative_eq!(got, quad::power_interval(-0.5, -0.4, 1.0), epsilon = 1e-12);
    }

    #[test]
    fn singular_cell_is_infinite_when_not_integrable() {
        let s = s1();
        let w = Weight::power(0.5, 1).unwrap();
        let p = params(2.0, 0.5, 0.0, 1);
        let sp = build_witness(&WitnessKind::SingularPower, &s, &p, &w).unwrap();
        let f2 = sp.abs_pow(2.0);
        // |y|^{-2} |y|^{0.5} is not integrable at 0.
        assert!(integrate(&f2, &w, &Ball::centered(0.5).unwrap()).unwrap().value.is_infinite());
        assert!(integrate(&f2, &w, &Ball::on_line(0.5, 0.1).unwrap()).unwrap().value.is_finite());
        assert_eq!(sp.singular_cells(), vec![2047, 2048]);
    }

    #[test]
    fn two_dimensional_quadrature() {
        let s = GridSpec::new(2, 4.0, 256).unwrap();
        let one = GridFunction::from_fn(&s, |_| 1.0);
        let w = Weight::constant(2).unwrap();
        let q = Quadrature::new(&one, &w).unwrap();
        let b = Ball::new([0.5, -0.3], 1.0).unwrap();
        assert_relative_eq!(q.integral(&b).value, std::f64::consts::PI, max_relative = 2e-2);
        let wb = Weight::power(-1.0, 2).unwrap();
        let q = Quadrature::new(&one, &wb).unwrap();
        let b = Ball::centered(1.0).unwrap();
        assert_relative_eq!(q.weight_measure(&b), 2.0 * std::f64::consts::PI, epsilon = 1e-12);
        assert_relative_eq!(q.integral(&b).value, 2.0 * std::f64::consts::PI, max_relative = 2e-2);
    }

    #[test]
    fn csv_round_trip() {
        for s in [GridSpec::new(1, 3.0, 32).unwrap(), GridSpec::new(2, 1.5, 16).unwrap()] {
            let f = GridFunction::from_fn(&s, |y| y[0] * 2.0 - y[1]);
            let mut buf = Vec::new();
            f.write_csv(&mut buf).unwrap();
            let g = GridFunction::read_csv(buf.as_slice()).unwrap();
            assert_eq!(g.spec(), f.spec());
            assert_eq!(g.values(), f.values());
        }
        assert!(GridFunction::read_csv("x,value\n0.1,1\n".as_bytes()).is_err());
    }

    #[test]
    fn pieces_sum_to_integral() {
        let s = s1();
        let w = Weight::power(0.3, 1).unwrap();
        let p = params(2.0, 0.5, 0.0, 1);
        let sp = build_witness(&WitnessKind::SingularPower, &s, &p, &w).unwrap().abs_pow(0.5);
        let q = Quadrature::new(&sp, &w).unwrap();
        for b in [Ball::centered(0.7).unwrap(), Ball::on_line(0.2, 0.05).unwrap()] {
            let total: f64 = q.pieces(&b).iter().map(|p| p.mass).sum();
            assert_relative_eq!(total, q.integral(&b).value, max_relative = 1e-9);
            let wt: f64 = q.pieces(&b).iter().map(|p| p.weight).sum();
            assert_relative_eq!(wt, q.weight_measure(&b), max_relative = 1e-9);
        }
    }

    #[test]
    fn lebesgue_norm_examples() {
        let s = s1();
        let chi = GridFunction::from_analytic(&s, Analytic::Indicator { coef: 1.0, center: [0.0, 0.0], radius: 1.0 });
        assert_relative_eq!(lebesgue_norm_power(&chi, 0.0, 2.0).unwrap(), 2f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(lebesgue_norm_power(&chi, 1.0, 1.0).unwrap(), 1.0, epsilon = 1e-12);
    }
}
