//! Hardy-Littlewood maximal operator on grid functions.
//!
//! 1D: uncentered windows of `2^j` cells that contain the point.
//! 2D: centered squares of half-width `0, 1, 2, 4, ...` cells.
//! Windows stay inside the domain; mass outside counts as zero. Cell masses
//! come from [`GridFunction::cell_masses`], so tagged singular cells can be
//! infinite, and infinite terms are counted apart from finite ones.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::discretize::{GridFunction, GridSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    UncenteredInterval,
    CenteredSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalConfig {
    pub flavor: Flavor,
}

impl MaximalConfig {
    pub fn for_dim(n: usize) -> Self {
        Self {
            flavor: if n == 1 { Flavor::UncenteredInterval } else { Flavor::CenteredSquare },
        }
    }

    fn check(&self, f: &GridFunction) -> Result<()> {
        let want = Self::for_dim(f.spec().n()).flavor;
        if self.flavor != want {
            return Err(Error::InvalidParameter(format!(
                "{:?} does not apply in dimension {}",
                self.flavor,
                f.spec().n()
            )));
        }
        if let Some(v) = f.values().iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("maximal operator needs f >= 0, found {v}")));
        }
        Ok(())
    }
}

/// Window lengths in cells, `1, 2, 4, ..., m`.
fn lengths(m: usize) -> impl Iterator<Item = usize> {
    (0..=m.trailing_zeros()).map(|j| 1usize << j)
}

/// Square half-widths in cells, `0, 1, 2, 4, ...` up to `m`.
fn half_widths(m: usize) -> Vec<usize> {
    let mut v = vec![0];
    let mut k = 1;
    while k <= m {
        v.push(k);
        k *= 2;
    }
    v
}

/// Error-free transformation: `a + b = s + e` exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Compensated finite sum plus a count of infinite terms.
#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    hi: f64,
    lo: f64,
    inf: i64,
}

impl Acc {
    fn add(&mut self, x: f64) {
        if x.is_infinite() {
            self.inf += 1;
        } else {
            let (s, e) = two_sum(self.hi, x);
            self.hi = s;
            self.lo += e;
        }
    }

    /// `Σ sign_i · t_i`, accumulated without cancellation loss.
    fn combine(terms: &[(f64, Acc)]) -> Acc {
        let mut out = Acc::default();
        for &(sign, t) in terms {
            let (s, e) = two_sum(out.hi, sign * t.hi);
            out.hi = s;
            out.lo += e + sign * t.lo;
            out.inf += sign as i64 * t.inf;
        }
        out
    }

    fn value(&self) -> f64 {
        if self.inf > 0 {
            f64::INFINITY
        } else {
            self.hi + self.lo
        }
    }
}

/// Direct evaluation: every window is summed term by term.
pub fn maximal_brute(f: &GridFunction, cfg: &MaximalConfig) -> Result<GridFunction> {
    cfg.check(f)?;
    let spec = *f.spec();
    let masses = f.cell_masses();
    let m = spec.samples();
    let h = spec.h();
    let values: Vec<f64> = if spec.n() == 1 {
        (0..m)
            .into_par_iter()
            .map(|i| {
                let mut best = 0.0f64;
                for len in lengths(m) {
                    let lo = i.saturating_sub(len - 1);
                    let hi = i.min(m - len);
                    for s in lo..=hi {
                        let mut acc = Acc::default();
                        for &x in &masses[s..s + len] {
                            acc.add(x);
                        }
                        best = best.max(acc.value() / (len as f64 * h));
                    }
                }
                best
            })
            .collect()
    } else {
        let ks = half_widths(m);
        (0..m * m)
            .into_par_iter()
            .map(|idx| {
                let (ix, iy) = (idx % m, idx / m);
                let mut best = 0.0f64;
                for &k in &ks {
                    let mut acc = Acc::default();
                    for y in iy.saturating_sub(k)..=(iy + k).min(m - 1) {
                        for x in ix.saturating_sub(k)..=(ix + k).min(m - 1) {
                            acc.add(masses[y * m + x]);
                        }
                    }
                    let side = (2 * k + 1) as f64 * h;
                    best = best.max(acc.value() / (side * side));
                }
                best
            })
            .collect()
    };
    GridFunction::from_values(&spec, values)
}

/// Prefix sums with a sliding-window maximum (1D) or a summed-area table (2D).
pub fn maximal_fast(f: &GridFunction, cfg: &MaximalConfig) -> Result<GridFunction> {
    cfg.check(f)?;
    let spec = *f.spec();
    let masses = f.cell_masses();
    let values = if spec.n() == 1 { fast_1d(&spec, &masses) } else { fast_2d(&spec, &masses) };
    GridFunction::from_values(&spec, values)
}

fn fast_1d(spec: &GridSpec, masses: &[f64]) -> Vec<f64> {
    let m = spec.samples();
    let h = spec.h();
    let mut pre = vec![Acc::default(); m + 1];
    for (i, &x) in masses.iter().enumerate() {
        pre[i + 1] = pre[i];
        pre[i + 1].add(x);
    }
    let window = |s: usize, len: usize| Acc::combine(&[(1.0, pre[s + len]), (-1.0, pre[s])]).value();
    let mut out = vec![0.0f64; m];
    for len in lengths(m) {
        let avg: Vec<f64> = (0..=m - len).map(|s| window(s, len) / (len as f64 * h)).collect();
        // Starts admissible for point i form [i+1-len, i] ∩ [0, m-len]; both
        // ends move right with i, so a monotone deque gives each maximum.
        let mut dq: VecDeque<usize> = VecDeque::new();
        let mut next = 0usize;
        for (i, o) in out.iter_mut().enumerate() {
            let hi = i.min(m - len);
            let lo = (i + 1).saturating_sub(len);
            while next <= hi {
                while dq.back().is_some_and(|&b| avg[b] <= avg[next]) {
                    dq.pop_back();
                }
                dq.push_back(next);
                next += 1;
            }
            while dq.front().is_some_and(|&fr| fr < lo) {
                dq.pop_front();
            }
            if let Some(&fr) = dq.front() {
                *o = o.max(avg[fr]);
            }
        }
    }
    out
}

fn fast_2d(spec: &GridSpec, masses: &[f64]) -> Vec<f64> {
    let m = spec.samples();
    let h = spec.h();
    let w = m + 1;
    let mut sat = vec![Acc::default(); w * w];
    for y in 0..m {
        let mut row = Acc::default();
        for x in 0..m {
            row.add(masses[y * m + x]);
            sat[(y + 1) * w + x + 1] = Acc::combine(&[(1.0, row), (1.0, sat[y * w + x + 1])]);
        }
    }
    let rect = |x0: usize, y0: usize, x1: usize, y1: usize| {
        // cells x0..x1, y0..y1 exclusive
        Acc::combine(&[
            (1.0, sat[y1 * w + x1]),
            (-1.0, sat[y0 * w + x1]),
            (-1.0, sat[y1 * w + x0]),
            (1.0, sat[y0 * w + x0]),
        ])
        .value()
    };
    let ks = half_widths(m);
    (0..m * m)
        .into_par_iter()
        .map(|idx| {
            let (ix, iy) = (idx % m, idx / m);
            let mut best = 0.0f64;
            for &k in &ks {
                let s = rect(
                    ix.saturating_sub(k),
                    iy.saturating_sub(k),
                    (ix + k + 1).min(m),
                    (iy + k + 1).min(m),
                );
                let side = (2 * k + 1) as f64 * h;
                best = best.max(s / (side * side));
            }
            best
        })
        .collect()
}

/// `(Mh)^{1/s}`, an A_1 weight with constant depending only on `s`.
pub fn a1_from_maximal(h: &GridFunction, s: f64) -> Result<GridFunction> {
    if !(s > 1.0) {
        return Err(Error::InvalidParameter(format!("s must exceed 1, got {s}")));
    }
    if h.values().iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidParameter("h vanishes identically".into()));
    }
    let mh = maximal_fast(h, &MaximalConfig::for_dim(h.spec().n()))?;
    Ok(mh.map(|v| v.powf(1.0 / s)))
}
