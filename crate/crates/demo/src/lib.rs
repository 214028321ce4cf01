//! Browser bindings: the sharp power-weight range, the maximal function of an
//! indicator, and the growth sequence behind a maximal-range verdict.
//!
//! Every export returns JSON (or a flat array) so the page needs no glue
//! beyond `JSON.parse`.

use morrey_core::discretize::{Analytic, GridFunction, GridSpec, WitnessKind};
use morrey_core::geometry::BallFamily;
use morrey_core::harness::{maximal_range_evidence, GrowthClass};
use morrey_core::maximal::{maximal_fast, MaximalConfig};
use morrey_core::morrey::MorreyParams;
use morrey_core::ranges::{hl_power_range, hl_power_verdict};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct RangeReport {
    lo: f64,
    /// `None` when the range is unbounded above.
    hi: Option<f64>,
    lo_closed: bool,
    verdict: String,
    binding: String,
}

#[derive(Serialize)]
struct Growth {
    witness: String,
    ks: Vec<u32>,
    input: Vec<f64>,
    output: Vec<f64>,
    input_slope: f64,
    slope: f64,
    class: &'static str,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Range of β and the verdict at `beta`, as JSON.
pub fn range_json(p: f64, lambda1: f64, lambda2: f64, n: usize, beta: f64) -> Result<String, String> {
    let mp = MorreyParams::new(p, lambda1, lambda2, n).map_err(err)?;
    let r = hl_power_range(&mp).map_err(err)?;
    let v = hl_power_verdict(&mp, beta).map_err(err)?;
    let report = RangeReport {
        lo: r.lo,
        hi: r.hi.is_finite().then_some(r.hi),
        lo_closed: r.lo_closed,
        verdict: format!("{:?}", v.verdict),
        binding: v.binding,
    };
    serde_json::to_string(&report).map_err(err)
}

/// Interleaved `[x, f(x), Mf(x), ...]` for the indicator of `(center - radius, center + radius)`.
pub fn profile(center: f64, radius: f64, half_width: f64, samples: usize) -> Result<Vec<f64>, String> {
    let spec = GridSpec::new(1, half_width, samples).map_err(err)?;
    let f = GridFunction::from_analytic(&spec, Analytic::Indicator { coef: 1.0, center: [center, 0.0], radius });
    let mf = maximal_fast(&f, &MaximalConfig::for_dim(1)).map_err(err)?;
    let mut out = Vec::with_capacity(3 * samples);
    for (i, (a, b)) in f.values().iter().zip(mf.values()).enumerate() {
        out.extend([spec.cell_center(i)[0], *a, *b]);
    }
    Ok(out)
}

fn witness(name: &str) -> Result<WitnessKind, String> {
    match name {
        "char-ball" => Ok(WitnessKind::CharBall { center: [0.0, 0.0], radius: 1.0 }),
        "offset-bump" => Ok(WitnessKind::OffsetBump),
        "singular-power" => Ok(WitnessKind::SingularPower),
        "dual-power" => Ok(WitnessKind::DualPower { epsilon: 0.0 }),
        other => Err(format!("unknown witness `{other}`")),
    }
}

/// The sequences `b_k` and `a_k` for one witness on the line, as JSON.
pub fn growth_json(p: f64, lambda1: f64, lambda2: f64, beta: f64, name: &str, samples: usize) -> Result<String, String> {
    let mp = MorreyParams::new(p, lambda1, lambda2, 1).map_err(err)?;
    let spec = GridSpec::new(1, 16.0, samples).map_err(err)?;
    let (k_min, k_max) = (4, 12);
    let wk = witness(name)?;
    let e = maximal_range_evidence(&spec, &mp, beta, &wk, &BallFamily::default(), (k_min, k_max)).map_err(err)?;
    let class = match e.class {
        GrowthClass::Bounded => "bounded",
        GrowthClass::Unbounded => "unbounded",
        GrowthClass::Unstable => "unstable",
        GrowthClass::Inadmissible => "inadmissible",
    };
    let g = Growth {
        witness: wk.label(),
        ks: (k_min..=k_max).collect(),
        input: e.input,
        output: e.output,
        input_slope: e.input_slope,
        slope: e.slope,
        class,
    };
    serde_json::to_string(&g).map_err(err)
}

#[wasm_bindgen]
pub fn power_range(p: f64, lambda1: f64, lambda2: f64, n: usize, beta: f64) -> Result<String, JsValue> {
    range_json(p, lambda1, lambda2, n, beta).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn maximal_profile(center: f64, radius: f64, half_width: f64, samples: usize) -> Result<Vec<f64>, JsValue> {
    profile(center, radius, half_width, samples).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn growth_sequence(
    p: f64,
    lambda1: f64,
    lambda2: f64,
    beta: f64,
    witness: &str,
    samples: usize,
) -> Result<String, JsValue> {
    growth_json(p, lambda1, lambda2, beta, witness, samples).map_err(|e| JsValue::from_str(&e))
}
