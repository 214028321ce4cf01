use rayon::prelude::*;
use serde::Serialize;

use super::config::{Cell, ExperimentConfig, ExperimentKind};
use super::{Agreement, ExperimentRow};
use crate::czops::{operator_norm_lower_bound, Hilbert, TruncationSpec};
use crate::discretize::{build_witness, dilate, lebesgue_norm_power, GridFunction, GridSpec, WitnessKind};
use crate::error::{Error, Result};
use crate::geometry::{type_ii_ring, Ball, BallFamily, Strategy};
use crate::maximal::{maximal_fast, MaximalConfig};
use crate::morrey::{morrey_norm, MorreyFunctional, MorreyParams, Normalization};
use crate::ranges::{
    embedding_exponents, extrapolation_region_power, hl_power_verdict, identify_space, space_is_trivial,
    Triviality, Verdict,
};
use crate::weights::Weight;

/// Slope threshold below which a sequence counts as bounded.
const BOUNDED_SLOPE: f64 = 0.05;
/// Slope threshold above which a sequence counts as growing.
const UNBOUNDED_SLOPE: f64 = 0.1;
const DOMAIN_TOL: f64 = 0.01;
const NORM_TOL: f64 = 0.05;
const BAND_TOL: f64 = 0.10;
const EMBEDDING_SLACK: f64 = 1.02;
const HILBERT_GROWTH: f64 = 0.05;
const SCALING_TOL: f64 = 0.03;

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return 0.0;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for i in 0..n {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Slope of `log₂ a_k` in `k` over the positive entries; `∞` if any entry is.
fn dyadic_slope(ks: &[u32], a: &[f64]) -> f64 {
    if a.iter().any(|v| v.is_infinite()) {
        return f64::INFINITY;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = ks
        .iter()
        .zip(a)
        .filter(|(_, v)| **v > 0.0)
        .map(|(k, v)| (*k as f64, v.log2()))
        .unzip();
    fit_slope(&xs, &ys)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthClass {
    Bounded,
    Unbounded,
    Unstable,
    /// The input sequence itself grows, so the witness says nothing.
    Inadmissible,
}

impl GrowthClass {
    fn from_slope(s: f64) -> Self {
        if s.is_infinite() || s > UNBOUNDED_SLOPE {
            GrowthClass::Unbounded
        } else if s < BOUNDED_SLOPE {
            GrowthClass::Bounded
        } else {
            GrowthClass::Unstable
        }
    }
}

/// Growth of the type-II functionals of one witness and of its maximal function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessEvidence {
    pub witness: WitnessKind,
    /// `b_k`: strong functional of `f` (p-th power) near scale `2^{-k}`.
    pub input: Vec<f64>,
    pub input_slope: f64,
    /// `a_k`: weak functional of `Mf` (p-th power) on the type-II ring at `2^{-k}`.
    pub output: Vec<f64>,
    pub slope: f64,
    pub class: GrowthClass,
}

fn inadmissible(witness: WitnessKind) -> WitnessEvidence {
    WitnessEvidence {
        witness,
        input: Vec::new(),
        input_slope: f64::NAN,
        output: Vec::new(),
        slope: f64::NAN,
        class: GrowthClass::Inadmissible,
    }
}

/// Runs one witness through M on `spec` and classifies the growth of the
/// weak functional over `k_min..=k_max`.
pub fn maximal_range_evidence(
    spec: &GridSpec,
    params: &MorreyParams,
    beta: f64,
    witness: &WitnessKind,
    family: &BallFamily,
    k_range: (u32, u32),
) -> Result<WitnessEvidence> {
    let w = Weight::power(beta, params.n)?;
    let f = match build_witness(witness, spec, params, &w) {
        Ok(f) => f,
        Err(Error::Domain(_)) | Err(Error::Precondition(_)) => return Ok(inadmissible(*witness)),
        Err(e) => return Err(e),
    };
    let ks: Vec<u32> = (k_range.0..=k_range.1).collect();
    let rings: Vec<Vec<Ball>> = ks
        .iter()
        .map(|&k| type_ii_ring(2f64.powi(-(k as i32)), family.radial_levels, spec, family.angles))
        .collect();

    let fin = MorreyFunctional::new(&f, &w, params, Normalization::RadiusPower)?;
    let p = params.p;
    let input: Vec<f64> = ks
        .iter()
        .zip(&rings)
        .map(|(&k, ring)| {
            let core = Ball { center: [0.0, 0.0], radius: 2f64.powi(-(k as i32)) };
            let (s, _) = fin.strong_sup(ring);
            let c = fin.strong(&core).unwrap_or(0.0);
            s.max(c).powf(p)
        })
        .collect();
    if input.iter().any(|v| !v.is_finite()) {
        return Ok(inadmissible(*witness));
    }
    let input_slope = if input.iter().all(|v| *v == 0.0) { 0.0 } else { dyadic_slope(&ks, &input) };
    if !(input_slope < BOUNDED_SLOPE) {
        return Ok(WitnessEvidence { input, input_slope, ..inadmissible(*witness) });
    }

    let g = maximal_fast(&f, &MaximalConfig::for_dim(params.n))?;
    let fout = MorreyFunctional::new(&g, &w, params, Normalization::MeasurePower)?;
    let output: Vec<f64> = rings.iter().map(|ring| fout.weak_sup(ring, None).0.powf(p)).collect();
    let slope = dyadic_slope(&ks, &output);
    Ok(WitnessEvidence { witness: *witness, input, input_slope, output, slope, class: GrowthClass::from_slope(slope) })
}

fn default_maximal_witnesses() -> Vec<WitnessKind> {
    vec![
        WitnessKind::CharBall { center: [0.0, 0.0], radius: 1.0 },
        WitnessKind::OffsetBump,
        WitnessKind::SingularPower,
        WitnessKind::DualPower { epsilon: 0.0 },
    ]
}

/// Twenty indicators of balls at several centers and radii.
pub fn witness_catalog() -> Vec<WitnessKind> {
    let mut v = Vec::new();
    for c in [0.0, 0.3, 1.0, 2.5, -4.0] {
        for r in [0.05, 0.2, 0.7, 1.5] {
            v.push(WitnessKind::CharBall { center: [c, 0.0], radius: r });
        }
    }
    v
}

fn witnesses_or(cfg: &ExperimentConfig, default: Vec<WitnessKind>) -> Vec<WitnessKind> {
    if cfg.witnesses.is_empty() {
        default
    } else {
        cfg.witnesses.clone()
    }
}

fn base_row(cfg: &ExperimentConfig, cell: &Cell) -> ExperimentRow {
    let levels = cfg.levels();
    ExperimentRow {
        experiment: cfg.experiment,
        n: cfg.grid.n(),
        p: cell.p,
        lambda1: cell.lambda1,
        lambda2: cell.lambda2,
        beta: cell.beta,
        alpha: cell.alpha,
        witness: String::new(),
        refinement: levels.last().map_or(cfg.grid.samples(), |g| g.samples()),
        value: f64::NAN,
        slope: f64::NAN,
        analytic_verdict: String::new(),
        citation: String::new(),
        agreement: Agreement::Unstable,
        evidence: Vec::new(),
        note: String::new(),
    }
}

fn rejected(mut row: ExperimentRow, why: impl ToString) -> ExperimentRow {
    row.agreement = Agreement::Rejected;
    row.analytic_verdict = "rejected".into();
    row.note = why.to_string();
    row
}

fn cell_params(cfg: &ExperimentConfig, cell: &Cell) -> Result<MorreyParams> {
    MorreyParams::new(cell.p, cell.lambda1, cell.lambda2, cfg.grid.n())
}

fn weight_for(cell: &Cell, n: usize) -> Result<Weight> {
    if cell.alpha == 0.0 {
        Weight::power(cell.beta, n)
    } else {
        Weight::shifted(cell.alpha, cell.beta, n)
    }
}

fn map_cells(cfg: &ExperimentConfig, f: impl Fn(&Cell) -> Result<Vec<ExperimentRow>> + Sync) -> Result<Vec<ExperimentRow>> {
    let cells = cfg.cells();
    let parts: Vec<Result<Vec<ExperimentRow>>> = cells.par_iter().map(&f).collect();
    let mut rows = Vec::new();
    for p in parts {
        rows.extend(p?);
    }
    Ok(rows)
}

fn expect_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if cfg.experiment != kind {
        return Err(Error::InvalidParameter(format!(
            "config describes a {} experiment, not {}",
            cfg.experiment.label(),
            kind.label()
        )));
    }
    Ok(())
}

/// Overall class of a cell from the evidence of all its witnesses.
fn classify_cell(ev: &[WitnessEvidence]) -> (GrowthClass, Option<usize>) {
    let admissible: Vec<usize> = (0..ev.len()).filter(|&i| ev[i].class != GrowthClass::Inadmissible).collect();
    let decisive = admissible.iter().copied().fold(None, |best: Option<usize>, i| match best {
        Some(b) if ev[b].slope >= ev[i].slope => Some(b),
        _ => Some(i),
    });
    let class = if admissible.iter().any(|&i| ev[i].class == GrowthClass::Unbounded) {
        GrowthClass::Unbounded
    } else if !admissible.is_empty() && admissible.iter().all(|&i| ev[i].class == GrowthClass::Bounded) {
        GrowthClass::Bounded
    } else {
        GrowthClass::Unstable
    };
    (class, decisive)
}

fn max_or_inf(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

fn maximal_range_cell(cfg: &ExperimentConfig, cell: &Cell) -> Result<Vec<ExperimentRow>> {
    let mut row = base_row(cfg, cell);
    let params = match cell_params(cfg, cell) {
        Ok(p) => p,
        Err(e) => return Ok(vec![rejected(row, e)]),
    };
    let rv = match hl_power_verdict(&params, cell.beta) {
        Ok(v) => v,
        Err(e) => return Ok(vec![rejected(row, e)]),
    };
    row.analytic_verdict = rv.verdict.label().into();
    row.citation = rv.citation.clone();
    if rv.verdict == Verdict::TrivialSpace {
        row.agreement = Agreement::Trivial;
        row.note = rv.binding;
        return Ok(vec![row]);
    }
    let witnesses = witnesses_or(cfg, default_maximal_witnesses());
    let k_range = (cfg.k_min, cfg.k_max);
    let mut per_level = Vec::new();
    for spec in cfg.levels() {
        let ev = witnesses
            .iter()
            .map(|wk| maximal_range_evidence(&spec, &params, cell.beta, wk, &cfg.family, k_range))
            .collect::<Result<Vec<_>>>()?;
        per_level.push((spec, ev));
    }
    let classes: Vec<(GrowthClass, Option<usize>)> = per_level.iter().map(|(_, ev)| classify_cell(ev)).collect();
    row.evidence = per_level
        .iter()
        .zip(&classes)
        .map(|((_, ev), (_, d))| d.map_or(f64::NAN, |i| ev[i].slope))
        .collect();
    let (top_spec, top_ev) = per_level.last().unwrap();
    let (class, decisive) = *classes.last().unwrap();
    let prev_class = classes[classes.len() - 2].0;
    let mut notes = Vec::new();
    if let Some(i) = decisive {
        let e = &top_ev[i];
        row.witness = e.witness.label();
        row.slope = e.slope;
        row.value = *e.output.last().unwrap_or(&f64::NAN);
        let wide = maximal_range_evidence(&top_spec.widened(), &params, cell.beta, &e.witness, &cfg.family, k_range)?;
        let (a, b) = (max_or_inf(&e.output), max_or_inf(&wide.output));
        let sensitive = if a.is_infinite() || b.is_infinite() {
            a != b
        } else {
            (a - b).abs() > DOMAIN_TOL * a.abs().max(b.abs())
        };
        if sensitive {
            notes.push("domain-sensitive".to_string());
        }
    } else {
        notes.push("no admissible witness".to_string());
    }
    notes.push(format!("numeric={}", class_label(class)));

    let expected = match rv.verdict {
        v if v.is_bounded() => Some(GrowthClass::Bounded),
        Verdict::Unbounded | Verdict::Boundary { included: false } => Some(GrowthClass::Unbounded),
        _ => None,
    };
    row.agreement = if expected.is_none() {
        notes.push("outside theory".into());
        Agreement::Unstable
    } else if class != prev_class {
        notes.push("classification changed under refinement".into());
        Agreement::Unstable
    } else if class == GrowthClass::Unstable
        || notes.iter().any(|n| n == "domain-sensitive" || n == "no admissible witness")
    {
        Agreement::Unstable
    } else if Some(class) == expected {
        Agreement::Agree
    } else {
        Agreement::Disagree
    };
    row.note = notes.join("; ");
    Ok(vec![row])
}

fn class_label(c: GrowthClass) -> &'static str {
    match c {
        GrowthClass::Bounded => "bounded",
        GrowthClass::Unbounded => "unbounded",
        GrowthClass::Unstable => "unstable",
        GrowthClass::Inadmissible => "inadmissible",
    }
}

pub fn run_maximal_range_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    expect_kind(cfg, ExperimentKind::MaximalRange)?;
    map_cells(cfg, |c| maximal_range_cell(cfg, c))
}

fn triviality_label(t: Triviality) -> &'static str {
    match t {
        Triviality::Trivial => "trivial",
        Triviality::LInfinity => "l-infinity",
        Triviality::Degenerate => "degenerate",
        Triviality::NonTrivial => "non-trivial",
    }
}

fn stable_pair(a: f64, b: f64, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        a == b
    } else {
        (a - b).abs() <= tol * a.abs().max(b.abs())
    }
}

fn norm_cell(cfg: &ExperimentConfig, cell: &Cell) -> Result<Vec<ExperimentRow>> {
    let base = {
        let mut r = base_row(cfg, cell);
        r.citation = "morrey-norm".into();
        r
    };
    let (params, w) = match cell_params(cfg, cell).and_then(|p| Ok((p, weight_for(cell, p.n)?))) {
        Ok(x) => x,
        Err(e) => return Ok(vec![rejected(base, e)]),
    };
    let triv = match space_is_trivial(&params, cell.beta + cell.alpha) {
        Ok(t) => t,
        Err(e) => return Ok(vec![rejected(base, e)]),
    };
    let witnesses = witnesses_or(cfg, witness_catalog());
    let mut rows = Vec::new();
    for wk in &witnesses {
        let mut row = base.clone();
        row.witness = wk.label();
        row.analytic_verdict = triviality_label(triv).into();
        if triv == Triviality::Trivial {
            row.agreement = Agreement::Trivial;
            rows.push(row);
            continue;
        }
        let mut vals = Vec::new();
        let mut failed = None;
        for spec in cfg.levels() {
            match build_witness(wk, &spec, &params, &w) {
                Ok(f) => vals.push(morrey_norm(&f, &w, &params, &cfg.family, Normalization::RadiusPower)?.value),
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failed {
            rows.push(rejected(row, e));
            continue;
        }
        let (a, b) = (vals[vals.len() - 2], vals[vals.len() - 1]);
        row.value = b;
        row.agreement = if stable_pair(a, b, NORM_TOL) { Agreement::Agree } else { Agreement::Unstable };
        row.evidence = vals;
        rows.push(row);
    }
    Ok(rows)
}

pub fn run_norm_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    expect_kind(cfg, ExperimentKind::Norm)?;
    map_cells(cfg, |c| norm_cell(cfg, c))
}

fn equivalence_cell(cfg: &ExperimentConfig, cell: &Cell) -> Result<Vec<ExperimentRow>> {
    let mut row = base_row(cfg, cell);
    row.citation = "space-identification".into();
    row.witness = "catalog".into();
    let params = match cell_params(cfg, cell) {
        Ok(p) => p,
        Err(e) => return Ok(vec![rejected(row, e)]),
    };
    let (target, beta2) = match identify_space(&params, cell.beta) {
        Ok(x) => x,
        Err(e) => return Ok(vec![rejected(row, e)]),
    };
    row.analytic_verdict = "equivalent".into();
    let w1 = Weight::power(cell.beta, params.n)?;
    let w2 = Weight::power(beta2, params.n)?;
    let witnesses = witnesses_or(cfg, witness_catalog());
    let mut bands = Vec::new();
    for spec in cfg.levels() {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for wk in &witnesses {
            let Ok(f) = build_witness(wk, &spec, &params, &w1) else { continue };
            let a = morrey_norm(&f, &w1, &params, &cfg.family, Normalization::RadiusPower)?.value;
            let b = morrey_norm(&f, &w2, &target, &cfg.family, Normalization::RadiusPower)?.value;
            let r = a / b;
            if r.is_finite() && r > 0.0 {
                lo = lo.min(r);
                hi = hi.max(r);
            } else if a.is_infinite() != b.is_infinite() {
                hi = f64::INFINITY;
            }
        }
        bands.push(if hi > 0.0 && lo.is_finite() { hi / lo } else { f64::INFINITY });
    }
    let (a, b) = (bands[bands.len() - 2], bands[bands.len() - 1]);
    row.value = b;
    row.evidence = bands;
    row.agreement = if b.is_infinite() {
        row.note = "infinite ratio band".into();
        Agreement::Disagree
    } else if (b / a - 1.0).abs() < BAND_TOL {
        Agreement::Agree
    } else {
        row.note = "band moved under refinement".into();
        Agreement::Unstable
    };
    Ok(vec![row])
}

pub fn run_equivalence_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    expect_kind(cfg, ExperimentKind::Equivalence)?;
    map_cells(cfg, |c| equivalence_cell(cfg, c))
}

fn embedding_cell(cfg: &ExperimentConfig, cell: &Cell) -> Result<Vec<ExperimentRow>> {
    let mut row = base_row(cfg, cell);
    row.citation = "embedding".into();
    row.witness = "catalog".into();
    let params = match cell_params(cfg, cell) {
        Ok(p) => p,
        Err(e) => return Ok(vec![rejected(row, e)]),
    };
    let (q, s) = match embedding_exponents(&params) {
        Ok(x) => x,
        Err(e) => return Ok(vec![rejected(row, e)]),
    };
    let w = match Weight::power(cell.beta, params.n) {
        Ok(w) => w,
        Err(e) => return Ok(vec![rejected(row, e)]),
    };
    row.analytic_verdict = "bounded-by-one".into();
    let mut witnesses = witnesses_or(cfg, witness_catalog());
    if cfg.witnesses.is_empty() {
        witnesses.extend(default_maximal_witnesses());
    }
    let mut worst = Vec::new();
    for spec in cfg.levels() {
        let mut m = 0.0f64;
        for wk in &witnesses {
            let Ok(f) = build_witness(wk, &spec, &params, &w) else { continue };
            let lhs = morrey_norm(&f, &w, &params, &cfg.family, Normalization::MeasurePower)?.value;
            let rhs = lebesgue_norm_power(&f, cell.beta * s, q)?;
            if lhs == 0.0 || !rhs.is_finite() {
                continue;
            }
            m = m.max(lhs / rhs);
        }
        worst.push(m);
    }
    let top = worst.iter().copied().fold(0.0, f64::max);
    row.value = *worst.last().unwrap();
    row.evidence = worst;
    row.agreement = if top <= EMBEDDING_SLACK { Agreement::Agree } else { Agreement::Disagree };
    Ok(vec![row])
}

pub fn run_embedding_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    expect_kind(cfg, ExperimentKind::Embedding)?;
    map_cells(cfg, |c| embedding_cell(cfg, c))
}

fn hilbert_catalog() -> Vec<WitnessKind> {
    [(0.3, 0.15), (-0.7, 0.35), (1.3, 0.6), (0.1, 0.05), (-2.2, 1.1), (0.0, 0.9)]
        .into_iter()
        .map(|(c, r)| WitnessKind::CharBall { center: [c, 0.0], radius: r })
        .collect()
}

fn extrapolation_cell(cfg: &ExperimentConfig, cell: &Cell) -> Result<Vec<ExperimentRow>> {
    let mut row = base_row(cfg, cell);
    row.citation = "extrapolation-power".into();
    row.witness = "hilbert-catalog".into();
    if cfg.grid.n() != 1 {
        return Ok(vec![rejected(row, Error::Dimension(cfg.grid.n()))]);
    }
    let params = match cell_params(cfg, cell) {
        Ok(p) => p,
        Err(e) => return Ok(vec![rejected(row, e)]),
    };
    let inside = match extrapolation_region_power(cell.p, cell.beta, (cell.lambda1, cell.lambda2), params.n) {
        Ok(b) => b,
        Err(e) => return Ok(vec![rejected(row, e)]),
    };
    row.analytic_verdict = if inside { "bounded" } else { "outside-region" }.into();
    let w = Weight::power(cell.beta, params.n)?;
    let op = Hilbert(TruncationSpec::default());
    let witnesses = witnesses_or(cfg, hilbert_catalog());
    let mut bounds = Vec::new();
    for spec in cfg.levels() {
        let catalog: Vec<GridFunction> =
            witnesses.iter().filter_map(|wk| build_witness(wk, &spec, &params, &w).ok()).collect();
        bounds.push(operator_norm_lower_bound(&op, &w, &params, &cfg.family, &catalog)?);
    }
    let growth: Vec<f64> = bounds.windows(2).map(|p| p[1] / p[0] - 1.0).collect();
    let worst = growth.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    row.value = *bounds.last().unwrap();
    row.slope = worst;
    row.evidence = bounds;
    row.agreement = if !inside {
        row.note = "exploratory".into();
        Agreement::Unstable
    } else if worst < HILBERT_GROWTH {
        Agreement::Agree
    } else {
        Agreement::Disagree
    };
    Ok(vec![row])
}

pub fn run_extrapolation_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    expect_kind(cfg, ExperimentKind::Extrapolation)?;
    map_cells(cfg, |c| extrapolation_cell(cfg, c))
}

fn scaling_cell(cfg: &ExperimentConfig, cell: &Cell) -> Result<Vec<ExperimentRow>> {
    let base = {
        let mut r = base_row(cfg, cell);
        r.citation = "dilation-law".into();
        r
    };
    let (params, w) = match cell_params(cfg, cell).and_then(|p| Ok((p, Weight::power(cell.beta, p.n)?))) {
        Ok(x) => x,
        Err(e) => return Ok(vec![rejected(base, e)]),
    };
    let triv = match space_is_trivial(&params, cell.beta) {
        Ok(t) => t,
        Err(e) => return Ok(vec![rejected(base, e)]),
    };
    let n = params.n as f64;
    let expected = (params.effective_lambda(cell.beta) - (n + cell.beta)) / params.p;
    let witnesses = witnesses_or(cfg, vec![WitnessKind::CharBall { center: [0.0, 0.0], radius: 1.0 }]);
    let ln_d: Vec<f64> = cfg.deltas.iter().map(|d| d.ln()).collect();
    let mut rows = Vec::new();
    'witness: for wk in &witnesses {
        let mut row = base.clone();
        row.witness = wk.label();
        row.analytic_verdict = format!("exponent={expected}");
        if triv == Triviality::Trivial {
            row.agreement = Agreement::Trivial;
            rows.push(row);
            continue;
        }
        let mut fits = Vec::new();
        for spec in cfg.levels() {
            let f = match build_witness(wk, &spec, &params, &w) {
                Ok(f) => f,
                Err(e) => {
                    rows.push(rejected(row, e));
                    continue 'witness;
                }
            };
            let mut ln_n = Vec::new();
            for &d in &cfg.deltas {
                let g = match dilate(&f, d) {
                    Ok(g) => g,
                    Err(e) => {
                        rows.push(rejected(row, e));
                        continue 'witness;
                    }
                };
                ln_n.push(morrey_norm(&g, &w, &params, &cfg.family, Normalization::RadiusPower)?.value.ln());
            }
            fits.push(fit_slope(&ln_d, &ln_n));
        }
        let fit = *fits.last().unwrap();
        row.value = fit;
        row.slope = fit;
        row.evidence = fits;
        row.agreement = if (fit - expected).abs() <= SCALING_TOL * expected.abs() + 1e-9 {
            Agreement::Agree
        } else if fit.is_finite() {
            Agreement::Disagree
        } else {
            row.note = "non-finite norm".into();
            Agreement::Unstable
        };
        rows.push(row);
    }
    Ok(rows)
}

pub fn run_scaling_law_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    expect_kind(cfg, ExperimentKind::ScalingLaw)?;
    map_cells(cfg, |c| scaling_cell(cfg, c))
}

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    match cfg.experiment {
        ExperimentKind::Norm => run_norm_experiment(cfg),
        ExperimentKind::MaximalRange => run_maximal_range_experiment(cfg),
        ExperimentKind::Equivalence => run_equivalence_experiment(cfg),
        ExperimentKind::Embedding => run_embedding_experiment(cfg),
        ExperimentKind::Extrapolation => run_extrapolation_experiment(cfg),
        ExperimentKind::ScalingLaw => run_scaling_law_experiment(cfg),
    }
}

/// Norm over all balls divided by the norm over type-II balls only.
pub fn reduction_ratio(f: &GridFunction, w: &Weight, params: &MorreyParams, family: &BallFamily) -> Result<f64> {
    let all = morrey_norm(f, w, params, &family.with_strategy(Strategy::All), Normalization::RadiusPower)?.value;
    let two = morrey_norm(f, w, params, &family.with_strategy(Strategy::TypeIIOnly), Normalization::RadiusPower)?.value;
    if two == 0.0 {
        return Err(Error::Precondition("type-II norm vanishes".into()));
    }
    Ok(all / two)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        assert!((fit_slope(&xs, &ys) + 0.5).abs() < 1e-14);
        assert_eq!(fit_slope(&[1.0], &[2.0]), 0.0);
    }

    #[test]
    fn growth_classes() {
        assert_eq!(GrowthClass::from_slope(0.0), GrowthClass::Bounded);
        assert_eq!(GrowthClass::from_slope(-1.0), GrowthClass::Bounded);
        assert_eq!(GrowthClass::from_slope(0.07), GrowthClass::Unstable);
        assert_eq!(GrowthClass::from_slope(0.25), GrowthClass::Unbounded);
        assert_eq!(GrowthClass::from_slope(f64::INFINITY), GrowthClass::Unbounded);
    }

    #[test]
    fn catalog_has_twenty_entries() {
        assert_eq!(witness_catalog().len(), 20);
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let cfg = ExperimentConfig::from_json(
            r#"{"experiment": "norm", "grid": {"n": 1, "half_width": 16, "samples": 256}}"#,
        )
        .unwrap();
        assert!(run_scaling_law_experiment(&cfg).is_err());
        assert!(!run(&cfg).unwrap().is_empty());
    }
}
