use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::discretize::{GridSpec, WitnessKind};
use crate::error::{Error, Result};
use crate::geometry::BallFamily;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Norm,
    MaximalRange,
    Equivalence,
    Embedding,
    Extrapolation,
    ScalingLaw,
}

impl ExperimentKind {
    pub fn label(&self) -> &'static str {
        match self {
            ExperimentKind::Norm => "norm",
            ExperimentKind::MaximalRange => "maximal-range",
            ExperimentKind::Equivalence => "equivalence",
            ExperimentKind::Embedding => "embedding",
            ExperimentKind::Extrapolation => "extrapolation",
            ExperimentKind::ScalingLaw => "scaling-law",
        }
    }
}

fn one(x: f64) -> Vec<f64> {
    vec![x]
}

fn default_p() -> Vec<f64> {
    one(2.0)
}

fn default_zero() -> Vec<f64> {
    one(0.0)
}

fn default_refinements() -> usize {
    2
}

fn default_k_min() -> u32 {
    4
}

fn default_k_max() -> u32 {
    12
}

fn default_deltas() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

/// A single JSON document describing one experiment. Parameter lists are
/// crossed in the order p, λ₁, λ₂, β, α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_p")]
    pub p: Vec<f64>,
    #[serde(default = "default_zero")]
    pub lambda1: Vec<f64>,
    #[serde(default = "default_zero")]
    pub lambda2: Vec<f64>,
    #[serde(default = "default_zero")]
    pub beta: Vec<f64>,
    #[serde(default = "default_zero")]
    pub alpha: Vec<f64>,
    /// Coarsest grid; level `j` uses `2^j` times as many cells.
    pub grid: GridSpec,
    #[serde(default)]
    pub family: BallFamily,
    /// Empty means the experiment's default witnesses.
    #[serde(default)]
    pub witnesses: Vec<WitnessKind>,
    #[serde(default = "default_refinements")]
    pub refinements: usize,
    #[serde(default = "default_k_min")]
    pub k_min: u32,
    #[serde(default = "default_k_max")]
    pub k_max: u32,
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
    /// Report path prefix; `.csv` and `.json` are appended.
    #[serde(default)]
    pub output: Option<String>,
}

/// One point of the parameter product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub p: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub beta: f64,
    pub alpha: f64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_with_overrides(text, &[])
    }

    /// Parses `text` after applying `key=value` overrides. Keys may be dotted
    /// (`grid.samples`); values are read as JSON and fall back to strings.
    pub fn from_json_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut doc: Value = serde_json::from_str(text)?;
        for (k, v) in overrides {
            set_path(&mut doc, k, v)?;
        }
        let cfg: Self = serde_json::from_value(doc)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let lists = [
            ("p", &self.p),
            ("lambda1", &self.lambda1),
            ("lambda2", &self.lambda2),
            ("beta", &self.beta),
            ("alpha", &self.alpha),
        ];
        for (name, l) in lists {
            if l.is_empty() {
                return Err(Error::InvalidParameter(format!("parameter list `{name}` is empty")));
            }
        }
        if self.refinements < 2 {
            return Err(Error::InvalidParameter("at least two refinement levels are required".into()));
        }
        if self.k_min >= self.k_max {
            return Err(Error::InvalidParameter("k_min must be below k_max".into()));
        }
        if self.experiment == ExperimentKind::ScalingLaw && self.deltas.len() < 2 {
            return Err(Error::InvalidParameter("scaling law needs at least two dilation factors".into()));
        }
        Ok(())
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &p in &self.p {
            for &lambda1 in &self.lambda1 {
                for &lambda2 in &self.lambda2 {
                    for &beta in &self.beta {
                        for &alpha in &self.alpha {
                            out.push(Cell { p, lambda1, lambda2, beta, alpha });
                        }
                    }
                }
            }
        }
        out
    }

    /// Grids from coarsest to finest.
    pub fn levels(&self) -> Vec<GridSpec> {
        let mut v = vec![self.grid];
        for _ in 1..self.refinements {
            let last = *v.last().unwrap();
            v.push(last.refined());
        }
        v
    }
}

fn set_path(doc: &mut Value, key: &str, raw: &str) -> Result<()> {
    let value = serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| Error::InvalidParameter(format!("cannot set `{key}`: `{part}` is not inside an object")))?;
        if i + 1 == parts.len() {
            obj.insert((*part).to_string(), value);
            return Ok(());
        }
        cur = obj.entry((*part).to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Err(Error::InvalidParameter("empty override key".into()))
}
