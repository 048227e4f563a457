//! Two-parameter sweeps and the SU(1,1) regime classifier.

use super::{run_model, Family, ModelSpec, RunOptions};
use crate::error::{KrylovError, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const MAX_SWEEP_CELLS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Oscillatory,
    Quadratic,
    Exponential,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Oscillatory => "oscillatory",
            Regime::Quadratic => "quadratic",
            Regime::Exponential => "exponential",
        }
    }
}

/// Two-mode pumping regime from the pump strength g and detuning w0 - w.
/// The boundary g = |delta| is matched to 1e-12 relative.
pub fn classify_regime(g: f64, delta: f64) -> Result<Regime> {
    if !(g >= 0.0) || !delta.is_finite() || !g.is_finite() {
        return Err(KrylovError::Domain(format!(
            "regime needs finite g >= 0 (got g = {g}, delta = {delta})"
        )));
    }
    let d = delta.abs();
    if (g - d).abs() <= 1e-12 * g.max(d) {
        Ok(Regime::Quadratic)
    } else if g < d {
        Ok(Regime::Oscillatory)
    } else {
        Ok(Regime::Exponential)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeMap {
    pub g: Vec<f64>,
    pub delta: Vec<f64>,
    /// Row-major: labels[i * delta.len() + j] belongs to (g[i], delta[j]).
    pub labels: Vec<Regime>,
}

impl RegimeMap {
    pub fn at(&self, i: usize, j: usize) -> Regime {
        self.labels[i * self.delta.len() + j]
    }
}

pub fn regime_map(g: &[f64], delta: &[f64]) -> Result<RegimeMap> {
    if g.len().saturating_mul(delta.len()) > MAX_SWEEP_CELLS {
        return Err(KrylovError::Domain(
            "regime map larger than 10^6 cells".into(),
        ));
    }
    let mut labels = Vec::with_capacity(g.len() * delta.len());
    for &gi in g {
        for &dj in delta {
            labels.push(classify_regime(gi, dj)?);
        }
    }
    Ok(RegimeMap {
        g: g.to_vec(),
        delta: delta.to_vec(),
        labels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Summary {
    /// Largest C on the grid.
    CMax,
    /// C at the last grid point.
    CSaturation,
}

impl std::str::FromStr for Summary {
    type Err = KrylovError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c-max" | "cmax" => Ok(Summary::CMax),
            "c-saturation" | "csat" => Ok(Summary::CSaturation),
            _ => Err(KrylovError::InvalidSpec(format!("unknown summary '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub param: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub x: f64,
    pub y: f64,
    pub value: Option<f64>,
    pub regime: Option<Regime>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub x: SweepAxis,
    pub y: SweepAxis,
    pub summary: Summary,
    /// Row-major over (x, y).
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.error.is_some()).count()
    }
}

/// Evaluate a summary statistic on every (x, y) cell. Cells run in
/// parallel; per-cell errors are recorded and do not stop the sweep.
pub fn sweep(
    base: &ModelSpec,
    x: &SweepAxis,
    y: &SweepAxis,
    t_grid: &[f64],
    opts: &RunOptions,
    summary: Summary,
) -> Result<SweepResult> {
    let n = x.values.len().saturating_mul(y.values.len());
    if n == 0 || n > MAX_SWEEP_CELLS {
        return Err(KrylovError::Domain(format!(
            "sweep needs 1..=10^6 cells, got {n}"
        )));
    }
    if x.param == y.param {
        return Err(KrylovError::InvalidSpec("sweep axes must differ".into()));
    }
    let pair = [x.param.as_str(), y.param.as_str()];
    if pair.contains(&"omega") && pair.contains(&"delta") {
        return Err(KrylovError::InvalidSpec(
            "omega and delta are not independent sweep axes".into(),
        ));
    }
    let coords: Vec<(f64, f64)> = x
        .values
        .iter()
        .flat_map(|&a| y.values.iter().map(move |&b| (a, b)))
        .collect();
    let cells = coords
        .par_iter()
        .map(|&(a, b)| {
            let mut spec = base.clone();
            for (k, v) in [(&x.param, a), (&y.param, b)] {
                // omega takes precedence over delta, so a swept detuning
                // must not be shadowed by a fixed drive frequency
                match k.as_str() {
                    "delta" => spec.params.remove("omega"),
                    "omega" => spec.params.remove("delta"),
                    _ => None,
                };
                spec.params.insert(k.clone(), v);
            }
            let regime = if spec.family == Family::Su11TwoMode {
                su11_regime(&spec)
            } else {
                None
            };
            match run_model(&spec, t_grid, opts) {
                Ok(tr) => {
                    let v = match summary {
                        Summary::CMax => tr.c.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                        Summary::CSaturation => *tr.c.last().unwrap_or(&f64::NAN),
                    };
                    SweepCell {
                        x: a,
                        y: b,
                        value: Some(v),
                        regime,
                        error: None,
                    }
                }
                Err(e) => SweepCell {
                    x: a,
                    y: b,
                    value: None,
                    regime,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(SweepResult {
        x: x.clone(),
        y: y.clone(),
        summary,
        cells,
    })
}

fn su11_regime(spec: &ModelSpec) -> Option<Regime> {
    let g = spec.get("g").ok()?;
    let d = spec.get("omega0").ok()? - spec.omega().ok()?;
    let d = if spec.params.contains_key("delta") && !spec.params.contains_key("omega") {
        spec.params["delta"]
    } else {
        d
    };
    classify_regime(g, d).ok()
}
