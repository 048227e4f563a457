//! Model catalogue: parameters to Gauss trajectories to spread complexity.
//!
//! Every family has a closed-form route and a numeric route. The numeric
//! route integrates the propagator in a faithful low-dimensional
//! representation (2x2 for SU(2) and SU(1,1), 3x3 for h(1)) and decomposes
//! it, except for the quench and SU(3) models, which evolve the state
//! directly (truncated k = 1/4 Fock space and the 3x3 atom respectively).

mod sweep;

pub use sweep::{
    classify_regime, regime_map, sweep, Regime, RegimeMap, Summary, SweepAxis, SweepCell,
    SweepResult,
};

use crate::algebra::{build_su11, CMat, Group};
use crate::error::{KrylovError, Result};
use crate::evolution::{
    h1_driven, h1_driven_numeric, kicked_product, point_from_matrix, quench_coefficients,
    su11_driven, su11_driven_numeric, su2_damped, su2_driven, su2_driven_numeric, su2_kicked,
    su2_static, GaussCoefficients, GaussPoint, ProjectivePair,
};
use crate::lanczos::{default_breakdown_tol, tridiagonalize};
use crate::linalg::{spectral, CVec};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Predicted complexity above which exponential SU(1,1) runs are refused.
pub const SU11_COMPLEXITY_CAP: f64 = 1e8;
/// Tail mass allowed in the top levels of a truncated state.
pub const TAIL_THRESHOLD: f64 = 1e-10;
pub const MIN_TRUNCATION: usize = 32;
pub const MAX_TRUNCATION: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Su2Static,
    Su2Driven,
    Su2Damped,
    Su2Kicked,
    H1Driven,
    Su11TwoMode,
    Quench,
    Su3VConfig,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Su2Static,
        Family::Su2Driven,
        Family::Su2Damped,
        Family::Su2Kicked,
        Family::H1Driven,
        Family::Su11TwoMode,
        Family::Quench,
        Family::Su3VConfig,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Su2Static => "su2-static",
            Family::Su2Driven => "su2-driven",
            Family::Su2Damped => "su2-damped",
            Family::Su2Kicked => "su2-kicked",
            Family::H1Driven => "h1",
            Family::Su11TwoMode => "su11",
            Family::Quench => "quench",
            Family::Su3VConfig => "su3",
        }
    }

    pub fn group(self) -> Group {
        match self {
            Family::Su2Static | Family::Su2Driven | Family::Su2Damped | Family::Su2Kicked => {
                Group::SU2
            }
            Family::H1Driven => Group::H1,
            Family::Su11TwoMode | Family::Quench => Group::SU11,
            Family::Su3VConfig => Group::SU3,
        }
    }

    fn required(self) -> &'static [&'static str] {
        match self {
            Family::Su2Static => &["j", "alpha", "gamma"],
            Family::Su2Driven => &["j", "omega0", "b0"],
            Family::Su2Damped => &["j", "omega0", "b0", "eta"],
            Family::Su2Kicked => &["j", "omega0", "T", "chi"],
            Family::H1Driven => &["omega0", "f0"],
            Family::Su11TwoMode => &["omega0", "g"],
            Family::Quench => &["omega0", "eta0", "tau"],
            Family::Su3VConfig => &["omega", "g1", "g2"],
        }
    }

    fn needs_drive_frequency(self) -> bool {
        matches!(
            self,
            Family::Su2Driven | Family::Su2Damped | Family::H1Driven | Family::Su11TwoMode
        )
    }

    fn infinite(self) -> bool {
        matches!(
            self,
            Family::H1Driven | Family::Su11TwoMode | Family::Quench
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = KrylovError;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| KrylovError::InvalidSpec(format!("unknown family '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    pub params: BTreeMap<String, f64>,
    pub truncation: Option<usize>,
}

impl ModelSpec {
    pub fn new(family: Family, params: &[(&str, f64)]) -> Result<Self> {
        let spec = ModelSpec {
            family,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            truncation: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_truncation(mut self, n: usize) -> Result<Self> {
        self.truncation = Some(n);
        self.validate()?;
        Ok(self)
    }

    pub fn get(&self, key: &str) -> Result<f64> {
        self.params.get(key).copied().ok_or_else(|| {
            KrylovError::InvalidSpec(format!("{} needs parameter '{key}'", self.family))
        })
    }

    pub fn get_or(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    /// Drive frequency: `omega`, or `omega0 - delta` when only the detuning
    /// is given.
    pub fn omega(&self) -> Result<f64> {
        if let Some(&w) = self.params.get("omega") {
            return Ok(w);
        }
        match self.params.get("delta") {
            Some(&d) => Ok(self.get("omega0")? - d),
            None => Err(KrylovError::InvalidSpec(format!(
                "{} needs 'omega' or 'delta'",
                self.family
            ))),
        }
    }

    /// Spin j for SU(2) families, Bargmann index h for SU(1,1).
    pub fn weight(&self) -> f64 {
        match self.family.group() {
            Group::SU2 => self.get_or("j", 0.5),
            Group::SU11 if self.family == Family::Quench => 0.25,
            Group::SU11 => self.get_or("h", 0.5),
            _ => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (k, v) in &self.params {
            if !v.is_finite() {
                return Err(KrylovError::InvalidSpec(format!(
                    "parameter '{k}' is not finite"
                )));
            }
        }
        for key in self.family.required() {
            self.get(key)?;
        }
        if self.family.needs_drive_frequency() {
            self.omega()?;
        }
        match self.family.group() {
            Group::SU2 => {
                let j = self.get("j")?;
                if !(j > 0.0) || (2.0 * j - (2.0 * j).round()).abs() > 1e-12 {
                    return Err(KrylovError::InvalidWeight(j));
                }
            }
            Group::SU11 if self.family == Family::Su11TwoMode => {
                let h = self.weight();
                let two_h = 2.0 * h;
                if !(h > 0.0) || (two_h - two_h.round()).abs() > 1e-12 {
                    return Err(KrylovError::InvalidWeight(h));
                }
            }
            _ => {}
        }
        if self.family == Family::Su3VConfig && self.get("g1")? == 0.0 && self.get("g2")? == 0.0 {
            return Err(KrylovError::InvalidSpec(
                "su3 needs (g1, g2) != (0, 0)".into(),
            ));
        }
        if self.family == Family::Su2Damped && self.get("eta")? == 0.0 {
            return Err(KrylovError::InvalidSpec("su2-damped needs eta != 0".into()));
        }
        if let Some(n) = self.truncation {
            if !self.family.infinite() {
                return Err(KrylovError::InvalidSpec(format!(
                    "{} has no truncation",
                    self.family
                )));
            }
            if n < 16 {
                return Err(KrylovError::InvalidSpec(format!("truncation {n} below 16")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Numeric,
    Both,
}

impl FromStr for Method {
    type Err = KrylovError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" | "closed-form" => Ok(Method::ClosedForm),
            "numeric" => Ok(Method::Numeric),
            "both" => Ok(Method::Both),
            _ => Err(KrylovError::InvalidSpec(format!("unknown method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub method: Method,
    /// Route tolerance; the integrator runs three orders tighter.
    pub tol: f64,
    pub probabilities: bool,
    /// Cost weights c_n = n^k, k in {1, 2}.
    pub cost_exponent: u32,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            method: Method::ClosedForm,
            tol: 1e-8,
            probabilities: false,
            cost_exponent: 1,
        }
    }
}

impl RunOptions {
    fn ode_tol(&self) -> f64 {
        (self.tol * 1e-3).clamp(1e-13, 1e-6)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityTrace {
    pub t: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    /// p[i][n] = |<K_n|psi(t_i)>|^2
    pub p: Option<Vec<Vec<f64>>>,
    pub method: Method,
    /// max |C_closed - C_numeric| / max(1, |C_closed|); zero unless both
    /// routes ran.
    pub max_route_deviation: f64,
    /// Per-point deviation when both routes ran.
    pub deviation: Option<Vec<f64>>,
}

impl ComplexityTrace {
    /// Invariant violations as human-readable strings.
    pub fn violations(&self, spec: &ModelSpec, route_tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        let bound = match spec.family.group() {
            Group::SU2 => Some(2.0 * spec.weight()),
            Group::SU3 => Some(2.0),
            _ => None,
        };
        for (&t, &c) in self.t.iter().zip(&self.c) {
            if !(c >= -1e-12) || !c.is_finite() {
                out.push(format!("C({t}) = {c} is negative or not finite"));
            }
            if let Some(b) = bound {
                if c > b + 1e-8 {
                    out.push(format!("C({t}) = {c} exceeds the bound {b}"));
                }
            }
        }
        if let Some(p) = &self.p {
            for (row, &t) in p.iter().zip(&self.t) {
                let s: f64 = row.iter().sum();
                if (s - 1.0).abs() > 1e-8 {
                    out.push(format!("probabilities at t = {t} sum to {s}"));
                }
            }
        }
        if self.method == Method::Both && self.max_route_deviation > route_tol {
            out.push(format!(
                "route deviation {} above {route_tol}",
                self.max_route_deviation
            ));
        }
        out
    }
}

/// C from |Lambda+| in the closed-sum forms. SU(2) uses the bounded
/// rational form, so an infinite |Lambda+| returns 2j.
pub fn complexity_from_lambda(group: Group, weight: f64, abs_lambda: f64) -> Result<f64> {
    match group {
        Group::SU2 => {
            if abs_lambda.is_infinite() {
                return Ok(2.0 * weight);
            }
            let x = abs_lambda * abs_lambda;
            Ok(2.0 * weight * x / (1.0 + x))
        }
        Group::SU11 => {
            if !(abs_lambda < 1.0) {
                return Err(KrylovError::Domain(format!(
                    "|Lambda+| = {abs_lambda} is outside the unit disc"
                )));
            }
            let x = abs_lambda * abs_lambda;
            Ok(2.0 * weight * x / (1.0 - x))
        }
        Group::H1 => Ok(abs_lambda * abs_lambda),
        Group::SU3 => Err(KrylovError::Domain(
            "SU(3) complexity has no single-parameter form".into(),
        )),
    }
}

/// sum_n n |psi_n|^2 in the Krylov ordering.
pub fn complexity_from_state(psi: &[Complex64]) -> Result<f64> {
    complexity_from_state_k(psi, 1)
}

fn complexity_from_state_k(psi: &[Complex64], k: u32) -> Result<f64> {
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(KrylovError::NotNormalized(norm.sqrt()));
    }
    Ok(psi
        .iter()
        .enumerate()
        .map(|(n, z)| (n as f64).powi(k as i32) * z.norm_sqr())
        .sum())
}

/// Closed-form SU(3) V-configuration complexity with c_n = n (0-based).
pub fn su3_complexity_closed(omega: f64, g1: f64, g2: f64, t: f64) -> Result<f64> {
    if g1 == 0.0 && g2 == 0.0 {
        return Err(KrylovError::InvalidSpec(
            "su3 needs (g1, g2) != (0, 0)".into(),
        ));
    }
    let (a2, b2) = (g1 * g1, g2 * g2);
    let s = a2 + b2;
    let lam = (4.0 * s + 9.0 * omega * omega).sqrt();
    let ca = 2.0 * b2 * (7.0 * a2 * a2 + b2 * b2 + 2.0 * a2 * (4.0 * b2 + 9.0 * omega * omega));
    let cb = 2.0 * b2 * (a2 * a2 - b2 * b2);
    let cc = -2.0 * a2 * b2 * lam * (lam + 3.0 * omega);
    let cd = -2.0 * a2 * b2 * lam * (lam - 3.0 * omega);
    let v = ca
        + cb * (lam * t).cos()
        + cc * ((lam - 3.0 * omega) / 2.0 * t).cos()
        + cd * ((lam + 3.0 * omega) / 2.0 * t).cos();
    Ok(v / (lam * lam * s * s))
}

/// The V-configuration Hamiltonian [[w,0,g2],[0,w,g1],[g2,g1,-2w]].
pub fn su3_hamiltonian(omega: f64, g1: f64, g2: f64) -> CMat {
    let r = |x: f64| Complex64::new(x, 0.0);
    CMat::from_row_slice(
        3,
        3,
        &[
            r(omega),
            r(0.0),
            r(g2),
            r(0.0),
            r(omega),
            r(g1),
            r(g2),
            r(g1),
            r(-2.0 * omega),
        ],
    )
}

fn check_grid(family: Family, t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(KrylovError::Domain("empty time grid".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(KrylovError::Domain(
            "times must be finite and non-negative".into(),
        ));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(KrylovError::Domain(
            "time grid must be strictly increasing".into(),
        ));
    }
    if family == Family::Su2Kicked && t_grid.iter().any(|t| (t - t.round()).abs() > 1e-9) {
        return Err(KrylovError::Domain(
            "kicked model times are kick counts and must be integers".into(),
        ));
    }
    Ok(())
}

/// Closed-form Gauss point for the 2x2-type families.
pub fn closed_point(spec: &ModelSpec, t: f64) -> Result<GaussPoint> {
    let p = |k: &str| spec.get(k);
    match spec.family {
        Family::Su2Static => su2_static(p("alpha")?, p("gamma")?, spec.get_or("delta", 0.0), t),
        Family::Su2Driven => su2_driven(p("omega0")?, spec.omega()?, p("b0")?, t),
        Family::Su2Damped => su2_damped(p("omega0")?, spec.omega()?, p("b0")?, p("eta")?, t),
        Family::Su2Kicked => su2_kicked(p("omega0")?, p("T")?, p("chi")?, t.round() as u64),
        Family::H1Driven => Ok(h1_driven(
            p("omega0")?,
            spec.omega()?,
            p("f0")?,
            spec.get_or("eta", 0.0),
            t,
        )
        .gauss_point()),
        Family::Su11TwoMode => su11_driven(
            p("omega0")?,
            spec.omega()?,
            p("g")?,
            spec.get_or("eta", 0.0),
            t,
        ),
        Family::Quench => quench_coefficients(p("omega0")?, p("eta0")?, p("tau")?, t),
        Family::Su3VConfig => Err(KrylovError::Domain("su3 has no Gauss point".into())),
    }
}

/// Closed-form Gauss trajectory over a grid.
pub fn closed_trajectory(spec: &ModelSpec, t_grid: &[f64]) -> Result<GaussCoefficients> {
    spec.validate()?;
    check_grid(spec.family, t_grid)?;
    let pts = t_grid
        .par_iter()
        .map(|&t| closed_point(spec, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(GaussCoefficients::from_points(spec.family.group(), pts))
}

/// The summary statistic of the closed-form distribution at one point.
#[derive(Debug, Clone, Copy)]
enum Dist {
    Binomial { n: usize, q: f64 },
    NegBinomial { r: f64, y: f64 },
    Poisson { lambda: f64 },
}

impl Dist {
    fn from_pair(spec: &ModelSpec, pair: &ProjectivePair) -> Result<Dist> {
        match spec.family.group() {
            Group::SU2 => Ok(Dist::Binomial {
                n: (2.0 * spec.weight()).round() as usize,
                q: pair.compact_fraction(),
            }),
            Group::SU11 => {
                let (a, b) = (pair.u01.norm_sqr(), pair.u11.norm_sqr());
                if a >= b {
                    return Err(KrylovError::Domain(
                        "|Lambda+| >= 1 in an SU(1,1) trajectory".into(),
                    ));
                }
                Ok(Dist::NegBinomial {
                    r: 2.0 * spec.weight(),
                    y: a / b,
                })
            }
            Group::H1 => Ok(Dist::Poisson {
                lambda: pair.u01.norm_sqr() / pair.u11.norm_sqr(),
            }),
            Group::SU3 => Err(KrylovError::Domain("no closed distribution for su3".into())),
        }
    }

    fn moment(&self, k: u32) -> f64 {
        let (mean, var) = match *self {
            Dist::Binomial { n, q } => (n as f64 * q, n as f64 * q * (1.0 - q)),
            Dist::NegBinomial { r, y } => {
                // r y / (1 - y), written to stay exact as y -> 1
                let gap = 1.0 - y;
                (r * y / gap, r * y / (gap * gap))
            }
            Dist::Poisson { lambda } => (lambda, lambda),
        };
        if k == 2 {
            var + mean * mean
        } else {
            mean
        }
    }

    fn probabilities(&self, len: usize) -> Vec<f64> {
        let mut p = vec![0.0; len];
        match *self {
            Dist::Binomial { n, q } => {
                // ln C(n,k) + k ln q + (n-k) ln(1-q), with exact endpoints
                for (k, slot) in p.iter_mut().enumerate().take(n + 1) {
                    *slot = if q == 0.0 {
                        if k == 0 {
                            1.0
                        } else {
                            0.0
                        }
                    } else if q == 1.0 {
                        if k == n {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        (ln_choose(n, k) + k as f64 * q.ln() + (n - k) as f64 * (1.0 - q).ln())
                            .exp()
                    };
                }
            }
            Dist::NegBinomial { r, y } => {
                let mut cur = (1.0 - y).powf(r);
                for (k, slot) in p.iter_mut().enumerate() {
                    *slot = cur;
                    cur *= y * (r + k as f64) / (k + 1) as f64;
                }
            }
            Dist::Poisson { lambda } => {
                let mut cur = (-lambda).exp();
                for (k, slot) in p.iter_mut().enumerate() {
                    *slot = cur;
                    cur *= lambda / (k + 1) as f64;
                }
            }
        }
        p
    }

    /// Smallest cutoff n with P(N > n) < eps, or None beyond `cap`.
    fn cutoff(&self, eps: f64, cap: usize) -> Option<usize> {
        match *self {
            Dist::Binomial { n, .. } => Some(n),
            _ => {
                let p = self.probabilities(cap + 1);
                let mut acc = 0.0;
                for (n, v) in p.iter().enumerate() {
                    acc += v;
                    if 1.0 - acc < eps {
                        return Some(n);
                    }
                }
                None
            }
        }
    }
}

fn ln_choose(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

/// Default truncation: smallest n_max with predicted tail below 1e-12,
/// clamped to [32, 512].
pub fn default_truncation(spec: &ModelSpec, t_grid: &[f64]) -> Result<usize> {
    if !spec.family.infinite() {
        return Err(KrylovError::InvalidSpec(format!(
            "{} is finite dimensional",
            spec.family
        )));
    }
    let traj = closed_trajectory(spec, t_grid)?;
    let mut need = MIN_TRUNCATION;
    for pair in &traj.pairs {
        let d = Dist::from_pair(spec, pair)?;
        match d.cutoff(1e-12, MAX_TRUNCATION) {
            Some(n) => need = need.max(n),
            None => {
                return Err(KrylovError::TruncationOverflow(format!(
                    "predicted distribution needs more than {MAX_TRUNCATION} levels (mean {:.3e})",
                    d.moment(1)
                )))
            }
        }
    }
    Ok(need.clamp(MIN_TRUNCATION, MAX_TRUNCATION))
}

fn tail_mass(psi: &[Complex64]) -> f64 {
    let n = psi.len();
    let width = (n / 8).max(2);
    psi[n - width..].iter().map(|z| z.norm_sqr()).sum()
}

struct RouteOutput {
    c: Vec<f64>,
    p: Option<Vec<Vec<f64>>>,
}

fn from_pairs(
    spec: &ModelSpec,
    pairs: &[ProjectivePair],
    opts: &RunOptions,
    plen: Option<usize>,
) -> Result<RouteOutput> {
    let mut c = Vec::with_capacity(pairs.len());
    let mut p = plen.map(|_| Vec::with_capacity(pairs.len()));
    for pair in pairs {
        let d = Dist::from_pair(spec, pair)?;
        c.push(d.moment(opts.cost_exponent));
        if let (Some(rows), Some(len)) = (p.as_mut(), plen) {
            rows.push(d.probabilities(len));
        }
    }
    Ok(RouteOutput { c, p })
}

fn prob_len(spec: &ModelSpec, t_grid: &[f64], opts: &RunOptions) -> Result<Option<usize>> {
    if !opts.probabilities {
        return Ok(None);
    }
    Ok(Some(match spec.family.group() {
        Group::SU2 => (2.0 * spec.weight()).round() as usize + 1,
        Group::SU3 => 3,
        _ => match spec.truncation {
            Some(n) => n + 1,
            None => default_truncation(spec, t_grid)? + 1,
        },
    }))
}

fn closed_route(
    spec: &ModelSpec,
    t_grid: &[f64],
    opts: &RunOptions,
    plen: Option<usize>,
) -> Result<RouteOutput> {
    if spec.family == Family::Su3VConfig {
        let (w, g1, g2) = (spec.get("omega")?, spec.get("g1")?, spec.get("g2")?);
        if opts.cost_exponent == 1 {
            let c = t_grid
                .iter()
                .map(|&t| su3_complexity_closed(w, g1, g2, t))
                .collect::<Result<Vec<_>>>()?;
            let p = match plen {
                Some(_) => numeric_route(spec, t_grid, opts, plen)?.p,
                None => None,
            };
            return Ok(RouteOutput { c, p });
        }
        // no closed form for other cost weights
        return numeric_route(spec, t_grid, opts, plen);
    }
    let traj = closed_trajectory(spec, t_grid)?;
    from_pairs(spec, &traj.pairs, opts, plen)
}

fn numeric_route(
    spec: &ModelSpec,
    t_grid: &[f64],
    opts: &RunOptions,
    plen: Option<usize>,
) -> Result<RouteOutput> {
    let tol = opts.ode_tol();
    // the integrators start at the first grid point; physical time starts at 0
    let (grid, skip) = if t_grid[0] > 0.0 {
        let mut g = Vec::with_capacity(t_grid.len() + 1);
        g.push(0.0);
        g.extend_from_slice(t_grid);
        (g, 1)
    } else {
        (t_grid.to_vec(), 0)
    };
    let p = |k: &str| spec.get(k);
    let pairs: Vec<ProjectivePair> = match spec.family {
        Family::Su2Static => {
            let (a, g) = (p("alpha")?, p("gamma")?);
            let h = CMat::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(g / 2.0, 0.0),
                    Complex64::new(a, 0.0),
                    Complex64::new(a, 0.0),
                    Complex64::new(-g / 2.0, 0.0),
                ],
            );
            let sp = spectral(&h)?;
            t_grid
                .iter()
                .map(|&t| point_from_matrix(t, &sp.propagator(t), Group::SU2).map(|x| x.pair))
                .collect::<Result<_>>()?
        }
        Family::Su2Driven | Family::Su2Damped => {
            let eta = if spec.family == Family::Su2Damped {
                p("eta")?
            } else {
                0.0
            };
            su2_driven_numeric(p("omega0")?, spec.omega()?, p("b0")?, eta, &grid, tol)?.pairs
                [skip..]
                .to_vec()
        }
        Family::Su2Kicked => t_grid
            .iter()
            .map(|&t| {
                let u = kicked_product(p("omega0")?, p("T")?, p("chi")?, t.round() as u64);
                point_from_matrix(t, &u, Group::SU2).map(|x| x.pair)
            })
            .collect::<Result<_>>()?,
        Family::H1Driven => h1_driven_numeric(
            p("omega0")?,
            spec.omega()?,
            p("f0")?,
            spec.get_or("eta", 0.0),
            &grid,
            tol,
        )?[skip..]
            .iter()
            .map(|x| x.gauss_point().pair)
            .collect(),
        Family::Su11TwoMode => su11_driven_numeric(
            p("omega0")?,
            spec.omega()?,
            p("g")?,
            spec.get_or("eta", 0.0),
            &grid,
            tol,
        )?
        .pairs[skip..]
            .to_vec(),
        Family::Quench => return quench_numeric(spec, t_grid, opts, plen),
        Family::Su3VConfig => return su3_numeric(spec, t_grid, opts, plen),
    };
    from_pairs(spec, &pairs, opts, plen)
}

/// Quench in the truncated k = 1/4 representation, evolved by the spectral
/// exponentials of the two constant Hamiltonians.
fn quench_numeric(
    spec: &ModelSpec,
    t_grid: &[f64],
    opts: &RunOptions,
    plen: Option<usize>,
) -> Result<RouteOutput> {
    let (w0, eta0, tau) = (spec.get("omega0")?, spec.get("eta0")?, spec.get("tau")?);
    let n_max = match spec.truncation {
        Some(n) => n,
        None => default_truncation(spec, t_grid)?,
    };
    let gen = build_su11(0.25, n_max)?;
    let (kp, km, k0) = (gen.get("K+")?, gen.get("K-")?, gen.get("K0")?);
    let c = |x: f64| Complex64::new(x, 0.0);
    let h1 = k0 * c(2.0 * (w0 + eta0)) + (kp + km) * c(eta0);
    let h2 = k0 * c(2.0 * w0);
    let (s1, s2) = (spectral(&h1)?, spectral(&h2)?);
    let mut seed = CVec::zeros(n_max + 1);
    seed[0] = c(1.0);
    let at_tau = s1.evolve(&seed, tau);
    let mut cs = Vec::with_capacity(t_grid.len());
    let mut ps = plen.map(|_| Vec::with_capacity(t_grid.len()));
    for &t in t_grid {
        let psi = if t <= tau {
            s1.evolve(&seed, t)
        } else {
            s2.evolve(&at_tau, t - tau)
        };
        let tail = tail_mass(psi.as_slice());
        if tail > TAIL_THRESHOLD {
            return Err(KrylovError::TruncationOverflow(format!(
                "tail mass {tail:.3e} at t = {t} with n_max = {n_max}"
            )));
        }
        cs.push(complexity_from_state_k(psi.as_slice(), opts.cost_exponent)?);
        if let (Some(rows), Some(len)) = (ps.as_mut(), plen) {
            let mut row: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
            row.resize(len, 0.0);
            rows.push(row);
        }
    }
    Ok(RouteOutput { c: cs, p: ps })
}

/// SU(3): spectral evolution of (1,0,0), projected on the Lanczos basis.
fn su3_numeric(
    spec: &ModelSpec,
    t_grid: &[f64],
    opts: &RunOptions,
    plen: Option<usize>,
) -> Result<RouteOutput> {
    let h = su3_hamiltonian(spec.get("omega")?, spec.get("g1")?, spec.get("g2")?);
    let mut seed = CVec::zeros(3);
    seed[0] = Complex64::new(1.0, 0.0);
    let tri = tridiagonalize(&h, &seed, default_breakdown_tol(&h))?;
    let sp = spectral(&h)?;
    let mut cs = Vec::with_capacity(t_grid.len());
    let mut ps = plen.map(|_| Vec::with_capacity(t_grid.len()));
    for &t in t_grid {
        let psi = sp.evolve(&seed, t);
        let amps: Vec<Complex64> = tri.basis.iter().map(|v| v.dotc(&psi)).collect();
        cs.push(complexity_from_state_k(&amps, opts.cost_exponent)?);
        if let Some(rows) = ps.as_mut() {
            let mut row: Vec<f64> = amps.iter().map(|z| z.norm_sqr()).collect();
            row.resize(3, 0.0);
            rows.push(row);
        }
    }
    Ok(RouteOutput { c: cs, p: ps })
}

fn exponential_guard(spec: &ModelSpec, t_grid: &[f64], c: &[f64]) -> Result<()> {
    if spec.family != Family::Su11TwoMode {
        return Ok(());
    }
    if let Some(i) = c.iter().position(|&v| !(v <= SU11_COMPLEXITY_CAP)) {
        let mut msg = format!(
            "complexity exceeds {SU11_COMPLEXITY_CAP:e} at t = {}",
            t_grid[i]
        );
        if spec.get_or("eta", 0.0) == 0.0 {
            let g = spec.get("g")?;
            let d = spec.get("omega0")? - spec.omega()?;
            let nu2 = (g * g - d * d) / 4.0;
            if nu2 > 0.0 {
                msg.push_str(&format!(
                    "; analytic growth rate ln C ~ {} t",
                    2.0 * nu2.sqrt()
                ));
            }
        }
        return Err(KrylovError::Overflow(msg));
    }
    Ok(())
}

fn route_with_guard(
    route: fn(&ModelSpec, &[f64], &RunOptions, Option<usize>) -> Result<RouteOutput>,
    screen: bool,
    spec: &ModelSpec,
    t_grid: &[f64],
    opts: &RunOptions,
    plen: Option<usize>,
) -> Result<RouteOutput> {
    // the closed form is cheap; screen it first so that runaway SU(1,1)
    // trajectories never reach the integrator or the disc check
    if screen && spec.family == Family::Su11TwoMode {
        let traj = closed_trajectory(spec, t_grid)?;
        let c: Vec<f64> = traj
            .pairs
            .iter()
            .map(|p| 2.0 * spec.weight() * p.disc_ratio().unwrap_or(f64::INFINITY))
            .collect();
        exponential_guard(spec, t_grid, &c)?;
    }
    let out = route(spec, t_grid, opts, plen)?;
    exponential_guard(spec, t_grid, &out.c)?;
    Ok(out)
}

pub fn run_model(spec: &ModelSpec, t_grid: &[f64], opts: &RunOptions) -> Result<ComplexityTrace> {
    spec.validate()?;
    check_grid(spec.family, t_grid)?;
    if !(opts.tol > 0.0) {
        return Err(KrylovError::Domain(format!(
            "tolerance {} must be positive",
            opts.tol
        )));
    }
    if !(opts.cost_exponent == 1 || opts.cost_exponent == 2) {
        return Err(KrylovError::Domain(format!(
            "cost exponent {} not in {{1, 2}}",
            opts.cost_exponent
        )));
    }
    let plen = prob_len(spec, t_grid, opts)?;
    let trace = match opts.method {
        Method::ClosedForm => {
            let out = route_with_guard(closed_route, true, spec, t_grid, opts, plen)?;
            ComplexityTrace {
                t: t_grid.to_vec(),
                c: out.c,
                p: out.p,
                method: Method::ClosedForm,
                max_route_deviation: 0.0,
                deviation: None,
            }
        }
        Method::Numeric => {
            let out = route_with_guard(numeric_route, true, spec, t_grid, opts, plen)?;
            ComplexityTrace {
                t: t_grid.to_vec(),
                c: out.c,
                p: out.p,
                method: Method::Numeric,
                max_route_deviation: 0.0,
                deviation: None,
            }
        }
        Method::Both => {
            let a = route_with_guard(closed_route, true, spec, t_grid, opts, plen)?;
            let b = route_with_guard(numeric_route, true, spec, t_grid, opts, None)?;
            let dev: Vec<f64> =
                a.c.iter()
                    .zip(&b.c)
                    .map(|(x, y)| (x - y).abs() / x.abs().max(1.0))
                    .collect();
            let max_dev = dev.iter().cloned().fold(0.0, f64::max);
            ComplexityTrace {
                t: t_grid.to_vec(),
                c: a.c,
                p: a.p,
                method: Method::Both,
                max_route_deviation: max_dev,
                deviation: Some(dev),
            }
        }
    };
    Ok(trace)
}

/// Closed-form C at a single time (k = 1 cost).
pub fn closed_complexity_at(spec: &ModelSpec, t: f64) -> Result<f64> {
    if spec.family == Family::Su3VConfig {
        return su3_complexity_closed(spec.get("omega")?, spec.get("g1")?, spec.get("g2")?, t);
    }
    let pt = closed_point(spec, t)?;
    Ok(Dist::from_pair(spec, &pt.pair)?.moment(1))
}

/// Refine the largest sample of `c` on `t_grid` by golden-section search on
/// the bracketing interval. Returns (t*, f(t*)).
pub fn refine_maximum<F>(f: F, t_grid: &[f64], c: &[f64]) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    if t_grid.is_empty() || t_grid.len() != c.len() {
        return Err(KrylovError::Domain(
            "grid and samples must be non-empty and aligned".into(),
        ));
    }
    let i = c
        .iter()
        .enumerate()
        .fold(0, |best, (k, &v)| if v > c[best] { k } else { best });
    let lo = t_grid[i.saturating_sub(1)];
    let hi = t_grid[(i + 1).min(t_grid.len() - 1)];
    if hi <= lo {
        return Ok((t_grid[i], c[i]));
    }
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..200 {
        if b - a < 1e-14 * b.abs().max(1.0) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        }
    }
    let (tm, fm) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    if fm >= c[i] {
        Ok((tm, fm))
    } else {
        Ok((t_grid[i], c[i]))
    }
}
