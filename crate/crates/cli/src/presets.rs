//! Figure presets and the checks each one enforces.

use krylov_core::models::{
    closed_complexity_at, refine_maximum, ComplexityTrace, Family, ModelSpec,
};
use krylov_core::Result;

#[derive(Debug, Clone, Copy)]
pub enum Check {
    /// max relative route deviation
    Route(f64),
    /// sup |C_closed - C_numeric|
    RouteAbs(f64),
    MaxC {
        expect: f64,
        tol: f64,
    },
    /// spacing of consecutive maxima
    Period {
        expect: f64,
        tol: f64,
    },
    /// |C - f| <= tol * max(1, |f|) on t <= t_max
    Formula {
        name: &'static str,
        f: fn(f64) -> f64,
        tol: f64,
        t_max: f64,
    },
    /// reported, never enforced
    Note {
        name: &'static str,
        f: fn(f64) -> f64,
        t_max: f64,
    },
    Freeze {
        tau: f64,
        tol: f64,
    },
    /// C = a t^2 least squares on t <= t_max
    QuadraticFit {
        t_max: f64,
        coef: f64,
        rel_tol: f64,
        r2_min: f64,
    },
    Origin(f64),
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub id: &'static str,
    pub family: Family,
    pub params: &'static [(&'static str, f64)],
    pub t_end: f64,
    pub samples: usize,
    pub probabilities: bool,
    pub checks: &'static [Check],
}

impl Preset {
    pub fn spec(&self) -> Result<ModelSpec> {
        ModelSpec::new(self.family, self.params)
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.samples;
        (0..n)
            .map(|i| self.t_end * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
    pub enforced: bool,
}

const ROUTE: Check = Check::Route(1e-6);

// Traces that grow to ~1e7 lose about log10(C) digits in 1 - |Lambda|^2,
// so their formula checks run one decade looser.

fn sin2(x: f64) -> f64 {
    x.sin().powi(2)
}

fn sinh2(x: f64) -> f64 {
    x.sinh().powi(2)
}

fn fig1a(t: f64) -> f64 {
    let om = (2.1f64 * 2.1 + 4.0).sqrt();
    10.0 * 2.1 * 2.1 / (om * om) * sin2(om * t / 2.0)
}
fn fig1b(t: f64) -> f64 {
    10.0 * sin2(1.05 * t)
}
fn fig2b(t: f64) -> f64 {
    10.0 * sin2(5.0 * (-(-0.09 * t).exp_m1()) / 0.18)
}
fn fig3b(t: f64) -> f64 {
    10.0 * sin2(2.1 * (-(0.1 * t).exp_m1()) / -0.2)
}
fn fig4a(t: f64) -> f64 {
    9.0 / (0.01 + 4.0) * (1.0 + (-0.2 * t).exp() - 2.0 * (-0.1 * t).exp() * (2.0 * t).cos())
}
fn fig4b(t: f64) -> f64 {
    900.0 * (-0.1 * t).exp_m1().powi(2)
}
fn fig4b_alt(t: f64) -> f64 {
    900.0 * (-0.2 * t).exp() * (0.1 * t).exp_m1()
}
fn fig5a(t: f64) -> f64 {
    9.0 / (0.01 + 4.0) * (1.0 + (0.2 * t).exp() - 2.0 * (0.1 * t).exp() * (2.0 * t).cos())
}
fn fig5b(t: f64) -> f64 {
    900.0 * (0.1 * t).exp_m1().powi(2)
}
fn fig6a(t: f64) -> f64 {
    sin2(3f64.sqrt() * t / 2.0) / 3.0
}
fn fig6b(t: f64) -> f64 {
    t * t / 16.0
}
fn fig6c(t: f64) -> f64 {
    4.41 / 0.41 * sinh2(0.41f64.sqrt() * t / 2.0)
}
fn fig8(t: f64) -> f64 {
    sinh2(2.1 * (-(-0.1 * t).exp_m1()) / 0.2)
}
fn fig9d(t: f64) -> f64 {
    sinh2(2.1 * (-(0.1 * t).exp_m1()) / -0.2)
}
fn quench(t: f64) -> f64 {
    sin2(2f64.sqrt() * t.min(7.5)) / 16.0
}
fn quench_alt(t: f64) -> f64 {
    sin2(2f64.sqrt() * t.min(7.5)) / 64.0
}

macro_rules! preset {
    ($id:expr, $fam:ident, [$($k:expr => $v:expr),*], $t:expr, $p:expr, [$($c:expr),*]) => {
        Preset {
            id: $id,
            family: Family::$fam,
            params: &[$(($k, $v)),*],
            t_end: $t,
            samples: 2001,
            probabilities: $p,
            checks: &[$($c),*],
        }
    };
}

pub static PRESETS: &[Preset] = &[
    preset!("fig1a", Su2Driven, ["j" => 5.0, "omega0" => 4.0, "omega" => 2.0, "b0" => 2.1], 20.0, true, [
        ROUTE,
        Check::RouteAbs(1e-6),
        Check::MaxC { expect: 10.0 * 4.41 / 8.41, tol: 1e-6 },
        Check::Formula { name: "detuned Rabi form", f: fig1a, tol: 1e-8, t_max: f64::INFINITY }
    ]),
    preset!("fig1b", Su2Driven, ["j" => 5.0, "omega0" => 4.0, "omega" => 4.0, "b0" => 2.1], 20.0, true, [
        ROUTE,
        Check::MaxC { expect: 10.0, tol: 1e-6 },
        Check::Period { expect: std::f64::consts::PI / 1.05, tol: 1e-6 },
        Check::Formula { name: "2j sin^2(B0 t/2)", f: fig1b, tol: 1e-8, t_max: f64::INFINITY }
    ]),
    preset!("fig2a", Su2Damped, ["j" => 5.0, "omega0" => 4.0, "omega" => 2.0, "b0" => 5.0, "eta" => 0.09], 60.0, true, [ROUTE]),
    preset!("fig2b", Su2Damped, ["j" => 5.0, "omega0" => 4.0, "omega" => 4.0, "b0" => 5.0, "eta" => 0.09], 60.0, true, [
        ROUTE,
        Check::Formula { name: "damped resonance form", f: fig2b, tol: 1e-8, t_max: f64::INFINITY }
    ]),
    preset!("fig3a", Su2Damped, ["j" => 5.0, "omega0" => 4.0, "omega" => 2.0, "b0" => 2.1, "eta" => -0.1], 10.0, true, [ROUTE]),
    preset!("fig3b", Su2Damped, ["j" => 5.0, "omega0" => 4.0, "omega" => 4.0, "b0" => 2.1, "eta" => -0.1], 10.0, true, [
        ROUTE,
        Check::Formula { name: "ramped resonance form", f: fig3b, tol: 1e-8, t_max: f64::INFINITY }
    ]),
    preset!("fig4a", H1Driven, ["omega0" => 4.0, "omega" => 2.0, "f0" => 3.0, "eta" => 0.1], 20.0, false, [
        ROUTE,
        Check::Formula { name: "off-resonance form", f: fig4a, tol: 1e-8, t_max: f64::INFINITY }
    ]),
    preset!("fig4b", H1Driven, ["omega0" => 4.0, "omega" => 4.0, "f0" => 3.0, "eta" => 0.1], 20.0, false, [
        ROUTE,
        Check::Formula { name: "f0^2/eta^2 (1-e^(-eta t))^2", f: fig4b, tol: 1e-8, t_max: f64::INFINITY },
        Check::Note { name: "e^(-2 eta t)(e^(eta t)-1) form", f: fig4b_alt, t_max: f64::INFINITY }
    ]),
    preset!("fig5a", H1Driven, ["omega0" => 4.0, "omega" => 2.0, "f0" => 3.0, "eta" => -0.1], 20.0, false, [
        ROUTE,
        Check::Formula { name: "ramped off-resonance form", f: fig5a, tol: 1e-8, t_max: f64::INFINITY }
    ]),
    preset!("fig5b", H1Driven, ["omega0" => 2.0, "omega" => 2.0, "f0" => 3.0, "eta" => -0.1], 20.0, false, [
        ROUTE,
        Check::Formula { name: "ramped resonance form", f: fig5b, tol: 1e-8, t_max: f64::INFINITY }
    ]),
    preset!("fig6a", Su11TwoMode, ["omega0" => 4.0, "delta" => 2.0, "g" => 1.0], 20.0, false, [
        ROUTE,
        Check::MaxC { expect: 1.0 / 3.0, tol: 1e-8 },
        Check::Formula { name: "oscillatory form", f: fig6a, tol: 1e-8, t_max: f64::INFINITY }
    ]),
    preset!("fig6b", Su11TwoMode, ["omega0" => 4.0, "delta" => 0.5, "g" => 0.5], 20.0, false, [
        ROUTE,
        Check::QuadraticFit { t_max: 5.0, coef: 0.0625, rel_tol: 1e-6, r2_min: 1.0 - 1e-6 },
        Check::Formula { name: "(g t/2)^2", f: fig6b, tol: 1e-8, t_max: f64::INFINITY }
    ]),
    preset!("fig6c", Su11TwoMode, ["omega0" => 4.0, "delta" => 2.0, "g" => 2.1], 20.0, false, [
        ROUTE,
        Check::Formula { name: "exponential form", f: fig6c, tol: 1e-7, t_max: f64::INFINITY }
    ]),
    preset!("fig7a", Su11TwoMode, ["omega0" => 4.0, "delta" => 2.1, "g" => 2.0, "eta" => 0.1], 20.0, false, [ROUTE]),
    preset!("fig7b", Su11TwoMode, ["omega0" => 4.0, "delta" => 2.1, "g" => 2.1, "eta" => 0.1], 20.0, false, [ROUTE]),
    preset!("fig7c", Su11TwoMode, ["omega0" => 4.0, "delta" => 2.0, "g" => 2.1, "eta" => 0.1], 20.0, false, [ROUTE]),
    preset!("fig8", Su11TwoMode, ["omega0" => 4.0, "omega" => 4.0, "g" => 2.1, "eta" => 0.1], 20.0, false, [
        ROUTE,
        Check::Formula { name: "damped resonance form", f: fig8, tol: 1e-7, t_max: f64::INFINITY }
    ]),
    preset!("fig9a", Su11TwoMode, ["omega0" => 4.0, "delta" => 2.1, "g" => 2.0, "eta" => -0.1], 6.0, false, [ROUTE]),
    preset!("fig9b", Su11TwoMode, ["omega0" => 4.0, "delta" => 2.1, "g" => 2.1, "eta" => -0.1], 6.0, false, [ROUTE]),
    preset!("fig9c", Su11TwoMode, ["omega0" => 4.0, "delta" => 2.0, "g" => 2.1, "eta" => -0.1], 6.0, false, [ROUTE]),
    preset!("fig9d", Su11TwoMode, ["omega0" => 4.0, "omega" => 4.0, "g" => 2.1, "eta" => -0.1], 6.0, false, [
        ROUTE,
        Check::Formula { name: "ramped resonance form", f: fig9d, tol: 1e-7, t_max: f64::INFINITY }
    ]),
    preset!("figquench", Quench, ["omega0" => 1.0, "eta0" => 0.5, "tau" => 7.5], 20.0, true, [
        ROUTE,
        Check::Freeze { tau: 7.5, tol: 1e-10 },
        Check::Formula { name: "eta0^2/(2 w1^2) sin^2(w1 t)", f: quench, tol: 1e-9, t_max: f64::INFINITY },
        Check::Note { name: "eta0^2/(8 w0^2+16 w0 eta0) sin^2 form", f: quench_alt, t_max: 7.5 }
    ]),
    preset!("figsu3a", Su3VConfig, ["omega" => 4.0, "g1" => 5.0, "g2" => 2.0], 20.0, true, [
        ROUTE,
        Check::RouteAbs(1e-9),
        Check::Origin(1e-12)
    ]),
    preset!("figsu3b", Su3VConfig, ["omega" => 4.0, "g1" => 2.0, "g2" => 5.0], 20.0, true, [
        ROUTE,
        Check::RouteAbs(1e-9),
        Check::Origin(1e-12)
    ]),
    preset!("figsu3c", Su3VConfig, ["omega" => 2.0, "g1" => 3.0, "g2" => 4.0], 20.0, true, [
        ROUTE,
        Check::RouteAbs(1e-9),
        Check::Origin(1e-12)
    ]),
];

pub fn find(id: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.id == id)
}

pub fn ids() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.id).collect()
}

/// Refined local maxima (t, C) of the closed-form trace.
pub fn local_maxima(spec: &ModelSpec, tr: &ComplexityTrace) -> Result<Vec<(f64, f64)>> {
    let c = &tr.c;
    let mut out = Vec::new();
    for i in 1..c.len().saturating_sub(1) {
        if c[i] > c[i - 1] && c[i] >= c[i + 1] {
            out.push(refine_maximum(
                |t| closed_complexity_at(spec, t),
                &tr.t[i - 1..=i + 1],
                &c[i - 1..=i + 1],
            )?);
        }
    }
    Ok(out)
}

/// Least-squares C = a t^2 through the origin; returns (a, R^2).
pub fn quadratic_fit(t: &[f64], c: &[f64]) -> (f64, f64) {
    let (num, den) = t.iter().zip(c).fold((0.0, 0.0), |(n, d), (&t, &c)| {
        (n + c * t * t, d + t.powi(4))
    });
    let a = num / den;
    let mean = c.iter().sum::<f64>() / c.len() as f64;
    let ss_res: f64 = t
        .iter()
        .zip(c)
        .map(|(&t, &c)| (c - a * t * t).powi(2))
        .sum();
    let ss_tot: f64 = c.iter().map(|&c| (c - mean).powi(2)).sum();
    (a, 1.0 - ss_res / ss_tot)
}

pub fn evaluate(preset: &Preset, spec: &ModelSpec, tr: &ComplexityTrace) -> Result<Vec<Outcome>> {
    let mut out = Vec::new();
    let mut push = |name: String, value: f64, tol: f64, passed: bool, enforced: bool| {
        out.push(Outcome {
            name,
            value,
            tol,
            passed,
            enforced,
        })
    };
    for v in tr.violations(spec, f64::INFINITY) {
        push(format!("invariant: {v}"), f64::NAN, 0.0, false, true);
    }
    for check in preset.checks {
        match *check {
            Check::Route(tol) => {
                let d = tr.max_route_deviation;
                push("route deviation (relative)".into(), d, tol, d <= tol, true);
            }
            Check::RouteAbs(tol) => {
                let d = match &tr.deviation {
                    Some(dev) => dev
                        .iter()
                        .zip(&tr.c)
                        .map(|(d, c)| d * c.abs().max(1.0))
                        .fold(0.0, f64::max),
                    None => f64::NAN,
                };
                push("route deviation (sup-norm)".into(), d, tol, d <= tol, true);
            }
            Check::MaxC { expect, tol } => {
                let (_, m) = refine_maximum(|t| closed_complexity_at(spec, t), &tr.t, &tr.c)?;
                let e = (m - expect).abs();
                push(
                    format!("max C = {m:.12} (expected {expect:.12})"),
                    e,
                    tol,
                    e <= tol,
                    true,
                );
            }
            Check::Period { expect, tol } => {
                let peaks = local_maxima(spec, tr)?;
                let e = if peaks.len() >= 2 {
                    let span = peaks[peaks.len() - 1].0 - peaks[0].0;
                    let period = span / (peaks.len() - 1) as f64;
                    (period - expect).abs()
                } else {
                    f64::INFINITY
                };
                push(
                    format!("period (expected {expect:.12})"),
                    e,
                    tol,
                    e <= tol,
                    true,
                );
            }
            Check::Formula {
                name,
                f,
                tol,
                t_max,
            } => {
                let e = formula_error(tr, f, t_max);
                push(format!("matches {name}"), e, tol, e <= tol, true);
            }
            Check::Note { name, f, t_max } => {
                let e = formula_error(tr, f, t_max);
                push(format!("note: distance to {name}"), e, 0.0, true, false);
            }
            Check::Freeze { tau, tol } => {
                let c_tau = closed_complexity_at(spec, tau)?;
                let e =
                    tr.t.iter()
                        .zip(&tr.c)
                        .filter(|(&t, _)| t > tau)
                        .map(|(_, &c)| (c - c_tau).abs())
                        .fold(0.0, f64::max);
                push(format!("constant after t = {tau}"), e, tol, e <= tol, true);
            }
            Check::QuadraticFit {
                t_max,
                coef,
                rel_tol,
                r2_min,
            } => {
                let (t, c): (Vec<f64>, Vec<f64>) =
                    tr.t.iter()
                        .zip(&tr.c)
                        .filter(|(&t, _)| t <= t_max)
                        .map(|(&t, &c)| (t, c))
                        .unzip();
                let (a, r2) = quadratic_fit(&t, &c);
                let e = (a / coef - 1.0).abs();
                push(
                    format!("quadratic coefficient {a:.12} (expected {coef})"),
                    e,
                    rel_tol,
                    e <= rel_tol,
                    true,
                );
                push(
                    "quadratic fit 1 - R^2".into(),
                    1.0 - r2,
                    1.0 - r2_min,
                    r2 >= r2_min,
                    true,
                );
            }
            Check::Origin(tol) => {
                let e = tr.c.first().map(|c| c.abs()).unwrap_or(f64::NAN);
                push("C(0) = 0".into(), e, tol, e <= tol, true);
            }
        }
    }
    Ok(out)
}

fn formula_error(tr: &ComplexityTrace, f: fn(f64) -> f64, t_max: f64) -> f64 {
    tr.t.iter()
        .zip(&tr.c)
        .filter(|(&t, _)| t <= t_max)
        .map(|(&t, &c)| {
            let v = f(t);
            (c - v).abs() / v.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_specs_valid() {
        let mut ids = ids();
        assert_eq!(ids.len(), 25);
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 25);
        for p in PRESETS {
            p.spec().unwrap();
        }
    }

    #[test]
    fn fit_recovers_coefficient() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let c: Vec<f64> = t.iter().map(|t| 0.3 * t * t).collect();
        let (a, r2) = quadratic_fit(&t, &c);
        assert!((a - 0.3).abs() < 1e-14);
        assert!((r2 - 1.0).abs() < 1e-14);
    }
}
