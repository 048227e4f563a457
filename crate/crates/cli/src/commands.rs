use crate::cli::{Format, LanczosArgs, LanczosMethod, ModelArgs, SweepArgs};
use crate::config::{Config, PARAM_KEYS};
use crate::format::{g17, trace_csv};
use crate::plot::line_plot;
use crate::presets::{self, Preset};
use crate::CliError;
use krylov_core::algebra::CMat;
use krylov_core::lanczos::{
    default_breakdown_tol, lanczos_from_moments, moments, tridiagonalize, MAX_MOMENT_ORDER,
};
use krylov_core::linalg::CVec;
use krylov_core::models::{
    run_model, sweep, ComplexityTrace, Family, Method, ModelSpec, RunOptions, Summary, SweepAxis,
    SweepResult,
};
use krylov_core::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Global options after merging flags with a config file.
#[derive(Debug, Clone)]
pub struct Globals {
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub plot: Option<PathBuf>,
    pub tol: Option<f64>,
}

impl Globals {
    fn merged(&self, cfg: &Config) -> Result<Globals, CliError> {
        let format = match (self.format, cfg.str("format")?) {
            (Some(f), _) => Some(f),
            (None, Some(s)) => Some(match s.as_str() {
                "csv" => Format::Csv,
                "json" => Format::Json,
                _ => return Err(CliError::Usage(format!("unknown format '{s}'"))),
            }),
            (None, None) => None,
        };
        Ok(Globals {
            output: self
                .output
                .clone()
                .or(cfg.str("output")?.map(PathBuf::from)),
            format,
            plot: self.plot.clone().or(cfg.str("plot")?.map(PathBuf::from)),
            tol: self.tol.or(cfg.f64("tol")?),
        })
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(1e-8)
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Failure(e.to_string()))
        }
    }
}

/// Plot failures are reported and otherwise ignored.
fn write_plot(path: &Path, svg: &str) {
    if let Err(e) = std::fs::write(path, svg) {
        eprintln!("warning: cannot write plot {}: {e}", path.display());
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub method: Method,
    pub max_route_deviation: f64,
    pub t: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dev: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<Vec<Vec<f64>>>,
}

fn render_trace(
    spec: &ModelSpec,
    tr: &ComplexityTrace,
    format: Format,
) -> Result<String, CliError> {
    match format {
        Format::Csv => Ok(trace_csv(tr)),
        Format::Json => {
            let rec = RunRecord {
                family: spec.family.to_string(),
                params: spec.params.clone(),
                method: tr.method,
                max_route_deviation: tr.max_route_deviation,
                t: tr.t.clone(),
                c: tr.c.clone(),
                dev: tr.deviation.clone(),
                p: tr.p.clone(),
            };
            serde_json::to_string_pretty(&rec)
                .map(|s| s + "\n")
                .map_err(|e| CliError::Failure(e.to_string()))
        }
    }
}

/// Parameters each family accepts.
fn allowed_params(f: Family) -> &'static [&'static str] {
    match f {
        Family::Su2Static => &["j", "alpha", "gamma", "delta"],
        Family::Su2Driven => &["j", "omega0", "omega", "delta", "b0"],
        Family::Su2Damped => &["j", "omega0", "omega", "delta", "b0", "eta"],
        Family::Su2Kicked => &["j", "omega0", "T", "chi"],
        Family::H1Driven => &["omega0", "omega", "delta", "f0", "eta"],
        Family::Su11TwoMode => &["omega0", "omega", "delta", "g", "eta", "h"],
        Family::Quench => &["omega0", "eta0", "tau"],
        Family::Su3VConfig => &["omega", "g1", "g2"],
    }
}

/// Everything needed to evaluate one model.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub spec: ModelSpec,
    pub grid: Vec<f64>,
    pub opts: RunOptions,
    pub globals: Globals,
    pub config: Config,
}

fn load_config(args: &ModelArgs) -> Result<Config, CliError> {
    match &args.config {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    }
}

pub fn resolve(args: &ModelArgs, globals: &Globals) -> Result<Resolved, CliError> {
    resolve_with(args, globals, &[])
}

/// `placeholders` fill parameters that neither flags nor config provide.
fn resolve_with(
    args: &ModelArgs,
    globals: &Globals,
    placeholders: &[(String, f64)],
) -> Result<Resolved, CliError> {
    let cfg = load_config(args)?;
    let globals = globals.merged(&cfg)?;
    let family: Family = args
        .family
        .clone()
        .or(cfg.str("family")?)
        .ok_or_else(|| CliError::Usage("--family is required".into()))?
        .parse()
        .map_err(|e: krylov_core::KrylovError| CliError::Usage(e.to_string()))?;
    let mut params: BTreeMap<String, f64> = BTreeMap::new();
    for key in PARAM_KEYS {
        if let Some(v) = cfg.f64(key)? {
            params.insert(key.to_string(), v);
        }
    }
    for (k, v) in args.flag_params() {
        params.insert(k.to_string(), v);
    }
    for (k, v) in placeholders {
        let shadowed = match k.as_str() {
            "delta" => params.remove("omega").is_some(),
            "omega" => params.remove("delta").is_some(),
            _ => false,
        };
        if shadowed {
            eprintln!(
                "note: sweeping {k} replaces the fixed {}",
                if k == "delta" { "omega" } else { "delta" }
            );
        }
        params.entry(k.clone()).or_insert(*v);
    }
    let allowed = allowed_params(family);
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(CliError::Usage(format!(
            "{family} does not take parameter '{k}' (accepts {})",
            allowed.join(", ")
        )));
    }
    let mut spec = ModelSpec {
        family,
        params,
        truncation: None,
    };
    let truncation = match args.truncation {
        Some(n) => Some(n),
        None => cfg.u64("truncation")?.map(|n| n as usize),
    };
    if let Some(n) = truncation {
        spec.truncation = Some(n);
    }
    spec.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let grid = if family == Family::Su2Kicked {
        let k_max = match args.k_max {
            Some(k) => k,
            None => cfg.u64("k-max")?.unwrap_or(100),
        };
        if k_max == 0 {
            return Err(CliError::Usage("--k-max must be at least 1".into()));
        }
        (0..=k_max).map(|k| k as f64).collect()
    } else {
        let t0 = args
            .t_start
            .map(Ok)
            .unwrap_or_else(|| cfg.f64("t-start").map(|v| v.unwrap_or(0.0)))?;
        let t1 = args
            .t_end
            .map(Ok)
            .unwrap_or_else(|| cfg.f64("t-end").map(|v| v.unwrap_or(10.0)))?;
        let n = match args.samples {
            Some(n) => n,
            None => cfg.u64("samples")?.map(|n| n as usize).unwrap_or(1001),
        };
        time_grid(t0, t1, n)?
    };

    let method = match args.method.clone().or(cfg.str("method")?) {
        Some(m) => m
            .parse()
            .map_err(|e: krylov_core::KrylovError| CliError::Usage(e.to_string()))?,
        None => Method::ClosedForm,
    };
    let cost_exponent = match args.cost_exponent {
        Some(k) => k,
        None => cfg.u64("cost-exponent")?.map(|k| k as u32).unwrap_or(1),
    };
    if cost_exponent != 1 && cost_exponent != 2 {
        return Err(CliError::Usage(format!(
            "--cost-exponent must be 1 or 2, got {cost_exponent}"
        )));
    }
    let tol = globals.tol();
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {tol}"
        )));
    }
    let probabilities = args.probabilities || cfg.bool("probabilities")?.unwrap_or(false);
    let opts = RunOptions {
        method,
        tol,
        probabilities,
        cost_exponent,
    };
    Ok(Resolved {
        spec,
        grid,
        opts,
        globals,
        config: cfg,
    })
}

pub fn time_grid(t0: f64, t1: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if !(t0.is_finite() && t1.is_finite()) || !(t1 > t0) {
        return Err(CliError::Usage(format!(
            "empty time range [{t0}, {t1}]: t-end must exceed t-start"
        )));
    }
    if t0 < 0.0 {
        return Err(CliError::Usage("t-start must be non-negative".into()));
    }
    if n < 2 {
        return Err(CliError::Usage(format!(
            "samples must be at least 2, got {n}"
        )));
    }
    Ok((0..n)
        .map(|i| {
            if i + 1 == n {
                t1
            } else {
                t0 + (t1 - t0) * i as f64 / (n - 1) as f64
            }
        })
        .collect())
}

pub fn cmd_run(args: &ModelArgs, globals: &Globals) -> Result<(), CliError> {
    let r = resolve(args, globals)?;
    let tr = run_model(&r.spec, &r.grid, &r.opts)?;
    let text = render_trace(&r.spec, &tr, r.globals.format.unwrap_or(Format::Csv))?;
    emit(r.globals.output.as_deref(), &text)?;
    if let Some(p) = &r.globals.plot {
        write_plot(
            p,
            &line_plot(
                &format!("{} complexity", r.spec.family),
                "t",
                "C(t)",
                &tr.t,
                &[("C", &tr.c)],
            ),
        );
    }
    let violations = tr.violations(&r.spec, r.opts.tol);
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("violation: {v}");
        }
        return Err(CliError::Failure(format!(
            "{} invariant violation(s)",
            violations.len()
        )));
    }
    Ok(())
}

/// Outcome of one preset.
#[derive(Debug)]
pub struct ReproReport {
    pub id: &'static str,
    pub outcomes: Vec<presets::Outcome>,
    pub seconds: f64,
    pub error: Option<String>,
}

impl ReproReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.outcomes.iter().all(|o| o.passed || !o.enforced)
    }
}

/// Evaluate a preset and return the trace and its check outcomes.
pub fn repro_trace(
    preset: &Preset,
    tol: f64,
) -> Result<(ModelSpec, ComplexityTrace, Vec<presets::Outcome>), CliError> {
    let spec = preset.spec()?;
    let opts = RunOptions {
        method: Method::Both,
        tol,
        probabilities: preset.probabilities,
        cost_exponent: 1,
    };
    let mut grid = preset.grid();
    let mut tr = run_model(&spec, &grid, &opts)?;
    if preset.checks.iter().any(|c| {
        matches!(
            c,
            presets::Check::MaxC { .. } | presets::Check::Period { .. }
        )
    }) {
        // put the refined maxima on the grid so that the written trace
        // attains them
        let peaks = presets::local_maxima(&spec, &tr)?;
        if !peaks.is_empty() {
            grid.extend(peaks.iter().map(|p| p.0));
            grid.sort_by(f64::total_cmp);
            grid.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
            tr = run_model(&spec, &grid, &opts)?;
        }
    }
    let outcomes = presets::evaluate(preset, &spec, &tr)?;
    Ok((spec, tr, outcomes))
}

pub fn cmd_repro(id: &str, globals: &Globals) -> Result<(), CliError> {
    let targets: Vec<&Preset> = if id == "all" {
        presets::PRESETS.iter().collect()
    } else {
        vec![presets::find(id).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown figure '{id}'; choose one of: all, {}",
                presets::ids().join(", ")
            ))
        })?]
    };
    let dir = globals.output.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Failure(format!("cannot create {}: {e}", dir.display())))?;
    if let Some(p) = &globals.plot {
        if let Err(e) = std::fs::create_dir_all(p) {
            eprintln!("warning: cannot create plot directory {}: {e}", p.display());
        }
    }
    let format = globals.format.unwrap_or(Format::Csv);
    let mut failed = 0;
    for preset in targets {
        let start = Instant::now();
        let report = match repro_trace(preset, globals.tol()) {
            Ok((spec, tr, outcomes)) => {
                let ext = if format == Format::Csv { "csv" } else { "json" };
                emit(
                    Some(&dir.join(format!("{}.{ext}", preset.id))),
                    &render_trace(&spec, &tr, format)?,
                )?;
                if let Some(p) = &globals.plot {
                    let svg = line_plot(preset.id, "t", "C(t)", &tr.t, &[("C", &tr.c)]);
                    write_plot(&p.join(format!("{}.svg", preset.id)), &svg);
                }
                ReproReport {
                    id: preset.id,
                    outcomes,
                    seconds: start.elapsed().as_secs_f64(),
                    error: None,
                }
            }
            Err(e) => ReproReport {
                id: preset.id,
                outcomes: vec![],
                seconds: start.elapsed().as_secs_f64(),
                error: Some(e.to_string()),
            },
        };
        print_report(&report);
        if !report.passed() {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(CliError::Failure(format!(
            "{failed} figure(s) failed their checks"
        )));
    }
    Ok(())
}

fn print_report(r: &ReproReport) {
    let status = if r.passed() { "PASS" } else { "FAIL" };
    eprintln!("{} {status} ({:.3} s)", r.id, r.seconds);
    if let Some(e) = &r.error {
        eprintln!("  error: {e}");
    }
    for o in &r.outcomes {
        let tag = match (o.enforced, o.passed) {
            (false, _) => "info",
            (true, true) => "ok",
            (true, false) => "FAIL",
        };
        if o.enforced {
            eprintln!("  [{tag}] {}: {:.3e} (tol {:.1e})", o.name, o.value, o.tol);
        } else {
            eprintln!("  [{tag}] {}: {:.3e}", o.name, o.value);
        }
    }
}

pub fn parse_range(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("range '{s}' is not START:END:COUNT"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        if a != b {
            return Err(CliError::Usage(format!(
                "range '{s}' has one point but START != END"
            )));
        }
        return Ok(vec![a]);
    }
    Ok((0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect())
}

pub fn cmd_sweep(args: &SweepArgs, globals: &Globals) -> Result<(), CliError> {
    let cfg = load_config(&args.model)?;
    let need = |flag: &Option<String>, key: &str| -> Result<String, CliError> {
        match flag {
            Some(v) => Ok(v.clone()),
            None => cfg
                .str(key)?
                .ok_or_else(|| CliError::Usage(format!("--{key} is required"))),
        }
    };
    let (xp, yp) = (need(&args.x, "x")?, need(&args.y, "y")?);
    if xp == yp {
        return Err(CliError::Usage(
            "sweep axes must be different parameters".into(),
        ));
    }
    let x = SweepAxis {
        param: xp,
        values: parse_range(&need(&args.x_range, "x-range")?)?,
    };
    let y = SweepAxis {
        param: yp,
        values: parse_range(&need(&args.y_range, "y-range")?)?,
    };
    let r = resolve_with(
        &args.model,
        globals,
        &[
            (x.param.clone(), x.values[0]),
            (y.param.clone(), y.values[0]),
        ],
    )?;
    let summary: Summary = match args.summary.clone().or(r.config.str("summary")?) {
        Some(s) => s
            .parse()
            .map_err(|e: krylov_core::KrylovError| CliError::Usage(e.to_string()))?,
        None => Summary::CMax,
    };
    let base = r.spec.clone();
    let res = sweep(&base, &x, &y, &r.grid, &r.opts, summary)?;
    let text = match r.globals.format.unwrap_or(Format::Csv) {
        Format::Csv => sweep_csv(&res, base.family == Family::Su11TwoMode),
        Format::Json => serde_json::to_string_pretty(&res)
            .map(|s| s + "\n")
            .map_err(|e| CliError::Failure(e.to_string()))?,
    };
    emit(r.globals.output.as_deref(), &text)?;
    if r.globals.plot.is_some() {
        eprintln!("note: sweep output is tabular; --plot is ignored");
    }
    let failures = res.failures();
    if failures > 0 {
        eprintln!(
            "{failures} of {} cells failed; see the error column",
            res.cells.len()
        );
    }
    Ok(())
}

pub fn sweep_csv(res: &SweepResult, with_regime: bool) -> String {
    let mut out = format!("{},{},value", res.x.param, res.y.param);
    if with_regime {
        out.push_str(",regime");
    }
    out.push_str(",error\n");
    for c in &res.cells {
        out.push_str(&g17(c.x));
        out.push(',');
        out.push_str(&g17(c.y));
        out.push(',');
        if let Some(v) = c.value {
            out.push_str(&g17(v));
        }
        if with_regime {
            out.push(',');
            if let Some(r) = c.regime {
                out.push_str(r.label());
            }
        }
        out.push(',');
        if let Some(e) = &c.error {
            out.push('"');
            out.push_str(&e.replace('"', "\"\"").replace('\n', " "));
            out.push('"');
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

fn read_matrix_file(path: &Path) -> Result<MatrixFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn complex_entries(m: &MatrixFile, len: usize, what: &str) -> Result<Vec<Complex64>, CliError> {
    if m.re.len() != len || !(m.im.is_empty() || m.im.len() == len) {
        return Err(CliError::Usage(format!(
            "{what}: expected {len} entries in re (and im), got {} and {}",
            m.re.len(),
            m.im.len()
        )));
    }
    let v: Vec<Complex64> = (0..len)
        .map(|i| Complex64::new(m.re[i], m.im.get(i).copied().unwrap_or(0.0)))
        .collect();
    if v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(CliError::Usage(format!("{what}: entries must be finite")));
    }
    Ok(v)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LanczosRecord {
    pub method: String,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub basis: Option<Vec<MatrixFile>>,
}

pub fn lanczos_record(args: &LanczosArgs) -> Result<LanczosRecord, CliError> {
    let mf = read_matrix_file(&args.matrix)?;
    if mf.dim == 0 {
        return Err(CliError::Usage("matrix dim must be positive".into()));
    }
    let d = mf.dim;
    let h = CMat::from_row_slice(d, d, &complex_entries(&mf, d * d, "matrix")?);
    let mut seed = match &args.seed {
        Some(p) => {
            let sf = read_matrix_file(p)?;
            if sf.dim != d {
                return Err(CliError::Usage(format!(
                    "seed dim {} does not match matrix dim {d}",
                    sf.dim
                )));
            }
            CVec::from_vec(complex_entries(&sf, d, "seed")?)
        }
        None => {
            let mut e = CVec::zeros(d);
            e[0] = Complex64::new(1.0, 0.0);
            e
        }
    };
    let norm = seed.norm();
    if !(norm > 0.0) {
        return Err(CliError::Usage("seed vector is zero".into()));
    }
    seed /= Complex64::new(norm, 0.0);
    match args.method {
        LanczosMethod::Direct => {
            let tri = tridiagonalize(&h, &seed, default_breakdown_tol(&h))?;
            let basis = tri
                .basis
                .iter()
                .map(|v| MatrixFile {
                    dim: d,
                    re: v.iter().map(|z| z.re).collect(),
                    im: v.iter().map(|z| z.im).collect(),
                })
                .collect();
            Ok(LanczosRecord {
                method: "direct".into(),
                a: tri.a,
                b: tri.b,
                basis: Some(basis),
            })
        }
        LanczosMethod::Moments => {
            let order = (2 * d).min(MAX_MOMENT_ORDER);
            let mu = moments(&h, &seed, order)?;
            let tri = lanczos_from_moments(&mu)?;
            Ok(LanczosRecord {
                method: "moments".into(),
                a: tri.a,
                b: tri.b,
                basis: None,
            })
        }
    }
}

pub fn cmd_lanczos(args: &LanczosArgs, globals: &Globals) -> Result<(), CliError> {
    let rec = lanczos_record(args)?;
    let text = match globals.format.unwrap_or(Format::Json) {
        Format::Json => serde_json::to_string_pretty(&rec)
            .map(|s| s + "\n")
            .map_err(|e| CliError::Failure(e.to_string()))?,
        Format::Csv => {
            let mut s = String::from("n,a,b\n");
            for (n, a) in rec.a.iter().enumerate() {
                let b = if n == 0 {
                    String::new()
                } else {
                    rec.b.get(n - 1).map(|v| g17(*v)).unwrap_or_default()
                };
                s.push_str(&format!("{n},{},{b}\n", g17(*a)));
            }
            s
        }
    };
    emit(globals.output.as_deref(), &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_and_ranges() {
        assert!(time_grid(0.0, 0.0, 10).is_err());
        assert!(time_grid(0.0, 1.0, 1).is_err());
        assert!(time_grid(-1.0, 1.0, 3).is_err());
        assert_eq!(time_grid(0.0, 1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_range("0:3:61").unwrap().len(), 61);
        assert_eq!(parse_range("0:3:61").unwrap()[60], 3.0);
        assert_eq!(parse_range("2:2:1").unwrap(), vec![2.0]);
        assert!(parse_range("0:3").is_err());
        assert!(parse_range("0:1:0").is_err());
    }
}
