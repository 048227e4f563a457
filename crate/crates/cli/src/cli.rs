use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "krylov",
    version,
    about = "Krylov spread complexity of driven quantum-optical models"
)]
pub struct Cli {
    /// Output file (run, sweep, lanczos) or directory (repro). Default: stdout / current directory.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// SVG plot path (a directory for repro).
    #[arg(long, global = true)]
    pub plot: Option<PathBuf>,
    /// Route tolerance [default: 1e-8].
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads, 0 = all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regenerate a figure preset (or `all`) and enforce its checks.
    Repro { figure_id: String },
    /// Evaluate one model on a time grid.
    #[command(allow_negative_numbers = true)]
    Run(ModelArgs),
    /// Summary statistic over a two-parameter grid.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Lanczos coefficients of a Hermitian matrix from a JSON file.
    Lanczos(LanczosArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Flat JSON object with the same keys as the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// su2-static, su2-driven, su2-damped, su2-kicked, h1, su11, quench, su3
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub j: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Detuning omega0 - omega; constant energy shift for su2-static.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub b0: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub f0: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    /// Bargmann index of the two-mode sector [default: 0.5].
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub eta0: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub g1: Option<f64>,
    #[arg(long)]
    pub g2: Option<f64>,
    /// Kick period.
    #[arg(long = "T", alias = "period")]
    pub period: Option<f64>,
    #[arg(long)]
    pub chi: Option<f64>,
    /// Number of kicks for su2-kicked [default: 100].
    #[arg(long)]
    pub k_max: Option<u64>,
    /// Fock truncation for the infinite-dimensional families.
    #[arg(long)]
    pub truncation: Option<usize>,
    #[arg(long)]
    pub t_start: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// closed, numeric or both [default: closed].
    #[arg(long)]
    pub method: Option<String>,
    /// Emit Krylov-basis probabilities p0..pN.
    #[arg(long)]
    pub probabilities: bool,
    /// Cost weights c_n = n^k with k in {1, 2} [default: 1].
    #[arg(long)]
    pub cost_exponent: Option<u32>,
}

impl ModelArgs {
    pub fn flag_params(&self) -> BTreeMap<&'static str, f64> {
        let pairs = [
            ("j", self.j),
            ("alpha", self.alpha),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("omega0", self.omega0),
            ("omega", self.omega),
            ("b0", self.b0),
            ("eta", self.eta),
            ("f0", self.f0),
            ("g", self.g),
            ("h", self.h),
            ("eta0", self.eta0),
            ("tau", self.tau),
            ("g1", self.g1),
            ("g2", self.g2),
            ("T", self.period),
            ("chi", self.chi),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k, v)))
            .collect()
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Parameter on the first axis.
    #[arg(long)]
    pub x: Option<String>,
    /// START:END:COUNT
    #[arg(long)]
    pub x_range: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    #[arg(long)]
    pub y_range: Option<String>,
    /// c-max or c-saturation [default: c-max].
    #[arg(long)]
    pub summary: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct LanczosArgs {
    /// JSON with "dim" and row-major "re" and "im".
    #[arg(long)]
    pub matrix: PathBuf,
    /// JSON with "dim", "re" and optional "im" [default: first basis vector].
    #[arg(long)]
    pub seed: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "direct")]
    pub method: LanczosMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LanczosMethod {
    Direct,
    Moments,
}
