//! `stable-hcm`: command-line access to the stable-law checks and exports.
//!
//! Exit status: 0 when a check passes (or a data command succeeds), 1 when a
//! check fails, 2 on usage or domain errors. `--expect fail` swaps 0 and 1
//! for checks.

mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "stable-hcm", version, about = "Positive stable laws: densities, Beta/Gamma factorizations, HM/HCM checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the density of Z_α.
    Density(DensityArgs),
    /// Draw seeded samples of Z_α or of a truncated factorization.
    Sample(SampleArgs),
    /// Compare the quadrature Laplace transform with exp(-λ^α).
    LaplaceCheck(LaplaceArgs),
    /// Compare truncated-plan Mellin transforms with their closed forms.
    MellinCheck(MellinArgs),
    /// Forward-difference HCM test of H_u(w) = f(uv) f(u/v).
    HcmCheck(HcmArgs),
    /// Monotonicity (HM) test of H_u along a w-grid.
    HmCheck(HmArgs),
    /// Emit a factorization plan as JSON.
    Factorize(FactorizeArgs),
    /// Check exp(-(n-1)γ - Σ ψ(j/n)) = n^n.
    WilliamsCheck(WilliamsArgs),
    /// Check Malmsten's integral for ln Γ(a+s)/Γ(a).
    MalmstenCheck(MalmstenArgs),
    /// Tail sum of the log-factor variances of the inverse-stable plan.
    TailVariance(TailArgs),
    /// Tabulate the density of Γ_c × B × … × B.
    ProductDensity(ProductArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Pass,
    Fail,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanKind {
    #[value(name = "inverse-stable", alias = "lemma2")]
    InverseStable,
    #[value(name = "gamma", alias = "lemma3")]
    Gamma,
    #[value(name = "theorem-decomposition", alias = "theorem")]
    TheoremDecomposition,
    #[value(name = "power-alpha", alias = "power")]
    PowerAlpha,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityMethod {
    /// Series with integral fallback.
    Auto,
    /// Kanter's integral.
    Integral,
    /// Closed form, α = 1/2 only.
    Closed,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleSource {
    /// Kanter's exact sampler.
    Exact,
    /// Truncated Beta-product plan.
    Plan,
}

#[derive(Args, Debug)]
pub struct Output {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true, default_value = "text")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct Grid {
    /// Evaluation points (comma separated or repeated).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub x: Vec<f64>,
    /// Log-spaced grid from --xmin to --xmax with --points nodes.
    #[arg(long, requires_all = ["xmax", "points"], conflicts_with = "x")]
    pub xmin: Option<f64>,
    #[arg(long)]
    pub xmax: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[arg(long)]
    pub alpha: f64,
    #[command(flatten)]
    pub grid: Grid,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: DensityMethod,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct PlanSelect {
    #[arg(long, value_enum, default_value = "inverse-stable")]
    pub plan: PlanKind,
    /// Stable index for inverse-stable, theorem-decomposition and power-alpha plans.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Gamma-plan shape.
    #[arg(long)]
    pub a: Option<f64>,
    /// Gamma-plan step.
    #[arg(long)]
    pub b: Option<f64>,
    /// Truncation index N.
    #[arg(long, default_value_t = 200)]
    pub terms: usize,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value = "exact")]
    pub source: SampleSource,
    #[command(flatten)]
    pub plan: PlanSelect,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct CheckFlags {
    /// Expected verdict; `fail` makes a failed check exit 0.
    #[arg(long, value_enum, default_value = "pass")]
    pub expect: Expect,
}

#[derive(Args, Debug)]
pub struct LaplaceArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "1")]
    pub lambda: Vec<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub check: CheckFlags,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct MellinArgs {
    #[command(flatten)]
    pub plan: PlanSelect,
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "1")]
    pub s: Vec<f64>,
    /// Largest accepted relative error.
    #[arg(long, default_value_t = 5e-3)]
    pub tol: f64,
    #[command(flatten)]
    pub check: CheckFlags,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct DensitySelect {
    /// Density of Z_α (or of Z_α^q with --power).
    #[arg(long, conflicts_with = "gamma")]
    pub alpha: Option<f64>,
    /// Use the density of Z_α^q.
    #[arg(long, requires = "alpha")]
    pub power: Option<f64>,
    /// Gamma shape of a product density.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Beta factor `a,b` of a product density (repeatable).
    #[arg(long, value_parser = parse_pair)]
    pub beta: Vec<(f64, f64)>,
}

#[derive(Args, Debug)]
pub struct HcmArgs {
    #[command(flatten)]
    pub density: DensitySelect,
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "1")]
    pub u: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub wmin: f64,
    #[arg(long, default_value_t = 40.0)]
    pub wmax: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Grid spacing; defaults to --delta.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, default_value_t = stable_hcm::hcm::DEFAULT_MAX_ORDER)]
    pub order: usize,
    #[arg(long, default_value_t = stable_hcm::hcm::DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[command(flatten)]
    pub check: CheckFlags,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct HmArgs {
    #[command(flatten)]
    pub density: DensitySelect,
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "0.5,1,2")]
    pub u: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub wmin: f64,
    #[arg(long, default_value_t = 50.0)]
    pub wmax: f64,
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub epsilon: f64,
    #[command(flatten)]
    pub check: CheckFlags,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct FactorizeArgs {
    #[command(flatten)]
    pub plan: PlanSelect,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct WilliamsArgs {
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "2,3,4,5,6")]
    pub n: Vec<u32>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub check: CheckFlags,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct MalmstenArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub s: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub check: CheckFlags,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct TailArgs {
    #[arg(long)]
    pub alpha: f64,
    /// First index of the tail.
    #[arg(long, default_value_t = 0)]
    pub from: usize,
    #[command(flatten)]
    pub check: CheckFlags,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct ProductArgs {
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_parser = parse_pair)]
    pub beta: Vec<(f64, f64)>,
    /// Evaluation points; the default grid is used when omitted.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub x: Vec<f64>,
    #[command(flatten)]
    pub output: Output,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let a = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

/// What a subcommand produced.
pub struct Report {
    pub body: String,
    /// `None` for data commands, otherwise whether the check passed.
    pub passed: Option<bool>,
    pub expect: Expect,
}

fn emit(body: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, body),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = commands::output_of(&cli.command).out.clone();
    match commands::run(&cli.command) {
        Ok(report) => {
            if let Err(e) = emit(&report.body, out.as_ref()) {
                eprintln!("stable-hcm: cannot write output: {e}");
                return ExitCode::from(2);
            }
            match report.passed {
                None => ExitCode::SUCCESS,
                Some(passed) => {
                    if passed == (report.expect == Expect::Pass) {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
            }
        }
        Err(e) => {
            eprintln!("stable-hcm: {e}");
            ExitCode::from(2)
        }
    }
}
