//! Command-line front end: `fit`, `simulate`, `qq` and `larynx`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::dataset::{self, Dataset, DatasetSummary};
use crate::error::{Error, ErrorFamily, Result};
use crate::kernel::{Bandwidth, KernelSpec};
use crate::montecarlo::{
    run_monte_carlo, CensorRelation, McConfig, McReport, Quantity, ScenarioSpec, Tuning,
};
use crate::survival::HazardVariant;
use crate::tail::{weissman_from_estimate, ConditionalTail, QuantileEstimate, TailEstimate, TailVariant};
use crate::tuning::{cv_bandwidth_traced, select_k, BandwidthGrid};

/// Overrides the default output directory (`weibtail-out`).
pub const OUT_DIR_ENV: &str = "WEIBTAIL_OUT_DIR";

pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

/// Process exit code for an error: 2 for input/parse failures, 3 for bad
/// configuration, 10-15 for estimation failures.
pub fn exit_code(e: &Error) -> i32 {
    match e.family() {
        ErrorFamily::Parse => EXIT_PARSE,
        ErrorFamily::Config => EXIT_CONFIG,
        ErrorFamily::Estimation => match e {
            Error::EmptyNeighborhood { .. } => 10,
            Error::InvalidK { .. } => 11,
            Error::ZeroHazardAtThreshold => 12,
            Error::ZeroDenominator => 13,
            Error::NonPositiveData => 14,
            _ => 15,
        },
    }
}

#[derive(Debug, Parser)]
#[command(name = "weibtail", version, about = "Conditional Weibull-tail estimation for censored data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the tail coefficient and an extreme quantile at given covariate values.
    Fit(FitArgs),
    /// Run the simulation study and write report.csv / report.json.
    Simulate(SimulateArgs),
    /// Emit Weibull QQ-plot coordinates as CSV.
    Qq(QqArgs),
    /// Write the bundled larynx-cancer dataset as CSV.
    Larynx {
        /// Destination file (standard output when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Dataset CSV with columns time, delta, covariate (and optionally id).
    #[arg(long, required_unless_present = "larynx")]
    input: Option<PathBuf>,
    /// Use the bundled larynx-cancer dataset.
    #[arg(long, conflicts_with = "input")]
    larynx: bool,
}

impl InputArgs {
    fn load(&self) -> Result<(Dataset, String)> {
        match &self.input {
            Some(p) => Ok((dataset::load_csv(p)?, p.display().to_string())),
            None => Ok((dataset::larynx(), "larynx (bundled)".into())),
        }
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Covariate values to evaluate at (repeatable or comma separated; default: median).
    #[arg(long = "x", value_delimiter = ',')]
    x: Vec<f64>,
    /// Threshold counts (repeatable or comma separated; default: block rule).
    #[arg(long = "k", value_delimiter = ',')]
    k: Vec<usize>,
    /// Bandwidth (default: cross-validation).
    #[arg(long, conflicts_with = "uniform_weights")]
    h: Option<f64>,
    /// Cross-validation grid (comma separated, strictly increasing).
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["h", "uniform_weights"])]
    grid: Vec<f64>,
    /// Equal weights for every observation (infinite bandwidth).
    #[arg(long)]
    uniform_weights: bool,
    /// Survival level p of the extreme quantile, P(Y > q | x) = p.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value = "biquadratic")]
    kernel: KernelSpec,
    #[arg(long, default_value = "neg-log-km")]
    hazard: HazardVariant,
    /// censored, complete-hazard or complete-literal.
    #[arg(long, default_value = "censored")]
    variant: TailVariant,
    /// JSON output path (default: <out dir>/fit.json).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    /// lt (gamma_Y < gamma_C), eq or gt.
    #[arg(long, default_value = "lt")]
    scenario: CensorRelation,
    /// Censoring shape ratio gamma_C / gamma_Y (default 1.5, 1 or 2/3 by scenario).
    #[arg(long)]
    censor_ratio: Option<f64>,
    #[arg(long)]
    seed: u64,
    /// Covariate values (comma separated; default 0.1..0.9).
    #[arg(long, value_delimiter = ',')]
    x_grid: Vec<f64>,
    /// Tail probability alpha_n; quantiles target survival level 1 - alpha_n.
    #[arg(long, default_value_t = 0.001)]
    alpha: f64,
    #[arg(long, default_value = "biquadratic")]
    kernel: KernelSpec,
    #[arg(long, default_value = "neg-log-km")]
    hazard: HazardVariant,
    /// Variant for the two complete-data estimators.
    #[arg(long, default_value = "complete-hazard")]
    complete_variant: TailVariant,
    /// Fixed bandwidth (requires --k).
    #[arg(long, requires = "k", conflicts_with = "auto")]
    h: Option<f64>,
    /// Fixed threshold count (requires --h).
    #[arg(long, requires = "h", conflicts_with = "auto")]
    k: Option<usize>,
    /// Cross-validated h and block-rule k in every replication (the default).
    #[arg(long)]
    auto: bool,
    /// Cross-validation grid for auto mode (comma separated).
    #[arg(long, value_delimiter = ',', conflicts_with = "h")]
    grid: Vec<f64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory (default: <out dir>).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct QqArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    k: usize,
    /// Destination file (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("weibtail-out"))
}

/// Parses `args` (including the program name) and runs the command, returning
/// the process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut stdout = std::io::stdout().lock();
    match dispatch(cli.command, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn std::io::Write) -> Result<()> {
    match cmd {
        Command::Fit(a) => {
            let report = fit(&a)?;
            out.write_all(report.table().as_bytes())?;
            let path = a.out.clone().unwrap_or_else(|| default_out_dir().join("fit.json"));
            write_file(&path, &(serde_json::to_string_pretty(&report).map_err(json_err)? + "\n"))?;
            writeln!(out, "wrote {}", path.display())?;
        }
        Command::Simulate(a) => {
            let report = simulate(&a)?;
            out.write_all(simulation_table(&report).as_bytes())?;
            let dir = a.out.clone().unwrap_or_else(default_out_dir);
            let (c, j) = report.write_files(&dir, "report")?;
            writeln!(out, "wrote {} and {}", c.display(), j.display())?;
        }
        Command::Qq(a) => {
            let (data, _) = a.input.load()?;
            let pts = dataset::qq_points(&data.sample, a.k)?;
            let mut csv = String::from("loglog_n_over_i,log_z\n");
            for p in pts {
                let _ = writeln!(csv, "{},{}", p.u, p.v);
            }
            emit(&a.out, &csv, out)?;
        }
        Command::Larynx { out: path } => emit(&path, dataset::larynx_csv(), out)?,
    }
    Ok(())
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

fn emit(path: &Option<PathBuf>, contents: &str, out: &mut dyn std::io::Write) -> Result<()> {
    match path {
        Some(p) => write_file(p, contents),
        None => Ok(out.write_all(contents.as_bytes())?),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandwidthSource {
    User,
    CrossValidation,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvTrace {
    pub grid: Vec<f64>,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRow {
    pub x: f64,
    pub k_selected: bool,
    pub estimate: TailEstimate,
    pub quantile: QuantileEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub input: String,
    pub summary: DatasetSummary,
    pub kernel: KernelSpec,
    pub hazard: HazardVariant,
    pub variant: TailVariant,
    /// `None` when every observation is weighted equally.
    pub h: Option<f64>,
    pub h_source: BandwidthSource,
    pub cv: Option<CvTrace>,
    pub survival_level: f64,
    pub rows: Vec<FitRow>,
}

impl FitReport {
    pub fn table(&self) -> String {
        let mut s = String::new();
        let h = self.h.map_or("uniform".to_string(), |h| format!("{h:.4}"));
        let _ = writeln!(
            s,
            "{}: n = {}, uncensored = {}, h = {} ({:?}), kernel = {}, hazard = {}",
            self.input, self.summary.n, self.summary.uncensored, h, self.h_source, self.kernel, self.hazard.name()
        );
        let _ = writeln!(
            s,
            "{:>10} {:>5} {:>10} {:>10} {:>10} {:>12}",
            "x", "k", "gamma", "y_n", "Lambda(y_n)", format!("q({})", self.survival_level)
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:>10.4} {:>5} {:>10.4} {:>10.4} {:>10.4} {:>12.4}",
                r.x,
                r.estimate.k,
                r.estimate.gamma_hat,
                r.estimate.y_n,
                r.quantile.anchor.hazard_at_threshold,
                r.quantile.q_hat
            );
        }
        s
    }
}

fn fit(a: &FitArgs) -> Result<FitReport> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(Error::Config(format!("--alpha must lie in (0, 1), got {}", a.alpha)));
    }
    if a.variant == TailVariant::Unconditional {
        return Err(Error::Config(
            "fit supports censored, complete-hazard and complete-literal; use --uniform-weights for the unweighted estimator".into(),
        ));
    }
    let (data, input) = a.input.load()?;
    let summary = data.summary();
    let sample = &data.sample;

    let (h, h_source, cv) = if a.uniform_weights {
        (Bandwidth::infinite(), BandwidthSource::Uniform, None)
    } else if let Some(h) = a.h {
        (Bandwidth::new(h)?, BandwidthSource::User, None)
    } else {
        let grid = if a.grid.is_empty() {
            BandwidthGrid::default_for(sample)?
        } else {
            BandwidthGrid::new(a.grid.clone())?
        };
        let (h, scores) = cv_bandwidth_traced(sample, &grid, a.kernel);
        let trace = CvTrace { grid: grid.candidates().to_vec(), scores };
        (h, BandwidthSource::CrossValidation, Some(trace))
    };

    let xs = if a.x.is_empty() { vec![summary.covariate_median] } else { a.x.clone() };
    let mut rows = Vec::new();
    for &x in &xs {
        let tail = ConditionalTail::new(sample, x, h, a.kernel, a.hazard)?;
        let (ks, selected) = if a.k.is_empty() {
            (vec![select_k(&tail.sweep(a.variant)).chosen_k], true)
        } else {
            (a.k.clone(), false)
        };
        for k in ks {
            let estimate = tail.estimate(k, a.variant)?;
            let quantile = weissman_from_estimate(a.alpha, &estimate)?;
            rows.push(FitRow { x, k_selected: selected, estimate, quantile });
        }
    }
    Ok(FitReport {
        input,
        summary,
        kernel: a.kernel,
        hazard: a.hazard,
        variant: a.variant,
        h: (!h.is_infinite()).then(|| h.get()),
        h_source,
        cv,
        survival_level: a.alpha,
        rows,
    })
}

fn simulate(a: &SimulateArgs) -> Result<McReport> {
    let scenario = match a.censor_ratio {
        Some(c) => ScenarioSpec::new(a.scenario, c)?,
        None => ScenarioSpec::standard(a.scenario),
    };
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(Error::Config(format!("--alpha must lie in (0, 1), got {}", a.alpha)));
    }
    let mut config = McConfig::new(a.n, a.reps, a.seed);
    if !a.x_grid.is_empty() {
        config.x_grid = a.x_grid.clone();
    }
    config.survival_level = 1.0 - a.alpha;
    config.kernel = a.kernel;
    config.hazard_variant = a.hazard;
    config.complete_variant = a.complete_variant;
    config.tuning = match (a.h, a.k) {
        (Some(h), Some(k)) => Tuning::Fixed { h, k },
        _ => Tuning::Auto { grid: (!a.grid.is_empty()).then(|| a.grid.clone()) },
    };
    config.validate()?;
    match a.threads {
        Some(0) => Err(Error::Config("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| run_monte_carlo(&config, &scenario)),
        None => run_monte_carlo(&config, &scenario),
    }
}

fn simulation_table(r: &McReport) -> String {
    let m = &r.metadata;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "scenario {} (censor ratio {:.4}), n = {}, reps = {}, seed = {}, censored fraction {:.4}",
        m.scenario.relation.code(),
        m.scenario.censor_ratio,
        m.config.n,
        m.config.reps,
        m.config.seed,
        m.mean_censoring_fraction
    );
    let _ = writeln!(s, "{:>6} {:>24} {:>10} {:>10} {:>10} {:>6}", "x", "estimator", "truth", "mse", "mae", "used");
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
    for q in [Quantity::Gamma, Quantity::Quantile] {
        for &x in &m.config.x_grid {
            for &e in &m.config.estimators {
                if let Some(c) = r.cell(x, e, q) {
                    let _ = writeln!(
                        s,
                        "{:>6.2} {:>24} {:>10.4} {:>10} {:>10} {:>6}",
                        x,
                        c.label(),
                        c.truth,
                        fmt(c.mse),
                        fmt(c.mae),
                        c.reps_used
                    );
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct_per_family() {
        assert_eq!(exit_code(&Error::Parse { line: 3, message: String::new() }), 2);
        assert_eq!(exit_code(&Error::EmptyFile), 2);
        assert_eq!(exit_code(&Error::Config(String::new())), 3);
        assert_eq!(exit_code(&Error::ZeroHazardAtThreshold), 12);
        assert_eq!(exit_code(&Error::EmptyNeighborhood { x: 0.0 }), 10);
    }

    #[test]
    fn clap_errors_are_config_errors() {
        assert_eq!(run(["weibtail", "simulate"]), EXIT_CONFIG); // missing --seed
        assert_eq!(run(["weibtail", "fit", "--larynx", "--k", "x"]), EXIT_CONFIG);
        assert_eq!(run(["weibtail", "bogus"]), EXIT_CONFIG);
    }

    #[test]
    fn fit_larynx_uniform_weights() {
        let args = FitArgs::try_parse_args(&["--larynx", "--uniform-weights", "--k", "37"]);
        let r = fit(&args).unwrap();
        assert_eq!(r.h, None);
        assert_eq!(r.rows.len(), 1);
        let q = r.rows[0].quantile.q_hat;
        assert!((18.0..=26.0).contains(&q), "q = {q}");
    }

    impl FitArgs {
        fn try_parse_args(args: &[&str]) -> FitArgs {
            let mut full = vec!["weibtail", "fit"];
            full.extend_from_slice(args);
            match Cli::try_parse_from(full).unwrap().command {
                Command::Fit(a) => a,
                _ => unreachable!(),
            }
        }
    }
}
