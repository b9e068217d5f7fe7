//! The `ordstat` command-line front end.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or
//! validation error, 3 runtime error.

mod format;

pub use format::significant;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::experiment::{run_experiment, write_curve_csv, AnalysisReport, RunConfig, UndefinedPolicy};
use crate::model::UncertainModel;
use crate::oracle::{builtin_fixtures, load_fixtures, verify_inequality_suite, verify_planner_suite, Verdict, SUITE_TRIALS};
use crate::stats::{lower_bound_confidence, min_sample_size_extreme, min_sample_size_tolerance, upper_bound_confidence};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Environment variable supplying the default `--workers`.
pub const WORKERS_ENV: &str = "ORDSTAT_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "ordstat", version, about = "Order-statistics confidence calculus for randomized robustness analysis")]
struct Cli {
    /// Worker threads for sampling and simulation (0 = one per core)
    #[arg(long, global = true, env = WORKERS_ENV, default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimum sample size for an accuracy/risk pair
    Plan(PlanArgs),
    /// Confidence bound for an order-statistic estimate of an extremum
    Confidence(ConfidenceArgs),
    /// Sample a model, write a JSON report and a tradeoff-curve CSV
    Analyze(AnalyzeArgs),
    /// Run the simulation and exhaustive-search cross-checks
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlanMode {
    /// û_N bounds the maximum: (1 - ε)^N <= δ
    Extreme,
    /// (û_1, û_N] is a tolerance interval: μ(N) <= δ
    Tolerance,
}

#[derive(Debug, Args)]
struct PlanArgs {
    /// Accuracy level ε in (0, 1)
    #[arg(long, value_parser = open_unit)]
    epsilon: f64,
    /// Risk level δ in (0, 1)
    #[arg(long, value_parser = open_unit)]
    delta: f64,
    #[arg(long, value_enum)]
    mode: PlanMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    /// û_n as an upper estimate of the maximum (needs --n)
    Upper,
    /// û_m as a lower estimate of the minimum (needs --m)
    Lower,
}

#[derive(Debug, Args)]
struct ConfidenceArgs {
    #[arg(long, value_enum)]
    side: Side,
    /// Order-statistic index for --side upper (1..=N)
    #[arg(long = "n", value_name = "INDEX")]
    upper_index: Option<u64>,
    /// Order-statistic index for --side lower (1..=N)
    #[arg(long = "m", value_name = "INDEX")]
    lower_index: Option<u64>,
    /// Sample size
    #[arg(long = "N", value_name = "SIZE")]
    sample_size: u64,
    /// Accuracy level ε in (0, 1)
    #[arg(long, value_parser = open_unit)]
    epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnUndefined {
    /// Discard the sample and draw again (up to 10^4 times per sample)
    Resample,
    /// Stop with exit code 3
    Fail,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Model file (JSON: label, domain, expression)
    #[arg(long)]
    model: PathBuf,
    /// Sample size
    #[arg(long = "N", value_name = "SIZE")]
    sample_size: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Accuracy level ε in (0, 1)
    #[arg(long, value_parser = open_unit)]
    epsilon: f64,
    /// Risk level δ in (0, 1) for the planner echo [default: ε]
    #[arg(long, value_parser = open_unit)]
    delta: Option<f64>,
    /// Lower index of the tolerance interval (û_m, û_n]
    #[arg(long = "m", value_name = "INDEX", default_value_t = 1)]
    lower_index: u64,
    /// Upper index of the tolerance interval [default: N]
    #[arg(long = "n", value_name = "INDEX")]
    upper_index: Option<u64>,
    /// First index of the tradeoff curve, which runs up to N
    #[arg(long, value_name = "INDEX", default_value_t = 1)]
    curve_from: u64,
    /// Output directory for report.json and curve.csv
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = OnUndefined::Resample)]
    on_undefined: OnUndefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Inequality,
    Planner,
    All,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Simulation trials per query
    #[arg(long, default_value_t = SUITE_TRIALS)]
    trials: u64,
    /// JSON fixture file replacing the built-in inequality fixtures
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Also write the verdicts as JSON to this file
    #[arg(long)]
    json: Option<PathBuf>,
}

fn open_unit(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err("must lie in the open interval (0, 1)".into())
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
    Checks(usize),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Runtime(_) => EXIT_RUNTIME,
            Failure::Checks(_) => EXIT_CHECK_FAILED,
        }
    }
}

type Outcome = Result<(), Failure>;

fn usage(message: impl Into<String>) -> Failure {
    Failure::Usage(message.into())
}

fn runtime(message: impl std::fmt::Display) -> Failure {
    Failure::Runtime(message.to_string())
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Plan(a) => plan(a, out),
        Command::Confidence(a) => confidence(a, out),
        Command::Analyze(a) => analyze(a, cli.workers, out),
        Command::Verify(a) => verify(a, cli.workers, out),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            match &failure {
                Failure::Usage(m) | Failure::Runtime(m) => {
                    let _ = writeln!(err, "error: {m}");
                }
                Failure::Checks(n) => {
                    let _ = writeln!(err, "error: {n} check(s) failed");
                }
            }
            failure.code()
        }
    }
}

fn io_runtime(path: &Path, e: std::io::Error) -> Failure {
    runtime(format!("{}: {e}", path.display()))
}

fn plan(a: PlanArgs, out: &mut dyn Write) -> Outcome {
    let (name, n) = match a.mode {
        PlanMode::Extreme => ("extreme", min_sample_size_extreme(a.epsilon, a.delta)),
        PlanMode::Tolerance => ("tolerance", min_sample_size_tolerance(a.epsilon, a.delta)),
    };
    let n = n.map_err(runtime)?;
    writeln!(out, "mode = {name}, epsilon = {}, delta = {}", a.epsilon, a.delta).map_err(runtime)?;
    writeln!(out, "N = {n}").map_err(runtime)
}

fn confidence(a: ConfidenceArgs, out: &mut dyn Write) -> Outcome {
    let n = a.sample_size;
    if n == 0 {
        return Err(usage("--N must be at least 1"));
    }
    let (flag, index) = match a.side {
        Side::Upper => ("--n", a.upper_index),
        Side::Lower => ("--m", a.lower_index),
    };
    let index = index.ok_or_else(|| usage(format!("{flag} is required for this --side")))?;
    if !(1..=n).contains(&index) {
        return Err(usage(format!("{flag} must lie in 1..={n}, got {index}")));
    }
    let e = a.epsilon;
    match a.side {
        Side::Upper => {
            let p = upper_bound_confidence(index, n, e).map_err(runtime)?;
            writeln!(out, "P{{P{{u > û_{index}}} <= {e}}} >= {}  (N = {n})", significant(p, 6)).map_err(runtime)?;
            writeln!(out, "tight iff sup{{F(x) : F(x) < 1 - ε}} = 1 - ε, e.g. when the CDF of u is continuous")
                .map_err(runtime)
        }
        Side::Lower => {
            let p = lower_bound_confidence(index, n, e).map_err(runtime)?;
            writeln!(out, "P{{P{{u < û_{index}}} <= {e}}} >= {}  (N = {n})", significant(p, 6)).map_err(runtime)?;
            writeln!(out, "tight iff inf{{F(x) : F(x) > ε}} = ε, e.g. when the CDF of u is continuous").map_err(runtime)
        }
    }
}

fn analyze(a: AnalyzeArgs, workers: usize, out: &mut dyn Write) -> Outcome {
    let text = fs::read_to_string(&a.model).map_err(|e| usage(format!("{}: {e}", a.model.display())))?;
    let model = UncertainModel::from_json_str(&text).map_err(|e| usage(format!("{}: {e}", a.model.display())))?;
    let n = a.sample_size;
    if n == 0 {
        return Err(usage("--N must be at least 1"));
    }
    let (m, upper) = (a.lower_index, a.upper_index.unwrap_or(n));
    if !(1 <= m && m < upper && upper <= n) {
        return Err(usage(format!("tolerance indices need 1 <= m < n <= N, got m = {m}, n = {upper}, N = {n}")));
    }
    if !(1..=n).contains(&a.curve_from) {
        return Err(usage(format!("--curve-from must lie in 1..={n}")));
    }
    let delta = a.delta.unwrap_or(a.epsilon);
    let policy = match a.on_undefined {
        OnUndefined::Resample => UndefinedPolicy::Resample,
        OnUndefined::Fail => UndefinedPolicy::Fail,
    };
    let stats = run_experiment(&model, n, a.seed, RunConfig { workers, policy }).map_err(runtime)?;
    let report = AnalysisReport::build(&stats, model.source(), a.epsilon, delta, (m, upper), a.curve_from..=n)
        .map_err(runtime)?;

    fs::create_dir_all(&a.out).map_err(|e| io_runtime(&a.out, e))?;
    let report_path = a.out.join("report.json");
    let mut json = serde_json::to_string_pretty(&report).map_err(runtime)?;
    json.push('\n');
    fs::write(&report_path, json).map_err(|e| io_runtime(&report_path, e))?;
    let curve_path = a.out.join("curve.csv");
    let file = fs::File::create(&curve_path).map_err(|e| io_runtime(&curve_path, e))?;
    write_curve_csv(std::io::BufWriter::new(file), &report.curve).map_err(|e| io_runtime(&curve_path, e))?;

    let s = |x: f64| significant(x, 6);
    let x = &report.extremes;
    let t = &report.tolerance;
    let p = &report.planner;
    let lines = [
        format!("model        {}", report.label),
        format!("u(q)         {}", report.expression),
        format!("samples      N = {n}, seed = {}, rejected = {}", a.seed, report.rejected),
        format!("minimum      û_1 = {}  confidence {}", s(x.minimum), s(x.minimum_confidence)),
        format!("maximum      û_{n} = {}  confidence {}", s(x.maximum), s(x.maximum_confidence)),
        format!("tolerance    (û_{m}, û_{upper}] = ({}, {}]  confidence {}", s(t.lower), s(t.upper), s(t.confidence)),
        format!(
            "planner      ε = {}, δ = {}: extreme N >= {}, tolerance N >= {}",
            p.epsilon, p.delta, p.extreme_sample_size, p.tolerance_sample_size
        ),
        format!("wrote        {}, {}", report_path.display(), curve_path.display()),
    ];
    for line in lines {
        writeln!(out, "{line}").map_err(runtime)?;
    }
    Ok(())
}

fn verify(a: VerifyArgs, workers: usize, out: &mut dyn Write) -> Outcome {
    let mut verdicts: Vec<(&str, Verdict)> = Vec::new();
    if matches!(a.suite, Suite::Planner | Suite::All) {
        verdicts.extend(verify_planner_suite().map_err(runtime)?.into_iter().map(|v| ("planner", v)));
    }
    if matches!(a.suite, Suite::Inequality | Suite::All) {
        let fixtures = match &a.fixtures {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                load_fixtures(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
            }
            None => builtin_fixtures(),
        };
        let found = verify_inequality_suite(&fixtures, a.seed, a.trials, workers).map_err(|e| match e {
            crate::oracle::OracleError::TooFewTrials(_) => usage(e.to_string()),
            other => runtime(other),
        })?;
        verdicts.extend(found.into_iter().map(|v| ("inequality", v)));
    }
    let mut failed = 0;
    for (suite, v) in &verdicts {
        let flag = if v.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!v.pass);
        let sigma = if v.sigma > 0.0 { format!(" sigma={}", significant(v.sigma, 3)) } else { String::new() };
        writeln!(
            out,
            "{flag} {suite} {} {}: expected={} observed={}{sigma}",
            v.fixture,
            v.check,
            significant(v.expected, 6),
            significant(v.observed, 6)
        )
        .map_err(runtime)?;
    }
    writeln!(out, "{}/{} checks passed", verdicts.len() - failed, verdicts.len()).map_err(runtime)?;
    if let Some(path) = &a.json {
        let list: Vec<&Verdict> = verdicts.iter().map(|(_, v)| v).collect();
        let mut json = serde_json::to_string_pretty(&list).map_err(runtime)?;
        json.push('\n');
        fs::write(path, json).map_err(|e| io_runtime(path, e))?;
    }
    if failed > 0 {
        Err(Failure::Checks(failed))
    } else {
        Ok(())
    }
}
