//! The `pdik` command line: `test`, `certify`, `bernstein-check` and `demo`.
//!
//! Every run produces a [`ReportRecord`]. Exit codes: 0 on success, 1 when a
//! certification is rejected, a self-check fails, or (with
//! `--fail-on-dependence`) `p ≤ α`, and 2 on any input or usage error.
//! Errors are reported as one line on stderr starting with `pdik-error[kind]:`.

pub mod config;
pub mod io;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::{json, Value};

use crate::certify::{certify, Constraint, Verdict, DEFAULT_TOLERANCE};
use crate::cnd::CndKernelSpec;
use crate::error::Error;
use crate::independence::{intro_identity, permutation_test, PairedSample};
use crate::pdi::{gram_pdi, PdiKernelSpec, ProductGrid};
use crate::special::{Cm2Spec, QuadratureGrid};

pub use config::{parse_kernel_config, render_kernel_config};
pub use io::{load_matrix, load_sample};
pub use report::{emit_report, parse_report, Format, ReportRecord};

/// Everything that can go wrong before a result exists. All map to exit code 2.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("non-numeric cell at row {row}, column `{col}`")]
    NonNumericCell { row: usize, col: String },
    #[error("no data rows in {0}")]
    EmptyFile(String),
    #[error("matrix line {line}: {message}")]
    Matrix { line: usize, message: String },
    #[error("config line {line}, field `{field}`: {message}")]
    Config { line: usize, field: String, message: String },
    #[error("{0}")]
    Kernel(#[from] Error),
}

impl CliError {
    /// Short tag used in the diagnostic prefix.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::MissingColumn(_) => "missing-column",
            CliError::NonNumericCell { .. } => "non-numeric-cell",
            CliError::EmptyFile(_) => "empty-file",
            CliError::Matrix { .. } => "matrix",
            CliError::Config { .. } => "config",
            CliError::Kernel(_) => "kernel",
        }
    }

    /// `pdik-error[kind]: message` on a single line.
    pub fn diagnostic(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("pdik-error[{}]: {}", self.kind(), msg.trim())
    }
}

#[derive(Parser, Debug)]
#[command(name = "pdik", version, about = "Independence tests and kernel certification with PDI kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Permutation test of independence for a paired sample
    Test(TestArgs),
    /// Certify a matrix or generated Gram as PD, CND or PDI
    Certify(CertifyArgs),
    /// Run the special-function self-checks
    BernsteinCheck(BernsteinArgs),
    /// Reproduce the introductory identity on synthetic data
    Demo(DemoArgs),
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct TestArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    xd: usize,
    #[arg(long)]
    yd: usize,
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 199)]
    perms: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long)]
    fail_on_dependence: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Pd,
    Cnd,
    Pdi,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    /// Matrix file; alternatively generate the Gram from --config and --data
    #[arg(long, conflicts_with_all = ["config", "data"])]
    matrix: Option<PathBuf>,
    #[arg(long, requires = "data")]
    config: Option<PathBuf>,
    #[arg(long, requires = "config")]
    data: Option<PathBuf>,
    #[arg(long)]
    xd: Option<usize>,
    #[arg(long)]
    yd: Option<usize>,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Power32,
    Inequalities,
    All,
}

#[derive(Args, Debug)]
struct BernsteinArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct DemoArgs {
    /// Sample size
    #[arg(long, default_value_t = 30)]
    n: usize,
    #[arg(long, default_value_t = 199)]
    perms: usize,
    #[command(flatten)]
    common: Common,
}

/// Result of [`run_command`]: what the binary prints and returns.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub record: Option<ReportRecord>,
    /// Rendered report, or help/version text.
    pub stdout: String,
    /// Single-line diagnostic on failure.
    pub stderr: Option<String>,
}

struct Run {
    code: i32,
    result: Value,
    config_hash: String,
    input_digest: String,
    seed: u64,
    format: Format,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_config(path: &Path) -> Result<(PdiKernelSpec, String), CliError> {
    let text = read_text(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let spec = parse_kernel_config(&text, base)?;
    Ok((spec, text))
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Certified => "certified",
        Verdict::Rejected => "rejected",
        Verdict::StrictlyCertified => "strictly_certified",
    }
}

fn run_test(a: TestArgs) -> Result<Run, CliError> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(CliError::Usage(format!("--alpha must lie in (0, 1), got {}", a.alpha)));
    }
    let (spec, text) = load_config(&a.config)?;
    let sample = load_sample(&a.data, a.xd, a.yd)?;
    let r = permutation_test(&spec, &sample, a.perms, a.common.seed)?;
    let dependent = r.p_value <= a.alpha;
    let code = if dependent && a.fail_on_dependence { 1 } else { 0 };
    let result = json!({
        "verdict": if dependent { "dependence_detected" } else { "no_dependence_detected" },
        "statistic": r.statistic,
        "p_value": r.p_value,
        "alpha": a.alpha,
        "n": sample.n(),
        "n_permutations": r.n_permutations,
        "kernel": r.kernel,
        "path": r.path,
        "generator": r.generator,
    });
    Ok(Run {
        code,
        result,
        config_hash: io::digest_bytes(&[text.as_bytes()]),
        input_digest: io::digest_files(&[&a.data])?,
        seed: a.common.seed,
        format: a.common.format,
    })
}

fn run_certify(a: CertifyArgs) -> Result<Run, CliError> {
    let (gram, n, m, config_text, inputs): (_, _, _, String, Vec<PathBuf>) = match (&a.matrix, &a.config, &a.data) {
        (Some(path), _, _) => {
            let g = load_matrix(path)?;
            (g, a.n, a.m, String::new(), vec![path.clone()])
        }
        (None, Some(cfg), Some(data)) => {
            let (spec, text) = load_config(cfg)?;
            let sample = load_sample(data, a.xd.unwrap_or(1), a.yd.unwrap_or(1))?;
            let grid = ProductGrid::new(sample.xs().clone(), sample.ys().clone());
            let g = gram_pdi(&spec, &grid)?;
            let (sn, sm) = (grid.n(), grid.m());
            if a.n.is_some_and(|v| v != sn) || a.m.is_some_and(|v| v != sm) {
                return Err(CliError::Usage(format!("generated grid is {sn}x{sm}, which conflicts with --n/--m")));
            }
            (g, Some(sn), Some(sm), text, vec![data.clone()])
        }
        _ => return Err(CliError::Usage("certify needs --matrix, or --config together with --data".into())),
    };
    let constraint = match a.mode {
        Mode::Pd => Constraint::Pd,
        Mode::Cnd => Constraint::Cnd,
        Mode::Pdi => match (n, m) {
            (Some(n), Some(m)) => Constraint::Pdi { n, m },
            _ => return Err(CliError::Usage("--mode pdi needs --n and --m".into())),
        },
    };
    let report = certify(&gram, constraint, a.tol, a.strict)?;
    let code = if report.verdict.passes() { 0 } else { 1 };
    let result = json!({
        "verdict": verdict_name(report.verdict),
        "mode": report.mode,
        "size": gram.nrows(),
        "grid": match constraint { Constraint::Pdi { n, m } => json!([n, m]), _ => Value::Null },
        "min_constrained_eigenvalue": report.min_constrained_eigenvalue,
        "tolerance": report.tolerance,
        "constraint_dimension": report.constraint_dimension,
        "witness": report.witness,
    });
    let settings = format!("mode={:?};n={n:?};m={m:?};tol={:?};strict={}", a.mode, a.tol, a.strict);
    let paths: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    Ok(Run {
        code,
        result,
        config_hash: io::digest_bytes(&[config_text.as_bytes(), settings.as_bytes()]),
        input_digest: io::digest_files(&paths)?,
        seed: a.common.seed,
        format: a.common.format,
    })
}

fn run_bernstein(a: BernsteinArgs) -> Result<Run, CliError> {
    let mut result = serde_json::Map::new();
    let mut passed = true;
    if matches!(a.suite, Suite::Power32 | Suite::All) {
        let r = suites::power32_suite(&QuadratureGrid::default())?;
        passed &= r.passed;
        result.insert("power32".into(), serde_json::to_value(r).expect("serializable"));
    }
    if matches!(a.suite, Suite::Inequalities | Suite::All) {
        let r = suites::inequality_suite(a.common.seed, 10, 1000, 10_000)?;
        passed &= r.passed;
        result.insert("inequalities".into(), serde_json::to_value(r).expect("serializable"));
    }
    result.insert("verdict".into(), json!(if passed { "pass" } else { "fail" }));
    let settings = format!("suite={:?}", a.suite);
    Ok(Run {
        code: if passed { 0 } else { 1 },
        result: Value::Object(result),
        config_hash: io::digest_bytes(&[settings.as_bytes()]),
        input_digest: io::digest_bytes(&[]),
        seed: a.common.seed,
        format: a.common.format,
    })
}

/// Tolerance for the introductory identity in the demo.
pub const DEMO_IDENTITY_TOL: f64 = 1e-6;

/// `(x, x + noise)` and `(x, independent)` with standard normal draws.
pub fn demo_samples(n: usize, seed: u64) -> Result<(PairedSample, PairedSample), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    let x: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
    let dep: Vec<f64> = x.iter().map(|v| v + 0.5 * normal.sample(&mut rng)).collect();
    let ind: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
    Ok((PairedSample::from_scalars(&x, &dep)?, PairedSample::from_scalars(&x, &ind)?))
}

fn run_demo(a: DemoArgs) -> Result<Run, CliError> {
    if !(4..=60).contains(&a.n) {
        return Err(CliError::Usage(format!("demo sample size must lie in 4..=60, got {}", a.n)));
    }
    let (dependent, independent) = demo_samples(a.n, a.common.seed)?;
    let sq = CndKernelSpec::squared_euclidean();
    let spec = PdiKernelSpec::cm2(Cm2Spec::PowerA(1.5), sq.clone(), sq);
    let grid = QuadratureGrid::default();
    let mut result = serde_json::Map::new();
    let mut ok = true;
    for (name, sample) in [("dependent", &dependent), ("independent", &independent)] {
        let id = intro_identity(sample, &grid)?;
        let test = permutation_test(&spec, sample, a.perms, a.common.seed)?;
        ok &= id.relative_residual <= DEMO_IDENTITY_TOL;
        result.insert(
            name.into(),
            json!({
                "statistic": id.direct,
                "gaussian_integral": id.integral,
                "relative_residual": id.relative_residual,
                "p_value": test.p_value,
            }),
        );
    }
    result.insert("kernel".into(), json!(spec.label()));
    result.insert("n".into(), json!(a.n));
    result.insert("n_permutations".into(), json!(a.perms));
    result.insert("verdict".into(), json!(if ok { "identity_reproduced" } else { "identity_not_reproduced" }));
    let settings = format!("demo;n={};perms={}", a.n, a.perms);
    Ok(Run {
        code: if ok { 0 } else { 1 },
        result: Value::Object(result),
        config_hash: io::digest_bytes(&[settings.as_bytes()]),
        input_digest: io::digest_bytes(&[]),
        seed: a.common.seed,
        format: a.common.format,
    })
}

fn failure(e: CliError) -> Outcome {
    Outcome { code: 2, record: None, stdout: String::new(), stderr: Some(e.diagnostic()) }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let start = Instant::now();
    let args: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let echo: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: 0, record: None, stdout: e.to_string(), stderr: None }
                }
                _ => {
                    let first = e
                        .to_string()
                        .lines()
                        .next()
                        .unwrap_or("invalid arguments")
                        .trim_start_matches("error: ")
                        .to_string();
                    failure(CliError::Usage(first))
                }
            };
        }
    };
    let run = match cli.command {
        Command::Test(a) => run_test(a),
        Command::Certify(a) => run_certify(a),
        Command::BernsteinCheck(a) => run_bernstein(a),
        Command::Demo(a) => run_demo(a),
    };
    match run {
        Ok(run) => {
            let record = ReportRecord {
                command: echo,
                config_hash: run.config_hash,
                input_digest: run.input_digest,
                result: run.result,
                version: format!("pdik {}", env!("CARGO_PKG_VERSION")),
                seed: run.seed,
                wall_time_ms: start.elapsed().as_millis() as u64,
            };
            let stdout = report::render(&record, run.format);
            Outcome { code: run.code, record: Some(record), stdout, stderr: None }
        }
        Err(e) => failure(e),
    }
}
