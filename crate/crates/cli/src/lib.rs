//! Command-line front end: sample path measures, transport them,
//! interpolate between them and run the verification suites.
//!
//! Every artifact is deterministic given the resolved configuration, which
//! is embedded in each report together with [`REPORT_FORMAT`].

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pathflow::bundle::{self, to_json_string};
use pathflow::ot_solver::{
    cost_matrix_threaded, dual_from_primal, lipschitz_check, solve_exact, solve_sinkhorn,
    LipschitzReport, SinkhornOptions, MAX_EXPONENT,
};
use pathflow::path_space::{sample_brownian_measure, sample_loop_measure, LoopMethod};
use pathflow::transport_geometry::{displacement_interpolation, ScalingRow};
use pathflow::verify::{self, SuiteReport};
use pathflow::{EmpiricalMeasure, Group};

pub const REPORT_FORMAT: u32 = 1;
pub const THREADS_VAR: &str = "PATHFLOW_THREADS";

/// Iteration budget for `--solver sinkhorn`. Near-degenerate instances at
/// small ε converge slowly, and the loop stops as soon as the marginal
/// tolerance is met.
pub const SINKHORN_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "pathflow",
    version,
    about = "Optimal transport between measures on path and loop groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a path (or loop) bundle.
    Sample(SampleArgs),
    /// Solve the transport problem between two bundles.
    Transport(TransportArgs),
    /// Displacement interpolation between two bundles (p = 2).
    Interpolate(InterpolateArgs),
    /// Run a verification suite, or `all`.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// torus, so3 or heisenberg.
    #[arg(long)]
    pub group: String,
    /// d for the torus T^d, n for the Heisenberg group H^n.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    #[arg(long, default_value_t = 8)]
    pub atoms: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample loops: geodesic-correction (default) or torus-bridge.
    #[arg(long, num_args = 0..=1, default_missing_value = "geodesic-correction")]
    pub loops: Option<String>,
    /// Output bundle file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Exact,
    Sinkhorn,
}

#[derive(Debug, Args)]
pub struct TransportArgs {
    pub source: PathBuf,
    pub target: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, value_enum, default_value_t = Solver::Exact)]
    pub solver: Solver,
    /// Entropic regularization, required by the sinkhorn solver.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Output directory for coupling.csv, potentials.json and report.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InterpolateArgs {
    pub source: PathBuf,
    pub target: PathBuf,
    /// Comma-separated values in [0, 1].
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_negative_numbers = true
    )]
    pub lambdas: Vec<f64>,
    /// Output directory for one bundle per λ and report.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report file; the summary is always printed.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("solver failure: {0}")]
    Solver(pathflow::Error),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Io { .. } => 2,
            CliError::Solver(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl From<pathflow::Error> for CliError {
    fn from(e: pathflow::Error) -> Self {
        match e {
            pathflow::Error::NotConverged { .. } | pathflow::Error::NotOptimal(_) => {
                CliError::Solver(e)
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Fully resolved run configuration, embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<Group>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<Solver>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loops: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    pub threads: usize,
}

impl RunConfig {
    fn new(command: &'static str, threads: usize) -> Self {
        Self {
            command,
            group: None,
            grid: None,
            atoms: None,
            p: None,
            solver: None,
            epsilon: None,
            seed: None,
            loops: None,
            lambdas: None,
            suite: None,
            inputs: Vec::new(),
            out: None,
            threads,
        }
    }

    /// `N >= 4`, `n >= 1`, `p ∈ (1, 10]`, `ε > 0` for sinkhorn.
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(CliError::Validation(msg));
        if let Some(n) = self.grid.filter(|&n| n < 4) {
            return invalid(format!("grid must be at least 4, got {n}"));
        }
        if self.atoms == Some(0) {
            return invalid("atoms must be at least 1".into());
        }
        if let Some(p) = self.p.filter(|&p| !(p > 1.0 && p <= MAX_EXPONENT)) {
            return invalid(format!("p must lie in (1, {MAX_EXPONENT}], got {p}"));
        }
        if self.solver == Some(Solver::Sinkhorn)
            && !self.epsilon.is_some_and(|e| e > 0.0 && e.is_finite())
        {
            return invalid("the sinkhorn solver needs --epsilon > 0".into());
        }
        if let Some(l) = self
            .lambdas
            .iter()
            .flatten()
            .find(|l| !(0.0..=1.0).contains(*l))
        {
            return invalid(format!("λ must lie in [0, 1], got {l}"));
        }
        Ok(())
    }
}

/// Worker cap from `PATHFLOW_THREADS`, default 1.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(1),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::Validation(format!(
                "{THREADS_VAR} must be a positive integer, got {raw:?}"
            ))),
        },
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_bundle(path: &Path) -> Result<EmpiricalMeasure> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    bundle::measure_from_json(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(to_json_string(value)? + "\n")
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

pub fn run(cli: Cli) -> Result<String> {
    let threads = threads_from_env()?;
    match cli.command {
        Command::Sample(args) => sample(args, threads),
        Command::Transport(args) => transport(args, threads),
        Command::Interpolate(args) => interpolate(args, threads),
        Command::Verify(args) => run_verify(args, threads),
    }
}

pub fn sample(args: SampleArgs, threads: usize) -> Result<String> {
    let group = Group::from_tag(&args.group, args.dim)?;
    let method = args
        .loops
        .as_deref()
        .map(str::parse::<LoopMethod>)
        .transpose()?;
    let config = RunConfig {
        group: Some(group),
        grid: Some(args.grid),
        atoms: Some(args.atoms),
        seed: Some(args.seed),
        loops: method.map(|m| m.to_string()),
        out: Some(display(&args.out)),
        ..RunConfig::new("sample", threads)
    };
    config.validate()?;
    let measure = match method {
        Some(m) => sample_loop_measure(group, args.grid, args.atoms, args.seed, m)?,
        None => sample_brownian_measure(group, args.grid, args.atoms, args.seed)?,
    };
    write(&args.out, &(bundle::measure_to_json(&measure)? + "\n"))?;
    Ok(format!(
        "wrote {} {} on {group} with N = {} to {}",
        args.atoms,
        if method.is_some() { "loops" } else { "paths" },
        args.grid,
        args.out.display()
    ))
}

/// Bundles must share group and grid.
fn load_pair(source: &Path, target: &Path) -> Result<(EmpiricalMeasure, EmpiricalMeasure)> {
    let (src, tgt) = (read_bundle(source)?, read_bundle(target)?);
    if src.group() != tgt.group() {
        return Err(CliError::Validation(format!(
            "bundles live on {} and {}",
            src.group(),
            tgt.group()
        )));
    }
    if src.grid() != tgt.grid() {
        return Err(CliError::Validation(format!(
            "grid mismatch: {} vs {}",
            src.grid(),
            tgt.grid()
        )));
    }
    Ok((src, tgt))
}

#[derive(Debug, Serialize)]
struct TransportFiles {
    coupling: String,
    potentials: String,
}

#[derive(Debug, Serialize)]
struct TransportReport {
    format: u32,
    config: RunConfig,
    primal: f64,
    dual: f64,
    gap: f64,
    /// `primal^{1/p}`.
    wasserstein: f64,
    marginal_violation: f64,
    lipschitz: LipschitzReport,
    files: TransportFiles,
}

pub fn transport(args: TransportArgs, threads: usize) -> Result<String> {
    let (src, tgt) = load_pair(&args.source, &args.target)?;
    let config = RunConfig {
        group: Some(src.group()),
        grid: Some(src.grid()),
        p: Some(args.p),
        solver: Some(args.solver),
        epsilon: args.epsilon,
        inputs: vec![display(&args.source), display(&args.target)],
        out: Some(display(&args.out)),
        ..RunConfig::new("transport", threads)
    };
    config.validate()?;
    let diameter = src
        .group()
        .diameter()
        .ok_or_else(|| CliError::Validation(format!("{} has no distance", src.group())))?;
    let cost = cost_matrix_threaded(&src, &tgt, args.p, threads)?;
    let (plan, primal, duals) = match args.solver {
        Solver::Exact => {
            let (plan, value) = solve_exact(&cost, src.weights(), tgt.weights())?;
            let duals = dual_from_primal(&cost, &plan)?;
            (plan, value, duals)
        }
        Solver::Sinkhorn => {
            let epsilon = args.epsilon.expect("validated");
            let options = SinkhornOptions {
                max_iter: SINKHORN_MAX_ITER,
                ..SinkhornOptions::new(epsilon)
            };
            solve_sinkhorn(&cost, src.weights(), tgt.weights(), &options)?
        }
    };
    let dual = duals.value(src.weights(), tgt.weights());
    let lipschitz = lipschitz_check(&duals.phi, &src, args.p, diameter)?;

    create_dir(&args.out)?;
    let coupling_path = args.out.join("coupling.csv");
    let potentials_path = args.out.join("potentials.json");
    write(&coupling_path, &bundle::coupling_to_csv(&plan))?;
    write(
        &potentials_path,
        &(bundle::potentials_to_json(&duals)? + "\n"),
    )?;
    let report = TransportReport {
        format: REPORT_FORMAT,
        config,
        primal,
        dual,
        gap: primal - dual,
        wasserstein: primal.max(0.0).powf(1.0 / args.p),
        marginal_violation: plan.marginal_violation(),
        lipschitz,
        files: TransportFiles {
            coupling: display(&coupling_path),
            potentials: display(&potentials_path),
        },
    };
    write(&args.out.join("report.json"), &json(&report)?)?;
    Ok(format!(
        "W_{p} = {w:.6e} (primal {primal:.6e}, dual {dual:.6e}, gap {gap:.2e}); wrote {dir}",
        p = args.p,
        w = report.wasserstein,
        gap = report.gap,
        dir = args.out.display()
    ))
}

#[derive(Debug, Serialize)]
struct InterpolationRow {
    #[serde(flatten)]
    scaling: ScalingRow,
    bundle: String,
}

#[derive(Debug, Serialize)]
struct InterpolationReport {
    format: u32,
    config: RunConfig,
    /// `W₂(ν₀, ν₁)`.
    total: f64,
    has_cut_pair: bool,
    rows: Vec<InterpolationRow>,
}

pub fn interpolate(args: InterpolateArgs, threads: usize) -> Result<String> {
    let mut config = RunConfig {
        p: Some(2.0),
        lambdas: Some(args.lambdas.clone()),
        inputs: vec![display(&args.source), display(&args.target)],
        out: Some(display(&args.out)),
        ..RunConfig::new("interpolate", threads)
    };
    config.validate()?;
    let (src, tgt) = load_pair(&args.source, &args.target)?;
    config.group = Some(src.group());
    config.grid = Some(src.grid());
    config.validate()?;
    let result = displacement_interpolation(&src, &tgt, &args.lambdas)?;
    config.lambdas = Some(result.lambdas.clone());

    create_dir(&args.out)?;
    let mut rows = Vec::with_capacity(result.lambdas.len());
    for (i, (scaling, measure)) in result
        .scaling_rows()
        .into_iter()
        .zip(&result.measures)
        .enumerate()
    {
        let path = args.out.join(format!("lambda-{i:03}.json"));
        write(&path, &(bundle::measure_to_json(measure)? + "\n"))?;
        rows.push(InterpolationRow {
            scaling,
            bundle: display(&path),
        });
    }
    let report = InterpolationReport {
        format: REPORT_FORMAT,
        has_cut_pair: result.has_cut_pair(&src, &tgt)?,
        config,
        total: result.total,
        rows,
    };
    write(&args.out.join("report.json"), &json(&report)?)?;
    let worst = report
        .rows
        .iter()
        .map(|r| (r.scaling.ratio - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(format!(
        "W2 = {:.6e}; {} measures, max |ratio - 1| = {worst:.2e}; wrote {}",
        report.total,
        report.rows.len(),
        args.out.display()
    ))
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    format: u32,
    config: RunConfig,
    passed: bool,
    suites: Vec<SuiteReport>,
}

pub fn run_verify(args: VerifyArgs, threads: usize) -> Result<String> {
    let config = RunConfig {
        seed: Some(args.seed),
        suite: Some(args.suite.clone()),
        out: args.out.as_deref().map(display),
        ..RunConfig::new("verify", threads)
    };
    let suites = verify::run(&args.suite, args.seed)?;
    let passed = suites.iter().all(|s| s.passed);
    let mut summary = String::new();
    for suite in &suites {
        for check in &suite.checks {
            summary.push_str(&format!(
                "{} {}: {}: measured {:.3e}, tolerance {:.1e}, slack {:.3e}\n",
                if check.passed { "PASS" } else { "FAIL" },
                suite.suite,
                check.name,
                check.measured,
                check.tolerance,
                check.slack
            ));
        }
    }
    let report = VerifyReport {
        format: REPORT_FORMAT,
        config,
        passed,
        suites,
    };
    if let Some(out) = &args.out {
        write(out, &json(&report)?)?;
    }
    if passed {
        Ok(summary.trim_end().to_string())
    } else {
        Err(CliError::Verification(format!("\n{}", summary.trim_end())))
    }
}
