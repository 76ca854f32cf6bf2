//! Command-line driver for steady states, currents, and rectification of
//! boundary-driven XXZ chains.
//!
//! Exit codes sort failures by class: 2 for configuration problems, 3 for
//! solver failures, 4 for a validation run that found tolerance breaches,
//! and 1 for anything else (such as an unwritable output path).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spinflux::prelude::*;

mod config;
mod emit;
mod validate;

use config::FileConfig;

#[derive(Parser)]
#[command(
    name = "spinflux",
    version,
    about = "Steady states, currents, and rectification for boundary-driven XXZ chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one steady state and report currents with solver diagnostics.
    Steady(RunArgs),
    /// Solve the drive and its reversal and report rectification factors.
    Pair(RunArgs),
    /// Solve a drive pair per grid value along one parameter axis.
    Sweep(RunArgs),
    /// Scan drive strengths for stretches of falling energy current.
    Ndr(RunArgs),
    /// Check solver currents against the exact three-site expressions.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Key=value configuration file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Write the artifact to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Override the configured solver (auto, dense_lu, sparse_lu,
    /// inverse_iteration, krylov).
    #[arg(long, value_name = "NAME")]
    solver: Option<String>,
    /// Worker threads for grid commands; never changes the output.
    #[arg(long, value_name = "K")]
    workers: Option<usize>,
    /// Override the solve tolerance for iterative methods.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Artifact format; sweep defaults to csv, other commands to json.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Optional config narrowing the comparison to one chain along its drive
    /// grid; omitted, the full built-in lattice of 960 points runs.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write the per-point table to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Solver to compare against the exact expressions.
    #[arg(long, value_name = "NAME")]
    solver: Option<String>,
    /// Worker threads; never changes the output.
    #[arg(long, value_name = "K")]
    workers: Option<usize>,
    /// Relative tolerance on each current (absolute near-zero crossings).
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Artifact format, csv by default.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Io(String),
    Parse(String),
    Solve(String),
    Validation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Solve(_) => 3,
            Failure::Validation(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Parse(m) | Failure::Solve(m) | Failure::Validation(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Steady(args) => command_steady(args),
        Command::Pair(args) => command_pair(args),
        Command::Sweep(args) => command_sweep(args),
        Command::Ndr(args) => command_ndr(args),
        Command::Validate(args) => command_validate(args),
    }
}

fn load_config(path: &Path, solver: &Option<String>, tol: Option<f64>) -> Result<FileConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut cfg = config::parse_config(&text)
        .map_err(|m| Failure::Parse(format!("{}: {m}", path.display())))?;
    if let Some(name) = solver {
        cfg.method = name
            .parse()
            .map_err(|e: Error| Failure::Parse(format!("--solver: {e}")))?;
    }
    if let Some(t) = tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Failure::Parse(format!("--tol: tolerance must be positive, got {t}")));
        }
        cfg.tol = Some(t);
    }
    Ok(cfg)
}

/// Runs `job` on a dedicated pool when a worker count is given. Grid points
/// are collected in grid order either way, so the artifact is the same.
fn with_pool<T: Send>(
    workers: Option<usize>,
    job: impl FnOnce() -> T + Send,
) -> Result<T, Failure> {
    match workers {
        None => Ok(job()),
        Some(0) => Err(Failure::Parse("--workers must be at least 1".into())),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Failure::Solve(format!("worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Writes the artifact to `--out` (announcing it) or to stdout verbatim.
fn deliver(out: Option<&Path>, text: &str, what: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            println!("wrote {what} to {}", path.display());
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn command_steady(args: RunArgs) -> Result<(), Failure> {
    let cfg = load_config(&args.config, &args.solver, args.tol)?;
    let record = with_pool(args.workers, || {
        run_record(&cfg.chain, &cfg.bath, &cfg.solve_options())
    })?
    .map_err(|e| Failure::Solve(e.to_string()))?;
    let text = match args.format.unwrap_or(Format::Json) {
        Format::Json => emit::to_json(&record).map_err(Failure::Io)?,
        Format::Csv => emit::steady_csv(&cfg, &record),
    };
    deliver(args.out.as_deref(), &text, "steady record")
}

fn command_pair(args: RunArgs) -> Result<(), Failure> {
    let cfg = load_config(&args.config, &args.solver, args.tol)?;
    let record = with_pool(args.workers, || {
        run_pair(&cfg.chain, &cfg.bath, &cfg.solve_options())
    })?
    .map_err(|e| Failure::Solve(e.to_string()))?;
    let text = match args.format.unwrap_or(Format::Json) {
        Format::Json => emit::to_json(&record).map_err(Failure::Io)?,
        Format::Csv => emit::pair_csv(&cfg, &record),
    };
    deliver(args.out.as_deref(), &text, "rectification record")
}

fn command_sweep(args: RunArgs) -> Result<(), Failure> {
    let cfg = load_config(&args.config, &args.solver, args.tol)?;
    let axis = cfg
        .axis
        .ok_or_else(|| Failure::Parse("missing required key `axis` (sweep)".into()))?;
    let grid = cfg
        .grid
        .clone()
        .ok_or_else(|| Failure::Parse("missing required key `grid` (sweep)".into()))?;
    let mut spec = SweepSpec::new(cfg.chain.clone(), cfg.bath, axis, grid);
    spec.solve = cfg.solve_options();

    let points = with_pool(args.workers, || sweep(&spec))?
        .map_err(|e| Failure::Parse(e.to_string()))?;

    let text = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => emit::sweep_csv(&cfg, &spec, &points),
        Format::Json => {
            emit::to_json(&emit::SweepArtifact { spec: &spec, points: &points })
                .map_err(Failure::Io)?
        }
    };
    deliver(args.out.as_deref(), &text, &format!("{} sweep points", points.len()))?;

    let failed = points.iter().filter(|p| p.error.is_some()).count();
    if failed > 0 {
        return Err(Failure::Solve(format!(
            "{failed} of {} sweep points failed; see the error column",
            points.len()
        )));
    }
    Ok(())
}

fn command_ndr(args: RunArgs) -> Result<(), Failure> {
    let cfg = load_config(&args.config, &args.solver, args.tol)?;
    if let Some(axis) = cfg.axis {
        if axis != SweepAxis::Drive {
            return Err(Failure::Parse(format!(
                "axis: a drive scan always sweeps f, not {axis}"
            )));
        }
    }
    if !matches!(cfg.bath.drive, BoundaryDrive::ZTarget { .. }) {
        return Err(Failure::Parse(
            "boundary: a drive scan needs z-target baths".into(),
        ));
    }
    let grid = match cfg.grid.clone() {
        Some(grid) => grid,
        None => config::parse_grid("0.05..1.00 step 0.05").expect("default grid parses"),
    };
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Failure::Parse(
            "grid: a drive scan needs at least two strictly increasing values".into(),
        ));
    }
    if grid.iter().any(|&f| f <= 0.0 || f > 1.0) {
        return Err(Failure::Parse("grid: drive values must lie in (0, 1]".into()));
    }

    let report = with_pool(args.workers, || {
        ndr_scan(&cfg.chain, &cfg.bath, &grid, &cfg.solve_options())
    })?
    .map_err(|e| Failure::Solve(e.to_string()))?;

    let text = match args.format.unwrap_or(Format::Json) {
        Format::Json => emit::to_json(&report).map_err(Failure::Io)?,
        Format::Csv => emit::ndr_csv(&cfg, &report),
    };
    deliver(args.out.as_deref(), &text, "drive scan")
}

fn command_validate(args: ValidateArgs) -> Result<(), Failure> {
    let mut opts = SolveOptions::default();
    let lattice = match &args.config {
        None => validate::default_lattice(),
        Some(path) => {
            let cfg = load_config(path, &args.solver, None)?;
            opts = cfg.solve_options();
            validate::lattice_from_config(&cfg)
                .map_err(|m| Failure::Parse(format!("{}: {m}", path.display())))?
        }
    };
    if let Some(name) = &args.solver {
        opts.method = name
            .parse()
            .map_err(|e: Error| Failure::Parse(format!("--solver: {e}")))?;
    }
    let rel_tol = match args.tol {
        None => validate::DEFAULT_REL_TOL,
        Some(t) if t.is_finite() && t > 0.0 => t,
        Some(t) => {
            return Err(Failure::Parse(format!("--tol: tolerance must be positive, got {t}")));
        }
    };

    let report = with_pool(args.workers, || validate::compare(&lattice, &opts, rel_tol))?
        .map_err(Failure::Solve)?;

    let text = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => validate::report_csv(&report),
        Format::Json => emit::to_json(&report).map_err(Failure::Io)?,
    };
    deliver(args.out.as_deref(), &text, "oracle comparison")?;
    if args.out.is_some() {
        println!("{}", validate::summary_line(&report));
    } else {
        eprintln!("{}", validate::summary_line(&report));
    }

    if report.breaches > 0 {
        return Err(Failure::Validation(format!(
            "{} of {} points exceeded tolerance (max spin delta {:.3e}, max energy delta {:.3e})",
            report.breaches,
            report.points.len(),
            report.max_spin_delta,
            report.max_energy_delta
        )));
    }
    Ok(())
}
