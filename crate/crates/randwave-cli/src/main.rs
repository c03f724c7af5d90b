//! Command line front end. One subcommand per experiment family; every run
//! prints a single JSON document to stdout (numbers at 12 significant
//! digits) and keeps human-readable progress on stderr, so output can be
//! piped into tooling directly.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 on
//! numerical failures (non-convergence, unstable zero counts, excluded-trial
//! quota).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use randwave::domain::{DomainSpec, SpectralWindow, WindowKind};
use randwave::ensemble::{sample_coefficients, CoefficientVector};
use randwave::kacrice::{self, FieldRealization, TraceBasis};
use randwave::montecarlo::{self, ExperimentConfig};
use randwave::zerocount::{self, count_zeros, regularized_count};
use randwave::{round_sig, Error, Result};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERIC: u8 = 2;

/// Expected boundary zero counts of random waves on planar Dirichlet
/// domains, computed three independent ways.
#[derive(Parser)]
#[command(name = "randwave", version, propagate_version = true)]
struct Cli {
    /// Worker threads for trial-level parallelism; reported numbers do not
    /// depend on this
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo zero counting against Kac-Rice and the asymptote
    Sim(SimArgs),
    /// Kac-Rice quadrature for one spectral window
    Kacrice(KacriceArgs),
    /// Convergence of covariance averages toward the Weyl constants
    Weyl(WeylArgs),
    /// Kac-Rice Z against lambda with the through-origin slope fit
    Slopes(SlopesArgs),
    /// Boundary-vs-interior zero correspondence on the disk
    Hopf(HopfArgs),
    /// Deterministic exactness checks; nonzero exit on any failure
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainKind {
    Disk,
    Rectangle,
}

#[derive(Args)]
struct DomainArgs {
    /// Domain shape
    #[arg(long, value_enum, default_value_t = DomainKind::Disk)]
    domain: DomainKind,

    /// Disk radius
    #[arg(long, default_value_t = 1.0)]
    radius: f64,

    /// Rectangle side a
    #[arg(long, default_value_t = 1.0)]
    a: f64,

    /// Rectangle side b
    #[arg(long, default_value_t = 1.0)]
    b: f64,
}

impl DomainArgs {
    fn spec(&self) -> DomainSpec {
        match self.domain {
            DomainKind::Disk => DomainSpec::Disk { radius: self.radius },
            DomainKind::Rectangle => DomainSpec::Rectangle { a: self.a, b: self.b },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowOpt {
    /// Cumulative spectrum [0, lambda]
    Long,
    /// Unit band [lambda, lambda + 1]
    Short,
}

impl WindowOpt {
    fn kind(self) -> WindowKind {
        match self {
            WindowOpt::Long => WindowKind::Long,
            WindowOpt::Short => WindowKind::Short,
        }
    }
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    domain: DomainArgs,

    /// Spectral window family
    #[arg(long, value_enum)]
    window: WindowOpt,

    /// Window edge lambda
    #[arg(long)]
    lambda: f64,

    /// Number of Monte Carlo trials
    #[arg(long, default_value_t = 1000)]
    trials: u64,

    /// Master seed; (seed, trial) fixes every coefficient
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Scan grid size; default is 4x the frequency floor
    #[arg(long)]
    grid: Option<usize>,

    /// Regularized-count width as a fraction of sup|V|; repeatable
    #[arg(long)]
    eps: Vec<f64>,

    /// Report JSON path; the per-trial CSV lands next to it
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write refined root locations next to --out
    #[arg(long, default_value_t = false)]
    dump_zeros: bool,
}

#[derive(Args)]
struct KacriceArgs {
    #[command(flatten)]
    domain: DomainArgs,

    /// Spectral window family
    #[arg(long, value_enum)]
    window: WindowOpt,

    /// Window edge lambda
    #[arg(long)]
    lambda: f64,

    /// Quadrature grid size
    #[arg(long, default_value_t = kacrice::DEFAULT_GRID_N)]
    grid: usize,
}

#[derive(Args)]
struct WeylArgs {
    #[command(flatten)]
    domain: DomainArgs,

    /// Window edge; repeatable, one table block per value
    #[arg(long, required = true)]
    lambda: Vec<f64>,

    /// Quadrature grid size for the covariance averages
    #[arg(long, default_value_t = kacrice::DEFAULT_GRID_N)]
    grid: usize,

    /// Also write the table as CSV to this path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SlopesArgs {
    #[command(flatten)]
    domain: DomainArgs,

    /// Spectral window family
    #[arg(long, value_enum)]
    window: WindowOpt,

    /// Window edge; repeatable, one experiment per value
    #[arg(long, required = true)]
    lambda: Vec<f64>,

    /// Monte Carlo trials per lambda
    #[arg(long, default_value_t = 2000)]
    trials: u64,

    /// Master seed; lambda number i uses seed + i
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct HopfArgs {
    /// Disk radius (the correspondence check is disk-only)
    #[arg(long, default_value_t = 1.0)]
    radius: f64,

    /// Spectral window family
    #[arg(long, value_enum)]
    window: WindowOpt,

    /// Window edge lambda
    #[arg(long)]
    lambda: f64,

    /// Interior circle offset; the sweep runs at radius - delta
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,

    /// Number of sampled realizations
    #[arg(long, default_value_t = 200)]
    trials: u64,

    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Scan grid size; default is 4x the frequency floor
    #[arg(long)]
    grid: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests surface as Err too; those keep
            // stdout and exit 0, real usage errors go to stderr with exit 1.
            let code = if err.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let workers = cli.workers;
    let outcome = match cli.command {
        Command::Sim(args) => run_sim(&args, workers),
        Command::Kacrice(args) => run_kacrice(&args),
        Command::Weyl(args) => run_weyl(&args),
        Command::Slopes(args) => run_slopes(&args, workers),
        Command::Hopf(args) => run_hopf(&args),
        Command::Selftest => return run_selftest(workers),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_for(&err))
        }
    }
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Convergence(_)
        | Error::UnresolvedZeros { .. }
        | Error::ExcludedQuota { .. }
        | Error::DegenerateC11 { .. }
        | Error::Inconsistent(_) => EXIT_NUMERIC,
        _ => EXIT_USAGE,
    }
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    print!("{s}");
    Ok(())
}

/// `r.json` plus extension `per_trial.csv` gives `r.per_trial.csv`.
fn sibling(path: &Path, extension: &str) -> String {
    path.with_extension(extension).to_string_lossy().into_owned()
}

fn run_sim(args: &SimArgs, workers: usize) -> Result<()> {
    let domain = args.domain.spec();
    let window = SpectralWindow { kind: args.window.kind(), lambda: args.lambda };
    let (per_trial_csv, zero_dump_csv) = match &args.out {
        Some(out) => {
            let dump = args.dump_zeros.then(|| sibling(out, "zeros.csv"));
            (Some(sibling(out, "per_trial.csv")), dump)
        }
        None => {
            if args.dump_zeros {
                return Err(Error::Config("--dump-zeros needs --out to name the dump file".into()));
            }
            (None, None)
        }
    };
    let config = ExperimentConfig {
        basis: TraceBasis::Window { domain, window },
        trials: args.trials,
        master_seed: args.seed,
        grid_n: args.grid,
        refine_tol_rel: None,
        eps_rel: args.eps.clone(),
        per_trial_csv,
        zero_dump_csv,
    };
    eprintln!(
        "sim: {} trials, lambda {}, seed {}, {} workers",
        args.trials, args.lambda, args.seed, workers
    );
    let start = Instant::now();
    let report = montecarlo::run_experiment(&config, workers)?;
    eprintln!(
        "sim: mean {} vs kac-rice {} ({} excluded) in {:.2}s",
        report.summary.mean,
        report.summary.kacrice_z,
        report.summary.excluded,
        start.elapsed().as_secs_f64()
    );
    let json = report.to_json()?;
    if let Some(out) = &args.out {
        std::fs::write(out, &json)?;
        eprintln!("sim: report written to {}", out.display());
    }
    print!("{json}");
    Ok(())
}

fn run_kacrice(args: &KacriceArgs) -> Result<()> {
    let domain = args.domain.spec();
    let window = SpectralWindow { kind: args.window.kind(), lambda: args.lambda };
    let basis = TraceBasis::Window { domain, window }.prepare()?;
    eprintln!("kacrice: {} modes, grid {}", basis.dimension(), args.grid);
    let start = Instant::now();
    let result = kacrice::expected_zero_count(&basis, args.grid)?;
    eprintln!("kacrice: z {} in {:.2}s", round_sig(result.z, 12), start.elapsed().as_secs_f64());
    print_json(&json!({
        "domain": domain,
        "window": window,
        "modes": basis.dimension(),
        "grid_n": result.grid_n,
        "rule": result.rule,
        "z": round_sig(result.z, 12),
        "prediction": round_sig(kacrice::asymptotic_prediction(&domain, &window), 12),
    }))
}

fn run_weyl(args: &WeylArgs) -> Result<()> {
    let domain = args.domain.spec();
    eprintln!("weyl: {} lambda values, grid {}", args.lambda.len(), args.grid);
    let rows: Vec<_> = kacrice::weyl_diagnostics(&domain, &args.lambda, args.grid)?
        .into_iter()
        .map(|mut row| {
            row.value = round_sig(row.value, 12);
            row.target = round_sig(row.target, 12);
            row
        })
        .collect();
    if let Some(out) = &args.out {
        std::fs::write(out, kacrice::weyl_table_csv(&rows))?;
        eprintln!("weyl: table written to {}", out.display());
    }
    print_json(&json!({
        "domain": domain,
        "lambdas": args.lambda,
        "grid_n": args.grid,
        "rows": rows,
    }))
}

fn run_slopes(args: &SlopesArgs, workers: usize) -> Result<()> {
    let domain = args.domain.spec();
    let kind = args.window.kind();
    eprintln!(
        "slopes: {} lambda values, {} trials each, {} workers",
        args.lambda.len(),
        args.trials,
        workers
    );
    let start = Instant::now();
    let study =
        montecarlo::slope_study(domain, kind, &args.lambda, args.trials, args.seed, workers)?;
    eprintln!(
        "slopes: slope {} vs target {} in {:.2}s",
        study.slope,
        study.target,
        start.elapsed().as_secs_f64()
    );
    print_json(&json!({
        "domain": domain,
        "window": kind,
        "trials": args.trials,
        "master_seed": args.seed,
        "rows": study.rows,
        "slope": study.slope,
        "target": study.target,
    }))
}

fn run_hopf(args: &HopfArgs) -> Result<()> {
    if args.trials == 0 {
        return Err(Error::Config("hopf needs at least one trial".into()));
    }
    let domain = DomainSpec::Disk { radius: args.radius };
    let window = SpectralWindow { kind: args.window.kind(), lambda: args.lambda };
    let basis = TraceBasis::Window { domain, window }.prepare()?;
    let floor = zerocount::minimum_grid(basis.max_frequency(), basis.boundary_length());
    let grid_n = args.grid.unwrap_or(montecarlo::DEFAULT_GRID_FACTOR * floor);
    eprintln!("hopf: {} trials, delta {}, grid {}", args.trials, args.delta, grid_n);
    let start = Instant::now();
    let mut matched = 0usize;
    let mut unresolved = 0usize;
    for trial in 0..args.trials {
        let coefficients = sample_coefficients(basis.dimension(), args.seed, trial);
        let field = basis.realize(coefficients)?;
        let FieldRealization::Modes(wave) = &field else {
            return Err(Error::Inconsistent("window basis realized a synthetic field".into()));
        };
        // An unstable count on either circle is a miss, not an abort; the
        // match rate is the honest statistic.
        match zerocount::hopf_check(wave, args.delta, grid_n) {
            Ok(check) if check.matches => matched += 1,
            Ok(_) => {}
            Err(Error::UnresolvedZeros { .. }) => unresolved += 1,
            Err(err) => return Err(err),
        }
    }
    let rate = matched as f64 / args.trials as f64;
    eprintln!(
        "hopf: {}/{} matched in {:.2}s",
        matched,
        args.trials,
        start.elapsed().as_secs_f64()
    );
    print_json(&json!({
        "domain": domain,
        "window": window,
        "delta": args.delta,
        "trials": args.trials,
        "master_seed": args.seed,
        "grid_n": grid_n,
        "matched": matched,
        "unresolved": unresolved,
        "match_rate": round_sig(rate, 12),
    }))
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let (passed, detail) = match body() {
        Ok(pair) => pair,
        Err(err) => (false, format!("errored: {err}")),
    };
    eprintln!("{} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
    Check { name, passed, detail }
}

/// Exactness suite over cases with closed-form answers: pair windows count
/// 2m in every trial, sin(3θ) refines to the six roots kπ/3, and the
/// regularized count of sin θ is exactly 2 for any width below the sup.
fn run_selftest(workers: usize) -> ExitCode {
    let mut checks = Vec::new();

    checks.push(check("pair_window_counts", || {
        for m in [1u32, 3, 5, 8] {
            let config = ExperimentConfig {
                basis: TraceBasis::SyntheticTrig { ms: vec![m] },
                trials: 50,
                master_seed: 1,
                grid_n: None,
                refine_tol_rel: None,
                eps_rel: Vec::new(),
                per_trial_csv: None,
                zero_dump_csv: None,
            };
            let report = montecarlo::run_experiment(&config, workers)?;
            let want = 2 * m as usize;
            if report.records.iter().any(|r| r.count != Some(want)) {
                return Ok((false, format!("a pair-window trial missed count {want} at m = {m}")));
            }
            if (report.summary.kacrice_z - want as f64).abs() > 1e-9 {
                return Ok((false, format!("kac-rice z {} off 2m at m = {m}", report.summary.kacrice_z)));
            }
        }
        Ok((true, "counts exactly 2m for m in {1, 3, 5, 8}, 50 trials each".into()))
    }));

    checks.push(check("sine_root_count", || {
        let basis = TraceBasis::SyntheticTrig { ms: vec![3] }.prepare()?;
        let field = basis
            .realize(CoefficientVector { values: vec![0.0, 1.0], master_seed: 0, trial: 0 })?;
        let set = count_zeros(&field, 256, None)?;
        if set.count != 6 {
            return Ok((false, format!("sin(3θ) counted {} roots, want 6", set.count)));
        }
        let third = std::f64::consts::PI / 3.0;
        for (k, root) in set.locations.iter().enumerate() {
            if (root - k as f64 * third).abs() > 1e-9 {
                return Ok((false, format!("root {k} at {root}, want {}", k as f64 * third)));
            }
        }
        Ok((true, "six roots at kπ/3 within 1e-9".into()))
    }));

    checks.push(check("regularized_exactness", || {
        let basis = TraceBasis::SyntheticTrig { ms: vec![1] }.prepare()?;
        let field = basis
            .realize(CoefficientVector { values: vec![0.0, 1.0], master_seed: 0, trial: 0 })?;
        for eps in [1e-3, 0.3] {
            let reg = regularized_count(&field, eps, 256)?;
            if (reg - 2.0).abs() > 1e-12 {
                return Ok((false, format!("N_eps(sin θ) = {reg} at eps = {eps}, want 2")));
            }
        }
        Ok((true, "N_eps(sin θ) = 2 within 1e-12 at eps 1e-3 and 0.3".into()))
    }));

    let passed = checks.iter().all(|c| c.passed);
    let rows: Vec<_> = checks
        .iter()
        .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
        .collect();
    if print_json(&json!({"checks": rows, "passed": passed})).is_err() {
        return ExitCode::from(EXIT_USAGE);
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NUMERIC)
    }
}
