//! Benchmark CLI: multi-trial runs with CSV output (`run`) and the
//! invariant self test (`selftest`).
//!
//! Every flag can also be set through an environment variable with the
//! `STIEFEL_BENCH_` prefix (e.g. `STIEFEL_BENCH_PROBLEM=eig`). Exit codes:
//! 0 on success, 1 on configuration errors, 2 on self-test failure.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stiefel_cayley::bench::{
    self, run_benchmark_on, write_history_csv, write_summary_csv, BenchConfig, CenterInit,
    SelftestConfig, Strategy,
};
use stiefel_cayley::engine::EngineKind;
use stiefel_cayley::problems::{generate, ProblemInstance, ProblemKind};

#[derive(Parser)]
#[command(
    name = "stiefel-bench",
    about = "Benchmark harness for Stiefel-manifold optimization via adaptive Cayley parametrization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run independent trials of one problem/engine/strategy combination.
    Run(Box<RunArgs>),
    /// Run the invariant suite at small sizes and print pass/fail per check.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Problem family: toy, eig, proc.
    #[arg(long, env = "STIEFEL_BENCH_PROBLEM", default_value = "toy")]
    problem: String,

    /// Ambient dimension.
    #[arg(long = "N", env = "STIEFEL_BENCH_N", default_value_t = 1000)]
    n: usize,

    /// Number of columns.
    #[arg(long, env = "STIEFEL_BENCH_P", default_value_t = 10)]
    p: usize,

    /// Engine: gd, cg-fr, cg-hs+, cg-hz.
    #[arg(long, env = "STIEFEL_BENCH_ENGINE", default_value = "gd")]
    engine: String,

    /// Strategy: alcp, cp, qr.
    #[arg(long, env = "STIEFEL_BENCH_STRATEGY", default_value = "alcp")]
    strategy: String,

    /// Alarm threshold T.
    #[arg(long = "T", env = "STIEFEL_BENCH_T", default_value_t = 1.5)]
    alarm_threshold: f64,

    /// Relative gradient-norm stopping tolerance.
    #[arg(long, env = "STIEFEL_BENCH_TOL", default_value_t = 1e-5)]
    tol: f64,

    #[arg(long, env = "STIEFEL_BENCH_MAX_ITER", default_value_t = 2000)]
    max_iter: usize,

    #[arg(long, env = "STIEFEL_BENCH_TRIALS", default_value_t = 1)]
    trials: usize,

    #[arg(long, env = "STIEFEL_BENCH_SEED", default_value_t = 0)]
    seed: u64,

    /// Summary CSV path (stdout when omitted).
    #[arg(long, env = "STIEFEL_BENCH_OUT")]
    out: Option<PathBuf>,

    /// Prefix for per-trial history CSVs (<prefix>_trial<k>.csv).
    #[arg(long, env = "STIEFEL_BENCH_HISTORY_OUT")]
    history_out: Option<PathBuf>,

    /// Fixed-center choice for the cp strategy: auto, identity.
    #[arg(long, env = "STIEFEL_BENCH_CENTER", default_value = "auto")]
    center: String,

    /// Thread budget for parallel trials (defaults to all cores).
    #[arg(long, env = "STIEFEL_BENCH_JOBS")]
    jobs: Option<usize>,

    /// Add one summary row per trial after the mean row.
    #[arg(long, env = "STIEFEL_BENCH_PER_TRIAL")]
    per_trial: bool,

    /// Zero the wall-clock columns so repeated runs emit identical bytes.
    #[arg(long, env = "STIEFEL_BENCH_DETERMINISTIC")]
    deterministic: bool,

    /// Write the generated problem instance to this path.
    #[arg(long, env = "STIEFEL_BENCH_INSTANCE_OUT")]
    instance_out: Option<PathBuf>,

    /// Load the problem instance from this path instead of generating it;
    /// the file's problem/N/p/seed override the flags.
    #[arg(long, env = "STIEFEL_BENCH_INSTANCE_IN")]
    instance_in: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long = "N", env = "STIEFEL_BENCH_N", default_value_t = 60)]
    n: usize,

    #[arg(long, env = "STIEFEL_BENCH_P", default_value_t = 5)]
    p: usize,

    #[arg(long, env = "STIEFEL_BENCH_SAMPLES", default_value_t = 100)]
    samples: usize,

    #[arg(long, env = "STIEFEL_BENCH_SEED", default_value_t = 1)]
    seed: u64,

    /// Negative control: scale analytic gradients by (1 + eps) so the
    /// gradient-oracle checks must fail.
    #[arg(long, env = "STIEFEL_BENCH_PERTURB_GRADIENT")]
    perturb_gradient: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not configuration errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match cli.command {
        Command::Run(args) => match cmd_run(*args) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Command::Selftest(args) => cmd_selftest(args),
    }
}

fn cmd_run(args: RunArgs) -> stiefel_cayley::Result<ExitCode> {
    let instance: ProblemInstance = match &args.instance_in {
        Some(path) => ProblemInstance::load(&mut BufReader::new(File::open(path)?))?,
        None => {
            let problem = ProblemKind::parse(&args.problem)?;
            generate(problem, args.n, args.p, args.seed)
        }
    };

    let mut cfg = BenchConfig::new(
        instance.kind,
        instance.n,
        instance.p,
        EngineKind::parse(&args.engine)?,
        Strategy::parse(&args.strategy)?,
    );
    cfg.alarm_threshold = args.alarm_threshold;
    cfg.rel_grad_tol = args.tol;
    cfg.max_iter = args.max_iter;
    cfg.trials = args.trials;
    cfg.seed = if args.instance_in.is_some() {
        instance.seed
    } else {
        args.seed
    };
    cfg.center = CenterInit::parse(&args.center)?;
    cfg.jobs = args.jobs;
    cfg.deterministic_time = args.deterministic;
    cfg.per_trial_rows = args.per_trial;

    if let Some(path) = &args.instance_out {
        instance.save(&mut BufWriter::new(File::create(path)?))?;
    }

    let output = run_benchmark_on(&cfg, instance)?;

    // Flush whatever completed, then report any trial failure.
    match &args.out {
        Some(path) => write_summary_csv(BufWriter::new(File::create(path)?), &output)?,
        None => {
            let stdout = std::io::stdout();
            write_summary_csv(stdout.lock(), &output)?;
        }
    }
    if let Some(prefix) = &args.history_out {
        for trial in &output.trials {
            let path = history_path(prefix, trial.trial);
            write_history_csv(
                BufWriter::new(File::create(path)?),
                &trial.result.record.rows,
                cfg.deterministic_time,
            )?;
        }
    }

    for trial in &output.trials {
        eprintln!(
            "trial {}: {} after {} iterations (f = {:.6e}, |grad| = {:.3e}, {} center changes)",
            trial.trial,
            trial.result.reason.name(),
            trial.result.record.summary.iterations,
            trial.result.record.summary.f_final,
            trial.result.record.summary.grad_norm,
            trial.result.record.summary.center_changes,
        );
    }
    if let Some((k, e)) = &output.failure {
        eprintln!("trial {k} failed: {e}");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn history_path(prefix: &Path, trial: usize) -> PathBuf {
    let mut name = prefix.as_os_str().to_os_string();
    name.push(format!("_trial{trial}.csv"));
    PathBuf::from(name)
}

fn cmd_selftest(args: SelftestArgs) -> ExitCode {
    let cfg = SelftestConfig {
        n: args.n,
        p: args.p,
        samples: args.samples,
        seed: args.seed,
        perturb_gradient: args.perturb_gradient,
    };
    let checks = bench::selftest(&cfg);
    let mut all_pass = true;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for check in &checks {
        let status = if check.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status} {} ({})", check.name, check.details);
        all_pass &= check.pass;
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
