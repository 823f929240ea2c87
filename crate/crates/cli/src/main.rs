//! `dtnlab`: run, verify and re-emit D-to-N estimate suites.
//!
//! Exit codes: 0 all checks pass, 1 a check failed or a job did not
//! complete, 2 usage or config error, 3 runtime error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dtnlab::config::RunConfig;
use dtnlab::pipeline::{self, ReportFormat, RunOutcome};
use dtnlab::Error;

#[derive(Parser)]
#[command(
    name = "dtnlab",
    version,
    about = "Dirichlet-to-Neumann estimate laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Artifact directory; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites selected in the config and write artifacts.
    Run(RunArgs),
    /// Run one suite; artifacts are written only with --out.
    Verify {
        /// oracles, linear_estimates, nonlinear_estimates, holder, green, barrier or all.
        suite: String,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Re-emit the report of a completed run.
    Emit {
        /// Artifact directory of a completed run.
        dir: PathBuf,
        /// json or csv.
        #[arg(long, default_value = "json")]
        format: String,
    },
}

fn exit_for(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        Error::Usage(_) | Error::Config { .. } => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn summarize(outcome: &RunOutcome, dir: Option<&Path>) -> ExitCode {
    for c in &outcome.report.checks {
        println!("{}", c.summary());
    }
    if let Some(d) = dir {
        println!("artifacts: {}", d.display());
    }
    let failed = outcome.failed_checks();
    for e in &outcome.job_errors {
        eprintln!("incomplete job {}: {}", e.job, e.message);
    }
    if failed.is_empty() && outcome.complete() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed checks:");
        for name in failed {
            eprintln!("  {name}");
        }
        ExitCode::from(1)
    }
}

fn verify(suite: &str, args: &RunArgs) -> Result<(RunOutcome, Option<PathBuf>), Error> {
    pipeline::resolve_suites(&[suite.to_string()])?;
    let text = std::fs::read_to_string(&args.config)?;
    let mut cfg = RunConfig::from_toml(&text)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    cfg.suites = vec![suite.to_string()];
    let outcome = pipeline::verify(suite, &cfg, args.jobs)?;
    if let Some(dir) = &args.out {
        pipeline::write_artifacts(dir, &text, &cfg, &outcome)?;
    }
    Ok((outcome, args.out.clone()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            match pipeline::run_config(&args.config, args.out.as_deref(), args.jobs, args.seed) {
                Ok((dir, outcome)) => summarize(&outcome, Some(&dir)),
                Err(e) => exit_for(&e),
            }
        }
        Command::Verify { suite, args } => match verify(&suite, &args) {
            Ok((outcome, dir)) => summarize(&outcome, dir.as_deref()),
            Err(e) => exit_for(&e),
        },
        Command::Emit { dir, format } => {
            let format: ReportFormat = match format.parse() {
                Ok(f) => f,
                Err(e) => return exit_for(&e),
            };
            match pipeline::emit_report(&dir, format) {
                Ok(path) => {
                    println!("{}", path.display());
                    ExitCode::SUCCESS
                }
                Err(e) => exit_for(&e),
            }
        }
    }
}
