use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use hmeasure_cli::commands::{self, Format, ObjectiveArg, WalkArgs, SEARCH_SAMPLES};
use hmeasure_cli::CliError;

/// Numerical checks of a harmonic-measure inequality for continua in the disk.
#[derive(Parser)]
#[command(name = "hmeasure", version)]
struct Cli {
    /// Print wall time to stderr.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Walk {
    /// Walks per estimate.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Absorbing shell width.
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate omega_k for one marked point.
    Estimate {
        scene: PathBuf,
        k: usize,
        #[command(flatten)]
        walk: Walk,
        #[arg(long, value_enum, default_value = "csv")]
        out: Format,
    },
    /// Estimate every omega_k and compare both sides of the inequality.
    CheckBound {
        scene: PathBuf,
        #[command(flatten)]
        walk: Walk,
        #[arg(long, value_enum, default_value = "json")]
        out: Format,
    },
    /// Closed-form identity suite.
    Identities {
        /// Inclusive angle grid start:stop:step.
        #[arg(long, default_value = "0.05:3.09:0.05")]
        theta_grid: String,
        /// Override every tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Nelder-Mead over perturbed stars.
    Search {
        n: usize,
        rho: f64,
        #[arg(long, value_enum, default_value = "max-omega")]
        objective: ObjectiveArg,
        #[arg(long, default_value_t = 400)]
        budget: usize,
        #[arg(long, default_value_t = SEARCH_SAMPLES)]
        samples: u64,
        #[arg(long, default_value_t = 1e-4)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        out: Format,
    },
    /// Draw a scene as SVG.
    Render {
        scene: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn walk(w: Walk) -> WalkArgs {
    WalkArgs {
        samples: w.samples,
        epsilon: w.epsilon,
        seed: w.seed,
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("HM_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| {
            CliError::validation("HM_THREADS", format!("`{value}` is not a positive integer"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::validation("HM_THREADS", e))
}

fn run(cli: Cli) -> Result<commands::Outcome, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Estimate {
            scene,
            k,
            walk: w,
            out,
        } => commands::estimate(&scene, k, walk(w), out),
        Command::CheckBound {
            scene,
            walk: w,
            out,
        } => commands::check_bound(&scene, walk(w), out),
        Command::Identities { theta_grid, tol } => commands::identities(&theta_grid, tol),
        Command::Search {
            n,
            rho,
            objective,
            budget,
            samples,
            epsilon,
            seed,
            out,
        } => commands::search(
            n,
            rho,
            objective,
            budget,
            WalkArgs {
                samples,
                epsilon,
                seed,
            },
            out,
        ),
        Command::Render { scene, out } => commands::render(&scene, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let timing = cli.timing;
    let start = Instant::now();
    let result = run(cli);
    if timing {
        eprintln!("{{\"wall_time_s\":{}}}", start.elapsed().as_secs_f64());
    }
    match result {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("{}", serde_json::json!({ "warning": w }));
            }
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(&outcome.payload)
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(2);
            }
            match outcome.failure {
                Some(message) => {
                    let err = CliError::Verification(message);
                    eprintln!("{}", err.diagnostic());
                    ExitCode::from(err.exit_code() as u8)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(err) => {
            eprintln!("{}", err.diagnostic());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
