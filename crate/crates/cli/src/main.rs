use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use whichpath::config::NoiseSetting;
use whichpath::{load_config, report, run_experiment, write_outcome, CliError};

/// Simulates multipath which-path interferometers and checks the
/// distinguishability-visibility duality.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config's `output`, then `out`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Ignore the configured noise and simulate the ideal interferometer.
        #[arg(long)]
        ideal: bool,
    },
    /// Tabulate duality residuals of one or more results.json files.
    Report { files: Vec<PathBuf> },
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            threads,
            ideal,
        } => {
            if let Some(threads) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads.max(1))
                    .build_global()
                    .map_err(|e| CliError::Violation(format!("thread pool: {e}")))?;
            }
            let mut config = load_config(&config)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if ideal {
                config.noise = NoiseSetting::default();
            }
            let dir = out
                .or_else(|| config.output.clone())
                .unwrap_or_else(|| PathBuf::from("out"));
            let outcome = run_experiment(&config)?;
            for path in write_outcome(&outcome, &dir)? {
                println!("wrote {}", path.display());
            }
            if let Some(fit) = &outcome.results.fit {
                println!(
                    "epsilon = {}, T = {}, gamma = {} (chi2 = {:.4e}, {} evaluations)",
                    fit.epsilon.display,
                    fit.t.display,
                    fit.gamma.display,
                    fit.residual_sum,
                    fit.evaluations
                );
            }
            for v in &outcome.results.violations {
                eprintln!("violation: {v}");
            }
            Ok(if outcome.results.violations.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        Command::Report { files } => {
            let report = report(&files)?;
            print!("{}", report.text);
            Ok(if report.flags == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
