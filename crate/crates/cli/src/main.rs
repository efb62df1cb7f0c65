mod commands;
mod config;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::Failure;
use config::{ConfigArgs, RunConfig};
use report::Report;

const AFTER_HELP: &str = "\
Exit status: 0 when every verdict passes, 1 on a failed verdict, 2 on a
configuration error, 3 on a runtime error.

Reports are JSON with \"schema\": 1. With --out, CSV data is written next to
the report:
  evolve          t,q_1..q_N,p_1..p_N
  quantum-oracle  sector,H_1..H_N,multiplicity (one row per joint eigenvalue)
Complex entries are written as re or re+imi.";

#[derive(Parser)]
#[command(name = "qcdual", version, about = "Verification suite for the quantum-classical duality of BCD Calogero-Moser and Gaudin models", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check couplings and, when given, coordinates
    Validate(ConfigArgs),
    /// Solve the Bethe equations
    Bethe(ConfigArgs),
    /// Check that on-shell Lax matrices are nilpotent
    Duality(ConfigArgs),
    /// Certify the off-shell determinant identities at random points
    Identity(ConfigArgs),
    /// Check the factorized special Lax matrices
    Factorization(ConfigArgs),
    /// Compare Bethe data with exact diagonalization of the spin chain
    QuantumOracle(ConfigArgs),
    /// Integrate the classical equations of motion
    Evolve(ConfigArgs),
    /// Run the full acceptance suite
    All(ConfigArgs),
}

type Handler = fn(&RunConfig) -> Result<report::Outcome, Failure>;

impl Command {
    fn parts(&self) -> (&'static str, &ConfigArgs, Handler) {
        match self {
            Command::Validate(a) => ("validate", a, commands::validate),
            Command::Bethe(a) => ("bethe", a, commands::bethe),
            Command::Duality(a) => ("duality", a, commands::duality),
            Command::Identity(a) => ("identity", a, commands::identity),
            Command::Factorization(a) => ("factorization", a, commands::factorization),
            Command::QuantumOracle(a) => ("quantum-oracle", a, commands::quantum_oracle),
            Command::Evolve(a) => ("evolve", a, commands::evolve),
            Command::All(a) => ("all", a, commands::all),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args, run) = cli.command.parts();
    let config = match RunConfig::from_args(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let result = match config.jobs {
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(|| run(&config)),
            Err(e) => Err(Failure::Runtime(e.into())),
        },
        None => run(&config),
    };
    match result {
        Ok(outcome) => {
            let report = Report::new(
                name,
                config.clone(),
                outcome.entries,
                start.elapsed().as_secs_f64(),
            );
            if let Err(e) = report.write(config.out.as_deref(), outcome.csv.as_deref()) {
                eprintln!("error: {e:#}");
                return ExitCode::from(3);
            }
            for e in report
                .verdicts
                .iter()
                .filter(|e| e.verdict == qcdual::identities::Verdict::Fail)
            {
                eprintln!("fail: {}: {}", e.name, e.detail);
            }
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
