use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use upb3::verify::{emit_bloch_csv, emit_orbit_csv, run_claims, RunConfig, Status};

#[derive(Parser)]
#[command(
    name = "upb3",
    version,
    about = "Verify claims about the three-qubit UPB bound entangled state"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the claim checks and print one line per claim.
    Verify {
        /// Anchored regular expression over claim ids; others are skipped.
        #[arg(long)]
        filter: Option<String>,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        orbit_samples: usize,
        #[arg(long)]
        tolerance_equality: Option<f64>,
        #[arg(long)]
        tolerance_psd: Option<f64>,
        #[arg(long)]
        tolerance_sign: Option<f64>,
        #[arg(long)]
        tolerance_flow: Option<f64>,
    },
    /// Sample the Lambda_222 orbit over one period and write a CSV.
    Orbit {
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Write local Bloch vectors of the psi, theta and phi decompositions.
    Bloch {
        #[arg(long)]
        csv: PathBuf,
    },
}

fn run(cli: Cli) -> upb3::Result<bool> {
    match cli.command {
        Command::Verify {
            filter,
            json,
            orbit_samples,
            tolerance_equality,
            tolerance_psd,
            tolerance_sign,
            tolerance_flow,
        } => {
            let mut cfg = RunConfig {
                json_path: json,
                orbit_samples,
                ..RunConfig::default()
            };
            if let Some(f) = filter {
                cfg = cfg.with_filter(&f)?;
            }
            let t = &mut cfg.tolerances;
            t.equality = tolerance_equality.unwrap_or(t.equality);
            t.psd = tolerance_psd.unwrap_or(t.psd);
            t.sign = tolerance_sign.unwrap_or(t.sign);
            t.flow = tolerance_flow.unwrap_or(t.flow);
            let outcome = run_claims(&cfg)?;
            for r in &outcome.reports {
                let status = match r.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Skip => "SKIP",
                };
                match &r.message {
                    Some(m) if r.status == Status::Fail => println!("{status} {} - {m}", r.claim_id),
                    _ => println!("{status} {}", r.claim_id),
                }
            }
            Ok(outcome.all_passed())
        }
        Command::Orbit { samples, csv } => {
            let cfg = RunConfig {
                orbit_samples: samples,
                ..RunConfig::default()
            };
            emit_orbit_csv(&cfg, &csv)?;
            Ok(true)
        }
        Command::Bloch { csv } => {
            emit_bloch_csv(&csv)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
