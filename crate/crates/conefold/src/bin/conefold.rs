//! Command-line front end: synthesize configurations, sweep rigid foldings,
//! verify residuals and export geometry.

use clap::{Parser, Subcommand};
use conefold::job::{parse_job, run_job, JobConfig, JobMode, SweepSpec};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "conefold", version, about = "Flexing cones and cylinders with planar sections")]
struct Cli {
    /// Job description (JSON).
    #[arg(long, global = true)]
    job: Option<PathBuf>,
    /// Override the job's random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for reports and geometry.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Synthesize a configuration and check its exact certificates.
    Synth,
    /// Build a strip and sweep the rigid folding, exporting frames.
    Flex,
    /// Run the verification battery for the job's mode.
    Verify,
    /// Smooth-case pipelines: curvature fields and section planarity.
    Smooth,
    /// Export geometry only.
    Export,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let job_path = match &cli.job {
        Some(p) => p.clone(),
        None => {
            eprintln!("error: --job <path> is required");
            return ExitCode::from(2);
        }
    };
    let mut config = match parse_job(&job_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    apply_verb(&mut config, &cli.verb);
    if let Err(msg) = check_verb_mode(&config, &cli.verb) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let out_dir = cli
        .out_dir
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    match run_job(&config, &out_dir) {
        Ok(outcome) => {
            for (name, value) in outcome.report.maxima() {
                let threshold = config.tolerances.threshold_for(&name);
                let flag = if value.abs() <= threshold { "pass" } else { "FAIL" };
                println!("{flag}  {name:32} max {value:.3e}  (threshold {threshold:.1e})");
            }
            for note in &outcome.report.notes {
                println!("note  {note}");
            }
            for path in &outcome.written {
                println!("wrote {}", path.display());
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn apply_verb(config: &mut JobConfig, verb: &Verb) {
    match verb {
        Verb::Synth => {
            config.export_obj = false;
            if config.sweep.is_none() {
                config.sweep = Some(SweepSpec {
                    count: 1,
                    start: 0.4,
                    end: 0.4,
                });
            }
        }
        Verb::Verify => config.export_obj = false,
        Verb::Flex | Verb::Smooth | Verb::Export => {}
    }
}

fn check_verb_mode(config: &JobConfig, verb: &Verb) -> Result<(), String> {
    let smooth = matches!(config.mode, JobMode::ConeSmooth | JobMode::CylSmooth);
    match verb {
        Verb::Flex if smooth => {
            Err("flex applies to discrete modes; use `smooth` for smooth jobs".into())
        }
        Verb::Smooth if !smooth => {
            Err("smooth applies to smooth modes; use `flex` or `verify`".into())
        }
        _ => Ok(()),
    }
}
