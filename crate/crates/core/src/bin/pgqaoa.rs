//! Experiment CLI: run, replay, compare and robust-eval. Thread count is
//! controlled via RAYON_NUM_THREADS only.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pgqaoa::config::load_config;
use pgqaoa::runner;

#[derive(Parser)]
#[command(name = "pgqaoa", version, about = "Policy-gradient quantum control experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train per seed and write CSV/JSON artifacts.
    Run {
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated seed list overriding the config's seeds.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Re-execute a completed run from its summary JSON and verify the
    /// CSVs match byte-for-byte (wall_ms aside).
    Replay { summary: PathBuf },
    /// Equal-budget baseline comparison suite; writes compare.csv.
    Compare {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average/worst-case noise-grid table for a saved policy checkpoint.
    RobustEval {
        checkpoint: PathBuf,
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> pgqaoa::Result<ExitCode> {
    match cli.command {
        Command::Run { config, out, seeds } => {
            let cfg = load_config(&config)?;
            let artifacts = runner::run(&cfg, out.as_deref(), seeds.as_deref())?;
            for a in &artifacts {
                let last = a.record.final_log();
                println!(
                    "seed {}: greedy fidelity {} -> {}",
                    a.seed,
                    runner::fmt_f64(last.greedy_fidelity),
                    a.dir.display()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Replay { summary } => {
            let work = std::env::temp_dir().join(format!(
                "pgqaoa_replay_{}",
                std::process::id()
            ));
            let report = runner::replay(&summary, &work)?;
            if !report.fingerprint_matches {
                eprintln!("warning: build fingerprint differs from the original run");
            }
            for f in &report.files {
                println!(
                    "{}: {}",
                    f.name,
                    if f.matches { "match" } else { "MISMATCH" }
                );
            }
            let _ = std::fs::remove_dir_all(&work);
            if report.all_match() {
                println!("replay ok (seed {})", report.seed);
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("replay failed: outputs differ");
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Compare { config, out } => {
            let cfg = load_config(&config)?;
            let rows = runner::compare(&cfg, out.as_deref())?;
            for r in &rows {
                println!(
                    "{},{},{},{}",
                    r.algorithm,
                    r.seed,
                    runner::fmt_f64(r.exact_fidelity),
                    r.evaluations
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::RobustEval { checkpoint, config } => {
            let cfg = load_config(&config)?;
            let report = runner::robust_eval(&checkpoint, &cfg)?;
            let dims = report.rows.first().map_or(0, |r| r.delta.len());
            let mut header: Vec<String> =
                (1..=dims).map(|d| format!("delta_{d}")).collect();
            header.push("fidelity".into());
            println!("{}", header.join(","));
            for row in &report.rows {
                let mut cells: Vec<String> =
                    row.delta.iter().map(|&d| runner::fmt_f64(d)).collect();
                cells.push(runner::fmt_f64(row.fidelity));
                println!("{}", cells.join(","));
            }
            println!("average,{}", runner::fmt_f64(report.average));
            println!("worst_case,{}", runner::fmt_f64(report.worst_case));
            Ok(ExitCode::SUCCESS)
        }
    }
}
