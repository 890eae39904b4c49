//! `lineal`: runs experiment scenarios and writes JSON (and CSV) reports.
//!
//! Exit status: 0 when every scenario passes, 2 when one reports a property
//! failure, 1 on errors.

mod report;
mod run;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use lineal_core::catalog::builtin_domains;
use rayon::prelude::*;

#[derive(Parser, Debug)]
#[command(name = "lineal", version, about = "Nonisotropic geometry experiments on polynomial domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run scenario files (TOML or JSON).
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Overrides the seed of every scenario.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for sampling; results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        /// Directory for report files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Run independent scenarios concurrently.
        #[arg(long)]
        parallel: bool,
        /// Add a `timestamp` field to reports.
        #[arg(long)]
        timestamp: bool,
    },
    /// List the built-in domains with their expected values.
    ListDomains {
        #[arg(long)]
        json: bool,
    },
    /// Print the JSON schema of reports.
    Schema,
}

enum Status {
    Pass,
    PropertyFailure,
}

fn run_one(path: &Path, seed: Option<u64>, out: &Path, timestamp: bool) -> Result<Status> {
    let s = scenario::load_scenario(path, seed)?;
    let outcome = run::run(&s).with_context(|| format!("{}: experiment '{}' failed", path.display(), s.kind.name()))?;
    let stem = s
        .output
        .clone()
        .unwrap_or_else(|| s.name.clone())
        .trim_end_matches(".json")
        .to_string();
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let json_path = out.join(format!("{stem}.json"));
    let body = serde_json::to_string_pretty(&report::envelope(&s, &outcome, timestamp))?;
    std::fs::write(&json_path, body + "\n").with_context(|| format!("writing {}", json_path.display()))?;
    if let Some(csv) = &outcome.csv {
        let p = out.join(format!("{stem}.csv"));
        std::fs::write(&p, csv).with_context(|| format!("writing {}", p.display()))?;
    }
    println!(
        "{}: {} -> {}",
        s.name,
        if outcome.pass { "pass" } else { "FAIL" },
        json_path.display()
    );
    Ok(if outcome.pass { Status::Pass } else { Status::PropertyFailure })
}

fn list_domains(json: bool) -> Result<()> {
    let all = builtin_domains();
    if json {
        println!("{}", serde_json::to_string_pretty(&all)?);
        return Ok(());
    }
    for b in all {
        println!("{:<12} {}", b.name, b.description);
        println!("{:<12} defining: {} (m = {})", "", b.config.defining, b.config.m);
        for e in b.expected {
            println!("{:<12} expect: {e}", "");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res: Result<ExitCode> = match cli.command {
        Command::Run {
            configs,
            seed,
            threads,
            out,
            parallel,
            timestamp,
        } => (|| {
            if let Some(t) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t.max(1))
                    .build_global()
                    .context("configuring the thread pool")?;
            }
            let statuses: Vec<Result<Status>> = if parallel {
                configs.par_iter().map(|c| run_one(c, seed, &out, timestamp)).collect()
            } else {
                configs.iter().map(|c| run_one(c, seed, &out, timestamp)).collect()
            };
            let mut code = 0u8;
            for s in statuses {
                match s {
                    Ok(Status::Pass) => {}
                    Ok(Status::PropertyFailure) => code = code.max(2),
                    Err(e) => {
                        eprintln!("error: {e:#}");
                        code = 1;
                    }
                }
            }
            Ok(ExitCode::from(code))
        })(),
        Command::ListDomains { json } => list_domains(json).map(|_| ExitCode::SUCCESS),
        Command::Schema => serde_json::to_string_pretty(&report::schema())
            .map(|s| {
                println!("{s}");
                ExitCode::SUCCESS
            })
            .map_err(Into::into),
    };
    match res {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
