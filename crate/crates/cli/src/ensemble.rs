use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rayon::prelude::*;
use tfp_core::harness::aggregate::aggregate_to_string;
use tfp_core::harness::csv::from_str;
use tfp_core::harness::RunSummary;

use crate::simulate::simulate_run;
use crate::{to_json, write_file, CliError, RunArgs};

#[derive(Args, Debug)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// First seed; runs use seed, seed+1, …
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub runs: u64,
    /// Runs executed at once.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
}

pub struct EnsembleOutcome {
    /// `(seed, csv, summary)` in seed order.
    pub runs: Vec<(u64, String, RunSummary)>,
    pub aggregate_csv: String,
}

/// Runs `runs` consecutive seeds on `jobs` worker threads. Workers share
/// nothing; the aggregate is computed from the per-run CSV text afterwards.
pub fn run_ensemble(args: &RunArgs, first_seed: u64, runs: u64, jobs: usize) -> Result<EnsembleOutcome, CliError> {
    if jobs == 0 {
        return Err(CliError::usage("--jobs must be at least 1"));
    }
    if runs == 0 {
        return Err(CliError::usage("--runs must be at least 1"));
    }
    let last = first_seed
        .checked_add(runs - 1)
        .ok_or_else(|| CliError::usage("seed range overflows u64"))?;
    args.params()?;
    args.config(first_seed)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(CliError::failed)?;
    let results: Vec<_> = pool.install(|| {
        (first_seed..=last)
            .into_par_iter()
            .map(|seed| simulate_run(args, seed, None, None).map(|o| (seed, o.csv, o.summary)))
            .collect()
    });
    let failed: Vec<String> = results
        .iter()
        .zip(first_seed..)
        .filter_map(|(r, seed)| r.as_ref().err().map(|e| format!("seed {seed}: {e}")))
        .collect();
    if !failed.is_empty() {
        return Err(CliError::failed(format!(
            "{} of {runs} runs failed:\n{}",
            failed.len(),
            failed.join("\n")
        )));
    }
    let runs: Vec<(u64, String, RunSummary)> = results.into_iter().map(|r| r.expect("checked")).collect();
    let mut rows = Vec::new();
    for (_, csv, _) in &runs {
        rows.extend(from_str(csv).map_err(CliError::failed)?);
    }
    Ok(EnsembleOutcome {
        aggregate_csv: aggregate_to_string(&rows),
        runs,
    })
}

pub fn cmd(a: EnsembleArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let out = run_ensemble(&a.run, a.seed, a.runs, a.jobs)?;
    for (seed, csv, summary) in &out.runs {
        write_file(&a.out_dir.join(format!("run_{seed}.csv")), csv)?;
        write_file(&a.out_dir.join(format!("run_{seed}.summary.json")), to_json(summary))?;
    }
    write_file(&a.out_dir.join("aggregate.csv"), &out.aggregate_csv)?;
    let summaries: Vec<&RunSummary> = out.runs.iter().map(|(_, _, s)| s).collect();
    write_file(&a.out_dir.join("ensemble.json"), to_json(&summaries))?;
    eprintln!(
        "{} runs of n={} with {} jobs in {:.2} s -> {}",
        out.runs.len(),
        a.run.n,
        a.jobs,
        start.elapsed().as_secs_f64(),
        a.out_dir.display()
    );
    Ok(())
}
