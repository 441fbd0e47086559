use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use tfp_core::analysis::{edge_ratio, max_degree};
use tfp_core::harness::csv::{rows_for_run, to_string};
use tfp_core::harness::RunSummary;
use tfp_core::process::{new_state, run_observed, ProcessState, Snapshot};
use tfp_core::trajectory::{Envelope, RunRecord};

use crate::{read_file, sibling, to_json, write_file, CliError, RunArgs};

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV output (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Snapshot file, one JSON line per snapshot (default: next to --out).
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    /// Also snapshot every this many steps.
    #[arg(long = "snapshot-every")]
    pub snapshot_every: Option<u64>,
    /// Continue from the last snapshot in this file.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Summary JSON (default: next to --out).
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Write the final graph as `n m` followed by one `u v` line per edge.
    #[arg(long)]
    pub export: Option<PathBuf>,
}

pub struct SimulateOutput {
    pub records: Vec<RunRecord>,
    pub csv: String,
    pub snapshots: Vec<String>,
    pub summary: RunSummary,
    pub state: ProcessState,
}

/// One run; `resume` continues a snapshot instead of starting fresh.
pub fn simulate_run(
    args: &RunArgs,
    seed: u64,
    resume: Option<&Snapshot>,
    snapshot_every: Option<u64>,
) -> Result<SimulateOutput, CliError> {
    let params = args.params()?;
    let mut config = args.config(seed)?;
    let mut state = match resume {
        Some(snap) => {
            if snap.n != args.n {
                return Err(CliError::usage(format!("snapshot has n = {}, --n is {}", snap.n, args.n)));
            }
            config.seed = snap.seed;
            ProcessState::restore(snap, config.instrumentation).map_err(CliError::failed)?
        }
        None => new_state(&config).map_err(CliError::usage)?,
    };
    if snapshot_every == Some(0) {
        return Err(CliError::usage("--snapshot-every must be positive"));
    }
    let mut snapshots = Vec::new();
    let records = run_observed(&mut state, &config, &params, |s| {
        if snapshot_every.is_some_and(|k| s.m() % k == 0) {
            snapshots.push(s.snapshot().to_json_line());
        }
    })
    .map_err(CliError::failed)?;
    if snapshots.is_empty() || snapshot_every.is_none_or(|k| state.m() % k != 0) {
        snapshots.push(state.snapshot().to_json_line());
    }
    let above: Vec<u64> = records
        .iter()
        .filter(|r| params.envelope(Envelope::GQ, r.t).is_ok_and(|g| g > 1.0))
        .map(|r| r.m)
        .collect();
    let csv = to_string(&rows_for_run(config.seed, &records));
    let summary = RunSummary {
        n: args.n,
        seed: config.seed,
        eps: params.eps,
        big_c: params.big_c,
        omega: params.omega,
        t_star: params.t_star(),
        instrumentation: format!("{:?}", config.instrumentation).to_lowercase(),
        record_every: config.record_every,
        final_m: state.m(),
        final_t: params.time(state.m()),
        final_q: state.q() as u64,
        complete: state.is_complete(),
        max_degree: max_degree(&state),
        edge_ratio: edge_ratio(args.n, state.m() as usize),
        rows: records.len(),
        samples_g_above_one: above.len(),
        first_m_g_above_one: above.first().copied(),
    };
    Ok(SimulateOutput {
        records,
        csv,
        snapshots,
        summary,
        state,
    })
}

pub fn cmd(a: SimulateArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let resume = match &a.resume {
        Some(p) => Some(Snapshot::last_from_jsonl(&read_file(p)?).map_err(CliError::failed)?),
        None => None,
    };
    let out = simulate_run(&a.run, a.seed, resume.as_ref(), a.snapshot_every)?;
    match &a.out {
        Some(path) => write_file(path, &out.csv)?,
        None => print!("{}", out.csv),
    }
    let snapshot = a.snapshot.clone().or_else(|| a.out.as_ref().map(|p| sibling(p, "snapshot.jsonl")));
    if let Some(path) = snapshot {
        let mut text = out.snapshots.join("\n");
        text.push('\n');
        write_file(&path, text)?;
    }
    let summary = a.summary.clone().or_else(|| a.out.as_ref().map(|p| sibling(p, "summary.json")));
    if let Some(path) = summary {
        write_file(&path, to_json(&out.summary))?;
    }
    if let Some(path) = &a.export {
        write_file(path, out.state.export_graph())?;
    }
    eprintln!(
        "n={} seed={} m={} t={:.4} q={} rows={} ({:.2} s)",
        out.summary.n,
        out.summary.seed,
        out.summary.final_m,
        out.summary.final_t,
        out.summary.final_q,
        out.summary.rows,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
