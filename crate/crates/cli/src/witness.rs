use std::path::PathBuf;

use clap::Args;
use tfp_core::analysis::{ramsey_witness, AlphaKind, HeuristicBudget, WitnessConfig};

use crate::{write_file, CliError};

#[derive(Args, Debug)]
pub struct WitnessArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Certificate JSON (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Graph export: `n m`, then one `u v` line per edge in addition order.
    #[arg(long)]
    pub export: Option<PathBuf>,
    /// Largest n for the exact independence number.
    #[arg(long = "exact-guard", default_value_t = 400)]
    pub exact_guard: usize,
    /// Search-node budget of the exact solver (0 for none).
    #[arg(long = "node-budget", default_value_t = 50_000_000)]
    pub node_budget: u64,
    #[arg(long, default_value_t = HeuristicBudget::default().restarts)]
    pub restarts: usize,
    #[arg(long, default_value_t = HeuristicBudget::default().iterations)]
    pub iterations: usize,
}

pub fn cmd(a: WitnessArgs) -> Result<(), CliError> {
    let config = WitnessConfig {
        n: a.n,
        seed: a.seed,
        exact_guard: a.exact_guard,
        node_budget: (a.node_budget > 0).then_some(a.node_budget),
        heuristic: HeuristicBudget {
            restarts: a.restarts,
            iterations: a.iterations,
        },
    };
    let cert = ramsey_witness(&config).map_err(CliError::failed)?;
    // One line: the edge list makes pretty printing unwieldy.
    let json = format!("{}\n", serde_json::to_string(&cert).expect("serializable"));
    match &a.out {
        Some(p) => write_file(p, &json)?,
        None => print!("{json}"),
    }
    if let Some(p) = &a.export {
        let mut text = format!("{} {}\n", cert.n, cert.edges.len());
        for [u, v] in &cert.edges {
            text.push_str(&format!("{u} {v}\n"));
        }
        write_file(p, text)?;
    }
    let kind = match cert.alpha_kind {
        AlphaKind::Exact => "exact",
        AlphaKind::HeuristicLowerBound => "heuristic lower bound",
    };
    eprintln!(
        "n={} seed={} edges={} max degree={} alpha={} ({kind}){}",
        cert.n,
        cert.seed,
        cert.edges.len(),
        cert.max_degree,
        cert.alpha_value,
        cert.claim.as_ref().map(|c| format!(": {c}")).unwrap_or_default()
    );
    Ok(())
}
