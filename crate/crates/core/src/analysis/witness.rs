//! Ramsey lower-bound witnesses from completed runs.

use serde::{Deserialize, Serialize};

use super::{alpha_exact, alpha_heuristic, degree_stats, AnalysisError, HeuristicBudget};
use crate::bits::BitMatrix;
use crate::process::run_to_completion;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaKind {
    Exact,
    HeuristicLowerBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    pub alpha_over_sqrt_nlogn: f64,
    pub maxdeg_over_sqrt_nlogn: f64,
    pub edges_over_n32_sqrtlogn: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub n: usize,
    pub seed: u64,
    pub edges: Vec<[usize; 2]>,
    pub alpha_kind: AlphaKind,
    pub alpha_value: usize,
    pub max_degree: usize,
    pub ratios: Ratios,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub claim: Option<String>,
}

#[derive(Clone, Debug)]
pub struct WitnessConfig {
    pub n: usize,
    pub seed: u64,
    /// Largest `n` handed to the exact solver.
    pub exact_guard: usize,
    /// Search-node limit for the exact solver; on exhaustion the certificate
    /// falls back to a labelled heuristic bound.
    pub node_budget: Option<u64>,
    pub heuristic: HeuristicBudget,
}

impl WitnessConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        WitnessConfig {
            n,
            seed,
            exact_guard: 400,
            node_budget: Some(50_000_000),
            heuristic: HeuristicBudget::default(),
        }
    }
}

/// Checks that the graph has no triangle and that every non-edge has a
/// common neighbour.
pub fn verify_maximal_triangle_free(adj: &BitMatrix) -> Result<(), AnalysisError> {
    let n = adj.n();
    for u in 0..n {
        for v in adj.iter_row(u).filter(|&v| v > u) {
            if adj.row(u).iter().zip(adj.row(v)).any(|(a, b)| a & b != 0) {
                return Err(AnalysisError::Verification(format!(
                    "edge {{{u}, {v}}} lies in a triangle"
                )));
            }
        }
    }
    let mut reach = vec![0u64; adj.words()];
    for u in 0..n {
        reach.copy_from_slice(adj.row(u));
        reach[u / 64] |= 1 << (u % 64);
        for w in adj.iter_row(u) {
            for (r, x) in reach.iter_mut().zip(adj.row(w)) {
                *r |= x;
            }
        }
        for v in 0..n {
            if reach[v / 64] >> (v % 64) & 1 == 0 {
                return Err(AnalysisError::Verification(format!(
                    "non-edge {{{u}, {v}}} could still be added"
                )));
            }
        }
    }
    Ok(())
}

pub fn edge_ratio(n: usize, edges: usize) -> f64 {
    let nf = n as f64;
    edges as f64 / (nf.powf(1.5) * nf.ln().sqrt())
}

pub fn sqrt_n_log_n(n: usize) -> f64 {
    let nf = n as f64;
    (nf * nf.ln()).sqrt()
}

/// Runs the process to completion and certifies the final graph.
pub fn ramsey_witness(config: &WitnessConfig) -> Result<WitnessCertificate, AnalysisError> {
    let state = run_to_completion(config.n, config.seed)?;
    let adj = state.adjacency();
    verify_maximal_triangle_free(adj)?;
    let exact = if config.n <= config.exact_guard {
        match alpha_exact(adj, config.exact_guard, config.node_budget) {
            Ok(set) => Some(set),
            Err(AnalysisError::BudgetExceeded(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let (kind, alpha) = match exact {
        Some(set) => (AlphaKind::Exact, set.size),
        None => (
            AlphaKind::HeuristicLowerBound,
            alpha_heuristic(adj, &config.heuristic, config.seed).size,
        ),
    };
    let max_degree = degree_stats(adj).max;
    let root = sqrt_n_log_n(config.n);
    Ok(WitnessCertificate {
        n: config.n,
        seed: config.seed,
        edges: state.history().map(|(u, v)| [u, v]).collect(),
        alpha_kind: kind,
        alpha_value: alpha,
        max_degree,
        ratios: Ratios {
            alpha_over_sqrt_nlogn: alpha as f64 / root,
            maxdeg_over_sqrt_nlogn: max_degree as f64 / root,
            edges_over_n32_sqrtlogn: edge_ratio(config.n, state.m() as usize),
        },
        claim: (kind == AlphaKind::Exact).then(|| format!("R(3, {}) > {}", alpha + 1, config.n)),
    })
}
