//! Measurements on process states: degrees, independence number, set
//! profiles, moment statistics and Ramsey witness certificates.

mod alpha;
mod witness;

pub use alpha::{alpha_exact, alpha_heuristic, is_independent, HeuristicBudget, IndependentSet};
pub use witness::{
    edge_ratio, ramsey_witness, sqrt_n_log_n, verify_maximal_triangle_free, AlphaKind, Ratios, WitnessCertificate,
    WitnessConfig,
};

use rand::seq::index;
use serde::Serialize;
use thiserror::Error;

use crate::bits::{and_count, BitMatrix};
use crate::process::{ProcessError, ProcessState};
use crate::rng::Xoshiro256pp;
use crate::trajectory::Params;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("no open pairs")]
    NoOpenPairs,
    #[error("graph has {n} vertices, above the exact-solver guard of {guard}")]
    TooLarge { n: usize, guard: usize },
    #[error("exact search stopped after {0} nodes without a proof of optimality")]
    BudgetExceeded(u64),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Process(#[from] ProcessError),
}

pub fn max_degree(state: &ProcessState) -> usize {
    (0..state.n()).map(|v| state.degree(v)).max().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeStats {
    pub max: usize,
    /// Vertices attaining the maximum, ascending.
    pub argmax: Vec<usize>,
    /// `histogram[d]` is the number of vertices of degree `d`.
    pub histogram: Vec<usize>,
}

pub fn max_degree_stats(state: &ProcessState) -> DegreeStats {
    degree_stats(state.adjacency())
}

pub fn degree_stats(adj: &BitMatrix) -> DegreeStats {
    let degrees: Vec<usize> = (0..adj.n()).map(|v| adj.row_count(v)).collect();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0; max + 1];
    for &d in &degrees {
        histogram[d] += 1;
    }
    let argmax = (0..degrees.len()).filter(|&v| degrees[v] == max).collect();
    DegreeStats {
        max,
        argmax,
        histogram,
    }
}

/// Population moments of `Y_e` and `X_e` over open edges.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentStats {
    pub ybar: f64,
    pub xbar: f64,
    pub var_y: f64,
    pub cov_xy: f64,
    /// Number of open edges the estimates are based on.
    pub sample_size: usize,
    /// Whether every open edge was visited.
    pub exact: bool,
    /// `Σ Y_e` and `Σ X_e`, present for exact sweeps.
    pub sum_y: Option<u64>,
    pub sum_x: Option<u64>,
}

/// Exact sweep over all open edges when `q ≤ exact_threshold`, otherwise a
/// uniform sample of `sample_size` open edges without replacement. The
/// sample is drawn from a stream keyed by `(seed, m)`, separate from edge
/// selection.
pub fn moment_stats(
    state: &ProcessState,
    sample_size: usize,
    exact_threshold: usize,
) -> Result<MomentStats, AnalysisError> {
    let q = state.q();
    if q == 0 {
        return Err(AnalysisError::NoOpenPairs);
    }
    let (adj, open) = (state.adjacency(), state.openness());
    let measure = |(u, v): (usize, usize)| -> (u128, u128) {
        let y = and_count(open.row(u), adj.row(v)) + and_count(open.row(v), adj.row(u));
        let x = 2 * and_count(open.row(u), open.row(v));
        (y as u128, x as u128)
    };
    let exact = q <= exact_threshold || sample_size >= q;
    let (mut sy, mut sx, mut syy, mut sxy) = (0u128, 0u128, 0u128, 0u128);
    let mut count = 0usize;
    let mut add = |(y, x): (u128, u128)| {
        sy += y;
        sx += x;
        syy += y * y;
        sxy += x * y;
        count += 1;
    };
    if exact {
        state.open_pairs().map(measure).for_each(&mut add);
    } else {
        let mut rng = Xoshiro256pp::for_sample(state.seed(), state.m());
        let size = sample_size.max(1);
        for i in index::sample(&mut rng, q, size).into_iter() {
            add(measure(state.open_pair_at(i)));
        }
    }
    let n = count as f64;
    let nn = count as i128;
    let var_num = nn * syy as i128 - (sy as i128) * (sy as i128);
    let cov_num = nn * sxy as i128 - (sx as i128) * (sy as i128);
    Ok(MomentStats {
        ybar: sy as f64 / n,
        xbar: sx as f64 / n,
        var_y: var_num as f64 / (n * n),
        cov_xy: cov_num as f64 / (n * n),
        sample_size: count,
        exact,
        sum_y: exact.then_some(sy as u64),
        sum_x: exact.then_some(sx as u64),
    })
}

/// `𝕐` from the edges: every edge `{v, w}` with a common open neighbour `u`
/// contributes the Y-adjacent pair `{u,v}`, `{u,w}`, i.e. 2 to `Σ Y_e`.
pub fn ybb_from_edges(state: &ProcessState) -> u64 {
    let open = state.openness();
    state
        .history()
        .map(|(v, w)| 2 * and_count(open.row(v), open.row(w)) as u64)
        .sum()
}

/// Unlabelled triangles whose three pairs are all open.
pub fn open_triangle_count(state: &ProcessState) -> u64 {
    let open = state.openness();
    let total: u64 = state
        .open_pairs()
        .map(|(u, v)| and_count(open.row(u), open.row(v)) as u64)
        .sum();
    total / 3
}

/// Open-pair statistics of a vertex set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetProfile {
    pub set: Vec<usize>,
    pub s: usize,
    pub delta: f64,
    /// Vertices with at least `n^δ` neighbours in the set, by decreasing count.
    pub j: Vec<usize>,
    /// `a[i] = |N(j[i]) ∩ S|`, non-increasing.
    pub a: Vec<usize>,
    pub o_s: u64,
    pub o_n: u64,
    /// `(1 − ε)·C(s,2)·e^{−4t²}`.
    pub a_reference: f64,
    /// `(1 − ε)·(C(s,2) − 2m²/n²)·e^{−4t²}`.
    pub a_prime_reference: f64,
    /// `10√ε`, reported for context only.
    pub gamma: f64,
}

pub const DEFAULT_DELTA: f64 = 0.1;

/// Profile of `set` in the current graph. `family` lists the vertex sets
/// whose internal open pairs are excluded from `o_N`.
pub fn set_profile(
    state: &ProcessState,
    set: &[usize],
    delta_exp: f64,
    family: &[Vec<usize>],
    params: &Params,
) -> Result<SetProfile, AnalysisError> {
    let n = state.n();
    let mut set = set.to_vec();
    set.sort_unstable();
    set.dedup();
    if let Some(&v) = set.iter().find(|&&v| v >= n) {
        return Err(AnalysisError::VertexOutOfRange(v));
    }
    let mut mask = BitMatrix::new(n.max(1));
    for &v in &set {
        mask.set(0, v);
    }
    let threshold = (n as f64).powf(delta_exp);
    let mut counted: Vec<(usize, usize)> = (0..n)
        .map(|v| (v, and_count(state.adjacency().row(v), mask.row(0))))
        .filter(|&(_, a)| a as f64 >= threshold)
        .collect();
    counted.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));

    let inside_member = |u: usize, v: usize| family.iter().any(|f| f.contains(&u) && f.contains(&v));
    let (mut o_s, mut o_n) = (0, 0);
    for (i, &u) in set.iter().enumerate() {
        for &v in &set[i + 1..] {
            if state.is_open(u, v) {
                o_s += 1;
                if !inside_member(u, v) {
                    o_n += 1;
                }
            }
        }
    }
    let s = set.len();
    let pairs = (s * s.saturating_sub(1) / 2) as f64;
    let t = params.time(state.m());
    let decay = (-4.0 * t * t).exp();
    let m = state.m() as f64;
    let nf = n as f64;
    Ok(SetProfile {
        s,
        delta: delta_exp,
        j: counted.iter().map(|c| c.0).collect(),
        a: counted.iter().map(|c| c.1).collect(),
        o_s,
        o_n,
        a_reference: (1.0 - params.eps) * pairs * decay,
        a_prime_reference: (1.0 - params.eps) * (pairs - 2.0 * m * m / (nf * nf)) * decay,
        gamma: 10.0 * params.eps.sqrt(),
        set,
    })
}
