//! File formats, ensemble aggregation and the verification suite.

pub mod aggregate;
pub mod csv;
pub mod verify;

use serde::{Deserialize, Serialize};

/// Summary written next to every run so envelopes can be recomputed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub n: usize,
    pub seed: u64,
    pub eps: f64,
    pub big_c: f64,
    pub omega: u64,
    pub t_star: f64,
    pub instrumentation: String,
    pub record_every: u64,
    pub final_m: u64,
    pub final_t: f64,
    pub final_q: u64,
    pub complete: bool,
    pub max_degree: usize,
    pub edge_ratio: f64,
    pub rows: usize,
    /// Recorded samples where the envelope `g_q(t)` exceeds 1, so the
    /// normalized errors there carry no tracking meaning.
    pub samples_g_above_one: usize,
    #[serde(default)]
    pub first_m_g_above_one: Option<u64>,
}
