//! The triangle-free process: state, single steps, full runs, on-demand
//! counts and a brute-force oracle.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{and_count, for_each_and, BitMatrix};
use crate::rng::Xoshiro256pp;
use crate::trajectory::{self, Params, RunRecord};

/// Largest supported vertex count (pairs are packed into 32 bits).
pub const MAX_N: usize = 1 << 16;

const NO_POS: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProcessError {
    #[error("n must be between 2 and {MAX_N}, got {0}")]
    InvalidN(usize),
    #[error("record_every must be at least 1")]
    InvalidRecordEvery,
    #[error("process complete: no open pairs remain")]
    ProcessComplete,
    #[error("pair {{{0}, {1}}} is not a valid pair of distinct vertices")]
    BadPair(usize, usize),
    #[error("pair {{{0}, {1}}} is not open")]
    NotOpen(usize, usize),
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error("graph export: {0}")]
    GraphFormat(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Instrumentation {
    /// Adjacency, openness and `q` only.
    Light,
    /// Additionally every `Y_e` and their total.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stop {
    /// Stop once `m` reaches this many edges.
    Steps(u64),
    /// Stop at the first `m` with `t ≥ t_max`.
    Time(f64),
    /// Run until no open pair remains.
    Completion,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: usize,
    pub seed: u64,
    pub stop: Stop,
    pub instrumentation: Instrumentation,
    pub record_every: u64,
    /// Open edges sampled for moment statistics when `q` exceeds `exact_threshold`.
    pub sample_size: usize,
    pub exact_threshold: usize,
}

impl RunConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        RunConfig {
            n,
            seed,
            stop: Stop::Completion,
            instrumentation: Instrumentation::Light,
            record_every: default_record_every(n),
            sample_size: 4096,
            exact_threshold: 200_000,
        }
    }

    pub fn validate(&self) -> Result<(), ProcessError> {
        if !(2..=MAX_N).contains(&self.n) {
            return Err(ProcessError::InvalidN(self.n));
        }
        if self.record_every == 0 {
            return Err(ProcessError::InvalidRecordEvery);
        }
        Ok(())
    }
}

/// About fifty samples per `n^{3/2}` steps.
pub fn default_record_every(n: usize) -> u64 {
    ((n as f64).powf(1.5) / 50.0).floor().max(1.0) as u64
}

/// Result of one step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub chosen: (usize, usize),
    /// Open pairs closed by the new edge, in removal order.
    pub closed: Vec<(usize, usize)>,
    /// `Y_e` of the chosen edge just before it was added; equals `closed.len()`.
    pub y_of_chosen: usize,
    /// Change of `𝕐` (full mode only).
    pub delta_ybb: Option<i64>,
}

/// Deliberate bookkeeping faults, used to check that the verification suite
/// notices broken Y maintenance.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Skip one decrement per step when a closed pair loses its Y-neighbours.
    SkipYDecrement,
}

#[inline]
fn pack(u: usize, v: usize) -> u32 {
    ((u as u32) << 16) | v as u32
}

#[inline]
fn unpack(p: u32) -> (usize, usize) {
    ((p >> 16) as usize, (p & 0xffff) as usize)
}

#[inline]
fn canon(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// The evolving graph `G_m` together with its open pairs.
#[derive(Clone, Debug)]
pub struct ProcessState {
    n: usize,
    seed: u64,
    m: u64,
    adj: BitMatrix,
    open: BitMatrix,
    open_list: Vec<u32>,
    pos: Vec<u32>,
    history: Vec<(u32, u32)>,
    y: Option<Vec<u32>>,
    ybb: Option<i64>,
    level: Instrumentation,
    fault: Option<Fault>,
}

/// Builds the initial state for a run configuration.
pub fn new_state(config: &RunConfig) -> Result<ProcessState, ProcessError> {
    config.validate()?;
    ProcessState::new(config.n, config.seed, config.instrumentation)
}

impl ProcessState {
    pub fn new(n: usize, seed: u64, level: Instrumentation) -> Result<Self, ProcessError> {
        if !(2..=MAX_N).contains(&n) {
            return Err(ProcessError::InvalidN(n));
        }
        let pairs = n * (n - 1) / 2;
        let mut open_list = Vec::with_capacity(pairs);
        for u in 0..n {
            for v in u + 1..n {
                open_list.push(pack(u, v));
            }
        }
        let pos = (0..pairs as u32).collect();
        let (y, ybb) = match level {
            Instrumentation::Light => (None, None),
            Instrumentation::Full => (Some(vec![0; pairs]), Some(0)),
        };
        Ok(ProcessState {
            n,
            seed,
            m: 0,
            adj: BitMatrix::new(n),
            open: BitMatrix::complete(n),
            open_list,
            pos,
            history: Vec::new(),
            y,
            ybb,
            level,
            fault: None,
        })
    }

    /// Index of the pair `{u, v}` (`u < v`) in the canonical enumeration.
    #[inline]
    fn pair_index(&self, u: usize, v: usize) -> usize {
        debug_assert!(u < v && v < self.n);
        u * (2 * self.n - u - 1) / 2 + (v - u - 1)
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<(usize, usize), ProcessError> {
        if u == v || u >= self.n || v >= self.n {
            return Err(ProcessError::BadPair(u, v));
        }
        Ok(canon(u, v))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn q(&self) -> usize {
        self.open_list.len()
    }

    pub fn instrumentation(&self) -> Instrumentation {
        self.level
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adj
    }

    pub fn openness(&self) -> &BitMatrix {
        &self.open
    }

    /// Added edges in order; edge `i` was added in step `i + 1`.
    pub fn history(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.history.iter().map(|&(u, v)| (u as usize, v as usize))
    }

    /// The open pair stored at position `i` of the open list.
    pub fn open_pair_at(&self, i: usize) -> (usize, usize) {
        unpack(self.open_list[i])
    }

    /// Open pairs in open-list order.
    pub fn open_pairs(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.open_list.iter().map(|&p| unpack(p))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adj.get(u, v)
    }

    pub fn is_open(&self, u: usize, v: usize) -> bool {
        u != v && self.open.get(u, v)
    }

    pub fn is_complete(&self) -> bool {
        self.open_list.is_empty()
    }

    /// `Ŷ_{uv}`: vertices `w` with `{u,w}` open and `{v,w}` an edge, or the
    /// mirror. Defined for every pair.
    pub fn y_count(&self, u: usize, v: usize) -> Result<usize, ProcessError> {
        self.check_pair(u, v)?;
        Ok(self.y_unchecked(u, v))
    }

    #[inline]
    fn y_unchecked(&self, u: usize, v: usize) -> usize {
        and_count(self.open.row(u), self.adj.row(v)) + and_count(self.open.row(v), self.adj.row(u))
    }

    /// `X_e` for an open pair: the number of X-neighbour pairs, two per open
    /// triangle containing `e`.
    pub fn x_count(&self, u: usize, v: usize) -> Result<usize, ProcessError> {
        let (l, r) = self.x_split(u, v)?;
        Ok(l + r)
    }

    /// `(X_e^L, X_e^R)`; both equal the number of open triangles on `e`.
    pub fn x_split(&self, u: usize, v: usize) -> Result<(usize, usize), ProcessError> {
        self.check_pair(u, v)?;
        if !self.open.get(u, v) {
            return Err(ProcessError::NotOpen(u, v));
        }
        let t = and_count(self.open.row(u), self.open.row(v));
        Ok((t, t))
    }

    /// `Z_e`: common neighbours of `u` and `v`.
    pub fn z_count(&self, u: usize, v: usize) -> Result<usize, ProcessError> {
        self.check_pair(u, v)?;
        Ok(and_count(self.adj.row(u), self.adj.row(v)))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj.row_count(v)
    }

    pub fn open_degree(&self, v: usize) -> usize {
        self.open.row_count(v)
    }

    /// Maintained `Y_e` (full mode, open `e` only).
    pub fn y_counter(&self, u: usize, v: usize) -> Option<u32> {
        let (a, b) = canon(u, v);
        if a == b || b >= self.n || !self.open.get(a, b) {
            return None;
        }
        let idx = self.pair_index(a, b);
        self.y.as_ref().map(|y| y[idx])
    }

    /// Maintained `𝕐 = Σ_{e open} Y_e` (full mode).
    pub fn ybb(&self) -> Option<i64> {
        self.ybb
    }

    #[doc(hidden)]
    pub fn inject_fault(&mut self, fault: Option<Fault>) {
        self.fault = fault;
    }

    /// The pair the next call to `step` will add.
    pub fn next_pair(&self) -> Option<(usize, usize)> {
        let q = self.open_list.len();
        if q == 0 {
            return None;
        }
        let mut rng = Xoshiro256pp::for_step(self.seed, self.m);
        let idx = rng.index(q as u64) as usize;
        Some(unpack(self.open_list[idx]))
    }

    /// Adds one uniformly chosen open pair.
    pub fn step(&mut self) -> Result<StepOutcome, ProcessError> {
        let (u, v) = self.next_pair().ok_or(ProcessError::ProcessComplete)?;
        Ok(self.add_open(u, v))
    }

    /// Adds a specific open pair as the next step.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<StepOutcome, ProcessError> {
        let (u, v) = self.check_pair(u, v)?;
        if !self.open.get(u, v) {
            return Err(ProcessError::NotOpen(u, v));
        }
        Ok(self.add_open(u, v))
    }

    fn add_open(&mut self, u: usize, v: usize) -> StepOutcome {
        let mut closed = Vec::new();
        for_each_and(self.open.row(u), self.adj.row(v), |w| closed.push(canon(u, w)));
        for_each_and(self.open.row(v), self.adj.row(u), |w| closed.push(canon(v, w)));

        let delta_ybb = if self.y.is_some() {
            Some(self.update_y(u, v, &closed))
        } else {
            None
        };

        self.remove_open(u, v);
        for &(a, b) in &closed {
            self.remove_open(a, b);
        }
        self.adj.set_sym(u, v);
        self.history.push((u as u32, v as u32));
        self.m += 1;

        StepOutcome {
            chosen: (u, v),
            y_of_chosen: closed.len(),
            closed,
            delta_ybb,
        }
    }

    /// Updates the Y counters for adding `{u, v}`; runs on the state before
    /// the edge is inserted. Returns the change of `𝕐`.
    fn update_y(&mut self, u: usize, v: usize, closed: &[(usize, usize)]) -> i64 {
        let mut y = self.y.take().expect("full mode");

        let x_e = 2 * and_count(self.open.row(u), self.open.row(v)) as i64;
        let lost: i64 = closed.iter().map(|&(a, b)| y[self.pair_index(a, b)] as i64).sum();
        let delta = x_e - 2 * lost;

        // Open triangles on {u, v} become Y-adjacent pairs through the new edge.
        for_each_and(self.open.row(u), self.open.row(v), |w| {
            let (a, b) = canon(u, w);
            y[self.pair_index(a, b)] += 1;
            let (a, b) = canon(v, w);
            y[self.pair_index(a, b)] += 1;
        });

        let mut skip = self.fault == Some(Fault::SkipYDecrement);
        for &(a, b) in closed {
            for (p, q) in [(a, b), (b, a)] {
                for_each_and(self.open.row(p), self.adj.row(q), |x| {
                    if skip {
                        skip = false;
                        return;
                    }
                    let (c, d) = canon(p, x);
                    let idx = self.pair_index(c, d);
                    y[idx] = y[idx].wrapping_sub(1);
                });
            }
        }
        y[self.pair_index(u, v)] = 0;
        for &(a, b) in closed {
            y[self.pair_index(a, b)] = 0;
        }

        self.y = Some(y);
        if let Some(total) = self.ybb.as_mut() {
            *total += delta;
        }
        delta
    }

    fn remove_open(&mut self, a: usize, b: usize) {
        self.open.clear_sym(a, b);
        let idx = self.pair_index(a, b);
        let p = self.pos[idx] as usize;
        debug_assert!(p != NO_POS as usize);
        let last = self.open_list.pop().expect("non-empty open list");
        if p < self.open_list.len() {
            self.open_list[p] = last;
            let (c, d) = unpack(last);
            let li = self.pair_index(c, d);
            self.pos[li] = p as u32;
        }
        self.pos[idx] = NO_POS;
    }

    /// Brute-force statistics from the edge list alone.
    pub fn recompute_oracle(&self) -> OracleStats {
        OracleStats::from_edges(self.n, self.history())
    }

    /// Compares incremental bookkeeping with the oracle; returns a
    /// description of the first mismatch.
    pub fn check_against_oracle(&self) -> Result<(), String> {
        let oracle = self.recompute_oracle();
        self.check_against(&oracle)
    }

    pub fn check_against(&self, oracle: &OracleStats) -> Result<(), String> {
        let n = self.n;
        for u in 0..n {
            for v in 0..n {
                if self.open.get(u, v) != oracle.is_open(u, v) {
                    return Err(format!("openness of {{{u}, {v}}} differs from the oracle"));
                }
            }
        }
        if self.q() != oracle.q {
            return Err(format!("q = {} but the oracle has {}", self.q(), oracle.q));
        }
        if self.open.count() != 2 * self.q() {
            return Err("openness popcount is not 2q".into());
        }
        for (i, &p) in self.open_list.iter().enumerate() {
            let (a, b) = unpack(p);
            if !self.open.get(a, b) || self.pos[self.pair_index(a, b)] as usize != i {
                return Err(format!("open list entry {i} is inconsistent"));
            }
        }
        if let Some(y) = &self.y {
            for &((a, b), val) in &oracle.y {
                let have = y[self.pair_index(a, b)] as u64;
                if have != val {
                    return Err(format!(
                        "incremental Y counter of {{{a}, {b}}} is {have}, oracle says {val}"
                    ));
                }
            }
            let sum: i64 = oracle.y.iter().map(|&(_, val)| val as i64).sum();
            if self.ybb != Some(sum) || sum != oracle.ybb as i64 {
                return Err(format!(
                    "running total of Y is {:?}, oracle says {}",
                    self.ybb, oracle.ybb
                ));
            }
        }
        Ok(())
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            format_version: 1,
            n: self.n,
            seed: self.seed,
            m: self.m,
            edges: self.history.iter().map(|&(u, v)| [u as usize, v as usize]).collect(),
        }
    }

    /// Replays a snapshot. Step randomness is keyed by `(seed, m)`, so the
    /// restored state continues exactly like the uninterrupted run.
    pub fn restore(snap: &Snapshot, level: Instrumentation) -> Result<Self, ProcessError> {
        if snap.format_version != 1 {
            return Err(ProcessError::Snapshot(format!(
                "unsupported format_version {}",
                snap.format_version
            )));
        }
        if snap.m != snap.edges.len() as u64 {
            return Err(ProcessError::Snapshot(format!(
                "m = {} but {} edges listed",
                snap.m,
                snap.edges.len()
            )));
        }
        let mut state = ProcessState::new(snap.n, snap.seed, level)?;
        state.replay(snap.edges.iter().map(|e| (e[0], e[1])))?;
        Ok(state)
    }

    /// Adds a sequence of edges, each of which must be open when added.
    pub fn replay(
        &mut self,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<(), ProcessError> {
        for (u, v) in edges {
            self.add_edge(u, v)?;
        }
        Ok(())
    }

    /// Text export: `n m`, then one `u v` line per edge in addition order.
    pub fn export_graph(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m);
        for &(u, v) in &self.history {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Parses the text export back into `(n, edges)`.
pub fn parse_graph_export(text: &str) -> Result<(usize, Vec<(usize, usize)>), ProcessError> {
    let bad = |msg: String| ProcessError::GraphFormat(msg);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("empty input".into()))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| bad(format!("bad header {header:?}"))))
        .collect::<Result<_, _>>()?;
    let [n, m] = nums[..] else {
        return Err(bad(format!("bad header {header:?}")));
    };
    let mut edges = Vec::with_capacity(m);
    for (i, line) in lines.enumerate() {
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| bad(format!("line {}: {line:?}", i + 2))))
            .collect::<Result<_, _>>()?;
        let [u, v] = nums[..] else {
            return Err(bad(format!("line {}: expected two vertices", i + 2)));
        };
        if u >= n || v >= n || u == v {
            return Err(bad(format!("line {}: invalid edge {u} {v}", i + 2)));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(bad(format!("header says {m} edges, found {}", edges.len())));
    }
    Ok((n, edges))
}

/// One snapshot line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub format_version: u32,
    pub n: usize,
    pub seed: u64,
    pub m: u64,
    pub edges: Vec<[usize; 2]>,
}

impl Snapshot {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("snapshot serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self, ProcessError> {
        serde_json::from_str(line).map_err(|e| ProcessError::Snapshot(e.to_string()))
    }

    /// The last snapshot of a JSON Lines file.
    pub fn last_from_jsonl(text: &str) -> Result<Self, ProcessError> {
        let line = text
            .lines()
            .rev()
            .find(|l| !l.trim().is_empty())
            .ok_or_else(|| ProcessError::Snapshot("no snapshot lines".into()))?;
        Self::from_json_line(line)
    }
}

/// Statistics recomputed from scratch with plain loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleStats {
    pub n: usize,
    open: Vec<bool>,
    pub q: usize,
    /// `Y_e` for every open pair, in canonical pair order.
    pub y: Vec<((usize, usize), u64)>,
    pub ybb: u64,
    /// `Σ_{e open} X_e`.
    pub xbb: u64,
    pub open_triangles: u64,
    pub ygraph_edges: u64,
}

impl OracleStats {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for (u, v) in edges {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        let mut open = vec![false; n * n];
        for u in 0..n {
            for v in 0..n {
                if u != v && !adj[u][v] && !(0..n).any(|w| adj[u][w] && adj[v][w]) {
                    open[u * n + v] = true;
                }
            }
        }
        let is_open = |a: usize, b: usize| open[a * n + b];
        let mut y = Vec::new();
        let (mut q, mut ybb, mut xbb) = (0, 0, 0);
        for u in 0..n {
            for v in u + 1..n {
                if !is_open(u, v) {
                    continue;
                }
                q += 1;
                let mut ye = 0;
                let mut xe = 0;
                for w in 0..n {
                    if w == u || w == v {
                        continue;
                    }
                    if (is_open(u, w) && adj[v][w]) || (is_open(v, w) && adj[u][w]) {
                        ye += 1;
                    }
                    if is_open(u, w) && is_open(v, w) {
                        xe += 2;
                    }
                }
                y.push(((u, v), ye));
                ybb += ye;
                xbb += xe;
            }
        }
        let mut open_triangles = 0;
        let mut ygraph_edges = 0;
        for a in 0..n {
            for b in 0..n {
                for c in b + 1..n {
                    if a == b || a == c || !is_open(a, b) || !is_open(a, c) {
                        continue;
                    }
                    if adj[b][c] {
                        ygraph_edges += 1;
                    }
                    if a < b && is_open(b, c) {
                        open_triangles += 1;
                    }
                }
            }
        }
        OracleStats {
            n,
            open,
            q,
            y,
            ybb,
            xbb,
            open_triangles,
            ygraph_edges,
        }
    }

    pub fn is_open(&self, u: usize, v: usize) -> bool {
        self.open[u * self.n + v]
    }

    pub fn y_of(&self, u: usize, v: usize) -> Option<u64> {
        let key = canon(u, v);
        self.y
            .binary_search_by(|(p, _)| p.cmp(&key))
            .ok()
            .map(|i| self.y[i].1)
    }
}

/// Advances `state` until the stop condition, recording samples.
///
/// A fresh state records `m = 0`; afterwards a record is taken whenever `m`
/// is a multiple of `record_every`, plus one final record.
pub fn run(
    state: &mut ProcessState,
    config: &RunConfig,
    params: &Params,
) -> Result<Vec<RunRecord>, ProcessError> {
    run_observed(state, config, params, |_| {})
}

/// As [`run`], calling `observe` after every step.
pub fn run_observed(
    state: &mut ProcessState,
    config: &RunConfig,
    params: &Params,
    mut observe: impl FnMut(&ProcessState),
) -> Result<Vec<RunRecord>, ProcessError> {
    config.validate()?;
    let sampler = trajectory::Sampler {
        sample_size: config.sample_size,
        exact_threshold: config.exact_threshold,
    };
    let mut records = Vec::new();
    if state.m == 0 {
        records.push(trajectory::sample_record(state, params, &sampler));
    }
    let mut last_recorded = state.m;
    while !state.is_complete() && !stop_reached(state, config.stop, params) {
        state.step()?;
        observe(state);
        if state.m % config.record_every == 0 {
            records.push(trajectory::sample_record(state, params, &sampler));
            last_recorded = state.m;
        }
    }
    if last_recorded != state.m {
        records.push(trajectory::sample_record(state, params, &sampler));
    }
    Ok(records)
}

fn stop_reached(state: &ProcessState, stop: Stop, params: &Params) -> bool {
    match stop {
        Stop::Steps(max) => state.m >= max,
        Stop::Time(t_max) => params.time(state.m) >= t_max,
        Stop::Completion => false,
    }
}

/// Runs a fresh process to completion without recording.
pub fn run_to_completion(n: usize, seed: u64) -> Result<ProcessState, ProcessError> {
    let mut state = ProcessState::new(n, seed, Instrumentation::Light)?;
    while !state.is_complete() {
        state.step()?;
    }
    Ok(state)
}
