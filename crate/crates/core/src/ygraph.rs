//! The Y-graph of a frozen state: open edges, adjacent when they are
//! Y-neighbours (two sides of a triangle whose third side is an edge).
//!
//! An oriented open edge labels one endpoint `L` and the other `R`. A step of
//! type `L` moves the `L` endpoint and pivots on the `R` endpoint; the moved-to
//! vertex inherits the label `L`. Type `R` is the mirror image.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::bits::for_each_and;
use crate::process::ProcessState;
use crate::trajectory::{Envelope, Params};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum YGraphError {
    #[error("pair {{{0}, {1}}} is not an open edge")]
    NotOpen(usize, usize),
    #[error("vertex {0} is not an endpoint of the edge")]
    BadOrientation(usize),
    #[error("no walks of the requested type start at this edge")]
    NoWalks,
    #[error("invalid walk type {0:?} (use L and R)")]
    BadSigma(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    L,
    R,
}

/// A walk type `σ ∈ {L, R}*`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct WalkSpec(pub Vec<Side>);

impl WalkSpec {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `L^k`.
    pub fn repeat(side: Side, k: usize) -> Self {
        WalkSpec(vec![side; k])
    }

    /// Swaps `L` and `R`.
    pub fn mirror(&self) -> Self {
        WalkSpec(
            self.0
                .iter()
                .map(|s| match s {
                    Side::L => Side::R,
                    Side::R => Side::L,
                })
                .collect(),
        )
    }

    /// Number of positions where the symbol changes ("changes of foot").
    pub fn changes(&self) -> usize {
        self.0.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Length of the longest run of equal symbols.
    pub fn longest_run(&self) -> usize {
        let mut best = 0;
        let mut run = 0;
        for (i, s) in self.0.iter().enumerate() {
            run = if i > 0 && self.0[i - 1] == *s { run + 1 } else { 1 };
            best = best.max(run);
        }
        best
    }

    /// All sequences of a given length, in lexicographic order with `L < R`.
    pub fn all_of_length(len: usize) -> Vec<WalkSpec> {
        (0..1usize << len)
            .map(|bits| {
                WalkSpec(
                    (0..len)
                        .map(|i| if bits >> (len - 1 - i) & 1 == 0 { Side::L } else { Side::R })
                        .collect(),
                )
            })
            .collect()
    }
}

impl std::str::FromStr for WalkSpec {
    type Err = YGraphError;

    fn from_str(s: &str) -> Result<Self, YGraphError> {
        let s = s.trim();
        if s == "-" || s == "empty" {
            return Ok(WalkSpec::default());
        }
        s.chars()
            .map(|c| match c {
                'L' | 'l' => Ok(Side::L),
                'R' | 'r' => Ok(Side::R),
                _ => Err(YGraphError::BadSigma(s.to_string())),
            })
            .collect::<Result<_, _>>()
            .map(WalkSpec)
    }
}

impl fmt::Display for WalkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "-");
        }
        for s in &self.0 {
            write!(f, "{}", if *s == Side::L { 'L' } else { 'R' })?;
        }
        Ok(())
    }
}

/// Runs of at most `k` equal symbols and at most `k` changes of foot.
pub fn is_k_short(sigma: &WalkSpec, k: usize) -> bool {
    sigma.longest_run() <= k && sigma.changes() <= k
}

/// One Y-adjacency `e → f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct YAdj {
    pub to: u32,
    /// The shared vertex `e ∩ f`.
    pub pivot: u32,
    /// The endpoint of `f` outside `e`.
    pub moved_to: u32,
}

#[derive(Clone, Debug)]
pub struct YGraph {
    pairs: Vec<(u32, u32)>,
    index: HashMap<(u32, u32), u32>,
    adj: Vec<Vec<YAdj>>,
}

/// An open edge with its `L` endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Oriented {
    pub id: u32,
    pub left: u32,
}

impl YGraph {
    pub fn build(state: &ProcessState) -> Self {
        let mut pairs: Vec<(u32, u32)> = state.open_pairs().map(|(u, v)| (u as u32, v as u32)).collect();
        pairs.sort_unstable();
        let index: HashMap<(u32, u32), u32> = pairs.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
        let (open, edges) = (state.openness(), state.adjacency());
        let adj = pairs
            .iter()
            .map(|&(u, v)| {
                let mut out = Vec::new();
                for (pivot, other) in [(u, v), (v, u)] {
                    for_each_and(open.row(pivot as usize), edges.row(other as usize), |x| {
                        let key = if pivot < x as u32 { (pivot, x as u32) } else { (x as u32, pivot) };
                        out.push(YAdj {
                            to: index[&key],
                            pivot,
                            moved_to: x as u32,
                        });
                    });
                }
                out
            })
            .collect();
        YGraph { pairs, index, adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn pair(&self, id: u32) -> (usize, usize) {
        let (u, v) = self.pairs[id as usize];
        (u as usize, v as usize)
    }

    pub fn id(&self, u: usize, v: usize) -> Option<u32> {
        let key = if u < v { (u as u32, v as u32) } else { (v as u32, u as u32) };
        self.index.get(&key).copied()
    }

    pub fn neighbours(&self, id: u32) -> &[YAdj] {
        &self.adj[id as usize]
    }

    /// `Y_e`, the Y-degree.
    pub fn y(&self, id: u32) -> usize {
        self.adj[id as usize].len()
    }

    /// Mean of `Y` over all open edges.
    pub fn ybar(&self) -> Option<f64> {
        (!self.pairs.is_empty()).then(|| 2.0 * self.edge_count() as f64 / self.pairs.len() as f64)
    }

    pub fn is_symmetric(&self) -> bool {
        self.adj.iter().enumerate().all(|(e, list)| {
            list.iter()
                .all(|a| self.adj[a.to as usize].iter().any(|b| b.to as usize == e && b.pivot == a.pivot))
        })
    }

    pub fn is_triangle_free(&self) -> bool {
        for (e, list) in self.adj.iter().enumerate() {
            for a in list.iter().filter(|a| a.to as usize > e) {
                let fs = &self.adj[a.to as usize];
                if list.iter().any(|b| b.to > a.to && fs.iter().any(|c| c.to == b.to)) {
                    return false;
                }
            }
        }
        true
    }

    /// Orients the open edge `{u, v}` with `left` as its `L` endpoint.
    pub fn orient(&self, u: usize, v: usize, left: usize) -> Result<Oriented, YGraphError> {
        let id = self.id(u, v).ok_or(YGraphError::NotOpen(u, v))?;
        if left != u && left != v {
            return Err(YGraphError::BadOrientation(left));
        }
        Ok(Oriented { id, left: left as u32 })
    }

    fn right(&self, e: Oriented) -> u32 {
        let (a, b) = self.pairs[e.id as usize];
        if a == e.left {
            b
        } else {
            a
        }
    }

    /// Steps of type `side` from an oriented edge, with the resulting orientation.
    pub fn steps(&self, e: Oriented, side: Side) -> impl Iterator<Item = Oriented> + '_ {
        let right = self.right(e);
        let pivot = match side {
            Side::L => right,
            Side::R => e.left,
        };
        self.adj[e.id as usize]
            .iter()
            .filter(move |a| a.pivot == pivot)
            .map(move |a| Oriented {
                id: a.to,
                left: match side {
                    Side::L => a.moved_to,
                    Side::R => a.pivot,
                },
            })
    }

    /// `U_e^σ`: the number of σ-walks from the oriented edge.
    pub fn u_walks(&self, e: Oriented, sigma: &WalkSpec) -> Option<u128> {
        self.oriented_dp::<Exact>(e, sigma).map(|(u, _)| u.0)
    }

    /// `V_e^σ`: the mean of `Y` over endpoints of σ-walks.
    pub fn v_average(&self, e: Oriented, sigma: &WalkSpec) -> Result<f64, YGraphError> {
        let (u, s) = match self.oriented_dp::<Exact>(e, sigma) {
            Some((u, s)) => (u.0 as f64, s.0 as f64),
            None => {
                let (u, s) = self.oriented_dp::<Float>(e, sigma).expect("float DP never overflows");
                (u.0, s.0)
            }
        };
        if u == 0.0 {
            return Err(YGraphError::NoWalks);
        }
        Ok(s / u)
    }

    fn oriented_dp<T: WalkNum>(&self, e: Oriented, sigma: &WalkSpec) -> Option<(T, T)> {
        let mut memo: HashMap<(Oriented, usize), (T, T)> = HashMap::new();
        self.oriented_rec(e, sigma, 0, &mut memo)
    }

    fn oriented_rec<T: WalkNum>(
        &self,
        e: Oriented,
        sigma: &WalkSpec,
        pos: usize,
        memo: &mut HashMap<(Oriented, usize), (T, T)>,
    ) -> Option<(T, T)> {
        if pos == sigma.len() {
            return Some((T::one(), T::from_count(self.y(e.id))));
        }
        if let Some(&hit) = memo.get(&(e, pos)) {
            return Some(hit);
        }
        let mut acc = (T::zero(), T::zero());
        for f in self.steps(e, sigma.0[pos]).collect::<Vec<_>>() {
            let (u, s) = self.oriented_rec(f, sigma, pos + 1, memo)?;
            acc = (acc.0.add(u)?, acc.1.add(s)?);
        }
        memo.insert((e, pos), acc);
        Some(acc)
    }

    /// `(U^(k), V^(k))` for unoriented walks of length `k`.
    pub fn v_k(&self, id: u32, k: usize) -> Result<(u128, f64), YGraphError> {
        let exact = self.unoriented_dp::<Exact>(id, k);
        let (count, v) = match exact {
            Some((u, s)) => (u.0, s.0 as f64 / u.0 as f64),
            None => {
                let (u, s) = self.unoriented_dp::<Float>(id, k).expect("float DP never overflows");
                (u128::MAX, s.0 / u.0)
            }
        };
        if count == 0 {
            return Err(YGraphError::NoWalks);
        }
        Ok((count, v))
    }

    fn unoriented_dp<T: WalkNum>(&self, id: u32, k: usize) -> Option<(T, T)> {
        let mut memo = HashMap::new();
        self.unoriented_rec(id, k, &mut memo)
    }

    fn unoriented_rec<T: WalkNum>(&self, id: u32, k: usize, memo: &mut HashMap<(u32, usize), (T, T)>) -> Option<(T, T)> {
        if k == 0 {
            return Some((T::one(), T::from_count(self.y(id))));
        }
        if let Some(&hit) = memo.get(&(id, k)) {
            return Some(hit);
        }
        let mut acc = (T::zero(), T::zero());
        for a in &self.adj[id as usize] {
            let (u, s) = self.unoriented_rec(a.to, k - 1, memo)?;
            acc = (acc.0.add(u)?, acc.1.add(s)?);
        }
        memo.insert((id, k), acc);
        Some(acc)
    }
}

trait WalkNum: Copy {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_count(c: usize) -> Self;
    fn add(self, other: Self) -> Option<Self>;
}

#[derive(Clone, Copy)]
struct Exact(u128);

#[derive(Clone, Copy)]
struct Float(f64);

impl WalkNum for Exact {
    fn zero() -> Self {
        Exact(0)
    }
    fn one() -> Self {
        Exact(1)
    }
    fn from_count(c: usize) -> Self {
        Exact(c as u128)
    }
    fn add(self, other: Self) -> Option<Self> {
        self.0.checked_add(other.0).map(Exact)
    }
}

impl WalkNum for Float {
    fn zero() -> Self {
        Float(0.0)
    }
    fn one() -> Self {
        Float(1.0)
    }
    fn from_count(c: usize) -> Self {
        Float(c as f64)
    }
    fn add(self, other: Self) -> Option<Self> {
        Some(Float(self.0 + other.0))
    }
}

/// Mixing diagnostics for walks of type `L^k` from an oriented edge. The `R`
/// endpoint `u` stays fixed along such walks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingReport {
    pub edge: (usize, usize),
    pub planted: usize,
    pub k: usize,
    pub v_lk: f64,
    pub v_lk1: f64,
    /// Mean of `Y_f` over the open edges `f` at `u`.
    pub q_u_mean: f64,
    pub ybar: f64,
    pub gap_next: f64,
    pub gap_q_u: f64,
    pub gap_ybar: f64,
    /// `g_σ(t)·Ỹ(m)` with `|σ| = k`, when parameters are supplied.
    pub context: Option<f64>,
}

pub fn mixing_stats(
    yg: &YGraph,
    state: &ProcessState,
    e: Oriented,
    k: usize,
    params: Option<&Params>,
) -> Result<MixingReport, YGraphError> {
    let u = yg.right(e) as usize;
    let v_lk = yg.v_average(e, &WalkSpec::repeat(Side::L, k))?;
    let v_lk1 = yg.v_average(e, &WalkSpec::repeat(Side::L, k + 1))?;
    let at_u: Vec<usize> = state
        .openness()
        .iter_row(u)
        .map(|w| yg.y(yg.id(u, w).expect("open pair is a Y-graph vertex")))
        .collect();
    if at_u.is_empty() {
        return Err(YGraphError::NoWalks);
    }
    let q_u_mean = at_u.iter().sum::<usize>() as f64 / at_u.len() as f64;
    let ybar = yg.ybar().ok_or(YGraphError::NoWalks)?;
    let context = params.map(|p| {
        let t = p.time(state.m());
        p.envelope(Envelope::GSigma(k), t).expect("t >= 0") * p.y_tilde(t)
    });
    Ok(MixingReport {
        edge: yg.pair(e.id),
        planted: u,
        k,
        v_lk,
        v_lk1,
        q_u_mean,
        ybar,
        gap_next: (v_lk - v_lk1).abs(),
        gap_q_u: (v_lk - q_u_mean).abs(),
        gap_ybar: (v_lk - ybar).abs(),
        context,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::Instrumentation;

    #[test]
    fn one_edge_on_three_vertices() {
        let mut s = ProcessState::new(3, 0, Instrumentation::Light).unwrap();
        s.add_edge(0, 1).unwrap();
        let yg = YGraph::build(&s);
        assert_eq!(yg.vertex_count(), 2);
        assert_eq!(yg.edge_count(), 1);
        let a = yg.neighbours(yg.id(0, 2).unwrap())[0];
        assert_eq!(a.pivot, 2);
    }

    #[test]
    fn short_sequences() {
        let k = 3;
        assert!(is_k_short(&WalkSpec::repeat(Side::L, k), k));
        assert!(!is_k_short(&WalkSpec::repeat(Side::L, k + 1), k));
        let alternating: WalkSpec = "LRLRLRLR".parse().unwrap();
        assert!(!is_k_short(&alternating, k));
    }
}
