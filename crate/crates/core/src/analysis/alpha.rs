//! Independence number: exact branch and bound, and an iterated local search
//! lower bound.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::AnalysisError;
use crate::bits::{BitIter, BitMatrix};
use crate::rng::Xoshiro256pp;

/// A verified independent set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependentSet {
    pub size: usize,
    pub vertices: Vec<usize>,
}

impl IndependentSet {
    fn from_vertices(mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        IndependentSet {
            size: vertices.len(),
            vertices,
        }
    }
}

pub fn is_independent(adj: &BitMatrix, vertices: &[usize]) -> bool {
    vertices
        .iter()
        .enumerate()
        .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| u != v && !adj.get(u, v)))
}

type Set = Vec<u64>;

fn popcount(s: &[u64]) -> usize {
    s.iter().map(|w| w.count_ones() as usize).sum()
}

fn inter_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

struct Exact<'a> {
    adj: &'a BitMatrix,
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    budget: Option<u64>,
}

impl Exact<'_> {
    /// Size of a greedy matching inside `p`; `|p| − matching` bounds `α(p)`
    /// because each matched pair holds at most one vertex of an independent set.
    fn matching_bound(&self, p: &[u64]) -> usize {
        let mut free = p.to_vec();
        let mut matched = 0;
        for v in BitIter::new(p) {
            if free[v / 64] >> (v % 64) & 1 == 0 {
                continue;
            }
            free[v / 64] &= !(1 << (v % 64));
            let row = self.adj.row(v);
            if let Some((i, w)) = free.iter().zip(row).enumerate().find(|(_, (f, r))| *f & *r != 0) {
                let bit = (w.0 & w.1).trailing_zeros() as usize;
                free[i] &= !(1 << bit);
                matched += 1;
            }
        }
        popcount(p) - matched
    }

    fn search(&mut self, mut p: Set) -> Result<(), AnalysisError> {
        self.nodes += 1;
        if let Some(b) = self.budget {
            if self.nodes > b {
                return Err(AnalysisError::BudgetExceeded(b));
            }
        }
        let pushed = self.current.len();
        // Vertices of degree at most one inside p can always be taken.
        loop {
            let mut changed = false;
            for v in BitIter::new(&p.clone()) {
                if p[v / 64] >> (v % 64) & 1 == 0 {
                    continue;
                }
                if inter_count(&p, self.adj.row(v)) <= 1 {
                    self.current.push(v);
                    p[v / 64] &= !(1 << (v % 64));
                    for (x, r) in p.iter_mut().zip(self.adj.row(v)) {
                        *x &= !r;
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let result = self.branch(p);
        self.current.truncate(pushed);
        result
    }

    fn branch(&mut self, p: Set) -> Result<(), AnalysisError> {
        if popcount(&p) == 0 {
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            return Ok(());
        }
        if self.current.len() + self.matching_bound(&p) <= self.best.len() {
            return Ok(());
        }
        let v = BitIter::new(&p)
            .max_by_key(|&v| (inter_count(&p, self.adj.row(v)), std::cmp::Reverse(v)))
            .expect("non-empty");
        let mut with = p.clone();
        with[v / 64] &= !(1 << (v % 64));
        for (x, r) in with.iter_mut().zip(self.adj.row(v)) {
            *x &= !r;
        }
        self.current.push(v);
        let r = self.search(with);
        self.current.pop();
        r?;
        let mut without = p;
        without[v / 64] &= !(1 << (v % 64));
        self.search(without)
    }
}

/// Maximum independent set by branch and bound (degree-≤1 reductions,
/// max-degree branching, matching upper bound), seeded with a heuristic
/// solution. `node_budget` limits the number of search nodes.
pub fn alpha_exact(
    adj: &BitMatrix,
    guard: usize,
    node_budget: Option<u64>,
) -> Result<IndependentSet, AnalysisError> {
    let n = adj.n();
    if n > guard {
        return Err(AnalysisError::TooLarge { n, guard });
    }
    let start = alpha_heuristic(adj, &HeuristicBudget::quick(), 0);
    let mut solver = Exact {
        adj,
        best: start.vertices,
        current: Vec::new(),
        nodes: 0,
        budget: node_budget,
    };
    let mut all = vec![0u64; adj.words()];
    for v in 0..n {
        all[v / 64] |= 1 << (v % 64);
    }
    solver.search(all)?;
    Ok(IndependentSet::from_vertices(solver.best))
}

/// Effort limits for the local search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeuristicBudget {
    pub restarts: usize,
    /// Perturbation rounds per restart.
    pub iterations: usize,
}

impl HeuristicBudget {
    pub fn quick() -> Self {
        HeuristicBudget {
            restarts: 2,
            iterations: 200,
        }
    }
}

impl Default for HeuristicBudget {
    fn default() -> Self {
        HeuristicBudget {
            restarts: 4,
            iterations: 20_000,
        }
    }
}

struct Search<'a> {
    adj: &'a BitMatrix,
    nbrs: Vec<Vec<u32>>,
    in_set: Vec<bool>,
    tight: Vec<u32>,
    size: usize,
    log: Vec<(u32, bool)>,
}

impl<'a> Search<'a> {
    fn new(adj: &'a BitMatrix) -> Self {
        let n = adj.n();
        let nbrs = (0..n).map(|v| adj.iter_row(v).map(|w| w as u32).collect()).collect();
        Search {
            adj,
            nbrs,
            in_set: vec![false; n],
            tight: vec![0; n],
            size: 0,
            log: Vec::new(),
        }
    }

    fn insert(&mut self, v: usize) {
        debug_assert!(!self.in_set[v] && self.tight[v] == 0);
        self.in_set[v] = true;
        self.size += 1;
        for &w in &self.nbrs[v] {
            self.tight[w as usize] += 1;
        }
        self.log.push((v as u32, true));
    }

    fn remove(&mut self, v: usize) {
        debug_assert!(self.in_set[v]);
        self.in_set[v] = false;
        self.size -= 1;
        for &w in &self.nbrs[v] {
            self.tight[w as usize] -= 1;
        }
        self.log.push((v as u32, false));
    }

    fn undo_to(&mut self, mark: usize) {
        while self.log.len() > mark {
            let (v, added) = self.log.pop().unwrap();
            let v = v as usize;
            if added {
                self.in_set[v] = false;
                self.size -= 1;
                for &w in &self.nbrs[v] {
                    self.tight[w as usize] -= 1;
                }
            } else {
                self.in_set[v] = true;
                self.size += 1;
                for &w in &self.nbrs[v] {
                    self.tight[w as usize] += 1;
                }
            }
        }
    }

    fn add_free_around(&mut self, v: usize, rng: &mut Xoshiro256pp) {
        let mut cand: Vec<u32> = self.nbrs[v].clone();
        cand.shuffle(rng);
        for w in cand {
            let w = w as usize;
            if !self.in_set[w] && self.tight[w] == 0 {
                self.insert(w);
            }
        }
    }

    /// Repeated (1,2)-swaps: drop a solution vertex `x` and add two
    /// non-adjacent neighbours whose only solution neighbour was `x`.
    fn local_search(&mut self, rng: &mut Xoshiro256pp) {
        let n = self.in_set.len();
        let mut improved = true;
        while improved {
            improved = false;
            for x in 0..n {
                if !self.in_set[x] {
                    continue;
                }
                let ones: Vec<usize> = self.nbrs[x]
                    .iter()
                    .map(|&w| w as usize)
                    .filter(|&w| self.tight[w] == 1)
                    .collect();
                if ones.len() < 2 {
                    continue;
                }
                let pair = ones.iter().enumerate().find_map(|(i, &a)| {
                    ones[i + 1..].iter().find(|&&b| !self.adj.get(a, b)).map(|&b| (a, b))
                });
                if let Some((a, b)) = pair {
                    self.remove(x);
                    self.insert(a);
                    self.insert(b);
                    self.add_free_around(x, rng);
                    improved = true;
                }
            }
        }
    }

    fn solution(&self) -> Vec<usize> {
        (0..self.in_set.len()).filter(|&v| self.in_set[v]).collect()
    }
}

/// Lower bound on `α`: randomized greedy construction followed by iterated
/// local search with (1,2)-swaps, best over restarts. Deterministic for a
/// given `seed`.
pub fn alpha_heuristic(adj: &BitMatrix, budget: &HeuristicBudget, seed: u64) -> IndependentSet {
    let n = adj.n();
    if n == 0 {
        return IndependentSet::from_vertices(Vec::new());
    }
    let mut best: Vec<usize> = Vec::new();
    for restart in 0..budget.restarts.max(1) {
        let mut rng = Xoshiro256pp::for_step(seed, restart as u64);
        let mut s = Search::new(adj);
        // Greedy by increasing degree, random tie-breaking.
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        order.sort_by_key(|&v| s.nbrs[v].len());
        for v in order {
            if !s.in_set[v] && s.tight[v] == 0 {
                s.insert(v);
            }
        }
        s.local_search(&mut rng);
        s.log.clear();
        let mut round_best = s.size;
        if s.size > best.len() {
            best = s.solution();
        }
        for _ in 0..budget.iterations {
            let mark = s.log.len();
            let before = s.size;
            // Force a random outside vertex in, then repair.
            let v = loop {
                let v = rng.random_range(0..n);
                if !s.in_set[v] || s.size == n {
                    break v;
                }
            };
            if s.in_set[v] {
                break;
            }
            let blockers: Vec<usize> = s.nbrs[v]
                .iter()
                .map(|&w| w as usize)
                .filter(|&w| s.in_set[w])
                .collect();
            for &w in &blockers {
                s.remove(w);
            }
            s.insert(v);
            for &w in &blockers {
                s.add_free_around(w, &mut rng);
            }
            s.local_search(&mut rng);
            if s.size > round_best {
                round_best = s.size;
                if s.size > best.len() {
                    best = s.solution();
                }
            }
            let accept = s.size >= before || rng.random_range(0..(1 + 2 * (before - s.size))) == 0;
            if !accept {
                s.undo_to(mark);
            }
            s.log.clear();
        }
    }
    debug_assert!(is_independent(adj, &best));
    IndependentSet::from_vertices(best)
}
