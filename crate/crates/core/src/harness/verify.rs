//! Batch verification: incremental bookkeeping against brute force, the
//! per-step identities, Y-graph structure, small-n endpoints, the building
//! sequence and the σ-walk DP.

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use rand::Rng;
use serde::Serialize;

use crate::analysis::{verify_maximal_triangle_free, ybb_from_edges};
use crate::bits::for_each_and;
use crate::process::{Fault, Instrumentation, OracleStats, ProcessState};
use crate::rng::Xoshiro256pp;
use crate::structures::{
    building_sequence, c_value, derived_families, is_balanced, random_permissible_pair, AnchoredPair, Family,
    RhoTime, StructureError,
};
use crate::ygraph::{Oriented, Side, WalkSpec, YGraph};

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(serialize_with = "secs")]
    pub elapsed: Duration,
}

fn secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
    /// Restrict to `n ≤ 30` and fewer seeds.
    pub quick: bool,
    /// Fault injected into every process state the suite creates.
    pub fault: Option<Fault>,
}

pub const CHECK_NAMES: [&str; 7] = [
    "oracle equivalence",
    "identity dQ = -(Y_e + 1)",
    "identity dYbb = X_e - 2 sum Y_f",
    "y-graph structure",
    "exhaustive endpoints",
    "building sequence oracle",
    "sigma-walk dp",
];

pub fn run_suite(opts: VerifyOptions) -> Vec<CheckResult> {
    let checks: [fn(VerifyOptions) -> Result<String, String>; 7] = [
        check_oracle_equivalence,
        check_delta_q,
        check_delta_ybb,
        check_ygraph_structure,
        check_endpoints,
        check_building_sequences,
        check_walk_dp,
    ];
    CHECK_NAMES
        .iter()
        .zip(checks)
        .map(|(&name, check)| {
            let start = Instant::now();
            let res = check(opts);
            let elapsed = start.elapsed();
            match res {
                Ok(detail) => CheckResult {
                    name,
                    passed: true,
                    detail,
                    elapsed,
                },
                Err(detail) => CheckResult {
                    name,
                    passed: false,
                    detail,
                    elapsed,
                },
            }
        })
        .collect()
}

fn full_state(n: usize, seed: u64, fault: Option<Fault>) -> ProcessState {
    let mut s = ProcessState::new(n, seed, Instrumentation::Full).expect("valid n");
    s.inject_fault(fault);
    s
}

/// Runs a full-mode process to completion, comparing with the brute-force
/// oracle after every step. Returns the number of steps.
pub fn oracle_run(n: usize, seed: u64, fault: Option<Fault>) -> Result<u64, String> {
    let mut s = full_state(n, seed, fault);
    s.check_against_oracle().map_err(|e| format!("n={n} seed={seed} m=0: {e}"))?;
    while !s.is_complete() {
        s.step().map_err(|e| e.to_string())?;
        s.check_against_oracle()
            .map_err(|e| format!("n={n} seed={seed} m={}: {e}", s.m()))?;
    }
    Ok(s.m())
}

fn check_oracle_equivalence(opts: VerifyOptions) -> Result<String, String> {
    let (ns, seeds): (&[usize], u64) = if opts.quick { (&[10, 20, 30], 10) } else { (&[20, 40, 60], 50) };
    let mut steps = 0;
    for &n in ns {
        for seed in 0..seeds {
            steps += oracle_run(n, seed, opts.fault)?;
        }
    }
    Ok(format!("{} runs, {steps} steps", ns.len() as u64 * seeds))
}

/// Per-step quantities read just before a step, from the incremental state.
struct PreStep {
    q: usize,
    y_e: u32,
    x_e: usize,
    sum_y_closed: i64,
    ybb: u64,
}

fn pre_step(s: &ProcessState) -> Result<PreStep, String> {
    let (u, v) = s.next_pair().ok_or("process already complete")?;
    let y_e = s.y_counter(u, v).ok_or("full mode required")?;
    let x_e = s.x_count(u, v).map_err(|e| e.to_string())?;
    let mut sum_y_closed = 0i64;
    let mut missing = false;
    for (p, q) in [(u, v), (v, u)] {
        for_each_and(s.openness().row(p), s.adjacency().row(q), |w| match s.y_counter(p, w) {
            Some(y) => sum_y_closed += y as i64,
            None => missing = true,
        });
    }
    if missing {
        return Err("Y-neighbour without a counter".into());
    }
    Ok(PreStep {
        q: s.q(),
        y_e,
        x_e,
        sum_y_closed,
        ybb: ybb_from_edges(s),
    })
}

/// Checks `ΔQ = −(Y_e + 1)` with `Y_e` read from the maintained counters, and
/// `Δ𝕐 = X_e − 2Σ_{f∈Y_e} Y_f` with `𝕐` recomputed from the edges. Returns
/// the number of steps checked.
pub fn identity_run(n: usize, seed: u64, fault: Option<Fault>) -> Result<(u64, Vec<String>), String> {
    let mut s = full_state(n, seed, fault);
    let mut violations = Vec::new();
    while !s.is_complete() {
        let pre = pre_step(&s)?;
        let out = s.step().map_err(|e| e.to_string())?;
        let m = s.m();
        let dq = s.q() as i64 - pre.q as i64;
        if dq != -(pre.y_e as i64 + 1) {
            violations.push(format!(
                "dQ = -(Y_e + 1) fails at n={n} seed={seed} m={m}: dQ={dq}, Y_e={}",
                pre.y_e
            ));
        }
        let after = ybb_from_edges(&s);
        let dy = after as i64 - pre.ybb as i64;
        let rhs = pre.x_e as i64 - 2 * pre.sum_y_closed;
        if dy != rhs || out.delta_ybb != Some(dy) || s.ybb() != Some(after as i64) {
            violations.push(format!(
                "dYbb = X_e - 2 sum Y_f fails at n={n} seed={seed} m={m}: dYbb={dy}, rhs={rhs}, maintained {:?}",
                out.delta_ybb
            ));
        }
    }
    Ok((s.m(), violations))
}

fn identity_sizes(opts: VerifyOptions) -> (&'static [usize], u64) {
    if opts.quick {
        (&[20, 30], 10)
    } else {
        (&[30, 60, 100], 20)
    }
}

fn identity_check(opts: VerifyOptions, which: &str) -> Result<String, String> {
    let (ns, seeds) = identity_sizes(opts);
    let mut steps = 0;
    for &n in ns {
        for seed in 0..seeds {
            let (m, violations) = identity_run(n, seed, opts.fault)?;
            steps += m;
            if let Some(v) = violations.iter().find(|v| v.starts_with(which)) {
                return Err(v.clone());
            }
        }
    }
    Ok(format!("{steps} steps, 0 violations"))
}

fn check_delta_q(opts: VerifyOptions) -> Result<String, String> {
    identity_check(opts, "dQ")
}

fn check_delta_ybb(opts: VerifyOptions) -> Result<String, String> {
    identity_check(opts, "dYbb")
}

/// Structural facts about the Y-graph of one state.
pub fn ygraph_facts(s: &ProcessState) -> Result<(), String> {
    let yg = YGraph::build(s);
    if !yg.is_symmetric() {
        return Err("Y-graph adjacency is not symmetric".into());
    }
    if !yg.is_triangle_free() {
        return Err("Y-graph contains a triangle".into());
    }
    let ybb = ybb_from_edges(s);
    if ybb != 2 * yg.edge_count() as u64 {
        return Err(format!("Ybb = {ybb} but the Y-graph has {} edges", yg.edge_count()));
    }
    if let Some(maintained) = s.ybb() {
        if maintained != ybb as i64 {
            return Err(format!("maintained Ybb = {maintained}, recomputed {ybb}"));
        }
    }
    let xbb: u64 = s.open_pairs().map(|(u, v)| s.x_count(u, v).expect("open") as u64).sum();
    let n = s.n();
    let mut triangles = 0u64;
    for a in 0..n {
        for b in a + 1..n {
            if !s.is_open(a, b) {
                continue;
            }
            triangles += (b + 1..n).filter(|&c| s.is_open(a, c) && s.is_open(b, c)).count() as u64;
        }
    }
    if xbb != 6 * triangles {
        return Err(format!("sum X_e = {xbb} but there are {triangles} open triangles"));
    }
    Ok(())
}

fn check_ygraph_structure(opts: VerifyOptions) -> Result<String, String> {
    let (ns, seeds): (&[usize], u64) = if opts.quick { (&[20, 30], 5) } else { (&[50, 100, 200], 12) };
    let mut states = 0;
    for &n in ns {
        for seed in 0..seeds {
            let mut s = full_state(n, seed, opts.fault);
            let total = n as f64 * (n as f64).sqrt();
            // Three sample points along the run, plus the end.
            let marks = [0.15, 0.35, 0.6].map(|f| (f * total) as u64);
            while !s.is_complete() {
                if marks.contains(&s.m()) {
                    ygraph_facts(&s).map_err(|e| format!("n={n} seed={seed} m={}: {e}", s.m()))?;
                    states += 1;
                }
                s.step().map_err(|e| e.to_string())?;
            }
            ygraph_facts(&s).map_err(|e| format!("n={n} seed={seed} final: {e}"))?;
            states += 1;
        }
    }
    Ok(format!("{states} states"))
}

/// Final edge counts over every possible trajectory on `n` vertices.
pub fn reachable_final_edge_counts(n: usize) -> BTreeSet<usize> {
    fn explore(s: &ProcessState, seen: &mut HashSet<Vec<(usize, usize)>>, out: &mut BTreeSet<usize>) {
        let mut key: Vec<(usize, usize)> = s.history().collect();
        key.sort_unstable();
        if !seen.insert(key) {
            return;
        }
        if s.is_complete() {
            out.insert(s.m() as usize);
            return;
        }
        for (u, v) in s.open_pairs().collect::<Vec<_>>() {
            let mut next = s.clone();
            next.add_edge(u, v).expect("open pair");
            explore(&next, seen, out);
        }
    }
    let start = ProcessState::new(n, 0, Instrumentation::Light).expect("valid n");
    let mut out = BTreeSet::new();
    explore(&start, &mut HashSet::new(), &mut out);
    out
}

fn check_endpoints(opts: VerifyOptions) -> Result<String, String> {
    let seeds = if opts.quick { 200 } else { 1000 };
    let mut summary = Vec::new();
    for n in [3, 4, 5] {
        let reachable = reachable_final_edge_counts(n);
        let mut seen = BTreeSet::new();
        for seed in 0..seeds {
            let mut s = full_state(n, seed, opts.fault);
            while !s.is_complete() {
                s.step().map_err(|e| e.to_string())?;
            }
            verify_maximal_triangle_free(s.adjacency()).map_err(|e| format!("n={n} seed={seed}: {e}"))?;
            if !reachable.contains(&(s.m() as usize)) {
                return Err(format!("n={n} seed={seed}: {} edges is not a reachable endpoint", s.m()));
            }
            seen.insert(s.m() as usize);
        }
        summary.push(format!("n={n}: {seen:?} within {reachable:?}"));
    }
    Ok(summary.join("; "))
}

/// Every chain satisfying the defining properties, found by exhaustive search:
/// `H_0` is a maximal minimizer of `(2v_A − e, −o)` over `A ⊆ H ⊆ F`, and each
/// `H_{j+1}` a maximal minimizer of `ρ_{H_j}(H)` over `H_j ⊊ H ⊆ F`.
pub fn exhaustive_chains(pair: &AnchoredPair) -> Vec<Vec<u64>> {
    let full = pair.full_mask();
    let a = pair.anchor_mask();
    let all: Vec<u64> = (0..=full).filter(|h| h & !full == 0 && h & a == a).collect();
    let maximal = |cands: Vec<u64>| -> Vec<u64> {
        cands
            .iter()
            .copied()
            .filter(|&h| !cands.iter().any(|&g| g != h && g & h == h))
            .collect()
    };
    let h0_key = |h: u64| {
        let c = pair.counts(h);
        (c.excess(), -c.o)
    };
    let best = all.iter().map(|&h| h0_key(h)).min().expect("A itself");
    let starts = maximal(all.iter().copied().filter(|&h| h0_key(h) == best).collect());
    let mut out = Vec::new();
    let mut stack: Vec<Vec<u64>> = starts.into_iter().map(|h| vec![h]).collect();
    while let Some(chain) = stack.pop() {
        let cur = *chain.last().expect("non-empty");
        if cur == full {
            out.push(chain);
            continue;
        }
        let base = pair.counts(cur);
        let rho = |h: u64| RhoTime::from_counts(pair.counts(h).minus(base));
        let above: Vec<u64> = all.iter().copied().filter(|&h| h != cur && h & cur == cur).collect();
        let best = above.iter().map(|&h| rho(h)).min().expect("F is above");
        for next in maximal(above.into_iter().filter(|&h| rho(h) == best).collect()) {
            let mut c = chain.clone();
            c.push(next);
            stack.push(c);
        }
    }
    out
}

/// Building-sequence facts for one pair.
pub fn building_sequence_facts(pair: &AnchoredPair) -> Result<(), String> {
    let seq = building_sequence(pair).map_err(|e| e.to_string())?;
    let chains = exhaustive_chains(pair);
    if chains.len() != 1 || chains[0] != seq.chain {
        return Err(format!(
            "chain {:?} but exhaustive search found {:?}\n{}",
            seq.chain,
            chains,
            pair.to_text()
        ));
    }
    if seq.rhos[1..].windows(2).any(|w| w[0] >= w[1]) || seq.rhos.get(1).is_some_and(|r| *r == RhoTime::Zero) {
        return Err(format!("times not strictly increasing: {:?}\n{}", seq.rhos, pair.to_text()));
    }
    for w in seq.chain.windows(2) {
        let step = pair.sub_pair(w[0], w[1]);
        if !is_balanced(&step).map_err(|e| e.to_string())? {
            return Err(format!("step {:?} -> {:?} is not balanced\n{}", w[0], w[1], pair.to_text()));
        }
    }
    match c_value(pair) {
        Ok(c) if c < num_rational::Ratio::from_integer(2) => return Err(format!("c = {c} < 2")),
        Ok(_) | Err(StructureError::ZeroTrackingTime) => {}
        Err(e) => return Err(e.to_string()),
    }
    let open = derived_families(pair, Family::Open).map_err(|e| e.to_string())?;
    if open.len() != pair.e() {
        return Err(format!("|F°| = {} but e(F) = {}", open.len(), pair.e()));
    }
    Ok(())
}

fn check_building_sequences(opts: VerifyOptions) -> Result<String, String> {
    let count = if opts.quick { 50 } else { 200 };
    let mut rng = Xoshiro256pp::from_seed(0x5eed_b5);
    for _ in 0..count {
        let anchor = rng.random_range(0..=3);
        let free = rng.random_range(1..=6);
        building_sequence_facts(&random_permissible_pair(&mut rng, anchor, free))?;
    }
    Ok(format!("{count} random pairs"))
}

/// `(U, S)` by listing every σ-walk: the number of walks and the sum of `Y`
/// at their final edges.
pub fn enumerate_walks(yg: &YGraph, e: Oriented, sigma: &WalkSpec) -> (u128, u128) {
    let mut frontier = vec![e];
    for &side in &sigma.0 {
        frontier = frontier.iter().flat_map(|&f| yg.steps(f, side)).collect();
    }
    (frontier.len() as u128, frontier.iter().map(|f| yg.y(f.id) as u128).sum())
}

/// DP against enumeration for all `|σ| ≤ 4` on one state.
pub fn walk_facts(s: &ProcessState) -> Result<usize, String> {
    let yg = YGraph::build(s);
    let mut checked = 0;
    for id in 0..yg.vertex_count() as u32 {
        let (u, v) = yg.pair(id);
        let y_e = yg.y(id) as u128;
        for left in [u, v] {
            let e = yg.orient(u, v, left).map_err(|x| x.to_string())?;
            let one = |side| yg.u_walks(e, &WalkSpec(vec![side])).expect("small");
            if one(Side::L) + one(Side::R) != y_e {
                return Err(format!("U^L + U^R != Y_e at {{{u}, {v}}}"));
            }
            match yg.v_average(e, &WalkSpec::default()) {
                Ok(v0) if v0 == y_e as f64 => {}
                other => return Err(format!("V^empty = {other:?}, Y_e = {y_e}")),
            }
            for len in 0..=4 {
                for sigma in WalkSpec::all_of_length(len) {
                    let (count, sum) = enumerate_walks(&yg, e, &sigma);
                    let dp = yg.u_walks(e, &sigma).expect("small");
                    if dp != count {
                        return Err(format!("U^{sigma} at {{{u}, {v}}}: DP {dp}, enumeration {count}"));
                    }
                    let v_dp = yg.v_average(e, &sigma).ok();
                    let v_enum = (count > 0).then(|| sum as f64 / count as f64);
                    if v_dp != v_enum {
                        return Err(format!("V^{sigma} at {{{u}, {v}}}: DP {v_dp:?}, enumeration {v_enum:?}"));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

fn check_walk_dp(opts: VerifyOptions) -> Result<String, String> {
    let states = if opts.quick { 8 } else { 20 };
    let mut rng = Xoshiro256pp::from_seed(0x3a1c);
    let mut checked = 0;
    for i in 0..states {
        let n = rng.random_range(6..=12);
        let mut s = full_state(n, 1000 + i, opts.fault);
        let stop = rng.random_range(1..=(n * 3 / 2) as u64);
        while !s.is_complete() && s.m() < stop {
            s.step().map_err(|e| e.to_string())?;
        }
        checked += walk_facts(&s)?;
    }
    Ok(format!("{states} states, {checked} (edge, orientation, sigma) cases"))
}

/// The maintained-vs-oracle comparison on a single state, for callers that
/// drive the process themselves.
pub fn compare_with_oracle(s: &ProcessState) -> Result<(), String> {
    s.check_against(&OracleStats::from_edges(s.n(), s.history()))
}
