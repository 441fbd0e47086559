//! Pilot ensembles used to fix the trajectory and end-state bands of the
//! acceptance suite. Seeds start at 1000 so they never overlap the seeds the
//! acceptance test runs. Writes markdown to stdout.
//!
//! cargo run --release -p tfp-cli --example pilot > docs/pilot.md

use std::time::Instant;

use tfp_cli::{simulate_run, Level, RunArgs};
use tfp_core::analysis::{alpha_heuristic, degree_stats, edge_ratio, sqrt_n_log_n, HeuristicBudget};
use tfp_core::harness::aggregate::median;
use tfp_core::process::run_to_completion;
use tfp_core::trajectory::Params;

const FIRST_SEED: u64 = 1000;

fn sd(v: &[f64]) -> f64 {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

fn light_args(n: usize) -> RunArgs {
    RunArgs {
        n,
        eps: 0.1,
        big_c: 20.0,
        omega: None,
        record_every: None,
        instrumentation: Level::Light,
        until_t: None,
        until_m: None,
        sample_size: 4096,
        exact_threshold: 200_000,
    }
}

fn trajectory_pilot() {
    let n = 1 << 13;
    let params = Params::new(n, 0.1, 20.0).unwrap();
    let t_hi = 0.9 * params.t_star();
    // Per run: max |Q/Q̃−1|, |Ȳ/Ỹ−1|, |X̄/X̃−1| over sample points in [0.2, 0.9 t*].
    let mut maxima: Vec<[f64; 3]> = Vec::new();
    let mut by_point: std::collections::BTreeMap<u64, Vec<[f64; 3]>> = Default::default();
    for seed in FIRST_SEED..FIRST_SEED + 10 {
        let out = simulate_run(&light_args(n), seed, None, None).unwrap();
        let mut worst = [0.0f64; 3];
        for r in out.records.iter().filter(|r| r.t >= 0.2 && r.t <= t_hi) {
            let dev = [
                r.q as f64 / r.q_tilde - 1.0,
                r.ybar.unwrap() / r.y_tilde - 1.0,
                r.xbar.unwrap() / r.x_tilde - 1.0,
            ];
            for i in 0..3 {
                worst[i] = worst[i].max(dev[i].abs());
            }
            by_point.entry(r.m).or_default().push(dev);
        }
        maxima.push(worst);
    }
    // Envelope: at every sample point, |median deviation| + 5σ across seeds.
    let mut envelope = [0.0f64; 3];
    for devs in by_point.values() {
        for i in 0..3 {
            let col: Vec<f64> = devs.iter().map(|d| d[i]).collect();
            envelope[i] = envelope[i].max(median(&col).abs() + 5.0 * sd(&col));
        }
    }
    println!("## Trajectory bands (n = 2^13, eps = 0.1, seeds {FIRST_SEED}..{})\n", FIRST_SEED + 9);
    println!(
        "Sample points with 0.2 <= t <= 0.9 t* = {t_hi:.6}; {} points per run.\n",
        by_point.len()
    );
    println!("| quantity | largest per-run max | pilot median + 5 sd (worst point) | frozen tolerance |");
    println!("|---|---|---|---|");
    for (i, (name, tol)) in [("Q/Q~ - 1", 0.05), ("Ybar/Y~ - 1", 0.10), ("Xbar/X~ - 1", 0.10)]
        .iter()
        .enumerate()
    {
        let worst = maxima.iter().map(|m| m[i]).fold(0.0, f64::max);
        println!("| {name} | {worst:.4} | {:.4} | {tol} |", envelope[i]);
    }
    println!();
}

struct EndState {
    edge_ratio: f64,
    deg_ratio: f64,
    alpha_ratio: Option<f64>,
}

fn end_state(n: usize, seed: u64, with_alpha: bool) -> EndState {
    let s = run_to_completion(n, seed).unwrap();
    let root = sqrt_n_log_n(n);
    let deg = degree_stats(s.adjacency()).max as f64;
    EndState {
        edge_ratio: edge_ratio(n, s.m() as usize),
        deg_ratio: deg / root,
        alpha_ratio: with_alpha
            .then(|| alpha_heuristic(s.adjacency(), &HeuristicBudget::default(), seed).size as f64 / root),
    }
}

fn end_state_pilot() {
    let target = 1.0 / (2.0 * 2f64.sqrt());
    println!("## Final edge ratio e(G)/(n^1.5 sqrt(log n)), seeds {FIRST_SEED}..{}\n", FIRST_SEED + 19);
    println!("| n | median | sd | median - 5 sd | median + 5 sd | abs(median - 1/(2 sqrt 2)) |");
    println!("|---|---|---|---|---|---|");
    let mut at_4096 = Vec::new();
    for k in 10..=13 {
        let n = 1usize << k;
        let runs: Vec<EndState> = (FIRST_SEED..FIRST_SEED + 20).map(|s| end_state(n, s, n == 4096)).collect();
        let ratios: Vec<f64> = runs.iter().map(|r| r.edge_ratio).collect();
        let (med, sd) = (median(&ratios), sd(&ratios));
        println!(
            "| 2^{k} | {med:.5} | {sd:.5} | {:.5} | {:.5} | {:.5} |",
            med - 5.0 * sd,
            med + 5.0 * sd,
            (med - target).abs()
        );
        if n == 4096 {
            at_4096 = runs;
        }
    }
    println!();
    println!("## End-state ratios at n = 2^12, seeds {FIRST_SEED}..{}\n", FIRST_SEED + 19);
    println!("| ratio | median | sd | min | max | median - 5 sd | median + 5 sd |");
    println!("|---|---|---|---|---|---|---|");
    let deg: Vec<f64> = at_4096.iter().map(|r| r.deg_ratio).collect();
    let alpha: Vec<f64> = at_4096.iter().map(|r| r.alpha_ratio.unwrap()).collect();
    for (name, v) in [("maxdeg/sqrt(n log n)", &deg), ("alpha_heur/sqrt(n log n)", &alpha)] {
        let (med, s) = (median(v), sd(v));
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!(
            "| {name} | {med:.5} | {s:.5} | {lo:.5} | {hi:.5} | {:.5} | {:.5} |",
            med - 5.0 * s,
            med + 5.0 * s
        );
    }
    println!();
}

fn main() {
    let start = Instant::now();
    println!("# Pilot ensembles\n");
    println!("Generated by `cargo run --release -p tfp-cli --example pilot`.\n");
    trajectory_pilot();
    end_state_pilot();
    println!("Total pilot time: {:.0} s on the build machine.", start.elapsed().as_secs_f64());
}
