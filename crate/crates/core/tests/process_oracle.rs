use proptest::prelude::*;
use tfp_core::analysis::{open_triangle_count, verify_maximal_triangle_free, ybb_from_edges};
use tfp_core::process::{
    parse_graph_export, run, Instrumentation, OracleStats, ProcessError, ProcessState, RunConfig, Snapshot, Stop,
};
use tfp_core::trajectory::Params;

/// Openness straight from the definition, with plain adjacency matrices.
fn naive_open(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in edges {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    let mut open = vec![vec![false; n]; n];
    for u in 0..n {
        for v in 0..n {
            open[u][v] = u != v && !adj[u][v] && (0..n).all(|w| !(adj[u][w] && adj[v][w]));
        }
    }
    open
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_step_matches_the_oracle(n in 3usize..28, seed in any::<u64>()) {
        let mut s = ProcessState::new(n, seed, Instrumentation::Full).unwrap();
        while !s.is_complete() {
            let q_before = s.q();
            let out = s.step().unwrap();
            prop_assert_eq!(q_before - s.q(), out.closed.len() + 1);
            prop_assert_eq!(out.y_of_chosen, out.closed.len());
            if let Err(e) = s.check_against_oracle() {
                prop_assert!(false, "n={} seed={} m={}: {}", n, seed, s.m(), e);
            }
            let edges: Vec<_> = s.history().collect();
            let open = naive_open(n, &edges);
            for u in 0..n {
                for v in 0..n {
                    prop_assert_eq!(s.is_open(u, v), open[u][v]);
                }
            }
        }
        prop_assert!(verify_maximal_triangle_free(s.adjacency()).is_ok());
    }

    #[test]
    fn identities_hold_on_prefixes(n in 4usize..30, seed in any::<u64>(), frac in 0.0f64..1.0) {
        let mut s = ProcessState::new(n, seed, Instrumentation::Full).unwrap();
        let stop = (frac * (n * n) as f64 / 4.0) as u64;
        while !s.is_complete() && s.m() < stop {
            s.step().unwrap();
        }
        let oracle = OracleStats::from_edges(n, s.history());
        prop_assert_eq!(ybb_from_edges(&s), oracle.ybb);
        prop_assert_eq!(oracle.ybb, 2 * oracle.ygraph_edges);
        prop_assert_eq!(oracle.xbb, 6 * oracle.open_triangles);
        prop_assert_eq!(open_triangle_count(&s), oracle.open_triangles);
        for v in 0..n {
            let closed = (0..n).filter(|&w| w != v && !s.has_edge(v, w) && !s.is_open(v, w)).count();
            prop_assert_eq!(s.degree(v) + s.open_degree(v) + closed, n - 1);
        }
    }

    #[test]
    fn snapshot_resume_equals_uninterrupted(n in 5usize..40, seed in any::<u64>(), cut in 0u64..200) {
        let mut a = ProcessState::new(n, seed, Instrumentation::Light).unwrap();
        while !a.is_complete() && a.m() < cut {
            a.step().unwrap();
        }
        let line = a.snapshot().to_json_line();
        let mut b = ProcessState::restore(&Snapshot::from_json_line(&line).unwrap(), Instrumentation::Full).unwrap();
        while !a.is_complete() {
            prop_assert_eq!(a.step().unwrap().chosen, b.step().unwrap().chosen);
        }
        prop_assert!(b.is_complete());
        prop_assert!(b.check_against_oracle().is_ok());
    }
}

#[test]
fn same_seed_same_history() {
    let run = |seed| {
        let mut s = ProcessState::new(300, seed, Instrumentation::Light).unwrap();
        while !s.is_complete() {
            s.step().unwrap();
        }
        s.export_graph()
    };
    assert_eq!(run(11), run(11));
    assert_ne!(run(11), run(12));
}

#[test]
fn graph_export_replays_to_the_same_graph() {
    let mut s = ProcessState::new(64, 3, Instrumentation::Light).unwrap();
    while !s.is_complete() {
        s.step().unwrap();
    }
    let (n, edges) = parse_graph_export(&s.export_graph()).unwrap();
    let mut t = ProcessState::new(n, 0, Instrumentation::Light).unwrap();
    t.replay(edges).unwrap();
    assert!(t.is_complete());
    assert_eq!(t.adjacency(), s.adjacency());
}

#[test]
fn adding_a_closed_pair_is_rejected() {
    let mut s = ProcessState::new(4, 0, Instrumentation::Light).unwrap();
    s.add_edge(0, 1).unwrap();
    s.add_edge(1, 2).unwrap();
    assert_eq!(s.add_edge(0, 2), Err(ProcessError::NotOpen(0, 2)));
    assert!(ProcessState::new(1, 0, Instrumentation::Light).is_err());
}

#[test]
fn stop_rules() {
    let n = 200;
    let params = Params::with_defaults(n).unwrap();
    let mut config = RunConfig::new(n, 4);
    config.stop = Stop::Time(0.5);
    config.record_every = 97;
    let mut s = ProcessState::new(n, 4, Instrumentation::Light).unwrap();
    let records = run(&mut s, &config, &params).unwrap();
    let last = records.last().unwrap();
    assert!(last.t >= 0.5);
    assert!(params.time(last.m - 1) < 0.5);
    assert_eq!(records[0].m, 0);
    assert!(records[1..records.len() - 1].iter().all(|r| r.m % 97 == 0));

    config.stop = Stop::Steps(1234);
    let mut s = ProcessState::new(n, 4, Instrumentation::Light).unwrap();
    let records = run(&mut s, &config, &params).unwrap();
    assert_eq!(records.last().unwrap().m, 1234);
}
