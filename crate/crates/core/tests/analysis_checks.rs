use proptest::prelude::*;
use tfp_core::analysis::{
    alpha_exact, alpha_heuristic, degree_stats, is_independent, moment_stats, open_triangle_count, ramsey_witness,
    verify_maximal_triangle_free, AlphaKind, AnalysisError, HeuristicBudget, WitnessConfig,
};
use tfp_core::bits::BitMatrix;
use tfp_core::process::{run_to_completion, Instrumentation, ProcessState};

fn graph(n: usize, edges: &[(usize, usize)]) -> BitMatrix {
    let mut g = BitMatrix::new(n);
    for &(u, v) in edges {
        g.set_sym(u, v);
    }
    g
}

fn brute_alpha(g: &BitMatrix) -> usize {
    let n = g.n();
    (0u32..1 << n)
        .filter(|&s| {
            (0..n).all(|u| s >> u & 1 == 0 || (u + 1..n).all(|v| s >> v & 1 == 0 || !g.get(u, v)))
        })
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn exact_alpha_matches_brute_force(n in 1usize..=14, bits in prop::collection::vec(any::<bool>(), 91), seed in any::<u64>()) {
        let mut edges = Vec::new();
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                if bits[k % bits.len()] {
                    edges.push((u, v));
                }
                k += 1;
            }
        }
        let g = graph(n, &edges);
        let exact = alpha_exact(&g, 400, None).unwrap();
        prop_assert_eq!(exact.size, brute_alpha(&g));
        prop_assert!(is_independent(&g, &exact.vertices));
        let h = alpha_heuristic(&g, &HeuristicBudget::quick(), seed);
        prop_assert!(is_independent(&g, &h.vertices));
        prop_assert!(h.size <= exact.size);
        prop_assert_eq!(h.size, h.vertices.len());
    }

    #[test]
    fn moments_match_direct_sums(n in 5usize..40, seed in any::<u64>(), frac in 0.05f64..0.8) {
        let mut s = ProcessState::new(n, seed, Instrumentation::Light).unwrap();
        let steps = (frac * (n * n) as f64 / 8.0) as u64;
        while !s.is_complete() && s.m() < steps {
            s.step().unwrap();
        }
        prop_assume!(s.q() > 0);
        let st = moment_stats(&s, 4096, 200_000).unwrap();
        prop_assert!(st.exact);
        let ys: Vec<f64> = s.open_pairs().map(|(u, v)| s.y_count(u, v).unwrap() as f64).collect();
        let xs: Vec<f64> = s.open_pairs().map(|(u, v)| s.x_count(u, v).unwrap() as f64).collect();
        let q = ys.len() as f64;
        let (my, mx) = (ys.iter().sum::<f64>() / q, xs.iter().sum::<f64>() / q);
        let var = ys.iter().map(|y| (y - my).powi(2)).sum::<f64>() / q;
        let cov = ys.iter().zip(&xs).map(|(y, x)| (y - my) * (x - mx)).sum::<f64>() / q;
        prop_assert!((st.ybar - my).abs() < 1e-9);
        prop_assert!((st.xbar - mx).abs() < 1e-9);
        prop_assert!((st.var_y - var).abs() < 1e-9);
        prop_assert!((st.cov_xy - cov).abs() < 1e-9);
        prop_assert_eq!(st.sum_x.unwrap() as f64, xs.iter().sum::<f64>());
        prop_assert_eq!(st.sum_x.unwrap(), 6 * open_triangle_count(&s));
    }
}

#[test]
fn sampled_moments_are_reproducible() {
    let mut s = ProcessState::new(300, 4, Instrumentation::Light).unwrap();
    for _ in 0..2000 {
        s.step().unwrap();
    }
    let a = moment_stats(&s, 500, 0).unwrap();
    let b = moment_stats(&s, 500, 0).unwrap();
    assert!(!a.exact);
    assert_eq!(a.sample_size, 500);
    assert_eq!(a, b);
    let exact = moment_stats(&s, 500, usize::MAX).unwrap();
    assert!((a.ybar / exact.ybar - 1.0).abs() < 0.2);
}

#[test]
fn known_independence_numbers() {
    // C5, Petersen graph, K_{3,4}.
    let c5 = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
    assert_eq!(alpha_exact(&c5, 400, None).unwrap().size, 2);
    let mut pet = Vec::new();
    for i in 0..5 {
        pet.push((i, (i + 1) % 5));
        pet.push((i, i + 5));
        pet.push((i + 5, (i + 2) % 5 + 5));
    }
    let pet = graph(10, &pet);
    assert_eq!(alpha_exact(&pet, 400, None).unwrap().size, 4);
    assert!(verify_maximal_triangle_free(&pet).is_ok());
    let k34: Vec<(usize, usize)> = (0..3).flat_map(|a| (3..7).map(move |b| (a, b))).collect();
    let k34 = graph(7, &k34);
    assert_eq!(alpha_exact(&k34, 400, None).unwrap().size, 4);
    assert!(verify_maximal_triangle_free(&k34).is_ok());
    assert!(verify_maximal_triangle_free(&c5).is_ok());
    let path = graph(4, &[(0, 1), (1, 2), (2, 3)]);
    assert!(verify_maximal_triangle_free(&path).is_err());
    let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
    assert!(verify_maximal_triangle_free(&tri).is_err());
    assert_eq!(alpha_exact(&tri, 2, None), Err(AnalysisError::TooLarge { n: 3, guard: 2 }));
}

#[test]
fn node_budget_is_reported() {
    let s = run_to_completion(300, 2).unwrap();
    assert!(matches!(alpha_exact(s.adjacency(), 400, Some(10)), Err(AnalysisError::BudgetExceeded(_))));
}

#[test]
fn witness_small_n_is_exact() {
    for seed in 0..20 {
        let cert = ramsey_witness(&WitnessConfig::new(30, seed)).unwrap();
        assert_eq!(cert.alpha_kind, AlphaKind::Exact);
        let g = graph(30, &cert.edges.iter().map(|e| (e[0], e[1])).collect::<Vec<_>>());
        verify_maximal_triangle_free(&g).unwrap();
        assert_eq!(cert.alpha_value, brute_alpha_big(&g));
        assert_eq!(cert.max_degree, degree_stats(&g).max);
        assert_eq!(cert.claim.as_deref(), Some(format!("R(3, {}) > 30", cert.alpha_value + 1).as_str()));
    }
    let mut cfg = WitnessConfig::new(60, 1);
    cfg.exact_guard = 50;
    let cert = ramsey_witness(&cfg).unwrap();
    assert_eq!(cert.alpha_kind, AlphaKind::HeuristicLowerBound);
    assert!(cert.claim.is_none());
}

/// Independent sets of a triangle-free graph by plain recursion on the
/// lowest remaining vertex.
fn brute_alpha_big(g: &BitMatrix) -> usize {
    fn rec(g: &BitMatrix, cand: Vec<usize>) -> usize {
        match cand.split_first() {
            None => 0,
            Some((&v, rest)) => {
                let with = 1 + rec(g, rest.iter().copied().filter(|&w| !g.get(v, w)).collect());
                let without = rec(g, rest.to_vec());
                with.max(without)
            }
        }
    }
    rec(g, (0..g.n()).collect())
}
