use std::cmp::Ordering;

use num_rational::Ratio;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use tfp_core::process::{Instrumentation, ProcessState};
use tfp_core::structures::{
    building_sequence, c_value, count_embeddings, derived_families, is_balanced, is_faithful,
    minimal_tracking_substructure, min_rho, parse_structure, random_permissible_pair, rho_star, tilde_n,
    tracking_report, tracking_time, AnchoredPair, Family, RhoTime, StructureError,
};
use tfp_core::trajectory::Params;

fn pair(text: &str) -> AnchoredPair {
    parse_structure(text).unwrap()
}

/// `ρ` as (class, numerator, denominator): class 0 is zero, 1 finite, 2 infinite.
fn rho(v: i64, e: i64, o: i64) -> (u8, i64, i64) {
    if 2 * v - e <= 0 {
        (0, 0, 1)
    } else if o == 0 {
        (2, 0, 1)
    } else {
        (1, 2 * v - e, 8 * o)
    }
}

fn cmp_rho(a: (u8, i64, i64), b: (u8, i64, i64)) -> Ordering {
    a.0.cmp(&b.0).then_with(|| (a.1 * b.2).cmp(&(b.1 * a.2)))
}

/// Induced counts computed from the canonical text, independently of the
/// library's masks.
struct Plain {
    k: usize,
    anchor: Vec<bool>,
    edges: Vec<(usize, usize)>,
    open: Vec<(usize, usize)>,
}

impl Plain {
    fn from(p: &AnchoredPair) -> Plain {
        let text = p.to_text();
        let mut lines = text.lines();
        let names: Vec<&str> = lines.next().unwrap()[2..].split_whitespace().collect();
        let idx = |s: &str| names.iter().position(|&x| x == s).unwrap();
        let anchor_names: Vec<&str> = lines.next().unwrap()[2..].split_whitespace().collect();
        let pairs = |line: &str| -> Vec<(usize, usize)> {
            line[2..]
                .split_whitespace()
                .map(|t| {
                    let (a, b) = t.split_once('-').unwrap();
                    (idx(a), idx(b))
                })
                .collect()
        };
        let edges = pairs(lines.next().unwrap());
        let open = pairs(lines.next().unwrap());
        Plain {
            k: names.len(),
            anchor: (0..names.len()).map(|i| anchor_names.contains(&names[i])).collect(),
            edges,
            open,
        }
    }

    fn counts(&self, set: u64) -> (i64, i64, i64) {
        let inside = |&(a, b): &(usize, usize)| set >> a & 1 == 1 && set >> b & 1 == 1;
        let v = (0..self.k).filter(|&i| set >> i & 1 == 1 && !self.anchor[i]).count() as i64;
        (v, self.edges.iter().filter(|p| inside(p)).count() as i64, self.open.iter().filter(|p| inside(p)).count() as i64)
    }

    fn anchor_mask(&self) -> u64 {
        (0..self.k).filter(|&i| self.anchor[i]).map(|i| 1u64 << i).sum()
    }

    /// All chains built from maximal minimizers, by recursion.
    fn chains(&self) -> Vec<Vec<u64>> {
        let full = (1u64 << self.k) - 1;
        let a = self.anchor_mask();
        let sets: Vec<u64> = (0..=full).filter(|s| s & a == a).collect();
        let key = |s: u64| {
            let (v, e, o) = self.counts(s);
            (2 * v - e, -o)
        };
        let best = sets.iter().map(|&s| key(s)).min().unwrap();
        let mins: Vec<u64> = sets.iter().copied().filter(|&s| key(s) == best).collect();
        let mut out = Vec::new();
        for &h in &mins {
            if mins.iter().any(|&g| g != h && g & h == h) {
                continue;
            }
            self.extend(vec![h], &sets, full, &mut out);
        }
        out
    }

    fn extend(&self, chain: Vec<u64>, sets: &[u64], full: u64, out: &mut Vec<Vec<u64>>) {
        let cur = *chain.last().unwrap();
        if cur == full {
            out.push(chain);
            return;
        }
        let (v0, e0, o0) = self.counts(cur);
        let r = |s: u64| {
            let (v, e, o) = self.counts(s);
            rho(v - v0, e - e0, o - o0)
        };
        let above: Vec<u64> = sets.iter().copied().filter(|&s| s != cur && s & cur == cur).collect();
        let best = above.iter().map(|&s| r(s)).min_by(|a, b| cmp_rho(*a, *b)).unwrap();
        let mins: Vec<u64> = above.iter().copied().filter(|&s| cmp_rho(r(s), best) == Ordering::Equal).collect();
        for &h in &mins {
            if mins.iter().any(|&g| g != h && g & h == h) {
                continue;
            }
            let mut c = chain.clone();
            c.push(h);
            self.extend(c, sets, full, out);
        }
    }
}

fn random_pair(seed: u64) -> AnchoredPair {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let anchor = (seed % 4) as usize;
    let free = 1 + (seed / 4 % 6) as usize;
    random_permissible_pair(&mut rng, anchor, free)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn building_sequence_is_the_unique_chain(seed in any::<u64>()) {
        let p = random_pair(seed);
        prop_assert!(p.structure().is_permissible());
        prop_assert!(p.v_a() <= 6);
        let chains = Plain::from(&p).chains();
        prop_assert_eq!(chains.len(), 1, "{}", p.to_text());
        let seq = building_sequence(&p).unwrap();
        prop_assert_eq!(&seq.chain, &chains[0]);
        prop_assert_eq!(seq.rhos[0], RhoTime::Zero);
        for w in seq.rhos[1..].windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        if seq.rhos.len() > 1 {
            prop_assert!(seq.rhos[1] > RhoTime::Zero);
        }
        for w in seq.chain.windows(2) {
            prop_assert!(is_balanced(&p.sub_pair(w[0], w[1])).unwrap());
        }
        match c_value(&p) {
            Ok(c) => prop_assert!(c >= Ratio::from_integer(2)),
            Err(e) => prop_assert_eq!(e, StructureError::ZeroTrackingTime),
        }
        prop_assert_eq!(derived_families(&p, Family::Open).unwrap().len(), p.e());
    }

    #[test]
    fn embedding_count_matches_brute_force(seed in any::<u64>(), steps in 0u64..25) {
        let n = 7;
        let mut s = ProcessState::new(n, seed, Instrumentation::Light).unwrap();
        while !s.is_complete() && s.m() < steps {
            s.step().unwrap();
        }
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let p = random_permissible_pair(&mut rng, (seed % 3) as usize, 1 + (seed / 3 % 3) as usize);
        let plain = Plain::from(&p);
        let anchor: Vec<usize> = (0..plain.k).filter(|&i| plain.anchor[i]).collect();
        let phi: Vec<usize> = (0..anchor.len()).collect();
        // Every injective map extending phi, checked pair by pair.
        let mut count = 0u64;
        let free: Vec<usize> = (0..plain.k).filter(|&i| !plain.anchor[i]).collect();
        let mut img = vec![usize::MAX; plain.k];
        for (i, &a) in anchor.iter().enumerate() {
            img[a] = phi[i];
        }
        fn rec(
            i: usize, free: &[usize], img: &mut Vec<usize>, n: usize, plain: &Plain,
            s: &ProcessState, count: &mut u64,
        ) {
            if i == free.len() {
                let ok = plain.edges.iter().all(|&(a, b)| s.has_edge(img[a], img[b]))
                    && plain.open.iter().all(|&(a, b)| s.is_open(img[a], img[b]));
                *count += ok as u64;
                return;
            }
            for x in 0..n {
                if img.contains(&x) {
                    continue;
                }
                img[free[i]] = x;
                rec(i + 1, free, img, n, plain, s, count);
                img[free[i]] = usize::MAX;
            }
        }
        rec(0, &free, &mut img, n, &plain, &s, &mut count);
        prop_assert_eq!(count_embeddings(&p, &phi, &s).unwrap(), count);
    }
}

#[test]
fn open_edge_and_w_structure_times() {
    let open = pair("v: a b; A: a; E:; O: a-b");
    assert_eq!((open.v_a(), open.e(), open.o()), (1, 0, 1));
    assert_eq!(rho_star(&open), RhoTime::Finite(Ratio::new(1, 4)));
    let n = 1 << 16;
    let ln = (n as f64).ln();
    assert!((rho_star(&open).realize(n) - 0.5 * ln.sqrt()).abs() < 1e-12);
    assert_eq!(c_value(&open).unwrap(), Ratio::from_integer(2));

    let w = pair("v: a b c w\nA: a b c\nE: a-w\nO: b-w c-w");
    assert_eq!((w.v_a(), w.e(), w.o()), (1, 1, 2));
    assert_eq!(rho_star(&w), RhoTime::Finite(Ratio::new(1, 16)));
    assert!((rho_star(&w).realize(n) - 0.25 * ln.sqrt()).abs() < 1e-12);
    assert_eq!(min_rho(&w).unwrap(), RhoTime::Finite(Ratio::new(1, 16)));
    assert_eq!(c_value(&w).unwrap(), Ratio::from_integer(4));
    // e^{c t²} = n^{1/4} at the tracking time.
    let t = rho_star(&w).realize(n);
    assert!((4.0 * t * t - 0.25 * ln).abs() < 1e-9);

    let edge = pair("v: a b\nA: a\nE: a-b");
    assert_eq!(rho_star(&edge), RhoTime::Infinite);

    let dense = pair("v: a b x\nA: a b\nE: a-x b-x");
    assert_eq!(min_rho(&dense).unwrap(), RhoTime::Zero);
    assert_eq!(c_value(&dense), Err(StructureError::ZeroTrackingTime));
}

#[test]
fn tracking_time_caps_at_the_horizon() {
    let params = Params::with_defaults(1 << 16).unwrap();
    let full = pair("v: a b\nA: a b");
    let tt = tracking_time(&full, &params).unwrap();
    assert_eq!(tt.t, params.t_star());
    assert!(tt.capped);
    let w = pair("v: a b c w\nA: a b c\nE: a-w\nO: b-w c-w");
    let tt = tracking_time(&w, &params).unwrap();
    let raw = 0.25 * params.ln_n().sqrt();
    assert_eq!(tt.capped, raw >= params.t_star());
    assert!((tt.t - raw.min(params.t_star())).abs() < 1e-12);
}

#[test]
fn idealized_counts() {
    let params = Params::with_defaults(10_000).unwrap();
    let m = 300_000;
    let t = params.time(m);
    let n = 10_000f64;
    let edge = pair("v: a b\nA: a\nE: a-b");
    assert!((tilde_n(&edge, &params, m) / (2.0 * t * n.sqrt()) - 1.0).abs() < 1e-12);
    let open = pair("v: a b\nA: a\nO: a-b");
    assert!((tilde_n(&open, &params, m) / ((-4.0 * t * t).exp() * n) - 1.0).abs() < 1e-12);
}

#[test]
fn chains_from_hand_examples() {
    let all = pair("v: a b\nA: a b");
    let seq = building_sequence(&all).unwrap();
    assert_eq!(seq.len(), 0);
    assert_eq!(seq.chain, vec![all.full_mask()]);

    let p = pair("v: a b c\nA: a\nE: a-b\nO: b-c");
    let seq = building_sequence(&p).unwrap();
    assert_eq!(seq.chain, vec![p.anchor_mask(), p.full_mask()]);
    assert_eq!(seq.rhos[1], RhoTime::Finite(Ratio::new(3, 8)));

    let path = pair("v: a b c\nA: a\nE: a-b b-c");
    assert!(is_balanced(&path).unwrap());
    let single = pair("v: a b\nA: a\nO: a-b");
    assert!(is_balanced(&single).unwrap());
}

#[test]
fn minimal_tracking_substructure_ends() {
    let params = Params::with_defaults(1 << 16).unwrap();
    let p = pair("v: a b c\nA: a\nE: a-b\nO: b-c");
    let seq = building_sequence(&p).unwrap();
    let t1 = seq.rhos[1].realize(params.n);
    assert_eq!(minimal_tracking_substructure(&p, &params, t1 * 0.99).unwrap(), seq.chain[0]);
    assert_eq!(minimal_tracking_substructure(&p, &params, t1).unwrap(), p.full_mask());
}

#[test]
fn open_family_of_a_triangle_with_one_edge() {
    let p = pair("v: a b c\nA: a\nE: b-c\nO: a-b a-c");
    let fam = derived_families(&p, Family::Open).unwrap();
    assert_eq!(fam.len(), 1);
    assert_eq!((fam[0].pair.e(), fam[0].pair.o()), (p.e() - 1, p.o() + 1));
    let empty = pair("v: a b\nA: a\nO: a-b");
    assert!(derived_families(&empty, Family::Open).unwrap().is_empty());
}

#[test]
fn minus_family_has_all_cases() {
    let p = pair("v: a b x y\nA: a b\nE: x-y\nO: a-x b-y");
    let fam = derived_families(&p, Family::Minus).unwrap();
    let cases: std::collections::BTreeSet<char> = fam.iter().filter_map(|m| m.case).collect();
    assert_eq!(cases.into_iter().collect::<String>(), "abcdef");
    for m in &fam {
        assert!(m.pair.structure().is_permissible() || m.case == Some('a'), "{}", m.marker);
    }
    let star = derived_families(&p, Family::Star).unwrap();
    assert!(star.iter().all(|m| m.pair.v_a() < p.v_a()));
    let plus = derived_families(&p, Family::Plus).unwrap();
    assert_eq!(plus.len(), 1);
    assert_eq!(plus[0].pair.v_a(), 0);
}

#[test]
fn faithfulness_examples() {
    let mut s = ProcessState::new(6, 0, Instrumentation::Light).unwrap();
    let two_open = pair("v: a b x\nA: a b\nO: a-x b-x");
    assert!(is_faithful(&two_open, &[0, 1], &s).unwrap());
    s.add_edge(0, 1).unwrap();
    assert!(is_faithful(&two_open, &[0, 1], &s).unwrap());
    let edge_and_open = pair("v: a b x\nA: a b\nE: a-x\nO: b-x");
    assert!(!is_faithful(&edge_and_open, &[0, 1], &s).unwrap());
    assert!(is_faithful(&edge_and_open, &[2, 3], &s).unwrap());
}

#[test]
fn counts_reduce_to_degrees() {
    let mut s = ProcessState::new(12, 5, Instrumentation::Light).unwrap();
    let edge = pair("v: a b\nA: a\nE: a-b");
    let open = pair("v: a b\nA: a\nO: a-b");
    assert_eq!(count_embeddings(&edge, &[3], &s).unwrap(), 0);
    for _ in 0..15 {
        s.step().unwrap();
    }
    for v in 0..12 {
        assert_eq!(count_embeddings(&edge, &[v], &s).unwrap(), s.degree(v) as u64);
        assert_eq!(count_embeddings(&open, &[v], &s).unwrap(), s.open_degree(v) as u64);
    }
    assert!(matches!(count_embeddings(&edge, &[12], &s), Err(StructureError::VertexOutOfRange(12))));
}

#[test]
fn tracking_report_identity_case() {
    let n = 400;
    let params = Params::with_defaults(n).unwrap();
    let mut s = ProcessState::new(n, 1, Instrumentation::Light).unwrap();
    for _ in 0..2000 {
        s.step().unwrap();
    }
    let whole = pair("v: a b\nA: a b");
    let r = tracking_report(&whole, &params, &s, 5, 9).unwrap();
    assert!(r.samples.iter().all(|x| x.count == 1 && x.ratio == 1.0));

    let edge = pair("v: a b\nA: a\nE: a-b");
    let r = tracking_report(&edge, &params, &s, 20, 9).unwrap();
    let expect = 2.0 * params.time(s.m()) * (n as f64).sqrt();
    for x in &r.samples {
        assert!((x.ratio - s.degree(x.phi[0]) as f64 / expect).abs() < 1e-12);
    }
}
