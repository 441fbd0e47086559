//! Counting rooted copies `N_φ(F)` of a structure in a process state.

use rand::seq::index;
use serde::Serialize;

use super::{bit, mask_iter, tilde_n, tracking_time, g_fa, AnchoredPair, GraphStructure, StructureError};
use crate::bits::BitIter;
use crate::process::ProcessState;
use crate::rng::Xoshiro256pp;
use crate::trajectory::Params;

fn check_phi(pair: &AnchoredPair, phi: &[usize], n: usize) -> Result<(), StructureError> {
    let want = pair.anchor().len();
    if phi.len() != want {
        return Err(StructureError::AnchorArity { got: phi.len(), want });
    }
    for (i, &x) in phi.iter().enumerate() {
        if x >= n {
            return Err(StructureError::VertexOutOfRange(x));
        }
        if phi[..i].contains(&x) {
            return Err(StructureError::NotInjective);
        }
    }
    Ok(())
}

/// Faithfulness of `φ` (images listed in anchor order): `F` with the edges of
/// `G_m[φ(A)]` pulled back into `A` must be permissible.
pub fn is_faithful(pair: &AnchoredPair, phi: &[usize], state: &ProcessState) -> Result<bool, StructureError> {
    check_phi(pair, phi, state.n())?;
    let anchor = pair.anchor();
    let mut s: GraphStructure = pair.structure().clone();
    for i in 0..anchor.len() {
        for j in i + 1..anchor.len() {
            if state.has_edge(phi[i], phi[j]) {
                s.force_edge(anchor[i], anchor[j]);
            }
        }
    }
    Ok(s.is_permissible())
}

/// Number of injective maps `ψ ⊇ φ` sending edges of `F` to edges of `G_m`
/// and open edges of `F` to open pairs. Pairs of `F` in neither set are
/// unconstrained.
pub fn count_embeddings(pair: &AnchoredPair, phi: &[usize], state: &ProcessState) -> Result<u64, StructureError> {
    pair.guard()?;
    check_phi(pair, phi, state.n())?;
    let s = pair.structure();
    let k = s.len();
    let mut image = vec![usize::MAX; k];
    for (&a, &x) in pair.anchor().iter().zip(phi) {
        image[a] = x;
    }
    // Anchor pairs carry no constraints after hat-restriction. Order the
    // remaining vertices so that each has as many placed neighbours as possible.
    let mut placed = pair.anchor_mask();
    let mut order = Vec::new();
    let mut rest = pair.full_mask() & !placed;
    while rest != 0 {
        let v = mask_iter(rest)
            .max_by_key(|&v| (((s.e_row(v) | s.o_row(v)) & placed).count_ones(), std::cmp::Reverse(v)))
            .expect("non-empty");
        order.push(v);
        placed |= bit(v);
        rest &= !bit(v);
    }
    let words = state.adjacency().words();
    let mut used = vec![0u64; words];
    for &x in phi {
        used[x / 64] |= 1 << (x % 64);
    }
    Ok(extend(s, state, &order, &mut image, &mut used))
}

fn extend(s: &GraphStructure, state: &ProcessState, order: &[usize], image: &mut [usize], used: &mut [u64]) -> u64 {
    let Some((&v, rest)) = order.split_first() else {
        return 1;
    };
    let n = state.n();
    let mut cand: Vec<u64> = vec![u64::MAX; used.len()];
    if n % 64 != 0 {
        *cand.last_mut().unwrap() = (1u64 << (n % 64)) - 1;
    }
    for (c, u) in cand.iter_mut().zip(used.iter()) {
        *c &= !u;
    }
    for w in mask_iter(s.e_row(v)) {
        if image[w] != usize::MAX {
            for (c, r) in cand.iter_mut().zip(state.adjacency().row(image[w])) {
                *c &= r;
            }
        }
    }
    for w in mask_iter(s.o_row(v)) {
        if image[w] != usize::MAX {
            for (c, r) in cand.iter_mut().zip(state.openness().row(image[w])) {
                *c &= r;
            }
        }
    }
    if rest.is_empty() {
        return cand.iter().map(|w| w.count_ones() as u64).sum();
    }
    let mut total = 0;
    for x in BitIter::new(&cand) {
        image[v] = x;
        used[x / 64] |= 1 << (x % 64);
        total += extend(s, state, rest, image, used);
        used[x / 64] &= !(1 << (x % 64));
    }
    image[v] = usize::MAX;
    total
}

/// Comparison of `N_φ(F)` with `Ñ_A(F)` over sampled faithful anchor maps.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrackingReport {
    pub m: u64,
    pub t: f64,
    pub tracking_time: f64,
    pub within_tracking_time: bool,
    pub tilde: f64,
    /// `g_{F,A}(t)`, absent when `t_A(F) = 0`.
    pub envelope: Option<f64>,
    /// The envelope exceeds 1, so the comparison is vacuous at this `n`.
    pub envelope_vacuous: bool,
    pub samples: Vec<TrackingSample>,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrackingSample {
    pub phi: Vec<usize>,
    pub count: u64,
    pub ratio: f64,
}

/// Samples up to `samples` faithful anchor maps (uniform injective maps,
/// rejecting unfaithful ones) and reports `N_φ/Ñ` against `1 ± g_{F,A}(t)`.
pub fn tracking_report(
    pair: &AnchoredPair,
    params: &Params,
    state: &ProcessState,
    samples: usize,
    seed: u64,
) -> Result<TrackingReport, StructureError> {
    let m = state.m();
    let t = params.time(m);
    let tt = tracking_time(pair, params)?;
    let tilde = tilde_n(pair, params, m);
    let envelope = match g_fa(pair, params, t) {
        Ok(g) => Some(g),
        Err(StructureError::ZeroTrackingTime) => None,
        Err(e) => return Err(e),
    };
    let k = pair.anchor().len();
    let n = state.n();
    let mut rng = Xoshiro256pp::for_sample(seed, m);
    let mut out = Vec::new();
    let attempts = if k == 0 { 1 } else { samples.saturating_mul(20) };
    for _ in 0..attempts {
        if out.len() >= samples.max(1) || k > n {
            break;
        }
        let phi: Vec<usize> = index::sample(&mut rng, n, k).into_vec();
        if !is_faithful(pair, &phi, state)? {
            continue;
        }
        let count = count_embeddings(pair, &phi, state)?;
        out.push(TrackingSample {
            ratio: count as f64 / tilde,
            phi,
            count,
        });
    }
    let violations = match envelope {
        Some(g) => out.iter().filter(|s| (s.ratio - 1.0).abs() > g).count(),
        None => 0,
    };
    Ok(TrackingReport {
        m,
        t,
        tracking_time: tt.t,
        within_tracking_time: t <= tt.t,
        tilde,
        envelope,
        envelope_vacuous: envelope.is_some_and(|g| g > 1.0),
        samples: out,
        violations,
    })
}
