//! Exact tracking times, building sequences, balancedness and weights.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::{mask_iter, AnchoredPair, Counts, StructureError};
use crate::trajectory::Params;

/// `ρ = t²/log n` as an exact rational, with sentinels.
/// Orders as `Zero < Finite(_) < Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RhoTime {
    Zero,
    Finite(Ratio<i64>),
    Infinite,
}

impl RhoTime {
    /// `(2v − e)/(8o)`; zero when `e ≥ 2v`, infinite when `o = 0` and `e < 2v`.
    pub fn from_counts(c: Counts) -> Self {
        let num = c.excess();
        if num <= 0 {
            RhoTime::Zero
        } else if c.o == 0 {
            RhoTime::Infinite
        } else {
            RhoTime::Finite(Ratio::new(num, 8 * c.o))
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            RhoTime::Zero => 0.0,
            RhoTime::Finite(r) => r.to_f64().expect("small rational"),
            RhoTime::Infinite => f64::INFINITY,
        }
    }

    /// `t = √ρ·√(log n)`.
    pub fn realize(&self, n: usize) -> f64 {
        (self.as_f64() * (n as f64).ln()).sqrt()
    }
}

impl fmt::Display for RhoTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoTime::Zero => write!(f, "0"),
            RhoTime::Finite(r) => write!(f, "{r}"),
            RhoTime::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for RhoTime {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `ρ_A(F)` of the whole pair.
pub fn rho_star(pair: &AnchoredPair) -> RhoTime {
    RhoTime::from_counts(pair.total())
}

/// `t*_A(F) = √ρ·√(log n)`.
pub fn t_star_struct(pair: &AnchoredPair, n: usize) -> f64 {
    rho_star(pair).realize(n)
}

/// `log Ñ` for relative counts at time `t`:
/// `−4t²o + e·log(2t/√n) + v·log n`.
pub fn ln_tilde_count(c: Counts, n: usize, t: f64) -> f64 {
    let ln_n = (n as f64).ln();
    let edge_term = if c.e == 0 {
        0.0
    } else {
        c.e as f64 * ((2.0 * t).ln() - 0.5 * ln_n)
    };
    -4.0 * t * t * c.o as f64 + edge_term + c.v as f64 * ln_n
}

/// `Ñ_A(F)(m) = e^{−4t²o}·(2t/√n)^e·n^{v_A}`.
pub fn tilde_n(pair: &AnchoredPair, params: &Params, m: u64) -> f64 {
    ln_tilde_count(pair.total(), params.n, params.time(m)).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrackingTime {
    /// Uncapped `min_{A ⊊ H ⊆ F} ρ_A(H)` (infinite when `A = F`).
    pub rho: RhoTime,
    /// `min(√ρ·√(log n), t*)`.
    pub t: f64,
    /// Whether the cap `t*` was binding.
    pub capped: bool,
}

pub fn min_rho(pair: &AnchoredPair) -> Result<RhoTime, StructureError> {
    pair.guard()?;
    let a = pair.anchor_mask();
    Ok(pair
        .supersets(a)
        .filter(|&h| h != a)
        .map(|h| RhoTime::from_counts(pair.counts(h)))
        .min()
        .unwrap_or(RhoTime::Infinite))
}

/// Tracking time `t_A(F)`.
pub fn tracking_time(pair: &AnchoredPair, params: &Params) -> Result<TrackingTime, StructureError> {
    let rho = min_rho(pair)?;
    let raw = rho.realize(params.n);
    let cap = params.t_star();
    Ok(TrackingTime {
        rho,
        t: raw.min(cap),
        capped: raw >= cap,
    })
}

/// `c(F,A) = max(max_{A ⊊ H ⊆ F} 2o(H)/(2v_A(H) − e(H)), 2)`.
pub fn c_value(pair: &AnchoredPair) -> Result<Ratio<i64>, StructureError> {
    if min_rho(pair)? == RhoTime::Zero {
        return Err(StructureError::ZeroTrackingTime);
    }
    let a = pair.anchor_mask();
    let two = Ratio::from_integer(2);
    Ok(pair
        .supersets(a)
        .filter(|&h| h != a)
        .map(|h| {
            let c = pair.counts(h);
            Ratio::new(2 * c.o, c.excess())
        })
        .fold(two, |acc, x| acc.max(x)))
}

/// Weights attached to a pair. `Δ` values are astronomically large, so the
/// natural logs are kept alongside.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureWeights {
    /// `δ = C³v_A² + 2e + o`.
    pub small_delta: f64,
    /// `Δ(F,A) = δ^C`.
    pub delta: f64,
    pub ln_delta: f64,
    /// `Δ(F−v,A) = (δ − C)^C`, defined when `v_A ≥ 1`.
    pub delta_minus_v: Option<f64>,
    /// `γ = Δ − e − 2`.
    pub gamma: f64,
    /// `c(F,A)`, defined when `t_A(F) > 0`.
    #[serde(serialize_with = "ratio_string")]
    pub c: Option<Ratio<i64>>,
}

fn ratio_string<S: serde::Serializer>(r: &Option<Ratio<i64>>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

fn small_delta(c: Counts, big_c: f64) -> f64 {
    big_c.powi(3) * (c.v * c.v) as f64 + 2.0 * c.e as f64 + c.o as f64
}

pub fn weights(pair: &AnchoredPair, params: &Params) -> Result<StructureWeights, StructureError> {
    let c = pair.total();
    let d = small_delta(c, params.big_c);
    let delta = d.powf(params.big_c);
    let c_val = match c_value(pair) {
        Ok(v) => Some(v),
        Err(StructureError::ZeroTrackingTime) => None,
        Err(e) => return Err(e),
    };
    Ok(StructureWeights {
        small_delta: d,
        delta,
        ln_delta: params.big_c * d.ln(),
        delta_minus_v: (c.v >= 1).then(|| (d - params.big_c).powf(params.big_c)),
        gamma: delta - c.e as f64 - 2.0,
        c: c_val,
    })
}

/// `Δ(F,H) + Δ(H,A)` for an intermediate vertex set `A ⊆ H ⊆ F`.
pub fn delta_split(pair: &AnchoredPair, h: u64, params: &Params) -> f64 {
    let full = pair.total();
    let inner = pair.counts(h | pair.anchor_mask());
    let outer = full.minus(inner);
    small_delta(outer, params.big_c).powf(params.big_c) + small_delta(inner, params.big_c).powf(params.big_c)
}

/// `log g_{F,A}(t) = ct² − (1/4)log n + γ·log log n`.
pub fn ln_g_fa(pair: &AnchoredPair, params: &Params, t: f64) -> Result<f64, StructureError> {
    let w = weights(pair, params)?;
    let c = w.c.ok_or(StructureError::ZeroTrackingTime)?;
    let c = c.to_f64().expect("small rational");
    let ln_n = params.ln_n();
    Ok(c * t * t - 0.25 * ln_n + w.gamma * ln_n.ln())
}

pub fn g_fa(pair: &AnchoredPair, params: &Params, t: f64) -> Result<f64, StructureError> {
    ln_g_fa(pair, params, t).map(f64::exp)
}

/// `log f_{F,A}(t) = C(o+1)(t²+1) − (1/4)log n + (Δ − √Δ)·log log n`.
pub fn ln_f_fa(pair: &AnchoredPair, params: &Params, t: f64) -> Result<f64, StructureError> {
    let w = weights(pair, params)?;
    let o = pair.o() as f64;
    let ln_n = params.ln_n();
    Ok(params.big_c * (o + 1.0) * (t * t + 1.0) - 0.25 * ln_n + (w.delta - w.delta.sqrt()) * ln_n.ln())
}

pub fn f_fa(pair: &AnchoredPair, params: &Params, t: f64) -> Result<f64, StructureError> {
    ln_f_fa(pair, params, t).map(f64::exp)
}

/// `log L^D = max{−o(t² − t_A(F)²) + Δ(F,A)·log log n, Δ(F−v,A)·log log n}`.
pub fn ln_death_line(pair: &AnchoredPair, params: &Params, m: u64) -> Result<f64, StructureError> {
    let w = weights(pair, params)?;
    let ta = tracking_time(pair, params)?.t;
    let t = params.time(m);
    let lll = params.ln_n().ln();
    let first = -(pair.o() as f64) * (t * t - ta * ta) + w.delta * lll;
    Ok(match w.delta_minus_v {
        Some(dv) => first.max(dv * lll),
        None => first,
    })
}

pub fn death_line(pair: &AnchoredPair, params: &Params, m: u64) -> Result<f64, StructureError> {
    ln_death_line(pair, params, m).map(f64::exp)
}

/// Line of Peril, `(3/4)·L^D`.
pub fn ln_peril_line(pair: &AnchoredPair, params: &Params, m: u64) -> Result<f64, StructureError> {
    ln_death_line(pair, params, m).map(|x| x + 0.75f64.ln())
}

/// The chain `A ⊆ H_0 ⊊ H_1 ⊊ … ⊊ H_ℓ = F` with `ρ_j = ρ_{H_{j−1}}(H_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildingSequenceResult {
    pub chain: Vec<u64>,
    /// `rhos[j]` is the time of `H_j`; `rhos[0]` is `Zero`.
    pub rhos: Vec<RhoTime>,
}

impl BuildingSequenceResult {
    /// `ℓ`.
    pub fn len(&self) -> usize {
        self.chain.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Key compared when choosing `H_0`: `Ñ_A(H)` at `t = 1/2` is
/// `e^{−o}·n^{(2v−e)/2}`, so for large `n` smaller `2v − e` wins, then larger `o`.
fn h0_key(c: Counts) -> (i64, i64) {
    (c.excess(), -c.o)
}

/// Union of all optimizers of `key` over `base ⊆ H ⊆ F` (or `base ⊊ H` when
/// `proper`).
fn union_of_minimizers<K: Ord>(
    pair: &AnchoredPair,
    base: u64,
    proper: bool,
    key: impl Fn(u64) -> K,
) -> (u64, K) {
    let mut best: Option<K> = None;
    let mut union = 0;
    for h in pair.supersets(base).filter(|&h| !proper || h != base) {
        let k = key(h);
        match best.as_ref().map(|b| k.cmp(b)) {
            None | Some(Ordering::Less) => {
                best = Some(k);
                union = h;
            }
            Some(Ordering::Equal) => union |= h,
            Some(Ordering::Greater) => {}
        }
    }
    (union, best.expect("at least one candidate"))
}

/// The unique building sequence. Maximal optimizers are unions of all
/// optimizers; the optimum families are closed under union, so the union is
/// itself optimal.
pub fn building_sequence(pair: &AnchoredPair) -> Result<BuildingSequenceResult, StructureError> {
    pair.guard()?;
    let a = pair.anchor_mask();
    let full = pair.full_mask();
    let (h0, _) = union_of_minimizers(pair, a, false, |h| h0_key(pair.counts(h)));
    let mut chain = vec![h0];
    let mut rhos = vec![RhoTime::Zero];
    let mut cur = h0;
    while cur != full {
        let base = pair.counts(cur);
        let (next, rho) = union_of_minimizers(pair, cur, true, |h| {
            RhoTime::from_counts(pair.counts(h).minus(base))
        });
        debug_assert_eq!(RhoTime::from_counts(pair.counts(next).minus(base)), rho);
        chain.push(next);
        rhos.push(rho);
        cur = next;
    }
    Ok(BuildingSequenceResult { chain, rhos })
}

/// Balanced pairs: either `t_A(F) > 0` and `ρ_A(H) ≥ ρ_A(F)` for every
/// `A ⊊ H ⊆ F`, or `t_A(F) = 0` and `e(H) − 2v_A(H) ≤ e(F) − 2v_A(F)` for
/// every `A ⊆ H ⊆ F`.
pub fn is_balanced(pair: &AnchoredPair) -> Result<bool, StructureError> {
    let a = pair.anchor_mask();
    let total = pair.total();
    if min_rho(pair)? != RhoTime::Zero {
        let rf = RhoTime::from_counts(total);
        Ok(pair
            .supersets(a)
            .filter(|&h| h != a)
            .all(|h| RhoTime::from_counts(pair.counts(h)) >= rf))
    } else {
        Ok(pair
            .supersets(a)
            .all(|h| -pair.counts(h).excess() <= -total.excess()))
    }
}

/// `H_j` with `t_j ≤ t < t_{j+1}` (`t_{ℓ+1} = ∞`), times realized at `params.n`.
pub fn minimal_tracking_substructure(
    pair: &AnchoredPair,
    params: &Params,
    t: f64,
) -> Result<u64, StructureError> {
    let seq = building_sequence(pair)?;
    let mut chosen = seq.chain[0];
    for (h, rho) in seq.chain.iter().zip(&seq.rhos).skip(1) {
        if rho.realize(params.n) <= t {
            chosen = *h;
        } else {
            break;
        }
    }
    Ok(chosen)
}

/// Masks of the vertices in a chain member, for reporting.
pub fn chain_names(pair: &AnchoredPair, seq: &BuildingSequenceResult) -> Vec<Vec<String>> {
    seq.chain
        .iter()
        .map(|&h| mask_iter(h).map(|v| pair.structure().names()[v].clone()).collect())
        .collect()
}
