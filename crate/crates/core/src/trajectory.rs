//! Idealized trajectories, error envelopes, normalized errors, the whirlpool
//! change of basis, martingale tail bounds and Peril/Death crossing events.
//!
//! Every `log n` is the natural logarithm.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis;
use crate::process::ProcessState;

#[derive(Debug, Error, PartialEq)]
pub enum TrajectoryError {
    #[error("n must be at least 2")]
    InvalidN,
    #[error("epsilon must lie in (0, 1/8), got {0}")]
    InvalidEps(f64),
    #[error("C must be at least 1, got {0}")]
    InvalidBigC(f64),
    #[error("omega must be at least 1")]
    InvalidOmega,
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("degenerate normalization: tilde = {tilde}, envelope = {env}")]
    Degenerate { tilde: f64, env: f64 },
    #[error("epsilon must be non-zero")]
    ZeroEps,
    #[error("martingale query outside its domain: {0}")]
    MartingaleDomain(String),
    #[error("empty sample list")]
    EmptySamples,
    #[error("samples must have t > 0 and value > 0, ordered by t")]
    BadSamples,
}

/// Process parameters shared by every analytic quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub eps: f64,
    pub big_c: f64,
    pub omega: u64,
    pub k_short: usize,
}

pub const DEFAULT_EPS: f64 = 0.1;
pub const DEFAULT_BIG_C: f64 = 20.0;

impl Params {
    pub fn new(n: usize, eps: f64, big_c: f64) -> Result<Self, TrajectoryError> {
        if n < 2 {
            return Err(TrajectoryError::InvalidN);
        }
        if !(eps > 0.0 && eps < 0.125) {
            return Err(TrajectoryError::InvalidEps(eps));
        }
        if !(big_c >= 1.0) {
            return Err(TrajectoryError::InvalidBigC(big_c));
        }
        let lll = (n as f64).ln().ln().ln();
        let omega = if lll.is_finite() { lll.floor().max(1.0) as u64 } else { 1 };
        // Guard against 3/eps landing a hair above an integer.
        let k_short = (3.0 / eps - 1e-9).ceil() as usize;
        Ok(Params {
            n,
            eps,
            big_c,
            omega,
            k_short,
        })
    }

    pub fn with_defaults(n: usize) -> Result<Self, TrajectoryError> {
        Self::new(n, DEFAULT_EPS, DEFAULT_BIG_C)
    }

    pub fn with_omega(mut self, omega: u64) -> Result<Self, TrajectoryError> {
        if omega == 0 {
            return Err(TrajectoryError::InvalidOmega);
        }
        self.omega = omega;
        Ok(self)
    }

    pub fn ln_n(&self) -> f64 {
        (self.n as f64).ln()
    }

    /// `n^{3/2}`.
    pub fn n32(&self) -> f64 {
        (self.n as f64).powf(1.5)
    }

    /// `t = m·n^{-3/2}`.
    pub fn time(&self, m: u64) -> f64 {
        m as f64 / self.n32()
    }

    /// `t* = (1/(2√2) − ε)·√(log n)`.
    pub fn t_star(&self) -> f64 {
        (1.0 / (2.0 * 2f64.sqrt()) - self.eps) * self.ln_n().sqrt()
    }

    /// `m* = ⌊t*·n^{3/2}⌋`.
    pub fn m_star(&self) -> u64 {
        (self.t_star() * self.n32()).floor() as u64
    }

    /// `Q̃ = e^{−4t²}·C(n,2)`.
    pub fn q_tilde(&self, t: f64) -> f64 {
        let n = self.n as f64;
        (-4.0 * t * t).exp() * n * (n - 1.0) / 2.0
    }

    /// `X̃ = 2e^{−8t²}·n`.
    pub fn x_tilde(&self, t: f64) -> f64 {
        2.0 * (-8.0 * t * t).exp() * self.n as f64
    }

    /// `Ỹ = 4t·e^{−4t²}·√n`.
    pub fn y_tilde(&self, t: f64) -> f64 {
        4.0 * t * (-4.0 * t * t).exp() * (self.n as f64).sqrt()
    }

    pub fn tilde(&self, which: Tracked, m: u64) -> f64 {
        let t = self.time(m);
        match which {
            Tracked::Q => self.q_tilde(t),
            Tracked::X => self.x_tilde(t),
            Tracked::Y => self.y_tilde(t),
        }
    }

    fn base(&self, t: f64, c_exp: f64, log_power: f64) -> f64 {
        (c_exp * t * t).exp() * (self.n as f64).powf(-0.25) * self.ln_n().powf(log_power)
    }

    pub fn envelope(&self, which: Envelope, t: f64) -> Result<f64, TrajectoryError> {
        if t < 0.0 {
            return Err(TrajectoryError::NegativeTime(t));
        }
        let g_y = self.base(t, 2.0, 4.0);
        let f_y = self.base(t, self.big_c, 2.5);
        Ok(match which {
            Envelope::GQ => self.base(t, 2.0, 3.0),
            Envelope::GY => g_y,
            Envelope::GX => self.big_c * g_y,
            Envelope::GSigma(len) => self.eps.powi(len as i32) * g_y,
            Envelope::FY => f_y,
            Envelope::FX => (-4.0 * t * t).exp() * f_y,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tracked {
    Q,
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Envelope {
    GQ,
    GX,
    GY,
    /// `ε^{|σ|}·g_y` for a walk type of the given length.
    GSigma(usize),
    FY,
    FX,
}

impl std::str::FromStr for Envelope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "g_q" => Ok(Envelope::GQ),
            "g_x" => Ok(Envelope::GX),
            "g_y" => Ok(Envelope::GY),
            "f_y" => Ok(Envelope::FY),
            "f_x" => Ok(Envelope::FX),
            _ => s
                .strip_prefix("g_sigma(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|l| l.parse().ok())
                .map(Envelope::GSigma)
                .ok_or_else(|| format!("unknown envelope {s:?}")),
        }
    }
}

/// `(value − tilde)/(env·tilde)`.
pub fn normalized_error(value: f64, tilde: f64, env: f64) -> Result<f64, TrajectoryError> {
    let denom = env * tilde;
    if !(tilde > 0.0 && env > 0.0 && denom.is_finite() && denom > 0.0) {
        return Err(TrajectoryError::Degenerate { tilde, env });
    }
    Ok((value - tilde) / denom)
}

/// `(λ, μ)` from `(Ȳ*, Q*)`: `(1/(8ε))·[[−3, 5], [4, −4]]`.
pub fn whirlpool(eps: f64, ybar_star: f64, q_star: f64) -> Result<(f64, f64), TrajectoryError> {
    if eps == 0.0 {
        return Err(TrajectoryError::ZeroEps);
    }
    let k = 1.0 / (8.0 * eps);
    Ok((
        k * (-3.0 * ybar_star + 5.0 * q_star),
        k * (4.0 * ybar_star - 4.0 * q_star),
    ))
}

/// `(Ȳ*, Q*)` from `(λ, μ)`: `ε·[[4, 5], [4, 3]]`.
pub fn whirlpool_inverse(eps: f64, lambda: f64, mu: f64) -> (f64, f64) {
    (eps * (4.0 * lambda + 5.0 * mu), eps * (4.0 * lambda + 3.0 * mu))
}

/// `Λ = λ² + μ²`.
pub fn lyapunov(lambda: f64, mu: f64) -> f64 {
    lambda * lambda + mu * mu
}

/// Parameters of the martingale tail bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MartingaleQuery {
    /// Bound on a single step.
    pub alpha: f64,
    /// Bound on the expected absolute step.
    pub beta: f64,
    /// Number of steps.
    pub s: f64,
    /// Deviation.
    pub x: f64,
}

/// `exp(−x²/(4αβs))`, valid for `0 ≤ x ≤ βs`.
pub fn martingale_bound(q: &MartingaleQuery) -> Result<f64, TrajectoryError> {
    let MartingaleQuery { alpha, beta, s, x } = *q;
    if !(alpha > 0.0 && beta > 0.0 && s > 0.0) {
        return Err(TrajectoryError::MartingaleDomain(
            "alpha, beta and s must be positive".into(),
        ));
    }
    if !(x >= 0.0) {
        return Err(TrajectoryError::MartingaleDomain("x must be non-negative".into()));
    }
    if x > beta * s {
        return Err(TrajectoryError::MartingaleDomain(format!(
            "x = {x} exceeds beta*s = {}",
            beta * s
        )));
    }
    Ok((-x * x / (4.0 * alpha * beta * s)).exp())
}

/// True iff over every window `[x, x + 1/x]` with `x` a sample time, the
/// sampled values vary by at most a factor of `lam`.
pub fn lambda_slow_check(samples: &[(f64, f64)], lam: f64) -> Result<bool, TrajectoryError> {
    if samples.is_empty() {
        return Err(TrajectoryError::EmptySamples);
    }
    let sorted = samples.windows(2).all(|w| w[0].0 <= w[1].0);
    if !sorted || samples.iter().any(|&(t, v)| !(t > 0.0) || !(v > 0.0)) {
        return Err(TrajectoryError::BadSamples);
    }
    for (i, &(x, _)) in samples.iter().enumerate() {
        let end = x + 1.0 / x;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for &(_, v) in samples[i..].iter().take_while(|(t, _)| *t <= end) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi > lam * lo {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A death event: the normalized error crossed the Line of Peril (`|a*| = 1/2`)
/// for the last time at step `r + 1` and then the Line of Death (`|a*| = 1`)
/// at step `r + s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CrossingEvent {
    pub r: u64,
    pub s: u64,
    pub positive: bool,
}

/// Scans a sampled series `(m, a*)`. A sample with `|a*| > 1/2` after one at
/// or below `1/2` is a Peril crossing; `|a*| > 1` is a Death crossing. After a
/// death the series must return to `|a*| ≤ 1/2` before a new event can start.
/// A series opening above `1/2` counts as crossing Peril at its first sample.
pub fn crossing_events(series: &[(u64, f64)]) -> Vec<CrossingEvent> {
    let mut events = Vec::new();
    let mut below = true;
    let mut peril: Option<u64> = None;
    let mut dead = false;
    for &(m, a) in series {
        let abs = a.abs();
        if abs <= 0.5 {
            below = true;
            peril = None;
            dead = false;
            continue;
        }
        if dead {
            below = false;
            continue;
        }
        if below {
            peril = Some(m);
        }
        below = false;
        if abs > 1.0 {
            let cross = peril.unwrap_or(m);
            let r = cross.saturating_sub(1);
            events.push(CrossingEvent {
                r,
                s: m - r,
                positive: a > 0.0,
            });
            dead = true;
            peril = None;
        }
    }
    events
}

/// Sampling knobs for moment statistics.
#[derive(Clone, Copy, Debug)]
pub struct Sampler {
    pub sample_size: usize,
    pub exact_threshold: usize,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler {
            sample_size: 4096,
            exact_threshold: 200_000,
        }
    }
}

/// One sampled time point of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub m: u64,
    pub t: f64,
    pub q: u64,
    pub q_tilde: f64,
    pub q_star: Option<f64>,
    pub ybar: Option<f64>,
    pub y_tilde: f64,
    pub ybar_star: Option<f64>,
    pub xbar: Option<f64>,
    pub x_tilde: f64,
    pub xbar_star: Option<f64>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub lyapunov: Option<f64>,
    pub max_deg: u64,
    pub var_y: Option<f64>,
    pub cov_xy: Option<f64>,
    pub sample_size: u64,
}

/// Measures the state and fills in idealized values and normalized errors.
/// All three normalized errors use `g_q`, as in the coupled system for
/// `(Ȳ*, Q*)`.
pub fn sample_record(state: &ProcessState, params: &Params, sampler: &Sampler) -> RunRecord {
    let m = state.m();
    let t = params.time(m);
    let g = params.envelope(Envelope::GQ, t).expect("t >= 0");
    let q = state.q() as u64;
    let (q_tilde, y_tilde, x_tilde) = (params.q_tilde(t), params.y_tilde(t), params.x_tilde(t));
    let moments = analysis::moment_stats(state, sampler.sample_size, sampler.exact_threshold).ok();
    let star = |value: Option<f64>, tilde: f64| value.and_then(|v| normalized_error(v, tilde, g).ok());
    let q_star = star(Some(q as f64), q_tilde);
    let ybar = moments.as_ref().map(|s| s.ybar);
    let xbar = moments.as_ref().map(|s| s.xbar);
    let ybar_star = star(ybar, y_tilde);
    let xbar_star = star(xbar, x_tilde);
    let (lambda, mu, lyap) = match (ybar_star, q_star) {
        (Some(ys), Some(qs)) => {
            let (l, mu) = whirlpool(params.eps, ys, qs).expect("eps > 0");
            (Some(l), Some(mu), Some(lyapunov(l, mu)))
        }
        _ => (None, None, None),
    };
    RunRecord {
        m,
        t,
        q,
        q_tilde,
        q_star,
        ybar,
        y_tilde,
        ybar_star,
        xbar,
        x_tilde,
        xbar_star,
        lambda,
        mu,
        lyapunov: lyap,
        max_deg: analysis::max_degree(state) as u64,
        var_y: moments.as_ref().map(|s| s.var_y),
        cov_xy: moments.as_ref().map(|s| s.cov_xy),
        sample_size: moments.as_ref().map_or(0, |s| s.sample_size as u64),
    }
}
