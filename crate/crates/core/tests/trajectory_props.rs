use proptest::prelude::*;
use tfp_core::trajectory::{
    crossing_events, lambda_slow_check, lyapunov, martingale_bound, normalized_error, whirlpool, whirlpool_inverse,
    CrossingEvent, MartingaleQuery, Params,
};

#[test]
fn whirlpool_columns() {
    let eps = 0.1;
    let (y, q) = whirlpool_inverse(eps, 1.0, 0.0);
    assert!((y - 4.0 * eps).abs() < 1e-15 && (q - 4.0 * eps).abs() < 1e-15);
    let (l, m) = whirlpool(eps, 5.0 * eps, 3.0 * eps).unwrap();
    assert!(l.abs() < 1e-12 && (m - 1.0).abs() < 1e-12);
    assert_eq!(whirlpool(eps, 0.0, 0.0).unwrap(), (0.0, 0.0));
    assert!(whirlpool(0.0, 1.0, 1.0).is_err());
}

proptest! {
    #[test]
    fn whirlpool_round_trip(eps in 0.001f64..0.125, y in -10.0f64..10.0, q in -10.0f64..10.0) {
        let (l, m) = whirlpool(eps, y, q).unwrap();
        let (y2, q2) = whirlpool_inverse(eps, l, m);
        prop_assert!((y2 - y).abs() <= 1e-12 * (1.0 + y.abs()));
        prop_assert!((q2 - q).abs() <= 1e-12 * (1.0 + q.abs()));
        let lam = lyapunov(l, m);
        prop_assert!(lam >= 0.0);
        prop_assert_eq!(lam == 0.0, y == 0.0 && q == 0.0);
    }

    #[test]
    fn martingale_bound_is_monotone(a in 0.1f64..5.0, b in 0.1f64..5.0, s in 1.0f64..100.0, f in 0.0f64..1.0) {
        let x = f * b * s;
        let base = martingale_bound(&MartingaleQuery { alpha: a, beta: b, s, x }).unwrap();
        prop_assert!(base > 0.0 && base <= 1.0);
        let bigger_x = martingale_bound(&MartingaleQuery { alpha: a, beta: b, s, x: x * 0.5 }).unwrap();
        prop_assert!(bigger_x >= base);
        let bigger_a = martingale_bound(&MartingaleQuery { alpha: 2.0 * a, beta: b, s, x }).unwrap();
        prop_assert!(bigger_a >= base);
        let bigger_s = martingale_bound(&MartingaleQuery { alpha: a, beta: b, s: 2.0 * s, x }).unwrap();
        prop_assert!(bigger_s >= base);
    }

    #[test]
    fn normalized_error_is_affine(tilde in 1.0f64..1e6, g in 0.01f64..2.0) {
        prop_assert_eq!(normalized_error(tilde, tilde, g).unwrap(), 0.0);
        let up = normalized_error(tilde * (1.0 + g), tilde, g).unwrap();
        prop_assert!((up - 1.0).abs() < 1e-12);
        let down = normalized_error(tilde * (1.0 - g / 2.0), tilde, g).unwrap();
        prop_assert!((down + 0.5).abs() < 1e-12);
    }

    #[test]
    fn crossing_events_are_disjoint_and_well_formed(values in proptest::collection::vec(-1.5f64..1.5, 0..60)) {
        let series: Vec<(u64, f64)> = values.iter().enumerate().map(|(i, &a)| (i as u64 + 1, a)).collect();
        let events = crossing_events(&series);
        let mut last_end = 0;
        for e in &events {
            let death = e.r + e.s;
            let peril = e.r + 1;
            prop_assert!(peril > last_end || last_end == 0);
            let at = |m: u64| series.iter().find(|p| p.0 == m).unwrap().1;
            prop_assert!(at(death).abs() > 1.0);
            prop_assert_eq!(at(death) > 0.0, e.positive);
            // Everything from the Peril crossing up to the death stays above 1/2,
            // and the sample before the crossing (if any) is at or below it.
            for m in peril..=death {
                prop_assert!(at(m).abs() > 0.5);
            }
            if peril > 1 {
                prop_assert!(at(peril - 1).abs() <= 0.5 || last_end == peril - 1);
            }
            last_end = death;
        }
    }
}

#[test]
fn martingale_spot_values() {
    let q = MartingaleQuery { alpha: 1.0, beta: 1.0, s: 4.0, x: 2.0 };
    assert!((martingale_bound(&q).unwrap() - (-0.25f64).exp()).abs() <= 1e-15);
    let zero = MartingaleQuery { x: 0.0, ..q };
    assert_eq!(martingale_bound(&zero).unwrap(), 1.0);
    let edge = MartingaleQuery { alpha: 2.0, beta: 3.0, s: 5.0, x: 15.0 };
    assert!((martingale_bound(&edge).unwrap() - (-3.0f64 * 5.0 / 8.0).exp()).abs() <= 1e-15);
    assert!(martingale_bound(&MartingaleQuery { x: 4.5, ..q }).is_err());
}

#[test]
fn lambda_slow_fixtures() {
    let dense = |f: &dyn Fn(f64) -> f64| -> Vec<(f64, f64)> {
        (0..=4000).map(|i| 1.0 + i as f64 / 1000.0).map(|t| (t, f(t))).collect()
    };
    assert!(lambda_slow_check(&dense(&|_| 3.0), 1.0).unwrap());
    // On [1, b] the ratio of t^k e^{l t²} across [x, x + 1/x] is
    // (1 + 1/x²)^k e^{l(2 + 1/x²)}, largest at x = 1: 2^k e^{3l}.
    for (k, l) in [(1, 0.5), (2, 1.0), (0, 2.0), (3, 0.0)] {
        let f = move |t: f64| t.powi(k) * (l * t * t).exp();
        let lam = 2f64.powi(k) * (3.0 * l).exp();
        assert!(lambda_slow_check(&dense(&f), lam * (1.0 + 1e-9)).unwrap(), "k={k} l={l}");
        assert!(!lambda_slow_check(&dense(&f), lam * 0.999).unwrap(), "k={k} l={l}");
    }
    let step: Vec<(f64, f64)> = (0..100).map(|i| 1.0 + i as f64 / 100.0).map(|t| (t, if t < 1.5 { 1.0 } else { 10.0 })).collect();
    assert!(!lambda_slow_check(&step, 2.0).unwrap());
    assert!(lambda_slow_check(&[], 2.0).is_err());
}

#[test]
fn crossing_hand_traces() {
    assert!(crossing_events(&[(1, 0.1), (2, -0.4), (3, 0.49)]).is_empty());
    assert_eq!(
        crossing_events(&[(1, 0.0), (2, 0.6), (3, 0.8), (4, 1.1)]),
        vec![CrossingEvent { r: 1, s: 3, positive: true }]
    );
    assert_eq!(
        crossing_events(&[(1, 0.0), (2, 0.7), (3, 0.4), (4, 0.7), (5, 1.2)]),
        vec![CrossingEvent { r: 3, s: 2, positive: true }]
    );
}

#[test]
fn horizon_shrinks_with_eps() {
    let n = 1 << 14;
    let mut last = f64::INFINITY;
    for i in 1..12 {
        let p = Params::new(n, i as f64 / 100.0, 20.0).unwrap();
        assert!(p.t_star() < last);
        last = p.t_star();
        let cap = (n as f64).powf(1.5) * (n as f64).ln().sqrt() / (2.0 * 2f64.sqrt());
        assert!((p.m_star() as f64) <= cap);
    }
    assert!(Params::new(n, 0.125, 20.0).is_err());
    assert!(Params::new(n, 0.1, 0.5).is_err());
}
