mod common;

use common::{adaptive_simpson, params, rel, testbed};
use ouest::specfun::{
    erf, erfi, g_fn, g_inv, g_prime, hyp2f2_special, r1, r1_prime, r2, r2_prime, value_function_h,
    SeriesControl,
};
use ouest::threshold_v;
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn erf_and_erfi_match_quadrature() {
    let c = 2.0 / PI.sqrt();
    for x in [0.3, 1.0, 2.0] {
        let q = adaptive_simpson(|t| c * (-t * t).exp(), 0.0, x, 1e-15);
        assert!(rel(erf(x), q) < 1e-13, "erf({x})");
        let q = adaptive_simpson(|t| c * (t * t).exp(), 0.0, x, 1e-14);
        assert!(rel(erfi(x).unwrap(), q) < 1e-12, "erfi({x})");
    }
}

#[test]
fn g_at_one() {
    // e·(√π/2)·erf(1)
    assert!((g_fn(1.0).unwrap() - 2.030_078_5).abs() < 1e-7);
    let exact = 1f64.exp() * PI.sqrt() / 2.0 * erf(1.0);
    assert!(rel(g_fn(1.0).unwrap(), exact) < 1e-14);
}

#[test]
fn g_inverse_round_trip() {
    let ctl = SeriesControl::default();
    for x in [0.1, 0.5, 1.0, 2.0] {
        let back = g_inv(g_fn(x).unwrap(), &ctl).unwrap();
        assert!((back - x).abs() < 1e-10, "{x} -> {back}");
    }
}

#[test]
fn r1_matches_integral_of_its_derivative() {
    let p = params(0.5, 1.0);
    for k in 1..=16 {
        let x = 0.5 * k as f64;
        let q = adaptive_simpson(
            |t| r1_prime(t, &p).unwrap(),
            0.0,
            x,
            1e-13 * r1(x, &p).unwrap(),
        );
        let got = r1(x, &p).unwrap();
        assert!(rel(got, q) < 1e-8, "x = {x}: {got} vs {q}");
    }
}

#[test]
fn closed_form_derivatives_match_differences() {
    let p = params(0.5, 1.0);
    let h = 1e-5;
    for v in [0.2, 1.0, 2.5, 4.0] {
        let d1 = (r1(v + h, &p).unwrap() - r1(v - h, &p).unwrap()) / (2.0 * h);
        let d2 = (r2(v + h, &p).unwrap() - r2(v - h, &p).unwrap()) / (2.0 * h);
        assert!(rel(r1_prime(v, &p).unwrap(), d1) < 1e-7);
        assert!(rel(r2_prime(v, &p).unwrap(), d2) < 1e-7);
        let dg = (g_fn(v + h).unwrap() - g_fn(v - h).unwrap()) / (2.0 * h);
        assert!(rel(g_prime(v).unwrap(), dg) < 1e-7);
    }
}

#[test]
fn dynkin_odes_hold() {
    let h = 1e-4;
    for (theta, sigma) in [(0.5, 1.0), (0.2, 1.0), (1.0, 2.0)] {
        let p = params(theta, sigma);
        let s2 = sigma * sigma;
        for v in [0.25, 0.5, 1.0, 2.0] {
            let second = |f: &dyn Fn(f64) -> f64| (f(v + h) - 2.0 * f(v) + f(v - h)) / (h * h);
            let first = |f: &dyn Fn(f64) -> f64| (f(v + h) - f(v - h)) / (2.0 * h);
            let f1 = |x: f64| r1(x, &p).unwrap();
            let f2 = |x: f64| r2(x, &p).unwrap();
            let res1 = 0.5 * s2 * second(&f1) - theta * v * first(&f1);
            let res2 = 0.5 * s2 * second(&f2) - theta * v * first(&f2);
            assert!(
                rel(res1, 1.0) < 1e-4,
                "R1 at θ={theta} σ={sigma} v={v}: {res1}"
            );
            assert!(
                rel(res2, v * v) < 1e-4,
                "R2 at θ={theta} σ={sigma} v={v}: {res2}"
            );
        }
        assert_eq!(r1(0.0, &p).unwrap(), 0.0);
        assert_eq!(r2(0.0, &p).unwrap(), 0.0);
    }
}

#[test]
fn value_function_smooth_fit_and_bound() {
    let (p, _, m) = testbed();
    for beta in [0.55, 0.6756, 0.75, 0.9] {
        let vs = threshold_v(beta, &m, &p).unwrap();
        let h = 1e-6 * vs;
        let inner = |v: f64| r2(v, &p).unwrap() - beta * r1(v, &p).unwrap();
        let slope = (inner(vs + h) - inner(vs - h)) / (2.0 * h);
        assert!(rel(slope, -2.0 * m.gamma * vs) < 1e-4, "β = {beta}");
        let at = value_function_h(vs, beta, vs, &p, m.gamma).unwrap();
        let just_inside = value_function_h(vs * (1.0 - 1e-12), beta, vs, &p, m.gamma).unwrap();
        assert!((at - just_inside).abs() < 1e-9);
        for k in 0..=100 {
            let v = -1.5 * vs + 3.0 * vs * k as f64 / 100.0;
            let hv = value_function_h(v, beta, vs, &p, m.gamma).unwrap();
            assert!(
                hv >= -m.gamma * v * v - 1e-12,
                "H({v}) = {hv} at β = {beta}"
            );
        }
    }
}

#[test]
fn hypergeometric_large_argument_is_continuous() {
    let ctl = SeriesControl::default();
    let below = hyp2f2_special(30.0 - 1e-9, &ctl).unwrap();
    let above = hyp2f2_special(30.0 + 1e-9, &ctl).unwrap();
    assert!(rel(above, below) < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn g_is_increasing_and_inverts(a in 0.0f64..5.0, b in 0.0f64..5.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-9);
        prop_assert!(g_fn(lo).unwrap() < g_fn(hi).unwrap());
        let back = g_inv(g_fn(hi).unwrap(), &SeriesControl::default()).unwrap();
        prop_assert!((back - hi).abs() <= 1e-9 * hi.max(1.0));
    }

    #[test]
    fn r1_r2_are_even_and_nonnegative(v in -6.0f64..6.0, theta in 0.05f64..2.0, sigma in 0.2f64..3.0) {
        let p = params(theta, sigma);
        let (a, b) = (r1(v, &p).unwrap(), r2(v, &p).unwrap());
        prop_assert!(a >= 0.0 && b >= 0.0);
        prop_assert_eq!(a, r1(-v, &p).unwrap());
        prop_assert_eq!(b, r2(-v, &p).unwrap());
        // R2 = (σ²/2θ)R1 − v²/2θ
        let lhs = b;
        let rhs = p.stationary_variance() * a - v * v / (2.0 * theta);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + p.stationary_variance() * a));
    }
}
