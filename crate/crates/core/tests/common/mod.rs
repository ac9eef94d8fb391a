#![allow(dead_code)]

use ouest::metrics::{compute_metrics, ModelMetrics, ServiceDistribution};
use ouest::{OuParams, SimRng};

pub fn params(theta: f64, sigma: f64) -> OuParams {
    OuParams::new(theta, sigma, 0.0).unwrap()
}

pub fn exp1() -> ServiceDistribution {
    ServiceDistribution::Exponential { mean: 1.0 }
}

/// θ = 0.5, σ = 1, exponential services with mean 1.
pub fn testbed() -> (OuParams, ServiceDistribution, ModelMetrics) {
    let p = params(0.5, 1.0);
    let d = exp1();
    let m = compute_metrics(&p, &d, 0, &mut SimRng::new(0)).unwrap();
    (p, d, m)
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
        + simpson_rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let f: &dyn Fn(f64) -> f64 = &f;
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
