//! Root finders for `β`.
//!
//! Unconstrained: `f(β) = f1(β) − β·f2(β) = 0` by bisection, Newton, or the
//! fixed-point map `β ← f1(β)/f2(β)`. Under a rate cap `f_max`, if the
//! unconstrained root samples too often, `g(β) = 1/f_max − f2(β) = 0` is
//! solved instead by bisection or Newton.
//!
//! Newton and fixed-point iterations keep a sign bracket; any step that
//! leaves it or fails to descend is replaced by a bisection step and counted
//! in [`SolverReport::fallback_steps`].

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::expectations::{threshold_v, Evaluation, Objective};
use crate::metrics::age_trigger;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_WARMUP: usize = 3;
const MAX_ITER: usize = 500;
/// Slack allowed when checking that iterates never increase.
const DESCENT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BisectionF,
    NewtonF,
    FixedPoint,
    BisectionG,
    NewtonG,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::BisectionF => "bisection_f",
            Method::NewtonF => "newton_f",
            Method::FixedPoint => "fixed_point",
            Method::BisectionG => "bisection_g",
            Method::NewtonG => "newton_g",
        }
    }
}

/// User-facing algorithm family; the `g` variant follows from the case split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Bisection,
    #[default]
    Newton,
    FixedPoint,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bisection" => Ok(Algorithm::Bisection),
            "newton" => Ok(Algorithm::Newton),
            "fixed_point" | "fixed-point" => Ok(Algorithm::FixedPoint),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub algorithm: Algorithm,
    pub tol: f64,
    /// Bisection steps taken before Newton or fixed-point iterations.
    pub warmup: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            algorithm: Algorithm::default(),
            tol: DEFAULT_TOL,
            warmup: DEFAULT_WARMUP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub iterate: f64,
    /// `u − l` for bisection, `|Δβ|` for Newton and fixed-point steps.
    pub residual: f64,
    pub lower: f64,
    pub upper: f64,
    /// The step was a bisection fallback or warm-up inside an open method.
    pub bisection: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub beta: f64,
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<Step>,
    pub method: Method,
    /// The rate constraint is active (the `g` equation was solved).
    pub constrained: bool,
    /// `g(mse_Y) < 0`: even `v = 0` samples slower than `f_max`.
    pub never_binds: bool,
    pub fallback_steps: usize,
}

impl SolverReport {
    fn new(method: Method) -> Self {
        SolverReport {
            beta: f64::NAN,
            iterations: 0,
            residual: f64::INFINITY,
            history: Vec::new(),
            method,
            constrained: matches!(method, Method::BisectionG | Method::NewtonG),
            never_binds: false,
            fallback_steps: 0,
        }
    }

    fn push(&mut self, step: Step) {
        self.iterations += 1;
        self.residual = step.residual;
        self.history.push(step);
    }
}

/// Solved policy parameter with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSolution {
    pub beta: f64,
    /// Error threshold `v(β)` of the signal-aware policy.
    pub v: f64,
    /// Age at which the signal-agnostic policy samples.
    pub trigger_age: f64,
    pub mse_opt: f64,
    /// `β − mse_opt`; zero when the rate constraint is inactive.
    pub lagrange_multiplier: f64,
    /// `f2(β)`, the mean delivery interval.
    pub mean_interval: f64,
    pub sampling_rate: f64,
    /// `f1(β)/f2(β) − β` on the panel.
    pub ratio_residual: f64,
    pub report: SolverReport,
}

/// Scalar function of `β` with a sign bracket `[l, u]`: positive at `l`,
/// negative at `u`.
trait Equation {
    fn value(&self, beta: f64) -> Result<f64>;
}

struct FEq<'a, O: Objective + ?Sized>(&'a O);
impl<O: Objective + ?Sized> Equation for FEq<'_, O> {
    fn value(&self, beta: f64) -> Result<f64> {
        Ok(self.0.evaluate(beta)?.f.mean)
    }
}

struct GEq<'a, O: Objective + ?Sized> {
    obj: &'a O,
    target: f64,
}
impl<O: Objective + ?Sized> Equation for GEq<'_, O> {
    fn value(&self, beta: f64) -> Result<f64> {
        Ok(self.target - self.obj.evaluate(beta)?.f2.mean)
    }
}

fn check_tol(tol: f64) -> Result<()> {
    ensure_finite("tol", tol)?;
    if tol <= 0.0 {
        return Err(Error::Input(format!("tolerance must be > 0, got {tol}")));
    }
    Ok(())
}

/// Shared bisection loop. `report.beta` is the midpoint of the final bracket.
fn bisect<E: Equation>(
    eq: &E,
    lo: f64,
    hi: f64,
    tol: f64,
    report: &mut SolverReport,
) -> Result<()> {
    let (mut l, mut u) = (lo, hi);
    while u - l > tol {
        if report.iterations >= MAX_ITER {
            return Err(Error::Solver(
                "bisection exceeded the iteration limit".into(),
            ));
        }
        let beta = 0.5 * (l + u);
        if eq.value(beta)? >= 0.0 {
            l = beta;
        } else {
            u = beta;
        }
        report.push(Step {
            iterate: beta,
            residual: u - l,
            lower: l,
            upper: u,
            bisection: true,
        });
    }
    if u == hi {
        return Err(Error::Solver(format!(
            "bracket violation at the upper endpoint {hi}: no sign change found"
        )));
    }
    report.beta = 0.5 * (l + u);
    Ok(())
}

fn require_positive_at_lower<E: Equation>(eq: &E, lo: f64) -> Result<()> {
    let f_lo = eq.value(lo)?;
    if f_lo.is_nan() || f_lo <= 0.0 {
        return Err(Error::Solver(format!(
            "bracket violation at the lower endpoint {lo}: value {f_lo} is not positive"
        )));
    }
    Ok(())
}

/// Bisection on `f` over `[mse_Y, mse_∞]`.
pub fn bisect_f<O: Objective + ?Sized>(obj: &O, tol: f64) -> Result<SolverReport> {
    check_tol(tol)?;
    let eq = FEq(obj);
    let (lo, hi) = obj.bounds();
    require_positive_at_lower(&eq, lo)?;
    let mut report = SolverReport::new(Method::BisectionF);
    bisect(&eq, lo, hi, tol, &mut report)?;
    Ok(report)
}

/// Central difference on the objective, one-sided near the bracket ends.
fn derivative<E: Equation>(eq: &E, beta: f64, h: f64, lo: f64, hi: f64) -> Result<f64> {
    let (a, b) = if beta - h < lo {
        (beta, beta + h)
    } else if beta + h >= hi {
        (beta - h, beta)
    } else {
        (beta - h, beta + h)
    };
    Ok((eq.value(b)? - eq.value(a)?) / (b - a))
}

/// Warm-up bisection; returns the bracket.
fn warmup<E: Equation>(
    eq: &E,
    lo: f64,
    hi: f64,
    steps: usize,
    report: &mut SolverReport,
) -> Result<(f64, f64)> {
    let (mut l, mut u) = (lo, hi);
    let mut k = 0;
    // Keep halving until the upper end has moved off the excluded bound.
    while k < steps || u == hi {
        if u - l <= f64::EPSILON * hi.abs().max(1.0) || report.iterations >= MAX_ITER {
            return Err(Error::Solver(format!(
                "bracket violation at the upper endpoint {hi}: no sign change found"
            )));
        }
        k += 1;
        let beta = 0.5 * (l + u);
        if eq.value(beta)? >= 0.0 {
            l = beta;
        } else {
            u = beta;
        }
        report.push(Step {
            iterate: beta,
            residual: u - l,
            lower: l,
            upper: u,
            bisection: true,
        });
    }
    Ok((l, u))
}

fn initial_bracket<E: Equation>(
    eq: &E,
    beta0: Option<f64>,
    lo: f64,
    hi: f64,
    warm: usize,
    report: &mut SolverReport,
) -> Result<(f64, f64, f64)> {
    match beta0 {
        Some(b) => {
            ensure_finite("beta0", b)?;
            if !(b >= lo && b < hi) {
                return Err(Error::Domain(format!("beta0 = {b} outside [{lo}, {hi})")));
            }
            Ok((lo, hi, b))
        }
        None => {
            let (l, u) = warmup(eq, lo, hi, warm.max(1), report)?;
            Ok((l, u, u))
        }
    }
}

/// Safeguarded Newton iteration on an equation with a positive-to-negative
/// sign change. The derivative is a finite difference with step `h`.
fn newton<E: Equation>(
    eq: &E,
    bounds: (f64, f64),
    beta0: Option<f64>,
    tol: f64,
    warm: usize,
    h: f64,
    report: &mut SolverReport,
) -> Result<()> {
    let (lo, hi) = bounds;
    let (mut l, mut u, mut beta) = initial_bracket(eq, beta0, lo, hi, warm, report)?;
    loop {
        if report.iterations >= MAX_ITER {
            return Err(Error::Solver(
                "Newton iteration exceeded the iteration limit".into(),
            ));
        }
        let fb = eq.value(beta)?;
        if fb >= 0.0 {
            l = l.max(beta);
        } else {
            u = u.min(beta);
        }
        let d = derivative(eq, beta, h, lo, hi)?;
        let step = fb / d;
        let mut next = beta - step;
        let mut fallback = false;
        let accepted = d < 0.0
            && next.is_finite()
            && next <= beta + DESCENT_SLACK
            && next >= l
            && next <= u
            && next < hi;
        if !accepted {
            next = 0.5 * (l + u);
            fallback = true;
            report.fallback_steps += 1;
        }
        let moved = (next - beta).abs();
        report.push(Step {
            iterate: next,
            residual: if fallback { u - l } else { step.abs() },
            lower: l,
            upper: u,
            bisection: fallback,
        });
        beta = next;
        if (!fallback && step.abs() <= tol) || (fallback && u - l <= tol) || moved == 0.0 {
            break;
        }
    }
    report.beta = beta;
    Ok(())
}

/// Newton's method on `f`, started from the upper end of a short bisection
/// warm-up unless `beta0` is supplied.
pub fn newton_f<O: Objective + ?Sized>(
    obj: &O,
    beta0: Option<f64>,
    tol: f64,
) -> Result<SolverReport> {
    newton_f_with(obj, beta0, tol, DEFAULT_WARMUP)
}

pub fn newton_f_with<O: Objective + ?Sized>(
    obj: &O,
    beta0: Option<f64>,
    tol: f64,
    warm: usize,
) -> Result<SolverReport> {
    check_tol(tol)?;
    let eq = FEq(obj);
    let bounds = obj.bounds();
    require_positive_at_lower(&eq, bounds.0)?;
    let mut report = SolverReport::new(Method::NewtonF);
    newton(&eq, bounds, beta0, tol, warm, obj.fd_step(), &mut report)?;
    certify(&eq, report.beta, tol, bounds)?;
    Ok(report)
}

/// Fixed-point map `β ← f1(β)/f2(β)`.
pub fn fixed_point_f<O: Objective + ?Sized>(
    obj: &O,
    beta0: Option<f64>,
    tol: f64,
) -> Result<SolverReport> {
    fixed_point_f_with(obj, beta0, tol, DEFAULT_WARMUP)
}

pub fn fixed_point_f_with<O: Objective + ?Sized>(
    obj: &O,
    beta0: Option<f64>,
    tol: f64,
    warm: usize,
) -> Result<SolverReport> {
    check_tol(tol)?;
    let eq = FEq(obj);
    let (lo, hi) = obj.bounds();
    require_positive_at_lower(&eq, lo)?;
    let mut report = SolverReport::new(Method::FixedPoint);
    let (mut l, mut u, mut beta) = initial_bracket(&eq, beta0, lo, hi, warm, &mut report)?;
    loop {
        if report.iterations >= MAX_ITER {
            return Err(Error::Solver(format!(
                "fixed-point iteration stalled near {beta}; iterates drift toward mse_inf"
            )));
        }
        let e: Evaluation = obj.evaluate(beta)?;
        if e.f.mean >= 0.0 {
            l = l.max(beta);
        } else {
            u = u.min(beta);
        }
        let mut next = e.ratio();
        let mut fallback = false;
        if !(next.is_finite()
            && next <= beta + DESCENT_SLACK
            && next >= l
            && next <= u
            && next < hi)
        {
            next = 0.5 * (l + u);
            fallback = true;
            report.fallback_steps += 1;
        }
        let step = (next - beta).abs();
        report.push(Step {
            iterate: next,
            residual: if fallback { u - l } else { step },
            lower: l,
            upper: u,
            bisection: fallback,
        });
        beta = next;
        if (!fallback && step <= tol) || (fallback && u - l <= tol) || step == 0.0 {
            break;
        }
    }
    report.beta = beta;
    // The ratio also tends to β as β → mse_∞; only a sign change certifies the root.
    certify(&eq, beta, tol, (lo, hi)).map_err(|_| {
        Error::Solver(format!(
            "fixed-point iteration settled at {beta} without a sign change of f: spurious root near mse_inf"
        ))
    })?;
    Ok(report)
}

/// Check that the equation changes sign across `[β − tol, β + tol]`.
fn certify<E: Equation>(eq: &E, beta: f64, tol: f64, bounds: (f64, f64)) -> Result<()> {
    let a = (beta - tol).max(bounds.0);
    let b = (beta + tol).min(bounds.1 - f64::EPSILON * bounds.1.abs().max(1.0));
    let (fa, fb) = (eq.value(a)?, eq.value(b)?);
    if fa >= 0.0 && fb <= 0.0 {
        Ok(())
    } else {
        Err(Error::Solver(format!(
            "no sign change around {beta}: values {fa} at {a} and {fb} at {b}"
        )))
    }
}

/// Sign change of `f` across `[β − tol, β + tol]` on the objective's panel.
pub fn has_sign_change<O: Objective + ?Sized>(obj: &O, beta: f64, tol: f64) -> Result<bool> {
    Ok(certify(&FEq(obj), beta, tol, obj.bounds()).is_ok())
}

fn check_fmax(fmax: f64) -> Result<()> {
    if fmax.is_nan() || fmax <= 0.0 {
        return Err(Error::Input(format!("f_max must be > 0, got {fmax}")));
    }
    Ok(())
}

/// `g(mse_Y) < 0` check shared by the `g` solvers; returns a finished report
/// pinned at `mse_Y` when the constraint cannot bind.
fn never_binds<O: Objective + ?Sized>(
    obj: &O,
    fmax: f64,
    method: Method,
) -> Result<Option<SolverReport>> {
    let (lo, _) = obj.bounds();
    let eq = GEq {
        obj,
        target: 1.0 / fmax,
    };
    if eq.value(lo)? < 0.0 {
        let mut r = SolverReport::new(method);
        r.beta = lo;
        r.residual = 0.0;
        r.never_binds = true;
        return Ok(Some(r));
    }
    Ok(None)
}

/// Bisection on `g(β) = 1/f_max − f2(β)`.
pub fn bisect_g<O: Objective + ?Sized>(obj: &O, fmax: f64, tol: f64) -> Result<SolverReport> {
    check_tol(tol)?;
    check_fmax(fmax)?;
    if let Some(r) = never_binds(obj, fmax, Method::BisectionG)? {
        return Ok(r);
    }
    let (lo, hi) = obj.bounds();
    let mut report = SolverReport::new(Method::BisectionG);
    bisect(
        &GEq {
            obj,
            target: 1.0 / fmax,
        },
        lo,
        hi,
        tol,
        &mut report,
    )?;
    Ok(report)
}

/// Newton's method on `g`; relies on the bisection safeguard rather than on
/// concavity of `g`.
pub fn newton_g<O: Objective + ?Sized>(
    obj: &O,
    fmax: f64,
    beta0: Option<f64>,
    tol: f64,
) -> Result<SolverReport> {
    newton_g_with(obj, fmax, beta0, tol, DEFAULT_WARMUP)
}

pub fn newton_g_with<O: Objective + ?Sized>(
    obj: &O,
    fmax: f64,
    beta0: Option<f64>,
    tol: f64,
    warm: usize,
) -> Result<SolverReport> {
    check_tol(tol)?;
    check_fmax(fmax)?;
    if let Some(r) = never_binds(obj, fmax, Method::NewtonG)? {
        return Ok(r);
    }
    let eq = GEq {
        obj,
        target: 1.0 / fmax,
    };
    let bounds = obj.bounds();
    let mut report = SolverReport::new(Method::NewtonG);
    newton(&eq, bounds, beta0, tol, warm, obj.fd_step(), &mut report)?;
    Ok(report)
}

/// Solve the unconstrained equation with the chosen algorithm.
pub fn solve_f<O: Objective + ?Sized>(obj: &O, opts: &SolveOptions) -> Result<SolverReport> {
    match opts.algorithm {
        Algorithm::Bisection => bisect_f(obj, opts.tol),
        Algorithm::Newton => newton_f_with(obj, None, opts.tol, opts.warmup),
        Algorithm::FixedPoint => fixed_point_f_with(obj, None, opts.tol, opts.warmup),
    }
}

/// Full policy solve with the rate-constraint case split. `fmax` may be
/// `f64::INFINITY`.
pub fn solve_policy<O: Objective + ?Sized>(
    obj: &O,
    fmax: f64,
    opts: &SolveOptions,
) -> Result<ThresholdSolution> {
    check_fmax(fmax)?;
    let free = solve_f(obj, opts)?;
    let at_free = obj.evaluate(free.beta)?;
    let binds = fmax.is_finite() && at_free.f2.mean <= 1.0 / fmax;
    if !binds {
        return finish(obj, free, at_free, false);
    }
    let report = match opts.algorithm {
        Algorithm::Bisection => bisect_g(obj, fmax, opts.tol)?,
        Algorithm::Newton | Algorithm::FixedPoint => {
            newton_g_with(obj, fmax, None, opts.tol, opts.warmup)?
        }
    };
    let e = obj.evaluate(report.beta)?;
    finish(obj, report, e, true)
}

fn finish<O: Objective + ?Sized>(
    obj: &O,
    report: SolverReport,
    e: Evaluation,
    constrained: bool,
) -> Result<ThresholdSolution> {
    let m = obj.metrics();
    let ratio = e.ratio();
    let beta = report.beta;
    let (mse_opt, lagrange_multiplier) = if constrained {
        (ratio, beta - ratio)
    } else {
        // Without an active constraint β is itself the optimal value.
        (beta, 0.0)
    };
    let params = obj.params();
    let v = threshold_v(beta, m, &params)?;
    let trigger_age = age_trigger(&params, beta, m)?;
    Ok(ThresholdSolution {
        beta,
        v,
        trigger_age,
        mse_opt,
        lagrange_multiplier,
        mean_interval: e.f2.mean,
        sampling_rate: 1.0 / e.f2.mean,
        ratio_residual: ratio - beta,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expectations::{McPanel, SignalAgnostic, SignalAware};
    use crate::metrics::{compute_metrics, ServiceDistribution};
    use crate::rng::SimRng;
    use crate::sde::OuParams;

    fn panel(n: usize) -> McPanel {
        let p = OuParams::new(0.5, 1.0, 0.0).unwrap();
        let d = ServiceDistribution::Exponential { mean: 1.0 };
        let m = compute_metrics(&p, &d, 0, &mut SimRng::new(0)).unwrap();
        McPanel::build(p, d, m, n, 2024).unwrap()
    }

    #[test]
    fn bisection_iteration_count() {
        let pn = panel(20_000);
        let tol = 0.5 * 2f64.powi(-20);
        let r = bisect_f(&SignalAware(&pn), tol).unwrap();
        assert_eq!(r.iterations, 20);
        assert_eq!(r.history.len(), 20);
        assert!(r.beta > 0.5 && r.beta < 1.0);
        for w in r.history.windows(2) {
            assert_eq!(w[1].residual, 0.5 * w[0].residual);
        }
    }

    #[test]
    fn methods_agree_and_certify() {
        let pn = panel(50_000);
        let obj = SignalAware(&pn);
        let b = bisect_f(&obj, 1e-9).unwrap();
        let n = newton_f(&obj, None, 1e-9).unwrap();
        let fp = fixed_point_f(&obj, None, 1e-9).unwrap();
        assert!((b.beta - n.beta).abs() < 1e-6);
        assert!((b.beta - fp.beta).abs() < 1e-6);
        assert!(n.iterations < b.iterations);
        assert!(fp.iterations < b.iterations);
        for r in [&b, &n, &fp] {
            assert!(
                has_sign_change(&obj, r.beta, 1e-9).unwrap(),
                "{:?}",
                r.method
            );
        }
    }

    #[test]
    fn newton_from_root_stops_immediately() {
        let pn = panel(20_000);
        let obj = SignalAware(&pn);
        let root = bisect_f(&obj, 1e-12).unwrap().beta;
        let n = newton_f(&obj, Some(root), 1e-9).unwrap();
        assert!(n.iterations <= 1);
        let fp = fixed_point_f(&obj, Some(root), 1e-9).unwrap();
        assert!(fp.iterations <= 1);
    }

    #[test]
    fn bad_inputs() {
        let pn = panel(1_000);
        let obj = SignalAware(&pn);
        assert!(bisect_f(&obj, 0.0).is_err());
        assert!(newton_f(&obj, Some(2.0), 1e-9).is_err());
        assert!(bisect_g(&obj, -1.0, 1e-9).is_err());
    }

    #[test]
    fn g_never_binds_when_cap_is_loose() {
        let pn = panel(5_000);
        // 1/f_max below E[Y]: g(mse_Y) < 0.
        let r = bisect_g(&SignalAware(&pn), 2.0, 1e-9).unwrap();
        assert!(r.never_binds);
        assert_eq!(r.beta, pn.metrics().mse_y);
    }

    #[test]
    fn g_at_throughput_limit_pins_lower_bound() {
        let pn = panel(5_000);
        let r = bisect_g(&SignalAware(&pn), 1.0, 1e-9).unwrap();
        // f2(mse_Y) = E[Y] = 1/f_max exactly: the root is the lower bound.
        assert!((r.beta - pn.metrics().mse_y).abs() < 1e-8);
    }

    #[test]
    fn constrained_solution_meets_the_rate() {
        let pn = panel(50_000);
        let obj = SignalAware(&pn);
        // The unconstrained policy delivers roughly every 2.1 time units.
        let s = solve_policy(&obj, 0.25, &SolveOptions::default()).unwrap();
        assert!(s.report.constrained);
        assert!((s.mean_interval - 4.0).abs() < 1e-6);
        assert!(s.lagrange_multiplier >= -1e-9);
        let free = solve_policy(&obj, f64::INFINITY, &SolveOptions::default()).unwrap();
        assert_eq!(free.lagrange_multiplier, 0.0);
        assert_eq!(free.mse_opt, free.beta);
        assert!(!free.report.constrained);
    }

    #[test]
    fn g_solvers_agree_under_tight_caps() {
        let pn = panel(50_000);
        let obj = SignalAware(&pn);
        for fmax in [0.3, 0.1] {
            let b = bisect_g(&obj, fmax, 1e-9).unwrap();
            let n = newton_g(&obj, fmax, None, 1e-9).unwrap();
            assert!(
                (b.beta - n.beta).abs() < 1e-8,
                "{fmax}: {} vs {}",
                b.beta,
                n.beta
            );
            assert!(n.beta < pn.metrics().mse_inf);
            let f2 = obj.evaluate(n.beta).unwrap().f2.mean;
            assert!((f2 - 1.0 / fmax).abs() < 1e-5 * f2, "{f2}");
        }
    }

    #[test]
    fn agnostic_solution_exceeds_aware() {
        let pn = panel(50_000);
        let a = solve_policy(&SignalAware(&pn), f64::INFINITY, &SolveOptions::default()).unwrap();
        let g = solve_policy(
            &SignalAgnostic(&pn),
            f64::INFINITY,
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(a.mse_opt < g.mse_opt);
        assert!(g.mse_opt < 0.75);
    }
}
