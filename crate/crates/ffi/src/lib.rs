//! C ABI over the `ouest` library.
//!
//! Every function returns an [`OuestStatus`]; results go through out
//! pointers. On failure the message is available from
//! [`ouest_last_error_message`] on the same thread. Models and panels are
//! opaque handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ouest::expectations::{McPanel, SignalAgnostic, SignalAware};
use ouest::metrics::{compute_metrics, ModelMetrics, ServiceDistribution};
use ouest::policies::PolicySpec;
use ouest::sim::{run_with_metrics, SimConfig, METRICS_SAMPLES};
use ouest::solvers::{solve_policy, Algorithm, SolveOptions};
use ouest::specfun::{g_fn, g_inv, r1, r2, SeriesControl};
use ouest::{Error, OuParams, SimRng};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuestStatus {
    Ok = 0,
    Input = 1,
    Domain = 2,
    Range = 3,
    Precision = 4,
    Timeout = 5,
    Solver = 6,
    Config = 7,
    NullPointer = 8,
    Panic = 9,
}

impl From<&Error> for OuestStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Input(_) => OuestStatus::Input,
            Error::Domain(_) => OuestStatus::Domain,
            Error::Range(_) => OuestStatus::Range,
            Error::Precision(_) => OuestStatus::Precision,
            Error::Timeout { .. } => OuestStatus::Timeout,
            Error::Solver(_) => OuestStatus::Solver,
            Error::Config(_) => OuestStatus::Config,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuestServiceKind {
    /// Parameter: mean.
    Exponential = 0,
    /// Parameter: alpha.
    LognormalNormalized = 1,
    /// Parameter: the constant service time.
    Constant = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuestMethod {
    Bisection = 0,
    Newton = 1,
    FixedPoint = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuestPolicyKind {
    Uniform = 0,
    ZeroWait = 1,
    MseOptimal = 2,
    AgeOptimal = 3,
}

/// Policy parameters; fields not used by `kind` are ignored.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct OuestPolicy {
    pub kind: OuestPolicyKind,
    pub period: f64,
    pub beta: f64,
    pub v: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct OuestMetrics {
    pub mse_y: f64,
    pub mse_inf: f64,
    pub gamma: f64,
    pub laplace_2theta: f64,
    pub mean_y: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct OuestSolution {
    pub beta: f64,
    pub v: f64,
    pub trigger_age: f64,
    pub mse_opt: f64,
    pub lagrange_multiplier: f64,
    pub mean_interval: f64,
    pub residual: f64,
    pub iterations: u64,
    pub constrained: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct OuestSimResult {
    pub time_avg_mse: f64,
    pub mse_std_error: f64,
    pub avg_rate: f64,
    pub avg_inter_delivery: f64,
    pub time_avg_age_penalty: f64,
    pub feasible: bool,
    pub queue_overflowed: bool,
}

/// Signal model and service law with their metrics.
pub struct OuestModel {
    params: OuParams,
    dist: ServiceDistribution,
    metrics: ModelMetrics,
}

/// Fixed Monte Carlo panel bound to a model.
pub struct OuestPanel {
    panel: McPanel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn ouest_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

fn guard<F: FnOnce() -> Result<(), Error>>(f: F) -> OuestStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            OuestStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            OuestStatus::from(&e)
        }
        Err(_) => {
            set_error("internal panic");
            OuestStatus::Panic
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        if $($p.is_null())||+ {
            set_error("null pointer argument");
            return OuestStatus::NullPointer;
        }
    };
}

/// # Safety
/// `out` must be a valid pointer to writable `double`.
#[no_mangle]
pub unsafe extern "C" fn ouest_g(x: f64, out: *mut f64) -> OuestStatus {
    non_null!(out);
    guard(|| {
        *out = g_fn(x)?;
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer to writable `double`.
#[no_mangle]
pub unsafe extern "C" fn ouest_g_inv(y: f64, out: *mut f64) -> OuestStatus {
    non_null!(out);
    guard(|| {
        *out = g_inv(y, &SeriesControl::default())?;
        Ok(())
    })
}

/// Create a model. `service_param` is the mean, `alpha`, or the constant
/// time, depending on `kind`.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle to free
/// with [`ouest_model_free`].
#[no_mangle]
pub unsafe extern "C" fn ouest_model_new(
    theta: f64,
    sigma: f64,
    mu: f64,
    kind: OuestServiceKind,
    service_param: f64,
    seed: u64,
    out: *mut *mut OuestModel,
) -> OuestStatus {
    non_null!(out);
    guard(|| {
        let params = OuParams::new(theta, sigma, mu)?;
        let dist = match kind {
            OuestServiceKind::Exponential => ServiceDistribution::Exponential {
                mean: service_param,
            },
            OuestServiceKind::LognormalNormalized => ServiceDistribution::LognormalNormalized {
                alpha: service_param,
            },
            OuestServiceKind::Constant => ServiceDistribution::Constant { y: service_param },
        };
        let metrics = compute_metrics(&params, &dist, METRICS_SAMPLES, &mut SimRng::new(seed))?;
        *out = Box::into_raw(Box::new(OuestModel {
            params,
            dist,
            metrics,
        }));
        Ok(())
    })
}

/// # Safety
/// `model` must come from [`ouest_model_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ouest_model_free(model: *mut OuestModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ouest_model_metrics(
    model: *const OuestModel,
    out: *mut OuestMetrics,
) -> OuestStatus {
    non_null!(model, out);
    let m = &(*model).metrics;
    *out = OuestMetrics {
        mse_y: m.mse_y,
        mse_inf: m.mse_inf,
        gamma: m.gamma,
        laplace_2theta: m.laplace_2theta,
        mean_y: m.mean_y,
    };
    set_error("");
    OuestStatus::Ok
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ouest_r1(model: *const OuestModel, v: f64, out: *mut f64) -> OuestStatus {
    non_null!(model, out);
    guard(|| {
        *out = r1(v, &(*model).params)?;
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ouest_r2(model: *const OuestModel, v: f64, out: *mut f64) -> OuestStatus {
    non_null!(model, out);
    guard(|| {
        *out = r2(v, &(*model).params)?;
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ouest_threshold_v(
    model: *const OuestModel,
    beta: f64,
    out: *mut f64,
) -> OuestStatus {
    non_null!(model, out);
    guard(|| {
        let m = &*model;
        *out = ouest::threshold_v(beta, &m.metrics, &m.params)?;
        Ok(())
    })
}

/// Draw a panel of `n` service and error samples.
///
/// # Safety
/// `model` must be a live handle and `out` writable; free the result with
/// [`ouest_panel_free`].
#[no_mangle]
pub unsafe extern "C" fn ouest_panel_new(
    model: *const OuestModel,
    n: usize,
    seed: u64,
    out: *mut *mut OuestPanel,
) -> OuestStatus {
    non_null!(model, out);
    guard(|| {
        let m = &*model;
        let panel = McPanel::build(m.params, m.dist.clone(), m.metrics, n, seed)?;
        *out = Box::into_raw(Box::new(OuestPanel { panel }));
        Ok(())
    })
}

/// # Safety
/// `panel` must come from [`ouest_panel_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ouest_panel_free(panel: *mut OuestPanel) {
    if !panel.is_null() {
        drop(Box::from_raw(panel));
    }
}

/// Solve for `β`. Pass `fmax = INFINITY` for no rate limit and `tol <= 0`
/// for the default tolerance. `signal_aware` selects the MSE-optimal policy,
/// otherwise the age-optimal one.
///
/// # Safety
/// `panel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ouest_solve(
    panel: *const OuestPanel,
    fmax: f64,
    method: OuestMethod,
    tol: f64,
    signal_aware: bool,
    out: *mut OuestSolution,
) -> OuestStatus {
    non_null!(panel, out);
    guard(|| {
        let panel = &(*panel).panel;
        let mut opts = SolveOptions {
            algorithm: match method {
                OuestMethod::Bisection => Algorithm::Bisection,
                OuestMethod::Newton => Algorithm::Newton,
                OuestMethod::FixedPoint => Algorithm::FixedPoint,
            },
            ..SolveOptions::default()
        };
        if tol > 0.0 {
            opts.tol = tol;
        }
        let s = if signal_aware {
            solve_policy(&SignalAware(panel), fmax, &opts)?
        } else {
            solve_policy(&SignalAgnostic(panel), fmax, &opts)?
        };
        *out = OuestSolution {
            beta: s.beta,
            v: s.v,
            trigger_age: s.trigger_age,
            mse_opt: s.mse_opt,
            lagrange_multiplier: s.lagrange_multiplier,
            mean_interval: s.mean_interval,
            residual: s.report.residual,
            iterations: s.report.iterations as u64,
            constrained: s.report.constrained,
        };
        Ok(())
    })
}

/// Simulate `policy` for `horizon` time units. `fmax` only sets the
/// feasibility flag; pass `INFINITY` for none.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ouest_simulate(
    model: *const OuestModel,
    policy: OuestPolicy,
    horizon: f64,
    fmax: f64,
    seed: u64,
    out: *mut OuestSimResult,
) -> OuestStatus {
    non_null!(model, out);
    guard(|| {
        let m = &*model;
        let spec = match policy.kind {
            OuestPolicyKind::Uniform => PolicySpec::Uniform {
                period: policy.period,
            },
            OuestPolicyKind::ZeroWait => PolicySpec::ZeroWait,
            OuestPolicyKind::MseOptimal => PolicySpec::MseOptimal {
                beta: policy.beta,
                v: policy.v,
            },
            OuestPolicyKind::AgeOptimal => PolicySpec::AgeOptimal { beta: policy.beta },
        };
        let mut cfg = SimConfig::new(m.params, m.dist.clone(), spec, horizon, seed);
        cfg.fmax = Some(fmax);
        let r = run_with_metrics(&cfg, &m.metrics)?;
        *out = OuestSimResult {
            time_avg_mse: r.time_avg_mse,
            mse_std_error: r.mse_std_error,
            avg_rate: r.avg_rate,
            avg_inter_delivery: r.avg_inter_delivery,
            time_avg_age_penalty: r.time_avg_age_penalty,
            feasible: r.feasible,
            queue_overflowed: r.queue_overflowed,
        };
        Ok(())
    })
}
