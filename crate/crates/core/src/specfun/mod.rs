//! Special-function kernel: the error-function family, `G` and its inverse,
//! the hypergeometric series `₂F₂(1,1;3/2,2;x)`, the Dynkin kernels `R1`,
//! `R2`, and the free-boundary value function `H`.

mod erf;
mod quad;

pub use erf::{erf, erfc, erfi};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::sde::OuParams;
use erf::{scaled_erf_series, TWO_OVER_SQRT_PI};

/// Above this argument `₂F₂` is computed by quadrature instead of by series.
const HYP_SERIES_LIMIT: f64 = 30.0;
/// `G` switches from its series to the closed form here.
const G_SERIES_LIMIT: f64 = 2.0;
/// Largest argument for which `G` is finite.
const G_MAX_ARG: f64 = 26.5;

/// Controls for series and inverse evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            rel_tol: 1e-12,
            max_terms: 500,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
            return Err(Error::Input(format!(
                "rel_tol must lie in (0, 1e-3], got {rel_tol}"
            )));
        }
        if max_terms < 10 {
            return Err(Error::Input(format!(
                "max_terms must be >= 10, got {max_terms}"
            )));
        }
        Ok(SeriesControl { rel_tol, max_terms })
    }
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn check_nonneg(name: &str, x: f64) -> Result<()> {
    ensure_finite(name, x)?;
    if x < 0.0 {
        return Err(Error::Domain(format!("{name} must be >= 0, got {x}")));
    }
    Ok(())
}

/// `G(x) − 1`, accurate for small `x`.
fn g_minus_one(x: f64) -> Result<f64> {
    if x <= G_SERIES_LIMIT {
        Ok(scaled_erf_series(x, true))
    } else {
        Ok(g_fn(x)? - 1.0)
    }
}

/// `G(x) = e^{x²}(√π/2)erf(x)/x` with `G(0) = 1`.
pub fn g_fn(x: f64) -> Result<f64> {
    check_nonneg("x", x)?;
    if x <= G_SERIES_LIMIT {
        return Ok(scaled_erf_series(x, false));
    }
    let growth = (x * x).exp();
    let g = growth * erf(x) / (TWO_OVER_SQRT_PI * x);
    if !g.is_finite() {
        return Err(Error::Range(format!("G({x}) overflows")));
    }
    Ok(g)
}

/// `G'(x) = 2xG(x) + (1 − G(x))/x`, by term-wise differentiation near zero.
pub fn g_prime(x: f64) -> Result<f64> {
    check_nonneg("x", x)?;
    if x <= G_SERIES_LIMIT {
        let x2 = 2.0 * x * x;
        let mut coeff = 1.0;
        let mut sum = 0.0;
        let mut n = 0.0;
        loop {
            coeff *= x2 / (2.0 * n + 3.0);
            n += 1.0;
            // d/dx of c_n (2x²)^n is 2n c_n (2x²)^n / x; written to stay finite at x = 0.
            let t = if x > 0.0 { 2.0 * n * coeff / x } else { 0.0 };
            sum += t;
            if t <= sum * 1e-17 || n > 2000.0 {
                break;
            }
        }
        return Ok(sum);
    }
    let g = g_fn(x)?;
    Ok(2.0 * x * g + (1.0 - g) / x)
}

/// Inverse of [`g_fn`] on `[1, ∞)` by bracketing and safeguarded Newton.
pub fn g_inv(y: f64, ctl: &SeriesControl) -> Result<f64> {
    ensure_finite("y", y)?;
    if y < 1.0 {
        return Err(Error::Domain(format!(
            "G^-1 is defined for y >= 1, got {y}"
        )));
    }
    if y == 1.0 {
        return Ok(0.0);
    }
    let target = y - 1.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while g_minus_one(hi)? < target {
        if hi >= G_MAX_ARG {
            return Err(Error::Range(format!(
                "G^-1({y}) exceeds the representable range"
            )));
        }
        lo = hi;
        hi = (2.0 * hi).min(G_MAX_ARG);
    }
    // G − 1 ≈ 2x²/3 near zero.
    let mut x = (1.5 * target).sqrt();
    if !(x > lo && x < hi) {
        x = 0.5 * (lo + hi);
    }
    let mut converged = false;
    for _ in 0..200 {
        let h = g_minus_one(x)? - target;
        if h == 0.0 {
            converged = true;
            break;
        }
        if h > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let d = g_prime(x)?;
        let mut next = x - h / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 4.0 * f64::EPSILON * x || hi - lo <= 4.0 * f64::EPSILON * x {
            converged = true;
            break;
        }
    }
    let resid = (g_minus_one(x)? - target).abs();
    if !converged && resid > ctl.rel_tol * y {
        return Err(Error::Precision(format!("G^-1({y}) did not converge")));
    }
    if resid > ctl.rel_tol * y {
        return Err(Error::Precision(format!(
            "G^-1({y}) residual {resid} above tolerance"
        )));
    }
    Ok(x)
}

/// `₂F₂(1,1;3/2,2;x) − 1` by series with compensated summation.
fn hyp2f2_series_minus_one(x: f64, ctl: &SeriesControl) -> Result<f64> {
    let mut acc = NeumaierSum::new();
    let mut term = 1.0;
    for n in 0..ctl.max_terms {
        let nf = n as f64;
        let ratio = x * (nf + 1.0) / ((nf + 1.5) * (nf + 2.0));
        term *= ratio;
        acc.add(term);
        let sum = acc.value();
        // Once the ratio drops below one the tail is bounded geometrically.
        let next_ratio = x * (nf + 2.0) / ((nf + 2.5) * (nf + 3.0));
        if next_ratio < 1.0 {
            let tail = term * next_ratio / (1.0 - next_ratio);
            if tail <= 0.5 * f64::EPSILON * (1.0 + sum) {
                return Ok(sum);
            }
        }
        if term == 0.0 {
            return Ok(sum);
        }
    }
    let sum = acc.value();
    let nf = ctl.max_terms as f64;
    let last_ratio = x * nf / ((nf + 0.5) * (nf + 1.0));
    if last_ratio < 1.0 {
        let tail = term * last_ratio / (1.0 - last_ratio);
        if tail <= ctl.rel_tol * (1.0 + sum) {
            return Ok(sum);
        }
    }
    Err(Error::Precision(format!(
        "2F2 series at x = {x} did not converge in {} terms",
        ctl.max_terms
    )))
}

/// `₂F₂(1,1;3/2,2;x) − 1 = (1/x)∫₀ˣ (G(√t) − 1) dt` by Gauss-Legendre.
fn hyp2f2_quadrature_minus_one(x: f64) -> Result<f64> {
    if x > 700.0 {
        return Err(Error::Range(format!("2F2 at x = {x} overflows")));
    }
    // The integrand grows like e^t; contributions below x − 60 are below 1e-26 relative.
    let a = (x - 60.0).max(0.0);
    let panels = (x - a).ceil() as usize;
    let integral = quad::gauss_legendre(
        |t| g_minus_one(t.sqrt()).unwrap_or(f64::INFINITY),
        a,
        x,
        panels,
    );
    let r = integral / x;
    if !r.is_finite() {
        return Err(Error::Range(format!("2F2 at x = {x} overflows")));
    }
    Ok(r)
}

fn hyp2f2_minus_one(x: f64, ctl: &SeriesControl) -> Result<f64> {
    check_nonneg("x", x)?;
    if x == 0.0 {
        Ok(0.0)
    } else if x <= HYP_SERIES_LIMIT {
        hyp2f2_series_minus_one(x, ctl)
    } else {
        hyp2f2_quadrature_minus_one(x)
    }
}

/// `₂F₂(1,1;3/2,2;x)` for `x >= 0`.
pub fn hyp2f2_special(x: f64, ctl: &SeriesControl) -> Result<f64> {
    Ok(1.0 + hyp2f2_minus_one(x, ctl)?)
}

fn hyp_arg(v: f64, p: &OuParams) -> f64 {
    p.theta() * v * v / (p.sigma() * p.sigma())
}

/// `R1(v) = (v²/σ²)·₂F₂(1,1;3/2,2;θv²/σ²)`, the expected time for the error
/// process started at zero to leave `(−v, v)`.
pub fn r1(v: f64, p: &OuParams) -> Result<f64> {
    ensure_finite("v", v)?;
    let ctl = SeriesControl::default();
    let s2 = p.sigma() * p.sigma();
    Ok(v * v / s2 * hyp2f2_special(hyp_arg(v, p), &ctl)?)
}

/// `R2(v) = (v²/2θ)·(₂F₂(1,1;3/2,2;θv²/σ²) − 1)`.
pub fn r2(v: f64, p: &OuParams) -> Result<f64> {
    ensure_finite("v", v)?;
    let ctl = SeriesControl::default();
    Ok(v * v / (2.0 * p.theta()) * hyp2f2_minus_one(hyp_arg(v, p), &ctl)?)
}

/// `R1'(v) = (√π/(σ√θ))·erf(√θv/σ)·e^{θv²/σ²} = 2v·G(√θ|v|/σ)/σ²`.
pub fn r1_prime(v: f64, p: &OuParams) -> Result<f64> {
    ensure_finite("v", v)?;
    let u = p.theta().sqrt() * v.abs() / p.sigma();
    Ok(2.0 * v * g_fn(u)? / (p.sigma() * p.sigma()))
}

/// `R2'(v) = (σ²/2θ)·R1'(v) − v/θ`.
pub fn r2_prime(v: f64, p: &OuParams) -> Result<f64> {
    Ok(p.stationary_variance() * r1_prime(v, p)? - v / p.theta())
}

/// Candidate value function of the per-sample stopping problem: inside
/// `(−v*, v*)` it solves `(σ²/2)H'' − θvH' = v² − β` with `H(±v*) = −γv*²`;
/// outside it equals the stopping reward `−γv²`.
pub fn value_function_h(v: f64, beta: f64, vstar: f64, p: &OuParams, gamma: f64) -> Result<f64> {
    ensure_finite("v", v)?;
    ensure_finite("beta", beta)?;
    check_nonneg("vstar", vstar)?;
    if v.abs() >= vstar {
        return Ok(-gamma * v * v);
    }
    let inner = r2(v, p)? - beta * r1(v, p)?;
    let edge = r2(vstar, p)? - beta * r1(vstar, p)?;
    Ok(inner - edge - gamma * vstar * vstar)
}
