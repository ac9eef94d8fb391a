//! Monte Carlo evaluation of the renewal-reward expectations `f1(β)` (error
//! accumulated per delivery interval) and `f2(β)` (mean delivery interval)
//! through the Dynkin kernels `R1`, `R2`.
//!
//! A [`McPanel`] holds one fixed set of `(Y, O_Y)` draws. Every `β` is
//! evaluated on the same draws (common random numbers), which makes the
//! estimated `f(β) = f1(β) − β·f2(β)` a deterministic function of `β`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::metrics::{age_trigger, ModelMetrics, ServiceDistribution};
use crate::rng::SimRng;
use crate::sde::{sample_error_at, OuParams};
use crate::specfun::{g_inv, r1, r2, NeumaierSum, SeriesControl};

/// Draws per chunk; also the unit of the deterministic parallel reduction.
const CHUNK: usize = 1 << 14;

/// Default panel size.
pub const DEFAULT_PANEL_SIZE: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

/// `v(β) = (σ/√θ)·G⁻¹((mse_∞ − mse_Y)/(mse_∞ − β))` for `mse_Y <= β < mse_∞`.
pub fn threshold_v(beta: f64, m: &ModelMetrics, p: &OuParams) -> Result<f64> {
    ensure_finite("beta", beta)?;
    if beta < m.mse_y || beta >= m.mse_inf {
        return Err(Error::Domain(format!(
            "beta = {beta} outside [mse_y, mse_inf) = [{}, {})",
            m.mse_y, m.mse_inf
        )));
    }
    let ratio = (m.mse_inf - m.mse_y) / (m.mse_inf - beta);
    let x = g_inv(ratio.max(1.0), &SeriesControl::default())?;
    Ok(p.sigma() / p.theta().sqrt() * x)
}

/// Fixed Monte Carlo panel of `(Y_i, O_{Y_i})` draws with cached kernels.
#[derive(Debug, Clone)]
pub struct McPanel {
    params: OuParams,
    dist: ServiceDistribution,
    metrics: ModelMetrics,
    seed: u64,
    y: Vec<f64>,
    o: Vec<f64>,
    r1_o: Vec<f64>,
    r2_o: Vec<f64>,
}

impl McPanel {
    /// Draw `n` pairs. Chunk `k` uses the child stream `seed.split(k)`, so the
    /// panel is identical for any thread count.
    pub fn build(
        params: OuParams,
        dist: ServiceDistribution,
        metrics: ModelMetrics,
        n: usize,
        seed: u64,
    ) -> Result<Self> {
        dist.validate()?;
        if dist.mean().is_nan() || dist.mean() <= 0.0 {
            return Err(Error::Input(
                "degenerate service distribution: mean must be > 0".into(),
            ));
        }
        if n == 0 {
            return Err(Error::Input("panel needs at least one draw".into()));
        }
        let root = SimRng::new(seed);
        let ep = params.error_process();
        let chunks: Vec<Result<Vec<[f64; 4]>>> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|k| {
                let mut rng = root.split(k as u64);
                let len = CHUNK.min(n - k * CHUNK);
                let mut out = Vec::with_capacity(len);
                for _ in 0..len {
                    let y = dist.sample(&mut rng);
                    let o = sample_error_at(&ep, y, rng.normal())?;
                    out.push([y, o, r1(o, &params)?, r2(o, &params)?]);
                }
                Ok(out)
            })
            .collect();
        let mut panel = McPanel {
            params,
            dist,
            metrics,
            seed,
            y: Vec::with_capacity(n),
            o: Vec::with_capacity(n),
            r1_o: Vec::with_capacity(n),
            r2_o: Vec::with_capacity(n),
        };
        for chunk in chunks {
            for [y, o, a, b] in chunk? {
                panel.y.push(y);
                panel.o.push(o);
                panel.r1_o.push(a);
                panel.r2_o.push(b);
            }
        }
        Ok(panel)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn params(&self) -> &OuParams {
        &self.params
    }

    pub fn dist(&self) -> &ServiceDistribution {
        &self.dist
    }

    pub fn metrics(&self) -> &ModelMetrics {
        &self.metrics
    }

    pub fn service_draws(&self) -> &[f64] {
        &self.y
    }

    pub fn error_draws(&self) -> &[f64] {
        &self.o
    }

    /// Sample mean of `O_Y²` over the panel.
    pub fn mean_error_sq(&self) -> f64 {
        let mut acc = NeumaierSum::new();
        self.o.iter().for_each(|o| acc.add(o * o));
        acc.value() / self.len() as f64
    }

    /// Joint moments of two per-draw quantities, reduced over fixed chunks.
    fn moments<F>(&self, per_draw: F) -> Moments
    where
        F: Fn(usize) -> (f64, f64) + Sync,
    {
        let n = self.len();
        let partials: Vec<Moments> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|k| {
                let mut m = Moments::default();
                for i in k * CHUNK..((k + 1) * CHUNK).min(n) {
                    let (a, b) = per_draw(i);
                    m.push(a, b);
                }
                m
            })
            .collect();
        let mut total = Moments::default();
        for m in &partials {
            total.merge(m);
        }
        total
    }

    /// `E[max{R1(v(β)) − R1(O_Y), 0}] + E[Y]`: mean delivery interval.
    pub fn f2_hat(&self, beta: f64) -> Result<McEstimate> {
        Ok(SignalAware(self).evaluate(beta)?.f2)
    }

    /// `E[max{R2(v) − R2(O_Y), 0}] + mse_∞(E[Y] − γ) + γ·E[max{v², O_Y²}]`:
    /// mean squared error integrated over one delivery interval.
    pub fn f1_hat(&self, beta: f64) -> Result<McEstimate> {
        Ok(SignalAware(self).evaluate(beta)?.f1)
    }

    /// `f(β) = f1(β) − β·f2(β)` with the joint standard error.
    pub fn f_hat(&self, beta: f64) -> Result<McEstimate> {
        Ok(SignalAware(self).evaluate(beta)?.f)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    a: NeumaierSum,
    b: NeumaierSum,
    aa: NeumaierSum,
    bb: NeumaierSum,
    ab: NeumaierSum,
}

impl Moments {
    #[inline]
    fn push(&mut self, a: f64, b: f64) {
        self.n += 1;
        self.a.add(a);
        self.b.add(b);
        self.aa.add(a * a);
        self.bb.add(b * b);
        self.ab.add(a * b);
    }

    fn merge(&mut self, o: &Moments) {
        self.n += o.n;
        self.a.merge(&o.a);
        self.b.merge(&o.b);
        self.aa.merge(&o.aa);
        self.bb.merge(&o.bb);
        self.ab.merge(&o.ab);
    }

    /// Estimates of `E[a]`, `E[b]` and `E[a − c·b]`.
    fn estimates(&self, c: f64) -> (McEstimate, McEstimate, McEstimate) {
        let n = self.n as f64;
        let ma = self.a.value() / n;
        let mb = self.b.value() / n;
        let var = |sq: f64, m: f64| {
            if self.n > 1 {
                ((sq / n - m * m) * n / (n - 1.0)).max(0.0)
            } else {
                0.0
            }
        };
        let va = var(self.aa.value(), ma);
        let vb = var(self.bb.value(), mb);
        let cov = if self.n > 1 {
            (self.ab.value() / n - ma * mb) * n / (n - 1.0)
        } else {
            0.0
        };
        let vf = (va - 2.0 * c * cov + c * c * vb).max(0.0);
        let est = |mean: f64, v: f64| McEstimate {
            mean,
            std_error: (v / n).sqrt(),
            n: self.n,
        };
        (est(ma, va), est(mb, vb), est(ma - c * mb, vf))
    }
}

/// `f1`, `f2`, `f` and `h = f1/f2 − β` at one `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub beta: f64,
    pub f1: McEstimate,
    pub f2: McEstimate,
    pub f: McEstimate,
}

impl Evaluation {
    /// `h(β) = f1/f2 − β`; standard error by the delta method.
    pub fn h(&self) -> McEstimate {
        McEstimate {
            mean: self.f.mean / self.f2.mean,
            std_error: self.f.std_error / self.f2.mean,
            n: self.f.n,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.f1.mean / self.f2.mean
    }
}

/// A renewal-reward objective whose root in `β` the solvers look for.
pub trait Objective: Sync {
    fn metrics(&self) -> &ModelMetrics;

    fn params(&self) -> OuParams;

    fn evaluate(&self, beta: f64) -> Result<Evaluation>;

    /// Bracket `[mse_Y, mse_∞)` of admissible `β`.
    fn bounds(&self) -> (f64, f64) {
        let m = self.metrics();
        (m.mse_y, m.mse_inf)
    }

    /// Finite-difference step for derivatives in `β`.
    fn fd_step(&self) -> f64 {
        let (lo, hi) = self.bounds();
        (1e-3 * (hi - lo)).max(1e-4)
    }
}

/// Signal-aware (MSE-optimal) threshold policy on a panel.
#[derive(Debug, Clone, Copy)]
pub struct SignalAware<'a>(pub &'a McPanel);

impl Objective for SignalAware<'_> {
    fn metrics(&self) -> &ModelMetrics {
        &self.0.metrics
    }

    fn params(&self) -> OuParams {
        self.0.params
    }

    fn evaluate(&self, beta: f64) -> Result<Evaluation> {
        let panel = self.0;
        let m = &panel.metrics;
        let v = threshold_v(beta, m, &panel.params)?;
        let (r1v, r2v, v2) = (r1(v, &panel.params)?, r2(v, &panel.params)?, v * v);
        let gamma = m.gamma;
        let mom = panel.moments(|i| {
            let o2 = panel.o[i] * panel.o[i];
            let q1 = (r2v - panel.r2_o[i]).max(0.0) + gamma * v2.max(o2);
            let q2 = (r1v - panel.r1_o[i]).max(0.0);
            (q1, q2)
        });
        let (q1, q2, _) = mom.estimates(beta);
        let c1 = m.mse_inf * (m.mean_y - gamma);
        let c2 = m.mean_y;
        let f1 = McEstimate {
            mean: q1.mean + c1,
            ..q1
        };
        let f2 = McEstimate {
            mean: q2.mean + c2,
            ..q2
        };
        let (_, _, fq) = mom.estimates(beta);
        let f = McEstimate {
            mean: f1.mean - beta * f2.mean,
            ..fq
        };
        Ok(Evaluation { beta, f1, f2, f })
    }
}

/// Signal-agnostic (age-optimal) policy: sample once the expected error at
/// delivery reaches `β`. Only the panel's service draws are used.
#[derive(Debug, Clone, Copy)]
pub struct SignalAgnostic<'a>(pub &'a McPanel);

impl Objective for SignalAgnostic<'_> {
    fn metrics(&self) -> &ModelMetrics {
        &self.0.metrics
    }

    fn params(&self) -> OuParams {
        self.0.params
    }

    fn evaluate(&self, beta: f64) -> Result<Evaluation> {
        let panel = self.0;
        let m = &panel.metrics;
        let (lo, hi) = self.bounds();
        if !(beta >= lo && beta < hi) {
            return Err(Error::Domain(format!(
                "beta = {beta} outside [mse_y, mse_inf) = [{lo}, {hi})"
            )));
        }
        let delta = age_trigger(&panel.params, beta, m)?;
        let two_theta = 2.0 * panel.params.theta();
        let l = m.laplace_2theta;
        // Delivery interval: max(Δ, Y_i) − Y_i + Y_{i+1}; its error integral
        // follows from integrating the age penalty over the interval.
        let mom = panel.moments(|i| {
            let y = panel.y[i];
            let wait = (delta - y).max(0.0);
            let w = y + wait;
            let q1 = m.mse_inf
                * (wait + l * ((-two_theta * w).exp() - (-two_theta * y).exp()) / two_theta);
            (q1, wait)
        });
        let (q1, q2, fq) = mom.estimates(beta);
        let f1 = McEstimate {
            mean: q1.mean + m.mse_inf * (m.mean_y - l * m.gamma),
            ..q1
        };
        let f2 = McEstimate {
            mean: q2.mean + m.mean_y,
            ..q2
        };
        let f = McEstimate {
            mean: f1.mean - beta * f2.mean,
            ..fq
        };
        Ok(Evaluation { beta, f1, f2, f })
    }
}
