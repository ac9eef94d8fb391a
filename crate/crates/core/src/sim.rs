//! Event-driven simulation of sampler, FCFS queue and MMSE estimator.
//!
//! The signal advances on a grid of step `dt` with exact OU transitions, plus
//! partial steps to every event time (sampling, delivery, batch boundary).
//! The squared error is integrated by the trapezoid rule on those points and
//! averaged after a 5% warm-up, with 20 batch means for standard errors.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::expectations::{McPanel, SignalAgnostic, SignalAware};
use crate::metrics::{compute_metrics, ModelMetrics, ServiceDistribution};
use crate::policies::{zero_wait_feasible, Decision, PolicySpec, Sampler};
use crate::rng::SimRng;
use crate::sde::{default_dt, OuParams};
use crate::solvers::{solve_policy, SolveOptions, ThresholdSolution};

pub const WARMUP_FRACTION: f64 = 0.05;
pub const BATCHES: usize = 20;
pub const DEFAULT_UNIFORM_QUEUE_CAP: usize = 10_000;
/// Draws used for the model metrics of laws without a closed form.
pub const METRICS_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: OuParams,
    pub dist: ServiceDistribution,
    pub policy: PolicySpec,
    pub horizon: f64,
    /// Grid step; `1e-3/θ` when absent.
    #[serde(default)]
    pub dt: Option<f64>,
    pub seed: u64,
    /// Queue capacity; [`DEFAULT_UNIFORM_QUEUE_CAP`] for uniform sampling and
    /// unbounded otherwise when absent.
    #[serde(default)]
    pub queue_cap: Option<usize>,
    /// Rate limit used for the feasibility flag.
    #[serde(default)]
    pub fmax: Option<f64>,
    /// Record every `trace_stride`-th grid point; zero disables the trace.
    #[serde(default)]
    pub trace_stride: usize,
    /// Check the error threshold at grid points only, without the bridge
    /// crossing test. Threshold sampling then fires late by O(σ√dt).
    #[serde(default)]
    pub grid_only: bool,
}

impl SimConfig {
    pub fn new(
        params: OuParams,
        dist: ServiceDistribution,
        policy: PolicySpec,
        horizon: f64,
        seed: u64,
    ) -> Self {
        SimConfig {
            params,
            dist,
            policy,
            horizon,
            dt: None,
            seed,
            queue_cap: None,
            fmax: None,
            trace_stride: 0,
            grid_only: false,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or_else(|| default_dt(self.params.theta()))
    }

    pub fn queue_cap(&self) -> usize {
        match (self.queue_cap, self.policy) {
            (Some(c), _) => c,
            (None, PolicySpec::Uniform { .. }) => DEFAULT_UNIFORM_QUEUE_CAP,
            (None, _) => usize::MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("horizon", self.horizon)?;
        if self.horizon <= 0.0 {
            return Err(Error::Input(format!(
                "horizon must be > 0, got {}",
                self.horizon
            )));
        }
        let dt = self.dt();
        ensure_finite("dt", dt)?;
        if dt <= 0.0 || dt > self.horizon / 100.0 {
            return Err(Error::Input(format!(
                "dt = {dt} must lie in (0, horizon/100 = {}]",
                self.horizon / 100.0
            )));
        }
        if let Some(f) = self.fmax {
            if f.is_nan() || f <= 0.0 {
                return Err(Error::Input(format!("fmax must be > 0, got {f}")));
            }
        }
        if self.queue_cap == Some(0) {
            return Err(Error::Input("queue_cap must be at least 1".into()));
        }
        self.dist.validate()?;
        if self.dist.mean().is_nan() || self.dist.mean() <= 0.0 {
            return Err(Error::Input(
                "degenerate service distribution: mean must be > 0".into(),
            ));
        }
        self.policy.validate(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    pub x: f64,
    pub x_hat: f64,
    pub age: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Delivery {
    pub sample_time: f64,
    pub delivery_time: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub points: Vec<TracePoint>,
    pub sample_times: Vec<f64>,
    pub deliveries: Vec<Delivery>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub time_avg_mse: f64,
    pub mse_std_error: f64,
    pub avg_rate: f64,
    pub rate_std_error: f64,
    pub avg_inter_delivery: f64,
    /// Time average of `p(Δ_t)`, the error a signal-agnostic estimator expects.
    pub time_avg_age_penalty: f64,
    pub age_penalty_std_error: f64,
    pub feasible: bool,
    pub queue_overflowed: bool,
    pub samples: usize,
    pub deliveries: usize,
    pub dropped: usize,
    pub max_queue_len: usize,
    /// Averaging window after warm-up.
    pub window: (f64, f64),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<SimTrace>,
}

/// Simulator state between events.
#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub x: f64,
    /// Generation time of the freshest delivered sample.
    pub u: f64,
    /// Signal value carried by that sample.
    pub x_u: f64,
    pub server_busy_until: Option<f64>,
    pub queue: VecDeque<(f64, f64)>,
}

impl SimState {
    pub fn delta(&self) -> f64 {
        self.t - self.u
    }

    pub fn x_hat(&self, p: &OuParams) -> f64 {
        p.conditional_mean(self.x_u, self.t - self.u)
    }
}

/// Whether the error path crossed `±v` strictly between two points below the
/// threshold, using the Brownian-bridge crossing probability. Checking only at
/// grid points would sample late by an amount of order `σ√dt`.
fn bridge_crossed(e0: f64, e1: f64, v: f64, sigma: f64, h: f64, rng: &mut SimRng) -> bool {
    let scale = 2.0 / (sigma * sigma * h);
    let up = scale * (v - e0) * (v - e1);
    let down = scale * (v + e0) * (v + e1);
    if up > 40.0 && down > 40.0 {
        return false;
    }
    let miss = (1.0 - (-up).exp()) * (1.0 - (-down).exp());
    rng.uniform() >= miss
}

#[derive(Debug, Clone, Copy, Default)]
struct Batch {
    err: f64,
    penalty: f64,
    samples: usize,
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Metrics the simulator uses for the age-optimal trigger.
pub fn sim_metrics(cfg: &SimConfig) -> Result<ModelMetrics> {
    compute_metrics(
        &cfg.params,
        &cfg.dist,
        METRICS_SAMPLES,
        &mut SimRng::new(cfg.seed).split(2),
    )
}

pub fn run(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let m = sim_metrics(cfg)?;
    run_with_metrics(cfg, &m)
}

/// Run with externally supplied metrics, e.g. those a threshold was solved on.
pub fn run_with_metrics(cfg: &SimConfig, m: &ModelMetrics) -> Result<SimResult> {
    let root = SimRng::new(cfg.seed);
    run_with_streams(cfg, m, root.split(0), root.split(1))
}

/// Run with explicit signal and service-time streams.
pub fn run_with_streams(
    cfg: &SimConfig,
    m: &ModelMetrics,
    mut signal: SimRng,
    mut service: SimRng,
) -> Result<SimResult> {
    let mut bridge = service.split(3);
    cfg.validate()?;
    let p = cfg.params;
    let mut sampler = Sampler::new(cfg.policy, &p, m)?;
    let dt = cfg.dt();
    let horizon = cfg.horizon;
    let cap = cfg.queue_cap();
    let theta = p.theta();
    let full_decay = (-theta * dt).exp();
    let full_sd = p.conditional_variance(dt).sqrt();
    let mse_inf = p.stationary_variance();

    let t0 = WARMUP_FRACTION * horizon;
    let batch_len = (horizon - t0) / BATCHES as f64;
    let boundary = |k: usize| {
        if k == BATCHES {
            horizon
        } else {
            t0 + k as f64 * batch_len
        }
    };

    let x0 = p.mu() + mse_inf.sqrt() * signal.normal();
    let mut st = SimState {
        t: 0.0,
        x: x0,
        u: 0.0,
        x_u: x0,
        server_busy_until: None,
        queue: VecDeque::new(),
    };
    let mut pending: Option<f64> = None;
    let mut watch_v: Option<f64> = None;
    match sampler.start() {
        Decision::At(t) => pending = Some(t),
        Decision::OnError { v } => watch_v = Some(v),
        Decision::Idle => {}
    }
    if pending.is_none() && watch_v.is_none() {
        match sampler.on_idle(0.0, 0.0) {
            Decision::At(t) => pending = Some(t),
            Decision::OnError { v } => watch_v = Some(v),
            Decision::Idle => {}
        }
    }

    let mut batches = [Batch::default(); BATCHES];
    // Index of the next batch boundary to cross; 0 is the warm-up end.
    let mut next_boundary = 0usize;
    let mut grid_k: u64 = 0;
    let mut samples = 0usize;
    let mut deliveries = 0usize;
    let mut dropped = 0usize;
    let mut overflowed = false;
    let mut max_queue = 0usize;
    let mut last_delivery: Option<f64> = None;
    let mut inter_sum = 0.0;
    let mut inter_n = 0usize;
    let mut trace = (cfg.trace_stride > 0).then(SimTrace::default);

    let mut err = st.x - st.x_hat(&p);
    let mut bridge_hit = false;

    // Take a sample at the current time; returns the next decision.
    macro_rules! take_sample {
        () => {{
            let s = st.t;
            let d = sampler.on_sample(s)?;
            if s >= t0 {
                let k = (((s - t0) / batch_len) as usize).min(BATCHES - 1);
                batches[k].samples += 1;
            }
            samples += 1;
            if let Some(tr) = trace.as_mut() {
                tr.sample_times.push(s);
            }
            if st.server_busy_until.is_none() {
                st.server_busy_until = Some(s + cfg.dist.sample(&mut service));
                st.queue.push_back((s, st.x));
            } else if st.queue.len() < cap.saturating_add(1) {
                // The head of the queue is the sample in service.
                st.queue.push_back((s, st.x));
            } else {
                dropped += 1;
                overflowed = true;
            }
            max_queue = max_queue.max(st.queue.len().saturating_sub(1));
            d
        }};
    }

    loop {
        // Next stopping point.
        let grid_next = (grid_k + 1) as f64 * dt;
        let mut t_next = grid_next.min(horizon);
        if let Some(s) = pending {
            t_next = t_next.min(s);
        }
        if let Some(d) = st.server_busy_until {
            t_next = t_next.min(d);
        }
        if next_boundary <= BATCHES {
            t_next = t_next.min(boundary(next_boundary));
        }
        let t_next = t_next.max(st.t);

        // Advance the signal and integrate.
        let h = t_next - st.t;
        if h > 0.0 {
            let z = signal.normal();
            let (decay, sd) = if t_next == grid_next {
                (full_decay, full_sd)
            } else {
                ((-theta * h).exp(), p.conditional_variance(h).sqrt())
            };
            let age0 = st.delta();
            st.x = p.mu() + (st.x - p.mu()) * decay + sd * z;
            st.t = t_next;
            let new_err = st.x - st.x_hat(&p);
            if let Some(v) = watch_v {
                if !cfg.grid_only
                    && new_err.abs() < v
                    && bridge_crossed(err, new_err, v, p.sigma(), h, &mut bridge)
                {
                    bridge_hit = true;
                }
            }
            if next_boundary >= 1 {
                let b = &mut batches[next_boundary - 1];
                b.err += 0.5 * h * (err * err + new_err * new_err);
                // Exact integral of the age penalty over [age0, age0 + h].
                b.penalty += mse_inf
                    * (h + (-2.0 * theta * age0).exp() * (-2.0 * theta * h).exp_m1()
                        / (2.0 * theta));
            }
            err = new_err;
        }
        if t_next == grid_next {
            grid_k += 1;
            if let Some(tr) = trace.as_mut() {
                if grid_k.is_multiple_of(cfg.trace_stride as u64) {
                    tr.points.push(TracePoint {
                        t: st.t,
                        x: st.x,
                        x_hat: st.x - err,
                        age: st.delta(),
                    });
                }
            }
        }
        if next_boundary <= BATCHES && st.t >= boundary(next_boundary) {
            next_boundary += 1;
        }
        if st.t >= horizon {
            break;
        }

        // Delivery.
        if st.server_busy_until == Some(st.t) {
            let (s, xs) = st.queue.pop_front().expect("sample in service");
            if let Some(tr) = trace.as_mut() {
                tr.points.push(TracePoint {
                    t: st.t,
                    x: st.x,
                    x_hat: st.x - err,
                    age: st.delta(),
                });
                tr.deliveries.push(Delivery {
                    sample_time: s,
                    delivery_time: st.t,
                    value: xs,
                });
            }
            st.u = s;
            st.x_u = xs;
            err = st.x - st.x_hat(&p);
            if let Some(tr) = trace.as_mut() {
                tr.points.push(TracePoint {
                    t: st.t,
                    x: st.x,
                    x_hat: st.x - err,
                    age: st.delta(),
                });
            }
            deliveries += 1;
            if st.t >= t0 {
                if let Some(prev) = last_delivery {
                    if prev >= t0 {
                        inter_sum += st.t - prev;
                        inter_n += 1;
                    }
                }
            }
            last_delivery = Some(st.t);
            if st.queue.is_empty() {
                st.server_busy_until = None;
                match sampler.on_idle(st.t, st.delta()) {
                    Decision::At(t) => pending = Some(t),
                    Decision::OnError { v } => watch_v = Some(v),
                    Decision::Idle => {}
                }
            } else {
                st.server_busy_until = Some(st.t + cfg.dist.sample(&mut service));
            }
        }

        // Scheduled sample.
        if pending.is_some_and(|s| s <= st.t) {
            pending = None;
            if let Decision::At(t) = take_sample!() {
                pending = Some(t);
            }
        }

        // Threshold sample.
        if let Some(v) = watch_v {
            if err.abs() >= v || std::mem::take(&mut bridge_hit) {
                watch_v = None;
                if let Decision::At(t) = take_sample!() {
                    pending = Some(t);
                }
            }
        }
    }

    let window = horizon - t0;
    let errs: Vec<f64> = batches.iter().map(|b| b.err / batch_len).collect();
    let pens: Vec<f64> = batches.iter().map(|b| b.penalty / batch_len).collect();
    let rates: Vec<f64> = batches
        .iter()
        .map(|b| b.samples as f64 / batch_len)
        .collect();
    let (time_avg_mse, mse_std_error) = mean_and_se(&errs);
    let (time_avg_age_penalty, age_penalty_std_error) = mean_and_se(&pens);
    let (avg_rate, rate_std_error) = mean_and_se(&rates);
    let feasible = match cfg.fmax {
        None => true,
        Some(f) if f.is_infinite() => true,
        Some(f) => match cfg.policy {
            PolicySpec::Uniform { period } => 1.0 / period <= f * (1.0 + 1e-12),
            PolicySpec::ZeroWait => zero_wait_feasible(f, cfg.dist.mean()),
            _ => avg_rate <= f + 3.0 * rate_std_error,
        },
    };
    Ok(SimResult {
        time_avg_mse,
        mse_std_error,
        avg_rate,
        rate_std_error,
        avg_inter_delivery: if inter_n > 0 {
            inter_sum / inter_n as f64
        } else {
            f64::NAN
        },
        time_avg_age_penalty,
        age_penalty_std_error,
        feasible,
        queue_overflowed: overflowed,
        samples,
        deliveries,
        dropped,
        max_queue_len: max_queue,
        window: (t0, t0 + window),
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Uniform,
    ZeroWait,
    MseOptimal,
    AgeOptimal,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::MseOptimal,
        PolicyKind::AgeOptimal,
        PolicyKind::Uniform,
        PolicyKind::ZeroWait,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Uniform => "uniform",
            PolicyKind::ZeroWait => "zero_wait",
            PolicyKind::MseOptimal => "mse_optimal",
            PolicyKind::AgeOptimal => "age_optimal",
        }
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "uniform" => Ok(PolicyKind::Uniform),
            "zero_wait" => Ok(PolicyKind::ZeroWait),
            "mse_optimal" | "mse_opt" => Ok(PolicyKind::MseOptimal),
            "age_optimal" | "age_opt" => Ok(PolicyKind::AgeOptimal),
            other => Err(Error::Config(format!("unknown policy {other:?}"))),
        }
    }
}

/// Thresholds of both optimal policies for one model and rate limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvedModel {
    pub metrics: ModelMetrics,
    pub fmax: f64,
    pub mse_optimal: ThresholdSolution,
    pub age_optimal: ThresholdSolution,
}

/// Build a panel and solve both threshold policies on it.
pub fn solve_model(
    params: &OuParams,
    dist: &ServiceDistribution,
    fmax: f64,
    mc_samples: usize,
    mc_seed: u64,
    opts: &SolveOptions,
) -> Result<SolvedModel> {
    let root = SimRng::new(mc_seed);
    let metrics = compute_metrics(
        params,
        dist,
        METRICS_SAMPLES.max(mc_samples),
        &mut root.split(1),
    )?;
    let panel = McPanel::build(*params, dist.clone(), metrics, mc_samples, mc_seed)?;
    let mse_optimal = solve_policy(&SignalAware(&panel), fmax, opts)?;
    let age_optimal = solve_policy(&SignalAgnostic(&panel), fmax, opts)?;
    Ok(SolvedModel {
        metrics,
        fmax,
        mse_optimal,
        age_optimal,
    })
}

impl SolvedModel {
    /// Policy parameters for `kind`; uniform sampling uses period `1/f_max`.
    pub fn policy(&self, kind: PolicyKind) -> Result<PolicySpec> {
        match kind {
            PolicyKind::MseOptimal => Ok(PolicySpec::MseOptimal {
                beta: self.mse_optimal.beta,
                v: self.mse_optimal.v,
            }),
            PolicyKind::AgeOptimal => Ok(PolicySpec::AgeOptimal {
                beta: self.age_optimal.beta,
            }),
            PolicyKind::ZeroWait => Ok(PolicySpec::ZeroWait),
            PolicyKind::Uniform => {
                if !self.fmax.is_finite() {
                    return Err(Error::Input("uniform sampling needs a finite fmax".into()));
                }
                Ok(PolicySpec::Uniform {
                    period: 1.0 / self.fmax,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Fmax,
    Alpha,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fmax" => Ok(SweepAxis::Fmax),
            "alpha" => Ok(SweepAxis::Alpha),
            other => Err(Error::Config(format!("unknown sweep axis {other:?}"))),
        }
    }
}

/// Everything a sweep needs besides the axis values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepBase {
    pub params: OuParams,
    pub dist: ServiceDistribution,
    /// Rate limit for the `alpha` axis; ignored on the `fmax` axis.
    pub fmax: f64,
    pub horizon: f64,
    #[serde(default)]
    pub dt: Option<f64>,
    pub seed: u64,
    #[serde(default)]
    pub queue_cap: Option<usize>,
    #[serde(default)]
    pub grid_only: bool,
    pub mc_samples: usize,
    pub mc_seed: u64,
    pub solve: SolveOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub policy: PolicyKind,
    pub result: Option<SimResult>,
    pub beta: Option<f64>,
    pub v: Option<f64>,
    /// Solved objective value for the threshold policies.
    pub mse_opt: Option<f64>,
    pub error: Option<String>,
}

/// Simulate every `(value, policy)` cell. Cells run in parallel with seed
/// `seed ^ cell index`; rows come back in input order. Failures are recorded
/// per cell.
pub fn sweep(
    base: &SweepBase,
    axis: SweepAxis,
    values: &[f64],
    policies: &[PolicyKind],
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Input("sweep needs at least one value".into()));
    }
    if policies.is_empty() {
        return Err(Error::Input("sweep needs at least one policy".into()));
    }
    for (i, v) in values.iter().enumerate() {
        ensure_finite("sweep value", *v)?;
        if i > 0 && *v < values[i - 1] {
            return Err(Error::Input("sweep values must be sorted ascending".into()));
        }
    }
    let model_at = |value: f64| -> (ServiceDistribution, f64) {
        match axis {
            SweepAxis::Fmax => (base.dist.clone(), value),
            SweepAxis::Alpha => (
                ServiceDistribution::LognormalNormalized { alpha: value },
                base.fmax,
            ),
        }
    };
    let solved: Vec<Result<SolvedModel>> = values
        .iter()
        .map(|&value| {
            let (dist, fmax) = model_at(value);
            solve_model(
                &base.params,
                &dist,
                fmax,
                base.mc_samples,
                base.mc_seed,
                &base.solve,
            )
        })
        .collect();
    let cells: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|i| (0..policies.len()).map(move |j| (i, j)))
        .collect();
    let rows = cells
        .par_iter()
        .enumerate()
        .map(|(index, &(i, j))| {
            let kind = policies[j];
            let mut row = SweepRow {
                axis_value: values[i],
                policy: kind,
                result: None,
                beta: None,
                v: None,
                mse_opt: None,
                error: None,
            };
            let outcome = (|| -> Result<SimResult> {
                let model = solved[i].as_ref().map_err(Clone::clone)?;
                match kind {
                    PolicyKind::MseOptimal => {
                        row.beta = Some(model.mse_optimal.beta);
                        row.v = Some(model.mse_optimal.v);
                        row.mse_opt = Some(model.mse_optimal.mse_opt);
                    }
                    PolicyKind::AgeOptimal => {
                        row.beta = Some(model.age_optimal.beta);
                        row.mse_opt = Some(model.age_optimal.mse_opt);
                    }
                    _ => {}
                }
                let (dist, fmax) = model_at(values[i]);
                let cfg = SimConfig {
                    params: base.params,
                    dist,
                    policy: model.policy(kind)?,
                    horizon: base.horizon,
                    dt: base.dt,
                    seed: base.seed ^ index as u64,
                    queue_cap: base.queue_cap,
                    fmax: Some(fmax),
                    trace_stride: 0,
                    grid_only: base.grid_only,
                };
                run_with_metrics(&cfg, &model.metrics)
            })();
            match outcome {
                Ok(r) => row.result = Some(r),
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect();
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(policy: PolicySpec, horizon: f64, seed: u64) -> SimConfig {
        SimConfig::new(
            OuParams::new(0.5, 1.0, 0.0).unwrap(),
            ServiceDistribution::Exponential { mean: 1.0 },
            policy,
            horizon,
            seed,
        )
    }

    #[test]
    fn deterministic_replay() {
        let c = cfg(PolicySpec::ZeroWait, 200.0, 7);
        assert_eq!(run(&c).unwrap(), run(&c).unwrap());
    }

    #[test]
    fn config_checks() {
        let mut c = cfg(PolicySpec::ZeroWait, 10.0, 1);
        c.dt = Some(0.2);
        assert!(run(&c).is_err());
        c.dt = None;
        c.horizon = -1.0;
        assert!(run(&c).is_err());
        let c = cfg(PolicySpec::Uniform { period: 0.0 }, 10.0, 1);
        assert!(run(&c).is_err());
    }

    #[test]
    fn zero_wait_rate() {
        let r = run(&cfg(PolicySpec::ZeroWait, 2_000.0, 3)).unwrap();
        assert!((r.avg_rate - 1.0).abs() < 0.1, "{}", r.avg_rate);
        assert!(r.time_avg_mse > 0.5 && r.time_avg_mse < 1.0);
        assert!(!r.queue_overflowed);
        assert_eq!(r.max_queue_len, 0);
    }

    #[test]
    fn uniform_overflow_is_flagged() {
        let mut c = cfg(PolicySpec::Uniform { period: 0.5 }, 2_000.0, 3);
        c.queue_cap = Some(50);
        let r = run(&c).unwrap();
        assert!(r.queue_overflowed);
        assert!(r.dropped > 0);
        assert_eq!(r.max_queue_len, 50);
    }

    #[test]
    fn sweep_keeps_order_and_records_errors() {
        let base = SweepBase {
            params: OuParams::new(0.5, 1.0, 0.0).unwrap(),
            dist: ServiceDistribution::Exponential { mean: 1.0 },
            fmax: f64::INFINITY,
            horizon: 300.0,
            dt: None,
            seed: 5,
            queue_cap: None,
            grid_only: false,
            mc_samples: 20_000,
            mc_seed: 1,
            solve: SolveOptions::default(),
        };
        let rows = sweep(
            &base,
            SweepAxis::Fmax,
            &[0.5, 0.8],
            &[PolicyKind::Uniform, PolicyKind::MseOptimal],
        )
        .unwrap();
        let order: Vec<_> = rows.iter().map(|r| (r.axis_value, r.policy)).collect();
        assert_eq!(
            order,
            vec![
                (0.5, PolicyKind::Uniform),
                (0.5, PolicyKind::MseOptimal),
                (0.8, PolicyKind::Uniform),
                (0.8, PolicyKind::MseOptimal)
            ]
        );
        assert!(rows.iter().all(|r| r.error.is_none()));
        assert!(sweep(&base, SweepAxis::Fmax, &[], &[PolicyKind::Uniform]).is_err());
        assert!(sweep(&base, SweepAxis::Fmax, &[1.0, 0.5], &[PolicyKind::Uniform]).is_err());
        let rows = sweep(&base, SweepAxis::Alpha, &[1.0], &[PolicyKind::Uniform]).unwrap();
        assert!(rows[0].error.is_some());
    }
}
