//! Sampling policies.
//!
//! Each policy reacts to two events: a sample being taken and a sample being
//! delivered. [`Sampler`] turns those events into the next sampling decision;
//! the free functions give the per-step rules.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::metrics::{age_trigger, ModelMetrics};
use crate::sde::{first_crossing, OuParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicySpec {
    Uniform { period: f64 },
    ZeroWait,
    MseOptimal { beta: f64, v: f64 },
    AgeOptimal { beta: f64 },
}

impl PolicySpec {
    pub fn name(&self) -> &'static str {
        match self {
            PolicySpec::Uniform { .. } => "uniform",
            PolicySpec::ZeroWait => "zero_wait",
            PolicySpec::MseOptimal { .. } => "mse_optimal",
            PolicySpec::AgeOptimal { .. } => "age_optimal",
        }
    }

    /// Checks parameter ranges; `beta` is checked against `m` when given.
    pub fn validate(&self, m: Option<&ModelMetrics>) -> Result<()> {
        let check_beta = |beta: f64| -> Result<()> {
            ensure_finite("beta", beta)?;
            if let Some(m) = m {
                if !(beta >= m.mse_y && beta < m.mse_inf) {
                    return Err(Error::Domain(format!(
                        "beta = {beta} outside [{}, {})",
                        m.mse_y, m.mse_inf
                    )));
                }
            }
            Ok(())
        };
        match *self {
            PolicySpec::Uniform { period } => {
                ensure_finite("period", period)?;
                if period <= 0.0 {
                    return Err(Error::Input(format!("period must be > 0, got {period}")));
                }
            }
            PolicySpec::ZeroWait => {}
            PolicySpec::MseOptimal { beta, v } => {
                check_beta(beta)?;
                ensure_finite("v", v)?;
                if v < 0.0 {
                    return Err(Error::Input(format!("v must be >= 0, got {v}")));
                }
            }
            PolicySpec::AgeOptimal { beta } => check_beta(beta)?,
        }
        Ok(())
    }

    /// Long-run sampling rate when it is known without simulation.
    pub fn nominal_rate(&self, mean_y: f64) -> Option<f64> {
        match *self {
            PolicySpec::Uniform { period } => Some(1.0 / period),
            PolicySpec::ZeroWait => Some(1.0 / mean_y),
            _ => None,
        }
    }
}

pub fn uniform_next(s_i: f64, period: f64) -> Result<f64> {
    ensure_finite("s_i", s_i)?;
    ensure_finite("period", period)?;
    if period <= 0.0 {
        return Err(Error::Input(format!("period must be > 0, got {period}")));
    }
    Ok(s_i + period)
}

pub fn zero_wait_next(s_i: f64, y_i: f64) -> Result<f64> {
    ensure_finite("s_i", s_i)?;
    ensure_finite("y_i", y_i)?;
    if y_i < 0.0 {
        return Err(Error::Input(format!(
            "service time must be >= 0, got {y_i}"
        )));
    }
    Ok(s_i + y_i)
}

/// Zero-wait sends one sample per service time, so it needs `f_max ≥ 1/E[Y]`.
pub fn zero_wait_feasible(fmax: f64, mean_y: f64) -> bool {
    fmax * mean_y >= 1.0
}

/// First time at or after `d_i` at which `|error| ≥ v` along `path`, a
/// sequence of `(time, error)` points after `d_i`.
pub fn mse_optimal_next<I>(
    d_i: f64,
    error_at_di: f64,
    v: f64,
    path: I,
    max_wait: f64,
) -> Result<f64>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    ensure_finite("v", v)?;
    if v < 0.0 {
        return Err(Error::Input(format!("v must be >= 0, got {v}")));
    }
    match first_crossing(d_i, error_at_di, v, max_wait, path)? {
        Some((t, _)) => Ok(t),
        None => Err(Error::Input(
            "error path ended before reaching the threshold".into(),
        )),
    }
}

/// Sampling time of the age-optimal policy after a delivery at `d_i` that
/// left the age at `age_at_di`.
pub fn age_optimal_next(
    d_i: f64,
    age_at_di: f64,
    beta: f64,
    m: &ModelMetrics,
    p: &OuParams,
) -> Result<f64> {
    let trigger = age_trigger(p, beta, m)?;
    Ok(d_i + (trigger - age_at_di).max(0.0))
}

/// Threshold of the Wiener limit `θ → 0`, `σ = 1`.
pub fn wiener_threshold(beta: f64, mean_y: f64) -> Result<f64> {
    ensure_finite("beta", beta)?;
    ensure_finite("mean_y", mean_y)?;
    if beta < mean_y {
        return Err(Error::Domain(format!(
            "beta = {beta} below E[Y] = {mean_y}"
        )));
    }
    Ok((3.0 * (beta - mean_y)).sqrt())
}

/// What the sampler wants next.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decision {
    /// Take a sample at this time.
    At(f64),
    /// Take a sample at the first time `|X_t − X̂_t| ≥ v`.
    OnError { v: f64 },
    /// Nothing until the next event.
    Idle,
}

/// Policy state machine driven by sampling and delivery events.
#[derive(Debug, Clone)]
pub struct Sampler {
    spec: PolicySpec,
    trigger_age: f64,
    last_sample: Option<f64>,
}

impl Sampler {
    pub fn new(spec: PolicySpec, p: &OuParams, m: &ModelMetrics) -> Result<Self> {
        spec.validate(Some(m))?;
        let trigger_age = match spec {
            PolicySpec::AgeOptimal { beta } => age_trigger(p, beta, m)?,
            _ => 0.0,
        };
        Ok(Sampler {
            spec,
            trigger_age,
            last_sample: None,
        })
    }

    pub fn spec(&self) -> &PolicySpec {
        &self.spec
    }

    /// Age at which the age-optimal policy samples; zero for other policies.
    pub fn trigger_age(&self) -> f64 {
        self.trigger_age
    }

    pub fn on_sample(&mut self, s: f64) -> Result<Decision> {
        if let Some(prev) = self.last_sample {
            if s <= prev {
                return Err(Error::Input(format!(
                    "sampling times must increase: {s} after {prev}"
                )));
            }
        }
        self.last_sample = Some(s);
        match self.spec {
            PolicySpec::Uniform { period } => Ok(Decision::At(uniform_next(s, period)?)),
            _ => Ok(Decision::Idle),
        }
    }

    /// Called when the server goes idle at `d` with age `age_at_d`. Uniform
    /// sampling ignores deliveries.
    pub fn on_idle(&mut self, d: f64, age_at_d: f64) -> Decision {
        match self.spec {
            PolicySpec::Uniform { .. } => Decision::Idle,
            PolicySpec::ZeroWait => Decision::At(d),
            PolicySpec::MseOptimal { v, .. } => Decision::OnError { v },
            PolicySpec::AgeOptimal { .. } => {
                Decision::At(d + (self.trigger_age - age_at_d).max(0.0))
            }
        }
    }

    /// Decision at time zero, before any sample exists.
    pub fn start(&self) -> Decision {
        match self.spec {
            PolicySpec::Uniform { .. } => Decision::At(0.0),
            _ => Decision::Idle,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{compute_metrics, ServiceDistribution};
    use crate::rng::SimRng;

    fn testbed() -> (OuParams, ModelMetrics) {
        let p = OuParams::new(0.5, 1.0, 0.0).unwrap();
        let d = ServiceDistribution::Exponential { mean: 1.0 };
        let m = compute_metrics(&p, &d, 0, &mut SimRng::new(0)).unwrap();
        (p, m)
    }

    #[test]
    fn simple_rules() {
        assert_eq!(uniform_next(0.0, 1.25).unwrap(), 1.25);
        assert_eq!(uniform_next(10.0, 1.0).unwrap(), 11.0);
        let mut s = 0.0;
        for _ in 0..8 {
            s = uniform_next(s, 0.5).unwrap();
        }
        assert_eq!(s, 4.0);
        assert!(uniform_next(0.0, 0.0).is_err());
        assert_eq!(zero_wait_next(0.0, 0.7).unwrap(), 0.7);
        assert!(zero_wait_next(0.0, -0.1).is_err());
        assert!(!zero_wait_feasible(0.8, 1.0));
        assert!(zero_wait_feasible(1.0, 1.0));
    }

    #[test]
    fn mse_optimal_rule() {
        let path = [(1.1, 0.3), (1.2, 0.9), (1.3, -1.05), (1.4, 0.2)];
        assert_eq!(mse_optimal_next(1.0, 1.2, 1.0, path, 10.0).unwrap(), 1.0);
        assert_eq!(mse_optimal_next(1.0, 0.1, 0.0, path, 10.0).unwrap(), 1.0);
        assert_eq!(mse_optimal_next(1.0, 0.1, 1.0, path, 10.0).unwrap(), 1.3);
        assert!(mse_optimal_next(1.0, 0.1, 2.0, path, 10.0).is_err());
        assert!(matches!(
            mse_optimal_next(1.0, 0.1, 2.0, path, 0.25),
            Err(Error::Timeout { .. })
        ));
    }

    #[test]
    fn age_optimal_rule() {
        let (p, m) = testbed();
        assert_eq!(age_optimal_next(3.0, 0.4, m.mse_y, &m, &p).unwrap(), 3.0);
        let t = age_optimal_next(0.0, 0.0, 0.8, &m, &p).unwrap();
        assert!((t - 2.5f64.ln()).abs() < 1e-12);
        assert_eq!(age_optimal_next(5.0, 2.0, 0.8, &m, &p).unwrap(), 5.0);
        let mut prev = 0.0;
        for k in 1..50 {
            let beta = 0.5 + 0.5 * k as f64 / 50.0;
            let t = age_optimal_next(0.0, 0.0, beta, &m, &p).unwrap();
            assert!(t > prev);
            prev = t;
        }
    }

    #[test]
    fn wiener_rule() {
        assert_eq!(wiener_threshold(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(wiener_threshold(4.0, 1.0).unwrap(), 3.0);
        assert!(wiener_threshold(0.5, 1.0).is_err());
    }

    #[test]
    fn sampler_events() {
        let (p, m) = testbed();
        let mut u = Sampler::new(PolicySpec::Uniform { period: 2.0 }, &p, &m).unwrap();
        assert_eq!(u.start(), Decision::At(0.0));
        assert_eq!(u.on_sample(0.0).unwrap(), Decision::At(2.0));
        assert_eq!(u.on_idle(1.0, 1.0), Decision::Idle);
        assert!(u.on_sample(0.0).is_err());

        let mut a = Sampler::new(PolicySpec::AgeOptimal { beta: 0.8 }, &p, &m).unwrap();
        assert_eq!(a.on_sample(1.0).unwrap(), Decision::Idle);
        let Decision::At(t) = a.on_idle(2.0, 0.5) else {
            panic!()
        };
        assert!((t - (2.0 + 2.5f64.ln() - 0.5)).abs() < 1e-12);

        let mut z = Sampler::new(PolicySpec::ZeroWait, &p, &m).unwrap();
        assert_eq!(z.on_idle(3.5, 1.0), Decision::At(3.5));
        let mut s = Sampler::new(PolicySpec::MseOptimal { beta: 0.7, v: 0.9 }, &p, &m).unwrap();
        assert_eq!(s.on_idle(1.0, 1.0), Decision::OnError { v: 0.9 });
        assert!(Sampler::new(PolicySpec::AgeOptimal { beta: 1.0 }, &p, &m).is_err());
    }
}
