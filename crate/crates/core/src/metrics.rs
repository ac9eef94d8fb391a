//! Closed-form scalar metrics of the model: `mse_Y`, `mse_∞`, `γ`, the age
//! penalty `p(Δ)`, and the signal-agnostic trigger.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::rng::SimRng;
use crate::sde::OuParams;
use crate::specfun::NeumaierSum;

/// Law of the i.i.d. service times `Y_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ServiceDistribution {
    Exponential {
        mean: f64,
    },
    /// `e^{αZ} / E[e^{αZ}]` with `Z` standard normal; mean exactly one.
    LognormalNormalized {
        alpha: f64,
    },
    Constant {
        y: f64,
    },
    Empirical {
        samples: Vec<f64>,
    },
}

impl ServiceDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            ServiceDistribution::Exponential { mean } => {
                ensure_finite("mean", *mean)?;
                if *mean <= 0.0 {
                    return Err(Error::Input(format!(
                        "exponential mean must be > 0, got {mean}"
                    )));
                }
            }
            ServiceDistribution::LognormalNormalized { alpha } => {
                ensure_finite("alpha", *alpha)?;
                if *alpha <= 0.0 {
                    return Err(Error::Input(format!(
                        "log-normal alpha must be > 0, got {alpha}"
                    )));
                }
            }
            ServiceDistribution::Constant { y } => {
                ensure_finite("y", *y)?;
                if *y < 0.0 {
                    return Err(Error::Input(format!(
                        "constant service time must be >= 0, got {y}"
                    )));
                }
            }
            ServiceDistribution::Empirical { samples } => {
                if samples.is_empty() {
                    return Err(Error::Input("empirical distribution needs samples".into()));
                }
                if let Some(bad) = samples.iter().find(|s| !s.is_finite() || **s < 0.0) {
                    return Err(Error::Input(format!(
                        "empirical sample {bad} is not a duration"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match self {
            ServiceDistribution::Exponential { mean } => *mean,
            ServiceDistribution::LognormalNormalized { .. } => 1.0,
            ServiceDistribution::Constant { y } => *y,
            ServiceDistribution::Empirical { samples } => {
                let mut s = NeumaierSum::new();
                samples.iter().for_each(|&x| s.add(x));
                s.value() / samples.len() as f64
            }
        }
    }

    pub fn sample(&self, rng: &mut SimRng) -> f64 {
        match self {
            ServiceDistribution::Exponential { mean } => rng.exponential(*mean),
            ServiceDistribution::LognormalNormalized { alpha } => {
                (alpha * rng.normal() - 0.5 * alpha * alpha).exp()
            }
            ServiceDistribution::Constant { y } => *y,
            ServiceDistribution::Empirical { samples } => {
                let i = ((rng.uniform() * samples.len() as f64) as usize).min(samples.len() - 1);
                samples[i]
            }
        }
    }

    /// `E[e^{−sY}]` when it has a closed form.
    pub fn laplace_exact(&self, s: f64) -> Option<f64> {
        match self {
            ServiceDistribution::Exponential { mean } => Some(1.0 / (1.0 + s * mean)),
            ServiceDistribution::Constant { y } => Some((-s * y).exp()),
            ServiceDistribution::Empirical { samples } => {
                let mut acc = NeumaierSum::new();
                samples.iter().for_each(|&y| acc.add((-s * y).exp()));
                Some(acc.value() / samples.len() as f64)
            }
            ServiceDistribution::LognormalNormalized { .. } => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ServiceDistribution::Exponential { .. } => "exponential",
            ServiceDistribution::LognormalNormalized { .. } => "lognormal_normalized",
            ServiceDistribution::Constant { .. } => "constant",
            ServiceDistribution::Empirical { .. } => "empirical",
        }
    }
}

/// Bounds and constants shared by the solvers and the age-optimal policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelMetrics {
    /// `E[O_Y²] = (σ²/2θ)(1 − E[e^{−2θY}])`
    pub mse_y: f64,
    /// `σ²/2θ`
    pub mse_inf: f64,
    /// `(1/2θ)E[1 − e^{−2θY}]`
    pub gamma: f64,
    /// `E[e^{−2θY}]`
    pub laplace_2theta: f64,
    pub mean_y: f64,
    /// Standard error of `laplace_2theta`; zero for closed forms.
    pub laplace_std_error: f64,
}

impl ModelMetrics {
    fn from_laplace(p: &OuParams, mean_y: f64, laplace: f64, laplace_se: f64) -> Self {
        let mse_inf = p.stationary_variance();
        let one_minus = 1.0 - laplace;
        ModelMetrics {
            mse_y: mse_inf * one_minus,
            mse_inf,
            gamma: one_minus / (2.0 * p.theta()),
            laplace_2theta: laplace,
            mean_y,
            laplace_std_error: laplace_se,
        }
    }

    pub fn mse_y_std_error(&self) -> f64 {
        self.mse_inf * self.laplace_std_error
    }
}

/// Minimum Monte Carlo sample count for distributions without closed forms.
pub const MIN_METRICS_SAMPLES: usize = 10_000;

/// Evaluate the model metrics. Exponential, constant and empirical laws use
/// exact expectations; the log-normal law uses `n_mc` draws from `rng`.
pub fn compute_metrics(
    p: &OuParams,
    d: &ServiceDistribution,
    n_mc: usize,
    rng: &mut SimRng,
) -> Result<ModelMetrics> {
    d.validate()?;
    let s = 2.0 * p.theta();
    if let Some(l) = d.laplace_exact(s) {
        return Ok(ModelMetrics::from_laplace(p, d.mean(), l, 0.0));
    }
    if n_mc < MIN_METRICS_SAMPLES {
        return Err(Error::Input(format!(
            "at least {MIN_METRICS_SAMPLES} Monte Carlo samples required, got {n_mc}"
        )));
    }
    let mut sum = NeumaierSum::new();
    let mut sum_sq = NeumaierSum::new();
    for _ in 0..n_mc {
        let e = (-s * d.sample(rng)).exp();
        sum.add(e);
        sum_sq.add(e * e);
    }
    let n = n_mc as f64;
    let mean = sum.value() / n;
    let var = ((sum_sq.value() / n - mean * mean) * n / (n - 1.0)).max(0.0);
    Ok(ModelMetrics::from_laplace(
        p,
        d.mean(),
        mean,
        (var / n).sqrt(),
    ))
}

/// Mean-squared error of a signal-agnostic policy at age `Δ`: `(σ²/2θ)(1 − e^{−2θΔ})`.
pub fn age_penalty(p: &OuParams, delta: f64) -> f64 {
    p.stationary_variance() * -(-2.0 * p.theta() * delta.max(0.0)).exp_m1()
}

/// `E_Y[p(Δ + Y)] = (σ²/2θ)(1 − e^{−2θΔ}·E[e^{−2θY}])`: the expected error at
/// delivery of a sample taken now at age `Δ`.
pub fn expected_error_after_service(p: &OuParams, delta: f64, m: &ModelMetrics) -> f64 {
    m.mse_inf * (1.0 - (-2.0 * p.theta() * delta.max(0.0)).exp() * m.laplace_2theta)
}

/// Smallest age at which [`expected_error_after_service`] reaches `beta`.
pub fn age_trigger(p: &OuParams, beta: f64, m: &ModelMetrics) -> Result<f64> {
    ensure_finite("beta", beta)?;
    if beta >= m.mse_inf {
        return Err(Error::Domain(format!(
            "beta = {beta} must be below mse_inf = {}",
            m.mse_inf
        )));
    }
    if beta <= m.mse_y || m.laplace_2theta <= 0.0 {
        return Ok(0.0);
    }
    let delta = (m.laplace_2theta * m.mse_inf / (m.mse_inf - beta)).ln() / (2.0 * p.theta());
    Ok(delta.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn testbed() -> (OuParams, ServiceDistribution) {
        (
            OuParams::new(0.5, 1.0, 0.0).unwrap(),
            ServiceDistribution::Exponential { mean: 1.0 },
        )
    }

    #[test]
    fn exponential_testbed_bounds() {
        let (p, d) = testbed();
        let m = compute_metrics(&p, &d, 0, &mut SimRng::new(0)).unwrap();
        assert_eq!(m.mse_y, 0.5);
        assert_eq!(m.mse_inf, 1.0);
        assert_eq!(m.gamma, 0.5);
        assert_eq!(m.laplace_2theta, 0.5);
    }

    #[test]
    fn zero_constant_service_is_the_trivial_limit() {
        let (p, _) = testbed();
        let d = ServiceDistribution::Constant { y: 0.0 };
        let m = compute_metrics(&p, &d, 0, &mut SimRng::new(0)).unwrap();
        assert_eq!(m.mse_y, 0.0);
        assert_eq!(m.gamma, 0.0);
    }

    #[test]
    fn invalid_distributions_rejected() {
        let (p, _) = testbed();
        let mut rng = SimRng::new(0);
        for d in [
            ServiceDistribution::Exponential { mean: 0.0 },
            ServiceDistribution::LognormalNormalized { alpha: -1.0 },
            ServiceDistribution::Empirical { samples: vec![] },
            ServiceDistribution::Empirical {
                samples: vec![1.0, -2.0],
            },
        ] {
            assert!(compute_metrics(&p, &d, 20_000, &mut rng).is_err());
        }
        let ln = ServiceDistribution::LognormalNormalized { alpha: 1.0 };
        assert!(compute_metrics(&p, &ln, 100, &mut rng).is_err());
    }

    #[test]
    fn lognormal_metrics_are_consistent() {
        let (p, _) = testbed();
        let d = ServiceDistribution::LognormalNormalized { alpha: 1.0 };
        let m = compute_metrics(&p, &d, 200_000, &mut SimRng::new(5)).unwrap();
        assert!(m.mse_y > 0.0 && m.mse_y < m.mse_inf);
        assert!(m.gamma < m.mean_y);
        assert!((m.mse_y - m.mse_inf * (1.0 - m.laplace_2theta)).abs() < 1e-15);
        assert!(m.laplace_std_error > 0.0);
    }

    #[test]
    fn age_penalty_values() {
        let (p, _) = testbed();
        assert_eq!(age_penalty(&p, 0.0), 0.0);
        assert!((age_penalty(&p, 1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((age_penalty(&p, 1e3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expected_error_after_service_values() {
        let (p, d) = testbed();
        let m = compute_metrics(&p, &d, 0, &mut SimRng::new(0)).unwrap();
        assert_eq!(expected_error_after_service(&p, 0.0, &m), m.mse_y);
        let got = expected_error_after_service(&p, 1.0, &m);
        assert!((got - (1.0 - 0.5 * (-1.0f64).exp())).abs() < 1e-15);
        assert!((got - 0.8161).abs() < 1e-4);
        assert!((expected_error_after_service(&p, 100.0, &m) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn age_trigger_inverts_the_expected_error() {
        let (p, d) = testbed();
        let m = compute_metrics(&p, &d, 0, &mut SimRng::new(0)).unwrap();
        assert_eq!(age_trigger(&p, m.mse_y, &m).unwrap(), 0.0);
        let delta = age_trigger(&p, 0.8, &m).unwrap();
        assert!((delta - 2.5f64.ln()).abs() < 1e-14);
        assert!((delta - 0.9163).abs() < 1e-4);
        assert!(age_trigger(&p, 1.0, &m).is_err());
    }
}
