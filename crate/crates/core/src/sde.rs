//! Exact transitions of the Ornstein-Uhlenbeck signal and of its centered
//! error process, plus threshold hitting on a discretized path.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::rng::SimRng;

/// Parameters of `dX = θ(μ − X)dt + σ dW`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOuParams")]
pub struct OuParams {
    theta: f64,
    sigma: f64,
    mu: f64,
}

#[derive(Deserialize)]
struct RawOuParams {
    theta: f64,
    sigma: f64,
    #[serde(default)]
    mu: f64,
}

impl TryFrom<RawOuParams> for OuParams {
    type Error = Error;
    fn try_from(r: RawOuParams) -> Result<Self> {
        OuParams::new(r.theta, r.sigma, r.mu)
    }
}

impl OuParams {
    pub fn new(theta: f64, sigma: f64, mu: f64) -> Result<Self> {
        ensure_finite("theta", theta)?;
        ensure_finite("sigma", sigma)?;
        ensure_finite("mu", mu)?;
        if theta <= 0.0 {
            return Err(Error::Input(format!("theta must be > 0, got {theta}")));
        }
        if sigma <= 0.0 {
            return Err(Error::Input(format!("sigma must be > 0, got {sigma}")));
        }
        Ok(OuParams { theta, sigma, mu })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Stationary variance `σ²/2θ`.
    pub fn stationary_variance(&self) -> f64 {
        self.sigma * self.sigma / (2.0 * self.theta)
    }

    /// The centered error process started at zero.
    pub fn error_process(&self) -> ErrorProcessParams {
        ErrorProcessParams {
            theta: self.theta,
            sigma: self.sigma,
        }
    }

    /// Conditional mean of `X_{t+dt}` given `X_t = x`.
    #[inline]
    pub fn conditional_mean(&self, x: f64, dt: f64) -> f64 {
        let decay = (-self.theta * dt).exp();
        x * decay + self.mu * (1.0 - decay)
    }

    /// Conditional variance of `X_{t+dt}` given `X_t`.
    #[inline]
    pub fn conditional_variance(&self, dt: f64) -> f64 {
        self.stationary_variance() * -(-2.0 * self.theta * dt).exp_m1()
    }
}

/// The error process `O_t`: same `θ`, `σ` as the signal, `μ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorProcessParams {
    theta: f64,
    sigma: f64,
}

impl ErrorProcessParams {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn as_signal(&self) -> OuParams {
        OuParams {
            theta: self.theta,
            sigma: self.sigma,
            mu: 0.0,
        }
    }

    /// Variance of `O_y` when `O_0 = 0`.
    pub fn variance_at(&self, y: f64) -> f64 {
        self.as_signal().conditional_variance(y)
    }
}

/// Exact draw of `X_{t+dt}` given `X_t = x` and a standard normal `z`.
pub fn transition_exact(p: &OuParams, x: f64, dt: f64, z: f64) -> Result<f64> {
    ensure_finite("x", x)?;
    ensure_finite("dt", dt)?;
    ensure_finite("z", z)?;
    if dt < 0.0 {
        return Err(Error::Input(format!("dt must be >= 0, got {dt}")));
    }
    Ok(p.conditional_mean(x, dt) + p.conditional_variance(dt).sqrt() * z)
}

/// `O_y` for a standard normal draw `z`.
pub fn sample_error_at(p: &ErrorProcessParams, y: f64, z: f64) -> Result<f64> {
    ensure_finite("y", y)?;
    if y < 0.0 {
        return Err(Error::Input(format!("y must be >= 0, got {y}")));
    }
    Ok(p.variance_at(y).sqrt() * z)
}

/// Grid and cap used when searching for a threshold crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HitConfig {
    pub dt: f64,
    pub max_time: f64,
}

impl HitConfig {
    /// `dt = 1e-3/θ`, cap `1e4/θ`.
    pub fn for_theta(theta: f64) -> Self {
        HitConfig {
            dt: default_dt(theta),
            max_time: 1e4 / theta,
        }
    }
}

pub fn default_dt(theta: f64) -> f64 {
    1e-3 / theta
}

/// Result of a hitting search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    /// Elapsed time until the first grid point with `|O| >= v`.
    pub time: f64,
    /// Grid value at that point; may overshoot the threshold.
    pub value: f64,
}

impl Hit {
    /// Value with the grid overshoot removed: `sign(value)·v` when the path
    /// crossed from inside, the raw value when it started outside.
    pub fn clamped(&self, threshold: f64) -> f64 {
        if self.time > 0.0 {
            threshold.copysign(self.value)
        } else {
            self.value
        }
    }
}

/// Exact-transition stepper for a zero-mean OU path on a fixed grid.
#[derive(Debug, Clone)]
pub struct OuGrid {
    decay: f64,
    step_sd: f64,
    dt: f64,
}

impl OuGrid {
    pub fn new(p: &ErrorProcessParams, dt: f64) -> Result<Self> {
        ensure_finite("dt", dt)?;
        if dt <= 0.0 {
            return Err(Error::Input(format!("dt must be > 0, got {dt}")));
        }
        Ok(OuGrid {
            decay: (-p.theta * dt).exp(),
            step_sd: p.variance_at(dt).sqrt(),
            dt,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn step_sd(&self) -> f64 {
        self.step_sd
    }

    #[inline]
    pub fn step(&self, o: f64, rng: &mut SimRng) -> f64 {
        o * self.decay + self.step_sd * rng.normal()
    }
}

/// Scan a path of `(time, value)` grid points for the first `|value| >= v`.
///
/// The scan starts at `(start_time, start_value)`; `None` from `path` before a
/// crossing means the path ended (for example at a simulation horizon).
/// Crossings later than `start_time + max_wait` raise [`Error::Timeout`].
pub fn first_crossing<I>(
    start_time: f64,
    start_value: f64,
    v: f64,
    max_wait: f64,
    path: I,
) -> Result<Option<(f64, f64)>>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    if start_value.abs() >= v {
        return Ok(Some((start_time, start_value)));
    }
    for (t, o) in path {
        if o.abs() >= v {
            return Ok(Some((t, o)));
        }
        if t - start_time > max_wait {
            return Err(Error::Timeout {
                elapsed: t - start_time,
            });
        }
    }
    Ok(None)
}

/// First grid time at which the error process started at `start` reaches `|O| >= v`.
pub fn first_hit(
    p: &ErrorProcessParams,
    start: f64,
    threshold: f64,
    cfg: &HitConfig,
    rng: &mut SimRng,
) -> Result<Hit> {
    ensure_finite("start", start)?;
    ensure_finite("threshold", threshold)?;
    if threshold < 0.0 {
        return Err(Error::Input(format!(
            "threshold must be >= 0, got {threshold}"
        )));
    }
    let grid = OuGrid::new(p, cfg.dt)?;
    let mut o = start;
    let mut k: u64 = 0;
    let path = std::iter::from_fn(|| {
        k += 1;
        o = grid.step(o, rng);
        Some((k as f64 * grid.dt, o))
    });
    match first_crossing(0.0, start, threshold, cfg.max_time, path)? {
        Some((time, value)) => Ok(Hit { time, value }),
        None => unreachable!("grid path is infinite"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> OuParams {
        OuParams::new(0.5, 1.0, 0.0).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(OuParams::new(0.0, 1.0, 0.0).is_err());
        assert!(OuParams::new(1.0, -1.0, 0.0).is_err());
        assert!(OuParams::new(f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn zero_time_transition_is_identity() {
        assert_eq!(transition_exact(&p(), 3.0, 0.0, 1.7).unwrap(), 3.0);
    }

    #[test]
    fn at_mean_without_noise_stays() {
        let q = OuParams::new(0.5, 1.0, 2.0).unwrap();
        let x = transition_exact(&q, 2.0, 1.0, 0.0).unwrap();
        assert!((x - 2.0).abs() < 1e-15);
    }

    #[test]
    fn transition_rejects_negative_dt() {
        assert!(transition_exact(&p(), 0.0, -1.0, 0.0).is_err());
        assert!(transition_exact(&p(), f64::INFINITY, 1.0, 0.0).is_err());
    }

    #[test]
    fn error_sample_values() {
        let e = p().error_process();
        assert_eq!(sample_error_at(&e, 0.0, 2.5).unwrap(), 0.0);
        let got = sample_error_at(&e, 1.0, 1.0).unwrap();
        assert!((got - (1.0 - (-1.0f64).exp()).sqrt()).abs() < 1e-15);
        assert!((got - 0.7951).abs() < 1e-4);
        assert!(sample_error_at(&e, -0.1, 0.0).is_err());
    }

    #[test]
    fn chaining_matches_single_step_moments() {
        let q = OuParams::new(0.7, 1.3, -0.4).unwrap();
        for &(d1, d2) in &[(0.1, 0.3), (1.0, 2.5), (0.0, 4.0)] {
            let x0 = 1.9;
            // Mean and variance of two chained Gaussian steps.
            let m1 = q.conditional_mean(x0, d1);
            let m12 = q.conditional_mean(m1, d2);
            let decay2 = (-q.theta() * d2).exp();
            let v12 = q.conditional_variance(d1) * decay2 * decay2 + q.conditional_variance(d2);
            assert!((m12 - q.conditional_mean(x0, d1 + d2)).abs() < 1e-12);
            assert!((v12 - q.conditional_variance(d1 + d2)).abs() < 1e-12);
        }
    }

    #[test]
    fn hit_outside_region_is_immediate() {
        let e = p().error_process();
        let cfg = HitConfig::for_theta(0.5);
        let mut rng = SimRng::new(1);
        let h = first_hit(&e, 2.0, 1.0, &cfg, &mut rng).unwrap();
        assert_eq!((h.time, h.value), (0.0, 2.0));
        assert_eq!(h.clamped(1.0), 2.0);
        let h0 = first_hit(&e, 0.3, 0.0, &cfg, &mut rng).unwrap();
        assert_eq!((h0.time, h0.value), (0.0, 0.3));
    }

    #[test]
    fn hit_clamps_overshoot() {
        let e = p().error_process();
        let cfg = HitConfig {
            dt: 0.05,
            max_time: 1e4,
        };
        let mut rng = SimRng::new(3);
        let h = first_hit(&e, 0.0, 0.5, &cfg, &mut rng).unwrap();
        assert!(h.time > 0.0);
        assert!(h.value.abs() >= 0.5);
        assert_eq!(h.clamped(0.5).abs(), 0.5);
        assert_eq!(h.clamped(0.5).signum(), h.value.signum());
    }

    #[test]
    fn hit_times_out_far_beyond_stationary_spread() {
        let e = p().error_process();
        let cfg = HitConfig {
            dt: 0.01,
            max_time: 5.0,
        };
        let mut rng = SimRng::new(9);
        match first_hit(&e, 0.0, 50.0, &cfg, &mut rng) {
            Err(Error::Timeout { elapsed }) => assert!(elapsed > 5.0),
            other => panic!("expected timeout, got {other:?}"),
        }
    }
}
