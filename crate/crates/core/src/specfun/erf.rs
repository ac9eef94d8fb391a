//! Error function family on the real line.
//!
//! `erf` uses the positive-term series `e^{-x²} Σ (2x²)^n x / (2n+1)!!` on
//! `|x| < 3` and a continued fraction for `erfc` beyond. `erfi` uses its
//! Maclaurin series (all terms positive) up to `|x| = 10` and the Dawson
//! asymptotic expansion past that.

use crate::error::{Error, Result};

pub(crate) const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const SERIES_CUTOFF: f64 = 3.0;
const ERFI_SERIES_CUTOFF: f64 = 10.0;

/// `e^{x²}·erf(x)·√π/2 / x`, summed as `Σ (2x²)^n / (2n+1)!!` minus the
/// leading `1` when `minus_one` is set.
pub(crate) fn scaled_erf_series(x: f64, minus_one: bool) -> f64 {
    let x2 = 2.0 * x * x;
    let mut term = 1.0;
    let mut sum = if minus_one { 0.0 } else { 1.0 };
    let mut n = 0.0;
    loop {
        term *= x2 / (2.0 * n + 3.0);
        sum += term;
        n += 1.0;
        if term <= sum * 1e-17 || n > 2000.0 {
            break;
        }
    }
    sum
}

/// `erfc(x)` for `x >= 2`, modified Lentz on `1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`.
fn erfc_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..500 {
        let a = n as f64 / 2.0;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (f * std::f64::consts::PI.sqrt())
}

pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let r = if ax < SERIES_CUTOFF {
        TWO_OVER_SQRT_PI * ax * (-ax * ax).exp() * scaled_erf_series(ax, false)
    } else if ax < 6.5 {
        1.0 - erfc_cf(ax)
    } else {
        1.0
    };
    r.copysign(x)
}

pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < SERIES_CUTOFF {
        1.0 - erf(x)
    } else if x < 27.3 {
        erfc_cf(x)
    } else {
        0.0
    }
}

/// Imaginary error function `(2/√π)∫₀ˣ e^{t²} dt`.
pub fn erfi(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Input(format!(
            "erfi argument must be finite, got {x}"
        )));
    }
    let ax = x.abs();
    let r = if ax <= ERFI_SERIES_CUTOFF {
        // Σ x^{2n+1} / (n! (2n+1))
        let x2 = ax * ax;
        let mut a = ax;
        let mut sum = ax;
        let mut n = 0.0;
        loop {
            a *= x2 / (n + 1.0);
            let t = a / (2.0 * n + 3.0);
            sum += t;
            n += 1.0;
            if t <= sum * 1e-17 {
                break;
            }
        }
        TWO_OVER_SQRT_PI * sum
    } else {
        let growth = (ax * ax).exp();
        if !growth.is_finite() {
            return Err(Error::Range(format!("erfi({x}) overflows")));
        }
        TWO_OVER_SQRT_PI * growth * dawson_asymptotic(ax)
    };
    if !r.is_finite() {
        return Err(Error::Range(format!("erfi({x}) overflows")));
    }
    Ok(r.copysign(x))
}

/// Dawson's integral for large `x`: `(1/2x) Σ (2k-1)!! / (2x²)^k`.
fn dawson_asymptotic(x: f64) -> f64 {
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        let next = term * (2.0 * k - 1.0) * inv;
        if next >= term || next < sum * 1e-17 {
            break;
        }
        term = next;
        sum += term;
        k += 1.0;
    }
    sum / (2.0 * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_reference_points() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!((erf(0.5) - 0.520_499_877_813_046_5).abs() < 1e-15);
        assert!((erf(2.0) - 0.995_322_265_018_952_7).abs() < 1e-15);
        assert!((erfc(3.0) - 2.209_049_699_858_544e-5).abs() < 1e-19);
        assert!((erfc(5.0) - 1.537_459_794_428_034_8e-12).abs() < 1e-25);
        assert_eq!(erf(10.0), 1.0);
    }

    #[test]
    fn erf_continuous_at_branch_switch() {
        let below = erf(SERIES_CUTOFF - 1e-12);
        let above = erf(SERIES_CUTOFF + 1e-12);
        assert!((below - above).abs() < 1e-15);
    }

    #[test]
    fn erfi_reference_points() {
        assert_eq!(erfi(0.0).unwrap(), 0.0);
        assert!((erfi(1.0).unwrap() - 1.650_425_758_797_542_9).abs() < 1e-14);
        assert!((erfi(-1.0).unwrap() + 1.650_425_758_797_542_9).abs() < 1e-14);
        assert!((erfi(6.0).unwrap() / 411_275_145_582_823.9 - 1.0).abs() < 1e-13);
        assert!((erfi(10.0).unwrap() / 1.524_307_422_708_669_7e42 - 1.0).abs() < 1e-13);
        assert!((erfi(10.5).unwrap() / 4.103_881_683_437_385_3e46 - 1.0).abs() < 1e-13);
        assert!((erfi(12.0).unwrap() / 1.629_935_799_524_349_4e61 - 1.0).abs() < 1e-13);
        assert!(matches!(erfi(30.0), Err(Error::Range(_))));
    }
}
