//! Closed-form laws for exponential random variables: a single variate, the
//! sum and minimum of two independent variates, and their product.

use crate::error::{nonneg, positive, Error, Result};
use crate::special;

/// Relative separation below which two means are treated as equal.
pub const EQUAL_MEAN_REL_TOL: f64 = 1e-6;

/// Mean of an exponential random variable.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExpMean(f64);

impl ExpMean {
    pub fn new(mean: f64) -> Result<Self> {
        positive("mean", mean)?;
        Ok(Self(mean))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn rate(self) -> f64 {
        1.0 / self.0
    }
}

impl TryFrom<f64> for ExpMean {
    type Error = Error;

    fn try_from(mean: f64) -> Result<Self> {
        Self::new(mean)
    }
}

/// `1 - e^{-x}` without cancellation for small `x`.
#[inline]
pub fn one_minus_exp_neg(x: f64) -> f64 {
    -(-x).exp_m1()
}

/// `1 - e^{-x}(1 + x)`, the Gamma(2, 1) cdf.
pub(crate) fn gamma2_cdf(x: f64) -> f64 {
    if x < 0.1 {
        // x^2/2 - x^3/3 + x^4/8 - ... = sum_{n>=2} (-1)^n (n-1) x^n / n!
        let mut term = x * x / 2.0; // (-1)^n x^n / n!
        let mut sum = 0.0f64;
        for n in 2..60 {
            let add = term * (n - 1) as f64;
            sum += add;
            if add.abs() <= 1e-18 * sum.abs() {
                break;
            }
            term *= -x / (n + 1) as f64;
        }
        sum
    } else {
        one_minus_exp_neg(x) - x * (-x).exp()
    }
}

pub(crate) fn means_coincide(a: f64, b: f64) -> bool {
    (a - b).abs() / a.max(b) < EQUAL_MEAN_REL_TOL
}

pub fn exp_pdf(u: f64, m: ExpMean) -> Result<f64> {
    nonneg("u", u)?;
    Ok(m.rate() * (-u * m.rate()).exp())
}

pub fn exp_cdf(u: f64, m: ExpMean) -> Result<f64> {
    nonneg("u", u)?;
    Ok(one_minus_exp_neg(u * m.rate()))
}

/// Cdf of `u + v` for independent exponentials with means `mu` and `mv`.
///
/// Switches to the Gamma(2) form when the means agree to
/// [`EQUAL_MEAN_REL_TOL`], where the difference form loses its digits.
pub fn sum2_exp_cdf(s: f64, mu: ExpMean, mv: ExpMean) -> Result<f64> {
    nonneg("s", s)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let (a, b) = (mu.get(), mv.get());
    let value = if means_coincide(a, b) {
        gamma2_cdf(s / (0.5 * (a + b)))
    } else {
        (b * one_minus_exp_neg(s / b) - a * one_minus_exp_neg(s / a)) / (b - a)
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Mean of `min(u, v)`: `1/m = 1/mu + 1/mv`.
pub fn min2_exp_mean(mu: ExpMean, mv: ExpMean) -> ExpMean {
    ExpMean(1.0 / (mu.rate() + mv.rate()))
}

pub fn min2_exp_cdf(m: f64, mu: ExpMean, mv: ExpMean) -> Result<f64> {
    nonneg("m", m)?;
    Ok(one_minus_exp_neg(m * (mu.rate() + mv.rate())))
}

/// Density of `u v`: `(2 / (mu mv)) K0(2 sqrt(p / (mu mv)))`, the derivative
/// of [`prod_exp_cdf`]. Diverges logarithmically at the origin, so `p = 0`
/// is rejected.
pub fn prod_exp_pdf(p: f64, mu: ExpMean, mv: ExpMean) -> Result<f64> {
    positive("p", p)?;
    let scale = mu.get() * mv.get();
    Ok(2.0 * special::bessel_k0(2.0 * (p / scale).sqrt())? / scale)
}

/// Cdf of `u v`: `1 - t K1(t)` with `t = 2 sqrt(y / (mu mv))`.
pub fn prod_exp_cdf(y: f64, mu: ExpMean, mv: ExpMean) -> Result<f64> {
    nonneg("y", y)?;
    special::x_k1_complement(2.0 * (y / (mu.get() * mv.get())).sqrt())
}
