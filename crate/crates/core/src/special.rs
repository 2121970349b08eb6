//! Modified Bessel functions of the second kind, orders 0 and 1.
//!
//! Below the crossover argument both functions are summed from their
//! ascending series (the `ln(x/2)` form built on `I0`/`I1`). Above it the
//! exponentially scaled values `e^x K0(x)` and `e^x K1(x)` come from Steed's
//! continued fraction, which converges in a handful of terms once `x >= 2`
//! and stays accurate to a few ulps. Past `underflow_argument` the functions
//! are flushed to zero.
//!
//! [`x_k1_complement`] computes `1 - x K1(x)`, the cdf of a product of two
//! exponentials, without cancellation near the origin.

use crate::error::{check_domain, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_EPS: f64 = 1e-17;
const MAX_TERMS: usize = 500;

/// Tuning knobs for K0/K1 evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEvalPolicy {
    pub target_rel_err: f64,
    pub series_to_asymptotic_crossover: f64,
    pub underflow_argument: f64,
    /// Below this argument `1 - x K1(x)` is summed from its own series.
    pub complement_series_cutoff: f64,
}

impl BesselEvalPolicy {
    pub const DEFAULT: BesselEvalPolicy = BesselEvalPolicy {
        target_rel_err: 1e-14,
        series_to_asymptotic_crossover: 2.0,
        underflow_argument: 700.0,
        complement_series_cutoff: 1e-2,
    };

    pub fn new(
        target_rel_err: f64,
        series_to_asymptotic_crossover: f64,
        underflow_argument: f64,
    ) -> Result<Self> {
        check_domain(
            "target_rel_err",
            target_rel_err,
            "in (0, 1e-10]",
            target_rel_err > 0.0 && target_rel_err <= 1e-10,
        )?;
        check_domain(
            "series_to_asymptotic_crossover",
            series_to_asymptotic_crossover,
            "in [1, 3]: the continued fraction stalls below 1 and the series cancels above 3",
            (1.0..=3.0).contains(&series_to_asymptotic_crossover),
        )?;
        check_domain(
            "underflow_argument",
            underflow_argument,
            "> crossover",
            underflow_argument > series_to_asymptotic_crossover,
        )?;
        Ok(Self {
            target_rel_err,
            series_to_asymptotic_crossover,
            underflow_argument,
            ..Self::DEFAULT
        })
    }

    pub fn k0(&self, x: f64) -> Result<f64> {
        check_arg(x)?;
        if x >= self.underflow_argument {
            return Ok(0.0);
        }
        if x < self.series_to_asymptotic_crossover {
            Ok(self.series(x).0)
        } else {
            Ok(self.continued_fraction(x).0 * (-x).exp())
        }
    }

    pub fn k1(&self, x: f64) -> Result<f64> {
        check_arg(x)?;
        if x >= self.underflow_argument {
            return Ok(0.0);
        }
        if x < self.series_to_asymptotic_crossover {
            Ok(self.series(x).1)
        } else {
            Ok(self.continued_fraction(x).1 * (-x).exp())
        }
    }

    /// `1 - x K1(x)` for `x >= 0`.
    pub fn x_k1_complement(&self, x: f64) -> Result<f64> {
        check_domain("x", x, "finite and >= 0", x.is_finite() && x >= 0.0)?;
        if x == 0.0 {
            return Ok(0.0);
        }
        if x >= self.underflow_argument {
            return Ok(1.0);
        }
        let value = if x < self.complement_series_cutoff {
            self.complement_series(x)
        } else {
            1.0 - x * self.k1(x)?
        };
        Ok(value.clamp(0.0, 1.0))
    }

    /// Ascending series for (K0, K1).
    ///
    /// With `y = x^2/4`, `L = ln(x/2) + gamma` and harmonic numbers `H_k`:
    ///   K0 = -L I0 + sum_{k>=1} H_k y^k / (k!)^2
    ///   K1 = 1/x + (x/2) sum_k [L - (H_k + H_{k+1})/2] y^k / (k! (k+1)!)
    fn series(&self, x: f64) -> (f64, f64) {
        let y = 0.25 * x * x;
        let log_term = (0.5 * x).ln() + EULER_GAMMA;
        let tol = self.target_rel_err.min(SERIES_EPS);

        // k = 0 terms
        let mut t0 = 1.0; // y^k / (k!)^2
        let mut t1 = 1.0; // y^k / (k! (k+1)!)
        let mut h_k = 0.0;
        let mut h_k1 = 1.0;
        let mut i0 = 1.0;
        let mut k0_tail = 0.0;
        let mut k1_sum = log_term - 0.5 * (h_k + h_k1);

        for k in 1..MAX_TERMS {
            let kf = k as f64;
            t0 *= y / (kf * kf);
            t1 *= y / (kf * (kf + 1.0));
            h_k = h_k1;
            h_k1 += 1.0 / (kf + 1.0);
            i0 += t0;
            k0_tail += h_k * t0;
            let d1 = (log_term - 0.5 * (h_k + h_k1)) * t1;
            k1_sum += d1;
            if t0 * h_k1 < tol * i0.abs() && d1.abs() < tol * k1_sum.abs() {
                break;
            }
        }
        let k0 = -log_term * i0 + k0_tail;
        let k1 = 1.0 / x + 0.5 * x * k1_sum;
        (k0, k1)
    }

    /// Steed's continued fraction for the scaled pair (e^x K0, e^x K1).
    fn continued_fraction(&self, x: f64) -> (f64, f64) {
        let tol = self.target_rel_err.min(SERIES_EPS);
        let a1 = 0.25;
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..MAX_TERMS {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < tol {
                break;
            }
        }
        h *= a1;
        let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
        let k1 = k0 * (x + 0.5 - h) / x;
        (k0, k1)
    }

    /// 1 - x K1(x) = -(x^2/2) sum_k [L - (H_k + H_{k+1})/2] y^k / (k! (k+1)!)
    fn complement_series(&self, x: f64) -> f64 {
        let y = 0.25 * x * x;
        let log_term = (0.5 * x).ln() + EULER_GAMMA;
        let mut t = 1.0;
        let mut h_k1 = 1.0;
        let mut sum = log_term - 0.5;
        for k in 1..MAX_TERMS {
            let kf = k as f64;
            t *= y / (kf * (kf + 1.0));
            let h_k = h_k1;
            h_k1 += 1.0 / (kf + 1.0);
            let d = (log_term - 0.5 * (h_k + h_k1)) * t;
            sum += d;
            if d.abs() < SERIES_EPS * sum.abs() {
                break;
            }
        }
        -0.5 * x * x * sum
    }
}

impl Default for BesselEvalPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}

fn check_arg(x: f64) -> Result<()> {
    check_domain("x", x, "finite and > 0", x.is_finite() && x > 0.0)
}

/// K0(x) under the default policy.
pub fn bessel_k0(x: f64) -> Result<f64> {
    BesselEvalPolicy::DEFAULT.k0(x)
}

/// K1(x) under the default policy.
pub fn bessel_k1(x: f64) -> Result<f64> {
    BesselEvalPolicy::DEFAULT.k1(x)
}

/// `1 - x K1(x)` under the default policy. Lies in `[0, 1]`.
pub fn x_k1_complement(x: f64) -> Result<f64> {
    BesselEvalPolicy::DEFAULT.x_k1_complement(x)
}
