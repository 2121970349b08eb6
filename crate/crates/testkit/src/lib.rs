//! Reference computations for the test suites.
//!
//! Nothing here shares code with `af-relay`: the Bessel values come from
//! trapezoidal sums of integral representations, integrals from composite
//! Simpson rules, and random draws from ChaCha20.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Trapezoid sum of `f` over `[0, inf)` with step `h`, stopping once the
/// terms are negligible and `t` is past `t_min`.
fn half_line_trapezoid<F: Fn(f64) -> f64>(f: F, h: f64, t_min: f64) -> f64 {
    let mut sum = 0.5 * f(0.0);
    let mut k = 1u64;
    loop {
        let t = k as f64 * h;
        let term = f(t);
        sum += term;
        if t > t_min && term.abs() < 1e-20 * sum.abs() {
            break;
        }
        k += 1;
    }
    h * sum
}

/// `e^x K_nu(x)` from `int_0^inf exp(-x (cosh t - 1)) cosh(nu t) dt`.
pub fn scaled_bessel_k(nu: f64, x: f64) -> f64 {
    assert!(x > 0.0);
    let h = 0.01;
    half_line_trapezoid(
        |t| {
            let s = (0.5 * t).sinh();
            (-2.0 * x * s * s).exp() * (nu * t).cosh()
        },
        h,
        1.0,
    )
}

pub fn bessel_k(nu: f64, x: f64) -> f64 {
    scaled_bessel_k(nu, x) * (-x).exp()
}

/// `1 - e^{-y}(1 + y)`.
pub fn gamma2_cdf(y: f64) -> f64 {
    if y < 0.5 {
        // sum_{n>=2} (-1)^n (n - 1) y^n / n!
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 1..80 {
            term *= -y / n as f64;
            if n >= 2 {
                sum += (n - 1) as f64 * term;
            }
        }
        sum
    } else {
        1.0 - (-y).exp() * (1.0 + y)
    }
}

/// `1 - x K1(x) = int_0^x s K0(s) ds
///              = int_0^inf (1 - e^{-x c}(1 + x c)) / c^2 dt`, `c = cosh t`.
pub fn x_k1_complement(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    half_line_trapezoid(
        |t| {
            let c = t.cosh();
            gamma2_cdf(x * c) / (c * c)
        },
        0.01,
        1.0,
    )
}

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n % 2 == 0 && n > 0);
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let x = a + i as f64 * h;
        if i % 2 == 1 {
            odd += f(x);
        } else {
            even += f(x);
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}

pub fn exp_pdf(x: f64, mean: f64) -> f64 {
    (-x / mean).exp() / mean
}

pub fn exp_cdf(x: f64, mean: f64) -> f64 {
    1.0 - (-x / mean).exp()
}

/// Cdf of `u + v` by numerically convolving density and cdf:
/// `int_0^s f_u(x) F_v(s - x) dx`.
pub fn convolved_sum_cdf(s: f64, mean_u: f64, mean_v: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    simpson(
        |x| exp_pdf(x, mean_u) * exp_cdf(s - x, mean_v),
        0.0,
        s,
        4000,
    )
}

/// Seeded ChaCha20 sampler of exponential variates.
pub struct ExpSampler(ChaCha20Rng);

impl ExpSampler {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha20Rng::seed_from_u64(seed))
    }

    pub fn exp(&mut self, mean: f64) -> f64 {
        let u: f64 = self.0.gen();
        -mean * (1.0 - u).ln()
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.0.gen_range(lo..hi)
    }
}

/// Empirical cdf of `samples` (sorted in place) at each grid point,
/// counting values strictly below the point.
pub fn empirical_cdf(samples: &mut [f64], grid: &[f64]) -> Vec<f64> {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    grid.iter()
        .map(|&g| samples.partition_point(|&s| s < g) as f64 / n)
        .collect()
}

/// Binomial acceptance band: `k` standard errors of a proportion `p` plus a
/// half-count continuity term.
pub fn binomial_tolerance(p: f64, n: u64, k: f64) -> f64 {
    k * (p * (1.0 - p) / n as f64).sqrt() + 0.5 / n as f64
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_matches_tables() {
        // Abramowitz & Stegun table 9.8 / mpmath
        let cases = [
            (0, 1.0, 0.421_024_438_240_708_34),
            (1, 1.0, 0.601_907_230_197_234_6),
            (0, 2.0, 0.113_893_872_749_533_44),
            (1, 2.0, 0.139_865_881_816_522_43),
            (0, 5.0, 3.691_098_334_042_594e-3),
            (1, 0.1, 9.853_844_780_870_606),
        ];
        for (nu, x, want) in cases {
            let got = bessel_k(nu as f64, x);
            assert!(((got - want) / want).abs() < 1e-14, "K{nu}({x}) = {got}");
        }
    }

    #[test]
    fn complement_oracle() {
        let got = x_k1_complement(1.0);
        assert!((got - (1.0 - 0.601_907_230_197_234_6)).abs() < 1e-14);
        let got = x_k1_complement(1e-6);
        assert!(((got - 7.215_721_036_812_292e-12) / got).abs() < 1e-12);
    }

    #[test]
    fn simpson_and_convolution() {
        assert!((simpson(|x| x * x * x, 0.0, 2.0, 2) - 4.0).abs() < 1e-14);
        let got = convolved_sum_cdf(1.0, 1.0, 2.0);
        assert!((got - 0.154_818_121_746_175_5).abs() < 1e-12);
    }
}
