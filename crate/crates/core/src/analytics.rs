//! Closed-form cdfs of the end-to-end gain bounds and the resulting outage
//! probabilities for the single-relay network.
//!
//! * `min2`: `|h_sd|^2 + min(u, v)`; exact law, a sum of two exponentials.
//! * `min3`: `|h_sd|^2 + min(u, v, u v SNR)`; the relay-branch cdf treats the
//!   three survival events as independent and the direct-path convolution is
//!   integrated numerically.
//! * `cutset`: product of the survivals of `|h_sd|^2 + |h_sr|^2` and
//!   `|h_sd|^2 + |h_rd|^2`.
//!
//! The `min3` relay-branch cdf is `1 - e^{-mu/M_r} t K1(t)`. Writing
//! `t K1(t) = 1 - c(t)` splits it into the `min2` cdf plus a nonnegative
//! correction `e^{-mu/M_r} c(t)`, and likewise splits the convolution with
//! the direct path into the `min2` end-to-end cdf plus
//! `(1/mu_sd) int_0^mu exp(-(mu - y)/mu_sd - y/M_r) c(t(y)) dy`. Both
//! pieces are free of cancellation.

use log::warn;

use crate::channel::{gain_threshold, LinkMeans, SystemParams};
use crate::distributions::{min2_exp_cdf, one_minus_exp_neg, sum2_exp_cdf, ExpMean};
use crate::error::{nonneg, positive, Result};
use crate::quadrature::{integrate_adaptive, QuadratureSpec};
use crate::special;

/// Clamps beyond this are reported through `log::warn!`.
const CLAMP_WARN: f64 = 1e-9;

/// Means, SNR and gain threshold fed to the outage evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageQuery {
    pub means: LinkMeans,
    pub snr: f64,
    pub mu_th: f64,
}

impl OutageQuery {
    pub fn new(means: LinkMeans, snr: f64, mu_th: f64) -> Result<Self> {
        means.validate()?;
        positive("snr", snr)?;
        nonneg("mu_th", mu_th)?;
        Ok(Self { means, snr, mu_th })
    }

    /// Maps a rate threshold to its gain threshold.
    pub fn from_params(means: LinkMeans, sp: &SystemParams) -> Result<Self> {
        Self::new(means, sp.snr, gain_threshold(sp))
    }
}

fn clamp_probability(value: f64, context: &str) -> f64 {
    // `+ 0.0` turns a negative zero into zero.
    let clamped = value.clamp(0.0, 1.0) + 0.0;
    if (clamped - value).abs() > CLAMP_WARN {
        warn!("{context}: clamped {value} to [0, 1]");
    }
    clamped
}

fn mean(x: f64) -> ExpMean {
    ExpMean::new(x).expect("validated mean")
}

/// Argument of the Bessel factor: `2 sqrt((y / SNR) / (mu_sr mu_rd))`.
fn bessel_arg(y: f64, means: &LinkMeans, snr: f64) -> f64 {
    2.0 * (y / (snr * means.mu_sr * means.mu_rd)).sqrt()
}

fn complement(t: f64) -> f64 {
    special::x_k1_complement(t).expect("bessel argument is finite and >= 0")
}

/// Cdf of `min(|h_sr|^2, |h_rd|^2)`, exponential with mean `M_r`.
pub fn cdf_relay_min2(mu: f64, means: &LinkMeans) -> Result<f64> {
    nonneg("mu", mu)?;
    min2_exp_cdf(mu, mean(means.mu_sr), mean(means.mu_rd))
}

/// Cdf of `|h_sd|^2 + min(|h_sr|^2, |h_rd|^2)`.
pub fn cdf_af_min2(mu: f64, means: &LinkMeans) -> Result<f64> {
    nonneg("mu", mu)?;
    sum2_exp_cdf(mu, mean(means.mu_sd), mean(means.min_hop_mean()))
}

pub fn outage_min2(q: &OutageQuery) -> Result<f64> {
    cdf_af_min2(q.mu_th, &q.means)
}

/// Relay-branch cdf of the `min(u, v, u v SNR)` bound.
pub fn cdf_relay_min3(mu: f64, means: &LinkMeans, snr: f64) -> Result<f64> {
    nonneg("mu", mu)?;
    positive("snr", snr)?;
    let survival_min2 = (-mu / means.min_hop_mean()).exp();
    let t = bessel_arg(mu, means, snr);
    let value = if survival_min2 > 0.5 {
        // small mu: sum of two nonnegative pieces, no cancellation
        one_minus_exp_neg(mu / means.min_hop_mean()) + survival_min2 * complement(t)
    } else {
        // saturating: 1 - S t K1(t) rounds monotonically in mu
        let t_k1 = if t < 1.0 {
            1.0 - complement(t)
        } else {
            t * special::bessel_k1(t).expect("t >= 1")
        };
        1.0 - survival_min2 * t_k1
    };
    Ok(clamp_probability(value, "cdf_relay_min3"))
}

/// `int_0^mu weight(y) c(t(y)) dy`, with `y = w^2` on the leading piece
/// where `c` has an unbounded derivative.
fn integrate_complement<W>(
    mu: f64,
    means: &LinkMeans,
    snr: f64,
    quad: &QuadratureSpec,
    weight: W,
) -> Result<f64>
where
    W: Fn(f64) -> f64,
{
    if mu == 0.0 {
        return Ok(0.0);
    }
    let integrand = |y: f64| weight(y) * complement(bessel_arg(y, means, snr));
    let split = mu.min(0.01 * means.min_hop_mean() * snr * means.mu_sr * means.mu_rd);
    let head = integrate_adaptive(|w: f64| 2.0 * w * integrand(w * w), 0.0, split.sqrt(), quad)?;
    let tail = integrate_adaptive(integrand, split, mu, quad)?;
    Ok(head.value + tail.value)
}

/// Cdf of `|h_sd|^2` convolved with the `min3` relay-branch cdf.
pub fn cdf_af_min3(mu: f64, means: &LinkMeans, snr: f64, quad: &QuadratureSpec) -> Result<f64> {
    nonneg("mu", mu)?;
    positive("snr", snr)?;
    let base = cdf_af_min2(mu, means)?;
    let (sd, mr) = (means.mu_sd, means.min_hop_mean());
    let correction =
        integrate_complement(mu, means, snr, quad, |y| (-(mu - y) / sd - y / mr).exp())? / sd;
    Ok(clamp_probability(base + correction, "cdf_af_min3"))
}

/// The convolution integral in its original form,
/// `int_0^mu exp(-y (1/M_r - 1/mu_sd)) t(y) K1(t(y)) dy`.
pub fn min3_convolution_integral(
    mu: f64,
    means: &LinkMeans,
    snr: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    nonneg("mu", mu)?;
    positive("snr", snr)?;
    let beta = 1.0 / means.min_hop_mean() - 1.0 / means.mu_sd;
    // int_0^mu e^{-beta y} dy
    let z = beta * mu;
    let plain = if z == 0.0 { mu } else { -(-z).exp_m1() / beta };
    let correction = integrate_complement(mu, means, snr, quad, |y| (-beta * y).exp())?;
    Ok(plain - correction)
}

pub fn outage_min3(q: &OutageQuery, quad: &QuadratureSpec) -> Result<f64> {
    cdf_af_min3(q.mu_th, &q.means, q.snr, quad)
}

/// Outage under the cut-set gain, taking the two sums as independent.
pub fn outage_cutset(q: &OutageQuery) -> Result<f64> {
    nonneg("mu_th", q.mu_th)?;
    let sd = mean(q.means.mu_sd);
    let f_sr = sum2_exp_cdf(q.mu_th, sd, mean(q.means.mu_sr))?;
    let f_rd = sum2_exp_cdf(q.mu_th, sd, mean(q.means.mu_rd))?;
    // 1 - (1 - f_sr)(1 - f_rd)
    Ok(clamp_probability(
        f_sr + f_rd - f_sr * f_rd,
        "outage_cutset",
    ))
}
