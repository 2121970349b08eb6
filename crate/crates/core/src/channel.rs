//! Instantaneous channel algebra of the two-hop amplify-and-forward link.
//!
//! Gains are squared magnitudes `|h|^2`; SNRs are linear. The relay branch
//! of the end-to-end gain is `u v / (u + v + 1/SNR)` with `u = |h_sr|^2` and
//! `v = |h_rd|^2`; the bounds replace it with `min(u, v)` or
//! `min(u, v, u v SNR)`.

use crate::error::{nonneg, positive, Error, Result};

/// Mean squared gains of the three links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkMeans {
    pub mu_sd: f64,
    pub mu_sr: f64,
    pub mu_rd: f64,
}

impl LinkMeans {
    pub fn new(mu_sd: f64, mu_sr: f64, mu_rd: f64) -> Result<Self> {
        positive("mu_sd", mu_sd)?;
        positive("mu_sr", mu_sr)?;
        positive("mu_rd", mu_rd)?;
        Ok(Self {
            mu_sd,
            mu_sr,
            mu_rd,
        })
    }

    pub fn unit() -> Self {
        Self {
            mu_sd: 1.0,
            mu_sr: 1.0,
            mu_rd: 1.0,
        }
    }

    /// Mean of `min(|h_sr|^2, |h_rd|^2)`.
    pub fn min_hop_mean(&self) -> f64 {
        1.0 / (1.0 / self.mu_sr + 1.0 / self.mu_rd)
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.mu_sd, self.mu_sr, self.mu_rd).map(|_| ())
    }
}

/// Operating point: unfaded SNR, number of relays and target rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub snr: f64,
    pub n_relays: u32,
    /// Bits per channel use.
    pub rate_threshold: f64,
}

impl SystemParams {
    pub fn new(snr: f64, n_relays: u32, rate_threshold: f64) -> Result<Self> {
        positive("snr", snr)?;
        nonneg("rate_threshold", rate_threshold)?;
        if n_relays == 0 {
            return Err(Error::InvalidParameter("n_relays must be >= 1".into()));
        }
        Ok(Self {
            snr,
            n_relays,
            rate_threshold,
        })
    }
}

/// One realization of the three squared channel gains of a single relay.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FadingDraw {
    pub h_sd2: f64,
    pub h_sr2: f64,
    pub h_rd2: f64,
}

impl FadingDraw {
    pub fn new(h_sd2: f64, h_sr2: f64, h_rd2: f64) -> Result<Self> {
        nonneg("h_sd2", h_sd2)?;
        nonneg("h_sr2", h_sr2)?;
        nonneg("h_rd2", h_rd2)?;
        Ok(Self {
            h_sd2,
            h_sr2,
            h_rd2,
        })
    }
}

/// Squared gains of one relay's two hops, for multi-relay draws.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RelayHop {
    pub h_sr2: f64,
    pub h_rd2: f64,
}

/// Amplification applied by the relay so that it transmits at `p_relay`.
pub fn relay_gain_alpha(p_relay: f64, p_source: f64, h_sr2: f64, noise_var: f64) -> Result<f64> {
    positive("p_relay", p_relay)?;
    positive("p_source", p_source)?;
    positive("noise_var", noise_var)?;
    nonneg("h_sr2", h_sr2)?;
    Ok((p_relay / (p_source * h_sr2 + noise_var)).sqrt())
}

/// SNR of the relayed branch at the destination.
pub fn relayed_snr(gamma_sr: f64, gamma_rd: f64) -> Result<f64> {
    nonneg("gamma_sr", gamma_sr)?;
    nonneg("gamma_rd", gamma_rd)?;
    Ok(harmonic_term(gamma_sr, gamma_rd, 1.0))
}

/// MRC output SNR: direct branch plus every relayed branch.
pub fn total_snr(gamma_sd: f64, hops: &[(f64, f64)]) -> Result<f64> {
    nonneg("gamma_sd", gamma_sd)?;
    hops.iter()
        .try_fold(gamma_sd, |acc, &(sr, rd)| Ok(acc + relayed_snr(sr, rd)?))
}

/// `u v / (u + v + c)`, zero when either factor vanishes.
#[inline]
fn harmonic_term(u: f64, v: f64, c: f64) -> f64 {
    if u == 0.0 || v == 0.0 {
        return 0.0;
    }
    // The smaller factor times a ratio <= 1 keeps the result <= min(u, v)
    // after rounding.
    let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
    lo * (hi / (u + v + c))
}

/// Relay branch of the exact end-to-end gain.
#[inline]
pub fn relay_gain_exact(h_sr2: f64, h_rd2: f64, snr: f64) -> f64 {
    harmonic_term(h_sr2, h_rd2, 1.0 / snr)
}

#[inline]
pub fn relay_gain_min2(h_sr2: f64, h_rd2: f64) -> f64 {
    h_sr2.min(h_rd2)
}

#[inline]
pub fn relay_gain_min3(h_sr2: f64, h_rd2: f64, snr: f64) -> f64 {
    h_sr2.min(h_rd2).min(h_sr2 * h_rd2 * snr)
}

/// Exact end-to-end fading gain of the single-relay network.
pub fn e2e_gain_exact(d: &FadingDraw, snr: f64) -> f64 {
    d.h_sd2 + relay_gain_exact(d.h_sr2, d.h_rd2, snr)
}

/// End-to-end gain with one independent relay per entry of `hops`.
pub fn e2e_gain_multi(h_sd2: f64, hops: &[RelayHop], snr: f64) -> f64 {
    hops.iter().fold(h_sd2, |acc, hop| {
        acc + relay_gain_exact(hop.h_sr2, hop.h_rd2, snr)
    })
}

/// `|h_sd|^2 + min(|h_sr|^2, |h_rd|^2)`.
pub fn bound_min2(d: &FadingDraw) -> f64 {
    d.h_sd2 + relay_gain_min2(d.h_sr2, d.h_rd2)
}

/// `|h_sd|^2 + min(|h_sr|^2, |h_rd|^2, |h_sr|^2 |h_rd|^2 SNR)`.
pub fn bound_min3(d: &FadingDraw, snr: f64) -> f64 {
    d.h_sd2 + relay_gain_min3(d.h_sr2, d.h_rd2, snr)
}

/// Cut-set gain `min(|h_sd|^2 + |h_sr|^2, |h_sd|^2 + |h_rd|^2)`.
pub fn cutset_gain(d: &FadingDraw) -> f64 {
    (d.h_sd2 + d.h_sr2).min(d.h_sd2 + d.h_rd2)
}

/// Instantaneous mutual information in bits per channel use.
pub fn info_rate(gain: f64, snr: f64, n_relays: u32) -> f64 {
    (gain * snr).ln_1p() / std::f64::consts::LN_2 / (1.0 + n_relays as f64)
}

/// Gain threshold below which the network is in outage.
pub fn gain_threshold(sp: &SystemParams) -> f64 {
    if sp.rate_threshold == 0.0 {
        return 0.0;
    }
    let exponent = (sp.n_relays as f64 + 1.0) * sp.rate_threshold;
    (exponent * std::f64::consts::LN_2).exp_m1() / sp.snr
}

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn draw(a: f64, b: f64, c: f64) -> FadingDraw {
        FadingDraw::new(a, b, c).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn relay_gain_alpha_examples() {
        close(relay_gain_alpha(1.0, 1.0, 0.0, 1.0).unwrap(), 1.0, 1e-15);
        close(relay_gain_alpha(1.0, 1.0, 3.0, 1.0).unwrap(), 0.5, 1e-15);
        close(relay_gain_alpha(4.0, 1.0, 0.0, 1.0).unwrap(), 2.0, 1e-15);
        assert!(relay_gain_alpha(0.0, 1.0, 0.0, 1.0).is_err());
        assert!(relay_gain_alpha(1.0, 1.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn relayed_and_total_snr() {
        close(relayed_snr(1.0, 1.0).unwrap(), 1.0 / 3.0, 1e-15);
        assert_eq!(relayed_snr(7.0, 0.0).unwrap(), 0.0);
        close(relayed_snr(10.0, 10.0).unwrap(), 100.0 / 21.0, 1e-14);
        assert!(relayed_snr(-1.0, 1.0).is_err());
        close(total_snr(1.0, &[(1.0, 1.0)]).unwrap(), 4.0 / 3.0, 1e-15);
        assert_eq!(total_snr(0.0, &[]).unwrap(), 0.0);
        close(
            total_snr(0.5, &[(1.0, 1.0), (10.0, 10.0)]).unwrap(),
            0.5 + 1.0 / 3.0 + 100.0 / 21.0,
            1e-14,
        );
        assert!(total_snr(0.5, &[(1.0, -1.0)]).is_err());
    }

    #[test]
    fn gain_examples() {
        close(
            e2e_gain_exact(&draw(0.5, 1.0, 1.0), 1.0),
            0.5 + 1.0 / 3.0,
            1e-15,
        );
        close(e2e_gain_exact(&draw(0.5, 1.0, 1.0), 1e12), 1.0, 1e-11);
        assert_eq!(e2e_gain_exact(&draw(0.0, 0.0, 5.0), 3.0), 0.0);

        assert_eq!(bound_min2(&draw(0.5, 1.0, 2.0)), 1.5);
        assert_eq!(bound_min2(&draw(0.0, 3.0, 3.0)), 3.0);

        close(bound_min3(&draw(0.0, 1.0, 1.0), 0.1), 0.1, 1e-16);
        assert_eq!(bound_min3(&draw(0.0, 1.0, 1.0), 10.0), 1.0);
        assert_eq!(bound_min3(&draw(0.5, 1.0, 2.0), 1.0), 1.5);

        assert_eq!(cutset_gain(&draw(0.5, 1.0, 2.0)), 1.5);
        assert_eq!(cutset_gain(&draw(1.0, 0.0, 5.0)), 1.0);
        assert_eq!(cutset_gain(&draw(0.0, 0.0, 0.0)), 0.0);
    }

    #[test]
    fn multi_relay_reduces_to_single() {
        let d = draw(0.3, 1.2, 0.7);
        let hops = [RelayHop {
            h_sr2: 1.2,
            h_rd2: 0.7,
        }];
        assert_eq!(e2e_gain_multi(0.3, &hops, 2.0), e2e_gain_exact(&d, 2.0));
    }

    #[test]
    fn rate_and_threshold() {
        close(
            info_rate(0.5 + 1.0 / 3.0, 1.0, 1),
            0.437_234_558_958_070_5,
            1e-12,
        );
        assert_eq!(info_rate(0.0, 5.0, 1), 0.0);
        close(info_rate(3.0, 1.0, 1), 1.0, 1e-15);

        let t = |r, s, m| gain_threshold(&SystemParams::new(s, m, r).unwrap());
        close(t(1.0, 10.0, 1), 0.3, 1e-15);
        close(t(0.5, 1.0, 1), 1.0, 1e-15);
        close(t(1.0, 10.0, 2), 0.7, 1e-15);
        assert_eq!(t(0.0, 10.0, 1), 0.0);
        assert!(SystemParams::new(1.0, 0, 1.0).is_err());
        assert!(SystemParams::new(0.0, 1, 1.0).is_err());
    }

    #[test]
    fn rate_and_threshold_are_inverse() {
        let sp = SystemParams::new(3.7, 1, 0.8).unwrap();
        close(info_rate(gain_threshold(&sp), sp.snr, 1), 0.8, 1e-14);
    }

    #[test]
    fn db_round_trip() {
        for &db in &[-20.0, -3.3, 0.0, 7.1, 30.0] {
            let back = linear_to_db(db_to_linear(db));
            assert!((back - db).abs() <= 1e-12 * db.abs().max(1.0));
        }
    }

    proptest! {
        #[test]
        fn bound_chain_holds(
            a in 0.0f64..20.0, b in 0.0f64..20.0, c in 0.0f64..20.0,
            log_snr in -6.0f64..6.0,
        ) {
            let d = draw(a, b, c);
            let snr = 10f64.powf(log_snr);
            let exact = e2e_gain_exact(&d, snr);
            prop_assert!(exact <= bound_min3(&d, snr));
            prop_assert!(bound_min3(&d, snr) <= bound_min2(&d));
            prop_assert_eq!(cutset_gain(&d), bound_min2(&d));
        }

        #[test]
        fn exact_gain_monotone(
            a in 0.0f64..5.0, b in 0.0f64..5.0, c in 0.0f64..5.0,
            da in 0.0f64..1.0, snr in 0.01f64..100.0,
        ) {
            let base = e2e_gain_exact(&draw(a, b, c), snr);
            prop_assert!(e2e_gain_exact(&draw(a + da, b, c), snr) >= base);
            prop_assert!(e2e_gain_exact(&draw(a, b + da, c), snr) >= base);
            prop_assert!(e2e_gain_exact(&draw(a, b, c + da), snr) >= base);
            prop_assert!(e2e_gain_exact(&draw(a, b, c), snr * (1.0 + da)) >= base);
        }

        #[test]
        fn high_snr_limits(a in 0.0f64..5.0, b in 0.01f64..5.0, c in 0.01f64..5.0) {
            let d = draw(a, b, c);
            let snr = 1e12;
            let limit = a + b * c / (b + c);
            prop_assert!((e2e_gain_exact(&d, snr) - limit).abs() <= 1e-9 * limit);
            prop_assert!((bound_min3(&d, snr) - bound_min2(&d)).abs() <= 1e-9 * bound_min2(&d));
        }

        #[test]
        fn snr_and_gain_domains_agree(u in 0.0f64..10.0, v in 0.0f64..10.0, log_snr in -3.0f64..3.0) {
            let snr = 10f64.powf(log_snr);
            let gamma = relayed_snr(u * snr, v * snr).unwrap();
            let gain = snr * relay_gain_exact(u, v, snr);
            prop_assert!((gamma - gain).abs() <= 1e-13 * gamma.max(1e-300));
        }
    }
}
