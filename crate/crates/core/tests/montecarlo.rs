use std::collections::HashSet;

use af_relay::montecarlo::{
    audit_bound_chain, empirical_cdf, estimate_mean_gain, estimate_outage, sample_fading, GainKind,
};
use af_relay::rng::CounterRng;
use af_relay::{LinkMeans, SimPlan};
use af_relay_testkit as oracle;

#[test]
fn component_means_follow_lln() {
    let m = LinkMeans::unit();
    let n = 10_000_000u64;
    let mut rng = CounterRng::new(11, 0);
    let mut sums = [0.0f64; 3];
    for _ in 0..n {
        let d = sample_fading(&m, &mut rng);
        sums[0] += d.h_sd2;
        sums[1] += d.h_sr2;
        sums[2] += d.h_rd2;
    }
    let tol = 4.0 / (n as f64).sqrt();
    for s in sums {
        let mean = s / n as f64;
        assert!((mean - 1.0).abs() < tol, "sample mean {mean}");
    }
}

#[test]
fn same_seed_same_draws() {
    let m = LinkMeans::new(0.3, 2.0, 5.0).unwrap();
    let mut a = CounterRng::new(99, 3);
    let mut b = CounterRng::new(99, 3);
    for _ in 0..1000 {
        assert_eq!(sample_fading(&m, &mut a), sample_fading(&m, &mut b));
    }
}

#[test]
fn sr_component_passes_dkw_bound() {
    let m = LinkMeans::new(1.0, 1.7, 1.0).unwrap();
    let n = 10_000_000usize;
    let mut rng = CounterRng::new(5, 0);
    let mut xs: Vec<f64> = (0..n).map(|_| sample_fading(&m, &mut rng).h_sr2).collect();
    xs.sort_by(f64::total_cmp);
    let nf = n as f64;
    let sup = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = oracle::exp_cdf(x, 1.7);
            (f - i as f64 / nf)
                .abs()
                .max(((i + 1) as f64 / nf - f).abs())
        })
        .fold(0.0, f64::max);
    let bound = 4.0 * (std::f64::consts::LN_2 / (2.0 * nf)).sqrt();
    println!("sup deviation {sup:.3e}, bound {bound:.3e}");
    assert!(sup < bound);
}

#[test]
fn outage_invariant_to_stream_count() {
    let m = LinkMeans::new(0.7, 1.3, 2.1).unwrap();
    let n = 1_000_003;
    let base = estimate_outage(
        &m,
        4.0,
        0.5,
        GainKind::Exact,
        &SimPlan::new(21, n, 1).unwrap(),
    )
    .unwrap();
    for streams in [4, 16] {
        let e = estimate_outage(
            &m,
            4.0,
            0.5,
            GainKind::Exact,
            &SimPlan::new(21, n, streams).unwrap(),
        )
        .unwrap();
        assert_eq!(e, base);
    }
    let again = estimate_outage(
        &m,
        4.0,
        0.5,
        GainKind::Exact,
        &SimPlan::new(21, n, 1).unwrap(),
    )
    .unwrap();
    assert_eq!(again, base);
}

#[test]
fn streams_do_not_collide() {
    let mut seen = HashSet::with_capacity(1_600_000);
    for s in 0..16 {
        let mut rng = CounterRng::new(1, s);
        for _ in 0..100_000 {
            assert!(
                seen.insert(rng.next_u64()),
                "duplicate output in stream {s}"
            );
        }
    }
}

#[test]
fn std_error_scales_as_inverse_root_n() {
    let m = LinkMeans::unit();
    let small = estimate_outage(
        &m,
        10.0,
        0.3,
        GainKind::Exact,
        &SimPlan::new(3, 10_000, 4).unwrap(),
    )
    .unwrap();
    let large = estimate_outage(
        &m,
        10.0,
        0.3,
        GainKind::Exact,
        &SimPlan::new(3, 1_000_000, 4).unwrap(),
    )
    .unwrap();
    let ratio = small.std_error / large.std_error;
    assert!((ratio / 10.0 - 1.0).abs() < 0.2, "ratio {ratio}");
    let mean_small = estimate_mean_gain(
        &m,
        1.0,
        GainKind::ExactRelay,
        &SimPlan::new(3, 10_000, 4).unwrap(),
    )
    .unwrap();
    let mean_large = estimate_mean_gain(
        &m,
        1.0,
        GainKind::ExactRelay,
        &SimPlan::new(3, 1_000_000, 4).unwrap(),
    )
    .unwrap();
    let ratio = mean_small.std_error / mean_large.std_error;
    assert!((ratio / 10.0 - 1.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn estimates_lie_in_range() {
    let m = LinkMeans::new(0.5, 3.0, 0.2).unwrap();
    let plan = SimPlan::new(8, 100_000, 4).unwrap();
    for kind in GainKind::ALL {
        for &mu in &[0.01, 0.3, 3.0, 50.0] {
            let e = estimate_outage(&m, 2.0, mu, kind, &plan).unwrap();
            assert!((0.0..=1.0).contains(&e.value));
            assert!(e.std_error >= 0.0);
            assert_eq!((e.n, e.master_seed), (100_000, 8));
        }
        let g = estimate_mean_gain(&m, 2.0, kind, &plan).unwrap();
        assert!(g.value >= 0.0 && g.std_error >= 0.0);
    }
}

#[test]
fn bound_chain_holds_per_draw() {
    let m = LinkMeans::unit();
    let plan = SimPlan::new(1, 1_000_000, 8).unwrap();
    for &snr in &[0.01, 1.0, 100.0] {
        let audit = audit_bound_chain(&m, snr, &plan).unwrap();
        assert_eq!(audit.draws, 1_000_000);
        assert_eq!(audit.violations(), 0, "snr {snr}: {audit:?}");
    }
}

#[test]
fn min2_relay_mean_is_harmonic() {
    let m = LinkMeans::new(1.0, 2.0, 2.0).unwrap();
    let e = estimate_mean_gain(
        &m,
        1.0,
        GainKind::Min2Relay,
        &SimPlan::new(4, 1_000_000, 4).unwrap(),
    )
    .unwrap();
    assert!((e.value - 1.0).abs() < 4.0 * e.std_error, "{e:?}");
}

#[test]
fn min2_empirical_cdf_matches_independent_sampler() {
    // Same law, independent generator: ChaCha draws reduced by hand.
    let m = LinkMeans::new(1.2, 0.6, 2.5).unwrap();
    let n = 1_000_000u64;
    let grid = oracle::log_space(1e-3, 8.0, 30);
    let ours = empirical_cdf(
        &m,
        1.0,
        GainKind::Min2,
        &grid,
        &SimPlan::new(2, n, 4).unwrap(),
    )
    .unwrap();
    let mut sampler = oracle::ExpSampler::new(77);
    let mut gains: Vec<f64> = (0..n)
        .map(|_| {
            let sd = sampler.exp(m.mu_sd);
            sd + sampler.exp(m.mu_sr).min(sampler.exp(m.mu_rd))
        })
        .collect();
    let theirs = oracle::empirical_cdf(&mut gains, &grid);
    for ((e, &t), &g) in ours.iter().zip(&theirs).zip(&grid) {
        let se = (e.std_error.powi(2) + t * (1.0 - t) / n as f64).sqrt();
        assert!(
            (e.value - t).abs() <= 4.0 * se + 1.0 / n as f64,
            "{g}: {} vs {t}",
            e.value
        );
    }
}
