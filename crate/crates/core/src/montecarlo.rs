//! Seeded Monte Carlo estimates over Rayleigh-faded draws.
//!
//! Samples are cut into fixed blocks of [`BLOCK_SIZE`] draws and block `b`
//! reads the random sub-stream keyed by `(master_seed, b)`. Workers
//! (`n_streams` of them) take blocks round-robin and partial results are
//! merged in block order, so an estimate depends only on the seed and the
//! sample count, never on the degree of parallelism.

use std::thread;

use crate::channel::{
    bound_min2, bound_min3, cutset_gain, e2e_gain_exact, e2e_gain_multi, relay_gain_exact,
    relay_gain_min2, relay_gain_min3, FadingDraw, LinkMeans, RelayHop,
};
use crate::error::{nonneg, positive, Error, Result};
use crate::rng::CounterRng;

pub const BLOCK_SIZE: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimPlan {
    pub master_seed: u64,
    pub n_samples: u64,
    pub n_streams: usize,
}

impl SimPlan {
    pub fn new(master_seed: u64, n_samples: u64, n_streams: usize) -> Result<Self> {
        let plan = Self {
            master_seed,
            n_samples,
            n_streams,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// Plan using the available hardware parallelism.
    pub fn with_default_streams(master_seed: u64, n_samples: u64) -> Result<Self> {
        let cores = thread::available_parallelism().map_or(1, |n| n.get());
        let n_streams = cores.min(n_samples.max(1) as usize);
        Self::new(master_seed, n_samples, n_streams)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
        }
        if self.n_streams == 0 || self.n_streams as u64 > self.n_samples {
            return Err(Error::InvalidParameter(format!(
                "n_streams must be in 1..={}, got {}",
                self.n_samples, self.n_streams
            )));
        }
        Ok(())
    }

    fn n_blocks(&self) -> u64 {
        self.n_samples.div_ceil(BLOCK_SIZE)
    }

    fn block_len(&self, block: u64) -> u64 {
        BLOCK_SIZE.min(self.n_samples - block * BLOCK_SIZE)
    }
}

/// Monte Carlo result with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub n: u64,
    pub master_seed: u64,
}

impl Estimate {
    fn proportion(hits: u64, plan: &SimPlan) -> Self {
        let n = plan.n_samples;
        let p = hits as f64 / n as f64;
        Self {
            value: p,
            std_error: (p * (1.0 - p) / n as f64).sqrt(),
            n,
            master_seed: plan.master_seed,
        }
    }
}

/// Which gain a draw is reduced to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GainKind {
    /// `|h_sd|^2` plus the exact relay branch.
    Exact,
    /// `|h_sd|^2 + min(u, v)`.
    Min2,
    /// `|h_sd|^2 + min(u, v, u v SNR)`.
    Min3,
    /// `min(|h_sd|^2 + u, |h_sd|^2 + v)`.
    Cutset,
    /// `u v / (u + v + 1/SNR)` alone.
    ExactRelay,
    Min2Relay,
    Min3Relay,
}

impl GainKind {
    pub const ALL: [GainKind; 7] = [
        GainKind::Exact,
        GainKind::Min2,
        GainKind::Min3,
        GainKind::Cutset,
        GainKind::ExactRelay,
        GainKind::Min2Relay,
        GainKind::Min3Relay,
    ];

    #[inline]
    pub fn gain(self, d: &FadingDraw, snr: f64) -> f64 {
        match self {
            GainKind::Exact => e2e_gain_exact(d, snr),
            GainKind::Min2 => bound_min2(d),
            GainKind::Min3 => bound_min3(d, snr),
            GainKind::Cutset => cutset_gain(d),
            GainKind::ExactRelay => relay_gain_exact(d.h_sr2, d.h_rd2, snr),
            GainKind::Min2Relay => relay_gain_min2(d.h_sr2, d.h_rd2),
            GainKind::Min3Relay => relay_gain_min3(d.h_sr2, d.h_rd2, snr),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GainKind::Exact => "exact",
            GainKind::Min2 => "min2",
            GainKind::Min3 => "min3",
            GainKind::Cutset => "cutset",
            GainKind::ExactRelay => "exact_relay",
            GainKind::Min2Relay => "min2_relay",
            GainKind::Min3Relay => "min3_relay",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// Squared gains `|h_sd|^2, |h_sr|^2, |h_rd|^2`, drawn in that order.
#[inline]
pub fn sample_fading(means: &LinkMeans, rng: &mut CounterRng) -> FadingDraw {
    FadingDraw {
        h_sd2: rng.next_exp(means.mu_sd),
        h_sr2: rng.next_exp(means.mu_sr),
        h_rd2: rng.next_exp(means.mu_rd),
    }
}

/// Runs `work` on every block and returns the per-block results in block
/// order.
fn run_blocks<T, F>(plan: &SimPlan, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut CounterRng, u64) -> T + Sync,
{
    plan.validate()?;
    let n_blocks = plan.n_blocks();
    let workers = (plan.n_streams as u64).min(n_blocks);
    let run = |worker: u64| -> Vec<(u64, T)> {
        (worker..n_blocks)
            .step_by(workers as usize)
            .map(|block| {
                let mut rng = CounterRng::new(plan.master_seed, block);
                (block, work(&mut rng, plan.block_len(block)))
            })
            .collect()
    };

    let mut parts: Vec<(u64, T)> = if workers == 1 {
        run(0)
    } else {
        thread::scope(|s| {
            let handles: Vec<_> = (0..workers).map(|w| s.spawn(move || run(w))).collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("monte carlo worker panicked"))
                .collect()
        })
    };
    parts.sort_by_key(|(block, _)| *block);
    Ok(parts.into_iter().map(|(_, t)| t).collect())
}

/// Fraction of draws whose gain falls strictly below `mu_th`.
pub fn estimate_outage(
    means: &LinkMeans,
    snr: f64,
    mu_th: f64,
    kind: GainKind,
    plan: &SimPlan,
) -> Result<Estimate> {
    means.validate()?;
    positive("snr", snr)?;
    nonneg("mu_th", mu_th)?;
    let hits: u64 = run_blocks(plan, |rng, len| {
        (0..len)
            .filter(|_| kind.gain(&sample_fading(means, rng), snr) < mu_th)
            .count() as u64
    })?
    .into_iter()
    .sum();
    Ok(Estimate::proportion(hits, plan))
}

/// Outage of the exact gain with `n_relays` independent relays, each with
/// hop means `mu_sr`, `mu_rd`.
pub fn estimate_outage_relays(
    means: &LinkMeans,
    snr: f64,
    n_relays: u32,
    mu_th: f64,
    plan: &SimPlan,
) -> Result<Estimate> {
    means.validate()?;
    positive("snr", snr)?;
    nonneg("mu_th", mu_th)?;
    if n_relays == 0 {
        return Err(Error::InvalidParameter("n_relays must be >= 1".into()));
    }
    let hits: u64 = run_blocks(plan, |rng, len| {
        let mut hops = vec![RelayHop::default(); n_relays as usize];
        let mut hits = 0;
        for _ in 0..len {
            let h_sd2 = rng.next_exp(means.mu_sd);
            for hop in hops.iter_mut() {
                hop.h_sr2 = rng.next_exp(means.mu_sr);
                hop.h_rd2 = rng.next_exp(means.mu_rd);
            }
            if e2e_gain_multi(h_sd2, &hops, snr) < mu_th {
                hits += 1;
            }
        }
        hits
    })?
    .into_iter()
    .sum();
    Ok(Estimate::proportion(hits, plan))
}

/// Running mean and centered sum of squares.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.n;
        self.m2 += delta * (x - self.mean);
    }

    fn estimate(&self, plan: &SimPlan) -> Estimate {
        let variance = if self.n > 1.0 {
            self.m2 / (self.n - 1.0)
        } else {
            0.0
        };
        Estimate {
            value: self.mean,
            std_error: (variance / self.n).sqrt(),
            n: plan.n_samples,
            master_seed: plan.master_seed,
        }
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0.0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * other.n / n,
            m2: self.m2 + other.m2 + delta * delta * self.n * other.n / n,
        }
    }
}

/// Sample mean of the selected gain, with `sqrt(s^2 / n)` standard error.
pub fn estimate_mean_gain(
    means: &LinkMeans,
    snr: f64,
    kind: GainKind,
    plan: &SimPlan,
) -> Result<Estimate> {
    means.validate()?;
    positive("snr", snr)?;
    let total = run_blocks(plan, |rng, len| {
        let mut m = Moments::default();
        for _ in 0..len {
            m.push(kind.gain(&sample_fading(means, rng), snr));
        }
        m
    })?
    .into_iter()
    .fold(Moments::default(), Moments::merge);
    Ok(total.estimate(plan))
}

/// Outage estimates at every point of an ascending `grid`, all from one
/// shared sample set.
pub fn empirical_cdf(
    means: &LinkMeans,
    snr: f64,
    kind: GainKind,
    grid: &[f64],
    plan: &SimPlan,
) -> Result<Vec<Estimate>> {
    means.validate()?;
    positive("snr", snr)?;
    for &g in grid {
        nonneg("grid point", g)?;
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(
            "grid must be sorted ascending".into(),
        ));
    }
    // bins[k] counts draws with grid[k-1] <= gain < grid[k]
    let bins = run_blocks(plan, |rng, len| {
        let mut bins = vec![0u64; grid.len() + 1];
        for _ in 0..len {
            let gain = kind.gain(&sample_fading(means, rng), snr);
            bins[grid.partition_point(|&g| g <= gain)] += 1;
        }
        bins
    })?
    .into_iter()
    .fold(vec![0u64; grid.len() + 1], |mut acc, b| {
        acc.iter_mut().zip(b).for_each(|(a, x)| *a += x);
        acc
    });
    let mut below = 0;
    Ok(bins[..grid.len()]
        .iter()
        .map(|&count| {
            below += count;
            Estimate::proportion(below, plan)
        })
        .collect())
}

/// Violation counts of the pointwise ordering
/// `exact <= min3 <= min2 == cutset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BoundChainAudit {
    pub draws: u64,
    pub exact_above_min3: u64,
    pub min3_above_min2: u64,
    pub cutset_differs: u64,
}

impl BoundChainAudit {
    pub fn violations(&self) -> u64 {
        self.exact_above_min3 + self.min3_above_min2 + self.cutset_differs
    }

    fn add(mut self, o: BoundChainAudit) -> Self {
        self.draws += o.draws;
        self.exact_above_min3 += o.exact_above_min3;
        self.min3_above_min2 += o.min3_above_min2;
        self.cutset_differs += o.cutset_differs;
        self
    }
}

/// Checks the bound ordering on every draw of the plan.
pub fn audit_bound_chain(means: &LinkMeans, snr: f64, plan: &SimPlan) -> Result<BoundChainAudit> {
    means.validate()?;
    positive("snr", snr)?;
    Ok(run_blocks(plan, |rng, len| {
        let mut audit = BoundChainAudit {
            draws: len,
            ..Default::default()
        };
        for _ in 0..len {
            let d = sample_fading(means, rng);
            let (exact, min3, min2) =
                (e2e_gain_exact(&d, snr), bound_min3(&d, snr), bound_min2(&d));
            audit.exact_above_min3 += (exact > min3) as u64;
            audit.min3_above_min2 += (min3 > min2) as u64;
            audit.cutset_differs += (cutset_gain(&d) != min2) as u64;
        }
        audit
    })?
    .into_iter()
    .fold(BoundChainAudit::default(), BoundChainAudit::add))
}

/// Every kind's outage at one threshold, every kind's mean gain and the
/// bound-chain audit, all from one shared sample set. Each entry is
/// bit-identical to the single-kind estimator run on the same plan.
#[derive(Debug, Clone, PartialEq)]
pub struct JointEstimate {
    outage: [Estimate; 7],
    mean: [Estimate; 7],
    pub audit: BoundChainAudit,
}

impl JointEstimate {
    pub fn outage(&self, kind: GainKind) -> Estimate {
        self.outage[kind as usize]
    }

    pub fn mean(&self, kind: GainKind) -> Estimate {
        self.mean[kind as usize]
    }
}

pub fn estimate_joint(
    means: &LinkMeans,
    snr: f64,
    mu_th: f64,
    plan: &SimPlan,
) -> Result<JointEstimate> {
    means.validate()?;
    positive("snr", snr)?;
    nonneg("mu_th", mu_th)?;
    type Part = ([u64; 7], [Moments; 7], BoundChainAudit);
    let parts: Vec<Part> = run_blocks(plan, |rng, len| {
        let mut hits = [0u64; 7];
        let mut moments = [Moments::default(); 7];
        let mut audit = BoundChainAudit {
            draws: len,
            ..Default::default()
        };
        for _ in 0..len {
            let d = sample_fading(means, rng);
            let mut gains = [0.0; 7];
            for kind in GainKind::ALL {
                gains[kind as usize] = kind.gain(&d, snr);
            }
            for (i, &g) in gains.iter().enumerate() {
                hits[i] += (g < mu_th) as u64;
                moments[i].push(g);
            }
            let (exact, min2, min3) = (gains[0], gains[1], gains[2]);
            audit.exact_above_min3 += (exact > min3) as u64;
            audit.min3_above_min2 += (min3 > min2) as u64;
            audit.cutset_differs += (gains[3] != min2) as u64;
        }
        (hits, moments, audit)
    })?;
    let mut hits = [0u64; 7];
    let mut moments = [Moments::default(); 7];
    let mut audit = BoundChainAudit::default();
    for (h, m, a) in parts {
        for i in 0..7 {
            hits[i] += h[i];
            moments[i] = moments[i].merge(m[i]);
        }
        audit = audit.add(a);
    }
    Ok(JointEstimate {
        outage: hits.map(|h| Estimate::proportion(h, plan)),
        mean: moments.map(|m| m.estimate(plan)),
        audit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(n: u64, streams: usize) -> SimPlan {
        SimPlan::new(1, n, streams).unwrap()
    }

    #[test]
    fn plan_validation() {
        assert!(SimPlan::new(0, 0, 1).is_err());
        assert!(SimPlan::new(0, 10, 0).is_err());
        assert!(SimPlan::new(0, 10, 11).is_err());
        assert!(SimPlan::new(0, 10, 10).is_ok());
    }

    #[test]
    fn zero_threshold_gives_zero() {
        let m = LinkMeans::unit();
        for kind in GainKind::ALL {
            let e = estimate_outage(&m, 10.0, 0.0, kind, &plan(10_000, 2)).unwrap();
            assert_eq!(e.value, 0.0);
            assert_eq!(e.std_error, 0.0);
        }
    }

    #[test]
    fn min2_and_cutset_agree_exactly() {
        let m = LinkMeans::new(0.8, 1.7, 0.3).unwrap();
        let p = plan(100_000, 4);
        for &mu in &[0.1, 0.5, 2.0] {
            let a = estimate_outage(&m, 3.0, mu, GainKind::Min2, &p).unwrap();
            let b = estimate_outage(&m, 3.0, mu, GainKind::Cutset, &p).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn stream_count_does_not_change_results() {
        let m = LinkMeans::new(1.0, 2.0, 0.5).unwrap();
        let n = 3 * BLOCK_SIZE + 17;
        let base = estimate_mean_gain(&m, 2.0, GainKind::ExactRelay, &plan(n, 1)).unwrap();
        for streams in [2, 3, 8] {
            let e = estimate_mean_gain(&m, 2.0, GainKind::ExactRelay, &plan(n, streams)).unwrap();
            assert_eq!(e.value.to_bits(), base.value.to_bits());
            assert_eq!(e.std_error.to_bits(), base.std_error.to_bits());
        }
    }

    #[test]
    fn mean_ordering_follows_pointwise_ordering() {
        let m = LinkMeans::unit();
        let p = plan(50_000, 2);
        for &snr in &[0.01, 1.0, 100.0] {
            let e = estimate_mean_gain(&m, snr, GainKind::ExactRelay, &p)
                .unwrap()
                .value;
            let m3 = estimate_mean_gain(&m, snr, GainKind::Min3Relay, &p)
                .unwrap()
                .value;
            let m2 = estimate_mean_gain(&m, snr, GainKind::Min2Relay, &p)
                .unwrap()
                .value;
            assert!(e <= m3 && m3 <= m2, "{snr}: {e} {m3} {m2}");
        }
    }

    #[test]
    fn empirical_cdf_shape() {
        let m = LinkMeans::unit();
        let p = plan(20_000, 3);
        let zero = empirical_cdf(&m, 1.0, GainKind::Exact, &[0.0], &p).unwrap();
        assert_eq!(zero[0].value, 0.0);
        let grid: Vec<f64> = (0..40).map(|i| i as f64 * 0.1).collect();
        let cdf = empirical_cdf(&m, 1.0, GainKind::Exact, &grid, &p).unwrap();
        assert!(cdf.windows(2).all(|w| w[0].value <= w[1].value));
        // Each point agrees with a standalone estimate on the same plan.
        let single = estimate_outage(&m, 1.0, grid[13], GainKind::Exact, &p).unwrap();
        assert_eq!(single, cdf[13]);
        assert!(empirical_cdf(&m, 1.0, GainKind::Exact, &[1.0, 0.5], &p).is_err());
    }

    #[test]
    fn single_relay_sampler_matches_multi_relay_path() {
        let m = LinkMeans::new(0.5, 1.5, 1.0).unwrap();
        let p = plan(40_000, 2);
        let a = estimate_outage(&m, 4.0, 0.4, GainKind::Exact, &p).unwrap();
        let b = estimate_outage_relays(&m, 4.0, 1, 0.4, &p).unwrap();
        assert_eq!(a, b);
        let more = estimate_outage_relays(&m, 4.0, 3, 0.4, &p).unwrap();
        assert!(more.value <= a.value);
    }

    #[test]
    fn joint_pass_matches_single_kind_estimators() {
        let m = LinkMeans::new(0.9, 1.4, 0.6).unwrap();
        let p = plan(2 * BLOCK_SIZE + 5, 3);
        let joint = estimate_joint(&m, 2.5, 0.7, &p).unwrap();
        for kind in GainKind::ALL {
            assert_eq!(
                joint.outage(kind),
                estimate_outage(&m, 2.5, 0.7, kind, &p).unwrap()
            );
            assert_eq!(
                joint.mean(kind),
                estimate_mean_gain(&m, 2.5, kind, &p).unwrap()
            );
        }
        assert_eq!(joint.audit, audit_bound_chain(&m, 2.5, &p).unwrap());
    }

    #[test]
    fn gain_kind_names_round_trip() {
        for kind in GainKind::ALL {
            assert_eq!(GainKind::from_name(kind.name()), Some(kind));
        }
        assert_eq!(GainKind::from_name("bogus"), None);
    }
}
