//! Command-line front end for the `af-relay` outage library.
//!
//! SNR enters in dB and is converted to linear exactly once, here; the
//! library only ever sees linear SNR.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use af_relay::analytics::{outage_cutset, outage_min2, outage_min3};
use af_relay::channel::{db_to_linear, gain_threshold};
use af_relay::montecarlo::{estimate_mean_gain, estimate_outage, estimate_outage_relays};
use af_relay::{Estimate, GainKind, LinkMeans, OutageQuery, QuadratureSpec, SimPlan, SystemParams};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub mod error;
pub mod fixtures;
pub mod validate;

pub use error::{CliError, Result};

pub const FIG2_HEADER: &str =
    "snr_db,snr_linear,mc_exact_relay_gain,mc_exact_se,analytic_min2_gain,mc_min3_gain,mc_min3_se,n,seed";
pub const FIG3_HEADER: &str =
    "snr_db,snr_linear,mu_th,mc_exact_outage,mc_exact_se,analytic_min2_outage,\
analytic_min3_outage,analytic_cutset_outage,n,seed";

pub const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Parser)]
#[command(
    name = "af-relay",
    version,
    about = "Outage probability of an amplify-and-forward relay channel"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form outage bounds (and optionally Monte Carlo) at one point.
    Eval(EvalArgs),
    /// Expected relay-hop gain versus SNR, as CSV.
    Fig2(SweepArgs),
    /// Outage probability versus SNR, as CSV.
    Fig3(SweepArgs),
    /// Audit the closed forms against Monte Carlo and the archived fixtures.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct MeanArgs {
    /// Mean of |h_sd|^2.
    #[arg(long, default_value_t = 1.0, value_parser = positive_real)]
    pub mu_sd: f64,
    /// Mean of |h_sr|^2.
    #[arg(long, default_value_t = 1.0, value_parser = positive_real)]
    pub mu_sr: f64,
    /// Mean of |h_rd|^2.
    #[arg(long, default_value_t = 1.0, value_parser = positive_real)]
    pub mu_rd: f64,
}

impl MeanArgs {
    pub fn means(&self) -> Result<LinkMeans> {
        Ok(LinkMeans::new(self.mu_sd, self.mu_sr, self.mu_rd)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct QuadArgs {
    #[arg(long, default_value_t = 1e-10, value_parser = nonneg_real)]
    pub quad_abs_tol: f64,
    #[arg(long, default_value_t = 1e-9, value_parser = nonneg_real)]
    pub quad_rel_tol: f64,
}

impl QuadArgs {
    pub fn quadrature(&self) -> Result<QuadratureSpec> {
        let max = QuadratureSpec::default().max_subdivisions;
        Ok(QuadratureSpec::new(
            self.quad_abs_tol,
            self.quad_rel_tol,
            max,
        )?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub means: MeanArgs,
    /// Transmit SNR in dB.
    #[arg(long, allow_negative_numbers = true, value_parser = finite_real)]
    pub snr_db: f64,
    /// Target rate R_th in bits per channel use.
    #[arg(long, default_value_t = 1.0, value_parser = nonneg_real)]
    pub rate: f64,
    /// Number of relays; more than one requires --mc.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub relays: u32,
    /// Also estimate the exact outage by Monte Carlo.
    #[arg(long)]
    pub mc: bool,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Print one JSON record instead of the table.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub means: MeanArgs,
    #[arg(long, default_value_t = -20.0, allow_negative_numbers = true, value_parser = finite_real)]
    pub snr_db_start: f64,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true, value_parser = finite_real)]
    pub snr_db_stop: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive_real)]
    pub snr_db_step: f64,
    #[arg(long, default_value_t = 1.0, value_parser = nonneg_real)]
    pub rate: f64,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

impl SweepArgs {
    pub fn grid(&self) -> Result<Vec<f64>> {
        snr_grid(self.snr_db_start, self.snr_db_stop, self.snr_db_step)
    }

    pub fn plan(&self) -> Result<SimPlan> {
        Ok(SimPlan::with_default_streams(self.seed, self.n_samples)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Fixture CSV to check; the built-in reference file when omitted.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    /// Write the report as JSON.
    #[arg(long)]
    pub json: bool,
}

fn finite_real(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not finite"))
    }
}

fn positive_real(s: &str) -> std::result::Result<f64, String> {
    finite_real(s).and_then(|v| {
        if v > 0.0 {
            Ok(v)
        } else {
            Err(format!("{s} must be > 0"))
        }
    })
}

fn nonneg_real(s: &str) -> std::result::Result<f64, String> {
    finite_real(s).and_then(|v| {
        if v >= 0.0 {
            Ok(v)
        } else {
            Err(format!("{s} must be >= 0"))
        }
    })
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// `start, start + step, ..., <= stop` in dB.
pub fn snr_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 {
        return Err(CliError::Usage(format!(
            "invalid SNR sweep {start}:{step}:{stop}"
        )));
    }
    if start > stop {
        return Err(CliError::Usage(format!(
            "--snr-db-start {start} exceeds --snr-db-stop {stop}"
        )));
    }
    let span = (stop - start) / step;
    if span >= MAX_GRID_POINTS as f64 {
        return Err(CliError::Usage(format!(
            "SNR sweep would have more than {MAX_GRID_POINTS} points"
        )));
    }
    // Slack so that e.g. 0.1-dB steps reach the stop value despite rounding.
    let count = (span * (1.0 + 1e-12) + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Analytic and (optional) simulated outage at one operating point.
#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub mu_sd: f64,
    pub mu_sr: f64,
    pub mu_rd: f64,
    pub snr_db: f64,
    pub snr_linear: f64,
    pub rate: f64,
    pub relays: u32,
    pub mu_th: f64,
    pub outage_min2: Option<f64>,
    pub outage_min3: Option<f64>,
    pub outage_cutset: Option<f64>,
    pub mc_exact_outage: Option<f64>,
    pub mc_exact_se: Option<f64>,
    pub n: Option<u64>,
    pub seed: Option<u64>,
}

/// Shared by `eval` and each `fig3` row so the two agree exactly.
pub fn evaluate_point(
    means: LinkMeans,
    snr_db: f64,
    rate: f64,
    relays: u32,
    plan: Option<&SimPlan>,
    quad: &QuadratureSpec,
) -> Result<PointRecord> {
    let snr = db_to_linear(snr_db);
    let sp = SystemParams::new(snr, relays, rate)?;
    let mu_th = gain_threshold(&sp);
    // The closed forms cover a single relay only.
    let (min2, min3, cutset) = if relays == 1 {
        let q = OutageQuery::new(means, snr, mu_th)?;
        (
            Some(outage_min2(&q)?),
            Some(outage_min3(&q, quad)?),
            Some(outage_cutset(&q)?),
        )
    } else {
        (None, None, None)
    };
    let mc: Option<Estimate> = match plan {
        Some(p) if relays == 1 => Some(estimate_outage(&means, snr, mu_th, GainKind::Exact, p)?),
        Some(p) => Some(estimate_outage_relays(&means, snr, relays, mu_th, p)?),
        None => None,
    };
    Ok(PointRecord {
        mu_sd: means.mu_sd,
        mu_sr: means.mu_sr,
        mu_rd: means.mu_rd,
        snr_db,
        snr_linear: snr,
        rate,
        relays,
        mu_th,
        outage_min2: min2,
        outage_min3: min3,
        outage_cutset: cutset,
        mc_exact_outage: mc.map(|e| e.value),
        mc_exact_se: mc.map(|e| e.std_error),
        n: mc.map(|e| e.n),
        seed: mc.map(|e| e.master_seed),
    })
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    if args.relays > 1 && !args.mc {
        return Err(CliError::Usage(
            "--relays above 1 has no closed form; add --mc".into(),
        ));
    }
    let plan = if args.mc {
        Some(SimPlan::with_default_streams(args.seed, args.n_samples)?)
    } else {
        None
    };
    let rec = evaluate_point(
        args.means.means()?,
        args.snr_db,
        args.rate,
        args.relays,
        plan.as_ref(),
        &args.quad.quadrature()?,
    )?;
    let text = if args.json {
        serde_json::to_string(&rec).expect("record serializes") + "\n"
    } else {
        render_point(&rec)
    };
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io("<stdout>", e))
}

fn render_point(rec: &PointRecord) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "n/a (single relay only)".to_string(), num);
    let mut lines = vec![
        format!(
            "means (sd, sr, rd)  {}, {}, {}",
            num(rec.mu_sd),
            num(rec.mu_sr),
            num(rec.mu_rd)
        ),
        format!(
            "snr                 {} dB = {}",
            num(rec.snr_db),
            num(rec.snr_linear)
        ),
        format!("rate                {}", num(rec.rate)),
        format!("relays              {}", rec.relays),
        format!("mu_th               {}", num(rec.mu_th)),
        format!("outage_min2         {}", opt(rec.outage_min2)),
        format!("outage_min3         {}", opt(rec.outage_min3)),
        format!("outage_cutset       {}", opt(rec.outage_cutset)),
    ];
    if let (Some(v), Some(se), Some(n), Some(seed)) =
        (rec.mc_exact_outage, rec.mc_exact_se, rec.n, rec.seed)
    {
        lines.push(format!(
            "mc_exact_outage     {} (se {}, n {n}, seed {seed})",
            num(v),
            num(se)
        ));
    }
    lines.join("\n") + "\n"
}

pub fn fig2_csv(args: &SweepArgs) -> Result<String> {
    let means = args.means.means()?;
    let plan = args.plan()?;
    let mut csv = String::from(FIG2_HEADER) + "\n";
    for snr_db in args.grid()? {
        let snr = db_to_linear(snr_db);
        let exact = estimate_mean_gain(&means, snr, GainKind::ExactRelay, &plan)?;
        let min3 = estimate_mean_gain(&means, snr, GainKind::Min3Relay, &plan)?;
        csv += &format!(
            "{},{},{},{},{},{},{},{},{}\n",
            num(snr_db),
            num(snr),
            num(exact.value),
            num(exact.std_error),
            num(means.min_hop_mean()),
            num(min3.value),
            num(min3.std_error),
            plan.n_samples,
            plan.master_seed
        );
    }
    Ok(csv)
}

pub fn fig3_csv(args: &SweepArgs) -> Result<String> {
    let means = args.means.means()?;
    let plan = args.plan()?;
    let quad = args.quad.quadrature()?;
    let mut csv = String::from(FIG3_HEADER) + "\n";
    for snr_db in args.grid()? {
        let r = evaluate_point(means, snr_db, args.rate, 1, Some(&plan), &quad)?;
        let f = |v: Option<f64>| num(v.expect("single-relay point has every column"));
        csv += &format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            num(r.snr_db),
            num(r.snr_linear),
            num(r.mu_th),
            f(r.mc_exact_outage),
            f(r.mc_exact_se),
            f(r.outage_min2),
            f(r.outage_min3),
            f(r.outage_cutset),
            plan.n_samples,
            plan.master_seed
        );
    }
    Ok(csv)
}

/// Destination for command output, opened before any work is done so an
/// unwritable path fails fast.
pub enum Sink<'a> {
    File(PathBuf, BufWriter<File>),
    Stdout(&'a mut dyn Write),
}

impl<'a> Sink<'a> {
    pub fn open(path: Option<&Path>, stdout: &'a mut dyn Write) -> Result<Self> {
        match path {
            Some(p) => {
                let file = File::create(p).map_err(|e| CliError::io(p, e))?;
                Ok(Sink::File(p.to_path_buf(), BufWriter::new(file)))
            }
            None => Ok(Sink::Stdout(stdout)),
        }
    }

    pub fn write(self, text: &str) -> Result<()> {
        match self {
            Sink::File(p, mut w) => w
                .write_all(text.as_bytes())
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(p, e)),
            Sink::Stdout(w) => w
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io("<stdout>", e)),
        }
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Eval(a) => cmd_eval(a, stdout),
        Command::Fig2(a) => {
            let sink = Sink::open(a.out.as_deref(), stdout)?;
            sink.write(&fig2_csv(a)?)
        }
        Command::Fig3(a) => {
            let sink = Sink::open(a.out.as_deref(), stdout)?;
            sink.write(&fig3_csv(a)?)
        }
        Command::Validate(a) => validate::cmd_validate(a, stdout),
    }
}

/// Parse `argv`, run, and map the outcome to an exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
