//! Archived Monte Carlo reference values.
//!
//! Each row records the query, the plan (seed, n) and the estimate it
//! produced. Rows are computed once, committed, and re-derived by
//! `validate`, which must reproduce them.

use std::fmt::Write as _;
use std::path::Path;

use af_relay::montecarlo::{estimate_mean_gain, estimate_outage};
use af_relay::{Estimate, GainKind, LinkMeans, SimPlan};

use crate::error::{CliError, Result};
use crate::num;

pub const HEADER: &str = "kind,mu_sd,mu_sr,mu_rd,snr,mu_th,n,seed,value,std_error";

/// The committed reference file, compiled in so the binary is self-contained.
pub const REFERENCE_CSV: &str = include_str!("../fixtures/reference.csv");

/// Path of the committed reference file inside the source tree.
pub const REFERENCE_PATH: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/reference.csv");

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    /// `Pr(gain < mu_th)`.
    Outage { kind: GainKind, mu_th: f64 },
    /// `E[gain]`.
    Mean { kind: GainKind },
}

impl Quantity {
    pub fn label(&self) -> String {
        match self {
            Quantity::Outage { kind, .. } => format!("outage_{}", kind.name()),
            Quantity::Mean { kind } => format!("mean_{}", kind.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixtureQuery {
    pub quantity: Quantity,
    pub means: LinkMeans,
    pub snr: f64,
    pub n: u64,
    pub seed: u64,
}

impl FixtureQuery {
    pub fn compute(&self) -> Result<Estimate> {
        let plan = SimPlan::with_default_streams(self.seed, self.n)?;
        Ok(match self.quantity {
            Quantity::Outage { kind, mu_th } => {
                estimate_outage(&self.means, self.snr, mu_th, kind, &plan)?
            }
            Quantity::Mean { kind } => estimate_mean_gain(&self.means, self.snr, kind, &plan)?,
        })
    }

    pub fn describe(&self) -> String {
        let m = &self.means;
        let mut s = format!(
            "{} means=({}, {}, {}) snr={}",
            self.quantity.label(),
            num(m.mu_sd),
            num(m.mu_sr),
            num(m.mu_rd),
            num(self.snr)
        );
        if let Quantity::Outage { mu_th, .. } = self.quantity {
            let _ = write!(s, " mu_th={}", num(mu_th));
        }
        let _ = write!(s, " n={} seed={}", self.n, self.seed);
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixtureRow {
    pub query: FixtureQuery,
    pub value: f64,
    pub std_error: f64,
}

impl FixtureRow {
    pub fn to_csv(&self) -> String {
        let q = &self.query;
        let mu_th = match q.quantity {
            Quantity::Outage { mu_th, .. } => num(mu_th),
            Quantity::Mean { .. } => String::new(),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            q.quantity.label(),
            num(q.means.mu_sd),
            num(q.means.mu_sr),
            num(q.means.mu_rd),
            num(q.snr),
            mu_th,
            q.n,
            q.seed,
            num(self.value),
            num(self.std_error)
        )
    }
}

/// Queries archived in the reference file.
pub fn reference_queries() -> Vec<FixtureQuery> {
    let unit = LinkMeans::unit();
    let q = |quantity, means, snr| FixtureQuery {
        quantity,
        means,
        snr,
        n: 10_000_000,
        seed: 1,
    };
    vec![
        q(
            Quantity::Outage {
                kind: GainKind::Exact,
                mu_th: 0.3,
            },
            unit,
            10.0,
        ),
        q(
            Quantity::Mean {
                kind: GainKind::ExactRelay,
            },
            unit,
            0.01,
        ),
        q(
            Quantity::Mean {
                kind: GainKind::Min3Relay,
            },
            unit,
            0.01,
        ),
        q(
            Quantity::Mean {
                kind: GainKind::Min2Relay,
            },
            unit,
            0.01,
        ),
        q(
            Quantity::Mean {
                kind: GainKind::ExactRelay,
            },
            LinkMeans::new(1.0, 1.0, 0.1).expect("valid means"),
            1.0,
        ),
    ]
}

pub fn render(rows: &[FixtureRow]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

/// Parse and integrity-check a fixture file's contents.
pub fn parse(text: &str, path: &Path) -> Result<Vec<FixtureRow>> {
    let fail = |line: usize, reason: String| CliError::Fixture {
        path: path.to_path_buf(),
        reason: format!("line {line}: {reason}"),
    };
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        Some((i, h)) => return Err(fail(i + 1, format!("bad header {h:?}"))),
        None => return Err(fail(0, "empty file".into())),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        rows.push(parse_row(line).map_err(|reason| fail(i + 1, reason))?);
    }
    if rows.is_empty() {
        return Err(fail(1, "no data rows".into()));
    }
    Ok(rows)
}

pub fn load(path: Option<&Path>) -> Result<(Vec<FixtureRow>, String)> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            Ok((parse(&text, p)?, p.display().to_string()))
        }
        None => Ok((
            parse(REFERENCE_CSV, Path::new(REFERENCE_PATH))?,
            "built-in reference".to_string(),
        )),
    }
}

fn parse_row(line: &str) -> std::result::Result<FixtureRow, String> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 10 {
        return Err(format!("expected 10 fields, found {}", fields.len()));
    }
    let real = |idx: usize, name: &str| -> std::result::Result<f64, String> {
        fields[idx]
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("{name} {:?} is not a finite number", fields[idx]))
    };
    let (mu_sd, mu_sr, mu_rd) = (real(1, "mu_sd")?, real(2, "mu_sr")?, real(3, "mu_rd")?);
    let means = LinkMeans::new(mu_sd, mu_sr, mu_rd).map_err(|e| e.to_string())?;
    let snr = real(4, "snr")?;
    if snr <= 0.0 {
        return Err(format!("snr {snr} must be positive"));
    }
    let n: u64 = fields[6]
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("n {:?} is not a positive integer", fields[6]))?;
    let seed: u64 = fields[7]
        .parse()
        .map_err(|_| format!("seed {:?} is not a 64-bit unsigned integer", fields[7]))?;
    let value = real(8, "value")?;
    let std_error = real(9, "std_error")?;
    if std_error < 0.0 {
        return Err(format!("std_error {std_error} is negative"));
    }

    let kind_of = |name: &str| {
        GainKind::from_name(name).ok_or_else(|| format!("unknown kind {:?}", fields[0]))
    };
    let quantity = if let Some(name) = fields[0].strip_prefix("outage_") {
        let mu_th = real(5, "mu_th")?;
        if mu_th < 0.0 {
            return Err(format!("mu_th {mu_th} is negative"));
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(format!("outage value {value} outside [0, 1]"));
        }
        // The standard error of a proportion is fixed by the value and n.
        let expected_se = (value * (1.0 - value) / n as f64).sqrt();
        if (std_error - expected_se).abs() > 1e-9 * expected_se.max(1e-300) {
            return Err(format!(
                "std_error {std_error} inconsistent with value {value} and n {n} (expected {expected_se})"
            ));
        }
        Quantity::Outage {
            kind: kind_of(name)?,
            mu_th,
        }
    } else if let Some(name) = fields[0].strip_prefix("mean_") {
        if !fields[5].is_empty() {
            return Err("mu_th must be empty for mean rows".into());
        }
        if value < 0.0 {
            return Err(format!("mean gain {value} is negative"));
        }
        Quantity::Mean {
            kind: kind_of(name)?,
        }
    } else {
        return Err(format!("unknown kind {:?}", fields[0]));
    };

    Ok(FixtureRow {
        query: FixtureQuery {
            quantity,
            means,
            snr,
            n,
            seed,
        },
        value,
        std_error,
    })
}
