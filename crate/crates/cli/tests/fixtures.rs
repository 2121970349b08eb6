use std::path::Path;

use af_relay_cli::fixtures::{self, FixtureRow, Quantity, HEADER, REFERENCE_CSV};
use af_relay_cli::CliError;

fn parse(text: &str) -> Result<Vec<FixtureRow>, CliError> {
    fixtures::parse(text, Path::new("test.csv"))
}

/// Recompute the archived reference values. Run once, then commit the file:
/// `cargo test -p af-relay-cli --release --test fixtures -- --ignored`
#[test]
#[ignore]
fn regenerate_reference() {
    let rows: Vec<FixtureRow> = fixtures::reference_queries()
        .into_iter()
        .map(|query| {
            let e = query.compute().unwrap();
            FixtureRow {
                query,
                value: e.value,
                std_error: e.std_error,
            }
        })
        .collect();
    std::fs::write(fixtures::REFERENCE_PATH, fixtures::render(&rows)).unwrap();
}

#[test]
fn reference_file_is_well_formed() {
    let rows = parse(REFERENCE_CSV).unwrap();
    let queries = fixtures::reference_queries();
    assert_eq!(rows.len(), queries.len());
    for (row, q) in rows.iter().zip(&queries) {
        assert_eq!(&row.query, q);
    }
    // Round trip through the writer is lossless.
    assert_eq!(fixtures::render(&rows), REFERENCE_CSV);
}

#[test]
fn reference_outage_has_expected_precision() {
    let rows = parse(REFERENCE_CSV).unwrap();
    let outage = rows
        .iter()
        .find(|r| matches!(r.query.quantity, Quantity::Outage { .. }))
        .unwrap();
    assert!(
        outage.std_error > 5e-5 && outage.std_error < 2e-4,
        "{outage:?}"
    );
}

#[test]
fn integrity_failures_are_reported() {
    let good = REFERENCE_CSV.lines().nth(1).unwrap();
    let cases = [
        String::new(),
        "kind,mu_sd\n".to_string(),
        format!("{HEADER}\n"),
        format!("{HEADER}\n{},extra\n", good),
        format!(
            "{HEADER}\n{}\n",
            good.replacen("outage_exact", "outage_bogus", 1)
        ),
        format!("{HEADER}\nmean_exact_relay,1,1,1,1,,10,1,-0.5,0.1\n"),
        format!("{HEADER}\nmean_exact_relay,1,1,1,1,0.3,10,1,0.5,0.1\n"),
        format!("{HEADER}\noutage_exact,1,1,1,10,0.3,100,1,0.5,0.01\n"),
        format!("{HEADER}\noutage_exact,1,1,1,10,0.3,100,1,1.5,0\n"),
        format!("{HEADER}\noutage_exact,0,1,1,10,0.3,100,1,0.5,0.05\n"),
        format!("{HEADER}\noutage_exact,1,1,1,10,0.3,0,1,0.5,0.05\n"),
        format!("{HEADER}\noutage_exact,1,1,1,10,0.3,100,-1,0.5,0.05\n"),
        format!("{HEADER}\noutage_exact,1,1,1,nan,0.3,100,1,0.5,0.05\n"),
    ];
    for text in &cases {
        match parse(text) {
            Err(e @ CliError::Fixture { .. }) => assert_eq!(e.exit_code(), 5),
            other => panic!("{text:?} accepted: {other:?}"),
        }
    }
    let ok = format!("{HEADER}\noutage_exact,1,1,1,10,0.3,100,1,0.5,0.05\n");
    assert_eq!(parse(&ok).unwrap().len(), 1);
}
