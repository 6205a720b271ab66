//! Round trip through CSV files: write synthetic splits, load them back
//! (including a combined file with a `domain` column), standardize, and
//! undo the standardization.

use std::fs;

use hybrid_transfer::io::{load_dataset, load_domains, write_dataset, CsvSchema};
use hybrid_transfer::{synth_shift, Domain, Result, ShiftScenario, Standardizer};

pub fn run_example() -> Result<()> {
    let dir = tempfile::tempdir()?;
    let scn = ShiftScenario {
        d: 3,
        n_source: 50,
        n_target_train: 20,
        n_target_test: 20,
        positive_rate_source: 0.2,
        positive_rate_target: 0.2,
        ..ShiftScenario::default()
    };
    let splits = synth_shift(&scn)?;
    let path = dir.path().join("source.csv");
    write_dataset(&path, &splits.source)?;
    let schema = CsvSchema::default();
    let back = load_dataset(&path, &schema, Domain::Source)?;
    assert_eq!(back, splits.source);
    println!(
        "source.csv: {} rows, {} features, {} positives",
        back.n(),
        back.d(),
        back.positives()
    );

    let combined = dir.path().join("combined.csv");
    fs::write(
        &combined,
        "a,b,domain,label\n0.5,1.0,source,1\n-1.0,2.0,target,0\n0.25,0.0,source,0\n",
    )?;
    let (s, t) = load_domains(&combined, &schema)?;
    println!("combined.csv: {} source rows, {} target rows", s.n(), t.n());

    let st = Standardizer::fit(&[&splits.source, &splits.target_train])?;
    let z = st.apply(&splits.target_train)?;
    let restored = st.invert(&z)?;
    let worst = restored
        .features()
        .iter()
        .zip(splits.target_train.features())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("standardize then invert: max abs error {worst:.2e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
