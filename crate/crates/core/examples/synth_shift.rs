//! The four synthetic shift kinds and how far each moves the target away
//! from the source.

use hybrid_transfer::{synth_shift, Dataset, Result, ShiftKind, ShiftScenario};

fn mean(ds: &Dataset) -> Vec<f64> {
    let mut m = vec![0.0; ds.d()];
    for row in ds.rows() {
        for (a, v) in m.iter_mut().zip(row) {
            *a += v / ds.n() as f64;
        }
    }
    m
}

pub fn run_example() -> Result<()> {
    for kind in [
        ShiftKind::MeanShift,
        ShiftKind::CovarianceShift,
        ShiftKind::LabelRatioShift,
        ShiftKind::MissingSubclass,
    ] {
        let scn = ShiftScenario {
            kind,
            positive_rate_target: if kind == ShiftKind::LabelRatioShift { 0.2 } else { 0.05 },
            ..ShiftScenario::default()
        };
        let s = synth_shift(&scn)?;
        let gap = mean(&s.source)
            .iter()
            .zip(mean(&s.target_test))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        println!(
            "{kind:?}: source {} ({} positive), target test {} ({} positive), mean gap {gap:.3}",
            s.source.n(),
            s.source.positives(),
            s.target_test.n(),
            s.target_test.positives()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
