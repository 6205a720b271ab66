//! Test-set macro-F1 across a grid of alpha values, with the source weights
//! computed once and reused.

use hybrid_transfer::bench::tenths_grid;
use hybrid_transfer::pipeline::{alpha_sweep, BaselineKind, PipelineSettings};
use hybrid_transfer::{synth_shift, Hyperparams, Result, ShiftScenario, Standardizer};

pub fn run_example() -> Result<()> {
    let scn = ShiftScenario {
        n_source: 2000,
        n_target_test: 1000,
        ..ShiftScenario::default()
    };
    let splits = synth_shift(&scn)?;
    let st = Standardizer::fit(&[&splits.source, &splits.target_train])?;
    let (source, target, test) = (
        st.apply(&splits.source)?,
        st.apply(&splits.target_train)?,
        st.apply(&splits.target_test)?,
    );
    let settings = PipelineSettings {
        hyperparams: Hyperparams {
            boosting_rounds: 100,
            ..Hyperparams::default()
        },
        ..PipelineSettings::default()
    };
    let curve = alpha_sweep(BaselineKind::Hybrid, &source, &target, &test, &tenths_grid(), &settings)?;
    println!("alpha,precision,recall,macro_f1,accuracy");
    for p in &curve {
        let m = &p.metrics;
        println!(
            "{},{:.4},{:.4},{:.4},{:.4}",
            p.alpha, m.precision, m.recall, m.macro_f1, m.accuracy
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
