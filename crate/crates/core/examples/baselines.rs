//! All six baselines on one synthetic mean-shift split.

use hybrid_transfer::metrics::evaluate;
use hybrid_transfer::pipeline::{build_baseline, BaselineKind, PipelineSettings};
use hybrid_transfer::{synth_shift, Hyperparams, Result, ShiftScenario, Standardizer};

pub fn run_example() -> Result<()> {
    let scn = ShiftScenario {
        n_source: 2000,
        n_target_test: 1000,
        positive_rate_source: 0.1,
        positive_rate_target: 0.1,
        seed: 3,
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

    println!(
        "{:<12} {:>9} {:>7} {:>9} {:>9}",
        "baseline", "precision", "recall", "macro-F1", "accuracy"
    );
    for kind in BaselineKind::ALL {
        let fit = build_baseline(kind, &source, &target, &settings)?;
        let m = evaluate(&fit.model, &test)?;
        println!(
            "{:<12} {:>9.3} {:>7.3} {:>9.3} {:>9.3}",
            kind.as_str(),
            m.precision,
            m.recall,
            m.macro_f1,
            m.accuracy
        );
        if let Some((_, s)) = &fit.weights {
            println!(
                "{:<12} weights min {:.3} mean {:.3} max {:.3}",
                "", s.min, s.mean, s.max
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
