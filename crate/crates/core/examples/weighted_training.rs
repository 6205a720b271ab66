//! Training both learners on the blended target/source objective, reading
//! back the objective, and saving a model as JSON.

use hybrid_transfer::learner::{train_weighted, weighted_objective};
use hybrid_transfer::metrics::evaluate;
use hybrid_transfer::{
    synth_shift, Hyperparams, LearnerKind, Model, Result, ShiftScenario, Standardizer, WeightVector,
};

pub fn run_example() -> Result<()> {
    let scn = ShiftScenario {
        n_source: 1500,
        positive_rate_source: 0.1,
        positive_rate_target: 0.1,
        ..ShiftScenario::default()
    };
    let splits = synth_shift(&scn)?;
    let st = Standardizer::fit(&[&splits.source, &splits.target_train])?;
    let (source, target, test) = (
        st.apply(&splits.source)?,
        st.apply(&splits.target_train)?,
        st.apply(&splits.target_test)?,
    );
    let w = WeightVector::ones(source.n());

    for learner in [LearnerKind::LogReg, LearnerKind::BoostedStumps] {
        for alpha in [0.2, 0.8] {
            let hp = Hyperparams {
                alpha,
                boosting_rounds: 100,
                ..Hyperparams::default()
            };
            let model = train_weighted(learner, &target, &source, &w, &hp)?;
            let obj = weighted_objective(&model, &target, &source, &w, alpha)?;
            let m = evaluate(&model, &test)?;
            println!(
                "{:<15} alpha {alpha}: objective {:.4} (+ penalty {:.2e}), test macro-F1 {:.3}",
                learner.as_str(),
                obj.value,
                obj.l2_penalty,
                m.macro_f1
            );
            let back = Model::from_json(&model.to_json()?)?;
            assert_eq!(back.predict_labels(&test)?, model.predict_labels(&test)?);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
