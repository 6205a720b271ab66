//! Signed task-relevance weights: a model fit on source and target together
//! scores each source sample; correctly classified samples get `+|margin|`,
//! misclassified ones `-|margin|`.

use hybrid_transfer::task_relevance::{fit_union_model, task_weights_for_source};
use hybrid_transfer::{synth_shift, Hyperparams, LearnerKind, Result, ShiftScenario, Standardizer};

pub fn run_example() -> Result<()> {
    let scn = ShiftScenario {
        n_source: 1000,
        positive_rate_source: 0.2,
        positive_rate_target: 0.2,
        ..ShiftScenario::default()
    };
    let splits = synth_shift(&scn)?;
    let st = Standardizer::fit(&[&splits.source, &splits.target_train])?;
    let source = st.apply(&splits.source)?;
    let target = st.apply(&splits.target_train)?;

    for learner in [LearnerKind::LogReg, LearnerKind::BoostedStumps] {
        let union = fit_union_model(&source, &target, &Hyperparams::default(), learner)?;
        let report = task_weights_for_source(&union, &source)?;
        let mean = report.weights.iter().sum::<f64>() / report.weights.len() as f64;
        println!(
            "{:<15} union model {}  margin {:<15} mean w_task {:>7.3}  negative {:.1}%",
            learner.as_str(),
            report.union_model_id,
            report.margin_kind,
            mean,
            100.0 * report.fraction_negative
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
