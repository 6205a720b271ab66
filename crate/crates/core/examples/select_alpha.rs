//! Choosing alpha by stratified cross-validation on the target training set.

use hybrid_transfer::pipeline::{select_alpha, BaselineKind, PipelineSettings};
use hybrid_transfer::{synth_shift, LearnerKind, Result, ShiftScenario, Standardizer};

pub fn run_example() -> Result<()> {
    let scn = ShiftScenario {
        n_source: 1000,
        n_target_train: 100,
        positive_rate_source: 0.15,
        positive_rate_target: 0.15,
        ..ShiftScenario::default()
    };
    let splits = synth_shift(&scn)?;
    let st = Standardizer::fit(&[&splits.source, &splits.target_train])?;
    let source = st.apply(&splits.source)?;
    let target = st.apply(&splits.target_train)?;
    let settings = PipelineSettings {
        learner: LearnerKind::LogReg,
        ..PipelineSettings::default()
    };
    let grid = [0.1, 0.3, 0.5, 0.7, 0.9];
    let sel = select_alpha(BaselineKind::Hybrid, &source, &target, &grid, 4, &settings)?;
    for (a, (mean, folds)) in sel.grid.iter().zip(sel.mean_scores.iter().zip(&sel.fold_scores)) {
        let folds: Vec<String> = folds.iter().map(|f| format!("{f:.3}")).collect();
        println!("alpha {a}: mean macro-F1 {mean:.4}  folds [{}]", folds.join(", "));
    }
    println!("selected alpha {}", sel.alpha);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
