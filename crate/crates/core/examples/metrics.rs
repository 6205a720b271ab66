//! Metrics from a confusion matrix, AUC, and the paired sign test.

use hybrid_transfer::metrics::{auc, sign_test, Confusion, Metrics};
use hybrid_transfer::Result;

pub fn run_example() -> Result<()> {
    let c = Confusion {
        tp: 1,
        fp: 3,
        fn_: 2,
        tn: 94,
    };
    let m = Metrics::from_confusion(c);
    println!(
        "TP=1 FP=3 FN=2 TN=94: precision {:.4} recall {:.4} F1+ {:.4} F1- {:.4} macro-F1 {:.4} accuracy {:.4}",
        m.precision, m.recall, m.f1_positive, m.f1_negative, m.macro_f1, m.accuracy
    );
    println!("AUC of a toy ranking: {}", auc(&[0.1, 0.4, 0.35, 0.8], &[0, 0, 1, 1]));

    let a: Vec<f64> = (0..20).map(|i| if i < 15 { 0.7 } else { 0.5 }).collect();
    let b = vec![0.6; 20];
    let t = sign_test(&a, &b);
    println!("sign test: {} wins, {} losses, p = {:.5}", t.wins, t.losses, t.p_value);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
