//! Combining domain and task weights, with the clamp and clip rules and
//! both scale options.

use hybrid_transfer::pipeline::{hybrid_weights, CombineScale, HybridConfig, NegativePolicy};
use hybrid_transfer::Result;

pub fn run_example() -> Result<()> {
    let domain = [1.0, 0.5, 20.0, 2.0, 0.8];
    let task = [0.0, -2.0, 5.0, 1.5, -0.3];

    let configs = [
        ("raw, clamp", HybridConfig::default()),
        (
            "raw, allow",
            HybridConfig {
                negative_policy: NegativePolicy::Allow,
                ..HybridConfig::default()
            },
        ),
        (
            "standardized",
            HybridConfig {
                combine_scale: CombineScale::StandardizedSum,
                ..HybridConfig::default()
            },
        ),
    ];
    println!("domain {domain:?}\ntask   {task:?}");
    for (name, cfg) in configs {
        let hw = hybrid_weights(&domain, &task, &cfg)?;
        println!(
            "{name:<13} {:?}  clipped {} clamped {}",
            hw.weights.values, hw.clipped, hw.clamped
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
