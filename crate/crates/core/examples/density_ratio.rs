//! Domain weights from a linear source/target discriminator, and Gaussian
//! density-ratio weights, on a one-dimensional mean shift.
//!
//! Source is N(0, 1) and target N(1, 1), so the true ratio
//! p_T(x) / p_S(x) is exp(x - 0.5).

use hybrid_transfer::density_ratio::{domain_weight, fit_domain_discriminator, fit_gaussian_model, gaussian_weight};
use hybrid_transfer::{Dataset, Domain, Result};
use rand::Rng;
use rand_distr::StandardNormal;

fn sample(domain: Domain, mean: f64, n: usize, seed: u64) -> Result<Dataset> {
    let mut rng = hybrid_transfer::rng::stream(seed, "example/density", 0);
    let x: Vec<f64> = (0..n).map(|_| mean + rng.sample::<f64, _>(StandardNormal)).collect();
    Dataset::new(domain, 1, x, vec![0; n])
}

pub fn run_example() -> Result<()> {
    let source = sample(Domain::Source, 0.0, 5000, 1)?;
    let target = sample(Domain::Target, 1.0, 5000, 2)?;

    let disc = fit_domain_discriminator(&source, &target, 1e-4, true)?;
    println!(
        "discriminator: slope {:.4}, intercept {:.4}, converged {}",
        disc.w_lr[0], disc.c_lr, disc.converged
    );
    let gauss = fit_gaussian_model(&source, &target, 1e-3)?;

    println!("{:>5} {:>10} {:>12} {:>10}", "x", "true", "discriminat", "gaussian");
    for x in [-1.0, 0.0, 0.5, 1.0, 2.0] {
        let truth = f64::exp(x - 0.5);
        let d = domain_weight(&disc, &[x])?.value;
        let g = gaussian_weight(&gauss, &[x])?.value;
        println!("{x:>5} {truth:>10.4} {d:>12.4} {g:>10.4}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
