//! Full-batch gradient descent with a backtracking (Armijo) line search.
//!
//! The trial step of each iteration is the Barzilai-Borwein step from the
//! previous move; backtracking then halves it until the sufficient-decrease
//! condition holds, so accepted objective values never increase.

use crate::error::{Error, Result};

/// A smooth objective over `dim()` parameters.
pub trait Objective {
    fn dim(&self) -> usize;

    /// Objective value; writes the gradient into `grad`.
    fn value_grad(&self, params: &[f64], grad: &mut [f64]) -> f64;

    fn value(&self, params: &[f64]) -> f64 {
        let mut g = vec![0.0; self.dim()];
        self.value_grad(params, &mut g)
    }
}

/// Consecutive accepted steps without a strict decrease before giving up.
const STALL_STEPS: usize = 5;

#[derive(Debug, Clone, Copy)]
pub struct GdOptions {
    pub max_iter: usize,
    pub grad_tol: f64,
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for GdOptions {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            grad_tol: 1e-8,
            armijo: 1e-4,
            max_backtracks: 60,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub params: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after each accepted step, starting with the initial point.
    pub history: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn minimize<O: Objective + ?Sized>(obj: &O, init: Vec<f64>, opts: GdOptions) -> Result<Minimum> {
    let n = obj.dim();
    debug_assert_eq!(init.len(), n);
    let mut x = init;
    let mut g = vec![0.0; n];
    let mut f = obj.value_grad(&x, &mut g);
    if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteObjective);
    }
    let mut history = vec![f];
    let mut gnorm = norm(&g);
    let mut step = 1.0;
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut iterations = 0;
    let mut flat = 0;

    while gnorm >= opts.grad_tol && iterations < opts.max_iter {
        let g2 = gnorm * gnorm;
        let mut t = step;
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            for ((xn, xi), gi) in x_new.iter_mut().zip(&x).zip(&g) {
                *xn = xi - t * gi;
            }
            let f_new = obj.value_grad(&x_new, &mut g_new);
            if f_new.is_finite() && f_new <= f - opts.armijo * t * g2 {
                accepted = Some(f_new);
                break;
            }
            t *= 0.5;
        }
        let Some(f_new) = accepted else {
            // No representable decrease left along the gradient.
            break;
        };
        iterations += 1;
        // Near the optimum the sufficient-decrease margin drops below the
        // resolution of `f` and steps stop making progress.
        flat = if f_new < f { 0 } else { flat + 1 };

        // Barzilai-Borwein trial step for the next iteration.
        let mut ss = 0.0;
        let mut sy = 0.0;
        for i in 0..n {
            let s = x_new[i] - x[i];
            let y = g_new[i] - g[i];
            ss += s * s;
            sy += s * y;
        }
        step = if sy > 0.0 && (ss / sy).is_finite() {
            (ss / sy).clamp(1e-10, 1e10)
        } else {
            (t * 2.0).min(1e10)
        };

        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        f = f_new;
        gnorm = norm(&g);
        history.push(f);
        if flat >= STALL_STEPS {
            break;
        }
    }

    Ok(Minimum {
        params: x,
        value: f,
        grad_norm: gnorm,
        iterations,
        converged: gnorm < opts.grad_tol,
        history,
    })
}
