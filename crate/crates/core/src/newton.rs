//! Damped multivariate Newton iteration with a finite-difference Jacobian,
//! shared by the closed-form family inversions.

use crate::error::{Error, Result};
use crate::matcore::SquareMatrix;

pub(crate) struct NewtonOptions {
    pub residual_target: f64,
    pub max_iters: usize,
    /// Clamp iterates into the non-negative orthant for coordinates listed
    /// here (parameter constraints of the generator families).
    pub nonneg: Vec<usize>,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            residual_target: 1e-10,
            max_iters: 200,
            nonneg: Vec::new(),
        }
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves f(x) = target. Returns the solution and its residual.
pub(crate) fn damped_newton<F>(
    f: F,
    target: &[f64],
    x0: &[f64],
    opts: &NewtonOptions,
) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x0.len();
    debug_assert_eq!(target.len(), n);
    let clamp = |x: &mut Vec<f64>| {
        for &i in &opts.nonneg {
            if x[i] < 0.0 {
                x[i] = 0.0;
            }
        }
    };
    let residual_vec = |x: &[f64]| -> Vec<f64> {
        f(x).iter().zip(target).map(|(a, b)| a - b).collect()
    };

    let mut x = x0.to_vec();
    clamp(&mut x);
    let mut r = residual_vec(&x);
    let mut rnorm = inf_norm(&r);
    for _ in 0..opts.max_iters {
        if rnorm <= opts.residual_target {
            return Ok((x, rnorm));
        }
        // central-difference Jacobian
        let mut jac = SquareMatrix::zeros(n.max(2));
        for j in 0..n {
            let h = 1e-7 * (1.0 + x[j].abs());
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let fp = residual_vec(&xp);
            let fm = residual_vec(&xm);
            for i in 0..n {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        // pad the 1x1 case into the 2x2 carrier
        if n == 1 {
            jac[(1, 1)] = 1.0;
        }
        let mut rhs = vec![0.0; n.max(2)];
        rhs[..n].copy_from_slice(&r);
        let step = match jac.solve(&rhs) {
            Ok(s) => s,
            Err(_) => {
                return Err(Error::ConvergenceFailure {
                    method: "damped Newton (singular Jacobian)",
                    residual: rnorm,
                })
            }
        };
        // damping by halving until the residual decreases
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let mut cand: Vec<f64> = x
                .iter()
                .enumerate()
                .map(|(i, &xi)| xi - lambda * step[i])
                .collect();
            clamp(&mut cand);
            let cr = residual_vec(&cand);
            let crn = inf_norm(&cr);
            if crn < rnorm {
                x = cand;
                r = cr;
                rnorm = crn;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if rnorm <= opts.residual_target {
        Ok((x, rnorm))
    } else {
        Err(Error::ConvergenceFailure {
            method: "damped Newton",
            residual: rnorm,
        })
    }
}
