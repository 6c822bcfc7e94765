//! Necessary-condition battery, structural flags from the zero pattern,
//! and semigroup asymptotics (the power limit and its generator).
//!
//! A failed report proves non-embeddability; a passing report proves
//! nothing, since the conditions are necessary but far from sufficient.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{
    expm, spectrum, validate_stochastic, vector_rank, RateMatrix, SquareMatrix, StochasticMatrix,
};

/// Outcome of the six necessary conditions. `failures` cites the violated
/// condition by its number (1)-(6); condition (1), the spectral mapping
/// relation, is not independently checkable without a generator and is
/// folded into (2)-(4).
#[derive(Debug, Clone, Serialize)]
pub struct NecessityReport {
    pub det_ok: bool,
    pub det_value: f64,
    pub no_zero_eigenvalue: bool,
    pub elving_ok: bool,
    pub negative_real_even_multiplicity: bool,
    pub positivity_or_reducible: bool,
    pub transitivity_ok: bool,
    pub overall: bool,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

/// Zero-pattern flags, computed exactly from the strict-positivity
/// threshold (the validation tolerance: entries in (0, tol] count as zero).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StructureFlags {
    pub positive: bool,
    pub irreducible: bool,
    pub primitive: bool,
    pub doubly_stochastic: bool,
    pub symmetric: bool,
}

/// Runs the six-point battery. `overall = false` proves the matrix is not
/// embeddable.
pub fn necessary_conditions(m: &StochasticMatrix) -> NecessityReport {
    let d = m.dim();
    let tol = m.tol().max(1e-12);
    let mut failures = Vec::new();
    let mut notes = Vec::new();

    let det = m.matrix().det();
    let is_identity = m
        .matrix()
        .sub(&SquareMatrix::identity(d))
        .max_abs()
        <= tol;
    let mut det_ok = det > tol && det <= 1.0 + tol;
    if det_ok && (det - 1.0).abs() <= tol && !is_identity {
        det_ok = false;
        failures.push(format!(
            "(2) determinant {det:.6e} equals 1 but the matrix is not the identity"
        ));
    } else if !det_ok {
        failures.push(format!("(2) determinant {det:.6e} not in (0, 1]"));
    }

    let spec = spectrum(m.matrix()).ok();
    let mut no_zero_eigenvalue = true;
    let mut elving_ok = true;
    let mut negative_even = true;
    if let Some(spec) = &spec {
        let scale = 1.0 + spec.spectral_radius();
        for &(lambda, mult) in &spec.eigenvalues {
            let modulus = lambda.norm();
            if modulus <= tol * scale {
                no_zero_eigenvalue = false;
                failures.push(format!(
                    "(2) eigenvalue {:.3e}{:+.3e}i vanishes to tolerance",
                    lambda.re, lambda.im
                ));
                continue;
            }
            let is_one = (lambda.re - 1.0).abs() <= tol * scale && lambda.im.abs() <= tol * scale;
            if !is_one {
                if modulus > 1.0 + tol * scale {
                    elving_ok = false;
                    failures.push(format!(
                        "(3) eigenvalue {:.6e}{:+.6e}i has modulus {modulus:.6e} > 1",
                        lambda.re, lambda.im
                    ));
                } else if (modulus - 1.0).abs() <= tol * scale {
                    notes.push(format!(
                        "(3) eigenvalue {:.6e}{:+.6e}i lies on the unit circle to within tolerance; verdict undecided for this item",
                        lambda.re, lambda.im
                    ));
                }
            }
            if lambda.im == 0.0 && lambda.re < -tol * scale {
                if mult % 2 != 0 {
                    negative_even = false;
                    failures.push(format!(
                        "(4) negative real eigenvalue {:.6e} has odd algebraic multiplicity {mult}",
                        lambda.re
                    ));
                } else {
                    notes.push(format!(
                        "(4) negative real eigenvalue {:.6e} counted with multiplicity {mult}; near-real values are treated as real",
                        lambda.re
                    ));
                }
            }
        }
    } else {
        notes.push("spectrum computation failed; eigenvalue conditions not checked".into());
    }

    let flags = structure_flags(m);
    let positivity_or_reducible = flags.positive || !flags.irreducible;
    if !positivity_or_reducible {
        failures.push("(5) matrix is irreducible but not positive".into());
    }

    let transitivity_ok = transitivity_holds(m);
    if !transitivity_ok {
        failures.push("(6) positivity pattern is not transitive (M_ij > 0 and M_jk > 0 but M_ik = 0)".into());
    }

    let overall = det_ok
        && no_zero_eigenvalue
        && elving_ok
        && negative_even
        && positivity_or_reducible
        && transitivity_ok;
    NecessityReport {
        det_ok,
        det_value: det,
        no_zero_eigenvalue,
        elving_ok,
        negative_real_even_multiplicity: negative_even,
        positivity_or_reducible,
        transitivity_ok,
        overall,
        failures,
        notes,
    }
}

fn positive_pattern(m: &StochasticMatrix) -> Vec<Vec<bool>> {
    let d = m.dim();
    let tol = m.tol();
    (0..d)
        .map(|i| (0..d).map(|j| m.matrix()[(i, j)] > tol).collect())
        .collect()
}

fn bool_matmul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).any(|k| a[i][k] && b[k][j]))
                .collect()
        })
        .collect()
}

fn transitivity_holds(m: &StochasticMatrix) -> bool {
    let p = positive_pattern(m);
    let d = p.len();
    for i in 0..d {
        for j in 0..d {
            if !p[i][j] {
                continue;
            }
            if p[j].iter().zip(&p[i]).any(|(&jk, &ik)| jk && !ik) {
                return false;
            }
        }
    }
    true
}

/// Graph-theoretic flags from the zero pattern.
pub fn structure_flags(m: &StochasticMatrix) -> StructureFlags {
    let d = m.dim();
    let tol = m.tol();
    let p = positive_pattern(m);
    let positive = p.iter().all(|row| row.iter().all(|&v| v));

    // irreducible: closure of the digraph reaches every pair
    let mut closure = p.clone();
    for _ in 0..d {
        let next = bool_matmul(&closure, &p);
        let merged: Vec<Vec<bool>> = closure
            .iter()
            .zip(&next)
            .map(|(r1, r2)| r1.iter().zip(r2).map(|(&a, &b)| a || b).collect())
            .collect();
        if merged == closure {
            break;
        }
        closure = merged;
    }
    let irreducible = closure.iter().all(|row| row.iter().all(|&v| v));

    // primitive: some boolean power is all-positive; the Wielandt bound
    // (d-1)^2 + 1 caps the search
    let mut primitive = positive;
    if irreducible && !primitive {
        let mut power = p.clone();
        for _ in 0..(d - 1) * (d - 1) + 1 {
            power = bool_matmul(&power, &p);
            if power.iter().all(|row| row.iter().all(|&v| v)) {
                primitive = true;
                break;
            }
        }
    }

    let doubly_stochastic = m
        .matrix()
        .col_sums()
        .iter()
        .all(|s| (s - 1.0).abs() <= tol.max(1e-12) * d as f64);
    let symmetric = m.matrix().is_symmetric(tol.max(1e-12));
    StructureFlags {
        positive,
        irreducible,
        primitive,
        doubly_stochastic,
        symmetric,
    }
}

/// The power limit M_inf = lim M^n, which exists exactly when 1 is the only
/// eigenvalue on the unit circle. Computed by repeated squaring.
pub fn limit_matrix(m: &StochasticMatrix) -> Result<StochasticMatrix> {
    let tol = m.tol().max(1e-12);
    let spec = spectrum(m.matrix())?;
    let scale = 1.0 + spec.spectral_radius();
    for &(lambda, _) in &spec.eigenvalues {
        let is_one = (lambda.re - 1.0).abs() <= tol * scale && lambda.im.abs() <= tol * scale;
        if !is_one && lambda.norm() >= 1.0 - tol * scale {
            return Err(Error::PeripheralSpectrum);
        }
    }
    let mut x = m.matrix().clone();
    for _ in 0..60 {
        let next = x.matmul(&x);
        if next.sub(&x).inf_norm() < 1e-12 {
            return validate_stochastic(&next, 1e-7);
        }
        x = next;
    }
    Err(Error::PeripheralSpectrum)
}

/// Verifies the algebraic containment R = M_inf - I in both
/// span{Q, ..., Q^{d-1}} and span{A, ..., A^{d-1}} (A = M - I), given that
/// exp(Q) reproduces M.
pub fn check_r_in_alg(m: &StochasticMatrix, q: &RateMatrix) -> Result<bool> {
    let residual = expm(q.matrix(), 1.0).sub(m.matrix()).inf_norm();
    if residual > 1e-7 * (1.0 + m.matrix().inf_norm()) {
        return Err(Error::OracleMismatch { residual });
    }
    let d = m.dim();
    let r = limit_matrix(m)?
        .matrix()
        .sub(&SquareMatrix::identity(d));
    let a = m.matrix().sub(&SquareMatrix::identity(d));
    Ok(span_contains(q.matrix(), &r, 1e-7) && span_contains(&a, &r, 1e-7))
}

/// Least-squares membership of `target` in span{B, B^2, ..., B^{d-1}},
/// measured by the max-norm residual of the orthogonal projection.
fn span_contains(b: &SquareMatrix, target: &SquareMatrix, tol: f64) -> bool {
    let d = b.dim();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut power = b.clone();
    for _ in 1..d {
        let norm = power.entries().iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-300 {
            basis.push(power.entries().iter().map(|v| v / norm).collect());
        }
        power = power.matmul(b);
    }
    // orthonormalize, then project
    let rank = vector_rank(&basis, 1e-12);
    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(rank);
    for v in &basis {
        let mut w = v.clone();
        for o in &ortho {
            let proj: f64 = w.iter().zip(o).map(|(a, b)| a * b).sum();
            for (wi, oi) in w.iter_mut().zip(o) {
                *wi -= proj * oi;
            }
        }
        let n: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            w.iter_mut().for_each(|x| *x /= n);
            ortho.push(w);
        }
    }
    let mut resid: Vec<f64> = target.entries().to_vec();
    for o in &ortho {
        let proj: f64 = resid.iter().zip(o).map(|(a, b)| a * b).sum();
        for (ri, oi) in resid.iter_mut().zip(o) {
            *ri -= proj * oi;
        }
    }
    resid.iter().fold(0.0f64, |m, v| m.max(v.abs())) <= tol
}
