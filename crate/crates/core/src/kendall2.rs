//! Complete, constructive solution of the d = 2 embedding problem, with
//! its uniqueness guarantee. A 2x2 Markov matrix [[1-a, a], [b, 1-b]] is
//! embeddable exactly when det M = 1 - a - b > 0, and then the unique rate
//! matrix is Q = -(log(1-a-b)/(a+b)) (M - I).

use crate::error::{Error, Result};
use crate::matcore::{validate_generator, validate_stochastic, SquareMatrix, StochasticMatrix};
use crate::verdict::{embeddable_checked, EmbedVerdict, Provenance};

/// Off-diagonal parameters of a 2x2 Markov matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoByTwoParams {
    pub a: f64,
    pub b: f64,
}

impl TwoByTwoParams {
    pub fn from_matrix(m: &StochasticMatrix) -> Result<Self> {
        if m.dim() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "two-state solver got a {}x{} matrix",
                m.dim(),
                m.dim()
            )));
        }
        Ok(Self {
            a: m.matrix()[(0, 1)],
            b: m.matrix()[(1, 0)],
        })
    }
}

/// Decides embeddability of a 2x2 Markov matrix.
pub fn embed_2x2(m: &StochasticMatrix) -> Result<EmbedVerdict> {
    let p = TwoByTwoParams::from_matrix(m)?;
    let s = p.a + p.b;
    let det = 1.0 - s;
    let tol = m.tol();
    if s == 0.0 {
        let q = validate_generator(&SquareMatrix::zeros(2), tol)?;
        return Ok(embeddable_checked(Provenance::Kendall, vec![q], m));
    }
    if det <= tol {
        // determinant must be strictly positive; the det = 0 face is
        // excluded
        return Ok(EmbedVerdict::not_embeddable(format!(
            "(2) determinant {det:.6e} of the 2x2 matrix is not strictly positive"
        )));
    }
    // -log1p(-s)/s stays accurate as s -> 0
    let factor = -(-s).ln_1p() / s;
    let a_mat = m.matrix().sub(&SquareMatrix::identity(2));
    let q = validate_generator(&a_mat.scale(factor), tol)?;
    Ok(embeddable_checked(Provenance::Kendall, vec![q], m))
}

/// Closed-form semigroup for the general 2x2 rate matrix with off-diagonal
/// rates alpha, beta: exp(tQ) = I + phi(t) Q with
/// phi(t) = (1 - e^{-(alpha+beta) t})/(alpha + beta), including the
/// alpha + beta = 0 limit.
pub fn exp_2x2(alpha: f64, beta: f64, t: f64) -> StochasticMatrix {
    assert!(alpha >= 0.0 && beta >= 0.0 && t >= 0.0, "rates and time must be non-negative");
    let s = alpha + beta;
    let phi = if s == 0.0 {
        t
    } else {
        -(-s * t).exp_m1() / s
    };
    let m = SquareMatrix::from_rows(&[
        vec![1.0 - phi * alpha, phi * alpha],
        vec![phi * beta, 1.0 - phi * beta],
    ])
    .expect("2x2 closed form is well-formed");
    validate_stochastic(&m, 1e-12).expect("closed-form exponential is Markov")
}
