//! Equal-input (Felsenstein) matrices at any dimension: detection,
//! embedding with the unique equal-input generator, composition, and
//! centraliser tests. An equal-input Markov matrix is (1-c) I + C where C
//! has equal rows (c_1, ..., c_d) and summatory parameter c = sum c_i; the
//! transition i -> j (i != j) depends only on j.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{validate_generator, validate_stochastic, RateMatrix, SquareMatrix, StochasticMatrix};
use crate::verdict::{embeddable_checked, EmbedVerdict, Provenance};

/// Column parameters of an equal-input matrix (or, read as rates, of an
/// equal-input generator Q = C - c I).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualInputParams {
    pub c_vec: Vec<f64>,
    pub c_sum: f64,
    pub constant_input: bool,
}

impl EqualInputParams {
    /// Builds parameters from explicit column values (all >= 0).
    pub fn new(c_vec: Vec<f64>) -> Result<Self> {
        if c_vec.len() < 2 {
            return Err(Error::DimensionMismatch(
                "equal-input parameters need dimension >= 2".into(),
            ));
        }
        if c_vec.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::ConstraintViolation(
                "equal-input parameters must be non-negative and finite".into(),
            ));
        }
        let c_sum = c_vec.iter().sum();
        let constant_input = is_constant(&c_vec, 1e-12 * (1.0 + c_sum));
        Ok(Self {
            c_vec,
            c_sum,
            constant_input,
        })
    }

    pub fn dim(&self) -> usize {
        self.c_vec.len()
    }

    /// Markov admissibility of (1-c) I + C: c <= 1 + min(c_i).
    pub fn markov_admissible(&self) -> bool {
        let min = self.c_vec.iter().cloned().fold(f64::INFINITY, f64::min);
        self.c_sum <= 1.0 + min + 1e-12
    }

    /// The Markov matrix (1-c) I + C.
    pub fn matrix(&self) -> SquareMatrix {
        let d = self.dim();
        let mut m = SquareMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.c_vec[j] + if i == j { 1.0 - self.c_sum } else { 0.0 };
            }
        }
        m
    }

    /// The generator C - c I (Metzler exactly when all c_i >= 0).
    pub fn generator_matrix(&self) -> SquareMatrix {
        let d = self.dim();
        let mut q = SquareMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                q[(i, j)] = self.c_vec[j] - if i == j { self.c_sum } else { 0.0 };
            }
        }
        q
    }
}

fn is_constant(v: &[f64], tol: f64) -> bool {
    let first = v[0];
    v.iter().all(|&x| (x - first).abs() <= tol)
}

/// Detects equal-input structure: all off-diagonal column entries constant
/// within `tol` and the diagonal consistent with (1-c) I + C.
pub fn detect_equal_input(m: &StochasticMatrix, tol: f64) -> Option<EqualInputParams> {
    let d = m.dim();
    let mat = m.matrix();
    let mut c_vec = Vec::with_capacity(d);
    for j in 0..d {
        let off: Vec<f64> = (0..d).filter(|&i| i != j).map(|i| mat[(i, j)]).collect();
        let mean = off.iter().sum::<f64>() / off.len() as f64;
        if off.iter().any(|&v| (v - mean).abs() > tol) {
            return None;
        }
        c_vec.push(mean.max(0.0));
    }
    let c_sum: f64 = c_vec.iter().sum();
    for j in 0..d {
        if (mat[(j, j)] - (1.0 - c_sum + c_vec[j])).abs() > tol * d as f64 {
            return None;
        }
    }
    EqualInputParams::new(c_vec).ok()
}

/// Closed-form exponential of the equal-input generator Q = C - c I:
/// exp(Q) = I + ((1 - e^{-c})/c) Q, an equal-input Markov matrix with
/// summatory parameter 1 - e^{-c}.
pub fn ei_exp(q_params: &EqualInputParams) -> StochasticMatrix {
    let c = q_params.c_sum;
    let phi = if c == 0.0 { 1.0 } else { -(-c).exp_m1() / c };
    let m = SquareMatrix::identity(q_params.dim()).add(&q_params.generator_matrix().scale(phi));
    validate_stochastic(&m, 1e-12).expect("equal-input exponential is Markov")
}

/// Decides equal-input embeddability. For parameter sum c in [0, 1) the
/// unique equal-input generator is returned. For c >= 1: even dimensions
/// are never embeddable; odd dimensions with c > 1 stay undecided here
/// (other generator types can still work and are handled by the d = 3
/// class solvers and the branch search); c = 1 has determinant 0.
pub fn ei_embed(m: &StochasticMatrix) -> Result<EmbedVerdict> {
    let params = detect_equal_input(m, m.tol()).ok_or(Error::NotEqualInput)?;
    let d = m.dim();
    let c = params.c_sum;
    let tol = m.tol();
    if (c - 1.0).abs() <= tol {
        return Ok(EmbedVerdict::not_embeddable(format!(
            "(2) equal-input parameter sum c = {c:.6e} gives determinant (1-c)^{} = 0",
            d - 1
        )));
    }
    if c < 1.0 {
        if c == 0.0 {
            let q = validate_generator(&SquareMatrix::zeros(d), tol)?;
            return Ok(embeddable_checked(Provenance::EqualInput, vec![q], m));
        }
        // log M = -(log(1-c)/c) (M - I); log1p keeps precision near c = 0
        let factor = -(-c).ln_1p() / c;
        let a = m.matrix().sub(&SquareMatrix::identity(d));
        let q = validate_generator(&a.scale(factor), tol)?;
        let verdict = embeddable_checked(Provenance::EqualInput, vec![q], m)
            .with_note("the equal-input generator is unique");
        return Ok(verdict);
    }
    if d.is_multiple_of(2) {
        return Ok(EmbedVerdict::not_embeddable(format!(
            "equal-input matrix with parameter sum c = {c:.6e} >= 1 in even dimension {d} is not embeddable"
        )));
    }
    Ok(EmbedVerdict::undecided(format!(
        "equal-input with c = {c:.6e} > 1 in odd dimension {d}: no equal-input generator exists, but other generator types may embed this matrix"
    )))
}

/// Parameters of the product M_C M_C': C'' = (1 - c') C + C' and
/// c'' = c + c' - c c'.
pub fn ei_compose(p: &EqualInputParams, q: &EqualInputParams) -> EqualInputParams {
    debug_assert_eq!(p.dim(), q.dim());
    let c_vec: Vec<f64> = p
        .c_vec
        .iter()
        .zip(&q.c_vec)
        .map(|(&ci, &cpi)| (1.0 - q.c_sum) * ci + cpi)
        .collect();
    let c_sum: f64 = p.c_sum + q.c_sum - p.c_sum * q.c_sum;
    let constant_input = is_constant(&c_vec, 1e-12 * (1.0 + c_sum.abs()));
    EqualInputParams {
        c_vec,
        c_sum,
        constant_input,
    }
}

/// The generator Q'' with exp(Q'') = exp(Q) exp(Q') for equal-input
/// generators Q, Q' (both with positive parameter sum):
/// Q'' = (c+c')/(1-e^{-(c+c')}) ( phi(c) Q + phi(c') Q' + phi(c) phi(c') Q Q' )
/// with phi(c) = (1-e^{-c})/c. Q'' is again equal-input.
pub fn ei_product_generator(
    q1: &EqualInputParams,
    q2: &EqualInputParams,
) -> Result<RateMatrix> {
    let (c, cp) = (q1.c_sum, q2.c_sum);
    if c + cp <= 0.0 {
        return Err(Error::DegenerateSum);
    }
    // Using Q Q' = -c' Q the combination collapses to a positive mixture
    // of Q and Q', so the result is equal-input with parameter sum c + c'.
    let phi = |x: f64| if x == 0.0 { 1.0 } else { -(-x).exp_m1() / x };
    let outer = (c + cp) / (-(-(c + cp)).exp_m1());
    let w1 = outer * phi(c) * (-cp).exp();
    let w2 = outer * phi(cp);
    let combo = q1
        .generator_matrix()
        .scale(w1)
        .add(&q2.generator_matrix().scale(w2));
    validate_generator(&combo, 1e-9)
}

/// Commutation test against an equal-input generator: a rate matrix X
/// commutes with Q = C - c I exactly when the row vector (c_1, ..., c_d)
/// annihilates X. Cross-validated against the direct commutator norm.
pub fn commutes_with_ei(x: &RateMatrix, q: &EqualInputParams) -> bool {
    let d = q.dim();
    debug_assert_eq!(x.dim(), d);
    let tol = 1e-10 * (1.0 + x.matrix().inf_norm()) * (1.0 + q.c_sum);
    let mut row = vec![0.0; d];
    for (j, slot) in row.iter_mut().enumerate() {
        for i in 0..d {
            *slot += q.c_vec[i] * x.matrix()[(i, j)];
        }
    }
    let row_norm = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let by_row = row_norm <= tol;

    let qm = q.generator_matrix();
    let comm = qm.matmul(x.matrix()).sub(&x.matrix().matmul(&qm));
    let by_comm = comm.inf_norm() <= tol * 4.0;
    by_row && by_comm
}
