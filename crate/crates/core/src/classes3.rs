//! Complete d = 3 treatment of symmetric, constant-input, and doubly
//! stochastic Markov matrices: closed-form exponentials, the exact case
//! analyses on the minimal-polynomial degree, and the enumeration of
//! multiple embeddings of one matrix.
//!
//! The general doubly stochastic generator is parametrised by rates
//! (alpha, beta, gamma) and an antisymmetric excess epsilon with
//! |epsilon| <= min(alpha, beta, gamma); its spectrum is
//! {0, -Delta + s, -Delta - s} with Delta = alpha+beta+gamma and
//! s^2 = alpha^2+beta^2+gamma^2 - alpha beta - beta gamma - gamma alpha
//!       - 3 epsilon^2,
//! which may be negative. All closed forms below are functions of s^2
//! only, so one analytic helper covers the hyperbolic, trigonometric and
//! degenerate regimes uniformly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{
    expm, spectrum, validate_generator, validate_stochastic, RateMatrix, SquareMatrix,
    StochasticMatrix,
};
use crate::newton::{damped_newton, NewtonOptions};
use crate::verdict::{embeddable_checked, EmbedVerdict, GeneratorWitness, Provenance, WITNESS_RESIDUAL_TOL};

/// Off-diagonal entries (a, b, c) of a symmetric 3x3 Markov matrix
/// [[1-a-b, a, b], [a, 1-a-c, c], [b, c, 1-b-c]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Parameters (a, b, c, e) of a doubly stochastic 3x3 Markov matrix
/// [[1-a-b, a+e, b-e], [a-e, 1-a-c, c+e], [b+e, c-e, 1-b-c]]; e is the
/// antisymmetric excess, e = 0 being the symmetric case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DStochParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub e: f64,
}

/// Minimal-polynomial classification of a 3x3 Markov matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MinPolyCase {
    Deg1,
    Deg2Double1,
    Deg2Simple1,
    Deg3,
}

/// The three sharp scalar conditions a symmetric matrix must satisfy to be
/// embeddable with a symmetric generator.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SymNecessityReport {
    pub det_ok: bool,
    pub trace_ok: bool,
    pub product_ok: bool,
    pub overall: bool,
}

const PI: f64 = std::f64::consts::PI;

fn sqrt3() -> f64 {
    3.0f64.sqrt()
}

/// Width of the exceptional constant-input window: e^{-pi sqrt(3)}.
pub fn exceptional_gap() -> f64 {
    (-PI * sqrt3()).exp()
}

/// The constant-input generator J with J^2 = -J (all off-diagonal rates
/// 1/3).
pub fn j3() -> SquareMatrix {
    SquareMatrix::from_rows(&[
        vec![-2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        vec![1.0 / 3.0, -2.0 / 3.0, 1.0 / 3.0],
        vec![1.0 / 3.0, 1.0 / 3.0, -2.0 / 3.0],
    ])
    .expect("J3 is well-formed")
}

/// The antisymmetric rotation block T with e^T = I + 2 J3.
pub fn rotation_t() -> SquareMatrix {
    let s = PI / sqrt3();
    SquareMatrix::from_rows(&[vec![0.0, s, -s], vec![-s, 0.0, s], vec![s, -s, 0.0]])
        .expect("T is well-formed")
}

/// (cosh s, sinh(s)/s) as analytic functions of s^2, valid for any sign of
/// s^2: even power series near 0, closed forms otherwise (trigonometric
/// when s^2 < 0).
pub fn cosh_sinhc(s2: f64) -> (f64, f64) {
    if s2.abs() < 0.25 {
        let mut cosh = 1.0;
        let mut sinhc = 1.0;
        let mut term_c = 1.0;
        let mut term_s = 1.0;
        for n in 1..25 {
            let k = 2.0 * n as f64;
            term_c *= s2 / ((k - 1.0) * k);
            term_s *= s2 / (k * (k + 1.0));
            cosh += term_c;
            sinhc += term_s;
            if term_c.abs() + term_s.abs() < 1e-20 {
                break;
            }
        }
        (cosh, sinhc)
    } else if s2 > 0.0 {
        let s = s2.sqrt();
        (s.cosh(), s.sinh() / s)
    } else {
        let y = (-s2).sqrt();
        (y.cos(), y.sin() / y)
    }
}

fn spectral_s2(alpha: f64, beta: f64, gamma: f64, eps: f64) -> f64 {
    alpha * alpha + beta * beta + gamma * gamma
        - alpha * beta
        - beta * gamma
        - gamma * alpha
        - 3.0 * eps * eps
}

/// Closed-form matrix parameters of exp(Q) for the doubly stochastic
/// generator with rates (alpha, beta, gamma) and excess eps.
fn dstoch_exp_params(alpha: f64, beta: f64, gamma: f64, eps: f64) -> DStochParams {
    let delta = alpha + beta + gamma;
    let s2 = spectral_s2(alpha, beta, gamma, eps);
    let (ch, shc) = cosh_sinhc(s2);
    let damp = (-delta).exp();
    let w = shc * damp;
    let kappa = (1.0 - shc * delta * damp - ch * damp) / 3.0;
    DStochParams {
        a: kappa + w * alpha,
        b: kappa + w * beta,
        c: kappa + w * gamma,
        e: w * eps,
    }
}

impl DStochParams {
    pub fn matrix(&self) -> SquareMatrix {
        let (a, b, c, e) = (self.a, self.b, self.c, self.e);
        SquareMatrix::from_rows(&[
            vec![1.0 - a - b, a + e, b - e],
            vec![a - e, 1.0 - a - c, c + e],
            vec![b + e, c - e, 1.0 - b - c],
        ])
        .expect("doubly stochastic parameters form a matrix")
    }

    /// Extracts (a, b, c, e) from a doubly stochastic 3x3 matrix.
    pub fn from_matrix(m: &StochasticMatrix) -> Result<Self> {
        if m.dim() != 3 {
            return Err(Error::DimensionMismatch(
                "doubly stochastic solver covers d = 3 only".into(),
            ));
        }
        let tol = m.tol().max(1e-12) * 10.0;
        let mat = m.matrix();
        for s in mat.col_sums() {
            if (s - 1.0).abs() > tol {
                return Err(Error::NotDoublyStochastic);
            }
        }
        let a = (mat[(0, 1)] + mat[(1, 0)]) / 2.0;
        let b = (mat[(0, 2)] + mat[(2, 0)]) / 2.0;
        let c = (mat[(1, 2)] + mat[(2, 1)]) / 2.0;
        let e1 = (mat[(0, 1)] - mat[(1, 0)]) / 2.0;
        let e2 = (mat[(2, 0)] - mat[(0, 2)]) / 2.0;
        let e3 = (mat[(1, 2)] - mat[(2, 1)]) / 2.0;
        let e = (e1 + e2 + e3) / 3.0;
        if (e1 - e).abs() > tol || (e2 - e).abs() > tol || (e3 - e).abs() > tol {
            return Err(Error::NotDoublyStochastic);
        }
        Ok(Self { a, b, c, e })
    }
}

/// Builds the doubly stochastic generator matrix for rates and excess.
fn dstoch_generator(alpha: f64, beta: f64, gamma: f64, eps: f64) -> SquareMatrix {
    SquareMatrix::from_rows(&[
        vec![-alpha - beta, alpha + eps, beta - eps],
        vec![alpha - eps, -alpha - gamma, gamma + eps],
        vec![beta + eps, gamma - eps, -beta - gamma],
    ])
    .expect("generator parameters form a matrix")
}

impl SymParams {
    pub fn matrix(&self) -> SquareMatrix {
        DStochParams {
            a: self.a,
            b: self.b,
            c: self.c,
            e: 0.0,
        }
        .matrix()
    }

    pub fn from_matrix(m: &StochasticMatrix) -> Result<Self> {
        if m.dim() != 3 {
            return Err(Error::DimensionMismatch(
                "symmetric solver covers d = 3 only".into(),
            ));
        }
        if !m.matrix().is_symmetric(m.tol().max(1e-12) * 10.0) {
            return Err(Error::NotSymmetric);
        }
        let mat = m.matrix();
        Ok(Self {
            a: (mat[(0, 1)] + mat[(1, 0)]) / 2.0,
            b: (mat[(0, 2)] + mat[(2, 0)]) / 2.0,
            c: (mat[(1, 2)] + mat[(2, 1)]) / 2.0,
        })
    }
}

/// Closed-form exponential of the symmetric generator with off-diagonal
/// rates (alpha, beta, gamma).
pub fn sym_exp(alpha: f64, beta: f64, gamma: f64) -> StochasticMatrix {
    assert!(
        alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0,
        "symmetric rates must be non-negative"
    );
    let p = dstoch_exp_params(alpha, beta, gamma, 0.0);
    validate_stochastic(&p.matrix(), 1e-10).expect("symmetric exponential is Markov")
}

/// Closed-form exponential of the doubly stochastic generator; requires
/// |eps| <= min(alpha, beta, gamma).
pub fn dstoch_exp(alpha: f64, beta: f64, gamma: f64, eps: f64) -> Result<StochasticMatrix> {
    if !(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0) {
        return Err(Error::ConstraintViolation(
            "rates must be non-negative".into(),
        ));
    }
    if eps.abs() > alpha.min(beta).min(gamma) + 1e-12 {
        return Err(Error::ConstraintViolation(format!(
            "|eps| = {} exceeds min(alpha, beta, gamma) = {}",
            eps.abs(),
            alpha.min(beta).min(gamma)
        )));
    }
    let p = dstoch_exp_params(alpha, beta, gamma, eps);
    validate_stochastic(&p.matrix(), 1e-10)
}

/// The three sharp scalar pre-screens for symmetric-generator
/// embeddability.
pub fn sym_necessary(p: &SymParams) -> SymNecessityReport {
    let (a, b, c) = (p.a, p.b, p.c);
    let pairs = a * b + a * c + b * c;
    let det_ok = 3.0 * pairs <= 2.0 * (a + b + c) && 2.0 * (a + b + c) < 1.0 + 3.0 * pairs;
    let trace_ok = a + b + c < 1.0;
    let product_ok = (0.0..1.0).contains(&(3.0 * pairs));
    SymNecessityReport {
        det_ok,
        trace_ok,
        product_ok,
        overall: det_ok && trace_ok && product_ok,
    }
}

/// Kendall-type generator for the zero-pattern case: one symmetric pair
/// coupled with parameter v < 1/2, everything else frozen.
fn kendall_block_generator(pair: (usize, usize), v: f64) -> SquareMatrix {
    let mut q = SquareMatrix::zeros(3);
    if v > 0.0 {
        let rate = -(1.0 - 2.0 * v).ln() / 2.0;
        let (i, j) = pair;
        q[(i, j)] = rate;
        q[(j, i)] = rate;
        q[(i, i)] = -rate;
        q[(j, j)] = -rate;
    }
    q
}

/// Embedding decision for symmetric 3x3 Markov matrices.
///
/// Non-positive matrices are decided exactly by the zero-pattern
/// criterion (at most one coupled pair, with parameter below 1/2).
/// Positive matrices with positive spectrum have a unique symmetric
/// logarithm candidate, recovered in closed form and polished by Newton;
/// a negative rate there proves non-embeddability. Matrices with a
/// negative eigenvalue can never have a symmetric generator and are
/// passed to the doubly stochastic solver.
pub fn sym_embed(m: &StochasticMatrix) -> Result<EmbedVerdict> {
    let p = SymParams::from_matrix(m)?;
    let tol = m.tol().max(1e-12);
    let (a, b, c) = (p.a, p.b, p.c);

    let positive = m.matrix().entries().iter().all(|&v| v > tol);
    if !positive {
        let pairs = a * b + a * c + b * c;
        let max = a.max(b).max(c);
        if pairs > tol {
            return Ok(EmbedVerdict::not_embeddable(
                "(5)/(6) zero pattern admits no embedding: more than one coupled pair next to a zero entry",
            ));
        }
        if max >= 0.5 - 1e-12 {
            return Ok(EmbedVerdict::not_embeddable(format!(
                "zero-pattern case requires the coupled parameter {max:.6e} to stay below 1/2"
            )));
        }
        let pair = if a >= b && a >= c {
            (0, 1)
        } else if b >= c {
            (0, 2)
        } else {
            (1, 2)
        };
        let q = validate_generator(&kendall_block_generator(pair, max), m.tol())?;
        return Ok(embeddable_checked(Provenance::Symmetric, vec![q], m));
    }

    // positive matrix: spectrum {1, 1 - Delta_M +/- s_M} in closed form
    let delta_m = a + b + c;
    let s_m = (a * a + b * b + c * c - a * b - b * c - c * a)
        .max(0.0)
        .sqrt();
    let lam_plus = 1.0 - delta_m + s_m;
    let lam_minus = 1.0 - delta_m - s_m;
    if lam_minus.abs() <= tol {
        return Ok(EmbedVerdict::not_embeddable(format!(
            "(2) eigenvalue {lam_minus:.6e} vanishes to tolerance: determinant is 0"
        )));
    }
    if lam_minus < 0.0 {
        let v = dstoch_embed(m)?;
        return Ok(v.with_note(
            "matrix has a negative eigenvalue, so no symmetric generator exists; decided on the doubly stochastic route",
        ));
    }

    // unique symmetric logarithm candidate by spectral inversion
    let delta = -(lam_plus.ln() + lam_minus.ln()) / 2.0;
    let s = (lam_plus.ln() - lam_minus.ln()) / 2.0;
    let (ch, shc) = cosh_sinhc(s * s);
    let damp = (-delta).exp();
    let w = shc * damp;
    let kappa = (1.0 - shc * delta * damp - ch * damp) / 3.0;
    let alpha = (a - kappa) / w;
    let beta = (b - kappa) / w;
    let gamma = (c - kappa) / w;
    let min = alpha.min(beta).min(gamma);
    if min < -1e-9 {
        return Ok(EmbedVerdict::not_embeddable(format!(
            "positive spectrum but the unique symmetric logarithm has a negative rate ({min:.6e})"
        )));
    }
    let seed = [alpha.max(0.0), beta.max(0.0), gamma.max(0.0)];
    let forward = |x: &[f64]| {
        let p = dstoch_exp_params(x[0].max(0.0), x[1].max(0.0), x[2].max(0.0), 0.0);
        vec![p.a, p.b, p.c]
    };
    let opts = NewtonOptions {
        residual_target: 1e-11,
        max_iters: 200,
        nonneg: vec![0, 1, 2],
    };
    let polished = match damped_newton(forward, &[a, b, c], &seed, &opts) {
        Ok((x, _)) => x,
        Err(_) => seed.to_vec(),
    };
    let q = validate_generator(
        &dstoch_generator(polished[0], polished[1], polished[2], 0.0),
        m.tol(),
    )?;
    Ok(embeddable_checked(Provenance::Symmetric, vec![q], m))
}

/// Minimal-polynomial case of a 3x3 Markov matrix, with the equal-input
/// structure of the deg-2-simple-1 case verified as an internal
/// consistency condition.
pub fn min_poly_case(m: &StochasticMatrix) -> Result<MinPolyCase> {
    if m.dim() != 3 {
        return Err(Error::DimensionMismatch(
            "minimal polynomial classification covers d = 3 only".into(),
        ));
    }
    let spec = spectrum(m.matrix())?;
    let tol = 1e-8 * (1.0 + spec.spectral_radius());
    let one_mult = spec
        .eigenvalues
        .iter()
        .find(|(z, _)| (z.re - 1.0).abs() <= tol && z.im.abs() <= tol)
        .map(|&(_, mult)| mult)
        .unwrap_or(0);
    match (spec.min_poly_degree, one_mult) {
        (1, _) => Ok(MinPolyCase::Deg1),
        (2, 2) => Ok(MinPolyCase::Deg2Double1),
        (2, 1) => {
            // a Markov matrix with minimal polynomial (z-1)(z-l) and
            // simple eigenvalue 1 must be of equal-input form
            if crate::equalinput::detect_equal_input(m, m.tol().max(1e-10) * 100.0).is_none() {
                return Err(Error::Internal(
                    "deg-2 minimal polynomial with simple eigenvalue 1 but no equal-input structure"
                        .into(),
                ));
            }
            Ok(MinPolyCase::Deg2Simple1)
        }
        _ => Ok(MinPolyCase::Deg3),
    }
}

/// Constant-input exceptional branch: a 3x3 constant-input matrix with
/// parameter sum c_M > 1 embeds exactly when c_M <= 1 + e^{-pi sqrt(3)},
/// with the doubly stochastic generator 3 alpha J + T,
/// alpha = -ln(c_M - 1)/3.
pub fn const_input_exceptional(c_m: f64) -> Result<EmbedVerdict> {
    if !(c_m > 1.0) {
        return Err(Error::OutOfDomain(format!(
            "exceptional branch requires parameter sum > 1, got {c_m}"
        )));
    }
    let gap = exceptional_gap();
    // boundary included, compared at relative 1e-12
    if c_m - 1.0 > gap * (1.0 + 1e-12) {
        return Ok(EmbedVerdict::not_embeddable(format!(
            "constant-input parameter sum {c_m:.9e} exceeds the exceptional bound 1 + e^(-pi sqrt 3) = {:.9e}",
            1.0 + gap
        )));
    }
    let alpha = -(c_m - 1.0).ln() / 3.0;
    debug_assert!(alpha >= PI / sqrt3() - 1e-9);
    let q_mat = j3().scale(3.0 * alpha).add(&rotation_t());
    let q = validate_generator(&q_mat, 1e-9)?;
    let m_mat = SquareMatrix::identity(3).add(&j3().scale(c_m));
    let m = validate_stochastic(&m_mat, 1e-9)?;
    Ok(embeddable_checked(
        Provenance::DoublyStochastic,
        vec![q],
        &m,
    ))
}

/// Enumerates the distinct doubly stochastic generators of the
/// constant-input matrix with parameter c_M, up to winding index `k_max`.
/// For c_M < 1 these are 3 alpha J + 2mT; for c_M in the exceptional
/// window they are 3 alpha J + (2k+1) T. Every generator is verified by
/// an exponential round trip.
pub fn multi_embeddings(c_m: f64, k_max: usize) -> Result<Vec<RateMatrix>> {
    let gap = exceptional_gap();
    let in_low = c_m > 0.0 && c_m < 1.0;
    let in_high = c_m > 1.0 && c_m - 1.0 <= gap * (1.0 + 1e-12);
    if !in_low && !in_high {
        return Err(Error::OutOfDomain(format!(
            "multiple-embedding enumeration needs c_M in (0,1) or (1, 1 + e^(-pi sqrt 3)], got {c_m}"
        )));
    }
    let target = SquareMatrix::identity(3).add(&j3().scale(c_m));
    let alpha = if in_low {
        -(1.0 - c_m).ln() / 3.0
    } else {
        -(c_m - 1.0).ln() / 3.0
    };
    let mut out = Vec::new();
    for k in 0..=k_max {
        let winding = if in_low { 2 * k } else { 2 * k + 1 };
        let threshold = winding as f64 * PI / sqrt3();
        if alpha + 1e-12 < threshold {
            break;
        }
        let q_mat = j3()
            .scale(3.0 * alpha)
            .add(&rotation_t().scale(winding as f64));
        let q = validate_generator(&q_mat, 1e-9)?;
        let residual = expm(q.matrix(), 1.0).sub(&target).inf_norm();
        if residual <= 1e-9 {
            out.push(q);
        }
    }
    Ok(out)
}

/// Embedding decision for doubly stochastic 3x3 Markov matrices, by case
/// analysis on the minimal polynomial. Any generator of such a matrix is
/// itself doubly stochastic, so the search space is the four-parameter
/// family and the branch structure of its spectrum.
pub fn dstoch_embed(m: &StochasticMatrix) -> Result<EmbedVerdict> {
    let p = DStochParams::from_matrix(m)?;
    let tol = m.tol().max(1e-12);
    match min_poly_case(m)? {
        MinPolyCase::Deg1 => {
            let q = validate_generator(&SquareMatrix::zeros(3), m.tol())?;
            Ok(embeddable_checked(Provenance::DoublyStochastic, vec![q], m))
        }
        MinPolyCase::Deg2Double1 => {
            // eigenvalue 1 twice forces e = 0 and a vanishing pair
            // product; embeddable exactly when the coupled parameter
            // stays below 1/2
            let max = p.a.max(p.b).max(p.c);
            if max >= 0.5 - 1e-12 {
                return Ok(EmbedVerdict::not_embeddable(format!(
                    "double eigenvalue 1: coupled parameter {max:.6e} must stay below 1/2"
                )));
            }
            let pair = if p.a >= p.b && p.a >= p.c {
                (0, 1)
            } else if p.b >= p.c {
                (0, 2)
            } else {
                (1, 2)
            };
            let q = validate_generator(&kendall_block_generator(pair, max), m.tol())?;
            Ok(embeddable_checked(Provenance::DoublyStochastic, vec![q], m))
        }
        MinPolyCase::Deg2Simple1 => {
            // constant-input: M = I + c_M J
            let c_m = p.a + p.b + p.c; // = 3a with a = b = c
            if (c_m - 1.0).abs() <= tol {
                return Ok(EmbedVerdict::not_embeddable(
                    "(2) constant-input parameter sum 1 gives determinant 0",
                ));
            }
            if c_m < 1.0 {
                let factor = -(-c_m).ln_1p() / c_m;
                let a_mat = m.matrix().sub(&SquareMatrix::identity(3));
                let q = validate_generator(&a_mat.scale(factor), m.tol())?;
                return Ok(embeddable_checked(Provenance::DoublyStochastic, vec![q], m));
            }
            const_input_exceptional(c_m)
        }
        MinPolyCase::Deg3 => dstoch_embed_deg3(m, &p),
    }
}

/// The cyclic (degree-3 minimal polynomial) case: enumerate the logarithm
/// branches of the eigenvalue pair, invert the affine parameter relation
/// for each, and keep the admissible generators.
fn dstoch_embed_deg3(m: &StochasticMatrix, p: &DStochParams) -> Result<EmbedVerdict> {
    let (a, b, c, e) = (p.a, p.b, p.c, p.e);
    let tol = m.tol().max(1e-12);
    let delta_m = a + b + c;
    let s_m2 = a * a + b * b + c * c - a * b - b * c - c * a - 3.0 * e * e;

    // candidate (Delta, s^2) pairs for the generator spectrum
    let mut branch_pairs: Vec<(f64, f64)> = Vec::new();
    if s_m2 >= 0.0 {
        // real eigenvalues 1 - Delta_M +/- s_M
        let s_m = s_m2.sqrt();
        let lam_plus = 1.0 - delta_m + s_m;
        let lam_minus = 1.0 - delta_m - s_m;
        if lam_plus.abs() <= tol || lam_minus.abs() <= tol {
            return Ok(EmbedVerdict::not_embeddable(
                "(2) a vanishing eigenvalue makes the determinant 0",
            ));
        }
        if lam_minus < 0.0 || lam_plus < 0.0 {
            return Ok(EmbedVerdict::not_embeddable(
                "(4) a simple negative real eigenvalue has odd algebraic multiplicity",
            ));
        }
        let delta = -(lam_plus.ln() + lam_minus.ln()) / 2.0;
        let s = (lam_plus.ln() - lam_minus.ln()) / 2.0;
        branch_pairs.push((delta, s * s));
    } else {
        // complex pair lambda = (1 - Delta_M) +/- i |s_M|
        let re = 1.0 - delta_m;
        let im = (-s_m2).sqrt();
        let modulus = (re * re + im * im).sqrt();
        if modulus >= 1.0 + 1e-9 {
            return Ok(EmbedVerdict::not_embeddable(format!(
                "(3) complex eigenvalue pair has modulus {modulus:.6e} >= 1"
            )));
        }
        // borderline moduli (within rounding of 1) are left to the branch
        // enumeration: the winding cap collapses to zero there and decides
        let delta = -modulus.ln();
        let theta = im.atan2(re); // in (0, pi)
        // |eps| <= min rate <= Delta/3 bounds |Im s| by Delta/sqrt(3)
        let y_cap = delta / sqrt3() + 1e-9;
        let mut k = 0;
        loop {
            let y1 = theta + 2.0 * PI * k as f64;
            let y2 = 2.0 * PI * (k + 1) as f64 - theta;
            let mut any = false;
            if y1 <= y_cap {
                branch_pairs.push((delta, -y1 * y1));
                any = true;
            }
            if y2 <= y_cap {
                branch_pairs.push((delta, -y2 * y2));
                any = true;
            }
            if !any {
                break;
            }
            k += 1;
        }
        if branch_pairs.is_empty() {
            return Ok(EmbedVerdict::not_embeddable(
                "no branch of the eigenvalue logarithm satisfies the excess bound |eps| <= min rate (exhaustive)",
            ));
        }
    }

    let mut witnesses = Vec::new();
    for &(delta, s2) in &branch_pairs {
        let (ch, shc) = cosh_sinhc(s2);
        let damp = (-delta).exp();
        let w = shc * damp;
        if w.abs() < 1e-300 {
            continue;
        }
        let kappa = (1.0 - shc * delta * damp - ch * damp) / 3.0;
        let alpha = (a - kappa) / w;
        let beta = (b - kappa) / w;
        let gamma = (c - kappa) / w;
        let eps = e / w;
        let min = alpha.min(beta).min(gamma);
        if min < -1e-9 {
            continue;
        }
        let (alpha, beta, gamma) = (alpha.max(0.0), beta.max(0.0), gamma.max(0.0));
        let mn = alpha.min(beta).min(gamma);
        if eps.abs() > mn + 1e-9 {
            continue;
        }
        let eps = eps.clamp(-mn, mn);
        // Newton polish against the closed-form forward map; the Jordan
        // limit (s^2 = 0) converges to a looser residual, which the
        // witness check absorbs
        let forward = |x: &[f64]| {
            let lim = x[0].max(0.0).min(x[1].max(0.0)).min(x[2].max(0.0));
            let pp = dstoch_exp_params(
                x[0].max(0.0),
                x[1].max(0.0),
                x[2].max(0.0),
                x[3].clamp(-lim, lim),
            );
            vec![pp.a, pp.b, pp.c, pp.e]
        };
        let opts = NewtonOptions {
            residual_target: 1e-11,
            max_iters: 200,
            nonneg: vec![0, 1, 2],
        };
        let seed = [alpha, beta, gamma, eps];
        let polished = match damped_newton(forward, &[a, b, c, e], &seed, &opts) {
            Ok((x, _)) => x,
            Err(_) => seed.to_vec(),
        };
        let lim = polished[0]
            .max(0.0)
            .min(polished[1].max(0.0))
            .min(polished[2].max(0.0));
        let q_mat = dstoch_generator(
            polished[0].max(0.0),
            polished[1].max(0.0),
            polished[2].max(0.0),
            polished[3].clamp(-lim, lim),
        );
        if let Ok(q) = validate_generator(&q_mat, 1e-9) {
            let w = GeneratorWitness::new(Provenance::DoublyStochastic, q, m);
            if w.residual <= WITNESS_RESIDUAL_TOL {
                witnesses.push(w);
            }
        }
    }
    if witnesses.is_empty() {
        return Ok(EmbedVerdict::not_embeddable(
            "no branch of the doubly stochastic parameter equations lands in the admissible cone (exhaustive)",
        ));
    }
    witnesses.sort_by(|x, y| {
        let nx = x.q.matrix().inf_norm();
        let ny = y.q.matrix().inf_norm();
        nx.partial_cmp(&ny).unwrap()
    });
    witnesses.dedup_by(|x, y| x.q.matrix().sub(y.q.matrix()).max_abs() <= 1e-6);
    Ok(EmbedVerdict::embeddable(witnesses))
}
