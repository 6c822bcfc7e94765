//! Principal matrix logarithm by inverse scaling and squaring: repeated
//! principal square roots (Denman-Beavers, product form) until the iterate
//! is close to the identity, then a diagonal Pade approximant of log(1+X)
//! evaluated in partial-fraction form, and a final scaling by 2^k.

use super::dense::SquareMatrix;
use super::eig::spectrum;
use super::expm::expm;
use crate::error::{Error, Result};

/// Square-root iterations stop once the iterate is this close to I.
const SQRT_THRESHOLD: f64 = 0.5;
/// Order of the diagonal Pade approximant for log(1+X).
const PADE_ORDER: usize = 9;
/// Self-check tolerance on exp(log M) vs M.
const ROUNDTRIP_TOL: f64 = 1e-8;

/// Principal logarithm: the unique real logarithm whose eigenvalues have
/// imaginary parts in (-pi, pi). Fails when the spectrum touches the closed
/// negative real axis or zero.
pub fn principal_log(m: &SquareMatrix) -> Result<SquareMatrix> {
    let d = m.dim();
    let spec = spectrum(m)?;
    let scale = 1.0 + spec.spectral_radius();
    for &(lambda, _) in &spec.eigenvalues {
        if lambda.norm() <= 1e-12 * scale {
            return Err(Error::Singular);
        }
        if lambda.im == 0.0 && lambda.re < 0.0 {
            return Err(Error::SpectrumOnCut {
                re: lambda.re,
                im: lambda.im,
            });
        }
    }

    // inverse scaling: take square roots until close to the identity
    let mut x = m.clone();
    let mut k = 0u32;
    while x.sub(&SquareMatrix::identity(d)).one_norm() >= SQRT_THRESHOLD {
        x = sqrt_denman_beavers(&x)?;
        k += 1;
        if k > 50 {
            return Err(Error::ConvergenceFailure {
                method: "inverse scaling square-root stage",
                residual: x.sub(&SquareMatrix::identity(d)).one_norm(),
            });
        }
    }

    // log(1+E) = sum_i w_i E (I + x_i E)^{-1} over Gauss-Legendre nodes on [0,1]
    let e = x.sub(&SquareMatrix::identity(d));
    let (nodes, weights) = gauss_legendre_01(PADE_ORDER);
    let mut log_x = SquareMatrix::zeros(d);
    for (&xi, &wi) in nodes.iter().zip(&weights) {
        let denom = e.scale(xi).add_scaled_identity(1.0);
        let inv = denom.inverse().map_err(|_| Error::ConvergenceFailure {
            method: "Pade partial-fraction solve in matrix logarithm",
            residual: f64::NAN,
        })?;
        log_x = log_x.add(&e.matmul(&inv).scale(wi));
    }
    let result = log_x.scale(2f64.powi(k as i32));

    // self-check: the computed logarithm must reproduce the input
    let residual = expm(&result, 1.0).sub(m).inf_norm();
    if !(residual <= ROUNDTRIP_TOL * (1.0 + m.inf_norm())) {
        return Err(Error::ConvergenceFailure {
            method: "matrix logarithm round-trip verification",
            residual,
        });
    }
    Ok(result)
}

/// Principal square root by the product form of the Denman-Beavers
/// iteration. Requires (and relies on callers ensuring) no eigenvalues on
/// the closed negative real axis.
pub fn sqrt_denman_beavers(a: &SquareMatrix) -> Result<SquareMatrix> {
    let d = a.dim();
    let id = SquareMatrix::identity(d);
    let mut m = a.clone();
    let mut y = a.clone();
    for _ in 0..60 {
        let m_inv = m.inverse().map_err(|_| Error::Singular)?;
        y = y.matmul(&m_inv.add_scaled_identity(1.0)).scale(0.5);
        m = m.add(&m_inv).scale(0.25).add_scaled_identity(0.5);
        if m.sub(&id).one_norm() <= 1e-14 {
            return Ok(y);
        }
    }
    Err(Error::ConvergenceFailure {
        method: "Denman-Beavers square root iteration",
        residual: m.sub(&id).one_norm(),
    })
}

/// Gauss-Legendre nodes and weights on [0, 1], computed by Newton iteration
/// on the Legendre polynomial.
fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // initial guess for the i-th root of P_n on [-1, 1]
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[i] = 0.5 * (1.0 - x); // map and reverse to ascending order
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial P_n at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
