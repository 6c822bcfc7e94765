//! Generic real-logarithm branch enumeration for Markov matrices with
//! simple spectrum. The solutions of M = e^L form a discrete set indexed
//! by one winding integer per conjugate eigenvalue pair; within a window
//! the construction lists every real logarithm, and `filter_generators`
//! keeps the Metzler ones. Negative real eigenvalues are unliftable here
//! (a simple negative eigenvalue has no real logarithm branch at all).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{
    eigen_decomposition, expm, validate_generator, CMatrix, RateMatrix, SquareMatrix,
    StochasticMatrix,
};

/// Winding window per conjugate eigenvalue pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchWindow {
    pub k_max: usize,
}

impl BranchWindow {
    pub fn new(k_max: usize) -> Result<Self> {
        if k_max > 64 {
            return Err(Error::ConstraintViolation(format!(
                "branch window {k_max} exceeds the supported maximum 64"
            )));
        }
        Ok(Self { k_max })
    }
}

impl Default for BranchWindow {
    fn default() -> Self {
        Self { k_max: 8 }
    }
}

/// Safety cap on the total number of enumerated branch combinations.
const MAX_CANDIDATES: usize = 1_000_000;

/// Largest winding index that any Markov generator of `m` can need: the
/// Gershgorin disk of a generator Q bounds |Im eigenvalue| by -tr(Q),
/// and tr(Q) = log det(M) for every solution of e^Q = M.
pub fn exhaustive_window(m: &StochasticMatrix) -> Option<usize> {
    let det = m.matrix().det();
    if det <= 0.0 {
        return Some(0);
    }
    let bound = (-det.ln() + std::f64::consts::PI) / (2.0 * std::f64::consts::PI);
    Some(bound.ceil() as usize)
}

/// All real logarithms of M with winding indices up to `w.k_max` per
/// conjugate pair. Requires simple spectrum; zero eigenvalues make any
/// logarithm impossible, and simple negative real eigenvalues yield the
/// empty set.
pub fn real_log_branches(m: &StochasticMatrix, w: &BranchWindow) -> Result<Vec<SquareMatrix>> {
    let d = m.dim();
    let (vals, v) = eigen_decomposition(m.matrix())?;
    let scale = vals.iter().fold(0.0f64, |mx, z| mx.max(z.norm())) + 1.0;
    for z in &vals {
        if z.norm() <= 1e-12 * scale {
            return Err(Error::SingularInput);
        }
    }
    if vals.iter().any(|z| z.im == 0.0 && z.re < 0.0) {
        // a simple negative real eigenvalue admits no real logarithm
        return Ok(Vec::new());
    }

    // column-scale the eigenbasis and reject numerically defective ones
    let v = normalize_columns(&v);
    let v_inv = match v.inverse() {
        Some(inv) => inv,
        None => return Err(Error::NotCyclic("eigenvector matrix is singular".into())),
    };
    let cond = v.one_norm() * v_inv.one_norm();
    if cond > 1e12 {
        return Err(Error::NotCyclic(format!(
            "eigenbasis condition number {cond:.3e} exceeds 1e12"
        )));
    }

    // index the conjugate pairs (upper half-plane representative)
    let mut pair_of: Vec<Option<usize>> = vec![None; d];
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..d {
        if vals[i].im > 0.0 {
            let j = (0..d)
                .find(|&j| (vals[j] - vals[i].conj()).norm() <= 1e-10 * scale)
                .ok_or_else(|| Error::NotCyclic("unpaired complex eigenvalue".into()))?;
            pair_of[i] = Some(pairs.len());
            pair_of[j] = Some(pairs.len());
            pairs.push((i, j));
        }
    }

    let k_range: Vec<i64> = (-(w.k_max as i64)..=w.k_max as i64).collect();
    let combos = k_range.len().checked_pow(pairs.len() as u32);
    let truncated = combos.is_none_or(|c| c > MAX_CANDIDATES);
    let mut out = Vec::new();
    let mut windings = vec![0usize; pairs.len()];
    let mut emitted = 0usize;
    'outer: loop {
        // diagonal logarithm for this winding choice
        let mut diag = vec![Complex64::new(0.0, 0.0); d];
        for i in 0..d {
            match pair_of[i] {
                None => diag[i] = Complex64::new(vals[i].re.ln(), 0.0),
                Some(p) => {
                    let k = k_range[windings[p]] as f64;
                    let (hi, lo) = pairs[p];
                    let lam = vals[hi];
                    let theta = lam.im.atan2(lam.re) + 2.0 * std::f64::consts::PI * k;
                    let log = Complex64::new(lam.norm().ln(), theta);
                    if i == hi {
                        diag[i] = log;
                    } else {
                        debug_assert_eq!(i, lo);
                        diag[i] = log.conj();
                    }
                }
            }
        }
        let mut dm = CMatrix::zeros(d);
        for i in 0..d {
            dm[(i, i)] = diag[i];
        }
        let candidate = v.matmul(&dm).matmul(&v_inv);
        if candidate.max_imag_abs() <= 1e-10 * (1.0 + candidate.one_norm()) {
            let real = candidate.real_part();
            if expm(&real, 1.0).sub(m.matrix()).inf_norm() <= 1e-8 {
                out.push(real);
            }
        }
        emitted += 1;
        if emitted >= MAX_CANDIDATES {
            break;
        }
        // advance winding counters
        let mut pos = 0;
        loop {
            if pos == pairs.len() {
                break 'outer;
            }
            windings[pos] += 1;
            if windings[pos] < k_range.len() {
                break;
            }
            windings[pos] = 0;
            pos += 1;
        }
    }
    let _ = truncated;
    Ok(out)
}

fn normalize_columns(v: &CMatrix) -> CMatrix {
    let d = v.dim;
    let mut out = v.clone();
    for j in 0..d {
        let norm = (0..d)
            .map(|i| out[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt()
            .max(1e-300);
        for i in 0..d {
            out[(i, j)] /= norm;
        }
    }
    out
}

/// Keeps the candidates that validate as rate matrices, ordered by
/// ascending infinity norm (stable).
pub fn filter_generators(cands: &[SquareMatrix], tol: f64) -> Vec<RateMatrix> {
    let mut kept: Vec<RateMatrix> = cands
        .iter()
        .filter_map(|c| validate_generator(c, tol).ok())
        .collect();
    kept.sort_by(|a, b| {
        a.matrix()
            .inf_norm()
            .partial_cmp(&b.matrix().inf_norm())
            .unwrap()
    });
    kept
}
