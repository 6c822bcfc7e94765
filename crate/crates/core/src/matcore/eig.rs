//! Eigenvalues with multiplicities, diagonalizability, and minimal
//! polynomial degree.
//!
//! For d <= 4 the characteristic polynomial is formed by Faddeev-LeVerrier
//! and solved in closed form (quadratic/cubic/quartic), each root polished
//! by a few complex Newton steps. For 5 <= d <= 16 the matrix is reduced to
//! Hessenberg form and eigenvalues are found by shifted QR iteration in
//! complex arithmetic. Multiplicities come from clustering with a declared
//! equality predicate; the Jordan structure is probed by rank tests.

use num_complex::Complex64;

use super::complexmat::CMatrix;
use super::dense::SquareMatrix;
use crate::error::{Error, Result};

/// Equality and rank thresholds used by the spectral routines. These are
/// artifact-level decisions: two eigenvalues are "equal" iff
/// |a - b| <= cluster_tol * (1 + max |lambda|).
#[derive(Debug, Clone, Copy)]
pub struct EigConfig {
    pub cluster_tol: f64,
    pub rank_tol: f64,
}

impl Default for EigConfig {
    fn default() -> Self {
        Self {
            cluster_tol: 1e-8,
            rank_tol: 1e-8,
        }
    }
}

/// Multiset of eigenvalues plus structural flags.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Distinct eigenvalues with algebraic multiplicities; complex values
    /// occur in conjugate pairs. Sorted by (re, im).
    pub eigenvalues: Vec<(Complex64, usize)>,
    pub diagonalizable: bool,
    pub min_poly_degree: usize,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.iter().map(|&(_, m)| m).sum()
    }

    /// Largest modulus over the spectrum.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(0.0, |m, (z, _)| m.max(z.norm()))
    }

    /// Multiplicity of the eigenvalue closest to `z` if within the cluster
    /// tolerance, else 0.
    pub fn multiplicity_near(&self, z: Complex64, tol: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|(w, _)| (w - z).norm() <= tol)
            .map(|&(_, m)| m)
            .sum()
    }
}

/// Eigenvalues with default thresholds.
pub fn spectrum(a: &SquareMatrix) -> Result<Spectrum> {
    spectrum_with(a, &EigConfig::default())
}

/// Eigenvalues with caller-supplied thresholds.
pub fn spectrum_with(a: &SquareMatrix, cfg: &EigConfig) -> Result<Spectrum> {
    let raw = eigenvalues_raw(a)?;
    let scale = raw.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let tol = cfg.cluster_tol * (1.0 + scale);

    // Snap near-real values onto the real axis, then enforce conjugate
    // symmetry by averaging each eigenvalue with the conjugate of its
    // partner.
    let mut vals: Vec<Complex64> = raw
        .iter()
        .map(|z| {
            if z.im.abs() <= tol {
                Complex64::new(z.re, 0.0)
            } else {
                *z
            }
        })
        .collect();
    symmetrize_conjugates(&mut vals);

    // Greedy single-linkage clustering on the sorted list.
    vals.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for v in vals {
        match clusters.last_mut() {
            Some((c, m)) if (*c - v).norm() <= tol => {
                // running mean keeps the representative centred
                *c = (*c * (*m as f64) + v) / (*m as f64 + 1.0);
                *m += 1;
            }
            _ => clusters.push((v, 1)),
        }
    }
    // Second pass: collapse clusters that the root finder split but the
    // matrix ranks identify as one eigenvalue. Multiple roots of the
    // characteristic polynomial move by eps^(1/k) under coefficient
    // noise; the rank tests below see the matrix directly and do not.
    let d = a.dim();
    let ac = CMatrix::from_real(a);
    let refine_tol = 1e-5 * (1.0 + scale);
    let accept_merge = |group: &[(Complex64, usize)]| -> Option<(Complex64, usize)> {
        let k: usize = group.iter().map(|&(_, m)| m).sum();
        let mut center = group
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &(z, m)| acc + z * m as f64)
            / k as f64;
        if center.im.abs() <= tol {
            center = Complex64::new(center.re, 0.0);
        }
        let b = ac.shift(-center);
        if d - b.rank(cfg.rank_tol) >= k {
            return Some((center, k));
        }
        // Jordan tower probe with a tolerance floor: a genuine k-fold
        // eigenvalue makes B^k numerically rank-deficient, while points
        // separated by more than ~1e-6 do not
        let mut power = b.clone();
        for _ in 1..k {
            power = power.matmul(&b);
        }
        (d - power.rank(1e-13) >= k).then_some((center, k))
    };
    loop {
        let n = clusters.len();
        // proximity components under refine_tol
        let mut comp: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for j in i + 1..n {
                if (clusters[i].0 - clusters[j].0).norm() <= refine_tol {
                    let (ci, cj) = (comp[i], comp[j]);
                    for c in comp.iter_mut() {
                        if *c == cj {
                            *c = ci;
                        }
                    }
                }
            }
        }
        let mut changed = false;
        let mut next: Vec<(Complex64, usize)> = Vec::with_capacity(n);
        let mut comp_ids: Vec<usize> = comp.clone();
        comp_ids.sort_unstable();
        comp_ids.dedup();
        for id in comp_ids {
            let group: Vec<(Complex64, usize)> = (0..n)
                .filter(|&i| comp[i] == id)
                .map(|i| clusters[i])
                .collect();
            if group.len() < 2 {
                next.extend(group);
                continue;
            }
            // whole component first, then pairs inside it
            if let Some(merged) = accept_merge(&group) {
                next.push(merged);
                changed = true;
                continue;
            }
            let mut rest = group.clone();
            let mut merged_any = false;
            'pairs: for i in 0..rest.len() {
                for j in i + 1..rest.len() {
                    if (rest[i].0 - rest[j].0).norm() <= refine_tol {
                        if let Some(merged) = accept_merge(&[rest[i], rest[j]]) {
                            rest.remove(j);
                            rest[i] = merged;
                            merged_any = true;
                            break 'pairs;
                        }
                    }
                }
            }
            changed |= merged_any;
            next.extend(rest);
        }
        clusters = next;
        if !changed {
            break;
        }
    }

    // A k-fold eigenvalue is a simple root of the (k-1)-th derivative of
    // the characteristic polynomial, so its representative can be polished
    // there to full precision (the polynomial itself only determines it to
    // eps^(1/k)).
    let sigma = a.one_norm().max(1e-300);
    let mut scaled_coeffs: Option<Vec<f64>> = None;
    for (center, mult) in clusters.iter_mut() {
        if *mult < 2 {
            continue;
        }
        if *mult == d {
            *center = Complex64::new(a.trace() / d as f64, 0.0);
            continue;
        }
        let coeffs =
            scaled_coeffs.get_or_insert_with(|| char_poly(&a.scale(1.0 / sigma)));
        let mut dcoeffs = coeffs.clone();
        for _ in 1..*mult {
            dcoeffs = poly_derivative(&dcoeffs);
        }
        let z0 = *center / sigma;
        let z1 = newton_polish(&dcoeffs, z0);
        if (z1 - z0).norm() * sigma <= refine_tol {
            *center = z1 * sigma;
        }
        if center.im.abs() <= tol {
            *center = Complex64::new(center.re, 0.0);
        }
    }

    // Cluster representatives of conjugate clusters must be exact
    // conjugates as well.
    let mut reps: Vec<Complex64> = clusters.iter().map(|&(c, _)| c).collect();
    symmetrize_conjugates(&mut reps);
    for (slot, rep) in clusters.iter_mut().zip(reps) {
        slot.0 = rep;
    }

    // Jordan structure per repeated eigenvalue via rank tests.
    let mut min_poly_degree = 0usize;
    let mut diagonalizable = true;
    for &(lambda, mult) in &clusters {
        if mult == 1 {
            min_poly_degree += 1;
            continue;
        }
        let b = ac.shift(-lambda);
        let mut power = b.clone();
        let mut prev_rank = power.rank(cfg.rank_tol);
        let mut block = mult; // fallback: worst case single Jordan block
        for p in 1..=mult {
            let next = power.matmul(&b);
            let next_rank = next.rank(cfg.rank_tol);
            if next_rank == prev_rank {
                block = p;
                break;
            }
            power = next;
            prev_rank = next_rank;
        }
        if block > 1 {
            diagonalizable = false;
        }
        min_poly_degree += block;
    }

    clusters.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap()
            .then(a.0.im.partial_cmp(&b.0.im).unwrap())
    });
    Ok(Spectrum {
        eigenvalues: clusters,
        diagonalizable,
        min_poly_degree,
    })
}

/// Pairs values of opposite imaginary sign and replaces each pair by exact
/// conjugates (averaging the two estimates). Values on the real axis are
/// left untouched.
fn symmetrize_conjugates(vals: &mut [Complex64]) {
    let n = vals.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] || vals[i].im <= 0.0 {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if used[j] || j == i || vals[j].im >= 0.0 {
                continue;
            }
            let dist = (vals[i] - vals[j].conj()).norm();
            if best.is_none_or(|(_, b)| dist < b) {
                best = Some((j, dist));
            }
        }
        if let Some((j, _)) = best {
            let avg = (vals[i] + vals[j].conj()) / 2.0;
            vals[i] = avg;
            vals[j] = avg.conj();
            used[i] = true;
            used[j] = true;
        }
    }
}

/// All d eigenvalues, unclustered. Conjugate symmetry is approximate here;
/// `spectrum_with` enforces it exactly.
pub(crate) fn eigenvalues_raw(a: &SquareMatrix) -> Result<Vec<Complex64>> {
    let d = a.dim();
    // Scale so the polynomial/QR work on O(1) numbers.
    let sigma = a.one_norm().max(1e-300);
    let scaled = a.scale(1.0 / sigma);
    let mut vals = if d <= 4 {
        let coeffs = char_poly(&scaled);
        let mut roots = poly_roots(&coeffs);
        for r in &mut roots {
            *r = newton_polish(&coeffs, *r);
        }
        roots
    } else {
        qr_eigenvalues(&scaled)?
    };
    for v in &mut vals {
        *v *= sigma;
    }
    Ok(vals)
}

/// Monic characteristic polynomial coefficients [1, a_{d-1}, ..., a_0]
/// (highest degree first) by the Faddeev-LeVerrier recurrence.
fn char_poly(a: &SquareMatrix) -> Vec<f64> {
    let d = a.dim();
    let mut coeffs = vec![1.0];
    let mut m = a.clone();
    for k in 1..=d {
        let c = m.trace() / k as f64;
        coeffs.push(-c);
        if k < d {
            m = a.matmul(&m.add_scaled_identity(-c));
        }
    }
    coeffs
}

fn poly_eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len() - 1;
    coeffs[..n]
        .iter()
        .enumerate()
        .map(|(i, &c)| c * (n - i) as f64)
        .collect()
}

fn poly_eval_deriv(coeffs: &[f64], z: Complex64) -> Complex64 {
    let n = coeffs.len() - 1;
    coeffs[..n]
        .iter()
        .enumerate()
        .fold(Complex64::new(0.0, 0.0), |acc, (i, &c)| {
            acc * z + c * (n - i) as f64
        })
}

/// A few guarded Newton steps; keeps the iterate only while |p| decreases.
fn newton_polish(coeffs: &[f64], mut z: Complex64) -> Complex64 {
    let mut val = poly_eval(coeffs, z).norm();
    for _ in 0..12 {
        let p = poly_eval(coeffs, z);
        let dp = poly_eval_deriv(coeffs, z);
        if dp.norm() < 1e-300 {
            break;
        }
        let step = p / dp;
        let cand = z - step;
        let cand_val = poly_eval(coeffs, cand).norm();
        if cand_val >= val {
            break;
        }
        z = cand;
        val = cand_val;
        if step.norm() < 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Closed-form roots for monic real polynomials of degree 2..4.
fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    match coeffs.len() - 1 {
        2 => quadratic_roots(coeffs[1], coeffs[2]),
        3 => cubic_roots(coeffs[1], coeffs[2], coeffs[3]),
        4 => quartic_roots(coeffs[1], coeffs[2], coeffs[3], coeffs[4]),
        n => unreachable!("closed-form root path called for degree {n}"),
    }
}

/// z^2 + b z + c = 0
fn quadratic_roots(b: f64, c: f64) -> Vec<Complex64> {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // q avoids cancellation between -b and the radical
        let q = -0.5 * (b + b.signum() * s);
        let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q, c / q) };
        vec![Complex64::new(r1, 0.0), Complex64::new(r2, 0.0)]
    } else {
        let s = (-disc).sqrt() / 2.0;
        vec![
            Complex64::new(-b / 2.0, s),
            Complex64::new(-b / 2.0, -s),
        ]
    }
}

/// z^3 + b z^2 + c z + d = 0
fn cubic_roots(b: f64, c: f64, d: f64) -> Vec<Complex64> {
    // depressed cubic t^3 + p t + q with z = t - b/3
    let shift = -b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
    let mut roots = Vec::with_capacity(3);
    if disc > 0.0 {
        let s = disc.sqrt();
        let u = (-q / 2.0 + s).cbrt();
        let v = (-q / 2.0 - s).cbrt();
        let t_real = u + v;
        roots.push(Complex64::new(t_real + shift, 0.0));
        let re = -t_real / 2.0 + shift;
        let im = (u - v) * 3f64.sqrt() / 2.0;
        roots.push(Complex64::new(re, im));
        roots.push(Complex64::new(re, -im));
    } else if p == 0.0 {
        // triple root
        let t = (-q).cbrt();
        for _ in 0..3 {
            roots.push(Complex64::new(t + shift, 0.0));
        }
    } else {
        // three real roots via the trigonometric form
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos();
        for k in 0..3 {
            let t = m * ((theta - 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos();
            roots.push(Complex64::new(t + shift, 0.0));
        }
    }
    roots
}

/// z^4 + b z^3 + c z^2 + d z + e = 0 (Ferrari)
fn quartic_roots(b: f64, c: f64, d: f64, e: f64) -> Vec<Complex64> {
    // depressed quartic y^4 + p y^2 + q y + r with z = y - b/4
    let shift = -b / 4.0;
    let b2 = b * b;
    let p = c - 3.0 * b2 / 8.0;
    let q = d - b * c / 2.0 + b2 * b / 8.0;
    let r = e - b * d / 4.0 + b2 * c / 16.0 - 3.0 * b2 * b2 / 256.0;

    let scale = p.abs().max(q.abs()).max(r.abs()).max(1.0);
    let mut roots = Vec::with_capacity(4);
    if q.abs() <= 1e-14 * scale {
        // biquadratic
        for w in quadratic_roots(p, r) {
            let y = w.sqrt();
            roots.push(y + shift);
            roots.push(-y + shift);
        }
        return roots;
    }
    // resolvent cubic z^3 - p z^2 - 4 r z + (4 p r - q^2) = 0; pick the
    // real root that maximises z0 - p for a well-conditioned alpha.
    let res = cubic_roots(-p, -4.0 * r, 4.0 * p * r - q * q);
    let mut z0 = f64::NEG_INFINITY;
    for w in &res {
        if w.im.abs() <= 1e-9 * (1.0 + w.norm()) && w.re > z0 {
            z0 = w.re;
        }
    }
    let alpha_sq = z0 - p;
    if !(alpha_sq > 0.0) {
        // fall back to the biquadratic factorisation; Newton polish will
        // clean up the residual error
        for w in quadratic_roots(p, r) {
            let y = w.sqrt();
            roots.push(y + shift);
            roots.push(-y + shift);
        }
        return roots;
    }
    let alpha = alpha_sq.sqrt();
    let beta = (z0 - q / alpha) / 2.0;
    let gamma = (z0 + q / alpha) / 2.0;
    for w in quadratic_roots(alpha, beta) {
        roots.push(w + shift);
    }
    for w in quadratic_roots(-alpha, gamma) {
        roots.push(w + shift);
    }
    roots
}

/// Complex shifted QR on a Hessenberg form. Used for 5 <= d <= 16.
fn qr_eigenvalues(a: &SquareMatrix) -> Result<Vec<Complex64>> {
    let d = a.dim();
    let mut h = hessenberg(&CMatrix::from_real(a));
    let mut eigs: Vec<Complex64> = Vec::with_capacity(d);
    let mut n = d;
    let mut iters_left = 80 * d;
    let mut stall = 0usize;
    let eps = 1e-15;
    while n > 0 {
        if n == 1 {
            eigs.push(h[(0, 0)]);
            break;
        }
        // deflate converged subdiagonals
        let mut deflated = false;
        for m in (1..n).rev() {
            let small = eps * (h[(m - 1, m - 1)].norm() + h[(m, m)].norm() + 1e-300);
            if h[(m, m - 1)].norm() <= small {
                h[(m, m - 1)] = Complex64::new(0.0, 0.0);
                if m == n - 1 {
                    eigs.push(h[(n - 1, n - 1)]);
                    n -= 1;
                    deflated = true;
                    stall = 0;
                    break;
                }
            }
        }
        if deflated {
            continue;
        }
        if iters_left == 0 {
            return Err(Error::ConvergenceFailure {
                method: "shifted QR eigenvalue iteration",
                residual: h[(n - 1, n - 2)].norm(),
            });
        }
        iters_left -= 1;
        stall += 1;

        let mu = if stall.is_multiple_of(12) {
            // exceptional shift: breaks the cycling that symmetric spectra
            // (e.g. roots of unity) induce in the Wilkinson shift
            h[(n - 1, n - 1)] + Complex64::new(0.75 * h[(n - 1, n - 2)].norm(), 0.0)
        } else {
            // Wilkinson shift from the trailing 2x2 block
            let t11 = h[(n - 2, n - 2)];
            let t12 = h[(n - 2, n - 1)];
            let t21 = h[(n - 1, n - 2)];
            let t22 = h[(n - 1, n - 1)];
            let tr = t11 + t22;
            let det = t11 * t22 - t12 * t21;
            let disc = (tr * tr - det * 4.0).sqrt();
            let mu1 = (tr + disc) / 2.0;
            let mu2 = (tr - disc) / 2.0;
            if (mu1 - t22).norm() < (mu2 - t22).norm() {
                mu1
            } else {
                mu2
            }
        };

        // explicit QR step on the active n x n block: H - mu I = QR, H <- RQ + mu I.
        // Each Givens factor G = (1/r) [[a*, b*], [-b, a]] zeroes the
        // subdiagonal entry b below the pivot a.
        for i in 0..n {
            h[(i, i)] -= mu;
        }
        let mut rot: Vec<(Complex64, Complex64)> = Vec::with_capacity(n - 1);
        for k in 0..n - 1 {
            let a = h[(k, k)];
            let b = h[(k + 1, k)];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (ca, cb) = if r <= 1e-300 {
                (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            } else {
                (a / r, b / r)
            };
            for j in k..n {
                let hk = h[(k, j)];
                let hk1 = h[(k + 1, j)];
                h[(k, j)] = ca.conj() * hk + cb.conj() * hk1;
                h[(k + 1, j)] = -cb * hk + ca * hk1;
            }
            rot.push((ca, cb));
        }
        for (k, &(ca, cb)) in rot.iter().enumerate() {
            // columns k, k+1: multiply by G^H on the right
            let top = (k + 2).min(n);
            for i in 0..top {
                let hk = h[(i, k)];
                let hk1 = h[(i, k + 1)];
                h[(i, k)] = hk * ca + hk1 * cb;
                h[(i, k + 1)] = -hk * cb.conj() + hk1 * ca.conj();
            }
        }
        for i in 0..n {
            h[(i, i)] += mu;
        }
    }
    Ok(eigs)
}

/// Householder reduction to upper Hessenberg form (complex).
fn hessenberg(a: &CMatrix) -> CMatrix {
    let d = a.dim;
    let mut h = a.clone();
    for k in 0..d.saturating_sub(2) {
        // build the reflector for column k below the subdiagonal
        let mut norm_sq = 0.0;
        for i in k + 1..d {
            norm_sq += h[(i, k)].norm_sqr();
        }
        let x0 = h[(k + 1, k)];
        let alpha = norm_sq.sqrt();
        if alpha <= 1e-300 {
            continue;
        }
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let target = -phase * alpha;
        let mut v: Vec<Complex64> = (0..d)
            .map(|i| {
                if i <= k {
                    Complex64::new(0.0, 0.0)
                } else {
                    h[(i, k)]
                }
            })
            .collect();
        v[k + 1] -= target;
        let vnorm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sq <= 1e-300 {
            continue;
        }
        // H <- (I - 2 v v^H / |v|^2) H (I - 2 v v^H / |v|^2)
        for j in 0..d {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in k + 1..d {
                dot += v[i].conj() * h[(i, j)];
            }
            let f = dot * 2.0 / vnorm_sq;
            for i in k + 1..d {
                let sub = v[i] * f;
                h[(i, j)] -= sub;
            }
        }
        for i in 0..d {
            let mut dot = Complex64::new(0.0, 0.0);
            for j in k + 1..d {
                dot += h[(i, j)] * v[j];
            }
            let f = dot * 2.0 / vnorm_sq;
            for j in k + 1..d {
                let sub = f * v[j].conj();
                h[(i, j)] -= sub;
            }
        }
    }
    h
}

/// Eigenvalue/eigenvector pairs for matrices with simple spectrum, refined
/// by inverse iteration. Returns the raw eigenvalues and the eigenvector
/// matrix V (columns are unit-norm eigenvectors; conjugate eigenvalues get
/// conjugate columns).
pub(crate) fn eigen_decomposition(a: &SquareMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    let d = a.dim();
    let mut vals = eigenvalues_raw(a)?;
    let scale = vals.iter().fold(0.0f64, |m, z| m.max(z.norm())) + 1.0;
    // simple-spectrum guard: strictly pairwise distinct
    for v in vals.iter_mut() {
        if v.im.abs() <= 1e-8 * scale {
            *v = Complex64::new(v.re, 0.0);
        }
    }
    symmetrize_conjugates(&mut vals);
    for i in 0..d {
        for j in i + 1..d {
            if (vals[i] - vals[j]).norm() <= 1e-8 * scale {
                return Err(Error::NotCyclic(format!(
                    "eigenvalues {} and {} coincide within tolerance",
                    vals[i], vals[j]
                )));
            }
        }
    }
    vals.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });

    let ac = CMatrix::from_real(a);
    let mut v = CMatrix::zeros(d);
    let mut done = vec![false; d];
    for i in 0..d {
        if done[i] {
            continue;
        }
        let lambda = vals[i];
        let col = inverse_iteration_vector(&ac, lambda, scale)?;
        for r in 0..d {
            v[(r, i)] = col[r];
        }
        done[i] = true;
        if lambda.im != 0.0 {
            // place the conjugate column at the conjugate eigenvalue
            if let Some(j) = (0..d)
                .find(|&j| !done[j] && (vals[j] - lambda.conj()).norm() <= 1e-10 * scale)
            {
                for r in 0..d {
                    v[(r, j)] = col[r].conj();
                }
                done[j] = true;
            }
        }
    }
    Ok((vals, v))
}

/// Two inverse-iteration sweeps with a perturbed shift; the near-singular
/// solve amplifies the wanted eigenvector.
fn inverse_iteration_vector(
    ac: &CMatrix,
    lambda: Complex64,
    scale: f64,
) -> Result<Vec<Complex64>> {
    let d = ac.dim;
    let shift = lambda + Complex64::new(1e-12 * scale, 1e-13 * scale);
    let shifted = ac.shift(-shift);
    // deterministic, mildly irregular start vector
    let mut x: Vec<Complex64> = (0..d)
        .map(|i| Complex64::new(1.0 + 0.37 * (i as f64).sin(), 0.11 * (i as f64 + 1.0).cos()))
        .collect();
    for _ in 0..3 {
        let y = shifted.solve(&x).ok_or(Error::NotCyclic(
            "shifted solve broke down during inverse iteration".into(),
        ))?;
        let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotCyclic("inverse iteration collapsed".into()));
        }
        x = y.into_iter().map(|z| z / norm).collect();
    }
    // residual check |A x - lambda x|
    let mut res: f64 = 0.0;
    for i in 0..d {
        let mut acc = -lambda * x[i];
        for j in 0..d {
            acc += ac[(i, j)] * x[j];
        }
        res = res.max(acc.norm());
    }
    if res > 1e-6 * scale {
        return Err(Error::ConvergenceFailure {
            method: "inverse iteration eigenvector refinement",
            residual: res,
        });
    }
    Ok(x)
}
