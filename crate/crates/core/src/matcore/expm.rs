//! Matrix exponential by scaling and squaring with the degree-13 diagonal
//! Padé approximant and 1-norm based scaling.

use super::dense::SquareMatrix;

/// Numerator coefficients of the [13/13] Padé approximant of exp.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the [13/13] approximant is accurate without
/// scaling.
const THETA13: f64 = 5.371920351148152;

/// Computes e^{tA}. Total on finite input: any failure of the internal
/// solve would indicate a singular `V - U`, which cannot happen for the
/// Padé denominator at admissible norms, so the unwrap is safe.
pub fn expm(a: &SquareMatrix, t: f64) -> SquareMatrix {
    let d = a.dim();
    let at = a.scale(t);
    let norm = at.one_norm();
    if norm == 0.0 {
        return SquareMatrix::identity(d);
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let x = at.scale(0.5f64.powi(s));

    let x2 = x.matmul(&x);
    let x4 = x2.matmul(&x2);
    let x6 = x2.matmul(&x4);

    // U = X * (X6*(b13 X6 + b11 X4 + b9 X2) + b7 X6 + b5 X4 + b3 X2 + b1 I)
    let w1 = x6
        .scale(PADE13[13])
        .add(&x4.scale(PADE13[11]))
        .add(&x2.scale(PADE13[9]));
    let w2 = x6
        .scale(PADE13[7])
        .add(&x4.scale(PADE13[5]))
        .add(&x2.scale(PADE13[3]))
        .add_scaled_identity(PADE13[1]);
    let u = x.matmul(&x6.matmul(&w1).add(&w2));

    // V = X6*(b12 X6 + b10 X4 + b8 X2) + b6 X6 + b4 X4 + b2 X2 + b0 I
    let z1 = x6
        .scale(PADE13[12])
        .add(&x4.scale(PADE13[10]))
        .add(&x2.scale(PADE13[8]));
    let z2 = x6
        .scale(PADE13[6])
        .add(&x4.scale(PADE13[4]))
        .add(&x2.scale(PADE13[2]))
        .add_scaled_identity(PADE13[0]);
    let v = x6.matmul(&z1).add(&z2);

    // (V - U)^{-1} (V + U), solved column by column.
    let lhs = v.sub(&u);
    let rhs = v.add(&u);
    let mut f = SquareMatrix::zeros(d);
    let mut col = vec![0.0; d];
    for j in 0..d {
        for i in 0..d {
            col[i] = rhs[(i, j)];
        }
        let sol = lhs
            .solve(&col)
            .expect("Pade denominator is nonsingular within the scaling bound");
        for i in 0..d {
            f[(i, j)] = sol[i];
        }
    }

    let mut result = f;
    for _ in 0..s {
        result = result.matmul(&result);
    }
    result
}
