//! Matrix exponential by scaling and squaring with a degree-13 Padé approximant.

use nalgebra::DMatrix;

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

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

const THETA13: f64 = 5.371920351148152;

/// `exp(A)` of a square matrix.
pub fn expm(a: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("expm needs a square matrix".into()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    let norm = a.norm_1();
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.to_nalgebra() / 2f64.powi(s);
    let b = &PADE13;
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]) + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]) + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).ok_or_else(|| Error::NumericalBreakdown("singular Padé denominator".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(DenseMatrix::from_nalgebra(&r))
}

/// Exponential of a skew-symmetric matrix; the result is orthogonal.
pub fn expm_skew(k: &DenseMatrix) -> Result<DenseMatrix> {
    let scale = k.norm_max().max(1.0);
    if !k.is_skew(1e-12 * scale * k.rows().max(1) as f64) {
        return Err(Error::InvalidInput("expm_skew needs a skew-symmetric matrix".into()));
    }
    expm(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_generator() {
        let t: f64 = 0.7;
        let k = DenseMatrix::from_rows(&[[0.0, -t], [t, 0.0]]);
        let r = expm_skew(&k).unwrap();
        let want = DenseMatrix::from_rows(&[[t.cos(), -t.sin()], [t.sin(), t.cos()]]);
        assert!(r.sub(&want).norm_max() < 1e-15);
    }

    #[test]
    fn large_skew_stays_orthogonal() {
        let k = DenseMatrix::from_rows(&[[0.0, 9.0, -4.0], [-9.0, 0.0, 12.0], [4.0, -12.0, 0.0]]);
        let q = expm_skew(&k).unwrap();
        let qtq = q.transpose().matmul(&q);
        assert!(qtq.sub(&DenseMatrix::identity(3)).norm_max() < 1e-13);
    }

    #[test]
    fn diagonal_exponential() {
        let d = DenseMatrix::diag(&[1.0, -2.0, 0.0]);
        let e = expm(&d).unwrap();
        for (i, x) in [1f64, -2.0, 0.0].iter().enumerate() {
            assert!((e[(i, i)] - x.exp()).abs() < 1e-14 * x.exp().max(1.0));
        }
    }

    #[test]
    fn rejects_non_skew() {
        assert!(expm_skew(&DenseMatrix::identity(2)).is_err());
    }
}
