//! Jacobi (symmetric tridiagonal) matrices with prescribed spectrum.

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Diagonal `alpha` (length n) and positive off-diagonal `beta` (length n−1).
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobi {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl Jacobi {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.len();
        DenseMatrix::from_fn(n, n, |r, c| {
            if r == c {
                self.alpha[r]
            } else if r + 1 == c {
                self.beta[r]
            } else if c + 1 == r {
                self.beta[c]
            } else {
                0.0
            }
        })
    }
}

/// `(1, …, 1)/√n`.
pub fn uniform_start(n: usize) -> Vec<f64> {
    vec![1.0 / (n as f64).sqrt(); n]
}

/// Lanczos on `diag(eigenvalues)` from `start`, with full reorthogonalization.
///
/// The eigenvalues must be pairwise distinct and `start` nowhere zero; it is normalized
/// before use. Off-diagonal entries come out positive.
pub fn lanczos_jacobi(eigenvalues: &[f64], start: &[f64]) -> Result<Jacobi> {
    let n = eigenvalues.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty spectrum".into()));
    }
    if start.len() != n {
        return Err(Error::DimensionMismatch(format!("start vector has length {}, expected {n}", start.len())));
    }
    let start_norm = dot(start, start).sqrt();
    if !start_norm.is_finite() || start.iter().any(|&x| x.abs() <= 1e-14 * start_norm) {
        return Err(Error::InvalidInput("start vector must be finite and nowhere zero".into()));
    }
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite eigenvalue".into()));
    }
    let mut sorted = eigenvalues.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let span = sorted.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    if sorted.windows(2).any(|w| w[1] - w[0] <= 1e-12 * span) {
        return Err(Error::DegenerateSpectrum);
    }
    let spread = sorted[n - 1] - sorted[0];
    let d = eigenvalues;

    let mut qs: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut q: Vec<f64> = start.iter().map(|x| x / start_norm).collect();
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n {
        let mut w: Vec<f64> = (0..n).map(|i| d[i] * q[i]).collect();
        let a = dot(&w, &q);
        alpha.push(a);
        if k + 1 == n {
            break;
        }
        qs.push(q.clone());
        // subtracting every previous vector covers both three-term recurrence terms
        for _ in 0..2 {
            for p in &qs {
                let c = dot(&w, p);
                w.iter_mut().zip(p).for_each(|(wi, pi)| *wi -= c * pi);
            }
        }
        let b = dot(&w, &w).sqrt();
        if b < 1e-12 * spread {
            return Err(Error::NumericalBreakdown(format!("Lanczos breakdown at step {}", k + 1)));
        }
        beta.push(b);
        q = w.into_iter().map(|x| x / b).collect();
    }
    Ok(Jacobi { alpha, beta })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
