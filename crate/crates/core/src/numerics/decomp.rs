//! SVD-backed kernels: singular values, rank, nullspace, symmetric spectra.
//!
//! The bidiagonal SVD and the symmetric eigensolver come from `nalgebra`; everything
//! here is about ordering, tolerances and sign conventions on top of it.

use nalgebra::{DMatrix, SymmetricEigen};

use super::matrix::{DenseMatrix, SigmaList};
use crate::error::{Error, Result};

/// Default relative rank tolerance, applied as `tol · max(m, n) · σ_max`.
pub const RANK_TOL: f64 = 1e-12;

/// Thin singular value decomposition `M = U · diag(σ) · Vᵀ` with σ non-increasing.
#[derive(Debug, Clone)]
pub struct Svd {
    /// m × k, k = min(m, n)
    pub u: DenseMatrix,
    pub sigma: SigmaList,
    /// n × k
    pub v: DenseMatrix,
}

fn check_finite(m: &DenseMatrix) -> Result<()> {
    if m.data().iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("matrix has non-finite entries".into()))
    }
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(std::cmp::Ordering::Equal));
    idx
}

/// The `min(rows, cols)` singular values of `m`, non-increasing.
pub fn singular_values(m: &DenseMatrix) -> Result<SigmaList> {
    check_finite(m)?;
    if m.is_empty() {
        return Ok(SigmaList::from_sorted_unchecked(Vec::new()));
    }
    let mut s: Vec<f64> = m.to_nalgebra().singular_values().iter().map(|x| x.max(0.0)).collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(SigmaList::from_sorted_unchecked(s))
}

pub fn svd(m: &DenseMatrix) -> Result<Svd> {
    check_finite(m)?;
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Ok(Svd {
            u: DenseMatrix::zeros(rows, 0),
            sigma: SigmaList::from_sorted_unchecked(Vec::new()),
            v: DenseMatrix::zeros(cols, 0),
        });
    }
    let dec = m.to_nalgebra().svd(true, true);
    let u = dec.u.expect("u requested");
    let v_t = dec.v_t.expect("v_t requested");
    let s: Vec<f64> = dec.singular_values.iter().copied().collect();
    let order = descending_order(&s);
    let u_out = DenseMatrix::from_fn(rows, k, |i, j| u[(i, order[j])]);
    let v_out = DenseMatrix::from_fn(cols, k, |i, j| v_t[(order[j], i)]);
    let sigma = order.iter().map(|&j| s[j].max(0.0)).collect();
    Ok(Svd { u: u_out, sigma: SigmaList::from_sorted_unchecked(sigma), v: v_out })
}

/// Right singular vectors (all `cols` of them) paired with their singular values,
/// ascending. Rows are zero-padded so a wide matrix still yields a full V.
fn right_singular_pairs(m: &DenseMatrix) -> (Vec<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    let padded_rows = rows.max(cols);
    let mut a = DMatrix::<f64>::zeros(padded_rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            a[(i, j)] = m[(i, j)];
        }
    }
    let dec = a.svd(false, true);
    let v_t = dec.v_t.expect("v_t requested");
    let s: Vec<f64> = dec.singular_values.iter().copied().collect();
    let mut order = descending_order(&s);
    order.reverse();
    let s_sorted = order.iter().map(|&j| s[j].max(0.0)).collect();
    let v = DMatrix::from_fn(cols, cols, |i, j| v_t[(order[j], i)]);
    (s_sorted, v)
}

/// Orthonormal basis of `{x : ‖Mx‖ ≤ tol·‖M‖₂·‖x‖}` as the columns of a `cols × d` matrix.
///
/// Columns are ordered by increasing singular value. Each column is signed so that its
/// first entry of magnitude above `tol` is positive.
pub fn nullspace(m: &DenseMatrix, tol: f64) -> Result<DenseMatrix> {
    check_finite(m)?;
    if tol < 0.0 {
        return Err(Error::InvalidInput("tolerance must be nonnegative".into()));
    }
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    if rows == 0 || m.norm_max() == 0.0 {
        return Ok(DenseMatrix::identity(cols));
    }
    let (s, v) = right_singular_pairs(m);
    let smax = s.last().copied().unwrap_or(0.0);
    let threshold = tol * smax;
    let dim = s.iter().take_while(|&&x| x <= threshold).count();
    let mut basis = DenseMatrix::zeros(cols, dim);
    for j in 0..dim {
        let mut col: Vec<f64> = (0..cols).map(|i| v[(i, j)]).collect();
        normalize_sign(&mut col, tol);
        for i in 0..cols {
            basis[(i, j)] = col[i];
        }
    }
    Ok(basis)
}

/// Flips `v` so that its first entry with magnitude above `tol` is positive.
pub fn normalize_sign(v: &mut [f64], tol: f64) {
    if let Some(first) = v.iter().copied().find(|x| x.abs() > tol) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Numerical rank: singular values above `tol · max(m, n) · σ_max`.
pub fn rank(m: &DenseMatrix, tol: f64) -> usize {
    rank_profile(m, tol).0
}

/// Rank together with the (non-increasing) singular values it was read from.
pub(crate) fn rank_profile(m: &DenseMatrix, tol: f64) -> (usize, Vec<f64>) {
    if m.is_empty() {
        return (0, Vec::new());
    }
    let s = match singular_values(m) {
        Ok(s) => s.values().to_vec(),
        Err(_) => return (0, Vec::new()),
    };
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return (0, s);
    }
    let threshold = tol * m.rows().max(m.cols()) as f64 * smax;
    (s.iter().filter(|&&x| x > threshold).count(), s)
}

/// Eigenvalues of a symmetric matrix, non-increasing.
pub fn symmetric_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>> {
    check_finite(m)?;
    if !m.is_square() {
        return Err(Error::InvalidInput("symmetric eigenvalues need a square matrix".into()));
    }
    let scale = m.norm_max().max(1.0);
    if !m.is_symmetric(1e-10 * scale * m.rows() as f64) {
        return Err(Error::InvalidInput("matrix is not symmetric".into()));
    }
    if m.rows() == 0 {
        return Ok(Vec::new());
    }
    let eig = SymmetricEigen::new(m.to_nalgebra());
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(ev)
}

/// Dimension of `{X : A X = X B}` for symmetric `A`, `B`: the number of eigenvalue pairs
/// `(λᵢ, μⱼ)`, counted with multiplicity, with `|λᵢ − μⱼ| ≤ tol`.
pub fn sylvester_commuting_dim(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> Result<usize> {
    let la = symmetric_eigenvalues(a)?;
    let mb = symmetric_eigenvalues(b)?;
    Ok(la.iter().map(|l| mb.iter().filter(|mu| (l - *mu).abs() <= tol).count()).sum())
}

/// Central-difference Jacobian of `f` at `x`, one column per coordinate of `x`.
pub fn fd_jacobian<F>(f: F, x: &[f64], h: f64) -> DenseMatrix
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let f0 = f(x);
    let mut jac = DenseMatrix::zeros(f0.len(), x.len());
    let mut xp = x.to_vec();
    for j in 0..x.len() {
        let orig = xp[j];
        xp[j] = orig + h;
        let fp = f(&xp);
        xp[j] = orig - h;
        let fm = f(&xp);
        xp[j] = orig;
        for i in 0..f0.len() {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

/// Greedy row selection: indices of rows that each increase the rank, scanned top down.
pub fn independent_rows(m: &DenseMatrix, tol: f64) -> Vec<usize> {
    let scale = m.norm_fro();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut picked = Vec::new();
    if scale == 0.0 {
        return picked;
    }
    let threshold = tol * m.rows().max(m.cols()) as f64 * scale;
    for i in 0..m.rows() {
        let mut r = m.row(i).to_vec();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = r.iter().zip(b).map(|(x, y)| x * y).sum();
                r.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
        }
        let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > threshold.max(1e-9 * m.row(i).iter().map(|x| x * x).sum::<f64>().sqrt()) {
            r.iter_mut().for_each(|x| *x /= n);
            basis.push(r);
            picked.push(i);
        }
    }
    picked
}
