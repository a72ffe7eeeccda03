//! The tangent space `{K·A + A·L : K ∈ Skew(m), L ∈ Skew(n)}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::solver::{skew_dim, skew_from_coords, ProjectedSystem};
use crate::error::{Error, Result};
use crate::numerics::{exact_rank, nullspace, rank, svd, DenseMatrix, RationalMatrix, RANK_TOL};
use crate::pattern::Pattern;

const TARGET_ATTEMPTS: usize = 16;

#[derive(Debug, Clone, Serialize)]
pub struct TangentSpace {
    /// Orthonormal (Frobenius) basis, each element of the form KA + AL.
    pub basis: Vec<DenseMatrix>,
    /// Skew coordinates (left then right) producing each basis element.
    pub coefficients: Vec<Vec<f64>>,
    pub dimension: usize,
}

/// Generator matrix: column t is vec (row-major) of G_t·A or A·G_t over the skew
/// generators, left side first.
pub fn tangent_generators(a: &DenseMatrix) -> DenseMatrix {
    let positions: Vec<(usize, usize)> = (0..a.rows()).flat_map(|p| (0..a.cols()).map(move |q| (p, q))).collect();
    let sys = ProjectedSystem { base: a.clone(), targets: vec![0.0; positions.len()], positions };
    sys.jacobian(a)
}

pub fn tangent_basis(a: &DenseMatrix, tol: f64) -> Result<TangentSpace> {
    let (m, n) = a.shape();
    let g = tangent_generators(a);
    if g.cols() == 0 || g.rows() == 0 {
        return Ok(TangentSpace { basis: Vec::new(), coefficients: Vec::new(), dimension: 0 });
    }
    let dim = rank(&g, tol);
    let dec = svd(&g)?;
    let mut basis = Vec::with_capacity(dim);
    let mut coefficients = Vec::with_capacity(dim);
    for t in 0..dim {
        let s = dec.sigma.values()[t];
        basis.push(DenseMatrix::from_fn(m, n, |p, q| dec.u[(p * n + q, t)]));
        coefficients.push((0..g.cols()).map(|c| dec.v[(c, t)] / s).collect());
    }
    Ok(TangentSpace { basis, coefficients, dimension: dim })
}

/// The SSVP as a spanning condition: tangent directions plus coordinate matrices at the
/// nonzero entries of A span all m×n matrices.
pub fn ssvp_via_tangent(a: &DenseMatrix) -> bool {
    let zeros = Pattern::support(a).zero_positions();
    if zeros.is_empty() {
        return true;
    }
    let n = a.cols();
    let g = tangent_generators(a);
    let rows: Vec<usize> = zeros.iter().map(|&(p, q)| p * n + q).collect();
    let restricted = g.select_rows(&rows);
    let r = match RationalMatrix::from_dense_if_simple(&restricted) {
        Some(q) => exact_rank(&q),
        None => rank(&restricted, RANK_TOL),
    };
    r == zeros.len()
}

/// Least-squares skew pair `(K, L)` with `K·A + A·L ≈ D`, and the relative residual.
pub fn tangent_coordinates(a: &DenseMatrix, d: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix, f64)> {
    if a.shape() != d.shape() {
        return Err(Error::DimensionMismatch("direction and matrix differ in shape".into()));
    }
    let (m, n) = a.shape();
    let g = tangent_generators(a);
    let c = least_squares(&g, d.data());
    let fit = g.matmul(&DenseMatrix::new(c.len(), 1, c.clone())?);
    let resid = fit.data().iter().zip(d.data()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let rel = resid / d.norm_fro().max(f64::MIN_POSITIVE);
    let dm = skew_dim(m);
    Ok((skew_from_coords(m, &c[..dm]), skew_from_coords(n, &c[dm..]), rel))
}

/// Minimum-norm least-squares solution via the SVD.
fn least_squares(g: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let cols = g.cols();
    if cols == 0 || g.rows() == 0 {
        return vec![0.0; cols];
    }
    let dec = g.to_nalgebra().svd(true, true);
    let smax = dec.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    let bv = nalgebra::DVector::from_column_slice(b);
    dec.solve(&bv, 1e-12 * smax.max(f64::MIN_POSITIVE))
        .map(|x| x.iter().copied().collect())
        .unwrap_or_else(|_| vec![0.0; cols])
}

/// Tangent direction that is nonzero on every `wanted` position and vanishes on every
/// other zero position of A, scaled to unit norm on the wanted positions.
///
/// Among directions vanishing off A's support and `wanted`, picks the least-squares fit
/// to the all-ones vector on `wanted`, falling back to seeded random sign patterns when
/// that fit vanishes somewhere on `wanted`.
pub fn liberation_direction(a: &DenseMatrix, wanted: &Pattern) -> Result<DenseMatrix> {
    if wanted.shape() != a.shape() {
        return Err(Error::DimensionMismatch("wanted pattern and matrix differ in shape".into()));
    }
    let (m, n) = a.shape();
    let support = Pattern::support(a);
    let wanted_pos: Vec<(usize, usize)> =
        wanted.ones_positions().into_iter().filter(|&(i, j)| !support.get(i, j)).collect();
    if wanted_pos.is_empty() {
        return Err(Error::InvalidInput("no wanted positions outside the support of A".into()));
    }
    let others: Vec<(usize, usize)> =
        support.zero_positions().into_iter().filter(|&(i, j)| !wanted.get(i, j)).collect();
    let g = tangent_generators(a);
    let idx = |pos: &[(usize, usize)]| pos.iter().map(|&(p, q)| p * n + q).collect::<Vec<_>>();
    let g_other = g.select_rows(&idx(&others));
    let g_wanted = g.select_rows(&idx(&wanted_pos));

    // coefficient directions whose image vanishes on the other zero positions
    let free = if others.is_empty() { DenseMatrix::identity(g.cols()) } else { nullspace(&g_other, 1e-10)? };
    if free.cols() == 0 {
        return Err(Error::Infeasible("every tangent direction is nonzero off the wanted positions".into()));
    }
    let w = g_wanted.matmul(&free);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut target = vec![1.0; wanted_pos.len()];
    let mut failure = Error::Infeasible("no tangent direction reaches the wanted positions".into());
    for _ in 0..TARGET_ATTEMPTS {
        let y = least_squares(&w, &target);
        let coeffs = free.matmul(&DenseMatrix::new(y.len(), 1, y)?);
        let dvec = g.matmul(&coeffs);
        let d = DenseMatrix::from_fn(m, n, |p, q| dvec[(p * n + q, 0)]);
        let wn = wanted_pos.iter().map(|&(p, q)| d[(p, q)].powi(2)).sum::<f64>().sqrt();
        if wn > 1e-10 * d.norm_max().max(1.0) {
            let d = d.scale(1.0 / wn);
            match wanted_pos.iter().find(|&&(p, q)| d[(p, q)].abs() <= 1e-8 * d.norm_max()) {
                None => return Ok(finish(d, &others)),
                Some(&(p, q)) => {
                    failure = Error::Infeasible(format!(
                        "tangent directions cannot make position ({}, {}) nonzero together with the others",
                        p + 1,
                        q + 1
                    ))
                }
            }
        }
        target = (0..wanted_pos.len())
            .map(|_| rng.random_range(0.5..1.5) * if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
    }
    Err(failure)
}

fn finish(mut d: DenseMatrix, others: &[(usize, usize)]) -> DenseMatrix {
    for &(p, q) in others {
        d[(p, q)] = 0.0;
    }
    d
}
