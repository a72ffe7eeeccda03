//! Damped Gauss–Newton on pairs of orthogonal factors.
//!
//! Iterates are `X = U·base·V` with `U`, `V` orthogonal; updates are `U ← e^{ΔK}U` and
//! `V ← V·e^{ΔL}` for skew `ΔK`, `ΔL`, so singular values are preserved by construction.
//! The residual is `X` at selected positions minus targets.

use nalgebra::DMatrix;

use super::{SolverConfig, TraceEvent};
use crate::error::{Error, Result};
use crate::numerics::{expm_skew, DenseMatrix};

/// Number of below-diagonal coordinates of a k×k skew matrix.
pub fn skew_dim(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Below-diagonal positions (i > j) in column-major order.
pub fn skew_coordinates(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|j| (j + 1..k).map(move |i| (i, j))).collect()
}

/// `Σ c_t (E_{i_t j_t} − E_{j_t i_t})`.
pub fn skew_from_coords(k: usize, c: &[f64]) -> DenseMatrix {
    let mut s = DenseMatrix::zeros(k, k);
    for (&(i, j), &v) in skew_coordinates(k).iter().zip(c) {
        s[(i, j)] = v;
        s[(j, i)] = -v;
    }
    s
}

/// Below-diagonal coordinates of a skew matrix.
pub fn coords_from_skew(s: &DenseMatrix) -> Vec<f64> {
    skew_coordinates(s.rows()).iter().map(|&(i, j)| s[(i, j)]).collect()
}

/// Residual system: entries of `U·base·V` at `positions` should equal `targets`.
#[derive(Debug, Clone)]
pub struct ProjectedSystem {
    pub base: DenseMatrix,
    pub positions: Vec<(usize, usize)>,
    pub targets: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub u: DenseMatrix,
    pub v: DenseMatrix,
    pub x: DenseMatrix,
    pub iterations: usize,
    /// `‖r‖ / ‖base‖_F` at exit.
    pub residual: f64,
}

impl ProjectedSystem {
    pub fn unknowns(&self) -> usize {
        skew_dim(self.base.rows()) + skew_dim(self.base.cols())
    }

    pub fn residual(&self, x: &DenseMatrix) -> Vec<f64> {
        self.positions.iter().zip(&self.targets).map(|(&(p, q), t)| x[(p, q)] - t).collect()
    }

    /// Derivative of the residual at `x` with respect to left and right skew coordinates:
    /// column for left generator G is `(G·X)` at the positions, for right generator `X·G`.
    pub fn jacobian(&self, x: &DenseMatrix) -> DenseMatrix {
        let (m, n) = x.shape();
        let mut jac = DenseMatrix::zeros(self.positions.len(), self.unknowns());
        let mut col = 0;
        // (E_ij − E_ji)·X has row i = X row j and row j = −X row i
        for (i, j) in skew_coordinates(m) {
            for (r, &(p, q)) in self.positions.iter().enumerate() {
                jac[(r, col)] = if p == i {
                    x[(j, q)]
                } else if p == j {
                    -x[(i, q)]
                } else {
                    0.0
                };
            }
            col += 1;
        }
        // X·(E_ij − E_ji) has column j = X column i and column i = −X column j
        for (i, j) in skew_coordinates(n) {
            for (r, &(p, q)) in self.positions.iter().enumerate() {
                jac[(r, col)] = if q == j {
                    x[(p, i)]
                } else if q == i {
                    -x[(p, j)]
                } else {
                    0.0
                };
            }
            col += 1;
        }
        jac
    }

    /// Residual as a function of the update coordinates `(k, l)` around `(u, v)`.
    pub fn residual_at(&self, u: &DenseMatrix, v: &DenseMatrix, kl: &[f64]) -> Result<Vec<f64>> {
        let (u2, v2) = self.update(u, v, kl)?;
        Ok(self.residual(&u2.matmul(&self.base).matmul(&v2)))
    }

    fn update(&self, u: &DenseMatrix, v: &DenseMatrix, kl: &[f64]) -> Result<(DenseMatrix, DenseMatrix)> {
        let (m, n) = self.base.shape();
        let dm = skew_dim(m);
        let k = skew_from_coords(m, &kl[..dm]);
        let l = skew_from_coords(n, &kl[dm..]);
        Ok((expm_skew(&k)?.matmul(u), v.matmul(&expm_skew(&l)?)))
    }

    /// Levenberg–Marquardt from the orthogonal pair `(u0, v0)`.
    pub fn solve(
        &self,
        u0: DenseMatrix,
        v0: DenseMatrix,
        cfg: &SolverConfig,
        trace: &mut dyn FnMut(&TraceEvent),
    ) -> Result<Solution> {
        let scale = self.base.norm_fro().max(f64::MIN_POSITIVE);
        let mut u = u0;
        let mut v = v0;
        let mut x = u.matmul(&self.base).matmul(&v);
        let mut r = self.residual(&x);
        let mut rn = norm(&r) / scale;
        let mut damping = cfg.damping;
        let mut iterations = 0;
        trace(&TraceEvent { iter: 0, residual: rn, damping, step_norm: 0.0 });
        while rn > cfg.residual_tol {
            if iterations >= cfg.max_iters || self.unknowns() == 0 {
                return Err(Error::NoConvergence { residual: rn });
            }
            iterations += 1;
            let jac = self.jacobian(&x);
            let step = damped_step(&jac, &r, damping);
            let step_norm = norm(&step);
            let (u2, v2) = self.update(&u, &v, &step)?;
            let x2 = u2.matmul(&self.base).matmul(&v2);
            let r2 = self.residual(&x2);
            let rn2 = norm(&r2) / scale;
            if rn2 < rn {
                u = u2;
                v = v2;
                x = x2;
                r = r2;
                rn = rn2;
                damping = (damping / 10.0).max(1e-16);
            } else {
                damping = (damping * 10.0).min(1e16);
            }
            trace(&TraceEvent { iter: iterations, residual: rn, damping, step_norm });
            if step_norm == 0.0 && rn > cfg.residual_tol && damping >= 1e16 {
                return Err(Error::NoConvergence { residual: rn });
            }
        }
        Ok(Solution { u, v, x, iterations, residual: rn })
    }
}

/// `δ = −Σ sᵢ/(sᵢ² + λ) vᵢ uᵢᵀ r` with `λ = damping · s_max²`; the minimum-norm
/// Gauss–Newton step as damping → 0.
pub fn damped_step(jac: &DenseMatrix, r: &[f64], damping: f64) -> Vec<f64> {
    let (rows, cols) = jac.shape();
    if rows == 0 || cols == 0 {
        return vec![0.0; cols];
    }
    let j = jac.to_nalgebra();
    let svd = j.svd(true, true);
    let uu = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let s = &svd.singular_values;
    let smax = s.iter().fold(0.0f64, |a, &b| a.max(b));
    if smax == 0.0 {
        return vec![0.0; cols];
    }
    let lambda = damping * smax * smax;
    let rv = DMatrix::from_column_slice(rows, 1, r);
    let mut step = vec![0.0; cols];
    for (i, &si) in s.iter().enumerate() {
        if si <= 1e-14 * smax {
            continue;
        }
        let coef = si / (si * si + lambda) * (uu.column(i).transpose() * &rv)[(0, 0)];
        for (c, st) in step.iter_mut().enumerate() {
            *st -= coef * vt[(i, c)];
        }
    }
    step
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
