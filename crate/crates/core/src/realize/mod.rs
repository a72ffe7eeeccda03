//! Constructive realizers for pattern families with explicit solutions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{liberate, liberate_along, liberation_direction, superpattern_realize, SolverConfig};
use crate::numerics::{lanczos_jacobi, singular_values, uniform_start, DenseMatrix, SigmaList};
use crate::pattern::{digraph_has_cycle, pattern_of_default, term_rank, Pattern};

/// A matrix together with how well it meets a requested pattern and singular value list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizationResult {
    pub matrix: DenseMatrix,
    pub achieved_sigmas: SigmaList,
    pub sigma_error: f64,
    pub pattern_ok: bool,
    pub method: String,
    pub iterations: usize,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ssvp: Option<bool>,
}

impl RealizationResult {
    pub fn new(
        matrix: DenseMatrix,
        requested: &SigmaList,
        pattern: &Pattern,
        method: &str,
        iterations: usize,
        residual: f64,
    ) -> Self {
        let achieved_sigmas = singular_values(&matrix).unwrap_or_else(|_| SigmaList::from_sorted_unchecked(Vec::new()));
        let sigma_error = if achieved_sigmas.len() == requested.len() {
            achieved_sigmas.relative_error(requested)
        } else {
            f64::INFINITY
        };
        let pattern_ok = matches!(pattern_of_default(&matrix), Ok(p) if p == *pattern);
        Self {
            matrix,
            achieved_sigmas,
            sigma_error,
            pattern_ok,
            method: method.into(),
            iterations,
            residual,
            ssvp: None,
        }
    }
}

fn all_distinct(values: &[f64]) -> bool {
    let scale = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    values.windows(2).all(|w| (w[0] - w[1]).abs() > 1e-12 * scale)
}

/// The `n × (n+1)` staircase pattern with ones at `(i, i)` and `(i, i+1)`.
pub fn staircase(n: usize) -> Pattern {
    Pattern::from_fn(n, n + 1, |i, j| j == i || j == i + 1)
}

/// Upper bidiagonal `B` with `BᵀB = T` for a positive semidefinite Jacobi matrix `T`,
/// built from the pivots `d_i / d_{i−1}` of the leading principal minors.
fn bidiagonal_factor(alpha: &[f64], beta: &[f64], rows: usize) -> Result<DenseMatrix> {
    let cols = alpha.len();
    let mut b = DenseMatrix::zeros(rows, cols);
    let mut pivot = 0.0;
    for i in 0..rows {
        let r = if i == 0 { alpha[0] } else { alpha[i] - beta[i - 1] * beta[i - 1] / pivot };
        if r.is_nan() || r <= 0.0 {
            return Err(Error::NumericalBreakdown(format!("nonpositive pivot at {}", i + 1)));
        }
        let d = r.sqrt();
        b[(i, i)] = d;
        if i + 1 < cols {
            b[(i, i + 1)] = beta[i] / d;
        }
        pivot = r;
    }
    Ok(b)
}

/// An `n × (n+1)` staircase matrix with singular values `sigmas`.
pub fn realize_path(sigmas: &SigmaList) -> Result<RealizationResult> {
    let s = sigmas.values();
    let n = s.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty sigma list".into()));
    }
    if s.iter().any(|&x| x <= 0.0) || !all_distinct(s) {
        return Err(Error::Infeasible("path patterns need distinct nonzero singular values".into()));
    }
    let mut eigs: Vec<f64> = s.iter().map(|x| x * x).collect();
    eigs.push(0.0);
    let jac = lanczos_jacobi(&eigs, &uniform_start(n + 1))?;
    let b = bidiagonal_factor(&jac.alpha, &jac.beta, n)?;
    Ok(RealizationResult::new(b, sigmas, &staircase(n), "path", 0, 0.0))
}

/// `diag(σ)·Q` for a row-orthonormal `Q`.
pub fn realize_orthonormal_scaled(q: &DenseMatrix, sigmas: &SigmaList) -> Result<RealizationResult> {
    let m = q.rows();
    if sigmas.len() != m {
        return Err(Error::DimensionMismatch(format!("{} sigmas for {m} rows", sigmas.len())));
    }
    if q.cols() < m || q.matmul(&q.transpose()).sub(&DenseMatrix::identity(m)).norm_max() > 1e-10 {
        return Err(Error::InvalidInput("Q must be row-orthonormal".into()));
    }
    if sigmas.values().iter().any(|&x| x <= 0.0) {
        return Err(Error::InvalidInput("sigmas must be positive".into()));
    }
    let x = DenseMatrix::diag(sigmas.values()).matmul(q);
    let p = pattern_of_default(q)?;
    Ok(RealizationResult::new(x, sigmas, &p, "orthonormal-scaled", 0, 0.0))
}

/// A nowhere-zero `k × k` orthogonal matrix.
pub fn nowhere_zero_orthogonal(k: usize) -> DenseMatrix {
    match k {
        0 => DenseMatrix::zeros(0, 0),
        1 => DenseMatrix::identity(1),
        2 => DenseMatrix::from_rows(&[[1.0, 1.0], [1.0, -1.0]]).scale(std::f64::consts::FRAC_1_SQRT_2),
        _ => DenseMatrix::from_fn(k, k, |i, j| if i == j { 1.0 } else { 0.0 } - 2.0 / k as f64),
    }
}

/// The 6-cycle pattern `[[1,1,0],[0,1,1],[1,0,1]]`.
pub fn c6_pattern() -> Pattern {
    Pattern::from_rows(&[[1, 1, 0], [0, 1, 1], [1, 0, 1]])
}

/// Tangent generators `(K, L)` and base `N` for a C6 target `(σ₁, σ₂, 0)`.
pub fn c6_zero_case(s1: f64, s2: f64) -> (DenseMatrix, DenseMatrix, DenseMatrix) {
    let (mut theta, mut phi) = (std::f64::consts::PI / 5.0, std::f64::consts::PI / 3.0);
    loop {
        let (a, c) = (s1 * theta.cos(), s2 * phi.cos());
        if (a * a - c * c).abs() >= 1e-6 * s1 * s1 {
            break;
        }
        theta *= 0.9;
        phi *= 1.1;
    }
    let (a, b, c, d) = (s1 * theta.cos(), s1 * theta.sin(), s2 * phi.cos(), s2 * phi.sin());
    c6_zero_case_from(a, b, c, d)
}

/// `(K, L, N)` for explicit parameters `a, b, c, d`.
pub fn c6_zero_case_from(a: f64, b: f64, c: f64, d: f64) -> (DenseMatrix, DenseMatrix, DenseMatrix) {
    let (a2, b2, c2, d2) = (a * a, b * b, c * c, d * d);
    let k = DenseMatrix::from_rows(&[
        [0.0, (d2 - b2) * c, (a2 - c2) * d],
        [(b2 - d2) * c, 0.0, 0.0],
        [(c2 - a2) * d, 0.0, 0.0],
    ]);
    let l = DenseMatrix::from_rows(&[
        [0.0, 0.0, (b2 - d2) * a],
        [0.0, 0.0, (c2 - a2) * b],
        [(d2 - b2) * a, (a2 - c2) * b, 0.0],
    ]);
    let n = DenseMatrix::from_rows(&[[a, b, 0.0], [0.0, 0.0, c], [0.0, 0.0, d]]);
    (k, l, n)
}

/// `(K, L, M)` for a C6 target `(σ, 1, 1)` where `N = [[a, b], [0, c]]` has singular
/// values `σ` and `1`.
pub fn c6_repeated_case_from(a: f64, b: f64, c: f64) -> (DenseMatrix, DenseMatrix, DenseMatrix) {
    let k = DenseMatrix::from_rows(&[[0.0, 0.0, -1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
    let l = DenseMatrix::from_rows(&[[0.0, 0.0, (1.0 - b * b) / a], [0.0, 0.0, b], [(b * b - 1.0) / a, -b, 0.0]]);
    let m = DenseMatrix::from_rows(&[[a, b, 0.0], [0.0, c, 0.0], [0.0, 0.0, 1.0]]);
    (k, l, m)
}

/// `[[a, b], [0, c]]` with singular values `s` and `1` (`s ≠ 1`, `s > 0`).
pub fn even_path_2x2(s: f64) -> Result<(f64, f64, f64)> {
    let jac = lanczos_jacobi(&[s * s, 1.0], &uniform_start(2))?;
    let b = bidiagonal_factor(&jac.alpha, &jac.beta, 2)?;
    Ok((b[(0, 0)], b[(0, 1)], b[(1, 1)]))
}

/// A matrix with pattern `[[1,1,0],[0,1,1],[1,0,1]]` and singular values `sigmas`, given
/// non-increasing.
pub fn realize_c6(sigmas: &[f64], cfg: &SolverConfig) -> Result<RealizationResult> {
    if sigmas.len() != 3 {
        return Err(Error::DimensionMismatch("C6 needs three singular values".into()));
    }
    let (s1, s2, s3) = (sigmas[0], sigmas[1], sigmas[2]);
    if s2 == 0.0 {
        return Err(Error::Infeasible("sigma2 == 0".into()));
    }
    if s1 == s3 {
        return Err(Error::Infeasible("sigma1 == sigma3".into()));
    }
    let target = SigmaList::new(sigmas.to_vec())?;
    let p = c6_pattern();
    if s3 == 0.0 && s1 == s2 {
        let x = DenseMatrix::from_rows(&[[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [-1.0, 0.0, 1.0]]).scale(s1 / 3f64.sqrt());
        return Ok(RealizationResult::new(x, &target, &p, "c6-closed-form", 0, 0.0));
    }
    if s3 == 0.0 {
        let (k, l, n) = c6_zero_case(s1, s2);
        let mut r = liberate_along(&n, &k, &l, cfg)?;
        r.method = "c6-liberate".into();
        return Ok(recheck(r, &target, &p));
    }
    if s1 > s2 && s2 > s3 {
        let mut r = realize_distinct(&p, &target, cfg)?;
        r.method = "c6-distinct".into();
        return Ok(r);
    }
    let (scale, s) = if s2 == s3 { (s2, s1 / s2) } else { (s1, s3 / s1) };
    let (a, b, c) = even_path_2x2(s)?;
    let (k, l, m) = c6_repeated_case_from(a, b, c);
    let r = liberate_along(&m, &k, &l, cfg)?;
    let mut out = RealizationResult::new(r.matrix.scale(scale), &target, &p, "c6-liberate", r.iterations, r.residual);
    out.ssvp = r.ssvp;
    Ok(out)
}

fn recheck(r: RealizationResult, target: &SigmaList, p: &Pattern) -> RealizationResult {
    let mut out = RealizationResult::new(r.matrix, target, p, &r.method, r.iterations, r.residual);
    out.ssvp = r.ssvp;
    out
}

/// A matrix with pattern `P` (m × n, m ≤ n after transposing) and distinct positive
/// singular values `sigmas`.
pub fn realize_distinct(p: &Pattern, sigmas: &SigmaList, cfg: &SolverConfig) -> Result<RealizationResult> {
    if p.rows() > p.cols() {
        let r = realize_distinct(&p.transpose(), sigmas, cfg)?;
        let mut out = RealizationResult::new(r.matrix.transpose(), sigmas, p, &r.method, r.iterations, r.residual);
        out.ssvp = r.ssvp;
        return Ok(out);
    }
    let m = p.rows();
    if sigmas.len() != m {
        return Err(Error::DimensionMismatch(format!("{} sigmas for a pattern with {m} rows", sigmas.len())));
    }
    let s = sigmas.values();
    if s.iter().any(|&x| x <= 0.0) || !all_distinct(s) {
        return Err(Error::InvalidInput("sigmas must be distinct and positive".into()));
    }
    let (tr, matching) = term_rank(p);
    if tr < m {
        return Err(Error::Infeasible(format!("term rank {tr} < {m}")));
    }
    let mut start = DenseMatrix::zeros(m, p.cols());
    for (k, &(i, j)) in matching.iter().enumerate() {
        start[(i, j)] = s[k];
    }
    let mut r = superpattern_realize(&start, p, cfg)?;
    r.method = "distinct".into();
    Ok(r)
}

/// The `n × n` cycle pattern with ones at `(i, i)`, `(i+1, i)` and `(0, n−1)`.
pub fn cycle_pattern(n: usize) -> Pattern {
    Pattern::from_fn(n, n, |i, j| i == j || i == j + 1 || (i == 0 && j + 1 == n))
}

/// A matrix with the `n × n` cycle pattern and distinct singular values `sigmas`, the
/// smallest of which is zero; `n` is the length of the list.
pub fn realize_cycle_with_zero(sigmas: &SigmaList, cfg: &SolverConfig) -> Result<RealizationResult> {
    let s = sigmas.values();
    let n = s.len();
    if n < 2 || !all_distinct(s) || s[n - 1] != 0.0 {
        return Err(Error::Infeasible("needs at least two distinct values, the smallest zero".into()));
    }
    let p = cycle_pattern(n);
    if n == 2 {
        let x = DenseMatrix::from_fn(2, 2, |_, _| s[0] / 2.0);
        return Ok(RealizationResult::new(x, sigmas, &p, "cycle-closed-form", 0, 0.0));
    }
    let path = realize_path(&SigmaList::new(s[1..n - 1].to_vec())?)?;
    let single = DenseMatrix::from_rows(&[[1.0, 1.0]]).scale(s[0] * std::f64::consts::FRAC_1_SQRT_2);
    let base = path.matrix.transpose().direct_sum(&single);
    let wanted = Pattern::from_positions(n, n, &[(n - 2, n - 2), (0, n - 1)])?;
    let d = liberation_direction(&base, &wanted)?;
    let lib = liberate(&base, &d, cfg)?;
    let mut iterations = lib.iterations;
    let mut residual = lib.residual;
    let mut x = lib.matrix;
    if pattern_of_default(&x)? != p {
        let filled = superpattern_realize(&x, &p, cfg)?;
        iterations += filled.iterations;
        residual = filled.residual;
        x = filled.matrix;
    }
    let mut out = RealizationResult::new(x, sigmas, &p, "cycle-liberate", iterations, residual);
    out.ssvp = lib.ssvp;
    Ok(out)
}

/// Whether a square pattern of full term rank allows singular values
/// `0 = σ₁ < σ₂ < … < σ_m`; false means every matrix with the pattern is invertible.
pub fn allows_zero_with_distinct(p: &Pattern) -> Result<bool> {
    let m = p.rows();
    if p.cols() != m {
        return Err(Error::InvalidInput("pattern must be square".into()));
    }
    let (tr, matching) = term_rank(p);
    if tr < m {
        return Err(Error::InvalidInput(format!("term rank {tr} < {m}")));
    }
    let mut col_perm = vec![0; m];
    for &(i, j) in &matching {
        col_perm[i] = j;
    }
    let rows: Vec<usize> = (0..m).collect();
    digraph_has_cycle(&p.permute(&rows, &col_perm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl(v: &[f64]) -> SigmaList {
        SigmaList::new(v.to_vec()).unwrap()
    }

    #[test]
    fn path_single_value() {
        let r = realize_path(&sl(&[1.0])).unwrap();
        let (b1, b2) = (r.matrix[(0, 0)], r.matrix[(0, 1)]);
        assert!((b1 * b1 + b2 * b2 - 1.0).abs() < 1e-14);
        assert!(b1 != 0.0 && b2 != 0.0);
    }

    #[test]
    fn path_three_values() {
        let r = realize_path(&sl(&[3.0, 2.0, 1.0])).unwrap();
        assert_eq!(r.matrix.shape(), (3, 4));
        assert!(r.pattern_ok);
        assert!(r.sigma_error < 1e-10);
    }

    #[test]
    fn path_rejects_repeats() {
        assert!(matches!(realize_path(&sl(&[2.0, 2.0])), Err(Error::Infeasible(_))));
        assert!(matches!(realize_path(&sl(&[2.0, 0.0])), Err(Error::Infeasible(_))));
    }

    #[test]
    fn orthonormal_scaling() {
        let r = realize_orthonormal_scaled(&DenseMatrix::identity(2), &sl(&[5.0, 3.0])).unwrap();
        assert_eq!(r.matrix, DenseMatrix::diag(&[5.0, 3.0]));
        let r = realize_orthonormal_scaled(&nowhere_zero_orthogonal(2), &sl(&[2.0, 1.0])).unwrap();
        assert!(r.sigma_error < 1e-12);
        assert!(realize_orthonormal_scaled(&DenseMatrix::identity(2), &sl(&[1.0, 0.0])).is_err());
        assert!(realize_orthonormal_scaled(&DenseMatrix::diag(&[1.0, 2.0]), &sl(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn nowhere_zero_orthogonal_matrices() {
        assert_eq!(nowhere_zero_orthogonal(1), DenseMatrix::identity(1));
        for k in 2..7 {
            let q = nowhere_zero_orthogonal(k);
            assert!(q.transpose().matmul(&q).sub(&DenseMatrix::identity(k)).norm_max() < 1e-14);
            assert!(q.data().iter().all(|x| *x != 0.0));
        }
    }

    #[test]
    fn c6_closed_form_and_infeasible() {
        let cfg = SolverConfig::default();
        let r = realize_c6(&[1.0, 1.0, 0.0], &cfg).unwrap();
        let want =
            DenseMatrix::from_rows(&[[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [-1.0, 0.0, 1.0]]).scale(1.0 / 3f64.sqrt());
        assert_eq!(r.matrix, want);
        assert!(r.sigma_error < 1e-14);
        assert_eq!(realize_c6(&[1.0, 1.0, 1.0], &cfg).unwrap_err(), Error::Infeasible("sigma1 == sigma3".into()));
        assert_eq!(realize_c6(&[3.0, 0.0, 0.0], &cfg).unwrap_err(), Error::Infeasible("sigma2 == 0".into()));
        assert_eq!(realize_c6(&[2.0, 1.5, 2.0], &cfg).unwrap_err(), Error::Infeasible("sigma1 == sigma3".into()));
        assert!(matches!(realize_c6(&[1.0, 2.0, 3.0], &cfg), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn c6_every_case() {
        let cfg = SolverConfig::default();
        for s in [[3.0, 2.0, 1.0], [2.0, 1.0, 0.0], [2.0, 1.0, 1.0], [2.0, 2.0, 1.0]] {
            let r = realize_c6(&s, &cfg).unwrap();
            assert!(r.pattern_ok, "{s:?}: {:?}", r.matrix);
            assert!(r.sigma_error < 1e-8, "{s:?}: {}", r.sigma_error);
        }
    }

    #[test]
    fn c6_tangent_products() {
        let (a, b, c, d) = (1.3, 0.4, 0.7, 1.9);
        let (k, l, n) = c6_zero_case_from(a, b, c, d);
        let s = a * a + b * b - c * c - d * d;
        let want = DenseMatrix::from_rows(&[[0.0, 0.0, 0.0], [0.0, s * b * c, 0.0], [-s * a * d, 0.0, 0.0]]);
        assert!(k.matmul(&n).add(&n.matmul(&l)).sub(&want).norm_max() < 1e-12);
        let (k, l, m) = c6_repeated_case_from(a, b, c);
        let want = DenseMatrix::from_rows(&[[0.0, 0.0, 0.0], [0.0, 0.0, b * c], [(a * a + b * b - 1.0) / a, 0.0, 0.0]]);
        assert!(k.matmul(&m).add(&m.matmul(&l)).sub(&want).norm_max() < 1e-12);
    }

    #[test]
    fn distinct_cases() {
        let cfg = SolverConfig::default();
        let r = realize_distinct(&Pattern::from_fn(3, 3, |i, j| i == j), &sl(&[3.0, 2.0, 1.0]), &cfg).unwrap();
        assert_eq!(r.matrix, DenseMatrix::diag(&[3.0, 2.0, 1.0]));
        let r = realize_distinct(&Pattern::ones(2, 2), &sl(&[2.0, 1.0]), &cfg).unwrap();
        assert!(r.pattern_ok && r.sigma_error < 1e-8);
        let zero_row = Pattern::from_rows(&[[1, 1], [0, 0]]);
        assert!(matches!(realize_distinct(&zero_row, &sl(&[2.0, 1.0]), &cfg), Err(Error::Infeasible(_))));
    }

    #[test]
    fn cycles_with_zero() {
        let cfg = SolverConfig::default();
        let r = realize_cycle_with_zero(&sl(&[4.0, 0.0]), &cfg).unwrap();
        assert_eq!(r.matrix, DenseMatrix::from_fn(2, 2, |_, _| 2.0));
        for s in [vec![2.0, 1.0, 0.0], vec![3.0, 2.0, 1.0, 0.0], vec![4.0, 3.0, 2.0, 1.0, 0.0]] {
            let r = realize_cycle_with_zero(&sl(&s), &cfg).unwrap();
            assert!(r.pattern_ok, "{s:?}: {:?}", r.matrix);
            assert!(r.sigma_error < 1e-8);
        }
        assert!(realize_cycle_with_zero(&sl(&[2.0, 1.0]), &cfg).is_err());
        assert!(realize_cycle_with_zero(&sl(&[0.0]), &cfg).is_err());
    }

    #[test]
    fn zero_with_distinct() {
        let upper = Pattern::from_fn(3, 3, |i, j| i <= j);
        assert!(!allows_zero_with_distinct(&upper).unwrap());
        assert!(allows_zero_with_distinct(&c6_pattern()).unwrap());
        assert!(!allows_zero_with_distinct(&Pattern::from_fn(4, 4, |i, j| i == j)).unwrap());
        assert!(allows_zero_with_distinct(&Pattern::from_rows(&[[1, 1], [0, 0]])).is_err());
    }
}
