//! Verification matrices Ψ_A and φ_A, SSVP decisions and certificates.

use num::rational::BigRational;
use num::traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    exact_independent_rows, exact_nullspace, exact_rank, independent_rows, is_simple_rational, normalize_sign,
    nullspace, rank_profile, DenseMatrix, RationalMatrix, RANK_TOL,
};
use crate::pattern::{is_superpattern, pattern_of_default, Pattern};

/// Separation ratio below which a numerical rank decision is considered unsafe.
pub const BORDERLINE_RATIO: f64 = 1e3;

/// Which skew residual a row of Ψ_A belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    /// AᵀX − XᵀA (n×n), listed first.
    Right,
    /// XAᵀ − AXᵀ (m×m).
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowLabel {
    pub block: Block,
    /// Below-diagonal position, i > j, 0-based.
    pub i: usize,
    pub j: usize,
}

/// Ψ_A or a column submatrix of it, with row and column labels.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationMatrix {
    pub matrix: DenseMatrix,
    pub row_index: Vec<RowLabel>,
    /// Entry positions (p, q), 0-based.
    pub col_index: Vec<(usize, usize)>,
}

impl VerificationMatrix {
    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// Columns labelled by `positions`, in the given order.
    pub fn restrict(&self, positions: &[(usize, usize)]) -> Self {
        let idx: Vec<usize> = positions
            .iter()
            .map(|pq| self.col_index.iter().position(|c| c == pq).expect("position present in Ψ"))
            .collect();
        Self {
            matrix: self.matrix.select_columns(&idx),
            row_index: self.row_index.clone(),
            col_index: positions.to_vec(),
        }
    }
}

/// Below-diagonal entries of a square matrix, column by column.
pub fn vec_lower(s: &DenseMatrix) -> Result<Vec<f64>> {
    if !s.is_square() {
        return Err(Error::InvalidInput("vec_lower needs a square matrix".into()));
    }
    let k = s.rows();
    let mut out = Vec::with_capacity(k * k.saturating_sub(1) / 2);
    for j in 0..k {
        for i in j + 1..k {
            out.push(s[(i, j)]);
        }
    }
    Ok(out)
}

fn lower_labels(k: usize, block: Block) -> Vec<RowLabel> {
    (0..k).flat_map(|j| (j + 1..k).map(move |i| RowLabel { block, i, j })).collect()
}

/// Full verification matrix: column (p, q) stacks vec_lower(AᵀE_pq − E_qpA) over
/// vec_lower(E_pqAᵀ − AE_qp). Columns run row-major over (p, q).
pub fn build_psi(a: &DenseMatrix) -> VerificationMatrix {
    let (m, n) = a.shape();
    let mut row_index = lower_labels(n, Block::Right);
    row_index.extend(lower_labels(m, Block::Left));
    let col_index: Vec<(usize, usize)> = (0..m).flat_map(|p| (0..n).map(move |q| (p, q))).collect();
    let mut psi = DenseMatrix::zeros(row_index.len(), col_index.len());
    for (c, &(p, q)) in col_index.iter().enumerate() {
        for (r, label) in row_index.iter().enumerate() {
            let (i, j) = (label.i, label.j);
            let v = match label.block {
                // (AᵀE_pq)_ij = a_pi δ_jq,  (E_qp A)_ij = δ_iq a_pj
                Block::Right => {
                    let x = if j == q { a[(p, i)] } else { 0.0 };
                    let y = if i == q { a[(p, j)] } else { 0.0 };
                    x - y
                }
                // (E_pq Aᵀ)_ij = δ_ip a_jq,  (A E_qp)_ij = a_iq δ_jp
                Block::Left => {
                    let x = if i == p { a[(j, q)] } else { 0.0 };
                    let y = if j == p { a[(i, q)] } else { 0.0 };
                    x - y
                }
            };
            psi[(r, c)] = v;
        }
    }
    VerificationMatrix { matrix: psi, row_index, col_index }
}

/// Columns of Ψ_A at the zero entries of A.
pub fn build_phi(a: &DenseMatrix) -> VerificationMatrix {
    let zeros = Pattern::support(a).zero_positions();
    build_psi(a).restrict(&zeros)
}

/// Columns of Ψ_A at the zeros of a superpattern `s` of the pattern of A.
pub fn build_phi_wrt(a: &DenseMatrix, s: &Pattern) -> Result<VerificationMatrix> {
    check_superpattern(a, s)?;
    Ok(build_psi(a).restrict(&s.zero_positions()))
}

fn check_superpattern(a: &DenseMatrix, s: &Pattern) -> Result<()> {
    if s.shape() != a.shape() {
        return Err(Error::DimensionMismatch(format!(
            "pattern is {}×{}, matrix is {}×{}",
            s.rows(),
            s.cols(),
            a.rows(),
            a.cols()
        )));
    }
    if !is_superpattern(s, &pattern_of_default(a)?)? {
        return Err(Error::NotASuperpattern);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    /// SVD rank; borderline decisions escalate to exact arithmetic for rational input.
    #[default]
    Numeric,
    /// Exact elimination whenever the input is rational.
    ExactWhenRational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "has-SSVP")]
    Has,
    #[serde(rename = "lacks-SSVP")]
    Lacks,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Has => "has-SSVP",
            Verdict::Lacks => "lacks-SSVP",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// 0-based rows of φ whose square submatrix is invertible.
    PivotRows(Vec<usize>),
    /// Nonzero Y with AᵀY, YAᵀ symmetric and S∘Y = O.
    Violation(DenseMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsvpCertificate {
    pub verdict: Verdict,
    pub witness: Witness,
    /// (‖AᵀY − YᵀA‖, ‖YAᵀ − AYᵀ‖, ‖S∘Y‖), Frobenius; zeros for an independence witness.
    pub residuals: [f64; 3],
    /// Whether the rank decision was made in exact arithmetic.
    pub exact: bool,
    pub rank: usize,
    pub columns: usize,
}

impl SsvpCertificate {
    pub fn has_ssvp(&self) -> bool {
        self.verdict == Verdict::Has
    }

    pub fn y(&self) -> Option<&DenseMatrix> {
        match &self.witness {
            Witness::Violation(y) => Some(y),
            Witness::PivotRows(_) => None,
        }
    }

    pub fn pivot_rows(&self) -> Option<&[usize]> {
        match &self.witness {
            Witness::PivotRows(r) => Some(r),
            Witness::Violation(_) => None,
        }
    }
}

/// Wire form of a certificate; pivot rows are 1-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateReport {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pivot_rows: Option<Vec<usize>>,
    #[serde(rename = "Y", skip_serializing_if = "Option::is_none", default)]
    pub y: Option<DenseMatrix>,
    pub residuals: [f64; 3],
    pub exact: bool,
    pub rank: usize,
    pub columns: usize,
}

impl From<&SsvpCertificate> for CertificateReport {
    fn from(c: &SsvpCertificate) -> Self {
        CertificateReport {
            verdict: c.verdict,
            pivot_rows: c.pivot_rows().map(|r| r.iter().map(|i| i + 1).collect()),
            y: c.y().cloned(),
            residuals: c.residuals,
            exact: c.exact,
            rank: c.rank,
            columns: c.columns,
        }
    }
}

impl Serialize for SsvpCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateReport::from(self).serialize(s)
    }
}

/// Decides the SSVP from the column independence of φ_A.
pub fn check_ssvp(a: &DenseMatrix, mode: CheckMode) -> Result<SsvpCertificate> {
    let support = Pattern::support(a);
    decide(a, &support, mode)
}

/// SSVP relative to a superpattern `s` of the pattern of A.
pub fn check_ssvp_wrt(a: &DenseMatrix, s: &Pattern, mode: CheckMode) -> Result<SsvpCertificate> {
    check_superpattern(a, s)?;
    decide(a, s, mode)
}

fn decide(a: &DenseMatrix, s: &Pattern, mode: CheckMode) -> Result<SsvpCertificate> {
    let phi = build_psi(a).restrict(&s.zero_positions());
    let k = phi.cols();
    if k == 0 {
        return Ok(SsvpCertificate {
            verdict: Verdict::Has,
            witness: Witness::PivotRows(Vec::new()),
            residuals: [0.0; 3],
            exact: false,
            rank: 0,
            columns: 0,
        });
    }
    let rational = is_simple_rational(a);
    if mode == CheckMode::ExactWhenRational && rational {
        return decide_exact(a, s, &phi);
    }
    let (r, sv) = rank_profile(&phi.matrix, RANK_TOL);
    let smax = sv.first().copied().unwrap_or(0.0);
    let threshold = RANK_TOL * phi.rows().max(k) as f64 * smax;
    let ratio = if r == k {
        sv[k - 1] / threshold.max(f64::MIN_POSITIVE)
    } else if r + 1 == k && r > 0 {
        sv[r - 1] / sv.get(r).copied().unwrap_or(0.0).max(f64::MIN_POSITIVE)
    } else {
        f64::INFINITY
    };
    if ratio < BORDERLINE_RATIO {
        if rational {
            return decide_exact(a, s, &phi);
        }
        return Err(Error::BorderlineRank { rank: r, cols: k, ratio });
    }
    if r == k {
        let pivots = independent_rows(&phi.matrix, RANK_TOL);
        return Ok(SsvpCertificate {
            verdict: Verdict::Has,
            witness: Witness::PivotRows(pivots),
            residuals: [0.0; 3],
            exact: false,
            rank: r,
            columns: k,
        });
    }
    let y_vec = first_dependency_numeric(&phi.matrix);
    let y = assemble(a.shape(), &phi.col_index, &y_vec);
    let residuals = residuals(a, &y, s);
    Ok(SsvpCertificate {
        verdict: Verdict::Lacks,
        witness: Witness::Violation(y),
        residuals,
        exact: false,
        rank: r,
        columns: k,
    })
}

fn decide_exact(a: &DenseMatrix, s: &Pattern, phi: &VerificationMatrix) -> Result<SsvpCertificate> {
    let q = RationalMatrix::from_dense(&phi.matrix);
    let k = phi.cols();
    let r = exact_rank(&q);
    if r == k {
        let pivots = exact_independent_rows(&q);
        return Ok(SsvpCertificate {
            verdict: Verdict::Has,
            witness: Witness::PivotRows(pivots),
            residuals: [0.0; 3],
            exact: true,
            rank: r,
            columns: k,
        });
    }
    let kernel = exact_nullspace(&q);
    let v = &kernel[0];
    let ar = RationalMatrix::from_dense(a);
    let (m, n) = a.shape();
    let mut y_exact = vec![BigRational::zero(); m * n];
    for (t, &(p, qq)) in phi.col_index.iter().enumerate() {
        y_exact[p * n + qq] = v[t].clone();
    }
    let res = exact_residuals(&ar, &y_exact, s);
    let y_vec: Vec<f64> = v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    let norm = y_vec.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut unit: Vec<f64> = y_vec.iter().map(|x| x / norm).collect();
    normalize_sign(&mut unit, 1e-8);
    let y = assemble(a.shape(), &phi.col_index, &unit);
    let residuals = [res[0] / norm, res[1] / norm, res[2] / norm];
    Ok(SsvpCertificate {
        verdict: Verdict::Lacks,
        witness: Witness::Violation(y),
        residuals,
        exact: true,
        rank: r,
        columns: k,
    })
}

/// Unit kernel vector of the shortest leading column block of `phi` that is rank
/// deficient.
fn first_dependency_numeric(phi: &DenseMatrix) -> Vec<f64> {
    let k = phi.cols();
    for f in 0..k {
        let lead: Vec<usize> = (0..=f).collect();
        let block = phi.select_columns(&lead);
        let (r, _) = rank_profile(&block, RANK_TOL);
        if r <= f {
            let ns = nullspace(&block, dependency_tol(&block)).expect("finite");
            let mut v = vec![0.0; k];
            if ns.cols() > 0 {
                for i in 0..=f {
                    v[i] = ns[(i, 0)];
                }
            } else {
                v[f] = 1.0;
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            normalize_sign(&mut v, 1e-8);
            return v;
        }
    }
    unreachable!("caller ensures a rank deficiency")
}

fn dependency_tol(block: &DenseMatrix) -> f64 {
    RANK_TOL * block.rows().max(block.cols()).max(1) as f64
}

fn assemble((m, n): (usize, usize), positions: &[(usize, usize)], y: &[f64]) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(m, n);
    for (&(p, q), &v) in positions.iter().zip(y) {
        out[(p, q)] = v;
    }
    out
}

fn residuals(a: &DenseMatrix, y: &DenseMatrix, s: &Pattern) -> [f64; 3] {
    let at = a.transpose();
    let yt = y.transpose();
    let r1 = at.matmul(y).sub(&yt.matmul(a)).norm_fro();
    let r2 = y.matmul(&at).sub(&a.matmul(&yt)).norm_fro();
    let r3 = s.to_dense().hadamard(y).norm_fro();
    [r1, r2, r3]
}

fn exact_residuals(a: &RationalMatrix, y: &[BigRational], s: &Pattern) -> [f64; 3] {
    let (m, n) = (a.rows(), a.cols());
    let yv = |i: usize, j: usize| &y[i * n + j];
    let mut sq = [BigRational::zero(), BigRational::zero(), BigRational::zero()];
    // (AᵀY − YᵀA)_ij = Σ_k a_ki y_kj − y_ki a_kj
    for i in 0..n {
        for j in 0..n {
            let mut acc = BigRational::zero();
            for k in 0..m {
                acc += a.get(k, i) * yv(k, j) - yv(k, i) * a.get(k, j);
            }
            sq[0] += &acc * &acc;
        }
    }
    // (YAᵀ − AYᵀ)_ij = Σ_k y_ik a_jk − a_ik y_jk
    for i in 0..m {
        for j in 0..m {
            let mut acc = BigRational::zero();
            for k in 0..n {
                acc += yv(i, k) * a.get(j, k) - a.get(i, k) * yv(j, k);
            }
            sq[1] += &acc * &acc;
        }
    }
    for i in 0..m {
        for j in 0..n {
            if s.get(i, j) {
                sq[2] += yv(i, j) * yv(i, j);
            }
        }
    }
    sq.map(|x| x.to_f64().unwrap_or(f64::INFINITY).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub valid: bool,
    pub residuals: [f64; 3],
}

/// True iff `y` is nonzero and violates the SSVP of `a` relative to `s`, within
/// `1e−10·‖A‖·‖Y‖`.
pub fn validate_certificate(a: &DenseMatrix, y: &DenseMatrix, s: &Pattern) -> Result<CertificateCheck> {
    if a.shape() != y.shape() || a.shape() != s.shape() {
        return Err(Error::DimensionMismatch("A, Y and S must share a shape".into()));
    }
    let res = residuals(a, y, s);
    let ny = y.norm_fro();
    let tol = 1e-10 * a.norm_fro() * ny;
    let valid = ny > 0.0 && res.iter().all(|&r| r <= tol);
    Ok(CertificateCheck { valid, residuals: res })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vec_lower_examples() {
        let b = DenseMatrix::from_fn(4, 4, |i, j| if i == j { 0.0 } else { (10 * i.max(j) + i.min(j)) as f64 });
        assert_eq!(vec_lower(&b).unwrap(), vec![10.0, 20.0, 30.0, 21.0, 31.0, 32.0]);
        assert!(vec_lower(&DenseMatrix::from_rows(&[[5.0]])).unwrap().is_empty());
        assert_eq!(vec_lower(&DenseMatrix::from_rows(&[[0.0, 5.0], [7.0, 0.0]])).unwrap(), vec![7.0]);
        assert!(vec_lower(&DenseMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn psi_of_scalar_has_no_rows() {
        let psi = build_psi(&DenseMatrix::from_rows(&[[5.0]]));
        assert_eq!(psi.matrix.shape(), (0, 1));
    }

    #[test]
    fn diagonal_cases() {
        assert!(check_ssvp(&DenseMatrix::diag(&[1.0, 2.0]), CheckMode::Numeric).unwrap().has_ssvp());
        let c = check_ssvp(&DenseMatrix::diag(&[1.0, 1.0]), CheckMode::Numeric).unwrap();
        assert_eq!(c.verdict, Verdict::Lacks);
        let y = c.y().unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(y.sub(&DenseMatrix::from_rows(&[[0.0, r], [r, 0.0]])).norm_max() < 1e-12);
    }

    #[test]
    fn exact_mode_agrees() {
        let c = check_ssvp(&DenseMatrix::diag(&[1.0, 1.0]), CheckMode::ExactWhenRational).unwrap();
        assert!(c.exact);
        assert_eq!(c.residuals, [0.0; 3]);
        assert!(check_ssvp(&DenseMatrix::diag(&[1.0, -3.0]), CheckMode::ExactWhenRational).unwrap().has_ssvp());
    }

    #[test]
    fn certificate_validation() {
        let a = DenseMatrix::diag(&[1.0, 2.0]);
        let s = Pattern::support(&a);
        let y = DenseMatrix::from_rows(&[[0.0, 1.0], [0.5, 0.0]]);
        let check = validate_certificate(&a, &y, &s).unwrap();
        assert!(!check.valid);
        assert_eq!(check.residuals[0], 0.0);
        assert!(!validate_certificate(&a, &DenseMatrix::zeros(2, 2), &s).unwrap().valid);
        let i2 = DenseMatrix::identity(2);
        let y = DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        assert!(validate_certificate(&i2, &y, &Pattern::support(&i2)).unwrap().valid);
    }

    #[test]
    fn wrt_all_ones_is_trivial() {
        let a = DenseMatrix::diag(&[1.0, 1.0]);
        let c = check_ssvp_wrt(&a, &Pattern::ones(2, 2), CheckMode::Numeric).unwrap();
        assert!(c.has_ssvp());
        assert_eq!(c.columns, 0);
        let bad = Pattern::from_rows(&[[0, 1], [1, 1]]);
        assert_eq!(check_ssvp_wrt(&a, &bad, CheckMode::Numeric), Err(Error::NotASuperpattern));
    }
}
