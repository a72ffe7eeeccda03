//! Closed-form SSVP characterizations, tried in a fixed order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{exact_rank, rank, singular_values, DenseMatrix, RationalMatrix, RANK_TOL};
use crate::pattern::{term_rank, Pattern};
use crate::verify::{check_ssvp, CheckMode};

/// Relative tolerance for coincident absolute values and singular values.
pub const COINCIDENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedVerdict {
    #[serde(rename = "has-SSVP")]
    Has,
    #[serde(rename = "lacks-SSVP")]
    Lacks,
    #[serde(rename = "no-rule-applies")]
    NoRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "R1-nowhere-zero")]
    NowhereZero,
    #[serde(rename = "R2-zero-line")]
    ZeroLine,
    #[serde(rename = "R3-vector")]
    Vector,
    #[serde(rename = "R4-diagonal")]
    Diagonal,
    #[serde(rename = "R5-border")]
    Border,
    #[serde(rename = "R6-two-by-n")]
    TwoByN,
    #[serde(rename = "R7-term-rank")]
    TermRank,
    #[serde(rename = "R8-direct-sum")]
    DirectSum,
    #[serde(rename = "none")]
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormVerdict {
    pub verdict: ClosedVerdict,
    pub rule: Rule,
    pub detail: String,
}

impl ClosedFormVerdict {
    fn new(verdict: ClosedVerdict, rule: Rule, detail: impl Into<String>) -> Self {
        Self { verdict, rule, detail: detail.into() }
    }

    fn yes(rule: Rule, detail: impl Into<String>) -> Self {
        Self::new(ClosedVerdict::Has, rule, detail)
    }

    fn no(rule: Rule, detail: impl Into<String>) -> Self {
        Self::new(ClosedVerdict::Lacks, rule, detail)
    }

    fn none() -> Self {
        Self::new(ClosedVerdict::NoRule, Rule::None, "no closed-form rule matches")
    }
}

/// Runs the rule chain zero-line, term-rank, nowhere-zero, vector, diagonal, border,
/// 2×n, direct sum. Zero means exactly zero.
pub fn classify_ssvp(a: &DenseMatrix) -> ClosedFormVerdict {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return ClosedFormVerdict::none();
    }
    let p = Pattern::support(a);

    if m <= n {
        if let Some(i) = (0..m).find(|&i| p.row_is_zero(i)) {
            return ClosedFormVerdict::no(Rule::ZeroLine, format!("row {} is zero and m ≤ n", i + 1));
        }
    }
    if m >= n {
        if let Some(j) = (0..n).find(|&j| p.col_is_zero(j)) {
            return ClosedFormVerdict::no(Rule::ZeroLine, format!("column {} is zero and m ≥ n", j + 1));
        }
    }

    let (tr, _) = term_rank(&p);
    if tr < m.min(n) {
        return ClosedFormVerdict::no(Rule::TermRank, format!("term-rank {tr} < {}", m.min(n)));
    }

    if p.nnz() == m * n {
        return ClosedFormVerdict::yes(Rule::NowhereZero, "nowhere zero");
    }

    if m == 1 || n == 1 {
        return ClosedFormVerdict::yes(Rule::Vector, "nonzero vector");
    }

    if m == n && p.ones_positions().iter().all(|&(i, j)| i == j) {
        let d: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
        return diagonal_verdict(&d, Rule::Diagonal);
    }

    if let Some(v) = border_rule(a, &p) {
        return v;
    }

    if m == 2 || n == 2 {
        let t = if m == 2 { a.clone() } else { a.transpose() };
        if t.cols() >= 2 {
            return two_by_n(&t);
        }
    }

    direct_sum_rule(a, &p).unwrap_or_else(ClosedFormVerdict::none)
}

fn diagonal_verdict(d: &[f64], rule: Rule) -> ClosedFormVerdict {
    if let Some(i) = d.iter().position(|&x| x == 0.0) {
        return ClosedFormVerdict::no(rule, format!("diagonal entry {} is zero", i + 1));
    }
    let scale = d.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            if (d[i].abs() - d[j].abs()).abs() <= COINCIDENCE_TOL * scale {
                return ClosedFormVerdict::no(rule, format!("|d{}| = |d{}|", i + 1, j + 1));
            }
        }
    }
    ClosedFormVerdict::yes(rule, "nonzero diagonal entries with distinct absolute values")
}

/// `[B | O]` up to column permutation (or its transpose for zero rows).
fn border_rule(a: &DenseMatrix, p: &Pattern) -> Option<ClosedFormVerdict> {
    let (m, n) = a.shape();
    let zero_cols: Vec<usize> = (0..n).filter(|&j| p.col_is_zero(j)).collect();
    let zero_rows: Vec<usize> = (0..m).filter(|&i| p.row_is_zero(i)).collect();
    let (b, what) = if !zero_cols.is_empty() {
        let keep: Vec<usize> = (0..n).filter(|j| !zero_cols.contains(j)).collect();
        (a.select_columns(&keep), "columns")
    } else if !zero_rows.is_empty() {
        let keep: Vec<usize> = (0..m).filter(|i| !zero_rows.contains(i)).collect();
        (a.select_rows(&keep).transpose(), "rows")
    } else {
        return None;
    };
    if b.is_empty() || b.norm_max() == 0.0 {
        return None;
    }
    if !full_row_rank(&b) {
        return Some(ClosedFormVerdict::no(
            Rule::Border,
            format!(
                "zero {what} bordering a block with dependent {}",
                if what == "columns" { "rows" } else { "columns" }
            ),
        ));
    }
    let inner = classify_ssvp(&b);
    match inner.verdict {
        ClosedVerdict::NoRule => Some(ClosedFormVerdict::none()),
        v => Some(ClosedFormVerdict::new(
            v,
            Rule::Border,
            format!("zero {what} removed; block independent, block verdict via {:?}: {}", inner.rule, inner.detail),
        )),
    }
}

fn full_row_rank(b: &DenseMatrix) -> bool {
    matrix_rank(b) == b.rows()
}

fn matrix_rank(b: &DenseMatrix) -> usize {
    match RationalMatrix::from_dense_if_simple(b) {
        Some(q) => exact_rank(&q),
        None => rank(b, RANK_TOL),
    }
}

/// 2×n with no zero column, classified by column support.
fn two_by_n(a: &DenseMatrix) -> ClosedFormVerdict {
    let n = a.cols();
    let mut n1 = 0;
    let mut c = Vec::new();
    let mut d = Vec::new();
    for j in 0..n {
        match (a[(0, j)] != 0.0, a[(1, j)] != 0.0) {
            (true, true) => n1 += 1,
            (true, false) => c.push(a[(0, j)]),
            (false, true) => d.push(a[(1, j)]),
            (false, false) => return ClosedFormVerdict::none(),
        }
    }
    if n1 > 0 {
        return ClosedFormVerdict::yes(Rule::TwoByN, format!("n1 = {n1} > 0"));
    }
    if c.is_empty() || d.is_empty() {
        return ClosedFormVerdict::no(Rule::TwoByN, "n1 = 0 with a zero row");
    }
    let cc: f64 = c.iter().map(|x| x * x).sum();
    let dd: f64 = d.iter().map(|x| x * x).sum();
    if (cc - dd).abs() <= COINCIDENCE_TOL * cc.max(dd) {
        ClosedFormVerdict::no(Rule::TwoByN, "n1 = 0 and dᵀd = cᵀc")
    } else {
        ClosedFormVerdict::yes(Rule::TwoByN, "n1 = 0 and dᵀd ≠ cᵀc")
    }
}

fn direct_sum_rule(a: &DenseMatrix, p: &Pattern) -> Option<ClosedFormVerdict> {
    let comps = p.bigraph().components();
    if comps.len() < 2 {
        return None;
    }
    let (r1, c1) = &comps[0];
    if r1.is_empty() || c1.is_empty() {
        return None;
    }
    let rest_rows: Vec<usize> = (0..a.rows()).filter(|i| !r1.contains(i)).collect();
    let rest_cols: Vec<usize> = (0..a.cols()).filter(|j| !c1.contains(j)).collect();
    if rest_rows.is_empty() || rest_cols.is_empty() {
        return None;
    }
    let first = a.select_rows(r1).select_columns(c1);
    let rest = a.select_rows(&rest_rows).select_columns(&rest_cols);
    let report = check_direct_sum_conditions(&first, &rest, COINCIDENCE_TOL).ok()?;
    let detail = format!(
        "blocks {}×{} ⊕ {}×{}: (a) {} (b) {} (c) {} (d) {}",
        first.rows(),
        first.cols(),
        rest.rows(),
        rest.cols(),
        report.a,
        report.b,
        report.c,
        report.d
    );
    Some(if report.has_ssvp {
        ClosedFormVerdict::yes(Rule::DirectSum, detail)
    } else {
        ClosedFormVerdict::no(Rule::DirectSum, detail)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectSumReport {
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
    /// Whether both blocks were transposed so the sum is wide or square.
    pub transposed: bool,
    pub has_ssvp: bool,
}

/// The four conditions for `A ⊕ B`, after orienting so that m + p ≤ n + q.
pub fn check_direct_sum_conditions(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> Result<DirectSumReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("direct sum blocks must be nonempty".into()));
    }
    let transposed = a.rows() + b.rows() > a.cols() + b.cols();
    let (a, b) = if transposed { (a.transpose(), b.transpose()) } else { (a.clone(), b.clone()) };
    let (m, n) = a.shape();
    let (p, q) = b.shape();
    let cond_a = m <= n && p <= q;
    let cond_b = check_ssvp(&a, CheckMode::ExactWhenRational)?.has_ssvp()
        && check_ssvp(&b, CheckMode::ExactWhenRational)?.has_ssvp();
    let sa = singular_values(&a)?;
    let sb = singular_values(&b)?;
    let smax = sa.max().max(sb.max());
    let floor = tol * smax;
    let cond_c = sa
        .values()
        .iter()
        .filter(|&&x| x > floor)
        .all(|&x| sb.values().iter().filter(|&&y| y > floor).all(|&y| (x - y).abs() > tol * smax));
    let ra = matrix_rank(&a);
    let rb = matrix_rank(&b);
    let cond_d = (ra == m && rb == p) || (m == n && ra == m) || (p == q && rb == p);
    Ok(DirectSumReport {
        a: cond_a,
        b: cond_b,
        c: cond_c,
        d: cond_d,
        transposed,
        has_ssvp: cond_a && cond_b && cond_c && cond_d,
    })
}

/// Equivalences that preserve the SSVP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "op", content = "data")]
pub enum Transform {
    Transpose,
    /// Row i of the result is row `perm[i]` of the input.
    RowPerm(Vec<usize>),
    /// Column j of the result is column `perm[j]` of the input.
    ColPerm(Vec<usize>),
    RowSigns(Vec<f64>),
    ColSigns(Vec<f64>),
}

pub fn equivalence_transform(a: &DenseMatrix, op: &Transform) -> Result<DenseMatrix> {
    let (m, n) = a.shape();
    match op {
        Transform::Transpose => Ok(a.transpose()),
        Transform::RowPerm(p) => {
            check_perm(p, m)?;
            Ok(a.select_rows(p))
        }
        Transform::ColPerm(p) => {
            check_perm(p, n)?;
            Ok(a.select_columns(p))
        }
        Transform::RowSigns(s) => {
            check_signs(s, m)?;
            Ok(DenseMatrix::from_fn(m, n, |i, j| s[i] * a[(i, j)]))
        }
        Transform::ColSigns(s) => {
            check_signs(s, n)?;
            Ok(DenseMatrix::from_fn(m, n, |i, j| s[j] * a[(i, j)]))
        }
    }
}

fn check_perm(p: &[usize], k: usize) -> Result<()> {
    let mut seen = vec![false; k];
    if p.len() != k || p.iter().any(|&i| i >= k || std::mem::replace(&mut seen[i], true)) {
        return Err(Error::InvalidInput(format!("not a permutation of 0..{k}")));
    }
    Ok(())
}

fn check_signs(s: &[f64], k: usize) -> Result<()> {
    if s.len() != k || s.iter().any(|&x| x != 1.0 && x != -1.0) {
        return Err(Error::InvalidInput(format!("need {k} signs in {{−1, 1}}")));
    }
    Ok(())
}

/// Whether every list of min(m, n) nonzero values (with multiplicity) is realizable:
/// P must be `[J | O]` up to permutation with J having at least min(m, n) columns.
pub fn allows_all_nonzero_lists(p: &Pattern) -> bool {
    let p = if p.rows() > p.cols() { p.transpose() } else { p.clone() };
    let (m, n) = p.shape();
    if m == 0 {
        return false;
    }
    let mut full = 0;
    for j in 0..n {
        let ones = (0..m).filter(|&i| p.get(i, j)).count();
        if ones == m {
            full += 1;
        } else if ones != 0 {
            return false;
        }
    }
    full >= m
}

/// Only the zero pattern forces every singular value to be zero.
pub fn zero_pattern_only(p: &Pattern) -> bool {
    p.nnz() == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_examples() {
        let v = classify_ssvp(&DenseMatrix::from_rows(&[[1.0, 1.0], [1.0, -1.0]]));
        assert_eq!((v.verdict, v.rule), (ClosedVerdict::Has, Rule::NowhereZero));
        let v = classify_ssvp(&DenseMatrix::diag(&[1.0, -1.0]));
        assert_eq!((v.verdict, v.rule), (ClosedVerdict::Lacks, Rule::Diagonal));
        let mut a = DenseMatrix::zeros(3, 4);
        for i in 0..3 {
            a[(i, i)] = (i + 1) as f64;
        }
        let v = classify_ssvp(&a);
        assert_eq!((v.verdict, v.rule), (ClosedVerdict::Has, Rule::Border));
        let v = classify_ssvp(&DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]));
        assert_eq!((v.verdict, v.rule), (ClosedVerdict::Lacks, Rule::TwoByN));
        let c6 = DenseMatrix::from_rows(&[[1.0, 2.0, 0.0], [0.0, 3.0, 1.0], [2.0, 0.0, 1.0]]);
        assert_eq!(classify_ssvp(&c6).verdict, ClosedVerdict::NoRule);
    }

    #[test]
    fn zero_row_and_term_rank() {
        let v = classify_ssvp(&DenseMatrix::from_rows(&[[1.0, 1.0, 0.0], [0.0, 0.0, 0.0]]));
        assert_eq!(v.rule, Rule::ZeroLine);
        let v = classify_ssvp(&DenseMatrix::from_rows(&[[1.0, 1.0, 1.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]));
        assert_eq!((v.verdict, v.rule), (ClosedVerdict::Lacks, Rule::TermRank));
    }

    #[test]
    fn direct_sum_examples() {
        let one = DenseMatrix::from_rows(&[[1.0]]);
        let r = check_direct_sum_conditions(&one, &DenseMatrix::from_rows(&[[2.0]]), 1e-9).unwrap();
        assert!(r.has_ssvp);
        let r = check_direct_sum_conditions(&one, &one, 1e-9).unwrap();
        assert!(!r.c && !r.has_ssvp);
        let a = DenseMatrix::from_rows(&[[1.0, 1.0]]);
        let b = DenseMatrix::from_rows(&[[1.0, 2.0]]);
        let r = check_direct_sum_conditions(&a, &b, 1e-9).unwrap();
        assert!(r.a && r.b && r.c && r.d && r.has_ssvp);
        assert!(check_ssvp(&a.direct_sum(&b), CheckMode::ExactWhenRational).unwrap().has_ssvp());
    }

    #[test]
    fn transforms() {
        let t = equivalence_transform(&DenseMatrix::zeros(2, 3), &Transform::Transpose).unwrap();
        assert_eq!(t.shape(), (3, 2));
        let p = equivalence_transform(&DenseMatrix::identity(2), &Transform::RowPerm(vec![1, 0])).unwrap();
        assert_eq!(p, DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]));
        assert!(equivalence_transform(&DenseMatrix::identity(2), &Transform::RowPerm(vec![0, 0])).is_err());
        assert!(equivalence_transform(&DenseMatrix::identity(2), &Transform::ColSigns(vec![1.0, 2.0])).is_err());
    }

    #[test]
    fn list_predicates() {
        assert!(allows_all_nonzero_lists(&Pattern::from_rows(&[[1, 1, 0], [1, 1, 0]])));
        assert!(!allows_all_nonzero_lists(&Pattern::from_rows(&[[1, 0], [0, 1]])));
        assert!(allows_all_nonzero_lists(&Pattern::from_rows(&[[1]])));
        assert!(zero_pattern_only(&Pattern::zeros(2, 3)));
        assert!(!zero_pattern_only(&Pattern::from_rows(&[[1, 0], [0, 0]])));
        assert!(!zero_pattern_only(&Pattern::ones(2, 2)));
    }
}
