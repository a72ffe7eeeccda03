//! Exact rational matrices and fraction-free elimination.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use num::Integer;

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Matrix of reduced rationals, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

/// Entries whose binary expansion ends within this many fractional bits count as "rational
/// input" for automatic exact-mode escalation.
const DYADIC_BITS: i32 = 20;

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidInput("rational matrix has wrong entry count".into()));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_integers(rows: usize, cols: usize, ints: &[i64]) -> Result<Self> {
        Self::new(rows, cols, ints.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
    }

    /// Exact image of a float matrix: every finite double is a dyadic rational.
    pub fn from_dense(m: &DenseMatrix) -> Self {
        let entries =
            m.data().iter().map(|&x| BigRational::from_float(x).expect("DenseMatrix entries are finite")).collect();
        Self { rows: m.rows(), cols: m.cols(), entries }
    }

    /// Like [`RationalMatrix::from_dense`], but only for matrices whose entries are short
    /// dyadics (integers, halves, quarters, ...). Results of irrational arithmetic that
    /// merely happen to be doubles are rejected.
    pub fn from_dense_if_simple(m: &DenseMatrix) -> Option<Self> {
        if is_simple_rational(m) {
            Some(Self::from_dense(m))
        } else {
            None
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, self.cols, |i, j| ratio_to_f64(self.get(i, j)))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            entries.extend_from_slice(&self.entries[r * self.cols..(r + 1) * self.cols]);
        }
        Self { rows: rows.len(), cols: self.cols, entries }
    }

    /// Rows scaled to a common denominator, so elimination can run over the integers.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = &self.entries[i * self.cols..(i + 1) * self.cols];
                let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
            })
            .collect()
    }
}

pub fn is_simple_rational(m: &DenseMatrix) -> bool {
    let scale = 2f64.powi(DYADIC_BITS);
    m.data().iter().all(|&x| {
        let y = x * scale;
        x.abs() < 2f64.powi(31) && y == y.trunc()
    })
}

pub fn ratio_to_f64(x: &BigRational) -> f64 {
    use num::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Fraction-free (Bareiss) row echelon reduction in place; returns the pivot columns.
///
/// After step k every active entry is a (k+1)-order minor of the input, so each division
/// by the previous pivot is exact.
fn bareiss_echelon(a: &mut [Vec<BigInt>], cols: usize) -> Vec<usize> {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Exact rank by fraction-free elimination.
pub fn exact_rank(m: &RationalMatrix) -> usize {
    let mut a = m.integer_rows();
    bareiss_echelon(&mut a, m.cols).len()
}

/// Exact determinant of a square rational matrix.
pub fn exact_determinant(m: &RationalMatrix) -> Result<BigRational> {
    if m.rows != m.cols {
        return Err(Error::InvalidInput("determinant needs a square matrix".into()));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigRational::one());
    }
    // det(M) = det(integer rows) / Π row scale factors
    let mut scale = BigInt::one();
    for i in 0..n {
        let row = &m.entries[i * n..(i + 1) * n];
        scale *= row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    }
    let mut a = m.integer_rows();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Ok(BigRational::zero());
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = BigRational::new(prev * BigInt::from(sign), scale);
    Ok(det)
}

/// Reduced row echelon form over the rationals; returns (rref rows, pivot columns).
fn rref(m: &RationalMatrix) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut a: Vec<Vec<BigRational>> = (0..m.rows).map(|i| m.entries[i * m.cols..(i + 1) * m.cols].to_vec()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in &mut a[r][c..] {
            *x = &*x * &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= p * &f;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Exact nullspace basis, one vector per free column in increasing column order. Each
/// vector is scaled to a primitive integer vector whose first nonzero entry is positive.
pub fn exact_nullspace(m: &RationalMatrix) -> Vec<Vec<BigRational>> {
    let (a, pivots) = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); m.cols];
            v[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r][f].clone();
            }
            primitive(v)
        })
        .collect()
}

fn primitive(v: Vec<BigRational>) -> Vec<BigRational> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let g = if g.is_zero() { BigInt::one() } else { g };
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter().map(|x| BigRational::from_integer(x * &sign / &g)).collect()
}

/// Greedy exact row selection: rows that each raise the rank, scanned top down.
pub fn exact_independent_rows(m: &RationalMatrix) -> Vec<usize> {
    let rows = m.integer_rows();
    let mut basis: Vec<(usize, Vec<BigInt>)> = Vec::new(); // (pivot col, row)
    let mut picked = Vec::new();
    for (i, row) in rows.into_iter().enumerate() {
        let mut r = row;
        for (pc, b) in &basis {
            if r[*pc].is_zero() {
                continue;
            }
            let f = r[*pc].clone();
            let g = b[*pc].clone();
            for j in 0..r.len() {
                r[j] = &r[j] * &g - &b[j] * &f;
            }
            let content = r.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            if !content.is_zero() && !content.is_one() {
                r.iter_mut().for_each(|x| *x = &*x / &content);
            }
        }
        if let Some(pc) = r.iter().position(|x| !x.is_zero()) {
            // keep basis pivots unique: clear this column from earlier rows
            for (_, b) in basis.iter_mut() {
                if !b[pc].is_zero() {
                    let f = b[pc].clone();
                    let g = r[pc].clone();
                    for j in 0..b.len() {
                        b[j] = &b[j] * &g - &r[j] * &f;
                    }
                }
            }
            basis.push((pc, r));
            picked.push(i);
        }
    }
    picked
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_matrix(rows: &[&[i64]]) -> RationalMatrix {
        let m = rows.len();
        let n = rows[0].len();
        let flat: Vec<i64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        RationalMatrix::from_integers(m, n, &flat).unwrap()
    }

    #[test]
    fn rank_of_all_ones() {
        assert_eq!(exact_rank(&int_matrix(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]])), 1);
        assert_eq!(exact_rank(&int_matrix(&[&[0, 0], &[0, 0]])), 0);
    }

    #[test]
    fn determinant_with_fractions() {
        let half = BigRational::new(1.into(), 2.into());
        let m = RationalMatrix::new(
            2,
            2,
            vec![half.clone(), BigRational::from_integer(3.into()), BigRational::from_integer(1.into()), half],
        )
        .unwrap();
        // 1/4 − 3
        assert_eq!(exact_determinant(&m).unwrap(), BigRational::new((-11).into(), 4.into()));
        let sing = int_matrix(&[&[1, 2], &[2, 4]]);
        assert!(exact_determinant(&sing).unwrap().is_zero());
        let perm = int_matrix(&[&[0, 1], &[1, 0]]);
        assert_eq!(exact_determinant(&perm).unwrap(), BigRational::from_integer((-1).into()));
    }

    #[test]
    fn nullspace_is_primitive() {
        let m = int_matrix(&[&[2, 4]]);
        let ns = exact_nullspace(&m);
        assert_eq!(ns.len(), 1);
        let v: Vec<i64> = ns[0].iter().map(|x| x.numer().try_into().unwrap()).collect();
        assert_eq!(v, vec![2, -1]);
    }

    #[test]
    fn independent_rows_skip_combinations() {
        let m = int_matrix(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 2], &[0, 0, 1]]);
        assert_eq!(exact_independent_rows(&m), vec![0, 1, 3]);
    }

    #[test]
    fn simple_rational_detection() {
        assert!(is_simple_rational(&DenseMatrix::from_rows(&[[1.0, -0.5, 3.25]])));
        assert!(!is_simple_rational(&DenseMatrix::from_rows(&[[std::f64::consts::FRAC_1_SQRT_2]])));
    }
}
