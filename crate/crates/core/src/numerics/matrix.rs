use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real matrix with row-major storage.
///
/// Zero-sized dimensions are allowed: verification matrices of small inputs
/// legitimately have no rows (a 1×1 matrix) or no columns (a nowhere-zero matrix).
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Wire form: `{"rows": m, "cols": n, "data": [row-major reals]}`.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<MatrixJson> for DenseMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        DenseMatrix::new(j.rows, j.cols, j.data)
    }
}

impl From<DenseMatrix> for MatrixJson {
    fn from(m: DenseMatrix) -> Self {
        MatrixJson { rows: m.rows, cols: m.cols, data: m.data }
    }
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "matrix data has {} entries, expected {}×{} = {}",
                data.len(),
                rows,
                cols,
                rows * cols
            )));
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite entry at ({}, {})", k / cols.max(1), k % cols.max(1))));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows. Panics on ragged input; use [`DenseMatrix::new`]
    /// for fallible construction.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(m * n);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), n, "ragged rows");
            data.extend_from_slice(r);
        }
        Self { rows: m, cols: n, data }
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { d[i] } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &DenseMatrix) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "add dimension mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "sub dimension mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    /// Entrywise (Schur) product.
    pub fn hadamard(&self, rhs: &DenseMatrix) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "hadamard dimension mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a * b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn norm_max(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |i, j| self[(rows[i], j)])
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &DenseMatrix) -> Self {
        let (m, n) = self.shape();
        let (p, q) = other.shape();
        Self::from_fn(m + p, n + q, |i, j| {
            if i < m && j < n {
                self[(i, j)]
            } else if i >= m && j >= n {
                other[(i - m, j - n)]
            } else {
                0.0
            }
        })
    }

    pub fn is_skew(&self, tol: f64) -> bool {
        self.is_square() && self.add(&self.transpose()).norm_fro() <= tol
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square() && self.sub(&self.transpose()).norm_fro() <= tol
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Row-major flattening.
    pub fn vec(&self) -> Vec<f64> {
        self.data.clone()
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}×{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:>12.6} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Non-increasing list of nonnegative reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SigmaList(Vec<f64>);

impl TryFrom<Vec<f64>> for SigmaList {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        SigmaList::new(v)
    }
}

impl From<SigmaList> for Vec<f64> {
    fn from(s: SigmaList) -> Self {
        s.0
    }
}

impl SigmaList {
    /// Validates an already ordered list.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidInput("singular values must be finite and nonnegative".into()));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("singular values must be non-increasing".into()));
        }
        Ok(Self(values))
    }

    /// Sorts into non-increasing order; returns whether any reordering happened.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<(Self, bool)> {
        let sorted = values.windows(2).all(|w| w[0] >= w[1]);
        values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Ok((Self::new(values)?, !sorted))
    }

    pub(crate) fn from_sorted_unchecked(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.0.first().copied().unwrap_or(0.0)
    }

    /// Smallest strictly positive value, if any.
    pub fn min_positive(&self) -> Option<f64> {
        self.0.iter().rev().copied().find(|&x| x > 0.0)
    }

    /// Multiplicities of the distinct values in non-increasing order; values closer than
    /// `rel_tol·σ₁` are merged.
    pub fn multiplicity_list(&self, rel_tol: f64) -> Vec<usize> {
        let tol = rel_tol * self.max();
        let mut out: Vec<usize> = Vec::new();
        let mut last: Option<f64> = None;
        for &v in &self.0 {
            match last {
                Some(l) if (l - v).abs() <= tol => *out.last_mut().unwrap() += 1,
                _ => out.push(1),
            }
            last = Some(v);
        }
        out
    }

    /// Max deviation from `other`, relative to the larger of the two leading values.
    pub fn relative_error(&self, other: &SigmaList) -> f64 {
        assert_eq!(self.len(), other.len());
        let scale = self.max().max(other.max()).max(f64::MIN_POSITIVE);
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale
    }
}
