//! Zero-nonzero patterns and their bipartite and directed graph views.

mod graph;
mod io;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

pub use graph::{classify_bigraph, digraph_has_cycle, term_rank, Bigraph, BigraphShape, Digraph, ShapeTag};
pub use io::{parse_pattern, parse_pattern_json, serialize_pattern, serialize_pattern_json};

pub const DEFAULT_ZERO_TOL: f64 = 1e-10;
pub const DEFAULT_AMBIGUITY_TOL: f64 = 1e-8;

/// An m×n 0/1 matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PatternJson", into = "PatternJson")]
pub struct Pattern {
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct PatternJson {
    rows: usize,
    cols: usize,
    cells: Vec<u8>,
}

impl TryFrom<PatternJson> for Pattern {
    type Error = Error;
    fn try_from(j: PatternJson) -> Result<Self> {
        if j.cells.iter().any(|&c| c > 1) {
            return Err(Error::InvalidInput("pattern cells must be 0 or 1".into()));
        }
        Pattern::new(j.rows, j.cols, j.cells.into_iter().map(|c| c == 1).collect())
    }
}

impl From<Pattern> for PatternJson {
    fn from(p: Pattern) -> Self {
        PatternJson { rows: p.rows, cols: p.cols, cells: p.cells.iter().map(|&b| b as u8).collect() }
    }
}

impl Pattern {
    pub fn new(rows: usize, cols: usize, cells: Vec<bool>) -> Result<Self> {
        if cells.len() != rows * cols {
            return Err(Error::InvalidInput(format!("pattern has {} cells, expected {}×{}", cells.len(), rows, cols)));
        }
        Ok(Self { rows, cols, cells })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, cells: vec![false; rows * cols] }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self { rows, cols, cells: vec![true; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut cells = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                cells.push(f(i, j));
            }
        }
        Self { rows, cols, cells }
    }

    /// Panics on ragged rows.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let mut cells = Vec::with_capacity(m * n);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), n, "ragged rows");
            cells.extend(r.iter().map(|&c| c != 0));
        }
        Self { rows: m, cols: n, cells }
    }

    /// Pattern of the exact nonzero entries.
    pub fn support(m: &DenseMatrix) -> Self {
        Self::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)] != 0.0)
    }

    pub fn from_positions(rows: usize, cols: usize, positions: &[(usize, usize)]) -> Result<Self> {
        let mut p = Self::zeros(rows, cols);
        for &(i, j) in positions {
            if i >= rows || j >= cols {
                return Err(Error::InvalidInput(format!("position ({i}, {j}) outside {rows}×{cols}")));
            }
            p.set(i, j, true);
        }
        Ok(p)
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

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.cells[i * self.cols + j] = v;
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn nnz(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Positions of ones, row-major.
    pub fn ones_positions(&self) -> Vec<(usize, usize)> {
        self.positions_where(true)
    }

    /// Positions of zeros, row-major.
    pub fn zero_positions(&self) -> Vec<(usize, usize)> {
        self.positions_where(false)
    }

    fn positions_where(&self, v: bool) -> Vec<(usize, usize)> {
        (0..self.rows).flat_map(|i| (0..self.cols).map(move |j| (i, j))).filter(|&(i, j)| self.get(i, j) == v).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn union(&self, other: &Pattern) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) || other.get(i, j)))
    }

    /// Cells set here but not in `other`.
    pub fn difference(&self, other: &Pattern) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) && !other.get(i, j)))
    }

    fn same_shape(&self, other: &Pattern) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "patterns are {}×{} and {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        (0..self.cols).all(|j| !self.get(i, j))
    }

    pub fn col_is_zero(&self, j: usize) -> bool {
        (0..self.rows).all(|i| !self.get(i, j))
    }

    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(row_perm[i], col_perm[j]))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, self.cols, |i, j| if self.get(i, j) { 1.0 } else { 0.0 })
    }

    pub fn bigraph(&self) -> Bigraph {
        Bigraph::of(self)
    }

    pub fn digraph(&self) -> Result<Digraph> {
        Digraph::of(self)
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern {}×{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, " ")?;
            }
            for j in 0..self.cols {
                write!(f, "{}", self.get(i, j) as u8)?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_pattern(self))
    }
}

/// Zero-nonzero pattern of `m` with an explicit ambiguity band.
///
/// Entries at most `zero_tol·‖M‖_max` become 0, entries above `ambiguity_tol·‖M‖_max`
/// become 1, anything in between is reported.
pub fn pattern_of(m: &DenseMatrix, zero_tol: f64, ambiguity_tol: f64) -> Result<Pattern> {
    if !(zero_tol >= 0.0 && zero_tol < ambiguity_tol) {
        return Err(Error::InvalidInput("need 0 ≤ zero_tol < ambiguity_tol".into()));
    }
    let scale = m.norm_max();
    let lo = zero_tol * scale;
    let hi = ambiguity_tol * scale;
    let mut ambiguous = Vec::new();
    let p = Pattern::from_fn(m.rows(), m.cols(), |i, j| {
        let x = m[(i, j)].abs();
        if x > lo && x <= hi {
            ambiguous.push((i, j));
        }
        x > hi
    });
    if ambiguous.is_empty() {
        Ok(p)
    } else {
        Err(Error::AmbiguousPattern { positions: ambiguous })
    }
}

/// `pattern_of` with the default tolerances.
pub fn pattern_of_default(m: &DenseMatrix) -> Result<Pattern> {
    pattern_of(m, DEFAULT_ZERO_TOL, DEFAULT_AMBIGUITY_TOL)
}

/// True iff `p` is obtained from `q` by changing some zeros to ones.
pub fn is_superpattern(p: &Pattern, q: &Pattern) -> Result<bool> {
    p.same_shape(q)?;
    Ok(p.cells.iter().zip(&q.cells).all(|(&a, &b)| a || !b))
}
