use serde::{Deserialize, Serialize};

use super::Pattern;
use crate::error::{Error, Result};

/// Bipartite graph on rows `0..m` and columns `0..n`; edge (i, j) iff p_ij = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bigraph {
    pub left: usize,
    pub right: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Bigraph {
    pub fn of(p: &Pattern) -> Self {
        Self { left: p.rows(), right: p.cols(), edges: p.ones_positions() }
    }

    /// Connected components as (rows, columns), each sorted, ordered by smallest vertex
    /// (rows before columns).
    pub fn components(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let total = self.left + self.right;
        let mut adj = vec![Vec::new(); total];
        for &(i, j) in &self.edges {
            adj[i].push(self.left + j);
            adj[self.left + j].push(i);
        }
        let mut seen = vec![false; total];
        let mut out = Vec::new();
        for s in 0..total {
            if seen[s] {
                continue;
            }
            let mut stack = vec![s];
            seen[s] = true;
            let (mut rows, mut cols) = (Vec::new(), Vec::new());
            while let Some(v) = stack.pop() {
                if v < self.left {
                    rows.push(v);
                } else {
                    cols.push(v - self.left);
                }
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            rows.sort_unstable();
            cols.sort_unstable();
            out.push((rows, cols));
        }
        out
    }
}

/// Loopless digraph of a square pattern: arc i → j iff i ≠ j and p_ij = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    pub vertices: usize,
    pub arcs: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn of(p: &Pattern) -> Result<Self> {
        if p.rows() != p.cols() {
            return Err(Error::InvalidInput("digraph needs a square pattern".into()));
        }
        let arcs = p.ones_positions().into_iter().filter(|&(i, j)| i != j).collect();
        Ok(Self { vertices: p.rows(), arcs })
    }
}

/// Size of a maximum matching in the bigraph, with one such matching.
///
/// Kuhn's augmenting paths, rows scanned in increasing order and each row's columns in
/// increasing order. The matching is returned sorted by row.
pub fn term_rank(p: &Pattern) -> (usize, Vec<(usize, usize)>) {
    let (m, n) = p.shape();
    let mut col_match: Vec<Option<usize>> = vec![None; n];
    fn augment(p: &Pattern, i: usize, seen: &mut [bool], col_match: &mut [Option<usize>]) -> bool {
        for j in 0..p.cols() {
            if p.get(i, j) && !seen[j] {
                seen[j] = true;
                if col_match[j].is_none_or(|k| augment(p, k, seen, col_match)) {
                    col_match[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    for i in 0..m {
        let mut seen = vec![false; n];
        augment(p, i, &mut seen, &mut col_match);
    }
    let mut matching: Vec<(usize, usize)> =
        col_match.iter().enumerate().filter_map(|(j, r)| r.map(|i| (i, j))).collect();
    matching.sort_unstable();
    (matching.len(), matching)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeTag {
    /// Path on an odd number of vertices: n×(n+1) staircase `(i,i), (i,i+1)`, or its
    /// transpose.
    PathOdd,
    /// Path on an even number of vertices: n×n upper bidiagonal.
    PathEven,
    /// Cycle on 2n vertices in the layout `(1,1), (1,n), (i,i−1), (i,i)`.
    #[serde(rename = "cycle-2n")]
    Cycle2n,
    Other,
}

/// Shape tag with the permutation to canonical form: `row_perm[k]` is the original row
/// placed at position k (same for columns). Identity permutations for `Other`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigraphShape {
    pub tag: ShapeTag,
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
    /// For `PathOdd`: true when rows are the path endpoints ((n+1)×n shape).
    pub transposed: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum V {
    R(usize),
    C(usize),
}

pub fn classify_bigraph(p: &Pattern) -> BigraphShape {
    let (m, n) = p.shape();
    let other = BigraphShape {
        tag: ShapeTag::Other,
        row_perm: (0..m).collect(),
        col_perm: (0..n).collect(),
        transposed: false,
    };
    if m == 0 || n == 0 {
        return other;
    }
    let row_deg: Vec<usize> = (0..m).map(|i| (0..n).filter(|&j| p.get(i, j)).count()).collect();
    let col_deg: Vec<usize> = (0..n).map(|j| (0..m).filter(|&i| p.get(i, j)).count()).collect();
    if row_deg.iter().chain(&col_deg).any(|&d| d == 0 || d > 2) {
        return other;
    }
    let edges = p.nnz();
    let vertices = m + n;
    if p.bigraph().components().len() != 1 {
        return other;
    }
    let neighbours = |v: V| -> Vec<V> {
        match v {
            V::R(i) => (0..n).filter(|&j| p.get(i, j)).map(V::C).collect(),
            V::C(j) => (0..m).filter(|&i| p.get(i, j)).map(V::R).collect(),
        }
    };
    let walk = |start: V, first: V| -> Vec<V> {
        let mut order = vec![start, first];
        while order.len() < vertices {
            let cur = order[order.len() - 1];
            let prev = order[order.len() - 2];
            match neighbours(cur).into_iter().find(|&w| w != prev) {
                Some(w) if w != start => order.push(w),
                _ => break,
            }
        }
        order
    };
    let split = |order: &[V]| -> (Vec<usize>, Vec<usize>) {
        let rows = order.iter().filter_map(|v| if let V::R(i) = v { Some(*i) } else { None }).collect();
        let cols = order.iter().filter_map(|v| if let V::C(j) = v { Some(*j) } else { None }).collect();
        (rows, cols)
    };

    if edges + 1 == vertices {
        // path: start from the lowest-index column endpoint, else the lowest row endpoint
        let start = (0..n)
            .find(|&j| col_deg[j] == 1)
            .map(V::C)
            .or_else(|| (0..m).find(|&i| row_deg[i] == 1).map(V::R))
            .expect("a path has endpoints");
        let order = if vertices == 1 {
            vec![start]
        } else {
            let first = neighbours(start)[0];
            walk(start, first)
        };
        let (row_perm, col_perm) = split(&order);
        let tag = if vertices % 2 == 1 { ShapeTag::PathOdd } else { ShapeTag::PathEven };
        let transposed = tag == ShapeTag::PathOdd && m == n + 1;
        return BigraphShape { tag, row_perm, col_perm, transposed };
    }
    if edges == vertices && m == n {
        // cycle r₁ c₁ r₂ c₂ … r_n c_n, closing back to r₁
        let start = V::R(0);
        let first = neighbours(start)[0];
        let order = walk(start, first);
        if order.len() != vertices {
            return other;
        }
        // rows r_k meet c_{k−1} and c_k, and r₁ meets c₁ and c_n: the canonical layout
        let (row_perm, col_perm) = split(&order);
        return BigraphShape { tag: ShapeTag::Cycle2n, row_perm, col_perm, transposed: false };
    }
    other
}

/// Whether the loopless digraph of `p` contains a directed cycle. Needs a square pattern
/// whose diagonal is all ones.
pub fn digraph_has_cycle(p: &Pattern) -> Result<bool> {
    if p.rows() != p.cols() {
        return Err(Error::InvalidInput("digraph needs a square pattern".into()));
    }
    let n = p.rows();
    if (0..n).any(|i| !p.get(i, i)) {
        return Err(Error::InvalidInput("diagonal must be all ones; permute a maximum matching there first".into()));
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    for s in 0..n {
        if state[s] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(s, 0)];
        state[s] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            let mut pushed = false;
            while *next < n {
                let w = *next;
                *next += 1;
                if w == v || !p.get(v, w) {
                    continue;
                }
                match state[w] {
                    1 => return Ok(true),
                    0 => {
                        state[w] = 1;
                        stack.push((w, 0));
                        pushed = true;
                        break;
                    }
                    _ => {}
                }
            }
            if !pushed {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c6() -> Pattern {
        Pattern::from_rows(&[[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    }

    #[test]
    fn term_rank_examples() {
        assert_eq!(term_rank(&Pattern::from_fn(3, 3, |i, j| i == j)).0, 3);
        assert_eq!(term_rank(&c6()).0, 3);
        let b = Pattern::from_rows(&[[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 0, 0]]);
        let (r, matching) = term_rank(&b);
        assert_eq!(r, 2);
        assert!(matching.iter().all(|&(i, j)| b.get(i, j)));
    }

    #[test]
    fn staircase_is_odd_path() {
        let p = Pattern::from_fn(3, 4, |i, j| j == i || j == i + 1);
        let s = classify_bigraph(&p);
        assert_eq!(s.tag, ShapeTag::PathOdd);
        assert_eq!(p.permute(&s.row_perm, &s.col_perm), p);
        let t = classify_bigraph(&p.transpose());
        assert_eq!(t.tag, ShapeTag::PathOdd);
        assert!(t.transposed);
    }

    #[test]
    fn scrambled_path_recovers_staircase() {
        let p = Pattern::from_fn(3, 4, |i, j| j == i || j == i + 1);
        let q = p.permute(&[2, 0, 1], &[3, 1, 0, 2]);
        let s = classify_bigraph(&q);
        assert_eq!(s.tag, ShapeTag::PathOdd);
        assert_eq!(q.permute(&s.row_perm, &s.col_perm), p);
    }

    #[test]
    fn bidiagonal_is_even_path() {
        let p = Pattern::from_fn(3, 3, |i, j| j == i || j == i + 1);
        let s = classify_bigraph(&p);
        assert_eq!(s.tag, ShapeTag::PathEven);
        assert_eq!(p.permute(&s.row_perm, &s.col_perm), p);
    }

    #[test]
    fn cycles() {
        let s = classify_bigraph(&c6());
        assert_eq!(s.tag, ShapeTag::Cycle2n);
        let canon = Pattern::from_rows(&[[1, 0, 1], [1, 1, 0], [0, 1, 1]]);
        assert_eq!(c6().permute(&s.row_perm, &s.col_perm), canon);
        assert_eq!(classify_bigraph(&Pattern::ones(2, 2)).tag, ShapeTag::Cycle2n);
    }

    #[test]
    fn others() {
        assert_eq!(classify_bigraph(&Pattern::ones(2, 3)).tag, ShapeTag::Other);
        assert_eq!(classify_bigraph(&Pattern::ones(3, 3)).tag, ShapeTag::Other);
        assert_eq!(classify_bigraph(&Pattern::from_fn(2, 2, |i, j| i == j)).tag, ShapeTag::Other);
    }

    #[test]
    fn digraph_cycles() {
        assert!(!digraph_has_cycle(&Pattern::from_fn(4, 4, |i, j| i <= j)).unwrap());
        assert!(digraph_has_cycle(&Pattern::ones(2, 2)).unwrap());
        let c = Pattern::from_rows(&[[1, 1, 0], [0, 1, 1], [1, 0, 1]]);
        assert!(digraph_has_cycle(&c).unwrap());
        assert!(digraph_has_cycle(&Pattern::from_rows(&[[0, 1], [1, 1]])).is_err());
    }
}
