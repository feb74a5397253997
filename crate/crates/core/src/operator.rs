//! Sparse generator matrices in a fixed GT basis.

use std::collections::HashMap;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse vector as sorted `(index, value)` pairs without zeros.
pub type SparseVec = Vec<(usize, Complex64)>;

/// A column-major sparse matrix.
///
/// Columns are stored as sorted `(row, value)` lists; exact zeros are never
/// stored. Entries are floating complex numbers: exact rational arithmetic is
/// only used for square-root-free scalar identities, never for matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseOperator {
    rows: usize,
    cols: Vec<Vec<(usize, Complex64)>>,
}

impl SparseOperator {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols: vec![Vec::new(); cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal((0..dim).map(|_| Complex64::new(1.0, 0.0)))
    }

    pub fn diagonal<I: IntoIterator<Item = Complex64>>(values: I) -> Self {
        let cols: Vec<_> = values
            .into_iter()
            .enumerate()
            .map(|(k, v)| if v.is_zero() { Vec::new() } else { vec![(k, v)] })
            .collect();
        Self {
            rows: cols.len(),
            cols,
        }
    }

    /// Sums duplicate positions and drops exact zeros.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut out = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::Index(format!(
                    "entry ({r}, {c}) outside a {rows}x{cols} matrix"
                )));
            }
            out[c].push((r, v));
        }
        for col in &mut out {
            *col = normalize(std::mem::take(col));
        }
        Ok(Self { rows, cols: out })
    }

    /// Build column by column; `column(c)` returns the nonzero entries.
    pub(crate) fn from_columns(rows: usize, cols: Vec<SparseVec>) -> Self {
        let cols = cols.into_iter().map(normalize).collect();
        Self { rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn column(&self, c: usize) -> &[(usize, Complex64)] {
        &self.cols[c]
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.cols[c]
            .binary_search_by_key(&r, |e| e.0)
            .map(|k| self.cols[c][k].1)
            .unwrap_or_default()
    }

    /// Triplets sorted by row, then column.
    pub fn triplets(&self) -> Vec<(usize, usize, Complex64)> {
        let mut t: Vec<_> = self
            .cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
            .collect();
        t.sort_by_key(|&(r, c, _)| (r, c));
        t
    }

    pub fn apply(&self, v: &[(usize, Complex64)]) -> SparseVec {
        let mut acc: HashMap<usize, Complex64> = HashMap::new();
        for &(c, x) in v {
            for &(r, a) in &self.cols[c] {
                *acc.entry(r).or_default() += a * x;
            }
        }
        normalize(acc.into_iter().collect())
    }

    pub fn apply_dense(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::zero(); self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, a) in col {
                y[r] += a * x[c];
            }
        }
        y
    }

    /// `self * rhs`.
    pub fn matmul(&self, rhs: &SparseOperator) -> Result<SparseOperator> {
        if self.cols() != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows,
                self.cols(),
                rhs.rows,
                rhs.cols()
            )));
        }
        let cols = rhs.cols.iter().map(|col| self.apply(col)).collect();
        Ok(SparseOperator {
            rows: self.rows,
            cols,
        })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> SparseOperator {
        let triplets = self.triplets().into_iter().map(|(r, c, v)| (c, r, v.conj()));
        SparseOperator::from_triplets(self.cols(), self.rows, triplets)
            .expect("transposed indices are in range")
    }

    pub fn scaled(&self, s: Complex64) -> SparseOperator {
        let cols = self
            .cols
            .iter()
            .map(|col| normalize(col.iter().map(|&(r, v)| (r, v * s)).collect()))
            .collect();
        SparseOperator {
            rows: self.rows,
            cols,
        }
    }

    pub fn map_entries<F: Fn(usize, usize, Complex64) -> Complex64>(&self, f: F) -> SparseOperator {
        let cols = self
            .cols
            .iter()
            .enumerate()
            .map(|(c, col)| normalize(col.iter().map(|&(r, v)| (r, f(r, c, v))).collect()))
            .collect();
        SparseOperator {
            rows: self.rows,
            cols,
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let mut d = vec![vec![Complex64::zero(); self.cols()]; self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                d[r][c] = v;
            }
        }
        d
    }

    /// Entrywise max-abs of `self - other`.
    pub fn max_abs_diff(&self, other: &SparseOperator) -> Result<f64> {
        if self.rows != other.rows || self.cols() != other.cols() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows,
                self.cols(),
                other.rows,
                other.cols()
            )));
        }
        let mut m = 0.0f64;
        for c in 0..self.cols() {
            let d = sub(&self.cols[c], &other.cols[c]);
            m = d.iter().fold(m, |m, &(_, v)| m.max(v.norm()));
        }
        Ok(m)
    }

    pub fn is_diagonal(&self) -> bool {
        self.cols
            .iter()
            .enumerate()
            .all(|(c, col)| col.iter().all(|&(r, _)| r == c))
    }
}

pub(crate) fn normalize(mut v: SparseVec) -> SparseVec {
    v.sort_by_key(|e| e.0);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (r, x) in v {
        match out.last_mut() {
            Some(last) if last.0 == r => last.1 += x,
            _ => out.push((r, x)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

/// `a - b` for sorted sparse vectors.
pub fn sub(a: &[(usize, Complex64)], b: &[(usize, Complex64)]) -> SparseVec {
    axpy(a, Complex64::new(-1.0, 0.0), b)
}

/// `a + s * b` for sorted sparse vectors.
pub fn axpy(a: &[(usize, Complex64)], s: Complex64, b: &[(usize, Complex64)]) -> SparseVec {
    let mut v: SparseVec = a.to_vec();
    v.extend(b.iter().map(|&(r, x)| (r, s * x)));
    normalize(v)
}

/// Generator matrices of `U_q(gl_N)` on a common basis: `k_i`, `k_i^{-1}`
/// for `i = 1..N`, `e_j`, `f_j` for `j = 1..N-1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub k: Vec<SparseOperator>,
    pub k_inv: Vec<SparseOperator>,
    pub e: Vec<SparseOperator>,
    pub f: Vec<SparseOperator>,
}

/// A single generator, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gen {
    K(usize),
    KInv(usize),
    E(usize),
    F(usize),
}

impl std::fmt::Display for Gen {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Gen::K(i) => write!(f, "k{i}"),
            Gen::KInv(i) => write!(f, "k{i}^-1"),
            Gen::E(i) => write!(f, "e{i}"),
            Gen::F(i) => write!(f, "f{i}"),
        }
    }
}

impl GeneratorSet {
    pub fn new(
        k: Vec<SparseOperator>,
        k_inv: Vec<SparseOperator>,
        e: Vec<SparseOperator>,
        f: Vec<SparseOperator>,
    ) -> Result<Self> {
        let set = Self { k, k_inv, e, f };
        let rank = set.k.len();
        if set.k_inv.len() != rank || set.e.len() + 1 != rank.max(1) || set.f.len() != set.e.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} k, {} k^-1, {} e, {} f",
                set.k.len(),
                set.k_inv.len(),
                set.e.len(),
                set.f.len()
            )));
        }
        let dim = set.dim();
        if set
            .all()
            .any(|(_, op)| op.rows() != dim || op.cols() != dim)
        {
            return Err(Error::DimensionMismatch(
                "generators act on different spaces".into(),
            ));
        }
        Ok(set)
    }

    /// `N` for `U_q(gl_N)`.
    pub fn rank(&self) -> usize {
        self.k.len()
    }

    pub fn dim(&self) -> usize {
        self.k.first().map_or(0, SparseOperator::rows)
    }

    pub fn get(&self, g: Gen) -> &SparseOperator {
        match g {
            Gen::K(i) => &self.k[i - 1],
            Gen::KInv(i) => &self.k_inv[i - 1],
            Gen::E(i) => &self.e[i - 1],
            Gen::F(i) => &self.f[i - 1],
        }
    }

    pub fn get_mut(&mut self, g: Gen) -> &mut SparseOperator {
        match g {
            Gen::K(i) => &mut self.k[i - 1],
            Gen::KInv(i) => &mut self.k_inv[i - 1],
            Gen::E(i) => &mut self.e[i - 1],
            Gen::F(i) => &mut self.f[i - 1],
        }
    }

    pub fn generators(&self) -> Vec<Gen> {
        let n = self.rank();
        let mut g = Vec::with_capacity(4 * n);
        g.extend((1..=n).map(Gen::K));
        g.extend((1..=n).map(Gen::KInv));
        g.extend((1..n).map(Gen::E));
        g.extend((1..n).map(Gen::F));
        g
    }

    pub fn all(&self) -> impl Iterator<Item = (Gen, &SparseOperator)> {
        self.generators().into_iter().map(move |g| (g, self.get(g)))
    }

    /// Apply a word (rightmost letter first) to a sparse vector.
    pub fn apply_word(&self, word: &[Gen], v: &[(usize, Complex64)]) -> SparseVec {
        let mut cur = v.to_vec();
        for &g in word.iter().rev() {
            if cur.is_empty() {
                break;
            }
            cur = self.get(g).apply(&cur);
        }
        cur
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let m = SparseOperator::from_triplets(
            2,
            2,
            vec![(0, 1, c(1.0)), (0, 1, c(2.0)), (1, 0, c(1.0)), (1, 0, c(-1.0))],
        )
        .unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), c(3.0));
        assert!(SparseOperator::from_triplets(2, 2, vec![(2, 0, c(1.0))]).is_err());
    }

    #[test]
    fn matmul_and_adjoint() {
        let a = SparseOperator::from_triplets(
            2,
            2,
            vec![(0, 1, Complex64::new(0.0, 1.0)), (1, 1, c(2.0))],
        )
        .unwrap();
        let b = a.adjoint();
        assert_eq!(b.get(1, 0), Complex64::new(0.0, -1.0));
        let p = a.matmul(&b).unwrap();
        assert_eq!(p.get(0, 0), c(1.0));
        assert_eq!(p.get(1, 1), c(4.0));
        assert_eq!(p.get(0, 1), Complex64::new(0.0, 2.0));
        assert_eq!(a.matmul(&SparseOperator::identity(2)).unwrap(), a);
    }
}
