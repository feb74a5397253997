//! Gel'fand-Tsetlin patterns, highest weights and the weight windows used to
//! truncate the principal series.
//!
//! Rows are indexed the traditional way: row `j` (1-based, `j = N` on top)
//! holds `j` entries `m_{1j} >= ... >= m_{jj}`, and consecutive rows interleave
//! (`m_{i,j+1} >= m_{ij} >= m_{i+1,j+1}`).

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-increasing integer vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct HighestWeight(Vec<i64>);

impl HighestWeight {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidWeight(entries));
        }
        Ok(Self(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    /// Shifted coordinates `m_s - s` (1-based `s`) of a top row.
    pub fn row_l(&self) -> Vec<i64> {
        row_l(&self.0)
    }

    /// Coordinates `l_j = m_j - j - 1` of the inducing weight of a principal
    /// series representation.
    pub fn inducing_l(&self) -> Vec<i64> {
        inducing_l(&self.0)
    }
}

impl TryFrom<Vec<i64>> for HighestWeight {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        HighestWeight::new(v)
    }
}

impl From<HighestWeight> for Vec<i64> {
    fn from(w: HighestWeight) -> Vec<i64> {
        w.0
    }
}

impl fmt::Display for HighestWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, ")")
    }
}

pub fn row_l(row: &[i64]) -> Vec<i64> {
    row.iter().enumerate().map(|(i, m)| m - (i as i64 + 1)).collect()
}

pub fn inducing_l(m: &[i64]) -> Vec<i64> {
    m.iter().enumerate().map(|(i, v)| v - (i as i64 + 1) - 1).collect()
}

/// A Gel'fand-Tsetlin pattern stored row-major from the top row down.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GtPattern {
    size: usize,
    entries: Vec<i64>,
}

fn row_offset(size: usize, j: usize) -> usize {
    // rows size, size-1, ..., j+1 precede row j
    (j + 1..=size).sum()
}

impl GtPattern {
    /// Build from rows given top-first. Fails if the shape is not triangular
    /// or betweenness is violated.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let size = rows.len();
        for (k, row) in rows.iter().enumerate() {
            if row.len() != size - k {
                return Err(Error::Index(format!(
                    "row {k} has {} entries, expected {}",
                    row.len(),
                    size - k
                )));
            }
        }
        let p = Self {
            size,
            entries: rows.concat(),
        };
        if !p.is_valid() {
            return Err(Error::InvalidParameter(format!(
                "pattern {p} violates betweenness"
            )));
        }
        Ok(p)
    }

    pub(crate) fn from_flat(size: usize, entries: Vec<i64>) -> Self {
        debug_assert_eq!(entries.len(), size * (size + 1) / 2);
        Self { size, entries }
    }

    /// Number of rows (the `N` of `gl_N`).
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn flat(&self) -> &[i64] {
        &self.entries
    }

    /// Row `j` (1-based, `j = size` is the top row).
    pub fn row(&self, j: usize) -> &[i64] {
        let off = row_offset(self.size, j);
        &self.entries[off..off + j]
    }

    pub fn top(&self) -> &[i64] {
        self.row(self.size)
    }

    /// Entry `m_{ij}`, 1-based.
    pub fn m(&self, i: usize, j: usize) -> i64 {
        self.row(j)[i - 1]
    }

    /// Shifted entry `l_{ij} = m_{ij} - i`.
    pub fn l(&self, i: usize, j: usize) -> i64 {
        self.m(i, j) - i as i64
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (1..=self.size).rev().map(|j| self.row(j).to_vec()).collect()
    }

    pub fn is_valid(&self) -> bool {
        for j in 1..self.size {
            let lower = self.row(j);
            let upper = self.row(j + 1);
            for i in 0..j {
                if !(upper[i] >= lower[i] && lower[i] >= upper[i + 1]) {
                    return false;
                }
            }
        }
        true
    }

    /// `M` with `m_{ij}` replaced by `m_{ij} + delta` without any validity
    /// check. Used where legality is decided by the caller.
    pub(crate) fn shifted_unchecked(&self, i: usize, j: usize, delta: i64) -> Self {
        let mut entries = self.entries.clone();
        entries[row_offset(self.size, j) + i - 1] += delta;
        Self {
            size: self.size,
            entries,
        }
    }

    /// The pattern `M^{±i}_j`; `None` when the shifted pattern breaks
    /// betweenness. Shifting the top row only checks the rows it touches.
    pub fn apply_shift(&self, j: usize, i: usize, sign: i64) -> Result<Option<Self>> {
        if j == 0 || j > self.size || i == 0 || i > j {
            return Err(Error::Index(format!(
                "position ({i}, {j}) outside a pattern with {} rows",
                self.size
            )));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidParameter(format!("shift sign {sign}")));
        }
        let v = self.m(i, j) + sign;
        if j < self.size {
            let up = self.row(j + 1);
            if !(up[i - 1] >= v && v >= up[i]) {
                return Ok(None);
            }
        }
        if j > 1 {
            let down = self.row(j - 1);
            if i <= j - 1 && v < down[i - 1] {
                return Ok(None);
            }
            if i >= 2 && v > down[i - 2] {
                return Ok(None);
            }
        }
        Ok(Some(self.shifted_unchecked(i, j, sign)))
    }
}

impl fmt::Display for GtPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = self.rows();
        for (k, row) in rows.iter().enumerate() {
            if k > 0 {
                write!(f, " / ")?;
            }
            let parts: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", parts.join(" "))?;
        }
        Ok(())
    }
}

/// All lower rows interleaving `top`, lexicographically.
fn interleaving_rows(top: &[i64]) -> Vec<Vec<i64>> {
    let k = top.len().saturating_sub(1);
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(top: &[i64], cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let i = cur.len();
        if i + 1 == top.len() {
            out.push(cur.clone());
            return;
        }
        for v in top[i + 1]..=top[i] {
            cur.push(v);
            rec(top, cur, out);
            cur.pop();
        }
    }
    if top.is_empty() {
        return out;
    }
    rec(top, &mut cur, &mut out);
    out
}

/// Every pattern with the given top row, in lexicographic order of the rows
/// read top to bottom. The position in this list is the basis index.
pub fn enumerate_tableaux(hw: &HighestWeight) -> Vec<GtPattern> {
    let size = hw.len();
    if size == 0 {
        return vec![GtPattern::from_flat(0, Vec::new())];
    }
    let mut out = Vec::new();
    let mut acc = hw.entries().to_vec();
    fn rec(row: &[i64], acc: &mut Vec<i64>, size: usize, out: &mut Vec<GtPattern>) {
        if row.len() == 1 {
            out.push(GtPattern::from_flat(size, acc.clone()));
            return;
        }
        for next in interleaving_rows(row) {
            let n = acc.len();
            acc.extend_from_slice(&next);
            rec(&next, acc, size, out);
            acc.truncate(n);
        }
    }
    rec(hw.entries(), &mut acc, size, &mut out);
    out
}

/// Number of patterns with top row `hw`, by the Weyl dimension formula.
pub fn gt_dimension(hw: &HighestWeight) -> u128 {
    let m = hw.entries();
    let n = m.len();
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..n {
        for j in i + 1..n {
            num *= (m[i] - m[j] + (j - i) as i64) as u128;
            den *= (j - i) as u128;
        }
    }
    num / den
}

/// Highest weights of `U_q(u_{n-1})` occurring in the restriction of `T_hw`,
/// each exactly once.
pub fn branching(hw: &HighestWeight) -> Vec<HighestWeight> {
    interleaving_rows(hw.entries())
        .into_iter()
        .map(HighestWeight)
        .collect()
}

/// Finite truncation of the principal series weight lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    /// `m_{1n} <= m_1 + upper`.
    pub upper: u32,
    /// `m_{nn} >= m_{n-1} - lower`.
    pub lower: u32,
    /// Minimum distance to the cut for a vector to count as interior.
    pub margin: u32,
    /// For `n = 1` the single entry `m_{11}` is centred on this value.
    pub anchor: i64,
}

impl Default for Window {
    fn default() -> Self {
        Self {
            upper: 6,
            lower: 6,
            margin: 3,
            anchor: 0,
        }
    }
}

impl Window {
    pub fn symmetric(w: u32) -> Self {
        Self {
            upper: w,
            lower: w,
            ..Self::default()
        }
    }

    pub fn with_margin(mut self, margin: u32) -> Self {
        self.margin = margin;
        self
    }

    pub fn with_anchor(mut self, anchor: i64) -> Self {
        self.anchor = anchor;
        self
    }

    /// Absolute bounds `(max m_{1n}, min m_{nn})` for the inducing weight `m`.
    pub fn bounds(&self, m: &HighestWeight) -> WeightBox {
        match (m.entries().first(), m.entries().last()) {
            (Some(first), Some(last)) => WeightBox {
                top_max: first + self.upper as i64,
                bottom_min: last - self.lower as i64,
            },
            _ => WeightBox {
                top_max: self.anchor + self.upper as i64,
                bottom_min: self.anchor - self.lower as i64,
            },
        }
    }

    pub fn has_interior(&self) -> bool {
        self.upper >= self.margin && self.lower >= self.margin
    }
}

/// Absolute cut of the principal weights: `m_{1n} <= top_max` and
/// `m_{nn} >= bottom_min`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightBox {
    pub top_max: i64,
    pub bottom_min: i64,
}

impl WeightBox {
    pub fn contains(&self, mn: &[i64]) -> bool {
        mn.first().is_some_and(|&a| a <= self.top_max) && mn.last().is_some_and(|&b| b >= self.bottom_min)
    }

    pub fn union(&self, other: &WeightBox) -> WeightBox {
        WeightBox {
            top_max: self.top_max.max(other.top_max),
            bottom_min: self.bottom_min.min(other.bottom_min),
        }
    }
}

/// Does `mn` (length n) interleave the inducing weight `m` (length n-1)?
pub fn satisfies_principal(m: &[i64], mn: &[i64]) -> bool {
    if mn.len() != m.len() + 1 {
        return false;
    }
    (0..m.len()).all(|j| mn[j] >= m[j] && m[j] >= mn[j + 1])
}

/// Weights `m_n` of the `U_q(u_n)` components of `T_{m,c1,c2}` inside `bounds`,
/// lexicographically.
pub fn principal_weights_in(m: &HighestWeight, bounds: WeightBox) -> Vec<HighestWeight> {
    let m = m.entries();
    let n = m.len() + 1;
    let mut ranges: Vec<(i64, i64)> = Vec::with_capacity(n);
    for s in 0..n {
        let hi = if s == 0 { bounds.top_max } else { m[s - 1] };
        let lo = if s == n - 1 { bounds.bottom_min } else { m[s] };
        if n == 1 {
            ranges.push((bounds.bottom_min, bounds.top_max));
        } else {
            ranges.push((lo, hi));
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(ranges: &[(i64, i64)], cur: &mut Vec<i64>, out: &mut Vec<HighestWeight>) {
        let s = cur.len();
        if s == ranges.len() {
            out.push(HighestWeight(cur.clone()));
            return;
        }
        let (lo, hi) = ranges[s];
        for v in lo..=hi {
            cur.push(v);
            rec(ranges, cur, out);
            cur.pop();
        }
    }
    rec(&ranges, &mut cur, &mut out);
    out
}

/// Windowed principal weights for the inducing weight `m`.
pub fn principal_weights(m: &HighestWeight, window: &Window) -> Vec<HighestWeight> {
    principal_weights_in(m, window.bounds(m))
}

/// Ordered basis of patterns with a position lookup.
#[derive(Clone, Debug, Default)]
pub struct GtBasis {
    patterns: Vec<GtPattern>,
    index: HashMap<Vec<i64>, usize>,
}

impl GtBasis {
    pub fn from_patterns(patterns: Vec<GtPattern>) -> Self {
        let index = patterns
            .iter()
            .enumerate()
            .map(|(k, p)| (p.flat().to_vec(), k))
            .collect();
        Self { patterns, index }
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn patterns(&self) -> &[GtPattern] {
        &self.patterns
    }

    pub fn get(&self, k: usize) -> &GtPattern {
        &self.patterns[k]
    }

    pub fn position(&self, p: &GtPattern) -> Option<usize> {
        self.index.get(p.flat()).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hw(v: &[i64]) -> HighestWeight {
        HighestWeight::new(v.to_vec()).unwrap()
    }

    /// Brute force: every filling of the lower rows from the box
    /// `[min(top), max(top)]`, filtered by betweenness.
    fn brute_force_count(top: &[i64]) -> usize {
        let n = top.len();
        let lo = *top.iter().min().unwrap();
        let hi = *top.iter().max().unwrap();
        let free = n * (n - 1) / 2;
        let width = (hi - lo + 1) as usize;
        let mut count = 0;
        let total = width.pow(free as u32);
        for code in 0..total {
            let mut c = code;
            let mut entries = top.to_vec();
            for _ in 0..free {
                entries.push(lo + (c % width) as i64);
                c /= width;
            }
            if GtPattern::from_flat(n, entries).is_valid() {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn counts_small() {
        assert_eq!(enumerate_tableaux(&hw(&[1, 0])).len(), 2);
        assert_eq!(enumerate_tableaux(&hw(&[2, 1, 0])).len(), 8);
        assert_eq!(brute_force_count(&[2, 1, 0]), 8);
        assert_eq!(enumerate_tableaux(&hw(&[4, 4, 4, 4])).len(), 1);
    }

    #[test]
    fn invalid_weight() {
        assert!(matches!(
            HighestWeight::new(vec![0, 1]),
            Err(Error::InvalidWeight(_))
        ));
    }

    #[test]
    fn ordering_is_lexicographic_and_unique() {
        let list = enumerate_tableaux(&hw(&[3, 1, 0, -1]));
        for w in list.windows(2) {
            assert!(w[0].flat() < w[1].flat());
        }
        assert!(list.iter().all(GtPattern::is_valid));
        assert_eq!(list.len() as u128, gt_dimension(&hw(&[3, 1, 0, -1])));
    }

    #[test]
    fn shift_examples() {
        let p0 = GtPattern::from_rows(&[vec![1, 0], vec![0]]).unwrap();
        let p1 = p0.apply_shift(1, 1, 1).unwrap().unwrap();
        assert_eq!(p1.m(1, 1), 1);
        assert_eq!(p1.apply_shift(1, 1, 1).unwrap(), None);
        assert!(p0.apply_shift(3, 1, 1).is_err());
        assert!(p0.apply_shift(1, 2, 1).is_err());
    }

    #[test]
    fn shifts_preserve_validity_and_invert() {
        for p in enumerate_tableaux(&hw(&[3, 1, 0, -2])) {
            for j in 1..4 {
                for i in 1..=j {
                    for sign in [1, -1] {
                        if let Some(s) = p.apply_shift(j, i, sign).unwrap() {
                            assert!(s.is_valid());
                            assert_eq!(s.apply_shift(j, i, -sign).unwrap().unwrap(), p);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn branching_examples() {
        assert_eq!(branching(&hw(&[1, 0])), vec![hw(&[0]), hw(&[1])]);
        let b = branching(&hw(&[2, 1, 0]));
        let mut expected = vec![hw(&[2, 1]), hw(&[2, 0]), hw(&[1, 1]), hw(&[1, 0])];
        expected.sort();
        let mut got = b.clone();
        got.sort();
        assert_eq!(got, expected);
        let total: usize = b.iter().map(|w| enumerate_tableaux(w).len()).sum();
        assert_eq!(total, 8);
    }

    #[test]
    fn principal_weight_examples() {
        let w = Window::symmetric(2);
        let empty = HighestWeight::new(vec![]).unwrap();
        let got: Vec<Vec<i64>> = principal_weights(&empty, &w)
            .into_iter()
            .map(Vec::from)
            .collect();
        assert_eq!(got, vec![vec![-2], vec![-1], vec![0], vec![1], vec![2]]);

        let got: Vec<Vec<i64>> = principal_weights(&hw(&[0]), &Window::symmetric(1))
            .into_iter()
            .map(Vec::from)
            .collect();
        let mut expected = vec![vec![1, 0], vec![1, -1], vec![0, 0], vec![0, -1]];
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn l_coordinates() {
        assert_eq!(hw(&[2, 1, 0]).row_l(), vec![1, -1, -3]);
        assert_eq!(hw(&[0]).inducing_l(), vec![-2]);
        let l = hw(&[3, 3, 1, -2]).inducing_l();
        assert!(l.windows(2).all(|w| w[0] > w[1]));
    }
}
