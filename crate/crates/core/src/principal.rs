//! Principal series `T_{m,c1,c2}` of `U_q(u_{n,1})`, truncated to a finite
//! window of `U_q(u_n)` components.
//!
//! The carrier space is the direct sum of the GT bases of all `U_q(u_n)`
//! highest weights `m_n` interleaving `m`. Inside each block the generators
//! `k_1..k_n`, `e_1..e_{n-1}`, `f_1..f_{n-1}` act by the compact formulas;
//! `e_n`, `f_n` move between blocks and `k_{n+1}` is diagonal.

use std::collections::HashMap;

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compact::gt_generators;
use crate::error::{Error, Result};
use crate::operator::{GeneratorSet, SparseOperator, SparseVec};
use crate::relations::{check_relations, gl_relations, RelationReport};
use crate::scalar::{q_number, zero_order, QExponent, QParam, Scalar, INTEGER_SNAP};
use crate::tableau::{
    enumerate_tableaux, principal_weights_in, satisfies_principal, GtBasis, GtPattern,
    HighestWeight, WeightBox, Window,
};

/// `(m, c1, c2)` with `c1 + c2 = m0` an integer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalParams {
    m: HighestWeight,
    c1: QExponent,
    c2: QExponent,
    m0: i64,
}

impl PrincipalParams {
    /// Values within `1e-9` of an integer are snapped to it.
    pub fn new(m: HighestWeight, c1: Complex64, c2: Complex64) -> Result<Self> {
        Self::from_exponents(
            m,
            QExponent::snapped(c1, INTEGER_SNAP),
            QExponent::snapped(c2, INTEGER_SNAP),
        )
    }

    pub fn from_exponents(m: HighestWeight, c1: QExponent, c2: QExponent) -> Result<Self> {
        let sum = (c1 + c2).value();
        let m0 = sum.re.round();
        if (sum.re - m0).abs() > INTEGER_SNAP || sum.im.abs() > INTEGER_SNAP {
            return Err(Error::NonIntegerSum(format!("{}{:+}i", sum.re, sum.im)));
        }
        Ok(Self {
            m,
            c1,
            c2,
            m0: m0 as i64,
        })
    }

    /// `c2 = m0 - c1`.
    pub fn with_sum(m: HighestWeight, c1: Complex64, m0: i64) -> Result<Self> {
        let c1 = QExponent::snapped(c1, INTEGER_SNAP);
        Self::from_exponents(m, c1, -c1 + m0)
    }

    pub fn integer(m: HighestWeight, c1: i64, c2: i64) -> Self {
        Self {
            m,
            c1: QExponent::integer(c1),
            c2: QExponent::integer(c2),
            m0: c1 + c2,
        }
    }

    pub fn m(&self) -> &HighestWeight {
        &self.m
    }

    pub fn c1(&self) -> QExponent {
        self.c1
    }

    pub fn c2(&self) -> QExponent {
        self.c2
    }

    pub fn m0(&self) -> i64 {
        self.m0
    }

    /// The `n` of `U_q(u_{n,1})`.
    pub fn n(&self) -> usize {
        self.m.len() + 1
    }

    /// `(m, c2, c1)`.
    pub fn swapped(&self) -> Self {
        Self {
            m: self.m.clone(),
            c1: self.c2,
            c2: self.c1,
            m0: self.m0,
        }
    }

    /// `l_j = m_j - j - 1`.
    pub fn l(&self) -> Vec<i64> {
        self.m.inducing_l()
    }

    /// Both `c`'s are exact integers.
    pub fn integer_point(&self) -> Option<(i64, i64)> {
        Some((self.c1.as_integer()?, self.c2.as_integer()?))
    }
}

impl std::fmt::Display for PrincipalParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "m={}, c1={}, c2={}", self.m, self.c1, self.c2)
    }
}

/// `omega_s` for the top row `mn`, the next row `alpha_row` of the pattern
/// and the inducing weight `m` (1-based `s`).
///
/// Zero exactly when `mn^{+s}` breaks the interleaving with `m` or
/// `alpha_row`; a negative radicand is reported as a consistency error.
pub fn omega(m: &[i64], mn: &[i64], alpha_row: &[i64], s: usize, q: &QParam) -> Result<f64> {
    let n = mn.len();
    if m.len() + 1 != n || alpha_row.len() + 1 != n || s == 0 || s > n {
        return Err(Error::DimensionMismatch(format!(
            "omega_{s} with |m| = {}, |m_n| = {n}, |alpha row| = {}",
            m.len(),
            alpha_row.len()
        )));
    }
    let l = |row: &[i64], i: usize| row[i - 1] - i as i64;
    let lsn = l(mn, s);
    let mut num = 1.0;
    for j in 1..n {
        let ljm = m[j - 1] - j as i64 - 1;
        num *= q.qn((l(alpha_row, j) - lsn - 1) as f64) * q.qn((ljm - lsn) as f64);
    }
    if num == 0.0 {
        return Ok(0.0);
    }
    let mut den = 1.0;
    for r in (1..=n).filter(|&r| r != s) {
        let d = lsn - l(mn, r);
        den *= q.qn((d + 1) as f64) * q.qn(d as f64);
    }
    let rad = num / den;
    if rad < 0.0 || !rad.is_finite() {
        return Err(Error::Consistency(format!(
            "omega_{s} radicand {rad:e} at m={m:?}, m_n={mn:?}, alpha row {alpha_row:?}"
        )));
    }
    Ok(rad.sqrt())
}

fn alpha_row(p: &GtPattern) -> &[i64] {
    if p.size() > 1 {
        p.row(p.size() - 1)
    } else {
        &[]
    }
}

/// `|m_n^{±s}, alpha>` when it is a legal basis vector of `T_{m,c1,c2}`
/// (ignoring any window).
pub fn principal_shift(m: &[i64], p: &GtPattern, s: usize, sign: i64) -> Option<GtPattern> {
    let t = p.apply_shift(p.size(), s, sign).ok()??;
    satisfies_principal(m, t.top()).then_some(t)
}

/// Images of `|m_n, alpha>` under `e_n`: `[l_{sn} - c1] omega_s`.
pub fn e_n_action(params: &PrincipalParams, p: &GtPattern, q: &QParam) -> Result<Vec<(GtPattern, Complex64)>> {
    let m = params.m.entries();
    let mut out = Vec::new();
    for s in 1..=p.size() {
        if let Some(t) = principal_shift(m, p, s, 1) {
            let w = omega(m, p.top(), alpha_row(p), s, q)?;
            let c = q.qn_exponent(QExponent::integer(p.l(s, p.size())) - params.c1);
            out.push((t, c * w));
        }
    }
    Ok(out)
}

/// Images of `|m_n, alpha>` under `f_n`:
/// `[-l_{sn} + c2 + 1] omega_s(m, m_n^{-s}, alpha)`.
pub fn f_n_action(params: &PrincipalParams, p: &GtPattern, q: &QParam) -> Result<Vec<(GtPattern, Complex64)>> {
    let m = params.m.entries();
    let mut out = Vec::new();
    for s in 1..=p.size() {
        if let Some(t) = principal_shift(m, p, s, -1) {
            let w = omega(m, t.top(), alpha_row(&t), s, q)?;
            let c = q.qn_exponent(params.c2 + 1 - QExponent::integer(p.l(s, p.size())));
            out.push((t, c * w));
        }
    }
    Ok(out)
}

/// Exponent of `q` in `k_{n+1}` on the block `m_n`; an integer because
/// `c1 + c2` is.
pub fn k_top_exponent(params: &PrincipalParams, mn: &[i64]) -> i64 {
    let n = mn.len() as i64;
    params.m0 + n + 2 + params.m.entries().iter().sum::<i64>() - mn.iter().sum::<i64>()
}

/// A principal series representation restricted to a window.
#[derive(Clone, Debug)]
pub struct WindowedRep {
    pub params: PrincipalParams,
    pub window: Window,
    pub bounds: WeightBox,
    pub weights: Vec<HighestWeight>,
    pub basis: GtBasis,
    pub gens: GeneratorSet,
    /// Per basis vector: far enough from the cut for words of length 3.
    pub interior: Vec<bool>,
    block_of: Vec<usize>,
    weight_index: HashMap<Vec<i64>, usize>,
}

impl WindowedRep {
    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn interior_columns(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&k| self.interior[k]).collect()
    }

    /// Index into `weights` of the block holding basis vector `k`.
    pub fn block_of(&self, k: usize) -> usize {
        self.block_of[k]
    }

    pub fn weight_index(&self, mn: &[i64]) -> Option<usize> {
        self.weight_index.get(mn).copied()
    }

    /// Basis indices of the block `m_n`.
    pub fn block(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim()).filter(move |&k| self.block_of[k] == w)
    }

    /// Whether block `w` lies at distance at least `margin` from the cut.
    pub fn weight_is_interior(&self, w: usize) -> bool {
        let mn = self.weights[w].entries();
        let margin = self.window.margin as i64;
        mn[0] <= self.bounds.top_max - margin && mn[mn.len() - 1] >= self.bounds.bottom_min + margin
    }
}

/// Build `T_{m,c1,c2}` on the weights of `window`.
pub fn build_principal(params: &PrincipalParams, window: &Window, q: &QParam) -> Result<WindowedRep> {
    let bounds = window.bounds(&params.m);
    build_principal_in(params, window, bounds, q)
}

/// As [`build_principal`], with explicit absolute bounds (used to compare
/// representations with different `m` on the same box).
pub fn build_principal_in(
    params: &PrincipalParams,
    window: &Window,
    bounds: WeightBox,
    q: &QParam,
) -> Result<WindowedRep> {
    if !window.has_interior() {
        return Err(Error::EmptyInterior);
    }
    let n = params.n();
    let weights = principal_weights_in(&params.m, bounds);
    let mut patterns = Vec::new();
    let mut block_of = Vec::new();
    for (w, mn) in weights.iter().enumerate() {
        for p in enumerate_tableaux(mn) {
            patterns.push(p);
            block_of.push(w);
        }
    }
    let basis = GtBasis::from_patterns(patterns);
    let weight_index: HashMap<Vec<i64>, usize> = weights
        .iter()
        .enumerate()
        .map(|(k, w)| (w.entries().to_vec(), k))
        .collect();

    let inner = gt_generators(&basis, n, q)?;
    let GeneratorSet { mut k, mut k_inv, mut e, mut f } = inner;

    let top: Vec<i64> = basis
        .patterns()
        .iter()
        .map(|p| k_top_exponent(params, p.top()))
        .collect();
    k.push(SparseOperator::diagonal(
        top.iter().map(|&a| Complex64::new(q.value().powf(a as f64), 0.0)),
    ));
    k_inv.push(SparseOperator::diagonal(
        top.iter().map(|&a| Complex64::new(q.value().powf(-a as f64), 0.0)),
    ));

    type PAction = fn(&PrincipalParams, &GtPattern, &QParam) -> Result<Vec<(GtPattern, Complex64)>>;
    let ladder = |action: PAction| -> Result<SparseOperator> {
        let cols: Result<Vec<SparseVec>> = basis
            .patterns()
            .par_iter()
            .map(|p| {
                Ok(action(params, p, q)?
                    .into_iter()
                    .filter_map(|(t, c)| basis.position(&t).map(|k| (k, c)))
                    .collect())
            })
            .collect();
        Ok(SparseOperator::from_columns(basis.len(), cols?))
    };
    e.push(ladder(e_n_action)?);
    f.push(ladder(f_n_action)?);
    let gens = GeneratorSet::new(k, k_inv, e, f)?;

    let margin = window.margin as i64;
    let interior: Vec<bool> = basis
        .patterns()
        .iter()
        .map(|p| {
            let t = p.top();
            t[0] <= bounds.top_max - margin && t[t.len() - 1] >= bounds.bottom_min + margin
        })
        .collect();
    if !interior.iter().any(|&b| b) {
        return Err(Error::EmptyInterior);
    }
    Ok(WindowedRep {
        params: params.clone(),
        window: *window,
        bounds,
        weights,
        basis,
        gens,
        interior,
        block_of,
        weight_index,
    })
}

/// All relations of `U_q(gl_{n+1})` on the interior columns.
pub fn verify_principal_relations(rep: &WindowedRep, q: &QParam, tol: f64) -> Result<RelationReport> {
    let cols = rep.interior_columns();
    if cols.is_empty() {
        return Err(Error::EmptyInterior);
    }
    check_relations(&rep.gens, &gl_relations(rep.n() + 1, q), &cols, tol)
}

fn qn(z: QExponent, q: &QParam) -> Scalar {
    q_number(z, q)
}

/// `A^j_n(M)^2` as a function of the rows `top` (the factors kept), `mid`,
/// `low`; `None` when a numerator factor vanishes exactly.
fn jimbo_square(top: &[QExponent], mid: &[i64], low: &[i64], j: usize, q: &QParam) -> Result<Option<Scalar>> {
    let lj = mid[j];
    let mut num_factors = Vec::with_capacity(top.len() + low.len());
    for &t in top {
        num_factors.push(t - lj);
    }
    for &d in low {
        num_factors.push(QExponent::integer(d - lj - 1));
    }
    if num_factors.iter().any(|&z| zero_order(z) > 0) {
        return Ok(None);
    }
    let mut num = Scalar::from_int(-1);
    for z in num_factors {
        num = num * qn(z, q);
    }
    let mut den = Scalar::from_int(1);
    for (i, &li) in mid.iter().enumerate() {
        if i != j {
            if li == lj || li - lj - 1 == 0 {
                return Err(Error::ZeroDenominator(format!(
                    "mid row {mid:?} at position {}",
                    j + 1
                )));
            }
            den = den * qn(QExponent::integer(li - lj), q) * qn(QExponent::integer(li - lj - 1), q);
        }
    }
    Ok(Some(&num / &den))
}

fn phi_general(top: &[QExponent], mid: &[i64], low: &[i64], q: &QParam) -> Result<Scalar> {
    let mut total = Scalar::zero_exact();
    for j in 0..mid.len() {
        let mut lowered = mid.to_vec();
        lowered[j] -= 1;
        if let Some(a) = jimbo_square(top, &lowered, low, j, q)? {
            total = total + a;
        }
        if let Some(a) = jimbo_square(top, mid, low, j, q)? {
            total = total - a;
        }
    }
    Ok(total)
}

fn check_phi_shape(top: usize, mid: usize, low: usize, dotted: bool) -> Result<()> {
    let n = mid;
    let expected_top = if dotted { n.saturating_sub(1) } else { n + 1 };
    if n == 0 || top != expected_top || low + 1 != n {
        return Err(Error::DimensionMismatch(format!(
            "rows of sizes {top}, {mid}, {low}"
        )));
    }
    Ok(())
}

/// The diagonal of `[e_n, f_n]` as a function of the three rows
/// `top = (c1, l_1, ..., l_{n-1}, c2)`, `mid = l_{.,n}`, `low = l_{.,n-1}`:
/// `sum_j A^j_n(M^{-j})^2 - A^j_n(M)^2`.
///
/// Exact when every entry is an exact integer and `q` is rational. Terms whose
/// numerator vanishes are skipped before their denominator is looked at.
pub fn phi(top: &[QExponent], mid: &[i64], low: &[i64], q: &QParam) -> Result<Scalar> {
    check_phi_shape(top.len(), mid.len(), low.len(), false)?;
    phi_general(top, mid, low, q)
}

/// [`phi`] with the factors containing the first and last entries of `top`
/// dropped; `inner` holds the remaining `n - 1` entries.
pub fn phi_dotted(inner: &[QExponent], mid: &[i64], low: &[i64], q: &QParam) -> Result<Scalar> {
    check_phi_shape(inner.len(), mid.len(), low.len(), true)?;
    phi_general(inner, mid, low, q)
}

/// `[2 sum mid - sum top - sum low - 1]`.
pub fn phi_rhs(top: &[QExponent], mid: &[i64], low: &[i64], q: &QParam) -> Scalar {
    let mut z = QExponent::integer(2 * mid.iter().sum::<i64>() - low.iter().sum::<i64>() - 1);
    for &t in top {
        z = z - t;
    }
    q_number(z, q)
}

/// The `top` argument of [`phi`] for a principal series representation.
pub fn phi_top(params: &PrincipalParams) -> Vec<QExponent> {
    let mut top = vec![params.c1];
    top.extend(params.l().into_iter().map(QExponent::integer));
    top.push(params.c2);
    top
}

/// `(mid, low)` rows of [`phi`] for a basis pattern.
pub fn phi_rows(p: &GtPattern) -> (Vec<i64>, Vec<i64>) {
    let n = p.size();
    let mid = (1..=n).map(|i| p.l(i, n)).collect();
    let low = if n > 1 {
        (1..n).map(|i| p.l(i, n - 1)).collect()
    } else {
        Vec::new()
    };
    (mid, low)
}

/// Diagonal entry of `[e_n, f_n]` at basis vector `k`, computed from the
/// matrices.
pub fn commutator_diagonal(rep: &WindowedRep, k: usize) -> Complex64 {
    let n = rep.n();
    let e = &rep.gens.e[n - 1];
    let f = &rep.gens.f[n - 1];
    let unit = vec![(k, Complex64::new(1.0, 0.0))];
    let ef = e.apply(&f.apply(&unit));
    let fe = f.apply(&e.apply(&unit));
    let pick = |v: &SparseVec| v.iter().find(|e| e.0 == k).map_or(Complex64::zero(), |e| e.1);
    pick(&ef) - pick(&fe)
}
