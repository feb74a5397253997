//! Diagonal intertwining operators between principal series representations
//! with the same `m`, and their pole/zero structure at integer points.
//!
//! An intertwiner `A` with `A T(a) = T'(a) A` commutes with `U_q(u_n)`, so it
//! is a scalar `b_{m_n}` on each block. The `e_n` and `f_n` equations give,
//! for every edge `m_n -> m_n^{+s}` with `l = l_{sn}(m_n)`,
//!
//! ```text
//! b(m_n^{+s}) [l - c1]  = b(m_n) [l - c1']
//! b(m_n^{+s}) [c2' - l] = b(m_n) [c2 - l]
//! ```
//!
//! The first fixes the ratio, the second must then agree with it.

use std::collections::{HashMap, VecDeque};

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{GeneratorSet, SparseOperator};
use crate::principal::{PrincipalParams, WindowedRep};
use crate::scalar::{q_number, q_number_derivative, QExponent, QParam, Scalar};
use crate::tableau::{principal_weights_in, satisfies_principal, HighestWeight, WeightBox, Window};

/// Relative tolerance for loop and edge consistency.
pub const LOOP_TOLERANCE: f64 = 1e-10;

/// Scalars `b_{m_n}` of a diagonal intertwiner on a finite set of weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalIntertwiner {
    pub from: PrincipalParams,
    pub to: PrincipalParams,
    pub weights: Vec<HighestWeight>,
    pub values: Vec<Complex64>,
    /// Index of the weight where `b` was pinned to 1.
    pub normalization: usize,
}

impl DiagonalIntertwiner {
    pub fn value(&self, mn: &[i64]) -> Option<Complex64> {
        self.weights
            .iter()
            .position(|w| w.entries() == mn)
            .map(|k| self.values[k])
    }

    /// The operator on the basis of `rep`, whose weights must all be covered.
    pub fn operator_on(&self, rep: &WindowedRep) -> Result<SparseOperator> {
        let index: HashMap<&[i64], usize> = self
            .weights
            .iter()
            .enumerate()
            .map(|(k, w)| (w.entries(), k))
            .collect();
        let per_weight: Result<Vec<Complex64>> = rep
            .weights
            .iter()
            .map(|w| {
                index
                    .get(w.entries())
                    .map(|&k| self.values[k])
                    .ok_or_else(|| Error::Index(format!("no intertwiner value at {w}")))
            })
            .collect();
        Ok(block_diagonal(rep, &per_weight?))
    }
}

/// Diagonal operator equal to `per_weight[w]` on block `w` of `rep`.
pub fn block_diagonal(rep: &WindowedRep, per_weight: &[Complex64]) -> SparseOperator {
    SparseOperator::diagonal((0..rep.dim()).map(|k| per_weight[rep.block_of(k)]))
}

/// `b(m_n^{+s}) / b(m_n)` for the edge with `l = l_{sn}(m_n)`.
fn edge_ratio(from: &PrincipalParams, to: &PrincipalParams, mn: &[i64], s: usize, q: &QParam) -> Result<Complex64> {
    let l = QExponent::integer(mn[s - 1] - s as i64);
    let den = q.qn_exponent(l - from.c1());
    if den.is_zero() {
        return Err(Error::VanishingFactor {
            weight: mn.to_vec(),
            direction: s,
        });
    }
    let ratio = q.qn_exponent(l - to.c1()) / den;
    let lhs = ratio * q.qn_exponent(to.c2() - l);
    let rhs = q.qn_exponent(from.c2() - l);
    let scale = lhs.norm().max(rhs.norm());
    if scale > 0.0 {
        let deviation = (lhs - rhs).norm() / scale;
        if deviation > LOOP_TOLERANCE {
            return Err(Error::InconsistentLoop { deviation });
        }
    }
    Ok(ratio)
}

/// Neighbours `m_n^{+s}` inside `bounds`.
pub(crate) fn up_edges<'a>(
    m: &'a [i64],
    mn: &'a [i64],
    bounds: WeightBox,
) -> impl Iterator<Item = (usize, Vec<i64>)> + 'a {
    (1..=mn.len()).filter_map(move |s| {
        let mut t = mn.to_vec();
        t[s - 1] += 1;
        (satisfies_principal(m, &t) && bounds.contains(&t)).then_some((s, t))
    })
}

/// Diagonal intertwiner from `T_from` to `T_to` on the weights inside
/// `bounds`, by propagating the edge ratios along a breadth-first tree from
/// the lexicographically smallest weight (where `b = 1`), then checking every
/// remaining edge.
pub fn intertwiner_between(
    from: &PrincipalParams,
    to: &PrincipalParams,
    bounds: WeightBox,
    q: &QParam,
) -> Result<DiagonalIntertwiner> {
    if from.m() != to.m() || from.m0() != to.m0() {
        return Err(Error::NotComparable);
    }
    let m = from.m().entries();
    let weights = principal_weights_in(from.m(), bounds);
    if weights.is_empty() {
        return Err(Error::EmptyInterior);
    }
    let index: HashMap<Vec<i64>, usize> = weights
        .iter()
        .enumerate()
        .map(|(k, w)| (w.entries().to_vec(), k))
        .collect();

    // every edge once, as (lower, upper, ratio)
    let mut adjacency: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); weights.len()];
    let mut edges = Vec::new();
    for (k, w) in weights.iter().enumerate() {
        for (s, t) in up_edges(m, w.entries(), bounds) {
            let j = index[&t];
            let r = edge_ratio(from, to, w.entries(), s, q)?;
            adjacency[k].push((j, r));
            adjacency[j].push((k, Complex64::new(1.0, 0.0) / r));
            edges.push((k, j, r));
        }
    }

    let mut values: Vec<Option<Complex64>> = vec![None; weights.len()];
    values[0] = Some(Complex64::new(1.0, 0.0));
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let bk = values[k].expect("queued weights have values");
        for &(j, r) in &adjacency[k] {
            if values[j].is_none() {
                values[j] = Some(bk * r);
                queue.push_back(j);
            }
        }
    }
    let values: Vec<Complex64> = values
        .into_iter()
        .map(|v| v.ok_or_else(|| Error::Consistency("weight graph is disconnected".into())))
        .collect::<Result<_>>()?;
    for (k, j, r) in edges {
        let predicted = values[k] * r;
        let scale = predicted.norm().max(values[j].norm());
        if scale > 0.0 {
            let deviation = (predicted - values[j]).norm() / scale;
            if deviation > LOOP_TOLERANCE {
                return Err(Error::InconsistentLoop { deviation });
            }
        }
    }
    Ok(DiagonalIntertwiner {
        from: from.clone(),
        to: to.clone(),
        weights,
        values,
        normalization: 0,
    })
}

/// The intertwiner from `T_{m,c1,c2}` to `T_{m,c2,c1}` on the window.
pub fn intertwiner_recursive(params: &PrincipalParams, window: &Window, q: &QParam) -> Result<DiagonalIntertwiner> {
    intertwiner_between(params, &params.swapped(), window.bounds(params.m()), q)
}

/// Arguments of the q-numbers in the double product `a_{m_n}(m, c1, c2)` for
/// split index `k`: first the `sigma - c2`, then the `tau - c1` factors.
fn product_factors(mn: &[i64], m: &[i64], c1: QExponent, c2: QExponent, k: usize) -> Result<Vec<QExponent>> {
    let n = mn.len();
    if n < 2 || m.len() + 1 != n {
        return Err(Error::DimensionMismatch(format!(
            "product formula needs n >= 2 (got |m_n| = {n}, |m| = {})",
            m.len()
        )));
    }
    if k == 0 || k > n - 1 {
        return Err(Error::Index(format!("split index k = {k} outside 1..={}", n - 1)));
    }
    let l = |r: usize| m[r - 1] - r as i64 - 1;
    let ln = |r: usize| mn[r - 1] - r as i64;
    let mut out = Vec::new();
    for r in 1..=k {
        for sigma in l(r) + 1..ln(r) {
            out.push(QExponent::integer(sigma) - c2);
        }
    }
    for s in k + 1..=n {
        for tau in ln(s)..l(s - 1) {
            out.push(QExponent::integer(tau) - c1);
        }
    }
    Ok(out)
}

/// `a_{m_n}(m, c1, c2)` with split index `k` (`1 <= k <= n-1`).
pub fn intertwiner_product(
    mn: &[i64],
    m: &[i64],
    c1: QExponent,
    c2: QExponent,
    k: usize,
    q: &QParam,
) -> Result<Scalar> {
    let mut acc = Scalar::one_exact();
    for z in product_factors(mn, m, c1, c2, k)? {
        acc = acc * q_number(z, q);
    }
    Ok(acc)
}

/// `a(c1, c2) / a(c2, c1)` on every weight inside `bounds`.
pub fn product_values(params: &PrincipalParams, k: usize, bounds: WeightBox, q: &QParam) -> Result<Vec<Complex64>> {
    let m = params.m().entries();
    principal_weights_in(params.m(), bounds)
        .iter()
        .map(|w| {
            let num = intertwiner_product(w.entries(), m, params.c1(), params.c2(), k, q)?;
            let den = intertwiner_product(w.entries(), m, params.c2(), params.c1(), k, q)?;
            if den.is_zero() {
                return Err(Error::ZeroDenominator(format!("a(c2, c1) vanishes at {w}")));
            }
            Ok((num / den).to_complex())
        })
        .collect()
}

/// Largest relative deviation of `b` from `lambda * a` with the best single
/// `lambda` (fixed on the entry of largest modulus of `a`).
pub fn proportionality_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let Some(pivot) = (0..a.len()).max_by(|&i, &j| a[i].norm().total_cmp(&a[j].norm())) else {
        return 0.0;
    };
    if a[pivot].is_zero() {
        return if b.iter().all(|x| x.is_zero()) { 0.0 } else { f64::INFINITY };
    }
    let lambda = b[pivot] / a[pivot];
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let p = lambda * x;
            let scale = p.norm().max(y.norm());
            if scale == 0.0 {
                0.0
            } else {
                (p - y).norm() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Order of `b_{m_n}(c1)` at `c1 = c0` along `c1 + c2 = m0`, with the
/// coefficient of `(c1 - c0)^order`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticOrder {
    pub weight: HighestWeight,
    /// Positive for a zero, negative for a pole.
    pub order: i32,
    pub leading: Complex64,
}

/// Zero count and leading coefficient of a product of `[base + d eps]`.
fn expand(factors: &[(i64, f64)], q: &QParam) -> (i32, Complex64) {
    let dz = q_number_derivative(QExponent::integer(0), q).to_complex();
    let mut zeros = 0;
    let mut coef = Complex64::new(1.0, 0.0);
    for &(base, d) in factors {
        if base == 0 {
            zeros += 1;
            coef *= dz * d;
        } else {
            coef *= q.qn(base as f64);
        }
    }
    (zeros, coef)
}

/// Analytic order of `b_{m_n} = a(c1, c2) / a(c2, c1)` (split `k = n-1`) at
/// the integer point `c1 = c0`, `c2 = m0 - c0`, for one weight.
pub fn weight_order(m: &[i64], mn: &[i64], m0: i64, c0: i64, q: &QParam) -> Result<(i32, Complex64)> {
    let n = mn.len();
    let k = n.saturating_sub(1);
    // c1 = c0 + eps, c2 = m0 - c0 - eps
    let c1 = QExponent::integer(c0);
    let c2 = QExponent::integer(m0 - c0);
    let split = product_factors(mn, m, c1, c2, k)?;
    let n_sigma: usize = (1..=k)
        .map(|r| {
            let lo = m[r - 1] - r as i64 - 1 + 1;
            let hi = mn[r - 1] - r as i64;
            (hi - lo).max(0) as usize
        })
        .sum();
    // numerator: sigma - c2 (d = +1), tau - c1 (d = -1)
    let num: Vec<(i64, f64)> = split
        .iter()
        .enumerate()
        .map(|(i, z)| (z.as_integer().expect("integer point"), if i < n_sigma { 1.0 } else { -1.0 }))
        .collect();
    let swapped = product_factors(mn, m, c2, c1, k)?;
    // denominator: sigma - c1 (d = -1), tau - c2 (d = +1)
    let den: Vec<(i64, f64)> = swapped
        .iter()
        .enumerate()
        .map(|(i, z)| (z.as_integer().expect("integer point"), if i < n_sigma { -1.0 } else { 1.0 }))
        .collect();
    let (zn, cn) = expand(&num, q);
    let (zd, cd) = expand(&den, q);
    Ok((zn - zd, cn / cd))
}

/// Per-weight analytic orders at `c1 = c0` over the window.
pub fn analytic_order(params: &PrincipalParams, c0: Complex64, window: &Window, q: &QParam) -> Result<Vec<AnalyticOrder>> {
    let c0r = c0.re.round();
    if (c0.re - c0r).abs() > crate::scalar::INTEGER_SNAP || c0.im.abs() > crate::scalar::INTEGER_SNAP {
        return Err(Error::NonIntegerPoint(format!("{}{:+}i", c0.re, c0.im)));
    }
    let c0 = c0r as i64;
    let m = params.m().entries();
    principal_weights_in(params.m(), window.bounds(params.m()))
        .into_iter()
        .map(|w| {
            let (order, leading) = weight_order(m, w.entries(), params.m0(), c0, q)?;
            Ok(AnalyticOrder {
                weight: w,
                order,
                leading,
            })
        })
        .collect()
}

/// Leading term of `A(m, c1, m0 - c1)` at `c1 = c0`: the coefficient of
/// `(c1 - c0)^{min order}`, an intertwiner from `T_{m,c0,m0-c0}` to
/// `T_{m,m0-c0,c0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeadingIntertwiner {
    pub c0: i64,
    pub min_order: i32,
    pub orders: Vec<AnalyticOrder>,
    pub operator: DiagonalIntertwiner,
}

impl LeadingIntertwiner {
    /// Weights where the leading operator vanishes.
    pub fn kernel(&self) -> Vec<HighestWeight> {
        self.orders
            .iter()
            .filter(|o| o.order > self.min_order)
            .map(|o| o.weight.clone())
            .collect()
    }
}

pub fn leading_intertwiner(params: &PrincipalParams, c0: i64, window: &Window, q: &QParam) -> Result<LeadingIntertwiner> {
    let orders = analytic_order(params, Complex64::new(c0 as f64, 0.0), window, q)?;
    let min_order = orders.iter().map(|o| o.order).min().ok_or(Error::EmptyInterior)?;
    let from = PrincipalParams::integer(params.m().clone(), c0, params.m0() - c0);
    let to = from.swapped();
    let values = orders
        .iter()
        .map(|o| if o.order == min_order { o.leading } else { Complex64::zero() })
        .collect();
    let normalization = orders.iter().position(|o| o.order == min_order).unwrap_or(0);
    Ok(LeadingIntertwiner {
        c0,
        min_order,
        operator: DiagonalIntertwiner {
            from,
            to,
            weights: orders.iter().map(|o| o.weight.clone()).collect(),
            values,
            normalization,
        },
        orders,
    })
}

/// Residue (of order `-min order`) of `A(m, c1, m0 - c1)` at a pole `c0`.
pub fn residue_intertwiner(params: &PrincipalParams, c0: i64, window: &Window, q: &QParam) -> Result<LeadingIntertwiner> {
    let lead = leading_intertwiner(params, c0, window, q)?;
    if lead.min_order >= 0 {
        return Err(Error::NotAPole(c0));
    }
    Ok(lead)
}

/// Largest column-relative residual of `A T(a) - T'(a) A` over all
/// generators, on the interior columns of `from_rep`.
///
/// Each column is scaled by the larger of the two sides, since intertwiner
/// entries can span many orders of magnitude across the window.
pub fn intertwining_residual(a: &SparseOperator, from: &GeneratorSet, to: &GeneratorSet, columns: &[usize]) -> Result<f64> {
    if from.dim() != to.dim() || a.rows() != from.dim() || from.rank() != to.rank() {
        return Err(Error::DimensionMismatch("intertwiner and representations differ in size".into()));
    }
    let mut worst = 0.0f64;
    for g in from.generators() {
        for &c in columns {
            let unit = vec![(c, Complex64::new(1.0, 0.0))];
            let lhs = a.apply(&from.get(g).apply(&unit));
            let rhs = to.get(g).apply(&a.apply(&unit));
            let scale = lhs
                .iter()
                .chain(&rhs)
                .fold(0.0f64, |m, e| m.max(e.1.norm()));
            if scale == 0.0 {
                continue;
            }
            let diff = crate::operator::sub(&lhs, &rhs);
            let d = diff.iter().fold(0.0f64, |m, e| m.max(e.1.norm()));
            worst = worst.max(d / scale);
        }
    }
    Ok(worst)
}

/// Position of an integer point `(c1, c2)` relative to `l`, which decides
/// the order of the intertwiner family there and its kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoleRegion {
    /// Same interval, `c1 > c2`; kernel `E^+_{c2} E^-_{c1}`.
    SameDescending,
    /// Same interval, `c1 < c2`; kernel `E^-_{c1} + E^+_{c2}`, a pole.
    SameAscending,
    /// Different intervals, `c1` above `l_{n-1}`.
    SplitUpper,
    /// Different intervals, `c1` below `l_{n-1}`.
    SplitLowest,
    /// `c1 = l_r`, `c2` above `l_{n-1}`; kernel `E^+_{c2}`.
    C1AtUpper,
    /// `c1 = l_r`, `c2` below `l_{n-1}`; kernel `E^+_{c2}`, a pole.
    C1AtLowest,
    /// `c2 = l_r`, `c1` above `l_{n-1}`; kernel `E^-_{c1}`, a pole.
    C2AtUpper,
    /// `c2 = l_r`, `c1` below `l_{n-1}`; kernel `E^-_{c1}`.
    C2AtLowest,
}

pub fn pole_region(l: &[i64], c1: i64, c2: i64) -> Option<PoleRegion> {
    use crate::structure::{placement, Placement::*};
    let lowest = l.len() + 1;
    Some(match (placement(l, c1), placement(l, c2)) {
        (Interval(i), Interval(j)) if i == j && c1 > c2 => PoleRegion::SameDescending,
        (Interval(i), Interval(j)) if i == j && c1 < c2 => PoleRegion::SameAscending,
        (Interval(i), Interval(j)) if i != j && i < lowest => PoleRegion::SplitUpper,
        (Interval(i), Interval(j)) if i != j => PoleRegion::SplitLowest,
        (At(_), Interval(j)) if j < lowest => PoleRegion::C1AtUpper,
        (At(_), Interval(_)) => PoleRegion::C1AtLowest,
        (Interval(i), At(_)) if i < lowest => PoleRegion::C2AtUpper,
        (Interval(_), At(_)) => PoleRegion::C2AtLowest,
        _ => return None,
    })
}

/// Weights among `weights` expected in the kernel of the leading
/// coefficient at `c0 = c1`.
///
/// In the split regions the kernel is `1 - E^+_{c1} E^-_{c2}`; with
/// `transposed = false` the roles of `c1` and `c2` in that product are
/// exchanged instead, which is what the measured orders rule out.
pub fn expected_kernel(
    m: &HighestWeight,
    c1: i64,
    c2: i64,
    weights: &[HighestWeight],
    transposed: bool,
) -> Option<Vec<HighestWeight>> {
    use crate::structure::projector_contains;
    let l = m.inducing_l();
    let region = pole_region(&l, c1, c2)?;
    let e = |c: i64, minus: bool, mn: &[i64]| projector_contains(&l, c, minus, mn).unwrap_or(false);
    let keep = |mn: &[i64]| match region {
        PoleRegion::SameDescending => e(c2, false, mn) && e(c1, true, mn),
        PoleRegion::SameAscending => e(c1, true, mn) || e(c2, false, mn),
        PoleRegion::SplitUpper | PoleRegion::SplitLowest => {
            if transposed {
                !(e(c1, false, mn) && e(c2, true, mn))
            } else {
                !(e(c2, false, mn) && e(c1, true, mn))
            }
        }
        PoleRegion::C1AtUpper | PoleRegion::C1AtLowest => e(c2, false, mn),
        PoleRegion::C2AtUpper | PoleRegion::C2AtLowest => e(c1, true, mn),
    };
    Some(weights.iter().filter(|w| keep(w.entries())).cloned().collect())
}
