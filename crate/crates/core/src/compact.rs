//! Finite-dimensional irreducible representations `T_m` of `U_q(u_n)` on the
//! Gel'fand-Tsetlin basis (Jimbo's formulas).

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operator::{GeneratorSet, SparseOperator, SparseVec};
use crate::relations::{verify_relations, RelationReport};
use crate::scalar::QParam;
use crate::tableau::{enumerate_tableaux, GtBasis, GtPattern, HighestWeight};

/// Squared Jimbo coefficient `A^j_r(M)^2` from the shifted rows `r+1`, `r`
/// and `r-1` (0-based `j`).
///
/// Returns the radicand as is, so callers can check its sign.
pub fn jimbo_radicand(upper: &[i64], row: &[i64], lower: &[i64], j: usize, q: &QParam) -> f64 {
    let (num, den) = jimbo_parts(upper, row, lower, j, q);
    num / den
}

/// Numerator (with its leading minus sign) and denominator of the radicand.
/// At an illegal shift the numerator vanishes, the denominator may too.
fn jimbo_parts(upper: &[i64], row: &[i64], lower: &[i64], j: usize, q: &QParam) -> (f64, f64) {
    let lj = row[j];
    let mut num = -1.0;
    for &u in upper {
        num *= q.qn((u - lj) as f64);
    }
    for &d in lower {
        num *= q.qn((d - lj - 1) as f64);
    }
    let mut den = 1.0;
    for (i, &li) in row.iter().enumerate() {
        if i != j {
            den *= q.qn((li - lj) as f64) * q.qn((li - lj - 1) as f64);
        }
    }
    (num, den)
}

/// `A^j_r(M)` (1-based `j`, `r`), or a consistency error if the radicand is
/// negative.
pub fn jimbo_coefficient(p: &GtPattern, r: usize, j: usize, q: &QParam) -> Result<f64> {
    let shifted = |row: usize| -> Vec<i64> {
        if row == 0 {
            Vec::new()
        } else {
            (1..=row).map(|i| p.l(i, row)).collect()
        }
    };
    let rad = jimbo_radicand(&shifted(r + 1), &shifted(r), &shifted(r - 1), j - 1, q);
    if rad < 0.0 || !rad.is_finite() {
        return Err(Error::Consistency(format!(
            "negative radicand {rad:e} for A^{j}_{r} at {p}"
        )));
    }
    Ok(rad.sqrt())
}

/// Exponent `a_r` of `q` in `k_r |M> = q^{a_r} |M>`.
pub fn k_exponent(p: &GtPattern, r: usize) -> i64 {
    let s: i64 = p.row(r).iter().sum();
    let t: i64 = if r > 1 { p.row(r - 1).iter().sum() } else { 0 };
    s - t
}

/// Images of `|M>` under `e_r`: pairs `(M^{+j}_r, A^j_r(M))`.
pub fn e_action(p: &GtPattern, r: usize, q: &QParam) -> Result<Vec<(GtPattern, f64)>> {
    let mut out = Vec::new();
    for j in 1..=r {
        if let Some(t) = p.apply_shift(r, j, 1)? {
            out.push((t, jimbo_coefficient(p, r, j, q)?));
        }
    }
    Ok(out)
}

/// Images of `|M>` under `f_r`: pairs `(M^{-j}_r, A^j_r(M^{-j}_r))`.
pub fn f_action(p: &GtPattern, r: usize, q: &QParam) -> Result<Vec<(GtPattern, f64)>> {
    let mut out = Vec::new();
    for j in 1..=r {
        if let Some(t) = p.apply_shift(r, j, -1)? {
            let a = jimbo_coefficient(&t, r, j, q)?;
            out.push((t, a));
        }
    }
    Ok(out)
}

type Action = fn(&GtPattern, usize, &QParam) -> Result<Vec<(GtPattern, f64)>>;

fn ladder(basis: &GtBasis, r: usize, q: &QParam, action: Action) -> Result<SparseOperator> {
    let cols: Result<Vec<SparseVec>> = basis
        .patterns()
        .par_iter()
        .map(|p| {
            Ok(action(p, r, q)?
                .into_iter()
                // images outside the basis are truncated away
                .filter_map(|(t, a)| basis.position(&t).map(|k| (k, Complex64::new(a, 0.0))))
                .collect())
        })
        .collect();
    Ok(SparseOperator::from_columns(basis.len(), cols?))
}

/// `k_r^{±1}`, `e_r`, `f_r` acting inside the GT patterns of `basis` (all of
/// size `N`): `N` Cartan generators and `N-1` ladders.
pub(crate) fn gt_generators(basis: &GtBasis, size: usize, q: &QParam) -> Result<GeneratorSet> {
    let mut k = Vec::with_capacity(size);
    let mut k_inv = Vec::with_capacity(size);
    for r in 1..=size {
        let exps: Vec<f64> = basis
            .patterns()
            .iter()
            .map(|p| k_exponent(p, r) as f64)
            .collect();
        k.push(SparseOperator::diagonal(
            exps.iter().map(|&a| Complex64::new(q.value().powf(a), 0.0)),
        ));
        k_inv.push(SparseOperator::diagonal(
            exps.iter().map(|&a| Complex64::new(q.value().powf(-a), 0.0)),
        ));
    }
    let mut e = Vec::new();
    let mut f = Vec::new();
    for r in 1..size {
        e.push(ladder(basis, r, q, e_action)?);
        f.push(ladder(basis, r, q, f_action)?);
    }
    GeneratorSet::new(k, k_inv, e, f)
}

/// `T_m` together with its basis.
#[derive(Clone, Debug)]
pub struct CompactRep {
    pub hw: HighestWeight,
    pub basis: GtBasis,
    pub gens: GeneratorSet,
}

pub fn build_compact_rep(hw: &HighestWeight, q: &QParam) -> Result<CompactRep> {
    let basis = GtBasis::from_patterns(enumerate_tableaux(hw));
    let gens = gt_generators(&basis, hw.len(), q)?;
    Ok(CompactRep {
        hw: hw.clone(),
        basis,
        gens,
    })
}

/// Check every defining relation on every basis vector.
pub fn verify_compact_relations(gens: &GeneratorSet, q: &QParam, tol: f64) -> Result<RelationReport> {
    verify_relations(gens, q, tol)
}

/// Basis indices grouped by the second row of the pattern, i.e. by the
/// `U_q(u_{n-1})` component they belong to.
pub fn restriction_decomposition(basis: &GtBasis) -> BTreeMap<HighestWeight, Vec<usize>> {
    let mut out: BTreeMap<HighestWeight, Vec<usize>> = BTreeMap::new();
    for (k, p) in basis.patterns().iter().enumerate() {
        let row = if p.size() > 1 {
            p.row(p.size() - 1).to_vec()
        } else {
            Vec::new()
        };
        let w = HighestWeight::new(row).expect("interleaving rows are non-increasing");
        out.entry(w).or_default().push(k);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hw(v: &[i64]) -> HighestWeight {
        HighestWeight::new(v.to_vec()).unwrap()
    }

    #[test]
    fn spin_half() {
        let q = QParam::new(2.0).unwrap();
        let rep = build_compact_rep(&hw(&[1, 0]), &q).unwrap();
        // basis: m11 = 0, then m11 = 1
        assert_eq!(rep.basis.get(0).m(1, 1), 0);
        assert!((rep.gens.e[0].get(1, 0).re - 1.0).abs() < 1e-15);
        assert!((rep.gens.f[0].get(0, 1).re - 1.0).abs() < 1e-15);
        assert_eq!(rep.gens.e[0].nnz(), 1);
    }

    #[test]
    fn spin_one_middle_coefficient() {
        let q = QParam::new(1.7).unwrap();
        let rep = build_compact_rep(&hw(&[2, 0]), &q).unwrap();
        let expected = (q.qn(1.0) * q.qn(2.0)).sqrt();
        assert!((rep.gens.e[0].get(2, 1).re - expected).abs() < 1e-14);
        assert!((expected - (q.value() + 1.0 / q.value()).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn trivial_weight() {
        let q = QParam::new(1.3).unwrap();
        let rep = build_compact_rep(&hw(&[2, 2, 2]), &q).unwrap();
        assert_eq!(rep.basis.len(), 1);
        assert!(rep.gens.e.iter().chain(&rep.gens.f).all(|op| op.nnz() == 0));
        for k in &rep.gens.k {
            assert!((k.get(0, 0).re - 1.3f64.powi(2)).abs() < 1e-14);
        }
        let report = verify_compact_relations(&rep.gens, &q, 1e-15).unwrap();
        assert_eq!(report.max_residual, 0.0);
    }

    #[test]
    fn relations_small() {
        for (w, qv) in [(vec![1, 0], 2.0), (vec![2, 1, 0], 1.3), (vec![3, 1, -1, -2], 0.5)] {
            let q = QParam::new(qv).unwrap();
            let rep = build_compact_rep(&hw(&w), &q).unwrap();
            let report = verify_compact_relations(&rep.gens, &q, 1e-10).unwrap();
            assert!(report.passed, "{w:?}: {:?}", report.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn illegal_shifts_have_vanishing_numerator() {
        let q = QParam::new(1.9).unwrap();
        for p in enumerate_tableaux(&hw(&[3, 1, 0, -1])) {
            for r in 1..4 {
                for j in 1..=r {
                    if p.apply_shift(r, j, 1).unwrap().is_none() {
                        let rows: Vec<Vec<i64>> = [r + 1, r, r - 1]
                            .iter()
                            .map(|&s| (1..=s).map(|i| p.l(i, s)).collect())
                            .collect();
                        let (num, _) = jimbo_parts(&rows[0], &rows[1], &rows[2], j - 1, &q);
                        assert_eq!(num, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn restriction_blocks() {
        let q = QParam::new(1.3).unwrap();
        let rep = build_compact_rep(&hw(&[2, 1, 0]), &q).unwrap();
        let blocks = restriction_decomposition(&rep.basis);
        let sizes: BTreeMap<Vec<i64>, usize> = blocks
            .iter()
            .map(|(w, v)| (w.entries().to_vec(), v.len()))
            .collect();
        assert_eq!(sizes[&vec![2, 1]], 2);
        assert_eq!(sizes[&vec![2, 0]], 3);
        assert_eq!(sizes[&vec![1, 1]], 1);
        assert_eq!(sizes[&vec![1, 0]], 2);
        let mut block_of = vec![0; rep.basis.len()];
        for (b, (_, idx)) in blocks.iter().enumerate() {
            for &k in idx {
                block_of[k] = b;
            }
        }
        for (r, c, _) in rep.gens.e[0].triplets() {
            assert_eq!(block_of[r], block_of[c]);
        }
    }
}
