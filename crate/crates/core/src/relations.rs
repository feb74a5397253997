//! Defining relations of `U_q(gl_N)` as words in the generators, and a
//! residual checker that evaluates them column by column.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{axpy, GeneratorSet, Gen, SparseVec};
use crate::scalar::QParam;

/// A linear combination of words that must act as zero.
#[derive(Clone, Debug)]
pub struct Relation {
    pub family: &'static str,
    pub label: String,
    pub terms: Vec<(Complex64, Vec<Gen>)>,
}

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Every relation of `U_q(gl_N)` for `N = rank`.
///
/// The identity is written as the empty word.
pub fn gl_relations(rank: usize, q: &QParam) -> Vec<Relation> {
    let mut out = Vec::new();
    let qq = q.value();
    let two = q.qn(2.0);
    let den = q.denominator();
    for i in 1..=rank {
        out.push(Relation {
            family: "k_inverse",
            label: format!("k{i} k{i}^-1 = 1"),
            terms: vec![(r(1.0), vec![Gen::K(i), Gen::KInv(i)]), (r(-1.0), vec![])],
        });
        out.push(Relation {
            family: "k_inverse",
            label: format!("k{i}^-1 k{i} = 1"),
            terms: vec![(r(1.0), vec![Gen::KInv(i), Gen::K(i)]), (r(-1.0), vec![])],
        });
        for j in i + 1..=rank {
            out.push(Relation {
                family: "k_commute",
                label: format!("[k{i}, k{j}] = 0"),
                terms: vec![
                    (r(1.0), vec![Gen::K(i), Gen::K(j)]),
                    (r(-1.0), vec![Gen::K(j), Gen::K(i)]),
                ],
            });
        }
    }
    for i in 1..=rank {
        for j in 1..rank {
            let p = f64::from(u8::from(i == j)) - f64::from(u8::from(i == j + 1));
            out.push(Relation {
                family: "k_e_scaling",
                label: format!("k{i} e{j} k{i}^-1 = q^{p} e{j}"),
                terms: vec![
                    (r(1.0), vec![Gen::K(i), Gen::E(j), Gen::KInv(i)]),
                    (r(-qq.powf(p)), vec![Gen::E(j)]),
                ],
            });
            out.push(Relation {
                family: "k_f_scaling",
                label: format!("k{i} f{j} k{i}^-1 = q^{} f{j}", -p),
                terms: vec![
                    (r(1.0), vec![Gen::K(i), Gen::F(j), Gen::KInv(i)]),
                    (r(-qq.powf(-p)), vec![Gen::F(j)]),
                ],
            });
        }
    }
    for i in 1..rank {
        for j in 1..rank {
            let mut terms = vec![
                (r(1.0), vec![Gen::E(i), Gen::F(j)]),
                (r(-1.0), vec![Gen::F(j), Gen::E(i)]),
            ];
            if i == j {
                terms.push((r(-1.0 / den), vec![Gen::K(i), Gen::KInv(i + 1)]));
                terms.push((r(1.0 / den), vec![Gen::KInv(i), Gen::K(i + 1)]));
            }
            out.push(Relation {
                family: "ef_commutator",
                label: format!("[e{i}, f{j}]"),
                terms,
            });
        }
    }
    for i in 1..rank {
        for j in i + 2..rank {
            for (family, a, b) in [("distant_commute", Gen::E(i), Gen::E(j)), ("distant_commute", Gen::F(i), Gen::F(j))] {
                out.push(Relation {
                    family,
                    label: format!("[{a}, {b}] = 0"),
                    terms: vec![(r(1.0), vec![a, b]), (r(-1.0), vec![b, a])],
                });
            }
        }
    }
    for i in 1..rank {
        for j in [i.wrapping_sub(1), i + 1] {
            if j == 0 || j >= rank {
                continue;
            }
            for (family, a, b) in [("serre_e", Gen::E(i), Gen::E(j)), ("serre_f", Gen::F(i), Gen::F(j))] {
                out.push(Relation {
                    family,
                    label: format!("{a}^2 {b} - [2] {a} {b} {a} + {b} {a}^2"),
                    terms: vec![
                        (r(1.0), vec![a, a, b]),
                        (r(-two), vec![a, b, a]),
                        (r(1.0), vec![b, a, a]),
                    ],
                });
            }
        }
    }
    out
}

/// Largest entry of `R e_c` over the selected columns `c`.
pub fn relation_residual(gens: &GeneratorSet, rel: &Relation, columns: &[usize]) -> f64 {
    columns
        .iter()
        .map(|&c| {
            let unit = vec![(c, r(1.0))];
            let mut acc: SparseVec = Vec::new();
            for (coef, word) in &rel.terms {
                let v = gens.apply_word(word, &unit);
                acc = axpy(&acc, *coef, &v);
            }
            acc.iter().fold(0.0f64, |m, e| m.max(e.1.norm()))
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationResidual {
    pub family: String,
    pub label: String,
    pub residual: f64,
}

/// Outcome of a relation check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub tolerance: f64,
    pub columns_checked: usize,
    pub max_residual: f64,
    pub passed: bool,
    pub relations: Vec<RelationResidual>,
}

impl RelationReport {
    /// Largest residual per family, in first-seen order.
    pub fn by_family(&self) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = Vec::new();
        for r in &self.relations {
            match out.iter_mut().find(|e| e.0 == r.family) {
                Some(e) => e.1 = e.1.max(r.residual),
                None => out.push((r.family.clone(), r.residual)),
            }
        }
        out
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationResidual> {
        self.relations.iter().filter(move |r| !(r.residual < self.tolerance))
    }
}

/// Evaluate `relations` on the unit vectors `columns`.
pub fn check_relations(
    gens: &GeneratorSet,
    relations: &[Relation],
    columns: &[usize],
    tol: f64,
) -> Result<RelationReport> {
    if columns.iter().any(|&c| c >= gens.dim()) {
        return Err(Error::Index("relation column outside the basis".into()));
    }
    let relations: Vec<RelationResidual> = relations
        .par_iter()
        .map(|rel| RelationResidual {
            family: rel.family.to_string(),
            label: rel.label.clone(),
            residual: relation_residual(gens, rel, columns),
        })
        .collect();
    let max_residual = relations.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(RelationReport {
        tolerance: tol,
        columns_checked: columns.len(),
        max_residual,
        passed: max_residual < tol && relations.iter().all(|r| r.residual.is_finite()),
        relations,
    })
}

/// All relations of `U_q(gl_N)` on every basis vector.
pub fn verify_relations(gens: &GeneratorSet, q: &QParam, tol: f64) -> Result<RelationReport> {
    let columns: Vec<usize> = (0..gens.dim()).collect();
    check_relations(gens, &gl_relations(gens.rank(), q), &columns, tol)
}
