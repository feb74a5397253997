//! Hermitian-adjoint pairs, the classes of irreducible constituents that are
//! equivalent to `*`-representations, explicit sign scans of the invariant
//! form, and the two sign twists producing further `*`-representations.
//!
//! The real form is `U_q(u_{n,1})`: `k^* = k`, `e_n^* = -f_n`, and
//! `e_i^* = f_i` for `i < n`. A representation is `*` for the standard
//! scalar product when `T(a^*) = T(a)^H` for every generator.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intertwine::intertwiner_between;
use crate::operator::{Gen, GeneratorSet, SparseOperator};
use crate::principal::PrincipalParams;
use crate::relations::{check_relations, gl_relations, RelationReport};
use crate::scalar::{QExponent, QParam};
use crate::structure::{
    canonicalize, constituent_weights, rewrite_step, ConstituentKind, ConstituentLabel,
};
use crate::tableau::{principal_weights_in, HighestWeight, WeightBox, Window};

/// `(m, conj c2, conj c1)`, the parameters of the Hermitian-adjoint
/// representation.
pub fn hermitian_adjoint(params: &PrincipalParams) -> PrincipalParams {
    PrincipalParams::from_exponents(params.m().clone(), params.c2().conj(), params.c1().conj())
        .expect("conjugation keeps the sum an integer")
}

/// `a^*` as a sign and a generator, for `U_q(u_{p, rank - p})`.
pub fn star_of(g: Gen, p: usize) -> (f64, Gen) {
    match g {
        Gen::K(_) | Gen::KInv(_) => (1.0, g),
        Gen::E(i) => (if i == p { -1.0 } else { 1.0 }, Gen::F(i)),
        Gen::F(i) => (if i == p { -1.0 } else { 1.0 }, Gen::E(i)),
    }
}

/// Largest entry of `T'(a) - T(a^*)^H` over all generators, relative to the
/// largest entry involved; zero means `T` and `T'` are Hermitian-adjoint.
///
/// The noncompact index is the last ladder, `p = rank - 1`.
pub fn adjointness_residual(t: &GeneratorSet, t_prime: &GeneratorSet) -> Result<f64> {
    if t.rank() != t_prime.rank() || t.dim() != t_prime.dim() {
        return Err(Error::DimensionMismatch("adjointness needs equal shapes".into()));
    }
    let p = t.rank() - 1;
    let mut worst = 0.0f64;
    for g in t.generators() {
        let (sign, gs) = star_of(g, p);
        let lhs = t.get(gs).adjoint().scaled(Complex64::new(sign, 0.0));
        let rhs = t_prime.get(g);
        let scale = max_entry(&lhs).max(max_entry(rhs));
        if scale > 0.0 {
            worst = worst.max(lhs.max_abs_diff(rhs)? / scale);
        }
    }
    Ok(worst)
}

fn max_entry(op: &SparseOperator) -> f64 {
    op.triplets().iter().fold(0.0, |m, t| m.max(t.2.norm()))
}

/// `T(a^*) = T(a)^H` residual.
pub fn star_condition_residual(gens: &GeneratorSet) -> Result<f64> {
    adjointness_residual(gens, gens)
}

/// Unitary class of a `*`-constituent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StarClass {
    /// `c1 = conj c2`.
    PrincipalStar,
    /// `Im c1 = -Im c2 = pi/2h`.
    Strange,
    /// Real `c1`, `c2` within distance 1 of a dense chain of `l`'s.
    Supplementary,
    /// `R^{ij}_-`.
    D,
    /// `R^{ij}_+`.
    E,
    /// `Rtilde^{ij}_+`.
    F,
    /// `Rtilde^{ij}_-`.
    G,
    /// `R^i_\pm(m, c, c)`.
    H,
    NotStar,
}

impl fmt::Display for StarClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitaryClass {
    pub class: StarClass,
    /// The chain or condition that decided membership.
    pub witness: String,
}

impl UnitaryClass {
    fn new(class: StarClass, witness: impl Into<String>) -> Self {
        Self {
            class,
            witness: witness.into(),
        }
    }

    pub fn is_star(&self) -> bool {
        self.class != StarClass::NotStar
    }
}

/// Consecutive entries drop by exactly 1.
pub fn is_dense(chain: &[i64]) -> bool {
    chain.windows(2).all(|w| w[1] == w[0] - 1)
}

fn show(chain: &[i64]) -> String {
    let s: Vec<String> = chain.iter().map(|x| x.to_string()).collect();
    format!("({})", s.join(", "))
}

/// `l_a, ..., l_b` (1-based, inclusive; empty when `a > b`).
fn l_range(l: &[i64], a: usize, b: usize) -> Vec<i64> {
    if a > b {
        return Vec::new();
    }
    l[a - 1..b].to_vec()
}

const CLOSE: f64 = 1e-9;

/// Classify parameters of a full principal series representation.
pub fn unitary_class_params(params: &PrincipalParams, q: &QParam) -> Result<UnitaryClass> {
    let (p, shift) = canonicalize(params, q)?;
    let (c1, c2) = (p.c1().value(), p.c2().value());
    if (c1 - c2.conj()).norm() < CLOSE {
        return Ok(UnitaryClass::new(StarClass::PrincipalStar, format!("c1 = conj c2 (shift {shift})")));
    }
    let half = q.half_period() / 2.0;
    if (c1.im - half).abs() < CLOSE && (c2.im + half).abs() < CLOSE {
        return Ok(UnitaryClass::new(StarClass::Strange, format!("Im c1 = pi/2h = {half}")));
    }
    if c1.im.abs() < CLOSE && c2.im.abs() < CLOSE {
        let l = p.l();
        let k = l.len();
        for r in 1..=k {
            for s in 1..=k {
                if (l[r - 1] as f64 - c1.re).abs() >= 1.0 || (l[s - 1] as f64 - c2.re).abs() >= 1.0 {
                    continue;
                }
                let chain = if c1.re > c2.re && r <= s {
                    l_range(&l, r, s)
                } else if c1.re < c2.re && s <= r {
                    l_range(&l, s, r)
                } else {
                    continue;
                };
                if is_dense(&chain) {
                    return Ok(UnitaryClass::new(
                        StarClass::Supplementary,
                        format!("r={r} s={s} chain {}", show(&chain)),
                    ));
                }
            }
        }
    }
    Ok(UnitaryClass::new(StarClass::NotStar, "no condition holds"))
}

/// Classify a constituent. `Rhat` and `Rbreve` are first renamed by the
/// decomposition equivalences; full representations go through
/// [`unitary_class_params`].
pub fn unitary_class_label(label: &ConstituentLabel, q: &QParam) -> Result<UnitaryClass> {
    use ConstituentKind::*;
    let l = &label.l;
    let ls = l.l();
    let (c1, c2) = (l.c1(), l.c2());
    let dense = |chain: Vec<i64>, class: StarClass| {
        if is_dense(&chain) {
            UnitaryClass::new(class, format!("dense {}", show(&chain)))
        } else {
            UnitaryClass::new(StarClass::NotStar, format!("{} not dense", show(&chain)))
        }
    };
    Ok(match label.kind {
        Hat { .. } | Breve { .. } => match rewrite_step(label)? {
            Some((_, renamed)) => unitary_class_label(&renamed, q)?,
            None => UnitaryClass::new(StarClass::NotStar, "no equivalent labelled form"),
        },
        FiniteDim { .. } => UnitaryClass::new(StarClass::NotStar, "finite dimensional"),
        Full => unitary_class_params(&label.params(), q)?,
        PlusSingle { .. } | MinusSingle { .. } => UnitaryClass::new(StarClass::H, "c1 = c2"),
        Minus { r, s } if c1 > c2 => {
            if r == s {
                UnitaryClass::new(StarClass::D, "i = j")
            } else {
                let mut chain = vec![c1];
                chain.extend(l_range(ls, r, s - 1));
                dense(chain, StarClass::D)
            }
        }
        Plus { r, s } if c1 > c2 => {
            if r == s {
                UnitaryClass::new(StarClass::E, "i = j")
            } else {
                let mut chain = l_range(ls, r, s - 1);
                chain.push(c2);
                dense(chain, StarClass::E)
            }
        }
        TildePlus { r, s } => {
            if r < s {
                let mut chain = l_range(ls, r, s - 1);
                chain.push(c2);
                dense(chain, StarClass::F)
            } else {
                dense(l_range(ls, s, r), StarClass::F)
            }
        }
        TildeMinus { r, s } => {
            if r < s {
                dense(l_range(ls, r, s - 1), StarClass::G)
            } else {
                let mut chain = vec![c2];
                chain.extend(l_range(ls, s, r));
                dense(chain, StarClass::G)
            }
        }
        Minus { .. } | Plus { .. } => UnitaryClass::new(StarClass::NotStar, "c1 <= c2"),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormSign {
    Positive,
    Negative,
    Indefinite,
}

/// Signs of the diagonal of `Q` on the sampled weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub sign: FormSign,
    /// Half-width of the window that was scanned.
    pub window: u32,
    pub weights: Vec<HighestWeight>,
    pub values: Vec<Complex64>,
    /// Largest `|Im Q| / |Q|`; a Hermitian `Q` has real entries.
    pub max_imaginary: f64,
}

impl PositivityReport {
    fn from_values(window: u32, weights: Vec<HighestWeight>, values: Vec<Complex64>) -> Self {
        let max_imaginary = values
            .iter()
            .map(|v| if v.norm() > 0.0 { v.im.abs() / v.norm() } else { 0.0 })
            .fold(0.0, f64::max);
        let real = max_imaginary < 1e-9;
        let sign = if real && values.iter().all(|v| v.re > 0.0) {
            FormSign::Positive
        } else if real && values.iter().all(|v| v.re < 0.0) {
            FormSign::Negative
        } else {
            FormSign::Indefinite
        };
        Self {
            sign,
            window,
            weights,
            values,
            max_imaginary,
        }
    }

    /// Weights where `Q` changes sign relative to the first one.
    pub fn sign_changes(&self) -> Vec<&HighestWeight> {
        let Some(first) = self.values.first() else {
            return Vec::new();
        };
        self.weights
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| v.re * first.re <= 0.0)
            .map(|(w, _)| w)
            .collect()
    }
}

/// Diagonal of the intertwiner toward the Hermitian-adjoint parameters over
/// the window, pinned to 1 at the smallest weight.
///
/// `c1 = conj c2` gives `Q = 1` without computation.
pub fn verify_form_positivity_params(
    params: &PrincipalParams,
    window: &Window,
    q: &QParam,
) -> Result<PositivityReport> {
    let (p, _) = canonicalize(params, q)?;
    let bounds = window.bounds(p.m());
    let adj = hermitian_adjoint(&p);
    let width = window.upper.max(window.lower);
    if (p.c1().value() - adj.c1().value()).norm() < CLOSE {
        let weights = principal_weights_in(p.m(), bounds);
        let values = vec![Complex64::new(1.0, 0.0); weights.len()];
        return Ok(PositivityReport::from_values(width, weights, values));
    }
    let q_op = intertwiner_between(&p, &adj, bounds, q).map_err(|e| match e {
        Error::InconsistentLoop { .. } | Error::VanishingFactor { .. } => Error::NotComparable,
        other => other,
    })?;
    Ok(PositivityReport::from_values(width, q_op.weights, q_op.values))
}

/// `Q(w^{+s}) / Q(w)` between the realization with `(c1, c2)` and its
/// Hermitian adjoint, `conj[l - c2] / [l - c1]` with `l = l_{sn}(w)`.
fn form_ratio(l: i64, c1: QExponent, c2: QExponent, q: &QParam) -> Result<Complex64> {
    let l = QExponent::integer(l);
    let den = q.qn_exponent(l - c1);
    let num = q.qn_exponent(l - c2).conj();
    if den.norm() == 0.0 || num.norm() == 0.0 {
        return Err(Error::NotComparable);
    }
    Ok(num / den)
}

/// Sign scan of `Q` restricted to the carrier of `label`.
///
/// On the carrier, `Q` is the equivalence between the constituent and its
/// copy in the Hermitian-adjoint representation; it is propagated along
/// `e_n` steps that stay inside the carrier.
pub fn verify_form_positivity_label(
    label: &ConstituentLabel,
    window: &Window,
    q: &QParam,
) -> Result<PositivityReport> {
    let width = window.upper.max(window.lower);
    if let ConstituentKind::Full = label.kind {
        return verify_form_positivity_params(&label.params(), window, q);
    }
    if let ConstituentKind::FiniteDim { .. } = label.kind {
        return Err(Error::NotComparable);
    }
    let params = label.params();
    let bounds: WeightBox = window.bounds(params.m());
    let weights = constituent_weights(label, bounds);
    if weights.is_empty() {
        return Err(Error::EmptyInterior);
    }
    let index: HashMap<&[i64], usize> = weights.iter().enumerate().map(|(i, w)| (w.entries(), i)).collect();
    let (c1, c2) = (params.c1(), params.c2());
    let n = params.n();
    let mut values: Vec<Option<Complex64>> = vec![None; weights.len()];
    values[0] = Some(Complex64::new(1.0, 0.0));
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let mn = weights[i].entries().to_vec();
        for s in 1..=n {
            for delta in [1i64, -1] {
                let mut t = mn.clone();
                t[s - 1] += delta;
                let Some(&j) = index.get(t.as_slice()) else { continue };
                if values[j].is_some() {
                    continue;
                }
                let lower = if delta == 1 { &mn } else { &t };
                let ratio = form_ratio(lower[s - 1] - s as i64, c1, c2, q)?;
                let v = values[i].expect("queued");
                values[j] = Some(if delta == 1 { v * ratio } else { v / ratio });
                queue.push_back(j);
            }
        }
    }
    let values: Vec<Complex64> = values
        .into_iter()
        .map(|v| v.ok_or_else(|| Error::Consistency("carrier is disconnected".into())))
        .collect::<Result<_>>()?;
    Ok(PositivityReport::from_values(width, weights, values))
}

/// The two sign twists producing further `*`-representations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Twist {
    /// Negate every `k_j^{\pm 1}`.
    KSign,
    /// Negate `k_{n+1}^{\pm 1}` and `f_n` of a finite dimensional
    /// `U_q(gl_{n+1})` representation.
    FiniteDim,
}

pub fn twist_representation(gens: &GeneratorSet, twist: Twist) -> GeneratorSet {
    let minus = Complex64::new(-1.0, 0.0);
    let mut out = gens.clone();
    let rank = gens.rank();
    let flipped: Vec<Gen> = match twist {
        Twist::KSign => (1..=rank).flat_map(|j| [Gen::K(j), Gen::KInv(j)]).collect(),
        Twist::FiniteDim => vec![Gen::K(rank), Gen::KInv(rank), Gen::F(rank - 1)],
    };
    for g in flipped {
        let op = out.get_mut(g);
        *op = op.scaled(minus);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarReport {
    pub relations: RelationReport,
    pub star_residual: f64,
    pub passed: bool,
}

/// Relation suite on `columns` plus the `*`-conditions.
pub fn verify_star(gens: &GeneratorSet, columns: &[usize], q: &QParam, tol: f64) -> Result<StarReport> {
    let relations = check_relations(gens, &gl_relations(gens.rank(), q), columns, tol)?;
    let star_residual = star_condition_residual(gens)?;
    Ok(StarReport {
        passed: relations.passed && star_residual < tol,
        relations,
        star_residual,
    })
}

/// `Im c1` that certifies the strange series at `q`; it grows like
/// `pi / (2 ln q)` as `q -> 1`.
pub fn strange_imaginary_part(q: &QParam) -> f64 {
    q.half_period() / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compact::build_compact_rep;
    use crate::principal::build_principal;
    use crate::structure::LVector;

    fn hw(v: &[i64]) -> HighestWeight {
        HighestWeight::new(v.to_vec()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn adjoint_is_involution() {
        let p = PrincipalParams::new(hw(&[1, 0]), c(0.3, 0.4), c(0.7, -0.4)).unwrap();
        assert_eq!(hermitian_adjoint(&hermitian_adjoint(&p)), p);
        let p = PrincipalParams::new(hw(&[0]), c(0.5, 0.2), c(0.5, -0.2)).unwrap();
        assert_eq!(hermitian_adjoint(&p), p);
    }

    #[test]
    fn principal_star_example() {
        let q = QParam::new(1.3).unwrap();
        let p = PrincipalParams::new(hw(&[0]), c(0.5, 0.7), c(0.5, -0.7)).unwrap();
        assert_eq!(unitary_class_params(&p, &q).unwrap().class, StarClass::PrincipalStar);
        let rep = build_principal(&p, &Window::symmetric(4), &q).unwrap();
        assert!(star_condition_residual(&rep.gens).unwrap() < 1e-12);
    }

    #[test]
    fn supplementary_example() {
        let q = QParam::new(1.3).unwrap();
        let p = PrincipalParams::new(hw(&[0]), c(-1.7, 0.0), c(-2.3, 0.0)).unwrap();
        let cls = unitary_class_params(&p, &q).unwrap();
        assert_eq!(cls.class, StarClass::Supplementary, "{}", cls.witness);
        let rep = verify_form_positivity_params(&p, &Window::symmetric(6), &q).unwrap();
        assert_eq!(rep.sign, FormSign::Positive);
    }

    #[test]
    fn case4_is_class_h() {
        let q = QParam::new(1.3).unwrap();
        let l = LVector::new(vec![-2, 1, 1]).unwrap();
        for kind in [ConstituentKind::PlusSingle { r: 1 }, ConstituentKind::MinusSingle { r: 1 }] {
            let label = ConstituentLabel::new(kind, l.clone());
            assert_eq!(unitary_class_label(&label, &q).unwrap().class, StarClass::H);
        }
    }

    #[test]
    fn twist_twice_is_identity() {
        let q = QParam::new(1.3).unwrap();
        let rep = build_compact_rep(&hw(&[1, 0, 0]), &q).unwrap();
        for t in [Twist::KSign, Twist::FiniteDim] {
            assert_eq!(twist_representation(&twist_representation(&rep.gens, t), t), rep.gens);
        }
    }

    #[test]
    fn finite_dim_twist_is_star() {
        let q = QParam::new(1.3).unwrap();
        let rep = build_compact_rep(&hw(&[1, 0, 0]), &q).unwrap();
        // untwisted: compact form, not the noncompact one
        assert!(star_condition_residual(&rep.gens).unwrap() > 0.5);
        let t = twist_representation(&rep.gens, Twist::FiniteDim);
        let cols: Vec<usize> = (0..t.dim()).collect();
        let report = verify_star(&t, &cols, &q, 1e-12).unwrap();
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn dense_chains() {
        assert!(is_dense(&[3, 2, 1]));
        assert!(is_dense(&[5]));
        assert!(!is_dense(&[3, 1]));
    }
}
