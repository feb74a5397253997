//! Reducibility of the principal series at integer points: case
//! classification, constituent lattices, carrier weight sets, and the
//! equivalences between constituents.
//!
//! Everything is phrased through the vector `L = (l_1, ..., l_{n-1}, c1, c2)`
//! with `l_i = m_i - i - 1`, and the transpositions `s_{ik}` acting on it.
//! The weight sets come from the projectors `E^-_c` (`l_{in} <= c`) and
//! `E^+_c` (`l_{in} > c`), where `i` is the interval `l_{i-1} > c > l_i`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{sub, GeneratorSet, SparseOperator};
use crate::principal::{build_principal_in, PrincipalParams, WindowedRep};
use crate::scalar::{QParam, INTEGER_SNAP};
use crate::tableau::{gt_dimension, principal_weights_in, satisfies_principal, HighestWeight, WeightBox, Window};

/// `(l_1, ..., l_{n-1}, c1, c2)`, all integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct LVector(Vec<i64>);

impl TryFrom<Vec<i64>> for LVector {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LVector> for Vec<i64> {
    fn from(l: LVector) -> Self {
        l.0
    }
}

impl LVector {
    /// Checks that the `l` part is strictly decreasing.
    pub fn new(values: Vec<i64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParameter(format!("L needs at least c1 and c2, got {values:?}")));
        }
        let n = values.len() - 1;
        if values[..n - 1].windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidParameter(format!("l part of {values:?} is not strictly decreasing")));
        }
        Ok(Self(values))
    }

    pub fn from_params(p: &PrincipalParams) -> Result<Self> {
        let (c1, c2) = p
            .integer_point()
            .ok_or_else(|| Error::NonIntegerPoint(format!("{}, {}", p.c1(), p.c2())))?;
        let mut v = p.l();
        v.push(c1);
        v.push(c2);
        Self::new(v)
    }

    /// The `n` of `U_q(u_{n,1})`.
    pub fn n(&self) -> usize {
        self.0.len() - 1
    }

    /// Entry at 1-based position `i` (`n` is `c1`, `n+1` is `c2`).
    pub fn get(&self, i: usize) -> i64 {
        self.0[i - 1]
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn l(&self) -> &[i64] {
        &self.0[..self.n() - 1]
    }

    pub fn c1(&self) -> i64 {
        self.0[self.n() - 1]
    }

    pub fn c2(&self) -> i64 {
        self.0[self.n()]
    }

    /// `s_{ik} L`.
    pub fn swap(&self, i: usize, k: usize) -> Result<Self> {
        let len = self.0.len();
        if i == 0 || k == 0 || i > len || k > len {
            return Err(Error::Index(format!("s_{{{i},{k}}} on L of length {len}")));
        }
        let mut v = self.0.clone();
        v.swap(i - 1, k - 1);
        Self::new(v)
    }

    /// `m_j = l_j + j + 1`.
    pub fn m(&self) -> HighestWeight {
        let m = self.l().iter().enumerate().map(|(j, &l)| l + j as i64 + 2).collect();
        HighestWeight::new(m).expect("strictly decreasing l gives a non-increasing m")
    }

    pub fn params(&self) -> PrincipalParams {
        PrincipalParams::integer(self.m(), self.c1(), self.c2())
    }

    pub fn placement(&self, c: i64) -> Placement {
        placement(self.l(), c)
    }
}

impl fmt::Display for LVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l: Vec<String> = self.l().iter().map(|x| x.to_string()).collect();
        write!(f, "({}; {}, {})", l.join(", "), self.c1(), self.c2())
    }
}

/// Where an integer sits among `l_0 = +inf > l_1 > ... > l_{n-1} > l_n = -inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Placement {
    /// `l_{i-1} > c > l_i`.
    Interval(usize),
    /// `c = l_i`.
    At(usize),
}

pub fn placement(l: &[i64], c: i64) -> Placement {
    if let Some(i) = l.iter().position(|&x| x == c) {
        return Placement::At(i + 1);
    }
    Placement::Interval(l.iter().take_while(|&&x| x > c).count() + 1)
}

/// `l_{in} = m_{in} - i`, 1-based `i`.
fn l_in(mn: &[i64], i: usize) -> i64 {
    mn[i - 1] - i as i64
}

/// Membership in `E^-_c` (`minus = true`) or `E^+_c`; `None` if `c` is not
/// inside an interval.
pub fn projector_contains(l: &[i64], c: i64, minus: bool, mn: &[i64]) -> Option<bool> {
    match placement(l, c) {
        Placement::Interval(i) => {
            let below = l_in(mn, i) <= c;
            Some(below == minus)
        }
        Placement::At(_) => None,
    }
}

/// Reducibility type of `T_{m,c1,c2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case")]
pub enum Case {
    IrreducibleGeneric,
    /// `c1 = l_r`, `c2 = l_s`.
    IrreducibleSpecial { r: usize, s: usize },
    /// `l_{r-1} > c1 > l_r`, `l_{s-1} > c2 > l_s`, `r < s`.
    Case1 { r: usize, s: usize },
    /// `l_{r-1} > c1 > c2 > l_r`.
    Case2 { r: usize },
    /// `c1 = l_r`, `l_{s-1} > c2 > l_s`.
    Case3 { r: usize, s: usize },
    /// `c1 = c2` inside interval `r`.
    Case4 { r: usize },
    /// `(c2, c1)` is `Case1 { r, s }`.
    SwappedCase1 { r: usize, s: usize },
    /// `(c2, c1)` is `Case2 { r }`.
    SwappedCase2 { r: usize },
    /// `(c2, c1)` is `Case3 { r, s }`, i.e. `c2 = l_r`.
    SwappedCase3 { r: usize, s: usize },
}

impl Case {
    pub fn is_reducible(&self) -> bool {
        !matches!(self, Case::IrreducibleGeneric | Case::IrreducibleSpecial { .. })
    }

    pub fn is_swapped(&self) -> bool {
        matches!(
            self,
            Case::SwappedCase1 { .. } | Case::SwappedCase2 { .. } | Case::SwappedCase3 { .. }
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            Case::IrreducibleGeneric => "IrreducibleGeneric",
            Case::IrreducibleSpecial { .. } => "IrreducibleSpecial",
            Case::Case1 { .. } => "Case1",
            Case::Case2 { .. } => "Case2",
            Case::Case3 { .. } => "Case3",
            Case::Case4 { .. } => "Case4",
            Case::SwappedCase1 { .. } => "SwappedCase1",
            Case::SwappedCase2 { .. } => "SwappedCase2",
            Case::SwappedCase3 { .. } => "SwappedCase3",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Case::IrreducibleGeneric => write!(f, "IrreducibleGeneric"),
            Case::IrreducibleSpecial { r, s }
            | Case::Case1 { r, s }
            | Case::Case3 { r, s }
            | Case::SwappedCase1 { r, s }
            | Case::SwappedCase3 { r, s } => write!(f, "{} r={r} s={s}", self.name()),
            Case::Case2 { r } | Case::Case4 { r } | Case::SwappedCase2 { r } => write!(f, "{} r={r}", self.name()),
        }
    }
}

/// Case of an integer `L`, without the swap step.
fn integer_case(l: &[i64], c1: i64, c2: i64) -> Case {
    use Placement::*;
    match (placement(l, c1), placement(l, c2)) {
        (At(r), At(s)) => Case::IrreducibleSpecial { r, s },
        (At(r), Interval(s)) => Case::Case3 { r, s },
        (Interval(s), At(r)) => Case::SwappedCase3 { r, s },
        (Interval(r), Interval(s)) if r < s => Case::Case1 { r, s },
        (Interval(s), Interval(r)) if r < s => Case::SwappedCase1 { r, s },
        (Interval(r), Interval(_)) if c1 > c2 => Case::Case2 { r },
        (Interval(r), Interval(_)) if c1 < c2 => Case::SwappedCase2 { r },
        (Interval(r), Interval(_)) => Case::Case4 { r },
    }
}

/// Result of [`classify`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub case: Case,
    /// Parameters after moving `Im c1` into `(-pi/2h, pi/2h]`.
    pub canonical: PrincipalParams,
    /// `k` in `c1 -> c1 - i k pi/h`, `c2 -> c2 + i k pi/h`.
    pub shift: i64,
}

/// Move `Im c1` into `(-pi/2h, pi/2h]` with the equivalence
/// `T(c1, c2) ~ T(c1 + i pi/h, c2 - i pi/h)`.
pub fn canonicalize(params: &PrincipalParams, q: &QParam) -> Result<(PrincipalParams, i64)> {
    let period = q.half_period();
    let ratio = params.c1().value().im / period;
    // snap half-integers so that +pi/2h stays put
    let x = ratio - 0.5;
    let snapped = if (x - x.round()).abs() < INTEGER_SNAP { x.round() } else { x };
    let k = snapped.ceil() as i64;
    if k == 0 {
        return Ok((params.clone(), 0));
    }
    let shift = Complex64::new(0.0, k as f64 * period);
    let p = PrincipalParams::new(
        params.m().clone(),
        params.c1().value() - shift,
        params.c2().value() + shift,
    )?;
    Ok((p, k))
}

pub fn classify(params: &PrincipalParams, q: &QParam) -> Result<Classification> {
    let (canonical, shift) = canonicalize(params, q)?;
    let case = match canonical.integer_point() {
        None => Case::IrreducibleGeneric,
        Some((c1, c2)) => integer_case(&canonical.l(), c1, c2),
    };
    Ok(Classification { case, canonical, shift })
}

/// Kind of an irreducible constituent; the indices follow the case
/// conditions on its own `L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ConstituentKind {
    /// Subrepresentation `E^-_{c1} E^+_{c2}` of Cases 1 and 2.
    Hat { r: usize, s: usize },
    /// `E^-_{c1} E^-_{c2}`.
    Minus { r: usize, s: usize },
    /// `E^+_{c1} E^+_{c2}`.
    Plus { r: usize, s: usize },
    /// Top quotient `E^+_{c1} E^-_{c2}` of Case 1.
    Breve { r: usize, s: usize },
    /// Case 3 quotient, the complement of `E^+_{c2}`.
    TildeMinus { r: usize, s: usize },
    /// Case 3 subrepresentation `E^+_{c2}`.
    TildePlus { r: usize, s: usize },
    /// Case 4 summand `E^+_c`.
    PlusSingle { r: usize },
    /// Case 4 summand `E^-_c`.
    MinusSingle { r: usize },
    /// Finite dimensional `T_{m_{n+1}}`.
    FiniteDim { weight: HighestWeight },
    /// The whole (irreducible) `T_{m,c1,c2}`.
    Full,
}

/// A constituent `R(L)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConstituentLabel {
    pub kind: ConstituentKind,
    pub l: LVector,
}

impl ConstituentLabel {
    pub fn new(kind: ConstituentKind, l: LVector) -> Self {
        Self { kind, l }
    }

    /// Whether the kind's index conditions hold for `L`.
    pub fn is_valid(&self) -> bool {
        use ConstituentKind::*;
        use Placement::*;
        let (p1, p2) = (self.l.placement(self.l.c1()), self.l.placement(self.l.c2()));
        let (c1, c2) = (self.l.c1(), self.l.c2());
        match &self.kind {
            Hat { r, s } | Minus { r, s } | Plus { r, s } => {
                p1 == Interval(*r) && p2 == Interval(*s) && (r < s || (r == s && c1 > c2))
            }
            Breve { r, s } => p1 == Interval(*r) && p2 == Interval(*s) && r < s,
            TildeMinus { r, s } | TildePlus { r, s } => p1 == At(*r) && p2 == Interval(*s),
            PlusSingle { r } | MinusSingle { r } => c1 == c2 && p1 == Interval(*r),
            FiniteDim { weight } => weight.len() == self.l.n() + 1,
            Full => !integer_case(self.l.l(), c1, c2).is_reducible(),
        }
    }

    /// Whether the principal weight `mn` belongs to the carrier.
    pub fn contains(&self, mn: &[i64]) -> bool {
        use ConstituentKind::*;
        if let FiniteDim { weight } = &self.kind {
            return satisfies_principal(mn, weight.entries()) && mn.len() + 1 == weight.len();
        }
        if !satisfies_principal(self.l.m().entries(), mn) {
            return false;
        }
        let l = self.l.l();
        let (c1, c2) = (self.l.c1(), self.l.c2());
        let e = |c: i64, minus: bool| projector_contains(l, c, minus, mn).unwrap_or(false);
        match &self.kind {
            Hat { .. } => e(c1, true) && e(c2, false),
            Minus { .. } => e(c1, true) && e(c2, true),
            Plus { .. } => e(c1, false) && e(c2, false),
            Breve { .. } => e(c1, false) && e(c2, true),
            TildeMinus { .. } => !e(c2, false),
            TildePlus { .. } => e(c2, false),
            PlusSingle { .. } => e(c1, false),
            MinusSingle { .. } => e(c1, true),
            FiniteDim { .. } => unreachable!(),
            Full => true,
        }
    }

    /// The representation whose basis carries the constituent.
    pub fn params(&self) -> PrincipalParams {
        self.l.params()
    }
}

impl fmt::Display for ConstituentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ConstituentKind::*;
        match &self.kind {
            Hat { r, s } => write!(f, "Rhat^{{{r},{s}}}{}", self.l),
            Minus { r, s } => write!(f, "R-^{{{r},{s}}}{}", self.l),
            Plus { r, s } => write!(f, "R+^{{{r},{s}}}{}", self.l),
            Breve { r, s } => write!(f, "Rbreve^{{{r},{s}}}{}", self.l),
            TildeMinus { r, s } => write!(f, "Rtilde-^{{{r},{s}}}{}", self.l),
            TildePlus { r, s } => write!(f, "Rtilde+^{{{r},{s}}}{}", self.l),
            PlusSingle { r } => write!(f, "R+^{{{r}}}{}", self.l),
            MinusSingle { r } => write!(f, "R-^{{{r}}}{}", self.l),
            FiniteDim { weight } => write!(f, "T_fin{weight}"),
            Full => write!(f, "T{}", self.l),
        }
    }
}

/// Carrier weights of `label` inside `bounds`, lexicographically.
pub fn constituent_weights(label: &ConstituentLabel, bounds: WeightBox) -> Vec<HighestWeight> {
    let m = match &label.kind {
        ConstituentKind::FiniteDim { .. } => label.l.m(),
        _ => label.l.m(),
    };
    match &label.kind {
        ConstituentKind::FiniteDim { weight } => crate::tableau::branching(weight)
            .into_iter()
            .filter(|w| bounds.contains(w.entries()))
            .collect(),
        _ => principal_weights_in(&m, bounds)
            .into_iter()
            .filter(|w| label.contains(w.entries()))
            .collect(),
    }
}

/// Highest weight `(c1 + 1, l_1 + 2, ..., l_{n-1} + n, c2 + n + 1)` of the
/// finite dimensional constituent of Case 1 with `r = 1`, `s = n`.
pub fn finite_dim_weight(l: &LVector) -> Result<HighestWeight> {
    let n = l.n() as i64;
    let mut w = vec![l.c1() + 1];
    w.extend(l.l().iter().enumerate().map(|(i, &x)| x + i as i64 + 2));
    w.push(l.c2() + n + 1);
    HighestWeight::new(w)
}

/// A node of a [`Lattice`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeNode {
    /// The name used in the decomposition.
    pub label: ConstituentLabel,
    /// The same constituent as a subquotient of the decomposed
    /// representation; its weight predicate gives the carrier.
    pub carrier: ConstituentLabel,
}

/// Composition structure: `(a, b)` in `edges` means `a -> b`, i.e. `b` is
/// a subrepresentation and `a` sits on a quotient above it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub params: PrincipalParams,
    pub case: Case,
    pub nodes: Vec<LatticeNode>,
    pub edges: Vec<(usize, usize)>,
    /// Groups of nodes forming a direct sum.
    pub sums: Vec<Vec<usize>>,
}

fn node(label: ConstituentLabel) -> LatticeNode {
    LatticeNode {
        carrier: label.clone(),
        label,
    }
}

/// Name of `Rhat` as it appears at the bottom of a Case 1 or 2 chain.
fn hat_name(l: &LVector, r: usize, s: usize) -> Result<ConstituentLabel> {
    let hat = ConstituentLabel::new(ConstituentKind::Hat { r, s }, l.clone());
    Ok(match hat_rule(&hat)? {
        Some((_, label)) => label,
        None => hat,
    })
}

fn unswapped_lattice(l: &LVector, case: Case) -> Result<(Vec<LatticeNode>, Vec<(usize, usize)>, Vec<Vec<usize>>)> {
    use ConstituentKind::*;
    let n = l.n();
    let lab = |kind| ConstituentLabel::new(kind, l.clone());
    Ok(match case {
        Case::Case1 { r, s } => {
            let head = LatticeNode {
                label: ConstituentLabel::new(Minus { r: r + 1, s }, l.swap(r, n)?),
                carrier: lab(Breve { r, s }),
            };
            let tail = LatticeNode {
                label: hat_name(l, r, s)?,
                carrier: lab(Hat { r, s }),
            };
            (
                vec![head, node(lab(Minus { r, s })), node(lab(Plus { r, s })), tail],
                vec![(0, 1), (0, 2), (1, 3), (2, 3)],
                vec![vec![1, 2]],
            )
        }
        Case::Case2 { r } => {
            let tail = LatticeNode {
                label: hat_name(l, r, r)?,
                carrier: lab(Hat { r, s: r }),
            };
            (
                vec![node(lab(Minus { r, s: r })), node(lab(Plus { r, s: r })), tail],
                vec![(0, 2), (1, 2)],
                vec![vec![0, 1]],
            )
        }
        Case::Case3 { r, s } => (
            vec![node(lab(TildeMinus { r, s })), node(lab(TildePlus { r, s }))],
            vec![(0, 1)],
            vec![],
        ),
        Case::Case4 { r } => (
            vec![node(lab(PlusSingle { r })), node(lab(MinusSingle { r }))],
            vec![],
            vec![vec![0, 1]],
        ),
        _ => return Err(Error::Irreducible),
    })
}

/// The constituents of a reducible `T_{m,c1,c2}` and how they are stacked.
///
/// For the swapped cases the lattice of `(c2, c1)` is reused with every
/// arrow reversed; carriers keep their predicates, which only depend on `m`.
pub fn decompose(params: &PrincipalParams, q: &QParam) -> Result<Lattice> {
    let cls = classify(params, q)?;
    if !cls.case.is_reducible() {
        return Err(Error::Irreducible);
    }
    let l = LVector::from_params(&cls.canonical)?;
    let (nodes, edges, sums) = match cls.case {
        Case::SwappedCase1 { r, s } => {
            let (nodes, edges, sums) = unswapped_lattice(&l.swap(l.n(), l.n() + 1)?, Case::Case1 { r, s })?;
            (nodes, edges.into_iter().map(|(a, b)| (b, a)).collect(), sums)
        }
        Case::SwappedCase2 { r } => {
            let (nodes, edges, sums) = unswapped_lattice(&l.swap(l.n(), l.n() + 1)?, Case::Case2 { r })?;
            (nodes, edges.into_iter().map(|(a, b)| (b, a)).collect(), sums)
        }
        Case::SwappedCase3 { r, s } => {
            let (nodes, edges, sums) = unswapped_lattice(&l.swap(l.n(), l.n() + 1)?, Case::Case3 { r, s })?;
            (nodes, edges.into_iter().map(|(a, b)| (b, a)).collect(), sums)
        }
        case => unswapped_lattice(&l, case)?,
    };
    Ok(Lattice {
        params: cls.canonical,
        case: cls.case,
        nodes,
        edges,
        sums,
    })
}

impl Lattice {
    pub fn weights(&self, node: usize, bounds: WeightBox) -> Vec<HighestWeight> {
        constituent_weights(&self.nodes[node].carrier, bounds)
    }

    /// Nodes reachable from `start` along arrows, `start` included.
    fn below(&self, start: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(a) = stack.pop() {
            for &(x, y) in &self.edges {
                if x == a && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Every nonempty proper union of nodes closed under following arrows;
    /// each spans an invariant subspace.
    pub fn invariant_subspaces(&self) -> Vec<Vec<usize>> {
        let k = self.nodes.len();
        let mut out = Vec::new();
        for mask in 1u32..(1 << k) - 1 {
            let set: BTreeSet<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
            if set.iter().all(|&a| self.below(a).is_subset(&set)) {
                out.push(set.into_iter().collect());
            }
        }
        out
    }

    /// The same lattice with every arrow reversed.
    pub fn reversed(&self) -> Lattice {
        Lattice {
            edges: self.edges.iter().map(|&(a, b)| (b, a)).collect(),
            ..self.clone()
        }
    }

    /// Nodes grouped by their distance from the sources.
    fn levels(&self) -> Vec<Vec<usize>> {
        let k = self.nodes.len();
        let mut depth = vec![0usize; k];
        // at most k rounds of relaxation on an acyclic graph
        for _ in 0..k {
            for &(a, b) in &self.edges {
                depth[b] = depth[b].max(depth[a] + 1);
            }
        }
        let max = depth.iter().copied().max().unwrap_or(0);
        (0..=max)
            .map(|d| (0..k).filter(|&i| depth[i] == d).collect())
            .collect()
    }

    /// One-line rendering in the notation `A -> {B (+) C} -> D`.
    pub fn chain(&self) -> String {
        let levels = self.levels();
        let braced = !self.edges.is_empty();
        levels
            .iter()
            .map(|lv| {
                let names: Vec<String> = lv.iter().map(|&i| self.nodes[i].label.to_string()).collect();
                if names.len() > 1 && braced {
                    format!("{{{}}}", names.join(" (+) "))
                } else {
                    names.join(" (+) ")
                }
            })
            .collect::<Vec<_>>()
            .join(" -> ")
    }

    /// Multi-line text form used by the golden files.
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("params: {}\n", self.params));
        s.push_str(&format!("case: {}\n", self.case));
        s.push_str(&format!("chain: {}\n", self.chain()));
        for (i, nd) in self.nodes.iter().enumerate() {
            s.push_str(&format!("node {i}: {} carrier {}\n", nd.label, nd.carrier));
        }
        for &(a, b) in &self.edges {
            s.push_str(&format!("edge: {a} -> {b}\n"));
        }
        for g in &self.sums {
            let g: Vec<String> = g.iter().map(|i| i.to_string()).collect();
            s.push_str(&format!("sum: {}\n", g.join(" (+) ")));
        }
        s
    }

    /// Graphviz form of the arrows.
    pub fn dot(&self) -> String {
        let mut s = String::from("digraph lattice {\n");
        for (i, nd) in self.nodes.iter().enumerate() {
            s.push_str(&format!("  n{i} [label=\"{}\"];\n", nd.label));
        }
        for &(a, b) in &self.edges {
            s.push_str(&format!("  n{a} -> n{b};\n"));
        }
        s.push_str("}\n");
        s
    }
}

/// `Rhat` rewrites: to `R-^{r,s+1}` when `s < n`, to `R+^{r-1,s}` when
/// `r > 1`, otherwise (Case 1 with `r = 1`, `s = n`) to the finite
/// dimensional representation.
fn hat_rule(label: &ConstituentLabel) -> Result<Option<(&'static str, ConstituentLabel)>> {
    use ConstituentKind::*;
    let ConstituentKind::Hat { r, s } = label.kind else {
        return Ok(None);
    };
    let l = &label.l;
    let n = l.n();
    Ok(if s < n {
        Some(("hat-minus", ConstituentLabel::new(Minus { r, s: s + 1 }, l.swap(s, n + 1)?)))
    } else if r > 1 {
        Some(("hat-plus", ConstituentLabel::new(Plus { r: r - 1, s }, l.swap(r - 1, n)?)))
    } else if r < s {
        Some((
            "hat-finite",
            ConstituentLabel::new(
                FiniteDim {
                    weight: finite_dim_weight(l)?,
                },
                l.clone(),
            ),
        ))
    } else {
        None
    })
}

/// One rewriting step toward the normal form, with the rule's name.
pub fn rewrite_step(label: &ConstituentLabel) -> Result<Option<(&'static str, ConstituentLabel)>> {
    use ConstituentKind::*;
    let l = &label.l;
    let n = l.n();
    let step = match label.kind {
        Hat { .. } => return hat_rule(label),
        Breve { r, s } => Some(("breve", ConstituentLabel::new(Minus { r: r + 1, s }, l.swap(r, n)?))),
        Minus { r, s } if r != s && r != 1 => Some((
            "minus-plus",
            ConstituentLabel::new(Plus { r: r - 1, s: s - 1 }, l.swap(s - 1, n + 1)?.swap(r - 1, n)?),
        )),
        Minus { r, s } if r == s && r != 1 => Some((
            "minus-plus-diagonal",
            ConstituentLabel::new(Plus { r: r - 1, s: r - 1 }, l.swap(n, n + 1)?.swap(r - 1, n)?),
        )),
        // at s = r + 1 the transposed L lands in Case 4, not Case 3
        TildeMinus { r, s } if s != 1 && s != r + 1 => Some((
            "tilde-minus-plus",
            ConstituentLabel::new(TildePlus { r, s: s - 1 }, l.swap(s - 1, n + 1)?),
        )),
        MinusSingle { r } if r != 1 => Some((
            "single-minus",
            ConstituentLabel::new(TildePlus { r: r - 1, s: r - 1 }, l.swap(r - 1, n + 1)?),
        )),
        PlusSingle { r } if r != n => Some((
            "single-plus",
            ConstituentLabel::new(TildeMinus { r, s: r + 1 }, l.swap(r, n + 1)?),
        )),
        _ => None,
    };
    if let Some((rule, ref out)) = step {
        if !out.is_valid() {
            return Err(Error::Consistency(format!("rule {rule} took {label} to invalid {out}")));
        }
    }
    Ok(step)
}

/// Canonical representative and the chain of rules leading to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalForm {
    pub label: ConstituentLabel,
    pub chain: Vec<(String, ConstituentLabel)>,
}

/// Apply [`rewrite_step`] until no rule fits.
pub fn normal_form(label: &ConstituentLabel) -> Result<NormalForm> {
    let mut cur = label.clone();
    let mut chain = Vec::new();
    // every rule lowers (r, s) or leaves the family, so 4n steps is generous
    for _ in 0..4 * label.l.n() + 4 {
        match rewrite_step(&cur)? {
            Some((rule, next)) => {
                chain.push((rule.to_string(), next.clone()));
                cur = next;
            }
            None => return Ok(NormalForm { label: cur, chain }),
        }
    }
    Err(Error::Consistency(format!("normal form of {label} does not terminate")))
}

/// Outcome of [`equivalent`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    pub equivalent: bool,
    pub left: NormalForm,
    pub right: NormalForm,
    /// Whether the carrier weights inside the box agree (necessary).
    pub same_weights: bool,
}

pub fn equivalent(a: &ConstituentLabel, b: &ConstituentLabel, bounds: WeightBox) -> Result<Equivalence> {
    let left = normal_form(a)?;
    let right = normal_form(b)?;
    let same_weights = constituent_weights(a, bounds) == constituent_weights(b, bounds);
    Ok(Equivalence {
        equivalent: left.label == right.label,
        left,
        right,
        same_weights,
    })
}

/// Smallest box containing the first `w` steps beyond every `m` involved.
pub fn common_bounds(labels: &[&ConstituentLabel], w: i64) -> WeightBox {
    let mut top = i64::MIN;
    let mut bottom = i64::MAX;
    for label in labels {
        let m = label.l.m();
        let (first, last) = match (m.entries().first(), m.entries().last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => (0, 0),
        };
        top = top.max(first + w);
        bottom = bottom.min(last - w);
    }
    WeightBox {
        top_max: top,
        bottom_min: bottom,
    }
}

/// Basis vectors of `rep` whose block lies in `weights`.
fn mask_of(rep: &WindowedRep, weights: &[HighestWeight]) -> Vec<bool> {
    let blocks: BTreeSet<usize> = weights.iter().filter_map(|w| rep.weight_index(w.entries())).collect();
    (0..rep.dim()).map(|k| blocks.contains(&rep.block_of(k))).collect()
}

/// Columns in `set` whose image under some generator leaves `set`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub columns_checked: usize,
    pub violations: Vec<(String, usize, usize)>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Matrix-support scan: is the span of the blocks in `weights` invariant?
pub fn invariance_scan(rep: &WindowedRep, weights: &[HighestWeight]) -> InvarianceReport {
    let inside = mask_of(rep, weights);
    let mut violations = Vec::new();
    let mut checked = 0;
    for (g, op) in rep.gens.all() {
        for c in (0..rep.dim()).filter(|&c| inside[c]) {
            checked += 1;
            for &(r, v) in op.column(c) {
                if !inside[r] && v.norm() > 0.0 {
                    violations.push((g.to_string(), r, c));
                }
            }
        }
    }
    InvarianceReport {
        columns_checked: checked,
        violations,
    }
}

/// Irreducibility criterion on a carrier: every `e_n` / `f_n` step between
/// two of its weights has nonzero coefficients both ways, and these steps
/// connect all of its weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachabilityReport {
    pub weights: usize,
    pub edges: usize,
    pub vanishing_edges: Vec<(Vec<i64>, usize)>,
    pub components: usize,
}

impl ReachabilityReport {
    pub fn passed(&self) -> bool {
        self.vanishing_edges.is_empty() && self.components <= 1
    }
}

/// Largest entry of the block of `op` from weight `from` to weight `to`.
fn block_norm(rep: &WindowedRep, op: &SparseOperator, from: usize, to: usize) -> f64 {
    rep.block(from)
        .flat_map(|c| op.column(c).iter())
        .filter(|(r, _)| rep.block_of(*r) == to)
        .fold(0.0, |m, (_, v)| m.max(v.norm()))
}

pub fn reachability(rep: &WindowedRep, weights: &[HighestWeight]) -> ReachabilityReport {
    let n = rep.n();
    let en = &rep.gens.e[n - 1];
    let fn_ = &rep.gens.f[n - 1];
    let idx: Vec<usize> = weights.iter().filter_map(|w| rep.weight_index(w.entries())).collect();
    let local: HashMap<usize, usize> = idx.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let mut adj = vec![Vec::new(); idx.len()];
    let mut edges = 0;
    let mut vanishing = Vec::new();
    for (i, &w) in idx.iter().enumerate() {
        let mn = rep.weights[w].entries();
        for s in 1..=n {
            let mut t = mn.to_vec();
            t[s - 1] += 1;
            let Some(&j) = rep.weight_index(&t).as_ref().and_then(|k| local.get(k)) else {
                continue;
            };
            edges += 1;
            let up = block_norm(rep, en, w, idx[j]);
            let down = block_norm(rep, fn_, idx[j], w);
            if up == 0.0 || down == 0.0 {
                vanishing.push((mn.to_vec(), s));
            } else {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut comp = vec![usize::MAX; idx.len()];
    let mut components = 0;
    for start in 0..idx.len() {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = components;
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            for &b in &adj[a] {
                if comp[b] == usize::MAX {
                    comp[b] = components;
                    queue.push_back(b);
                }
            }
        }
        components += 1;
    }
    ReachabilityReport {
        weights: idx.len(),
        edges,
        vanishing_edges: vanishing,
        components,
    }
}

/// `sum of dim V_{m_n}` over the carrier weights inside `bounds`.
pub fn carrier_dimension(label: &ConstituentLabel, bounds: WeightBox) -> u128 {
    constituent_weights(label, bounds).iter().map(gt_dimension).sum()
}

/// A diagonal operator between two constituents realized on different
/// representations, with its verification residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceOperator {
    pub weights: Vec<HighestWeight>,
    pub values: Vec<Complex64>,
    /// Column-relative residual of `B P T(a) = P' T'(a) B` on the carrier.
    pub residual: f64,
}

/// Build `B` from the `e_n` and `f_n` blocks of both compressed actions and
/// check it against every generator.
pub fn equivalence_operator(
    a: &ConstituentLabel,
    b: &ConstituentLabel,
    window: &Window,
    bounds: WeightBox,
    q: &QParam,
) -> Result<EquivalenceOperator> {
    let weights = constituent_weights(a, bounds);
    if weights != constituent_weights(b, bounds) {
        return Err(Error::NotComparable);
    }
    if weights.is_empty() {
        return Err(Error::EmptyInterior);
    }
    let ra = build_principal_in(&a.params(), window, bounds, q)?;
    let rb = build_principal_in(&b.params(), window, bounds, q)?;
    let n = ra.n();
    // pattern index maps between the two bases
    let to_b: Vec<Option<usize>> = ra.basis.patterns().iter().map(|p| rb.basis.position(p)).collect();
    let local: HashMap<Vec<i64>, usize> = weights.iter().enumerate().map(|(i, w)| (w.entries().to_vec(), i)).collect();

    // ratio b(w^{+s}) / b(w) from one matrix entry of e_n, checked against f_n
    let ratio = |w: &HighestWeight, t: &[i64]| -> Result<Complex64> {
        let wa = ra.weight_index(w.entries()).ok_or(Error::NotComparable)?;
        let ta = ra.weight_index(t).ok_or(Error::NotComparable)?;
        for c in ra.block(wa) {
            for &(r, ea) in ra.gens.e[n - 1].column(c) {
                if ra.block_of(r) != ta {
                    continue;
                }
                let (cb, rb_) = (to_b[c].ok_or(Error::NotComparable)?, to_b[r].ok_or(Error::NotComparable)?);
                let eb = rb.gens.e[n - 1].get(rb_, cb);
                let fa = ra.gens.f[n - 1].get(c, r);
                let fb = rb.gens.f[n - 1].get(cb, rb_);
                if eb.norm() == 0.0 || fa.norm() == 0.0 || fb.norm() == 0.0 {
                    return Err(Error::VanishingFactor {
                        weight: w.entries().to_vec(),
                        direction: (0..n).find(|&s| t[s] != w.entries()[s]).map_or(0, |s| s + 1),
                    });
                }
                let up = eb / ea;
                let down = fa / fb;
                let dev = (up - down).norm() / up.norm().max(down.norm());
                if dev > 1e-10 {
                    return Err(Error::InconsistentLoop { deviation: dev });
                }
                return Ok(up);
            }
        }
        Err(Error::VanishingFactor {
            weight: w.entries().to_vec(),
            direction: 0,
        })
    };

    let mut values: Vec<Option<Complex64>> = vec![None; weights.len()];
    values[0] = Some(Complex64::new(1.0, 0.0));
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let w = &weights[i];
        for s in 0..n {
            for delta in [1i64, -1] {
                let mut t = w.entries().to_vec();
                t[s] += delta;
                let Some(&j) = local.get(&t) else { continue };
                if values[j].is_some() {
                    continue;
                }
                let v = values[i].expect("queued");
                values[j] = Some(if delta == 1 {
                    v * ratio(w, &t)?
                } else {
                    v / ratio(&weights[j], w.entries())?
                });
                queue.push_back(j);
            }
        }
    }
    let values: Vec<Complex64> = values
        .into_iter()
        .map(|v| v.ok_or_else(|| Error::Consistency("carrier is disconnected".into())))
        .collect::<Result<_>>()?;

    // B from the basis of ra to the basis of rb, supported on the carrier
    let in_a = mask_of(&ra, &weights);
    let in_b = mask_of(&rb, &weights);
    let mut trip = Vec::new();
    for k in (0..ra.dim()).filter(|&k| in_a[k]) {
        let w = local[ra.weights[ra.block_of(k)].entries()];
        trip.push((to_b[k].ok_or(Error::NotComparable)?, k, values[w]));
    }
    let op = SparseOperator::from_triplets(rb.dim(), ra.dim(), trip)?;
    let cols: Vec<usize> = ra.interior_columns().into_iter().filter(|&k| in_a[k]).collect();
    let residual = compressed_residual(&op, &ra.gens, &in_a, &rb.gens, &in_b, &cols);
    Ok(EquivalenceOperator {
        weights,
        values,
        residual,
    })
}

/// Column-relative residual of `B P_a T_a(g) e_c - P_b T_b(g) B e_c`.
fn compressed_residual(
    op: &SparseOperator,
    ga: &GeneratorSet,
    in_a: &[bool],
    gb: &GeneratorSet,
    in_b: &[bool],
    cols: &[usize],
) -> f64 {
    let mut worst = 0.0f64;
    for g in ga.generators() {
        for &c in cols {
            let unit = vec![(c, Complex64::new(1.0, 0.0))];
            let ta: Vec<_> = ga.get(g).apply(&unit).into_iter().filter(|e| in_a[e.0]).collect();
            let lhs = op.apply(&ta);
            let rhs: Vec<_> = gb.get(g).apply(&op.apply(&unit)).into_iter().filter(|e| in_b[e.0]).collect();
            let scale = lhs.iter().chain(&rhs).fold(0.0f64, |m, e| m.max(e.1.norm()));
            if scale > 0.0 {
                let d = sub(&lhs, &rhs).iter().fold(0.0f64, |m, e| m.max(e.1.norm()));
                worst = worst.max(d / scale);
            }
        }
    }
    worst
}
