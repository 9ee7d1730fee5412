//! Decision procedures for orderings between mass functions.
//!
//! | relation | meaning                                                     | method                      |
//! |----------|-------------------------------------------------------------|-----------------------------|
//! | `pl`     | `pl₁(Y) <= pl₂(Y)` for every `Y`                            | subset scan                 |
//! | `q`      | `q₁(Y) <= q₂(Y)` for every `Y`                              | subset scan                 |
//! | `up`     | `m₁(V) <= m₂(V)` for every inclusion-up-closed family `V`   | maximum-weight closure      |
//! | `s`      | `m₁` is a specialization of `m₂`                            | maximum flow                |
//! | `d`      | `m₁ = m ∩ m₂` for some mass `m` (unnormalized conjunctive)   | exact phase-1 simplex       |
//!
//! Each verdict carries a witness that [`OrderVerdict::verify`] re-checks by
//! direct arithmetic.
//!
//! For `up`, only the focal sets `F` of either mass matter: the sum over a
//! global up-set depends on its trace on `F`, and every up-closed trace is
//! the trace of the global up-set it generates. The most violating up-closed
//! trace is a maximum-weight closure in the poset `(F, ⊆)` with weights
//! `m₁ - m₂`, found by a minimum cut. [`leq_up_enumerated`] enumerates the
//! up-closed traces directly and serves as a test oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::agendas::combine_unnormalized;
use crate::bitset::{graded_subsets, BitSet};
use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::mass::MassFunction;
use crate::simplex::phase_one;
use crate::weight::Weight;

/// Universes up to this size are scanned subset by subset for `pl` and `q`.
pub const SUBSET_SCAN_LIMIT: usize = 20;
/// Focal-set limit for [`leq_up_enumerated`].
pub const UPSET_ENUMERATION_LIMIT: usize = 24;
/// Limit on the union of the focal sets of `m₂` for [`leq_d`].
pub const DEMPSTER_LIMIT: usize = 12;
/// Largest closure family scanned for `pl`/`q` beyond [`SUBSET_SCAN_LIMIT`].
pub const CLOSURE_LIMIT: usize = 1 << 16;
/// Global up-sets are listed in witnesses for universes up to this size.
pub const GLOBAL_UPSET_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Pl,
    Q,
    Up,
    S,
    D,
}

impl Relation {
    pub const ALL: [Relation; 5] = [Relation::D, Relation::S, Relation::Up, Relation::Pl, Relation::Q];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Pl => "pl",
            Relation::Q => "q",
            Relation::Up => "up",
            Relation::S => "s",
            Relation::D => "d",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pl" => Ok(Relation::Pl),
            "q" => Ok(Relation::Q),
            "up" => Ok(Relation::Up),
            "s" => Ok(Relation::S),
            "d" => Ok(Relation::D),
            other => Err(Error::Parse(format!("unknown relation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecializationEntry<W: Weight> {
    /// Receiving subset.
    pub w: BitSet,
    /// Focal set of `m₂` giving up mass.
    pub y: BitSet,
    /// Fraction of `m₂(y)` moved to `w`.
    pub fraction: W,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness<W: Weight> {
    /// `lhs = f(m₁)(set) > rhs = f(m₂)(set)` for `f` in `pl`, `q`.
    Subset { set: BitSet, lhs: W, rhs: W },
    /// An up-closed family on which `m₁` outweighs `m₂`.
    UpSet {
        /// Up-closed subfamily of the combined focal sets.
        trace: Vec<BitSet>,
        /// Minimal members of `trace`.
        generators: Vec<BitSet>,
        /// All subsets above a generator, when the universe is small enough to list.
        global: Option<Vec<BitSet>>,
        lhs: W,
        rhs: W,
    },
    Specialization(Vec<SpecializationEntry<W>>),
    /// A mass `m` with `m ∩ m₂ = m₁`.
    Combining(MassFunction<W>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderVerdict<W: Weight> {
    pub relation: Relation,
    pub holds: bool,
    pub witness: Option<Witness<W>>,
}

impl<W: Weight> OrderVerdict<W> {
    fn holds(relation: Relation, witness: Option<Witness<W>>) -> Self {
        OrderVerdict {
            relation,
            holds: true,
            witness,
        }
    }

    fn fails(relation: Relation, witness: Option<Witness<W>>) -> Self {
        OrderVerdict {
            relation,
            holds: false,
            witness,
        }
    }

    /// Re-checks the witness against the two masses. Verdicts without a witness pass.
    pub fn verify(&self, m1: &MassFunction<W>, m2: &MassFunction<W>) -> bool {
        let Some(witness) = &self.witness else {
            return true;
        };
        match witness {
            Witness::Subset { set, lhs, rhs } => {
                let (l, r) = match self.relation {
                    Relation::Pl => (m1.pl(set), m2.pl(set)),
                    Relation::Q => (m1.q(set), m2.q(set)),
                    _ => return false,
                };
                !self.holds && l.approx_eq(lhs) && r.approx_eq(rhs) && !l.le_tol(&r)
            }
            Witness::UpSet {
                trace,
                generators,
                global,
                lhs,
                rhs,
            } => {
                let focal = combined_focal(m1, m2);
                let up_closed = trace.iter().all(|y| {
                    focal
                        .iter()
                        .filter(|z| y.is_subset(z))
                        .all(|z| trace.contains(z))
                });
                let generated = focal
                    .iter()
                    .filter(|z| generators.iter().any(|g| g.is_subset(z)))
                    .cloned()
                    .collect::<Vec<_>>();
                let sums_ok = m1.upset_probability(trace).approx_eq(lhs) && m2.upset_probability(trace).approx_eq(rhs);
                let global_ok = global.as_ref().is_none_or(|g| {
                    m1.upset_probability(g).approx_eq(lhs) && m2.upset_probability(g).approx_eq(rhs)
                });
                !self.holds && up_closed && generated == *trace && sums_ok && global_ok && !lhs.le_tol(rhs)
            }
            Witness::Specialization(entries) => self.holds && verify_specialization(entries, m1, m2),
            Witness::Combining(m) => {
                self.holds
                    && combine_unnormalized(&[m.clone(), m2.clone()], usize::MAX)
                        .map(|c| c.approx_eq_loose(m1))
                        .unwrap_or(false)
            }
        }
    }

    pub fn to_json(&self, universe: &[String]) -> Value {
        let names = |s: &BitSet| -> Vec<&str> { s.iter().map(|i| universe[i].as_str()).collect() };
        let family = |f: &[BitSet]| -> Vec<Vec<&str>> { f.iter().map(names).collect() };
        let witness = match &self.witness {
            None => Value::Null,
            Some(Witness::Subset { set, lhs, rhs }) => json!({
                "kind": "subset",
                "set": names(set),
                "m1": lhs.to_f64(),
                "m2": rhs.to_f64(),
            }),
            Some(Witness::UpSet {
                trace,
                generators,
                global,
                lhs,
                rhs,
            }) => json!({
                "kind": "upset",
                "trace": family(trace),
                "generators": family(generators),
                "upset": global.as_ref().map(|g| family(g)),
                "m1": lhs.to_f64(),
                "m2": rhs.to_f64(),
            }),
            Some(Witness::Specialization(entries)) => json!({
                "kind": "specialization",
                "entries": entries.iter().map(|e| json!({
                    "from": names(&e.y),
                    "to": names(&e.w),
                    "fraction": e.fraction.to_f64(),
                })).collect::<Vec<_>>(),
            }),
            Some(Witness::Combining(m)) => json!({
                "kind": "combining",
                "focal": m.focal().map(|(s, w)| json!({"set": names(s), "mass": w.to_f64()})).collect::<Vec<_>>(),
            }),
        };
        json!({
            "relation": self.relation.name(),
            "holds": self.holds,
            "witness": witness,
        })
    }
}

fn verify_specialization<W: Weight>(entries: &[SpecializationEntry<W>], m1: &MassFunction<W>, m2: &MassFunction<W>) -> bool {
    if entries.iter().any(|e| !e.w.is_subset(&e.y) || e.fraction < W::zero()) {
        return false;
    }
    let columns_ok = m2.focal_sets().all(|y| {
        W::total(entries.iter().filter(|e| &e.y == y).map(|e| &e.fraction)).approx_eq(&W::one())
    });
    let targets: BTreeSet<&BitSet> = entries.iter().map(|e| &e.w).chain(m1.focal_sets()).collect();
    let rows_ok = targets.into_iter().all(|w| {
        let moved = entries
            .iter()
            .filter(|e| &e.w == w)
            .fold(W::zero(), |acc, e| acc + e.fraction.clone() * m2.mass(&e.y));
        moved.approx_eq(&m1.mass(w))
    });
    columns_ok && rows_ok
}

fn combined_focal<W: Weight>(m1: &MassFunction<W>, m2: &MassFunction<W>) -> Vec<BitSet> {
    m1.focal_sets()
        .chain(m2.focal_sets())
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Closure of `family` under a binary operation, over nonempty subfamilies.
fn op_closure(family: &[BitSet], op: impl Fn(&BitSet, &BitSet) -> BitSet) -> Result<BTreeSet<BitSet>> {
    let mut closed: BTreeSet<BitSet> = family.iter().cloned().collect();
    let mut frontier: Vec<BitSet> = closed.iter().cloned().collect();
    while let Some(s) = frontier.pop() {
        for f in family {
            let next = op(&s, f);
            if closed.insert(next.clone()) {
                if closed.len() > CLOSURE_LIMIT {
                    return Err(Error::Guard {
                        what: "closure family size",
                        actual: closed.len(),
                        limit: CLOSURE_LIMIT,
                    });
                }
                frontier.push(next);
            }
        }
    }
    Ok(closed)
}

fn scan<W: Weight>(
    relation: Relation,
    candidates: impl IntoIterator<Item = BitSet>,
    f1: impl Fn(&BitSet) -> W,
    f2: impl Fn(&BitSet) -> W,
) -> OrderVerdict<W> {
    for set in candidates {
        let (lhs, rhs) = (f1(&set), f2(&set));
        if !lhs.le_tol(&rhs) {
            return OrderVerdict::fails(relation, Some(Witness::Subset { set, lhs, rhs }));
        }
    }
    OrderVerdict::holds(relation, None)
}

/// `pl₁ <= pl₂` pointwise. The witness is the first violating subset in
/// graded order (size, then lexicographic).
///
/// Beyond [`SUBSET_SCAN_LIMIT`] features only complements of unions of focal
/// sets are scanned: `pl(Y) = 1 - bel(X∖Y)` and `bel` of any set equals `bel`
/// of the union of the focal sets inside it.
pub fn leq_pl<W: Weight>(m1: &MassFunction<W>, m2: &MassFunction<W>) -> Result<OrderVerdict<W>> {
    m1.require_same_universe(m2)?;
    let n = m1.width();
    if n <= SUBSET_SCAN_LIMIT {
        return Ok(scan(Relation::Pl, graded_subsets(n), |y| m1.pl(y), |y| m2.pl(y)));
    }
    let focal = combined_focal(m1, m2);
    let mut unions = op_closure(&focal, BitSet::union)?;
    unions.insert(BitSet::empty(n));
    let mut candidates: Vec<BitSet> = unions.iter().map(BitSet::complement).collect();
    candidates.sort();
    Ok(scan(Relation::Pl, candidates, |y| m1.pl(y), |y| m2.pl(y)))
}

/// `q₁ <= q₂` pointwise. Beyond [`SUBSET_SCAN_LIMIT`] features only
/// intersections of focal sets are scanned: `q` of any set equals `q` of
/// the intersection of the focal sets above it, and is 0 for both masses
/// when there are none.
pub fn leq_q<W: Weight>(m1: &MassFunction<W>, m2: &MassFunction<W>) -> Result<OrderVerdict<W>> {
    m1.require_same_universe(m2)?;
    let n = m1.width();
    if n <= SUBSET_SCAN_LIMIT {
        return Ok(scan(Relation::Q, graded_subsets(n), |y| m1.q(y), |y| m2.q(y)));
    }
    let focal = combined_focal(m1, m2);
    let candidates = op_closure(&focal, BitSet::intersection)?;
    Ok(scan(Relation::Q, candidates, |y| m1.q(y), |y| m2.q(y)))
}

/// All subsets of the universe containing some generator, in graded order.
pub fn global_upset(generators: &[BitSet], width: usize) -> Result<Vec<BitSet>> {
    if width > GLOBAL_UPSET_LIMIT {
        return Err(Error::Guard {
            what: "universe size",
            actual: width,
            limit: GLOBAL_UPSET_LIMIT,
        });
    }
    Ok(graded_subsets(width)
        .into_iter()
        .filter(|z| generators.iter().any(|g| g.is_subset(z)))
        .collect())
}

fn minimal_members(family: &[BitSet]) -> Vec<BitSet> {
    family
        .iter()
        .filter(|y| !family.iter().any(|z| z.is_proper_subset(y)))
        .cloned()
        .collect()
}

fn upset_witness<W: Weight>(trace: Vec<BitSet>, m1: &MassFunction<W>, m2: &MassFunction<W>) -> Witness<W> {
    let generators = minimal_members(&trace);
    let global = global_upset(&generators, m1.width()).ok();
    Witness::UpSet {
        lhs: m1.upset_probability(&trace),
        rhs: m2.upset_probability(&trace),
        trace,
        generators,
        global,
    }
}

/// Upward restricted order. On failure the witness is the up-closed family
/// of focal sets with the largest excess `m₁ - m₂`, smallest among ties.
pub fn leq_up<W: Weight>(m1: &MassFunction<W>, m2: &MassFunction<W>) -> Result<OrderVerdict<W>> {
    m1.require_same_universe(m2)?;
    let focal = combined_focal(m1, m2);
    let excess: Vec<W> = focal.iter().map(|y| m1.mass(y) - m2.mass(y)).collect();
    let (s, t) = (0, 1);
    let mut net = FlowNetwork::new(focal.len() + 2);
    let mut positive = W::zero();
    let mut infinity = W::one();
    for (i, d) in excess.iter().enumerate() {
        infinity = infinity + d.abs();
        if d.is_negligible() {
            continue;
        }
        if *d > W::zero() {
            net.add_edge(s, i + 2, d.clone());
            positive = positive + d.clone();
        } else {
            net.add_edge(i + 2, t, -d.clone());
        }
    }
    // closure edges: a member forces every focal superset
    for (i, y) in focal.iter().enumerate() {
        for (j, z) in focal.iter().enumerate() {
            if i != j && y.is_subset(z) {
                net.add_edge(i + 2, j + 2, infinity.clone());
            }
        }
    }
    let cut = net.max_flow(s, t);
    let best = positive - cut;
    if best.is_negligible() || best < W::zero() {
        return Ok(OrderVerdict::holds(Relation::Up, None));
    }
    let side = net.source_side(s);
    let trace: Vec<BitSet> = focal
        .iter()
        .enumerate()
        .filter(|(i, _)| side[i + 2])
        .map(|(_, y)| y.clone())
        .collect();
    Ok(OrderVerdict::fails(Relation::Up, Some(upset_witness(trace, m1, m2))))
}

/// Result of enumerating all up-closed families of focal sets.
#[derive(Debug, Clone, PartialEq)]
pub struct UpsetEnumeration<W: Weight> {
    pub holds: bool,
    /// Largest `m₁(V) - m₂(V)` over up-closed `V` (0 for the empty family).
    pub max_excess: W,
    pub count: usize,
}

/// Enumerates every up-closed subfamily of the combined focal sets.
pub fn leq_up_enumerated<W: Weight>(m1: &MassFunction<W>, m2: &MassFunction<W>) -> Result<UpsetEnumeration<W>> {
    m1.require_same_universe(m2)?;
    let mut focal = combined_focal(m1, m2);
    if focal.len() > UPSET_ENUMERATION_LIMIT {
        return Err(Error::Guard {
            what: "combined focal-set count",
            actual: focal.len(),
            limit: UPSET_ENUMERATION_LIMIT,
        });
    }
    // supersets first, so inclusion only depends on decided members
    focal.reverse();
    let excess: Vec<W> = focal.iter().map(|y| m1.mass(y) - m2.mass(y)).collect();
    let above: Vec<Vec<usize>> = focal
        .iter()
        .map(|y| {
            focal
                .iter()
                .enumerate()
                .filter(|(_, z)| y.is_proper_subset(z))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let mut best = W::zero();
    let mut count = 0;
    let mut chosen = vec![false; focal.len()];
    enumerate_upsets(0, &above, &excess, &mut chosen, W::zero(), &mut best, &mut count);
    Ok(UpsetEnumeration {
        holds: best.is_negligible() || best < W::zero(),
        max_excess: best,
        count,
    })
}

fn enumerate_upsets<W: Weight>(
    i: usize,
    above: &[Vec<usize>],
    excess: &[W],
    chosen: &mut [bool],
    sum: W,
    best: &mut W,
    count: &mut usize,
) {
    if i == above.len() {
        *count += 1;
        if sum > *best {
            *best = sum;
        }
        return;
    }
    chosen[i] = false;
    enumerate_upsets(i + 1, above, excess, chosen, sum.clone(), best, count);
    if above[i].iter().all(|&j| chosen[j]) {
        chosen[i] = true;
        enumerate_upsets(i + 1, above, excess, chosen, sum + excess[i].clone(), best, count);
        chosen[i] = false;
    }
}

/// Specialization: decided by a maximum flow from the focal sets of `m₂`
/// down to their focal subsets in `m₁`.
pub fn leq_s<W: Weight>(m1: &MassFunction<W>, m2: &MassFunction<W>) -> Result<OrderVerdict<W>> {
    m1.require_same_universe(m2)?;
    let ys: Vec<(&BitSet, &W)> = m2.focal().collect();
    let ws: Vec<(&BitSet, &W)> = m1.focal().collect();
    let (s, t) = (0, 1);
    let y_node = |i: usize| 2 + i;
    let w_node = |j: usize| 2 + ys.len() + j;
    let mut net = FlowNetwork::new(2 + ys.len() + ws.len());
    let mut links: Vec<(usize, usize, usize)> = Vec::new();
    for (i, (y, my)) in ys.iter().enumerate() {
        net.add_edge(s, y_node(i), (*my).clone());
        for (j, (w, _)) in ws.iter().enumerate() {
            if w.is_subset(y) {
                links.push((i, j, net.add_edge(y_node(i), w_node(j), (*my).clone())));
            }
        }
    }
    for (j, (_, mw)) in ws.iter().enumerate() {
        net.add_edge(w_node(j), t, (*mw).clone());
    }
    let value = net.max_flow(s, t);
    if !value.approx_eq(&m1.total()) {
        return Ok(OrderVerdict::fails(Relation::S, None));
    }
    let entries = links
        .into_iter()
        .filter_map(|(i, j, e)| {
            let f = net.flow(e);
            (f > W::zero()).then(|| SpecializationEntry {
                w: ws[j].0.clone(),
                y: ys[i].0.clone(),
                fraction: f / ys[i].1.clone(),
            })
        })
        .collect();
    Ok(OrderVerdict::holds(Relation::S, Some(Witness::Specialization(entries))))
}

/// Dempsterian specialization: is there a mass `m` with `m ∩ m₂ = m₁`?
///
/// Only sets `Z` inside the union `U` of the focal sets of `m₂` whose traces
/// `Z ∩ Y` on every focal `Y` of `m₂` are focal in `m₁` can carry weight, so
/// the linear system is built over those. Float inputs are converted to exact
/// rationals through their shortest decimal form and accepted when the
/// phase-1 residual is within tolerance.
pub fn leq_d<W: Weight>(m1: &MassFunction<W>, m2: &MassFunction<W>) -> Result<OrderVerdict<W>> {
    m1.require_same_universe(m2)?;
    let n = m1.width();
    let e1: BTreeMap<BitSet, BigRational> = m1.focal().map(|(s, w)| (s.clone(), w.to_rational())).collect();
    let e2: Vec<(BitSet, BigRational)> = m2.focal().map(|(s, w)| (s.clone(), w.to_rational())).collect();
    let mut u = BitSet::empty(n);
    for (y, _) in &e2 {
        u.union_with(y);
    }
    if e1.keys().any(|w| !w.is_subset(&u)) {
        return Ok(OrderVerdict::fails(Relation::D, None));
    }
    let support: Vec<usize> = u.iter().collect();
    if support.len() > DEMPSTER_LIMIT {
        return Err(Error::Guard {
            what: "union of focal sets of m2",
            actual: support.len(),
            limit: DEMPSTER_LIMIT,
        });
    }
    let variables: Vec<BitSet> = (0..1u64 << support.len())
        .map(|mask| BitSet::from_indices(n, support.iter().enumerate().filter(|(b, _)| mask & (1 << b) != 0).map(|(_, &i)| i)))
        .filter(|z| e2.iter().all(|(y, _)| e1.contains_key(&z.intersection(y))))
        .collect();
    if variables.is_empty() {
        return Ok(OrderVerdict::fails(Relation::D, None));
    }
    let targets: Vec<&BitSet> = e1.keys().collect();
    let mut rows: Vec<Vec<BigRational>> = vec![vec![BigRational::from_integer(0.into()); variables.len()]; targets.len()];
    for (k, z) in variables.iter().enumerate() {
        for (y, my) in &e2 {
            let w = z.intersection(y);
            let r = targets.iter().position(|t| **t == w).expect("trace is focal in m1");
            rows[r][k] += my;
        }
    }
    let mut rhs: Vec<BigRational> = targets.iter().map(|t| e1[*t].clone()).collect();
    rows.push(vec![BigRational::from_integer(1.into()); variables.len()]);
    rhs.push(BigRational::from_integer(1.into()));
    let solution = phase_one(&rows, &rhs, variables.len());
    if !W::from_rational(&solution.infeasibility).is_negligible() {
        return Ok(OrderVerdict::fails(Relation::D, None));
    }
    let focal: BTreeMap<BitSet, W> = variables
        .into_iter()
        .zip(&solution.x)
        .filter(|(_, x)| *x > &BigRational::from_integer(0.into()))
        .map(|(z, x)| (z, W::from_rational(x)))
        .collect();
    let m = MassFunction::from_map(m1.universe().to_vec(), focal);
    Ok(OrderVerdict::holds(Relation::D, Some(Witness::Combining(m))))
}

pub fn decide<W: Weight>(relation: Relation, m1: &MassFunction<W>, m2: &MassFunction<W>) -> Result<OrderVerdict<W>> {
    match relation {
        Relation::Pl => leq_pl(m1, m2),
        Relation::Q => leq_q(m1, m2),
        Relation::Up => leq_up(m1, m2),
        Relation::S => leq_s(m1, m2),
        Relation::D => leq_d(m1, m2),
    }
}

#[derive(Debug, Clone)]
pub struct ChainReport<W: Weight> {
    pub verdicts: Vec<OrderVerdict<W>>,
    /// Violated implications such as `"s => up"`; empty when the chain holds.
    pub violations: Vec<String>,
}

impl<W: Weight> ChainReport<W> {
    pub fn verdict(&self, relation: Relation) -> &OrderVerdict<W> {
        self.verdicts.iter().find(|v| v.relation == relation).expect("all relations evaluated")
    }
}

/// Evaluates all five relations and lists any failed implication among
/// `d => s`, `s => up`, `up => pl`, `up => q`.
pub fn implication_chain_check<W: Weight>(m1: &MassFunction<W>, m2: &MassFunction<W>) -> Result<ChainReport<W>> {
    let verdicts = Relation::ALL
        .iter()
        .map(|&r| decide(r, m1, m2))
        .collect::<Result<Vec<_>>>()?;
    let holds = |r: Relation| verdicts.iter().find(|v| v.relation == r).map(|v| v.holds).unwrap_or(false);
    let violations = [
        (Relation::D, Relation::S),
        (Relation::S, Relation::Up),
        (Relation::Up, Relation::Pl),
        (Relation::Up, Relation::Q),
    ]
    .iter()
    .filter(|(a, b)| holds(*a) && !holds(*b))
    .map(|(a, b)| format!("{a} => {b}"))
    .collect();
    Ok(ChainReport { verdicts, violations })
}
