//! Crisp and non-crisp interrogative agendas, coalitions and their combinators.

use std::collections::{BTreeMap, HashSet};
use std::str::FromStr;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::fca::{build_lattice, ConceptLattice, FormalContext};
use crate::mass::MassFunction;
use crate::weight::Weight;

/// Default limit on the number of focal sets produced by a combination.
pub const DEFAULT_FOCAL_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Normalized conjunctive combination.
    Dempster,
    /// Conjunctive combination keeping conflict on the empty set.
    Unnormalized,
    /// Combination through unions.
    Disjunctive,
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dempster" => Ok(Rule::Dempster),
            "unnorm" | "unnormalized" => Ok(Rule::Unnormalized),
            "disjunctive" => Ok(Rule::Disjunctive),
            other => Err(Error::Parse(format!("unknown combination rule `{other}`"))),
        }
    }
}

/// Nonempty, duplicate-free list of agent ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coalition {
    members: Vec<String>,
}

impl Coalition {
    pub fn new<S: Into<String>>(members: impl IntoIterator<Item = S>) -> Result<Self> {
        let members: Vec<String> = members.into_iter().map(Into::into).collect();
        if members.is_empty() {
            return Err(Error::Empty("coalition"));
        }
        let mut seen = HashSet::new();
        for m in &members {
            if !seen.insert(m) {
                return Err(Error::DuplicateId {
                    kind: "agent",
                    id: m.clone(),
                });
            }
        }
        Ok(Coalition { members })
    }

    pub fn members(&self) -> &[String] {
        &self.members
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Agenda<W: Weight = f64> {
    Crisp(BitSet),
    Mass(MassFunction<W>),
}

/// The agendas of a set of agents over one feature universe.
#[derive(Debug, Clone, PartialEq)]
pub struct AgendaAssignment<W: Weight = f64> {
    universe: Vec<String>,
    agendas: BTreeMap<String, Agenda<W>>,
}

impl<W: Weight> AgendaAssignment<W> {
    pub fn new(universe: Vec<String>) -> Self {
        AgendaAssignment {
            universe,
            agendas: BTreeMap::new(),
        }
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn insert_crisp(&mut self, agent: impl Into<String>, features: BitSet) -> Result<()> {
        if features.width() != self.universe.len() {
            return Err(Error::Dimension {
                expected: self.universe.len(),
                actual: features.width(),
            });
        }
        self.agendas.insert(agent.into(), Agenda::Crisp(features));
        Ok(())
    }

    pub fn insert_mass(&mut self, agent: impl Into<String>, mass: MassFunction<W>) -> Result<()> {
        if mass.universe() != self.universe {
            return Err(Error::UniverseMismatch);
        }
        self.agendas.insert(agent.into(), Agenda::Mass(mass));
        Ok(())
    }

    pub fn get(&self, agent: &str) -> Result<&Agenda<W>> {
        self.agendas.get(agent).ok_or_else(|| Error::UnknownId {
            kind: "agent",
            id: agent.to_string(),
        })
    }

    fn crisp_members(&self, c: &Coalition) -> Result<Vec<&BitSet>> {
        c.members()
            .iter()
            .map(|a| match self.get(a)? {
                Agenda::Crisp(set) => Ok(set),
                Agenda::Mass(_) => Err(Error::InvalidMass(format!("agent {a} has a non-crisp agenda"))),
            })
            .collect()
    }

    /// Members' agendas as masses; crisp agendas become categorical masses.
    pub fn masses(&self, c: &Coalition) -> Result<Vec<MassFunction<W>>> {
        c.members()
            .iter()
            .map(|a| match self.get(a)? {
                Agenda::Crisp(set) => crisp_as_mass(&self.universe, set),
                Agenda::Mass(m) => Ok(m.clone()),
            })
            .collect()
    }
}

/// Intersection of the members' crisp agendas.
pub fn common_agenda<W: Weight>(assignment: &AgendaAssignment<W>, c: &Coalition) -> Result<BitSet> {
    let sets = assignment.crisp_members(c)?;
    Ok(sets
        .iter()
        .skip(1)
        .fold(sets[0].clone(), |acc, s| acc.intersection(s)))
}

/// Union of the members' crisp agendas.
pub fn distributed_agenda<W: Weight>(assignment: &AgendaAssignment<W>, c: &Coalition) -> Result<BitSet> {
    let sets = assignment.crisp_members(c)?;
    Ok(sets.iter().skip(1).fold(sets[0].clone(), |acc, s| acc.union(s)))
}

/// Categorical mass on a crisp agenda.
pub fn crisp_as_mass<W: Weight>(universe: &[String], features: &BitSet) -> Result<MassFunction<W>> {
    MassFunction::categorical(universe.to_vec(), features.clone())
}

fn pairwise<W: Weight>(
    a: &MassFunction<W>,
    b: &MassFunction<W>,
    op: impl Fn(&BitSet, &BitSet) -> BitSet,
    cap: usize,
) -> Result<MassFunction<W>> {
    a.require_same_universe(b)?;
    let mut out: BTreeMap<BitSet, W> = BTreeMap::new();
    for (x, wx) in a.focal() {
        for (y, wy) in b.focal() {
            let entry = out.entry(op(x, y)).or_insert_with(W::zero);
            *entry = entry.clone() + wx.clone() * wy.clone();
        }
    }
    if out.len() > cap {
        return Err(Error::FocalCap { count: out.len(), cap });
    }
    Ok(MassFunction::from_map(a.universe().to_vec(), out))
}

fn fold<W: Weight>(
    masses: &[MassFunction<W>],
    op: impl Fn(&BitSet, &BitSet) -> BitSet + Copy,
    cap: usize,
) -> Result<MassFunction<W>> {
    let (first, rest) = masses.split_first().ok_or(Error::Empty("mass list"))?;
    rest.iter().try_fold(first.clone(), |acc, m| pairwise(&acc, m, op, cap))
}

/// Conjunctive combination without normalization; conflict lands on the empty set.
pub fn combine_unnormalized<W: Weight>(masses: &[MassFunction<W>], cap: usize) -> Result<MassFunction<W>> {
    fold(masses, BitSet::intersection, cap)
}

/// Dempster's rule: the conjunctive combination conditioned on a nonempty intersection.
pub fn combine_dempster<W: Weight>(masses: &[MassFunction<W>], cap: usize) -> Result<MassFunction<W>> {
    let raw = combine_unnormalized(masses, cap)?;
    let empty = BitSet::empty(raw.width());
    let normalizer = W::one() - raw.mass(&empty);
    if normalizer.is_negligible() {
        return Err(Error::TotalConflict);
    }
    let focal = raw
        .focal()
        .filter(|(s, _)| !s.is_empty())
        .map(|(s, w)| (s.clone(), w.clone() / normalizer.clone()))
        .collect();
    Ok(MassFunction::from_map(raw.universe().to_vec(), focal))
}

/// Combination through unions of focal sets.
pub fn combine_disjunctive<W: Weight>(masses: &[MassFunction<W>], cap: usize) -> Result<MassFunction<W>> {
    fold(masses, BitSet::union, cap)
}

pub fn combine<W: Weight>(rule: Rule, masses: &[MassFunction<W>], cap: usize) -> Result<MassFunction<W>> {
    match rule {
        Rule::Dempster => combine_dempster(masses, cap),
        Rule::Unnormalized => combine_unnormalized(masses, cap),
        Rule::Disjunctive => combine_disjunctive(masses, cap),
    }
}

/// One lattice per focal set `Y`: the concept lattice of the subcontext on `Y`, weighted by `m(Y)`.
#[derive(Debug, Clone)]
pub struct WeightedLattice<W: Weight> {
    pub agenda: BitSet,
    pub lattice: ConceptLattice,
    pub weight: W,
}

pub fn induced_lattice_mass<W: Weight>(m: &MassFunction<W>, ctx: &FormalContext) -> Result<Vec<WeightedLattice<W>>> {
    if m.universe() != ctx.attributes() {
        return Err(Error::UniverseMismatch);
    }
    Ok(m.focal()
        .map(|(y, w)| WeightedLattice {
            agenda: y.clone(),
            lattice: build_lattice(&ctx.induce_subcontext(y)),
            weight: w.clone(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mass::tests::random_mass;
    use crate::mass::ExactMass;
    use crate::weight::rational;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn x6() -> Vec<String> {
        (1..=6).map(|i| format!("x{i}")).collect()
    }

    fn set(ix: &[usize]) -> BitSet {
        BitSet::from_indices(6, ix.iter().map(|i| i - 1))
    }

    fn crisp_assignment() -> AgendaAssignment<f64> {
        let mut a = AgendaAssignment::new(x6());
        a.insert_crisp("j1", set(&[1, 2, 5])).unwrap();
        a.insert_crisp("j2", set(&[1, 2, 3])).unwrap();
        a.insert_crisp("j3", set(&[1, 3])).unwrap();
        a
    }

    fn coalition_masses() -> Vec<ExactMass> {
        let full = BitSet::full(6);
        vec![
            ExactMass::new(x6(), [(set(&[1]), rational(6, 10)), (full.clone(), rational(4, 10))]).unwrap(),
            ExactMass::new(
                x6(),
                [(set(&[1]), rational(5, 10)), (set(&[1, 2]), rational(3, 10)), (full.clone(), rational(2, 10))],
            )
            .unwrap(),
            ExactMass::new(x6(), [(set(&[1, 2, 6]), rational(9, 10)), (full, rational(1, 10))]).unwrap(),
        ]
    }

    #[test]
    fn crisp_combinators() {
        let a = crisp_assignment();
        let all = Coalition::new(["j1", "j2", "j3"]).unwrap();
        assert_eq!(common_agenda(&a, &all).unwrap(), set(&[1]));
        assert_eq!(distributed_agenda(&a, &all).unwrap(), set(&[1, 2, 3, 5]));
        let pair = Coalition::new(["j1", "j2"]).unwrap();
        assert_eq!(common_agenda(&a, &pair).unwrap(), set(&[1, 2]));
        let one = Coalition::new(["j3"]).unwrap();
        assert_eq!(common_agenda(&a, &one).unwrap(), set(&[1, 3]));
        assert_eq!(distributed_agenda(&a, &one).unwrap(), set(&[1, 3]));
        assert!(matches!(common_agenda(&a, &Coalition::new(["j9"]).unwrap()), Err(Error::UnknownId { .. })));
        assert!(Coalition::new(Vec::<String>::new()).is_err());
        assert!(Coalition::new(["j1", "j1"]).is_err());
    }

    #[test]
    fn crisp_embedding_commutes() {
        let a = crisp_assignment();
        let all = Coalition::new(["j1", "j2", "j3"]).unwrap();
        let masses = a.masses(&all).unwrap();
        let conj = combine_unnormalized(&masses, DEFAULT_FOCAL_CAP).unwrap();
        assert_eq!(conj, MassFunction::categorical(x6(), set(&[1])).unwrap());
        let disj = combine_disjunctive(&masses, DEFAULT_FOCAL_CAP).unwrap();
        assert_eq!(disj, MassFunction::categorical(x6(), set(&[1, 2, 3, 5])).unwrap());
    }

    #[test]
    fn coalition_golden_values() {
        let ms = coalition_masses();
        let full = BitSet::full(6);
        let expected = ExactMass::new(
            x6(),
            [
                (set(&[1]), rational(8, 10)),
                (set(&[1, 2]), rational(12, 100)),
                (set(&[1, 2, 6]), rational(72, 1000)),
                (full.clone(), rational(8, 1000)),
            ],
        )
        .unwrap();
        assert_eq!(combine_dempster(&ms, DEFAULT_FOCAL_CAP).unwrap(), expected);
        assert_eq!(combine_unnormalized(&ms, DEFAULT_FOCAL_CAP).unwrap(), expected);
        let disj = ExactMass::new(x6(), [(set(&[1, 2, 6]), rational(432, 1000)), (full, rational(568, 1000))]).unwrap();
        assert_eq!(combine_disjunctive(&ms, DEFAULT_FOCAL_CAP).unwrap(), disj);
    }

    #[test]
    fn conflict_handling() {
        let x = MassFunction::<f64>::categorical(x6(), set(&[1])).unwrap();
        let y = MassFunction::<f64>::categorical(x6(), set(&[2])).unwrap();
        let un = combine_unnormalized(&[x.clone(), y.clone()], DEFAULT_FOCAL_CAP).unwrap();
        assert_eq!(un.empty_mass(), 1.0);
        assert!(matches!(combine_dempster(&[x.clone(), y.clone()], DEFAULT_FOCAL_CAP), Err(Error::TotalConflict)));
        let d = combine_disjunctive(&[x, y], DEFAULT_FOCAL_CAP).unwrap();
        assert_eq!(d, MassFunction::categorical(x6(), set(&[1, 2])).unwrap());
    }

    #[test]
    fn cap_and_mismatch() {
        let u: Vec<String> = (0..8).map(|i| format!("f{i}")).collect();
        let m = |a: usize, b: usize| {
            MassFunction::<f64>::new(
                u.clone(),
                [(BitSet::from_indices(8, [a]), 0.5), (BitSet::from_indices(8, [b]), 0.5)],
            )
            .unwrap()
        };
        let ms = [m(0, 1), m(2, 3), m(4, 5)];
        assert!(matches!(combine_disjunctive(&ms, 4), Err(Error::FocalCap { count: 8, cap: 4 })));
        assert!(combine_disjunctive(&ms, 8).is_ok());
        let other = MassFunction::<f64>::vacuous(x6()).unwrap();
        assert!(matches!(combine_unnormalized(&[m(0, 1), other], 64), Err(Error::UniverseMismatch)));
        assert!(matches!(combine_unnormalized::<f64>(&[], 64), Err(Error::Empty(_))));
    }

    #[test]
    fn induced_lattices() {
        let ctx = FormalContext::from_named(&["a", "b"], &["x", "y", "z"], &[("a", "x"), ("a", "y"), ("a", "z"), ("b", "y")])
            .unwrap();
        let u = ctx.attributes().to_vec();
        let m = MassFunction::<f64>::new(
            u.clone(),
            [(BitSet::empty(3), 0.25), (BitSet::from_indices(3, [1]), 0.25), (BitSet::full(3), 0.5)],
        )
        .unwrap();
        let family = induced_lattice_mass(&m, &ctx).unwrap();
        assert_eq!(family.len(), 3);
        assert_eq!(family[0].lattice.len(), 1);
        assert!((family.iter().map(|l| l.weight).sum::<f64>() - 1.0).abs() < 1e-12);
        let cat = MassFunction::<f64>::categorical(u, BitSet::full(3)).unwrap();
        assert_eq!(induced_lattice_mass(&cat, &ctx).unwrap().len(), 1);
    }

    fn vacuous(n: usize) -> ExactMass {
        ExactMass::vacuous((0..n).map(|i| format!("f{i}")).collect()).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(120))]

        #[test]
        fn combinators_commute_and_associate(a in random_mass(4, 4, true), b in random_mass(4, 4, true), c in random_mass(4, 4, true)) {
            for rule in [Rule::Unnormalized, Rule::Disjunctive] {
                let ab = combine(rule, &[a.clone(), b.clone()], 4096).unwrap();
                let ba = combine(rule, &[b.clone(), a.clone()], 4096).unwrap();
                prop_assert_eq!(&ab, &ba);
                let left = combine(rule, &[ab, c.clone()], 4096).unwrap();
                let bc = combine(rule, &[b.clone(), c.clone()], 4096).unwrap();
                let right = combine(rule, &[a.clone(), bc], 4096).unwrap();
                prop_assert_eq!(&left, &right);
                let fa = a.to_float();
                let fb = b.to_float();
                let fab = combine(rule, &[fa.clone(), fb.clone()], 4096).unwrap();
                let fba = combine(rule, &[fb, fa], 4096).unwrap();
                prop_assert!(fab.approx_eq_loose(&fba));
            }
        }

        #[test]
        fn identities(m in random_mass(4, 5, true)) {
            let v = vacuous(4);
            prop_assert_eq!(&combine_unnormalized(&[m.clone(), v.clone()], 64).unwrap(), &m);
            if m.empty_mass() == rational(0, 1) {
                prop_assert_eq!(&combine_dempster(&[m.clone(), v.clone()], 64).unwrap(), &m);
            }
            prop_assert_eq!(combine_disjunctive(&[m.clone(), v.clone()], 64).unwrap(), v);
            let total: BigRational = combine_dempster(&[m.clone(), m.clone()], 64)
                .map(|r| r.total())
                .unwrap_or_else(|_| rational(1, 1));
            prop_assert_eq!(total, rational(1, 1));
        }
    }
}
