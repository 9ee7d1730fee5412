//! Dempster-Shafer mass functions over a finite feature universe.
//!
//! A [`MassFunction`] stores its focal sets sparsely as bitsets over the
//! universe. Weights are generic over [`Weight`], so the same code runs in
//! floating point (tolerance 1e-9) or in exact rationals.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::scaling::{base_feature_of, scaled_attributes, ScalingSpec};
use crate::weight::Weight;

/// Largest universe accepted by table-based operations such as [`mass_from_bel`].
pub const TABLE_UNIVERSE_LIMIT: usize = 16;

#[derive(Clone, PartialEq)]
pub struct MassFunction<W: Weight = f64> {
    universe: Vec<String>,
    focal: BTreeMap<BitSet, W>,
}

pub type ExactMass = MassFunction<BigRational>;

impl<W: Weight> MassFunction<W> {
    /// Validates and builds a mass function. Zero weights are dropped; negative
    /// weights, repeated focal sets and totals away from 1 are rejected.
    pub fn new<I>(universe: Vec<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BitSet, W)>,
    {
        check_universe(&universe)?;
        let mut focal = BTreeMap::new();
        for (set, w) in entries {
            if set.width() != universe.len() {
                return Err(Error::Dimension {
                    expected: universe.len(),
                    actual: set.width(),
                });
            }
            if w < W::zero() && !w.is_negligible() {
                return Err(Error::InvalidMass(format!("negative mass {:?} on {}", w, names(&universe, &set))));
            }
            if focal.contains_key(&set) {
                return Err(Error::InvalidMass(format!("focal set {} listed twice", names(&universe, &set))));
            }
            if w > W::zero() {
                focal.insert(set, w);
            }
        }
        let m = MassFunction { universe, focal };
        let total = m.total();
        if !total.approx_eq(&W::one()) {
            return Err(Error::InvalidMass(format!("masses sum to {:?}, not 1", total)));
        }
        Ok(m)
    }

    /// Builds from named focal sets: `[(&["x1"], 0.6), (&["x1", "x2"], 0.4)]`.
    pub fn from_named<S: AsRef<str>>(universe: &[S], entries: &[(&[&str], W)]) -> Result<Self> {
        let universe: Vec<String> = universe.iter().map(|s| s.as_ref().to_string()).collect();
        let mut sets = Vec::with_capacity(entries.len());
        for (ids, w) in entries {
            sets.push((subset_of(&universe, ids)?, w.clone()));
        }
        Self::new(universe, sets)
    }

    /// Skips the total check; used by combinators whose output is normalized by construction.
    pub(crate) fn from_map(universe: Vec<String>, focal: BTreeMap<BitSet, W>) -> Self {
        let focal = focal.into_iter().filter(|(_, w)| *w > W::zero()).collect();
        MassFunction { universe, focal }
    }

    pub fn vacuous(universe: Vec<String>) -> Result<Self> {
        let full = BitSet::full(universe.len());
        Self::new(universe, [(full, W::one())])
    }

    pub fn categorical(universe: Vec<String>, set: BitSet) -> Result<Self> {
        Self::new(universe, [(set, W::one())])
    }

    /// Mass `alpha` on `set` and `1 - alpha` on the whole universe.
    pub fn simple(universe: Vec<String>, set: BitSet, alpha: W) -> Result<Self> {
        if alpha < W::zero() || alpha > W::one() {
            return Err(Error::InvalidMass(format!("alpha {:?} outside [0, 1]", alpha)));
        }
        if set.is_full() {
            return Err(Error::InvalidMass("simple mass needs a proper subset; use vacuous".into()));
        }
        let full = BitSet::full(universe.len());
        let rest = W::one() - alpha.clone();
        Self::new(universe, [(set, alpha), (full, rest)])
    }

    /// Bayesian mass with `m({y}) = v(y)`.
    ///
    /// The per-feature rule `m(Y) = sum of v(y) over y in Y` would put mass on
    /// every subset and overshoot 1, so it is read as mass on singletons only.
    pub fn from_importances(v: &ImportanceVector<W>) -> Result<Self> {
        let n = v.features.len();
        Self::new(
            v.features.clone(),
            v.values
                .iter()
                .enumerate()
                .map(|(i, w)| (BitSet::from_indices(n, [i]), w.clone())),
        )
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn width(&self) -> usize {
        self.universe.len()
    }

    pub fn focal(&self) -> impl Iterator<Item = (&BitSet, &W)> {
        self.focal.iter()
    }

    pub fn focal_sets(&self) -> impl Iterator<Item = &BitSet> {
        self.focal.keys()
    }

    pub fn focal_count(&self) -> usize {
        self.focal.len()
    }

    pub fn mass(&self, set: &BitSet) -> W {
        self.focal.get(set).cloned().unwrap_or_else(W::zero)
    }

    pub fn empty_mass(&self) -> W {
        self.mass(&BitSet::empty(self.width()))
    }

    pub fn total(&self) -> W {
        W::total(self.focal.values())
    }

    pub fn index_of(&self, feature: &str) -> Result<usize> {
        self.universe.iter().position(|f| f == feature).ok_or_else(|| Error::UnknownId {
            kind: "feature",
            id: feature.to_string(),
        })
    }

    pub fn set_of(&self, ids: &[&str]) -> Result<BitSet> {
        subset_of(&self.universe, ids)
    }

    pub fn names_of(&self, set: &BitSet) -> Vec<String> {
        set.iter().map(|i| self.universe[i].clone()).collect()
    }

    pub fn same_universe(&self, other: &Self) -> bool {
        self.universe == other.universe
    }

    pub fn require_same_universe(&self, other: &Self) -> Result<()> {
        if self.same_universe(other) {
            Ok(())
        } else {
            Err(Error::UniverseMismatch)
        }
    }

    /// Sum of masses of focal subsets of `set`.
    pub fn bel(&self, set: &BitSet) -> W {
        W::total(self.focal.iter().filter(|(f, _)| f.is_subset(set)).map(|(_, w)| w))
    }

    /// Sum of masses of focal sets meeting `set`.
    pub fn pl(&self, set: &BitSet) -> W {
        W::total(self.focal.iter().filter(|(f, _)| !f.is_disjoint(set)).map(|(_, w)| w))
    }

    /// Sum of masses of focal supersets of `set`.
    pub fn q(&self, set: &BitSet) -> W {
        W::total(self.focal.iter().filter(|(f, _)| set.is_subset(f)).map(|(_, w)| w))
    }

    /// Total mass of the listed sets.
    pub fn upset_probability(&self, family: &[BitSet]) -> W {
        W::total(family.iter().filter_map(|s| self.focal.get(s)))
    }

    /// `bel` for every subset, indexed by bit mask.
    pub fn bel_table(&self) -> Result<Vec<W>> {
        guard_table(self.width())?;
        let n = self.width();
        let mut table = vec![W::zero(); 1 << n];
        for (f, w) in &self.focal {
            table[f.to_mask() as usize] = w.clone();
        }
        // zeta transform over subsets
        for bit in 0..n {
            for mask in 0..(1usize << n) {
                if mask & (1 << bit) != 0 {
                    let lower = table[mask ^ (1 << bit)].clone();
                    table[mask] = table[mask].clone() + lower;
                }
            }
        }
        Ok(table)
    }

    /// Each focal set `F` becomes `{f#k | f in F, 1 <= k <= s}`.
    pub fn expand_to_scaled(&self, spec: ScalingSpec) -> MassFunction<W> {
        let s = spec.s();
        let universe = scaled_attributes(&self.universe, spec);
        let width = universe.len();
        let focal = self
            .focal
            .iter()
            .map(|(f, w)| {
                let set = BitSet::from_indices(width, f.iter().flat_map(|i| (i * s)..(i * s + s)));
                (set, w.clone())
            })
            .collect();
        MassFunction { universe, focal }
    }

    /// Contracts a scaled mass to base features: each attribute `f#k` maps to `f`.
    pub fn contract_to_base(&self) -> Result<MassFunction<W>> {
        let mut base: Vec<String> = Vec::new();
        let mut map = Vec::with_capacity(self.width());
        for attr in &self.universe {
            let (feature, _) = base_feature_of(attr)?;
            let idx = match base.iter().position(|b| *b == feature) {
                Some(i) => i,
                None => {
                    base.push(feature);
                    base.len() - 1
                }
            };
            map.push(idx);
        }
        let width = base.len();
        let mut focal: BTreeMap<BitSet, W> = BTreeMap::new();
        for (f, w) in &self.focal {
            let set = BitSet::from_indices(width, f.iter().map(|i| map[i]));
            let entry = focal.entry(set).or_insert_with(W::zero);
            *entry = entry.clone() + w.clone();
        }
        Ok(MassFunction { universe: base, focal })
    }

    /// `BetP(y) = sum over focal F containing y of m(F) / |F|`.
    pub fn pignistic(&self) -> Result<ImportanceVector<W>> {
        if !self.empty_mass().is_negligible() {
            return Err(Error::TransformUndefined(format!(
                "pignistic transform needs m(empty) = 0, got {:?}",
                self.empty_mass()
            )));
        }
        let mut values = vec![W::zero(); self.width()];
        for (f, w) in &self.focal {
            if f.is_empty() {
                continue;
            }
            let share = w.clone() / W::from_ratio(f.len() as i64, 1);
            for y in f.iter() {
                values[y] = values[y].clone() + share.clone();
            }
        }
        Ok(ImportanceVector {
            features: self.universe.clone(),
            values,
        })
    }

    /// `pl({y})` normalized over all features.
    pub fn plausibility_transform(&self) -> Result<ImportanceVector<W>> {
        let n = self.width();
        let pls: Vec<W> = (0..n).map(|y| self.pl(&BitSet::from_indices(n, [y]))).collect();
        let total = W::total(&pls);
        if total.is_negligible() {
            return Err(Error::TransformUndefined("all singleton plausibilities are zero".into()));
        }
        Ok(ImportanceVector {
            features: self.universe.clone(),
            values: pls.into_iter().map(|p| p / total.clone()).collect(),
        })
    }

    pub fn map_weights<V: Weight>(&self, f: impl Fn(&W) -> V) -> MassFunction<V> {
        MassFunction {
            universe: self.universe.clone(),
            focal: self.focal.iter().map(|(s, w)| (s.clone(), f(w))).collect(),
        }
    }

    pub fn to_exact(&self) -> ExactMass {
        self.map_weights(Weight::to_rational)
    }

    pub fn to_float(&self) -> MassFunction<f64> {
        self.map_weights(Weight::to_f64)
    }

    /// Same weights over a reordered or enlarged universe.
    pub fn relabel(&self, universe: &[String]) -> Result<MassFunction<W>> {
        let idx: Vec<usize> = self
            .universe
            .iter()
            .map(|f| {
                universe.iter().position(|u| u == f).ok_or_else(|| Error::UnknownId {
                    kind: "feature",
                    id: f.clone(),
                })
            })
            .collect::<Result<_>>()?;
        let width = universe.len();
        let focal = self
            .focal
            .iter()
            .map(|(s, w)| (BitSet::from_indices(width, s.iter().map(|i| idx[i])), w.clone()))
            .collect();
        Ok(MassFunction {
            universe: universe.to_vec(),
            focal,
        })
    }

    /// Focal sets agree and weights are equal up to tolerance.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.universe == other.universe
            && self.focal.len() == other.focal.len()
            && self
                .focal
                .iter()
                .all(|(s, w)| other.focal.get(s).is_some_and(|v| w.approx_eq(v)))
    }

    /// Weights agree up to tolerance, treating missing sets as 0.
    pub fn approx_eq_loose(&self, other: &Self) -> bool {
        self.universe == other.universe
            && self
                .focal
                .keys()
                .chain(other.focal.keys())
                .all(|s| self.mass(s).approx_eq(&other.mass(s)))
    }

    pub fn to_json(&self, level: Level) -> MassJson {
        MassJson {
            universe: self.universe.clone(),
            level,
            focal: self
                .focal
                .iter()
                .map(|(s, w)| FocalJson {
                    set: self.names_of(s),
                    mass: w.to_f64(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &MassJson) -> Result<Self> {
        let mut entries = Vec::with_capacity(json.focal.len());
        for f in &json.focal {
            let ids: Vec<&str> = f.set.iter().map(String::as_str).collect();
            entries.push((subset_of(&json.universe, &ids)?, W::from_f64(f.mass)));
        }
        Self::new(json.universe.clone(), entries)
    }
}

impl<W: Weight> fmt::Debug for MassFunction<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (s, w) in &self.focal {
            map.entry(&names(&self.universe, s), w);
        }
        map.finish()
    }
}

/// Möbius inversion of a belief table indexed by bit mask.
pub fn mass_from_bel<W: Weight>(universe: Vec<String>, table: &[W]) -> Result<MassFunction<W>> {
    let n = universe.len();
    guard_table(n)?;
    if table.len() != 1 << n {
        return Err(Error::Dimension {
            expected: 1 << n,
            actual: table.len(),
        });
    }
    let mut m = table.to_vec();
    for bit in 0..n {
        for mask in 0..(1usize << n) {
            if mask & (1 << bit) != 0 {
                let lower = m[mask ^ (1 << bit)].clone();
                m[mask] = m[mask].clone() - lower;
            }
        }
    }
    let mut entries = Vec::new();
    for (mask, w) in m.into_iter().enumerate() {
        let set = BitSet::from_mask(n, mask as u64);
        if w.is_negligible() {
            continue;
        }
        if w < W::zero() {
            return Err(Error::NotBelief {
                set: names(&universe, &set),
                mass: w.to_f64(),
            });
        }
        entries.push((set, w));
    }
    MassFunction::new(universe, entries)
}

fn guard_table(n: usize) -> Result<()> {
    if n > TABLE_UNIVERSE_LIMIT {
        return Err(Error::Guard {
            what: "universe size",
            actual: n,
            limit: TABLE_UNIVERSE_LIMIT,
        });
    }
    Ok(())
}

fn check_universe(universe: &[String]) -> Result<()> {
    for (i, u) in universe.iter().enumerate() {
        if universe[..i].contains(u) {
            return Err(Error::DuplicateId {
                kind: "feature",
                id: u.clone(),
            });
        }
    }
    Ok(())
}

pub(crate) fn subset_of<S: AsRef<str>>(universe: &[String], ids: &[S]) -> Result<BitSet> {
    let mut set = BitSet::empty(universe.len());
    for id in ids {
        let id = id.as_ref();
        let i = universe.iter().position(|u| u == id).ok_or_else(|| Error::UnknownId {
            kind: "feature",
            id: id.to_string(),
        })?;
        set.insert(i);
    }
    Ok(set)
}

pub(crate) fn names(universe: &[String], set: &BitSet) -> String {
    let items: Vec<&str> = set.iter().map(|i| universe[i].as_str()).collect();
    format!("{{{}}}", items.join(", "))
}

/// Per-feature importance values.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceVector<W: Weight = f64> {
    pub features: Vec<String>,
    pub values: Vec<W>,
}

impl<W: Weight> ImportanceVector<W> {
    /// With `normalize`, divides by the total; otherwise the values must already sum to 1.
    pub fn new(features: Vec<String>, values: Vec<W>, normalize: bool) -> Result<Self> {
        if features.len() != values.len() {
            return Err(Error::Dimension {
                expected: features.len(),
                actual: values.len(),
            });
        }
        check_universe(&features)?;
        if let Some(v) = values.iter().find(|v| **v < W::zero()) {
            return Err(Error::InvalidMass(format!("negative importance {v:?}")));
        }
        let total = W::total(&values);
        if normalize {
            if total.is_negligible() {
                return Err(Error::InvalidMass("importances are all zero".into()));
            }
            let values = values.into_iter().map(|v| v / total.clone()).collect();
            return Ok(ImportanceVector { features, values });
        }
        if !total.approx_eq(&W::one()) {
            return Err(Error::InvalidMass(format!("importances sum to {total:?}, not 1")));
        }
        Ok(ImportanceVector { features, values })
    }

    pub fn get(&self, feature: &str) -> Option<&W> {
        self.features.iter().position(|f| f == feature).map(|i| &self.values[i])
    }

    pub fn total(&self) -> W {
        W::total(&self.values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Base,
    Scaled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FocalJson {
    pub set: Vec<String>,
    pub mass: f64,
}

/// `{"universe": [...], "level": "base"|"scaled", "focal": [{"set": [...], "mass": 0.6}]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassJson {
    pub universe: Vec<String>,
    pub level: Level,
    pub focal: Vec<FocalJson>,
}
