//! Stability of object sets under a non-crisp agenda and the
//! β-categorization lattice built from the stable extents.

use std::collections::BTreeSet;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::fca::{build_lattice, ConceptLattice, FormalContext, ObjectSet};
use crate::mass::MassFunction;
use crate::weight::Weight;

fn check_universe<W: Weight>(ctx: &FormalContext, m: &MassFunction<W>) -> Result<()> {
    if m.universe() != ctx.attributes() {
        return Err(Error::UniverseMismatch);
    }
    Ok(())
}

fn rho<W: Weight>(ctx: &FormalContext, m: &MassFunction<W>, g: &ObjectSet) -> W {
    W::total(m.focal().filter(|(y, _)| ctx.is_stable_under(g, y)).map(|(_, w)| w))
}

/// Total mass of the focal sets `Y` under which `g` is an extent of the subcontext on `Y`.
pub fn stability_index<W: Weight>(ctx: &FormalContext, m: &MassFunction<W>, g: &ObjectSet) -> Result<W> {
    check_universe(ctx, m)?;
    Ok(rho(ctx, m, g))
}

#[derive(Debug, Clone)]
pub struct StabilityReport<W: Weight> {
    /// Extents of the full lattice with their stability, by descending stability.
    pub entries: Vec<(ObjectSet, W)>,
}

/// Stability of every extent of the full concept lattice.
pub fn stability_report<W: Weight>(ctx: &FormalContext, m: &MassFunction<W>) -> Result<StabilityReport<W>> {
    check_universe(ctx, m)?;
    let lattice = build_lattice(ctx);
    let mut entries: Vec<(ObjectSet, W)> = lattice
        .concepts()
        .iter()
        .map(|c| (c.extent.clone(), rho(ctx, m, &c.extent)))
        .collect();
    // stable sort keeps graded extent order among ties
    entries.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    Ok(StabilityReport { entries })
}

/// Extents of the full lattice whose stability is at least `beta`. Ties count.
pub fn stable_concepts<W: Weight>(ctx: &FormalContext, m: &MassFunction<W>, beta: &W) -> Result<Vec<ObjectSet>> {
    check_universe(ctx, m)?;
    let lattice = build_lattice(ctx);
    Ok(lattice
        .concepts()
        .iter()
        .filter(|c| beta.le_tol(&rho(ctx, m, &c.extent)))
        .map(|c| c.extent.clone())
        .collect())
}

/// Closure of `sets` under pairwise intersection, always containing `top`.
pub fn meet_closure(sets: &[BitSet], top: &BitSet) -> BTreeSet<BitSet> {
    let mut closed: BTreeSet<BitSet> = BTreeSet::new();
    closed.insert(top.clone());
    let mut frontier: Vec<BitSet> = Vec::new();
    for s in sets {
        if closed.insert(s.clone()) {
            frontier.push(s.clone());
        }
    }
    while let Some(s) = frontier.pop() {
        let current: Vec<BitSet> = closed.iter().cloned().collect();
        for t in current {
            let meet = s.intersection(&t);
            if closed.insert(meet.clone()) {
                frontier.push(meet);
            }
        }
    }
    closed
}

#[derive(Debug, Clone)]
pub struct BetaCategorization<W: Weight> {
    pub beta: W,
    pub generators: Vec<ObjectSet>,
    pub lattice: ConceptLattice,
}

/// Meet-closure of the stable extents together with the full object set.
pub fn beta_lattice<W: Weight>(ctx: &FormalContext, m: &MassFunction<W>, beta: &W) -> Result<BetaCategorization<W>> {
    let generators = stable_concepts(ctx, m, beta)?;
    let closed = meet_closure(&generators, &ctx.all_objects());
    Ok(BetaCategorization {
        beta: beta.clone(),
        generators,
        lattice: ConceptLattice::from_extents(ctx, closed),
    })
}

/// The lattice of the single heaviest focal set; ties go to the first focal set in graded order.
pub fn argmax_lattice<W: Weight>(ctx: &FormalContext, m: &MassFunction<W>) -> Result<ConceptLattice> {
    check_universe(ctx, m)?;
    let mut best: Option<(&BitSet, &W)> = None;
    for (y, w) in m.focal() {
        if best.is_none_or(|(_, bw)| w > bw) {
            best = Some((y, w));
        }
    }
    let (y, _) = best.ok_or(Error::Empty("mass function"))?;
    let sub = ctx.induce_subcontext(y);
    let lattice = build_lattice(&sub);
    Ok(ConceptLattice::from_extents(ctx, lattice.concepts().iter().map(|c| c.extent.clone())))
}
