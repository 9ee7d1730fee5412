//! Two-valued formal contexts, derivation operators and concept lattices.
//!
//! Object and attribute sets are [`BitSet`]s over the index space of one
//! context. A concept is identified by its extent; lattices list concepts in
//! graded extent order (size, then lexicographic) so exports are reproducible.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::bitset::{graded_subsets, BitSet};
use crate::error::{Error, Result};

pub type ObjectSet = BitSet;
pub type AttributeSet = BitSet;

/// Limit on the smaller context dimension for [`brute_force_concepts`].
pub const BRUTE_FORCE_ATTRIBUTE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalContext {
    objects: Vec<String>,
    attributes: Vec<String>,
    /// Attribute set of each object.
    rows: Vec<AttributeSet>,
    /// Object set of each attribute.
    cols: Vec<ObjectSet>,
}

fn check_unique(kind: &'static str, ids: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateId {
                kind,
                id: id.clone(),
            });
        }
    }
    Ok(())
}

impl FormalContext {
    /// Builds a context from `(object index, attribute index)` incidence pairs.
    pub fn new<I>(objects: Vec<String>, attributes: Vec<String>, incidence: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut rows = vec![BitSet::empty(attributes.len()); objects.len()];
        for (o, a) in incidence {
            if o >= objects.len() || a >= attributes.len() {
                return Err(Error::IncidenceOutOfBounds {
                    object: o,
                    attribute: a,
                });
            }
            rows[o].insert(a);
        }
        Self::from_rows(objects, attributes, rows)
    }

    pub fn from_rows(
        objects: Vec<String>,
        attributes: Vec<String>,
        rows: Vec<AttributeSet>,
    ) -> Result<Self> {
        check_unique("object", &objects)?;
        check_unique("attribute", &attributes)?;
        if rows.len() != objects.len() {
            return Err(Error::Dimension {
                expected: objects.len(),
                actual: rows.len(),
            });
        }
        for row in &rows {
            if row.width() != attributes.len() {
                return Err(Error::Dimension {
                    expected: attributes.len(),
                    actual: row.width(),
                });
            }
        }
        let mut cols = vec![BitSet::empty(objects.len()); attributes.len()];
        for (o, row) in rows.iter().enumerate() {
            for a in row.iter() {
                cols[a].insert(o);
            }
        }
        Ok(FormalContext {
            objects,
            attributes,
            rows,
            cols,
        })
    }

    /// Convenience constructor from identifier slices and named incidence pairs.
    pub fn from_named(objects: &[&str], attributes: &[&str], incidence: &[(&str, &str)]) -> Result<Self> {
        let objects: Vec<String> = objects.iter().map(|s| s.to_string()).collect();
        let attributes: Vec<String> = attributes.iter().map(|s| s.to_string()).collect();
        let mut pairs = Vec::with_capacity(incidence.len());
        for (o, a) in incidence {
            pairs.push((index_of("object", &objects, o)?, index_of("attribute", &attributes, a)?));
        }
        Self::new(objects, attributes, pairs)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn object_index(&self, id: &str) -> Result<usize> {
        index_of("object", &self.objects, id)
    }

    pub fn attribute_index(&self, id: &str) -> Result<usize> {
        index_of("attribute", &self.attributes, id)
    }

    pub fn has(&self, object: usize, attribute: usize) -> bool {
        self.rows[object].contains(attribute)
    }

    /// Attribute set of a single object.
    pub fn row(&self, object: usize) -> &AttributeSet {
        &self.rows[object]
    }

    /// Object set of a single attribute.
    pub fn column(&self, attribute: usize) -> &ObjectSet {
        &self.cols[attribute]
    }

    pub fn all_objects(&self) -> ObjectSet {
        BitSet::full(self.objects.len())
    }

    pub fn all_attributes(&self) -> AttributeSet {
        BitSet::full(self.attributes.len())
    }

    pub fn object_set(&self, ids: &[&str]) -> Result<ObjectSet> {
        let idx = ids.iter().map(|id| self.object_index(id)).collect::<Result<Vec<_>>>()?;
        Ok(BitSet::from_indices(self.objects.len(), idx))
    }

    pub fn attribute_set(&self, ids: &[&str]) -> Result<AttributeSet> {
        let idx = ids.iter().map(|id| self.attribute_index(id)).collect::<Result<Vec<_>>>()?;
        Ok(BitSet::from_indices(self.attributes.len(), idx))
    }

    pub fn object_names(&self, set: &ObjectSet) -> Vec<String> {
        set.iter().map(|i| self.objects[i].clone()).collect()
    }

    pub fn attribute_names(&self, set: &AttributeSet) -> Vec<String> {
        set.iter().map(|i| self.attributes[i].clone()).collect()
    }

    /// Attributes shared by every object of `objects`. The empty set maps to all attributes.
    pub fn intent_of(&self, objects: &ObjectSet) -> AttributeSet {
        let mut acc = self.all_attributes();
        for o in objects.iter() {
            acc.intersect_with(&self.rows[o]);
        }
        acc
    }

    /// Objects having every attribute of `attributes`. The empty set maps to all objects.
    pub fn extent_of(&self, attributes: &AttributeSet) -> ObjectSet {
        let mut acc = self.all_objects();
        for a in attributes.iter() {
            acc.intersect_with(&self.cols[a]);
        }
        acc
    }

    pub fn object_closure(&self, objects: &ObjectSet) -> ObjectSet {
        self.extent_of(&self.intent_of(objects))
    }

    pub fn attribute_closure(&self, attributes: &AttributeSet) -> AttributeSet {
        self.intent_of(&self.extent_of(attributes))
    }

    pub fn is_galois_stable(&self, objects: &ObjectSet) -> bool {
        &self.object_closure(objects) == objects
    }

    /// Closure of `objects` in the subcontext restricted to `agenda`, computed
    /// without materializing the subcontext.
    pub fn object_closure_under(&self, objects: &ObjectSet, agenda: &AttributeSet) -> ObjectSet {
        self.extent_of(&self.intent_of(objects).intersection(agenda))
    }

    /// Whether `objects` is an extent of the subcontext restricted to `agenda`.
    pub fn is_stable_under(&self, objects: &ObjectSet, agenda: &AttributeSet) -> bool {
        &self.object_closure_under(objects, agenda) == objects
    }

    /// `(A, Y, I ∩ (A × Y))`: same objects, attributes restricted to `agenda`
    /// in their original order.
    pub fn induce_subcontext(&self, agenda: &AttributeSet) -> FormalContext {
        let kept: Vec<usize> = agenda.iter().collect();
        let attributes: Vec<String> = kept.iter().map(|&a| self.attributes[a].clone()).collect();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                BitSet::from_indices(
                    kept.len(),
                    kept.iter().enumerate().filter(|(_, &a)| row.contains(a)).map(|(i, _)| i),
                )
            })
            .collect();
        FormalContext::from_rows(self.objects.clone(), attributes, rows)
            .expect("restriction of a valid context is valid")
    }
}

fn index_of(kind: &'static str, ids: &[String], id: &str) -> Result<usize> {
    ids.iter().position(|x| x == id).ok_or_else(|| Error::UnknownId {
        kind,
        id: id.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormalConcept {
    pub extent: ObjectSet,
    pub intent: AttributeSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptLattice {
    objects: Vec<String>,
    attributes: Vec<String>,
    concepts: Vec<FormalConcept>,
    /// Hasse edges `(lower, upper)` as indices into `concepts`.
    covers: Vec<(usize, usize)>,
}

impl ConceptLattice {
    /// Sorts and deduplicates `concepts` by extent and computes the cover relation.
    pub fn from_concepts(ctx: &FormalContext, concepts: impl IntoIterator<Item = FormalConcept>) -> Self {
        let mut concepts: Vec<FormalConcept> = concepts.into_iter().collect();
        concepts.sort_by(|a, b| a.extent.cmp(&b.extent));
        concepts.dedup_by(|a, b| a.extent == b.extent);
        let covers = cover_relation(&concepts);
        ConceptLattice {
            objects: ctx.objects.clone(),
            attributes: ctx.attributes.clone(),
            concepts,
            covers,
        }
    }

    /// Lattice of the given extents of `ctx`, with intents recomputed in `ctx`.
    pub fn from_extents(ctx: &FormalContext, extents: impl IntoIterator<Item = ObjectSet>) -> Self {
        Self::from_concepts(
            ctx,
            extents.into_iter().map(|e| FormalConcept {
                intent: ctx.intent_of(&e),
                extent: e,
            }),
        )
    }

    pub fn concepts(&self) -> &[FormalConcept] {
        &self.concepts
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn extents(&self) -> BTreeSet<ObjectSet> {
        self.concepts.iter().map(|c| c.extent.clone()).collect()
    }

    pub fn contains_extent(&self, extent: &ObjectSet) -> bool {
        self.concepts.binary_search_by(|c| c.extent.cmp(extent)).is_ok()
    }

    /// Largest extent. Present for every lattice built from a context.
    pub fn top(&self) -> Option<&FormalConcept> {
        self.concepts.last()
    }

    pub fn bottom(&self) -> Option<&FormalConcept> {
        self.concepts.first()
    }

    pub fn to_export(&self) -> LatticeExport {
        let names = |set: &BitSet, ids: &[String]| set.iter().map(|i| ids[i].clone()).collect();
        LatticeExport {
            objects: self.objects.clone(),
            attributes: self.attributes.clone(),
            concepts: self
                .concepts
                .iter()
                .map(|c| ConceptExport {
                    extent: names(&c.extent, &self.objects),
                    intent: names(&c.intent, &self.attributes),
                })
                .collect(),
            covers: self.covers.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    /// Graphviz rendering, bottom-to-top, nodes labeled by extent ids.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=box, fontsize=10];\n");
        for (i, c) in self.concepts.iter().enumerate() {
            let label = c
                .extent
                .iter()
                .map(|o| self.objects[o].as_str())
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&format!("  c{i} [label=\"{}\"];\n", escape_dot(&label)));
        }
        for &(lo, hi) in &self.covers {
            out.push_str(&format!("  c{lo} -> c{hi};\n"));
        }
        out.push_str("}\n");
        out
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Transitive reduction of strict extent inclusion over graded-sorted concepts.
fn cover_relation(concepts: &[FormalConcept]) -> Vec<(usize, usize)> {
    let mut covers = Vec::new();
    for (i, lower) in concepts.iter().enumerate() {
        let mut uppers: Vec<usize> = Vec::new();
        for (j, upper) in concepts.iter().enumerate().skip(i + 1) {
            if !lower.extent.is_proper_subset(&upper.extent) {
                continue;
            }
            // graded order visits smaller candidates first
            if uppers.iter().all(|&k| !concepts[k].extent.is_subset(&upper.extent)) {
                uppers.push(j);
            }
        }
        covers.extend(uppers.into_iter().map(|j| (i, j)));
    }
    covers.sort_unstable();
    covers
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptExport {
    pub extent: Vec<String>,
    pub intent: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeExport {
    pub objects: Vec<String>,
    pub attributes: Vec<String>,
    pub concepts: Vec<ConceptExport>,
    pub covers: Vec<[usize; 2]>,
}

/// All formal concepts of `ctx` by Close-by-One over attributes in declared order.
pub fn build_lattice(ctx: &FormalContext) -> ConceptLattice {
    let top_extent = ctx.all_objects();
    let top_intent = ctx.intent_of(&top_extent);
    let mut found = Vec::new();
    close_by_one(ctx, top_extent, top_intent, 0, &mut found);
    ConceptLattice::from_concepts(ctx, found)
}

fn close_by_one(
    ctx: &FormalContext,
    extent: ObjectSet,
    intent: AttributeSet,
    start: usize,
    out: &mut Vec<FormalConcept>,
) {
    for j in start..ctx.attribute_count() {
        if intent.contains(j) {
            continue;
        }
        let next_extent = extent.intersection(ctx.column(j));
        let next_intent = ctx.intent_of(&next_extent);
        // canonicity: no attribute before j may be added by the closure
        if next_intent.agrees_below(&intent, j) {
            close_by_one(ctx, next_extent, next_intent, j + 1, out);
        }
    }
    out.push(FormalConcept { extent, intent });
}

/// Test oracle: closes every subset of the smaller side (objects or
/// attributes) and keeps the distinct results.
pub fn brute_force_concepts(ctx: &FormalContext) -> Result<ConceptLattice> {
    let (g, m) = (ctx.object_count(), ctx.attribute_count());
    let n = g.min(m);
    if n > BRUTE_FORCE_ATTRIBUTE_LIMIT {
        return Err(Error::Guard {
            what: "smaller context dimension",
            actual: n,
            limit: BRUTE_FORCE_ATTRIBUTE_LIMIT,
        });
    }
    let intents: BTreeSet<AttributeSet> = if m <= g {
        graded_subsets(m).iter().map(|s| ctx.attribute_closure(s)).collect()
    } else {
        graded_subsets(g).iter().map(|s| ctx.intent_of(&ctx.object_closure(s))).collect()
    };
    Ok(ConceptLattice::from_concepts(
        ctx,
        intents.into_iter().map(|intent| FormalConcept {
            extent: ctx.extent_of(&intent),
            intent,
        }),
    ))
}
