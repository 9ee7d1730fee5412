//! Concept lattices over formal contexts, Dempster-Shafer interrogative
//! agendas, stability-based categorization, mass-function orderings and an
//! agenda-weighted outlier learner.

pub mod agendas;
pub mod canonical;
pub mod bitset;
pub mod error;
pub mod fca;
pub mod flow;
pub mod fsn;
pub mod mass;
pub mod metalearn;
pub mod orders;
pub mod scaling;
pub mod simplex;
pub mod stability;
pub mod weight;

pub use bitset::BitSet;
pub use num_rational::BigRational;
pub use error::{Error, Result};
pub use fca::{build_lattice, brute_force_concepts, ConceptLattice, FormalConcept, FormalContext};
pub use scaling::{base_feature_of, interval_scale, ManyValuedContext, ScalingSpec};
pub use weight::Weight;
pub use mass::{ExactMass, ImportanceVector, Level, MassFunction};
