//! Concrete valuation algebras.

mod any;
mod boolean;
pub mod commonality;
mod probability;

pub use any::{AnyAlgebra, AnyValuation, InstanceKind};
pub use boolean::{BooleanAlgebra, BooleanRelation};
pub use commonality::{
    commonality_to_mass, mass_to_commonality, CommonalityAlgebra, CommonalityTable, MassFunction,
    MAX_FRAME,
};
pub use probability::{ProbabilityAlgebra, ProbabilityPotential};
