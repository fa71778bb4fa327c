//! Finite-level natural duality workbench.
//!
//! Finite algebras and alter egos live on carriers `{0..n-1}`. Every verdict
//! is computed at the finite level: structures are finite and discrete, so
//! topology carries no data and infinite-level claims are out of scope.

pub mod algebra;
pub mod catalog;
pub mod closure;
pub mod duality;
pub mod endo;
pub mod entailment;
mod error;
mod limits;
mod relation;
pub mod speclang;
pub mod structures;
pub mod tuples;

pub use algebra::{FiniteAlgebra, Homomorphism, Operation, OperationTable, Signature};
pub use error::{Error, Result};
pub use limits::Limits;
pub use relation::Relation;
pub use structures::{AlterEgo, FiniteStructure, PartialOperationTable, StructMorphism};
