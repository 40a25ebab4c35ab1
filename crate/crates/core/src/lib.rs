//! Coherent configurations over finite fields: cyclotomic schemes,
//! Weisfeiler-Leman closures, couples and their extensions, separability
//! certificates, and a small isomorphism engine.

pub mod budget;
pub mod builders;
pub mod cc;
pub mod closure;
pub mod couples;
pub mod error;
pub mod gf;
pub mod io;
pub mod iso;
pub mod separability;

pub use budget::Budget;
pub use cc::{CoherentConfiguration, IntersectionTensor, Point, Relation};
pub use error::{AxiomError, Error, FieldError, Result};
pub use gf::{FieldElement, FiniteField};

/// The field inequality evaluated in arbitrary precision.
pub type ExactInequality = separability::InequalityOutcome<num_bigint::BigUint>;
/// The same inequality in checked 128-bit arithmetic; overflows are errors.
pub type CheckedInequality = separability::InequalityOutcome<u128>;
