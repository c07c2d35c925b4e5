//! Exact arithmetic in finite extensions of local fields, valuation sets of
//! linear subspaces, Galois module structure, and deciders for the valuation
//! criterion for normal basis generators.

pub mod arith;
pub mod corpus;
pub mod document;
pub mod error;
pub mod fpoly;
pub mod galois;
pub mod kgmod;
pub mod linalg;
mod modular;
pub mod scalar;
pub mod subfield;
pub mod subspace;
pub mod vc;

pub use arith::{ExtensionStep, FieldElement, FieldTower, StepKind, Valuation};
pub use error::{Error, Result};
pub use scalar::{BaseField, BaseKind, Scalar};
