//! Exact arithmetic in local fields presented as explicit towers.

mod element;
pub mod expr;
mod tower;

pub use element::{FieldElement, Valuation};
pub use tower::{ExtensionStep, FieldTower, Step, StepKind};
