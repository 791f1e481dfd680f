//! Attribute exploration with partial counter-examples.
//!
//! An exploration maintains a base of validated implications and partially
//! described examples over a fixed attribute universe, asks a domain expert
//! one implication at a time, and stops once every implication that no example
//! refutes follows from the validated ones.

pub mod attrset;
pub mod base;
pub mod engine;
pub mod error;
pub mod expert;
pub mod format;
pub mod logic;
pub mod schema;
pub mod session;

pub use attrset::AttributeSet;
pub use base::{ExplorationBase, PartialExample};
pub use engine::{explore, Exploration, ExplorationResult, Question, RejectReason, Termination};
pub use error::{Error, Result};
pub use expert::{Expert, ExpertAnswer, MaskPolicy, ScriptedDomain};
pub use logic::{Conclusion, Implication, InferenceMode};
pub use schema::{CumulatedClause, ExplorationSchema};
