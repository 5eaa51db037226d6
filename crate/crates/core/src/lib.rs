//! Capacitated d-Hitting Set: exact and flow-based feasibility oracles, a
//! 4/3-approximation pipeline for bounded solution size, and the hardness
//! reductions through multi-dimensional knapsack.

pub mod approx;
pub mod colorweights;
pub mod domset;
pub mod error;
pub mod exact;
pub mod feasibility;
pub mod generate;
pub mod independence;
pub mod instance;
pub mod io;
pub mod reductions;

pub use error::{Error, Result};
pub use instance::{
    equivalence_classes, stars, Assignment, ClassKey, Element, ElementId, EquivalenceClasses,
    Instance, Multiplicity, Solution,
};
