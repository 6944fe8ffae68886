//! Learning non-compensatory sorting models from assignment examples.
//!
//! A sorting model places alternatives, described by their values on a set
//! of criteria, into ordered classes. This crate learns models in the
//! non-compensatory family (U-NCS) and its weighted special case (MR-Sort)
//! from a learning set, either by reduction to Boolean satisfiability or by
//! a mixed-integer program handed to an external solver.

pub mod cnf;
pub mod error;
pub mod eval;
pub mod io;
pub mod learn;
pub mod mip;
pub mod model;
pub mod sat;
pub mod solver;
pub mod synth;

pub use cnf::{Cnf, TruthAssignment};
pub use error::{Error, Result};
pub use model::{
    dominates, favorable_coalition, mr_upset, Alternative, Coalition, CriteriaSpec, Criterion, Direction,
    Frontier, LearningSet, MrSortModel, Profile, Threshold, UncsModel, UpSet, Value, Violation, MAX_CRITERIA,
};
