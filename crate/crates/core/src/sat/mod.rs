//! Boolean encoding of the U-NCS representation problem.
//!
//! A learning set is translated into a CNF over two families of variables:
//! `x(i, h, k)` states that reference value `k` clears frontier `h` on
//! criterion `i`, and `y(B)` states that coalition `B` is sufficient. Any
//! satisfying assignment decodes into a U-NCS model that reproduces every
//! reference assignment, and the formula is satisfiable exactly when such a
//! model exists.

mod dimacs;
mod encode;

pub use dimacs::{parse_solver_output, read_dimacs, write_dimacs, write_dimacs_with_comments, SolverAnswer};
pub use encode::{
    build_vocabulary, decode, encode, encode_with, model_assignment, CnfInstance, EncodeOptions,
    FamilyCounts, VarMeaning, Vocabulary,
};
