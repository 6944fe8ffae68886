//! Mixed-integer formulations for learning MR-Sort models.
//!
//! Two variants are built from a learning set: an optimization program that
//! maximizes the smallest vote margin `alpha` under normalized weights, and
//! a decision program with a zero objective, free total weight and margins
//! of at least one vote. Programs are written in CPLEX LP format for an
//! external solver; solutions come back as `name value` lines.

mod decode;
mod encode;
mod external;
mod lp;

pub use decode::{check_point, decode_mrsort, parse_solution, substitute, MipSolution};
pub use encode::{encode_mip, encode_mip_d, encode_mip_o, Scaling};
pub use external::{solve_mip_external, MipCommand};
pub use lp::{parse_lp, write_lp, LpModel, LpRow};

use std::collections::HashMap;

use crate::model::LearningSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Normalized weights, maximize the smallest margin.
    Optimize,
    /// Unnormalized weights, margins of at least one, zero objective.
    Decide,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MipParams {
    /// Big-M of the threshold constraints; values live in `[0, 1]`.
    pub big_m: f64,
    /// Realizes the strict "below the frontier" comparison.
    pub epsilon: f64,
    /// Upper bound on weights in the decision variant, also the big-M of
    /// the `c = w * delta` linearization there. The optimization variant
    /// uses 1.
    pub weight_cap: f64,
    /// Absolute tolerance when checking a solution against the program.
    pub tolerance: f64,
}

impl Default for MipParams {
    fn default() -> Self {
        MipParams { big_m: 2.0, epsilon: 1e-6, weight_cap: 1000.0, tolerance: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MipVar {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A formulation with its variable table and the data it was built from.
#[derive(Clone, Debug)]
pub struct MipModel {
    pub variant: Variant,
    pub params: MipParams,
    pub vars: Vec<MipVar>,
    pub constraints: Vec<Constraint>,
    /// Minimized.
    pub objective: Vec<(usize, f64)>,
    data: LearningSet,
    scaling: Scaling,
    index: HashMap<String, usize>,
}

impl MipModel {
    pub fn data(&self) -> &LearningSet {
        &self.data
    }

    pub fn scaling(&self) -> &Scaling {
        &self.scaling
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn num_continuous(&self) -> usize {
        self.vars.len() - self.num_binaries()
    }

    /// Rows whose name starts with `prefix`.
    pub fn rows_named<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Constraint> + 'a {
        self.constraints.iter().filter(move |c| c.name.starts_with(prefix))
    }
}
