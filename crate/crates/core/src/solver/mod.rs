//! A complete CNF decision procedure and a bridge to external DIMACS solvers.

mod engine;
mod external;

use std::time::Duration;

pub use engine::Solver;
pub use external::{solve_external, CommandTemplate};

use crate::cnf::{Cnf, TruthAssignment};
use crate::error::Result;

/// Branching variable selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Heuristic {
    /// Lowest-indexed unassigned variable, `false` first.
    Lowest,
    /// Variables seen in recent conflicts first (ties to the lowest index),
    /// each taking the polarity it last had; `false` before any.
    Activity,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Conflict-driven clause learning with non-chronological backjumping.
    /// Off means plain DPLL: chronological backtracking, no learned clauses.
    pub learning: bool,
    /// Luby restarts; only meaningful with `learning`.
    pub restarts: bool,
    pub heuristic: Heuristic,
    pub max_conflicts: u64,
    pub time_limit: Duration,
}

impl SolverConfig {
    /// Plain DPLL: lowest-index branching, chronological backtracking.
    pub fn dpll() -> Self {
        SolverConfig { learning: false, restarts: false, heuristic: Heuristic::Lowest, ..Default::default() }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            learning: true,
            restarts: true,
            heuristic: Heuristic::Activity,
            max_conflicts: 10_000_000,
            time_limit: Duration::from_secs(600),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Sat,
    Unsat,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Present iff `status` is `Sat`.
    pub assignment: Option<TruthAssignment>,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        self.status == SolveStatus::Sat
    }
}

/// Solves with the default configuration.
pub fn solve(cnf: &Cnf) -> Result<SolveResult> {
    solve_with(cnf, &SolverConfig::default())
}

pub fn solve_with(cnf: &Cnf, config: &SolverConfig) -> Result<SolveResult> {
    Solver::new(cnf, config.clone()).solve()
}
