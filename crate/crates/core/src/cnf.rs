//! Plain CNF formulas over DIMACS-style signed variable ids.

use crate::error::{Error, Result};

/// A formula in conjunctive normal form. Variables are numbered `1..=num_vars`;
/// a literal is a non-zero `i32` whose sign gives its polarity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn new(num_vars: usize) -> Self {
        Cnf { num_vars, clauses: Vec::new() }
    }

    /// Builds a formula, rejecting empty clauses, tautologies and
    /// out-of-range literals.
    pub fn from_clauses(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        let mut cnf = Cnf::new(num_vars);
        for c in clauses {
            cnf.add_clause(c)?;
        }
        Ok(cnf)
    }

    pub fn add_clause(&mut self, clause: Vec<i32>) -> Result<()> {
        if clause.is_empty() {
            return Err(Error::Input("empty clause".into()));
        }
        for &lit in &clause {
            if lit == 0 || lit.unsigned_abs() as usize > self.num_vars {
                return Err(Error::Input(format!(
                    "literal {lit} out of range 1..={}",
                    self.num_vars
                )));
            }
            if clause.contains(&-lit) {
                return Err(Error::Input(format!("clause contains both {lit} and {}", -lit)));
            }
        }
        self.clauses.push(clause);
        Ok(())
    }

    /// Appends a clause the caller guarantees well-formed.
    pub(crate) fn push_unchecked(&mut self, clause: Vec<i32>) {
        debug_assert!(!clause.is_empty());
        self.clauses.push(clause);
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// Indices of clauses the assignment leaves unsatisfied.
    pub fn unsatisfied(&self, assignment: &TruthAssignment) -> Vec<usize> {
        self.clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.iter().any(|&l| assignment.lit(l)))
            .map(|(k, _)| k)
            .collect()
    }

    pub fn is_satisfied_by(&self, assignment: &TruthAssignment) -> bool {
        assignment.len() >= self.num_vars
            && self.clauses.iter().all(|c| c.iter().any(|&l| assignment.lit(l)))
    }
}

/// A total assignment of truth values to variables `1..=len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthAssignment {
    values: Vec<bool>,
}

impl TruthAssignment {
    pub fn all(num_vars: usize, value: bool) -> Self {
        TruthAssignment { values: vec![value; num_vars] }
    }

    /// `values[k]` is the value of variable `k + 1`.
    pub fn from_values(values: Vec<bool>) -> Self {
        TruthAssignment { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of variable `var` (1-based).
    pub fn get(&self, var: usize) -> bool {
        self.values[var - 1]
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.values[var - 1] = value;
    }

    /// Truth of a signed literal.
    #[inline]
    pub fn lit(&self, lit: i32) -> bool {
        self.values[lit.unsigned_abs() as usize - 1] == (lit > 0)
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_clauses() {
        let mut cnf = Cnf::new(2);
        assert!(cnf.add_clause(vec![]).is_err());
        assert!(cnf.add_clause(vec![1, -1]).is_err());
        assert!(cnf.add_clause(vec![3]).is_err());
        assert!(cnf.add_clause(vec![0]).is_err());
        assert!(cnf.add_clause(vec![1, -2]).is_ok());
    }

    #[test]
    fn verifies_assignments() {
        let cnf = Cnf::from_clauses(2, vec![vec![1], vec![-1, 2]]).unwrap();
        let good = TruthAssignment::from_values(vec![true, true]);
        let bad = TruthAssignment::from_values(vec![true, false]);
        assert!(cnf.is_satisfied_by(&good));
        assert_eq!(cnf.unsatisfied(&bad), vec![1]);
    }
}
