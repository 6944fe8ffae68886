use std::fmt::Write;

use crate::cnf::{Cnf, TruthAssignment};
use crate::error::{Error, Result};

pub fn write_dimacs(cnf: &Cnf) -> String {
    write_dimacs_with_comments(cnf, std::iter::empty::<String>())
}

/// DIMACS text: the `p cnf` header, then `c` comment lines, then one
/// zero-terminated line per clause.
pub fn write_dimacs_with_comments<I, S>(cnf: &Cnf, comments: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out = String::with_capacity(16 + cnf.num_clauses() * 24);
    writeln!(out, "p cnf {} {}", cnf.num_vars(), cnf.num_clauses()).unwrap();
    for c in comments {
        writeln!(out, "c {}", c.as_ref()).unwrap();
    }
    for clause in cnf.clauses() {
        for lit in clause {
            write!(out, "{lit} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

/// Reads DIMACS CNF. Comment lines may appear anywhere; clauses may span
/// lines.
pub fn read_dimacs(text: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut cnf = Cnf::new(0);
    let mut current = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            let (v, c) = parsed.ok_or_else(|| Error::Parse(format!("line {}: bad header `{line}`", lineno + 1)))?;
            if header.is_some() {
                return Err(Error::Parse(format!("line {}: duplicate header", lineno + 1)));
            }
            header = Some((v, c));
            cnf = Cnf::new(v);
            continue;
        }
        if header.is_none() {
            return Err(Error::Parse(format!("line {}: clause before `p cnf` header", lineno + 1)));
        }
        for tok in line.split_whitespace() {
            let lit: i32 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad literal `{tok}`", lineno + 1)))?;
            if lit == 0 {
                let clause = std::mem::take(&mut current);
                cnf.add_clause(clause)
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            } else {
                current.push(lit);
            }
        }
    }
    let (_, expected) = header.ok_or_else(|| Error::Parse("missing `p cnf` header".into()))?;
    if !current.is_empty() {
        return Err(Error::Parse("last clause is not terminated by 0".into()));
    }
    if cnf.num_clauses() != expected {
        return Err(Error::Parse(format!(
            "header declares {expected} clauses, found {}",
            cnf.num_clauses()
        )));
    }
    Ok(cnf)
}

/// A decided answer from a solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolverAnswer {
    Sat(TruthAssignment),
    Unsat,
}

/// Parses SAT-competition output (`s` status line, `v` value lines).
/// Variables not listed on `v` lines default to false.
pub fn parse_solver_output(text: &str, num_vars: usize) -> Result<SolverAnswer> {
    let mut status: Option<bool> = None;
    let mut values = vec![false; num_vars];
    for line in text.lines() {
        let line = line.trim();
        if let Some(s) = line.strip_prefix("s ") {
            let decided = match s.trim() {
                "SATISFIABLE" => true,
                "UNSATISFIABLE" => false,
                other => return Err(Error::Parse(format!("solver status `{other}`"))),
            };
            if status.replace(decided).is_some_and(|prev| prev != decided) {
                return Err(Error::Parse("contradictory status lines".into()));
            }
        } else if let Some(v) = line.strip_prefix('v') {
            for tok in v.split_whitespace() {
                let lit: i64 = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad value literal `{tok}`")))?;
                if lit == 0 {
                    continue;
                }
                let var = lit.unsigned_abs() as usize;
                if var > num_vars {
                    return Err(Error::Parse(format!("literal {lit} out of range 1..={num_vars}")));
                }
                values[var - 1] = lit > 0;
            }
        }
    }
    match status {
        Some(true) => Ok(SolverAnswer::Sat(TruthAssignment::from_values(values))),
        Some(false) => Ok(SolverAnswer::Unsat),
        None => Err(Error::Parse("missing `s` status line".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(write_dimacs(&Cnf::new(0)), "p cnf 0 0\n");
        let cnf = Cnf::from_clauses(3, vec![vec![1, -3]]).unwrap();
        assert_eq!(write_dimacs(&cnf), "p cnf 3 1\n1 -3 0\n");
        let commented = write_dimacs_with_comments(&cnf, ["x 1 a 1 0.5"]);
        assert!(commented.starts_with("p cnf 3 1\nc x 1 a 1 0.5\n"));
        assert_eq!(read_dimacs(&commented).unwrap(), cnf);
    }

    #[test]
    fn reader_accepts_split_clauses() {
        let cnf = read_dimacs("c hi\np cnf 3 2\n1 2\n-3 0 2 0\n").unwrap();
        assert_eq!(cnf.clauses(), &[vec![1, 2, -3], vec![2]]);
    }

    #[test]
    fn reader_errors() {
        assert!(read_dimacs("1 2 0\n").is_err());
        assert!(read_dimacs("p cnf 2 2\n1 2 0\n").is_err());
        assert!(read_dimacs("p cnf 2 1\n1 3 0\n").is_err());
        assert!(read_dimacs("p cnf 2 1\n1 2\n").is_err());
    }

    #[test]
    fn solver_output() {
        assert_eq!(parse_solver_output("s UNSATISFIABLE\n", 3).unwrap(), SolverAnswer::Unsat);
        let sat = parse_solver_output("c comment\ns SATISFIABLE\nv 1 -2 0\n", 2).unwrap();
        assert_eq!(sat, SolverAnswer::Sat(TruthAssignment::from_values(vec![true, false])));
        // unlisted variables default to false
        let SolverAnswer::Sat(a) = parse_solver_output("s SATISFIABLE\nv 2\nv 0", 3).unwrap() else {
            panic!()
        };
        assert_eq!(a.values(), &[false, true, false]);
        assert!(matches!(parse_solver_output("v 1 0", 1), Err(Error::Parse(_))));
        assert!(matches!(parse_solver_output("s SATISFIABLE\nv 4 0", 3), Err(Error::Parse(_))));
        assert!(matches!(parse_solver_output("s UNKNOWN", 3), Err(Error::Parse(_))));
        assert!(parse_solver_output("hello", 3).is_err());
    }
}
