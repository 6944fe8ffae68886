//! Reads a DIMACS CNF file and prints a SAT-competition style answer.
//! Exit status is 10 for SAT, 20 for UNSAT, 1 on error.

use std::process::ExitCode;

use ncs_core::sat::read_dimacs;
use ncs_core::solver::{solve_with, SolverConfig};

fn main() -> ExitCode {
    let mut dpll = false;
    let mut path = None;
    for arg in std::env::args().skip(1) {
        match arg.as_str() {
            "--dpll" => dpll = true,
            _ => path = Some(arg),
        }
    }
    let Some(path) = path else {
        eprintln!("usage: dimacs-solve [--dpll] FILE.cnf");
        return ExitCode::from(1);
    };
    let cnf = match std::fs::read_to_string(&path).map_err(ncs_core::Error::from).and_then(|t| read_dimacs(&t)) {
        Ok(cnf) => cnf,
        Err(e) => {
            eprintln!("c error: {e}");
            return ExitCode::from(1);
        }
    };
    let config = if dpll { SolverConfig::dpll() } else { SolverConfig::default() };
    match solve_with(&cnf, &config) {
        Ok(r) => match r.assignment {
            Some(a) => {
                println!("s SATISFIABLE");
                let lits: Vec<String> = a
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| if v { format!("{}", i + 1) } else { format!("-{}", i + 1) })
                    .collect();
                for chunk in lits.chunks(20) {
                    println!("v {}", chunk.join(" "));
                }
                println!("v 0");
                ExitCode::from(10)
            }
            None => {
                println!("s UNSATISFIABLE");
                ExitCode::from(20)
            }
        },
        Err(e) => {
            println!("s UNKNOWN");
            eprintln!("c {e}");
            ExitCode::from(1)
        }
    }
}
