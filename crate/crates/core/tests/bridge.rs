use std::io::Write as _;

use ncs_core::solver::{solve, solve_external, CommandTemplate, SolverConfig};
use ncs_core::{Cnf, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_3cnf(rng: &mut ChaCha8Rng, vars: usize, clauses: usize) -> Cnf {
    let mut out = Vec::with_capacity(clauses);
    while out.len() < clauses {
        let mut c: Vec<i32> = Vec::new();
        while c.len() < 3 {
            let v = rng.gen_range(1..=vars as i32);
            if c.iter().all(|l: &i32| l.abs() != v) {
                c.push(if rng.gen_bool(0.5) { v } else { -v });
            }
        }
        out.push(c);
    }
    Cnf::from_clauses(vars, out).unwrap()
}

/// A shell script standing in for a solver; keep the path alive while it runs.
fn script(body: &str) -> (tempfile::TempPath, CommandTemplate) {
    let mut f = tempfile::Builder::new().suffix(".sh").tempfile().unwrap();
    writeln!(f, "{body}").unwrap();
    f.flush().unwrap();
    let path = f.into_temp_path();
    let cmd = CommandTemplate::parse(&format!("sh {}", path.display())).unwrap();
    (path, cmd)
}

#[test]
fn bundled_binary_agrees_with_embedded_solver() {
    let bin = env!("CARGO_BIN_EXE_dimacs-solve");
    let default = CommandTemplate::parse(bin).unwrap();
    let dpll = CommandTemplate::parse(&format!("{bin} --dpll {{}}")).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..100 {
        let vars = rng.gen_range(5..=30);
        let f = random_3cnf(&mut rng, vars, (4.26 * vars as f64) as usize);
        let expected = solve(&f).unwrap().is_sat();
        for cmd in [&default, &dpll] {
            let r = solve_external(&f, cmd, &SolverConfig::default()).unwrap();
            assert_eq!(r.is_sat(), expected);
            if let Some(a) = r.assignment {
                assert!(f.is_satisfied_by(&a));
            }
        }
        if expected {
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    assert!(sat > 0 && unsat > 0, "{sat} sat, {unsat} unsat");
}

#[test]
fn garbage_output_is_a_bridge_error() {
    let f = Cnf::from_clauses(1, vec![vec![1]]).unwrap();
    let cmd = CommandTemplate::parse("echo hello").unwrap();
    let err = solve_external(&f, &cmd, &SolverConfig::default()).unwrap_err();
    assert!(matches!(err, Error::Bridge(_)), "{err}");
}

#[test]
fn wrong_model_is_a_bridge_error() {
    let f = Cnf::from_clauses(1, vec![vec![-1]]).unwrap();
    let (_keep, cmd) = script("echo 's SATISFIABLE'\necho 'v 1 0'");
    let err = solve_external(&f, &cmd, &SolverConfig::default()).unwrap_err();
    assert!(matches!(&err, Error::Bridge(m) if m.contains("clause")), "{err}");
}

#[test]
fn unsat_answer_passes_through() {
    let f = Cnf::from_clauses(1, vec![vec![1], vec![-1]]).unwrap();
    let (_keep, cmd) = script("echo 's UNSATISFIABLE'");
    assert!(!solve_external(&f, &cmd, &SolverConfig::default()).unwrap().is_sat());
}

#[test]
fn slow_solver_hits_the_time_limit() {
    let f = Cnf::from_clauses(1, vec![vec![1]]).unwrap();
    let (_keep, cmd) = script("sleep 5");
    let cfg = SolverConfig { time_limit: std::time::Duration::from_millis(100), ..Default::default() };
    assert!(matches!(solve_external(&f, &cmd, &cfg), Err(Error::BudgetExceeded { .. })));
}
