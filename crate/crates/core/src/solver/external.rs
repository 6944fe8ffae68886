use std::fs::File;
use std::io::Write as _;
use std::process::{Command, Stdio};
use std::thread::sleep;
use std::time::{Duration, Instant};

use super::{SolveResult, SolveStats, SolveStatus, SolverConfig};
use crate::cnf::Cnf;
use crate::error::{Error, Result};
use crate::sat::{parse_solver_output, write_dimacs, SolverAnswer};

/// A whitespace-separated command line. Tokens containing `{}` have it
/// replaced by the DIMACS path; without any `{}` the path is appended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandTemplate(Vec<String>);

impl CommandTemplate {
    pub fn parse(template: &str) -> Result<Self> {
        let tokens: Vec<String> = template.split_whitespace().map(str::to_owned).collect();
        if tokens.is_empty() {
            return Err(Error::Bridge("empty solver command".into()));
        }
        Ok(CommandTemplate(tokens))
    }

    pub fn render(&self, path: &str) -> Vec<String> {
        let mut out: Vec<String> = self.0.iter().map(|t| t.replace("{}", path)).collect();
        if !self.0.iter().any(|t| t.contains("{}")) {
            out.push(path.to_owned());
        }
        out
    }
}

/// Writes `cnf` to a temporary DIMACS file, runs the command on it and
/// parses its competition-format output. A reported model is re-checked
/// against every clause before it is returned.
pub fn solve_external(cnf: &Cnf, command: &CommandTemplate, config: &SolverConfig) -> Result<SolveResult> {
    let started = Instant::now();
    let bridge = |what: &str, e: &dyn std::fmt::Display| Error::Bridge(format!("{what}: {e}"));

    let mut input = tempfile::Builder::new()
        .suffix(".cnf")
        .tempfile()
        .map_err(|e| bridge("temp file", &e))?;
    input
        .write_all(write_dimacs(cnf).as_bytes())
        .and_then(|_| input.flush())
        .map_err(|e| bridge("writing DIMACS", &e))?;
    let output = tempfile::tempfile().map_err(|e| bridge("temp file", &e))?;
    let output_reader = output.try_clone().map_err(|e| bridge("temp file", &e))?;

    let argv = command.render(&input.path().to_string_lossy());
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(output)
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| bridge(&format!("spawning `{}`", argv[0]), &e))?;

    loop {
        match child.try_wait().map_err(|e| bridge("waiting for solver", &e))? {
            Some(_) => break,
            None if started.elapsed() > config.time_limit => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(Error::BudgetExceeded {
                    conflicts: 0,
                    elapsed_ms: started.elapsed().as_millis() as u64,
                });
            }
            None => sleep(Duration::from_millis(2)),
        }
    }

    let text = read_all(output_reader).map_err(|e| bridge("reading solver output", &e))?;
    let answer = parse_solver_output(&text, cnf.num_vars())
        .map_err(|e| Error::Bridge(format!("unusable solver output: {e}")))?;
    let stats = SolveStats { wall_ms: started.elapsed().as_secs_f64() * 1e3, ..Default::default() };
    match answer {
        SolverAnswer::Unsat => Ok(SolveResult { status: SolveStatus::Unsat, assignment: None, stats }),
        SolverAnswer::Sat(assignment) => {
            let bad = cnf.unsatisfied(&assignment);
            if let Some(&first) = bad.first() {
                return Err(Error::Bridge(format!(
                    "reported model violates {} clause(s), first is #{first}",
                    bad.len()
                )));
            }
            Ok(SolveResult { status: SolveStatus::Sat, assignment: Some(assignment), stats })
        }
    }
}

fn read_all(mut f: File) -> std::io::Result<String> {
    use std::io::{Read, Seek, SeekFrom};
    f.seek(SeekFrom::Start(0))?;
    let mut s = String::new();
    f.read_to_string(&mut s)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_rendering() {
        let t = CommandTemplate::parse("kissat -q").unwrap();
        assert_eq!(t.render("/t/a.cnf"), vec!["kissat", "-q", "/t/a.cnf"]);
        let t = CommandTemplate::parse("sh -c cat<{}").unwrap();
        assert_eq!(t.render("/t/a.cnf"), vec!["sh", "-c", "cat</t/a.cnf"]);
        assert!(CommandTemplate::parse("  ").is_err());
    }

    #[test]
    fn missing_binary_is_bridge_error() {
        let t = CommandTemplate::parse("/nonexistent/solver-binary").unwrap();
        let r = solve_external(&Cnf::new(1), &t, &SolverConfig::default());
        assert!(matches!(r, Err(Error::Bridge(_))));
    }
}
