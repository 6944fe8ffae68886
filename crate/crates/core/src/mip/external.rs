use std::process::{Command, Stdio};
use std::thread::sleep;
use std::time::{Duration, Instant};

use super::{parse_solution, write_lp, MipModel, MipSolution};
use crate::error::{Error, Result};

/// Command line for an external MIP solver. `{lp}` is replaced by the
/// program path and `{sol}` by the path where the solver (or a wrapper
/// script) must write `name value` lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MipCommand(Vec<String>);

impl MipCommand {
    pub fn parse(template: &str) -> Result<Self> {
        let tokens: Vec<String> = template.split_whitespace().map(str::to_owned).collect();
        if tokens.is_empty() {
            return Err(Error::Bridge("empty MIP solver command".into()));
        }
        if !tokens.iter().any(|t| t.contains("{lp}")) || !tokens.iter().any(|t| t.contains("{sol}")) {
            return Err(Error::Bridge("MIP solver command needs `{lp}` and `{sol}` placeholders".into()));
        }
        Ok(MipCommand(tokens))
    }

    pub fn render(&self, lp: &str, sol: &str) -> Vec<String> {
        self.0.iter().map(|t| t.replace("{lp}", lp).replace("{sol}", sol)).collect()
    }
}

/// Runs the solver on `model` and reads back its solution file.
pub fn solve_mip_external(model: &MipModel, command: &MipCommand, time_limit: Duration) -> Result<MipSolution> {
    let bridge = |what: &str, e: &dyn std::fmt::Display| Error::Bridge(format!("{what}: {e}"));
    let dir = tempfile::tempdir().map_err(|e| bridge("temp dir", &e))?;
    let lp = dir.path().join("model.lp");
    let sol = dir.path().join("model.sol");
    std::fs::write(&lp, write_lp(model)).map_err(|e| bridge("writing LP", &e))?;

    let argv = command.render(&lp.to_string_lossy(), &sol.to_string_lossy());
    let started = Instant::now();
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| bridge(&format!("spawning `{}`", argv[0]), &e))?;
    let status = loop {
        match child.try_wait().map_err(|e| bridge("waiting for solver", &e))? {
            Some(s) => break s,
            None if started.elapsed() > time_limit => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(Error::BudgetExceeded { conflicts: 0, elapsed_ms: started.elapsed().as_millis() as u64 });
            }
            None => sleep(Duration::from_millis(5)),
        }
    };
    let text = std::fs::read_to_string(&sol)
        .map_err(|e| bridge(&format!("solver exited with {status} and left no solution"), &e))?;
    parse_solution(&text).map_err(|e| Error::Bridge(format!("unusable solution file: {e}")))
}
