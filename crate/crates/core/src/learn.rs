//! End-to-end learning: encode the learning set, solve, decode, verify.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::mip::{self, MipCommand, MipSolution, Variant};
use crate::model::{LearningSet, MrSortModel, UncsModel};
use crate::sat;
use crate::solver::{self, CommandTemplate, SolverConfig};

#[derive(Clone, Debug)]
pub enum SatBackend {
    Embedded(SolverConfig),
    External(CommandTemplate, SolverConfig),
}

impl Default for SatBackend {
    fn default() -> Self {
        SatBackend::Embedded(SolverConfig::default())
    }
}

/// Sizes and timings of one learning run. `model` is `None` when the
/// learning set cannot be represented.
#[derive(Clone, Debug)]
pub struct Outcome<M> {
    pub model: Option<M>,
    pub num_vars: usize,
    pub num_constraints: usize,
    pub encode_ms: f64,
    pub solve_ms: f64,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn verify<F>(data: &LearningSet, model: &UncsModel, what: F) -> Result<()>
where
    F: FnOnce() -> String,
{
    let violations = model.extends(data)?;
    if let Some(v) = violations.first() {
        return Err(Error::Faithfulness(format!("{}: {} violation(s), first {v}", what(), violations.len())));
    }
    Ok(())
}

pub fn learn_sat(data: &LearningSet, backend: &SatBackend) -> Result<Outcome<UncsModel>> {
    let t0 = Instant::now();
    let instance = sat::encode(data)?;
    let encode_ms = ms(t0.elapsed());
    let t1 = Instant::now();
    let result = match backend {
        SatBackend::Embedded(cfg) => solver::solve_with(&instance.cnf, cfg)?,
        SatBackend::External(cmd, cfg) => solver::solve_external(&instance.cnf, cmd, cfg)?,
    };
    let solve_ms = ms(t1.elapsed());
    let model = match result.assignment {
        Some(a) => {
            let m = sat::decode(&instance.vocabulary, &a)?;
            verify(data, &m, || "decoded SAT model".into())?;
            Some(m)
        }
        None => None,
    };
    Ok(Outcome {
        model,
        num_vars: instance.cnf.num_vars(),
        num_constraints: instance.cnf.num_clauses(),
        encode_ms,
        solve_ms,
    })
}

pub fn learn_mip(
    data: &LearningSet,
    variant: Variant,
    command: &MipCommand,
    time_limit: Duration,
) -> Result<Outcome<MrSortModel>> {
    let t0 = Instant::now();
    let program = match variant {
        Variant::Optimize => mip::encode_mip_o(data)?,
        Variant::Decide => mip::encode_mip_d(data)?,
    };
    let encode_ms = ms(t0.elapsed());
    let t1 = Instant::now();
    let solution = mip::solve_mip_external(&program, command, time_limit)?;
    let solve_ms = ms(t1.elapsed());
    let model = match solution {
        MipSolution::Infeasible => None,
        MipSolution::Feasible(values) => Some(mip::decode_mrsort(&program, &values)?),
    };
    Ok(Outcome {
        model,
        num_vars: program.vars.len(),
        num_constraints: program.constraints.len(),
        encode_ms,
        solve_ms,
    })
}
