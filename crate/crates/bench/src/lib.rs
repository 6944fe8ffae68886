//! Grid experiments: for every `(criteria, classes, alternatives)` cell and
//! trial, draw an MR-Sort ground truth with its learning set, learn a model
//! back with each configured method and record sizes, timings and the
//! generalization error against the ground truth.

use std::io;
use std::path::Path;
use std::time::{Duration, Instant};

use ncs_core::eval::{default_sample_size, err_rate};
use ncs_core::mip::{self, MipCommand, MipSolution};
use ncs_core::sat;
use ncs_core::solver::{self, CommandTemplate, SolverConfig};
use ncs_core::synth::{derive_seed, generate, rng_for, GenConfig, EVAL_STREAM};
use ncs_core::{LearningSet, UncsModel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str =
    "method,n_criteria,n_classes,n_alts,trial,seed,n_vars,n_clauses,encode_ms,solve_ms,total_ms,success,extends,err_rate,failure";

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid bench config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] ncs_core::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Sat,
    SatExternal,
    MipO,
    MipD,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Sat => "sat",
            Method::SatExternal => "sat-external",
            Method::MipO => "mip-o",
            Method::MipD => "mip-d",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        [Method::Sat, Method::SatExternal, Method::MipO, Method::MipD]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| BenchError::Config(format!("unknown method `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    /// Conflict or time budget ran out.
    Budget,
    /// External solver failed or answered something unusable.
    Bridge,
    /// The formulation was reported unsatisfiable / infeasible.
    Infeasible,
    /// The method needs an external command and none is configured.
    NoSolver,
    /// A solution was found but the decoded model does not extend the data.
    Unfaithful,
    /// Any other error while decoding.
    Error,
}

impl FailureKind {
    fn of(e: &ncs_core::Error) -> Self {
        match e {
            ncs_core::Error::BudgetExceeded { .. } => FailureKind::Budget,
            ncs_core::Error::Bridge(_) => FailureKind::Bridge,
            ncs_core::Error::Faithfulness(_) => FailureKind::Unfaithful,
            _ => FailureKind::Error,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub n_criteria: Vec<usize>,
    pub n_classes: Vec<usize>,
    pub n_alternatives: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    /// Wall-clock limit for each solver call, in seconds.
    #[serde(default = "default_budget")]
    pub budget_secs: f64,
    /// DIMACS solver command for `sat-external`.
    #[serde(default)]
    pub sat_command: Option<String>,
    /// MIP solver command (with `{lp}` and `{sol}`) for `mip-o` / `mip-d`.
    #[serde(default)]
    pub mip_command: Option<String>,
    /// Profiles sampled per err-rate estimate; `default_sample_size` if absent.
    #[serde(default)]
    pub eval_samples: Option<usize>,
    /// Worker threads; all available cores if absent.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Record wall-clock columns. With `false` they are written as 0 so the
    /// CSV depends on the seed alone.
    #[serde(default = "yes")]
    pub timings: bool,
}

fn default_budget() -> f64 {
    60.0
}

fn yes() -> bool {
    true
}

impl Default for BenchConfig {
    /// The desk-scale grid.
    fn default() -> Self {
        BenchConfig {
            n_criteria: vec![4, 5, 6, 7, 8],
            n_classes: vec![2, 3],
            n_alternatives: vec![16, 32, 64, 128],
            trials: 20,
            seed: 0,
            methods: vec![Method::Sat],
            budget_secs: default_budget(),
            sat_command: None,
            mip_command: None,
            eval_samples: None,
            workers: None,
            timings: true,
        }
    }
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: BenchConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(BenchError::Config(m.into()));
        if self.n_criteria.is_empty() || self.n_classes.is_empty() || self.n_alternatives.is_empty() {
            return bad("grid lists must be non-empty");
        }
        if self.methods.is_empty() {
            return bad("no methods");
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if !(self.budget_secs > 0.0 && self.budget_secs.is_finite()) {
            return bad("budget_secs must be positive");
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1");
        }
        for &n in &self.n_criteria {
            for &p in &self.n_classes {
                GenConfig::new(n, p, 0, 0)?;
            }
        }
        if let Some(c) = &self.sat_command {
            CommandTemplate::parse(c)?;
        }
        if let Some(c) = &self.mip_command {
            MipCommand::parse(c)?;
        }
        Ok(())
    }

    /// Grid cells in row order: criteria, then classes, then alternatives.
    pub fn cells(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for &n in &self.n_criteria {
            for &p in &self.n_classes {
                for &m in &self.n_alternatives {
                    out.push((n, p, m));
                }
            }
        }
        out
    }
}

/// One CSV row: a method run on one trial of one grid cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub method: Method,
    pub n_criteria: usize,
    pub n_classes: usize,
    pub n_alts: usize,
    pub trial: usize,
    pub seed: u64,
    pub n_vars: usize,
    pub n_clauses: usize,
    pub encode_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
    pub success: bool,
    pub extends: bool,
    pub err_rate: Option<f64>,
    pub failure: Option<FailureKind>,
}

/// Seed of trial `trial` in cell `(n, p, m)`.
pub fn trial_seed(master: u64, n: usize, p: usize, m: usize, trial: usize) -> u64 {
    derive_seed(master, &[n as u64, p as u64, m as u64, trial as u64])
}

struct Commands {
    budget: Duration,
    sat: Option<CommandTemplate>,
    mip: Option<MipCommand>,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Sizes, timings and outcome of one method run, before evaluation.
struct Attempt {
    n_vars: usize,
    n_clauses: usize,
    encode: Duration,
    solve: Duration,
    model: std::result::Result<UncsModel, FailureKind>,
}

fn run_sat(data: &LearningSet, external: Option<&CommandTemplate>, budget: Duration) -> Result<Attempt> {
    let t0 = Instant::now();
    let instance = sat::encode(data)?;
    let encode = t0.elapsed();
    let config = SolverConfig { time_limit: budget, ..Default::default() };
    let t1 = Instant::now();
    let result = match external {
        Some(cmd) => solver::solve_external(&instance.cnf, cmd, &config),
        None => solver::solve_with(&instance.cnf, &config),
    };
    let solve = t1.elapsed();
    let model = match result {
        Err(e) => Err(FailureKind::of(&e)),
        Ok(r) => match r.assignment {
            None => Err(FailureKind::Infeasible),
            Some(a) => match sat::decode(&instance.vocabulary, &a) {
                Ok(m) if m.extends(data)?.is_empty() => Ok(m),
                Ok(_) => Err(FailureKind::Unfaithful),
                Err(e) => Err(FailureKind::of(&e)),
            },
        },
    };
    Ok(Attempt { n_vars: instance.cnf.num_vars(), n_clauses: instance.cnf.num_clauses(), encode, solve, model })
}

fn run_mip(data: &LearningSet, variant: mip::Variant, cmd: &MipCommand, budget: Duration) -> Result<Attempt> {
    let t0 = Instant::now();
    let program = match variant {
        mip::Variant::Optimize => mip::encode_mip_o(data)?,
        mip::Variant::Decide => mip::encode_mip_d(data)?,
    };
    let encode = t0.elapsed();
    let t1 = Instant::now();
    let result = mip::solve_mip_external(&program, cmd, budget);
    let solve = t1.elapsed();
    let model = match result {
        Err(e) => Err(FailureKind::of(&e)),
        Ok(MipSolution::Infeasible) => Err(FailureKind::Infeasible),
        Ok(MipSolution::Feasible(values)) => match mip::decode_mrsort(&program, &values) {
            Ok(m) => Ok(m.to_uncs()),
            Err(e) => Err(FailureKind::of(&e)),
        },
    };
    Ok(Attempt { n_vars: program.vars.len(), n_clauses: program.constraints.len(), encode, solve, model })
}

fn run_trial(cfg: &BenchConfig, cmds: &Commands, (n, p, m): (usize, usize, usize), trial: usize) -> Result<Vec<Row>> {
    let seed = trial_seed(cfg.seed, n, p, m, trial);
    let (truth, data) = generate(&GenConfig::new(n, p, m, seed)?)?;
    let truth = truth.to_uncs();
    let samples = cfg.eval_samples.unwrap_or_else(|| default_sample_size(n));
    let mut rows = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let attempt = match method {
            Method::Sat => Some(run_sat(&data, None, cmds.budget)?),
            Method::SatExternal => match &cmds.sat {
                Some(c) => Some(run_sat(&data, Some(c), cmds.budget)?),
                None => None,
            },
            Method::MipO | Method::MipD => match &cmds.mip {
                Some(c) => {
                    let variant = if method == Method::MipO { mip::Variant::Optimize } else { mip::Variant::Decide };
                    Some(run_mip(&data, variant, c, cmds.budget)?)
                }
                None => None,
            },
        };
        let mut row = Row {
            method,
            n_criteria: n,
            n_classes: p,
            n_alts: m,
            trial,
            seed,
            n_vars: 0,
            n_clauses: 0,
            encode_ms: 0.0,
            solve_ms: 0.0,
            total_ms: 0.0,
            success: false,
            extends: false,
            err_rate: None,
            failure: Some(FailureKind::NoSolver),
        };
        if let Some(a) = attempt {
            row.n_vars = a.n_vars;
            row.n_clauses = a.n_clauses;
            if cfg.timings {
                row.encode_ms = ms(a.encode);
                row.solve_ms = ms(a.solve);
                row.total_ms = ms(a.encode + a.solve);
            }
            match a.model {
                Ok(model) => {
                    row.success = true;
                    row.extends = true;
                    row.failure = None;
                    row.err_rate = Some(err_rate(&truth, &model, samples, &mut rng_for(seed, EVAL_STREAM))?);
                }
                Err(kind) => row.failure = Some(kind),
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Runs every cell and trial. Rows come back in (cell, trial, method)
/// order whatever the number of workers. Per-method failures are recorded
/// in the rows; only configuration and generation errors abort.
pub fn run_grid(cfg: &BenchConfig) -> Result<Vec<Row>> {
    cfg.validate()?;
    let cmds = Commands {
        budget: Duration::from_secs_f64(cfg.budget_secs),
        sat: cfg.sat_command.as_deref().map(CommandTemplate::parse).transpose()?,
        mip: cfg.mip_command.as_deref().map(MipCommand::parse).transpose()?,
    };
    let jobs: Vec<((usize, usize, usize), usize)> =
        cfg.cells().into_iter().flat_map(|c| (0..cfg.trials).map(move |t| (c, t))).collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| BenchError::Config(e.to_string()))?;
    let per_trial: Vec<Result<Vec<Row>>> =
        pool.install(|| jobs.par_iter().map(|&(cell, t)| run_trial(cfg, &cmds, cell, t)).collect());
    let mut rows = Vec::with_capacity(jobs.len() * cfg.methods.len());
    for r in per_trial {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn write_csv<W: io::Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(BenchError::Config(format!("unexpected CSV header `{}`", header.join(","))));
    }
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Median of the values, `None` when empty.
pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let k = values.len() / 2;
    Some(if values.len() % 2 == 1 { values[k] } else { (values[k - 1] + values[k]) / 2.0 })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_and_slope() {
        assert_eq!(median(&mut []), None);
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), Some(2.5));
        let line: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0].iter().map(|&x: &f64| (x, 3.0 * x * x)).collect();
        assert!((log_log_slope(&line).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(log_log_slope(&[(1.0, 1.0)]), None);
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Sat, Method::SatExternal, Method::MipO, Method::MipD] {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
        assert!("cplex".parse::<Method>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(BenchConfig::default().validate().is_ok());
        assert!(BenchConfig { trials: 0, ..Default::default() }.validate().is_err());
        assert!(BenchConfig { n_classes: vec![1], ..Default::default() }.validate().is_err());
        assert!(BenchConfig { n_alternatives: vec![], ..Default::default() }.validate().is_err());
        assert!(BenchConfig { mip_command: Some("highs {lp}".into()), ..Default::default() }.validate().is_err());
        let json = r#"{"n_criteria":[4],"n_classes":[2],"n_alternatives":[16],"trials":3,"seed":1,"methods":["sat","mip-o"]}"#;
        let cfg = BenchConfig::from_json(json).unwrap();
        assert_eq!(cfg.methods, vec![Method::Sat, Method::MipO]);
        assert!(cfg.timings);
        assert_eq!(BenchConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        assert!(BenchConfig::from_json(r#"{"trials":1}"#).is_err());
    }
}
