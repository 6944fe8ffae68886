//! `ncs`: generate MR-Sort ground truths and learning sets, encode learning
//! sets as CNF or MIP, learn models back, check, compare and benchmark them.
//!
//! Exit status: 0 on success, 1 when a learning set is not representable
//! (or a model fails `check`), 2 on usage or I/O errors.

use std::error::Error as StdError;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use ncs_bench::{run_grid, write_csv, BenchConfig, Method};
use ncs_core::eval::{brute_force_representable, default_sample_size, err_rate};
use ncs_core::io::{read_learning_set, read_learning_set_for, read_model, write_learning_set, write_mrsort_model, write_uncs_model, ModelFile};
use ncs_core::learn::{learn_mip, learn_sat, SatBackend};
use ncs_core::mip::{encode_mip_d, encode_mip_o, write_lp, MipCommand, Variant};
use ncs_core::sat::encode;
use ncs_core::solver::{CommandTemplate, SolverConfig};
use ncs_core::synth::{gen_mrsort, label_uniform, rng_for, GenConfig, DATA_STREAM, EVAL_STREAM, MODEL_STREAM};
use ncs_core::{CriteriaSpec, LearningSet, MrSortModel, Threshold, UncsModel};

type Res<T = ExitCode> = Result<T, Box<dyn StdError>>;

const SAT_ENV: &str = "NCS_SAT_CMD";
const MIP_ENV: &str = "NCS_MIP_CMD";

#[derive(Parser)]
#[command(name = "ncs", version, about = "Learn non-compensatory sorting models from assignment examples")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct DataArgs {
    /// Learning set CSV: `id`, one column per criterion, `class` last.
    #[arg(long)]
    data: PathBuf,
    /// Criteria (column names) where smaller values are better.
    #[arg(long, value_delimiter = ',')]
    minimize: Vec<String>,
    /// Number of classes; defaults to the largest class in the data.
    #[arg(long)]
    classes: Option<usize>,
}

impl DataArgs {
    fn load(&self) -> Res<LearningSet> {
        let text = read(&self.data)?;
        let minimize: Vec<&str> = self.minimize.iter().map(String::as_str).collect();
        Ok(read_learning_set(&text, &minimize, self.classes)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dimacs,
    LpO,
    LpD,
}

#[derive(Clone, Copy, ValueEnum)]
enum LearnMethod {
    Sat,
    SatExternal,
    MipO,
    MipD,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw a random MR-Sort model.
    GenModel {
        #[arg(long)]
        criteria: usize,
        #[arg(long)]
        classes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Draw uniform alternatives and label them with a model.
    GenData {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Write the CNF or one of the MIP formulations of a learning set.
    Encode {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Learn a model that extends the learning set.
    Learn {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value = "sat")]
        method: LearnMethod,
        /// Where to write the learned model (JSON).
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        /// Solver time limit in seconds.
        #[arg(long, default_value_t = 600.0)]
        time_limit: f64,
        /// DIMACS solver command for `sat-external`; overrides $NCS_SAT_CMD.
        #[arg(long)]
        sat_cmd: Option<String>,
        /// MIP solver command with `{lp}` and `{sol}`; overrides $NCS_MIP_CMD.
        #[arg(long)]
        mip_cmd: Option<String>,
        /// Use plain DPLL in the embedded solver.
        #[arg(long)]
        dpll: bool,
    },
    /// Verify that a model reproduces every assignment of a learning set.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Fraction of uniform random profiles two models assign differently.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        against: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exhaustive representability search (at most 4 criteria).
    Oracle {
        #[command(flatten)]
        data: DataArgs,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Run a benchmark grid and write one CSV row per trial and method.
    Bench {
        /// JSON grid configuration; the default desk grid if absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(short = 'o', long)]
        output: PathBuf,
        /// Overrides the configured master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Write zeros in the timing columns.
        #[arg(long)]
        no_timings: bool,
    },
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn write(path: &Path, text: &str) -> Res<()> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load_model(path: &Path) -> Res<ModelFile> {
    read_model(&read(path)?).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn command_from(flag: &Option<String>, env: &str) -> Option<String> {
    flag.clone().or_else(|| std::env::var(env).ok().filter(|s| !s.trim().is_empty()))
}

fn threshold_text(spec: &CriteriaSpec, i: usize, t: Threshold) -> String {
    match t.value() {
        Some(v) => spec.raw(i, v).normalize().to_string(),
        None => "above-all".into(),
    }
}

fn print_frontiers(spec: &CriteriaSpec, frontiers: &[ncs_core::Frontier]) {
    for (h, f) in frontiers.iter().enumerate() {
        let cells: Vec<String> = f
            .thresholds()
            .iter()
            .zip(spec.names())
            .enumerate()
            .map(|(i, (t, name))| format!("{name}={}", threshold_text(spec, i, *t)))
            .collect();
        println!("frontier {} (classes {}|{}): {}", h + 1, h + 1, h + 2, cells.join(" "));
    }
}

fn print_uncs(m: &UncsModel) {
    let spec = m.criteria();
    println!("U-NCS model: {} criteria, {} classes", spec.len(), m.classes());
    print_frontiers(spec, m.frontiers());
    let names: Vec<&str> = spec.names().collect();
    let minimal: Vec<String> = m
        .sufficient()
        .minimal_members()
        .iter()
        .map(|c| format!("{{{}}}", c.indices().map(|i| names[i]).collect::<Vec<_>>().join(", ")))
        .collect();
    println!("minimal sufficient coalitions: {}", if minimal.is_empty() { "none".into() } else { minimal.join(" ") });
}

fn print_mrsort(m: &MrSortModel) {
    let spec = m.criteria();
    println!("MR-Sort model: {} criteria, {} classes", spec.len(), m.classes());
    print_frontiers(spec, m.frontiers());
    let weights: Vec<String> = spec.names().zip(m.weights()).map(|(n, w)| format!("{n}={}", w.normalize())).collect();
    println!("weights: {}", weights.join(" "));
    println!("lambda: {}", m.lambda().normalize());
}

fn unrepresentable() -> ExitCode {
    println!("UNREPRESENTABLE");
    ExitCode::from(1)
}

fn run(cli: Cli) -> Res {
    match cli.command {
        Cmd::GenModel { criteria, classes, seed, output } => {
            let cfg = GenConfig::new(criteria, classes, 0, seed)?;
            let model = gen_mrsort(&cfg, &mut rng_for(seed, MODEL_STREAM))?;
            write(&output, &write_mrsort_model(&model))?;
            print_mrsort(&model);
        }
        Cmd::GenData { model, count, seed, output } => {
            let m = load_model(&model)?.to_uncs();
            let data = label_uniform(&m, count, &mut rng_for(seed, DATA_STREAM));
            write(&output, &write_learning_set(&data))?;
            let mut per_class = vec![0usize; m.classes()];
            for a in data.alternatives() {
                per_class[a.class - 1] += 1;
            }
            println!("{count} alternatives, per class {per_class:?}");
        }
        Cmd::Encode { data, format, output } => {
            let d = data.load()?;
            match format {
                Format::Dimacs => {
                    let inst = encode(&d)?;
                    write(&output, &inst.to_dimacs())?;
                    let [a, b, c, dd, e] = inst.counts.as_array();
                    println!(
                        "{} variables, {} clauses (families {a} {b} {c} {dd} {e})",
                        inst.cnf.num_vars(),
                        inst.cnf.num_clauses()
                    );
                }
                Format::LpO | Format::LpD => {
                    let m = if matches!(format, Format::LpO) { encode_mip_o(&d)? } else { encode_mip_d(&d)? };
                    write(&output, &write_lp(&m))?;
                    println!(
                        "{} variables ({} binary), {} constraints",
                        m.vars.len(),
                        m.num_binaries(),
                        m.constraints.len()
                    );
                }
            }
        }
        Cmd::Learn { data, method, output, time_limit, sat_cmd, mip_cmd, dpll } => {
            let d = data.load()?;
            if !(time_limit > 0.0 && time_limit.is_finite()) {
                return Err("--time-limit must be positive".into());
            }
            let limit = Duration::from_secs_f64(time_limit);
            let solver = SolverConfig { time_limit: limit, ..if dpll { SolverConfig::dpll() } else { SolverConfig::default() } };
            match method {
                LearnMethod::Sat | LearnMethod::SatExternal => {
                    let backend = if matches!(method, LearnMethod::Sat) {
                        SatBackend::Embedded(solver)
                    } else {
                        let cmd = command_from(&sat_cmd, SAT_ENV)
                            .ok_or(format!("sat-external needs --sat-cmd or ${SAT_ENV}"))?;
                        SatBackend::External(CommandTemplate::parse(&cmd)?, solver)
                    };
                    let out = learn_sat(&d, &backend)?;
                    let Some(model) = out.model else { return Ok(unrepresentable()) };
                    if let Some(path) = output {
                        write(&path, &write_uncs_model(&model))?;
                    }
                    print_uncs(&model);
                    println!("{} variables, {} clauses, solved in {:.1} ms", out.num_vars, out.num_constraints, out.solve_ms);
                }
                LearnMethod::MipO | LearnMethod::MipD => {
                    let cmd = command_from(&mip_cmd, MIP_ENV).ok_or(format!("MIP methods need --mip-cmd or ${MIP_ENV}"))?;
                    let variant = if matches!(method, LearnMethod::MipO) { Variant::Optimize } else { Variant::Decide };
                    let out = learn_mip(&d, variant, &MipCommand::parse(&cmd)?, limit)?;
                    let Some(model) = out.model else { return Ok(unrepresentable()) };
                    if let Some(path) = output {
                        write(&path, &write_mrsort_model(&model))?;
                    }
                    print_mrsort(&model);
                    println!("{} variables, {} constraints, solved in {:.1} ms", out.num_vars, out.num_constraints, out.solve_ms);
                }
            }
        }
        Cmd::Check { model, data } => {
            let m = load_model(&model)?;
            let d = read_learning_set_for(&read(&data)?, m.criteria(), m.classes())?;
            let violations = m.to_uncs().extends(&d)?;
            if violations.is_empty() {
                println!("OK: all {} alternatives reproduced", d.alternatives().len());
            } else {
                for v in &violations {
                    println!("{v}");
                }
                println!("FAILED: {} of {} alternatives misassigned", violations.len(), d.alternatives().len());
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Eval { model, against, samples, seed } => {
            let (a, b) = (load_model(&model)?.to_uncs(), load_model(&against)?.to_uncs());
            let n = samples.unwrap_or_else(|| default_sample_size(a.criteria().len()));
            let e = err_rate(&a, &b, n, &mut rng_for(seed, EVAL_STREAM))?;
            println!("err_rate {e} over {n} samples");
        }
        Cmd::Oracle { data, output } => {
            let d = data.load()?;
            let Some(model) = brute_force_representable(&d)? else { return Ok(unrepresentable()) };
            if let Some(path) = output {
                write(&path, &write_uncs_model(&model))?;
            }
            print_uncs(&model);
        }
        Cmd::Bench { config, output, seed, workers, no_timings } => {
            let mut cfg = match config {
                Some(path) => BenchConfig::from_json(&read(&path)?)?,
                None => BenchConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if workers.is_some() {
                cfg.workers = workers;
            }
            if no_timings {
                cfg.timings = false;
            }
            cfg.sat_command = cfg.sat_command.or_else(|| command_from(&None, SAT_ENV));
            cfg.mip_command = cfg.mip_command.or_else(|| command_from(&None, MIP_ENV));
            let rows = run_grid(&cfg)?;
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            write(&output, std::str::from_utf8(&buf)?)?;
            for &method in &cfg.methods {
                let mine: Vec<_> = rows.iter().filter(|r| r.method == method).collect();
                let ok = mine.iter().filter(|r| r.success).count();
                let mut times: Vec<f64> = mine.iter().filter(|r| r.success).map(|r| r.total_ms).collect();
                let median = ncs_bench::median(&mut times).map_or("-".into(), |t| format!("{t:.2} ms"));
                println!("{:<12} {ok}/{} solved, median total {median}", Method::name(method), mine.len());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
