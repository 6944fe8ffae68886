//! Random MR-Sort ground truths and the learning sets they induce.
//!
//! Randomness comes from ChaCha8 seeded with a 64-bit master seed. Each
//! master seed owns independent streams: [`MODEL_STREAM`] for the ground
//! truth, [`DATA_STREAM`] for reference alternatives and [`EVAL_STREAM`]
//! for error-rate sampling, so changing the data size never perturbs the
//! model drawn for the same seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Alternative, CriteriaSpec, Frontier, LearningSet, MrSortModel, Profile, Threshold, UncsModel, Value};

pub const MODEL_STREAM: u64 = 0;
pub const DATA_STREAM: u64 = 1;
pub const EVAL_STREAM: u64 = 2;

/// Uniform draws are multiples of 10^-9 in `[0, 1)`.
pub const UNIT_SCALE: u32 = 9;
const UNIT: i64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub n_criteria: usize,
    pub n_classes: usize,
    pub n_alternatives: usize,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(n_criteria: usize, n_classes: usize, n_alternatives: usize, seed: u64) -> Result<Self> {
        let cfg = GenConfig { n_criteria, n_classes, n_alternatives, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_criteria == 0 || self.n_criteria > crate::model::MAX_CRITERIA {
            return Err(Error::Input(format!("unsupported criteria count {}", self.n_criteria)));
        }
        if self.n_classes < 2 {
            return Err(Error::Input(format!("at least 2 classes are required, got {}", self.n_classes)));
        }
        Ok(())
    }
}

/// ChaCha8 seeded with `seed`, positioned on `stream`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds coordinates (grid cell, trial number, ...) into a per-trial seed.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn uniform_unit<R: Rng + ?Sized>(rng: &mut R) -> Value {
    Value::new(rng.gen_range(0..UNIT), UNIT_SCALE)
}

pub fn uniform_profile<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Profile {
    Profile::new((0..n).map(|_| uniform_unit(rng)).collect())
}

fn sorted_uniforms<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<Value> {
    let mut v: Vec<Value> = (0..count).map(|_| uniform_unit(rng)).collect();
    v.sort();
    v
}

pub fn gen_mrsort<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Result<MrSortModel> {
    cfg.validate()?;
    let n = cfg.n_criteria;
    let p = cfg.n_classes;

    let columns: Vec<Vec<Value>> = (0..n).map(|_| sorted_uniforms(p - 1, rng)).collect();
    let frontiers = (0..p - 1)
        .map(|h| Frontier::new(columns.iter().map(|col| Threshold::At(col[h])).collect()))
        .collect();

    let mut cuts = vec![Value::ZERO];
    cuts.extend(sorted_uniforms(n - 1, rng));
    cuts.push(Value::ONE);
    let weights = cuts.windows(2).map(|w| w[1] - w[0]).collect();

    let lambda = loop {
        let k = rng.gen_range(UNIT / 2..UNIT);
        if k != UNIT / 2 {
            break Value::new(k, UNIT_SCALE);
        }
    };

    MrSortModel::new(CriteriaSpec::ascending(n)?, p, frontiers, weights, lambda)
}

/// `count` uniform alternatives labelled by `model`, with ids `a1..`.
pub fn gen_learning_set<R: Rng + ?Sized>(model: &MrSortModel, count: usize, rng: &mut R) -> LearningSet {
    label_uniform(&model.to_uncs(), count, rng)
}

/// `count` alternatives with raw values uniform on `[0,1)`, labelled by
/// `model`, with ids `a1..`.
pub fn label_uniform<R: Rng + ?Sized>(model: &UncsModel, count: usize, rng: &mut R) -> LearningSet {
    let spec = model.criteria();
    let alternatives = (1..=count)
        .map(|j| {
            let raw = uniform_profile(spec.len(), rng);
            let profile = spec.profile_from_raw(raw.values()).expect("length matches");
            let class = model.assign_unchecked(profile.values());
            Alternative { id: format!("a{j}"), profile, class }
        })
        .collect();
    LearningSet::new(spec.clone(), model.classes(), alternatives).expect("labels are in range")
}

/// Ground truth and learning set for `cfg`, each from its own stream.
pub fn generate(cfg: &GenConfig) -> Result<(MrSortModel, LearningSet)> {
    let model = gen_mrsort(cfg, &mut rng_for(cfg.seed, MODEL_STREAM))?;
    let data = gen_learning_set(&model, cfg.n_alternatives, &mut rng_for(cfg.seed, DATA_STREAM));
    Ok((model, data))
}
