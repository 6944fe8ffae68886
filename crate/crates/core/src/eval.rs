//! Agreement between models, and an exhaustive representability oracle for
//! tiny learning sets.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Coalition, Frontier, LearningSet, Threshold, UncsModel, UpSet};
use crate::synth::uniform_unit;

/// `max(min(4^n, 300000), 10000)`.
pub fn default_sample_size(n_criteria: usize) -> usize {
    let pow = 4u64.checked_pow(n_criteria as u32).unwrap_or(u64::MAX);
    pow.clamp(10_000, 300_000) as usize
}

/// Fraction of `samples` uniform profiles on `[0,1]^n` (raw units) that the
/// two models put in different classes.
pub fn err_rate<R: Rng + ?Sized>(a: &UncsModel, b: &UncsModel, samples: usize, rng: &mut R) -> Result<f64> {
    if a.criteria() != b.criteria() || a.classes() != b.classes() {
        return Err(Error::Input("models disagree on criteria or class count".into()));
    }
    if samples == 0 {
        return Ok(0.0);
    }
    let spec = a.criteria();
    let n = spec.len();
    let mut x = vec![crate::model::Value::ZERO; n];
    let mut diff = 0usize;
    for _ in 0..samples {
        for (i, v) in x.iter_mut().enumerate() {
            *v = spec.orient(i, uniform_unit(rng));
        }
        if a.assign_unchecked(&x) != b.assign_unchecked(&x) {
            diff += 1;
        }
    }
    Ok(diff as f64 / samples as f64)
}

/// Largest criteria count for which upsets are enumerated.
pub const ORACLE_MAX_CRITERIA: usize = 4;
/// Largest number of candidate frontier tuples per frontier.
pub const ORACLE_MAX_TUPLES: usize = 250_000;

/// Every upset of the subset lattice over `n` criteria, via antichains of
/// minimal members (Dedekind numbers: 3, 6, 20, 168 for n = 1..4).
pub fn enumerate_upsets(n: usize) -> Result<Vec<UpSet>> {
    if n == 0 || n > ORACLE_MAX_CRITERIA {
        return Err(Error::TooLarge(format!(
            "upset enumeration supports 1..={ORACLE_MAX_CRITERIA} criteria, got {n}"
        )));
    }
    fn grow(n: usize, next: u32, chosen: &mut Vec<Coalition>, out: &mut Vec<UpSet>) {
        if next == 1 << n {
            out.push(UpSet::generated_by(n, chosen.iter().copied()));
            return;
        }
        grow(n, next + 1, chosen, out);
        let c = Coalition(next);
        if chosen.iter().all(|&d| !d.is_subset_of(c) && !c.is_subset_of(d)) {
            chosen.push(c);
            grow(n, next + 1, chosen, out);
            chosen.pop();
        }
    }
    let mut out = Vec::new();
    grow(n, 0, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Searches every upset and every nested frontier tuple with thresholds in
/// `X*_i ∪ {above all}` for a model that reproduces `data`.
pub fn brute_force_representable(data: &LearningSet) -> Result<Option<UncsModel>> {
    let spec = data.criteria();
    let n = spec.len();
    let p = data.classes();
    let upsets = enumerate_upsets(n)?;

    let candidates: Vec<Vec<Threshold>> = (0..n)
        .map(|i| {
            let mut c: Vec<Threshold> = data.distinct_values(i).into_iter().map(Threshold::At).collect();
            c.push(Threshold::AboveAll);
            c
        })
        .collect();
    let tuple_count = candidates.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len()));
    let tuple_count = match tuple_count {
        Some(t) if t <= ORACLE_MAX_TUPLES => t,
        _ => return Err(Error::TooLarge("too many candidate frontier tuples for the oracle".into())),
    };

    // Tuples are index vectors into `candidates`; index order is threshold order.
    let tuples: Vec<Vec<usize>> = (0..tuple_count)
        .map(|mut code| {
            candidates
                .iter()
                .map(|c| {
                    let k = code % c.len();
                    code /= c.len();
                    k
                })
                .collect()
        })
        .collect();
    // Favorable coalition of every alternative against every tuple.
    let favorable: Vec<Vec<Coalition>> = tuples
        .iter()
        .map(|t| {
            data.alternatives()
                .iter()
                .map(|a| {
                    Coalition::from_indices(
                        (0..n).filter(|&i| candidates[i][t[i]].passed_by(a.profile.values()[i])),
                    )
                })
                .collect()
        })
        .collect();
    let classes: Vec<usize> = data.alternatives().iter().map(|a| a.class).collect();
    let below = |s: &[usize], t: &[usize]| s.iter().zip(t).all(|(a, b)| a <= b);

    for upset in &upsets {
        // Alternatives must pass frontier h exactly when their class exceeds h.
        let fits = |t: usize, h: usize| {
            favorable[t].iter().zip(&classes).all(|(&c, &k)| upset.contains(c) == (k > h))
        };
        // layers[h-1]: (tuple, parent in previous layer) pairs reachable by a nested chain.
        let mut layers: Vec<Vec<(usize, usize)>> = Vec::with_capacity(p - 1);
        for h in 1..p {
            let layer: Vec<(usize, usize)> = (0..tuple_count)
                .filter(|&t| fits(t, h))
                .filter_map(|t| match layers.last() {
                    None => Some((t, usize::MAX)),
                    Some(prev) => prev
                        .iter()
                        .position(|&(s, _)| below(&tuples[s], &tuples[t]))
                        .map(|pos| (t, pos)),
                })
                .collect();
            if layer.is_empty() {
                break;
            }
            layers.push(layer);
        }
        if layers.len() != p - 1 {
            continue;
        }
        let mut chain = Vec::with_capacity(p - 1);
        let mut pos = 0;
        for layer in layers.iter().rev() {
            let (t, parent) = layer[pos];
            chain.push(t);
            pos = parent;
        }
        chain.reverse();
        let frontiers = chain
            .iter()
            .map(|&t| Frontier::new((0..n).map(|i| candidates[i][tuples[t][i]]).collect()))
            .collect();
        let model = UncsModel::new(spec.clone(), p, frontiers, upset.clone())?;
        debug_assert!(model.extends(data)?.is_empty());
        return Ok(Some(model));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Alternative, CriteriaSpec, Profile, Value};
    use crate::synth::rng_for;

    fn d(s: &str) -> Value {
        s.parse().unwrap()
    }

    #[test]
    fn sample_sizes() {
        assert_eq!(default_sample_size(9), 262_144);
        assert_eq!(default_sample_size(5), 10_000);
        assert_eq!(default_sample_size(13), 300_000);
        assert_eq!(default_sample_size(1), 10_000);
        assert_eq!(default_sample_size(64), 300_000);
    }

    #[test]
    fn dedekind_counts() {
        let counts: Vec<usize> = (1..=4).map(|n| enumerate_upsets(n).unwrap().len()).collect();
        assert_eq!(counts, vec![3, 6, 20, 168]);
        assert!(enumerate_upsets(5).is_err());
    }

    fn one_criterion(threshold: &str) -> UncsModel {
        UncsModel::new(
            CriteriaSpec::ascending(1).unwrap(),
            2,
            vec![Frontier::new(vec![Threshold::At(d(threshold))])],
            UpSet::generated_by(1, [Coalition(1)]),
        )
        .unwrap()
    }

    #[test]
    fn err_rate_threshold_gap() {
        let (a, b) = (one_criterion("0.3"), one_criterion("0.5"));
        let n = 10_000;
        let e = err_rate(&a, &b, n, &mut rng_for(5, 2)).unwrap();
        let se = (0.2f64 * 0.8 / n as f64).sqrt();
        assert!((e - 0.2).abs() < 3.0 * se, "err_rate {e}");
        assert_eq!(err_rate(&a, &a, n, &mut rng_for(5, 2)).unwrap(), 0.0);
        let e2 = err_rate(&b, &a, n, &mut rng_for(5, 2)).unwrap();
        assert_eq!(e, e2);
    }

    fn set(rows: &[(&str, usize)], classes: usize) -> LearningSet {
        LearningSet::new(
            CriteriaSpec::ascending(1).unwrap(),
            classes,
            rows.iter()
                .enumerate()
                .map(|(j, (v, c))| Alternative { id: format!("a{j}"), profile: Profile::new(vec![d(v)]), class: *c })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn oracle_small_cases() {
        assert!(brute_force_representable(&set(&[("0.4", 1)], 2)).unwrap().is_some());
        assert!(brute_force_representable(&set(&[("0.4", 2)], 2)).unwrap().is_some());
        let m = brute_force_representable(&set(&[("0.2", 1), ("0.5", 2), ("0.9", 3)], 3)).unwrap().unwrap();
        assert_eq!(m.frontiers().len(), 2);
        // dominance violation
        assert!(brute_force_representable(&set(&[("0.2", 2), ("0.8", 1)], 2)).unwrap().is_none());
    }
}
