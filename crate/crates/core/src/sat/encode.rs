use std::collections::HashMap;

use serde_json::json;

use crate::cnf::{Cnf, TruthAssignment};
use crate::error::{Error, Result};
use crate::model::{
    dominates, Alternative, Coalition, CriteriaSpec, Frontier, LearningSet, Threshold, UncsModel,
    UpSet, Value,
};

/// Variable numbering for an encoded learning set.
///
/// `x` ids come first, in lexicographic (criterion, frontier, value rank)
/// order starting at 1; `y` ids follow in bit-mask order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    criteria: CriteriaSpec,
    classes: usize,
    values: Vec<Vec<Value>>,
    offsets: Vec<usize>,
    num_x: usize,
}

/// What a variable id stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarMeaning {
    /// Value of rank `rank` on `criterion` clears frontier `frontier` (1-based).
    Threshold { criterion: usize, frontier: usize, rank: usize },
    Sufficient(Coalition),
}

impl Vocabulary {
    pub fn criteria(&self) -> &CriteriaSpec {
        &self.criteria
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn frontiers(&self) -> usize {
        self.classes - 1
    }

    /// Sorted distinct oriented reference values on criterion `i`.
    pub fn values(&self, i: usize) -> &[Value] {
        &self.values[i]
    }

    pub fn num_x(&self) -> usize {
        self.num_x
    }

    pub fn num_y(&self) -> usize {
        1 << self.criteria.len()
    }

    pub fn num_vars(&self) -> usize {
        self.num_x + self.num_y()
    }

    /// Id of `x(i, h, k)`; `h` is 1-based, `rank` indexes [`Vocabulary::values`].
    #[inline]
    pub fn x_var(&self, criterion: usize, frontier: usize, rank: usize) -> i32 {
        debug_assert!(frontier >= 1 && frontier < self.classes);
        debug_assert!(rank < self.values[criterion].len());
        (self.offsets[criterion] + (frontier - 1) * self.values[criterion].len() + rank + 1) as i32
    }

    #[inline]
    pub fn y_var(&self, coalition: Coalition) -> i32 {
        (self.num_x + coalition.index() + 1) as i32
    }

    pub fn rank_of(&self, criterion: usize, value: Value) -> Option<usize> {
        self.values[criterion].binary_search(&value).ok()
    }

    pub fn meaning(&self, var: usize) -> Option<VarMeaning> {
        if var == 0 || var > self.num_vars() {
            return None;
        }
        if var > self.num_x {
            return Some(VarMeaning::Sufficient(Coalition((var - self.num_x - 1) as u32)));
        }
        let criterion = self.offsets.partition_point(|&o| o < var) - 1;
        let local = var - self.offsets[criterion] - 1;
        let width = self.values[criterion].len();
        Some(VarMeaning::Threshold { criterion, frontier: local / width + 1, rank: local % width })
    }

    /// One human-readable line per variable, as embedded in DIMACS comments.
    pub fn comment_lines(&self) -> Vec<String> {
        (1..=self.num_vars())
            .map(|var| match self.meaning(var).expect("in range") {
                VarMeaning::Threshold { criterion, frontier, rank } => format!(
                    "x {var} {} {frontier} {}",
                    self.criteria.criteria()[criterion].name,
                    self.criteria.raw(criterion, self.values[criterion][rank]).normalize()
                ),
                VarMeaning::Sufficient(c) => format!("y {var} {}", c.0),
            })
            .collect()
    }

    /// JSON map from variable id to its semantic tuple.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = (1..=self.num_vars())
            .map(|var| {
                let entry = match self.meaning(var).expect("in range") {
                    VarMeaning::Threshold { criterion, frontier, rank } => json!({
                        "kind": "x",
                        "criterion": self.criteria.criteria()[criterion].name,
                        "frontier": frontier,
                        "value": self.criteria.raw(criterion, self.values[criterion][rank]).normalize().to_string(),
                    }),
                    VarMeaning::Sufficient(c) => json!({ "kind": "y", "coalition": c.0 }),
                };
                (var.to_string(), entry)
            })
            .collect();
        serde_json::Value::Object(map)
    }
}

pub fn build_vocabulary(data: &LearningSet) -> Vocabulary {
    let n = data.criteria().len();
    let frontiers = data.classes() - 1;
    let values: Vec<Vec<Value>> = (0..n).map(|i| data.distinct_values(i)).collect();
    let mut offsets = Vec::with_capacity(n);
    let mut next = 0;
    for v in &values {
        offsets.push(next);
        next += frontiers * v.len();
    }
    Vocabulary {
        criteria: data.criteria().clone(),
        classes: data.classes(),
        values,
        offsets,
        num_x: next,
    }
}

/// Clause counts per family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FamilyCounts {
    /// Ascending scales: consecutive reference values.
    pub ascending: usize,
    /// Nested frontiers: consecutive frontiers.
    pub hierarchy: usize,
    /// Upset closure: covering pairs of coalitions.
    pub coalitions: usize,
    /// Alternatives just below a frontier do not clear it.
    pub weak: usize,
    /// Alternatives just above a frontier clear it.
    pub strong: usize,
}

impl FamilyCounts {
    pub fn total(&self) -> usize {
        self.ascending + self.hierarchy + self.coalitions + self.weak + self.strong
    }

    pub fn as_array(&self) -> [usize; 5] {
        [self.ascending, self.hierarchy, self.coalitions, self.weak, self.strong]
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EncodeOptions {
    /// Skip the per-alternative clauses of alternatives whose clauses are
    /// implied by a same-class alternative (a dominating one below a
    /// frontier, a dominated one above it). Equisatisfiable; off by default
    /// so clause counts follow the closed-form family sizes.
    pub reduce_dominated: bool,
}

/// An encoded learning set.
#[derive(Clone, Debug)]
pub struct CnfInstance {
    pub cnf: Cnf,
    pub vocabulary: Vocabulary,
    pub counts: FamilyCounts,
    /// Pairs of alternative ids with identical profiles but different
    /// classes; any such pair makes the instance unsatisfiable.
    pub conflicts: Vec<(String, String)>,
}

impl CnfInstance {
    /// DIMACS text with the vocabulary recorded as comment lines.
    pub fn to_dimacs(&self) -> String {
        super::write_dimacs_with_comments(&self.cnf, self.vocabulary.comment_lines())
    }
}

pub fn encode(data: &LearningSet) -> Result<CnfInstance> {
    encode_with(data, EncodeOptions::default())
}

pub fn encode_with(data: &LearningSet, options: EncodeOptions) -> Result<CnfInstance> {
    let p = data.classes();
    if p < 2 {
        return Err(Error::Input(format!("at least 2 classes are required, got {p}")));
    }
    let (alternatives, conflicts) = dedup(data.alternatives());
    let vocab = build_vocabulary(data);
    let n = vocab.criteria.len();
    let mut cnf = Cnf::new(vocab.num_vars());
    let mut counts = FamilyCounts::default();

    for i in 0..n {
        let width = vocab.values[i].len();
        for h in 1..p {
            for k in 1..width {
                cnf.push_unchecked(vec![vocab.x_var(i, h, k), -vocab.x_var(i, h, k - 1)]);
                counts.ascending += 1;
            }
        }
    }

    for i in 0..n {
        for h in 1..p - 1 {
            for k in 0..vocab.values[i].len() {
                cnf.push_unchecked(vec![vocab.x_var(i, h, k), -vocab.x_var(i, h + 1, k)]);
                counts.hierarchy += 1;
            }
        }
    }

    for mask in 0..1u32 << n {
        let b = Coalition(mask);
        for i in (0..n).filter(|&i| !b.contains(i)) {
            cnf.push_unchecked(vec![vocab.y_var(b.with(i)), -vocab.y_var(b)]);
            counts.coalitions += 1;
        }
    }

    let ranks: Vec<Vec<usize>> = alternatives
        .iter()
        .map(|a| {
            a.profile
                .values()
                .iter()
                .enumerate()
                .map(|(i, v)| vocab.rank_of(i, *v).expect("reference value in vocabulary"))
                .collect()
        })
        .collect();

    // Below frontier h: alternatives of class h.
    for h in 1..p {
        let below = members_of_class(&alternatives, h, options.reduce_dominated, Extreme::Maximal);
        for &u in &below {
            for mask in 0..1u32 << n {
                let b = Coalition(mask);
                let mut clause: Vec<i32> = b.indices().map(|i| -vocab.x_var(i, h, ranks[u][i])).collect();
                clause.push(-vocab.y_var(b));
                cnf.push_unchecked(clause);
                counts.weak += 1;
            }
        }
    }

    // Above frontier h: alternatives of class h + 1.
    for h in 1..p {
        let above = members_of_class(&alternatives, h + 1, options.reduce_dominated, Extreme::Minimal);
        for &a in &above {
            for mask in 0..1u32 << n {
                let b = Coalition(mask);
                let mut clause: Vec<i32> = b.indices().map(|i| vocab.x_var(i, h, ranks[a][i])).collect();
                clause.push(vocab.y_var(b.complement(n)));
                cnf.push_unchecked(clause);
                counts.strong += 1;
            }
        }
    }

    Ok(CnfInstance { cnf, vocabulary: vocab, counts, conflicts })
}

#[derive(Clone, Copy)]
enum Extreme {
    Maximal,
    Minimal,
}

/// Indices of alternatives in `class`, optionally restricted to the
/// non-dominated ones in the given direction.
fn members_of_class(alternatives: &[Alternative], class: usize, reduce: bool, keep: Extreme) -> Vec<usize> {
    let members: Vec<usize> = (0..alternatives.len())
        .filter(|&k| alternatives[k].class == class)
        .collect();
    if !reduce {
        return members;
    }
    members
        .iter()
        .copied()
        .filter(|&k| {
            !members.iter().any(|&j| {
                if j == k {
                    return false;
                }
                let (pk, pj) = (&alternatives[k].profile, &alternatives[j].profile);
                // Profiles are distinct after dedup, so dominance is strict here.
                match keep {
                    Extreme::Maximal => dominates(pj, pk).unwrap_or(false),
                    Extreme::Minimal => dominates(pk, pj).unwrap_or(false),
                }
            })
        })
        .collect()
}

/// Drops exact duplicates and reports same-profile, different-class pairs.
fn dedup(alternatives: &[Alternative]) -> (Vec<Alternative>, Vec<(String, String)>) {
    let mut seen: HashMap<&[Value], Vec<(usize, &str)>> = HashMap::new();
    let mut kept = Vec::with_capacity(alternatives.len());
    let mut conflicts = Vec::new();
    for a in alternatives {
        let entry = seen.entry(a.profile.values()).or_default();
        if entry.iter().any(|(c, _)| *c == a.class) {
            continue;
        }
        for (_, other) in entry.iter() {
            conflicts.push((other.to_string(), a.id.clone()));
        }
        entry.push((a.class, &a.id));
        kept.push(a.clone());
    }
    (kept, conflicts)
}

/// Decodes a satisfying assignment: each frontier entry is the smallest
/// reference value whose variable is true (or above all values if none),
/// and the sufficient coalitions are those whose variable is true.
pub fn decode(vocab: &Vocabulary, sol: &TruthAssignment) -> Result<UncsModel> {
    if sol.len() < vocab.num_vars() {
        return Err(Error::Input(format!(
            "assignment covers {} variables, vocabulary has {}",
            sol.len(),
            vocab.num_vars()
        )));
    }
    let n = vocab.criteria.len();
    let frontiers = (1..vocab.classes)
        .map(|h| {
            Frontier::new(
                (0..n)
                    .map(|i| {
                        (0..vocab.values[i].len())
                            .find(|&k| sol.get(vocab.x_var(i, h, k) as usize))
                            .map_or(Threshold::AboveAll, |k| Threshold::At(vocab.values[i][k]))
                    })
                    .collect(),
            )
        })
        .collect();
    let table = (0..1u32 << n).map(|m| sol.get(vocab.y_var(Coalition(m)) as usize)).collect();
    let sufficient = UpSet::from_table(n, table).map_err(|e| Error::Decode(e.to_string()))?;
    UncsModel::new(vocab.criteria.clone(), vocab.classes, frontiers, sufficient)
        .map_err(|e| Error::Decode(e.to_string()))
}

/// The assignment induced by a model: `x(i, h, k)` holds iff `k` clears
/// `b^h_i`, and `y(B)` holds iff `B` is sufficient.
pub fn model_assignment(vocab: &Vocabulary, model: &UncsModel) -> Result<TruthAssignment> {
    if model.criteria() != &vocab.criteria || model.classes() != vocab.classes {
        return Err(Error::Input("model does not match the vocabulary".into()));
    }
    let mut sol = TruthAssignment::all(vocab.num_vars(), false);
    for (h0, b) in model.frontiers().iter().enumerate() {
        for (i, t) in b.thresholds().iter().enumerate() {
            for (k, v) in vocab.values[i].iter().enumerate() {
                sol.set(vocab.x_var(i, h0 + 1, k) as usize, t.passed_by(*v));
            }
        }
    }
    for c in model.sufficient().members() {
        sol.set(vocab.y_var(c) as usize, true);
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Profile;

    fn set(values: &[(&str, usize)], p: usize) -> LearningSet {
        let spec = CriteriaSpec::ascending(1).unwrap();
        let alts = values
            .iter()
            .enumerate()
            .map(|(k, (v, c))| Alternative {
                id: format!("a{}", k + 1),
                profile: Profile::new(vec![v.parse().unwrap()]),
                class: *c,
            })
            .collect();
        LearningSet::new(spec, p, alts).unwrap()
    }

    #[test]
    fn vocabulary_sizes() {
        let empty = LearningSet::new(CriteriaSpec::ascending(3).unwrap(), 2, vec![]).unwrap();
        let v = build_vocabulary(&empty);
        assert_eq!((v.num_x(), v.num_y()), (0, 8));

        let spec = CriteriaSpec::ascending(2).unwrap();
        let one = LearningSet::new(
            spec,
            2,
            vec![Alternative {
                id: "a".into(),
                profile: Profile::new(vec![1.into(), 2.into()]),
                class: 1,
            }],
        )
        .unwrap();
        let v = build_vocabulary(&one);
        assert_eq!((v.num_x(), v.num_y(), v.num_vars()), (2, 4, 6));
    }

    #[test]
    fn variable_meanings_round_trip() {
        let data = set(&[("0.1", 1), ("0.5", 2), ("0.9", 3)], 3);
        let v = build_vocabulary(&data);
        for var in 1..=v.num_vars() {
            let id = match v.meaning(var).unwrap() {
                VarMeaning::Threshold { criterion, frontier, rank } => v.x_var(criterion, frontier, rank),
                VarMeaning::Sufficient(c) => v.y_var(c),
            };
            assert_eq!(id as usize, var);
        }
        assert_eq!(v.meaning(0), None);
        assert_eq!(v.meaning(v.num_vars() + 1), None);
    }

    #[test]
    fn dominance_violation_pair_clauses() {
        // a = 0.2 in class 2, u = 0.8 in class 1
        let data = set(&[("0.2", 2), ("0.8", 1)], 2);
        let inst = encode(&data).unwrap();
        assert_eq!(inst.counts.as_array(), [1, 0, 1, 2, 2]);
        let v = &inst.vocabulary;
        let clauses = inst.cnf.clauses();
        // weak: u at B = {} and B = {0}
        assert!(clauses.contains(&vec![-v.y_var(Coalition(0))]));
        assert!(clauses.contains(&vec![-v.x_var(0, 1, 1), -v.y_var(Coalition(1))]));
        // strong: a at B = {} and B = {0}
        assert!(clauses.contains(&vec![v.y_var(Coalition(1))]));
        assert!(clauses.contains(&vec![v.x_var(0, 1, 0), v.y_var(Coalition(0))]));
    }

    #[test]
    fn empty_set_only_has_coalition_clauses() {
        let data = LearningSet::new(CriteriaSpec::ascending(3).unwrap(), 3, vec![]).unwrap();
        let inst = encode(&data).unwrap();
        assert_eq!(inst.counts.as_array(), [0, 0, 12, 0, 0]);
        assert!(inst.cnf.is_satisfied_by(&TruthAssignment::all(inst.cnf.num_vars(), true)));
    }

    #[test]
    fn duplicates_are_merged_and_conflicts_reported() {
        let data = set(&[("0.5", 1), ("0.5", 1), ("0.5", 2)], 2);
        let inst = encode(&data).unwrap();
        assert_eq!(inst.conflicts, vec![("a1".to_string(), "a3".to_string())]);
        // one class-1 and one class-2 alternative remain
        assert_eq!((inst.counts.weak, inst.counts.strong), (2, 2));
    }

    #[test]
    fn decode_extremes() {
        let data = set(&[("0.1", 1), ("0.5", 2), ("0.9", 2)], 2);
        let v = build_vocabulary(&data);
        let m = decode(&v, &TruthAssignment::all(v.num_vars(), true)).unwrap();
        assert_eq!(m.frontiers()[0].thresholds(), &[Threshold::At("0.1".parse().unwrap())]);
        assert_eq!(m.sufficient(), &UpSet::all(1));

        let mut sol = TruthAssignment::all(v.num_vars(), true);
        for k in 0..3 {
            sol.set(v.x_var(0, 1, k) as usize, false);
        }
        let m = decode(&v, &sol).unwrap();
        assert_eq!(m.frontiers()[0].thresholds(), &[Threshold::AboveAll]);

        let short = TruthAssignment::all(v.num_vars() - 1, true);
        assert!(matches!(decode(&v, &short), Err(Error::Input(_))));
    }

    #[test]
    fn decode_rejects_non_upset() {
        let data = set(&[("0.1", 1)], 2);
        let v = build_vocabulary(&data);
        let mut sol = TruthAssignment::all(v.num_vars(), false);
        sol.set(v.y_var(Coalition(0)) as usize, true);
        assert!(matches!(decode(&v, &sol), Err(Error::Decode(_))));
    }

    #[test]
    fn reduction_drops_implied_alternatives() {
        // class 1: 0.1 is dominated by 0.3; class 2: 0.9 dominates 0.7
        let data = set(&[("0.1", 1), ("0.3", 1), ("0.7", 2), ("0.9", 2)], 2);
        let full = encode(&data).unwrap();
        let reduced = encode_with(&data, EncodeOptions { reduce_dominated: true }).unwrap();
        assert_eq!((full.counts.weak, full.counts.strong), (4, 4));
        assert_eq!((reduced.counts.weak, reduced.counts.strong), (2, 2));
    }
}
