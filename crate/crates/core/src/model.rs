//! Domain types and exact semantics of non-compensatory sorting.
//!
//! Every scale is stored in "more is better" orientation: values of
//! minimize-direction criteria are negated when a [`Profile`] is built from
//! raw data, and negated back when written out. Values are exact decimals so
//! threshold comparisons never suffer from floating-point ties.

use std::collections::HashSet;
use std::fmt;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A scale value.
pub type Value = Decimal;

/// Criteria beyond this count would need coalition tables of more than a
/// million entries.
pub const MAX_CRITERIA: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub direction: Direction,
}

impl Criterion {
    pub fn new(name: impl Into<String>, direction: Direction) -> Self {
        Criterion { name: name.into(), direction }
    }
}

/// The ordered list of criteria shared by models and learning sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriteriaSpec {
    criteria: Vec<Criterion>,
}

impl CriteriaSpec {
    pub fn new(criteria: Vec<Criterion>) -> Result<Self> {
        if criteria.is_empty() {
            return Err(Error::Input("at least one criterion is required".into()));
        }
        if criteria.len() > MAX_CRITERIA {
            return Err(Error::Input(format!(
                "{} criteria exceed the supported maximum of {MAX_CRITERIA}",
                criteria.len()
            )));
        }
        let mut seen = HashSet::new();
        for c in &criteria {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::Input(format!("duplicate criterion name `{}`", c.name)));
            }
        }
        Ok(CriteriaSpec { criteria })
    }

    /// `count` maximized criteria named `g1..gN`.
    pub fn ascending(count: usize) -> Result<Self> {
        Self::new(
            (1..=count)
                .map(|i| Criterion::new(format!("g{i}"), Direction::Maximize))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.criteria.len()
    }

    pub fn is_empty(&self) -> bool {
        self.criteria.is_empty()
    }

    pub fn criteria(&self) -> &[Criterion] {
        &self.criteria
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.criteria.iter().map(|c| c.name.as_str())
    }

    pub fn direction(&self, i: usize) -> Direction {
        self.criteria[i].direction
    }

    pub fn full_coalition(&self) -> Coalition {
        Coalition::full(self.len())
    }

    /// Maps a raw value on criterion `i` to the ascending internal scale.
    pub fn orient(&self, i: usize, raw: Value) -> Value {
        match self.direction(i) {
            Direction::Maximize => raw,
            Direction::Minimize => -raw,
        }
    }

    /// Inverse of [`CriteriaSpec::orient`]; the map is an involution.
    pub fn raw(&self, i: usize, oriented: Value) -> Value {
        self.orient(i, oriented)
    }

    /// Builds a profile from raw (as-measured) values.
    pub fn profile_from_raw(&self, raw: &[Value]) -> Result<Profile> {
        self.check_len(raw.len())?;
        Ok(Profile(raw.iter().enumerate().map(|(i, v)| self.orient(i, *v)).collect()))
    }

    pub fn raw_values(&self, profile: &Profile) -> Vec<Value> {
        profile.0.iter().enumerate().map(|(i, v)| self.raw(i, *v)).collect()
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::Input(format!(
                "expected {} criterion values, got {len}",
                self.len()
            )));
        }
        Ok(())
    }
}

/// One value per criterion, in ascending (more is better) orientation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Profile(Vec<Value>);

impl Profile {
    /// Wraps already-oriented values.
    pub fn new(values: Vec<Value>) -> Self {
        Profile(values)
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A frontier entry: a scale value, or a sentinel above every scale value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Threshold {
    At(Value),
    AboveAll,
}

impl Threshold {
    /// Whether `value` clears this threshold (inclusive).
    #[inline]
    pub fn passed_by(self, value: Value) -> bool {
        match self {
            Threshold::At(t) => value >= t,
            Threshold::AboveAll => false,
        }
    }

    pub fn value(self) -> Option<Value> {
        match self {
            Threshold::At(v) => Some(v),
            Threshold::AboveAll => None,
        }
    }
}

/// A limiting profile between two consecutive classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frontier(Vec<Threshold>);

impl Frontier {
    pub fn new(thresholds: Vec<Threshold>) -> Self {
        Frontier(thresholds)
    }

    pub fn thresholds(&self) -> &[Threshold] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Weak dominance between frontiers, with `AboveAll` as the top element.
    pub fn dominated_by(&self, other: &Frontier) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl From<&Profile> for Frontier {
    fn from(p: &Profile) -> Self {
        Frontier(p.0.iter().map(|v| Threshold::At(*v)).collect())
    }
}

/// A subset of criteria, as a bit mask over criterion indices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition(pub u32);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn full(n: usize) -> Coalition {
        Coalition(((1u64 << n) - 1) as u32)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Coalition {
        Coalition(indices.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn with(self, i: usize) -> Coalition {
        Coalition(self.0 | 1 << i)
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn complement(self, n: usize) -> Coalition {
        Coalition(!self.0 & Coalition::full(n).0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |i| self.contains(*i))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// An upward-closed family of coalitions, stored as a membership table
/// indexed by bit mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UpSet {
    n: usize,
    table: Vec<bool>,
}

impl UpSet {
    /// Validates upward closure of an explicit membership table.
    pub fn from_table(n: usize, table: Vec<bool>) -> Result<Self> {
        if n > MAX_CRITERIA || table.len() != 1 << n {
            return Err(Error::Model(format!(
                "coalition table of length {} does not match {n} criteria",
                table.len()
            )));
        }
        for mask in 0..table.len() {
            if !table[mask] {
                continue;
            }
            for i in 0..n {
                if table[mask | 1 << i] {
                    continue;
                }
                return Err(Error::Model(format!(
                    "coalition {} is sufficient but its superset {} is not",
                    Coalition(mask as u32),
                    Coalition((mask | 1 << i) as u32)
                )));
            }
        }
        Ok(UpSet { n, table })
    }

    /// The smallest upset containing every given coalition.
    pub fn generated_by(n: usize, generators: impl IntoIterator<Item = Coalition>) -> Self {
        let mut table = vec![false; 1 << n];
        for g in generators {
            table[g.index() & ((1 << n) - 1)] = true;
        }
        // Ascending mask order visits every subset before its supersets.
        for mask in 0..table.len() {
            if table[mask] {
                for i in 0..n {
                    table[mask | 1 << i] = true;
                }
            }
        }
        UpSet { n, table }
    }

    pub fn empty(n: usize) -> Self {
        UpSet { n, table: vec![false; 1 << n] }
    }

    pub fn all(n: usize) -> Self {
        UpSet { n, table: vec![true; 1 << n] }
    }

    pub fn criteria_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, c: Coalition) -> bool {
        self.table[c.index()]
    }

    pub fn members(&self) -> impl Iterator<Item = Coalition> + '_ {
        self.table
            .iter()
            .enumerate()
            .filter(|(_, m)| **m)
            .map(|(mask, _)| Coalition(mask as u32))
    }

    /// Members none of whose proper subsets are members.
    pub fn minimal_members(&self) -> Vec<Coalition> {
        self.members()
            .filter(|c| c.indices().all(|i| !self.table[c.index() & !(1 << i)]))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.table.iter().filter(|m| **m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Coalition of criteria on which `x` is at least as good as frontier `b`.
pub fn favorable_coalition(x: &Profile, b: &Frontier) -> Result<Coalition> {
    if x.len() != b.len() {
        return Err(Error::Input(format!(
            "profile has {} values but frontier has {}",
            x.len(),
            b.len()
        )));
    }
    Ok(favorable_unchecked(x.values(), b.thresholds()))
}

#[inline]
pub(crate) fn favorable_unchecked(x: &[Value], b: &[Threshold]) -> Coalition {
    let mut mask = 0u32;
    for (i, (v, t)) in x.iter().zip(b).enumerate() {
        if t.passed_by(*v) {
            mask |= 1 << i;
        }
    }
    Coalition(mask)
}

/// Weak Pareto dominance: `x` is at least as good as `y` on every criterion.
pub fn dominates(x: &Profile, y: &Profile) -> Result<bool> {
    let c = favorable_coalition(x, &Frontier::from(y))?;
    Ok(c == Coalition::full(x.len()))
}

/// The upset of coalitions whose total weight reaches `lambda`.
pub fn mr_upset(weights: &[Value], lambda: Value) -> Result<UpSet> {
    if let Some(w) = weights.iter().find(|w| w.is_sign_negative() && !w.is_zero()) {
        return Err(Error::Input(format!("negative weight {w}")));
    }
    if lambda.is_sign_negative() && !lambda.is_zero() {
        return Err(Error::Input(format!("negative majority threshold {lambda}")));
    }
    let n = weights.len();
    if n > MAX_CRITERIA {
        return Err(Error::Input(format!("{n} weights exceed {MAX_CRITERIA} criteria")));
    }
    let mut sums = vec![Decimal::ZERO; 1 << n];
    for mask in 1usize..sums.len() {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + weights[low];
    }
    let table = sums.into_iter().map(|s| s >= lambda).collect();
    Ok(UpSet { n, table })
}

fn check_frontiers(criteria: &CriteriaSpec, classes: usize, frontiers: &[Frontier]) -> Result<()> {
    if classes < 2 {
        return Err(Error::Model(format!("at least 2 classes are required, got {classes}")));
    }
    if frontiers.len() != classes - 1 {
        return Err(Error::Model(format!(
            "{classes} classes need {} frontiers, got {}",
            classes - 1,
            frontiers.len()
        )));
    }
    for (h, f) in frontiers.iter().enumerate() {
        if f.len() != criteria.len() {
            return Err(Error::Model(format!(
                "frontier {} has {} entries for {} criteria",
                h + 1,
                f.len(),
                criteria.len()
            )));
        }
    }
    for (h, pair) in frontiers.windows(2).enumerate() {
        if !pair[0].dominated_by(&pair[1]) {
            return Err(Error::Model(format!(
                "frontier {} is not dominated by frontier {}",
                h + 1,
                h + 2
            )));
        }
    }
    Ok(())
}

/// A U-NCS model: nested frontiers and a single upset of sufficient
/// coalitions. Frontier `h` (1-based) separates class `h` from class `h + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UncsModel {
    criteria: CriteriaSpec,
    classes: usize,
    frontiers: Vec<Frontier>,
    sufficient: UpSet,
}

impl UncsModel {
    pub fn new(
        criteria: CriteriaSpec,
        classes: usize,
        frontiers: Vec<Frontier>,
        sufficient: UpSet,
    ) -> Result<Self> {
        check_frontiers(&criteria, classes, &frontiers)?;
        if sufficient.criteria_count() != criteria.len() {
            return Err(Error::Model(format!(
                "upset is over {} criteria, model has {}",
                sufficient.criteria_count(),
                criteria.len()
            )));
        }
        Ok(UncsModel { criteria, classes, frontiers, sufficient })
    }

    pub fn criteria(&self) -> &CriteriaSpec {
        &self.criteria
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn frontiers(&self) -> &[Frontier] {
        &self.frontiers
    }

    pub fn sufficient(&self) -> &UpSet {
        &self.sufficient
    }

    /// Class index in `1..=classes`.
    pub fn assign(&self, x: &Profile) -> Result<usize> {
        self.criteria.check_len(x.len())?;
        Ok(self.assign_unchecked(x.values()))
    }

    #[inline]
    pub(crate) fn assign_unchecked(&self, x: &[Value]) -> usize {
        // Passed frontiers form a prefix; stop at the first failure.
        let mut class = 1;
        for b in &self.frontiers {
            if !self.sufficient.contains(favorable_unchecked(x, b.thresholds())) {
                break;
            }
            class += 1;
        }
        class
    }

    /// Reference alternatives whose recorded class the model does not reproduce.
    pub fn extends(&self, data: &LearningSet) -> Result<Vec<Violation>> {
        if data.criteria() != &self.criteria {
            return Err(Error::Input("learning set and model use different criteria".into()));
        }
        if data.classes() != self.classes {
            return Err(Error::Input(format!(
                "learning set has {} classes, model has {}",
                data.classes(),
                self.classes
            )));
        }
        Ok(data
            .alternatives()
            .iter()
            .filter_map(|a| {
                let computed = self.assign_unchecked(a.profile.values());
                (computed != a.class).then(|| Violation {
                    id: a.id.clone(),
                    expected: a.class,
                    computed,
                })
            })
            .collect())
    }
}

/// An MR-Sort model: nested frontiers, voting weights, majority threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MrSortModel {
    criteria: CriteriaSpec,
    classes: usize,
    frontiers: Vec<Frontier>,
    weights: Vec<Value>,
    lambda: Value,
}

impl MrSortModel {
    pub fn new(
        criteria: CriteriaSpec,
        classes: usize,
        frontiers: Vec<Frontier>,
        weights: Vec<Value>,
        lambda: Value,
    ) -> Result<Self> {
        check_frontiers(&criteria, classes, &frontiers)?;
        if weights.len() != criteria.len() {
            return Err(Error::Model(format!(
                "{} weights for {} criteria",
                weights.len(),
                criteria.len()
            )));
        }
        // Validates signs.
        mr_upset(&weights, lambda).map_err(|e| Error::Model(e.to_string()))?;
        Ok(MrSortModel { criteria, classes, frontiers, weights, lambda })
    }

    pub fn criteria(&self) -> &CriteriaSpec {
        &self.criteria
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn frontiers(&self) -> &[Frontier] {
        &self.frontiers
    }

    pub fn weights(&self) -> &[Value] {
        &self.weights
    }

    pub fn lambda(&self) -> Value {
        self.lambda
    }

    pub fn to_uncs(&self) -> UncsModel {
        let sufficient = mr_upset(&self.weights, self.lambda).expect("validated at construction");
        UncsModel {
            criteria: self.criteria.clone(),
            classes: self.classes,
            frontiers: self.frontiers.clone(),
            sufficient,
        }
    }
}

/// A reference alternative the model failed to reproduce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub id: String,
    pub expected: usize,
    pub computed: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected class {}, model assigns {}", self.id, self.expected, self.computed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alternative {
    pub id: String,
    pub profile: Profile,
    pub class: usize,
}

/// Reference alternatives with their assigned classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LearningSet {
    criteria: CriteriaSpec,
    classes: usize,
    alternatives: Vec<Alternative>,
}

impl LearningSet {
    pub fn new(criteria: CriteriaSpec, classes: usize, alternatives: Vec<Alternative>) -> Result<Self> {
        if classes < 2 {
            return Err(Error::Input(format!("at least 2 classes are required, got {classes}")));
        }
        let mut ids = HashSet::new();
        for a in &alternatives {
            criteria.check_len(a.profile.len()).map_err(|_| {
                Error::Input(format!(
                    "alternative `{}` has {} values for {} criteria",
                    a.id,
                    a.profile.len(),
                    criteria.len()
                ))
            })?;
            if a.class < 1 || a.class > classes {
                return Err(Error::Input(format!(
                    "alternative `{}` has class {} outside 1..={classes}",
                    a.id, a.class
                )));
            }
            if !ids.insert(a.id.as_str()) {
                return Err(Error::Input(format!("duplicate alternative id `{}`", a.id)));
            }
        }
        Ok(LearningSet { criteria, classes, alternatives })
    }

    pub fn criteria(&self) -> &CriteriaSpec {
        &self.criteria
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn alternatives(&self) -> &[Alternative] {
        &self.alternatives
    }

    pub fn len(&self) -> usize {
        self.alternatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alternatives.is_empty()
    }

    /// Sorted distinct (oriented) values taken on criterion `i`.
    pub fn distinct_values(&self, i: usize) -> Vec<Value> {
        let mut v: Vec<Value> = self.alternatives.iter().map(|a| a.profile.values()[i]).collect();
        v.sort();
        v.dedup();
        v
    }
}
