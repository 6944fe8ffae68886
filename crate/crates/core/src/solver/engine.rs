use std::time::Instant;

use super::{Heuristic, SolveResult, SolveStats, SolveStatus, SolverConfig};
use crate::cnf::{Cnf, TruthAssignment};
use crate::error::{Error, Result};

// Literal encoding: 2 * var + sign, sign 1 meaning negated; vars 0-based.
type Lit = u32;

const UNDEF: u8 = 2;

#[inline]
fn lit_of(dimacs: i32) -> Lit {
    let v = dimacs.unsigned_abs() - 1;
    2 * v + (dimacs < 0) as u32
}

#[inline]
fn var(l: Lit) -> usize {
    (l >> 1) as usize
}

#[inline]
fn to_dimacs(l: Lit) -> i32 {
    let v = (l >> 1) as i32 + 1;
    if l & 1 == 1 {
        -v
    } else {
        v
    }
}

/// Single-use search state for one formula.
///
/// Propagation uses two watched literals per clause. Branching follows
/// [`Heuristic`]; with learning on, conflicts are analysed to the first
/// unique implication point and learned clauses are minimized and
/// periodically pruned.
pub struct Solver {
    config: SolverConfig,
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
    /// Literal block distance of learned clauses, 0 for original ones.
    lbd: Vec<u32>,
    deleted: Vec<bool>,
    learnts: Vec<usize>,
    max_learnts: f64,
    watches: Vec<Vec<usize>>,
    units: Vec<Lit>,
    /// 0 = false, 1 = true, UNDEF otherwise.
    values: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    /// DPLL mode: whether the decision at each level is already the flipped branch.
    flipped: Vec<bool>,
    next_var: usize,
    activity: Vec<f64>,
    var_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    to_clear: Vec<usize>,
    level_stamp: Vec<u64>,
    stamp: u64,
    stats: SolveStats,
    trivially_unsat: bool,
}

/// Binary max-heap of variables by activity, ties to the lower index.
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap { heap: (0..n).collect(), pos: (0..n).collect() }
    }

    #[inline]
    fn better(act: &[f64], a: usize, b: usize) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != ABSENT
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let mut child = 2 * i + 1;
            if child >= n {
                break;
            }
            if child + 1 < n && Self::better(act, self.heap[child + 1], self.heap[child]) {
                child += 1;
            }
            if !Self::better(act, self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i]] = i;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = 0;
            self.down(0, act);
        }
        Some(top)
    }
}

impl Solver {
    pub fn new(cnf: &Cnf, config: SolverConfig) -> Self {
        let n = cnf.num_vars();
        let mut s = Solver {
            config,
            num_vars: n,
            clauses: Vec::with_capacity(cnf.num_clauses()),
            lbd: Vec::with_capacity(cnf.num_clauses()),
            deleted: Vec::with_capacity(cnf.num_clauses()),
            learnts: Vec::new(),
            max_learnts: 0.0,
            watches: vec![Vec::new(); 2 * n],
            units: Vec::new(),
            values: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![None; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            flipped: Vec::new(),
            next_var: 0,
            activity: vec![0.0; n],
            var_inc: 1.0,
            heap: VarHeap::new(n),
            phase: vec![false; n],
            seen: vec![false; n],
            to_clear: Vec::new(),
            level_stamp: vec![0; n + 1],
            stamp: 0,
            stats: SolveStats::default(),
            trivially_unsat: false,
        };
        for clause in cnf.clauses() {
            let mut lits: Vec<Lit> = clause.iter().map(|&l| lit_of(l)).collect();
            lits.sort_unstable();
            lits.dedup();
            match lits.len() {
                0 => s.trivially_unsat = true,
                1 => s.units.push(lits[0]),
                _ => {
                    s.attach(lits, 0);
                }
            }
        }
        s.max_learnts = (s.clauses.len() as f64 / 3.0).max(2000.0);
        s
    }

    fn attach(&mut self, lits: Vec<Lit>, lbd: u32) -> usize {
        let ci = self.clauses.len();
        self.watches[lits[0] as usize].push(ci);
        self.watches[lits[1] as usize].push(ci);
        self.clauses.push(lits);
        self.lbd.push(lbd);
        self.deleted.push(false);
        if lbd > 0 {
            self.learnts.push(ci);
        }
        ci
    }

    #[inline]
    fn lit_value(&self, l: Lit) -> u8 {
        let v = self.values[var(l)];
        if v == UNDEF {
            UNDEF
        } else {
            v ^ (l & 1) as u8
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = var(l);
        self.values[v] = 1 ^ (l & 1) as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Returns the index of a falsified clause, if any.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                i += 1;
                if self.deleted[ci] {
                    continue;
                }
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                let first_val = {
                    let v = self.values[var(first)];
                    if v == UNDEF {
                        UNDEF
                    } else {
                        v ^ (first & 1) as u8
                    }
                };
                if first_val == 1 {
                    ws[j] = ci;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let v = self.values[var(l)];
                    if v == UNDEF || v ^ (l & 1) as u8 == 1 {
                        clause.swap(1, k);
                        self.watches[clause[1] as usize].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = ci;
                j += 1;
                if first_val == 0 {
                    conflict = Some(ci);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(ci));
                }
            }
            ws.truncate(j);
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level as usize];
        let activity_mode = self.config.heuristic == Heuristic::Activity;
        for k in (start..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = var(l);
            self.values[v] = UNDEF;
            self.reason[v] = None;
            if activity_mode {
                self.phase[v] = l & 1 == 0;
                self.heap.insert(v, &self.activity);
            } else {
                self.next_var = self.next_var.min(v);
            }
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level as usize);
        self.flipped.truncate(level as usize);
        self.qhead = start;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        match self.config.heuristic {
            Heuristic::Lowest => {
                while self.next_var < self.num_vars && self.values[self.next_var] != UNDEF {
                    self.next_var += 1;
                }
                (self.next_var < self.num_vars).then(|| 2 * self.next_var as u32 + 1)
            }
            Heuristic::Activity => loop {
                let v = self.heap.pop(&self.activity)?;
                if self.values[v] == UNDEF {
                    return Some(2 * v as u32 + u32::from(!self.phase[v]));
                }
            },
        }
    }

    fn new_decision(&mut self, l: Lit, flipped: bool) {
        self.trail_lim.push(self.trail.len());
        self.flipped.push(flipped);
        self.enqueue(l, None);
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        if self.heap.contains(v) {
            self.heap.up(self.heap.pos[v], &self.activity);
        }
    }

    /// First-UIP conflict analysis; returns the learned clause (asserting
    /// literal first), the backjump level and the clause's LBD.
    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, u32, u32) {
        let current = self.decision_level();
        let mut learnt: Vec<Lit> = vec![0];
        let mut pending = 0;
        let mut index = self.trail.len();
        let mut p: Option<Lit> = None;
        loop {
            let start = usize::from(p.is_some());
            for k in start..self.clauses[confl].len() {
                let q = self.clauses[confl][k];
                let v = var(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] >= current {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[var(self.trail[index])] {
                    break;
                }
            }
            let lit = self.trail[index];
            self.seen[var(lit)] = false;
            pending -= 1;
            p = Some(lit);
            if pending == 0 {
                break;
            }
            confl = self.reason[var(lit)].expect("implied literal has a reason");
        }
        learnt[0] = p.expect("conflict involves the current level") ^ 1;
        self.var_inc /= 0.95;

        self.to_clear.clear();
        self.to_clear.extend(learnt[1..].iter().map(|&l| var(l)));
        let levels: u64 = learnt[1..].iter().fold(0, |acc, &l| acc | 1u64 << (self.level[var(l)] & 63));
        let mut kept = 1;
        for k in 1..learnt.len() {
            let l = learnt[k];
            if self.reason[var(l)].is_none() || !self.redundant(l, levels) {
                learnt[kept] = l;
                kept += 1;
            }
        }
        learnt.truncate(kept);
        for &v in &self.to_clear {
            self.seen[v] = false;
        }

        let mut back = 0;
        if learnt.len() > 1 {
            let mut max_k = 1;
            for k in 2..learnt.len() {
                if self.level[var(learnt[k])] > self.level[var(learnt[max_k])] {
                    max_k = k;
                }
            }
            learnt.swap(1, max_k);
            back = self.level[var(learnt[1])];
        }
        self.stamp += 1;
        let mut lbd = 0;
        for &l in &learnt {
            let lv = self.level[var(l)] as usize;
            if self.level_stamp[lv] != self.stamp {
                self.level_stamp[lv] = self.stamp;
                lbd += 1;
            }
        }
        (learnt, back, lbd.max(1))
    }

    /// Whether `l` is implied by the other literals of the learned clause
    /// (marked `seen`) through its reason chain.
    fn redundant(&mut self, l: Lit, levels: u64) -> bool {
        let mut stack = vec![l];
        let top = self.to_clear.len();
        while let Some(q) = stack.pop() {
            let ci = self.reason[var(q)].expect("only implied literals are expanded");
            for k in 1..self.clauses[ci].len() {
                let r = self.clauses[ci][k];
                let v = var(r);
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                if self.reason[v].is_some() && levels & (1u64 << (self.level[v] & 63)) != 0 {
                    self.seen[v] = true;
                    stack.push(r);
                    self.to_clear.push(v);
                } else {
                    for &u in &self.to_clear[top..] {
                        self.seen[u] = false;
                    }
                    self.to_clear.truncate(top);
                    return false;
                }
            }
        }
        true
    }

    fn locked(&self, ci: usize) -> bool {
        let first = self.clauses[ci][0];
        self.reason[var(first)] == Some(ci) && self.lit_value(first) == 1
    }

    /// Drops the less useful half of the learned clauses.
    fn reduce_db(&mut self) {
        let mut order = std::mem::take(&mut self.learnts);
        order.sort_by_key(|&ci| std::cmp::Reverse(self.lbd[ci]));
        let half = order.len() / 2;
        let mut kept = Vec::with_capacity(order.len());
        for (rank, ci) in order.into_iter().enumerate() {
            if rank < half && self.lbd[ci] > 2 && !self.locked(ci) {
                self.deleted[ci] = true;
                self.clauses[ci] = Vec::new();
            } else {
                kept.push(ci);
            }
        }
        self.learnts = kept;
    }

    /// Chronological backtracking: flip the deepest unflipped decision.
    /// Returns false when every branch is exhausted.
    fn backtrack_dpll(&mut self) -> bool {
        while let Some(&done) = self.flipped.last() {
            let level = self.decision_level();
            let decision = self.trail[self.trail_lim[level as usize - 1]];
            self.cancel_until(level - 1);
            if !done {
                self.new_decision(decision ^ 1, true);
                return true;
            }
        }
        false
    }

    fn luby(mut x: u64) -> u64 {
        let (mut size, mut seq) = (1u64, 0u32);
        while size < x + 1 {
            seq += 1;
            size = 2 * size + 1;
        }
        while size - 1 != x {
            size = (size - 1) >> 1;
            seq -= 1;
            x %= size;
        }
        1 << seq
    }

    pub fn solve(&mut self) -> Result<SolveResult> {
        let started = Instant::now();
        let status = self.search(started)?;
        self.stats.wall_ms = started.elapsed().as_secs_f64() * 1e3;
        let assignment = (status == SolveStatus::Sat).then(|| {
            TruthAssignment::from_values(self.values.iter().map(|&v| v == 1).collect())
        });
        Ok(SolveResult { status, assignment, stats: self.stats })
    }

    fn budget_error(&self, started: Instant) -> Error {
        Error::BudgetExceeded {
            conflicts: self.stats.conflicts,
            elapsed_ms: started.elapsed().as_millis() as u64,
        }
    }

    fn search(&mut self, started: Instant) -> Result<SolveStatus> {
        if self.trivially_unsat {
            return Ok(SolveStatus::Unsat);
        }
        for l in std::mem::take(&mut self.units) {
            match self.lit_value(l) {
                0 => return Ok(SolveStatus::Unsat),
                1 => {}
                _ => self.enqueue(l, None),
            }
        }
        let mut restart_round = 0;
        let mut conflicts_until_restart = 100 * Self::luby(0);
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                if self.stats.conflicts > self.config.max_conflicts {
                    return Err(self.budget_error(started));
                }
                if self.stats.conflicts.is_multiple_of(256) && started.elapsed() > self.config.time_limit {
                    return Err(self.budget_error(started));
                }
                if self.decision_level() == 0 {
                    return Ok(SolveStatus::Unsat);
                }
                if self.config.learning {
                    let (learnt, back, lbd) = self.analyze(confl);
                    self.cancel_until(back);
                    if learnt.len() == 1 {
                        self.enqueue(learnt[0], None);
                    } else {
                        let asserting = learnt[0];
                        let ci = self.attach(learnt, lbd);
                        self.enqueue(asserting, Some(ci));
                    }
                    if self.config.restarts {
                        conflicts_until_restart -= 1;
                        if conflicts_until_restart == 0 {
                            restart_round += 1;
                            conflicts_until_restart = 100 * Self::luby(restart_round);
                            self.cancel_until(0);
                        }
                    }
                    if self.learnts.len() as f64 >= self.max_learnts + self.trail.len() as f64 {
                        self.reduce_db();
                        self.max_learnts *= 1.1;
                    }
                } else if !self.backtrack_dpll() {
                    return Ok(SolveStatus::Unsat);
                }
            } else {
                let Some(l) = self.pick_branch() else {
                    return Ok(SolveStatus::Sat);
                };
                self.stats.decisions += 1;
                if self.stats.decisions.is_multiple_of(1024) && started.elapsed() > self.config.time_limit {
                    return Err(self.budget_error(started));
                }
                self.new_decision(l, false);
            }
        }
    }

    /// Literals fixed at decision level zero (DIMACS signed ids).
    pub fn root_literals(&self) -> Vec<i32> {
        let end = self.trail_lim.first().copied().unwrap_or(self.trail.len());
        self.trail[..end].iter().map(|&l| to_dimacs(l)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(n: usize, clauses: &[&[i32]]) -> Cnf {
        Cnf::from_clauses(n, clauses.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    fn configs() -> [SolverConfig; 3] {
        [
            SolverConfig::dpll(),
            SolverConfig { restarts: false, heuristic: Heuristic::Lowest, ..Default::default() },
            SolverConfig::default(),
        ]
    }

    #[test]
    fn small_cases() {
        for cfg in configs() {
            let r = Solver::new(&cnf(2, &[&[1], &[-1, 2]]), cfg.clone()).solve().unwrap();
            assert_eq!(r.status, SolveStatus::Sat);
            assert_eq!(r.assignment.unwrap().values(), &[true, true]);

            let r = Solver::new(&cnf(1, &[&[1], &[-1]]), cfg.clone()).solve().unwrap();
            assert_eq!(r.status, SolveStatus::Unsat);
            assert!(r.assignment.is_none());

            let r = Solver::new(&Cnf::new(0), cfg.clone()).solve().unwrap();
            assert_eq!(r.status, SolveStatus::Sat);
        }
    }

    #[test]
    fn pigeonhole_3_into_2_is_unsat() {
        // p(i,j): pigeon i in hole j, var = 2*i + j + 1
        let v = |i: i32, j: i32| 2 * i + j + 1;
        let mut clauses: Vec<Vec<i32>> = (0..3).map(|i| vec![v(i, 0), v(i, 1)]).collect();
        for j in 0..2 {
            for a in 0..3 {
                for b in a + 1..3 {
                    clauses.push(vec![-v(a, j), -v(b, j)]);
                }
            }
        }
        let f = Cnf::from_clauses(6, clauses).unwrap();
        for cfg in configs() {
            assert_eq!(Solver::new(&f, cfg).solve().unwrap().status, SolveStatus::Unsat);
        }
    }

    #[test]
    fn false_first_on_free_variables() {
        let r = Solver::new(&cnf(3, &[&[1, 2, 3]]), SolverConfig::dpll()).solve().unwrap();
        assert_eq!(r.assignment.unwrap().values(), &[false, false, true]);
        let r = Solver::new(&cnf(3, &[&[1, 2, 3]]), SolverConfig::default()).solve().unwrap();
        assert_eq!(r.assignment.unwrap().values(), &[false, false, true]);
    }

    #[test]
    fn heap_orders_by_activity_then_index() {
        let mut act = vec![0.0; 5];
        let mut h = VarHeap::new(5);
        act[3] = 2.0;
        h.up(h.pos[3], &act);
        act[1] = 2.0;
        h.up(h.pos[1], &act);
        let order: Vec<usize> = std::iter::from_fn(|| h.pop(&act)).collect();
        assert_eq!(order, vec![1, 3, 0, 2, 4]);
    }

    #[test]
    fn conflict_budget() {
        let v = |i: i32, j: i32| 3 * i + j + 1;
        let mut clauses: Vec<Vec<i32>> = (0..4).map(|i| vec![v(i, 0), v(i, 1), v(i, 2)]).collect();
        for j in 0..3 {
            for a in 0..4 {
                for b in a + 1..4 {
                    clauses.push(vec![-v(a, j), -v(b, j)]);
                }
            }
        }
        let f = Cnf::from_clauses(12, clauses).unwrap();
        let cfg = SolverConfig { max_conflicts: 2, ..Default::default() };
        assert!(matches!(Solver::new(&f, cfg).solve(), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn root_literals_from_units() {
        let mut s = Solver::new(&cnf(3, &[&[1], &[-1, 2], &[2, 3, -1]]), SolverConfig::default());
        s.solve().unwrap();
        let mut root = s.root_literals();
        root.sort();
        assert_eq!(root, vec![1, 2]);
    }

    #[test]
    fn luby_sequence() {
        let seq: Vec<u64> = (0..15).map(Solver::luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }
}
