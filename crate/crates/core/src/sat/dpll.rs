//! A small DPLL solver with two-watched-literal propagation and
//! chronological backtracking.
//!
//! This is deliberately minimal: no clause learning, no restarts, no
//! deletion. The decision oracle of the engine is an abstraction point and
//! the workloads here are desk-scale, so a simple, fully deterministic
//! solver whose decision polarity and variable order can be driven by a
//! seeded RNG is worth more than raw conflict throughput. Clauses may be
//! added between `solve` calls (blocking-clause enumeration).

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::OracleError;

/// Internal literal code: `var * 2 + negated`. Variables are 0-based.
pub type Lit = u32;

pub fn lit(var: u32, negated: bool) -> Lit {
    var * 2 + negated as u32
}

pub fn lit_var(l: Lit) -> u32 {
    l / 2
}

pub fn lit_negated(l: Lit) -> bool {
    l & 1 == 1
}

pub fn lit_neg(l: Lit) -> Lit {
    l ^ 1
}

#[derive(Debug, Clone)]
struct Level {
    decision: Lit,
    trail_start: usize,
    /// Assumption levels may not be flipped.
    flippable: bool,
    /// Whether the complementary decision was already explored.
    flipped: bool,
}

/// Per-call search limits and randomization.
#[derive(Debug, Default)]
pub struct SearchLimits<'a> {
    pub max_conflicts: Option<u64>,
    pub deadline: Option<Instant>,
    /// When set, decisions pick a random unassigned variable with a random
    /// polarity; otherwise the lowest-index variable, assigned false.
    pub rng: Option<&'a mut ChaCha8Rng>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat(Vec<bool>),
    Unsat,
}

#[derive(Debug, Default)]
pub struct Dpll {
    num_vars: usize,
    /// Clauses of length >= 2; positions 0 and 1 are the watched literals.
    clauses: Vec<Vec<Lit>>,
    units: Vec<Lit>,
    has_empty_clause: bool,
    /// watches[l] = indices of clauses currently watching literal l.
    watches: Vec<Vec<u32>>,
    assign: Vec<i8>, // 0 unassigned, 1 true, -1 false
    trail: Vec<Lit>,
    qhead: usize,
    levels: Vec<Level>,
    steps: u64,
}

impl Dpll {
    pub fn new(num_vars: usize) -> Self {
        Dpll {
            num_vars,
            watches: vec![Vec::new(); num_vars * 2],
            assign: vec![0; num_vars],
            ..Dpll::default()
        }
    }

    /// Grow the variable space (new variables are unconstrained).
    pub fn ensure_vars(&mut self, num_vars: usize) {
        if num_vars > self.num_vars {
            self.num_vars = num_vars;
            self.watches.resize(num_vars * 2, Vec::new());
            self.assign.resize(num_vars, 0);
        }
    }

    /// Add a clause. Duplicate literals are merged and tautological clauses
    /// dropped.
    pub fn add_clause(&mut self, mut lits: Vec<Lit>) {
        lits.sort_unstable();
        lits.dedup();
        for w in lits.windows(2) {
            if w[0] == lit_neg(w[1]) {
                return; // tautology
            }
        }
        match lits.len() {
            0 => self.has_empty_clause = true,
            1 => self.units.push(lits[0]),
            _ => {
                let ci = self.clauses.len() as u32;
                self.watches[lits[0] as usize].push(ci);
                self.watches[lits[1] as usize].push(ci);
                self.clauses.push(lits);
            }
        }
    }

    fn value_lit(&self, l: Lit) -> Option<bool> {
        match self.assign[lit_var(l) as usize] {
            0 => None,
            v => Some((v > 0) ^ lit_negated(l)),
        }
    }

    fn enqueue(&mut self, l: Lit) -> bool {
        match self.value_lit(l) {
            Some(b) => b,
            None => {
                self.assign[lit_var(l) as usize] = if lit_negated(l) { -1 } else { 1 };
                self.trail.push(l);
                true
            }
        }
    }

    fn undo_to(&mut self, trail_start: usize) {
        while self.trail.len() > trail_start {
            let l = self.trail.pop().unwrap();
            self.assign[lit_var(l) as usize] = 0;
        }
        self.qhead = self.trail.len();
    }

    fn reset(&mut self) {
        self.undo_to(0);
        self.levels.clear();
        self.steps = 0;
    }

    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.steps += 1;
            let falsified = lit_neg(p);
            let mut ws = std::mem::take(&mut self.watches[falsified as usize]);
            let mut i = 0;
            'clauses: while i < ws.len() {
                let ci = ws[i] as usize;
                if self.clauses[ci][0] == falsified {
                    self.clauses[ci].swap(0, 1);
                }
                let other = self.clauses[ci][0];
                if self.value_lit(other) == Some(true) {
                    i += 1;
                    continue;
                }
                for k in 2..self.clauses[ci].len() {
                    let cand = self.clauses[ci][k];
                    if self.value_lit(cand) != Some(false) {
                        self.clauses[ci].swap(1, k);
                        self.watches[cand as usize].push(ci as u32);
                        ws.swap_remove(i);
                        continue 'clauses;
                    }
                }
                // No replacement watch: clause is unit or conflicting.
                if self.value_lit(other) == Some(false) {
                    self.watches[falsified as usize] = ws;
                    return false;
                }
                self.enqueue(other);
                i += 1;
            }
            self.watches[falsified as usize] = ws;
        }
        true
    }

    fn check_conflicts(&self, conflicts: u64, limits: &SearchLimits) -> Result<(), OracleError> {
        if let Some(max) = limits.max_conflicts {
            if conflicts > max {
                return Err(OracleError::ResourceLimit(format!(
                    "conflict budget of {max} exceeded"
                )));
            }
        }
        Ok(())
    }

    fn check_deadline(&self, limits: &SearchLimits) -> Result<(), OracleError> {
        if let Some(deadline) = limits.deadline {
            if Instant::now() >= deadline {
                return Err(OracleError::ResourceLimit("wall-clock budget exceeded".into()));
            }
        }
        Ok(())
    }

    fn pick_branch(&self, limits: &mut SearchLimits) -> Option<Lit> {
        if let Some(rng) = limits.rng.as_deref_mut() {
            let unassigned: Vec<u32> = (0..self.num_vars as u32)
                .filter(|v| self.assign[*v as usize] == 0)
                .collect();
            if unassigned.is_empty() {
                return None;
            }
            let var = unassigned[rng.gen_range(0..unassigned.len())];
            return Some(lit(var, rng.gen_bool(0.5)));
        }
        (0..self.num_vars as u32)
            .find(|v| self.assign[*v as usize] == 0)
            .map(|v| lit(v, true)) // default polarity: false
    }

    /// Solve under the given assumptions. The solver state is reset on
    /// entry; clauses added since the last call are taken into account.
    pub fn solve(
        &mut self,
        assumptions: &[Lit],
        mut limits: SearchLimits,
    ) -> Result<SolveOutcome, OracleError> {
        self.check_deadline(&limits)?;
        if self.has_empty_clause {
            return Ok(SolveOutcome::Unsat);
        }
        self.reset();
        for u in self.units.clone() {
            if !self.enqueue(u) {
                return Ok(SolveOutcome::Unsat);
            }
        }
        if !self.propagate() {
            return Ok(SolveOutcome::Unsat);
        }
        for &a in assumptions {
            match self.value_lit(a) {
                Some(true) => continue,
                Some(false) => return Ok(SolveOutcome::Unsat),
                None => {
                    self.levels.push(Level {
                        decision: a,
                        trail_start: self.trail.len(),
                        flippable: false,
                        flipped: false,
                    });
                    self.enqueue(a);
                    if !self.propagate() {
                        // Conflict under assumptions alone: nothing to flip.
                        return Ok(SolveOutcome::Unsat);
                    }
                }
            }
        }
        let assumption_levels = self.levels.len();
        let mut conflicts: u64 = 0;
        loop {
            if self.steps >= 4096 {
                self.steps = 0;
                self.check_deadline(&limits)?;
            }
            let Some(decision) = self.pick_branch(&mut limits) else {
                let model = self.assign.iter().map(|v| *v > 0).collect();
                return Ok(SolveOutcome::Sat(model));
            };
            self.levels.push(Level {
                decision,
                trail_start: self.trail.len(),
                flippable: true,
                flipped: false,
            });
            self.enqueue(decision);
            while !self.propagate() {
                conflicts += 1;
                self.check_conflicts(conflicts, &limits)?;
                if conflicts.is_multiple_of(256) {
                    self.check_deadline(&limits)?;
                }
                loop {
                    if self.levels.len() <= assumption_levels {
                        return Ok(SolveOutcome::Unsat);
                    }
                    let top = self.levels.last().unwrap().clone();
                    if top.flippable && !top.flipped {
                        self.undo_to(top.trail_start);
                        let flipped = lit_neg(top.decision);
                        let entry = self.levels.last_mut().unwrap();
                        entry.decision = flipped;
                        entry.flipped = true;
                        self.enqueue(flipped);
                        break;
                    }
                    self.undo_to(top.trail_start);
                    self.levels.pop();
                }
            }
        }
    }
}
