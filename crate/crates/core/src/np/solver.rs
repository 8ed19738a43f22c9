//! A small CDCL solver, plus exhaustive enumeration as its cross-check.
//!
//! Two-watched-literal propagation, first-UIP clause learning and
//! non-chronological backjumping; no restarts and no clause deletion. It always
//! branches on the lowest-numbered unassigned variable, trying `true` first, so
//! formula builders control the search order through their variable numbering
//! (see the samplers) and results are deterministic.

use super::cnf::{var_of, CnfFormula, Lit};

pub const DEFAULT_VAR_CAP: usize = 4000;
pub const DEFAULT_MAX_DECISIONS: u64 = 20_000_000;
pub const BRUTE_FORCE_MAX_VARS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    /// `assignment[v - 1]` is the value of variable `v`.
    Sat(Vec<bool>),
    Unsat,
    /// The formula is larger than the variable cap, or the decision limit ran out.
    CapExceeded,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverLimits {
    pub var_cap: usize,
    pub max_decisions: u64,
}

impl Default for SolverLimits {
    fn default() -> Self {
        SolverLimits {
            var_cap: DEFAULT_VAR_CAP,
            max_decisions: DEFAULT_MAX_DECISIONS,
        }
    }
}

impl SolverLimits {
    pub fn with_var_cap(var_cap: usize) -> Self {
        SolverLimits {
            var_cap,
            ..Default::default()
        }
    }
}

pub fn solve(f: &CnfFormula, limits: &SolverLimits) -> SolveResult {
    solve_with_assumptions(f, &[], limits)
}

/// [`solve`] with the default decision limit and the given variable cap.
pub fn solve_small(f: &CnfFormula, var_cap: usize) -> SolveResult {
    solve(f, &SolverLimits::with_var_cap(var_cap))
}

/// Solves `f` with the given literals forced true.
pub fn solve_with_assumptions(f: &CnfFormula, assumptions: &[Lit], limits: &SolverLimits) -> SolveResult {
    if f.num_vars() > limits.var_cap {
        return SolveResult::CapExceeded;
    }
    let mut s = Cdcl::new(f.num_vars());
    for c in f.clauses().iter().cloned().chain(assumptions.iter().map(|&l| vec![l])) {
        if !s.add_clause(c) {
            return SolveResult::Unsat;
        }
    }
    s.run(limits.max_decisions)
}

const NO_REASON: u32 = u32::MAX;

struct Cdcl {
    n: usize,
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<u32>>,
    value: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    seen: Vec<bool>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    next: usize,
}

#[inline]
fn widx(l: Lit) -> usize {
    2 * (var_of(l) - 1) + (l < 0) as usize
}

#[inline]
fn lit_value(value: &[i8], l: Lit) -> i8 {
    let v = value[var_of(l)];
    if l > 0 {
        v
    } else {
        -v
    }
}

impl Cdcl {
    fn new(n: usize) -> Self {
        Cdcl {
            n,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            value: vec![0; n + 1],
            level: vec![0; n + 1],
            reason: vec![NO_REASON; n + 1],
            seen: vec![false; n + 1],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            next: 1,
        }
    }

    fn assign(&mut self, l: Lit, reason: u32) {
        let v = var_of(l);
        self.value[v] = if l > 0 { 1 } else { -1 };
        self.level[v] = self.trail_lim.len() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn attach(&mut self, c: Vec<Lit>) -> u32 {
        let ci = self.clauses.len() as u32;
        self.watches[widx(c[0])].push(ci);
        self.watches[widx(c[1])].push(ci);
        self.clauses.push(c);
        ci
    }

    /// Adds a clause at level 0; `false` if the formula is already refuted.
    fn add_clause(&mut self, mut c: Vec<Lit>) -> bool {
        c.sort_unstable();
        c.dedup();
        if c.iter().any(|&l| c.contains(&-l)) {
            return true;
        }
        match c.len() {
            0 => false,
            1 => match lit_value(&self.value, c[0]) {
                1 => true,
                -1 => false,
                _ => {
                    self.assign(c[0], NO_REASON);
                    true
                }
            },
            _ => {
                self.attach(c);
                true
            }
        }
    }

    /// Unit propagation; returns the falsified clause on conflict.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let falsified = -self.trail[self.qhead];
            self.qhead += 1;
            let mut ws = std::mem::take(&mut self.watches[widx(falsified)]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                let c = &mut self.clauses[ci as usize];
                if c[0] == falsified {
                    c.swap(0, 1);
                }
                if lit_value(&self.value, c[0]) == 1 {
                    i += 1;
                    continue;
                }
                if let Some(k) = (2..c.len()).find(|&k| lit_value(&self.value, c[k]) != -1) {
                    c.swap(1, k);
                    let w = widx(c[1]);
                    self.watches[w].push(ci);
                    ws.swap_remove(i);
                    continue;
                }
                let first = c[0];
                if lit_value(&self.value, first) == -1 {
                    conflict = Some(ci);
                    break;
                }
                self.assign(first, ci);
                i += 1;
            }
            self.watches[widx(falsified)] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    /// First-UIP learned clause (asserting literal first, then the literal of
    /// the highest remaining level) and the level to jump back to.
    fn analyze(&mut self, mut conflict: u32) -> (Vec<Lit>, usize) {
        let current = self.trail_lim.len() as u32;
        let mut learnt = vec![0];
        let mut pending = 0;
        let mut idx = self.trail.len();
        let mut p: Lit = 0;
        loop {
            for &q in &self.clauses[conflict as usize] {
                let v = var_of(q);
                if q == p || self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                self.seen[v] = true;
                if self.level[v] == current {
                    pending += 1;
                } else {
                    learnt.push(q);
                }
            }
            loop {
                idx -= 1;
                if self.seen[var_of(self.trail[idx])] {
                    break;
                }
            }
            p = self.trail[idx];
            self.seen[var_of(p)] = false;
            pending -= 1;
            if pending == 0 {
                break;
            }
            conflict = self.reason[var_of(p)];
        }
        learnt[0] = -p;
        for &q in &learnt[1..] {
            self.seen[var_of(q)] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let at = (1..learnt.len()).max_by_key(|&i| self.level[var_of(learnt[i])]).unwrap();
            learnt.swap(1, at);
            back = self.level[var_of(learnt[1])] as usize;
        }
        (learnt, back)
    }

    fn backjump(&mut self, level: usize) {
        let len = self.trail_lim[level];
        for &l in &self.trail[len..] {
            let v = var_of(l);
            self.value[v] = 0;
            self.reason[v] = NO_REASON;
            self.next = self.next.min(v);
        }
        self.trail.truncate(len);
        self.trail_lim.truncate(level);
        self.qhead = len;
    }

    fn run(&mut self, max_decisions: u64) -> SolveResult {
        let mut decisions = 0u64;
        loop {
            if let Some(conflict) = self.propagate() {
                if self.trail_lim.is_empty() {
                    return SolveResult::Unsat;
                }
                let (learnt, back) = self.analyze(conflict);
                self.backjump(back);
                if learnt.len() == 1 {
                    self.assign(learnt[0], NO_REASON);
                } else {
                    let asserting = learnt[0];
                    let ci = self.attach(learnt);
                    self.assign(asserting, ci);
                }
                continue;
            }
            while self.next <= self.n && self.value[self.next] != 0 {
                self.next += 1;
            }
            if self.next > self.n {
                return SolveResult::Sat(self.value[1..].iter().map(|&v| v == 1).collect());
            }
            decisions += 1;
            if decisions > max_decisions {
                return SolveResult::CapExceeded;
            }
            self.trail_lim.push(self.trail.len());
            self.assign(self.next as Lit, NO_REASON);
        }
    }
}

/// Result of enumerating every assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub count: u64,
    /// The satisfying assignment with the smallest binary value (variable 1 lowest).
    pub first: Option<Vec<bool>>,
}

fn clause_masks(f: &CnfFormula) -> Vec<(u32, u32)> {
    f.clauses()
        .iter()
        .map(|c| {
            c.iter().fold((0u32, 0u32), |(p, n), &l| {
                let bit = 1u32 << (var_of(l) - 1);
                if l > 0 {
                    (p | bit, n)
                } else {
                    (p, n | bit)
                }
            })
        })
        .collect()
}

/// Counts models by trying all `2^n` assignments; `n` is capped at 24.
pub fn brute_force(f: &CnfFormula) -> Enumeration {
    let n = f.num_vars();
    assert!(n <= BRUTE_FORCE_MAX_VARS, "enumeration is limited to {BRUTE_FORCE_MAX_VARS} variables");
    let masks = clause_masks(f);
    let mut count = 0;
    let mut first = None;
    for a in 0..(1u32 << n) {
        if masks.iter().all(|&(p, q)| a & p != 0 || !a & q != 0) {
            count += 1;
            if first.is_none() {
                first = Some((0..n).map(|i| (a >> i) & 1 == 1).collect());
            }
        }
    }
    Enumeration { count, first }
}

/// Number of assignments to `vars` that extend to a model of `f`.
pub fn projected_model_count(f: &CnfFormula, vars: &[Lit]) -> u64 {
    assert!(vars.len() <= BRUTE_FORCE_MAX_VARS);
    (0..1u64 << vars.len())
        .filter(|a| {
            let assumptions: Vec<Lit> = vars
                .iter()
                .enumerate()
                .map(|(i, &v)| if (a >> i) & 1 == 1 { v } else { -v })
                .collect();
            solve_with_assumptions(f, &assumptions, &SolverLimits::with_var_cap(usize::MAX)).is_sat()
        })
        .count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn formula(n: usize, clauses: &[&[Lit]]) -> CnfFormula {
        let mut f = CnfFormula::new(n);
        for c in clauses {
            f.add_clause(c.to_vec());
        }
        f
    }

    #[test]
    fn tiny_examples() {
        let f = formula(1, &[&[1], &[-1]]);
        assert_eq!(solve(&f, &SolverLimits::default()), SolveResult::Unsat);
        let f = formula(2, &[&[1, 2], &[-1]]);
        assert_eq!(solve(&f, &SolverLimits::default()), SolveResult::Sat(vec![false, true]));
        assert_eq!(solve(&CnfFormula::new(0), &SolverLimits::default()), SolveResult::Sat(vec![]));
    }

    #[test]
    fn caps() {
        let f = CnfFormula::new(5);
        assert_eq!(solve_small(&f, 4), SolveResult::CapExceeded);
        // Pigeonhole 5 -> 4 needs more than a handful of decisions.
        let mut f = CnfFormula::new(20);
        let var = |p: usize, h: usize| (p * 4 + h + 1) as Lit;
        for p in 0..5 {
            f.add_clause((0..4).map(|h| var(p, h)).collect::<Vec<_>>());
        }
        for h in 0..4 {
            for p in 0..5 {
                for q in p + 1..5 {
                    f.add_clause([-var(p, h), -var(q, h)]);
                }
            }
        }
        let limited = SolverLimits {
            var_cap: 100,
            max_decisions: 10,
        };
        assert_eq!(solve(&f, &limited), SolveResult::CapExceeded);
        assert_eq!(solve(&f, &SolverLimits::default()), SolveResult::Unsat);
    }

    #[test]
    fn duplicate_and_tautological_literals() {
        let f = formula(2, &[&[1, 1], &[-2, 2], &[-1, -1, 2]]);
        assert_eq!(solve(&f, &SolverLimits::default()), SolveResult::Sat(vec![true, true]));
    }

    pub(crate) fn random_3cnf(rng: &mut ChaCha8Rng, n: usize, m: usize) -> CnfFormula {
        let mut f = CnfFormula::new(n);
        for _ in 0..m {
            let c: Vec<Lit> = (0..3)
                .map(|_| {
                    let v = rng.gen_range(1..=n as Lit);
                    if rng.gen() {
                        v
                    } else {
                        -v
                    }
                })
                .collect();
            f.add_clause(c);
        }
        f
    }

    #[test]
    fn agrees_with_enumeration_on_random_3cnf() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut sat = 0;
        for _ in 0..500 {
            // Around the 4.26 clause/variable threshold at 12 variables.
            let m = rng.gen_range(30..70);
            let f = random_3cnf(&mut rng, 12, m);
            let truth = brute_force(&f);
            match solve(&f, &SolverLimits::default()) {
                SolveResult::Sat(a) => {
                    assert!(truth.count > 0);
                    assert!(f.eval(&a));
                    sat += 1;
                }
                SolveResult::Unsat => assert_eq!(truth.count, 0),
                SolveResult::CapExceeded => panic!("cap"),
            }
        }
        assert!(sat > 100 && sat < 450, "{sat}");
    }

    #[test]
    fn assumptions_restrict_models() {
        let f = formula(2, &[&[1, 2]]);
        assert_eq!(solve_with_assumptions(&f, &[-1, -2], &SolverLimits::default()), SolveResult::Unsat);
        assert_eq!(projected_model_count(&f, &[1, 2]), 3);
    }
}
