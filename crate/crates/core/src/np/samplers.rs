//! Formula samplers built from the adversarial-example search.
//!
//! - `S1`: draw `(x, y)` and emit a formula satisfiable iff some `x'` within
//!   distance `b` of `x` is classified as a non-star label other than `y`.
//! - `S2`: `k` independent `S1` formulas on disjoint variables, formula `j`
//!   guarded by a selector `s_j` (`s_j -> φ_j`), with at least `⌈τk⌉`
//!   selectors on.
//! - `S`: the conjunction of `reps` independent `S2` formulas.
//!
//! Variable order matters to the solver, which branches on the lowest
//! free variable: each `S1` block numbers its instance bits first, and each
//! selector sits just before its block, so blocks are searched one at a time.

use std::fmt;
use std::str::FromStr;

use super::cardinality::{at_least, encode_hamming_ball};
use super::circuit::BoolCircuit;
use super::cnf::{var_of, CnfFormula, Lit};
use super::tseitin::{tseitin, wire_var};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::game::{Label, Problem};
use crate::seed::mix_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    S1,
    S2,
    S,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::S1 => "S1",
            Stage::S2 => "S2",
            Stage::S => "S",
        }
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S1" | "s1" => Ok(Stage::S1),
            "S2" | "s2" => Ok(Stage::S2),
            "S" | "s" => Ok(Stage::S),
            other => Err(Error::Config(format!("unknown sampler stage {other:?}"))),
        }
    }
}

/// One embedded `S1` instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Slot {
    pub x: BitString,
    pub y: Label,
    pub instance_vars: Vec<Lit>,
    pub selector: Option<Lit>,
}

#[derive(Debug, Clone)]
pub struct SamplerBundle {
    pub formula: CnfFormula,
    pub stage: Stage,
    pub seed: u64,
    pub d: usize,
    pub b: usize,
    pub k: usize,
    pub tau: f64,
    pub slots: Vec<Slot>,
}

impl SamplerBundle {
    /// Candidate adversarial examples read off a satisfying assignment: one per
    /// slot whose selector is on (every slot when there are no selectors).
    pub fn decode_witness(&self, assignment: &[bool]) -> Vec<(usize, BitString)> {
        let value = |l: Lit| assignment[var_of(l) - 1] == (l > 0);
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.selector.is_none_or(value))
            .map(|(j, s)| {
                let bits: Vec<bool> = s.instance_vars.iter().map(|&v| value(v)).collect();
                (j, BitString::from_bools(&bits))
            })
            .collect()
    }

    pub fn manifest_entry(&self, file: &str) -> ManifestEntry {
        ManifestEntry {
            file: file.to_string(),
            stage: self.stage,
            seed: self.seed,
            d: self.d,
            b: self.b,
            k: self.k,
            tau: self.tau,
        }
    }

    fn shift(slots: &[Slot], offset: usize) -> impl Iterator<Item = Slot> + '_ {
        let sh = move |l: Lit| l.signum() * (var_of(l) + offset) as Lit;
        slots.iter().map(move |s| Slot {
            x: s.x.clone(),
            y: s.y,
            instance_vars: s.instance_vars.iter().map(|&v| sh(v)).collect(),
            selector: s.selector.map(sh),
        })
    }
}

/// `⌈τ·k⌉`, robust to the representation error of `τ`.
pub fn threshold(k: usize, tau: f64) -> usize {
    ((tau * k as f64) - 1e-9).ceil().max(0.0) as usize
}

/// The threshold halfway between the risk and the adversarial risk.
pub fn midway_tau(alpha: f64, beta: f64) -> f64 {
    (alpha + beta) / 2.0
}

fn check_circuit(problem: &dyn Problem, circuit: &BoolCircuit) -> Result<()> {
    if circuit.inputs() != problem.instance_len() {
        return Err(Error::Config(format!(
            "circuit has {} inputs but instances have {} bits",
            circuit.inputs(),
            problem.instance_len()
        )));
    }
    if !(1..=2).contains(&circuit.outputs().len()) {
        return Err(Error::Config("circuit must output (label) or (label, is_star)".into()));
    }
    Ok(())
}

fn check_k_tau(k: usize, tau: f64) -> Result<()> {
    if k == 0 {
        return Err(Error::Config("forge.k must be at least 1".into()));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::Config(format!("forge.tau must lie in (0, 1] (got {tau})")));
    }
    Ok(())
}

pub fn sample_s1(problem: &dyn Problem, circuit: &BoolCircuit, b: usize, seed: u64) -> Result<SamplerBundle> {
    check_circuit(problem, circuit)?;
    let (x, y) = problem.sample(seed)?;
    let label = wire_var(circuit.outputs()[0]);
    let mut f = tseitin(circuit);
    let vars: Vec<Lit> = (1..=x.len() as Lit).collect();
    encode_hamming_ball(&mut f, &x, b, &vars);
    match y {
        Label::Class(0) => f.add_clause([label]),
        Label::Class(1) => f.add_clause([-label]),
        other => {
            return Err(Error::Config(format!(
                "circuits carry binary labels; the problem produced {other}"
            )))
        }
    }
    if let Some(&star) = circuit.outputs().get(1) {
        f.add_clause([-wire_var(star)]);
    }
    Ok(SamplerBundle {
        formula: f,
        stage: Stage::S1,
        seed,
        d: x.len(),
        b,
        k: 1,
        tau: 1.0,
        slots: vec![Slot {
            x,
            y,
            instance_vars: vars,
            selector: None,
        }],
    })
}

/// Guards each block with a fresh selector placed just before it and requires
/// at least `⌈τk⌉` selectors.
pub fn compose_s2(blocks: &[SamplerBundle], tau: f64, seed: u64) -> Result<SamplerBundle> {
    check_k_tau(blocks.len(), tau)?;
    let mut f = CnfFormula::new(0);
    let mut slots = Vec::new();
    let mut selectors = Vec::new();
    for block in blocks {
        let s = f.new_var();
        let offset = f.append_guarded(&block.formula, Some(s));
        selectors.push(s);
        slots.extend(SamplerBundle::shift(&block.slots, offset).map(|mut slot| {
            slot.selector = Some(s);
            slot
        }));
    }
    f.annotate("selector", selectors.iter().map(|&s| s as u32));
    at_least(&mut f, &selectors, threshold(blocks.len(), tau));
    Ok(SamplerBundle {
        formula: f,
        stage: Stage::S2,
        seed,
        d: blocks[0].d,
        b: blocks[0].b,
        k: blocks.len(),
        tau,
        slots,
    })
}

/// Block `j` is the `S1` formula for seed `mix_seed(seed, j)`.
pub fn sample_s2(
    problem: &dyn Problem,
    circuit: &BoolCircuit,
    b: usize,
    k: usize,
    tau: f64,
    seed: u64,
) -> Result<SamplerBundle> {
    check_k_tau(k, tau)?;
    let blocks = (0..k as u64)
        .map(|j| sample_s1(problem, circuit, b, mix_seed(seed, j)))
        .collect::<Result<Vec<_>>>()?;
    compose_s2(&blocks, tau, seed)
}

/// Conjunction of `reps` disjoint `S2` formulas; block `r` uses seed `mix_seed(seed, r)`.
#[allow(clippy::too_many_arguments)]
pub fn sample_s_final(
    problem: &dyn Problem,
    circuit: &BoolCircuit,
    b: usize,
    k: usize,
    tau: f64,
    reps: usize,
    seed: u64,
) -> Result<SamplerBundle> {
    if reps == 0 {
        return Err(Error::Config("forge.reps must be at least 1".into()));
    }
    let mut f = CnfFormula::new(0);
    let mut slots = Vec::new();
    let mut d = 0;
    for r in 0..reps as u64 {
        let block = sample_s2(problem, circuit, b, k, tau, mix_seed(seed, r))?;
        let offset = f.append(&block.formula);
        slots.extend(SamplerBundle::shift(&block.slots, offset));
        d = block.d;
    }
    Ok(SamplerBundle {
        formula: f,
        stage: Stage::S,
        seed,
        d,
        b,
        k,
        tau,
        slots,
    })
}

/// One line of a bundle manifest:
/// `<file> stage=<S1|S2|S> seed=<u64> d=<n> b=<n> k=<n> tau=<decimal>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub file: String,
    pub stage: Stage,
    pub seed: u64,
    pub d: usize,
    pub b: usize,
    pub k: usize,
    pub tau: f64,
}

impl fmt::Display for ManifestEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} stage={} seed={} d={} b={} k={} tau={:.6}",
            self.file,
            self.stage.as_str(),
            self.seed,
            self.d,
            self.b,
            self.k,
            self.tau
        )
    }
}

impl FromStr for ManifestEntry {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let bad = || Error::Format(format!("malformed manifest line {line:?}"));
        let mut words = line.split_whitespace();
        let file = words.next().ok_or_else(bad)?.to_string();
        let mut get = |key: &str| -> Result<String> {
            let w = words.next().ok_or_else(bad)?;
            w.strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .map(str::to_string)
                .ok_or_else(bad)
        };
        let stage = get("stage")?.parse()?;
        let seed = get("seed")?.parse().map_err(|_| bad())?;
        let d = get("d")?.parse().map_err(|_| bad())?;
        let b = get("b")?.parse().map_err(|_| bad())?;
        let k = get("k")?.parse().map_err(|_| bad())?;
        let tau = get("tau")?.parse().map_err(|_| bad())?;
        Ok(ManifestEntry {
            file,
            stage,
            seed,
            d,
            b,
            k,
            tau,
        })
    }
}
