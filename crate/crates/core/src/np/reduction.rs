//! Plant-a-formula harness: hide a target `S1` formula at a random slot of an
//! `S2` formula, solve, and record whether the solution solves the target.
//!
//! This mirrors the step that turns an `S2` solver into an `S1` solver. It is
//! a demonstration of the plumbing only and says nothing about hardness.

use rand::Rng;

use super::circuit::BoolCircuit;
use super::samplers::{compose_s2, sample_s1, SamplerBundle};
use super::solver::{solve, SolveResult, SolverLimits};
use crate::error::{Error, Result};
use crate::game::Problem;
use crate::seed::{mix_seed, rng_from};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantReport {
    pub trials: usize,
    /// Composite formulas found satisfiable.
    pub sat: usize,
    /// Trials whose satisfying assignment switched the planted slot on.
    pub planted_solved: usize,
    /// How often each slot received the target.
    pub slot_counts: Vec<usize>,
    /// Per slot, trials in which the target was solved there.
    pub slot_solved: Vec<usize>,
}

impl PlantReport {
    pub fn solve_rate(&self) -> f64 {
        self.planted_solved as f64 / self.trials as f64
    }
}

#[allow(clippy::too_many_arguments)]
pub fn plant_and_solve(
    problem: &dyn Problem,
    circuit: &BoolCircuit,
    target: &SamplerBundle,
    k: usize,
    tau: f64,
    trials: usize,
    seed: u64,
    limits: &SolverLimits,
) -> Result<PlantReport> {
    if target.slots.len() != 1 || k == 0 {
        return Err(Error::Config("the target must be a single S1 formula and k >= 1".into()));
    }
    let mut report = PlantReport {
        trials,
        sat: 0,
        planted_solved: 0,
        slot_counts: vec![0; k],
        slot_solved: vec![0; k],
    };
    for t in 0..trials as u64 {
        let trial_seed = mix_seed(seed, t);
        let at = rng_from(trial_seed).gen_range(0..k);
        let blocks = (0..k)
            .map(|j| {
                if j == at {
                    Ok(target.clone())
                } else {
                    sample_s1(problem, circuit, target.b, mix_seed(trial_seed, j as u64))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let composite = compose_s2(&blocks, tau, trial_seed)?;
        report.slot_counts[at] += 1;
        if let SolveResult::Sat(a) = solve(&composite.formula, limits) {
            report.sat += 1;
            if composite.decode_witness(&a).iter().any(|(j, _)| *j == at) {
                report.planted_solved += 1;
                report.slot_solved[at] += 1;
            }
        }
    }
    Ok(report)
}
