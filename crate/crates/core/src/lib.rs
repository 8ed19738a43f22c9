//! Robust-learning security games with signature-wrapped problems.
//!
//! The crate builds labelled distributions whose classifiers are easy to
//! attack for an adversary that can break a one-time signature by brute force
//! and hard to attack for one limited to a query budget, runs the
//! challenger/adversary game against both kinds of attacker, and compiles the
//! search for adversarial examples into CNF formulas.

pub mod attackers;
pub mod bits;
pub mod constructions;
pub mod crypto;
pub mod error;
pub mod exec;
pub mod game;
pub mod np;
pub mod problems;
pub mod seed;

pub use bits::BitString;
pub use error::{Error, Result};
pub use exec::Execution;
pub use game::{
    estimate_adv_risk, estimate_risk, play_game, winning, Attacker, GameOutcome, Hypothesis, Label, Oracles,
    OutcomeReason, Power, Problem, RiskEstimate,
};
