//! Learning problems, hypotheses, and the challenger/adversary game.
//!
//! A game round: the challenger draws `(x, y)` from the problem, hands both to
//! the attacker together with oracle access to the hypothesis and the
//! problem's sampler, and scores the returned `x'` with [`winning`]. The
//! learner step is degenerate: hypotheses are fixed (see [`ConstantLearner`]).
//!
//! Oracle calls are metered. An attacker with [`Power::Bounded`] gets a single
//! query budget that covers hypothesis queries, sampler draws and evaluations of
//! the toy hash; once it is spent every oracle returns `None`.

use std::fmt;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::crypto::hash::{toy_hash, toy_hash_u64};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::seed::{mix_seed, rng_from, STREAM_ATTACKER, STREAM_SAMPLER_ORACLE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Class(u32),
    /// Tamper detection. Not a member of any label set.
    Star,
}

impl Label {
    pub fn is_star(self) -> bool {
        matches!(self, Label::Star)
    }

    pub fn bit(b: bool) -> Label {
        Label::Class(b as u32)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Class(c) => write!(f, "{c}"),
            Label::Star => f.write_str("*"),
        }
    }
}

/// A samplable labelled distribution over fixed-length instances.
///
/// `sample` must be a pure function of `seed` and never emit [`Label::Star`].
pub trait Problem: Send + Sync {
    fn instance_len(&self) -> usize;

    /// Labels are `0..label_count()`.
    fn label_count(&self) -> u32;

    fn sample(&self, seed: u64) -> Result<(BitString, Label)>;
}

/// A total, deterministic classifier; may answer [`Label::Star`].
pub trait Hypothesis: Send + Sync {
    fn instance_len(&self) -> usize;

    fn classify(&self, x: &BitString) -> Label;
}

impl<P: Problem + ?Sized> Problem for Arc<P> {
    fn instance_len(&self) -> usize {
        (**self).instance_len()
    }
    fn label_count(&self) -> u32 {
        (**self).label_count()
    }
    fn sample(&self, seed: u64) -> Result<(BitString, Label)> {
        (**self).sample(seed)
    }
}

impl<H: Hypothesis + ?Sized> Hypothesis for Arc<H> {
    fn instance_len(&self) -> usize {
        (**self).instance_len()
    }
    fn classify(&self, x: &BitString) -> Label {
        (**self).classify(x)
    }
}

impl<H: Hypothesis + ?Sized> Hypothesis for &H {
    fn instance_len(&self) -> usize {
        (**self).instance_len()
    }
    fn classify(&self, x: &BitString) -> Label {
        (**self).classify(x)
    }
}

/// Wraps a closure as a hypothesis.
pub struct FnHypothesis<F> {
    len: usize,
    f: F,
}

impl<F> FnHypothesis<F>
where
    F: Fn(&BitString) -> Label + Send + Sync,
{
    pub fn new(len: usize, f: F) -> Self {
        FnHypothesis { len, f }
    }
}

impl<F> Hypothesis for FnHypothesis<F>
where
    F: Fn(&BitString) -> Label + Send + Sync,
{
    fn instance_len(&self) -> usize {
        self.len
    }
    fn classify(&self, x: &BitString) -> Label {
        (self.f)(x)
    }
}

/// Maps a training set to a hypothesis.
pub trait Learner: Send + Sync {
    fn learn(&self, training: &[(BitString, Label)]) -> Arc<dyn Hypothesis>;
}

/// Ignores its training data and returns a fixed hypothesis.
pub struct ConstantLearner {
    hypothesis: Arc<dyn Hypothesis>,
}

impl ConstantLearner {
    pub fn new(hypothesis: Arc<dyn Hypothesis>) -> Self {
        ConstantLearner { hypothesis }
    }
}

impl Learner for ConstantLearner {
    fn learn(&self, _training: &[(BitString, Label)]) -> Arc<dyn Hypothesis> {
        Arc::clone(&self.hypothesis)
    }
}

/// A problem on which every efficient learner has adversarial risk close to 1
/// at the given budget. No implementation ships; a base problem for the
/// signature wrapper can implement this to document that it plays this role.
pub trait RobustHard: Problem {
    fn hardness_budget(&self) -> usize;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Power {
    Identity,
    /// Total oracle calls (hypothesis, sampler and hash) are capped.
    Bounded { query_budget: u64 },
    Unbounded,
}

impl Power {
    fn query_limit(self) -> Option<u64> {
        match self {
            Power::Bounded { query_budget } => Some(query_budget),
            Power::Identity => Some(0),
            Power::Unbounded => None,
        }
    }
}

/// Counts oracle calls against an optional cap.
#[derive(Debug, Clone)]
pub struct QueryMeter {
    limit: Option<u64>,
    used: u64,
}

impl QueryMeter {
    pub fn new(limit: Option<u64>) -> Self {
        QueryMeter { limit, used: 0 }
    }

    /// Charges one call; `false` means the budget is exhausted and nothing was charged.
    pub fn charge(&mut self) -> bool {
        match self.limit {
            Some(limit) if self.used >= limit => false,
            _ => {
                self.used += 1;
                true
            }
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> Option<u64> {
        self.limit.map(|l| l - self.used)
    }
}

/// The attacker's view of one game: the bit budget plus metered oracles.
pub struct Oracles<'a> {
    hypothesis: &'a dyn Hypothesis,
    problem: &'a dyn Problem,
    budget: usize,
    meter: QueryMeter,
    rng: ChaCha8Rng,
    trial_seed: u64,
    draws: u64,
}

impl<'a> Oracles<'a> {
    pub fn new(
        hypothesis: &'a dyn Hypothesis,
        problem: &'a dyn Problem,
        budget: usize,
        power: Power,
        trial_seed: u64,
    ) -> Self {
        Oracles {
            hypothesis,
            problem,
            budget,
            meter: QueryMeter::new(power.query_limit()),
            rng: rng_from(mix_seed(trial_seed, STREAM_ATTACKER)),
            trial_seed,
            draws: 0,
        }
    }

    /// Bit-flip budget of the current game.
    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Private coins of the attacker.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn queries_used(&self) -> u64 {
        self.meter.used()
    }

    pub fn queries_remaining(&self) -> Option<u64> {
        self.meter.remaining()
    }

    pub fn classify(&mut self, x: &BitString) -> Option<Label> {
        self.meter.charge().then(|| self.hypothesis.classify(x))
    }

    pub fn sample(&mut self) -> Option<Result<(BitString, Label)>> {
        if !self.meter.charge() {
            return None;
        }
        self.draws += 1;
        let seed = mix_seed(mix_seed(self.trial_seed, STREAM_SAMPLER_ORACLE), self.draws);
        Some(self.problem.sample(seed))
    }

    /// Metered [`toy_hash_u64`].
    pub fn hash_u64(&mut self, value: u64, len: usize, out_bits: usize, rounds: u32) -> Option<u64> {
        self.meter
            .charge()
            .then(|| toy_hash_u64(value, len, out_bits, rounds))
    }

    /// Metered [`toy_hash`].
    pub fn hash(&mut self, input: &BitString, out_bits: usize, rounds: u32) -> Option<BitString> {
        self.meter.charge().then(|| toy_hash(input, out_bits, rounds))
    }
}

/// A perturbation strategy. Implementations must return a string of the same
/// length as `x`; the game rejects anything else.
pub trait Attacker: Send + Sync {
    fn name(&self) -> &str;

    fn power(&self) -> Power;

    /// Base bit budget the strategy was built for, if it has one.
    fn declared_budget(&self) -> Option<usize> {
        None
    }

    fn perturb(&self, x: &BitString, y: Label, oracles: &mut Oracles<'_>) -> BitString;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutcomeReason {
    MisclassifiedUntampered,
    TamperWin,
    BudgetExceeded,
    DetectedStar,
    CorrectLabel,
}

impl OutcomeReason {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeReason::MisclassifiedUntampered => "MISCLASSIFIED_UNTAMPERED",
            OutcomeReason::TamperWin => "TAMPER_WIN",
            OutcomeReason::BudgetExceeded => "BUDGET_EXCEEDED",
            OutcomeReason::DetectedStar => "DETECTED_STAR",
            OutcomeReason::CorrectLabel => "CORRECT_LABEL",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameOutcome {
    pub won: bool,
    pub reason: OutcomeReason,
    pub perturbation_used: usize,
    pub queries_used: u64,
    pub label: Label,
}

/// Scores a transcript.
///
/// Untouched input: the attacker wins iff `h(x) != y`, and a star counts as a
/// misclassification. Changed input: the attacker wins iff the change stays in
/// budget and `h(x')` is a wrong label that is not a star.
pub fn winning(
    x: &BitString,
    x_prime: &BitString,
    y: Label,
    h: &dyn Hypothesis,
    budget: usize,
) -> Result<GameOutcome> {
    let distance = x.hamming_distance(x_prime)?;
    let outcome = |won, reason| GameOutcome {
        won,
        reason,
        perturbation_used: distance,
        queries_used: 0,
        label: y,
    };
    if distance == 0 {
        return Ok(if h.classify(x) != y {
            outcome(true, OutcomeReason::MisclassifiedUntampered)
        } else {
            outcome(false, OutcomeReason::CorrectLabel)
        });
    }
    if distance > budget {
        return Ok(outcome(false, OutcomeReason::BudgetExceeded));
    }
    Ok(match h.classify(x_prime) {
        Label::Star => outcome(false, OutcomeReason::DetectedStar),
        l if l == y => outcome(false, OutcomeReason::CorrectLabel),
        _ => outcome(true, OutcomeReason::TamperWin),
    })
}

/// One game with per-trial seed `seed`.
pub fn play_game(
    problem: &dyn Problem,
    hypothesis: &dyn Hypothesis,
    attacker: &dyn Attacker,
    budget: usize,
    seed: u64,
) -> Result<GameOutcome> {
    let (x, y) = problem.sample(seed)?;
    let mut oracles = Oracles::new(hypothesis, problem, budget, attacker.power(), seed);
    let x_prime = attacker.perturb(&x, y, &mut oracles);
    if x_prime.len() != x.len() {
        return Err(Error::AttackerProtocol {
            expected: x.len(),
            got: x_prime.len(),
        });
    }
    let mut outcome = winning(&x, &x_prime, y, hypothesis, budget)?;
    outcome.queries_used = oracles.queries_used();
    Ok(outcome)
}

/// Samples `m` training examples, runs the learner, then plays one game.
pub fn play_learner_game(
    problem: &dyn Problem,
    learner: &dyn Learner,
    training_size: usize,
    attacker: &dyn Attacker,
    budget: usize,
    seed: u64,
) -> Result<GameOutcome> {
    let training = (0..training_size as u64)
        .map(|j| problem.sample(mix_seed(!seed, j)))
        .collect::<Result<Vec<_>>>()?;
    let h = learner.learn(&training);
    play_game(problem, h.as_ref(), attacker, budget, seed)
}

/// Trial `i` uses seed `mix_seed(master_seed, i)`.
pub fn run_games(
    problem: &dyn Problem,
    hypothesis: &dyn Hypothesis,
    attacker: &dyn Attacker,
    budget: usize,
    trials: usize,
    master_seed: u64,
    exec: Execution,
) -> Result<Vec<GameOutcome>> {
    exec::try_map_indexed(trials, exec, |i| {
        play_game(problem, hypothesis, attacker, budget, mix_seed(master_seed, i as u64))
    })
}

/// Per-trial misclassification flags `h(x) != y` on the same seeds as [`run_games`].
pub fn risk_trials(
    problem: &dyn Problem,
    hypothesis: &dyn Hypothesis,
    trials: usize,
    master_seed: u64,
    exec: Execution,
) -> Result<Vec<bool>> {
    exec::try_map_indexed(trials, exec, |i| {
        let (x, y) = problem.sample(mix_seed(master_seed, i as u64))?;
        Ok(hypothesis.classify(&x) != y)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskEstimate {
    pub point: f64,
    pub trials: usize,
    pub half_width: f64,
    pub seed: u64,
}

impl RiskEstimate {
    pub fn from_counts(successes: usize, trials: usize, seed: u64) -> Self {
        assert!(trials >= 1, "an estimate needs at least one trial");
        let point = successes as f64 / trials as f64;
        RiskEstimate {
            point,
            trials,
            half_width: binomial_half_width(point, trials),
            seed,
        }
    }

    pub fn from_outcomes(outcomes: &[GameOutcome], seed: u64) -> Self {
        Self::from_counts(outcomes.iter().filter(|o| o.won).count(), outcomes.len(), seed)
    }

    /// `|point - value| <= k * half_width`.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.point - value).abs() <= k * self.half_width
    }
}

/// 95% normal-approximation half width `1.96 * sqrt(p (1 - p) / n)`.
pub fn binomial_half_width(point: f64, trials: usize) -> f64 {
    1.96 * (point * (1.0 - point) / trials as f64).sqrt()
}

pub fn estimate_risk(
    problem: &dyn Problem,
    hypothesis: &dyn Hypothesis,
    trials: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let flags = risk_trials(problem, hypothesis, trials, seed, Execution::default())?;
    Ok(RiskEstimate::from_counts(flags.iter().filter(|&&e| e).count(), trials, seed))
}

pub fn estimate_adv_risk(
    problem: &dyn Problem,
    hypothesis: &dyn Hypothesis,
    attacker: &dyn Attacker,
    budget: usize,
    trials: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let outcomes = run_games(problem, hypothesis, attacker, budget, trials, seed, Execution::default())?;
    Ok(RiskEstimate::from_outcomes(&outcomes, seed))
}
