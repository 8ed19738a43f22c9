//! The experiments behind each subcommand. Every experiment is a pure function
//! of its configuration; files are written afterwards by [`crate::output`].

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use compgap::attackers::{
    BallSearch, BaseSearch, BoundedForgerC1, BoundedForgerC3, ExhaustiveBallAttacker, GreedyMajority,
    IdentityAttacker, UnboundedForgerC1, UnboundedForgerC3,
};
use compgap::constructions::{C1Problem, C3Problem};
use compgap::game::{risk_trials, run_games};
use compgap::np::circuit::circuit_of_majority;
use compgap::np::samplers::{midway_tau, sample_s1, sample_s2, sample_s_final, SamplerBundle};
use compgap::np::{SolveResult, SolverLimits, Stage};
use compgap::problems::{
    analytic_adv_risk, analytic_adv_risk_counts, brute_force_adv_risk, majority_hypothesis, BalancedParity,
    MajorityNoise, BRUTE_FORCE_MAX_D,
};
use compgap::seed::mix_seed;
use compgap::{Attacker, Execution, GameOutcome, Hypothesis, RiskEstimate};

use crate::config::{AttackerKind, ConfigError, ExperimentConfig, Tau};

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Invariant(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "configuration error: {e}"),
            CliError::Invariant(m) => write!(f, "invariant violated: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Library errors raised while building an experiment are configuration
/// problems; raised while running one they are invariant violations.
fn setup(e: compgap::Error) -> CliError {
    match e {
        compgap::Error::Config(m) => CliError::Config(ConfigError::new(m)),
        other => CliError::Config(ConfigError::new(other.to_string())),
    }
}

fn runtime(e: compgap::Error) -> CliError {
    CliError::Invariant(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Risk,
    AdvRisk,
    Separation,
    C3,
    NpForge,
    OracleCheck,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Risk => "risk",
            Experiment::AdvRisk => "adv-risk",
            Experiment::Separation => "separation",
            Experiment::C3 => "c3",
            Experiment::NpForge => "np-forge",
            Experiment::OracleCheck => "oracle-check",
        }
    }

    fn default_trials(self) -> usize {
        match self {
            Experiment::Risk => 100_000,
            Experiment::Separation => 2_000,
            _ => 10_000,
        }
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [
            Experiment::Risk,
            Experiment::AdvRisk,
            Experiment::Separation,
            Experiment::C3,
            Experiment::NpForge,
            Experiment::OracleCheck,
        ]
        .into_iter()
        .find(|e| e.as_str() == s)
        .ok_or_else(|| format!("unknown experiment {s:?}"))
    }
}

/// One line of `results.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub experiment: Experiment,
    pub series: String,
    pub budget: usize,
    pub point: f64,
    pub half_width: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Row {
    fn estimate(experiment: Experiment, series: impl Into<String>, budget: usize, e: RiskEstimate) -> Self {
        Row {
            experiment,
            series: series.into(),
            budget,
            point: e.point,
            half_width: e.half_width,
            trials: e.trials,
            seed: e.seed,
        }
    }

    /// An exact value: no sampling, so no trials and no half width.
    fn exact(experiment: Experiment, series: impl Into<String>, budget: usize, value: f64, seed: u64) -> Self {
        Row {
            experiment,
            series: series.into(),
            budget,
            point: value,
            half_width: 0.0,
            trials: 0,
            seed,
        }
    }
}

#[derive(Debug, Default)]
pub struct Report {
    pub rows: Vec<Row>,
    pub transcript: Vec<String>,
    /// Extra files, relative to the output directory.
    pub files: Vec<(PathBuf, String)>,
}

fn game_lines(report: &mut Report, series: &str, master: u64, outcomes: &[GameOutcome]) {
    report.transcript.extend(outcomes.iter().enumerate().map(|(i, o)| {
        format!(
            "{series} trial={i} seed={} label={} won={} reason={} flips={} queries={}",
            mix_seed(master, i as u64),
            o.label,
            o.won as u8,
            o.reason.as_str(),
            o.perturbation_used,
            o.queries_used
        )
    }));
}

fn games(
    problem: &dyn compgap::Problem,
    h: &dyn Hypothesis,
    attacker: &dyn Attacker,
    budget: usize,
    trials: usize,
    seed: u64,
) -> Result<(Vec<GameOutcome>, RiskEstimate), CliError> {
    let out = run_games(problem, h, attacker, budget, trials, seed, Execution::Parallel).map_err(runtime)?;
    let est = RiskEstimate::from_outcomes(&out, seed);
    check_budgets(attacker, budget, &out)?;
    Ok((out, est))
}

/// Bit budgets on changed instances and query caps hold in every transcript.
fn check_budgets(attacker: &dyn Attacker, budget: usize, out: &[GameOutcome]) -> Result<(), CliError> {
    if let compgap::Power::Bounded { query_budget } = attacker.power() {
        if let Some((i, o)) = out.iter().enumerate().find(|(_, o)| o.queries_used > query_budget) {
            return Err(CliError::Invariant(format!(
                "{} used {} queries in trial {i} (cap {query_budget})",
                attacker.name(),
                o.queries_used
            )));
        }
    }
    if let Some((i, o)) = out.iter().enumerate().find(|(_, o)| o.won && o.perturbation_used > budget) {
        return Err(CliError::Invariant(format!(
            "{} won trial {i} with {} flips over a budget of {budget}",
            attacker.name(),
            o.perturbation_used
        )));
    }
    Ok(())
}

fn base_search(cfg: &ExperimentConfig) -> Result<Arc<dyn BaseSearch>, CliError> {
    match cfg.attacker {
        AttackerKind::Auto | AttackerKind::Greedy => Ok(Arc::new(GreedyMajority::new(cfg.b))),
        AttackerKind::Exhaustive => Ok(Arc::new(BallSearch::new(Arc::new(majority_hypothesis(cfg.d))))),
        AttackerKind::Identity => Err(ConfigError::new(
            "attacker.kind = identity has no base search; use auto, greedy or exhaustive",
        )
        .into()),
    }
}

fn c1(cfg: &ExperimentConfig) -> Result<C1Problem<MajorityNoise>, CliError> {
    C1Problem::new(cfg.problem()?, cfg.ots(), cfg.ecc()).map_err(setup)
}

pub fn run(experiment: Experiment, cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let trials = cfg.trials.unwrap_or(experiment.default_trials());
    if trials == 0 {
        return Err(ConfigError::new("run.trials must be at least 1").into());
    }
    log::info!("running {} with {trials} trials, seed {}", experiment.as_str(), cfg.seed);
    match experiment {
        Experiment::Risk => risk(cfg, trials),
        Experiment::AdvRisk => adv_risk(cfg, trials),
        Experiment::Separation => separation(cfg, trials),
        Experiment::C3 => c3(cfg, trials),
        Experiment::NpForge => np_forge(cfg, cfg.trials.unwrap_or(cfg.forge_count)),
        Experiment::OracleCheck => oracle_check(cfg, trials),
    }
}

/// Base risk and the risk of the signature-wrapped problem on shared seeds.
fn risk(cfg: &ExperimentConfig, trials: usize) -> Result<Report, CliError> {
    let e = Experiment::Risk;
    let q = cfg.problem()?;
    let wrapped = c1(cfg)?;
    let h = majority_hypothesis(cfg.d);
    let hn = wrapped.classifier(majority_hypothesis(cfg.d));
    let base = risk_trials(&q, &h, trials, cfg.seed, Execution::Parallel).map_err(runtime)?;
    let lifted = risk_trials(&wrapped, &hn, trials, cfg.seed, Execution::Parallel).map_err(runtime)?;
    if let Some(i) = (0..trials).find(|&i| base[i] != lifted[i]) {
        return Err(CliError::Invariant(format!("wrapped and base labels disagree on trial {i}")));
    }
    let count = |v: &[bool]| v.iter().filter(|&&x| x).count();
    let mut report = Report::default();
    report.rows.push(Row::estimate(e, "base", 0, RiskEstimate::from_counts(count(&base), trials, cfg.seed)));
    report.rows.push(Row::estimate(e, "c1", 0, RiskEstimate::from_counts(count(&lifted), trials, cfg.seed)));
    report.transcript = (0..trials)
        .map(|i| {
            format!(
                "risk trial={i} seed={} base={} c1={}",
                mix_seed(cfg.seed, i as u64),
                base[i] as u8,
                lifted[i] as u8
            )
        })
        .collect();
    Ok(report)
}

fn adv_risk(cfg: &ExperimentConfig, trials: usize) -> Result<Report, CliError> {
    let e = Experiment::AdvRisk;
    let q = cfg.problem()?;
    let h = majority_hypothesis(cfg.d);
    let attacker: Box<dyn Attacker> = match cfg.attacker {
        AttackerKind::Auto | AttackerKind::Greedy => Box::new(GreedyMajority::new(cfg.b)),
        AttackerKind::Exhaustive => Box::new(ExhaustiveBallAttacker::default()),
        AttackerKind::Identity => Box::new(IdentityAttacker),
    };
    let (out, est) = games(&q, &h, attacker.as_ref(), cfg.b, trials, cfg.seed)?;
    let mut report = Report::default();
    let series = attacker.name().to_string();
    report.rows.push(Row::estimate(e, series.as_str(), cfg.b, est));
    report
        .rows
        .push(Row::exact(e, "analytic", cfg.b, analytic_adv_risk(&q, cfg.b), cfg.seed));
    game_lines(&mut report, &series, cfg.seed, &out);
    Ok(report)
}

/// Bounded attacker at budget `er·n` against unbounded attacker at `b + ℓ`.
fn separation(cfg: &ExperimentConfig, trials: usize) -> Result<Report, CliError> {
    let e = Experiment::Separation;
    let p = c1(cfg)?;
    let t_max = p.code().params().t_max();
    let small = cfg.b + p.ots().sig_len();
    if small > t_max {
        return Err(ConfigError::new(format!(
            "separation needs b + ℓ <= t_max, but {} + {} > {t_max}",
            cfg.b,
            p.ots().sig_len()
        ))
        .into());
    }
    let h = p.classifier(majority_hypothesis(cfg.d));
    let search = base_search(cfg)?;
    let bounded = BoundedForgerC1::new(&p, Arc::clone(&search), cfg.b, cfg.query_budget);
    let unbounded = UnboundedForgerC1::new(&p, search, cfg.b);
    let (bo, be) = games(&p, &h, &bounded, t_max, trials, cfg.seed)?;
    let (uo, ue) = games(&p, &h, &unbounded, small, trials, cfg.seed)?;
    let mut report = Report::default();
    report.rows.push(Row::estimate(e, "bounded", t_max, be));
    report.rows.push(Row::estimate(e, "unbounded", small, ue));
    report
        .rows
        .push(Row::exact(e, "analytic", cfg.b, analytic_adv_risk(p.base(), cfg.b), cfg.seed));
    game_lines(&mut report, "bounded", cfg.seed, &bo);
    game_lines(&mut report, "unbounded", cfg.seed, &uo);
    Ok(report)
}

fn c3(cfg: &ExperimentConfig, trials: usize) -> Result<Report, CliError> {
    let e = Experiment::C3;
    let base = BalancedParity::new(cfg.ecc().data_bits()).map_err(setup)?;
    let p = C3Problem::new(base, cfg.ots(), cfg.ecc()).map_err(setup)?;
    let h = p.classifier();
    let errors = risk_trials(&p, &h, trials, cfg.seed, Execution::Parallel).map_err(runtime)?;
    if let Some(i) = errors.iter().position(|&x| x) {
        return Err(CliError::Invariant(format!("honest sample {i} was misclassified")));
    }
    let t_max = p.code().params().t_max();
    let sig = p.ots().sig_len();
    let (uo, ue) = games(&p, &h, &UnboundedForgerC3::new(&p), sig, trials, cfg.seed)?;
    let (bo, be) = games(&p, &h, &BoundedForgerC3::new(&p, cfg.query_budget), t_max, trials, cfg.seed)?;
    let mut report = Report::default();
    report
        .rows
        .push(Row::estimate(e, "honest-risk", 0, RiskEstimate::from_counts(0, trials, cfg.seed)));
    report.rows.push(Row::estimate(e, "unbounded", sig, ue));
    report.rows.push(Row::estimate(e, "bounded", t_max, be));
    game_lines(&mut report, "unbounded", cfg.seed, &uo);
    game_lines(&mut report, "bounded", cfg.seed, &bo);
    Ok(report)
}

fn witnesses_valid(bundle: &SamplerBundle, a: &[bool], h: &dyn Hypothesis) -> bool {
    bundle.decode_witness(a).iter().all(|(j, xp)| {
        let slot = &bundle.slots[*j];
        let l = h.classify(xp);
        slot.x.hamming_distance(xp).is_ok_and(|d| d <= bundle.b) && l != slot.y && !l.is_star()
    })
}

/// Emits `count` formulas of the configured stage as DIMACS plus a manifest,
/// and measures their satisfiable fraction with the built-in solver.
fn np_forge(cfg: &ExperimentConfig, count: usize) -> Result<Report, CliError> {
    let e = Experiment::NpForge;
    if count == 0 {
        return Err(ConfigError::new("forge.count must be at least 1").into());
    }
    let q = cfg.problem()?;
    let beta = analytic_adv_risk(&q, cfg.b);
    let tau = match cfg.forge_tau {
        Tau::Auto => midway_tau(cfg.alpha, beta),
        Tau::Value(t) => t,
    };
    let circuit = circuit_of_majority(cfg.d);
    let h = majority_hypothesis(cfg.d);
    let limits = SolverLimits::with_var_cap(cfg.forge_var_cap);
    let stage = cfg.forge_stage;
    let prefix = stage.as_str().to_lowercase();

    let mut report = Report::default();
    let mut manifest = String::new();
    let mut sat = 0;
    for i in 0..count {
        let seed = mix_seed(cfg.seed, i as u64);
        let bundle = match stage {
            Stage::S1 => sample_s1(&q, &circuit, cfg.b, seed),
            Stage::S2 => sample_s2(&q, &circuit, cfg.b, cfg.forge_k, tau, seed),
            Stage::S => sample_s_final(&q, &circuit, cfg.b, cfg.forge_k, tau, cfg.forge_reps, seed),
        }
        .map_err(setup)?;
        let file = format!("{prefix}_{i:04}.cnf");
        let verdict = match compgap::np::solve(&bundle.formula, &limits) {
            SolveResult::Sat(a) => {
                if !witnesses_valid(&bundle, &a, &h) {
                    return Err(CliError::Invariant(format!("{file}: a witness does not decode to an adversarial example")));
                }
                sat += 1;
                "SAT"
            }
            SolveResult::Unsat => "UNSAT",
            SolveResult::CapExceeded => "CAP",
        };
        report.transcript.push(format!(
            "{file} seed={seed} vars={} clauses={} verdict={verdict}",
            bundle.formula.num_vars(),
            bundle.formula.num_clauses()
        ));
        manifest.push_str(&bundle.manifest_entry(&file).to_string());
        manifest.push('\n');
        report.files.push((PathBuf::from("cnf").join(&file), bundle.formula.to_dimacs()));
    }
    report.files.push((PathBuf::from("cnf").join("manifest.txt"), manifest));
    report.rows.push(Row::estimate(
        e,
        format!("{}-sat-rate", stage.as_str()),
        cfg.b,
        RiskEstimate::from_counts(sat, count, cfg.seed),
    ));
    report.rows.push(Row::exact(e, "beta", cfg.b, beta, cfg.seed));
    report.rows.push(Row::exact(e, "tau", cfg.b, tau, cfg.seed));
    Ok(report)
}

/// Cross-checks the closed-form adversarial risk against enumeration and a
/// Monte-Carlo run of the greedy attacker.
fn oracle_check(cfg: &ExperimentConfig, trials: usize) -> Result<Report, CliError> {
    let e = Experiment::OracleCheck;
    let q = cfg.problem()?;
    let h = majority_hypothesis(cfg.d);
    let analytic = analytic_adv_risk(&q, cfg.b);
    let mut report = Report::default();
    report.rows.push(Row::exact(e, "analytic", cfg.b, analytic, cfg.seed));
    if cfg.d <= BRUTE_FORCE_MAX_D {
        let counts = brute_force_adv_risk(&q, &h, cfg.b, BRUTE_FORCE_MAX_D).map_err(setup)?;
        if counts != analytic_adv_risk_counts(cfg.d, cfg.b) {
            return Err(CliError::Invariant(format!(
                "closed form and enumeration disagree at d={} b={}",
                cfg.d, cfg.b
            )));
        }
        report
            .rows
            .push(Row::exact(e, "brute-force", cfg.b, counts.value(cfg.alpha), cfg.seed));
        report.transcript.push(format!(
            "brute-force d={} b={} clean={} noisy={} total={}",
            cfg.d, cfg.b, counts.clean, counts.noisy, counts.total
        ));
    } else {
        report
            .transcript
            .push(format!("brute-force skipped: d={} > {BRUTE_FORCE_MAX_D}", cfg.d));
    }
    let (out, est) = games(&q, &h, &GreedyMajority::new(cfg.b), cfg.b, trials, cfg.seed)?;
    report.transcript.push(format!(
        "greedy-mc point={:.6} half_width={:.6} within_3hw={}",
        est.point,
        est.half_width,
        est.within(analytic, 3.0)
    ));
    report.rows.push(Row::estimate(e, "greedy-mc", cfg.b, est));
    game_lines(&mut report, "greedy-mc", cfg.seed, &out);
    Ok(report)
}
