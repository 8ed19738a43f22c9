//! Experiment configuration.
//!
//! Grammar, one setting per line:
//!
//! ```text
//! # comment (also allowed after a value)
//! problem.d = 15
//! problem.alpha = 0.05
//! forge.tau = auto
//! ```
//!
//! Keys are dotted paths; values are integers, decimals or bare words. Unknown
//! keys are rejected; missing keys keep their defaults, so an empty file is
//! the full default configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use compgap::crypto::{EccParams, OtsParams};
use compgap::np::Stage;
use compgap::problems::MajorityNoise;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        ConfigError {
            line: None,
            message: message.into(),
        }
    }

    fn at(line: usize, message: impl Into<String>) -> Self {
        ConfigError {
            line: Some(line),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackerKind {
    /// The experiment's natural attacker(s).
    Auto,
    Identity,
    Greedy,
    Exhaustive,
}

impl FromStr for AttackerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(AttackerKind::Auto),
            "identity" => Ok(AttackerKind::Identity),
            "greedy" => Ok(AttackerKind::Greedy),
            "exhaustive" => Ok(AttackerKind::Exhaustive),
            _ => Err(format!("unknown attacker kind {s:?} (auto, identity, greedy, exhaustive)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tau {
    /// Halfway between the base risk and the analytic adversarial risk.
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub d: usize,
    pub alpha: f64,
    pub b: usize,
    pub hlen: usize,
    pub slen: usize,
    pub hash_rounds: u32,
    pub bits_per_symbol: u32,
    pub k_sym: usize,
    pub n_sym: usize,
    pub attacker: AttackerKind,
    pub query_budget: u64,
    /// `None` means the experiment's own default.
    pub trials: Option<usize>,
    pub seed: u64,
    pub out: PathBuf,
    pub forge_k: usize,
    pub forge_tau: Tau,
    pub forge_reps: usize,
    pub forge_count: usize,
    pub forge_stage: Stage,
    pub forge_var_cap: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let ots = OtsParams::default();
        let ecc = EccParams::default();
        ExperimentConfig {
            d: 15,
            alpha: 0.05,
            b: 2,
            hlen: ots.hlen,
            slen: ots.slen,
            hash_rounds: ots.hash_rounds,
            bits_per_symbol: ecc.bits_per_symbol,
            k_sym: ecc.k_sym,
            n_sym: ecc.n_sym,
            attacker: AttackerKind::Auto,
            query_budget: 1 << 10,
            trials: None,
            seed: 1,
            out: PathBuf::from("results"),
            forge_k: 40,
            forge_tau: Tau::Auto,
            forge_reps: 5,
            forge_count: 20,
            forge_stage: Stage::S2,
            forge_var_cap: 250_000,
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("{key} expects a number, got {value:?}"))
}

impl ExperimentConfig {
    pub fn ots(&self) -> OtsParams {
        OtsParams {
            hlen: self.hlen,
            slen: self.slen,
            hash_rounds: self.hash_rounds,
        }
    }

    pub fn ecc(&self) -> EccParams {
        EccParams {
            bits_per_symbol: self.bits_per_symbol,
            k_sym: self.k_sym,
            n_sym: self.n_sym,
        }
    }

    pub fn problem(&self) -> Result<MajorityNoise, ConfigError> {
        MajorityNoise::new(self.d, self.alpha).map_err(|e| ConfigError::new(e.to_string()))
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "problem.d" => self.d = num(key, value)?,
            "problem.alpha" => self.alpha = num(key, value)?,
            "problem.b" => self.b = num(key, value)?,
            "ots.hlen" => self.hlen = num(key, value)?,
            "ots.slen" => self.slen = num(key, value)?,
            "ots.hash_rounds" => self.hash_rounds = num(key, value)?,
            "ecc.bits_per_symbol" => self.bits_per_symbol = num(key, value)?,
            "ecc.k_sym" => self.k_sym = num(key, value)?,
            "ecc.n_sym" => self.n_sym = num(key, value)?,
            "attacker.kind" => self.attacker = value.parse()?,
            "attacker.query_budget" => self.query_budget = num(key, value)?,
            "run.trials" => self.trials = Some(num(key, value)?),
            "run.seed" => self.seed = num(key, value)?,
            "run.out" => self.out = PathBuf::from(value),
            "forge.k" => self.forge_k = num(key, value)?,
            "forge.tau" => {
                self.forge_tau = if value == "auto" {
                    Tau::Auto
                } else {
                    Tau::Value(num(key, value)?)
                }
            }
            "forge.reps" => self.forge_reps = num(key, value)?,
            "forge.count" => self.forge_count = num(key, value)?,
            "forge.stage" => self.forge_stage = value.parse().map_err(|e: compgap::Error| e.to_string())?,
            "forge.var_cap" => self.forge_var_cap = num(key, value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }
}

pub fn parse_config(source: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::default();
    for (i, raw) in source.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::at(i + 1, format!("expected `key = value`, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(ConfigError::at(i + 1, format!("{key} has no value")));
        }
        cfg.set(key, value).map_err(|m| ConfigError::at(i + 1, m))?;
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_key() {
        let c = parse_config("problem.d = 15\n").unwrap();
        assert_eq!(c.d, 15);
    }

    #[test]
    fn bad_number_names_the_line() {
        let e = parse_config("# header\n\nproblem.d = fifteen\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.to_string().starts_with("line 3:"), "{e}");
    }

    #[test]
    fn empty_file_is_default() {
        assert_eq!(parse_config("").unwrap(), ExperimentConfig::default());
        assert_eq!(parse_config("   # only comments\n").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn unknown_key_rejected() {
        let e = parse_config("problem.depth = 3").unwrap_err();
        assert_eq!(e.line, Some(1));
        assert!(e.message.contains("problem.depth"));
    }

    #[test]
    fn words_decimals_and_trailing_comments() {
        let c = parse_config(
            "attacker.kind = exhaustive # brute force\nforge.tau = 0.4\nforge.stage = S1\nrun.out = /tmp/x\n",
        )
        .unwrap();
        assert_eq!(c.attacker, AttackerKind::Exhaustive);
        assert_eq!(c.forge_tau, Tau::Value(0.4));
        assert_eq!(c.forge_stage, Stage::S1);
        assert_eq!(c.out, PathBuf::from("/tmp/x"));
        assert!(parse_config("forge.tau = auto").unwrap().forge_tau == Tau::Auto);
        assert!(parse_config("problem.d").is_err());
        assert!(parse_config("problem.d =").is_err());
    }
}
