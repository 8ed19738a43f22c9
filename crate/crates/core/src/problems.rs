//! Base learning problems with exactly computable risks.
//!
//! [`MajorityNoise`] draws `x` uniformly from `{0,1}^d` (odd `d`) and labels it
//! `MAJ(x)`, flipped with probability `alpha`. The majority hypothesis has risk
//! exactly `alpha`. Against `b` flips it loses on every noisy label and on every
//! clean label whose margin `|2·ones(x) - d|` is at most `2b`: moving
//! `(|2w - d| + 1) / 2` majority-side bits to the other side is both necessary
//! and sufficient to change `MAJ`, so flipping majority bits greedily is optimal.

use rand::Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::game::{Hypothesis, Label, Problem};
use crate::seed::rng_from;

pub fn majority(x: &BitString) -> bool {
    2 * x.count_ones() > x.len()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorityNoise {
    d: usize,
    alpha: f64,
}

impl MajorityNoise {
    pub fn new(d: usize, alpha: f64) -> Result<Self> {
        if d.is_multiple_of(2) || d > 63 {
            return Err(Error::Config(format!("problem.d must be odd and below 64 (got {d})")));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Config(format!("problem.alpha must lie in [0, 1) (got {alpha})")));
        }
        Ok(MajorityNoise { d, alpha })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Problem for MajorityNoise {
    fn instance_len(&self) -> usize {
        self.d
    }

    fn label_count(&self) -> u32 {
        2
    }

    fn sample(&self, seed: u64) -> Result<(BitString, Label)> {
        let mut rng = rng_from(seed);
        let x = BitString::random(self.d, &mut rng);
        let noisy = rng.gen::<f64>() < self.alpha;
        let y = Label::bit(majority(&x) ^ noisy);
        Ok((x, y))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MajorityHypothesis {
    d: usize,
}

pub fn majority_hypothesis(d: usize) -> MajorityHypothesis {
    MajorityHypothesis { d }
}

impl Hypothesis for MajorityHypothesis {
    fn instance_len(&self) -> usize {
        self.d
    }

    fn classify(&self, x: &BitString) -> Label {
        Label::bit(majority(x))
    }
}

/// Uniform `x` of a given length labelled by its parity; labels are balanced.
#[derive(Debug, Clone, Copy)]
pub struct BalancedParity {
    len: usize,
}

impl BalancedParity {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Config("parity problem needs at least one bit".into()));
        }
        Ok(BalancedParity { len })
    }
}

pub fn parity(x: &BitString) -> bool {
    x.count_ones() % 2 == 1
}

impl Problem for BalancedParity {
    fn instance_len(&self) -> usize {
        self.len
    }

    fn label_count(&self) -> u32 {
        2
    }

    fn sample(&self, seed: u64) -> Result<(BitString, Label)> {
        let x = BitString::random(self.len, &mut rng_from(seed));
        let y = Label::bit(parity(&x));
        Ok((x, y))
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exact adversarial-risk counts over `{0,1}^d`: the attacker wins on `clean`
/// of the `total` instances when the label is clean, and on `noisy` of them
/// when it is flipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdvRiskCounts {
    pub clean: u128,
    pub noisy: u128,
    pub total: u128,
}

impl AdvRiskCounts {
    pub fn value(&self, alpha: f64) -> f64 {
        ((1.0 - alpha) * self.clean as f64 + alpha * self.noisy as f64) / self.total as f64
    }
}

/// Binomial-sum counts for the majority hypothesis under `b` flips.
pub fn analytic_adv_risk_counts(d: usize, b: usize) -> AdvRiskCounts {
    let clean = (0..=d)
        .filter(|&w| (2 * w as i64 - d as i64).unsigned_abs() as usize <= 2 * b)
        .map(|w| binomial(d, w))
        .sum();
    AdvRiskCounts {
        clean,
        noisy: 1u128 << d,
        total: 1u128 << d,
    }
}

/// `alpha + (1 - alpha)·Pr[|2·ones(x) - d| <= 2b]`.
pub fn analytic_adv_risk(problem: &MajorityNoise, b: usize) -> f64 {
    analytic_adv_risk_counts(problem.d, b).value(problem.alpha)
}

/// Largest `d` accepted by [`brute_force_adv_risk`] unless overridden.
pub const BRUTE_FORCE_MAX_D: usize = 20;

/// Exact adversarial-risk counts of an arbitrary hypothesis on the
/// majority-with-noise distribution, by enumerating every `x` and every `x'`
/// within distance `b`.
pub fn brute_force_adv_risk(
    problem: &MajorityNoise,
    h: &dyn Hypothesis,
    b: usize,
    max_d: usize,
) -> Result<AdvRiskCounts> {
    let d = problem.d;
    if d > max_d {
        return Err(Error::Config(format!("brute force limited to d <= {max_d} (got {d})")));
    }
    let size = 1usize << d;
    let table: Vec<Label> = (0..size)
        .map(|v| h.classify(&BitString::from_u64(v as u64, d)))
        .collect();
    let masks: Vec<usize> = (1..size).filter(|m| m.count_ones() as usize <= b).collect();
    let wins = |v: usize, y: Label| {
        table[v] != y
            || masks.iter().any(|&m| {
                let l = table[v ^ m];
                l != y && !l.is_star()
            })
    };
    let mut counts = AdvRiskCounts {
        clean: 0,
        noisy: 0,
        total: size as u128,
    };
    for v in 0..size {
        let truth = 2 * (v.count_ones() as usize) > d;
        counts.clean += wins(v, Label::bit(truth)) as u128;
        counts.noisy += wins(v, Label::bit(!truth)) as u128;
    }
    Ok(counts)
}
