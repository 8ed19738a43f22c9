//! Attackers, from the trivial one to exhaustive forgers.
//!
//! Bounded attackers model "efficient" adversaries by a query budget: every
//! hypothesis query, sampler draw and hash evaluation goes through the metered
//! [`Oracles`], so the budget is enforced by the game rather than trusted.
//! Unbounded attackers may search preimage spaces exhaustively; they do so
//! directly, without the meter.

use std::sync::Arc;

use rand::Rng;

use crate::bits::BitString;
use crate::constructions::{C1Layout, C1Problem, C3Layout, C3Problem};
use crate::crypto::ots::{OtsParams, VerifyingKey};
use crate::crypto::rs::ReedSolomon;
use crate::game::{Attacker, Hypothesis, Label, Oracles, Power, Problem};
use crate::problems::majority;

/// Returns `x` unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityAttacker;

impl Attacker for IdentityAttacker {
    fn name(&self) -> &str {
        "identity"
    }

    fn power(&self) -> Power {
        Power::Identity
    }

    fn declared_budget(&self) -> Option<usize> {
        Some(0)
    }

    fn perturb(&self, x: &BitString, _y: Label, _oracles: &mut Oracles<'_>) -> BitString {
        x.clone()
    }
}

/// An adversarial-example finder for a base problem, used as the first stage
/// of the C1 attackers.
pub trait BaseSearch: Send + Sync {
    /// Some `x'` within `budget` flips of `x` whose base label is wrong for `y`
    /// and not a star (possibly `x` itself), or `None`.
    fn search(&self, x: &BitString, y: Label, budget: usize) -> Option<BitString>;
}

/// Optimal attacker for the majority hypothesis: moves just enough
/// majority-side bits (lowest indices first) to change `MAJ(x)`.
#[derive(Debug, Clone, Copy)]
pub struct GreedyMajority {
    pub b: usize,
}

impl GreedyMajority {
    pub fn new(b: usize) -> Self {
        GreedyMajority { b }
    }
}

impl BaseSearch for GreedyMajority {
    fn search(&self, x: &BitString, y: Label, budget: usize) -> Option<BitString> {
        let maj = majority(x);
        if Label::bit(maj) != y {
            return Some(x.clone());
        }
        let ones = x.count_ones();
        let d = x.len();
        let needed = if maj { ones - (d - 1) / 2 } else { d.div_ceil(2) - ones };
        if needed > budget.min(self.b) {
            return None;
        }
        let mut out = x.clone();
        for i in (0..d).filter(|&i| x.get(i) == maj).take(needed) {
            out.flip(i);
        }
        Some(out)
    }
}

impl Attacker for GreedyMajority {
    fn name(&self) -> &str {
        "greedy-majority"
    }

    fn power(&self) -> Power {
        Power::Bounded { query_budget: 0 }
    }

    fn declared_budget(&self) -> Option<usize> {
        Some(self.b)
    }

    fn perturb(&self, x: &BitString, y: Label, oracles: &mut Oracles<'_>) -> BitString {
        self.search(x, y, oracles.budget()).unwrap_or_else(|| x.clone())
    }
}

/// Default cap on the number of points an exhaustive ball search visits.
pub const DEFAULT_MAX_BALL: u64 = 1 << 22;

/// Visits the radius-`1..=radius` shells around `x` in order (positions in
/// lexicographic order within a shell) until `accept` holds. Gives up once
/// more than `max_ball` points have been visited.
pub fn search_ball(
    x: &BitString,
    radius: usize,
    max_ball: u64,
    mut accept: impl FnMut(&BitString) -> bool,
) -> Option<BitString> {
    let n = x.len();
    let mut visited = 0u64;
    for r in 1..=radius.min(n) {
        let mut idx: Vec<usize> = (0..r).collect();
        loop {
            visited += 1;
            if visited > max_ball {
                return None;
            }
            let mut cand = x.clone();
            for &i in &idx {
                cand.flip(i);
            }
            if accept(&cand) {
                return Some(cand);
            }
            // Next r-combination of 0..n.
            let Some(k) = (0..r).rev().find(|&k| idx[k] < n - r + k) else {
                break;
            };
            idx[k] += 1;
            for j in k + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    None
}

/// Searches the whole Hamming ball of the game budget through the hypothesis oracle.
#[derive(Debug, Clone, Copy)]
pub struct ExhaustiveBallAttacker {
    pub max_ball: u64,
}

impl Default for ExhaustiveBallAttacker {
    fn default() -> Self {
        ExhaustiveBallAttacker {
            max_ball: DEFAULT_MAX_BALL,
        }
    }
}

impl Attacker for ExhaustiveBallAttacker {
    fn name(&self) -> &str {
        "exhaustive-ball"
    }

    fn power(&self) -> Power {
        Power::Unbounded
    }

    fn perturb(&self, x: &BitString, y: Label, oracles: &mut Oracles<'_>) -> BitString {
        if oracles.classify(x) != Some(y) {
            return x.clone();
        }
        let radius = oracles.budget();
        search_ball(x, radius, self.max_ball, |c| {
            matches!(oracles.classify(c), Some(l) if l != y && !l.is_star())
        })
        .unwrap_or_else(|| x.clone())
    }
}

/// Exhaustive ball search against a known base hypothesis.
pub struct BallSearch {
    h: Arc<dyn Hypothesis>,
    max_ball: u64,
}

impl BallSearch {
    pub fn new(h: Arc<dyn Hypothesis>) -> Self {
        BallSearch {
            h,
            max_ball: DEFAULT_MAX_BALL,
        }
    }
}

impl BaseSearch for BallSearch {
    fn search(&self, x: &BitString, y: Label, budget: usize) -> Option<BitString> {
        if self.h.classify(x) != y {
            return Some(x.clone());
        }
        search_ball(x, budget, self.max_ball, |c| {
            let l = self.h.classify(c);
            l != y && !l.is_star()
        })
    }
}

/// What a C1 attacker knows about the instance format.
#[derive(Clone)]
struct C1View {
    ots: OtsParams,
    rs: Arc<ReedSolomon>,
    layout: C1Layout,
}

impl C1View {
    fn of<P: Problem>(p: &C1Problem<P>) -> Self {
        C1View {
            ots: *p.ots(),
            rs: Arc::clone(p.code()),
            layout: p.layout(),
        }
    }

    fn key(&self, inst: &BitString) -> Option<VerifyingKey> {
        let bits = self.rs.decode_at(inst, self.layout.vk_offset()).ok()?;
        VerifyingKey::from_bits(&self.ots, &bits).ok()
    }
}

/// Finds a base adversarial example, then tries to re-sign it by guessing
/// preimages at random within a query budget; falls back to the identity.
pub struct BoundedForgerC1 {
    view: C1View,
    base: Arc<dyn BaseSearch>,
    b: usize,
    query_budget: u64,
}

impl BoundedForgerC1 {
    pub fn new<P: Problem>(problem: &C1Problem<P>, base: Arc<dyn BaseSearch>, b: usize, query_budget: u64) -> Self {
        BoundedForgerC1 {
            view: C1View::of(problem),
            base,
            b,
            query_budget,
        }
    }

    fn attempt(&self, inst: &BitString, y: Label, o: &mut Oracles<'_>) -> Option<BitString> {
        let l = &self.view.layout;
        let ots = &self.view.ots;
        let x = inst.slice(0, l.d);
        let xp = self.base.search(&x, y, self.b)?;
        if xp == x {
            return None;
        }
        let vk = self.view.key(inst)?;
        let old = o.hash(&x, ots.hlen, ots.hash_rounds)?.get_bits(0, ots.hlen);
        let new = o.hash(&xp, ots.hlen, ots.hash_rounds)?.get_bits(0, ots.hlen);
        let mut out = inst.clone();
        out.write_slice(0, &xp);
        let mask = if ots.slen == 64 { u64::MAX } else { (1u64 << ots.slen) - 1 };
        for i in (0..ots.hlen).filter(|&i| (old ^ new) >> i & 1 == 1) {
            let target = vk.entry(i, new >> i & 1 == 1);
            loop {
                let guess = o.rng().gen::<u64>() & mask;
                if o.hash_u64(guess, ots.slen, ots.hlen, ots.hash_rounds)? == target {
                    out.set_bits(l.sig_offset() + i * ots.slen, ots.slen, guess);
                    break;
                }
            }
        }
        Some(out)
    }
}

impl Attacker for BoundedForgerC1 {
    fn name(&self) -> &str {
        "bounded-c1"
    }

    fn power(&self) -> Power {
        Power::Bounded {
            query_budget: self.query_budget,
        }
    }

    fn declared_budget(&self) -> Option<usize> {
        Some(self.b + self.view.layout.sig_len)
    }

    fn perturb(&self, inst: &BitString, y: Label, oracles: &mut Oracles<'_>) -> BitString {
        self.attempt(inst, y, oracles).unwrap_or_else(|| inst.clone())
    }
}

/// Finds a base adversarial example and signs it by exhaustive preimage
/// search. Changes at most `b + ℓ` bits.
pub struct UnboundedForgerC1 {
    view: C1View,
    base: Arc<dyn BaseSearch>,
    b: usize,
}

impl UnboundedForgerC1 {
    pub fn new<P: Problem>(problem: &C1Problem<P>, base: Arc<dyn BaseSearch>, b: usize) -> Self {
        UnboundedForgerC1 {
            view: C1View::of(problem),
            base,
            b,
        }
    }

    fn attempt(&self, inst: &BitString, y: Label) -> Option<BitString> {
        let l = &self.view.layout;
        let x = inst.slice(0, l.d);
        let xp = self.base.search(&x, y, self.b)?;
        if xp == x {
            return None;
        }
        let vk = self.view.key(inst)?;
        let forged = match self.view.ots.forge_exhaustive(&vk, &xp) {
            Ok(f) => f,
            Err(e) => {
                log::warn!("forgery failed: {e}");
                return None;
            }
        };
        let mut out = inst.clone();
        out.write_slice(0, &xp);
        out.write_slice(l.sig_offset(), forged.signature.bits());
        Some(out)
    }
}

impl Attacker for UnboundedForgerC1 {
    fn name(&self) -> &str {
        "unbounded-c1"
    }

    fn power(&self) -> Power {
        Power::Unbounded
    }

    fn declared_budget(&self) -> Option<usize> {
        Some(self.b + self.view.layout.sig_len)
    }

    fn perturb(&self, inst: &BitString, y: Label, _oracles: &mut Oracles<'_>) -> BitString {
        self.attempt(inst, y).unwrap_or_else(|| inst.clone())
    }
}

#[derive(Clone)]
struct C3View {
    ots: OtsParams,
    rs: Arc<ReedSolomon>,
    layout: C3Layout,
}

impl C3View {
    fn of<P: Problem>(p: &C3Problem<P>) -> Self {
        C3View {
            ots: *p.ots(),
            rs: Arc::clone(p.code()),
            layout: p.layout(),
        }
    }

    fn message_and_key(&self, inst: &BitString) -> Option<(BitString, VerifyingKey)> {
        let x = self.rs.decode_at(inst, 0).ok()?;
        let bits = self.rs.decode_at(inst, self.layout.vk_offset()).ok()?;
        Some((x, VerifyingKey::from_bits(&self.ots, &bits).ok()?))
    }
}

/// On label 0, forges a signature for the decoded message and writes it over
/// slot 0 (at most `ℓ` flips). Label-1 instances are returned unchanged.
pub struct UnboundedForgerC3 {
    view: C3View,
}

impl UnboundedForgerC3 {
    pub fn new<P: Problem>(problem: &C3Problem<P>) -> Self {
        UnboundedForgerC3 {
            view: C3View::of(problem),
        }
    }
}

impl Attacker for UnboundedForgerC3 {
    fn name(&self) -> &str {
        "unbounded-c3"
    }

    fn power(&self) -> Power {
        Power::Unbounded
    }

    fn declared_budget(&self) -> Option<usize> {
        Some(self.view.layout.sig_len)
    }

    fn perturb(&self, inst: &BitString, y: Label, _oracles: &mut Oracles<'_>) -> BitString {
        if y != Label::Class(0) {
            return inst.clone();
        }
        let Some((x, vk)) = self.view.message_and_key(inst) else {
            return inst.clone();
        };
        match self.view.ots.forge_exhaustive(&vk, &x) {
            Ok(f) => {
                let mut out = inst.clone();
                out.write_slice(self.view.layout.slot_offset(0), f.signature.bits());
                out
            }
            Err(e) => {
                log::warn!("forgery failed: {e}");
                inst.clone()
            }
        }
    }
}

/// Label 0: guesses preimages within the query budget to validate slot 0.
/// Label 1: spends the bit budget breaking one bit in each of the leading
/// slots, which cannot reach all `n` of them.
pub struct BoundedForgerC3 {
    view: C3View,
    query_budget: u64,
}

impl BoundedForgerC3 {
    pub fn new<P: Problem>(problem: &C3Problem<P>, query_budget: u64) -> Self {
        BoundedForgerC3 {
            view: C3View::of(problem),
            query_budget,
        }
    }

    fn forge(&self, inst: &BitString, o: &mut Oracles<'_>) -> Option<BitString> {
        let ots = &self.view.ots;
        let (x, vk) = self.view.message_and_key(inst)?;
        let digest = o.hash(&x, ots.hlen, ots.hash_rounds)?.get_bits(0, ots.hlen);
        let mask = if ots.slen == 64 { u64::MAX } else { (1u64 << ots.slen) - 1 };
        let mut out = inst.clone();
        let slot = self.view.layout.slot_offset(0);
        for i in 0..ots.hlen {
            let target = vk.entry(i, digest >> i & 1 == 1);
            loop {
                let guess = o.rng().gen::<u64>() & mask;
                if o.hash_u64(guess, ots.slen, ots.hlen, ots.hash_rounds)? == target {
                    out.set_bits(slot + i * ots.slen, ots.slen, guess);
                    break;
                }
            }
        }
        Some(out)
    }
}

impl Attacker for BoundedForgerC3 {
    fn name(&self) -> &str {
        "bounded-c3"
    }

    fn power(&self) -> Power {
        Power::Bounded {
            query_budget: self.query_budget,
        }
    }

    fn perturb(&self, inst: &BitString, y: Label, oracles: &mut Oracles<'_>) -> BitString {
        if y == Label::Class(0) {
            return self.forge(inst, oracles).unwrap_or_else(|| inst.clone());
        }
        let layout = &self.view.layout;
        let mut out = inst.clone();
        for j in 0..oracles.budget().min(layout.slots()) {
            out.flip(layout.slot_offset(j));
        }
        out
    }
}
