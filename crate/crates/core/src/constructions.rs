//! Signature-wrapped learning problems.
//!
//! [`C1Problem`] appends to each base instance `x` a fresh one-time signature
//! `σ` of `x` and the error-corrected verification key: `(x, σ, Encode(vk))`.
//! Its classifier answers the base label when the key decodes and `σ`
//! verifies, and [`Label::Star`] otherwise. The secret key never leaves
//! `sample`.
//!
//! [`C3Problem`] hides the label in the validity of a signature instead:
//! `(Encode(x), σ repeated n times, Encode(vk))` where `σ` is an honest
//! signature of `x` for label 1 and a random invalid string for label 0. Its
//! classifier answers 1 iff some slot verifies, and never answers a star; an
//! undecodable `x` or key block is read as label 0.

use std::sync::Arc;

use crate::bits::BitString;
use crate::crypto::ots::{OtsParams, VerifyingKey};
use crate::crypto::rs::{EccParams, ReedSolomon};
use crate::error::{Error, Result};
use crate::game::{Hypothesis, Label, Problem};
use crate::seed::{mix_seed, rng_from, STREAM_SIGNATURE};

/// Maximum draws when rejection-sampling an invalid signature.
pub const MAX_REJECTION_ATTEMPTS: usize = 1000;

/// Bit offsets of the three fields of a C1 (signed) instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct C1Layout {
    pub d: usize,
    pub sig_len: usize,
    pub code_len: usize,
}

impl C1Layout {
    pub fn sig_offset(&self) -> usize {
        self.d
    }

    pub fn vk_offset(&self) -> usize {
        self.d + self.sig_len
    }

    pub fn total_len(&self) -> usize {
        self.d + self.sig_len + self.code_len
    }
}

fn check_key_width(ots: &OtsParams, ecc: &EccParams) -> Result<()> {
    ots.validate()?;
    ecc.validate()?;
    if ecc.data_bits() != ots.vk_len() {
        return Err(Error::Config(format!(
            "the code carries {} data bits but the verification key has {} (need bits_per_symbol·k_sym = 2·hlen²)",
            ecc.data_bits(),
            ots.vk_len()
        )));
    }
    Ok(())
}

pub struct C1Problem<P> {
    base: P,
    ots: OtsParams,
    rs: Arc<ReedSolomon>,
}

impl<P: Problem> C1Problem<P> {
    pub fn new(base: P, ots: OtsParams, ecc: EccParams) -> Result<Self> {
        check_key_width(&ots, &ecc)?;
        Ok(C1Problem {
            base,
            ots,
            rs: Arc::new(ReedSolomon::new(ecc)?),
        })
    }

    pub fn layout(&self) -> C1Layout {
        C1Layout {
            d: self.base.instance_len(),
            sig_len: self.ots.sig_len(),
            code_len: self.rs.params().code_bits(),
        }
    }

    pub fn base(&self) -> &P {
        &self.base
    }

    pub fn ots(&self) -> &OtsParams {
        &self.ots
    }

    pub fn code(&self) -> &Arc<ReedSolomon> {
        &self.rs
    }

    /// The C1 classifier around a base hypothesis.
    pub fn classifier<H: Hypothesis>(&self, base_h: H) -> C1Classifier<H> {
        C1Classifier {
            base_h,
            ots: self.ots,
            rs: Arc::clone(&self.rs),
            layout: self.layout(),
        }
    }
}

impl<P: Problem> Problem for C1Problem<P> {
    fn instance_len(&self) -> usize {
        self.layout().total_len()
    }

    fn label_count(&self) -> u32 {
        self.base.label_count()
    }

    fn sample(&self, seed: u64) -> Result<(BitString, Label)> {
        let (x, y) = self.base.sample(seed)?;
        let keys = self.ots.kgen(seed);
        let sig = self.ots.sign(&keys.sk, &x);
        let vk_code = self.rs.encode(&keys.vk.to_bits(&self.ots))?;
        Ok((BitString::concat(&[&x, sig.bits(), &vk_code]), y))
    }
}

pub struct C1Classifier<H> {
    base_h: H,
    ots: OtsParams,
    rs: Arc<ReedSolomon>,
    layout: C1Layout,
}

impl<H: Hypothesis> Hypothesis for C1Classifier<H> {
    fn instance_len(&self) -> usize {
        self.layout.total_len()
    }

    fn classify(&self, inst: &BitString) -> Label {
        let Ok(vk_bits) = self.rs.decode_at(inst, self.layout.vk_offset()) else {
            return Label::Star;
        };
        let vk = VerifyingKey::from_bits(&self.ots, &vk_bits).expect("code width checked at construction");
        let x = inst.slice(0, self.layout.d);
        if self
            .ots
            .verify_digest(&vk, self.ots.digest(&x), inst, self.layout.sig_offset())
        {
            self.base_h.classify(&x)
        } else {
            Label::Star
        }
    }
}

/// Bit offsets of a C3 (repeated-signature) instance: code of `x`, `n` signature slots, code of `vk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct C3Layout {
    pub code_len: usize,
    pub sig_len: usize,
}

impl C3Layout {
    pub fn slots(&self) -> usize {
        self.code_len
    }

    pub fn slot_offset(&self, j: usize) -> usize {
        self.code_len + j * self.sig_len
    }

    pub fn vk_offset(&self) -> usize {
        self.code_len + self.code_len * self.sig_len
    }

    pub fn total_len(&self) -> usize {
        2 * self.code_len + self.code_len * self.sig_len
    }
}

pub struct C3Problem<P> {
    base: P,
    ots: OtsParams,
    rs: Arc<ReedSolomon>,
}

impl<P: Problem> C3Problem<P> {
    /// `base` must have binary labels and instances exactly as wide as the code's data.
    pub fn new(base: P, ots: OtsParams, ecc: EccParams) -> Result<Self> {
        check_key_width(&ots, &ecc)?;
        if base.instance_len() != ecc.data_bits() || base.label_count() != 2 {
            return Err(Error::Config(format!(
                "C3 needs a binary base problem with {}-bit instances (got {} bits, {} labels)",
                ecc.data_bits(),
                base.instance_len(),
                base.label_count()
            )));
        }
        Ok(C3Problem {
            base,
            ots,
            rs: Arc::new(ReedSolomon::new(ecc)?),
        })
    }

    pub fn layout(&self) -> C3Layout {
        C3Layout {
            code_len: self.rs.params().code_bits(),
            sig_len: self.ots.sig_len(),
        }
    }

    pub fn ots(&self) -> &OtsParams {
        &self.ots
    }

    pub fn code(&self) -> &Arc<ReedSolomon> {
        &self.rs
    }

    pub fn classifier(&self) -> C3Classifier {
        C3Classifier {
            ots: self.ots,
            rs: Arc::clone(&self.rs),
            layout: self.layout(),
        }
    }
}

impl<P: Problem> Problem for C3Problem<P> {
    fn instance_len(&self) -> usize {
        self.layout().total_len()
    }

    fn label_count(&self) -> u32 {
        2
    }

    fn sample(&self, seed: u64) -> Result<(BitString, Label)> {
        let (x, y) = self.base.sample(seed)?;
        let keys = self.ots.kgen(seed);
        let sig = match y {
            Label::Class(1) => self.ots.sign(&keys.sk, &x).into_bits(),
            _ => {
                let digest = self.ots.digest(&x);
                let mut rng = rng_from(mix_seed(seed, STREAM_SIGNATURE));
                (0..MAX_REJECTION_ATTEMPTS)
                    .map(|_| BitString::random(self.ots.sig_len(), &mut rng))
                    .find(|s| !self.ots.verify_digest(&keys.vk, digest, s, 0))
                    .ok_or_else(|| {
                        Error::Sampler(format!(
                            "no invalid signature in {MAX_REJECTION_ATTEMPTS} draws; the signature scheme is degenerate"
                        ))
                    })?
            }
        };
        let layout = self.layout();
        let mut inst = BitString::zeros(layout.total_len());
        inst.write_slice(0, &self.rs.encode(&x)?);
        for j in 0..layout.slots() {
            inst.write_slice(layout.slot_offset(j), &sig);
        }
        inst.write_slice(layout.vk_offset(), &self.rs.encode(&keys.vk.to_bits(&self.ots))?);
        Ok((inst, y))
    }
}

pub struct C3Classifier {
    ots: OtsParams,
    rs: Arc<ReedSolomon>,
    layout: C3Layout,
}

impl Hypothesis for C3Classifier {
    fn instance_len(&self) -> usize {
        self.layout.total_len()
    }

    fn classify(&self, inst: &BitString) -> Label {
        let (Ok(x), Ok(vk_bits)) = (self.rs.decode_at(inst, 0), self.rs.decode_at(inst, self.layout.vk_offset())) else {
            return Label::Class(0);
        };
        let vk = VerifyingKey::from_bits(&self.ots, &vk_bits).expect("code width checked at construction");
        let digest = self.ots.digest(&x);
        let l = self.layout.sig_len;
        for j in 0..self.layout.slots() {
            let off = self.layout.slot_offset(j);
            // A slot equal to its predecessor has already been checked.
            if j > 0 && inst.range_eq(off - l, off, l) {
                continue;
            }
            if self.ots.verify_digest(&vk, digest, inst, off) {
                return Label::Class(1);
            }
        }
        Label::Class(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{majority_hypothesis, BalancedParity, MajorityNoise};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c1() -> C1Problem<MajorityNoise> {
        C1Problem::new(MajorityNoise::new(15, 0.05).unwrap(), OtsParams::default(), EccParams::default()).unwrap()
    }

    /// Small C3 problem: hlen = 4 gives a 32-bit key; 8-bit symbols, k_sym = 4.
    fn c3_small() -> C3Problem<BalancedParity> {
        let ots = OtsParams::new(4, 8, 2).unwrap();
        let ecc = EccParams {
            bits_per_symbol: 8,
            k_sym: 4,
            n_sym: 12,
        };
        C3Problem::new(BalancedParity::new(32).unwrap(), ots, ecc).unwrap()
    }

    #[test]
    fn layout_lengths() {
        let p = c1();
        assert_eq!(p.instance_len(), 15 + 256 + 10_240);
        let c3 = c3_small();
        assert_eq!(c3.instance_len(), 2 * 96 + 96 * 32);
    }

    #[test]
    fn mismatched_key_width_is_config_error() {
        let ecc = EccParams {
            bits_per_symbol: 8,
            k_sym: 4,
            n_sym: 12,
        };
        let r = C1Problem::new(MajorityNoise::new(5, 0.0).unwrap(), OtsParams::default(), ecc);
        assert!(matches!(r, Err(Error::Config(_))));
        let r = C3Problem::new(BalancedParity::new(31).unwrap(), OtsParams::new(4, 8, 2).unwrap(), ecc);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn honest_c1_samples_classify_as_base() {
        let p = c1();
        let h = p.classifier(majority_hypothesis(15));
        for seed in 0..300 {
            let (inst, y) = p.sample(seed).unwrap();
            let (x, y0) = p.base().sample(seed).unwrap();
            assert_eq!(y, y0);
            assert_eq!(inst.slice(0, 15), x);
            assert_eq!(h.classify(&inst), majority_hypothesis(15).classify(&x));
        }
    }

    #[test]
    fn c1_keys_are_fresh_per_sample() {
        let p = c1();
        let l = p.layout();
        let mut seen = std::collections::HashSet::new();
        for seed in 0..10_000 {
            let (inst, _) = p.sample(seed).unwrap();
            assert!(seen.insert(inst.slice(l.vk_offset(), 512)));
        }
    }

    #[test]
    fn flipping_a_signature_bit_trips_star() {
        let p = c1();
        let h = p.classifier(majority_hypothesis(15));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut stars = 0;
        let trials = 2_000;
        for seed in 0..trials {
            let (mut inst, _) = p.sample(seed).unwrap();
            inst.flip(15 + rng.gen_range(0..256));
            stars += h.classify(&inst).is_star() as usize;
        }
        // A flipped block still verifies only if it hits another 16-bit preimage.
        assert!(stars >= trials as usize - 2, "{stars}");
    }

    #[test]
    fn key_code_tolerates_t_max_flips() {
        let p = c1();
        let h = p.classifier(majority_hypothesis(15));
        let l = p.layout();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for seed in 0..100 {
            let (mut inst, _) = p.sample(seed).unwrap();
            let expected = h.classify(&inst);
            for i in rand::seq::index::sample(&mut rng, l.code_len, 304).iter() {
                inst.flip(l.vk_offset() + i);
            }
            assert_eq!(h.classify(&inst), expected);
        }
    }

    #[test]
    fn c3_honest_samples() {
        let p = c3_small();
        let h = p.classifier();
        let l = p.layout();
        for seed in 0..2_000 {
            let (inst, y) = p.sample(seed).unwrap();
            assert_eq!(h.classify(&inst), y);
            for j in 1..l.slots() {
                assert!(inst.range_eq(l.slot_offset(0), l.slot_offset(j), l.sig_len));
            }
        }
    }

    #[test]
    fn c3_forged_slot_flips_label() {
        let p = c3_small();
        let h = p.classifier();
        let l = p.layout();
        let mut done = 0;
        for seed in 0..200 {
            let (mut inst, y) = p.sample(seed).unwrap();
            if y != Label::Class(0) {
                continue;
            }
            let x = p.code().decode_at(&inst, 0).unwrap();
            let vk = VerifyingKey::from_bits(p.ots(), &p.code().decode_at(&inst, l.vk_offset()).unwrap()).unwrap();
            let forged = p.ots().forge_exhaustive(&vk, &x).unwrap();
            inst.write_slice(l.slot_offset(3), forged.signature.bits());
            assert_eq!(h.classify(&inst), Label::Class(1));
            done += 1;
        }
        assert!(done > 50);
    }

    #[test]
    fn c3_label_one_survives_corrupted_x_code() {
        let p = c3_small();
        let h = p.classifier();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..300 {
            let (mut inst, y) = p.sample(seed).unwrap();
            for i in rand::seq::index::sample(&mut rng, 96, 4).iter() {
                inst.flip(i);
            }
            assert_eq!(h.classify(&inst), y);
        }
    }

    #[test]
    fn c3_undecodable_reads_as_zero() {
        let p = c3_small();
        let h = p.classifier();
        let mut checked = 0;
        for seed in 0..100 {
            let (mut inst, y) = p.sample(seed).unwrap();
            if y != Label::Class(1) {
                continue;
            }
            // Five damaged symbols exceed the radius of 4; the decoder may still
            // land on another codeword, so only count genuine failures.
            for j in 0..5 {
                inst.set_bits(8 * j, 8, !inst.get_bits(8 * j, 8));
            }
            if p.code().decode_at(&inst, 0).is_err() {
                assert_eq!(h.classify(&inst), Label::Class(0));
                checked += 1;
            }
        }
        assert!(checked > 10);
    }
}
