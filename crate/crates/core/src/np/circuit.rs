//! Boolean circuits over AND/OR/NOT/XOR and explicit circuits for the shipped
//! hypotheses.
//!
//! Wires `0..inputs` are the inputs; gate `g` drives wire `inputs + g` and may
//! only read lower-numbered wires, so the gate list is a topological order.

use crate::crypto::gf::GaloisField;
use crate::crypto::hash::HASH_IV;
use crate::crypto::ots::OtsParams;
use crate::crypto::rs::{EccParams, ReedSolomon};
use crate::error::{Error, Result};
use crate::seed::GOLDEN_GAMMA;
use crate::BitString;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    And(usize, usize),
    Or(usize, usize),
    Not(usize),
    Xor(usize, usize),
}

impl Gate {
    fn operands(self) -> (usize, Option<usize>) {
        match self {
            Gate::And(a, b) | Gate::Or(a, b) | Gate::Xor(a, b) => (a, Some(b)),
            Gate::Not(a) => (a, None),
        }
    }

    fn remap(self, f: impl Fn(usize) -> usize) -> Gate {
        match self {
            Gate::And(a, b) => Gate::And(f(a), f(b)),
            Gate::Or(a, b) => Gate::Or(f(a), f(b)),
            Gate::Xor(a, b) => Gate::Xor(f(a), f(b)),
            Gate::Not(a) => Gate::Not(f(a)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolCircuit {
    inputs: usize,
    gates: Vec<Gate>,
    outputs: Vec<usize>,
}

impl BoolCircuit {
    pub fn new(inputs: usize, gates: Vec<Gate>, outputs: Vec<usize>) -> Result<Self> {
        for (g, gate) in gates.iter().enumerate() {
            let (a, b) = gate.operands();
            if a >= inputs + g || b.is_some_and(|b| b >= inputs + g) {
                return Err(Error::Format(format!("gate {g} reads a wire that is not yet defined")));
            }
        }
        if let Some(&o) = outputs.iter().find(|&&o| o >= inputs + gates.len()) {
            return Err(Error::Format(format!("output wire {o} does not exist")));
        }
        Ok(BoolCircuit { inputs, gates, outputs })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn wire_count(&self) -> usize {
        self.inputs + self.gates.len()
    }

    /// Values of every wire.
    pub fn eval_wires(&self, input: &[bool]) -> Vec<bool> {
        assert_eq!(input.len(), self.inputs);
        let mut w = input.to_vec();
        w.reserve(self.gates.len());
        for gate in &self.gates {
            let v = match *gate {
                Gate::And(a, b) => w[a] && w[b],
                Gate::Or(a, b) => w[a] || w[b],
                Gate::Xor(a, b) => w[a] ^ w[b],
                Gate::Not(a) => !w[a],
            };
            w.push(v);
        }
        w
    }

    pub fn eval(&self, input: &[bool]) -> Vec<bool> {
        let w = self.eval_wires(input);
        self.outputs.iter().map(|&o| w[o]).collect()
    }

    pub fn eval_bits(&self, x: &BitString) -> Vec<bool> {
        self.eval(&x.iter().collect::<Vec<_>>())
    }
}

/// A builder-side signal: a known constant or a wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sig {
    Const(bool),
    Wire(usize),
}

pub const FALSE: Sig = Sig::Const(false);
pub const TRUE: Sig = Sig::Const(true);

/// Builds circuits with constant folding; unused gates are pruned on `finish`.
pub struct CircuitBuilder {
    inputs: usize,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new(inputs: usize) -> Self {
        CircuitBuilder {
            inputs,
            gates: Vec::new(),
        }
    }

    pub fn input(&self, i: usize) -> Sig {
        assert!(i < self.inputs);
        Sig::Wire(i)
    }

    pub fn inputs(&self, range: std::ops::Range<usize>) -> Vec<Sig> {
        range.map(|i| self.input(i)).collect()
    }

    fn push(&mut self, g: Gate) -> Sig {
        self.gates.push(g);
        Sig::Wire(self.inputs + self.gates.len() - 1)
    }

    pub fn not(&mut self, a: Sig) -> Sig {
        match a {
            Sig::Const(v) => Sig::Const(!v),
            Sig::Wire(w) => match w.checked_sub(self.inputs).map(|g| self.gates[g]) {
                Some(Gate::Not(inner)) => Sig::Wire(inner),
                _ => self.push(Gate::Not(w)),
            },
        }
    }

    pub fn and(&mut self, a: Sig, b: Sig) -> Sig {
        match (a, b) {
            (Sig::Const(false), _) | (_, Sig::Const(false)) => FALSE,
            (Sig::Const(true), x) | (x, Sig::Const(true)) => x,
            (Sig::Wire(x), Sig::Wire(y)) if x == y => a,
            (Sig::Wire(x), Sig::Wire(y)) => self.push(Gate::And(x, y)),
        }
    }

    pub fn or(&mut self, a: Sig, b: Sig) -> Sig {
        match (a, b) {
            (Sig::Const(true), _) | (_, Sig::Const(true)) => TRUE,
            (Sig::Const(false), x) | (x, Sig::Const(false)) => x,
            (Sig::Wire(x), Sig::Wire(y)) if x == y => a,
            (Sig::Wire(x), Sig::Wire(y)) => self.push(Gate::Or(x, y)),
        }
    }

    pub fn xor(&mut self, a: Sig, b: Sig) -> Sig {
        match (a, b) {
            (Sig::Const(false), x) | (x, Sig::Const(false)) => x,
            (Sig::Const(true), x) | (x, Sig::Const(true)) => self.not(x),
            (Sig::Wire(x), Sig::Wire(y)) if x == y => FALSE,
            (Sig::Wire(x), Sig::Wire(y)) => self.push(Gate::Xor(x, y)),
        }
    }

    pub fn xnor(&mut self, a: Sig, b: Sig) -> Sig {
        let x = self.xor(a, b);
        self.not(x)
    }

    /// `if s { a } else { b }`.
    pub fn mux(&mut self, s: Sig, a: Sig, b: Sig) -> Sig {
        let d = self.xor(a, b);
        let sd = self.and(s, d);
        self.xor(b, sd)
    }

    pub fn and_all(&mut self, xs: &[Sig]) -> Sig {
        xs.iter().fold(TRUE, |acc, &x| self.and(acc, x))
    }

    pub fn or_all(&mut self, xs: &[Sig]) -> Sig {
        xs.iter().fold(FALSE, |acc, &x| self.or(acc, x))
    }

    /// Ripple-carry sum of two little-endian numbers, one bit wider than the longer.
    pub fn add(&mut self, a: &[Sig], b: &[Sig]) -> Vec<Sig> {
        let n = a.len().max(b.len());
        let mut out = Vec::with_capacity(n + 1);
        let mut carry = FALSE;
        for i in 0..n {
            let x = a.get(i).copied().unwrap_or(FALSE);
            let y = b.get(i).copied().unwrap_or(FALSE);
            let (s, c) = self.full_add(x, y, carry);
            out.push(s);
            carry = c;
        }
        out.push(carry);
        out
    }

    fn full_add(&mut self, x: Sig, y: Sig, c: Sig) -> (Sig, Sig) {
        let xy = self.xor(x, y);
        let s = self.xor(xy, c);
        let g = self.and(x, y);
        let p = self.and(xy, c);
        (s, self.or(g, p))
    }

    /// `(a + b) mod 2^w` for equal-width words.
    pub fn add_mod(&mut self, a: &[Sig], b: &[Sig]) -> Vec<Sig> {
        let mut s = self.add(a, b);
        s.truncate(a.len());
        s
    }

    /// Number of true signals as a little-endian binary number (adder tree).
    pub fn popcount(&mut self, xs: &[Sig]) -> Vec<Sig> {
        if xs.is_empty() {
            return vec![FALSE];
        }
        let mut level: Vec<Vec<Sig>> = xs.iter().map(|&x| vec![x]).collect();
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            for pair in level.chunks(2) {
                next.push(if pair.len() == 2 {
                    self.add(&pair[0], &pair[1])
                } else {
                    pair[0].clone()
                });
            }
            level = next;
        }
        level.pop().unwrap()
    }

    /// `v >= c` for a little-endian number `v`, decided from the low bit up.
    pub fn ge_const(&mut self, v: &[Sig], c: u64) -> Sig {
        if v.len() < 64 && c >> v.len() != 0 {
            return FALSE;
        }
        let mut ge = TRUE;
        for (i, &bit) in v.iter().enumerate() {
            ge = if i < 64 && (c >> i) & 1 == 1 {
                self.and(bit, ge)
            } else {
                self.or(bit, ge)
            };
        }
        ge
    }

    pub fn eq_const(&mut self, v: &[Sig], c: u64) -> Sig {
        let bits: Vec<Sig> = v
            .iter()
            .enumerate()
            .map(|(i, &b)| if (c >> i) & 1 == 1 { b } else { self.not(b) })
            .collect();
        self.and_all(&bits)
    }

    pub fn eq(&mut self, a: &[Sig], b: &[Sig]) -> Sig {
        assert_eq!(a.len(), b.len());
        let bits: Vec<Sig> = a.iter().zip(b).map(|(&x, &y)| self.xnor(x, y)).collect();
        self.and_all(&bits)
    }

    /// Copies `c` into this builder with its inputs driven by `inputs`.
    pub fn embed(&mut self, c: &BoolCircuit, inputs: &[Sig]) -> Vec<Sig> {
        assert_eq!(inputs.len(), c.inputs());
        let mut wires: Vec<Sig> = inputs.to_vec();
        for gate in c.gates() {
            let v = match *gate {
                Gate::And(a, b) => self.and(wires[a], wires[b]),
                Gate::Or(a, b) => self.or(wires[a], wires[b]),
                Gate::Xor(a, b) => self.xor(wires[a], wires[b]),
                Gate::Not(a) => self.not(wires[a]),
            };
            wires.push(v);
        }
        c.outputs().iter().map(|&o| wires[o]).collect()
    }

    /// Materialises constant outputs (from input 0), drops gates no output
    /// depends on, and renumbers.
    pub fn finish(mut self, outputs: &[Sig]) -> BoolCircuit {
        let wires: Vec<usize> = outputs
            .iter()
            .map(|&s| match s {
                Sig::Wire(w) => w,
                Sig::Const(v) => {
                    assert!(self.inputs > 0, "constant output needs at least one input");
                    let zero = self.push(Gate::Xor(0, 0));
                    match (v, zero) {
                        (false, Sig::Wire(w)) => w,
                        (true, Sig::Wire(w)) => match self.push(Gate::Not(w)) {
                            Sig::Wire(t) => t,
                            Sig::Const(_) => unreachable!(),
                        },
                        _ => unreachable!(),
                    }
                }
            })
            .collect();
        let n = self.inputs;
        let mut live = vec![false; n + self.gates.len()];
        for &w in &wires {
            live[w] = true;
        }
        for g in (0..self.gates.len()).rev() {
            if live[n + g] {
                let (a, b) = self.gates[g].operands();
                live[a] = true;
                if let Some(b) = b {
                    live[b] = true;
                }
            }
        }
        let mut new_index = vec![usize::MAX; live.len()];
        for (i, slot) in new_index.iter_mut().enumerate().take(n) {
            *slot = i;
        }
        let mut gates = Vec::new();
        for g in 0..self.gates.len() {
            if live[n + g] {
                gates.push(self.gates[g].remap(|w| new_index[w]));
                new_index[n + g] = n + gates.len() - 1;
            }
        }
        let outputs = wires.iter().map(|&w| new_index[w]).collect();
        BoolCircuit::new(n, gates, outputs).expect("builder output is well formed")
    }
}

/// `MAJ` on `d` inputs: popcount compared against `(d + 1) / 2`.
pub fn circuit_of_majority(d: usize) -> BoolCircuit {
    assert!(d >= 1);
    let mut b = CircuitBuilder::new(d);
    let xs = b.inputs(0..d);
    let count = b.popcount(&xs);
    let out = b.ge_const(&count, (d as u64).div_ceil(2));
    b.finish(&[out])
}

/// Parity of `n` inputs as an XOR chain.
pub fn circuit_of_parity(n: usize) -> BoolCircuit {
    let mut b = CircuitBuilder::new(n);
    let xs = b.inputs(0..n);
    let out = xs.iter().fold(FALSE, |acc, &x| b.xor(acc, x));
    b.finish(&[out])
}

fn const_word(v: u64) -> Vec<Sig> {
    (0..64).map(|i| Sig::Const((v >> i) & 1 == 1)).collect()
}

fn xor_words(b: &mut CircuitBuilder, x: &[Sig], y: &[Sig]) -> Vec<Sig> {
    x.iter().zip(y).map(|(&p, &q)| b.xor(p, q)).collect()
}

fn shr(x: &[Sig], k: usize) -> Vec<Sig> {
    (0..64).map(|i| if i + k < 64 { x[i + k] } else { FALSE }).collect()
}

fn mul_const(b: &mut CircuitBuilder, x: &[Sig], c: u64) -> Vec<Sig> {
    let mut acc = const_word(0);
    for k in (0..64).filter(|k| (c >> k) & 1 == 1) {
        let shifted: Vec<Sig> = (0..64).map(|i| if i >= k { x[i - k] } else { FALSE }).collect();
        acc = b.add_mod(&acc, &shifted);
    }
    acc
}

fn mix_round(b: &mut CircuitBuilder, z: Vec<Sig>) -> Vec<Sig> {
    let s = shr(&z, 30);
    let z = xor_words(b, &z, &s);
    let z = mul_const(b, &z, 0xBF58_476D_1CE4_E5B9);
    let s = shr(&z, 27);
    let z = xor_words(b, &z, &s);
    let z = mul_const(b, &z, 0x94D0_49BB_1331_11EB);
    let s = shr(&z, 31);
    xor_words(b, &z, &s)
}

/// The single-word toy hash of `input` (at most 64 bits), truncated to `out_bits`.
pub fn hash_word(b: &mut CircuitBuilder, input: &[Sig], out_bits: usize, rounds: u32) -> Vec<Sig> {
    assert!(input.len() <= 64 && out_bits <= 64);
    let init = HASH_IV ^ (input.len() as u64).wrapping_mul(GOLDEN_GAMMA);
    let mut z: Vec<Sig> = const_word(init);
    for (i, &s) in input.iter().enumerate() {
        z[i] = b.xor(z[i], s);
    }
    for _ in 0..rounds {
        z = mix_round(b, z);
    }
    z.truncate(out_bits);
    z
}

/// Largest number of messages the enumerating decoder circuit will expand.
pub const DECODER_MESSAGE_CAP: usize = 1 << 12;

/// Bounded-distance decoding by enumeration: for every message, "the received
/// word is within `t_max` symbols of its codeword"; returns `(ok, message bits)`.
fn decode_by_enumeration(b: &mut CircuitBuilder, rs: &ReedSolomon, word: &[Sig]) -> (Sig, Vec<Sig>) {
    let p = rs.params();
    let m = p.bits_per_symbol as usize;
    let data_bits = p.data_bits();
    let mut ok = FALSE;
    let mut msg = vec![FALSE; data_bits];
    for v in 0..(1u64 << data_bits) {
        let syms: Vec<u16> = (0..p.k_sym).map(|j| ((v >> (j * m)) & ((1 << m) - 1)) as u16).collect();
        let code = rs.encode_symbols(&syms);
        let agree: Vec<Sig> = code
            .iter()
            .enumerate()
            .map(|(j, &c)| b.eq_const(&word[j * m..(j + 1) * m], c as u64))
            .collect();
        let count = b.popcount(&agree);
        let near = b.ge_const(&count, (p.n_sym - p.t_max()) as u64);
        ok = b.or(ok, near);
        for (i, bit) in msg.iter_mut().enumerate() {
            if (v >> i) & 1 == 1 {
                *bit = b.or(*bit, near);
            }
        }
    }
    (ok, msg)
}

/// The C1 classifier as a circuit with outputs `(label, is_star)`,
/// for tiny parameters only. `base` must have one output.
pub fn circuit_of_classifier_c1(base: &BoolCircuit, ots: &OtsParams, ecc: &EccParams) -> Result<BoolCircuit> {
    ots.validate()?;
    ecc.validate()?;
    let field_ok = GaloisField::for_symbol_bits(ecc.bits_per_symbol).is_some();
    if !field_ok || ecc.data_bits() != ots.vk_len() {
        return Err(Error::Config("code width must equal the verification-key length".into()));
    }
    if 1usize.checked_shl(ecc.data_bits() as u32).is_none_or(|n| n > DECODER_MESSAGE_CAP) {
        return Err(Error::Config(format!(
            "circuit emission enumerates 2^{} messages; the cap is {DECODER_MESSAGE_CAP}",
            ecc.data_bits()
        )));
    }
    if base.outputs().len() != 1 || base.inputs() > 64 {
        return Err(Error::Config("base circuit needs one output and at most 64 inputs".into()));
    }
    let rs = ReedSolomon::new(*ecc)?;
    let d = base.inputs();
    let ell = ots.sig_len();
    let n = ecc.code_bits();
    let mut b = CircuitBuilder::new(d + ell + n);
    let x = b.inputs(0..d);
    let sig = b.inputs(d..d + ell);
    let code = b.inputs(d + ell..d + ell + n);

    let (decoded, vk) = decode_by_enumeration(&mut b, &rs, &code);
    let digest = hash_word(&mut b, &x, ots.hlen, ots.hash_rounds);
    let mut valid = decoded;
    for i in 0..ots.hlen {
        let block = &sig[i * ots.slen..(i + 1) * ots.slen];
        let h = hash_word(&mut b, block, ots.hlen, ots.hash_rounds);
        let e0 = &vk[(2 * i) * ots.hlen..(2 * i + 1) * ots.hlen];
        let e1 = &vk[(2 * i + 1) * ots.hlen..(2 * i + 2) * ots.hlen];
        let expected: Vec<Sig> = (0..ots.hlen).map(|k| b.mux(digest[i], e1[k], e0[k])).collect();
        let ok = b.eq(&h, &expected);
        valid = b.and(valid, ok);
    }
    let label = b.embed(base, &x)[0];
    let label = b.and(label, valid);
    let star = b.not(valid);
    Ok(b.finish(&[label, star]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::C1Problem;
    use crate::crypto::hash::toy_hash_u64;
    use crate::game::{Hypothesis, Label, Problem};
    use crate::problems::{majority, majority_hypothesis, MajorityNoise};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bits(v: u64, n: usize) -> Vec<bool> {
        (0..n).map(|i| (v >> i) & 1 == 1).collect()
    }

    #[test]
    fn single_not_gate() {
        let c = BoolCircuit::new(1, vec![Gate::Not(0)], vec![1]).unwrap();
        assert_eq!(c.eval(&[false]), vec![true]);
        assert_eq!(c.eval(&[true]), vec![false]);
    }

    #[test]
    fn rejects_forward_references() {
        assert!(BoolCircuit::new(1, vec![Gate::And(0, 1)], vec![1]).is_err());
        assert!(BoolCircuit::new(1, vec![Gate::Not(0)], vec![2]).is_err());
    }

    #[test]
    fn majority_d7_truth_table() {
        let c = circuit_of_majority(7);
        let h = majority_hypothesis(7);
        for v in 0..128 {
            let x = BitString::from_u64(v, 7);
            assert_eq!(Label::bit(c.eval_bits(&x)[0]), h.classify(&x));
        }
    }

    #[test]
    fn majority_circuits_up_to_15_inputs() {
        for d in (1..=15).step_by(2) {
            let c = circuit_of_majority(d);
            for v in 0..(1u64 << d) {
                assert_eq!(c.eval(&bits(v, d))[0], 2 * v.count_ones() as usize > d);
            }
        }
    }

    #[test]
    fn xor_chain_is_parity() {
        let c = circuit_of_parity(8);
        for v in 0..256u64 {
            assert_eq!(c.eval(&bits(v, 8))[0], v.count_ones() % 2 == 1);
        }
    }

    #[test]
    fn arithmetic_helpers() {
        let mut b = CircuitBuilder::new(8);
        let x = b.inputs(0..4);
        let y = b.inputs(4..8);
        let s = b.add(&x, &y);
        let ge = b.ge_const(&x, 5);
        let eq = b.eq_const(&y, 9);
        let mut outs = s.clone();
        outs.extend([ge, eq]);
        let c = b.finish(&outs);
        for v in 0..256u64 {
            let out = c.eval(&bits(v, 8));
            let (xv, yv) = (v & 15, v >> 4);
            let sum: u64 = (0..5).map(|i| (out[i] as u64) << i).sum();
            assert_eq!(sum, xv + yv);
            assert_eq!(out[5], xv >= 5);
            assert_eq!(out[6], yv == 9);
        }
    }

    #[test]
    fn constant_outputs_materialise() {
        let b = CircuitBuilder::new(2);
        let c = b.finish(&[TRUE, FALSE]);
        for v in 0..4 {
            assert_eq!(c.eval(&bits(v, 2)), vec![true, false]);
        }
    }

    #[test]
    fn hash_circuit_matches_toy_hash() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (len, out, rounds) in [(3usize, 8usize, 1u32), (10, 16, 2), (1, 4, 2)] {
            let mut b = CircuitBuilder::new(len);
            let xs = b.inputs(0..len);
            let h = hash_word(&mut b, &xs, out, rounds);
            let c = b.finish(&h);
            for _ in 0..100 {
                let v = rng.gen::<u64>() & ((1 << len) - 1);
                let got: u64 = c.eval(&bits(v, len)).iter().enumerate().map(|(i, &o)| (o as u64) << i).sum();
                assert_eq!(got, toy_hash_u64(v, len, out, rounds));
            }
        }
    }

    fn tiny() -> (OtsParams, EccParams) {
        (
            OtsParams::new(2, 3, 1).unwrap(),
            EccParams {
                bits_per_symbol: 8,
                k_sym: 1,
                n_sym: 3,
            },
        )
    }

    #[test]
    fn c1_circuit_matches_classifier() {
        let (ots, ecc) = tiny();
        let base = MajorityNoise::new(3, 0.2).unwrap();
        let p = C1Problem::new(base, ots, ecc).unwrap();
        let h = p.classifier(majority_hypothesis(3));
        let c = circuit_of_classifier_c1(&circuit_of_majority(3), &ots, &ecc).unwrap();
        assert_eq!(c.inputs(), p.instance_len());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut stars = 0;
        for seed in 0..3000 {
            let (mut inst, _) = p.sample(seed).unwrap();
            // Honest, lightly and heavily perturbed instances.
            let flips = [0, 1, 2, 9][seed as usize % 4];
            for _ in 0..flips {
                inst.flip(rng.gen_range(0..inst.len()));
            }
            let out = c.eval_bits(&inst);
            let want = h.classify(&inst);
            stars += want.is_star() as usize;
            if want.is_star() {
                assert!(out[1], "seed {seed}");
            } else {
                assert!(!out[1], "seed {seed}");
                assert_eq!(Label::bit(out[0]), want);
                assert_eq!(out[0], majority(&inst.slice(0, 3)));
            }
        }
        assert!(stars > 300 && stars < 2700);
    }

    #[test]
    fn c1_circuit_caps() {
        let (ots, _) = tiny();
        let big = EccParams {
            bits_per_symbol: 16,
            k_sym: 1,
            n_sym: 3,
        };
        assert!(circuit_of_classifier_c1(&circuit_of_majority(3), &OtsParams::new(2, 3, 1).unwrap(), &big).is_err());
        let (_, ecc) = tiny();
        assert!(circuit_of_classifier_c1(&circuit_of_parity(70), &ots, &ecc).is_err());
    }
}
