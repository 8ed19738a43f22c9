//! Systematic Reed-Solomon codes over GF(2^8) and GF(2^16).
//!
//! A codeword is `n_sym` symbols `c_0 .. c_{n-1}` read as the polynomial
//! `C(x) = Σ c_j x^(n-1-j)`; the message fills `c_0 .. c_{k-1}` and the parity
//! is `M(x)·x^p mod g(x)` with `g(x) = Π_{i<p} (x - α^i)`, `p = n - k`.
//! Decoding is bounded-distance: Berlekamp-Massey, Chien search and Forney,
//! giving up (rather than guessing) beyond `t = ⌊p/2⌋` symbol errors.
//!
//! On bit strings, symbol `j` occupies bits `[j·m, (j+1)·m)`, LSB first, so a
//! single bit flip damages exactly one symbol and any `t` bit flips are
//! corrected.

use crate::bits::BitString;
use crate::crypto::gf::GaloisField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EccParams {
    pub bits_per_symbol: u32,
    pub k_sym: usize,
    pub n_sym: usize,
}

impl Default for EccParams {
    fn default() -> Self {
        EccParams {
            bits_per_symbol: 16,
            k_sym: 32,
            n_sym: 640,
        }
    }
}

impl EccParams {
    pub fn validate(&self) -> Result<()> {
        let field = GaloisField::for_symbol_bits(self.bits_per_symbol).ok_or_else(|| {
            Error::Config(format!(
                "ecc.bits_per_symbol must be 8 or 16 (got {})",
                self.bits_per_symbol
            ))
        })?;
        if self.k_sym == 0 || self.n_sym <= self.k_sym {
            return Err(Error::Config(format!(
                "ecc needs 0 < k_sym < n_sym (got k_sym={}, n_sym={})",
                self.k_sym, self.n_sym
            )));
        }
        if self.n_sym > field.order() {
            return Err(Error::Config(format!(
                "ecc.n_sym={} exceeds the Reed-Solomon length limit {} for {}-bit symbols",
                self.n_sym,
                field.order(),
                self.bits_per_symbol
            )));
        }
        Ok(())
    }

    /// Message length in bits.
    pub fn data_bits(&self) -> usize {
        self.bits_per_symbol as usize * self.k_sym
    }

    /// Codeword length `n` in bits.
    pub fn code_bits(&self) -> usize {
        self.bits_per_symbol as usize * self.n_sym
    }

    /// Guaranteed correctable symbol errors, hence bit flips.
    pub fn t_max(&self) -> usize {
        (self.n_sym - self.k_sym) / 2
    }

    /// Code rate `cr = k_sym / n_sym`.
    pub fn code_rate(&self) -> f64 {
        self.k_sym as f64 / self.n_sym as f64
    }

    /// Relative error rate `er = t_max / n`.
    pub fn error_rate(&self) -> f64 {
        self.t_max() as f64 / self.code_bits() as f64
    }
}

pub struct ReedSolomon {
    params: EccParams,
    field: &'static GaloisField,
    /// Non-leading coefficients of the monic generator, highest degree first.
    gen: Vec<u16>,
}

impl std::fmt::Debug for ReedSolomon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReedSolomon").field("params", &self.params).finish()
    }
}

impl ReedSolomon {
    pub fn new(params: EccParams) -> Result<Self> {
        params.validate()?;
        let field = GaloisField::for_symbol_bits(params.bits_per_symbol).expect("validated");
        let p = params.n_sym - params.k_sym;
        let mut g = vec![1u16];
        for i in 0..p {
            let root = field.alpha_pow(i);
            let mut next = g.clone();
            next.push(0);
            for j in 1..next.len() {
                next[j] ^= field.mul(root, g[j - 1]);
            }
            g = next;
        }
        Ok(ReedSolomon {
            params,
            field,
            gen: g[1..].to_vec(),
        })
    }

    pub fn params(&self) -> &EccParams {
        &self.params
    }

    fn parity_len(&self) -> usize {
        self.params.n_sym - self.params.k_sym
    }

    fn parity(&self, msg: &[u16]) -> Vec<u16> {
        let f = self.field;
        let p = self.parity_len();
        let mut reg = vec![0u16; p];
        for &m in msg {
            let fb = m ^ reg[0];
            reg.copy_within(1.., 0);
            reg[p - 1] = 0;
            if fb != 0 {
                let lf = f.log(fb) as usize;
                for (r, &g) in reg.iter_mut().zip(&self.gen) {
                    if g != 0 {
                        *r ^= f.mul_alpha(g, lf);
                    }
                }
            }
        }
        reg
    }

    pub fn encode_symbols(&self, msg: &[u16]) -> Vec<u16> {
        assert_eq!(msg.len(), self.params.k_sym);
        let mut out = msg.to_vec();
        out.extend(self.parity(msg));
        out
    }

    /// Corrects `code` in place; returns the number of symbols changed.
    pub fn decode_symbols(&self, code: &mut [u16]) -> Result<usize> {
        assert_eq!(code.len(), self.params.n_sym);
        let k = self.params.k_sym;
        if self.parity(&code[..k]) == code[k..] {
            return Ok(0);
        }
        let f = self.field;
        let n = self.params.n_sym;
        let p = self.parity_len();
        let t = self.params.t_max();
        let order = f.order();

        let synd: Vec<u16> = (0..p)
            .map(|i| code.iter().fold(0u16, |acc, &c| f.mul_alpha(acc, i) ^ c))
            .collect();

        let lambda = berlekamp_massey(f, &synd);
        let l = lambda.len() - 1;
        if l > t {
            return Err(Error::DecodeFailure);
        }

        let mut omega = vec![0u16; p];
        for (i, &s) in synd.iter().enumerate() {
            if s == 0 {
                continue;
            }
            for (j, &lj) in lambda.iter().enumerate() {
                if i + j < p {
                    omega[i + j] ^= f.mul(s, lj);
                }
            }
        }

        let eval = |poly: &[u16], xlog: usize| -> u16 {
            poly.iter().enumerate().fold(0u16, |acc, (kk, &c)| {
                if c == 0 {
                    acc
                } else {
                    acc ^ f.mul_alpha(c, (kk * xlog) % order)
                }
            })
        };
        let derivative: Vec<u16> = lambda
            .iter()
            .enumerate()
            .skip(1)
            .map(|(kk, &c)| if kk % 2 == 1 { c } else { 0 })
            .collect();

        let mut fixes = Vec::with_capacity(l);
        for j in 0..n {
            let e = n - 1 - j;
            let inv_log = (order - e % order) % order;
            if eval(&lambda, inv_log) != 0 {
                continue;
            }
            let denom = eval(&derivative, inv_log);
            if denom == 0 {
                return Err(Error::DecodeFailure);
            }
            let num = f.mul_alpha(eval(&omega, inv_log), e);
            fixes.push((j, f.div(num, denom)));
        }
        if fixes.len() != l {
            return Err(Error::DecodeFailure);
        }
        for &(j, y) in &fixes {
            code[j] ^= y;
        }
        if self.parity(&code[..k]) != code[k..] {
            return Err(Error::DecodeFailure);
        }
        Ok(l)
    }

    fn symbols_at(&self, bits: &BitString, start: usize, count: usize) -> Vec<u16> {
        let m = self.params.bits_per_symbol as usize;
        (0..count).map(|j| bits.get_bits(start + j * m, m) as u16).collect()
    }

    fn to_bits(&self, symbols: &[u16]) -> BitString {
        let m = self.params.bits_per_symbol as usize;
        let mut out = BitString::zeros(symbols.len() * m);
        for (j, &s) in symbols.iter().enumerate() {
            out.set_bits(j * m, m, s as u64);
        }
        out
    }

    pub fn encode(&self, message: &BitString) -> Result<BitString> {
        if message.len() != self.params.data_bits() {
            return Err(Error::Length {
                left: message.len(),
                right: self.params.data_bits(),
            });
        }
        let msg = self.symbols_at(message, 0, self.params.k_sym);
        Ok(self.to_bits(&self.encode_symbols(&msg)))
    }

    pub fn decode(&self, codeword: &BitString) -> Result<BitString> {
        if codeword.len() != self.params.code_bits() {
            return Err(Error::Length {
                left: codeword.len(),
                right: self.params.code_bits(),
            });
        }
        self.decode_at(codeword, 0)
    }

    /// Decodes the codeword stored at `bits[start .. start + n]`.
    pub fn decode_at(&self, bits: &BitString, start: usize) -> Result<BitString> {
        if start + self.params.code_bits() > bits.len() {
            return Err(Error::Length {
                left: bits.len() - start.min(bits.len()),
                right: self.params.code_bits(),
            });
        }
        let mut code = self.symbols_at(bits, start, self.params.n_sym);
        self.decode_symbols(&mut code)?;
        Ok(self.to_bits(&code[..self.params.k_sym]))
    }
}

/// Shortest LFSR generating `synd`; returns `Λ` in ascending order with `Λ_0 = 1`.
fn berlekamp_massey(f: &GaloisField, synd: &[u16]) -> Vec<u16> {
    let mut c = vec![1u16];
    let mut b = vec![1u16];
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut last = 1u16;
    for r in 0..synd.len() {
        let mut d = synd[r];
        for i in 1..=l.min(c.len() - 1) {
            d ^= f.mul(c[i], synd[r - i]);
        }
        if d == 0 {
            shift += 1;
            continue;
        }
        let coef = f.div(d, last);
        let mut next = c.clone();
        if next.len() < b.len() + shift {
            next.resize(b.len() + shift, 0);
        }
        for (i, &bi) in b.iter().enumerate() {
            next[i + shift] ^= f.mul(coef, bi);
        }
        if 2 * l <= r {
            l = r + 1 - l;
            b = c;
            last = d;
            shift = 1;
        } else {
            shift += 1;
        }
        c = next;
    }
    c.truncate(l + 1);
    c.resize(l + 1, 0);
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small8() -> ReedSolomon {
        ReedSolomon::new(EccParams {
            bits_per_symbol: 8,
            k_sym: 2,
            n_sym: 6,
        })
        .unwrap()
    }

    #[test]
    fn derived_quantities_of_default() {
        let p = EccParams::default();
        assert_eq!(p.code_bits(), 10_240);
        assert_eq!(p.data_bits(), 512);
        assert_eq!(p.t_max(), 304);
        assert_eq!(p.code_rate(), 0.05);
        assert_eq!(p.error_rate(), 304.0 / 10_240.0);
    }

    #[test]
    fn invalid_params_rejected() {
        for (b, k, n) in [(8, 2, 2), (8, 0, 4), (8, 32, 640), (12, 2, 6)] {
            let p = EccParams {
                bits_per_symbol: b,
                k_sym: k,
                n_sym: n,
            };
            assert!(matches!(p.validate(), Err(Error::Config(_))), "{p:?}");
        }
    }

    #[test]
    fn codewords_vanish_at_generator_roots() {
        let rs = small8();
        let f = GaloisField::gf256();
        let c = rs.encode_symbols(&[0x53, 0xCA]);
        for i in 0..4 {
            let v = c.iter().fold(0u16, |acc, &s| f.mul(acc, f.alpha_pow(i)) ^ s);
            assert_eq!(v, 0);
        }
    }

    #[test]
    fn linearity() {
        let rs = small8();
        let a = rs.encode_symbols(&[3, 200]);
        let b = rs.encode_symbols(&[77, 9]);
        let ab = rs.encode_symbols(&[3 ^ 77, 200 ^ 9]);
        let xor: Vec<u16> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        assert_eq!(xor, ab);
    }

    /// Nearest codeword by enumerating all 2^16 messages (independent oracle).
    fn nearest(rs: &ReedSolomon, word: &[u16]) -> Vec<(usize, Vec<u16>)> {
        let mut best: Vec<(usize, Vec<u16>)> = Vec::new();
        let mut best_d = usize::MAX;
        for a in 0..256u16 {
            for b in 0..256u16 {
                let c = rs.encode_symbols(&[a, b]);
                let d = c.iter().zip(word).filter(|(x, y)| x != y).count();
                if d < best_d {
                    best_d = d;
                    best.clear();
                }
                if d == best_d {
                    best.push((d, vec![a, b]));
                }
            }
        }
        best
    }

    #[test]
    fn decoder_matches_nearest_codeword_oracle() {
        let rs = small8();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let msg = [rng.gen::<u8>() as u16, rng.gen::<u8>() as u16];
            let mut word = rs.encode_symbols(&msg);
            let errs = rng.gen_range(0..=4);
            for j in rand::seq::index::sample(&mut rng, 6, errs).iter() {
                word[j] ^= rng.gen_range(1..256);
            }
            let oracle = nearest(&rs, &word);
            let mut w = word.clone();
            match rs.decode_symbols(&mut w) {
                Ok(_) => {
                    assert!(oracle[0].0 <= 2);
                    assert_eq!(oracle.len(), 1);
                    assert_eq!(&w[..2], &oracle[0].1[..]);
                }
                Err(e) => {
                    assert_eq!(e, Error::DecodeFailure);
                    assert!(oracle[0].0 > 2, "gave up within the radius");
                }
            }
        }
    }

    #[test]
    fn corrects_t_max_bit_flips_at_default() {
        let rs = ReedSolomon::new(EccParams::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let m = BitString::random(512, &mut rng);
            let mut c = rs.encode(&m).unwrap();
            for i in rand::seq::index::sample(&mut rng, c.len(), 304).iter() {
                c.flip(i);
            }
            assert_eq!(rs.decode(&c).unwrap(), m);
        }
    }

    #[test]
    fn too_many_symbol_errors_never_silently_accepted_as_original() {
        let rs = small8();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..500 {
            let m = BitString::random(16, &mut rng);
            let mut c = rs.encode(&m).unwrap();
            // Overwrite 3 whole symbols: beyond t_max = 2.
            for j in rand::seq::index::sample(&mut rng, 6, 3).iter() {
                c.set_bits(8 * j, 8, c.get_bits(8 * j, 8) ^ rng.gen_range(1..256));
            }
            if let Ok(d) = rs.decode(&c) {
                // Only possible by landing within distance 2 of another codeword.
                let re = rs.encode(&d).unwrap();
                let sym_dist = (0..6).filter(|&j| re.get_bits(8 * j, 8) != c.get_bits(8 * j, 8)).count();
                assert!(sym_dist <= 2);
            }
        }
    }

    #[test]
    fn length_errors() {
        let rs = small8();
        assert!(matches!(rs.encode(&BitString::zeros(15)), Err(Error::Length { .. })));
        assert!(matches!(rs.decode(&BitString::zeros(47)), Err(Error::Length { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn round_trip_under_t_max_flips_gf256(seed in any::<u64>(), k in 1usize..20, extra in 1usize..40) {
            let params = EccParams { bits_per_symbol: 8, k_sym: k, n_sym: k + extra };
            let rs = ReedSolomon::new(params).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = BitString::random(params.data_bits(), &mut rng);
            let mut c = rs.encode(&m).unwrap();
            let flips = rng.gen_range(0..=params.t_max());
            for i in rand::seq::index::sample(&mut rng, c.len(), flips).iter() {
                c.flip(i);
            }
            prop_assert_eq!(rs.decode(&c).unwrap(), m);
        }
    }
}
