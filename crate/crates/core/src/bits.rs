//! Fixed-length bit vectors with the Hamming metric.
//!
//! Bits are packed least-significant-first into `u64` words: bit `i` lives at
//! bit `i % 64` of word `i / 64`. Unused high bits of the last word are always
//! zero, so derived equality is bitwise equality.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

fn low_mask(count: usize) -> u64 {
    if count >= 64 {
        u64::MAX
    } else {
        (1u64 << count) - 1
    }
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            words: vec![0; word_count(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = BitString {
            words: vec![u64::MAX; word_count(len)],
            len,
        };
        b.clear_tail();
        b
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut b = Self::zeros(bits.len());
        for (i, &bit) in bits.iter().enumerate() {
            if bit {
                b.words[i / 64] |= 1 << (i % 64);
            }
        }
        b
    }

    /// The low `len` bits of `value`, bit 0 first. `len` must be at most 64.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64 takes at most 64 bits");
        let mut b = Self::zeros(len);
        if len > 0 {
            b.words[0] = value & low_mask(len);
        }
        b
    }

    /// Builds from packed words; bits beyond `len` are discarded.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(word_count(len), 0);
        let mut b = BitString { words, len };
        b.clear_tail();
        b
    }

    /// Parses a string of `0`/`1` characters; the first character is bit 0.
    pub fn parse_bits(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Format(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bools(&bits))
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let words = (0..word_count(len)).map(|_| rng.gen::<u64>()).collect();
        Self::from_words(words, len)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// Reads `count <= 64` bits starting at `start` as an integer (bit `start` lowest).
    pub fn get_bits(&self, start: usize, count: usize) -> u64 {
        assert!(count <= 64);
        assert!(start + count <= self.len, "bit range out of bounds");
        if count == 0 {
            return 0;
        }
        let w = start / 64;
        let off = start % 64;
        let mut v = self.words[w] >> off;
        if off != 0 && off + count > 64 {
            v |= self.words[w + 1] << (64 - off);
        }
        v & low_mask(count)
    }

    /// Writes the low `count <= 64` bits of `value` starting at `start`.
    pub fn set_bits(&mut self, start: usize, count: usize, value: u64) {
        assert!(count <= 64);
        assert!(start + count <= self.len, "bit range out of bounds");
        if count == 0 {
            return;
        }
        let value = value & low_mask(count);
        let w = start / 64;
        let off = start % 64;
        let mask = low_mask(count);
        self.words[w] = (self.words[w] & !(mask << off)) | (value << off);
        if off != 0 && off + count > 64 {
            let spill = off + count - 64;
            let hi_mask = low_mask(spill);
            self.words[w + 1] = (self.words[w + 1] & !hi_mask) | (value >> (64 - off));
        }
    }

    pub fn slice(&self, start: usize, len: usize) -> BitString {
        assert!(start + len <= self.len, "slice out of bounds");
        let mut out = BitString::zeros(len);
        let mut pos = 0;
        while pos < len {
            let take = (len - pos).min(64);
            out.set_bits(pos, take, self.get_bits(start + pos, take));
            pos += take;
        }
        out
    }

    /// Overwrites `[start, start + src.len())` with `src`.
    pub fn write_slice(&mut self, start: usize, src: &BitString) {
        assert!(start + src.len <= self.len, "write out of bounds");
        let mut pos = 0;
        while pos < src.len {
            let take = (src.len - pos).min(64);
            self.set_bits(start + pos, take, src.get_bits(pos, take));
            pos += take;
        }
    }

    pub fn concat(parts: &[&BitString]) -> BitString {
        let total = parts.iter().map(|p| p.len).sum();
        let mut out = BitString::zeros(total);
        let mut at = 0;
        for p in parts {
            out.write_slice(at, p);
            at += p.len;
        }
        out
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `|{i : a_i != b_i}|`; strings of different length have no distance.
    pub fn hamming_distance(&self, other: &BitString) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::Length {
                left: self.len,
                right: other.len,
            });
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Returns `true` when `[a, a+len)` and `[b, b+len)` hold the same bits.
    pub fn range_eq(&self, a: usize, b: usize, len: usize) -> bool {
        let mut pos = 0;
        while pos < len {
            let take = (len - pos).min(64);
            if self.get_bits(a + pos, take) != self.get_bits(b + pos, take) {
                return false;
            }
            pos += take;
        }
        true
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Lowercase hex of the bytes `b_j = bits[8j..8j+8]` (bit `8j` is the byte's LSB).
    pub fn to_hex(&self) -> String {
        let nbytes = self.len.div_ceil(8);
        let mut s = String::with_capacity(nbytes * 2);
        for j in 0..nbytes {
            let take = (self.len - 8 * j).min(8);
            let byte = self.get_bits(8 * j, take) as u8;
            s.push_str(&format!("{byte:02x}"));
        }
        s
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        if hex.len() != 2 * len.div_ceil(8) {
            return Err(Error::Format(format!(
                "hex string of {} chars does not encode {len} bits",
                hex.len()
            )));
        }
        let mut out = BitString::zeros(len);
        for j in 0..len.div_ceil(8) {
            let byte = u8::from_str_radix(&hex[2 * j..2 * j + 2], 16)
                .map_err(|e| Error::Format(format!("bad hex byte: {e}")))?;
            let take = (len - 8 * j).min(8);
            if take < 8 && (byte >> take) != 0 {
                return Err(Error::Format("hex has bits beyond the declared length".into()));
            }
            out.set_bits(8 * j, take, byte as u64);
        }
        Ok(out)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= low_mask(rem);
            }
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitString({self})")
        } else {
            write!(f, "BitString(len={}, ones={})", self.len, self.count_ones())
        }
    }
}
