//! Binary extension fields GF(2^m) via log/antilog tables.

use std::sync::OnceLock;

pub struct GaloisField {
    bits: u32,
    order: usize,
    exp: Vec<u16>,
    log: Vec<u32>,
}

impl GaloisField {
    /// Builds the tables for GF(2^bits) with the given reduction polynomial,
    /// which must be primitive (x generates the multiplicative group).
    pub fn new(bits: u32, poly: u32) -> Self {
        assert!((2..=16).contains(&bits));
        let size = 1usize << bits;
        let order = size - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u32; size];
        let mut x = 1u32;
        for i in 0..order {
            assert!(i == 0 || x != 1, "polynomial {poly:#x} is not primitive");
            exp[i] = x as u16;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & (size as u32) != 0 {
                x ^= poly;
            }
        }
        assert_eq!(x, 1, "polynomial {poly:#x} is not primitive");
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        GaloisField {
            bits,
            order,
            exp,
            log,
        }
    }

    /// GF(2^8) with x^8 + x^4 + x^3 + x^2 + 1.
    pub fn gf256() -> &'static GaloisField {
        static F: OnceLock<GaloisField> = OnceLock::new();
        F.get_or_init(|| GaloisField::new(8, 0x11D))
    }

    /// GF(2^16) with x^16 + x^12 + x^3 + x + 1.
    pub fn gf65536() -> &'static GaloisField {
        static F: OnceLock<GaloisField> = OnceLock::new();
        F.get_or_init(|| GaloisField::new(16, 0x1100B))
    }

    pub fn for_symbol_bits(bits: u32) -> Option<&'static GaloisField> {
        match bits {
            8 => Some(Self::gf256()),
            16 => Some(Self::gf65536()),
            _ => None,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Size of the multiplicative group, `2^m - 1`.
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    #[inline]
    pub fn div(&self, a: u16, b: u16) -> u16 {
        assert!(b != 0, "division by zero in GF(2^{})", self.bits);
        if a == 0 {
            0
        } else {
            let o = self.order as u32;
            self.exp[((self.log[a as usize] + o - self.log[b as usize]) % o) as usize]
        }
    }

    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        self.div(1, a)
    }

    /// `α^e` for any `e` (reduced mod the group order).
    #[inline]
    pub fn alpha_pow(&self, e: usize) -> u16 {
        self.exp[e % self.order]
    }

    /// Discrete log of a non-zero element.
    #[inline]
    pub fn log(&self, a: u16) -> u32 {
        debug_assert!(a != 0);
        self.log[a as usize]
    }

    /// `a · α^e` for `e < order`.
    #[inline]
    pub fn mul_alpha(&self, a: u16, e: usize) -> u16 {
        if a == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + e]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Carry-less multiplication reduced by `poly`, independent of the tables.
    fn slow_mul(bits: u32, poly: u32, a: u16, b: u16) -> u16 {
        let (mut a, mut b, mut r) = (a as u32, b as u32, 0u32);
        while b != 0 {
            if b & 1 == 1 {
                r ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & (1 << bits) != 0 {
                a ^= poly;
            }
        }
        r as u16
    }

    #[test]
    fn both_polynomials_are_primitive() {
        // `new` asserts that α has full multiplicative order.
        assert_eq!(GaloisField::gf256().order(), 255);
        assert_eq!(GaloisField::gf65536().order(), 65_535);
    }

    #[test]
    #[should_panic(expected = "not primitive")]
    fn non_primitive_polynomial_rejected() {
        // x^8 + x^4 + x^3 + x + 1 (the AES polynomial) is irreducible but x has order 51.
        GaloisField::new(8, 0x11B);
    }

    #[test]
    fn gf256_tables_match_carryless_arithmetic() {
        let f = GaloisField::gf256();
        for a in 0..=255u16 {
            for b in 0..=255u16 {
                assert_eq!(f.mul(a, b), slow_mul(8, 0x11D, a, b));
                if b != 0 {
                    assert_eq!(f.mul(f.div(a, b), b), a);
                }
            }
        }
    }

    #[test]
    fn gf65536_spot_checks() {
        let f = GaloisField::gf65536();
        let mut a = 1u16;
        for i in 0..5_000u32 {
            let b = (i.wrapping_mul(40_503) & 0xFFFF) as u16;
            assert_eq!(f.mul(a, b), slow_mul(16, 0x1100B, a, b));
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
            a = a.wrapping_mul(3).wrapping_add(7);
        }
    }
}
