//! Arithmetic in GF(2^8).
//!
//! Elements are bytes; bit `i` is the coefficient of `x^i`. Addition is XOR
//! and multiplication goes through log/antilog tables built at compile time
//! from the primitive polynomial [`PRIMITIVE_POLY`] with generator
//! [`GENERATOR`].

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Sub};

use crate::error::{Error, Result};

/// x^8 + x^4 + x^3 + x^2 + 1.
pub const PRIMITIVE_POLY: u16 = 0x11D;

/// Primitive element alpha = x.
pub const GENERATOR: u8 = 0x02;

/// Order of the multiplicative group.
pub const GROUP_ORDER: usize = 255;

/// Doubled so that `EXP[log a + log b]` needs no reduction.
static EXP: [u8; 512] = build_exp();
/// `LOG[0]` is a sentinel and never read; zero operands are guarded.
static LOG: [u8; 256] = build_log();

const fn build_exp() -> [u8; 512] {
    let mut table = [0u8; 512];
    let mut val: u16 = 1;
    let mut i = 0;
    while i < GROUP_ORDER {
        table[i] = val as u8;
        table[i + GROUP_ORDER] = val as u8;
        val <<= 1;
        if val & 0x100 != 0 {
            val ^= PRIMITIVE_POLY;
        }
        i += 1;
    }
    table[510] = table[0];
    table[511] = table[1];
    table
}

const fn build_log() -> [u8; 256] {
    let exp = build_exp();
    let mut table = [0u8; 256];
    let mut i = 0;
    while i < GROUP_ORDER {
        table[exp[i] as usize] = i as u8;
        i += 1;
    }
    table
}

/// One field symbol.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
#[repr(transparent)]
pub struct Gf(pub u8);

impl Gf {
    pub const ZERO: Gf = Gf(0);
    pub const ONE: Gf = Gf(1);
    pub const ALPHA: Gf = Gf(GENERATOR);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// `alpha^e` for any integer exponent.
    #[inline]
    pub fn exp(e: i64) -> Gf {
        Gf(EXP[e.rem_euclid(GROUP_ORDER as i64) as usize])
    }

    /// Discrete logarithm base alpha, `None` for zero.
    #[inline]
    pub fn log(self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(LOG[self.0 as usize] as usize)
        }
    }

    pub fn inv(self) -> Result<Gf> {
        gf_inv(self)
    }

    pub fn pow(self, e: i64) -> Result<Gf> {
        gf_pow(self, e)
    }
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf({:#04x})", self.0)
    }
}

impl From<u8> for Gf {
    fn from(v: u8) -> Self {
        Gf(v)
    }
}

impl From<Gf> for u8 {
    fn from(v: Gf) -> Self {
        v.0
    }
}

#[inline]
pub fn gf_add(a: Gf, b: Gf) -> Gf {
    Gf(a.0 ^ b.0)
}

#[inline]
pub fn gf_mul(a: Gf, b: Gf) -> Gf {
    if a.is_zero() || b.is_zero() {
        return Gf::ZERO;
    }
    Gf(EXP[LOG[a.0 as usize] as usize + LOG[b.0 as usize] as usize])
}

pub fn gf_inv(a: Gf) -> Result<Gf> {
    match a.log() {
        None => Err(Error::ZeroInverse),
        Some(l) => Ok(Gf(EXP[GROUP_ORDER - l])),
    }
}

/// `a^e` with exponent arithmetic mod 255. `0^e` is 0 for `e > 0`.
pub fn gf_pow(a: Gf, e: i64) -> Result<Gf> {
    match a.log() {
        None if e > 0 => Ok(Gf::ZERO),
        None => Err(Error::ZeroPower(e)),
        Some(l) => {
            let k = (l as i64 * e.rem_euclid(GROUP_ORDER as i64)) % GROUP_ORDER as i64;
            Ok(Gf(EXP[k as usize]))
        }
    }
}

/// Horner evaluation; `coeffs[0]` is the highest-degree coefficient.
pub fn poly_eval(coeffs: &[Gf], x: Gf) -> Gf {
    coeffs.iter().fold(Gf::ZERO, |acc, &c| gf_add(gf_mul(acc, x), c))
}

/// Evaluation of a polynomial stored lowest degree first.
pub(crate) fn poly_eval_ascending(coeffs: &[Gf], x: Gf) -> Gf {
    coeffs.iter().rev().fold(Gf::ZERO, |acc, &c| gf_add(gf_mul(acc, x), c))
}

impl Add for Gf {
    type Output = Gf;
    #[inline]
    fn add(self, rhs: Gf) -> Gf {
        gf_add(self, rhs)
    }
}

impl Sub for Gf {
    type Output = Gf;
    #[inline]
    fn sub(self, rhs: Gf) -> Gf {
        gf_add(self, rhs)
    }
}

impl AddAssign for Gf {
    #[inline]
    fn add_assign(&mut self, rhs: Gf) {
        *self = gf_add(*self, rhs);
    }
}

impl Mul for Gf {
    type Output = Gf;
    #[inline]
    fn mul(self, rhs: Gf) -> Gf {
        gf_mul(self, rhs)
    }
}

impl MulAssign for Gf {
    #[inline]
    fn mul_assign(&mut self, rhs: Gf) {
        *self = gf_mul(*self, rhs);
    }
}

impl Div for Gf {
    type Output = Gf;

    /// Panics on division by zero.
    fn div(self, rhs: Gf) -> Gf {
        gf_mul(self, gf_inv(rhs).expect("division by zero in GF(256)"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Carry-less multiply then reduce by the primitive polynomial.
    fn slow_mul(a: u8, b: u8) -> u8 {
        let mut prod: u16 = 0;
        for i in 0..8 {
            if (b >> i) & 1 == 1 {
                prod ^= (a as u16) << i;
            }
        }
        for bit in (8..16).rev() {
            if prod & (1 << bit) != 0 {
                prod ^= PRIMITIVE_POLY << (bit - 8);
            }
        }
        prod as u8
    }

    #[test]
    fn add_examples() {
        for a in 0..=255u8 {
            assert_eq!(gf_add(Gf(a), Gf(a)), Gf::ZERO);
            assert_eq!(gf_add(Gf(a), Gf::ZERO), Gf(a));
        }
        assert_eq!(gf_add(Gf(0x57), Gf(0x83)), Gf(0xD4));
    }

    #[test]
    fn mul_examples() {
        for a in 0..=255u8 {
            assert_eq!(gf_mul(Gf(a), Gf::ONE), Gf(a));
            assert_eq!(gf_mul(Gf::ZERO, Gf(a)), Gf::ZERO);
        }
        assert_eq!(slow_mul(0x02, 0x80), 0x1D);
        assert_eq!(gf_mul(Gf(0x02), Gf(0x80)), Gf(0x1D));
    }

    #[test]
    fn mul_matches_carryless_oracle_exhaustively() {
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                assert_eq!(gf_mul(Gf(a), Gf(b)).0, slow_mul(a, b), "{a} * {b}");
            }
        }
    }

    #[test]
    fn inverses() {
        assert_eq!(gf_inv(Gf::ONE).unwrap(), Gf::ONE);
        for a in 1..=255u8 {
            assert_eq!(gf_mul(Gf(a), gf_inv(Gf(a)).unwrap()), Gf::ONE);
        }
        assert!(matches!(gf_inv(Gf::ZERO), Err(Error::ZeroInverse)));
    }

    #[test]
    fn powers() {
        assert_eq!(gf_pow(Gf::ALPHA, 255).unwrap(), Gf::ONE);
        assert_eq!(gf_pow(Gf::ALPHA, 256).unwrap(), Gf::ALPHA);
        assert_eq!(gf_pow(Gf::ALPHA, -1).unwrap(), gf_inv(Gf::ALPHA).unwrap());
        for a in 1..=255u8 {
            assert_eq!(gf_pow(Gf(a), 0).unwrap(), Gf::ONE);
            let mut acc = Gf::ONE;
            for e in 0..10 {
                assert_eq!(gf_pow(Gf(a), e).unwrap(), acc);
                acc = gf_mul(acc, Gf(a));
            }
        }
        assert_eq!(gf_pow(Gf::ZERO, 3).unwrap(), Gf::ZERO);
        assert!(gf_pow(Gf::ZERO, 0).is_err());
        assert!(gf_pow(Gf::ZERO, -2).is_err());
    }

    #[test]
    fn alpha_generates_the_group() {
        let mut seen = [false; 256];
        for i in 0..255 {
            let v = Gf::exp(i).0 as usize;
            assert!(!seen[v]);
            seen[v] = true;
        }
        assert!(!seen[0]);
    }

    #[test]
    fn exp_log_round_trip() {
        for a in 1..=255u8 {
            assert_eq!(Gf::exp(Gf(a).log().unwrap() as i64), Gf(a));
        }
        for i in 0..255usize {
            assert_eq!(Gf::exp(i as i64).log(), Some(i));
        }
        assert_eq!(Gf::ZERO.log(), None);
    }

    #[test]
    fn field_axioms_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20_000 {
            let (a, b, c) = (Gf(rng.random()), Gf(rng.random()), Gf(rng.random()));
            assert_eq!(a + b, b + a);
            assert_eq!(a * b, b * a);
            assert_eq!((a + b) + c, a + (b + c));
            assert_eq!((a * b) * c, a * (b * c));
            assert_eq!(a * (b + c), a * b + a * c);
        }
    }

    #[test]
    fn poly_eval_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let x = Gf(rng.random());
            let c0 = Gf(rng.random());
            assert_eq!(poly_eval(&[c0], x), c0);
            assert_eq!(poly_eval(&[Gf::ONE, Gf::ZERO], x), x);

            let coeffs: Vec<Gf> = (0..6).map(|_| Gf(rng.random())).collect();
            let mut expected = Gf::ZERO;
            for (i, &c) in coeffs.iter().enumerate() {
                let deg = (coeffs.len() - 1 - i) as i64;
                let term = if deg == 0 { Gf::ONE } else { gf_pow(x, deg).unwrap() };
                expected = gf_add(expected, gf_mul(c, term));
            }
            assert_eq!(poly_eval(&coeffs, x), expected);

            let mut asc = coeffs.clone();
            asc.reverse();
            assert_eq!(poly_eval_ascending(&asc, x), expected);
        }
    }
}
