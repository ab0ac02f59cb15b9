//! Systematic shortened Reed-Solomon code over GF(2^8) with a
//! bounded-distance decoder (Berlekamp-Massey, Chien search, Forney).
//!
//! A shortened block of `n1` symbols is the tail of a mother codeword of
//! length 255 whose leading `255 - n1` symbols are zero. Block symbol `p`
//! is the coefficient of `x^(n1 - 1 - p)` in the codeword polynomial, so
//! position `p` has error locator `alpha^(n1 - 1 - p)`. Everything works on
//! the shortened block directly; the virtual zero prefix never contributes
//! to a syndrome.
//!
//! Polynomials in this module are stored lowest degree first, except the
//! received block itself which is highest degree first.

use crate::error::{Error, Result};
use crate::galois::{poly_eval, poly_eval_ascending, Gf, GROUP_ORDER};

/// Bits per symbol.
pub const SYMBOL_BITS: usize = 8;
/// Length of the unshortened code, `2^8 - 1`.
pub const MOTHER_LENGTH: usize = GROUP_ORDER;

/// Shortened code parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RsParams {
    n1: usize,
    t: usize,
    first_root: usize,
}

impl Default for RsParams {
    /// Shortened (32, 16) code, t = 8, narrow sense.
    fn default() -> Self {
        RsParams { n1: 32, t: 8, first_root: 1 }
    }
}

impl RsParams {
    /// Narrow-sense (`first_root = 1`) code of `n1` symbols correcting `t`.
    pub fn new(n1: usize, t: usize) -> Result<Self> {
        Self::with_first_root(n1, t, 1)
    }

    pub fn with_first_root(n1: usize, t: usize, first_root: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidParams("t must be at least 1".into()));
        }
        if n1 > MOTHER_LENGTH {
            return Err(Error::InvalidParams(format!("block length {n1} exceeds mother length {MOTHER_LENGTH}")));
        }
        if 2 * t >= n1 {
            return Err(Error::InvalidParams(format!("2t = {} must be below the block length {n1}", 2 * t)));
        }
        Ok(RsParams { n1, t, first_root })
    }

    /// Parameters for a code of `bits` intermediate bits.
    pub fn for_code_bits(bits: usize, t: usize) -> Result<Self> {
        if !bits.is_multiple_of(SYMBOL_BITS) {
            return Err(Error::InvalidParams(format!("code length {bits} is not a multiple of {SYMBOL_BITS}")));
        }
        Self::new(bits / SYMBOL_BITS, t)
    }

    pub fn symbol_bits(&self) -> usize {
        SYMBOL_BITS
    }

    pub fn mother_length(&self) -> usize {
        MOTHER_LENGTH
    }

    /// Symbols per shortened block (N1).
    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn parity(&self) -> usize {
        2 * self.t
    }

    /// Message symbols per block (K1).
    pub fn k1(&self) -> usize {
        self.n1 - 2 * self.t
    }

    pub fn first_root(&self) -> usize {
        self.first_root
    }

    /// Final code length in bits.
    pub fn code_bits(&self) -> usize {
        self.n1 * SYMBOL_BITS
    }

    /// Error locator of block position `pos`.
    fn locator(&self, pos: usize) -> Gf {
        Gf::exp((self.n1 - 1 - pos) as i64)
    }

    /// `g(x) = prod (x - alpha^i)` for `i` in `first_root .. first_root + 2t`,
    /// lowest degree first. Monic, degree 2t.
    pub fn generator_poly(&self) -> Vec<Gf> {
        let mut g = vec![Gf::ONE];
        for i in 0..self.parity() {
            let root = Gf::exp((self.first_root + i) as i64);
            let mut next = vec![Gf::ZERO; g.len() + 1];
            for (k, &c) in g.iter().enumerate() {
                next[k + 1] += c;
                next[k] += c * root;
            }
            g = next;
        }
        g
    }
}

/// Result of a bounded-distance decode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// Corrected codeword, or the input unchanged when `failed`.
    pub codeword: Vec<Gf>,
    pub corrected_symbols: usize,
    pub failed: bool,
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}

/// Systematic encoding: the message followed by `2t` parity symbols.
pub fn rs_encode(message: &[Gf], params: &RsParams) -> Result<Vec<Gf>> {
    check_len(params.k1(), message.len())?;
    let parity = params.parity();
    let gen = params.generator_poly();

    // LFSR division of m(x) x^2t by g(x); rem[0] is the highest coefficient.
    let mut rem = vec![Gf::ZERO; parity];
    for &m in message {
        let feedback = m + rem[0];
        rem.rotate_left(1);
        rem[parity - 1] = Gf::ZERO;
        if !feedback.is_zero() {
            for (i, r) in rem.iter_mut().enumerate() {
                *r += feedback * gen[parity - 1 - i];
            }
        }
    }

    let mut codeword = Vec::with_capacity(params.n1());
    codeword.extend_from_slice(message);
    codeword.extend_from_slice(&rem);
    Ok(codeword)
}

/// `S_j = r(alpha^(b + j))` for `j = 0 .. 2t`.
pub fn syndromes(recv: &[Gf], params: &RsParams) -> Vec<Gf> {
    (0..params.parity()).map(|j| poly_eval(recv, Gf::exp((params.first_root() + j) as i64))).collect()
}

fn degree(poly: &[Gf]) -> usize {
    poly.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

/// Shortest LFSR connection polynomial Λ(x) generating the syndrome
/// sequence. Lowest degree first, `Λ(0) = 1`, trailing zeros trimmed.
pub fn berlekamp_massey(synd: &[Gf]) -> Vec<Gf> {
    let mut lambda = vec![Gf::ONE];
    let mut prev = vec![Gf::ONE];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut prev_disc = Gf::ONE;

    for n in 0..synd.len() {
        let mut disc = synd[n];
        for i in 1..lambda.len().min(n + 1) {
            disc += lambda[i] * synd[n - i];
        }

        if disc.is_zero() {
            shift += 1;
            continue;
        }

        let coef = disc / prev_disc;
        let mut next = lambda.clone();
        if next.len() < prev.len() + shift {
            next.resize(prev.len() + shift, Gf::ZERO);
        }
        for (i, &p) in prev.iter().enumerate() {
            next[i + shift] += coef * p;
        }

        if 2 * len <= n {
            prev = std::mem::replace(&mut lambda, next);
            len = n + 1 - len;
            prev_disc = disc;
            shift = 1;
        } else {
            lambda = next;
            shift += 1;
        }
    }

    lambda.truncate(degree(&lambda) + 1);
    lambda
}

/// Block positions whose locators are roots of Λ, ascending. Roots that
/// would fall in the virtual zero prefix are not returned; the caller
/// compares the count with `deg Λ`.
pub fn chien_search(lambda: &[Gf], params: &RsParams) -> Vec<usize> {
    (0..params.n1())
        .filter(|&pos| {
            let x_inv = Gf::exp(-((params.n1() - 1 - pos) as i64));
            poly_eval_ascending(lambda, x_inv).is_zero()
        })
        .collect()
}

/// Error magnitudes at `positions`:
/// `e_k = X_k^(1-b) Ω(X_k^-1) / Λ'(X_k^-1)` with `Ω = S Λ mod x^2t`.
///
/// Fails on a zero denominator.
pub fn forney(lambda: &[Gf], synd: &[Gf], positions: &[usize], params: &RsParams) -> Result<Vec<Gf>> {
    let two_t = synd.len();
    let mut omega = vec![Gf::ZERO; two_t];
    for (i, &s) in synd.iter().enumerate() {
        for (j, &l) in lambda.iter().enumerate() {
            if i + j < two_t {
                omega[i + j] += s * l;
            }
        }
    }

    // Formal derivative: odd-degree terms survive in characteristic 2.
    let deriv: Vec<Gf> =
        lambda.iter().enumerate().skip(1).map(|(i, &c)| if i % 2 == 1 { c } else { Gf::ZERO }).collect();

    positions
        .iter()
        .map(|&pos| {
            let x = params.locator(pos);
            let x_inv = x.inv()?;
            let denom = poly_eval_ascending(&deriv, x_inv);
            if denom.is_zero() {
                return Err(Error::InvalidParams(format!("zero Forney denominator at position {pos}")));
            }
            let scale = x.pow(1 - params.first_root() as i64)?;
            Ok(scale * poly_eval_ascending(&omega, x_inv) / denom)
        })
        .collect()
}

/// Bounded-distance decode. Returns the unique codeword within `t` symbol
/// errors of `recv` if there is one; otherwise echoes `recv` with
/// `failed = true`. Never reports success for a non-codeword.
pub fn rs_decode(recv: &[Gf], params: &RsParams) -> Result<DecodeOutcome> {
    check_len(params.n1(), recv.len())?;
    let fail = || DecodeOutcome { codeword: recv.to_vec(), corrected_symbols: 0, failed: true };

    let synd = syndromes(recv, params);
    if synd.iter().all(|s| s.is_zero()) {
        return Ok(DecodeOutcome { codeword: recv.to_vec(), corrected_symbols: 0, failed: false });
    }

    let lambda = berlekamp_massey(&synd);
    let errors = degree(&lambda);
    if errors == 0 || errors > params.t() {
        return Ok(fail());
    }

    let positions = chien_search(&lambda, params);
    if positions.len() != errors {
        return Ok(fail());
    }

    let magnitudes = match forney(&lambda, &synd, &positions, params) {
        Ok(m) => m,
        Err(_) => return Ok(fail()),
    };
    if magnitudes.iter().any(|m| m.is_zero()) {
        return Ok(fail());
    }

    let mut codeword = recv.to_vec();
    for (&pos, &mag) in positions.iter().zip(&magnitudes) {
        codeword[pos] += mag;
    }
    if syndromes(&codeword, params).iter().any(|s| !s.is_zero()) {
        return Ok(fail());
    }

    Ok(DecodeOutcome { codeword, corrected_symbols: errors, failed: false })
}
