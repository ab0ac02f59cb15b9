//! Bridge between sign codes, packed bit vectors and RS symbol blocks.
//!
//! Bits are packed MSB-first: bit `i` of a code lands in byte `i / 8` at
//! bit position `7 - i % 8`. Byte `j` of a packed code is RS symbol `j`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::galois::Gf;
use crate::rscode::{rs_decode, RsParams, SYMBOL_BITS};

/// A d-bit code over {-1, +1}, the sign of a network output.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntermediateCode(Vec<i8>);

impl IntermediateCode {
    /// Binarizes a real vector; `sign(0) = +1`.
    pub fn from_real(values: &[f64]) -> Self {
        IntermediateCode(values.iter().map(|&v| sign(v)).collect())
    }

    /// Entries must all be -1 or +1.
    pub fn from_signs(signs: Vec<i8>) -> Result<Self> {
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::Format(format!("sign code entry {bad} is not +1 or -1")));
        }
        Ok(IntermediateCode(signs))
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[inline]
pub fn sign(v: f64) -> i8 {
    if v >= 0.0 {
        1
    } else {
        -1
    }
}

/// Packed bit vector; the length in bits is always a multiple of 8.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PackedCode {
    bytes: Vec<u8>,
}

impl PackedCode {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        PackedCode { bytes }
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn len_bits(&self) -> usize {
        self.bytes.len() * 8
    }

    pub fn bit(&self, i: usize) -> bool {
        (self.bytes[i / 8] >> (7 - i % 8)) & 1 == 1
    }

    pub fn complement(&self) -> Self {
        PackedCode { bytes: self.bytes.iter().map(|b| !b).collect() }
    }
}

/// `+1 -> 1`, `-1 -> 0`, MSB-first.
pub fn pack(code: &IntermediateCode) -> Result<PackedCode> {
    if !code.len().is_multiple_of(8) {
        return Err(Error::InvalidParams(format!("code length {} is not a multiple of 8", code.len())));
    }
    let bytes = code
        .as_slice()
        .chunks_exact(8)
        .map(|chunk| chunk.iter().fold(0u8, |acc, &s| (acc << 1) | (s > 0) as u8))
        .collect();
    Ok(PackedCode { bytes })
}

pub fn unpack(packed: &PackedCode) -> IntermediateCode {
    IntermediateCode((0..packed.len_bits()).map(|i| if packed.bit(i) { 1 } else { -1 }).collect())
}

pub fn to_symbols(packed: &PackedCode, params: &RsParams) -> Result<Vec<Gf>> {
    if packed.len_bits() != params.code_bits() {
        return Err(Error::LengthMismatch { expected: params.code_bits(), actual: packed.len_bits() });
    }
    Ok(packed.bytes.iter().map(|&b| Gf(b)).collect())
}

pub fn from_symbols(symbols: &[Gf]) -> PackedCode {
    PackedCode { bytes: symbols.iter().map(|s| s.0).collect() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapped {
    pub code: PackedCode,
    pub snapped: bool,
    pub corrected_symbols: usize,
}

/// Replaces `packed` by the RS codeword within `t` symbol errors of it,
/// or returns it unchanged when the decoder fails.
pub fn snap(packed: &PackedCode, params: &RsParams) -> Result<Snapped> {
    let outcome = rs_decode(&to_symbols(packed, params)?, params)?;
    if outcome.failed {
        return Ok(Snapped { code: packed.clone(), snapped: false, corrected_symbols: 0 });
    }
    Ok(Snapped { code: from_symbols(&outcome.codeword), snapped: true, corrected_symbols: outcome.corrected_symbols })
}

const CODE_MAGIC: &[u8; 4] = b"CMHC";
const CODE_VERSION: u8 = 1;

/// A set of `(id, code)` records sharing one code length; the unit stored
/// in a code file.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CodeSet {
    pub code_len_bits: usize,
    pub records: Vec<(u64, PackedCode)>,
}

impl CodeSet {
    pub fn new(code_len_bits: usize) -> Self {
        CodeSet { code_len_bits, records: Vec::new() }
    }

    pub fn push(&mut self, id: u64, code: PackedCode) -> Result<()> {
        if code.len_bits() != self.code_len_bits {
            return Err(Error::LengthMismatch { expected: self.code_len_bits, actual: code.len_bits() });
        }
        self.records.push((id, code));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `"CMHC"`, version byte, code length in bits (u32 LE), record count
    /// (u64 LE), then `(id: u64 LE, code bytes)` per record.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CODE_MAGIC)?;
        w.write_all(&[CODE_VERSION])?;
        w.write_all(&(self.code_len_bits as u32).to_le_bytes())?;
        w.write_all(&(self.records.len() as u64).to_le_bytes())?;
        for (id, code) in &self.records {
            w.write_all(&id.to_le_bytes())?;
            w.write_all(code.bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CODE_MAGIC {
            return Err(Error::Format("not a code file (bad magic)".into()));
        }
        let mut version = [0u8; 1];
        r.read_exact(&mut version)?;
        if version[0] != CODE_VERSION {
            return Err(Error::Format(format!("unsupported code file version {}", version[0])));
        }
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf)?;
        let code_len_bits = u32::from_le_bytes(u32buf) as usize;
        if code_len_bits == 0 || !code_len_bits.is_multiple_of(SYMBOL_BITS) {
            return Err(Error::Format(format!("code length {code_len_bits} is not a positive multiple of 8")));
        }
        let mut u64buf = [0u8; 8];
        r.read_exact(&mut u64buf)?;
        let count = u64::from_le_bytes(u64buf);

        let mut set = CodeSet::new(code_len_bits);
        for _ in 0..count {
            r.read_exact(&mut u64buf)?;
            let id = u64::from_le_bytes(u64buf);
            let mut bytes = vec![0u8; code_len_bits / 8];
            r.read_exact(&mut bytes)?;
            set.records.push((id, PackedCode::from_bytes(bytes)));
        }
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(Error::Format("trailing bytes after last record".into()));
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rscode::rs_encode;
    use proptest::prelude::*;
    use rand::seq::index::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_codeword(rng: &mut impl Rng, params: &RsParams) -> PackedCode {
        let msg: Vec<Gf> = (0..params.k1()).map(|_| Gf(rng.random())).collect();
        from_symbols(&rs_encode(&msg, params).unwrap())
    }

    /// Flips random bits inside `symbols` randomly chosen bytes.
    fn corrupt_bits(rng: &mut impl Rng, code: &PackedCode, symbols: usize) -> PackedCode {
        let mut bytes = code.bytes().to_vec();
        for pos in sample(rng, bytes.len(), symbols) {
            bytes[pos] ^= rng.random_range(1..=255u8);
        }
        PackedCode::from_bytes(bytes)
    }

    #[test]
    fn pack_examples() {
        let ones = IntermediateCode::from_signs(vec![1; 8]).unwrap();
        assert_eq!(pack(&ones).unwrap().bytes(), &[0xFF]);
        let first = IntermediateCode::from_signs(vec![1, -1, -1, -1, -1, -1, -1, -1]).unwrap();
        assert_eq!(pack(&first).unwrap().bytes(), &[0x80]);
        let odd = IntermediateCode::from_signs(vec![1; 12]).unwrap();
        assert!(pack(&odd).is_err());
        assert!(IntermediateCode::from_signs(vec![1, 0]).is_err());
    }

    #[test]
    fn sign_tie_break() {
        let code = IntermediateCode::from_real(&[0.0, -0.0, -1e-300, 3.0]);
        assert_eq!(code.as_slice(), &[1, 1, -1, 1]);
    }

    proptest! {
        #[test]
        fn pack_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..64usize)) {
            let n = bits.len() / 8 * 8;
            let signs: Vec<i8> = bits[..n].iter().map(|&b| if b { 1 } else { -1 }).collect();
            let code = IntermediateCode::from_signs(signs).unwrap();
            let packed = pack(&code).unwrap();
            prop_assert_eq!(packed.len_bits(), n);
            prop_assert_eq!(unpack(&packed), code);
        }

        #[test]
        fn symbol_round_trip(bytes in proptest::collection::vec(any::<u8>(), 32)) {
            let params = RsParams::default();
            let packed = PackedCode::from_bytes(bytes.clone());
            let symbols = to_symbols(&packed, &params).unwrap();
            prop_assert_eq!(symbols.len(), 32);
            for (s, b) in symbols.iter().zip(&bytes) {
                prop_assert_eq!(s.0, *b);
            }
            prop_assert_eq!(from_symbols(&symbols), packed);
        }
    }

    #[test]
    fn symbols_need_matching_length() {
        let params = RsParams::default();
        let short = PackedCode::from_bytes(vec![0; 16]);
        assert!(matches!(to_symbols(&short, &params), Err(Error::LengthMismatch { expected: 256, actual: 128 })));
    }

    #[test]
    fn snap_codeword_is_fixed_point() {
        let params = RsParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let cw = random_codeword(&mut rng, &params);
            let s = snap(&cw, &params).unwrap();
            assert_eq!(s, Snapped { code: cw, snapped: true, corrected_symbols: 0 });
        }
    }

    #[test]
    fn snap_recovers_and_collapses() {
        let params = RsParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1_000 {
            let cw = random_codeword(&mut rng, &params);
            let ea = rng.random_range(0..=params.t());
            let eb = rng.random_range(0..=params.t());
            let a = corrupt_bits(&mut rng, &cw, ea);
            let b = corrupt_bits(&mut rng, &cw, eb);

            let sa = snap(&a, &params).unwrap();
            let sb = snap(&b, &params).unwrap();
            assert!(sa.snapped && sb.snapped);
            assert_eq!(sa.code, cw);
            assert_eq!(sa.corrected_symbols, ea);
            assert_eq!(sa.code, sb.code);

            let again = snap(&sa.code, &params).unwrap();
            assert_eq!(again, Snapped { code: sa.code.clone(), snapped: true, corrected_symbols: 0 });
        }
    }

    #[test]
    fn snap_failure_echoes_input() {
        let params = RsParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut failed = 0;
        for _ in 0..200 {
            let bytes: Vec<u8> = (0..32).map(|_| rng.random()).collect();
            let code = PackedCode::from_bytes(bytes);
            let s = snap(&code, &params).unwrap();
            if !s.snapped {
                failed += 1;
                assert_eq!(s.code, code);
                assert_eq!(s.corrected_symbols, 0);
            }
        }
        assert!(failed > 0);
    }

    #[test]
    fn code_file_round_trip_and_rejections() {
        let mut set = CodeSet::new(16);
        set.push(7, PackedCode::from_bytes(vec![0xAB, 0xCD])).unwrap();
        set.push(u64::MAX, PackedCode::from_bytes(vec![0x00, 0x01])).unwrap();
        assert!(set.push(1, PackedCode::from_bytes(vec![0])).is_err());

        let mut buf = Vec::new();
        set.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"CMHC");
        assert_eq!(buf[4], 1);
        assert_eq!(&buf[5..9], &16u32.to_le_bytes());
        assert_eq!(&buf[9..17], &2u64.to_le_bytes());
        assert_eq!(&buf[17..25], &7u64.to_le_bytes());
        assert_eq!(&buf[25..27], &[0xAB, 0xCD]);
        assert_eq!(buf.len(), 17 + 2 * 10);
        assert_eq!(CodeSet::read_from(&buf[..]).unwrap(), set);

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(CodeSet::read_from(&bad[..]), Err(Error::Format(_))));
        let mut bad = buf.clone();
        bad[4] = 9;
        assert!(matches!(CodeSet::read_from(&bad[..]), Err(Error::Format(_))));
        let mut bad = buf.clone();
        bad.push(0);
        assert!(matches!(CodeSet::read_from(&bad[..]), Err(Error::Format(_))));
        assert!(CodeSet::read_from(&buf[..buf.len() - 1]).is_err());
    }
}
