//! Exact Hamming-distance index over packed codes.

use std::collections::HashSet;

use crate::codec::{CodeSet, PackedCode};
use crate::error::{Error, Result};

/// Number of differing bits. Popcount over 64-bit words, bytes for the tail.
pub fn hamming(a: &PackedCode, b: &PackedCode) -> Result<u32> {
    if a.len_bits() != b.len_bits() {
        return Err(Error::LengthMismatch { expected: a.len_bits(), actual: b.len_bits() });
    }
    Ok(hamming_bytes(a.bytes(), b.bytes()))
}

#[inline]
pub(crate) fn hamming_bytes(a: &[u8], b: &[u8]) -> u32 {
    let wa = a.chunks_exact(8);
    let wb = b.chunks_exact(8);
    let tail: u32 = wa.remainder().iter().zip(wb.remainder()).map(|(x, y)| (x ^ y).count_ones()).sum();
    tail + wa
        .zip(wb)
        .map(|(x, y)| {
            let x = u64::from_ne_bytes(x.try_into().unwrap());
            let y = u64::from_ne_bytes(y.try_into().unwrap());
            (x ^ y).count_ones()
        })
        .sum::<u32>()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Hit {
    pub distance: u32,
    pub id: u64,
}

/// Hits sorted by `(distance, id)` ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RankedResult {
    pub hits: Vec<Hit>,
}

impl RankedResult {
    pub fn ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.hits.iter().map(|h| h.id)
    }
}

/// Linear-scan index. Entries keep insertion order; ids are unique.
#[derive(Clone, Debug)]
pub struct HashIndex {
    code_len_bits: usize,
    entries: Vec<(u64, PackedCode)>,
    ids: HashSet<u64>,
}

impl HashIndex {
    pub fn new(code_len_bits: usize) -> Self {
        HashIndex { code_len_bits, entries: Vec::new(), ids: HashSet::new() }
    }

    pub fn build<I>(code_len_bits: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, PackedCode)>,
    {
        let mut index = HashIndex::new(code_len_bits);
        for (id, code) in entries {
            index.insert(id, code)?;
        }
        Ok(index)
    }

    pub fn from_code_set(set: CodeSet) -> Result<Self> {
        Self::build(set.code_len_bits, set.records)
    }

    pub fn insert(&mut self, id: u64, code: PackedCode) -> Result<()> {
        if code.len_bits() != self.code_len_bits {
            return Err(Error::LengthMismatch { expected: self.code_len_bits, actual: code.len_bits() });
        }
        if !self.ids.insert(id) {
            return Err(Error::DuplicateId(id));
        }
        self.entries.push((id, code));
        Ok(())
    }

    pub fn code_len_bits(&self) -> usize {
        self.code_len_bits
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(u64, PackedCode)] {
        &self.entries
    }

    /// The `k` nearest entries (all of them if `k >= len`), exact.
    pub fn top_k(&self, query: &PackedCode, k: usize) -> Result<RankedResult> {
        if k == 0 {
            return Err(Error::InvalidParams("k must be at least 1".into()));
        }
        if query.len_bits() != self.code_len_bits {
            return Err(Error::LengthMismatch { expected: self.code_len_bits, actual: query.len_bits() });
        }
        let mut hits: Vec<Hit> = self
            .entries
            .iter()
            .map(|(id, code)| Hit { distance: hamming_bytes(query.bytes(), code.bytes()), id: *id })
            .collect();
        if k < hits.len() {
            hits.select_nth_unstable(k - 1);
            hits.truncate(k);
        }
        hits.sort_unstable();
        Ok(RankedResult { hits })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive_hamming(a: &PackedCode, b: &PackedCode) -> u32 {
        (0..a.len_bits()).filter(|&i| a.bit(i) != b.bit(i)).count() as u32
    }

    fn random_code(rng: &mut impl Rng, bytes: usize) -> PackedCode {
        PackedCode::from_bytes((0..bytes).map(|_| rng.random()).collect())
    }

    #[test]
    fn hamming_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_code(&mut rng, 32);
        assert_eq!(hamming(&x, &x).unwrap(), 0);
        assert_eq!(hamming(&x, &x.complement()).unwrap(), 256);
        let short = random_code(&mut rng, 4);
        assert!(hamming(&x, &short).is_err());
    }

    #[test]
    fn hamming_matches_bit_loop_and_is_a_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for trial in 0..10_000 {
            // Mix word-aligned and ragged lengths.
            let bytes = if trial % 2 == 0 { 32 } else { rng.random_range(1..40) };
            let a = random_code(&mut rng, bytes);
            let b = random_code(&mut rng, bytes);
            let c = random_code(&mut rng, bytes);
            let ab = hamming(&a, &b).unwrap();
            assert_eq!(ab, naive_hamming(&a, &b));
            assert_eq!(ab, hamming(&b, &a).unwrap());
            assert_eq!(ab == 0, a == b);
            assert!(ab <= hamming(&a, &c).unwrap() + hamming(&c, &b).unwrap());
        }
    }

    #[test]
    fn build_insert_and_duplicates() {
        let index = HashIndex::build(256, Vec::new()).unwrap();
        assert!(index.is_empty());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut index = HashIndex::new(256);
        let code = random_code(&mut rng, 32);
        index.insert(42, code.clone()).unwrap();
        let hits = index.top_k(&random_code(&mut rng, 32), 1).unwrap();
        assert_eq!(hits.hits.len(), 1);
        assert_eq!(hits.hits[0].id, 42);

        assert!(matches!(index.insert(42, code), Err(Error::DuplicateId(42))));
        assert!(index.insert(43, random_code(&mut rng, 8)).is_err());
        assert_eq!(index.len(), 1);
        assert!(index.top_k(&random_code(&mut rng, 32), 0).is_err());
        assert!(index.top_k(&random_code(&mut rng, 8), 1).is_err());
    }

    #[test]
    fn top_k_matches_full_sort_and_ignores_insertion_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // Few distinct codes so that ties are frequent.
        let pool: Vec<PackedCode> = (0..20).map(|_| random_code(&mut rng, 4)).collect();
        let mut entries: Vec<(u64, PackedCode)> =
            (0..300u64).map(|id| (id * 7 % 1000, pool[rng.random_range(0..pool.len())].clone())).collect();
        let index = HashIndex::build(32, entries.clone()).unwrap();
        entries.shuffle(&mut rng);
        let shuffled = HashIndex::build(32, entries.clone()).unwrap();

        for _ in 0..50 {
            let q = random_code(&mut rng, 4);
            let mut oracle: Vec<(u32, u64)> = entries.iter().map(|(id, c)| (naive_hamming(&q, c), *id)).collect();
            oracle.sort();
            for k in [1, 5, 37, 300, 1000] {
                let got: Vec<(u32, u64)> =
                    index.top_k(&q, k).unwrap().hits.iter().map(|h| (h.distance, h.id)).collect();
                assert_eq!(got, oracle[..k.min(oracle.len())]);
                assert_eq!(shuffled.top_k(&q, k).unwrap(), index.top_k(&q, k).unwrap());
            }
        }
    }

    #[test]
    fn stored_code_comes_first() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let entries: Vec<(u64, PackedCode)> = (0..100).map(|id| (id, random_code(&mut rng, 32))).collect();
        let index = HashIndex::build(256, entries.clone()).unwrap();
        let top = index.top_k(&entries[17].1, 3).unwrap();
        assert_eq!(top.hits[0], Hit { distance: 0, id: 17 });
    }
}
