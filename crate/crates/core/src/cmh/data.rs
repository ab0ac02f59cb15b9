//! Two-modality samples, the pairwise similarity matrix, the synthetic
//! dataset generator and the JSON-lines dataset format.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Presence bitmap over the attribute space, entries 0 or 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttributeVector(Vec<u8>);

impl AttributeVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Format(format!("attribute entry {b} is not 0 or 1")));
        }
        Ok(AttributeVector(bits))
    }

    /// Bitmap with exactly the listed attributes set.
    pub fn with_set(len: usize, set: &[usize]) -> Self {
        let mut bits = vec![0; len];
        for &i in set {
            bits[i] = 1;
        }
        AttributeVector(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_set(&self, i: usize) -> bool {
        self.0[i] == 1
    }

    pub fn count_set(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    /// Network input: the bitmap as `0.0 / 1.0`.
    pub fn to_input(&self) -> Vec<f64> {
        self.0.iter().map(|&b| b as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub id: u64,
    pub attrs: AttributeVector,
    pub features: Vec<f64>,
}

/// Symmetric 0/1 matrix over sample pairs with a unit diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilarityMatrix {
    n: usize,
    entries: Vec<bool>,
}

impl SimilarityMatrix {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![false; n * n];
        for i in 0..n {
            entries[i * n + i] = true;
        }
        SimilarityMatrix { n, entries }
    }

    /// `S_ij = 1` iff samples `i` and `j` carry identical attribute bitmaps.
    pub fn from_samples(samples: &[Sample]) -> Self {
        let n = samples.len();
        let mut entries = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = samples[i].attrs == samples[j].attrs;
            }
        }
        SimilarityMatrix { n, entries }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.entries[i * self.n + j] = v;
    }

    pub fn submatrix(&self, idx: &[usize]) -> SimilarityMatrix {
        let n = idx.len();
        let mut entries = Vec::with_capacity(n * n);
        for &i in idx {
            for &j in idx {
                entries.push(self.get(i, j));
            }
        }
        SimilarityMatrix { n, entries }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Checks that dimensions are consistent and ids unique; returns
/// `(attribute count, feature dim)`.
pub fn validate_samples(samples: &[Sample]) -> Result<(usize, usize)> {
    let first = samples.first().ok_or_else(|| Error::Format("dataset is empty".into()))?;
    let (a, f) = (first.attrs.len(), first.features.len());
    let mut ids = HashSet::with_capacity(samples.len());
    for s in samples {
        if s.attrs.len() != a || s.features.len() != f {
            return Err(Error::Format(format!(
                "sample {} has {} attributes and {} features, expected {a} and {f}",
                s.id,
                s.attrs.len(),
                s.features.len()
            )));
        }
        if !ids.insert(s.id) {
            return Err(Error::DuplicateId(s.id));
        }
        if s.features.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format(format!("sample {} has a non-finite feature", s.id)));
        }
    }
    Ok((a, f))
}

/// One JSON object per line: `{"id":..,"attrs":[..],"features":[..]}`.
pub fn write_jsonl<W: Write>(samples: &[Sample], mut w: W) -> Result<()> {
    for s in samples {
        serde_json::to_writer(&mut w, s)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<Sample>> {
    let mut samples = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let sample: Sample =
            serde_json::from_str(&line).map_err(|e| Error::Format(format!("line {}: {e}", lineno + 1)))?;
        AttributeVector::new(sample.attrs.bits().to_vec())
            .map_err(|e| Error::Format(format!("line {}: {e}", lineno + 1)))?;
        samples.push(sample);
    }
    validate_samples(&samples)?;
    Ok(samples)
}

/// Synthetic two-modality dataset parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub n: usize,
    pub attributes: usize,
    pub feature_dim: usize,
    pub noise_sigma: f64,
    /// Number of identity prototypes; each sample belongs to one.
    pub identities: usize,
    pub seed: u64,
}

impl SynthConfig {
    /// Identity count defaults to one prototype per eight samples.
    pub fn new(n: usize, attributes: usize, feature_dim: usize, noise_sigma: f64, seed: u64) -> Self {
        SynthConfig { n, attributes, feature_dim, noise_sigma, identities: (n / 8).max(1), seed }
    }
}

/// Draws identity prototypes with random bitmaps. A sample's features are
/// a fixed random linear map of its centred bitmap `2y - 1` plus Gaussian
/// noise. Similarity is bitmap equality.
pub fn synth_dataset(cfg: &SynthConfig) -> Result<(Vec<Sample>, SimilarityMatrix)> {
    if cfg.n == 0 || cfg.attributes == 0 || cfg.feature_dim == 0 || cfg.identities == 0 {
        return Err(Error::InvalidParams("n, attributes, feature_dim and identities must be positive".into()));
    }
    if !(cfg.noise_sigma >= 0.0 && cfg.noise_sigma.is_finite()) {
        return Err(Error::InvalidParams(format!("noise sigma {} must be finite and non-negative", cfg.noise_sigma)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let embed_scale = 1.0 / (cfg.attributes as f64).sqrt();
    let unit = Normal::new(0.0, 1.0).unwrap();
    let embedding: Vec<f64> =
        (0..cfg.feature_dim * cfg.attributes).map(|_| unit.sample(&mut rng) * embed_scale).collect();

    let prototypes: Vec<AttributeVector> = (0..cfg.identities)
        .map(|_| AttributeVector((0..cfg.attributes).map(|_| rng.random_range(0..=1u8)).collect()))
        .collect();
    let means: Vec<Vec<f64>> = prototypes
        .iter()
        .map(|p| {
            (0..cfg.feature_dim)
                .map(|r| {
                    let row = &embedding[r * cfg.attributes..(r + 1) * cfg.attributes];
                    row.iter().zip(p.bits()).map(|(w, &b)| w * (2.0 * b as f64 - 1.0)).sum()
                })
                .collect()
        })
        .collect();

    let noise = Normal::new(0.0, cfg.noise_sigma).unwrap();
    let samples: Vec<Sample> = (0..cfg.n)
        .map(|i| {
            let proto = rng.random_range(0..cfg.identities);
            let features = means[proto]
                .iter()
                .map(|&m| if cfg.noise_sigma > 0.0 { m + noise.sample(&mut rng) } else { m })
                .collect();
            Sample { id: i as u64, attrs: prototypes[proto].clone(), features }
        })
        .collect();

    let sim = SimilarityMatrix::from_samples(&samples);
    Ok((samples, sim))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_prototype_twins_share_features() {
        let cfg = SynthConfig { identities: 5, ..SynthConfig::new(60, 6, 10, 0.0, 3) };
        let (samples, sim) = synth_dataset(&cfg).unwrap();
        let mut twins = 0;
        for i in 0..samples.len() {
            for j in 0..samples.len() {
                if samples[i].attrs == samples[j].attrs && i != j {
                    assert_eq!(samples[i].features, samples[j].features);
                    assert!(sim.get(i, j));
                    twins += 1;
                }
            }
        }
        assert!(twins > 0);
    }

    #[test]
    fn similarity_is_symmetric_with_unit_diagonal() {
        let (samples, sim) = synth_dataset(&SynthConfig::new(200, 4, 8, 0.3, 9)).unwrap();
        assert_eq!(sim.len(), samples.len());
        assert!((0..sim.len()).all(|i| sim.get(i, i)));
        assert!(sim.is_symmetric());
        for i in 0..sim.len() {
            for j in 0..sim.len() {
                assert_eq!(sim.get(i, j), samples[i].attrs == samples[j].attrs);
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = SynthConfig::new(50, 8, 16, 0.5, 42);
        assert_eq!(synth_dataset(&cfg).unwrap(), synth_dataset(&cfg).unwrap());
        let other = SynthConfig { seed: 43, ..cfg.clone() };
        assert_ne!(synth_dataset(&cfg).unwrap().0, synth_dataset(&other).unwrap().0);
    }

    #[test]
    fn rejects_degenerate_configs() {
        assert!(synth_dataset(&SynthConfig::new(0, 8, 16, 0.5, 1)).is_err());
        assert!(synth_dataset(&SynthConfig::new(10, 0, 16, 0.5, 1)).is_err());
        assert!(synth_dataset(&SynthConfig::new(10, 8, 0, 0.5, 1)).is_err());
        assert!(synth_dataset(&SynthConfig::new(10, 8, 4, -1.0, 1)).is_err());
    }

    #[test]
    fn jsonl_round_trip_and_validation() {
        let (samples, _) = synth_dataset(&SynthConfig::new(5, 3, 2, 0.1, 1)).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&samples, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("{\"id\":0,\"attrs\":["));
        assert_eq!(read_jsonl(&buf[..]).unwrap(), samples);

        let dup = "{\"id\":1,\"attrs\":[0,1],\"features\":[0.5]}\n{\"id\":1,\"attrs\":[1,1],\"features\":[0.1]}\n";
        assert!(matches!(read_jsonl(dup.as_bytes()), Err(Error::DuplicateId(1))));
        let ragged = "{\"id\":1,\"attrs\":[0,1],\"features\":[0.5]}\n{\"id\":2,\"attrs\":[1],\"features\":[0.1]}\n";
        assert!(read_jsonl(ragged.as_bytes()).is_err());
        let bad_bit = "{\"id\":1,\"attrs\":[0,2],\"features\":[0.5]}\n";
        assert!(read_jsonl(bad_bit.as_bytes()).is_err());
        assert!(read_jsonl("not json\n".as_bytes()).is_err());
        assert!(read_jsonl("".as_bytes()).is_err());
    }
}
