//! End-to-end composition: encode both modalities, snap to codewords,
//! index the image codes and evaluate attribute queries with and without
//! error correction.

use std::fmt::Write as _;

use crate::cmh::{CoupledModel, Sample};
use crate::codec::{pack, snap, CodeSet};
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::eval::{evaluate, make_queries, NdcgCurve};
use crate::index::{hamming, HashIndex};
use crate::rscode::RsParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Modality {
    Image,
    Attributes,
}

/// Packed sign codes of every sample through one branch.
pub fn encode_samples(model: &CoupledModel, samples: &[Sample], modality: Modality) -> Result<CodeSet> {
    let mut set = CodeSet::new(model.code_bits());
    for s in samples {
        let code = match modality {
            Modality::Image => model.encode_image(&s.features)?,
            Modality::Attributes => model.encode_attributes(&s.attrs)?,
        };
        set.push(s.id, pack(&code)?)?;
    }
    Ok(set)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SnapStats {
    pub total: usize,
    pub snapped: usize,
    pub corrected_symbols: usize,
}

/// Snaps every record; records the decoder cannot place are kept as is.
pub fn snap_codes(set: &CodeSet, params: &RsParams) -> Result<(CodeSet, SnapStats)> {
    if set.code_len_bits != params.code_bits() {
        return Err(Error::LengthMismatch { expected: params.code_bits(), actual: set.code_len_bits });
    }
    let mut out = CodeSet::new(set.code_len_bits);
    let mut stats = SnapStats { total: set.len(), ..SnapStats::default() };
    for (id, code) in &set.records {
        let s = snap(code, params)?;
        if s.snapped {
            stats.snapped += 1;
            stats.corrected_symbols += s.corrected_symbols;
        }
        out.push(*id, s.code)?;
    }
    Ok((out, stats))
}

/// Cross-modal distance between the two codes of each sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairStats {
    pub pairs: usize,
    pub mean_hamming: f64,
    pub zero_distance: usize,
}

/// Pairs records of the two sets position by position; ids must agree.
pub fn pair_stats(image: &CodeSet, attr: &CodeSet) -> Result<PairStats> {
    if image.len() != attr.len() {
        return Err(Error::LengthMismatch { expected: image.len(), actual: attr.len() });
    }
    let mut total = 0u64;
    let mut zero = 0;
    for ((ia, ca), (ib, cb)) in image.records.iter().zip(&attr.records) {
        if ia != ib {
            return Err(Error::Format(format!("record ids differ: {ia} vs {ib}")));
        }
        let d = hamming(ca, cb)?;
        total += d as u64;
        zero += (d == 0) as usize;
    }
    let pairs = image.len();
    Ok(PairStats {
        pairs,
        mean_hamming: if pairs == 0 { 0.0 } else { total as f64 / pairs as f64 },
        zero_distance: zero,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub ecc: NdcgCurve,
    pub no_ecc: NdcgCurve,
    pub before: PairStats,
    pub after: PairStats,
    pub image_snap: SnapStats,
    pub attr_snap: SnapStats,
}

impl EvalReport {
    /// `stage,mean_hamming,zero_distance_pairs,pairs`.
    pub fn pairs_csv(&self) -> String {
        let mut out = String::from("stage,mean_hamming,zero_distance_pairs,pairs\n");
        for (stage, p) in [("before_snap", &self.before), ("after_snap", &self.after)] {
            writeln!(out, "{stage},{:.6},{},{}", p.mean_hamming, p.zero_distance, p.pairs).unwrap();
        }
        out
    }
}

/// Evaluates a trained model on `samples`, which serve as the database
/// (image branch) and as the pool that makes queries feasible.
pub fn evaluate_model(model: &CoupledModel, samples: &[Sample], cfg: &PipelineConfig) -> Result<EvalReport> {
    cfg.validate()?;
    let params = cfg.rs_params()?;
    if model.code_bits() != params.code_bits() {
        return Err(Error::LengthMismatch { expected: params.code_bits(), actual: model.code_bits() });
    }

    let image = encode_samples(model, samples, Modality::Image)?;
    let attr = encode_samples(model, samples, Modality::Attributes)?;
    let (image_snapped, image_snap) = snap_codes(&image, &params)?;
    let (attr_snapped, attr_snap) = snap_codes(&attr, &params)?;

    let queries = make_queries(model.attributes(), cfg.query_arity, cfg.query_count, samples, cfg.seed())?;
    let raw_index = HashIndex::from_code_set(image.clone())?;
    let snapped_index = HashIndex::from_code_set(image_snapped.clone())?;
    let no_ecc = evaluate(model, &raw_index, samples, &queries, &cfg.k_levels, &params, false)?;
    let ecc = evaluate(model, &snapped_index, samples, &queries, &cfg.k_levels, &params, true)?;

    Ok(EvalReport {
        ecc,
        no_ecc,
        before: pair_stats(&image, &attr)?,
        after: pair_stats(&image_snapped, &attr_snapped)?,
        image_snap,
        attr_snap,
    })
}
