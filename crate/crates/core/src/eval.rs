//! Attribute queries and NDCG@k evaluation of ranked retrieval.
//!
//! Relevance of a database item to a query is the number of query
//! attributes it carries. `NDCG@k = DCG@k / IDCG@k` with gain `2^rel - 1`
//! and discount `log2(i + 1)` for rank `i` starting at 1.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cmh::{AttributeVector, CoupledModel, Sample};
use crate::codec::{pack, snap};
use crate::error::{Error, Result};
use crate::index::HashIndex;
use crate::rscode::RsParams;

/// Truncation levels used when none are configured.
pub const DEFAULT_K_LEVELS: [usize; 6] = [1, 2, 5, 10, 20, 50];

/// A bitmap with `q` attributes set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AttributeQuery {
    bits: AttributeVector,
}

impl AttributeQuery {
    pub fn new(bits: AttributeVector) -> Result<Self> {
        if bits.count_set() == 0 {
            return Err(Error::InvalidParams("query sets no attribute".into()));
        }
        Ok(AttributeQuery { bits })
    }

    pub fn from_attributes(space: usize, set: &[usize]) -> Result<Self> {
        if let Some(&bad) = set.iter().find(|&&i| i >= space) {
            return Err(Error::InvalidParams(format!("attribute {bad} outside a space of {space}")));
        }
        Self::new(AttributeVector::with_set(space, set))
    }

    pub fn bits(&self) -> &AttributeVector {
        &self.bits
    }

    pub fn arity(&self) -> usize {
        self.bits.count_set()
    }
}

/// Number of query attributes present in `attrs`.
pub fn relevance(query: &AttributeQuery, attrs: &AttributeVector) -> u32 {
    query.bits.bits().iter().zip(attrs.bits()).filter(|(&q, &a)| q == 1 && a == 1).count() as u32
}

fn dcg(rels: &[u32], k: usize) -> f64 {
    rels.iter().take(k).enumerate().map(|(i, &r)| (2f64.powi(r as i32) - 1.0) / ((i + 2) as f64).log2()).sum()
}

/// NDCG of `rels` (ranked order) at `k`, normalized by the DCG of `ideal`,
/// the descending-sorted relevances of all candidates.
pub fn ndcg_at_k(rels: &[u32], ideal: &[u32], k: usize) -> Result<f64> {
    let z = dcg(ideal, k);
    if z <= 0.0 {
        return Err(Error::NoRelevantItems);
    }
    Ok((dcg(rels, k) / z).min(1.0))
}

fn combinations(n: usize, q: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, q, &mut Vec::with_capacity(q), &mut out);
    out
}

/// `count` distinct `q`-attribute queries, each with at least one relevant
/// sample, drawn deterministically from `seed`.
pub fn make_queries(
    attributes: usize,
    q: usize,
    count: usize,
    samples: &[Sample],
    seed: u64,
) -> Result<Vec<AttributeQuery>> {
    if !(1..=3).contains(&q) || q > attributes {
        return Err(Error::InvalidParams(format!("query arity {q} must be 1, 2 or 3 and at most {attributes}")));
    }
    let mut feasible: Vec<AttributeQuery> = combinations(attributes, q)
        .into_iter()
        .map(|set| AttributeQuery::from_attributes(attributes, &set))
        .collect::<Result<_>>()?;
    feasible.retain(|query| samples.iter().any(|s| relevance(query, &s.attrs) > 0));
    if count > feasible.len() {
        return Err(Error::InfeasibleQueries { requested: count, feasible: feasible.len() });
    }
    feasible.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    feasible.truncate(count);
    Ok(feasible)
}

/// Mean NDCG per truncation level over a query set.
#[derive(Clone, Debug, PartialEq)]
pub struct NdcgCurve {
    pub k_levels: Vec<usize>,
    pub mean: Vec<f64>,
    pub stddev: Vec<f64>,
    pub queries_used: usize,
    /// Queries dropped because nothing in the database was relevant.
    pub excluded: usize,
}

impl NdcgCurve {
    /// Aggregates per-query score rows (one score per level each).
    pub fn from_scores(k_levels: &[usize], scores: &[Vec<f64>], excluded: usize) -> Self {
        let n = scores.len();
        let mut mean = vec![0.0; k_levels.len()];
        let mut stddev = vec![0.0; k_levels.len()];
        if n > 0 {
            for (l, m) in mean.iter_mut().enumerate() {
                *m = scores.iter().map(|s| s[l]).sum::<f64>() / n as f64;
            }
            for (l, sd) in stddev.iter_mut().enumerate() {
                let var = scores.iter().map(|s| (s[l] - mean[l]).powi(2)).sum::<f64>() / n as f64;
                *sd = var.sqrt();
            }
        }
        NdcgCurve { k_levels: k_levels.to_vec(), mean, stddev, queries_used: n, excluded }
    }

    pub fn at(&self, k: usize) -> Option<f64> {
        self.k_levels.iter().position(|&l| l == k).map(|i| self.mean[i])
    }

    /// `k,ndcg_mean,ndcg_stddev,queries_used`, one row per level.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,ndcg_mean,ndcg_stddev,queries_used\n");
        for (i, k) in self.k_levels.iter().enumerate() {
            writeln!(out, "{k},{:.6},{:.6},{}", self.mean[i], self.stddev[i], self.queries_used).unwrap();
        }
        out
    }
}

/// Scores one ranked list of database relevances at every level.
pub fn score_ranking(ranked: &[u32], all: &[u32], k_levels: &[usize]) -> Result<Vec<f64>> {
    let mut ideal = all.to_vec();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    k_levels.iter().map(|&k| ndcg_at_k(ranked, &ideal, k)).collect()
}

/// Runs every query through the attribute branch (snapping when `use_ecc`)
/// and scores the index's ranking. `database` supplies each indexed id's
/// attributes; the index must hold codes produced the same way.
pub fn evaluate(
    model: &CoupledModel,
    index: &HashIndex,
    database: &[Sample],
    queries: &[AttributeQuery],
    k_levels: &[usize],
    params: &RsParams,
    use_ecc: bool,
) -> Result<NdcgCurve> {
    if k_levels.is_empty() || k_levels.contains(&0) {
        return Err(Error::InvalidParams("k levels must be non-empty and positive".into()));
    }
    let attrs: HashMap<u64, &AttributeVector> = database.iter().map(|s| (s.id, &s.attrs)).collect();
    let k_max = *k_levels.iter().max().unwrap();

    let mut scores = Vec::with_capacity(queries.len());
    let mut excluded = 0;
    for query in queries {
        let mut code = pack(&model.encode_attributes(query.bits())?)?;
        if use_ecc {
            code = snap(&code, params)?.code;
        }
        let hits = index.top_k(&code, k_max)?;
        let lookup = |id: u64| {
            attrs
                .get(&id)
                .map(|a| relevance(query, a))
                .ok_or_else(|| Error::Format(format!("indexed id {id} missing from database")))
        };
        let ranked: Vec<u32> = hits.ids().map(lookup).collect::<Result<_>>()?;
        let all: Vec<u32> = index.entries().iter().map(|(id, _)| lookup(*id)).collect::<Result<_>>()?;
        match score_ranking(&ranked, &all, k_levels) {
            Ok(s) => scores.push(s),
            Err(Error::NoRelevantItems) => excluded += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(NdcgCurve::from_scores(k_levels, &scores, excluded))
}
