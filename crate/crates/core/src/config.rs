//! Flat `key = value` pipeline configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are
//! comma-separated. Unknown keys are rejected. When `margin` is absent it
//! defaults to `d / 4`.

use std::fmt;
use std::str::FromStr;

use crate::cmh::{Distance, TrainConfig};
use crate::error::{Error, Result};
use crate::eval::DEFAULT_K_LEVELS;
use crate::rscode::RsParams;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub train: TrainConfig,
    /// Symbol errors corrected by the snapping decoder.
    pub t: usize,
    pub k_levels: Vec<usize>,
    pub query_arity: usize,
    pub query_count: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            train: TrainConfig::default(),
            t: 8,
            k_levels: DEFAULT_K_LEVELS.to_vec(),
            query_arity: 2,
            query_count: 20,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Format(format!("bad value {value:?} for {key}")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| parse_num(key, v.trim())).collect()
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

impl PipelineConfig {
    pub fn seed(&self) -> u64 {
        self.train.seed
    }

    pub fn rs_params(&self) -> Result<RsParams> {
        RsParams::for_code_bits(self.train.d, self.t)
    }

    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        self.rs_params()?;
        if self.k_levels.is_empty() || self.k_levels.contains(&0) {
            return Err(Error::InvalidParams("k_levels must be a non-empty list of positive integers".into()));
        }
        if !(1..=3).contains(&self.query_arity) {
            return Err(Error::InvalidParams(format!("query_arity {} must be 1, 2 or 3", self.query_arity)));
        }
        if self.query_count == 0 {
            return Err(Error::InvalidParams("query_count must be positive".into()));
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        let mut margin = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let tc = &mut cfg.train;
            match key {
                "d" => tc.d = parse_num(key, value)?,
                "margin" => margin = Some(parse_num(key, value)?),
                "alpha" => tc.alpha = parse_num(key, value)?,
                "beta" => tc.beta = parse_num(key, value)?,
                "learning_rate" => tc.learning_rate = parse_num(key, value)?,
                "adam_beta1" => tc.adam_beta1 = parse_num(key, value)?,
                "adam_beta2" => tc.adam_beta2 = parse_num(key, value)?,
                "adam_epsilon" => tc.adam_epsilon = parse_num(key, value)?,
                "batch_size" => tc.batch_size = parse_num(key, value)?,
                "epochs" => tc.epochs = parse_num(key, value)?,
                "seed" => tc.seed = parse_num(key, value)?,
                "image_hidden" => tc.image_hidden = parse_list(key, value)?,
                "attr_hidden" => tc.attr_hidden = parse_list(key, value)?,
                "distance" => {
                    tc.distance = match value {
                        "squared" => Distance::SquaredEuclidean,
                        "euclidean" => Distance::Euclidean,
                        _ => {
                            return Err(Error::Format(format!("distance must be squared or euclidean, got {value:?}")))
                        }
                    }
                }
                "t" => cfg.t = parse_num(key, value)?,
                "k_levels" => cfg.k_levels = parse_list(key, value)?,
                "query_arity" => cfg.query_arity = parse_num(key, value)?,
                "query_count" => cfg.query_count = parse_num(key, value)?,
                _ => return Err(Error::Format(format!("line {}: unknown key {key:?}", lineno + 1))),
            }
        }
        cfg.train.margin = margin.unwrap_or(cfg.train.d as f64 / 4.0);
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for PipelineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.train;
        writeln!(f, "d = {}", t.d)?;
        writeln!(f, "margin = {}", t.margin)?;
        writeln!(f, "alpha = {}", t.alpha)?;
        writeln!(f, "beta = {}", t.beta)?;
        writeln!(f, "learning_rate = {}", t.learning_rate)?;
        writeln!(f, "adam_beta1 = {}", t.adam_beta1)?;
        writeln!(f, "adam_beta2 = {}", t.adam_beta2)?;
        writeln!(f, "adam_epsilon = {}", t.adam_epsilon)?;
        writeln!(f, "batch_size = {}", t.batch_size)?;
        writeln!(f, "epochs = {}", t.epochs)?;
        writeln!(f, "seed = {}", t.seed)?;
        writeln!(f, "image_hidden = {}", join(&t.image_hidden))?;
        writeln!(f, "attr_hidden = {}", join(&t.attr_hidden))?;
        let distance = match t.distance {
            Distance::SquaredEuclidean => "squared",
            Distance::Euclidean => "euclidean",
        };
        writeln!(f, "distance = {distance}")?;
        writeln!(f, "t = {}", self.t)?;
        writeln!(f, "k_levels = {}", join(&self.k_levels))?;
        writeln!(f, "query_arity = {}", self.query_arity)?;
        writeln!(f, "query_count = {}", self.query_count)
    }
}
