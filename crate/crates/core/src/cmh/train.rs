use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::adam::{adam_step, AdamConfig, AdamState};
use super::data::{validate_samples, AttributeVector, Sample, SimilarityMatrix};
use super::loss::{objective_with_grad, sign_matrix, total_objective, Distance, ObjectiveParams};
use super::matrix::Matrix;
use super::net::{FeatureNet, NetGrads};
use crate::codec::IntermediateCode;
use crate::error::{Error, Result};

/// Training hyper-parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    /// Intermediate code length in bits; a multiple of 8.
    pub d: usize,
    /// Logistic margin of the match probability.
    pub margin: f64,
    pub alpha: f64,
    pub beta: f64,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub image_hidden: Vec<usize>,
    pub attr_hidden: Vec<usize>,
    pub distance: Distance,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig::with_code_bits(256)
    }
}

impl TrainConfig {
    /// Defaults for a `d`-bit code; the margin is `d / 4`.
    pub fn with_code_bits(d: usize) -> Self {
        TrainConfig {
            d,
            margin: d as f64 / 4.0,
            alpha: 1.0,
            beta: 1.0,
            learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            batch_size: 128,
            epochs: 30,
            seed: 0,
            image_hidden: vec![256],
            attr_hidden: vec![256, 256],
            distance: Distance::SquaredEuclidean,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.d == 0 || !self.d.is_multiple_of(8) {
            return bad(format!("code length d = {} must be a positive multiple of 8", self.d));
        }
        if self.batch_size < 2 {
            return bad(format!("batch size {} must be at least 2", self.batch_size));
        }
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return bad(format!("margin {} must be positive", self.margin));
        }
        if !(self.alpha >= 0.0 && self.beta >= 0.0) {
            return bad("alpha and beta must be non-negative".into());
        }
        if !(self.learning_rate > 0.0 && self.adam_epsilon > 0.0) {
            return bad("learning rate and Adam epsilon must be positive".into());
        }
        if !((0.0..1.0).contains(&self.adam_beta1) && (0.0..1.0).contains(&self.adam_beta2)) {
            return bad("Adam betas must lie in [0, 1)".into());
        }
        if self.image_hidden.contains(&0) || self.attr_hidden.contains(&0) {
            return bad("hidden layer widths must be positive".into());
        }
        Ok(())
    }

    pub fn objective_params(&self) -> ObjectiveParams {
        ObjectiveParams { margin: self.margin, alpha: self.alpha, beta: self.beta, distance: self.distance }
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.adam_beta1,
            beta2: self.adam_beta2,
            epsilon: self.adam_epsilon,
        }
    }
}

/// The two hash branches: image features and attribute bitmaps.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledModel {
    pub image_net: FeatureNet,
    pub attr_net: FeatureNet,
}

impl CoupledModel {
    pub fn init(cfg: &TrainConfig, feature_dim: usize, attributes: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        let dims = |input: usize, hidden: &[usize]| {
            let mut v = vec![input];
            v.extend_from_slice(hidden);
            v.push(cfg.d);
            v
        };
        Ok(CoupledModel {
            image_net: FeatureNet::new(&dims(feature_dim, &cfg.image_hidden), rng)?,
            attr_net: FeatureNet::new(&dims(attributes, &cfg.attr_hidden), rng)?,
        })
    }

    pub fn from_nets(image_net: FeatureNet, attr_net: FeatureNet) -> Result<Self> {
        if image_net.output_dim() != attr_net.output_dim() {
            return Err(Error::InvalidParams(format!(
                "branch outputs differ: {} vs {}",
                image_net.output_dim(),
                attr_net.output_dim()
            )));
        }
        Ok(CoupledModel { image_net, attr_net })
    }

    pub fn code_bits(&self) -> usize {
        self.image_net.output_dim()
    }

    pub fn feature_dim(&self) -> usize {
        self.image_net.input_dim()
    }

    pub fn attributes(&self) -> usize {
        self.attr_net.input_dim()
    }

    /// Sign code of an image feature vector.
    pub fn encode_image(&self, features: &[f64]) -> Result<IntermediateCode> {
        check_dim(self.feature_dim(), features.len())?;
        let out = self.image_net.forward(&Matrix::from_vec(1, features.len(), features.to_vec()));
        Ok(IntermediateCode::from_real(out.row(0)))
    }

    /// Sign code of an attribute bitmap.
    pub fn encode_attributes(&self, attrs: &AttributeVector) -> Result<IntermediateCode> {
        check_dim(self.attributes(), attrs.len())?;
        let out = self.attr_net.forward(&Matrix::from_vec(1, attrs.len(), attrs.to_input()));
        Ok(IntermediateCode::from_real(out.row(0)))
    }

    pub fn image_outputs(&self, samples: &[Sample]) -> Result<Matrix> {
        Ok(self.image_net.forward(&image_inputs(samples, self.feature_dim())?))
    }

    pub fn attr_outputs(&self, samples: &[Sample]) -> Result<Matrix> {
        Ok(self.attr_net.forward(&attr_inputs(samples, self.attributes())?))
    }
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}

pub fn image_inputs(samples: &[Sample], dim: usize) -> Result<Matrix> {
    let mut m = Matrix::zeros(samples.len(), dim);
    for (r, s) in samples.iter().enumerate() {
        check_dim(dim, s.features.len())?;
        m.row_mut(r).copy_from_slice(&s.features);
    }
    Ok(m)
}

pub fn attr_inputs(samples: &[Sample], dim: usize) -> Result<Matrix> {
    let mut m = Matrix::zeros(samples.len(), dim);
    for (r, s) in samples.iter().enumerate() {
        check_dim(dim, s.attrs.len())?;
        m.row_mut(r).copy_from_slice(&s.attrs.to_input());
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub objective: f64,
}

/// A trained model with the binary code matrices of the training set
/// (one ±1 row per sample) and the per-epoch objective.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel {
    pub model: CoupledModel,
    pub image_codes: Matrix,
    pub attr_codes: Matrix,
    pub initial_objective: f64,
    pub history: Vec<EpochStats>,
}

/// Splits `order` into batches of `size`; a trailing batch with fewer than
/// two samples is merged into the one before it.
fn batches(order: &[usize], size: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = order.chunks(size).map(<[usize]>::to_vec).collect();
    if out.len() > 1 && out.last().is_some_and(|b| b.len() < 2) {
        let tail = out.pop().unwrap();
        out.last_mut().unwrap().extend(tail);
    }
    out
}

/// Objective of the whole training set under the fixed batching used for
/// reporting: consecutive batches in sample order.
pub fn dataset_objective(
    model: &CoupledModel,
    samples: &[Sample],
    sim: &SimilarityMatrix,
    image_codes: &Matrix,
    attr_codes: &Matrix,
    cfg: &TrainConfig,
) -> Result<f64> {
    let f = model.image_outputs(samples)?;
    let g = model.attr_outputs(samples)?;
    let order: Vec<usize> = (0..samples.len()).collect();
    let params = cfg.objective_params();
    Ok(batches(&order, cfg.batch_size)
        .iter()
        .map(|b| {
            total_objective(
                &f.select_rows(b),
                &g.select_rows(b),
                &image_codes.select_rows(b),
                &attr_codes.select_rows(b),
                &sim.submatrix(b),
                &params,
            )
        })
        .sum())
}

/// Objective value of one batch and its gradients for both branches,
/// with the code matrices held constant.
pub fn objective_gradients(
    model: &CoupledModel,
    image_in: &Matrix,
    attr_in: &Matrix,
    image_codes: &Matrix,
    attr_codes: &Matrix,
    sim: &SimilarityMatrix,
    params: &ObjectiveParams,
) -> (f64, NetGrads, NetGrads) {
    let fx = model.image_net.forward_cached(image_in);
    let gy = model.attr_net.forward_cached(attr_in);
    let og = objective_with_grad(&fx.output, &gy.output, image_codes, attr_codes, sim, params);
    let gi = model.image_net.backward(&fx, &og.grad_f);
    let ga = model.attr_net.backward(&gy, &og.grad_g);
    (og.value, gi, ga)
}

/// Alternating minimization. Each epoch shuffles the samples; each batch
/// takes one Adam step on the image branch with the attribute branch
/// fixed, then one on the attribute branch. Code matrices are refreshed to
/// `sign` of the branch outputs at the end of every epoch.
pub fn train(samples: &[Sample], sim: &SimilarityMatrix, cfg: &TrainConfig) -> Result<TrainedModel> {
    cfg.validate()?;
    let (attributes, feature_dim) = validate_samples(samples)?;
    if sim.len() != samples.len() {
        return Err(Error::LengthMismatch { expected: samples.len(), actual: sim.len() });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = CoupledModel::init(cfg, feature_dim, attributes, &mut rng)?;
    let image_in = image_inputs(samples, feature_dim)?;
    let attr_in = attr_inputs(samples, attributes)?;
    let params = cfg.objective_params();
    let adam = cfg.adam();
    let mut image_state = AdamState::new(model.image_net.param_count());
    let mut attr_state = AdamState::new(model.attr_net.param_count());

    let mut image_codes = sign_matrix(&model.image_net.forward(&image_in));
    let mut attr_codes = sign_matrix(&model.attr_net.forward(&attr_in));
    let initial_objective = dataset_objective(&model, samples, sim, &image_codes, &attr_codes, cfg)?;
    if !initial_objective.is_finite() {
        return Err(Error::NonFiniteLoss { epoch: 0, batch: 0 });
    }

    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        for (b, batch) in batches(&order, cfg.batch_size).iter().enumerate() {
            let x = image_in.select_rows(batch);
            let y = attr_in.select_rows(batch);
            let cx = image_codes.select_rows(batch);
            let cy = attr_codes.select_rows(batch);
            let s = sim.submatrix(batch);

            let fx = model.image_net.forward_cached(&x);
            let g = model.attr_net.forward(&y);
            let og = objective_with_grad(&fx.output, &g, &cx, &cy, &s, &params);
            if !og.value.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, batch: b });
            }
            let grads = model.image_net.backward(&fx, &og.grad_f).flatten();
            adam_step(model.image_net.params_mut(), &grads, &mut image_state, &adam);

            let f = model.image_net.forward(&x);
            let gy = model.attr_net.forward_cached(&y);
            let og = objective_with_grad(&f, &gy.output, &cx, &cy, &s, &params);
            if !og.value.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, batch: b });
            }
            let grads = model.attr_net.backward(&gy, &og.grad_g).flatten();
            adam_step(model.attr_net.params_mut(), &grads, &mut attr_state, &adam);
        }

        image_codes = sign_matrix(&model.image_net.forward(&image_in));
        attr_codes = sign_matrix(&model.attr_net.forward(&attr_in));
        let objective = dataset_objective(&model, samples, sim, &image_codes, &attr_codes, cfg)?;
        if !objective.is_finite() {
            return Err(Error::NonFiniteLoss { epoch, batch: 0 });
        }
        history.push(EpochStats { epoch, objective });
    }

    Ok(TrainedModel { model, image_codes, attr_codes, initial_objective, history })
}
