//! Coupled two-branch hash networks.
//!
//! An image branch maps feature vectors and an attribute branch maps
//! attribute bitmaps to `d` real outputs each; the sign of an output is the
//! sample's intermediate code. Both branches are trained jointly so that
//! samples with equal bitmaps get nearby codes across the two modalities.

pub mod adam;
pub mod data;
pub mod loss;
pub mod matrix;
pub mod model_io;
pub mod net;
pub mod train;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use data::{
    read_jsonl, synth_dataset, validate_samples, write_jsonl, AttributeVector, Sample, SimilarityMatrix, SynthConfig,
};
pub use loss::{
    balance_loss, dbl_loss, match_probability, objective_with_grad, probability_from_distance, quantization_loss,
    sign_matrix, total_objective, Distance, ObjectiveParams, PROB_CLAMP,
};
pub use matrix::Matrix;
pub use model_io::{read_model, write_model};
pub use net::{Dense, FeatureNet, NetGrads};
pub use train::{
    attr_inputs, dataset_objective, image_inputs, objective_gradients, train, CoupledModel, EpochStats, TrainConfig,
    TrainedModel,
};
