//! Finetuning the projection pair on (video, positive, negative) triples.

mod config;
mod loss;
mod optim;
mod train;

pub use config::{CeForm, LossConfig};
pub use loss::{batch_similarities, gradients, loss_coarse, loss_fine, loss_total, LossParts, Similarities, TripleBatch};
pub use optim::Adam;
pub use train::{
    evaluate, make_batch, resolve_triples, sample_frame_indices, save_trained, split_samples, train, EpochMetrics, Evaluation,
    Sample, TrainOutcome, TrainingMeta,
};
