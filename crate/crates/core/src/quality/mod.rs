//! Native quality measure, score files and the baseline distortion detector.

mod baseline;
mod features;
mod nqm;
mod scores;

pub use baseline::{
    logistic_gradient, logistic_loss, manifest_features, score_images, train_baseline, train_logistic, BaselineConfig,
    BaselineModel, TrainingRun,
};
pub use features::radial_features;
pub use nqm::{nqm, Logits};
pub use scores::{parse_scores, read_scores, scores_to_csv, write_scores, ScoreRecord};
