//! DET and error-versus-discard (EDC) curves.

mod det;
mod edc;
mod series;

pub use det::{
    auc, det_curve, eer, eer_from_vertices, labeled_scores_to_csv, parse_labeled_scores, Class, LabeledScore,
};
pub use edc::{
    calibrate_threshold, comparisons_to_csv, edc_curve, edc_curve_at, parse_comparisons, read_comparisons, Calibration,
    ComparisonRecord, EDC_GRID_STEPS,
};
pub use series::CurveSeries;
