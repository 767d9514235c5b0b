//! Detection metrics: per-pair pose errors, center-gated matching, average
//! precision and whole-dataset evaluation.

mod ap;
mod evaluate;
mod matching;
mod pose;
mod variance;

pub use ap::{average_precision, precision_recall, PrCurve};
pub use evaluate::{
    evaluate, CategoryReport, Curves, EvalConfig, EvalError, EvalReport, ReportSettings, SweepPoint,
};
pub use matching::{match_detections, Matching};
pub use pose::{pixel_projection_error, rotation_error, viewpoint_errors, ViewpointErrors};
pub use variance::{annotation_variance, AnnotationVariance};

use thiserror::Error;

use crate::category::Category;
use crate::geom::OrientedBox3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("keypoint counts differ ({0} vs {1})")]
    ShapeMismatch(usize, usize),
    #[error("rotation is not orthonormal (deviation {deviation:.3e})")]
    InvalidRotation { deviation: f64 },
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
}

/// Scored detector output.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectPrediction {
    pub category: Category,
    pub bbox: OrientedBox3,
    /// In `[0, 1]`.
    pub confidence: f64,
    /// Normalized `(u, v)` of the nine keypoints. Derived from the frame's
    /// camera when absent.
    pub keypoints_2d: Option<[[f64; 2]; 9]>,
}

/// Metric values of one matched ground-truth/prediction pair. Angles are in
/// degrees, pixel error in normalized image units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRecord {
    pub iou: f64,
    pub pixel_error: f64,
    pub azimuth_error: f64,
    pub elevation_error: f64,
    pub polar_error: f64,
    pub viewpoint_error: f64,
    pub rotation_error: f64,
}
