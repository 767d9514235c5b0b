//! Dataset-level evaluation: per-frame matching and metrics, then per-category
//! average precision.
//!
//! Frames are processed independently (optionally in parallel) and the
//! per-detection outcomes are merged in a canonical order (confidence
//! descending, then frame id, then prediction index), so reports do not depend
//! on input order or the thread schedule.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    average_precision, match_detections, pixel_projection_error, rotation_error, viewpoint_errors,
    MetricRecord, ObjectPrediction,
};
use crate::camera::{project_box_keypoints, viewpoint_of, CameraError};
use crate::category::Category;
use crate::dataio::{FrameRecord, PredictionFrame};
use crate::geom::{best_symmetric_rotation, iou_3d, SymmetrySpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub iou_threshold: f64,
    pub azimuth_threshold_deg: f64,
    pub elevation_threshold_deg: f64,
    /// Categories with continuous symmetry about the vertical axis.
    pub symmetric_categories: BTreeSet<Category>,
    pub symmetry_samples: usize,
    /// Detection gate: center distance ≤ `gate_ratio ×` ground-truth diagonal.
    pub gate_ratio: f64,
    /// Worker threads; `None` uses all available cores.
    pub worker_count: Option<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            iou_threshold: 0.5,
            azimuth_threshold_deg: 15.0,
            elevation_threshold_deg: 10.0,
            symmetric_categories: [Category::Cup, Category::Bottle].into_iter().collect(),
            symmetry_samples: 100,
            gate_ratio: 0.5,
            worker_count: None,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(EvalError::InvalidConfig(format!("{name} must be positive, got {v}")))
            }
        };
        positive("iou_threshold", self.iou_threshold)?;
        positive("azimuth_threshold_deg", self.azimuth_threshold_deg)?;
        positive("elevation_threshold_deg", self.elevation_threshold_deg)?;
        positive("gate_ratio", self.gate_ratio)?;
        if self.iou_threshold > 1.0 {
            return Err(EvalError::InvalidConfig(format!("iou_threshold {} exceeds 1", self.iou_threshold)));
        }
        if self.symmetry_samples == 0 {
            return Err(EvalError::InvalidConfig("symmetry_samples must be at least 1".into()));
        }
        if self.worker_count == Some(0) {
            return Err(EvalError::InvalidConfig("worker_count must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("prediction frame `{frame_id}` has no ground-truth frame")]
    FrameKeyMismatch { frame_id: String },
    #[error("frame `{frame_id}` appears more than once")]
    DuplicateFrame { frame_id: String },
    #[error("frame `{frame_id}`, prediction {index}: {source}")]
    Camera {
        frame_id: String,
        index: usize,
        source: CameraError,
    },
    #[error(transparent)]
    Data(#[from] crate::dataio::DataError),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub threshold: f64,
    pub ap: f64,
}

/// AP as a function of the threshold for each thresholded metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curves {
    /// IoU ≥ threshold, thresholds 0, 0.05, …, 1.
    pub iou: Vec<SweepPoint>,
    /// Azimuth error ≤ threshold, 0°, 5°, …, 180°.
    pub azimuth: Vec<SweepPoint>,
    /// Elevation error ≤ threshold, 0°, 5°, …, 90°.
    pub elevation: Vec<SweepPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryReport {
    pub category: Category,
    pub num_gt: usize,
    pub num_predictions: usize,
    pub num_matched: usize,
    pub ap_iou: f64,
    pub ap_azimuth: f64,
    pub ap_elevation: f64,
    /// Means over matched pairs; `None` without matches.
    pub mean_pixel_error: Option<f64>,
    pub mean_iou: Option<f64>,
    pub mean_rotation_error: Option<f64>,
    pub mean_azimuth_error: Option<f64>,
    pub mean_elevation_error: Option<f64>,
    pub mean_polar_error: Option<f64>,
    pub mean_viewpoint_error: Option<f64>,
    pub curves: Curves,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSettings {
    pub iou_threshold: f64,
    pub azimuth_threshold_deg: f64,
    pub elevation_threshold_deg: f64,
    pub symmetric_categories: Vec<Category>,
    pub symmetry_samples: usize,
    pub gate_ratio: f64,
    pub ap_interpolation: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub settings: ReportSettings,
    /// Categories present in the ground truth or the predictions, in
    /// [`Category::ALL`] order.
    pub categories: Vec<CategoryReport>,
}

impl EvalReport {
    pub fn category(&self, category: Category) -> Option<&CategoryReport> {
        self.categories.iter().find(|c| c.category == category)
    }
}

/// Outcome of one prediction within its frame.
struct Detection {
    category: Category,
    confidence: f64,
    metrics: Option<MetricRecord>,
}

struct FrameOutcome {
    detections: Vec<Detection>,
    gt_counts: [usize; 9],
}

fn category_index(c: Category) -> usize {
    Category::ALL.iter().position(|&x| x == c).expect("category in ALL")
}

fn evaluate_frame(
    gt: &FrameRecord,
    preds: &[ObjectPrediction],
    config: &EvalConfig,
) -> Result<FrameOutcome, EvalError> {
    let mut gt_counts = [0; 9];
    for obj in &gt.objects {
        gt_counts[category_index(obj.category)] += 1;
    }
    let mut detections: Vec<Detection> = preds
        .iter()
        .map(|p| Detection {
            category: p.category,
            confidence: p.confidence,
            metrics: None,
        })
        .collect();
    let matching = match_detections(&gt.objects, preds, config.gate_ratio);
    let sym = SymmetrySpec::new(config.symmetry_samples).expect("validated sample count");
    for (gi, pi) in matching.pairs {
        let (g, p) = (&gt.objects[gi], &preds[pi]);
        let camera_err = |source| EvalError::Camera {
            frame_id: gt.frame_id.clone(),
            index: pi,
            source,
        };
        // symmetric objects are scored against the best-aligned rotation of
        // the ground truth about its vertical axis
        let (gt_box, iou) = if config.symmetric_categories.contains(&g.category) {
            let (angle, result) = best_symmetric_rotation(&g.bbox, &p.bbox, &sym);
            (g.bbox.rotated_about_local_y(angle), result.iou)
        } else {
            (g.bbox, iou_3d(&g.bbox, &p.bbox).iou)
        };
        let pred_uv = match p.keypoints_2d {
            Some(kps) => kps,
            None => project_box_keypoints(&gt.camera, &p.bbox)
                .map_err(camera_err)?
                .map(|k| [k.u, k.v]),
        };
        let pixel_error = pixel_projection_error(&g.keypoints_uv(), &pred_uv).expect("nine keypoints each");
        let vp_gt = viewpoint_of(&gt.camera, &gt_box).map_err(camera_err)?;
        let vp_pred = viewpoint_of(&gt.camera, &p.bbox).map_err(camera_err)?;
        let vp = viewpoint_errors(&vp_gt, &vp_pred);
        let rotation_error = rotation_error(gt_box.rotation(), p.bbox.rotation()).expect("validated rotations");
        detections[pi].metrics = Some(MetricRecord {
            iou,
            pixel_error,
            azimuth_error: vp.azimuth,
            elevation_error: vp.elevation,
            polar_error: vp.polar,
            viewpoint_error: vp.viewpoint,
            rotation_error,
        });
    }
    Ok(FrameOutcome { detections, gt_counts })
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn sweep(
    detections: &[(f64, Option<MetricRecord>)],
    num_gt: usize,
    thresholds: impl Iterator<Item = f64>,
    hit: impl Fn(&MetricRecord, f64) -> bool,
) -> Vec<SweepPoint> {
    thresholds
        .map(|threshold| SweepPoint {
            threshold,
            ap: ap_at(detections, num_gt, |m| hit(m, threshold)),
        })
        .collect()
}

fn ap_at(detections: &[(f64, Option<MetricRecord>)], num_gt: usize, hit: impl Fn(&MetricRecord) -> bool) -> f64 {
    let records: Vec<(f64, bool)> = detections
        .iter()
        .map(|(conf, m)| (*conf, m.as_ref().is_some_and(&hit)))
        .collect();
    average_precision(&records, num_gt)
}

fn category_report(category: Category, num_gt: usize, detections: &[(f64, Option<MetricRecord>)], config: &EvalConfig) -> CategoryReport {
    let matched: Vec<&MetricRecord> = detections.iter().filter_map(|(_, m)| m.as_ref()).collect();
    let mean_of = |f: fn(&MetricRecord) -> f64| mean(matched.iter().map(|m| f(m)));
    CategoryReport {
        category,
        num_gt,
        num_predictions: detections.len(),
        num_matched: matched.len(),
        ap_iou: ap_at(detections, num_gt, |m| m.iou >= config.iou_threshold),
        ap_azimuth: ap_at(detections, num_gt, |m| m.azimuth_error <= config.azimuth_threshold_deg),
        ap_elevation: ap_at(detections, num_gt, |m| m.elevation_error <= config.elevation_threshold_deg),
        mean_pixel_error: mean_of(|m| m.pixel_error),
        mean_iou: mean_of(|m| m.iou),
        mean_rotation_error: mean_of(|m| m.rotation_error),
        mean_azimuth_error: mean_of(|m| m.azimuth_error),
        mean_elevation_error: mean_of(|m| m.elevation_error),
        mean_polar_error: mean_of(|m| m.polar_error),
        mean_viewpoint_error: mean_of(|m| m.viewpoint_error),
        curves: Curves {
            iou: sweep(detections, num_gt, (0..=20).map(|i| i as f64 / 20.0), |m, t| m.iou >= t),
            azimuth: sweep(detections, num_gt, (0..=36).map(|i| i as f64 * 5.0), |m, t| m.azimuth_error <= t),
            elevation: sweep(detections, num_gt, (0..=18).map(|i| i as f64 * 5.0), |m, t| m.elevation_error <= t),
        },
    }
}

/// Evaluates predictions against ground truth.
///
/// Every prediction frame must have a ground-truth frame with the same id;
/// ground-truth frames without predictions count their objects as misses.
pub fn evaluate(gt: &[FrameRecord], preds: &[PredictionFrame], config: &EvalConfig) -> Result<EvalReport, EvalError> {
    config.validate()?;
    let mut gt_frames: Vec<&FrameRecord> = gt.iter().collect();
    gt_frames.sort_by(|a, b| a.frame_id.cmp(&b.frame_id));
    if let Some(dup) = gt_frames.windows(2).find(|w| w[0].frame_id == w[1].frame_id) {
        return Err(EvalError::DuplicateFrame {
            frame_id: dup[0].frame_id.clone(),
        });
    }
    let known: BTreeSet<&str> = gt_frames.iter().map(|f| f.frame_id.as_str()).collect();
    let mut by_frame: HashMap<&str, &PredictionFrame> = HashMap::with_capacity(preds.len());
    for p in preds {
        if !known.contains(p.frame_id.as_str()) {
            return Err(EvalError::FrameKeyMismatch {
                frame_id: p.frame_id.clone(),
            });
        }
        if by_frame.insert(&p.frame_id, p).is_some() {
            return Err(EvalError::DuplicateFrame {
                frame_id: p.frame_id.clone(),
            });
        }
    }

    let run = || {
        gt_frames
            .par_iter()
            .map(|g| {
                let objects = by_frame.get(g.frame_id.as_str()).map_or(&[][..], |p| &p.objects[..]);
                evaluate_frame(g, objects, config)
            })
            .collect::<Result<Vec<_>, _>>()
    };
    let outcomes = match config.worker_count {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| EvalError::Pool(e.to_string()))?
            .install(run)?,
        None => run()?,
    };

    // Frames are already in id order and detections in input order, so a
    // stable sort on confidence gives the canonical ranking.
    let mut num_gt = [0usize; 9];
    let mut ranked: Vec<Detection> = Vec::new();
    for outcome in outcomes {
        for (total, n) in num_gt.iter_mut().zip(outcome.gt_counts) {
            *total += n;
        }
        ranked.extend(outcome.detections);
    }
    ranked.sort_by(|a, b| b.confidence.total_cmp(&a.confidence));

    let categories = Category::ALL
        .into_iter()
        .filter_map(|c| {
            let detections: Vec<(f64, Option<MetricRecord>)> = ranked
                .iter()
                .filter(|d| d.category == c)
                .map(|d| (d.confidence, d.metrics))
                .collect();
            let n = num_gt[category_index(c)];
            (n > 0 || !detections.is_empty()).then(|| category_report(c, n, &detections, config))
        })
        .collect();

    Ok(EvalReport {
        settings: ReportSettings {
            iou_threshold: config.iou_threshold,
            azimuth_threshold_deg: config.azimuth_threshold_deg,
            elevation_threshold_deg: config.elevation_threshold_deg,
            symmetric_categories: config.symmetric_categories.iter().copied().collect(),
            symmetry_samples: config.symmetry_samples,
            gate_ratio: config.gate_ratio,
            ap_interpolation: "all-point",
        },
        categories,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per scalar: headline APs, means (empty threshold) and every
    /// sweep point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("category,metric,threshold,value,num_gt,num_predictions,num_matched\n");
        for c in &self.categories {
            let mut row = |metric: &str, threshold: String, value: String| {
                out.push_str(&format!(
                    "{},{metric},{threshold},{value},{},{},{}\n",
                    c.category, c.num_gt, c.num_predictions, c.num_matched
                ));
            };
            let s = &self.settings;
            row("ap_iou", s.iou_threshold.to_string(), c.ap_iou.to_string());
            row("ap_azimuth", s.azimuth_threshold_deg.to_string(), c.ap_azimuth.to_string());
            row("ap_elevation", s.elevation_threshold_deg.to_string(), c.ap_elevation.to_string());
            for (name, v) in c.means() {
                row(name, String::new(), fmt_opt(v));
            }
            for (name, curve) in [
                ("ap_iou_sweep", &c.curves.iou),
                ("ap_azimuth_sweep", &c.curves.azimuth),
                ("ap_elevation_sweep", &c.curves.elevation),
            ] {
                for p in curve {
                    row(name, p.threshold.to_string(), p.ap.to_string());
                }
            }
        }
        out
    }

    /// Metrics as rows and all nine categories as columns; `-` marks a
    /// category absent from the data or a mean without matches.
    pub fn to_markdown(&self) -> String {
        let s = &self.settings;
        let mut out = format!(
            "AP interpolation: {}; gate: center within {} × GT diagonal; symmetric: {}\n\n",
            s.ap_interpolation,
            s.gate_ratio,
            s.symmetric_categories.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(", ")
        );
        out.push_str("| metric |");
        for c in Category::ALL {
            out.push_str(&format!(" {c} |"));
        }
        out.push_str("\n|---|");
        out.push_str(&"---:|".repeat(Category::ALL.len()));
        out.push('\n');

        let cell = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
        let mut rows: Vec<(String, Box<dyn Fn(&CategoryReport) -> String>)> = vec![
            (format!("AP @ {} 3D IoU", s.iou_threshold), Box::new(move |c| cell(Some(c.ap_iou)))),
            (format!("AP @ {}° azimuth", s.azimuth_threshold_deg), Box::new(move |c| cell(Some(c.ap_azimuth)))),
            (format!("AP @ {}° elevation", s.elevation_threshold_deg), Box::new(move |c| cell(Some(c.ap_elevation)))),
        ];
        for i in 0..MEAN_NAMES.len() {
            rows.push((MEAN_LABELS[i].to_string(), Box::new(move |c| cell(c.means()[i].1))));
        }
        rows.push(("ground truth".into(), Box::new(|c| c.num_gt.to_string())));
        rows.push(("predictions".into(), Box::new(|c| c.num_predictions.to_string())));
        rows.push(("matched".into(), Box::new(|c| c.num_matched.to_string())));
        for (label, value) in rows {
            out.push_str(&format!("| {label} |"));
            for c in Category::ALL {
                let text = self.category(c).map_or("-".to_string(), &value);
                out.push_str(&format!(" {text} |"));
            }
            out.push('\n');
        }
        out
    }
}

const MEAN_NAMES: [&str; 7] = [
    "mean_pixel_error",
    "mean_iou",
    "mean_rotation_error",
    "mean_azimuth_error",
    "mean_elevation_error",
    "mean_polar_error",
    "mean_viewpoint_error",
];

const MEAN_LABELS: [&str; 7] = [
    "mean 2D keypoint error",
    "mean 3D IoU",
    "mean rotation error (°)",
    "mean azimuth error (°)",
    "mean elevation error (°)",
    "mean polar error (°)",
    "mean viewpoint error (°)",
];

impl CategoryReport {
    fn means(&self) -> [(&'static str, Option<f64>); 7] {
        let v = [
            self.mean_pixel_error,
            self.mean_iou,
            self.mean_rotation_error,
            self.mean_azimuth_error,
            self.mean_elevation_error,
            self.mean_polar_error,
            self.mean_viewpoint_error,
        ];
        std::array::from_fn(|i| (MEAN_NAMES[i], v[i]))
    }
}
