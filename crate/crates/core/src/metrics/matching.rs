use super::ObjectPrediction;
use crate::dataio::ObjectAnnotation;

/// One-to-one assignment of predictions to ground truth. Indices refer to the
/// input slices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    /// `(gt index, prediction index)` in the order predictions were processed.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_gt: Vec<usize>,
    pub unmatched_predictions: Vec<usize>,
}

/// Greedy center-distance matching.
///
/// Predictions are visited by descending confidence (input order on ties).
/// Each claims the nearest unclaimed ground truth of the same category whose
/// center lies within `gate_ratio × diagonal` of the ground-truth box.
pub fn match_detections(gt: &[ObjectAnnotation], preds: &[ObjectPrediction], gate_ratio: f64) -> Matching {
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&a, &b| preds[b].confidence.total_cmp(&preds[a].confidence));
    let mut claimed = vec![false; gt.len()];
    let mut matching = Matching::default();
    for pi in order {
        let pred = &preds[pi];
        let mut best: Option<(usize, f64)> = None;
        for (gi, g) in gt.iter().enumerate() {
            if claimed[gi] || g.category != pred.category {
                continue;
            }
            let dist = (g.bbox.center() - pred.bbox.center()).norm();
            if dist > gate_ratio * g.bbox.diagonal() {
                continue;
            }
            if best.is_none_or(|(_, d)| dist < d) {
                best = Some((gi, dist));
            }
        }
        match best {
            Some((gi, _)) => {
                claimed[gi] = true;
                matching.pairs.push((gi, pi));
            }
            None => matching.unmatched_predictions.push(pi),
        }
    }
    matching.unmatched_gt = (0..gt.len()).filter(|&i| !claimed[i]).collect();
    matching
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::{intrinsics_matrix, CameraFrame};
    use crate::category::Category;
    use crate::geom::{OrientedBox3, Vec3};

    fn camera() -> CameraFrame {
        CameraFrame::look_at(
            Vec3::new(0.0, 2.0, -6.0),
            Vec3::zeros(),
            Vec3::y(),
            intrinsics_matrix(500.0, 500.0, 240.0, 320.0),
            480,
            640,
        )
        .unwrap()
    }

    fn gt_at(id: &str, category: Category, x: f64) -> ObjectAnnotation {
        let b = OrientedBox3::axis_aligned(Vec3::new(x, 0.0, 0.0), Vec3::repeat(1.0)).unwrap();
        ObjectAnnotation::new(id, category, b, &camera()).unwrap()
    }

    fn pred_at(category: Category, x: f64, confidence: f64) -> ObjectPrediction {
        ObjectPrediction {
            category,
            bbox: OrientedBox3::axis_aligned(Vec3::new(x, 0.0, 0.0), Vec3::repeat(1.0)).unwrap(),
            confidence,
            keypoints_2d: None,
        }
    }

    #[test]
    fn identical_pose_matches() {
        let m = match_detections(&[gt_at("a", Category::Cup, 0.0)], &[pred_at(Category::Cup, 0.0, 0.7)], 0.5);
        assert_eq!(m.pairs, vec![(0, 0)]);
        assert!(m.unmatched_gt.is_empty() && m.unmatched_predictions.is_empty());
    }

    #[test]
    fn far_prediction_unmatched() {
        let diag = 3f64.sqrt();
        let m = match_detections(&[gt_at("a", Category::Cup, 0.0)], &[pred_at(Category::Cup, 10.0 * diag, 0.9)], 0.5);
        assert!(m.pairs.is_empty());
        assert_eq!(m.unmatched_gt, vec![0]);
        assert_eq!(m.unmatched_predictions, vec![0]);
    }

    #[test]
    fn higher_confidence_claims_first() {
        // gate radius 0.5·√3 ≈ 0.866; the 0.9 prediction is 0.8 away
        let gt = [gt_at("a", Category::Chair, 0.0)];
        let preds = [pred_at(Category::Chair, 0.0, 0.5), pred_at(Category::Chair, 0.8, 0.9)];
        let m = match_detections(&gt, &preds, 0.5);
        assert_eq!(m.pairs, vec![(0, 1)]);
        assert_eq!(m.unmatched_predictions, vec![0]);
    }

    #[test]
    fn category_must_agree() {
        let m = match_detections(&[gt_at("a", Category::Cup, 0.0)], &[pred_at(Category::Bottle, 0.0, 1.0)], 0.5);
        assert!(m.pairs.is_empty());
    }

    #[test]
    fn nearest_gt_and_stable_ties() {
        let gt = [gt_at("a", Category::Shoe, 0.0), gt_at("b", Category::Shoe, 0.6)];
        let m = match_detections(&gt, &[pred_at(Category::Shoe, 0.5, 1.0)], 0.5);
        assert_eq!(m.pairs, vec![(1, 0)]);
        let preds = [pred_at(Category::Shoe, 0.0, 0.8), pred_at(Category::Shoe, 0.0, 0.8)];
        let m = match_detections(&gt[..1], &preds, 0.5);
        assert_eq!(m.pairs, vec![(0, 0)]);
        assert_eq!(m.unmatched_predictions, vec![1]);
    }
}
