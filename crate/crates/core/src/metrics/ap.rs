/// Precision/recall after each ranked detection.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PrCurve {
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
}

/// Ranks `(confidence, is_true_positive)` records by descending confidence,
/// keeping input order among equal confidences.
fn ranked(records: &[(f64, bool)]) -> Vec<bool> {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| records[b].0.total_cmp(&records[a].0));
    order.into_iter().map(|i| records[i].1).collect()
}

pub fn precision_recall(records: &[(f64, bool)], num_gt: usize) -> PrCurve {
    let mut curve = PrCurve::default();
    let mut tp = 0usize;
    for (k, hit) in ranked(records).into_iter().enumerate() {
        tp += hit as usize;
        curve.precision.push(tp as f64 / (k + 1) as f64);
        curve.recall.push(if num_gt == 0 { 0.0 } else { tp as f64 / num_gt as f64 });
    }
    curve
}

/// Area under the precision envelope (all-point interpolation). Zero when
/// there is no ground truth.
pub fn average_precision(records: &[(f64, bool)], num_gt: usize) -> f64 {
    if num_gt == 0 {
        return 0.0;
    }
    let curve = precision_recall(records, num_gt);
    let mut envelope = curve.precision.clone();
    for i in (0..envelope.len().saturating_sub(1)).rev() {
        envelope[i] = envelope[i].max(envelope[i + 1]);
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (r, p) in curve.recall.iter().zip(&envelope) {
        ap += (r - prev_recall) * p;
        prev_recall = *r;
    }
    ap
}
