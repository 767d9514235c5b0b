use super::MetricsError;
use crate::geom::{Mat3, OrientedBox3, Vec3};

/// Spread of repeated annotations of one object instance: degrees, meters,
/// meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnotationVariance {
    pub orientation_std_deg: f64,
    pub translation_std_m: f64,
    pub scale_std_m: f64,
}

impl std::fmt::Display for AnnotationVariance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "orientation {:.1}°, translation {:.0}cm, scale {:.0}cm",
            self.orientation_std_deg,
            self.translation_std_m * 100.0,
            self.scale_std_m * 100.0
        )
    }
}

/// Projection of `m` onto SO(3) (nearest rotation in Frobenius norm).
fn project_to_rotation(m: &Mat3) -> Mat3 {
    let svd = m.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let d = (u * v_t).determinant().signum();
    u * Mat3::from_diagonal(&Vec3::new(1.0, 1.0, d)) * v_t
}

fn rms(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v * v, n + 1));
    (sum / n as f64).sqrt()
}

/// Root-mean-square deviation of each annotation from the mean annotation:
/// geodesic angle to the chordal mean rotation, distance to the mean center,
/// and mean edge length relative to its average.
pub fn annotation_variance(boxes: &[OrientedBox3]) -> Result<AnnotationVariance, MetricsError> {
    if boxes.len() < 2 {
        return Err(MetricsError::TooFewSamples(boxes.len()));
    }
    let n = boxes.len() as f64;
    let mean_rotation = project_to_rotation(&boxes.iter().map(|b| *b.rotation()).sum::<Mat3>());
    let mean_center = boxes.iter().map(|b| b.center()).sum::<Vec3>() / n;
    let edge = |b: &OrientedBox3| b.scale().sum() / 3.0;
    let mean_edge = boxes.iter().map(edge).sum::<f64>() / n;
    let angle = |b: &OrientedBox3| {
        let cos = (((mean_rotation.transpose() * b.rotation()).trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
        cos.acos().to_degrees()
    };
    Ok(AnnotationVariance {
        orientation_std_deg: rms(boxes.iter().map(angle)),
        translation_std_m: rms(boxes.iter().map(|b| (b.center() - mean_center).norm())),
        scale_std_m: rms(boxes.iter().map(|b| edge(b) - mean_edge)),
    })
}
