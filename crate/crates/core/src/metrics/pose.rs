use super::MetricsError;
use crate::camera::Viewpoint;
use crate::geom::{rotation_deviation, Mat3, ROTATION_TOLERANCE};

/// Mean Euclidean distance between corresponding keypoints.
pub fn pixel_projection_error(gt: &[[f64; 2]], pred: &[[f64; 2]]) -> Result<f64, MetricsError> {
    if gt.len() != pred.len() {
        return Err(MetricsError::ShapeMismatch(gt.len(), pred.len()));
    }
    if gt.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = gt
        .iter()
        .zip(pred)
        .map(|(a, b)| (a[0] - b[0]).hypot(a[1] - b[1]))
        .sum();
    Ok(total / gt.len() as f64)
}

/// Geodesic angle between two rotations in degrees, in `[0, 180]`.
pub fn rotation_error(gt: &Mat3, pred: &Mat3) -> Result<f64, MetricsError> {
    for r in [gt, pred] {
        let deviation = rotation_deviation(r);
        if !(deviation <= ROTATION_TOLERANCE) {
            return Err(MetricsError::InvalidRotation { deviation });
        }
    }
    let cos = (((gt.transpose() * pred).trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    Ok(cos.acos().to_degrees())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewpointErrors {
    pub azimuth: f64,
    pub elevation: f64,
    /// Difference of polar angles `90° − elevation`; equal to `elevation`.
    pub polar: f64,
    /// Angle between the two view directions.
    pub viewpoint: f64,
}

pub fn viewpoint_errors(gt: &Viewpoint, pred: &Viewpoint) -> ViewpointErrors {
    let daz = (gt.azimuth - pred.azimuth).abs().rem_euclid(360.0);
    let elevation = (gt.elevation - pred.elevation).abs();
    let polar = ((90.0 - gt.elevation) - (90.0 - pred.elevation)).abs();
    let cos = gt.direction().dot(&pred.direction()).clamp(-1.0, 1.0);
    ViewpointErrors {
        azimuth: daz.min(360.0 - daz),
        elevation,
        polar,
        viewpoint: cos.acos().to_degrees(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{rot_x, rot_y, rot_z};
    use approx::assert_abs_diff_eq;
    use nalgebra::UnitQuaternion;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pixel_error_cases() {
        let gt: Vec<[f64; 2]> = (0..9).map(|i| [i as f64 * 0.1, 0.5]).collect();
        assert_eq!(pixel_projection_error(&gt, &gt).unwrap(), 0.0);
        let shifted: Vec<[f64; 2]> = gt.iter().map(|p| [p[0] + 0.03, p[1] + 0.04]).collect();
        assert_abs_diff_eq!(pixel_projection_error(&gt, &shifted).unwrap(), 0.05, epsilon = 1e-15);
        assert_eq!(pixel_projection_error(&gt, &gt[..8]), Err(MetricsError::ShapeMismatch(9, 8)));
    }

    #[test]
    fn pixel_error_random_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a: Vec<[f64; 2]> = (0..9).map(|_| [rng.gen(), rng.gen()]).collect();
        let b: Vec<[f64; 2]> = (0..9).map(|_| [rng.gen(), rng.gen()]).collect();
        let mut expected = 0.0;
        for i in 0..9 {
            let dx = a[i][0] - b[i][0];
            let dy = a[i][1] - b[i][1];
            expected += (dx * dx + dy * dy).sqrt() / 9.0;
        }
        assert_abs_diff_eq!(pixel_projection_error(&a, &b).unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn rotation_error_cases() {
        let r = rot_x(0.4) * rot_z(1.0);
        assert_abs_diff_eq!(rotation_error(&r, &r).unwrap(), 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(rotation_error(&r, &(r * rot_y(30f64.to_radians()))).unwrap(), 30.0, epsilon = 1e-9);
        assert_abs_diff_eq!(rotation_error(&r, &(r * rot_y(std::f64::consts::PI))).unwrap(), 180.0, epsilon = 1e-6);
        let bad = Mat3::new(1.0, 0.2, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(rotation_error(&r, &bad), Err(MetricsError::InvalidRotation { .. })));
    }

    #[test]
    fn rotation_error_matches_quaternion_angle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let qa: UnitQuaternion<f64> = UnitQuaternion::from_euler_angles(rng.gen_range(-3.0..3.0), rng.gen_range(-1.5..1.5), rng.gen_range(-3.0..3.0));
            let qb = UnitQuaternion::from_euler_angles(rng.gen_range(-3.0..3.0), rng.gen_range(-1.5..1.5), rng.gen_range(-3.0..3.0));
            // angle of the relative quaternion: 2·acos(|w|)
            let rel = qa.inverse() * qb;
            let expected = 2.0 * rel.w.abs().min(1.0).acos().to_degrees();
            let got = rotation_error(qa.to_rotation_matrix().matrix(), qb.to_rotation_matrix().matrix()).unwrap();
            assert_abs_diff_eq!(got, expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn viewpoint_error_cases() {
        let a = Viewpoint { azimuth: 10.0, elevation: 30.0 };
        let zero = viewpoint_errors(&a, &a);
        assert_eq!((zero.azimuth, zero.elevation, zero.polar), (0.0, 0.0, 0.0));
        assert_abs_diff_eq!(zero.viewpoint, 0.0, epsilon = 1e-6);
        let wrap = viewpoint_errors(
            &Viewpoint { azimuth: 179.0, elevation: 0.0 },
            &Viewpoint { azimuth: -179.0, elevation: 0.0 },
        );
        assert_abs_diff_eq!(wrap.azimuth, 2.0, epsilon = 1e-12);
        let quarter = viewpoint_errors(
            &Viewpoint { azimuth: 0.0, elevation: 0.0 },
            &Viewpoint { azimuth: 90.0, elevation: 0.0 },
        );
        assert_abs_diff_eq!(quarter.viewpoint, 90.0, epsilon = 1e-12);
        let el = viewpoint_errors(
            &Viewpoint { azimuth: 0.0, elevation: 20.0 },
            &Viewpoint { azimuth: 0.0, elevation: 45.0 },
        );
        assert_eq!(el.elevation, 25.0);
        assert_eq!(el.polar, el.elevation);
    }
}
