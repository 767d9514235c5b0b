//! Brute-force reference values: Monte-Carlo IoU by rejection sampling.
//!
//! Nothing here shares code with the clipping/hull path in [`crate::geom`]
//! beyond the box type itself.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::geom::{Mat3, OrientedBox3, Vec3};

/// Samples drawn per independently seeded stream.
const BATCH: u64 = 1 << 16;

/// Slack on the unit-cube test, relative to the box's own size.
const CONTAINMENT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    sample_count: u64,
    pub seed: u64,
}

impl McConfig {
    /// `None` when `sample_count` is zero.
    pub fn new(sample_count: u64, seed: u64) -> Option<Self> {
        (sample_count >= 1).then_some(Self { sample_count, seed })
    }

    pub fn sample_count(&self) -> u64 {
        self.sample_count
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub iou: f64,
    /// Binomial standard error of `iou` given the number of union hits.
    pub standard_error: f64,
    pub hits_both: u64,
    pub hits_either: u64,
    pub samples: u64,
}

/// Point-in-box test through the inverse pose: `|diag(s)⁻¹ Rᵀ (p − t)|ᵢ ≤ ½`.
/// The boundary is inclusive.
pub fn point_in_box(b: &OrientedBox3, p: &Vec3) -> bool {
    LocalTest::new(b).contains(p)
}

struct LocalTest {
    to_unit: Mat3,
    center: Vec3,
}

impl LocalTest {
    fn new(b: &OrientedBox3) -> Self {
        let inv_scale = Mat3::from_diagonal(&b.scale().map(|s| 1.0 / s));
        Self {
            to_unit: inv_scale * b.rotation().transpose(),
            center: *b.translation(),
        }
    }

    fn contains(&self, p: &Vec3) -> bool {
        let u = self.to_unit * (p - self.center);
        u.iter().all(|c| c.abs() <= 0.5 + CONTAINMENT_SLACK)
    }
}

/// Monte-Carlo IoU over uniform samples of the axis-aligned bounding volume of
/// both boxes' corners. Deterministic for a fixed seed and sample count,
/// independent of the thread schedule.
pub fn mc_iou(x: &OrientedBox3, y: &OrientedBox3, cfg: &McConfig) -> McEstimate {
    let mut lo = Vec3::repeat(f64::MAX);
    let mut hi = Vec3::repeat(f64::MIN);
    for v in x.vertices().iter().chain(y.vertices().iter()) {
        lo = lo.inf(v);
        hi = hi.sup(v);
    }
    let (tx, ty) = (LocalTest::new(x), LocalTest::new(y));
    let batches = cfg.sample_count.div_ceil(BATCH);
    let (hits_both, hits_either) = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let n = BATCH.min(cfg.sample_count - batch * BATCH);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(batch);
            let mut both = 0u64;
            let mut either = 0u64;
            for _ in 0..n {
                let p = Vec3::new(
                    rng.gen_range(lo.x..=hi.x),
                    rng.gen_range(lo.y..=hi.y),
                    rng.gen_range(lo.z..=hi.z),
                );
                let (in_x, in_y) = (tx.contains(&p), ty.contains(&p));
                both += (in_x && in_y) as u64;
                either += (in_x || in_y) as u64;
            }
            (both, either)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let (iou, standard_error) = if hits_either == 0 {
        (0.0, 0.0)
    } else {
        let p = hits_both as f64 / hits_either as f64;
        (p, (p * (1.0 - p) / hits_either as f64).sqrt())
    };
    McEstimate {
        iou,
        standard_error,
        hits_both,
        hits_either,
        samples: cfg.sample_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{rot_x, rot_y, rot_z};
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    fn cfg(n: u64) -> McConfig {
        McConfig::new(n, 42).unwrap()
    }

    #[test]
    fn identical_boxes_are_exact() {
        let b = OrientedBox3::unit();
        let est = mc_iou(&b, &b, &cfg(1_000_000));
        assert_eq!(est.iou, 1.0);
        assert_eq!(est.standard_error, 0.0);
        assert_eq!(est.samples, 1_000_000);
    }

    #[test]
    fn offset_cubes_near_one_third() {
        let y = OrientedBox3::axis_aligned(Vec3::new(0.5, 0.0, 0.0), Vec3::repeat(1.0)).unwrap();
        let est = mc_iou(&OrientedBox3::unit(), &y, &cfg(1_000_000));
        assert!((est.iou - 1.0 / 3.0).abs() < 3.0 * est.standard_error + 1e-12, "{est:?}");
        assert!(est.standard_error < 0.001);
    }

    #[test]
    fn rotated_case_within_three_sigma() {
        let y = OrientedBox3::new(rot_z(FRAC_PI_4), Vec3::zeros(), Vec3::repeat(1.0)).unwrap();
        let est = mc_iou(&OrientedBox3::unit(), &y, &cfg(1_000_000));
        assert!((est.iou - SQRT_2 / 2.0).abs() < 3.0 * est.standard_error, "{est:?}");
    }

    #[test]
    fn deterministic_for_seed() {
        let x = OrientedBox3::new(rot_x(0.3), Vec3::zeros(), Vec3::new(1.0, 2.0, 0.5)).unwrap();
        let y = OrientedBox3::new(rot_y(0.8), Vec3::new(0.3, 0.2, 0.0), Vec3::repeat(1.0)).unwrap();
        assert_eq!(mc_iou(&x, &y, &cfg(200_000)), mc_iou(&x, &y, &cfg(200_000)));
        let other = mc_iou(&x, &y, &McConfig::new(200_000, 43).unwrap());
        assert_ne!(other.hits_both, mc_iou(&x, &y, &cfg(200_000)).hits_both);
    }

    #[test]
    fn point_in_box_cases() {
        let b = OrientedBox3::new(rot_y(0.6) * rot_x(0.1), Vec3::new(1.0, 2.0, 3.0), Vec3::new(1.0, 0.5, 2.0)).unwrap();
        assert!(point_in_box(&b, &b.center()));
        let far = b.center() + Vec3::new(2.0 * b.diagonal(), 0.0, 0.0);
        assert!(!point_in_box(&b, &far));
        for corner in b.vertices() {
            assert!(point_in_box(&b, &corner));
        }
        assert!(McConfig::new(0, 1).is_none());
    }
}
