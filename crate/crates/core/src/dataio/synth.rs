//! Deterministic synthetic scenes for exercising the evaluation pipeline.
//!
//! Each sequence places a few boxes on the ground plane (`y = 0`) and orbits a
//! camera around them. Predictions are the ground truth with optional noise.
//! A "marked" subset of objects can additionally receive an exact yaw offset
//! and a lower confidence, so that which detections pass an angular threshold
//! is known in advance.

use nalgebra::{Rotation3, Unit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, UnitSphere};
use serde::{Deserialize, Serialize};

use super::{DataError, FrameRecord, ObjectAnnotation, PredictionFrame};
use crate::camera::{intrinsics_matrix, project_box_keypoints, CameraFrame};
use crate::category::Category;
use crate::geom::{rot_y, Mat3, OrientedBox3, Vec3};
use crate::metrics::ObjectPrediction;

/// Image size of generated cameras (portrait phone frame).
const IMAGE_WIDTH: u32 = 480;
const IMAGE_HEIGHT: u32 = 640;
const FOCAL: f64 = 500.0;
/// Distance between neighbouring boxes in a scene.
const SPACING: f64 = 2.0;
const MAX_ELEVATION_DEG: f64 = 85.0;
const MIN_ELEVATION_DEG: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AzimuthMode {
    /// Orbit start drawn uniformly, frames evenly spaced around the scene;
    /// boxes get uniform random yaw.
    Uniform,
    /// Every box faces the camera: box-local azimuth is exactly 0.
    Front,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitSpec {
    /// Camera distance from the scene center, plus half the scene length.
    pub radius: f64,
    pub elevation_mean_deg: f64,
    pub elevation_std_deg: f64,
    pub azimuth: AzimuthMode,
}

impl Default for OrbitSpec {
    fn default() -> Self {
        Self {
            radius: 4.0,
            elevation_mean_deg: 45.0,
            elevation_std_deg: 10.0,
            azimuth: AzimuthMode::Uniform,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSpec {
    /// Angle of a random-axis rotation applied to every prediction.
    pub rotation_std_deg: f64,
    /// Per-axis center offset in meters.
    pub translation_std: f64,
    /// Per-axis relative scale change.
    pub scale_std_frac: f64,
    /// Exact rotation about the box's own vertical axis for marked objects.
    pub yaw_offset_deg: f64,
    /// Fraction of objects that are marked. Object `i` (counted over all
    /// frames in output order) is marked when `⌊(i+1)f⌋ > ⌊if⌋`, so exactly
    /// `⌊Nf⌋` of `N` objects are marked.
    pub yaw_offset_fraction: f64,
    /// Confidence of marked predictions; the others get 1.0.
    pub perturbed_confidence: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            rotation_std_deg: 0.0,
            translation_std: 0.0,
            scale_std_frac: 0.0,
            yaw_offset_deg: 0.0,
            yaw_offset_fraction: 0.0,
            perturbed_confidence: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub seed: u64,
    /// Instances cycle through this list, so repeating a category weights it.
    pub categories: Vec<Category>,
    pub sequences: usize,
    pub frames_per_sequence: usize,
    pub instances_per_sequence: usize,
    pub orbit: OrbitSpec,
    pub noise: NoiseSpec,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            categories: Category::ALL.to_vec(),
            sequences: 9,
            frames_per_sequence: 10,
            instances_per_sequence: 1,
            orbit: OrbitSpec::default(),
            noise: NoiseSpec::default(),
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), DataError> {
        let fail = |msg: String| Err(DataError::InvalidSpec(msg));
        if self.categories.is_empty() {
            return fail("categories must not be empty".into());
        }
        for (name, n) in [
            ("sequences", self.sequences),
            ("frames_per_sequence", self.frames_per_sequence),
            ("instances_per_sequence", self.instances_per_sequence),
        ] {
            if n == 0 {
                return fail(format!("{name} must be at least 1"));
            }
        }
        let o = &self.orbit;
        if !(o.radius.is_finite() && o.radius >= 1.0) {
            return fail(format!("orbit.radius must be at least 1, got {}", o.radius));
        }
        if !(MIN_ELEVATION_DEG..=MAX_ELEVATION_DEG).contains(&o.elevation_mean_deg) {
            return fail(format!(
                "orbit.elevation_mean_deg must lie in [{MIN_ELEVATION_DEG}, {MAX_ELEVATION_DEG}], got {}",
                o.elevation_mean_deg
            ));
        }
        let n = &self.noise;
        for (name, v) in [
            ("orbit.elevation_std_deg", o.elevation_std_deg),
            ("noise.rotation_std_deg", n.rotation_std_deg),
            ("noise.translation_std", n.translation_std),
            ("noise.scale_std_frac", n.scale_std_frac),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return fail(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        if !n.yaw_offset_deg.is_finite() {
            return fail("noise.yaw_offset_deg must be finite".into());
        }
        for (name, v) in [
            ("noise.yaw_offset_fraction", n.yaw_offset_fraction),
            ("noise.perturbed_confidence", n.perturbed_confidence),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return fail(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        Ok(())
    }
}

/// Nominal box size (width, height, depth) in meters. Cups and bottles have
/// square horizontal cross-sections.
fn nominal_size(category: Category) -> Vec3 {
    let [w, h, d] = match category {
        Category::Bike => [0.6, 1.0, 1.7],
        Category::Book => [0.17, 0.24, 0.04],
        Category::Bottle => [0.08, 0.26, 0.08],
        Category::Camera => [0.13, 0.09, 0.08],
        Category::CerealBox => [0.2, 0.3, 0.07],
        Category::Chair => [0.5, 0.9, 0.55],
        Category::Cup => [0.09, 0.1, 0.09],
        Category::Laptop => [0.33, 0.22, 0.25],
        Category::Shoe => [0.1, 0.11, 0.28],
    };
    Vec3::new(w, h, d)
}

fn is_marked(index: usize, fraction: f64) -> bool {
    ((index + 1) as f64 * fraction).floor() > (index as f64 * fraction).floor()
}

struct Scene {
    instances: Vec<(String, Category, OrientedBox3)>,
    target: Vec3,
    /// Orbit azimuth of the first frame, radians.
    start: f64,
}

fn build_scene(spec: &SyntheticSpec, sequence: usize, rng: &mut ChaCha8Rng) -> Result<Scene, DataError> {
    let n = spec.instances_per_sequence;
    let front = spec.orbit.azimuth == AzimuthMode::Front;
    let mut instances = Vec::with_capacity(n);
    for i in 0..n {
        let category = spec.categories[(sequence * n + i) % spec.categories.len()];
        let (fx, fy, fz) = (rng.gen_range(0.85..1.15), rng.gen_range(0.85..1.15), rng.gen_range(0.85..1.15));
        let fz = if matches!(category, Category::Cup | Category::Bottle) { fx } else { fz };
        let size = nominal_size(category).component_mul(&Vec3::new(fx, fy, fz));
        let yaw: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        // front scenes line the boxes up along the viewing axis
        let offset = (i as f64 - (n - 1) as f64 / 2.0) * SPACING;
        let (rotation, center) = if front {
            (Mat3::identity(), Vec3::new(0.0, size.y / 2.0, offset))
        } else {
            (rot_y(yaw), Vec3::new(offset, size.y / 2.0, 0.0))
        };
        let bbox = OrientedBox3::new(rotation, center, size).map_err(|e| DataError::InvalidSpec(e.to_string()))?;
        instances.push((format!("{}_{i}", category.as_str()), category, bbox));
    }
    let height = instances.iter().map(|(_, _, b)| b.center().y).sum::<f64>() / n as f64;
    Ok(Scene {
        instances,
        target: Vec3::new(0.0, height, 0.0),
        start: rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
    })
}

fn frame_camera(spec: &SyntheticSpec, scene: &Scene, frame: usize, rng: &mut ChaCha8Rng) -> Result<CameraFrame, DataError> {
    let o = &spec.orbit;
    let elevation_noise = Normal::new(0.0, o.elevation_std_deg).expect("validated std");
    let elevation = (o.elevation_mean_deg + elevation_noise.sample(rng))
        .clamp(MIN_ELEVATION_DEG, MAX_ELEVATION_DEG)
        .to_radians();
    let azimuth = match o.azimuth {
        AzimuthMode::Front => 0.0,
        AzimuthMode::Uniform => scene.start + std::f64::consts::TAU * frame as f64 / spec.frames_per_sequence as f64,
    };
    let half_length = (spec.instances_per_sequence - 1) as f64 * SPACING / 2.0;
    let distance = o.radius + half_length;
    let direction = Vec3::new(elevation.cos() * azimuth.sin(), elevation.sin(), elevation.cos() * azimuth.cos());
    // in front mode the camera sits past the last box on +z
    let eye = scene.target + direction * distance;
    CameraFrame::look_at(
        eye,
        scene.target,
        Vec3::y(),
        intrinsics_matrix(FOCAL, FOCAL, IMAGE_WIDTH as f64 / 2.0, IMAGE_HEIGHT as f64 / 2.0),
        IMAGE_WIDTH,
        IMAGE_HEIGHT,
    )
    .map_err(|e| DataError::InvalidSpec(format!("camera placement failed: {e}")))
}

struct Perturber {
    rotation: Normal<f64>,
    translation: Normal<f64>,
    scale: Normal<f64>,
}

impl Perturber {
    fn new(noise: &NoiseSpec) -> Self {
        Self {
            rotation: Normal::new(0.0, noise.rotation_std_deg.to_radians()).expect("validated std"),
            translation: Normal::new(0.0, noise.translation_std).expect("validated std"),
            scale: Normal::new(0.0, noise.scale_std_frac).expect("validated std"),
        }
    }

    fn apply(&self, b: &OrientedBox3, rng: &mut ChaCha8Rng) -> Result<OrientedBox3, DataError> {
        let axis: [f64; 3] = UnitSphere.sample(rng);
        let angle = self.rotation.sample(rng);
        let mut rotation = *b.rotation();
        if angle != 0.0 {
            let jitter = Rotation3::from_axis_angle(&Unit::new_normalize(Vec3::from(axis)), angle);
            rotation *= jitter.matrix();
        }
        let shift = Vec3::from_fn(|_, _| self.translation.sample(rng));
        let factors = Vec3::from_fn(|_, _| (1.0 + self.scale.sample(rng)).max(0.1));
        OrientedBox3::new(rotation, b.center() + shift, b.scale().component_mul(&factors))
            .map_err(|e| DataError::InvalidSpec(format!("perturbed box invalid: {e}")))
    }
}

/// Generates a ground-truth stream and a matching prediction stream.
///
/// Output is a pure function of the spec. Ground truth depends only on the
/// scene parameters, so changing the noise keeps the same scenes.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(Vec<FrameRecord>, Vec<PredictionFrame>), DataError> {
    spec.validate()?;
    let mut scene_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    noise_rng.set_stream(1);
    let perturber = Perturber::new(&spec.noise);
    let yaw_offset = spec.noise.yaw_offset_deg.to_radians();

    let frame_count = spec.sequences * spec.frames_per_sequence;
    let mut gt = Vec::with_capacity(frame_count);
    let mut preds = Vec::with_capacity(frame_count);
    let mut object_index = 0usize;
    for s in 0..spec.sequences {
        let scene = build_scene(spec, s, &mut scene_rng)?;
        for f in 0..spec.frames_per_sequence {
            let camera = frame_camera(spec, &scene, f, &mut scene_rng)?;
            let frame_id = format!("seq_{s:04}/{f:06}");
            let mut objects = Vec::with_capacity(scene.instances.len());
            let mut predicted = Vec::with_capacity(scene.instances.len());
            for (id, category, bbox) in &scene.instances {
                let annotation = ObjectAnnotation::new(id.clone(), *category, *bbox, &camera)
                    .map_err(|e| DataError::InvalidSpec(format!("{frame_id} {id}: {e}")))?;
                let mut perturbed = perturber.apply(bbox, &mut noise_rng)?;
                let marked = is_marked(object_index, spec.noise.yaw_offset_fraction);
                object_index += 1;
                if marked && yaw_offset != 0.0 {
                    perturbed = perturbed.rotated_about_local_y(yaw_offset);
                }
                let prediction = if perturbed == *bbox {
                    annotation.as_prediction()
                } else {
                    ObjectPrediction {
                        category: *category,
                        bbox: perturbed,
                        confidence: 1.0,
                        keypoints_2d: project_box_keypoints(&camera, &perturbed)
                            .ok()
                            .map(|kps| kps.map(|k| [k.u, k.v])),
                    }
                };
                let confidence = if marked { spec.noise.perturbed_confidence } else { 1.0 };
                predicted.push(ObjectPrediction { confidence, ..prediction });
                objects.push(annotation);
            }
            preds.push(PredictionFrame {
                frame_id: frame_id.clone(),
                camera: None,
                objects: predicted,
            });
            gt.push(FrameRecord { frame_id, camera, objects });
        }
    }
    Ok((gt, preds))
}
