//! Pinhole camera: keypoint projection and object viewpoint angles.
//!
//! View space is x right, y up, z along the optical axis (a left-handed frame
//! with +y up). Image coordinates are normalized to `[0, 1]` with `v` growing
//! downwards. Azimuth 0 means the camera sits on the object's front axis,
//! which is the box's local +z.

use nalgebra::Matrix4;
use thiserror::Error;

use crate::geom::{rotation_deviation, Mat3, OrientedBox3, Vec3, ROTATION_TOLERANCE};

pub type Mat4 = Matrix4<f64>;

/// Allowed deviation between `view` and `inverse(camera_to_world)`.
pub const VIEW_TOLERANCE: f64 = 1e-6;

/// Near/far planes used when deriving a projection matrix from intrinsics.
pub const DEFAULT_NEAR: f64 = 0.05;
pub const DEFAULT_FAR: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CameraError {
    #[error("point is behind the camera (depth {depth})")]
    BehindCamera { depth: f64 },
    #[error("camera center coincides with the box center")]
    Degenerate,
    #[error("camera_to_world is not a rigid transform (deviation {deviation:.3e})")]
    NotRigid { deviation: f64 },
    #[error("view is not the inverse of camera_to_world (deviation {deviation:.3e})")]
    ViewMismatch { deviation: f64 },
    #[error("projection disagrees with the intrinsics (deviation {deviation:.3e})")]
    ProjectionMismatch { deviation: f64 },
    #[error("intrinsics carry skew {0}; only skewless cameras are supported")]
    Skew(f64),
    #[error("invalid intrinsics: {0}")]
    Intrinsics(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

/// Normalized image position plus view-space depth in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedPoint {
    pub u: f64,
    pub v: f64,
    pub depth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewpoint {
    /// Degrees in `[−180, 180)`.
    pub azimuth: f64,
    /// Degrees in `[−90, 90]`.
    pub elevation: f64,
}

impl Viewpoint {
    /// Unit direction from the object towards the camera, in the object frame.
    pub fn direction(&self) -> Vec3 {
        let (az, el) = (self.azimuth.to_radians(), self.elevation.to_radians());
        Vec3::new(el.cos() * az.sin(), el.sin(), el.cos() * az.cos())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraFrame {
    intrinsics: Mat3,
    camera_to_world: Mat4,
    view: Mat4,
    projection: Mat4,
    image_width: u32,
    image_height: u32,
}

impl CameraFrame {
    pub fn new(
        intrinsics: Mat3,
        camera_to_world: Mat4,
        view: Mat4,
        projection: Mat4,
        image_width: u32,
        image_height: u32,
    ) -> Result<Self, CameraError> {
        if intrinsics.iter().any(|v| !v.is_finite()) {
            return Err(CameraError::NonFinite("intrinsics"));
        }
        if camera_to_world.iter().any(|v| !v.is_finite()) {
            return Err(CameraError::NonFinite("camera_to_world"));
        }
        if view.iter().any(|v| !v.is_finite()) {
            return Err(CameraError::NonFinite("view"));
        }
        if projection.iter().any(|v| !v.is_finite()) {
            return Err(CameraError::NonFinite("projection"));
        }
        validate_intrinsics(&intrinsics, image_width, image_height)?;
        let rot: Mat3 = camera_to_world.fixed_view::<3, 3>(0, 0).into();
        let bottom = camera_to_world.row(3) - nalgebra::RowVector4::new(0.0, 0.0, 0.0, 1.0);
        let deviation = rotation_deviation(&rot).max(bottom.abs().max());
        if deviation > ROTATION_TOLERANCE {
            return Err(CameraError::NotRigid { deviation });
        }
        let inverse = rigid_inverse(&camera_to_world);
        let deviation = (view - inverse).abs().max();
        if deviation > VIEW_TOLERANCE {
            return Err(CameraError::ViewMismatch { deviation });
        }
        // rows 0, 1 and 3 follow from the intrinsics; row 2 only encodes the
        // depth range, which is the producer's choice
        let expected = projection_from_intrinsics(&intrinsics, image_width, image_height, DEFAULT_NEAR, DEFAULT_FAR);
        let deviation = [0, 1, 3]
            .into_iter()
            .map(|r| (projection.row(r) - expected.row(r)).abs().max())
            .fold(0.0, f64::max);
        if deviation > VIEW_TOLERANCE {
            return Err(CameraError::ProjectionMismatch { deviation });
        }
        Ok(Self {
            intrinsics,
            camera_to_world,
            view,
            projection,
            image_width,
            image_height,
        })
    }

    /// Camera at `eye` looking at `target` with `up` as the approximate up
    /// direction. The view and projection matrices are derived.
    pub fn look_at(
        eye: Vec3,
        target: Vec3,
        up: Vec3,
        intrinsics: Mat3,
        image_width: u32,
        image_height: u32,
    ) -> Result<Self, CameraError> {
        let forward = target - eye;
        if forward.norm() < 1e-12 {
            return Err(CameraError::Degenerate);
        }
        let forward = forward.normalize();
        let right = up.cross(&forward);
        if right.norm() < 1e-12 {
            return Err(CameraError::Degenerate);
        }
        let right = right.normalize();
        let true_up = forward.cross(&right);
        let rot = Mat3::from_columns(&[right, true_up, forward]);
        let camera_to_world = rigid(&rot, &eye);
        let view = rigid_inverse(&camera_to_world);
        let projection =
            projection_from_intrinsics(&intrinsics, image_width, image_height, DEFAULT_NEAR, DEFAULT_FAR);
        Self::new(intrinsics, camera_to_world, view, projection, image_width, image_height)
    }

    pub fn intrinsics(&self) -> &Mat3 {
        &self.intrinsics
    }

    pub fn camera_to_world(&self) -> &Mat4 {
        &self.camera_to_world
    }

    pub fn view(&self) -> &Mat4 {
        &self.view
    }

    pub fn projection(&self) -> &Mat4 {
        &self.projection
    }

    pub fn image_width(&self) -> u32 {
        self.image_width
    }

    pub fn image_height(&self) -> u32 {
        self.image_height
    }

    pub fn center(&self) -> Vec3 {
        self.camera_to_world.fixed_view::<3, 1>(0, 3).into()
    }

    /// Pinhole projection of a world point. Fails for points with view-space
    /// depth ≤ 0.
    pub fn project_point(&self, world_point: &Vec3) -> Result<ProjectedPoint, CameraError> {
        let p = self.view * world_point.push(1.0);
        let depth = p.z;
        if !(depth > 0.0) {
            return Err(CameraError::BehindCamera { depth });
        }
        let k = &self.intrinsics;
        let (fx, fy, cx, cy) = (k[(0, 0)], k[(1, 1)], k[(0, 2)], k[(1, 2)]);
        Ok(ProjectedPoint {
            u: (fx * p.x / depth + cx) / self.image_width as f64,
            v: (cy - fy * p.y / depth) / self.image_height as f64,
            depth,
        })
    }
}

fn validate_intrinsics(k: &Mat3, width: u32, height: u32) -> Result<(), CameraError> {
    if k[(0, 1)] != 0.0 {
        return Err(CameraError::Skew(k[(0, 1)]));
    }
    if k[(1, 0)] != 0.0 || k[(2, 0)] != 0.0 || k[(2, 1)] != 0.0 || k[(2, 2)] != 1.0 {
        return Err(CameraError::Intrinsics("expected [[fx,0,cx],[0,fy,cy],[0,0,1]]".into()));
    }
    if width == 0 || height == 0 {
        return Err(CameraError::Intrinsics("image size must be positive".into()));
    }
    let (fx, fy, cx, cy) = (k[(0, 0)], k[(1, 1)], k[(0, 2)], k[(1, 2)]);
    if !(fx > 0.0 && fy > 0.0) {
        return Err(CameraError::Intrinsics(format!("focal lengths must be positive, got ({fx}, {fy})")));
    }
    if !(cx > 0.0 && cx < width as f64 && cy > 0.0 && cy < height as f64) {
        return Err(CameraError::Intrinsics(format!(
            "principal point ({cx}, {cy}) outside the {width}x{height} image"
        )));
    }
    Ok(())
}

pub fn intrinsics_matrix(fx: f64, fy: f64, cx: f64, cy: f64) -> Mat3 {
    Mat3::new(fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0)
}

/// Homogeneous 4×4 matrix of the rigid transform `p ↦ R p + t`.
pub fn rigid(rotation: &Mat3, translation: &Vec3) -> Mat4 {
    let mut m = Mat4::identity();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(rotation);
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(translation);
    m
}

/// Inverse of a rigid transform using the transpose of its rotation block.
pub fn rigid_inverse(m: &Mat4) -> Mat4 {
    let rt: Mat3 = m.fixed_view::<3, 3>(0, 0).transpose();
    let t: Vec3 = m.fixed_view::<3, 1>(0, 3).into();
    rigid(&rt, &(-(rt * t)))
}

/// OpenGL-style clip-space matrix equivalent to the pinhole intrinsics for a
/// +z-forward, +y-up view space: NDC x = 2u − 1 and NDC y = 1 − 2v.
pub fn projection_from_intrinsics(k: &Mat3, width: u32, height: u32, near: f64, far: f64) -> Mat4 {
    let (w, h) = (width as f64, height as f64);
    let (fx, fy, cx, cy) = (k[(0, 0)], k[(1, 1)], k[(0, 2)], k[(1, 2)]);
    #[rustfmt::skip]
    let m = Mat4::new(
        2.0 * fx / w, 0.0, 2.0 * cx / w - 1.0, 0.0,
        0.0, 2.0 * fy / h, 1.0 - 2.0 * cy / h, 0.0,
        0.0, 0.0, (far + near) / (far - near), -2.0 * far * near / (far - near),
        0.0, 0.0, 1.0, 0.0,
    );
    m
}

/// Projects the center and the eight corners of `b` (keypoint order of
/// [`OrientedBox3::keypoints`]).
pub fn project_box_keypoints(cam: &CameraFrame, b: &OrientedBox3) -> Result<[ProjectedPoint; 9], CameraError> {
    let kps = b.keypoints();
    let mut out = [ProjectedPoint { u: 0.0, v: 0.0, depth: 0.0 }; 9];
    for (slot, kp) in out.iter_mut().zip(kps.iter()) {
        *slot = cam.project_point(kp)?;
    }
    Ok(out)
}

pub fn project_point(cam: &CameraFrame, world_point: &Vec3) -> Result<ProjectedPoint, CameraError> {
    cam.project_point(world_point)
}

/// Azimuth and elevation of the camera as seen from the box, in the box's
/// local frame.
pub fn viewpoint_of(cam: &CameraFrame, b: &OrientedBox3) -> Result<Viewpoint, CameraError> {
    viewpoint_from_offset(&b.to_local(&cam.center()))
}

/// Viewpoint of an object-frame offset from the object to the camera.
pub fn viewpoint_from_offset(offset: &Vec3) -> Result<Viewpoint, CameraError> {
    let len = offset.norm();
    if !(len > 1e-9) {
        return Err(CameraError::Degenerate);
    }
    let d = offset / len;
    let elevation = d.y.clamp(-1.0, 1.0).asin().to_degrees();
    let horizontal = d.x.hypot(d.z);
    let azimuth = if horizontal < 1e-12 {
        0.0
    } else {
        wrap_degrees(d.x.atan2(d.z).to_degrees())
    };
    Ok(Viewpoint { azimuth, elevation })
}

/// Wraps an angle in degrees into `[−180, 180)`.
pub fn wrap_degrees(angle: f64) -> f64 {
    let wrapped = (angle + 180.0).rem_euclid(360.0) - 180.0;
    if wrapped >= 180.0 {
        wrapped - 360.0
    } else {
        wrapped
    }
}
