//! Geometry kernel: oriented boxes, face clipping, convex hull volume and
//! exact oriented 3D IoU.

mod clip;
mod hull;
mod iou;

pub use clip::{clip_polygon_to_aabb, ConvexPolygon3};
pub use hull::{convex_hull_volume, dedup_points};
pub use iou::{
    best_symmetric_rotation, clipped_faces, intersection_points, iou_3d, iou_3d_symmetric,
    IoUResult, SymmetrySpec,
};

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Maximum `‖RᵀR − I‖∞` (and `|det R − 1|`) accepted for a rotation matrix.
pub const ROTATION_TOLERANCE: f64 = 1e-4;

/// Relative tolerance used for point/plane classification. Multiplied by a
/// length scale (the diagonal of the reference box) before use.
pub const RELATIVE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("rotation is not orthonormal with det +1 (deviation {deviation:.3e})")]
    InvalidRotation { deviation: f64 },
    #[error("scale components must be strictly positive, got ({0}, {1}, {2})")]
    NonPositiveScale(f64, f64, f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(&'static str),
}

/// Unordered cloud of 3D points.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud3(pub Vec<Vec3>);

impl PointCloud3 {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.0
    }
}

/// Largest deviation of `r` from a proper rotation: max of `‖RᵀR − I‖∞` and
/// `|det R − 1|`.
pub fn rotation_deviation(r: &Mat3) -> f64 {
    let gram = r.transpose() * r - Mat3::identity();
    let ortho = gram.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    ortho.max((r.determinant() - 1.0).abs())
}

pub fn validate_rotation(r: &Mat3) -> Result<(), GeometryError> {
    if r.iter().any(|v| !v.is_finite()) {
        return Err(GeometryError::NonFinite("rotation"));
    }
    let deviation = rotation_deviation(r);
    if deviation > ROTATION_TOLERANCE {
        return Err(GeometryError::InvalidRotation { deviation });
    }
    Ok(())
}

/// Rotation about the x axis by `angle` radians.
pub fn rot_x(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

/// Rotation about the y (up) axis by `angle` radians. Maps +z towards +x.
pub fn rot_y(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Rotation about the z axis by `angle` radians.
pub fn rot_z(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Rotation matrix from a unit quaternion `(w, x, y, z)`. The quaternion is
/// normalized first; a zero quaternion is rejected.
pub fn rotation_from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Result<Mat3, GeometryError> {
    let norm = (w * w + x * x + y * y + z * z).sqrt();
    if !norm.is_finite() || norm < 1e-12 {
        return Err(GeometryError::NonFinite("quaternion"));
    }
    let q = nalgebra::UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(w, x, y, z));
    Ok(*q.to_rotation_matrix().matrix())
}

/// A 9-DoF box: `vertex = R · diag(scale) · u + t` for unit-cube corners
/// `u ∈ {−½, +½}³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox3 {
    rotation: Mat3,
    translation: Vec3,
    scale: Vec3,
}

impl OrientedBox3 {
    pub fn new(rotation: Mat3, translation: Vec3, scale: Vec3) -> Result<Self, GeometryError> {
        validate_rotation(&rotation)?;
        if translation.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite("translation"));
        }
        if scale.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite("scale"));
        }
        if scale.iter().any(|&v| v <= 0.0) {
            return Err(GeometryError::NonPositiveScale(scale.x, scale.y, scale.z));
        }
        Ok(Self {
            rotation,
            translation,
            scale,
        })
    }

    /// Builds a box from values derived from already-valid boxes.
    pub(crate) fn from_parts_unchecked(rotation: Mat3, translation: Vec3, scale: Vec3) -> Self {
        debug_assert!(rotation_deviation(&rotation) < ROTATION_TOLERANCE);
        Self {
            rotation,
            translation,
            scale,
        }
    }

    pub fn axis_aligned(center: Vec3, scale: Vec3) -> Result<Self, GeometryError> {
        Self::new(Mat3::identity(), center, scale)
    }

    /// Unit cube centered at the origin.
    pub fn unit() -> Self {
        Self::from_parts_unchecked(Mat3::identity(), Vec3::zeros(), Vec3::repeat(1.0))
    }

    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }

    pub fn translation(&self) -> &Vec3 {
        &self.translation
    }

    pub fn center(&self) -> Vec3 {
        self.translation
    }

    pub fn scale(&self) -> &Vec3 {
        &self.scale
    }

    pub fn half_extents(&self) -> Vec3 {
        self.scale * 0.5
    }

    pub fn volume(&self) -> f64 {
        self.scale.x * self.scale.y * self.scale.z
    }

    pub fn diagonal(&self) -> f64 {
        self.scale.norm()
    }

    /// The eight corners. Vertex `k` is the unit corner with x = ±½ by `k < 4`,
    /// y = ±½ by `k % 4 < 2` and z = ±½ by parity of `k`.
    pub fn vertices(&self) -> [Vec3; 8] {
        let m = self.rotation * Mat3::from_diagonal(&self.scale);
        std::array::from_fn(|k| m * unit_corner(k) + self.translation)
    }

    /// Center followed by the eight corners, the standard keypoint layout.
    pub fn keypoints(&self) -> [Vec3; 9] {
        let v = self.vertices();
        std::array::from_fn(|i| if i == 0 { self.translation } else { v[i - 1] })
    }

    /// Expresses a world point in the box's rigid local frame (not scaled).
    pub fn to_local(&self, p: &Vec3) -> Vec3 {
        self.rotation.transpose() * (p - self.translation)
    }

    /// Maps a point from the box's rigid local frame back to world.
    pub fn to_world(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    /// Applies the similarity `p ↦ factor · (rotation · p) + translation`.
    pub fn transformed(&self, rotation: &Mat3, translation: &Vec3, factor: f64) -> Result<Self, GeometryError> {
        validate_rotation(rotation)?;
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(GeometryError::NonPositiveScale(factor, factor, factor));
        }
        Self::new(
            rotation * self.rotation,
            factor * (rotation * self.translation) + translation,
            self.scale * factor,
        )
    }

    /// The same box rotated by `angle` radians about its own local y axis.
    pub fn rotated_about_local_y(&self, angle: f64) -> Self {
        Self::from_parts_unchecked(self.rotation * rot_y(angle), self.translation, self.scale)
    }

    /// The box's six faces as convex polygons, counterclockwise about their
    /// outward normals.
    pub fn faces(&self) -> [ConvexPolygon3; 6] {
        let v = self.vertices();
        FACE_INDICES.map(|f| ConvexPolygon3::from_vertices_unchecked(f.iter().map(|&i| v[i]).collect()))
    }
}

/// Vertex indices of each face, counterclockwise about the outward normal:
/// −x, +x, −y, +y, −z, +z.
pub(crate) const FACE_INDICES: [[usize; 4]; 6] = [
    [0, 1, 3, 2],
    [4, 6, 7, 5],
    [0, 4, 5, 1],
    [2, 3, 7, 6],
    [0, 2, 6, 4],
    [1, 5, 7, 3],
];

fn unit_corner(k: usize) -> Vec3 {
    let sx = if k < 4 { -0.5 } else { 0.5 };
    let sy = if k % 4 < 2 { -0.5 } else { 0.5 };
    let sz = if k % 2 == 0 { -0.5 } else { 0.5 };
    Vec3::new(sx, sy, sz)
}

/// `y` expressed in the canonical frame of `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalPair {
    /// Half-extents of `x`, which is axis-aligned at the origin in this frame.
    pub half_extents: Vec3,
    /// `y` mapped by the inverse rigid pose of `x`. Its scale is untouched.
    pub other: OrientedBox3,
}

/// Rigidly maps both boxes by the inverse pose of `x`.
pub fn canonicalize_pair(x: &OrientedBox3, y: &OrientedBox3) -> CanonicalPair {
    let rt = x.rotation.transpose();
    CanonicalPair {
        half_extents: x.half_extents(),
        other: OrientedBox3::from_parts_unchecked(
            rt * y.rotation,
            rt * (y.translation - x.translation),
            y.scale,
        ),
    }
}

pub fn box_vertices(b: &OrientedBox3) -> [Vec3; 8] {
    b.vertices()
}
