//! Wire representation of frame lines and conversion to validated records.

use serde::{Deserialize, Serialize};

use super::records::{FrameRecord, ObjectAnnotation, PredictionFrame, KEYPOINT_TOLERANCE};
use crate::camera::{project_box_keypoints, CameraError, CameraFrame, Mat4, ProjectedPoint};
use crate::category::Category;
use crate::geom::{rotation_from_quaternion, GeometryError, Mat3, OrientedBox3, Vec3};
use crate::metrics::ObjectPrediction;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct CameraWire {
    pub intrinsics: [[f64; 3]; 3],
    pub camera_to_world: [[f64; 4]; 4],
    pub view: [[f64; 4]; 4],
    pub projection: [[f64; 4]; 4],
    pub image_width: u32,
    pub image_height: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct BoxWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<[[f64; 3]; 3]>,
    /// Alternative to `rotation`: `(w, x, y, z)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quaternion: Option<[f64; 4]>,
    pub translation: [f64; 3],
    pub scale: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct ObjectWire {
    pub instance_id: String,
    pub category: Category,
    #[serde(rename = "box")]
    pub bbox: BoxWire,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keypoints_3d: Option<[[f64; 3]; 9]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keypoints_2d: Option<[[f64; 3]; 9]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct FrameWire {
    pub frame_id: String,
    pub camera: CameraWire,
    pub objects: Vec<ObjectWire>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct PredictionWire {
    pub category: Category,
    #[serde(rename = "box")]
    pub bbox: BoxWire,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    /// Nine `[u, v]` or `[u, v, depth]` entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keypoints_2d: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct PredictionFrameWire {
    pub frame_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub camera: Option<CameraWire>,
    pub objects: Vec<PredictionWire>,
}

/// A validation failure with the dotted path of the offending field.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Invalid {
    pub path: String,
    pub message: String,
}

fn invalid(path: impl Into<String>, message: impl ToString) -> Invalid {
    Invalid {
        path: path.into(),
        message: message.to_string(),
    }
}

fn mat3(rows: &[[f64; 3]; 3]) -> Mat3 {
    Mat3::from_fn(|r, c| rows[r][c])
}

fn mat4(rows: &[[f64; 4]; 4]) -> Mat4 {
    Mat4::from_fn(|r, c| rows[r][c])
}

fn rows3(m: &Mat3) -> [[f64; 3]; 3] {
    std::array::from_fn(|r| std::array::from_fn(|c| m[(r, c)]))
}

fn rows4(m: &Mat4) -> [[f64; 4]; 4] {
    std::array::from_fn(|r| std::array::from_fn(|c| m[(r, c)]))
}

impl CameraWire {
    pub fn from_camera(cam: &CameraFrame) -> Self {
        Self {
            intrinsics: rows3(cam.intrinsics()),
            camera_to_world: rows4(cam.camera_to_world()),
            view: rows4(cam.view()),
            projection: rows4(cam.projection()),
            image_width: cam.image_width(),
            image_height: cam.image_height(),
        }
    }

    pub fn to_camera(&self, prefix: &str) -> Result<CameraFrame, Invalid> {
        CameraFrame::new(
            mat3(&self.intrinsics),
            mat4(&self.camera_to_world),
            mat4(&self.view),
            mat4(&self.projection),
            self.image_width,
            self.image_height,
        )
        .map_err(|e| {
            let field = match &e {
                CameraError::NotRigid { .. } => "camera_to_world",
                CameraError::ViewMismatch { .. } => "view",
                CameraError::ProjectionMismatch { .. } => "projection",
                CameraError::NonFinite(name) => name,
                _ => "intrinsics",
            };
            invalid(format!("{prefix}.{field}"), e)
        })
    }
}

impl BoxWire {
    pub fn from_box(b: &OrientedBox3) -> Self {
        Self {
            rotation: Some(rows3(b.rotation())),
            quaternion: None,
            translation: (*b.translation()).into(),
            scale: (*b.scale()).into(),
        }
    }

    pub fn to_box(&self, prefix: &str) -> Result<OrientedBox3, Invalid> {
        let rotation = match (&self.rotation, &self.quaternion) {
            (Some(r), None) => mat3(r),
            (None, Some(q)) => rotation_from_quaternion(q[0], q[1], q[2], q[3])
                .map_err(|e| invalid(format!("{prefix}.quaternion"), e))?,
            (Some(_), Some(_)) => return Err(invalid(prefix, "give either `rotation` or `quaternion`, not both")),
            (None, None) => return Err(invalid(prefix, "missing `rotation` (or `quaternion`)")),
        };
        OrientedBox3::new(rotation, Vec3::from(self.translation), Vec3::from(self.scale)).map_err(|e| {
            let field = match &e {
                GeometryError::NonPositiveScale(..) => "scale",
                GeometryError::NonFinite(name) => name,
                _ => "rotation",
            };
            invalid(format!("{prefix}.{field}"), e)
        })
    }
}

impl FrameWire {
    pub fn from_record(frame: &FrameRecord) -> Self {
        Self {
            frame_id: frame.frame_id.clone(),
            camera: CameraWire::from_camera(&frame.camera),
            objects: frame
                .objects
                .iter()
                .map(|o| ObjectWire {
                    instance_id: o.instance_id.clone(),
                    category: o.category,
                    bbox: BoxWire::from_box(&o.bbox),
                    keypoints_3d: Some(o.keypoints_3d.map(Into::into)),
                    keypoints_2d: Some(o.keypoints_2d.map(|p| [p.u, p.v, p.depth])),
                })
                .collect(),
        }
    }

    pub fn into_record(self) -> Result<FrameRecord, Invalid> {
        if self.frame_id.is_empty() {
            return Err(invalid("frame_id", "must be non-empty"));
        }
        let camera = self.camera.to_camera("camera")?;
        let mut objects: Vec<ObjectAnnotation> = Vec::with_capacity(self.objects.len());
        for (i, obj) in self.objects.into_iter().enumerate() {
            let prefix = format!("objects[{i}]");
            if objects.iter().any(|o| o.instance_id == obj.instance_id) {
                return Err(invalid(format!("{prefix}.instance_id"), format!("duplicate `{}`", obj.instance_id)));
            }
            let bbox = obj.bbox.to_box(&format!("{prefix}.box"))?;
            let expected_3d = bbox.keypoints();
            let keypoints_3d = match obj.keypoints_3d {
                Some(given) => {
                    let given = given.map(Vec3::from);
                    let dev = given.iter().zip(&expected_3d).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max);
                    if !(dev <= KEYPOINT_TOLERANCE) {
                        return Err(invalid(
                            format!("{prefix}.keypoints_3d"),
                            format!("deviates from the box corners by {dev:.3e} m"),
                        ));
                    }
                    given
                }
                None => expected_3d,
            };
            let expected_2d = project_box_keypoints(&camera, &bbox)
                .map_err(|e| invalid(format!("{prefix}.keypoints_2d"), e))?;
            let keypoints_2d = match obj.keypoints_2d {
                Some(given) => {
                    let given = given.map(|[u, v, depth]| ProjectedPoint { u, v, depth });
                    let dev = given
                        .iter()
                        .zip(&expected_2d)
                        .map(|(a, b)| (a.u - b.u).abs().max((a.v - b.v).abs()).max((a.depth - b.depth).abs()))
                        .fold(0.0, f64::max);
                    if !(dev <= KEYPOINT_TOLERANCE) {
                        return Err(invalid(
                            format!("{prefix}.keypoints_2d"),
                            format!("deviates from the projected box by {dev:.3e}"),
                        ));
                    }
                    given
                }
                None => expected_2d,
            };
            objects.push(ObjectAnnotation {
                instance_id: obj.instance_id,
                category: obj.category,
                bbox,
                keypoints_3d,
                keypoints_2d,
            });
        }
        Ok(FrameRecord {
            frame_id: self.frame_id,
            camera,
            objects,
        })
    }
}

impl PredictionFrameWire {
    pub fn from_frame(frame: &PredictionFrame) -> Self {
        Self {
            frame_id: frame.frame_id.clone(),
            camera: frame.camera.as_ref().map(CameraWire::from_camera),
            objects: frame
                .objects
                .iter()
                .map(|p| PredictionWire {
                    category: p.category,
                    bbox: BoxWire::from_box(&p.bbox),
                    confidence: Some(p.confidence),
                    keypoints_2d: p.keypoints_2d.map(|kps| kps.iter().map(|k| k.to_vec()).collect()),
                })
                .collect(),
        }
    }

    pub fn into_frame(self) -> Result<PredictionFrame, Invalid> {
        if self.frame_id.is_empty() {
            return Err(invalid("frame_id", "must be non-empty"));
        }
        let camera = self.camera.map(|c| c.to_camera("camera")).transpose()?;
        let mut objects = Vec::with_capacity(self.objects.len());
        for (i, obj) in self.objects.into_iter().enumerate() {
            let prefix = format!("objects[{i}]");
            let bbox = obj.bbox.to_box(&format!("{prefix}.box"))?;
            let confidence = obj.confidence.unwrap_or(1.0);
            if !(0.0..=1.0).contains(&confidence) {
                return Err(invalid(format!("{prefix}.confidence"), format!("{confidence} is outside [0, 1]")));
            }
            let keypoints_2d = obj
                .keypoints_2d
                .map(|kps| uv_keypoints(&kps).map_err(|m| invalid(format!("{prefix}.keypoints_2d"), m)))
                .transpose()?;
            objects.push(ObjectPrediction {
                category: obj.category,
                bbox,
                confidence,
                keypoints_2d,
            });
        }
        Ok(PredictionFrame {
            frame_id: self.frame_id,
            camera,
            objects,
        })
    }
}

fn uv_keypoints(kps: &[Vec<f64>]) -> Result<[[f64; 2]; 9], String> {
    if kps.len() != 9 {
        return Err(format!("expected 9 keypoints, got {}", kps.len()));
    }
    let mut out = [[0.0; 2]; 9];
    for (i, kp) in kps.iter().enumerate() {
        if kp.len() != 2 && kp.len() != 3 {
            return Err(format!("keypoint {i} has {} components, expected 2 or 3", kp.len()));
        }
        out[i] = [kp[0], kp[1]];
    }
    Ok(out)
}
