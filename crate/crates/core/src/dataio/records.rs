use crate::camera::{project_box_keypoints, CameraError, CameraFrame, ProjectedPoint};
use crate::category::Category;
use crate::geom::{OrientedBox3, Vec3};
use crate::metrics::ObjectPrediction;

/// Maximum deviation allowed between stored and recomputed keypoints.
pub const KEYPOINT_TOLERANCE: f64 = 1e-6;

/// One annotated object. Keypoint index 0 is the box center and 1..=8 follow
/// the corner order of [`OrientedBox3::vertices`].
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectAnnotation {
    pub instance_id: String,
    pub category: Category,
    pub bbox: OrientedBox3,
    /// World-space keypoints.
    pub keypoints_3d: [Vec3; 9],
    /// Projected keypoints: normalized `(u, v)` and depth.
    pub keypoints_2d: [ProjectedPoint; 9],
}

impl ObjectAnnotation {
    /// Annotation with keypoints derived from the box and camera.
    pub fn new(
        instance_id: impl Into<String>,
        category: Category,
        bbox: OrientedBox3,
        camera: &CameraFrame,
    ) -> Result<Self, CameraError> {
        Ok(Self {
            instance_id: instance_id.into(),
            category,
            keypoints_3d: bbox.keypoints(),
            keypoints_2d: project_box_keypoints(camera, &bbox)?,
            bbox,
        })
    }

    pub fn keypoints_uv(&self) -> [[f64; 2]; 9] {
        self.keypoints_2d.map(|p| [p.u, p.v])
    }

    /// The annotation as a perfect-confidence prediction.
    pub fn as_prediction(&self) -> ObjectPrediction {
        ObjectPrediction {
            category: self.category,
            bbox: self.bbox,
            confidence: 1.0,
            keypoints_2d: Some(self.keypoints_uv()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub frame_id: String,
    pub camera: CameraFrame,
    pub objects: Vec<ObjectAnnotation>,
}

impl FrameRecord {
    /// Sequence (video) the frame belongs to: the part of the id before the
    /// last `/`, or the whole id.
    pub fn sequence_id(&self) -> &str {
        sequence_of(&self.frame_id)
    }
}

pub(crate) fn sequence_of(frame_id: &str) -> &str {
    frame_id.rsplit_once('/').map_or(frame_id, |(seq, _)| seq)
}

/// Detector output for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionFrame {
    pub frame_id: String,
    pub camera: Option<CameraFrame>,
    pub objects: Vec<ObjectPrediction>,
}

impl From<&FrameRecord> for PredictionFrame {
    fn from(frame: &FrameRecord) -> Self {
        Self {
            frame_id: frame.frame_id.clone(),
            camera: None,
            objects: frame.objects.iter().map(ObjectAnnotation::as_prediction).collect(),
        }
    }
}
