//! Exact IoU for arbitrarily oriented 3D bounding boxes and an evaluation
//! toolkit for 3D object detection built on it.

pub mod geom;
pub mod oracle;
pub mod camera;
pub mod category;
pub mod dataio;
pub mod metrics;
pub mod cli;
