//! Line-delimited JSON frame files: parsing with located validation errors,
//! canonical serialization, and a synthetic fixture generator.
//!
//! One frame per line. See `schema/frames.schema.md` at the crate root for
//! the field layout.

mod reader;
mod records;
mod schema;
pub mod synth;
mod writer;

pub use reader::{open_input, parse_box, parse_frames, parse_predictions, read_frames, read_predictions};
pub use records::{FrameRecord, ObjectAnnotation, PredictionFrame, KEYPOINT_TOLERANCE};
pub use synth::{generate_synthetic, AzimuthMode, NoiseSpec, OrbitSpec, SyntheticSpec};
pub use writer::{
    create_output, serialize_frames, serialize_predictions, write_frames, write_predictions,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}: schema error at `{path}`: {message}")]
    Schema { line: usize, path: String, message: String },
    #[error("line {line}: invalid `{path}`: {message}")]
    Validation { line: usize, path: String, message: String },
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl DataError {
    /// 1-based line of the offending record, when the error is located.
    pub fn line(&self) -> Option<usize> {
        match self {
            DataError::Schema { line, .. } | DataError::Validation { line, .. } => Some(*line),
            _ => None,
        }
    }

    /// Field path of the offending value, when the error is located.
    pub fn path(&self) -> Option<&str> {
        match self {
            DataError::Schema { path, .. } | DataError::Validation { path, .. } => Some(path),
            _ => None,
        }
    }
}
