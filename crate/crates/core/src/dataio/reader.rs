use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use serde::de::DeserializeOwned;

use super::records::{FrameRecord, PredictionFrame};
use super::schema::{BoxWire, FrameWire, Invalid, PredictionFrameWire};
use super::DataError;

/// Opens a frame file for reading; `.gz` files are decompressed.
pub fn open_input(path: &Path) -> Result<Box<dyn BufRead>, DataError> {
    let file = File::open(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

fn decode<T: DeserializeOwned>(line_no: usize, text: &str) -> Result<T, DataError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| DataError::Schema {
        line: line_no,
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    de.end().map_err(|e| DataError::Schema {
        line: line_no,
        path: ".".into(),
        message: e.to_string(),
    })?;
    Ok(value)
}

fn located(line: usize) -> impl Fn(Invalid) -> DataError {
    move |e| DataError::Validation {
        line,
        path: e.path,
        message: e.message,
    }
}

/// Streams frames from line-delimited JSON. Blank lines are skipped; every
/// yielded record satisfies all invariants, otherwise a located error is
/// yielded instead.
struct Lines<R, F> {
    reader: R,
    line_no: usize,
    seen: HashSet<String>,
    convert: F,
}

impl<R: BufRead, T, F> Iterator for Lines<R, F>
where
    F: FnMut(usize, &str) -> Result<(String, T), DataError>,
{
    type Item = Result<T, DataError>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut buf = String::new();
        loop {
            buf.clear();
            self.line_no += 1;
            match self.reader.read_line(&mut buf) {
                Ok(0) => return None,
                Ok(_) if buf.trim().is_empty() => continue,
                Ok(_) => break,
                Err(e) => return Some(Err(e.into())),
            }
        }
        let line = self.line_no;
        Some((self.convert)(line, buf.trim_end()).and_then(|(id, value)| {
            if self.seen.insert(id.clone()) {
                Ok(value)
            } else {
                Err(DataError::Validation {
                    line,
                    path: "frame_id".into(),
                    message: format!("duplicate frame `{id}`"),
                })
            }
        }))
    }
}

/// Parses ground-truth frames. Missing keypoints are filled from the box and
/// camera.
pub fn parse_frames<R: BufRead>(reader: R) -> impl Iterator<Item = Result<FrameRecord, DataError>> {
    Lines {
        reader,
        line_no: 0,
        seen: HashSet::new(),
        convert: |line: usize, text: &str| {
            let wire: FrameWire = decode(line, text)?;
            let record = wire.into_record().map_err(located(line))?;
            Ok((record.frame_id.clone(), record))
        },
    }
}

/// Parses prediction frames. Ground-truth files are accepted as predictions
/// with confidence 1.0.
pub fn parse_predictions<R: BufRead>(reader: R) -> impl Iterator<Item = Result<PredictionFrame, DataError>> {
    Lines {
        reader,
        line_no: 0,
        seen: HashSet::new(),
        convert: |line: usize, text: &str| {
            let wire: PredictionFrameWire = decode(line, text)?;
            let frame = wire.into_frame().map_err(located(line))?;
            Ok((frame.frame_id.clone(), frame))
        },
    }
}

pub fn read_frames(path: &Path) -> Result<Vec<FrameRecord>, DataError> {
    parse_frames(open_input(path)?).collect()
}

pub fn read_predictions(path: &Path) -> Result<Vec<PredictionFrame>, DataError> {
    parse_predictions(open_input(path)?).collect()
}

/// Parses a single box object (`rotation` or `quaternion`, `translation`,
/// `scale`), the same layout as a record's `box` field. Errors report line 1.
pub fn parse_box(text: &str) -> Result<crate::geom::OrientedBox3, DataError> {
    let wire: BoxWire = decode(1, text.trim())?;
    wire.to_box("box").map_err(located(1))
}
