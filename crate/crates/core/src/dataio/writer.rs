use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use flate2::write::GzEncoder;
use flate2::Compression;
use serde::Serialize;
use serde_json::ser::Formatter;

use super::records::{FrameRecord, PredictionFrame};
use super::schema::{FrameWire, PredictionFrameWire};

/// Compact JSON with every float written to 17 significant digits, so
/// serialization after parsing reproduces the input bytes.
struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

fn write_line<W: Write + ?Sized, T: Serialize>(out: &mut W, value: &T) -> io::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut *out, FixedDigits);
    value.serialize(&mut ser).map_err(io::Error::from)?;
    out.write_all(b"\n")
}

/// Writes one canonical line per frame.
pub fn write_frames<'a, W: Write + ?Sized>(out: &mut W, frames: impl IntoIterator<Item = &'a FrameRecord>) -> io::Result<()> {
    for frame in frames {
        write_line(out, &FrameWire::from_record(frame))?;
    }
    Ok(())
}

pub fn write_predictions<'a, W: Write + ?Sized>(
    out: &mut W,
    frames: impl IntoIterator<Item = &'a PredictionFrame>,
) -> io::Result<()> {
    for frame in frames {
        write_line(out, &PredictionFrameWire::from_frame(frame))?;
    }
    Ok(())
}

pub fn serialize_frames<'a>(frames: impl IntoIterator<Item = &'a FrameRecord>) -> Vec<u8> {
    let mut buf = Vec::new();
    write_frames(&mut buf, frames).expect("writing to memory");
    buf
}

pub fn serialize_predictions<'a>(frames: impl IntoIterator<Item = &'a PredictionFrame>) -> Vec<u8> {
    let mut buf = Vec::new();
    write_predictions(&mut buf, frames).expect("writing to memory");
    buf
}

/// Creates an output file; `.gz` paths are gzip-compressed.
pub fn create_output(path: &Path) -> io::Result<Box<dyn Write>> {
    let file = BufWriter::new(File::create(path)?);
    if path.extension().is_some_and(|e| e == "gz") {
        Ok(Box::new(GzEncoder::new(file, Compression::default())))
    } else {
        Ok(Box::new(file))
    }
}
