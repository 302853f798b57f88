//! The `CCDR` raster container: a minimal little-endian format that
//! round-trips scenes and scalar rasters bit-exactly.
//!
//! Layout, all little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "CCDR"
//! 4       2     version (u16) = 1
//! 6       1     payload kind: 0 = complex64 (pairs of f32), 1 = scalar f64
//! 7       1     scalar semantic kind: 0 = other, 1 = coherence, 2 = ccd
//!               (0 for complex payloads)
//! 8       8     width (u64)
//! 16      8     height (u64)
//! 24      48    geotransform, 6 x f64 in coefficient order
//! 72      10    ISO-8601 acquisition date ("YYYY-MM-DD"); zero bytes when
//!               the raster carries no date
//! 82      -     row-major payload
//! ```
//!
//! Values are copied to and from their raw bit patterns, so no-data NaN
//! payloads survive a round trip unchanged.

use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use num_complex::Complex32;

use crate::error::{Error, Result};
use crate::geo::GeoTransform;
use crate::scene::{ComplexScene, RasterKind, ScalarRaster};

const MAGIC: [u8; 4] = *b"CCDR";
const VERSION: u16 = 1;
const HEADER_LEN: usize = 82;

const PAYLOAD_COMPLEX: u8 = 0;
const PAYLOAD_SCALAR: u8 = 1;

fn kind_to_byte(kind: RasterKind) -> u8 {
    match kind {
        RasterKind::Other => 0,
        RasterKind::Coherence => 1,
        RasterKind::Ccd => 2,
    }
}

fn kind_from_byte(byte: u8) -> Result<RasterKind> {
    match byte {
        0 => Ok(RasterKind::Other),
        1 => Ok(RasterKind::Coherence),
        2 => Ok(RasterKind::Ccd),
        value => Err(Error::UnknownRasterKind { value }),
    }
}

fn write_header(
    out: &mut Vec<u8>,
    payload: u8,
    kind_byte: u8,
    width: usize,
    height: usize,
    gt: &GeoTransform,
    date: Option<NaiveDate>,
) {
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(payload);
    out.push(kind_byte);
    out.extend_from_slice(&(width as u64).to_le_bytes());
    out.extend_from_slice(&(height as u64).to_le_bytes());
    for coeff in gt.coefficients() {
        out.extend_from_slice(&coeff.to_le_bytes());
    }
    match date {
        Some(d) => {
            let text = d.format("%Y-%m-%d").to_string();
            let bytes = text.as_bytes();
            debug_assert_eq!(bytes.len(), 10);
            out.extend_from_slice(&bytes[..10]);
        }
        None => out.extend_from_slice(&[0u8; 10]),
    }
}

struct Header {
    payload: u8,
    kind_byte: u8,
    width: usize,
    height: usize,
    geotransform: GeoTransform,
    date: Option<NaiveDate>,
}

fn read_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::TruncatedPayload {
            expected: HEADER_LEN as u64,
            actual: bytes.len() as u64,
        });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(Error::MagicMismatch { found: magic });
    }
    let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
    if version != VERSION {
        return Err(Error::VersionUnsupported { found: version });
    }
    let payload = bytes[6];
    let kind_byte = bytes[7];
    let width = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let height = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    let mut coeffs = [0.0f64; 6];
    for (i, coeff) in coeffs.iter_mut().enumerate() {
        let start = 24 + 8 * i;
        *coeff = f64::from_le_bytes(bytes[start..start + 8].try_into().unwrap());
    }
    let date_bytes = &bytes[72..82];
    let date = if date_bytes.iter().all(|&b| b == 0) {
        None
    } else {
        let text = std::str::from_utf8(date_bytes).map_err(|_| Error::MalformedDate {
            text: format!("{date_bytes:?}"),
        })?;
        Some(
            NaiveDate::parse_from_str(text, "%Y-%m-%d").map_err(|_| Error::MalformedDate {
                text: text.to_string(),
            })?,
        )
    };
    Ok(Header {
        payload,
        kind_byte,
        width,
        height,
        geotransform: GeoTransform::from_coefficients(coeffs),
        date,
    })
}

fn check_payload_len(actual: usize, expected: usize) -> Result<()> {
    if actual != expected {
        return Err(Error::TruncatedPayload {
            expected: expected as u64,
            actual: actual as u64,
        });
    }
    Ok(())
}

/// Encodes a complex scene into container bytes.
pub fn encode_scene(scene: &ComplexScene) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + scene.samples().len() * 8);
    write_header(
        &mut out,
        PAYLOAD_COMPLEX,
        0,
        scene.width(),
        scene.height(),
        scene.geotransform(),
        Some(scene.acquisition_date()),
    );
    for s in scene.samples() {
        out.extend_from_slice(&s.re.to_le_bytes());
        out.extend_from_slice(&s.im.to_le_bytes());
    }
    out
}

/// Decodes a complex scene from container bytes.
pub fn decode_scene(bytes: &[u8]) -> Result<ComplexScene> {
    let header = read_header(bytes)?;
    if header.payload != PAYLOAD_COMPLEX {
        return Err(Error::KindMismatch {
            expected: "complex scene payload".to_string(),
            actual: "scalar payload".to_string(),
        });
    }
    let date = header.date.ok_or_else(|| Error::MalformedDate {
        text: "(missing)".to_string(),
    })?;
    let body = &bytes[HEADER_LEN..];
    check_payload_len(body.len(), header.width * header.height * 8)?;
    let samples = body
        .chunks_exact(8)
        .map(|chunk| {
            Complex32::new(
                f32::from_le_bytes(chunk[0..4].try_into().unwrap()),
                f32::from_le_bytes(chunk[4..8].try_into().unwrap()),
            )
        })
        .collect();
    ComplexScene::new(header.width, header.height, samples, header.geotransform, date)
}

/// Encodes a scalar raster into container bytes.
pub fn encode_scalar(raster: &ScalarRaster) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + raster.values().len() * 8);
    write_header(
        &mut out,
        PAYLOAD_SCALAR,
        kind_to_byte(raster.kind()),
        raster.width(),
        raster.height(),
        raster.geotransform(),
        None,
    );
    for v in raster.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Decodes a scalar raster from container bytes.
pub fn decode_scalar(bytes: &[u8]) -> Result<ScalarRaster> {
    let header = read_header(bytes)?;
    if header.payload != PAYLOAD_SCALAR {
        return Err(Error::KindMismatch {
            expected: "scalar payload".to_string(),
            actual: "complex scene payload".to_string(),
        });
    }
    let kind = kind_from_byte(header.kind_byte)?;
    let body = &bytes[HEADER_LEN..];
    check_payload_len(body.len(), header.width * header.height * 8)?;
    let values = body
        .chunks_exact(8)
        .map(|chunk| f64::from_le_bytes(chunk.try_into().unwrap()))
        .collect();
    ScalarRaster::new(header.width, header.height, values, header.geotransform, kind)
}

pub fn write_scene(scene: &ComplexScene, path: impl AsRef<Path>) -> Result<()> {
    Ok(fs::write(path, encode_scene(scene))?)
}

pub fn read_scene(path: impl AsRef<Path>) -> Result<ComplexScene> {
    decode_scene(&fs::read(path)?)
}

pub fn write_scalar(raster: &ScalarRaster, path: impl AsRef<Path>) -> Result<()> {
    Ok(fs::write(path, encode_scalar(raster))?)
}

pub fn read_scalar(path: impl AsRef<Path>) -> Result<ScalarRaster> {
    decode_scalar(&fs::read(path)?)
}
