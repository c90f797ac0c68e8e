//! Dense rasters (depth, range, BEV) with an explicit validity mask, and
//! the `RBRAST1` on-disk format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::binfmt;
use crate::error::{Error, Result};

pub const RASTER_MAGIC: &str = "RBRAST1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RasterKind {
    Depth,
    Range,
    Bev,
}

/// Row-major H×W grid. Values under a cleared mask bit carry no meaning and
/// are never read by downstream code.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    height: usize,
    width: usize,
    values: Vec<f32>,
    valid: Vec<bool>,
    kind: RasterKind,
}

impl RasterImage {
    pub fn new(
        height: usize,
        width: usize,
        values: Vec<f32>,
        valid: Vec<bool>,
        kind: RasterKind,
    ) -> Result<Self> {
        let n = height * width;
        if values.len() != n || valid.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: values.len().min(valid.len()),
            });
        }
        if matches!(kind, RasterKind::Depth | RasterKind::Range) {
            if let Some(i) = (0..n).find(|&i| valid[i] && !(values[i] > 0.0 && values[i].is_finite())) {
                return Err(Error::Data(format!(
                    "valid {kind:?} pixel {i} has non-positive value {}",
                    values[i]
                )));
            }
        }
        Ok(Self {
            height,
            width,
            values,
            valid,
            kind,
        })
    }

    /// All-invalid raster.
    pub fn invalid(height: usize, width: usize, kind: RasterKind) -> Self {
        Self {
            height,
            width,
            values: vec![0.0; height * width],
            valid: vec![false; height * width],
            kind,
        }
    }

    /// Builds a raster from values where NaN marks an invalid pixel.
    /// For depth/range rasters non-positive values are also treated as invalid.
    pub fn from_nan_encoded(height: usize, width: usize, values: Vec<f32>, kind: RasterKind) -> Result<Self> {
        let positive = matches!(kind, RasterKind::Depth | RasterKind::Range);
        let valid = values
            .iter()
            .map(|v| v.is_finite() && (!positive || *v > 0.0))
            .collect::<Vec<_>>();
        let values = values
            .iter()
            .zip(&valid)
            .map(|(&v, &ok)| if ok { v } else { 0.0 })
            .collect();
        Self::new(height, width, values, valid, kind)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn kind(&self) -> RasterKind {
        self.kind
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn valid_mask(&self) -> &[bool] {
        &self.valid
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    /// Value at `(row, col)` if the pixel is valid.
    pub fn get(&self, row: usize, col: usize) -> Option<f32> {
        let i = self.index(row, col);
        self.valid[i].then(|| self.values[i])
    }

    pub fn is_valid(&self, row: usize, col: usize) -> bool {
        self.valid[self.index(row, col)]
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, value: f32) {
        let i = self.index(row, col);
        self.values[i] = value;
        self.valid[i] = true;
    }

    pub(crate) fn invalidate(&mut self, i: usize) {
        self.valid[i] = false;
    }

    /// Rows `[first_row, first_row + rows)` as a new raster.
    pub(crate) fn row_slice(&self, first_row: usize, rows: usize) -> RasterImage {
        let a = first_row * self.width;
        let b = a + rows * self.width;
        RasterImage {
            height: rows,
            width: self.width,
            values: self.values[a..b].to_vec(),
            valid: self.valid[a..b].to_vec(),
            kind: self.kind,
        }
    }

    /// Values with invalid pixels replaced by NaN.
    pub fn nan_encoded(&self) -> Vec<f32> {
        self.values
            .iter()
            .zip(&self.valid)
            .map(|(&v, &ok)| if ok { v } else { f32::NAN })
            .collect()
    }

    /// 8-bit display image: values clamped to `[0, 255]`, invalid pixels 0.
    pub fn to_display_u8(&self) -> Vec<u8> {
        self.values
            .iter()
            .zip(&self.valid)
            .map(|(&v, &ok)| if ok { v.clamp(0.0, 255.0) as u8 } else { 0 })
            .collect()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RasterHeader {
    magic: String,
    h: usize,
    w: usize,
    dtype: String,
}

pub fn encode_raster(img: &RasterImage) -> Vec<u8> {
    let header = RasterHeader {
        magic: RASTER_MAGIC.into(),
        h: img.height,
        w: img.width,
        dtype: "f32le".into(),
    };
    let json = serde_json::to_string(&header).expect("header serializes");
    binfmt::encode(&json, img.nan_encoded().into_iter())
}

pub fn decode_raster(bytes: &[u8], kind: RasterKind) -> Result<RasterImage> {
    let (header, offset): (RasterHeader, usize) = binfmt::split_header(bytes)?;
    if header.magic != RASTER_MAGIC {
        return Err(Error::Format {
            offset: 0,
            message: format!("bad magic {:?}", header.magic),
        });
    }
    if header.dtype != "f32le" {
        return Err(Error::Format {
            offset: 0,
            message: format!("unsupported dtype {:?}", header.dtype),
        });
    }
    let values = binfmt::read_f32_payload(bytes, offset, header.h * header.w)?;
    RasterImage::from_nan_encoded(header.h, header.w, values, kind)
}

pub fn save_raster(img: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_raster(img)).map_err(|e| Error::io(path, e))
}

/// Loads an `RBRAST1` file; the file does not record its kind, so the
/// caller states it.
pub fn load_raster(path: impl AsRef<Path>, kind: RasterKind) -> Result<RasterImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_raster(&bytes, kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_must_be_positive_where_valid() {
        let r = RasterImage::new(1, 2, vec![1.0, -1.0], vec![true, true], RasterKind::Depth);
        assert!(r.is_err());
        let ok = RasterImage::new(1, 2, vec![1.0, -1.0], vec![true, false], RasterKind::Depth);
        assert!(ok.is_ok());
    }

    #[test]
    fn nan_marks_invalid_on_roundtrip() {
        let img = RasterImage::new(2, 2, vec![1.0, 2.0, 3.0, 4.0], vec![true, false, true, true], RasterKind::Range)
            .unwrap();
        let bytes = encode_raster(&img);
        let header_end = bytes.iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(
            std::str::from_utf8(&bytes[..header_end]).unwrap(),
            r#"{"magic":"RBRAST1","h":2,"w":2,"dtype":"f32le"}"#
        );
        assert_eq!(bytes.len(), header_end + 1 + 16);
        let back = decode_raster(&bytes, RasterKind::Range).unwrap();
        assert_eq!(back.valid_mask(), img.valid_mask());
        assert_eq!(back.get(1, 1), Some(4.0));
        assert_eq!(back.get(0, 1), None);
    }

    #[test]
    fn truncated_payload_reports_offset() {
        let img = RasterImage::invalid(2, 2, RasterKind::Bev);
        let mut bytes = encode_raster(&img);
        bytes.truncate(bytes.len() - 4);
        let len = bytes.len() as u64;
        match decode_raster(&bytes, RasterKind::Bev) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, len),
            other => panic!("unexpected {other:?}"),
        }
    }
}
