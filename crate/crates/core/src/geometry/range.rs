//! Spherical projection of LiDAR scans into range images.

use crate::cloud::{Frame, PointCloud};
use crate::error::{Error, Result};
use crate::raster::{RasterImage, RasterKind};

/// Horizontal half field of view, degrees. Matches the cropped camera.
pub const H_FOV_HALF_DEG: f64 = 45.0;

/// Spherical projection grid. Azimuth covers `[-45°, +45°]` about LiDAR
/// +x; column 0 is the leftmost (+45°) direction. Row 0 is the top of the
/// vertical field of view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeProjection {
    v_fov_deg: (f64, f64),
    rows: usize,
    cols: usize,
}

impl Default for RangeProjection {
    /// 64×384 over `[-24.8°, 2.0°]`, an HDL-64 style layout.
    fn default() -> Self {
        Self {
            v_fov_deg: (-24.8, 2.0),
            rows: 64,
            cols: 384,
        }
    }
}

impl RangeProjection {
    pub fn new(v_min_deg: f64, v_max_deg: f64, rows: usize, cols: usize) -> Result<Self> {
        if !(v_max_deg > v_min_deg) || rows == 0 || cols == 0 {
            return Err(Error::Argument(format!(
                "invalid range projection: v_fov [{v_min_deg}, {v_max_deg}], {rows}x{cols}"
            )));
        }
        Ok(Self {
            v_fov_deg: (v_min_deg, v_max_deg),
            rows,
            cols,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn h_fov_deg(&self) -> (f64, f64) {
        (-H_FOV_HALF_DEG, H_FOV_HALF_DEG)
    }

    pub fn v_fov_deg(&self) -> (f64, f64) {
        self.v_fov_deg
    }

    /// Pixel `(row, col)` and range for a LiDAR-frame point, or `None` if it
    /// falls outside the field of view.
    pub fn pixel_of(&self, p: &[f64; 3]) -> Option<(usize, usize, f64)> {
        let range = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        if range == 0.0 {
            return None;
        }
        let azimuth = p[1].atan2(p[0]).to_degrees();
        let elevation = (p[2] / range).asin().to_degrees();
        let (v_min, v_max) = self.v_fov_deg;
        if azimuth.abs() > H_FOV_HALF_DEG || elevation < v_min || elevation > v_max {
            return None;
        }
        let col_f = (H_FOV_HALF_DEG - azimuth) / (2.0 * H_FOV_HALF_DEG) * self.cols as f64;
        let row_f = (v_max - elevation) / (v_max - v_min) * self.rows as f64;
        let col = (col_f.floor() as usize).min(self.cols - 1);
        let row = (row_f.floor() as usize).min(self.rows - 1);
        Some((row, col, range))
    }
}

/// Each pixel holds the range of the nearest point mapped to it; pixels
/// with no point are invalid.
pub fn project_to_range_image(cloud: &PointCloud, proj: &RangeProjection) -> Result<RasterImage> {
    cloud.ensure_frame(Frame::Lidar)?;
    let mut img = RasterImage::invalid(proj.rows, proj.cols, RasterKind::Range);
    for p in cloud.points() {
        if let Some((row, col, range)) = proj.pixel_of(p) {
            let r = range as f32;
            if img.get(row, col).is_none_or(|cur| r < cur) {
                img.set(row, col, r);
            }
        }
    }
    Ok(img)
}
