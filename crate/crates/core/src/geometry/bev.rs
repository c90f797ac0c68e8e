//! Bird's-eye-view occupancy rasterization.

use crate::cloud::{Frame, PointCloud};
use crate::error::{Error, Result};
use crate::raster::{RasterImage, RasterKind};

/// Metric BEV grid in the LiDAR frame. Row index runs along x (forward),
/// column index along y (left), both from the lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BevGrid {
    x_range: (f64, f64),
    y_range: (f64, f64),
    z_range: (f64, f64),
    voxel: f64,
    rows: usize,
    cols: usize,
}

impl Default for BevGrid {
    /// x ∈ [0, 51.2), y ∈ [−25.6, 25.6), z ∈ [−5, 5), 0.4 m cells: 128×128.
    fn default() -> Self {
        Self::new((0.0, 51.2), (-25.6, 25.6), (-5.0, 5.0), 0.4).expect("default grid is consistent")
    }
}

fn cells(span: (f64, f64), voxel: f64) -> Option<usize> {
    let n = (span.1 - span.0) / voxel;
    let rounded = n.round();
    ((n - rounded).abs() < 1e-9 && rounded >= 1.0).then_some(rounded as usize)
}

impl BevGrid {
    pub fn new(x_range: (f64, f64), y_range: (f64, f64), z_range: (f64, f64), voxel: f64) -> Result<Self> {
        if !(voxel > 0.0) || !(z_range.1 > z_range.0) {
            return Err(Error::Argument("BEV grid needs voxel > 0 and a non-empty z range".into()));
        }
        let (Some(rows), Some(cols)) = (cells(x_range, voxel), cells(y_range, voxel)) else {
            return Err(Error::Argument(format!(
                "BEV ranges {x_range:?} x {y_range:?} are not whole multiples of voxel {voxel}"
            )));
        };
        Ok(Self {
            x_range,
            y_range,
            z_range,
            voxel,
            rows,
            cols,
        })
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn voxel(&self) -> f64 {
        self.voxel
    }

    pub fn contains(&self, p: &[f64; 3]) -> bool {
        (self.x_range.0..self.x_range.1).contains(&p[0])
            && (self.y_range.0..self.y_range.1).contains(&p[1])
            && (self.z_range.0..self.z_range.1).contains(&p[2])
    }

    /// `(row, col)` for an in-range point.
    pub fn cell_of(&self, p: &[f64; 3]) -> Option<(usize, usize)> {
        if !self.contains(p) {
            return None;
        }
        // clamp guards the upper edge against rounding in the division
        let row = (((p[0] - self.x_range.0) / self.voxel).floor() as usize).min(self.rows - 1);
        let col = (((p[1] - self.y_range.0) / self.voxel).floor() as usize).min(self.cols - 1);
        Some((row, col))
    }
}

/// Occupancy-count BEV image; empty cells are invalid.
pub fn rasterize_bev(cloud: &PointCloud, grid: &BevGrid) -> Result<RasterImage> {
    cloud.ensure_frame(Frame::Lidar)?;
    let (rows, cols) = grid.resolution();
    let mut counts = vec![0u32; rows * cols];
    for p in cloud.points() {
        if let Some((r, c)) = grid.cell_of(p) {
            counts[r * cols + c] += 1;
        }
    }
    let valid = counts.iter().map(|&n| n > 0).collect();
    let values = counts.iter().map(|&n| n as f32).collect();
    RasterImage::new(rows, cols, values, valid, RasterKind::Bev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_128_square() {
        assert_eq!(BevGrid::default().resolution(), (128, 128));
    }

    #[test]
    fn inconsistent_grid_rejected() {
        assert!(BevGrid::new((0.0, 51.0), (-25.6, 25.6), (-5.0, 5.0), 0.4).is_err());
    }

    #[test]
    fn corner_cell_index() {
        let grid = BevGrid::default();
        assert_eq!(grid.cell_of(&[0.2, -25.5, 0.0]), Some((0, 0)));
        assert_eq!(grid.cell_of(&[51.19, 25.59, 0.0]), Some((127, 127)));
        assert_eq!(grid.cell_of(&[60.0, 0.0, 0.0]), None);
        assert_eq!(grid.cell_of(&[1.0, 0.0, 6.0]), None);
    }

    #[test]
    fn counts_accumulate() {
        let cloud = PointCloud::new(vec![[0.1, 0.1, 0.0], [0.2, 0.2, 1.0], [60.0, 0.0, 0.0]], Frame::Lidar).unwrap();
        let img = rasterize_bev(&cloud, &BevGrid::default()).unwrap();
        assert_eq!(img.get(0, 64), Some(2.0));
        assert_eq!(img.valid_count(), 1);
    }
}
