//! Depth-map handling: edge-noise masking and back-projection to a pseudo
//! LiDAR point cloud.

use std::collections::VecDeque;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cloud::{Frame, PointCloud};
use crate::error::{Error, Result};
use crate::raster::{RasterImage, RasterKind};

use super::camera::CameraModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeMethod {
    Sobel,
    Canny,
}

impl FromStr for EdgeMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sobel" => Ok(EdgeMethod::Sobel),
            "canny" => Ok(EdgeMethod::Canny),
            _ => Err(Error::Argument(format!("unknown edge method {s:?} (expected sobel or canny)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeParams {
    pub method: EdgeMethod,
    /// Gradient magnitude threshold, meters per pixel.
    pub grad_threshold: f64,
    /// Chebyshev dilation radius, pixels.
    pub dilate: usize,
}

impl Default for EdgeParams {
    fn default() -> Self {
        Self {
            method: EdgeMethod::Sobel,
            grad_threshold: 0.5,
            dilate: 1,
        }
    }
}

fn ensure_depth(img: &RasterImage) -> Result<()> {
    if img.kind() != RasterKind::Depth {
        return Err(Error::Argument(format!("expected a depth raster, got {:?}", img.kind())));
    }
    Ok(())
}

/// One point per valid pixel, expressed in the LiDAR frame.
pub fn backproject_depth(depth: &RasterImage, cam: &CameraModel) -> Result<PointCloud> {
    ensure_depth(depth)?;
    let mut pts = Vec::with_capacity(depth.valid_count());
    for row in 0..depth.height() {
        for col in 0..depth.width() {
            if let Some(d) = depth.get(row, col) {
                let p = cam.unproject(col as f64, row as f64, f64::from(d));
                pts.push(cam.cam_to_lidar().transform(p));
            }
        }
    }
    PointCloud::new(pts, Frame::Lidar)
}

/// Clamped-border read where invalid neighbours take the center value.
struct Sampler<'a> {
    img: &'a RasterImage,
    field: &'a [f64],
}

impl Sampler<'_> {
    fn at(&self, row: isize, col: isize, center: f64) -> f64 {
        let h = self.img.height() as isize;
        let w = self.img.width() as isize;
        let r = row.clamp(0, h - 1) as usize;
        let c = col.clamp(0, w - 1) as usize;
        if self.img.is_valid(r, c) {
            self.field[self.img.index(r, c)]
        } else {
            center
        }
    }

    /// Sobel gradient scaled so a unit ramp has gradient 1.
    fn sobel(&self, row: usize, col: usize) -> (f64, f64) {
        let (r, c) = (row as isize, col as isize);
        let z = self.field[self.img.index(row, col)];
        let p = |dr: isize, dc: isize| self.at(r + dr, c + dc, z);
        let gx = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
        let gy = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
        (gx / 8.0, gy / 8.0)
    }
}

fn sobel_field(img: &RasterImage, field: &[f64]) -> Vec<(f64, f64)> {
    let s = Sampler { img, field };
    let mut out = vec![(0.0, 0.0); field.len()];
    for row in 0..img.height() {
        for col in 0..img.width() {
            if img.is_valid(row, col) {
                out[img.index(row, col)] = s.sobel(row, col);
            }
        }
    }
    out
}

fn gaussian_smooth(img: &RasterImage, field: &[f64]) -> Vec<f64> {
    const K: [f64; 5] = [1.0, 4.0, 6.0, 4.0, 1.0];
    let s = Sampler { img, field };
    let (h, w) = (img.height(), img.width());
    let mut out = field.to_vec();
    for row in 0..h {
        for col in 0..w {
            if !img.is_valid(row, col) {
                continue;
            }
            let z = field[img.index(row, col)];
            let mut acc = 0.0;
            for (i, kr) in K.iter().enumerate() {
                for (j, kc) in K.iter().enumerate() {
                    acc += kr * kc * s.at(row as isize + i as isize - 2, col as isize + j as isize - 2, z);
                }
            }
            out[img.index(row, col)] = acc / 256.0;
        }
    }
    out
}

/// Quantizes a gradient direction to one of the 8 neighbour steps.
fn direction_step(gx: f64, gy: f64) -> (isize, isize) {
    let angle = gy.atan2(gx);
    let sector = ((angle / std::f64::consts::FRAC_PI_4).round() as isize).rem_euclid(8);
    const STEPS: [(isize, isize); 8] = [(0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1)];
    STEPS[sector as usize]
}

fn canny_edges(img: &RasterImage, field: &[f64], high: f64) -> Vec<bool> {
    let smooth = gaussian_smooth(img, field);
    let grad = sobel_field(img, &smooth);
    let (h, w) = (img.height(), img.width());
    let mag: Vec<f64> = grad.iter().map(|(gx, gy)| gx.hypot(*gy)).collect();
    let low = 0.5 * high;
    let at = |r: isize, c: isize| -> f64 {
        if r < 0 || c < 0 || r >= h as isize || c >= w as isize {
            0.0
        } else {
            mag[r as usize * w + c as usize]
        }
    };
    // non-maximum suppression
    let mut strength = vec![0u8; h * w];
    for row in 0..h {
        for col in 0..w {
            let i = row * w + col;
            let m = mag[i];
            if !img.is_valid(row, col) || m <= low {
                continue;
            }
            let (gx, gy) = grad[i];
            let (dr, dc) = direction_step(gx, gy);
            let (r, c) = (row as isize, col as isize);
            if m < at(r + dr, c + dc) || m < at(r - dr, c - dc) {
                continue;
            }
            strength[i] = if m > high { 2 } else { 1 };
        }
    }
    // hysteresis
    let mut edges = vec![false; h * w];
    let mut queue: VecDeque<usize> = (0..h * w).filter(|&i| strength[i] == 2).collect();
    for &i in &queue {
        edges[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        let (row, col) = ((i / w) as isize, (i % w) as isize);
        for dr in -1..=1 {
            for dc in -1..=1 {
                let (r, c) = (row + dr, col + dc);
                if r < 0 || c < 0 || r >= h as isize || c >= w as isize {
                    continue;
                }
                let j = r as usize * w + c as usize;
                if !edges[j] && strength[j] == 1 {
                    edges[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    edges
}

fn dilate(edges: &[bool], h: usize, w: usize, radius: usize) -> Vec<bool> {
    if radius == 0 {
        return edges.to_vec();
    }
    let mut out = vec![false; h * w];
    for row in 0..h {
        for col in 0..w {
            if !edges[row * w + col] {
                continue;
            }
            for r in row.saturating_sub(radius)..=(row + radius).min(h - 1) {
                for c in col.saturating_sub(radius)..=(col + radius).min(w - 1) {
                    out[r * w + c] = true;
                }
            }
        }
    }
    out
}

/// Clears the valid bit of depth pixels on or near depth discontinuities.
///
/// Sobel: pixels whose gradient magnitude exceeds `grad_threshold`, dilated
/// by `dilate`. Canny: thin hysteresis edges (high = `grad_threshold`,
/// low = half of it) dilated by `dilate`, then additionally grown
/// `max(1, 2·dilate)` pixels along the gradient toward the larger depth.
pub fn edge_noise_mask(depth: &RasterImage, params: &EdgeParams) -> Result<RasterImage> {
    ensure_depth(depth)?;
    let (h, w) = (depth.height(), depth.width());
    if h == 0 || w == 0 {
        return Ok(depth.clone());
    }
    let field: Vec<f64> = depth.values().iter().map(|&v| f64::from(v)).collect();
    let mask = match params.method {
        EdgeMethod::Sobel => {
            let grad = sobel_field(depth, &field);
            let edges: Vec<bool> = (0..h * w)
                .map(|i| depth.valid_mask()[i] && grad[i].0.hypot(grad[i].1) > params.grad_threshold)
                .collect();
            dilate(&edges, h, w, params.dilate)
        }
        EdgeMethod::Canny => {
            let edges = canny_edges(depth, &field, params.grad_threshold);
            let mut mask = dilate(&edges, h, w, params.dilate);
            let grad = sobel_field(depth, &field);
            let reach = (2 * params.dilate).max(1) as isize;
            for i in (0..h * w).filter(|&i| edges[i]) {
                let (gx, gy) = grad[i];
                if gx == 0.0 && gy == 0.0 {
                    continue;
                }
                // gradient points toward increasing depth
                let (dr, dc) = direction_step(gx, gy);
                let (row, col) = ((i / w) as isize, (i % w) as isize);
                for s in 1..=reach {
                    let (r, c) = (row + dr * s, col + dc * s);
                    if r < 0 || c < 0 || r >= h as isize || c >= w as isize {
                        break;
                    }
                    mask[r as usize * w + c as usize] = true;
                }
            }
            mask
        }
    };
    let mut out = depth.clone();
    for (i, &m) in mask.iter().enumerate() {
        if m {
            out.invalidate(i);
        }
    }
    Ok(out)
}
