//! Mutual-nearest-neighbour overlap between two posed point clouds.

use std::collections::HashMap;

use crate::cloud::{Frame, PointCloud};
use crate::error::Result;
use crate::pose::Pose;

/// Uniform hash grid with cell size equal to the query radius, so every
/// neighbour within the radius lies in the 27 surrounding cells.
struct RadiusGrid<'a> {
    points: &'a [[f64; 3]],
    cell: f64,
    cells: HashMap<[i64; 3], Vec<usize>>,
}

impl<'a> RadiusGrid<'a> {
    fn new(points: &'a [[f64; 3]], cell: f64) -> Self {
        let mut cells: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::key(p, cell)).or_default().push(i);
        }
        Self { points, cell, cells }
    }

    fn key(p: &[f64; 3], cell: f64) -> [i64; 3] {
        p.map(|v| (v / cell).floor() as i64)
    }

    /// Nearest point within `radius`; ties go to the lower index.
    fn nearest_within(&self, q: &[f64; 3], radius: f64) -> Option<usize> {
        let k = Self::key(q, self.cell);
        let mut best: Option<(f64, usize)> = None;
        let r2 = radius * radius;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(ids) = self.cells.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) else {
                        continue;
                    };
                    for &i in ids {
                        let d2 = dist2(q, &self.points[i]);
                        if d2 > r2 {
                            continue;
                        }
                        if best.is_none_or(|(bd, bi)| d2 < bd || (d2 == bd && i < bi)) {
                            best = Some((d2, i));
                        }
                    }
                }
            }
        }
        best.map(|(_, i)| i)
    }
}

pub(crate) fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
}

/// Number of mutual-nearest-neighbour pairs closer than `radius`.
pub fn mutual_nn_pairs(a: &[[f64; 3]], b: &[[f64; 3]], radius: f64) -> usize {
    if a.is_empty() || b.is_empty() || !(radius > 0.0) {
        return 0;
    }
    let grid_a = RadiusGrid::new(a, radius);
    let grid_b = RadiusGrid::new(b, radius);
    a.iter()
        .enumerate()
        .filter(|(i, p)| {
            grid_b
                .nearest_within(p, radius)
                .is_some_and(|j| grid_a.nearest_within(&b[j], radius) == Some(*i))
        })
        .count()
}

/// Fraction of points in mutual-nearest-neighbour pairs within `radius`
/// after moving both clouds to the world frame, over the smaller cloud.
pub fn sim_pointcloud_mnn(
    cloud_i: &PointCloud,
    cloud_j: &PointCloud,
    pose_i: &Pose,
    pose_j: &Pose,
    radius: f64,
) -> Result<f64> {
    cloud_i.ensure_frame(cloud_j.frame())?;
    if cloud_i.is_empty() || cloud_j.is_empty() {
        return Ok(0.0);
    }
    let wi = cloud_i.transformed(pose_i, Frame::World);
    let wj = cloud_j.transformed(pose_j, Frame::World);
    let pairs = mutual_nn_pairs(wi.points(), wj.points(), radius);
    Ok((pairs as f64 / cloud_i.len().min(cloud_j.len()) as f64).clamp(0.0, 1.0))
}
