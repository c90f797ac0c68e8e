//! Sector-area overlap between two planar poses.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::pose::Pose;

use super::sampling::{sample_sector_points, SectorSpec};

pub const RASTER_CELLS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OverlapMode {
    /// Cell-center counting on a 1000×1000 grid over the joint bounding box.
    Raster,
    /// Seeded area-uniform samples of each sector tested against the other.
    MonteCarlo { samples: usize, seed: u64 },
}

impl OverlapMode {
    pub fn monte_carlo() -> Self {
        OverlapMode::MonteCarlo {
            samples: 100_000,
            seed: 0x5EC7,
        }
    }
}

/// Planar placement of a sector in the world.
#[derive(Debug, Clone, Copy)]
struct PlacedSector {
    x: f64,
    y: f64,
    cos: f64,
    sin: f64,
}

impl PlacedSector {
    fn from_pose(pose: &Pose) -> Self {
        let [x, y] = pose.planar_position();
        let (sin, cos) = pose.heading().sin_cos();
        Self { x, y, cos, sin }
    }

    fn to_world(self, p: [f64; 2]) -> [f64; 2] {
        [
            self.x + self.cos * p[0] - self.sin * p[1],
            self.y + self.sin * p[0] + self.cos * p[1],
        ]
    }

    /// World points bounding the placed sector: apex, arc ends, and each
    /// world-axis direction inside the arc.
    fn world_extremes(&self, spec: &SectorSpec) -> Vec<[f64; 2]> {
        let heading = self.sin.atan2(self.cos);
        let half = spec.half_angle();
        let mut angles = vec![heading - half, heading + half];
        for k in -4..=4 {
            let a = k as f64 * std::f64::consts::FRAC_PI_2;
            let off = (a - heading + PI).rem_euclid(2.0 * PI) - PI;
            if off.abs() <= half {
                angles.push(a);
            }
        }
        let mut pts: Vec<[f64; 2]> = angles
            .into_iter()
            .map(|a| [self.x + spec.radius() * a.cos(), self.y + spec.radius() * a.sin()])
            .collect();
        pts.push([self.x, self.y]);
        pts
    }

    fn contains(&self, spec: &SectorSpec, w: [f64; 2]) -> bool {
        let dx = w[0] - self.x;
        let dy = w[1] - self.y;
        spec.contains(self.cos * dx + self.sin * dy, -self.sin * dx + self.cos * dy)
    }
}

/// Overlap ratio `|S_i ∩ S_j| / |S|` of the two pose-attached sectors.
///
/// Both sectors have the same area analytically; each estimator divides by
/// the mean of its two per-sector estimates, so the result is symmetric and
/// exactly 1 for identical poses.
pub fn sim_sector_overlap(pose_i: &Pose, pose_j: &Pose, spec: &SectorSpec, mode: OverlapMode) -> f64 {
    let a = PlacedSector::from_pose(pose_i);
    let b = PlacedSector::from_pose(pose_j);
    let reach = 2.0 * spec.radius();
    if (a.x - b.x).hypot(a.y - b.y) > reach {
        return 0.0;
    }
    match mode {
        OverlapMode::Raster => raster_overlap(&a, &b, spec),
        OverlapMode::MonteCarlo { samples, seed } => monte_carlo_overlap(&a, &b, spec, samples, seed),
    }
}

fn raster_overlap(a: &PlacedSector, b: &PlacedSector, spec: &SectorSpec) -> f64 {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for s in [a, b] {
        for [x, y] in s.world_extremes(spec) {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
    }
    let dx = (x1 - x0) / RASTER_CELLS as f64;
    let dy = (y1 - y0) / RASTER_CELLS as f64;
    let (mut in_a, mut in_b, mut both) = (0u64, 0u64, 0u64);
    for r in 0..RASTER_CELLS {
        let y = y0 + (r as f64 + 0.5) * dy;
        for c in 0..RASTER_CELLS {
            let w = [x0 + (c as f64 + 0.5) * dx, y];
            let ia = a.contains(spec, w);
            let ib = b.contains(spec, w);
            in_a += ia as u64;
            in_b += ib as u64;
            both += (ia && ib) as u64;
        }
    }
    if in_a + in_b == 0 {
        return 0.0;
    }
    (2.0 * both as f64 / (in_a + in_b) as f64).min(1.0)
}

fn monte_carlo_overlap(a: &PlacedSector, b: &PlacedSector, spec: &SectorSpec, samples: usize, seed: u64) -> f64 {
    let Ok(pts) = sample_sector_points(spec, samples.max(1), seed) else {
        return 0.0;
    };
    let frac = |from: &PlacedSector, to: &PlacedSector| {
        let hits = pts
            .points()
            .iter()
            .filter(|&&p| to.contains(spec, from.to_world(p)))
            .count();
        hits as f64 / pts.len() as f64
    };
    (0.5 * (frac(a, b) + frac(b, a))).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_poses_full_overlap() {
        let p = Pose::planar(3.0, 4.0, 0.7, "a");
        let spec = SectorSpec::default();
        assert_eq!(sim_sector_overlap(&p, &p, &spec, OverlapMode::Raster), 1.0);
        assert_eq!(sim_sector_overlap(&p, &p, &spec, OverlapMode::monte_carlo()), 1.0);
    }

    #[test]
    fn world_bounds_contain_rotated_sector() {
        let spec = SectorSpec::default();
        let pts = sample_sector_points(&spec, 2000, 1).unwrap();
        for heading in [0.0, 0.4, 0.785, 1.9, -2.6, 3.1] {
            let s = PlacedSector::from_pose(&Pose::planar(1.0, -2.0, heading, "a"));
            let ext = s.world_extremes(&spec);
            let lo = |k: usize| ext.iter().map(|p| p[k]).fold(f64::MAX, f64::min) - 1e-9;
            let hi = |k: usize| ext.iter().map(|p| p[k]).fold(f64::MIN, f64::max) + 1e-9;
            for &p in pts.points() {
                let w = s.to_world(p);
                assert!(w[0] >= lo(0) && w[0] <= hi(0) && w[1] >= lo(1) && w[1] <= hi(1), "heading {heading}");
            }
        }
    }

    #[test]
    fn estimators_agree_on_rotated_pair() {
        let spec = SectorSpec::default();
        let a = Pose::planar(0.0, 0.0, 0.8, "a");
        let b = Pose::planar(2.0, 1.0, 1.3, "b");
        let r = sim_sector_overlap(&a, &b, &spec, OverlapMode::Raster);
        let m = sim_sector_overlap(&a, &b, &spec, OverlapMode::monte_carlo());
        assert!((r - m).abs() < 0.01, "{r} vs {m}");
    }

    #[test]
    fn distant_sectors_disjoint() {
        let a = Pose::planar(0.0, 0.0, 0.0, "a");
        let b = Pose::planar(25.0, 0.0, 0.0, "b");
        let spec = SectorSpec::default();
        assert_eq!(sim_sector_overlap(&a, &b, &spec, OverlapMode::Raster), 0.0);
        assert_eq!(sim_sector_overlap(&a, &b, &spec, OverlapMode::monte_carlo()), 0.0);
    }

    #[test]
    fn opposite_headings_barely_touch() {
        // facing away from each other at the same spot: only the apex is shared
        let a = Pose::planar(0.0, 0.0, 0.0, "a");
        let b = Pose::planar(0.0, 0.0, std::f64::consts::PI, "b");
        let spec = SectorSpec::default();
        assert!(sim_sector_overlap(&a, &b, &spec, OverlapMode::Raster) < 1e-3);
    }

    #[test]
    fn half_overlap_for_rotated_semicircles() {
        // two 180° sectors rotated by 90° share exactly a quarter disc
        let spec = SectorSpec::new(180.0, 10.0).unwrap();
        let a = Pose::planar(0.0, 0.0, 0.0, "a");
        let b = Pose::planar(0.0, 0.0, std::f64::consts::FRAC_PI_2, "b");
        let r = sim_sector_overlap(&a, &b, &spec, OverlapMode::Raster);
        let m = sim_sector_overlap(&a, &b, &spec, OverlapMode::monte_carlo());
        assert!((r - 0.5).abs() < 5e-3, "raster {r}");
        assert!((m - 0.5).abs() < 5e-3, "monte carlo {m}");
    }
}
