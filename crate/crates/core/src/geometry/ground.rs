//! Single-plane RANSAC ground removal.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cloud::PointCloud;

/// Minimum cloud size for plane fitting; smaller clouds pass through.
pub const MIN_POINTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundParams {
    /// Point-to-plane distance for inliers, meters.
    pub inlier_tol: f64,
    /// Maximum angle between the plane normal and +z, degrees.
    pub max_normal_tilt_deg: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for GroundParams {
    fn default() -> Self {
        Self {
            inlier_tol: 0.2,
            max_normal_tilt_deg: 15.0,
            iterations: 200,
            seed: 0x6E0D,
        }
    }
}

/// Plane `n · p + d = 0` with unit normal pointing up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub normal: [f64; 3],
    pub offset: f64,
}

impl Plane {
    pub fn distance(&self, p: &[f64; 3]) -> f64 {
        (self.normal[0] * p[0] + self.normal[1] * p[1] + self.normal[2] * p[2] + self.offset).abs()
    }

    fn through(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> Option<Plane> {
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let mut n = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if len < 1e-9 {
            return None;
        }
        if n[2] < 0.0 {
            negate(&mut n);
        }
        let n = n.map(|x| x / len);
        Some(Plane {
            normal: n,
            offset: -(n[0] * a[0] + n[1] * a[1] + n[2] * a[2]),
        })
    }

    /// Angle between the normal and vertical, degrees.
    pub fn tilt_deg(&self) -> f64 {
        self.normal[2].abs().min(1.0).acos().to_degrees()
    }
}

fn negate(n: &mut [f64; 3]) {
    for x in n.iter_mut() {
        *x = -*x;
    }
}

#[derive(Debug, Clone)]
pub struct GroundRemoval {
    pub cloud: PointCloud,
    pub plane: Option<Plane>,
    pub removed: usize,
    /// Set when no plane satisfied the tilt constraint.
    pub no_plane: bool,
}

/// Removes the inliers of the best near-horizontal RANSAC plane.
///
/// Clouds with fewer than [`MIN_POINTS`] points are returned unchanged.
/// If no sampled plane tilts less than `max_normal_tilt_deg`, the cloud is
/// returned unchanged with `no_plane` set.
pub fn remove_ground(cloud: &PointCloud, params: &GroundParams) -> GroundRemoval {
    let pts = cloud.points();
    if pts.len() < MIN_POINTS {
        return GroundRemoval {
            cloud: cloud.clone(),
            plane: None,
            removed: 0,
            no_plane: false,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<(Plane, usize)> = None;
    for _ in 0..params.iterations {
        let i = rng.random_range(0..pts.len());
        let j = rng.random_range(0..pts.len());
        let k = rng.random_range(0..pts.len());
        if i == j || j == k || i == k {
            continue;
        }
        let Some(plane) = Plane::through(&pts[i], &pts[j], &pts[k]) else {
            continue;
        };
        if plane.tilt_deg() >= params.max_normal_tilt_deg {
            continue;
        }
        let inliers = pts.iter().filter(|p| plane.distance(p) <= params.inlier_tol).count();
        if best.is_none_or(|(_, n)| inliers > n) {
            best = Some((plane, inliers));
        }
    }
    match best {
        Some((plane, _)) => {
            let out = cloud.filter(|_, p| plane.distance(p) > params.inlier_tol);
            GroundRemoval {
                removed: cloud.len() - out.len(),
                cloud: out,
                plane: Some(plane),
                no_plane: false,
            }
        }
        None => {
            log::warn!("ground removal: no plane within {}° of horizontal", params.max_normal_tilt_deg);
            GroundRemoval {
                cloud: cloud.clone(),
                plane: None,
                removed: 0,
                no_plane: true,
            }
        }
    }
}
