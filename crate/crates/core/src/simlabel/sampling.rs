use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Circular sector attached to the ego frame: apex at the sensor origin,
/// bisector along +x.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SectorSpec {
    angle_deg: f64,
    radius: f64,
}

impl Default for SectorSpec {
    /// 90° opening angle (the camera field of view), 10 m radius.
    fn default() -> Self {
        Self {
            angle_deg: 90.0,
            radius: 10.0,
        }
    }
}

impl SectorSpec {
    pub fn new(angle_deg: f64, radius: f64) -> Result<Self> {
        if !(angle_deg > 0.0 && angle_deg <= 360.0) || !(radius > 0.0) {
            return Err(Error::Argument(format!(
                "sector needs 0 < angle <= 360 and radius > 0 (got {angle_deg}, {radius})"
            )));
        }
        Ok(Self { angle_deg, radius })
    }

    pub fn angle_deg(&self) -> f64 {
        self.angle_deg
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn half_angle(&self) -> f64 {
        self.angle_deg.to_radians() / 2.0
    }

    pub fn area(&self) -> f64 {
        0.5 * self.angle_deg.to_radians() * self.radius * self.radius
    }

    /// Membership of an ego-frame planar point.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        if x * x + y * y > self.radius * self.radius {
            return false;
        }
        self.angle_deg >= 360.0 || y.atan2(x).abs() <= self.half_angle()
    }
}

/// Ego-frame planar sample points. Point `k` of two sets drawn with the same
/// arguments is the same ego-frame location.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPointSet {
    points: Vec<[f64; 2]>,
}

impl SampledPointSet {
    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Area-uniform samples over the sector, stratified along the radius
/// (`r = R·√u` with `u` drawn from the k-th of `n` equal strata).
pub fn sample_sector_points(spec: &SectorSpec, n: usize, seed: u64) -> Result<SampledPointSet> {
    if n == 0 {
        return Err(Error::Argument("need at least one sample point".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = spec.half_angle();
    let points = (0..n)
        .map(|k| {
            let u = (k as f64 + rng.random::<f64>()) / n as f64;
            let r = spec.radius * u.sqrt();
            let theta = if spec.angle_deg >= 360.0 {
                rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)
            } else {
                rng.random_range(-half..=half)
            };
            [r * theta.cos(), r * theta.sin()]
        })
        .collect();
    Ok(SampledPointSet { points })
}
