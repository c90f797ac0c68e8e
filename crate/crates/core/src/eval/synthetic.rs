//! Seeded stand-in for trained descriptors.
//!
//! Every pose gets a smooth base embedding (random Fourier features of its
//! planar position, unit norm), so descriptor similarity decays with
//! distance. Range-modality descriptors add noise whose query side is
//! dominated by a smooth function of heading; BEV descriptors use their own
//! basis plus independent isotropic noise. Noise scales are per-dimension
//! standard deviations relative to the unit-norm base.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::descriptor::{DescriptorSet, Modality};
use crate::error::{Error, Result};
use crate::pose::Pose;

/// Angular frequency scale of the heading-bias field, per radian of heading.
const HEADING_FREQUENCY: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticScenario {
    #[serde(skip)]
    pub trajectory: Vec<Pose>,
    pub embed_dim: usize,
    pub sigma_range: f64,
    pub sigma_bev: f64,
    /// Share of the query-side range noise that is a function of heading,
    /// in `[0, 1]`.
    pub correlation: f64,
    /// Kernel length scales (meters) of the range and BEV base embeddings.
    pub length_scale: f64,
    pub bev_length_scale: f64,
    pub seed: u64,
}

impl Default for SyntheticScenario {
    /// 500-pose loop, `sigma_range = 0.4` with correlation 0.8,
    /// `sigma_bev = 0.2`.
    fn default() -> Self {
        Self {
            trajectory: loop_trajectory(500, 1.0, "syn"),
            embed_dim: 256,
            sigma_range: 0.4,
            sigma_bev: 0.2,
            correlation: 0.8,
            length_scale: 8.0,
            bev_length_scale: 4.0,
            seed: 7,
        }
    }
}

impl SyntheticScenario {
    pub fn noiseless(trajectory: Vec<Pose>) -> Self {
        Self {
            trajectory,
            sigma_range: 0.0,
            sigma_bev: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trajectory.is_empty() {
            return Err(Error::Argument("synthetic trajectory is empty".into()));
        }
        if self.embed_dim == 0 {
            return Err(Error::Argument("embed_dim must be positive".into()));
        }
        if !(self.sigma_range >= 0.0 && self.sigma_bev >= 0.0) {
            return Err(Error::Argument("noise scales must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.correlation) {
            return Err(Error::Argument(format!("correlation {} outside [0, 1]", self.correlation)));
        }
        if !(self.length_scale > 0.0 && self.bev_length_scale > 0.0) {
            return Err(Error::Argument("length scales must be positive".into()));
        }
        Ok(())
    }
}

/// Counter-clockwise circular loop of `n` poses spaced `spacing` meters
/// apart, headings tangent to the path, ids `"{prefix}/NNNNNN"`.
pub fn loop_trajectory(n: usize, spacing: f64, prefix: &str) -> Vec<Pose> {
    let radius = n as f64 * spacing / (2.0 * PI);
    (0..n)
        .map(|i| {
            let phi = 2.0 * PI * i as f64 / n as f64;
            Pose::planar(
                radius * phi.cos(),
                radius * phi.sin(),
                phi + PI / 2.0,
                crate::kitti::frame_id(prefix, i),
            )
        })
        .collect()
}

/// Query-side (`rgb`, `camera_bev`) and database-side (`range`,
/// `lidar_bev`) descriptor sets, row-aligned with `poses`.
#[derive(Debug, Clone)]
pub struct SyntheticDescriptors {
    pub rgb: DescriptorSet,
    pub range: DescriptorSet,
    pub camera_bev: DescriptorSet,
    pub lidar_bev: DescriptorSet,
    pub poses: Vec<Pose>,
}

/// Random Fourier features `sqrt(2/D) cos(W x + b)` for a 2-D input.
struct FourierBasis {
    w: Vec<[f64; 2]>,
    phase: Vec<f64>,
    scale: f64,
}

impl FourierBasis {
    fn new(rng: &mut ChaCha8Rng, dim: usize, frequency: f64, scale: f64) -> Self {
        let w = (0..dim)
            .map(|_| {
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                [a * frequency, b * frequency]
            })
            .collect();
        let phase = (0..dim).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        Self { w, phase, scale }
    }

    fn eval(&self, x: [f64; 2]) -> Vec<f64> {
        self.w
            .iter()
            .zip(&self.phase)
            .map(|(w, b)| self.scale * (w[0] * x[0] + w[1] * x[1] + b).cos())
            .collect()
    }
}

fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

/// Deterministic for fixed scenario fields.
pub fn generate_synthetic_descriptors(s: &SyntheticScenario) -> Result<SyntheticDescriptors> {
    s.validate()?;
    let d = s.embed_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let unit = (2.0 / d as f64).sqrt();
    let range_basis = FourierBasis::new(&mut rng, d, 1.0 / s.length_scale, unit);
    let bev_basis = FourierBasis::new(&mut rng, d, 1.0 / s.bev_length_scale, unit);
    let heading_basis = FourierBasis::new(&mut rng, d, HEADING_FREQUENCY, 2f64.sqrt());

    let c = s.correlation;
    let iid = (1.0 - c * c).sqrt();
    let n = s.trajectory.len();
    let mut rows: [Vec<f32>; 4] = std::array::from_fn(|_| Vec::with_capacity(n * d));
    for pose in &s.trajectory {
        let x = pose.planar_position();
        let base = range_basis.eval(x);
        let bev = bev_basis.eval(x);
        let h = pose.heading();
        let bias = heading_basis.eval([h.cos(), h.sin()]);

        let eq = gaussian(&mut rng, d);
        let ed = gaussian(&mut rng, d);
        let eb1 = gaussian(&mut rng, d);
        let eb2 = gaussian(&mut rng, d);
        for k in 0..d {
            rows[0].push((base[k] + s.sigma_range * (c * bias[k] + iid * eq[k])) as f32);
            rows[1].push((base[k] + s.sigma_range * iid * ed[k]) as f32);
            rows[2].push((bev[k] + s.sigma_bev * eb1[k]) as f32);
            rows[3].push((bev[k] + s.sigma_bev * eb2[k]) as f32);
        }
    }
    let ids: Vec<String> = s.trajectory.iter().map(|p| p.frame_id().to_string()).collect();
    let [rgb, range, camera_bev, lidar_bev] = rows;
    Ok(SyntheticDescriptors {
        rgb: DescriptorSet::new(Modality::Rgb, d, ids.clone(), rgb)?,
        range: DescriptorSet::new(Modality::Range, d, ids.clone(), range)?,
        camera_bev: DescriptorSet::new(Modality::CameraBev, d, ids.clone(), camera_bev)?,
        lidar_bev: DescriptorSet::new(Modality::LidarBev, d, ids, lidar_bev)?,
        poses: s.trajectory.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::dot;

    #[test]
    fn deterministic_for_fixed_seed() {
        let s = SyntheticScenario {
            trajectory: loop_trajectory(40, 1.0, "syn"),
            ..Default::default()
        };
        let a = generate_synthetic_descriptors(&s).unwrap();
        let b = generate_synthetic_descriptors(&s).unwrap();
        assert_eq!(a.rgb, b.rgb);
        assert_eq!(a.lidar_bev, b.lidar_bev);
        let c = generate_synthetic_descriptors(&SyntheticScenario { seed: 8, ..s }).unwrap();
        assert_ne!(a.rgb, c.rgb);
    }

    #[test]
    fn noiseless_similarity_decays_with_distance() {
        let traj = loop_trajectory(200, 1.0, "syn");
        let out = generate_synthetic_descriptors(&SyntheticScenario::noiseless(traj.clone())).unwrap();
        assert_eq!(out.rgb.data(), out.range.data());
        // mean similarity per 5 m distance bin, first 6 bins
        let mut sums = [0.0; 6];
        let mut counts = [0usize; 6];
        for j in 0..out.range.len() {
            let bin = (traj[0].planar_distance(&traj[j]) / 5.0) as usize;
            if bin < 6 {
                sums[bin] += dot(out.rgb.row(0), out.range.row(j));
                counts[bin] += 1;
            }
        }
        let means: Vec<f64> = sums.iter().zip(&counts).map(|(s, c)| s / *c as f64).collect();
        assert!(means.windows(2).all(|w| w[0] > w[1]), "{means:?}");
    }

    #[test]
    fn trajectory_is_a_closed_loop() {
        let t = loop_trajectory(100, 1.0, "syn");
        assert!((t[0].planar_distance(&t[1]) - 1.0).abs() < 1e-3);
        assert!((t[99].planar_distance(&t[0]) - 1.0).abs() < 1e-3);
        assert_eq!(t[42].frame_id(), "syn/000042");
    }
}
