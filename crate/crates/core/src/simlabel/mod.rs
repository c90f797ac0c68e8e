//! Pose-derived similarity labels.
//!
//! Every generator maps a pair of frames to a similarity in `[0, 1]` and is
//! evaluated per pair on demand; no dense pair matrix is ever built.

mod mnn;
mod overlap;
mod sampling;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::pose::Pose;

pub use mnn::{mutual_nn_pairs, sim_pointcloud_mnn};
pub use overlap::{sim_sector_overlap, OverlapMode, RASTER_CELLS};
pub use sampling::{sample_sector_points, SampledPointSet, SectorSpec};

/// Sample points per set used by the points-average-distance label.
pub const DEFAULT_SAMPLE_COUNT: usize = 64;
/// Fixed seed so sample correspondences are stable across a whole dataset.
pub const DEFAULT_SAMPLE_SEED: u64 = 0x9A1D;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityParams {
    /// Distance at which the points-average similarity reaches zero, meters.
    pub d_th: f64,
    /// Length scale of the exponential label, meters.
    pub tau: f64,
    pub binary_pos_th: f64,
    pub binary_heading_th_deg: f64,
    pub mnn_radius: f64,
}

impl Default for SimilarityParams {
    fn default() -> Self {
        Self {
            d_th: 7.5,
            tau: 3.0,
            binary_pos_th: 10.0,
            binary_heading_th_deg: 30.0,
            mnn_radius: 0.5,
        }
    }
}

impl SimilarityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.d_th > 0.0) {
            return Err(Error::Argument(format!("d_th must be > 0, got {}", self.d_th)));
        }
        if !(self.tau > 0.0) {
            return Err(Error::Argument(format!("tau must be > 0, got {}", self.tau)));
        }
        if !(self.mnn_radius > 0.0) {
            return Err(Error::Argument(format!("mnn_radius must be > 0, got {}", self.mnn_radius)));
        }
        Ok(())
    }
}

/// Mean displacement between corresponding ego-frame samples placed by the
/// two poses: `(1/n) Σ_k ‖T_i(p_k) − T_j(p_k)‖`.
pub fn points_average_distance(pose_i: &Pose, pose_j: &Pose, pts: &SampledPointSet) -> f64 {
    if pts.is_empty() {
        return 0.0;
    }
    // T_i(p) − T_j(p) = (R_i − R_j) p + (t_i − t_j)
    let dr = pose_i.rotation() - pose_j.rotation();
    let dt = pose_i.translation() - pose_j.translation();
    let total: f64 = pts
        .points()
        .iter()
        .map(|&[x, y]| (dr * Vector3::new(x, y, 0.0) + dt).norm())
        .sum();
    total / pts.len() as f64
}

/// Linear ramp of the points-average distance: 1 at zero, 0 from `d_th` on.
pub fn sim_from_average_distance(d_avg: f64, d_th: f64) -> f64 {
    if d_avg < d_th {
        (d_th - d_avg) / d_th
    } else {
        0.0
    }
}

pub fn sim_points_avg(pose_i: &Pose, pose_j: &Pose, pts: &SampledPointSet, params: &SimilarityParams) -> f64 {
    sim_from_average_distance(points_average_distance(pose_i, pose_j, pts), params.d_th)
}

/// `exp(−‖t_i − t_j‖ / tau)`.
pub fn sim_exp_neg_distance(pose_i: &Pose, pose_j: &Pose, params: &SimilarityParams) -> f64 {
    let d = (pose_i.translation() - pose_j.translation()).norm();
    (-d / params.tau).exp()
}

/// Absolute heading difference wrapped to `[0°, 180°]`.
pub fn heading_difference_deg(a: &Pose, b: &Pose) -> f64 {
    let d = (a.heading() - b.heading()).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d).to_degrees()
}

/// 1 when both the planar distance and the heading difference are under
/// their thresholds, else 0.
pub fn sim_binary_pose_heading(pose_i: &Pose, pose_j: &Pose, params: &SimilarityParams) -> f64 {
    let close = pose_i.planar_distance(pose_j) < params.binary_pos_th;
    let aligned = heading_difference_deg(pose_i, pose_j) < params.binary_heading_th_deg;
    if close && aligned {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMethod {
    PointsAvg,
    AreaOverlap,
    PointcloudMnn,
    ExpNegDistance,
    BinaryPoseHeading,
}

impl LabelMethod {
    pub const ALL: [LabelMethod; 5] = [
        LabelMethod::PointsAvg,
        LabelMethod::AreaOverlap,
        LabelMethod::PointcloudMnn,
        LabelMethod::ExpNegDistance,
        LabelMethod::BinaryPoseHeading,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LabelMethod::PointsAvg => "points_avg",
            LabelMethod::AreaOverlap => "area_overlap",
            LabelMethod::PointcloudMnn => "pointcloud_mnn",
            LabelMethod::ExpNegDistance => "exp_neg_distance",
            LabelMethod::BinaryPoseHeading => "binary_pose_heading",
        }
    }

    pub fn needs_clouds(self) -> bool {
        self == LabelMethod::PointcloudMnn
    }

    pub fn valid_names() -> String {
        LabelMethod::ALL.map(LabelMethod::as_str).join(", ")
    }
}

impl fmt::Display for LabelMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LabelMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LabelMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Argument(format!("unknown label method {s:?}; valid methods: {}", LabelMethod::valid_names())))
    }
}

/// Bundles the shared sample set and parameters so any generator can be
/// evaluated on a frame pair.
#[derive(Debug, Clone)]
pub struct Labeler {
    pub spec: SectorSpec,
    pub params: SimilarityParams,
    pub overlap_mode: OverlapMode,
    samples: SampledPointSet,
}

impl Default for Labeler {
    fn default() -> Self {
        Self::new(SectorSpec::default(), SimilarityParams::default()).expect("defaults are valid")
    }
}

impl Labeler {
    pub fn new(spec: SectorSpec, params: SimilarityParams) -> Result<Self> {
        Self::with_samples(spec, params, DEFAULT_SAMPLE_COUNT, DEFAULT_SAMPLE_SEED)
    }

    pub fn with_samples(spec: SectorSpec, params: SimilarityParams, n: usize, seed: u64) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            spec,
            params,
            overlap_mode: OverlapMode::Raster,
            samples: sample_sector_points(&spec, n, seed)?,
        })
    }

    pub fn samples(&self) -> &SampledPointSet {
        &self.samples
    }

    /// Pose-only similarity. Fails for [`LabelMethod::PointcloudMnn`], which
    /// needs clouds; use [`Labeler::similarity_with_clouds`].
    pub fn similarity(&self, method: LabelMethod, a: &Pose, b: &Pose) -> Result<f64> {
        Ok(match method {
            LabelMethod::PointsAvg => sim_points_avg(a, b, &self.samples, &self.params),
            LabelMethod::AreaOverlap => sim_sector_overlap(a, b, &self.spec, self.overlap_mode),
            LabelMethod::ExpNegDistance => sim_exp_neg_distance(a, b, &self.params),
            LabelMethod::BinaryPoseHeading => sim_binary_pose_heading(a, b, &self.params),
            LabelMethod::PointcloudMnn => {
                return Err(Error::Argument("pointcloud_mnn needs point clouds".into()))
            }
        })
    }

    pub fn similarity_with_clouds(
        &self,
        method: LabelMethod,
        a: (&Pose, &PointCloud),
        b: (&Pose, &PointCloud),
    ) -> Result<f64> {
        match method {
            LabelMethod::PointcloudMnn => sim_pointcloud_mnn(a.1, b.1, a.0, b.0, self.params.mnn_radius),
            _ => self.similarity(method, a.0, b.0),
        }
    }
}

/// One row of the label CSV export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRow {
    pub query_id: String,
    pub db_id: String,
    pub method: LabelMethod,
    pub similarity: f64,
}

/// Writes `query_id,db_id,method,similarity` rows with a header.
pub fn write_label_csv<W: Write>(out: W, rows: impl IntoIterator<Item = LabelRow>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(&row).map_err(|e| Error::Data(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::io("<label csv>", e))?;
    Ok(())
}
