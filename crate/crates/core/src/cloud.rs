use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pose::Pose;

/// Coordinate frame a point cloud is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Lidar,
    Camera,
    World,
}

/// Unordered 3-D points (meters) with optional per-point intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<[f64; 3]>,
    intensity: Option<Vec<f32>>,
    frame: Frame,
}

impl PointCloud {
    pub fn new(points: Vec<[f64; 3]>, frame: Frame) -> Result<Self> {
        Self::with_intensity(points, None, frame)
    }

    pub fn with_intensity(
        points: Vec<[f64; 3]>,
        intensity: Option<Vec<f32>>,
        frame: Frame,
    ) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !p.iter().all(|v| v.is_finite())) {
            return Err(Error::Data(format!("point {i} has non-finite coordinates")));
        }
        if let Some(ref inten) = intensity {
            if inten.len() != points.len() {
                return Err(Error::Dimension {
                    expected: points.len(),
                    found: inten.len(),
                });
            }
        }
        Ok(Self {
            points,
            intensity,
            frame,
        })
    }

    pub fn empty(frame: Frame) -> Self {
        Self {
            points: Vec::new(),
            intensity: None,
            frame,
        }
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn intensity(&self) -> Option<&[f32]> {
        self.intensity.as_deref()
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ensure_frame(&self, frame: Frame) -> Result<()> {
        if self.frame != frame {
            return Err(Error::FrameMismatch {
                left: self.frame,
                right: frame,
            });
        }
        Ok(())
    }

    /// Keeps the points for which `keep(index, point)` is true; intensity
    /// follows its points.
    pub fn filter(&self, mut keep: impl FnMut(usize, &[f64; 3]) -> bool) -> PointCloud {
        let mask: Vec<bool> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| keep(i, p))
            .collect();
        let points = self
            .points
            .iter()
            .zip(&mask)
            .filter_map(|(p, &m)| m.then_some(*p))
            .collect();
        let intensity = self.intensity.as_ref().map(|inten| {
            inten
                .iter()
                .zip(&mask)
                .filter_map(|(v, &m)| m.then_some(*v))
                .collect()
        });
        PointCloud {
            points,
            intensity,
            frame: self.frame,
        }
    }

    /// Applies `pose` to every point and relabels the frame.
    pub fn transformed(&self, pose: &Pose, frame: Frame) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(|p| pose.transform(*p)).collect(),
            intensity: self.intensity.clone(),
            frame,
        }
    }

    /// Replaces the points of each occupied voxel with their centroid.
    /// Output order follows the first point seen in each voxel.
    pub fn voxel_downsample(&self, voxel: f64) -> Result<PointCloud> {
        if !(voxel > 0.0) {
            return Err(Error::Argument(format!("voxel size must be > 0, got {voxel}")));
        }
        let mut slots: HashMap<[i64; 3], usize> = HashMap::new();
        let mut sums: Vec<([f64; 3], usize)> = Vec::new();
        for p in &self.points {
            let key = p.map(|v| (v / voxel).floor() as i64);
            let slot = *slots.entry(key).or_insert_with(|| {
                sums.push(([0.0; 3], 0));
                sums.len() - 1
            });
            let (acc, n) = &mut sums[slot];
            for k in 0..3 {
                acc[k] += p[k];
            }
            *n += 1;
        }
        let points = sums
            .into_iter()
            .map(|(acc, n)| acc.map(|v| v / n as f64))
            .collect();
        Ok(PointCloud {
            points,
            intensity: None,
            frame: self.frame,
        })
    }
}
