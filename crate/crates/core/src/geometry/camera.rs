use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::pose::Pose;

/// Pinhole camera with its extrinsic relative to the LiDAR.
///
/// Camera axes follow the usual optical convention (x right, y down,
/// z forward). Pixel `(u, v)` = `(column, row)` with integer coordinates at
/// pixel centers.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraModel {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub image_width: usize,
    pub image_height: usize,
    cam_to_lidar: Pose,
    lidar_to_cam: Pose,
}

/// Projection of a point onto the image plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelHit {
    pub u: f64,
    pub v: f64,
    pub depth: f64,
}

impl CameraModel {
    pub fn new(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        image_width: usize,
        image_height: usize,
        cam_to_lidar: Pose,
    ) -> Result<Self> {
        if !(fx > 0.0 && fy > 0.0) {
            return Err(Error::Argument(format!("focal lengths must be positive ({fx}, {fy})")));
        }
        if !(0.0..image_width as f64).contains(&cx) || !(0.0..image_height as f64).contains(&cy) {
            return Err(Error::Argument(format!(
                "principal point ({cx}, {cy}) outside {image_width}x{image_height} image"
            )));
        }
        let lidar_to_cam = cam_to_lidar.inverse();
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            image_width,
            image_height,
            cam_to_lidar,
            lidar_to_cam,
        })
    }

    /// Camera looking along LiDAR +x with its optical center at the LiDAR
    /// origin.
    pub fn forward_facing(fx: f64, fy: f64, cx: f64, cy: f64, width: usize, height: usize) -> Result<Self> {
        Self::new(fx, fy, cx, cy, width, height, Self::optical_to_lidar_axes())
    }

    /// Rotation taking optical axes (right, down, forward) to LiDAR axes
    /// (forward, left, up).
    pub fn optical_to_lidar_axes() -> Pose {
        let r = Matrix3::new(0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, -1.0, 0.0);
        Pose::new(r, Vector3::zeros(), "cam").expect("axis permutation is a rotation")
    }

    pub fn cam_to_lidar(&self) -> &Pose {
        &self.cam_to_lidar
    }

    pub fn lidar_to_cam(&self) -> &Pose {
        &self.lidar_to_cam
    }

    /// Same camera after cropping the image to its bottom `keep_height` rows.
    pub fn cropped_top(&self, keep_height: usize) -> Result<Self> {
        if keep_height == 0 || keep_height > self.image_height {
            return Err(Error::Argument(format!(
                "keep_height {keep_height} outside 1..={}",
                self.image_height
            )));
        }
        let removed = (self.image_height - keep_height) as f64;
        let mut cam = self.clone();
        cam.image_height = keep_height;
        // cy may fall outside the cropped image
        cam.cy = self.cy - removed;
        Ok(cam)
    }

    /// Projects a camera-frame point. `None` if behind the camera.
    pub fn project_camera(&self, p: [f64; 3]) -> Option<PixelHit> {
        let [x, y, z] = p;
        if !(z > 0.0) {
            return None;
        }
        Some(PixelHit {
            u: self.fx * x / z + self.cx,
            v: self.fy * y / z + self.cy,
            depth: z,
        })
    }

    pub fn project_lidar(&self, p: [f64; 3]) -> Option<PixelHit> {
        self.project_camera(self.lidar_to_cam.transform(p))
    }

    pub fn in_image(&self, hit: &PixelHit) -> bool {
        hit.u >= 0.0 && hit.u < self.image_width as f64 && hit.v >= 0.0 && hit.v < self.image_height as f64
    }

    /// Camera-frame point at pixel `(u, v)` with depth `depth` along the
    /// optical axis.
    pub fn unproject(&self, u: f64, v: f64, depth: f64) -> [f64; 3] {
        [(u - self.cx) * depth / self.fx, (v - self.cy) * depth / self.fy, depth]
    }
}
