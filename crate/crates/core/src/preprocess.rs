//! Per-frame raster generation: FoV crop, range image, ground removal and
//! BEV occupancy for LiDAR scans and for depth-map pseudo clouds.

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::Result;
use crate::geometry::{
    backproject_depth, crop_cloud_to_fov, edge_noise_mask, project_to_range_image, rasterize_bev, remove_ground, BevGrid,
    CameraModel, EdgeParams, GroundParams, RangeProjection,
};
use crate::raster::RasterImage;

/// Image rows kept after cropping the sky side of a KITTI frame.
pub const DEFAULT_KEEP_HEIGHT: usize = 205;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub keep_height: usize,
    #[serde(skip)]
    pub range: RangeProjection,
    #[serde(skip)]
    pub grid: BevGrid,
    #[serde(skip)]
    pub ground: GroundParams,
    #[serde(skip)]
    pub edge: EdgeParams,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            keep_height: DEFAULT_KEEP_HEIGHT,
            range: RangeProjection::default(),
            grid: BevGrid::default(),
            ground: GroundParams::default(),
            edge: EdgeParams::default(),
        }
    }
}

impl PreprocessConfig {
    /// The camera after the vertical crop; unchanged if it is already at
    /// most `keep_height` rows tall.
    pub fn cropped_camera(&self, cam: &CameraModel) -> Result<CameraModel> {
        if cam.image_height <= self.keep_height {
            Ok(cam.clone())
        } else {
            cam.cropped_top(self.keep_height)
        }
    }
}

#[derive(Debug, Clone)]
pub struct LidarRasters {
    pub range: RasterImage,
    pub bev: RasterImage,
    pub fov_points: usize,
    pub ground_removed: usize,
}

/// Range image of the FoV-cropped scan, and BEV of the same points after
/// ground removal.
pub fn lidar_rasters(scan: &PointCloud, cam: &CameraModel, cfg: &PreprocessConfig) -> Result<LidarRasters> {
    let cam = cfg.cropped_camera(cam)?;
    let fov = crop_cloud_to_fov(scan, &cam)?;
    let range = project_to_range_image(&fov, &cfg.range)?;
    let ground = remove_ground(&fov, &cfg.ground);
    if ground.no_plane {
        log::warn!("no ground plane satisfied the tilt constraint; BEV keeps all points");
    }
    let bev = rasterize_bev(&ground.cloud, &cfg.grid)?;
    Ok(LidarRasters {
        range,
        bev,
        fov_points: fov.len(),
        ground_removed: ground.removed,
    })
}

/// BEV of a depth map: edge-noise masking, back-projection into the LiDAR
/// frame, ground removal. A depth map shorter than the camera image is
/// taken to be the bottom rows.
pub fn camera_bev(depth: &RasterImage, cam: &CameraModel, cfg: &PreprocessConfig) -> Result<RasterImage> {
    let cam = if depth.height() < cam.image_height {
        cam.cropped_top(depth.height())?
    } else {
        cam.clone()
    };
    if depth.width() != cam.image_width || depth.height() != cam.image_height {
        return Err(crate::error::Error::Dimension {
            expected: cam.image_width * cam.image_height,
            found: depth.width() * depth.height(),
        });
    }
    let masked = edge_noise_mask(depth, &cfg.edge)?;
    let pseudo = backproject_depth(&masked, &cam)?;
    let ground = remove_ground(&pseudo, &cfg.ground);
    rasterize_bev(&ground.cloud, &cfg.grid)
}
