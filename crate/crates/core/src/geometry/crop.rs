use crate::cloud::{Frame, PointCloud};
use crate::error::{Error, Result};
use crate::raster::RasterImage;

use super::camera::CameraModel;

/// Keeps the bottom `keep_height` rows of `img` (rows are removed from
/// the top, where the sky is).
pub fn crop_image_vertical(img: &RasterImage, keep_height: usize) -> Result<RasterImage> {
    if keep_height == 0 {
        return Err(Error::Argument("keep_height must be positive".into()));
    }
    if keep_height > img.height() {
        return Err(Error::Argument(format!(
            "keep_height {keep_height} exceeds image height {}",
            img.height()
        )));
    }
    Ok(img.row_slice(img.height() - keep_height, keep_height))
}

/// Keeps the LiDAR points that project inside `cam`'s image with positive
/// depth.
pub fn crop_cloud_to_fov(cloud: &PointCloud, cam: &CameraModel) -> Result<PointCloud> {
    cloud.ensure_frame(Frame::Lidar)?;
    Ok(cloud.filter(|_, p| cam.project_lidar(*p).is_some_and(|hit| cam.in_image(&hit))))
}
