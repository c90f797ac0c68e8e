//! Geometric preprocessing of camera and LiDAR frames.

mod bev;
mod camera;
mod crop;
mod depth;
mod ground;
mod range;

pub use bev::{rasterize_bev, BevGrid};
pub use camera::{CameraModel, PixelHit};
pub use crop::{crop_cloud_to_fov, crop_image_vertical};
pub use depth::{backproject_depth, edge_noise_mask, EdgeMethod, EdgeParams};
pub use ground::{remove_ground, GroundParams, GroundRemoval, Plane, MIN_POINTS as GROUND_MIN_POINTS};
pub use range::{project_to_range_image, RangeProjection, H_FOV_HALF_DEG};
