//! One LiDAR scan through the preprocessing chain: FoV crop, range image,
//! ground removal, BEV occupancy. Writes the rasters when given a directory.
//!
//! Run with `cargo run --release --example preprocess_scan [out_dir]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crossvpr::cloud::{Frame, PointCloud};
use crossvpr::kitti::parse_calib_str;
use crossvpr::preprocess::{lidar_rasters, PreprocessConfig};
use crossvpr::raster::save_raster;

const CALIB: &str = "\
P2: 7.188560e+02 0 6.071928e+02 4.538225e+01 0 7.188560e+02 1.852157e+02 -1.130887e-01 0 0 1 3.779761e-03
Tr: 4.276802e-04 -9.999672e-01 -8.084492e-03 -1.198460e-02 -7.210627e-03 8.081198e-03 -9.999413e-01 -5.403985e-02 9.999739e-01 4.859486e-04 -7.206934e-03 -2.921969e-01
";

/// Flat road 1.73 m below the sensor, two parked cars and a wall behind.
fn street_scan(rng: &mut ChaCha8Rng) -> crossvpr::Result<PointCloud> {
    let mut pts = Vec::new();
    for _ in 0..20_000 {
        let (x, y) = (rng.random_range(-40.0..50.0), rng.random_range(-25.0..25.0));
        pts.push([x, y, -1.73 + rng.random_range(-0.03..0.03)]);
    }
    for (cx, cy) in [(12.0, -3.5), (21.0, 4.0)] {
        for _ in 0..2_000 {
            pts.push([cx + rng.random_range(-2.2..2.2), cy + rng.random_range(-0.9..0.9), rng.random_range(-1.7..-0.2)]);
        }
    }
    for _ in 0..3_000 {
        pts.push([rng.random_range(2.0..48.0), 9.0 + rng.random_range(-0.1..0.1), rng.random_range(-1.7..3.0)]);
    }
    PointCloud::new(pts, Frame::Lidar)
}

fn main() -> crossvpr::Result<()> {
    let cam = parse_calib_str(CALIB, 1226, 370)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let scan = street_scan(&mut rng)?;
    let cfg = PreprocessConfig::default();
    let out = lidar_rasters(&scan, &cam, &cfg)?;

    println!("scan points            {}", scan.len());
    println!("inside camera FoV      {}", out.fov_points);
    println!("ground points removed  {}", out.ground_removed);
    println!(
        "range image {}x{}       {} valid pixels",
        out.range.height(),
        out.range.width(),
        out.range.valid_count()
    );
    println!(
        "bev image {}x{}       {} occupied cells",
        out.bev.height(),
        out.bev.width(),
        out.bev.valid_count()
    );

    if let Some(dir) = std::env::args().nth(1) {
        let dir = std::path::PathBuf::from(dir);
        std::fs::create_dir_all(&dir).map_err(|e| crossvpr::Error::io(&dir, e))?;
        save_raster(&out.range, dir.join("range.rast"))?;
        save_raster(&out.bev, dir.join("lidar_bev.rast"))?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
