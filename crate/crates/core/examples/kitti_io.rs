//! KITTI odometry inputs: a calibration file, a pose file in the camera
//! convention, and a velodyne scan, read from a directory written here.
//!
//! Run with `cargo run --release --example kitti_io`.

use crossvpr::cloud::{Frame, PointCloud};
use crossvpr::eval::percent_cutoff;
use crossvpr::kitti::{build_ground_truth, parse_calib, parse_poses, parse_velodyne, write_velodyne, SequenceManifest};

const CALIB: &str = "\
P2: 7.188560e+02 0 6.071928e+02 4.538225e+01 0 7.188560e+02 1.852157e+02 -1.130887e-01 0 0 1 3.779761e-03
Tr: 4.276802e-04 -9.999672e-01 -8.084492e-03 -1.198460e-02 -7.210627e-03 8.081198e-03 -9.999413e-01 -5.403985e-02 9.999739e-01 4.859486e-04 -7.206934e-03 -2.921969e-01
";

fn main() -> crossvpr::Result<()> {
    let root = std::env::temp_dir().join(format!("crossvpr-kitti-io-{}", std::process::id()));
    let seq = root.join("sequences/00");
    let io = |p: &std::path::Path, r: std::io::Result<()>| r.map_err(|e| crossvpr::Error::io(p, e));
    io(&root, std::fs::create_dir_all(seq.join("velodyne")))?;
    io(&root, std::fs::create_dir_all(root.join("poses")))?;
    io(&seq, std::fs::write(seq.join("calib.txt"), CALIB))?;

    // camera frame: x right, y down, z forward; the car drives forward 1 m per frame
    let poses: String = (0..5).map(|i| format!("1 0 0 0 0 1 0 0 0 0 1 {i}\n")).collect();
    io(&root, std::fs::write(root.join("poses/00.txt"), poses))?;
    for i in 0..5 {
        let cloud = PointCloud::new(vec![[5.0 + i as f64, 0.0, -1.7], [10.0, 2.0, 0.5]], Frame::Lidar)?;
        write_velodyne(&cloud, seq.join(format!("velodyne/{i:06}.bin")))?;
    }

    let manifest = SequenceManifest::discover(&root, "00")?;
    let cam = parse_calib(&manifest.calib_file)?;
    let poses = parse_poses(manifest.pose_file.as_ref().expect("pose file written above"))?;
    let scan = parse_velodyne(&manifest.frames[0])?;
    println!("sequence {} with {} frames", manifest.sequence_id, manifest.frame_count);
    println!("intrinsics fx={} cx={} cy={} image {}x{}", cam.fx, cam.cx, cam.cy, cam.image_width, cam.image_height);
    println!("camera origin in the LiDAR frame {:?}", cam.cam_to_lidar().translation().as_slice());
    for p in &poses {
        println!("  {} at {:?}, heading {:.1} deg", p.frame_id(), p.planar_position(), p.heading().to_degrees());
    }
    println!("first scan has {} points; first point {:?}", scan.len(), scan.points()[0]);
    let truth = build_ground_truth(&poses[..1], &poses, 2.5);
    println!("frames within 2.5 m of {}: {:?}", poses[0].frame_id(), truth[0]);
    println!("1% of a 4541-frame database is the top {}", percent_cutoff(4541, 1.0));
    io(&root, std::fs::remove_dir_all(&root))?;
    Ok(())
}
