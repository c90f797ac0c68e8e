use std::collections::BTreeSet;
use std::fs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crossvpr::cloud::{Frame, PointCloud};
use crossvpr::eval::percent_cutoff;
use crossvpr::kitti::{
    build_ground_truth, format_poses, parse_calib, parse_poses, parse_poses_str, parse_velodyne, write_poses,
    write_velodyne, SequenceManifest,
};
use crossvpr::pose::{rotation_from_axis_angle, Pose};
use crossvpr::Error;

const KITTI00_CALIB: &str = "\
P0: 7.188560000000e+02 0.000000000000e+00 6.071928000000e+02 0.000000000000e+00 0.000000000000e+00 7.188560000000e+02 1.852157000000e+02 0.000000000000e+00 0.000000000000e+00 0.000000000000e+00 1.000000000000e+00 0.000000000000e+00
P1: 7.188560000000e+02 0.000000000000e+00 6.071928000000e+02 -3.861448000000e+02 0.000000000000e+00 7.188560000000e+02 1.852157000000e+02 0.000000000000e+00 0.000000000000e+00 0.000000000000e+00 1.000000000000e+00 0.000000000000e+00
P2: 7.188560000000e+02 0.000000000000e+00 6.071928000000e+02 4.538225000000e+01 0.000000000000e+00 7.188560000000e+02 1.852157000000e+02 -1.130887000000e-01 0.000000000000e+00 0.000000000000e+00 1.000000000000e+00 3.779761000000e-03
P3: 7.188560000000e+02 0.000000000000e+00 6.071928000000e+02 -3.372877000000e+02 0.000000000000e+00 7.188560000000e+02 1.852157000000e+02 2.369057000000e+00 0.000000000000e+00 0.000000000000e+00 1.000000000000e+00 4.915215000000e-03
Tr: 4.276802385584e-04 -9.999672484946e-01 -8.084491683471e-03 -1.198459927713e-02 -7.210626507497e-03 8.081198471645e-03 -9.999413164504e-01 -5.403984729748e-02 9.999738645903e-01 4.859485810390e-04 -7.206933692422e-03 -2.921968648686e-01
";

fn random_poses(rng: &mut ChaCha8Rng, n: usize, seq: &str) -> Vec<Pose> {
    (0..n)
        .map(|i| {
            let axis = [rng.random_range(-0.1..0.1), rng.random_range(-1.0..1.0), rng.random_range(-0.1..0.1)];
            let r = rotation_from_axis_angle(axis, rng.random_range(-3.0..3.0));
            let t = nalgebra::Vector3::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0), rng.random_range(-2.0..2.0));
            Pose::new(r, t, format!("{seq}/{i:06}")).unwrap()
        })
        .collect()
}

#[test]
fn real_calib_projection_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("calib.txt");
    fs::write(&path, KITTI00_CALIB).unwrap();
    let cam = parse_calib(&path).unwrap();
    assert_eq!((cam.fx, cam.cx, cam.cy), (718.856, 607.1928, 185.2157));
    // the left colour camera sits roughly 0.27 m ahead of and 0.08 m below the LiDAR
    let origin = cam.cam_to_lidar().translation();
    assert!((origin[0] - 0.27).abs() < 0.05 && (origin[2] + 0.08).abs() < 0.05, "{origin:?}");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let p = [rng.random_range(3.0..60.0), rng.random_range(-20.0..20.0), rng.random_range(-2.0..2.0)];
        let hit = cam.project_lidar(p).unwrap();
        let back = cam.cam_to_lidar().transform(cam.unproject(hit.u, hit.v, hit.depth));
        let err = ((back[0] - p[0]).powi(2) + (back[1] - p[1]).powi(2) + (back[2] - p[2]).powi(2)).sqrt();
        assert!(err < 1e-4, "{err}");
    }
}

#[test]
fn kitti00_sized_pose_file_line_count() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("00.txt");
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    write_poses(&random_poses(&mut rng, 4541, "00"), &path).unwrap();
    let lines = fs::read_to_string(&path).unwrap().lines().count();
    let poses = parse_poses(&path).unwrap();
    assert_eq!(poses.len(), lines);
    assert_eq!(poses.len(), 4541);
    assert_eq!(poses[4540].frame_id(), "00/004540");
    assert_eq!(percent_cutoff(poses.len(), 1.0), 46);
}

#[test]
fn empty_pose_file() {
    assert!(parse_poses_str("", "00").unwrap().is_empty());
}

#[test]
fn pose_parse_serialize_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let text = format_poses(&random_poses(&mut rng, 50, "07"));
    let once = parse_poses_str(&text, "07").unwrap();
    let twice = parse_poses_str(&format_poses(&once), "07").unwrap();
    assert_eq!(once, twice);
}

#[test]
fn velodyne_write_read_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("000000.bin");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts: Vec<[f64; 3]> = (0..1000)
        .map(|_| [0; 3].map(|_| f64::from(rng.random_range(-80.0f32..80.0))))
        .collect();
    let intensity: Vec<f32> = (0..1000).map(|_| rng.random_range(0.0..1.0)).collect();
    let cloud = PointCloud::with_intensity(pts.clone(), Some(intensity.clone()), Frame::Lidar).unwrap();
    write_velodyne(&cloud, &path).unwrap();
    assert_eq!(fs::metadata(&path).unwrap().len(), 16_000);
    let back = parse_velodyne(&path).unwrap();
    let bits = |v: &[[f64; 3]]| v.iter().map(|p| p.map(f64::to_bits)).collect::<Vec<_>>();
    assert_eq!(bits(back.points()), bits(&pts));
    assert_eq!(back.intensity().unwrap(), intensity.as_slice());
    assert_eq!(back.frame(), Frame::Lidar);

    let again = dir.path().join("again.bin");
    write_velodyne(&back, &again).unwrap();
    assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn velodyne_bad_size_is_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.bin");
    fs::write(&path, [0u8; 20]).unwrap();
    assert!(matches!(parse_velodyne(&path), Err(Error::Format { .. })));
}

#[test]
fn ground_truth_matches_scan_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let poses = random_poses(&mut rng, 100, "00");
    let queries = &poses[..40];
    let t = 10.0;
    let truth = build_ground_truth(queries, &poses, t);
    for (q, set) in queries.iter().zip(&truth) {
        let [qx, qy] = q.planar_position();
        let oracle: BTreeSet<String> = poses
            .iter()
            .filter(|d| {
                let [dx, dy] = d.planar_position();
                ((qx - dx).powi(2) + (qy - dy).powi(2)).sqrt() <= t
            })
            .map(|d| d.frame_id().to_string())
            .collect();
        assert_eq!(set, &oracle);
        assert!(set.contains(q.frame_id()));
    }
}

#[test]
fn ground_truth_monotone_in_threshold() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let poses = random_poses(&mut rng, 80, "00");
    let mut prev = build_ground_truth(&poses, &poses, 0.0);
    for set in &prev {
        assert_eq!(set.len(), 1);
    }
    for t in [1.0, 5.0, 10.0, 25.0, 100.0] {
        let next = build_ground_truth(&poses, &poses, t);
        for (a, b) in prev.iter().zip(&next) {
            assert!(a.is_subset(b));
        }
        prev = next;
    }
}

#[test]
fn manifest_discovery_and_count_check() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let velo = root.join("sequences/03/velodyne");
    fs::create_dir_all(&velo).unwrap();
    fs::create_dir_all(root.join("poses")).unwrap();
    for i in [2, 0, 1] {
        fs::write(velo.join(format!("{i:06}.bin")), [0u8; 16]).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    write_poses(&random_poses(&mut rng, 3, "03"), root.join("poses/03.txt")).unwrap();
    let m = SequenceManifest::discover(root, "03").unwrap();
    assert_eq!(m.frame_count, 3);
    assert!(m.frames[0].ends_with("000000.bin") && m.frames[2].ends_with("000002.bin"));
    assert_eq!(m.poses().unwrap().len(), 3);
    assert_eq!(m.frame_id(2), "03/000002");

    write_poses(&random_poses(&mut rng, 5, "03"), root.join("poses/03.txt")).unwrap();
    assert!(matches!(SequenceManifest::discover(root, "03"), Err(Error::Data(_))));
}
