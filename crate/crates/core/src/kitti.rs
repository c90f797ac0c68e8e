//! KITTI Odometry ingestion: poses, calibration, velodyne scans and the
//! sequence layout `root/sequences/SS/{calib.txt, velodyne/, image_2/}` with
//! poses at `root/poses/SS.txt`.
//!
//! KITTI poses are expressed in the camera frame of frame 0 (x right, y
//! down, z forward). [`parse_poses`] conjugates them into the crate's z-up
//! convention so that the ground plane is x–y and headings are yaw angles;
//! [`write_poses`] applies the inverse.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Vector3};

use crate::cloud::{Frame, PointCloud};
use crate::error::{Error, Result};
use crate::geometry::CameraModel;
use crate::pose::{orthonormal_drift, Pose, ORTHONORMAL_TOL};

/// Drift above which a pose rotation is rejected rather than repaired.
pub const MAX_POSE_DRIFT: f64 = 1e-3;

/// Image size of the left colour camera in sequences 00–02 and 13–21.
pub const DEFAULT_IMAGE_SIZE: (usize, usize) = (1226, 370);

const VELODYNE_RECORD: usize = 16;

/// Camera-optical axes to z-up axes (forward, left, up).
fn axes() -> Matrix3<f64> {
    Matrix3::new(0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, -1.0, 0.0)
}

/// Frame id for frame `index` of sequence `seq`: `"SS/FFFFFF"`.
pub fn frame_id(seq: &str, index: usize) -> String {
    format!("{seq}/{index:06}")
}

/// Parses a KITTI pose file. Frame ids use the file stem as sequence prefix.
pub fn parse_poses(path: impl AsRef<Path>) -> Result<Vec<Pose>> {
    let path = path.as_ref();
    let seq = path.file_stem().and_then(|s| s.to_str()).unwrap_or("").to_string();
    parse_poses_with_prefix(path, &seq)
}

pub fn parse_poses_with_prefix(path: impl AsRef<Path>, seq: &str) -> Result<Vec<Pose>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_poses_str(&text, seq)
}

/// Parses pose lines (12 reals, row-major 3×4). Blank lines are skipped
/// but still advance the frame index.
pub fn parse_poses_str(text: &str, seq: &str) -> Result<Vec<Pose>> {
    let a = axes();
    let mut poses = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let vals = parse_reals(line).map_err(|message| Error::Parse { line: lineno, message })?;
        if vals.len() != 12 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 12 values, found {}", vals.len()),
            });
        }
        let r = Matrix3::new(vals[0], vals[1], vals[2], vals[4], vals[5], vals[6], vals[8], vals[9], vals[10]);
        let t = Vector3::new(vals[3], vals[7], vals[11]);
        let drift = orthonormal_drift(&r);
        let (pose, repaired) = Pose::from_drifted(a * r * a.transpose(), a * t, frame_id(seq, idx), MAX_POSE_DRIFT)
            .map_err(|e| match e {
                Error::Data(m) => Error::Data(format!("line {lineno}: {m}")),
                other => other,
            })?;
        if repaired {
            log::warn!("line {lineno}: re-orthonormalized rotation (drift {drift:.2e} > {ORTHONORMAL_TOL:e})");
        }
        poses.push(pose);
    }
    Ok(poses)
}

fn parse_reals(text: &str) -> std::result::Result<Vec<f64>, String> {
    text.split_whitespace()
        .map(|tok| tok.parse::<f64>().map_err(|_| format!("not a number: {tok:?}")))
        .collect()
}

/// Serializes poses back to KITTI camera-frame lines.
pub fn format_poses(poses: &[Pose]) -> String {
    let a = axes();
    let mut out = String::new();
    for p in poses {
        let r = a.transpose() * p.rotation() * a;
        let t = a.transpose() * p.translation();
        let vals = [
            r[(0, 0)], r[(0, 1)], r[(0, 2)], t[0],
            r[(1, 0)], r[(1, 1)], r[(1, 2)], t[1],
            r[(2, 0)], r[(2, 1)], r[(2, 2)], t[2],
        ];
        let line: Vec<String> = vals.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_poses(poses: &[Pose], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_poses(poses)).map_err(|e| Error::io(path, e))
}

/// Reads a velodyne scan: little-endian `f32` records `(x, y, z, intensity)`.
pub fn parse_velodyne(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_velodyne(&bytes)
}

pub fn decode_velodyne(bytes: &[u8]) -> Result<PointCloud> {
    if !bytes.len().is_multiple_of(VELODYNE_RECORD) {
        return Err(Error::Format {
            offset: (bytes.len() - bytes.len() % VELODYNE_RECORD) as u64,
            message: format!("size {} is not a multiple of {VELODYNE_RECORD}", bytes.len()),
        });
    }
    let n = bytes.len() / VELODYNE_RECORD;
    let mut points = Vec::with_capacity(n);
    let mut intensity = Vec::with_capacity(n);
    for rec in bytes.chunks_exact(VELODYNE_RECORD) {
        let f = |i: usize| f32::from_le_bytes(rec[4 * i..4 * i + 4].try_into().unwrap());
        points.push([f(0) as f64, f(1) as f64, f(2) as f64]);
        intensity.push(f(3));
    }
    PointCloud::with_intensity(points, Some(intensity), Frame::Lidar)
}

/// Encodes a cloud as velodyne records; coordinates are narrowed to `f32`
/// and missing intensity is written as 0.
pub fn encode_velodyne(cloud: &PointCloud) -> Vec<u8> {
    let mut out = Vec::with_capacity(cloud.len() * VELODYNE_RECORD);
    for (i, p) in cloud.points().iter().enumerate() {
        for v in p {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        let inten = cloud.intensity().map_or(0.0, |s| s[i]);
        out.extend_from_slice(&inten.to_le_bytes());
    }
    out
}

pub fn write_velodyne(cloud: &PointCloud, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_velodyne(cloud)).map_err(|e| Error::io(path, e))
}

/// Parses `calib.txt` into the left colour camera (P2) with its LiDAR
/// extrinsic (Tr), assuming [`DEFAULT_IMAGE_SIZE`].
pub fn parse_calib(path: impl AsRef<Path>) -> Result<CameraModel> {
    let (w, h) = DEFAULT_IMAGE_SIZE;
    parse_calib_with_size(path, w, h)
}

pub fn parse_calib_with_size(path: impl AsRef<Path>, width: usize, height: usize) -> Result<CameraModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_calib_str(&text, width, height)
}

pub fn parse_calib_str(text: &str, width: usize, height: usize) -> Result<CameraModel> {
    let mut p2 = None;
    let mut tr = None;
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |why: &str| Error::Parse {
            line: idx + 1,
            message: format!("{why}: {line:?}"),
        };
        let (key, rest) = line.split_once(':').ok_or_else(|| malformed("missing ':'"))?;
        let vals = parse_reals(rest).map_err(|m| malformed(&m))?;
        if vals.len() != 12 {
            return Err(malformed(&format!("expected 12 values, found {}", vals.len())));
        }
        match key.trim() {
            "P2" => p2 = Some(vals),
            "Tr" | "Tr_velo_to_cam" => tr = Some(vals),
            _ => {}
        }
    }
    let p2 = p2.ok_or_else(|| Error::MissingKey("P2".into()))?;
    let tr = tr.ok_or_else(|| Error::MissingKey("Tr".into()))?;

    let k = Matrix3::new(p2[0], p2[1], p2[2], p2[4], p2[5], p2[6], p2[8], p2[9], p2[10]);
    let k_inv = k
        .try_inverse()
        .ok_or_else(|| Error::Data("P2 intrinsic block is singular".into()))?;
    // P2 = K [I | b]
    let baseline = k_inv * Vector3::new(p2[3], p2[7], p2[11]);
    let (velo_to_cam0, repaired) = Pose::from_drifted(
        Matrix3::new(tr[0], tr[1], tr[2], tr[4], tr[5], tr[6], tr[8], tr[9], tr[10]),
        Vector3::new(tr[3], tr[7], tr[11]),
        "cam",
        MAX_POSE_DRIFT,
    )?;
    if repaired {
        log::warn!("calib: re-orthonormalized Tr rotation");
    }
    let cam0_to_cam2 = Pose::new(Matrix3::identity(), baseline, "cam")?;
    let lidar_to_cam = cam0_to_cam2.compose(&velo_to_cam0);
    CameraModel::new(p2[0], p2[5], p2[2], p2[6], width, height, lidar_to_cam.inverse())
}

/// KITTI train/test sequence split: the last 11 sequences train, the first
/// 11 (which carry published ground truth) evaluate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSpec {
    pub train: Vec<String>,
    pub test: Vec<String>,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train: (11..=21).map(|s| format!("{s:02}")).collect(),
            test: (0..=10).map(|s| format!("{s:02}")).collect(),
        }
    }
}

impl SplitSpec {
    pub fn new(train: Vec<String>, test: Vec<String>) -> Result<Self> {
        if let Some(s) = train.iter().find(|s| test.contains(s)) {
            return Err(Error::Argument(format!("sequence {s} is in both train and test")));
        }
        Ok(Self { train, test })
    }

    pub fn is_disjoint(&self) -> bool {
        !self.train.iter().any(|s| self.test.contains(s))
    }
}

/// Files of one KITTI sequence. `frames` are the velodyne scans sorted by
/// name; `pose_file` is absent for sequences without published poses.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceManifest {
    pub sequence_id: String,
    pub frame_count: usize,
    pub pose_file: Option<PathBuf>,
    pub calib_file: PathBuf,
    pub velodyne_dir: PathBuf,
    pub image_dir: PathBuf,
    pub frames: Vec<PathBuf>,
}

impl SequenceManifest {
    /// Scans `root` for sequence `seq`. Zero frames is not an error here;
    /// when a pose file exists its line count must equal the frame count.
    pub fn discover(root: impl AsRef<Path>, seq: &str) -> Result<Self> {
        let root = root.as_ref();
        let seq_dir = root.join("sequences").join(seq);
        let velodyne_dir = seq_dir.join("velodyne");
        let mut frames = Vec::new();
        if velodyne_dir.is_dir() {
            for entry in fs::read_dir(&velodyne_dir).map_err(|e| Error::io(&velodyne_dir, e))? {
                let p = entry.map_err(|e| Error::io(&velodyne_dir, e))?.path();
                if p.extension().is_some_and(|e| e == "bin") {
                    frames.push(p);
                }
            }
        }
        frames.sort();
        let pose_path = root.join("poses").join(format!("{seq}.txt"));
        let pose_file = pose_path.is_file().then_some(pose_path);
        let manifest = Self {
            sequence_id: seq.to_string(),
            frame_count: frames.len(),
            pose_file,
            calib_file: seq_dir.join("calib.txt"),
            velodyne_dir,
            image_dir: seq_dir.join("image_2"),
            frames,
        };
        if let Some(pf) = &manifest.pose_file {
            let text = fs::read_to_string(pf).map_err(|e| Error::io(pf, e))?;
            let n = text.lines().filter(|l| !l.trim().is_empty()).count();
            if n != manifest.frame_count && manifest.frame_count > 0 {
                return Err(Error::Data(format!(
                    "sequence {seq}: {n} poses but {} velodyne frames",
                    manifest.frame_count
                )));
            }
        }
        Ok(manifest)
    }

    pub fn frame_id(&self, index: usize) -> String {
        frame_id(&self.sequence_id, index)
    }

    pub fn poses(&self) -> Result<Vec<Pose>> {
        match &self.pose_file {
            Some(p) => parse_poses_with_prefix(p, &self.sequence_id),
            None => Err(Error::Data(format!("sequence {} has no pose file", self.sequence_id))),
        }
    }
}

/// For each query, the ids of database poses within planar distance `t`.
pub fn build_ground_truth(queries: &[Pose], database: &[Pose], t: f64) -> Vec<BTreeSet<String>> {
    queries
        .iter()
        .map(|q| {
            database
                .iter()
                .filter(|d| q.planar_distance(d) <= t)
                .map(|d| d.frame_id().to_string())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_line() {
        let p = parse_poses_str("1 0 0 0 0 1 0 0 0 0 1 0\n", "00").unwrap();
        assert_eq!(p.len(), 1);
        assert!(p[0].distance_from_identity() < 1e-12);
        assert_eq!(p[0].frame_id(), "00/000000");
    }

    #[test]
    fn forward_motion_maps_to_plus_x() {
        let p = parse_poses_str("1 0 0 0 0 1 0 0 0 0 1 5\n", "00").unwrap();
        assert_eq!(p[0].planar_position(), [5.0, 0.0]);
    }

    #[test]
    fn wrong_field_count_names_line() {
        match parse_poses_str("1 0 0 0 0 1 0 0 0 0 1 0\n1 2 3\n", "00") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn heavy_drift_rejected_light_drift_repaired() {
        assert!(parse_poses_str("1.01 0 0 0 0 1 0 0 0 0 1 0", "00").is_err());
        let p = parse_poses_str("1.00001 0 0 0 0 1 0 0 0 0 1 0", "00").unwrap();
        assert!(orthonormal_drift(p[0].rotation()) < 1e-9);
    }

    #[test]
    fn pose_text_roundtrip() {
        let poses = vec![Pose::planar(3.0, -2.0, 0.7, "00/000000"), Pose::planar(-1.0, 4.0, -2.0, "00/000001")];
        let back = parse_poses_str(&format_poses(&poses), "00").unwrap();
        for (a, b) in poses.iter().zip(&back) {
            assert!(a.inverse().compose(b).distance_from_identity() < 1e-12);
            assert_eq!(a.frame_id(), b.frame_id());
        }
    }

    #[test]
    fn velodyne_size_checks() {
        assert!(decode_velodyne(&[]).unwrap().is_empty());
        assert_eq!(decode_velodyne(&[0u8; 32]).unwrap().len(), 2);
        assert!(matches!(decode_velodyne(&[0u8; 33]), Err(Error::Format { offset: 32, .. })));
    }

    #[test]
    fn identity_calib() {
        let text = "P2: 1 0 0.5 0 0 1 0.5 0 0 0 1 0\nTr: 1 0 0 0 0 1 0 0 0 0 1 0\n";
        let cam = parse_calib_str(text, 2, 2).unwrap();
        assert_eq!((cam.fx, cam.fy), (1.0, 1.0));
        assert!(cam.cam_to_lidar().translation().norm() < 1e-15);
    }

    #[test]
    fn calib_errors() {
        match parse_calib_str("Tr: 1 0 0 0 0 1 0 0 0 0 1 0\n", 2, 2) {
            Err(Error::MissingKey(k)) => assert_eq!(k, "P2"),
            other => panic!("unexpected {other:?}"),
        }
        match parse_calib_str("P2: 1 0 zz\n", 2, 2) {
            Err(e) => assert!(e.to_string().contains("P2: 1 0 zz")),
            Ok(_) => panic!("accepted malformed line"),
        }
    }

    #[test]
    fn ground_truth_threshold() {
        let db = vec![Pose::planar(0.0, 0.0, 0.0, "a"), Pose::planar(3.0, 4.0, 1.0, "b")];
        let q = vec![Pose::planar(0.0, 0.0, 2.0, "q")];
        assert_eq!(build_ground_truth(&q, &db, 0.0)[0], BTreeSet::from(["a".to_string()]));
        assert_eq!(build_ground_truth(&q, &db, 5.0)[0].len(), 2);
    }

    #[test]
    fn default_split_is_disjoint() {
        let s = SplitSpec::default();
        assert!(s.is_disjoint());
        assert_eq!((s.train.len(), s.test.len()), (11, 11));
        assert!(SplitSpec::new(vec!["03".into()], vec!["03".into()]).is_err());
    }
}
