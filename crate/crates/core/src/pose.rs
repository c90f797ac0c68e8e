//! Rigid SE(3) poses.
//!
//! Poses map points from a local (ego) frame to a parent frame:
//! `p_parent = rotation * p_local + translation`. Throughout the crate the
//! ego frame is x forward, y left, z up; the ground plane is x–y.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Orthonormality tolerance enforced by [`Pose::new`].
pub const ORTHONORMAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
    frame_id: String,
}

impl Pose {
    /// Builds a pose, rejecting rotations that are not orthonormal with
    /// determinant +1 (to [`ORTHONORMAL_TOL`]).
    pub fn new(
        rotation: Matrix3<f64>,
        translation: Vector3<f64>,
        frame_id: impl Into<String>,
    ) -> Result<Self> {
        if !translation.iter().all(|v| v.is_finite()) || !rotation.iter().all(|v| v.is_finite()) {
            return Err(Error::Data("pose contains non-finite values".into()));
        }
        let drift = orthonormal_drift(&rotation);
        if drift > ORTHONORMAL_TOL {
            return Err(Error::Data(format!(
                "rotation is not orthonormal (drift {drift:.3e})"
            )));
        }
        if rotation.determinant() <= 0.0 {
            return Err(Error::Data("rotation has negative determinant".into()));
        }
        Ok(Self {
            rotation,
            translation,
            frame_id: frame_id.into(),
        })
    }

    pub fn identity(frame_id: impl Into<String>) -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
            frame_id: frame_id.into(),
        }
    }

    /// Pose on the ground plane at `(x, y)` with yaw `heading` (radians,
    /// counter-clockwise from +x).
    pub fn planar(x: f64, y: f64, heading: f64, frame_id: impl Into<String>) -> Self {
        let (s, c) = heading.sin_cos();
        Self {
            rotation: Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
            translation: Vector3::new(x, y, 0.0),
            frame_id: frame_id.into(),
        }
    }

    /// Like [`Pose::new`] but projects a slightly drifted rotation back onto
    /// SO(3). Returns the pose and whether a correction was applied.
    /// Rotations with drift above `max_drift` are rejected.
    pub fn from_drifted(
        rotation: Matrix3<f64>,
        translation: Vector3<f64>,
        frame_id: impl Into<String>,
        max_drift: f64,
    ) -> Result<(Self, bool)> {
        let drift = orthonormal_drift(&rotation);
        if !drift.is_finite() || drift > max_drift {
            return Err(Error::Data(format!(
                "rotation is not orthonormal (drift {drift:.3e})"
            )));
        }
        if drift <= ORTHONORMAL_TOL {
            return Ok((Self::new(rotation, translation, frame_id)?, false));
        }
        let fixed = nearest_rotation(&rotation);
        Ok((Self::new(fixed, translation, frame_id)?, true))
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    pub fn frame_id(&self) -> &str {
        &self.frame_id
    }

    pub fn with_frame_id(mut self, frame_id: impl Into<String>) -> Self {
        self.frame_id = frame_id.into();
        self
    }

    /// `self ∘ other`: applies `other` first, then `self`.
    /// The result keeps `self`'s frame id.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
            frame_id: self.frame_id.clone(),
        }
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose {
            rotation: rt,
            translation: -(rt * self.translation),
            frame_id: self.frame_id.clone(),
        }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn transform(&self, p: [f64; 3]) -> [f64; 3] {
        let q = self.transform_point(&Vector3::from(p));
        [q.x, q.y, q.z]
    }

    /// Ground-plane position `(x, y)`.
    pub fn planar_position(&self) -> [f64; 2] {
        [self.translation.x, self.translation.y]
    }

    /// Yaw of the forward (+x) axis projected onto the ground plane, radians.
    pub fn heading(&self) -> f64 {
        self.rotation[(1, 0)].atan2(self.rotation[(0, 0)])
    }

    pub fn planar_distance(&self, other: &Pose) -> f64 {
        let [ax, ay] = self.planar_position();
        let [bx, by] = other.planar_position();
        (ax - bx).hypot(ay - by)
    }

    /// Max absolute entry difference against the identity transform of the
    /// same frame.
    pub fn distance_from_identity(&self) -> f64 {
        let r = (self.rotation - Matrix3::identity()).abs().max();
        let t = self.translation.abs().max();
        r.max(t)
    }

    /// Row-major 3×4 `[R | t]`.
    pub fn to_rows_3x4(&self) -> [f64; 12] {
        let r = &self.rotation;
        let t = &self.translation;
        [
            r[(0, 0)],
            r[(0, 1)],
            r[(0, 2)],
            t.x,
            r[(1, 0)],
            r[(1, 1)],
            r[(1, 2)],
            t.y,
            r[(2, 0)],
            r[(2, 1)],
            r[(2, 2)],
            t.z,
        ]
    }
}

/// Max absolute deviation of `RᵀR` from the identity.
pub fn orthonormal_drift(r: &Matrix3<f64>) -> f64 {
    (r.transpose() * r - Matrix3::identity()).abs().max()
}

/// Closest rotation in the Frobenius sense (polar factor via SVD).
pub fn nearest_rotation(r: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = r.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut out = u * v_t;
    if out.determinant() < 0.0 {
        let mut u = u;
        u.column_mut(2).neg_mut();
        out = u * v_t;
    }
    out
}

pub fn rotation_from_axis_angle(axis: [f64; 3], angle: f64) -> Matrix3<f64> {
    let axis = nalgebra::Unit::new_normalize(Vector3::from(axis));
    *nalgebra::Rotation3::from_axis_angle(&axis, angle).matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_pose() -> impl Strategy<Value = Pose> {
        (
            prop::array::uniform3(-1.0f64..1.0),
            -3.2f64..3.2,
            prop::array::uniform3(-100.0f64..100.0),
        )
            .prop_filter("axis", |(a, _, _)| a.iter().map(|v| v * v).sum::<f64>() > 1e-3)
            .prop_map(|(axis, angle, t)| {
                Pose::new(rotation_from_axis_angle(axis, angle), Vector3::from(t), "p").unwrap()
            })
    }

    fn max_diff(a: &Pose, b: &Pose) -> f64 {
        let r = (a.rotation() - b.rotation()).abs().max();
        let t = (a.translation() - b.translation()).abs().max();
        r.max(t)
    }

    #[test]
    fn rejects_non_orthonormal() {
        let r = Matrix3::new(1.0, 0.01, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(Pose::new(r, Vector3::zeros(), "x").is_err());
        let reflect = Matrix3::new(-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(Pose::new(reflect, Vector3::zeros(), "x").is_err());
    }

    #[test]
    fn drifted_rotation_is_repaired() {
        let r = Matrix3::new(1.0, 1e-4, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        let (p, fixed) = Pose::from_drifted(r, Vector3::zeros(), "x", 1e-3).unwrap();
        assert!(fixed);
        assert!(orthonormal_drift(p.rotation()) < 1e-12);
        let bad = Matrix3::new(1.0, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(Pose::from_drifted(bad, Vector3::zeros(), "x", 1e-3).is_err());
    }

    #[test]
    fn planar_heading_roundtrip() {
        let p = Pose::planar(3.0, -2.0, 1.2, "a");
        assert!((p.heading() - 1.2).abs() < 1e-12);
        assert_eq!(p.planar_position(), [3.0, -2.0]);
    }

    proptest! {
        #[test]
        fn inverse_composes_to_identity(p in arb_pose()) {
            prop_assert!(p.compose(&p.inverse()).distance_from_identity() < 1e-9);
            prop_assert!(p.inverse().compose(&p).distance_from_identity() < 1e-9);
        }

        #[test]
        fn composition_is_associative(a in arb_pose(), b in arb_pose(), c in arb_pose()) {
            let left = a.compose(&b).compose(&c);
            let right = a.compose(&b.compose(&c));
            prop_assert!(max_diff(&left, &right) < 1e-9);
        }
    }
}
