use nalgebra::{Matrix3, Rotation3, Vector3};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::GeoError;

/// Orthonormality / determinant tolerance used by [`RigidTransform::validate`].
pub const RIGID_TOLERANCE: f64 = 1e-9;

/// A rigid motion `x ↦ R x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Default for RigidTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl RigidTransform {
    pub fn identity() -> Self {
        Self { rotation: Matrix3::identity(), translation: Vector3::zeros() }
    }

    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Self { rotation, translation }
    }

    pub fn from_translation(t: Vector3<f64>) -> Self {
        Self { rotation: Matrix3::identity(), translation: t }
    }

    /// Rotation about +z by `yaw` radians followed by translation `t`.
    pub fn from_yaw(yaw: f64, t: Vector3<f64>) -> Self {
        Self { rotation: so3_exp(&Vector3::new(0.0, 0.0, yaw)), translation: t }
    }

    pub fn from_axis_angle(omega: &Vector3<f64>, t: Vector3<f64>) -> Self {
        Self { rotation: so3_exp(omega), translation: t }
    }

    pub fn validate(&self) -> Result<(), GeoError> {
        if !self.rotation.iter().chain(self.translation.iter()).all(|v| v.is_finite()) {
            return Err(GeoError::InvalidTransform("non-finite entry".into()));
        }
        let ortho = (self.rotation.transpose() * self.rotation - Matrix3::identity()).abs().max();
        if ortho > RIGID_TOLERANCE {
            return Err(GeoError::InvalidTransform(format!("RᵀR deviates from I by {ortho:e}")));
        }
        let det = self.rotation.determinant();
        if (det - 1.0).abs() > RIGID_TOLERANCE {
            return Err(GeoError::InvalidTransform(format!("det R = {det}")));
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidTransform {
        let rt = self.rotation.transpose();
        RigidTransform { rotation: rt, translation: -(rt * self.translation) }
    }

    /// Left increment used by the solvers: `(Exp(ω), v) ∘ self`.
    pub fn retract(&self, delta: &[f64; 6]) -> RigidTransform {
        let omega = Vector3::new(delta[0], delta[1], delta[2]);
        let v = Vector3::new(delta[3], delta[4], delta[5]);
        let step = RigidTransform { rotation: so3_exp(&omega), translation: v };
        step.compose(self)
    }

    /// Angle of the relative rotation between two transforms.
    pub fn rotation_error(&self, other: &RigidTransform) -> f64 {
        rotation_angle(&(self.rotation.transpose() * other.rotation))
    }

    pub fn translation_error(&self, other: &RigidTransform) -> f64 {
        (self.translation - other.translation).norm()
    }
}

/// Skew-symmetric matrix with `hat(a) * b == a × b`.
pub fn hat(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

pub fn so3_exp(omega: &Vector3<f64>) -> Matrix3<f64> {
    Rotation3::new(*omega).into_inner()
}

/// Rotation angle in `[0, π]`, accurate for tiny angles (no `acos` near 1).
pub fn rotation_angle(r: &Matrix3<f64>) -> f64 {
    let skew = Vector3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]);
    let sin = 0.5 * skew.norm();
    let cos = 0.5 * (r.trace() - 1.0);
    sin.atan2(cos)
}

pub fn so3_log(r: &Matrix3<f64>) -> Vector3<f64> {
    let skew = Vector3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]);
    let theta = rotation_angle(r);
    if theta < 1e-8 {
        return 0.5 * skew;
    }
    if theta < std::f64::consts::PI - 1e-6 {
        return skew * (theta / (2.0 * theta.sin()));
    }
    Rotation3::from_matrix_unchecked(*r).scaled_axis()
}

#[derive(Serialize, Deserialize)]
struct TransformRepr {
    rotation: [[f64; 3]; 3],
    translation: [f64; 3],
}

impl Serialize for RigidTransform {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut rotation = [[0.0; 3]; 3];
        for (i, row) in rotation.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.rotation[(i, j)];
            }
        }
        TransformRepr { rotation, translation: self.translation.into() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RigidTransform {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = TransformRepr::deserialize(deserializer)?;
        let r = &repr.rotation;
        Ok(RigidTransform {
            rotation: Matrix3::new(
                r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2],
            ),
            translation: Vector3::from(repr.translation),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_log_round_trip() {
        for omega in [
            Vector3::new(0.1, -0.2, 0.3),
            Vector3::new(1e-10, 0.0, 0.0),
            Vector3::new(0.0, 3.0, 0.0),
            Vector3::zeros(),
        ] {
            let back = so3_log(&so3_exp(&omega));
            assert!((back - omega).norm() < 1e-12, "{omega:?} -> {back:?}");
        }
    }

    #[test]
    fn tiny_angles_are_resolved() {
        let r = so3_exp(&Vector3::new(0.0, 0.0, 1e-11));
        assert!((rotation_angle(&r) - 1e-11).abs() < 1e-15);
    }

    #[test]
    fn compose_and_inverse() {
        let a = RigidTransform::from_axis_angle(&Vector3::new(0.3, 0.1, -0.4), Vector3::new(1.0, 2.0, 3.0));
        let id = a.compose(&a.inverse());
        assert!(id.rotation_error(&RigidTransform::identity()) < 1e-12);
        assert!(id.translation.norm() < 1e-12);
        assert!(a.is_valid());
    }

    #[test]
    fn serde_preserves_bits() {
        let a = RigidTransform::from_axis_angle(&Vector3::new(0.3, 0.1, -0.4), Vector3::new(1.0, 2.0, 3.0));
        let text = serde_json::to_string(&a).unwrap();
        let b: RigidTransform = serde_json::from_str(&text).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reflection_is_invalid() {
        let mut t = RigidTransform::identity();
        t.rotation[(2, 2)] = -1.0;
        assert!(matches!(t.validate(), Err(GeoError::InvalidTransform(_))));
    }
}
