use nalgebra::{Matrix3, Vector3};

use super::{GeoError, RigidTransform};

#[derive(Debug, Clone, PartialEq)]
pub struct RigidFit {
    pub transform: RigidTransform,
    /// sqrt(mean ‖T p − q‖²)
    pub rms: f64,
}

/// Least-squares `T` with `T p_i ≈ q_i` (centroid alignment plus orthogonal
/// Procrustes, reflection-corrected).
pub fn solve_rigid_3d3d(pairs: &[(Vector3<f64>, Vector3<f64>)]) -> Result<RigidFit, GeoError> {
    if pairs.len() < 3 {
        return Err(GeoError::TooFewCorrespondences { needed: 3, got: pairs.len() });
    }
    for (i, (p, q)) in pairs.iter().enumerate() {
        if !p.iter().chain(q.iter()).all(|v| v.is_finite()) {
            return Err(GeoError::NonFinite(i));
        }
    }
    let n = pairs.len() as f64;
    let pc = pairs.iter().map(|(p, _)| p).sum::<Vector3<f64>>() / n;
    let qc = pairs.iter().map(|(_, q)| q).sum::<Vector3<f64>>() / n;

    let mut scatter = Matrix3::zeros();
    let mut cross = Matrix3::zeros();
    for (p, q) in pairs {
        let dp = p - pc;
        let dq = q - qc;
        scatter += dp * dp.transpose();
        cross += dp * dq.transpose();
    }
    // Collinear or coincident sources leave a rotation about the line free.
    let mut spread = scatter.symmetric_eigenvalues().as_slice().to_vec();
    spread.sort_by(|a, b| b.total_cmp(a));
    if spread[0] <= 0.0 || spread[1] <= 1e-12 * spread[0] {
        return Err(GeoError::DegenerateConfiguration(
            "source points are collinear or coincident".into(),
        ));
    }

    let svd = cross.svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    let v = v_t.transpose();
    let d = (v * u.transpose()).determinant().signum();
    let fix = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d));
    let rotation = v * fix * u.transpose();
    let translation = qc - rotation * pc;
    let transform = RigidTransform::new(rotation, translation);

    let sq: f64 = pairs.iter().map(|(p, q)| (transform.apply(p) - q).norm_squared()).sum();
    Ok(RigidFit { transform, rms: (sq / n).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_pairs() {
        let pts = [
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(0.0, 0.0, 1.0),
        ];
        let pairs: Vec<_> = pts.iter().map(|p| (*p, *p)).collect();
        let fit = solve_rigid_3d3d(&pairs).unwrap();
        assert!(fit.rms < 1e-15);
        assert!(fit.transform.rotation_error(&RigidTransform::identity()) < 1e-15);
    }

    #[test]
    fn collinear_is_degenerate() {
        let pairs: Vec<_> =
            (0..5).map(|i| (Vector3::new(i as f64, 0.0, 0.0), Vector3::new(i as f64, 1.0, 0.0))).collect();
        assert!(matches!(solve_rigid_3d3d(&pairs), Err(GeoError::DegenerateConfiguration(_))));
    }

    #[test]
    fn planar_sources_recover_reflection_free_rotation() {
        let truth = RigidTransform::from_axis_angle(&Vector3::new(0.4, -0.2, 1.1), Vector3::new(0.5, -1.0, 2.0));
        let pairs: Vec<_> = [(0.0, 0.0), (1.0, 0.0), (0.0, 2.0), (1.5, 1.0)]
            .iter()
            .map(|&(x, y)| {
                let p = Vector3::new(x, y, 0.0);
                (p, truth.apply(&p))
            })
            .collect();
        let fit = solve_rigid_3d3d(&pairs).unwrap();
        assert!(fit.transform.rotation.determinant() > 0.0);
        assert!(fit.transform.rotation_error(&truth) < 1e-12);
    }
}
