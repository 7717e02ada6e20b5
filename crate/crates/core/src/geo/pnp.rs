use nalgebra::{DMatrix, DVector, Matrix2x3, Matrix3, Matrix3x6, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::gauss_newton::{minimize, Problem};
use super::{hat, GaussNewtonOptions, GeoError, RigidTransform};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl CameraIntrinsics {
    pub fn validate(&self) -> Result<(), GeoError> {
        if self.fx > 0.0 && self.fy > 0.0 && self.cx.is_finite() && self.cy.is_finite() {
            Ok(())
        } else {
            Err(GeoError::DegenerateConfiguration("focal lengths must be positive".into()))
        }
    }

    /// Pixel of a camera-frame point; `None` when depth is not positive.
    pub fn project(&self, xc: &Vector3<f64>) -> Option<Vector2<f64>> {
        (xc.z > 0.0).then(|| {
            Vector2::new(self.fx * xc.x / xc.z + self.cx, self.fy * xc.y / xc.z + self.cy)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correspondence3D2D {
    pub x: [f64; 3],
    pub u: [f64; 2],
}

impl Correspondence3D2D {
    pub fn new(x: Vector3<f64>, u: Vector2<f64>) -> Self {
        Self { x: x.into(), u: u.into() }
    }

    fn point(&self) -> Vector3<f64> {
        Vector3::from(self.x)
    }

    fn pixel(&self) -> Vector2<f64> {
        Vector2::from(self.u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reprojection {
    /// `π(K(R X_j + t)) − u_j` per correspondence.
    pub residuals: Vec<Vector2<f64>>,
    /// sqrt(mean ‖r_j‖²) in pixels.
    pub rms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PnpSolution {
    pub transform: RigidTransform,
    pub cost: f64,
    pub rms: f64,
    pub iterations: usize,
}

pub fn reprojection_residual(
    pairs: &[Correspondence3D2D],
    k: &CameraIntrinsics,
    pose: &RigidTransform,
) -> Result<Reprojection, GeoError> {
    let mut residuals = Vec::with_capacity(pairs.len());
    for (i, c) in pairs.iter().enumerate() {
        let xc = pose.apply(&c.point());
        let px = k.project(&xc).ok_or(GeoError::BehindCamera { index: i, depth: xc.z })?;
        residuals.push(px - c.pixel());
    }
    let rms = if residuals.is_empty() {
        0.0
    } else {
        (residuals.iter().map(|r| r.norm_squared()).sum::<f64>() / residuals.len() as f64).sqrt()
    };
    Ok(Reprojection { residuals, rms })
}

/// Stacked reprojection residuals and their Jacobian with respect to a left
/// increment `(ω, v)` of the camera pose.
pub fn pnp_residuals(
    pairs: &[Correspondence3D2D],
    k: &CameraIntrinsics,
    pose: &RigidTransform,
) -> Result<(DVector<f64>, DMatrix<f64>), GeoError> {
    let n = pairs.len();
    let mut r = DVector::zeros(2 * n);
    let mut j = DMatrix::zeros(2 * n, 6);
    for (i, c) in pairs.iter().enumerate() {
        let xc = pose.apply(&c.point());
        let px = k.project(&xc).ok_or(GeoError::BehindCamera { index: i, depth: xc.z })?;
        let res = px - c.pixel();
        r[2 * i] = res.x;
        r[2 * i + 1] = res.y;
        let z = xc.z;
        let jproj = Matrix2x3::new(
            k.fx / z,
            0.0,
            -k.fx * xc.x / (z * z),
            0.0,
            k.fy / z,
            -k.fy * xc.y / (z * z),
        );
        let mut dp = Matrix3x6::zeros();
        dp.fixed_view_mut::<3, 3>(0, 0).copy_from(&(-hat(&xc)));
        dp.fixed_view_mut::<3, 3>(0, 3).copy_from(&Matrix3::identity());
        j.view_mut((2 * i, 0), (2, 6)).copy_from(&(jproj * dp));
    }
    Ok((r, j))
}

struct PnpProblem<'a> {
    pairs: &'a [Correspondence3D2D],
    k: CameraIntrinsics,
}

impl Problem for PnpProblem<'_> {
    fn evaluate(&self, t: &RigidTransform) -> Result<(DVector<f64>, DMatrix<f64>), GeoError> {
        pnp_residuals(self.pairs, &self.k, t)
    }
}

/// Camera pose `(R, t)` mapping scene points into the camera frame,
/// refined from `init` by Gauss–Newton on the reprojection error.
pub fn solve_pnp(
    pairs: &[Correspondence3D2D],
    k: &CameraIntrinsics,
    init: &RigidTransform,
) -> Result<PnpSolution, GeoError> {
    if pairs.len() < 6 {
        return Err(GeoError::TooFewCorrespondences { needed: 6, got: pairs.len() });
    }
    for (i, c) in pairs.iter().enumerate() {
        if !c.x.iter().chain(c.u.iter()).all(|v| v.is_finite()) {
            return Err(GeoError::NonFinite(i));
        }
    }
    k.validate()?;
    init.validate()?;
    let problem = PnpProblem { pairs, k: *k };
    let (transform, report) = minimize(&problem, init, &GaussNewtonOptions::default())?;
    if !report.null_directions.is_empty() {
        return Err(GeoError::DegenerateConfiguration(format!(
            "{} pose directions unconstrained by the correspondences",
            report.null_directions.len()
        )));
    }
    let rms = (report.cost / pairs.len() as f64).sqrt();
    Ok(PnpSolution { transform, cost: report.cost, rms, iterations: report.iterations })
}
