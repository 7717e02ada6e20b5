use nalgebra::{DMatrix, DVector, Matrix2x3, Matrix3, Matrix3x6, SymmetricEigen, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::gauss_newton::{minimize, Problem};
use super::{hat, GaussNewtonOptions, GeoError, RigidTransform};

/// Scaled orthographic top-down projection onto the 2D map:
/// `Π(p) = scale · (p.x, p.y) + offset`. Height is dropped, so
/// translation along z is never observable through this projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapProjection {
    pub scale: f64,
    pub offset: [f64; 2],
}

impl Default for MapProjection {
    fn default() -> Self {
        Self { scale: 1.0, offset: [0.0, 0.0] }
    }
}

impl MapProjection {
    pub fn project(&self, p: &Vector3<f64>) -> Vector2<f64> {
        Vector2::new(self.scale * p.x + self.offset[0], self.scale * p.y + self.offset[1])
    }

    fn jacobian(&self) -> Matrix2x3<f64> {
        Matrix2x3::new(self.scale, 0.0, 0.0, 0.0, self.scale, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapAlignment {
    pub transform: RigidTransform,
    pub cost: f64,
    pub iterations: usize,
    pub null_directions: Vec<[f64; 6]>,
    /// Set when the height offset cannot be determined from the map.
    pub z_unobservable: bool,
}

struct MapProblem<'a> {
    points: &'a [Vector3<f64>],
    targets: &'a [Vector2<f64>],
    projection: MapProjection,
}

/// Stacked residuals `Π(T X_j) − y_j` and their Jacobian with respect to a
/// left increment `(ω, v)`.
pub fn map_residuals(
    points: &[Vector3<f64>],
    targets: &[Vector2<f64>],
    projection: &MapProjection,
    t: &RigidTransform,
) -> (DVector<f64>, DMatrix<f64>) {
    let n = points.len();
    let mut r = DVector::zeros(2 * n);
    let mut j = DMatrix::zeros(2 * n, 6);
    let jp = projection.jacobian();
    for (k, (x, y)) in points.iter().zip(targets).enumerate() {
        let p = t.apply(x);
        let res = projection.project(&p) - y;
        r[2 * k] = res.x;
        r[2 * k + 1] = res.y;
        let mut dp = Matrix3x6::zeros();
        dp.fixed_view_mut::<3, 3>(0, 0).copy_from(&(-hat(&p)));
        dp.fixed_view_mut::<3, 3>(0, 3).copy_from(&Matrix3::identity());
        j.view_mut((2 * k, 0), (2, 6)).copy_from(&(jp * dp));
    }
    (r, j)
}

impl Problem for MapProblem<'_> {
    fn evaluate(&self, t: &RigidTransform) -> Result<(DVector<f64>, DMatrix<f64>), GeoError> {
        Ok(map_residuals(self.points, self.targets, &self.projection, t))
    }
}

/// Minimizes `Σ ‖Π(T X_j) − y_j‖²` over rigid `T` starting from `init`.
pub fn solve_map_alignment(
    points: &[Vector3<f64>],
    targets: &[Vector2<f64>],
    projection: &MapProjection,
    init: &RigidTransform,
) -> Result<MapAlignment, GeoError> {
    if points.len() != targets.len() {
        return Err(GeoError::DegenerateConfiguration(format!(
            "{} points but {} targets",
            points.len(),
            targets.len()
        )));
    }
    if points.len() < 4 {
        return Err(GeoError::TooFewCorrespondences { needed: 4, got: points.len() });
    }
    for (i, (x, y)) in points.iter().zip(targets).enumerate() {
        if !x.iter().chain(y.iter()).all(|v| v.is_finite()) {
            return Err(GeoError::NonFinite(i));
        }
    }
    if !(projection.scale.is_finite() && projection.scale > 0.0) {
        return Err(GeoError::DegenerateConfiguration("map scale must be positive".into()));
    }
    init.validate()?;
    let problem = MapProblem { points, targets, projection: *projection };

    // The planar pose (x, y, yaw) must be pinned down by the map; anything
    // else (height, and tilt for flat scenes) may legitimately be free.
    let (_, j) = problem.evaluate(init)?;
    let h = j.transpose() * &j;
    let idx = [2usize, 3, 4];
    let planar = Matrix3::from_fn(|a, b| h[(idx[a], idx[b])]);
    let eig = SymmetricEigen::new(planar).eigenvalues;
    let hi = eig.max();
    if hi <= 0.0 || eig.min() <= 1e-10 * hi {
        return Err(GeoError::DegenerateConfiguration(
            "map correspondences do not constrain x, y and yaw".into(),
        ));
    }

    let (transform, report) = minimize(&problem, init, &GaussNewtonOptions::default())?;
    let z_unobservable = report.null_directions.iter().any(|d| d[5].abs() > 0.5);
    Ok(MapAlignment {
        transform,
        cost: report.cost,
        iterations: report.iterations,
        null_directions: report.null_directions,
        z_unobservable,
    })
}
