use nalgebra::{DMatrix, DVector, SymmetricEigen, Vector6};

use super::{GeoError, RigidTransform};

#[derive(Debug, Clone, Copy)]
pub struct GaussNewtonOptions {
    /// Stop once the proposed increment is shorter than this.
    pub step_tolerance: f64,
    pub max_iterations: usize,
    /// Cost accepted as converged if the iteration cap is hit anyway.
    pub cost_tolerance: f64,
    /// Eigenvalues of JᵀJ below `null_ratio · λ_max` are treated as unobservable.
    pub null_ratio: f64,
    pub max_halvings: usize,
}

impl Default for GaussNewtonOptions {
    fn default() -> Self {
        Self {
            step_tolerance: 1e-10,
            max_iterations: 100,
            cost_tolerance: 1e-12,
            null_ratio: 1e-10,
            max_halvings: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussNewtonReport {
    pub iterations: usize,
    pub cost: f64,
    /// Unit directions in increment space `(ω, v)` along which the cost is flat.
    pub null_directions: Vec<[f64; 6]>,
}

/// Least-squares objective over SE(3). `evaluate` returns the stacked
/// residual and its Jacobian with respect to a left increment
/// `(Exp(ω), v) ∘ T` at zero.
pub(crate) trait Problem {
    fn evaluate(&self, t: &RigidTransform) -> Result<(DVector<f64>, DMatrix<f64>), GeoError>;
}

struct Step {
    delta: Vector6<f64>,
    null: Vec<[f64; 6]>,
}

fn solve_normal_equations(j: &DMatrix<f64>, r: &DVector<f64>, null_ratio: f64) -> Step {
    let jt = j.transpose();
    let h = &jt * j;
    let g = &jt * r;
    let eig = SymmetricEigen::new(h);
    let lam_max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let mut delta = Vector6::zeros();
    let mut null = Vec::new();
    for k in 0..6 {
        let lam = eig.eigenvalues[k];
        let u = eig.eigenvectors.column(k);
        if lam_max <= 0.0 || lam <= null_ratio * lam_max {
            let mut dir = [0.0; 6];
            for (i, d) in dir.iter_mut().enumerate() {
                *d = u[i];
            }
            null.push(dir);
            continue;
        }
        let coeff = u.dot(&g) / lam;
        for i in 0..6 {
            delta[i] -= coeff * u[i];
        }
    }
    Step { delta, null }
}

pub(crate) fn minimize<P: Problem>(
    problem: &P,
    init: &RigidTransform,
    opts: &GaussNewtonOptions,
) -> Result<(RigidTransform, GaussNewtonReport), GeoError> {
    let mut t = *init;
    let (mut r, mut j) = problem.evaluate(&t)?;
    let mut cost = r.norm_squared();
    let mut iterations = 0;
    let mut null = Vec::new();
    let mut converged = false;

    while iterations < opts.max_iterations {
        iterations += 1;
        let step = solve_normal_equations(&j, &r, opts.null_ratio);
        null = step.null;
        if step.delta.norm() < opts.step_tolerance {
            converged = true;
            break;
        }
        let mut alpha = 1.0;
        let mut accepted = false;
        let mut last_err = None;
        for _ in 0..opts.max_halvings {
            let scaled = step.delta * alpha;
            let cand = t.retract(&[scaled[0], scaled[1], scaled[2], scaled[3], scaled[4], scaled[5]]);
            match problem.evaluate(&cand) {
                Ok((rc, jc)) => {
                    let cc = rc.norm_squared();
                    if cc <= cost {
                        t = cand;
                        r = rc;
                        j = jc;
                        cost = cc;
                        accepted = true;
                        break;
                    }
                }
                Err(e @ GeoError::BehindCamera { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
            alpha *= 0.5;
            if step.delta.norm() * alpha < opts.step_tolerance {
                break;
            }
        }
        if !accepted {
            // No descending step along the Gauss–Newton direction: either we
            // sit at the minimum to numerical precision, or every shortened
            // step pushed points behind the camera.
            if let Some(e) = last_err {
                if alpha * step.delta.norm() >= opts.step_tolerance {
                    return Err(e);
                }
            }
            converged = true;
            break;
        }
    }

    if !converged && cost > opts.cost_tolerance {
        return Err(GeoError::NoConvergence { iterations, cost });
    }
    Ok((t, GaussNewtonReport { iterations, cost, null_directions: null }))
}
