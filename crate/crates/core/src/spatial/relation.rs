use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::geo::RigidTransform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Relation {
    On,
    In,
    Left,
    Right,
    Front,
    Back,
    Near,
}

impl Relation {
    pub const ALL: [Relation; 7] = [
        Relation::On,
        Relation::In,
        Relation::Left,
        Relation::Right,
        Relation::Front,
        Relation::Back,
        Relation::Near,
    ];

    /// The relation that must hold with subject and object swapped, if any.
    pub fn dual(self) -> Option<Relation> {
        match self {
            Relation::Left => Some(Relation::Right),
            Relation::Right => Some(Relation::Left),
            Relation::Front => Some(Relation::Back),
            Relation::Back => Some(Relation::Front),
            Relation::Near => Some(Relation::Near),
            Relation::On | Relation::In => None,
        }
    }
}

/// Thresholds for the geometric predicates, in meters unless noted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredicateParams {
    pub near_radius: f64,
    /// Allowed gap between a's bottom face and b's top face for ON.
    pub z_tolerance: f64,
    /// Minimum fraction of a's footprint that must overlap b's for ON.
    pub on_overlap: f64,
    /// b's box is shrunk by this much per face before testing IN.
    pub in_shrink: f64,
    /// Minimum displacement along the dominant axis for directional relations.
    pub direction_margin: f64,
}

impl Default for PredicateParams {
    fn default() -> Self {
        Self { near_radius: 0.3, z_tolerance: 0.02, on_overlap: 0.25, in_shrink: 0.01, direction_margin: 0.05 }
    }
}

/// World-axis half sizes of the box after rotation.
fn aabb_half(pose: &RigidTransform, half: &[f64; 3]) -> Vector3<f64> {
    let h = Vector3::from(*half);
    pose.rotation.abs() * h
}

/// Decides whether `rel(a, b)` holds for two posed boxes expressed in one
/// carrier frame. Each side is `(pose, half_extents)`.
pub fn eval_relation(
    rel: Relation,
    a: (&RigidTransform, &[f64; 3]),
    b: (&RigidTransform, &[f64; 3]),
    params: &PredicateParams,
) -> bool {
    let ca = a.0.translation;
    let cb = b.0.translation;
    match rel {
        Relation::Near => (ca - cb).norm() <= params.near_radius,
        Relation::Left | Relation::Right | Relation::Front | Relation::Back => {
            let d = cb - ca;
            let (along, across) = match rel {
                Relation::Left => (d.x, d.y),
                Relation::Right => (-d.x, d.y),
                Relation::Front => (d.y, d.x),
                _ => (-d.y, d.x),
            };
            along > across.abs().max(params.direction_margin)
        }
        Relation::On => {
            let ha = aabb_half(a.0, a.1);
            let hb = aabb_half(b.0, b.1);
            if ca.z <= cb.z {
                return false;
            }
            let gap = (ca.z - ha.z) - (cb.z + hb.z);
            if gap.abs() > params.z_tolerance {
                return false;
            }
            let ox = ((ca.x + ha.x).min(cb.x + hb.x) - (ca.x - ha.x).max(cb.x - hb.x)).max(0.0);
            let oy = ((ca.y + ha.y).min(cb.y + hb.y) - (ca.y - ha.y).max(cb.y - hb.y)).max(0.0);
            let area = 4.0 * ha.x * ha.y;
            area > 0.0 && ox * oy >= params.on_overlap * area
        }
        Relation::In => {
            let ha = aabb_half(a.0, a.1);
            let hb = aabb_half(b.0, b.1);
            (0..3).all(|i| {
                let inner = hb[i] - params.in_shrink;
                inner > 0.0 && ca[i] - ha[i] >= cb[i] - inner && ca[i] + ha[i] <= cb[i] + inner
            })
        }
    }
}

/// All relations `r` with `r(a, b)`, in [`Relation::ALL`] order.
pub fn relations_between(
    a: (&RigidTransform, &[f64; 3]),
    b: (&RigidTransform, &[f64; 3]),
    params: &PredicateParams,
) -> Vec<Relation> {
    Relation::ALL.into_iter().filter(|&r| eval_relation(r, a, b, params)).collect()
}
