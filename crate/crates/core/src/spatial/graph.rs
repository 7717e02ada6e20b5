use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::relation::{relations_between, PredicateParams, Relation};
use super::SpatialError;
use crate::geo::RigidTransform;
use crate::ids::ObjectId;

/// Static properties of an object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Intrinsics {
    pub category: String,
    /// Axis-aligned half sizes in the object's own frame (meters).
    pub half_extents: [f64; 3],
    #[serde(default)]
    pub affordances: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectNode {
    pub id: ObjectId,
    pub intrinsics: Intrinsics,
    /// Dynamic state such as `open = "true"`.
    #[serde(default)]
    pub state: BTreeMap<String, String>,
    /// Pose in the carrier's local frame.
    pub pose: RigidTransform,
}

impl ObjectNode {
    pub fn new(id: impl Into<ObjectId>, category: impl Into<String>, half_extents: [f64; 3], pose: RigidTransform) -> Self {
        Self {
            id: id.into(),
            intrinsics: Intrinsics { category: category.into(), half_extents, affordances: BTreeSet::new() },
            state: BTreeMap::new(),
            pose,
        }
    }

    pub fn category(&self) -> &str {
        &self.intrinsics.category
    }

    pub fn validate(&self) -> Result<(), SpatialError> {
        if !self.intrinsics.half_extents.iter().all(|h| h.is_finite() && *h > 0.0) {
            return Err(SpatialError::InvalidExtent(self.id.clone()));
        }
        self.pose.validate().map_err(|e| SpatialError::InvalidTransform(e.to_string()))
    }

    fn solid(&self) -> (&RigidTransform, &[f64; 3]) {
        (&self.pose, &self.intrinsics.half_extents)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub subject: ObjectId,
    pub relation: Relation,
    pub object: ObjectId,
}

impl Edge {
    pub fn new(subject: impl Into<ObjectId>, relation: Relation, object: impl Into<ObjectId>) -> Self {
        Self { subject: subject.into(), relation, object: object.into() }
    }

    pub fn touches(&self, id: &ObjectId) -> bool {
        &self.subject == id || &self.object == id
    }
}

/// Objects on one carrier and the relations that currently hold between them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectGraph {
    pub nodes: BTreeMap<ObjectId, ObjectNode>,
    pub edges: BTreeSet<Edge>,
}

impl ObjectGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, id: &ObjectId) -> Option<&ObjectNode> {
        self.nodes.get(id)
    }

    pub fn contains(&self, id: &ObjectId) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn of_category<'a>(&'a self, category: &'a str) -> impl Iterator<Item = &'a ObjectNode> + 'a {
        self.nodes.values().filter(move |n| n.category() == category)
    }

    pub fn edges_of<'a>(&'a self, id: &'a ObjectId) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.touches(id))
    }

    fn link(&mut self, id: &ObjectId, params: &PredicateParams) {
        let node = &self.nodes[id];
        let mut fresh = Vec::new();
        for other in self.nodes.values().filter(|o| &o.id != id) {
            for rel in relations_between(node.solid(), other.solid(), params) {
                fresh.push(Edge { subject: id.clone(), relation: rel, object: other.id.clone() });
            }
            for rel in relations_between(other.solid(), node.solid(), params) {
                fresh.push(Edge { subject: other.id.clone(), relation: rel, object: id.clone() });
            }
        }
        self.edges.extend(fresh);
    }

    fn unlink(&mut self, id: &ObjectId) {
        self.edges.retain(|e| !e.touches(id));
    }

    /// Adds `node` and the edges it takes part in.
    pub fn insert(&mut self, node: ObjectNode, params: &PredicateParams) -> Result<(), SpatialError> {
        if self.nodes.contains_key(&node.id) {
            return Err(SpatialError::DuplicateObject(node.id));
        }
        node.validate()?;
        let id = node.id.clone();
        self.nodes.insert(id.clone(), node);
        self.link(&id, params);
        Ok(())
    }

    /// Removes a node with all incident edges and returns it.
    pub fn remove(&mut self, id: &ObjectId) -> Result<ObjectNode, SpatialError> {
        let node = self.nodes.remove(id).ok_or_else(|| SpatialError::UnknownObject(id.clone()))?;
        self.unlink(id);
        Ok(node)
    }

    /// Left-composes `delta` onto the node's pose and re-evaluates its edges.
    pub fn move_by(&mut self, id: &ObjectId, delta: &RigidTransform, params: &PredicateParams) -> Result<(), SpatialError> {
        delta.validate().map_err(|e| SpatialError::InvalidTransform(e.to_string()))?;
        let node = self.nodes.get(id).ok_or_else(|| SpatialError::UnknownObject(id.clone()))?;
        let pose = delta.compose(&node.pose);
        pose.validate().map_err(|e| SpatialError::InvalidTransform(e.to_string()))?;
        self.nodes.get_mut(id).expect("checked above").pose = pose;
        self.unlink(id);
        self.link(id, params);
        Ok(())
    }

    /// Sets (or clears, with `None`) one dynamic state entry. Poses are
    /// unchanged, so edges are unaffected.
    pub fn set_state(&mut self, id: &ObjectId, key: &str, value: Option<String>) -> Result<(), SpatialError> {
        let node = self.nodes.get_mut(id).ok_or_else(|| SpatialError::UnknownObject(id.clone()))?;
        match value {
            Some(v) => node.state.insert(key.to_owned(), v),
            None => node.state.remove(key),
        };
        Ok(())
    }

    /// Every edge implied by the current poses, evaluated over all ordered
    /// pairs from scratch.
    pub fn closure(&self, params: &PredicateParams) -> BTreeSet<Edge> {
        let mut out = BTreeSet::new();
        for a in self.nodes.values() {
            for b in self.nodes.values().filter(|b| b.id != a.id) {
                for rel in relations_between(a.solid(), b.solid(), params) {
                    out.insert(Edge { subject: a.id.clone(), relation: rel, object: b.id.clone() });
                }
            }
        }
        out
    }

    pub fn rebuild_edges(&mut self, params: &PredicateParams) {
        self.edges = self.closure(params);
    }
}

/// Value-returning form of [`ObjectGraph::insert`].
pub fn add_object(graph: &ObjectGraph, node: ObjectNode, params: &PredicateParams) -> Result<ObjectGraph, SpatialError> {
    let mut g = graph.clone();
    g.insert(node, params)?;
    Ok(g)
}

/// Value-returning form of [`ObjectGraph::remove`].
pub fn remove_object(graph: &ObjectGraph, id: &ObjectId) -> Result<ObjectGraph, SpatialError> {
    let mut g = graph.clone();
    g.remove(id)?;
    Ok(g)
}

/// Value-returning form of [`ObjectGraph::move_by`].
pub fn move_object(
    graph: &ObjectGraph,
    id: &ObjectId,
    delta: &RigidTransform,
    params: &PredicateParams,
) -> Result<ObjectGraph, SpatialError> {
    let mut g = graph.clone();
    g.move_by(id, delta, params)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use nalgebra::Vector3;

    use super::*;

    fn obj(id: &str, x: f64, y: f64) -> ObjectNode {
        ObjectNode::new(id, "thing", [0.04, 0.04, 0.05], RigidTransform::from_translation(Vector3::new(x, y, 0.05)))
    }

    #[test]
    fn cup_next_to_plate_is_near() {
        let p = PredicateParams::default();
        let g = add_object(&ObjectGraph::new(), obj("plate", 0.0, 0.0), &p).unwrap();
        let g = add_object(&g, obj("cup", 0.05, 0.0), &p).unwrap();
        assert!(g.edges.contains(&Edge::new("cup", Relation::Near, "plate")));
        assert!(g.edges.contains(&Edge::new("plate", Relation::Near, "cup")));
    }

    #[test]
    fn add_then_remove_is_identity() {
        let p = PredicateParams::default();
        let g = add_object(&ObjectGraph::new(), obj("a", 0.0, 0.0), &p).unwrap();
        let g2 = add_object(&g, obj("b", 0.1, 0.0), &p).unwrap();
        assert_eq!(remove_object(&g2, &"b".into()).unwrap(), g);
    }

    #[test]
    fn hub_removal_drops_exactly_incident_edges() {
        let p = PredicateParams { near_radius: 0.3, direction_margin: 10.0, ..Default::default() };
        let mut g = ObjectGraph::new();
        g.insert(obj("hub", 0.0, 0.0), &p).unwrap();
        g.insert(obj("a", 0.2, 0.0), &p).unwrap();
        g.insert(obj("b", -0.2, 0.0), &p).unwrap();
        // only NEAR edges survive the huge margin: hub<->a, hub<->b
        assert_eq!(g.edges_of(&"hub".into()).count(), 4);
        let before = g.edges.len();
        g.remove(&"hub".into()).unwrap();
        assert_eq!(g.edges.len(), before - 4);
    }

    #[test]
    fn far_move_drops_near_edges() {
        let p = PredicateParams::default();
        let mut g = ObjectGraph::new();
        g.insert(obj("a", 0.0, 0.0), &p).unwrap();
        g.insert(obj("b", 0.1, 0.0), &p).unwrap();
        g.move_by(&"a".into(), &RigidTransform::from_translation(Vector3::new(10.0, 0.0, 0.0)), &p).unwrap();
        assert!(!g.edges.iter().any(|e| e.relation == Relation::Near));
    }

    #[test]
    fn moving_across_flips_left_to_right() {
        let p = PredicateParams::default();
        let mut g = ObjectGraph::new();
        g.insert(obj("a", 0.0, 0.0), &p).unwrap();
        g.insert(obj("b", 0.5, 0.0), &p).unwrap();
        assert!(g.edges.contains(&Edge::new("a", Relation::Left, "b")));
        g.move_by(&"a".into(), &RigidTransform::from_translation(Vector3::new(1.0, 0.0, 0.0)), &p).unwrap();
        assert!(g.edges.contains(&Edge::new("a", Relation::Right, "b")));
        assert!(!g.edges.contains(&Edge::new("a", Relation::Left, "b")));
    }

    #[test]
    fn duplicate_and_unknown() {
        let p = PredicateParams::default();
        let mut g = ObjectGraph::new();
        g.insert(obj("a", 0.0, 0.0), &p).unwrap();
        assert!(matches!(g.insert(obj("a", 1.0, 0.0), &p), Err(SpatialError::DuplicateObject(_))));
        assert!(matches!(g.remove(&"zz".into()), Err(SpatialError::UnknownObject(_))));
    }
}
