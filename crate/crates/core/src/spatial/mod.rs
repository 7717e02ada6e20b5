//! Spatial memory: a scene tree of regions and carriers, each carrier
//! anchoring an object graph whose edges are the geometric relations that
//! currently hold between its objects.
//!
//! Edges are maintained incrementally. Every edit re-evaluates only the
//! pairs that involve the edited node, which yields exactly the same edge
//! set as evaluating all predicates over all ordered pairs.

mod graph;
mod memory;
mod query;
mod relation;
mod tree;
mod world;

pub use graph::{add_object, move_object, remove_object, Edge, Intrinsics, ObjectGraph, ObjectNode};
pub use memory::{SpatialDelta, SpatialMemory, TreeEdit};
pub use query::{locate_candidates, query_nearby, NearbyNode};
pub use relation::{eval_relation, relations_between, PredicateParams, Relation};
pub use tree::{Carrier, CarrierAttrs, NodeKind, SceneNode, SceneTree};
pub use world::{
    build_observed_tree, build_scene_tree, CarrierSpec, Domain, Level, ObjectSpec, RegionSpec, WorldSpec,
};

use thiserror::Error;

use crate::ids::{NodeId, ObjectId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpatialError {
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("carrier {carrier} references unknown region {region}")]
    OrphanCarrier { carrier: NodeId, region: NodeId },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown object {0}")]
    UnknownObject(ObjectId),
    #[error("object {0} already present")]
    DuplicateObject(ObjectId),
    #[error("invalid transform: {0}")]
    InvalidTransform(String),
    #[error("object {0} has non-positive extents")]
    InvalidExtent(ObjectId),
    #[error("node {node} is not a {expected:?}")]
    WrongKind { node: NodeId, expected: NodeKind },
    #[error("node {0} still has children or objects")]
    NotEmpty(NodeId),
    #[error("malformed node {0}")]
    MalformedNode(NodeId),
}
