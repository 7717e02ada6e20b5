use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::graph::{Edge, ObjectNode};
use super::tree::{NodeKind, SceneTree};
use super::SpatialError;
use crate::ids::NodeId;

/// A node reached by [`query_nearby`], with its objects if it is a carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearbyNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub hops: usize,
    pub objects: Vec<ObjectNode>,
    pub edges: Vec<Edge>,
}

/// Nodes within `hops` tree edges of `location`, ordered by id.
pub fn query_nearby(tree: &SceneTree, location: &NodeId, hops: usize) -> Result<Vec<NearbyNode>, SpatialError> {
    let reach = tree.within_hops(location, hops)?;
    Ok(reach
        .into_iter()
        .map(|(id, h)| {
            let node = &tree.nodes[&id];
            let (objects, edges) = match node.graph() {
                Some(g) => (g.nodes.values().cloned().collect(), g.edges.iter().cloned().collect()),
                None => (Vec::new(), Vec::new()),
            };
            NearbyNode { id, kind: node.kind, hops: h, objects, edges }
        })
        .collect())
}

/// Carriers where an object of `category` is likely to be found: first those
/// currently holding one, then conventional storage places, each group by id.
pub fn locate_candidates(tree: &SceneTree, category: &str) -> Vec<NodeId> {
    let holding: Vec<NodeId> = tree
        .carriers()
        .filter(|c| c.graph().is_some_and(|g| g.of_category(category).next().is_some()))
        .map(|c| c.id.clone())
        .collect();
    let seen: BTreeSet<&NodeId> = holding.iter().collect();
    let storing: Vec<NodeId> = tree
        .carriers()
        .filter(|c| !seen.contains(&c.id))
        .filter(|c| c.carrier.as_ref().is_some_and(|k| k.attrs.storage.contains(category)))
        .map(|c| c.id.clone())
        .collect();
    holding.into_iter().chain(storing).collect()
}
