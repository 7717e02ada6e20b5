use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::graph::{ObjectGraph, ObjectNode};
use super::SpatialError;
use crate::ids::{NodeId, ObjectId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NodeKind {
    Root,
    Region,
    Carrier,
}

/// Physical description of a carrier (table, shelf, fridge).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarrierAttrs {
    /// Half sizes of the support surface in the carrier frame (x, y).
    pub surface: [f64; 2],
    /// Closed storage; its contents are not visible from outside.
    #[serde(default)]
    pub enclosed: bool,
    /// Categories this carrier is a conventional home for.
    #[serde(default)]
    pub storage: BTreeSet<String>,
}

impl Default for CarrierAttrs {
    fn default() -> Self {
        Self { surface: [0.5, 0.3], enclosed: false, storage: BTreeSet::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Carrier {
    #[serde(flatten)]
    pub attrs: CarrierAttrs,
    pub graph: ObjectGraph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub name: String,
    pub parent: Option<NodeId>,
    pub children: BTreeSet<NodeId>,
    /// Map-frame coordinate in meters.
    pub position: [f64; 2],
    /// Opaque view handles (top-down map for the root, images for regions).
    #[serde(default)]
    pub media: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrier: Option<Carrier>,
}

impl SceneNode {
    pub fn graph(&self) -> Option<&ObjectGraph> {
        self.carrier.as_ref().map(|c| &c.graph)
    }
}

/// Rooted three-level tree: root → regions → carriers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneTree {
    pub root: NodeId,
    pub nodes: BTreeMap<NodeId, SceneNode>,
}

impl Default for SceneTree {
    fn default() -> Self {
        Self::new("root")
    }
}

impl SceneTree {
    pub fn new(root: impl Into<NodeId>) -> Self {
        let root = root.into();
        let node = SceneNode {
            id: root.clone(),
            kind: NodeKind::Root,
            name: root.0.clone(),
            parent: None,
            children: BTreeSet::new(),
            position: [0.0, 0.0],
            media: Vec::new(),
            carrier: None,
        };
        Self { nodes: BTreeMap::from([(root.clone(), node)]), root }
    }

    pub fn get(&self, id: &NodeId) -> Option<&SceneNode> {
        self.nodes.get(id)
    }

    pub fn node(&self, id: &NodeId) -> Result<&SceneNode, SpatialError> {
        self.nodes.get(id).ok_or_else(|| SpatialError::UnknownNode(id.clone()))
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn kind(&self, id: &NodeId) -> Option<NodeKind> {
        self.nodes.get(id).map(|n| n.kind)
    }

    pub fn regions(&self) -> impl Iterator<Item = &SceneNode> {
        self.nodes.values().filter(|n| n.kind == NodeKind::Region)
    }

    pub fn carriers(&self) -> impl Iterator<Item = &SceneNode> {
        self.nodes.values().filter(|n| n.kind == NodeKind::Carrier)
    }

    pub fn carrier(&self, id: &NodeId) -> Result<&Carrier, SpatialError> {
        self.node(id)?.carrier.as_ref().ok_or_else(|| SpatialError::WrongKind { node: id.clone(), expected: NodeKind::Carrier })
    }

    pub fn carrier_mut(&mut self, id: &NodeId) -> Result<&mut Carrier, SpatialError> {
        let node = self.nodes.get_mut(id).ok_or_else(|| SpatialError::UnknownNode(id.clone()))?;
        node.carrier.as_mut().ok_or_else(|| SpatialError::WrongKind { node: id.clone(), expected: NodeKind::Carrier })
    }

    pub fn graph(&self, id: &NodeId) -> Result<&ObjectGraph, SpatialError> {
        self.carrier(id).map(|c| &c.graph)
    }

    /// The region a node belongs to (itself for regions, `None` for the root).
    pub fn region_of(&self, id: &NodeId) -> Option<&NodeId> {
        let node = self.nodes.get(id)?;
        match node.kind {
            NodeKind::Root => None,
            NodeKind::Region => Some(&node.id),
            NodeKind::Carrier => node.parent.as_ref(),
        }
    }

    fn check_new_id(&self, id: &NodeId) -> Result<(), SpatialError> {
        if self.nodes.contains_key(id) {
            Err(SpatialError::DuplicateId(id.0.clone()))
        } else {
            Ok(())
        }
    }

    pub fn add_region(&mut self, id: NodeId, name: String, position: [f64; 2], media: Vec<String>) -> Result<(), SpatialError> {
        self.check_new_id(&id)?;
        check_position(&id, &position)?;
        let root = self.root.clone();
        self.nodes.get_mut(&root).expect("root exists").children.insert(id.clone());
        self.nodes.insert(
            id.clone(),
            SceneNode { id, kind: NodeKind::Region, name, parent: Some(root), children: BTreeSet::new(), position, media, carrier: None },
        );
        Ok(())
    }

    pub fn add_carrier(
        &mut self,
        id: NodeId,
        region: &NodeId,
        name: String,
        position: [f64; 2],
        attrs: CarrierAttrs,
    ) -> Result<(), SpatialError> {
        self.check_new_id(&id)?;
        check_position(&id, &position)?;
        match self.kind(region) {
            Some(NodeKind::Region) => {}
            _ => return Err(SpatialError::OrphanCarrier { carrier: id, region: region.clone() }),
        }
        if !attrs.surface.iter().all(|s| s.is_finite() && *s > 0.0) {
            return Err(SpatialError::MalformedNode(id));
        }
        self.nodes.get_mut(region).expect("checked").children.insert(id.clone());
        self.nodes.insert(
            id.clone(),
            SceneNode {
                id,
                kind: NodeKind::Carrier,
                name,
                parent: Some(region.clone()),
                children: BTreeSet::new(),
                position,
                media: Vec::new(),
                carrier: Some(Carrier { attrs, graph: ObjectGraph::new() }),
            },
        );
        Ok(())
    }

    /// Removes a leaf region or an empty carrier.
    pub fn remove_node(&mut self, id: &NodeId) -> Result<SceneNode, SpatialError> {
        let node = self.node(id)?;
        if node.kind == NodeKind::Root {
            return Err(SpatialError::WrongKind { node: id.clone(), expected: NodeKind::Region });
        }
        if !node.children.is_empty() || node.graph().is_some_and(|g| !g.is_empty()) {
            return Err(SpatialError::NotEmpty(id.clone()));
        }
        let node = self.nodes.remove(id).expect("checked");
        if let Some(parent) = &node.parent {
            self.nodes.get_mut(parent).expect("parent exists").children.remove(id);
        }
        Ok(node)
    }

    pub fn set_position(&mut self, id: &NodeId, position: [f64; 2]) -> Result<(), SpatialError> {
        check_position(id, &position)?;
        self.nodes.get_mut(id).ok_or_else(|| SpatialError::UnknownNode(id.clone()))?.position = position;
        Ok(())
    }

    pub fn set_media(&mut self, id: &NodeId, media: Vec<String>) -> Result<(), SpatialError> {
        let node = self.nodes.get_mut(id).ok_or_else(|| SpatialError::UnknownNode(id.clone()))?;
        if node.kind == NodeKind::Carrier {
            return Err(SpatialError::WrongKind { node: id.clone(), expected: NodeKind::Region });
        }
        node.media = media;
        Ok(())
    }

    /// Carrier currently holding `object`, with the node.
    pub fn find_object(&self, object: &ObjectId) -> Option<(&NodeId, &ObjectNode)> {
        self.carriers().find_map(|c| c.graph().and_then(|g| g.get(object)).map(|o| (&c.id, o)))
    }

    pub fn objects(&self) -> impl Iterator<Item = (&NodeId, &ObjectNode)> {
        self.carriers().flat_map(|c| c.graph().into_iter().flat_map(move |g| g.nodes.values().map(move |o| (&c.id, o))))
    }

    pub fn object_count(&self) -> usize {
        self.carriers().map(|c| c.graph().map_or(0, |g| g.len())).sum()
    }

    /// Tree nodes plus all object-graph nodes.
    pub fn node_count(&self) -> usize {
        self.nodes.len() + self.object_count()
    }

    fn depth(&self, id: &NodeId) -> usize {
        match self.kind(id) {
            Some(NodeKind::Root) | None => 0,
            Some(NodeKind::Region) => 1,
            Some(NodeKind::Carrier) => 2,
        }
    }

    /// Path length between two nodes in the tree.
    pub fn hops(&self, a: &NodeId, b: &NodeId) -> Option<usize> {
        if !self.contains(a) || !self.contains(b) {
            return None;
        }
        let mut x = a.clone();
        let mut y = b.clone();
        let (mut dx, mut dy) = (self.depth(&x), self.depth(&y));
        let mut hops = 0;
        while dx > dy {
            x = self.nodes[&x].parent.clone()?;
            dx -= 1;
            hops += 1;
        }
        while dy > dx {
            y = self.nodes[&y].parent.clone()?;
            dy -= 1;
            hops += 1;
        }
        while x != y {
            x = self.nodes[&x].parent.clone()?;
            y = self.nodes[&y].parent.clone()?;
            hops += 2;
        }
        Some(hops)
    }

    /// Nodes within `max_hops` of `start`, by breadth-first search.
    pub fn within_hops(&self, start: &NodeId, max_hops: usize) -> Result<BTreeMap<NodeId, usize>, SpatialError> {
        self.node(start)?;
        let mut seen = BTreeMap::from([(start.clone(), 0usize)]);
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(id) = queue.pop_front() {
            let d = seen[&id];
            if d == max_hops {
                continue;
            }
            let node = &self.nodes[&id];
            for next in node.parent.iter().chain(node.children.iter()) {
                if !seen.contains_key(next) {
                    seen.insert(next.clone(), d + 1);
                    queue.push_back(next.clone());
                }
            }
        }
        Ok(seen)
    }

    /// Checks the structural invariants (single root, typed parents, graphs
    /// only on carriers, children lists consistent with parent links).
    pub fn validate(&self) -> Result<(), SpatialError> {
        let roots: Vec<_> = self.nodes.values().filter(|n| n.kind == NodeKind::Root).collect();
        if roots.len() != 1 || roots[0].id != self.root || roots[0].parent.is_some() {
            return Err(SpatialError::MalformedNode(self.root.clone()));
        }
        for n in self.nodes.values() {
            let expected_parent = match n.kind {
                NodeKind::Root => None,
                NodeKind::Region => Some(NodeKind::Root),
                NodeKind::Carrier => Some(NodeKind::Region),
            };
            let parent_kind = n.parent.as_ref().and_then(|p| self.kind(p));
            if parent_kind != expected_parent || (n.kind == NodeKind::Carrier) != n.carrier.is_some() {
                return Err(SpatialError::MalformedNode(n.id.clone()));
            }
            if let Some(p) = &n.parent {
                if !self.nodes[p].children.contains(&n.id) {
                    return Err(SpatialError::MalformedNode(n.id.clone()));
                }
            }
            for c in &n.children {
                if self.nodes.get(c).and_then(|c| c.parent.as_ref()) != Some(&n.id) {
                    return Err(SpatialError::MalformedNode(c.clone()));
                }
            }
        }
        Ok(())
    }
}

fn check_position(id: &NodeId, p: &[f64; 2]) -> Result<(), SpatialError> {
    if p.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(SpatialError::MalformedNode(id.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SceneTree {
        let mut t = SceneTree::new("root");
        t.add_region("kitchen".into(), "kitchen".into(), [0.0, 0.0], vec![]).unwrap();
        t.add_region("hall".into(), "hall".into(), [5.0, 0.0], vec![]).unwrap();
        t.add_carrier("fridge".into(), &"kitchen".into(), "fridge".into(), [1.0, 0.0], CarrierAttrs::default()).unwrap();
        t.add_carrier("table".into(), &"hall".into(), "table".into(), [5.0, 1.0], CarrierAttrs::default()).unwrap();
        t
    }

    #[test]
    fn hops_follow_tree_paths() {
        let t = small();
        assert_eq!(t.hops(&"fridge".into(), &"fridge".into()), Some(0));
        assert_eq!(t.hops(&"fridge".into(), &"kitchen".into()), Some(1));
        assert_eq!(t.hops(&"fridge".into(), &"table".into()), Some(4));
        assert_eq!(t.hops(&"root".into(), &"table".into()), Some(2));
    }

    #[test]
    fn orphan_carrier_rejected() {
        let mut t = small();
        let err = t.add_carrier("x".into(), &"nowhere".into(), "x".into(), [0.0, 0.0], CarrierAttrs::default());
        assert!(matches!(err, Err(SpatialError::OrphanCarrier { .. })));
        let err = t.add_carrier("y".into(), &"fridge".into(), "y".into(), [0.0, 0.0], CarrierAttrs::default());
        assert!(matches!(err, Err(SpatialError::OrphanCarrier { .. })));
    }

    #[test]
    fn structure_validates() {
        let t = small();
        t.validate().unwrap();
        assert_eq!(t.node_count(), 5);
    }
}
