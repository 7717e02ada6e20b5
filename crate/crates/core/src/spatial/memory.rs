use serde::{Deserialize, Serialize};

use super::graph::ObjectNode;
use super::relation::PredicateParams;
use super::tree::{CarrierAttrs, SceneTree};
use super::SpatialError;
use crate::geo::RigidTransform;
use crate::ids::{NodeId, ObjectId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "edit", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TreeEdit {
    AddRegion {
        id: NodeId,
        name: String,
        position: [f64; 2],
        #[serde(default)]
        media: Vec<String>,
    },
    AddCarrier {
        id: NodeId,
        region: NodeId,
        name: String,
        position: [f64; 2],
        attrs: CarrierAttrs,
    },
    RemoveNode {
        id: NodeId,
    },
    SetPosition {
        id: NodeId,
        position: [f64; 2],
    },
    SetMedia {
        id: NodeId,
        media: Vec<String>,
    },
}

/// One change to spatial memory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SpatialDelta {
    Add { carrier: NodeId, node: ObjectNode },
    Remove { carrier: NodeId, object: ObjectId },
    Move { carrier: NodeId, object: ObjectId, delta: RigidTransform },
    SetState { carrier: NodeId, object: ObjectId, key: String, value: Option<String> },
    TreeEdit(TreeEdit),
}

impl SpatialDelta {
    /// The node the delta is about.
    pub fn target(&self) -> String {
        match self {
            SpatialDelta::Add { node, .. } => node.id.0.clone(),
            SpatialDelta::Remove { object, .. }
            | SpatialDelta::Move { object, .. }
            | SpatialDelta::SetState { object, .. } => object.0.clone(),
            SpatialDelta::TreeEdit(e) => match e {
                TreeEdit::AddRegion { id, .. }
                | TreeEdit::AddCarrier { id, .. }
                | TreeEdit::RemoveNode { id }
                | TreeEdit::SetPosition { id, .. }
                | TreeEdit::SetMedia { id, .. } => id.0.clone(),
            },
        }
    }
}

/// Scene tree plus the predicate thresholds used to maintain its graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialMemory {
    pub tree: SceneTree,
    pub params: PredicateParams,
}

impl Default for SpatialMemory {
    fn default() -> Self {
        Self { tree: SceneTree::new("root"), params: PredicateParams::default() }
    }
}

impl SpatialMemory {
    pub fn new(tree: SceneTree, params: PredicateParams) -> Self {
        Self { tree, params }
    }

    /// Applies one delta. On error nothing has changed.
    pub fn apply(&mut self, delta: &SpatialDelta) -> Result<(), SpatialError> {
        let params = self.params;
        match delta {
            SpatialDelta::Add { carrier, node } => {
                if let Some((at, _)) = self.tree.find_object(&node.id) {
                    if at != carrier {
                        return Err(SpatialError::DuplicateObject(node.id.clone()));
                    }
                }
                self.tree.carrier_mut(carrier)?.graph.insert(node.clone(), &params)
            }
            SpatialDelta::Remove { carrier, object } => self.tree.carrier_mut(carrier)?.graph.remove(object).map(|_| ()),
            SpatialDelta::Move { carrier, object, delta } => {
                self.tree.carrier_mut(carrier)?.graph.move_by(object, delta, &params)
            }
            SpatialDelta::SetState { carrier, object, key, value } => {
                self.tree.carrier_mut(carrier)?.graph.set_state(object, key, value.clone())
            }
            SpatialDelta::TreeEdit(edit) => match edit {
                TreeEdit::AddRegion { id, name, position, media } => {
                    self.tree.add_region(id.clone(), name.clone(), *position, media.clone())
                }
                TreeEdit::AddCarrier { id, region, name, position, attrs } => {
                    self.tree.add_carrier(id.clone(), region, name.clone(), *position, attrs.clone())
                }
                TreeEdit::RemoveNode { id } => self.tree.remove_node(id).map(|_| ()),
                TreeEdit::SetPosition { id, position } => self.tree.set_position(id, *position),
                TreeEdit::SetMedia { id, media } => self.tree.set_media(id, media.clone()),
            },
        }
    }
}
