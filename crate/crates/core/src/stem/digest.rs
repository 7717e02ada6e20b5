use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::event::{ToolCallRecord, ToolStatus};
use super::state::MemoryState;
use crate::embodiment::Availability;
use crate::ids::{NodeId, ObjectId, RobotId, TaskId, Tick};
use crate::spatial::{NodeKind, SpatialDelta};

/// What a digest should cover.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DigestScope {
    pub task: Option<TaskId>,
    /// Regions whose carriers enter the spatial summary.
    pub regions: BTreeSet<NodeId>,
    /// Maximum number of task records in the temporal part.
    pub history: usize,
    /// Only events with `seq > since` are considered for history and moves.
    pub since: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSummary {
    pub id: ObjectId,
    pub category: String,
    pub state: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarrierSummary {
    pub id: NodeId,
    pub region: NodeId,
    pub position: [f64; 2],
    pub enclosed: bool,
    pub storage: Vec<String>,
    pub objects: Vec<ObjectSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackEntry {
    pub seq: u64,
    pub tau: Tick,
    pub tool: String,
    pub args: BTreeMap<String, String>,
    pub status: ToolStatus,
    pub feedback: String,
}

/// An object that left the carrier it was first seen leaving within the
/// horizon, with where it is now (`None` while held).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectMove {
    pub object: ObjectId,
    pub category: String,
    pub origin: NodeId,
    pub current: Option<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSummary {
    pub id: RobotId,
    pub kind: String,
    pub location: NodeId,
    pub position: [f64; 2],
    pub capabilities: Vec<String>,
    pub availability: Availability,
    pub holding: Vec<ObjectId>,
}

/// Memory as handed to the planner: spatial (M_s), temporal (M_t) and
/// robot (M_r) parts.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MemoryDigest {
    pub spatial: Vec<CarrierSummary>,
    pub temporal: Vec<FeedbackEntry>,
    pub moves: Vec<ObjectMove>,
    pub robots: Vec<RobotSummary>,
}

impl MemoryDigest {
    pub fn feedback_texts(&self) -> impl Iterator<Item = &str> {
        self.temporal.iter().map(|f| f.feedback.as_str())
    }
}

/// Where each object was before the first time it was removed after `since`.
pub fn object_origins(state: &MemoryState, since: u64) -> BTreeMap<ObjectId, (NodeId, String)> {
    let mut origins = BTreeMap::new();
    let mut categories: BTreeMap<ObjectId, String> = state
        .spatial
        .tree
        .objects()
        .map(|(_, o)| (o.id.clone(), o.category().to_owned()))
        .collect();
    for p in state.embodiment.robots.values() {
        for o in &p.inventory {
            categories.insert(o.id.clone(), o.category().to_owned());
        }
    }
    for e in state.temporal.since(since) {
        if let Some(SpatialDelta::Remove { carrier, object }) = &e.spatial_delta {
            if !origins.contains_key(object) {
                let cat = categories.get(object).cloned().unwrap_or_default();
                origins.insert(object.clone(), (carrier.clone(), cat));
            }
        }
    }
    origins
}

/// Assembles the planner's view of memory for `scope`.
pub fn build_digest(state: &MemoryState, scope: &DigestScope) -> MemoryDigest {
    let tree = &state.spatial.tree;
    let spatial = tree
        .carriers()
        .filter(|c| c.parent.as_ref().is_some_and(|r| scope.regions.contains(r)))
        .map(|c| {
            let carrier = c.carrier.as_ref().expect("carrier node");
            CarrierSummary {
                id: c.id.clone(),
                region: c.parent.clone().expect("carrier parent"),
                position: c.position,
                enclosed: carrier.attrs.enclosed,
                storage: carrier.attrs.storage.iter().cloned().collect(),
                objects: carrier
                    .graph
                    .nodes
                    .values()
                    .map(|o| ObjectSummary { id: o.id.clone(), category: o.category().to_owned(), state: o.state.clone() })
                    .collect(),
            }
        })
        .collect();

    let mut temporal: Vec<FeedbackEntry> = match &scope.task {
        Some(task) => state
            .temporal
            .since(scope.since)
            .iter()
            .filter(|e| e.task_id.as_ref() == Some(task))
            .flat_map(|e| e.tool_log.iter().map(move |r: &ToolCallRecord| (e, r)))
            .map(|(e, r)| FeedbackEntry {
                seq: e.seq,
                tau: e.tau,
                tool: r.tool.clone(),
                args: r.args.clone(),
                status: r.status,
                feedback: r.feedback.clone(),
            })
            .collect(),
        None => Vec::new(),
    };
    if temporal.len() > scope.history {
        temporal.drain(..temporal.len() - scope.history);
    }

    let held: BTreeMap<&ObjectId, &RobotId> = state
        .embodiment
        .robots
        .values()
        .flat_map(|p| p.inventory.iter().map(move |o| (&o.id, &p.id)))
        .collect();
    let moves = if scope.task.is_some() || scope.since > 0 {
        object_origins(state, scope.since)
            .into_iter()
            .filter_map(|(object, (origin, category))| {
                let current = tree.find_object(&object).map(|(c, _)| c.clone());
                if current.is_none() && !held.contains_key(&object) {
                    return None;
                }
                (current.as_ref() != Some(&origin)).then_some(ObjectMove { object, category, origin, current })
            })
            .collect()
    } else {
        Vec::new()
    };

    let robots = state
        .embodiment
        .robots
        .values()
        .map(|p| RobotSummary {
            id: p.id.clone(),
            kind: p.kind.clone(),
            location: p.location.node.clone(),
            position: p.location.position,
            capabilities: p.capabilities.iter().cloned().collect(),
            availability: p.availability,
            holding: p.inventory.iter().map(|o| o.id.clone()).collect(),
        })
        .collect();

    MemoryDigest { spatial, temporal, moves, robots }
}

/// All regions of the tree, a convenient scope for whole-world tasks.
pub fn all_regions(state: &MemoryState) -> BTreeSet<NodeId> {
    state.spatial.tree.nodes.values().filter(|n| n.kind == NodeKind::Region).map(|n| n.id.clone()).collect()
}
