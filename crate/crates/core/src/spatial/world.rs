use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::graph::{Intrinsics, ObjectNode};
use super::relation::PredicateParams;
use super::tree::{CarrierAttrs, SceneTree};
use super::SpatialError;
use crate::geo::RigidTransform;
use crate::ids::{NodeId, ObjectId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Domain {
    Restaurant,
    Supermarket,
    Household,
}

impl Domain {
    pub const ALL: [Domain; 3] = [Domain::Restaurant, Domain::Supermarket, Domain::Household];
}

/// Difficulty band, defined by total node count of the world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    L1,
    L2,
    L3,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::L1, Level::L2, Level::L3];

    /// Inclusive node-count range for the level.
    pub fn band(self) -> (usize, usize) {
        match self {
            Level::L1 => (1, 19),
            Level::L2 => (20, 30),
            Level::L3 => (40, 50),
        }
    }

    pub fn contains(self, count: usize) -> bool {
        let (lo, hi) = self.band();
        (lo..=hi).contains(&count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub id: NodeId,
    pub name: String,
    pub position: [f64; 2],
    #[serde(default)]
    pub media: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarrierSpec {
    pub id: NodeId,
    pub name: String,
    pub region: NodeId,
    pub position: [f64; 2],
    pub surface: [f64; 2],
    #[serde(default)]
    pub enclosed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub id: ObjectId,
    pub carrier: NodeId,
    pub category: String,
    pub half_extents: [f64; 3],
    #[serde(default)]
    pub affordances: BTreeSet<String>,
    pub pose: RigidTransform,
    #[serde(default)]
    pub state: BTreeMap<String, String>,
}

impl ObjectSpec {
    pub fn node(&self) -> ObjectNode {
        ObjectNode {
            id: self.id.clone(),
            intrinsics: Intrinsics {
                category: self.category.clone(),
                half_extents: self.half_extents,
                affordances: self.affordances.clone(),
            },
            state: self.state.clone(),
            pose: self.pose,
        }
    }
}

/// Declarative description of an environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldSpec {
    pub domain: Domain,
    #[serde(default)]
    pub level: Option<Level>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub root_media: Vec<String>,
    pub regions: Vec<RegionSpec>,
    pub carriers: Vec<CarrierSpec>,
    pub objects: Vec<ObjectSpec>,
    /// Category → carriers that conventionally store it.
    #[serde(default)]
    pub priors: BTreeMap<String, Vec<NodeId>>,
    /// Named work places, e.g. `prep`, `packing`, `service`.
    #[serde(default)]
    pub stations: BTreeMap<String, NodeId>,
    /// Product variant → input categories, e.g. `normal` → `[bun, patty]`.
    #[serde(default)]
    pub recipes: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub params: PredicateParams,
}

impl WorldSpec {
    /// Root + regions + carriers + objects.
    pub fn node_count(&self) -> usize {
        1 + self.regions.len() + self.carriers.len() + self.objects.len()
    }

    pub fn carrier(&self, id: &NodeId) -> Option<&CarrierSpec> {
        self.carriers.iter().find(|c| &c.id == id)
    }

    /// Storage tags per carrier, inverted from `priors`.
    pub fn storage_tags(&self) -> BTreeMap<NodeId, BTreeSet<String>> {
        let mut out: BTreeMap<NodeId, BTreeSet<String>> = BTreeMap::new();
        for (cat, carriers) in &self.priors {
            for c in carriers {
                out.entry(c.clone()).or_default().insert(cat.clone());
            }
        }
        out
    }

    pub fn carrier_attrs(&self, c: &CarrierSpec) -> CarrierAttrs {
        CarrierAttrs {
            surface: c.surface,
            enclosed: c.enclosed,
            storage: self.storage_tags().remove(&c.id).unwrap_or_default(),
        }
    }

    /// Objects whose carrier is enclosed, i.e. not visible without a look inside.
    pub fn is_hidden(&self, object: &ObjectSpec) -> bool {
        self.carrier(&object.carrier).is_some_and(|c| c.enclosed)
    }
}

fn build(world: &WorldSpec, include_hidden: bool) -> Result<SceneTree, SpatialError> {
    let mut tree = SceneTree::new("root");
    tree.set_media(&"root".into(), world.root_media.clone())?;
    for r in &world.regions {
        tree.add_region(r.id.clone(), r.name.clone(), r.position, r.media.clone())?;
    }
    for c in &world.carriers {
        tree.add_carrier(c.id.clone(), &c.region, c.name.clone(), c.position, world.carrier_attrs(c))?;
    }
    let mut seen = BTreeSet::new();
    for o in &world.objects {
        if !seen.insert(o.id.clone()) {
            return Err(SpatialError::DuplicateId(o.id.0.clone()));
        }
        if !include_hidden && world.is_hidden(o) {
            continue;
        }
        tree.carrier_mut(&o.carrier)?.graph.insert(o.node(), &world.params)?;
    }
    Ok(tree)
}

/// Full scene tree with every object placed and all relation edges computed.
pub fn build_scene_tree(world: &WorldSpec) -> Result<SceneTree, SpatialError> {
    build(world, true)
}

/// Scene tree as first observed: contents of enclosed carriers are left out.
pub fn build_observed_tree(world: &WorldSpec) -> Result<SceneTree, SpatialError> {
    build(world, false)
}
