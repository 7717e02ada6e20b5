//! Embodiment memory: one profile per robot with location link,
//! capabilities, resources, sensor handles and availability.
//!
//! Query and command methods never mutate the registry; they return
//! [`EmbodimentDelta`]s which are applied by the event writer through
//! [`EmbodimentRegistry::apply`].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{NodeId, RobotId, Tick};
use crate::spatial::{NodeKind, ObjectNode, SceneTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Availability {
    Idle,
    Busy,
    Offline,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resources {
    pub battery: f64,
    pub cpu: f64,
    pub net: f64,
}

impl Default for Resources {
    fn default() -> Self {
        Self { battery: 100.0, cpu: 10.0, net: 100.0 }
    }
}

impl Resources {
    pub fn is_valid(&self) -> bool {
        [self.battery, self.cpu, self.net].iter().all(|v| (0.0..=100.0).contains(v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub node: NodeId,
    /// Map-frame coordinate (meters).
    pub position: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotProfile {
    pub id: RobotId,
    /// Body type label, e.g. `wheeled`.
    pub kind: String,
    pub location: Location,
    pub capabilities: BTreeSet<String>,
    pub resources: Resources,
    #[serde(default)]
    pub sensors: BTreeMap<String, String>,
    pub availability: Availability,
    pub last_heartbeat: Tick,
    /// Objects currently held.
    #[serde(default)]
    pub inventory: Vec<ObjectNode>,
}

impl RobotProfile {
    pub fn new(id: impl Into<RobotId>, kind: impl Into<String>, loc: NodeId, position: [f64; 2], capabilities: &[&str]) -> Self {
        Self {
            id: id.into(),
            kind: kind.into(),
            location: Location { node: loc, position },
            capabilities: capabilities.iter().map(|s| s.to_string()).collect(),
            resources: Resources::default(),
            sensors: BTreeMap::new(),
            availability: Availability::Idle,
            last_heartbeat: 0,
            inventory: Vec::new(),
        }
    }

    pub fn has(&self, tool: &str) -> bool {
        self.capabilities.contains(tool)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileField {
    Location,
    Capabilities,
    Resources,
    Sensors,
    Availability,
    Heartbeat,
    Inventory,
}

/// New values for a subset of profile fields; absent fields are unchanged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProfilePatch {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<Location>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capabilities: Option<BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resources: Option<Resources>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensors: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub availability: Option<Availability>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heartbeat: Option<Tick>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inventory: Option<Vec<ObjectNode>>,
}

impl ProfilePatch {
    pub fn changed(&self) -> BTreeSet<ProfileField> {
        let mut out = BTreeSet::new();
        let flags = [
            (self.location.is_some(), ProfileField::Location),
            (self.capabilities.is_some(), ProfileField::Capabilities),
            (self.resources.is_some(), ProfileField::Resources),
            (self.sensors.is_some(), ProfileField::Sensors),
            (self.availability.is_some(), ProfileField::Availability),
            (self.heartbeat.is_some(), ProfileField::Heartbeat),
            (self.inventory.is_some(), ProfileField::Inventory),
        ];
        for (set, field) in flags {
            if set {
                out.insert(field);
            }
        }
        out
    }

    pub fn availability(a: Availability) -> Self {
        Self { availability: Some(a), ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EmbodimentChange {
    Register { profile: RobotProfile },
    Update { patch: ProfilePatch },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbodimentDelta {
    pub robot: RobotId,
    pub change: EmbodimentChange,
}

impl EmbodimentDelta {
    pub fn update(robot: RobotId, patch: ProfilePatch) -> Self {
        Self { robot, change: EmbodimentChange::Update { patch } }
    }

    /// Fields touched by the delta; registration touches all of them.
    pub fn changed(&self) -> BTreeSet<ProfileField> {
        match &self.change {
            EmbodimentChange::Register { .. } => [
                ProfileField::Location,
                ProfileField::Capabilities,
                ProfileField::Resources,
                ProfileField::Sensors,
                ProfileField::Availability,
                ProfileField::Heartbeat,
                ProfileField::Inventory,
            ]
            .into_iter()
            .collect(),
            EmbodimentChange::Update { patch } => patch.changed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeartbeatStatus {
    pub robot: RobotId,
    pub tick: Tick,
    pub resources: Resources,
    #[serde(default)]
    pub sensors: BTreeMap<String, String>,
    /// Availability the robot reports for itself (IDLE or BUSY).
    pub claim: Availability,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegistryParams {
    /// Heartbeat period Δ_H in ticks.
    pub heartbeat_interval: Tick,
    /// A robot silent for more than this many ticks is OFFLINE.
    pub offline_threshold: Tick,
}

impl Default for RegistryParams {
    fn default() -> Self {
        Self { heartbeat_interval: 5, offline_threshold: 15 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmbodimentError {
    #[error("robot {0} already registered")]
    DuplicateRobot(RobotId),
    #[error("unknown robot {0}")]
    UnknownRobot(RobotId),
    #[error("location {0} is not a region or carrier")]
    UnknownLocation(NodeId),
    #[error("heartbeat tick {tick} for {robot} precedes last heartbeat {last}")]
    StaleTick { robot: RobotId, tick: Tick, last: Tick },
    #[error("robot {robot} has no tool {tool} to detach")]
    DetachMissingTool { robot: RobotId, tool: String },
    #[error("malformed embodiment delta: {0}")]
    MalformedDelta(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EmbodimentRegistry {
    pub robots: BTreeMap<RobotId, RobotProfile>,
    pub params: RegistryParams,
}

fn check_location(tree: &SceneTree, node: &NodeId) -> Result<(), EmbodimentError> {
    match tree.kind(node) {
        Some(NodeKind::Region | NodeKind::Carrier) => Ok(()),
        _ => Err(EmbodimentError::UnknownLocation(node.clone())),
    }
}

fn dist(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

impl EmbodimentRegistry {
    pub fn new(params: RegistryParams) -> Self {
        Self { robots: BTreeMap::new(), params }
    }

    pub fn get(&self, id: &RobotId) -> Option<&RobotProfile> {
        self.robots.get(id)
    }

    pub fn profile(&self, id: &RobotId) -> Result<&RobotProfile, EmbodimentError> {
        self.robots.get(id).ok_or_else(|| EmbodimentError::UnknownRobot(id.clone()))
    }

    pub fn len(&self) -> usize {
        self.robots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.robots.is_empty()
    }

    pub fn register_robot(&self, mut profile: RobotProfile, tree: &SceneTree) -> Result<EmbodimentDelta, EmbodimentError> {
        if self.robots.contains_key(&profile.id) {
            return Err(EmbodimentError::DuplicateRobot(profile.id));
        }
        check_location(tree, &profile.location.node)?;
        profile.availability = Availability::Idle;
        Ok(EmbodimentDelta { robot: profile.id.clone(), change: EmbodimentChange::Register { profile } })
    }

    pub fn heartbeat(&self, status: &HeartbeatStatus) -> Result<EmbodimentDelta, EmbodimentError> {
        let p = self.profile(&status.robot)?;
        if status.tick < p.last_heartbeat {
            return Err(EmbodimentError::StaleTick { robot: p.id.clone(), tick: status.tick, last: p.last_heartbeat });
        }
        let mut patch = ProfilePatch {
            heartbeat: Some(status.tick),
            resources: Some(status.resources),
            sensors: Some(status.sensors.clone()),
            ..ProfilePatch::default()
        };
        if p.availability == Availability::Offline {
            patch.availability = Some(status.claim);
        }
        Ok(EmbodimentDelta::update(p.id.clone(), patch))
    }

    /// Deltas marking every silent robot OFFLINE; robots already OFFLINE
    /// produce nothing.
    pub fn sweep_offline(&self, now: Tick) -> Vec<EmbodimentDelta> {
        self.robots
            .values()
            .filter(|p| p.availability != Availability::Offline)
            .filter(|p| now.saturating_sub(p.last_heartbeat) > self.params.offline_threshold)
            .map(|p| EmbodimentDelta::update(p.id.clone(), ProfilePatch::availability(Availability::Offline)))
            .collect()
    }

    /// Nearest carrier to `position`; ties go to carriers in the robot's
    /// current region, then to the smaller id. Falls back to regions when
    /// the tree has no carriers.
    pub fn snap_localization(
        &self,
        robot: &RobotId,
        position: [f64; 2],
        tree: &SceneTree,
    ) -> Result<(NodeId, EmbodimentDelta), EmbodimentError> {
        let p = self.profile(robot)?;
        let home = tree.region_of(&p.location.node).cloned();
        let mut pool: Vec<_> = tree.carriers().collect();
        if pool.is_empty() {
            pool = tree.regions().collect();
        }
        let best = pool
            .into_iter()
            .min_by(|a, b| {
                let other_region = |n: &&crate::spatial::SceneNode| tree.region_of(&n.id).cloned() != home;
                dist(&a.position, &position)
                    .total_cmp(&dist(&b.position, &position))
                    .then(other_region(a).cmp(&other_region(b)))
                    .then(a.id.cmp(&b.id))
            })
            .ok_or_else(|| EmbodimentError::UnknownLocation(tree.root.clone()))?;
        let node = best.id.clone();
        let delta = EmbodimentDelta::update(
            robot.clone(),
            ProfilePatch { location: Some(Location { node: node.clone(), position }), ..ProfilePatch::default() },
        );
        Ok((node, delta))
    }

    /// Orders robots by tree hops to `near`, then map distance, then id.
    pub fn rank_by_proximity<'a>(
        &self,
        robots: impl Iterator<Item = &'a RobotProfile>,
        near: &NodeId,
        tree: &SceneTree,
    ) -> Vec<RobotId> {
        let target = tree.get(near).map(|n| n.position);
        let mut keyed: Vec<(usize, f64, &RobotId)> = robots
            .map(|p| {
                let hops = tree.hops(&p.location.node, near).unwrap_or(usize::MAX);
                let d = target.map_or(f64::INFINITY, |t| dist(&p.location.position, &t));
                (hops, d, &p.id)
            })
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(b.2)));
        keyed.into_iter().map(|(_, _, id)| id.clone()).collect()
    }

    /// IDLE robots offering `tool`, nearest first.
    pub fn find_capable(&self, tool: &str, near: &NodeId, tree: &SceneTree) -> Vec<RobotId> {
        self.rank_by_proximity(
            self.robots.values().filter(|p| p.availability == Availability::Idle && p.has(tool)),
            near,
            tree,
        )
    }

    /// Attaches or detaches a tool. Attaching a present tool yields no delta.
    pub fn hotplug_tool(&self, robot: &RobotId, tool: &str, attach: bool) -> Result<Option<EmbodimentDelta>, EmbodimentError> {
        let p = self.profile(robot)?;
        let mut caps = p.capabilities.clone();
        if attach {
            if !caps.insert(tool.to_owned()) {
                return Ok(None);
            }
        } else if !caps.remove(tool) {
            return Err(EmbodimentError::DetachMissingTool { robot: robot.clone(), tool: tool.to_owned() });
        }
        Ok(Some(EmbodimentDelta::update(
            robot.clone(),
            ProfilePatch { capabilities: Some(caps), ..ProfilePatch::default() },
        )))
    }

    /// Checks a delta against the current registry and tree without applying it.
    pub fn check(&self, delta: &EmbodimentDelta, tree: &SceneTree) -> Result<(), EmbodimentError> {
        match &delta.change {
            EmbodimentChange::Register { profile } => {
                if profile.id != delta.robot {
                    return Err(EmbodimentError::MalformedDelta("profile id differs from delta robot".into()));
                }
                if self.robots.contains_key(&profile.id) {
                    return Err(EmbodimentError::DuplicateRobot(profile.id.clone()));
                }
                check_location(tree, &profile.location.node)?;
                if !profile.resources.is_valid() {
                    return Err(EmbodimentError::MalformedDelta("resources outside [0, 100]".into()));
                }
            }
            EmbodimentChange::Update { patch } => {
                let p = self.profile(&delta.robot)?;
                if patch.changed().is_empty() {
                    return Err(EmbodimentError::MalformedDelta("empty patch".into()));
                }
                if let Some(loc) = &patch.location {
                    check_location(tree, &loc.node)?;
                    if !loc.position.iter().all(|v| v.is_finite()) {
                        return Err(EmbodimentError::MalformedDelta("non-finite position".into()));
                    }
                }
                if patch.resources.is_some_and(|r| !r.is_valid()) {
                    return Err(EmbodimentError::MalformedDelta("resources outside [0, 100]".into()));
                }
                if let Some(t) = patch.heartbeat {
                    if t < p.last_heartbeat {
                        return Err(EmbodimentError::StaleTick { robot: p.id.clone(), tick: t, last: p.last_heartbeat });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, delta: &EmbodimentDelta, tree: &SceneTree) -> Result<(), EmbodimentError> {
        self.check(delta, tree)?;
        match &delta.change {
            EmbodimentChange::Register { profile } => {
                self.robots.insert(profile.id.clone(), profile.clone());
            }
            EmbodimentChange::Update { patch } => {
                let p = self.robots.get_mut(&delta.robot).expect("checked");
                let patch = patch.clone();
                if let Some(v) = patch.location {
                    p.location = v;
                }
                if let Some(v) = patch.capabilities {
                    p.capabilities = v;
                }
                if let Some(v) = patch.resources {
                    p.resources = v;
                }
                if let Some(v) = patch.sensors {
                    p.sensors = v;
                }
                if let Some(v) = patch.availability {
                    p.availability = v;
                }
                if let Some(v) = patch.heartbeat {
                    p.last_heartbeat = v;
                }
                if let Some(v) = patch.inventory {
                    p.inventory = v;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spatial::CarrierAttrs;

    fn tree() -> SceneTree {
        let mut t = SceneTree::new("root");
        t.add_region("kitchen".into(), "kitchen".into(), [0.0, 0.0], vec![]).unwrap();
        t.add_region("hall".into(), "hall".into(), [10.0, 0.0], vec![]).unwrap();
        t.add_carrier("a".into(), &"kitchen".into(), "a".into(), [1.0, 0.0], CarrierAttrs::default()).unwrap();
        t.add_carrier("b".into(), &"kitchen".into(), "b".into(), [3.0, 0.0], CarrierAttrs::default()).unwrap();
        t.add_carrier("c".into(), &"hall".into(), "c".into(), [10.0, 1.0], CarrierAttrs::default()).unwrap();
        t
    }

    fn registered(ids: &[(&str, &str, [f64; 2])]) -> (EmbodimentRegistry, SceneTree) {
        let t = tree();
        let mut reg = EmbodimentRegistry::default();
        for (id, loc, pos) in ids {
            let d = reg
                .register_robot(RobotProfile::new(*id, "wheeled", (*loc).into(), *pos, &["navigate", "grasp"]), &t)
                .unwrap();
            reg.apply(&d, &t).unwrap();
        }
        (reg, t)
    }

    #[test]
    fn duplicate_registration_fails() {
        let (reg, t) = registered(&[("r1", "kitchen", [0.0, 0.0])]);
        let again = reg.register_robot(RobotProfile::new("r1", "wheeled", "kitchen".into(), [0.0, 0.0], &[]), &t);
        assert!(matches!(again, Err(EmbodimentError::DuplicateRobot(_))));
        let bad = reg.register_robot(RobotProfile::new("r2", "wheeled", "root".into(), [0.0, 0.0], &[]), &t);
        assert!(matches!(bad, Err(EmbodimentError::UnknownLocation(_))));
    }

    #[test]
    fn sweep_and_revive() {
        let (mut reg, t) = registered(&[("r1", "kitchen", [0.0, 0.0]), ("r2", "hall", [10.0, 0.0])]);
        let hb = HeartbeatStatus { robot: "r2".into(), tick: 10, resources: Resources::default(), sensors: BTreeMap::new(), claim: Availability::Idle };
        reg.apply(&reg.heartbeat(&hb).unwrap(), &t).unwrap();
        assert!(reg.sweep_offline(15).is_empty());
        let stale = reg.sweep_offline(16);
        assert_eq!(stale.len(), 1);
        assert_eq!(stale[0].robot, "r1");
        for d in &stale {
            reg.apply(d, &t).unwrap();
        }
        assert!(reg.sweep_offline(16).is_empty());
        let revive = HeartbeatStatus { robot: "r1".into(), tick: 17, resources: Resources::default(), sensors: BTreeMap::new(), claim: Availability::Busy };
        reg.apply(&reg.heartbeat(&revive).unwrap(), &t).unwrap();
        assert_eq!(reg.robots[&RobotId::from("r1")].availability, Availability::Busy);
        let old = HeartbeatStatus { tick: 3, ..revive };
        assert!(matches!(reg.heartbeat(&old), Err(EmbodimentError::StaleTick { .. })));
    }

    #[test]
    fn snap_prefers_smaller_id_on_exact_tie() {
        let (reg, t) = registered(&[("r1", "kitchen", [0.0, 0.0])]);
        let (node, _) = reg.snap_localization(&"r1".into(), [2.0, 0.0], &t).unwrap();
        assert_eq!(node, "a");
        let (node, _) = reg.snap_localization(&"r1".into(), [10.0, 1.0], &t).unwrap();
        assert_eq!(node, "c");
    }

    #[test]
    fn find_capable_skips_busy_and_offline() {
        let (mut reg, t) = registered(&[("r1", "a", [1.0, 0.0]), ("r2", "b", [3.0, 0.0]), ("r3", "c", [10.0, 1.0])]);
        assert_eq!(reg.find_capable("grasp", &"a".into(), &t), vec![RobotId::from("r1"), "r2".into(), "r3".into()]);
        reg.apply(&EmbodimentDelta::update("r1".into(), ProfilePatch::availability(Availability::Busy)), &t).unwrap();
        reg.apply(&EmbodimentDelta::update("r2".into(), ProfilePatch::availability(Availability::Offline)), &t).unwrap();
        assert_eq!(reg.find_capable("grasp", &"a".into(), &t), vec![RobotId::from("r3")]);
        assert!(reg.find_capable("assemble", &"a".into(), &t).is_empty());
    }

    #[test]
    fn hotplug_round_trip() {
        let (mut reg, t) = registered(&[("r1", "a", [1.0, 0.0])]);
        assert!(reg.hotplug_tool(&"r1".into(), "grasp", true).unwrap().is_none());
        let d = reg.hotplug_tool(&"r1".into(), "grasp", false).unwrap().unwrap();
        reg.apply(&d, &t).unwrap();
        assert!(reg.find_capable("grasp", &"a".into(), &t).is_empty());
        assert!(matches!(reg.hotplug_tool(&"r1".into(), "grasp", false), Err(EmbodimentError::DetachMissingTool { .. })));
        let d = reg.hotplug_tool(&"r1".into(), "open", true).unwrap().unwrap();
        reg.apply(&d, &t).unwrap();
        assert!(reg.robots[&RobotId::from("r1")].has("open"));
    }
}
