use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::catalog;
use super::fault::{FaultError, FaultFired, FaultMode, FaultPlan, FaultState, Persistence, Trigger};
use super::worldgen::{free_slot, Footprint, REGION_PITCH};
use crate::embodiment::{EmbodimentDelta, Location, ProfilePatch, RegistryParams, RobotProfile};
use crate::geo::RigidTransform;
use crate::ids::{NodeId, ObjectId, RobotId, TaskId, Tick};
use crate::planner::GoalAtom;
use crate::spatial::{build_scene_tree, NodeKind, ObjectNode, Relation, SceneTree, SpatialDelta, SpatialError, WorldSpec};
use crate::stem::{ToolCallRecord, ToolStatus};

/// A tool invocation: tool name plus string arguments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolCall {
    pub tool: String,
    pub args: BTreeMap<String, String>,
}

impl ToolCall {
    pub fn new(tool: &str, args: &[(&str, &str)]) -> Self {
        Self { tool: tool.to_owned(), args: args.iter().map(|(k, v)| ((*k).to_owned(), (*v).to_owned())).collect() }
    }

    pub fn navigate(target: &NodeId) -> Self {
        Self::new("navigate", &[("target", target.as_str())])
    }

    pub fn detect(category: &str) -> Self {
        Self::new("detect", &[("category", category)])
    }

    pub fn pick(object: &ObjectId) -> Self {
        Self::new("pick", &[("object", object.as_str())])
    }

    pub fn place(target: &NodeId) -> Self {
        Self::new("place", &[("target", target.as_str())])
    }

    pub fn place_into(target: &NodeId, container: &ObjectId) -> Self {
        Self::new("place", &[("target", target.as_str()), ("into", container.as_str())])
    }

    pub fn open(object: &ObjectId) -> Self {
        Self::new("open", &[("object", object.as_str())])
    }

    pub fn close(object: &ObjectId) -> Self {
        Self::new("close", &[("object", object.as_str())])
    }

    pub fn handover(from: &RobotId) -> Self {
        Self::new("handover", &[("from", from.as_str())])
    }

    pub fn assemble(product: &str, inputs: &[String]) -> Self {
        Self::new("assemble", &[("product", product), ("inputs", &inputs.join(","))])
    }

    fn arg(&self, key: &str) -> &str {
        self.args.get(key).map_or("", String::as_str)
    }
}

/// What a tool call did. `spatial` and `embodiment` are the exact changes
/// applied to the true world; `observed` lists carriers the robot saw
/// afterwards, with their full contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolOutcome {
    pub status: ToolStatus,
    pub feedback: String,
    pub spatial: Vec<SpatialDelta>,
    pub embodiment: Vec<EmbodimentDelta>,
    pub observed: Vec<(NodeId, Vec<ObjectNode>)>,
    /// Objects the call found or produced, e.g. detection hits.
    pub found: Vec<ObjectId>,
    pub duration: Tick,
}

impl ToolOutcome {
    fn ok(feedback: impl Into<String>) -> Self {
        Self {
            status: ToolStatus::Ok,
            feedback: feedback.into(),
            spatial: Vec::new(),
            embodiment: Vec::new(),
            observed: Vec::new(),
            found: Vec::new(),
            duration: 1,
        }
    }

    fn fail(code: &str, detail: impl std::fmt::Display) -> Self {
        Self { status: ToolStatus::Fail, feedback: format!("{code}: {detail}"), ..Self::ok("") }
    }

    pub fn is_ok(&self) -> bool {
        self.status == ToolStatus::Ok
    }

    pub fn record(&self, call: &ToolCall) -> ToolCallRecord {
        ToolCallRecord::new(call.tool.clone(), call.args.clone(), self.status, self.feedback.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSpec {
    pub id: RobotId,
    pub kind: String,
    pub location: NodeId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Body {
    pub id: RobotId,
    pub kind: String,
    pub location: NodeId,
    pub position: [f64; 2],
    pub capabilities: BTreeSet<String>,
    pub inventory: Vec<ObjectNode>,
    pub online: bool,
    /// Capabilities that currently fail every call.
    pub broken: BTreeSet<String>,
}

impl Body {
    pub fn profile(&self) -> RobotProfile {
        let caps: Vec<&str> = self.capabilities.iter().map(String::as_str).collect();
        RobotProfile::new(self.id.clone(), self.kind.clone(), self.location.clone(), self.position, &caps)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("unknown robot kind {0}")]
    UnknownKind(String),
    #[error("robot {0} defined twice")]
    DuplicateRobot(RobotId),
    #[error("robot {robot} starts at {location}, which is not a region or carrier")]
    BadStart { robot: RobotId, location: NodeId },
    #[error("world: {0}")]
    Spatial(String),
}

impl From<SpatialError> for WorldError {
    fn from(e: SpatialError) -> Self {
        WorldError::Spatial(e.to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScheduledFault {
    plan: FaultPlan,
    state: FaultState,
}

/// What happened at the start of a tick.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TickReport {
    pub tick: Tick,
    pub faults: Vec<FaultFired>,
    /// Robots whose heartbeat is due and who are alive to send it.
    pub heartbeats: Vec<RobotId>,
}

/// Ground truth of the simulated environment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct World {
    pub spec: WorldSpec,
    pub truth: SceneTree,
    pub bodies: BTreeMap<RobotId, Body>,
    pub tick: Tick,
    pub heartbeat_interval: Tick,
    /// Carrier every object started on.
    pub origins: BTreeMap<ObjectId, NodeId>,
    faults: Vec<ScheduledFault>,
    created: u64,
}

impl World {
    pub fn new(spec: WorldSpec, robots: &[RobotSpec], registry: RegistryParams) -> Result<Self, WorldError> {
        let truth = build_scene_tree(&spec)?;
        let mut bodies = BTreeMap::new();
        for r in robots {
            let caps = catalog::capabilities(&r.kind).ok_or_else(|| WorldError::UnknownKind(r.kind.clone()))?;
            let position = match truth.get(&r.location) {
                Some(n) if matches!(n.kind, NodeKind::Region | NodeKind::Carrier) => n.position,
                _ => return Err(WorldError::BadStart { robot: r.id.clone(), location: r.location.clone() }),
            };
            let body = Body {
                id: r.id.clone(),
                kind: r.kind.clone(),
                location: r.location.clone(),
                position,
                capabilities: caps.iter().map(|c| (*c).to_owned()).collect(),
                inventory: Vec::new(),
                online: true,
                broken: BTreeSet::new(),
            };
            if bodies.insert(r.id.clone(), body).is_some() {
                return Err(WorldError::DuplicateRobot(r.id.clone()));
            }
        }
        let origins = truth.objects().map(|(c, o)| (o.id.clone(), c.clone())).collect();
        Ok(Self {
            spec,
            truth,
            bodies,
            tick: 0,
            heartbeat_interval: registry.heartbeat_interval.max(1),
            origins,
            faults: Vec::new(),
            created: 0,
        })
    }

    pub fn body(&self, robot: &RobotId) -> Option<&Body> {
        self.bodies.get(robot)
    }

    pub fn is_online(&self, robot: &RobotId) -> bool {
        self.bodies.get(robot).is_some_and(|b| b.online)
    }

    /// Validates and schedules a fault. E3 needs nothing from the world; it
    /// is returned so the caller can arm its planner.
    pub fn inject_fault(&mut self, plan: FaultPlan) -> Result<(), FaultError> {
        let invalid = |m: &str| Err(FaultError::InvalidPlan(m.to_owned()));
        if let Some(r) = &plan.robot {
            if !self.bodies.contains_key(r) {
                return invalid(&format!("unknown robot {r}"));
            }
        }
        match plan.mode {
            FaultMode::None | FaultMode::E3 => return Ok(()),
            FaultMode::E1 => {
                if plan.tool.is_some() {
                    return invalid("E1 takes no tool");
                }
            }
            FaultMode::E2 => {
                let Some(tool) = &plan.tool else { return invalid("E2 needs a target tool") };
                if let Some(r) = &plan.robot {
                    if !self.bodies[r].capabilities.contains(tool) {
                        return invalid(&format!("{r} has no {tool}"));
                    }
                }
            }
        }
        if let Persistence::Transient { ticks: 0 } = plan.persistence {
            return invalid("transient fault with zero duration");
        }
        let state = match (&plan.trigger, &plan.robot) {
            (Trigger::AtTick { tick }, Some(r)) => FaultState::Due { tick: *tick, robot: r.clone() },
            (Trigger::AtTick { .. }, None) => return invalid("tick-triggered fault needs a robot"),
            (Trigger::AfterDispatch { .. }, _) => FaultState::Armed,
        };
        self.faults.push(ScheduledFault { plan, state });
        Ok(())
    }

    /// Tells armed faults that `robot` was dispatched for `task` at `tick`.
    pub fn notify_dispatch(&mut self, task: &TaskId, robot: &RobotId, tick: Tick) {
        for f in &mut self.faults {
            if f.state != FaultState::Armed {
                continue;
            }
            let Trigger::AfterDispatch { task: want, delay } = &f.plan.trigger else { continue };
            if want.as_ref().is_some_and(|w| w != task) {
                continue;
            }
            let target = f.plan.robot.clone().unwrap_or_else(|| robot.clone());
            if f.plan.robot.is_some() && &target != robot {
                continue;
            }
            if let Some(tool) = &f.plan.tool {
                if !self.bodies.get(&target).is_some_and(|b| b.capabilities.contains(tool)) {
                    continue;
                }
            }
            f.state = FaultState::Due { tick: tick + delay, robot: target };
        }
    }

    /// Advances the clock: due faults first, then the heartbeat roll call.
    pub fn advance_tick(&mut self) -> TickReport {
        self.tick += 1;
        let now = self.tick;
        let mut fired = Vec::new();
        for f in &mut self.faults {
            match f.state.clone() {
                FaultState::Due { tick, robot } if tick <= now => {
                    let until = match f.plan.persistence {
                        Persistence::Transient { ticks } => Some(now + ticks),
                        Persistence::Persistent => None,
                    };
                    let body = self.bodies.get_mut(&robot).expect("validated robot");
                    match f.plan.mode {
                        FaultMode::E1 => body.online = false,
                        FaultMode::E2 => {
                            body.broken.insert(f.plan.tool.clone().expect("validated tool"));
                        }
                        FaultMode::None | FaultMode::E3 => {}
                    }
                    fired.push(FaultFired { mode: f.plan.mode, robot: robot.clone(), tool: f.plan.tool.clone(), start: true });
                    f.state = FaultState::Active { until, robot };
                }
                FaultState::Active { until: Some(until), robot } if until <= now => {
                    let body = self.bodies.get_mut(&robot).expect("validated robot");
                    match f.plan.mode {
                        FaultMode::E1 => body.online = true,
                        FaultMode::E2 => {
                            body.broken.remove(f.plan.tool.as_deref().unwrap_or_default());
                        }
                        FaultMode::None | FaultMode::E3 => {}
                    }
                    fired.push(FaultFired { mode: f.plan.mode, robot: robot.clone(), tool: f.plan.tool.clone(), start: false });
                    f.state = FaultState::Over;
                }
                _ => {}
            }
        }
        let heartbeats = if now.is_multiple_of(self.heartbeat_interval) {
            self.bodies.values().filter(|b| b.online).map(|b| b.id.clone()).collect()
        } else {
            Vec::new()
        };
        TickReport { tick: now, faults: fired, heartbeats }
    }

    fn region_of(&self, node: &NodeId) -> Option<NodeId> {
        match self.truth.kind(node)? {
            NodeKind::Region => Some(node.clone()),
            NodeKind::Carrier => self.truth.region_of(node).cloned(),
            NodeKind::Root => None,
        }
    }

    /// Regions one pitch apart are connected.
    pub fn adjacent(tree: &SceneTree, a: &NodeId, b: &NodeId) -> bool {
        match (tree.get(a), tree.get(b)) {
            (Some(x), Some(y)) => {
                let d = ((x.position[0] - y.position[0]).powi(2) + (x.position[1] - y.position[1]).powi(2)).sqrt();
                d <= REGION_PITCH * 1.01
            }
            _ => false,
        }
    }

    fn next_object_id(&mut self, category: &str) -> ObjectId {
        loop {
            self.created += 1;
            let id = ObjectId::new(format!("{category}_m{}", self.created));
            if self.truth.find_object(&id).is_none() && self.bodies.values().all(|b| b.inventory.iter().all(|o| o.id != id)) {
                return id;
            }
        }
    }

    fn inventory_delta(body: &Body) -> EmbodimentDelta {
        EmbodimentDelta::update(body.id.clone(), ProfilePatch { inventory: Some(body.inventory.clone()), ..ProfilePatch::default() })
    }

    fn contents(&self, carrier: &NodeId) -> (NodeId, Vec<ObjectNode>) {
        let objects = self.truth.graph(carrier).map(|g| g.nodes.values().cloned().collect()).unwrap_or_default();
        (carrier.clone(), objects)
    }

    /// Executes one tool call for `robot` against the true world.
    pub fn invoke_tool(&mut self, robot: &RobotId, call: &ToolCall) -> ToolOutcome {
        let Some(body) = self.bodies.get(robot) else {
            return ToolOutcome::fail("UNKNOWN_ROBOT", robot);
        };
        if !body.online {
            return ToolOutcome::fail("NO_RESPONSE", format!("{robot} is offline"));
        }
        let Some(cap) = catalog::capability_of(&call.tool) else {
            return ToolOutcome::fail("UNKNOWN_TOOL", &call.tool);
        };
        if !body.capabilities.contains(cap) {
            return ToolOutcome::fail("CAPABILITY_MISSING", format!("{robot} has no {cap} for {}", call.tool));
        }
        if body.broken.contains(cap) {
            return ToolOutcome::fail("TOOL_BROKEN", format!("{cap} on {robot} is not responding"));
        }
        match call.tool.as_str() {
            "navigate" => self.navigate(robot, &NodeId::from(call.arg("target"))),
            "detect" => self.detect(robot, call.arg("category")),
            "pick" => self.pick(robot, &ObjectId::from(call.arg("object"))),
            "place" => {
                let into = call.args.get("into").map(|s| ObjectId::from(s.as_str()));
                self.place(robot, &NodeId::from(call.arg("target")), into.as_ref())
            }
            "open" => self.set_open(robot, &ObjectId::from(call.arg("object")), true),
            "close" => self.set_open(robot, &ObjectId::from(call.arg("object")), false),
            "handover" => self.handover(robot, &RobotId::from(call.arg("from"))),
            "assemble" => {
                let inputs: Vec<String> = call.arg("inputs").split(',').filter(|s| !s.is_empty()).map(str::to_owned).collect();
                self.assemble(robot, call.arg("product"), &inputs)
            }
            _ => ToolOutcome::fail("UNKNOWN_TOOL", &call.tool),
        }
    }

    fn navigate(&mut self, robot: &RobotId, target: &NodeId) -> ToolOutcome {
        let here = self.bodies[robot].location.clone();
        let Some(kind) = self.truth.kind(target) else {
            return ToolOutcome::fail("UNKNOWN_LOCATION", format!("{target} does not exist"));
        };
        if *target == here {
            return ToolOutcome::ok(format!("already at {target}"));
        }
        let current = self.region_of(&here);
        let reachable = match kind {
            NodeKind::Root => false,
            NodeKind::Region => {
                current.as_ref() == Some(target) || current.as_ref().is_some_and(|c| Self::adjacent(&self.truth, c, target))
            }
            NodeKind::Carrier => current.is_some() && self.truth.region_of(target) == current.as_ref(),
        };
        if !reachable {
            let from = current.map_or_else(|| here.to_string(), |c| c.to_string());
            return ToolOutcome::fail("UNREACHABLE", format!("{target} cannot be reached directly from {from}"));
        }
        let position = self.truth.nodes[target].position;
        let body = self.bodies.get_mut(robot).expect("robot");
        body.location = target.clone();
        body.position = position;
        let mut out = ToolOutcome::ok(format!("arrived at {target}"));
        out.embodiment.push(EmbodimentDelta::update(
            robot.clone(),
            ProfilePatch { location: Some(Location { node: target.clone(), position }), ..ProfilePatch::default() },
        ));
        out
    }

    #[allow(clippy::result_large_err)]
    fn at_carrier(&self, robot: &RobotId) -> Result<NodeId, ToolOutcome> {
        let here = &self.bodies[robot].location;
        match self.truth.kind(here) {
            Some(NodeKind::Carrier) => Ok(here.clone()),
            _ => Err(ToolOutcome::fail("NOT_AT_CARRIER", format!("{robot} is at {here}, not at a carrier"))),
        }
    }

    fn detect(&mut self, robot: &RobotId, category: &str) -> ToolOutcome {
        let carrier = match self.at_carrier(robot) {
            Ok(c) => c,
            Err(e) => return e,
        };
        let graph = self.truth.graph(&carrier).expect("carrier graph");
        let hits: Vec<ObjectId> = graph.of_category(category).map(|o| o.id.clone()).collect();
        let mut out = if hits.is_empty() {
            ToolOutcome::fail("NOT_DETECTED", format!("no {category} detected in the {carrier}"))
        } else {
            let names: Vec<&str> = hits.iter().map(ObjectId::as_str).collect();
            ToolOutcome::ok(format!("detected {} on {carrier}", names.join(", ")))
        };
        out.found = hits;
        out.observed.push(self.contents(&carrier));
        out
    }

    fn pick(&mut self, robot: &RobotId, object: &ObjectId) -> ToolOutcome {
        let body = &self.bodies[robot];
        if body.inventory.iter().any(|o| &o.id == object) {
            return ToolOutcome::ok(format!("already holding {object}"));
        }
        if let Some(held) = body.inventory.first() {
            return ToolOutcome::fail("GRIPPER_FULL", format!("{robot} is holding {}", held.id));
        }
        let carrier = match self.at_carrier(robot) {
            Ok(c) => c,
            Err(e) => return e,
        };
        let graph = &mut self.truth.carrier_mut(&carrier).expect("carrier").graph;
        if !graph.contains(object) {
            let mut out = ToolOutcome::fail("NOT_FOUND", format!("{object} is not on the {carrier}"));
            out.observed.push(self.contents(&carrier));
            return out;
        }
        let node = graph.remove(object).expect("present");
        let body = self.bodies.get_mut(robot).expect("robot");
        body.inventory.push(node);
        let mut out = ToolOutcome::ok(format!("picked {object} from {carrier}"));
        out.spatial.push(SpatialDelta::Remove { carrier: carrier.clone(), object: object.clone() });
        out.embodiment.push(Self::inventory_delta(&self.bodies[robot]));
        out.observed.push(self.contents(&carrier));
        out.found.push(object.clone());
        out
    }

    fn taken(&self, carrier: &NodeId) -> Vec<Footprint> {
        self.truth
            .graph(carrier)
            .map(|g| g.nodes.values().map(|o| ([o.pose.translation.x, o.pose.translation.y], o.intrinsics.half_extents)).collect())
            .unwrap_or_default()
    }

    fn place(&mut self, robot: &RobotId, target: &NodeId, into: Option<&ObjectId>) -> ToolOutcome {
        let Some(held) = self.bodies[robot].inventory.first().cloned() else {
            return ToolOutcome::fail("NOT_HOLDING", format!("{robot} holds nothing"));
        };
        let here = self.bodies[robot].location.clone();
        if here != *target {
            return ToolOutcome::fail("NOT_AT_TARGET", format!("{robot} is at {here}, not at {target}"));
        }
        let carrier = match self.at_carrier(robot) {
            Ok(c) => c,
            Err(e) => return e,
        };
        let half = held.intrinsics.half_extents;
        let pose = match into {
            Some(container) => {
                let Some(c) = self.truth.graph(&carrier).expect("carrier").get(container) else {
                    return ToolOutcome::fail("NOT_FOUND", format!("{container} is not on the {carrier}"));
                };
                if c.state.get("open").map(String::as_str) != Some("true") {
                    return ToolOutcome::fail("CONTAINER_CLOSED", format!("{container} is closed"));
                }
                let inner = c.intrinsics.half_extents;
                if (0..3).any(|i| half[i] + 0.02 > inner[i]) {
                    return ToolOutcome::fail("NO_SPACE", format!("{} does not fit into {container}", held.id));
                }
                let t = c.pose.translation;
                let z = t.z - inner[2] + 0.02 + half[2];
                RigidTransform::from_translation(nalgebra::Vector3::new(t.x, t.y, z))
            }
            None => {
                let surface = self.truth.carrier(&carrier).expect("carrier").attrs.surface;
                match free_slot(surface, &half, &self.taken(&carrier)) {
                    Some(p) => p,
                    None => return ToolOutcome::fail("NO_SPACE", format!("no free space on the {carrier}")),
                }
            }
        };
        let mut node = held;
        node.pose = pose;
        let params = self.spec.params;
        if let Err(e) = self.truth.carrier_mut(&carrier).expect("carrier").graph.insert(node.clone(), &params) {
            return ToolOutcome::fail("PLACE_FAILED", e);
        }
        let body = self.bodies.get_mut(robot).expect("robot");
        body.inventory.remove(0);
        let mut out = ToolOutcome::ok(match into {
            Some(c) => format!("placed {} into {c} on {carrier}", node.id),
            None => format!("placed {} on {carrier}", node.id),
        });
        out.found.push(node.id.clone());
        out.spatial.push(SpatialDelta::Add { carrier: carrier.clone(), node });
        out.embodiment.push(Self::inventory_delta(&self.bodies[robot]));
        out.observed.push(self.contents(&carrier));
        out
    }

    fn set_open(&mut self, robot: &RobotId, object: &ObjectId, open: bool) -> ToolOutcome {
        let carrier = match self.at_carrier(robot) {
            Ok(c) => c,
            Err(e) => return e,
        };
        let graph = &mut self.truth.carrier_mut(&carrier).expect("carrier").graph;
        let Some(node) = graph.get(object) else {
            return ToolOutcome::fail("NOT_FOUND", format!("{object} is not on the {carrier}"));
        };
        if !node.intrinsics.affordances.contains("open") {
            return ToolOutcome::fail("NOT_OPENABLE", format!("{object} cannot be opened"));
        }
        let value = if open { "true" } else { "false" };
        graph.set_state(object, "open", Some(value.to_owned())).expect("present");
        let mut out = ToolOutcome::ok(format!("{} {object}", if open { "opened" } else { "closed" }));
        out.spatial.push(SpatialDelta::SetState {
            carrier: carrier.clone(),
            object: object.clone(),
            key: "open".into(),
            value: Some(value.into()),
        });
        out.observed.push(self.contents(&carrier));
        out.found.push(object.clone());
        out
    }

    fn handover(&mut self, robot: &RobotId, from: &RobotId) -> ToolOutcome {
        let Some(giver) = self.bodies.get(from) else {
            return ToolOutcome::fail("UNKNOWN_ROBOT", from);
        };
        if !giver.online {
            return ToolOutcome::fail("NO_RESPONSE", format!("{from} is offline"));
        }
        if giver.location != self.bodies[robot].location {
            return ToolOutcome::fail("NOT_COLOCATED", format!("{from} is at {}", giver.location));
        }
        if giver.inventory.is_empty() {
            return ToolOutcome::fail("NOT_HOLDING", format!("{from} holds nothing"));
        }
        if !self.bodies[robot].inventory.is_empty() {
            return ToolOutcome::fail("GRIPPER_FULL", format!("{robot} is already holding something"));
        }
        let item = self.bodies.get_mut(from).expect("giver").inventory.remove(0);
        let id = item.id.clone();
        self.bodies.get_mut(robot).expect("robot").inventory.push(item);
        let mut out = ToolOutcome::ok(format!("took {id} from {from}"));
        out.embodiment.push(Self::inventory_delta(&self.bodies[from]));
        out.embodiment.push(Self::inventory_delta(&self.bodies[robot]));
        out.found.push(id);
        out
    }

    fn assemble(&mut self, robot: &RobotId, product: &str, inputs: &[String]) -> ToolOutcome {
        let carrier = match self.at_carrier(robot) {
            Ok(c) => c,
            Err(e) => return e,
        };
        let graph = self.truth.graph(&carrier).expect("carrier");
        let mut used: Vec<ObjectId> = Vec::new();
        for cat in inputs {
            match graph.of_category(cat).find(|o| !used.contains(&o.id)) {
                Some(o) => used.push(o.id.clone()),
                None => return ToolOutcome::fail("MISSING_INPUT", format!("no {cat} on the {carrier}")),
            }
        }
        let mut out = ToolOutcome::ok("");
        for id in &used {
            self.truth.carrier_mut(&carrier).expect("carrier").graph.remove(id).expect("present");
            out.spatial.push(SpatialDelta::Remove { carrier: carrier.clone(), object: id.clone() });
        }
        let half = catalog::half_extents(product);
        let surface = self.truth.carrier(&carrier).expect("carrier").attrs.surface;
        let pose = free_slot(surface, &half, &self.taken(&carrier)).unwrap_or_else(|| {
            RigidTransform::from_translation(nalgebra::Vector3::new(0.0, 0.0, half[2]))
        });
        let id = self.next_object_id(product);
        let mut node = ObjectNode::new(id.clone(), product, half, pose);
        node.intrinsics.affordances.insert("graspable".into());
        node.state.insert("recipe".into(), inputs.join("+"));
        let params = self.spec.params;
        self.truth.carrier_mut(&carrier).expect("carrier").graph.insert(node.clone(), &params).expect("fresh id");
        out.spatial.push(SpatialDelta::Add { carrier: carrier.clone(), node });
        out.feedback = format!("assembled {id} from {} on {carrier}", used.iter().map(ObjectId::as_str).collect::<Vec<_>>().join(", "));
        out.observed.push(self.contents(&carrier));
        out.found.push(id);
        out
    }

    /// Evaluates a goal atom against the true world.
    pub fn holds(&self, atom: &GoalAtom) -> bool {
        match atom {
            GoalAtom::ObjectAt { object, carrier } => self.truth.graph(carrier).is_ok_and(|g| g.contains(object)),
            GoalAtom::CategoryAt { category, carrier } => {
                self.truth.graph(carrier).is_ok_and(|g| g.of_category(category).next().is_some())
            }
            GoalAtom::CategoryIn { category, container } => self.truth.carriers().any(|c| {
                c.graph().is_some_and(|g| {
                    g.edges.iter().any(|e| {
                        e.relation == Relation::In
                            && g.get(&e.subject).is_some_and(|o| o.category() == category)
                            && g.get(&e.object).is_some_and(|o| o.category() == container)
                    })
                })
            }),
            GoalAtom::CategoryRestored { category } => self
                .origins
                .iter()
                .filter(|(id, _)| self.category_of(id).is_some_and(|c| c == category))
                .all(|(id, origin)| self.truth.graph(origin).is_ok_and(|g| g.contains(id))),
        }
    }

    fn category_of(&self, id: &ObjectId) -> Option<&str> {
        if let Some((_, o)) = self.truth.find_object(id) {
            return Some(o.category());
        }
        self.bodies.values().flat_map(|b| b.inventory.iter()).find(|o| &o.id == id).map(ObjectNode::category)
    }

    /// Object conservation: each object sits in exactly one carrier graph or inventory.
    pub fn conserved(&self) -> bool {
        let mut seen = BTreeSet::new();
        let placed = self.truth.objects().map(|(_, o)| o.id.clone());
        let held = self.bodies.values().flat_map(|b| b.inventory.iter().map(|o| o.id.clone()));
        placed.chain(held).all(|id| seen.insert(id))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::generate_world;
    use crate::spatial::{Domain, Level};

    fn world() -> World {
        let spec = generate_world(Domain::Household, Level::L1, 3);
        let start = spec.regions[0].id.clone();
        World::new(spec, &[RobotSpec { id: "r1".into(), kind: "wheeled".into(), location: start }], RegistryParams::default())
            .unwrap()
    }

    #[test]
    fn detect_absent_category_reports_carrier() {
        let mut w = world();
        let r = RobotId::from("r1");
        let carrier = w.truth.carriers().find(|c| c.parent.as_ref() == Some(&w.spec.regions[0].id)).unwrap().id.clone();
        assert!(w.invoke_tool(&r, &ToolCall::navigate(&carrier)).is_ok());
        let out = w.invoke_tool(&r, &ToolCall::detect("unicorn"));
        assert_eq!(out.status, ToolStatus::Fail);
        assert_eq!(out.feedback, format!("NOT_DETECTED: no unicorn detected in the {carrier}"));
    }

    #[test]
    fn navigate_in_place_is_a_no_op() {
        let mut w = world();
        let r = RobotId::from("r1");
        let here = w.bodies[&r].location.clone();
        let out = w.invoke_tool(&r, &ToolCall::navigate(&here));
        assert!(out.is_ok());
        assert!(out.spatial.is_empty() && out.embodiment.is_empty());
    }

    #[test]
    fn capability_is_checked_first() {
        let mut w = world();
        let out = w.invoke_tool(&"r1".into(), &ToolCall::open(&"bag_1".into()));
        assert!(out.feedback.starts_with("CAPABILITY_MISSING"));
    }
}
