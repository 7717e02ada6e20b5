//! Per-robot tool selection. Each call looks at the subtask intent, the
//! subtask's scratch notes and whatever memory the configuration exposes, and
//! returns the next action.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::MemoryConfig;
use super::runtime::{FailureCause, Scratch, SubtaskRuntime};
use crate::embodiment::{Availability, RobotProfile};
use crate::ids::{NodeId, ObjectId, RobotId};
use crate::planner::Intent;
use crate::sim::{ToolCall, ToolOutcome, World};
use crate::spatial::{locate_candidates, NodeKind, ObjectNode, SceneTree, SpatialDelta};
use crate::stem::{MemoryState, ToolStatus};

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Call(ToolCall),
    /// Nothing useful to do this tick.
    Wait,
    /// The robot's current role is finished.
    RoleDone,
    Fail(FailureCause),
}

/// What an agent may consult.
pub struct AgentView<'a> {
    pub memory: &'a MemoryState,
    /// Floor plan without contents.
    pub map: &'a SceneTree,
    pub config: &'a MemoryConfig,
}

impl<'a> AgentView<'a> {
    fn me(&self, robot: &RobotId) -> &'a RobotProfile {
        self.memory.embodiment.robots.get(robot).expect("agents act for registered robots")
    }

    fn region_of(&self, node: &NodeId) -> Option<NodeId> {
        match self.map.kind(node)? {
            NodeKind::Region => Some(node.clone()),
            NodeKind::Carrier => self.map.region_of(node).cloned(),
            NodeKind::Root => None,
        }
    }

    /// Next navigation target on the way from `from` to `to`: a neighbouring
    /// region while regions differ, then the target itself.
    pub fn next_hop(&self, from: &NodeId, to: &NodeId) -> Option<NodeId> {
        let (a, b) = (self.region_of(from)?, self.region_of(to)?);
        if a == b {
            return Some(to.clone());
        }
        let regions: Vec<NodeId> = self.map.regions().map(|r| r.id.clone()).collect();
        let mut prev: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        let mut queue = VecDeque::from([a.clone()]);
        let mut seen = BTreeSet::from([a.clone()]);
        while let Some(r) = queue.pop_front() {
            if r == b {
                break;
            }
            for n in &regions {
                if !seen.contains(n) && World::adjacent(self.map, &r, n) {
                    seen.insert(n.clone());
                    prev.insert(n.clone(), r.clone());
                    queue.push_back(n.clone());
                }
            }
        }
        let mut step = b;
        while let Some(p) = prev.get(&step) {
            if *p == a {
                return Some(step);
            }
            step = p.clone();
        }
        None
    }

    /// Where memory has an object matching the target, nearest first.
    fn known(&self, category: &str, object: Option<&ObjectId>, from: &NodeId, skip: &BTreeSet<NodeId>) -> Option<(NodeId, ObjectId)> {
        let tree = &self.memory.spatial.tree;
        let mut hits: Vec<(usize, NodeId, ObjectId)> = tree
            .objects()
            .filter(|(c, o)| !skip.contains(*c) && matches(o, category, object))
            .map(|(c, o)| (self.map.hops(from, c).unwrap_or(usize::MAX), c.clone(), o.id.clone()))
            .collect();
        hits.sort();
        hits.into_iter().next().map(|(_, c, o)| (c, o))
    }

    /// Another robot holding the target, according to memory.
    fn holder(&self, me: &RobotId, category: &str, object: Option<&ObjectId>) -> Option<&'a RobotProfile> {
        self.memory
            .embodiment
            .robots
            .values()
            .find(|p| &p.id != me && p.inventory.iter().any(|o| matches(o, category, object)))
    }

    fn satisfied(&self, category: &str, object: Option<&ObjectId>, dest: &NodeId) -> bool {
        self.memory.spatial.tree.graph(dest).is_ok_and(|g| g.nodes.values().any(|o| matches(o, category, object)))
    }

    /// Carriers to search, best first, for an agent with spatial memory.
    fn candidates(&self, category: &str, from: &NodeId) -> Vec<NodeId> {
        let tree = &self.memory.spatial.tree;
        let mut out = locate_candidates(tree, category);
        let mut rest: Vec<(bool, usize, NodeId)> = tree
            .carriers()
            .filter(|c| !out.contains(&c.id))
            .map(|c| {
                let enclosed = c.carrier.as_ref().is_some_and(|k| k.attrs.enclosed);
                (!enclosed, self.map.hops(from, &c.id).unwrap_or(usize::MAX), c.id.clone())
            })
            .collect();
        rest.sort();
        out.extend(rest.into_iter().map(|(_, _, id)| id));
        out
    }
}

fn matches(o: &ObjectNode, category: &str, object: Option<&ObjectId>) -> bool {
    match object {
        Some(id) => &o.id == id,
        None => o.category() == category,
    }
}

/// Region-grouped random visiting order, starting in the robot's region;
/// a named source goes first.
pub fn sweep_order(map: &SceneTree, start: &NodeId, source: Option<&NodeId>, seed: u64) -> Vec<NodeId> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let here = match map.kind(start) {
        Some(NodeKind::Carrier) => map.region_of(start).cloned(),
        _ => Some(start.clone()),
    };
    let mut regions: Vec<NodeId> = map.regions().map(|r| r.id.clone()).filter(|r| Some(r) != here.as_ref()).collect();
    regions.shuffle(&mut rng);
    if let Some(h) = here {
        regions.insert(0, h);
    }
    let mut out: Vec<NodeId> = source.filter(|s| map.kind(s) == Some(NodeKind::Carrier)).cloned().into_iter().collect();
    for r in regions {
        let mut cs: Vec<NodeId> = map.carriers().filter(|c| c.parent.as_ref() == Some(&r)).map(|c| c.id.clone()).collect();
        cs.shuffle(&mut rng);
        out.extend(cs.into_iter().filter(|c| Some(c) != source));
    }
    out
}

fn go(view: &AgentView, from: &NodeId, to: &NodeId) -> Action {
    match view.next_hop(from, to) {
        Some(hop) => Action::Call(ToolCall::navigate(&hop)),
        None => Action::Call(ToolCall::navigate(to)),
    }
}

/// Next action for `robot` playing `role` in `rt`.
pub fn next_action(view: &AgentView, rt: &SubtaskRuntime, robot: &RobotId, role: usize) -> Action {
    if let Some(call) = &rt.scratch.retry {
        return Action::Call(call.clone());
    }
    let me = view.me(robot);
    let here = &me.location.node;
    let roles = rt.subtask.intent.roles();
    let last = role + 1 == roles;
    // A stray object from an aborted subtask is put down first.
    if let Some(held) = me.inventory.first() {
        if !holds_target(&rt.subtask.intent, &rt.scratch, held, role, roles) {
            return match view.map.kind(here) {
                Some(NodeKind::Carrier) => Action::Call(ToolCall::place(here)),
                _ => match view.map.carriers().find(|c| c.parent.as_ref() == Some(here)) {
                    Some(c) => Action::Call(ToolCall::navigate(&c.id)),
                    None => Action::Fail(FailureCause::ToolFailed { feedback: format!("cannot put down {}", held.id) }),
                },
            };
        }
    }
    match &rt.subtask.intent {
        Intent::Fetch { category, object, source, dest } => {
            fetch(view, &rt.scratch, robot, category, object.as_ref(), source.as_ref(), dest)
        }
        Intent::Assemble { inputs, product, station, dest } => {
            if !last {
                if here != station {
                    return go(view, here, station);
                }
                return Action::Call(ToolCall::assemble(product, inputs));
            }
            // Serving role.
            if !me.inventory.is_empty() {
                if here == dest {
                    return Action::Call(ToolCall::place(dest));
                }
                return go(view, here, dest);
            }
            match &rt.scratch.product {
                None if here != station => go(view, here, station),
                None => Action::Wait,
                Some(p) if here == station => Action::Call(ToolCall::pick(p)),
                Some(_) => go(view, here, station),
            }
        }
        Intent::Pack { item, container, station } => {
            let opener = role == 0;
            if opener && !(last && rt.scratch.container_open) {
                if here != station {
                    return go(view, here, station);
                }
                return match &rt.scratch.container {
                    None => Action::Call(ToolCall::detect(container)),
                    Some(c) => Action::Call(ToolCall::open(c)),
                };
            }
            if !me.inventory.is_empty() {
                let c = rt.scratch.container.clone().expect("container known once open");
                if here == station {
                    return Action::Call(ToolCall::place_into(station, &c));
                }
                return go(view, here, station);
            }
            if here != station {
                return go(view, here, station);
            }
            if !rt.scratch.container_open {
                return Action::Wait;
            }
            match &rt.scratch.found {
                Some((at, id)) if at == station => Action::Call(ToolCall::pick(id)),
                _ => Action::Call(ToolCall::detect(item)),
            }
        }
    }
}

fn holds_target(intent: &Intent, scratch: &Scratch, held: &ObjectNode, role: usize, roles: usize) -> bool {
    match intent {
        Intent::Fetch { category, object, .. } => matches(held, category, object.as_ref()),
        Intent::Assemble { .. } => role + 1 == roles && scratch.product.as_ref() == Some(&held.id),
        Intent::Pack { item, .. } => role + 1 == roles && held.category() == item,
    }
}

fn fetch(
    view: &AgentView,
    scratch: &Scratch,
    robot: &RobotId,
    category: &str,
    object: Option<&ObjectId>,
    source: Option<&NodeId>,
    dest: &NodeId,
) -> Action {
    let me = view.me(robot);
    let here = &me.location.node;
    if !me.inventory.is_empty() {
        if here == dest {
            return Action::Call(ToolCall::place(dest));
        }
        return go(view, here, dest);
    }
    if view.config.spatial && view.satisfied(category, object, dest) {
        return Action::RoleDone;
    }
    if let Some((at, id)) = &scratch.found {
        if at == here {
            return Action::Call(ToolCall::pick(id));
        }
        return go(view, here, at);
    }
    if view.config.spatial {
        if let Some(holder) = view.holder(robot, category, object) {
            if view.config.live() && holder.availability == Availability::Offline {
                return Action::Wait;
            }
            if holder.location.node == *here {
                return Action::Call(ToolCall::handover(&holder.id));
            }
            return go(view, here, &holder.location.node);
        }
        let mut skip = scratch.visited.clone();
        skip.insert(dest.clone());
        if let Some((at, id)) = view.known(category, object, here, &skip) {
            if at == *here {
                return Action::Call(ToolCall::pick(&id));
            }
            return go(view, here, &at);
        }
    }
    let order = if view.config.spatial {
        let mut c = view.candidates(category, here);
        if let Some(s) = source {
            c.retain(|x| x != s);
            c.insert(0, s.clone());
        }
        c
    } else {
        scratch.sweep.clone()
    };
    let next = order.into_iter().find(|c| c != dest && !scratch.visited.contains(c));
    match next {
        None => Action::Fail(FailureCause::NotFound { category: category.to_owned() }),
        Some(c) if c == *here => Action::Call(ToolCall::detect(category)),
        Some(c) => go(view, here, &c),
    }
}

/// Folds a tool outcome into the subtask's notes. Returns true when the
/// call finished the robot's role.
pub fn observe(rt: &mut SubtaskRuntime, here: &NodeId, role: usize, call: &ToolCall, outcome: &ToolOutcome) -> bool {
    let roles = rt.subtask.intent.roles();
    let last = role + 1 == roles;
    let s = &mut rt.scratch;
    if outcome.status == ToolStatus::Ok {
        s.retry = None;
    }
    let target = |intent: &Intent| -> Option<(String, Option<ObjectId>)> {
        match intent {
            Intent::Fetch { category, object, .. } => Some((category.clone(), object.clone())),
            Intent::Pack { item, .. } => Some((item.clone(), None)),
            Intent::Assemble { .. } => None,
        }
    };
    match (call.tool.as_str(), outcome.status) {
        ("detect", ToolStatus::Ok) => {
            let category = call.args.get("category").cloned().unwrap_or_default();
            if let Intent::Pack { container, .. } = &rt.subtask.intent {
                if *container == category && s.container.is_none() {
                    s.container = outcome.found.first().cloned();
                    return false;
                }
            }
            let wanted = target(&rt.subtask.intent).and_then(|(_, o)| o);
            let hit = match wanted {
                Some(id) => outcome.found.iter().find(|f| **f == id).cloned(),
                None => outcome.found.first().cloned(),
            };
            match hit {
                Some(id) => s.found = Some((here.clone(), id)),
                None => {
                    s.visited.insert(here.clone());
                }
            }
            false
        }
        ("detect", ToolStatus::Fail) if outcome.feedback.starts_with("NOT_DETECTED") => {
            s.visited.insert(here.clone());
            false
        }
        ("pick", ToolStatus::Ok) => {
            s.found = None;
            false
        }
        ("pick", ToolStatus::Fail) if outcome.feedback.starts_with("NOT_FOUND") => {
            s.found = None;
            false
        }
        ("open", ToolStatus::Ok) => {
            s.container_open = true;
            true
        }
        ("assemble", ToolStatus::Ok) => {
            s.product = outcome.found.first().cloned();
            !last || roles == 1
        }
        ("place", ToolStatus::Ok) => {
            let placed = outcome.spatial.iter().find_map(|d| match d {
                SpatialDelta::Add { node, .. } => Some(node),
                _ => None,
            });
            let Some(placed) = placed else { return false };
            let target = call.args.get("target").map(String::as_str);
            match &rt.subtask.intent {
                Intent::Fetch { category, object, dest, .. } => {
                    target == Some(dest.as_str()) && matches(placed, category, object.as_ref())
                }
                Intent::Assemble { dest, .. } => last && target == Some(dest.as_str()) && s.product.as_ref() == Some(&placed.id),
                Intent::Pack { item, .. } => last && call.args.contains_key("into") && placed.category() == item,
            }
        }
        _ => false,
    }
}
