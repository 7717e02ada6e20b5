//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{Vector2, Vector3};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use stemos::embodiment::{Availability, EmbodimentDelta, Location, ProfilePatch, RegistryParams, Resources, RobotProfile};
use stemos::geo::{CameraIntrinsics, Correspondence3D2D, MapProjection, RigidTransform};
use stemos::ids::{NodeId, ObjectId, RobotId, TaskId};
use stemos::orchestrator::{SubtaskRuntime, SubtaskState, TaskRuntime, TaskStatus};
use stemos::planner::{GlobalTask, Intent, Subtask, Template};
use stemos::spatial::{CarrierAttrs, ObjectGraph, ObjectNode, PredicateParams, Relation, SpatialDelta, TreeEdit};
use stemos::stem::{Event, MemoryState, ToolCallRecord, ToolStatus};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn m0() -> MemoryState {
    MemoryState::initial(PredicateParams::default(), RegistryParams::default())
}

fn random_pose(r: &mut ChaCha8Rng) -> RigidTransform {
    let yaw = r.random_range(-3.0..3.0);
    RigidTransform::from_yaw(yaw, Vector3::new(r.random_range(-0.6..0.6), r.random_range(-0.6..0.6), r.random_range(0.0..0.4)))
}

fn random_half(r: &mut ChaCha8Rng) -> [f64; 3] {
    [r.random_range(0.02..0.2), r.random_range(0.02..0.2), r.random_range(0.02..0.2)]
}

fn record(r: &mut ChaCha8Rng, robot: Option<&RobotId>) -> ToolCallRecord {
    let tool = ["navigate", "detect", "pick", "place", "open"].choose(r).copied().unwrap_or("detect");
    let mut args = BTreeMap::new();
    if let Some(id) = robot {
        args.insert("robot".to_owned(), id.0.clone());
    }
    args.insert("n".to_owned(), r.random_range(0..100u32).to_string());
    if r.random_bool(0.3) {
        ToolCallRecord::new(tool, args, ToolStatus::Fail, "NOT_FOUND: nothing there")
    } else {
        ToolCallRecord::new(tool, args, ToolStatus::Ok, "done")
    }
}

/// A candidate event body against the current state. It may still be
/// rejected by the fold; the caller only keeps events that apply.
fn candidate(r: &mut ChaCha8Rng, s: &MemoryState, counter: &mut u64) -> Event {
    *counter += 1;
    let n = *counter;
    let tree = &s.spatial.tree;
    let regions: Vec<NodeId> = tree.regions().map(|x| x.id.clone()).collect();
    let carriers: Vec<NodeId> = tree.carriers().map(|x| x.id.clone()).collect();
    let objects: Vec<(NodeId, ObjectId)> = tree.objects().map(|(c, o)| (c.clone(), o.id.clone())).collect();
    let robots: Vec<RobotId> = s.embodiment.robots.keys().cloned().collect();
    let e = Event::new(0, 0);
    match r.random_range(0..14) {
        0 if regions.len() < 4 => e.with_spatial(SpatialDelta::TreeEdit(TreeEdit::AddRegion {
            id: NodeId::new(format!("room{n}")),
            name: format!("room{n}"),
            position: [r.random_range(-10.0..10.0), r.random_range(-10.0..10.0)],
            media: vec![],
        })),
        1 | 0 if !regions.is_empty() && carriers.len() < 8 => e.with_spatial(SpatialDelta::TreeEdit(TreeEdit::AddCarrier {
            id: NodeId::new(format!("table{n}")),
            region: regions.choose(r).cloned().expect("non-empty"),
            name: format!("table{n}"),
            position: [r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)],
            attrs: CarrierAttrs { surface: [0.8, 0.6], enclosed: r.random_bool(0.2), storage: BTreeSet::new() },
        })),
        2 | 3 if !carriers.is_empty() => {
            let node = ObjectNode::new(format!("obj{n}"), ["cup", "plate", "apple"].choose(r).copied().expect("c"), random_half(r), random_pose(r));
            e.with_spatial(SpatialDelta::Add { carrier: carriers.choose(r).cloned().expect("non-empty"), node })
        }
        4 if !objects.is_empty() => {
            let (carrier, object) = objects.choose(r).cloned().expect("non-empty");
            e.with_spatial(SpatialDelta::Remove { carrier, object })
        }
        5 | 6 if !objects.is_empty() => {
            let (carrier, object) = objects.choose(r).cloned().expect("non-empty");
            let delta = RigidTransform::from_yaw(r.random_range(-0.5..0.5), Vector3::new(r.random_range(-0.2..0.2), r.random_range(-0.2..0.2), 0.0));
            e.with_spatial(SpatialDelta::Move { carrier, object, delta })
        }
        7 if !objects.is_empty() => {
            let (carrier, object) = objects.choose(r).cloned().expect("non-empty");
            let value = r.random_bool(0.7).then(|| ["true", "false"].choose(r).copied().expect("v").to_owned());
            e.with_spatial(SpatialDelta::SetState { carrier, object, key: "open".into(), value })
        }
        8 if !regions.is_empty() && robots.len() < 4 => {
            let loc = regions.choose(r).cloned().expect("non-empty");
            let profile = RobotProfile::new(format!("r{n}"), "wheeled", loc, [0.0, 0.0], &["navigate", "detect", "grasp"]);
            match s.embodiment.register_robot(profile, tree) {
                Ok(d) => e.with_embodiment(d),
                Err(_) => e.with_tool(record(r, None)),
            }
        }
        9 if !robots.is_empty() => {
            let robot = robots.choose(r).cloned().expect("non-empty");
            let last = s.embodiment.robots[&robot].last_heartbeat;
            let patch = ProfilePatch {
                heartbeat: Some(last + r.random_range(0..5)),
                resources: Some(Resources { battery: r.random_range(0.0..100.0), cpu: r.random_range(0.0..100.0), net: 100.0 }),
                ..ProfilePatch::default()
            };
            e.with_embodiment(EmbodimentDelta::update(robot, patch))
        }
        10 if !robots.is_empty() => {
            let robot = robots.choose(r).cloned().expect("non-empty");
            let a = [Availability::Idle, Availability::Busy, Availability::Offline].choose(r).copied().expect("a");
            e.with_embodiment(EmbodimentDelta::update(robot, ProfilePatch::availability(a)))
        }
        11 if !robots.is_empty() && !(regions.is_empty() && carriers.is_empty()) => {
            let robot = robots.choose(r).cloned().expect("non-empty");
            let node = regions.iter().chain(&carriers).collect::<Vec<_>>().choose(r).map(|n| (*n).clone()).expect("non-empty");
            let patch = ProfilePatch { location: Some(Location { node, position: [r.random_range(-5.0..5.0), 0.5] }), ..ProfilePatch::default() };
            e.with_embodiment(EmbodimentDelta::update(robot.clone(), patch)).with_tool(record(r, Some(&robot)))
        }
        12 if !robots.is_empty() && !objects.is_empty() => {
            // A pick: the object leaves its carrier and enters the inventory.
            let robot = robots.choose(r).cloned().expect("non-empty");
            let (carrier, object) = objects.choose(r).cloned().expect("non-empty");
            let node = tree.graph(&carrier).expect("carrier").get(&object).cloned().expect("object");
            let mut inventory = s.embodiment.robots[&robot].inventory.clone();
            inventory.push(node);
            e.with_spatial(SpatialDelta::Remove { carrier, object })
                .with_embodiment(EmbodimentDelta::update(robot.clone(), ProfilePatch { inventory: Some(inventory), ..ProfilePatch::default() }))
                .with_tool(record(r, Some(&robot)))
        }
        _ => {
            let robot = robots.choose(r).cloned();
            e.with_tool(record(r, robot.as_ref()))
                .with_task(r.random_bool(0.5).then(|| TaskId::new(format!("t{}", r.random_range(1..4)))))
        }
    }
}

/// A random event script of exactly `len` events, each valid against the
/// fold of its predecessors from M0. Also returns the state the generator
/// built step by step.
pub fn event_script(seed: u64, len: usize) -> (Vec<Event>, MemoryState) {
    let mut r = rng(seed);
    let mut state = m0();
    let mut out = Vec::with_capacity(len);
    let mut counter = 0;
    let mut tau = 0;
    while out.len() < len {
        let mut e = candidate(&mut r, &state, &mut counter);
        tau += r.random_range(0..3);
        e.seq = state.version + 1;
        e.tau = tau;
        if r.random_bool(0.1) {
            e.pre_subtask_queue = vec![format!("sub{}", r.random_range(0..5))];
        }
        if state.apply_mut(&e).is_ok() {
            out.push(e);
        }
    }
    (out, state)
}

// Relation oracle ------------------------------------------------------------

/// Axis-aligned world box of a posed box from its eight corners.
fn corner_box(pose: &RigidTransform, half: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                let p = pose.apply(&Vector3::new(sx * half[0], sy * half[1], sz * half[2]));
                for i in 0..3 {
                    lo[i] = lo[i].min(p[i]);
                    hi[i] = hi[i].max(p[i]);
                }
            }
        }
    }
    (lo, hi)
}

fn overlap(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.1.min(b.1) - a.0.max(b.0)).max(0.0)
}

/// Center and world box of a posed object.
pub struct Solid {
    c: Vector3<f64>,
    lo: [f64; 3],
    hi: [f64; 3],
}

pub fn solid(n: &ObjectNode) -> Solid {
    let (lo, hi) = corner_box(&n.pose, &n.intrinsics.half_extents);
    Solid { c: n.pose.translation, lo, hi }
}

/// Written from the predicate definitions, not from the library code.
pub fn oracle_holds(rel: Relation, a: &Solid, b: &Solid, p: &PredicateParams) -> bool {
    let (ca, cb) = (a.c, b.c);
    let (dx, dy) = (cb.x - ca.x, cb.y - ca.y);
    match rel {
        Relation::Near => ((ca.x - cb.x).powi(2) + (ca.y - cb.y).powi(2) + (ca.z - cb.z).powi(2)).sqrt() <= p.near_radius,
        Relation::Left => dx > dy.abs() && dx > p.direction_margin,
        Relation::Right => -dx > dy.abs() && -dx > p.direction_margin,
        Relation::Front => dy > dx.abs() && dy > p.direction_margin,
        Relation::Back => -dy > dx.abs() && -dy > p.direction_margin,
        Relation::On => {
            let area = (a.hi[0] - a.lo[0]) * (a.hi[1] - a.lo[1]);
            let shared = overlap((a.lo[0], a.hi[0]), (b.lo[0], b.hi[0])) * overlap((a.lo[1], a.hi[1]), (b.lo[1], b.hi[1]));
            ca.z > cb.z && (a.lo[2] - b.hi[2]).abs() <= p.z_tolerance && area > 0.0 && shared >= p.on_overlap * area
        }
        Relation::In => (0..3).all(|i| {
            let lo = b.lo[i] + p.in_shrink;
            let hi = b.hi[i] - p.in_shrink;
            lo < hi && a.lo[i] >= lo && a.hi[i] <= hi
        }),
    }
}

/// All-pairs evaluation as `(subject, relation, object)` triples.
pub fn brute_force_edges(g: &ObjectGraph, p: &PredicateParams) -> BTreeSet<(ObjectId, Relation, ObjectId)> {
    let solids: Vec<(&ObjectId, Solid)> = g.nodes.values().map(|n| (&n.id, solid(n))).collect();
    let mut out = BTreeSet::new();
    for (ia, a) in &solids {
        for (ib, b) in &solids {
            if ia == ib {
                continue;
            }
            for rel in Relation::ALL {
                if oracle_holds(rel, a, b, p) {
                    out.insert(((*ia).clone(), rel, (*ib).clone()));
                }
            }
        }
    }
    out
}

pub fn edge_set(g: &ObjectGraph) -> BTreeSet<(ObjectId, Relation, ObjectId)> {
    g.edges.iter().map(|e| (e.subject.clone(), e.relation, e.object.clone())).collect()
}

/// Object poses that favour contact: stacks, nesting and near misses as
/// well as free placement.
fn graph_pose(r: &mut ChaCha8Rng, g: &ObjectGraph, half: &[f64; 3]) -> RigidTransform {
    let existing: Vec<&ObjectNode> = g.nodes.values().collect();
    match (r.random_range(0..4), existing.choose(r)) {
        (0, Some(base)) => {
            let t = base.pose.translation;
            // Poses are yaw-only, so the box top is center plus half height.
            let top = t.z + base.intrinsics.half_extents[2];
            RigidTransform::from_translation(Vector3::new(t.x + r.random_range(-0.05..0.05), t.y + r.random_range(-0.05..0.05), top + half[2] + r.random_range(-0.015..0.015)))
        }
        (1, Some(base)) => RigidTransform::from_translation(base.pose.translation + Vector3::new(r.random_range(-0.01..0.01), r.random_range(-0.01..0.01), r.random_range(-0.01..0.01))),
        _ => random_pose(r),
    }
}

/// Operation on a graph in a random edit sequence.
#[derive(Debug, Clone)]
pub enum GraphOp {
    Add(ObjectNode),
    Remove(ObjectId),
    Move(ObjectId, RigidTransform),
}

/// Random add/remove/move sequence that keeps at most `max_nodes` objects.
pub fn graph_ops(seed: u64, max_nodes: usize, len: usize, params: &PredicateParams) -> Vec<GraphOp> {
    let mut r = rng(seed);
    let mut shadow = ObjectGraph::new();
    let mut ops = Vec::new();
    for k in 0..len {
        let ids: Vec<ObjectId> = shadow.nodes.keys().cloned().collect();
        let op = match r.random_range(0..5) {
            0 | 1 if shadow.len() < max_nodes => {
                let half = random_half(&mut r);
                let pose = graph_pose(&mut r, &shadow, &half);
                GraphOp::Add(ObjectNode::new(format!("o{k}"), "thing", half, pose))
            }
            2 if !ids.is_empty() => GraphOp::Remove(ids.choose(&mut r).cloned().expect("non-empty")),
            _ if !ids.is_empty() => {
                let id = ids.choose(&mut r).cloned().expect("non-empty");
                let delta = if r.random_bool(0.2) {
                    RigidTransform::from_translation(Vector3::new(10.0, 0.0, 0.0))
                } else {
                    RigidTransform::from_yaw(r.random_range(-1.0..1.0), Vector3::new(r.random_range(-0.3..0.3), r.random_range(-0.3..0.3), r.random_range(-0.05..0.05)))
                };
                GraphOp::Move(id, delta)
            }
            _ => {
                let half = random_half(&mut r);
                GraphOp::Add(ObjectNode::new(format!("o{k}"), "thing", half, random_pose(&mut r)))
            }
        };
        apply_op(&mut shadow, &op, params);
        ops.push(op);
    }
    ops
}

pub fn apply_op(g: &mut ObjectGraph, op: &GraphOp, params: &PredicateParams) {
    match op {
        GraphOp::Add(n) => g.insert(n.clone(), params).expect("fresh id"),
        GraphOp::Remove(id) => {
            g.remove(id).expect("present");
        }
        GraphOp::Move(id, d) => g.move_by(id, d, params).expect("present"),
    }
}

// Scheduling ------------------------------------------------------------------

pub const ROBOTS: [&str; 6] = ["r1", "r2", "r3", "r4", "r5", "r6"];

/// A task with a random layered workflow graph over the robot pool.
pub fn random_task(r: &mut ChaCha8Rng, id: &str) -> TaskRuntime {
    let task = GlobalTask {
        id: TaskId::new(id),
        instruction: "bring the cup to the table".into(),
        template: Template::Fetch,
        arrival: 0,
        goal: vec![],
    };
    let mut rt = TaskRuntime::new(task, 0, 0);
    rt.status = TaskStatus::Active;
    let depth = r.random_range(1..=4);
    let mut index = 0;
    for d in 1..=depth {
        for _ in 0..r.random_range(1..=3) {
            let k = if r.random_bool(0.25) { 2 } else { 1 };
            let robots: Vec<RobotId> = ROBOTS.choose_multiple(r, k).map(|s| RobotId::new(*s)).collect();
            let subtask = Subtask {
                description: format!("step {index}"),
                depth: d,
                robots,
                intent: Intent::Fetch { category: "cup".into(), object: None, source: None, dest: NodeId::new("table") },
            };
            rt.subtasks.push(SubtaskRuntime::new(rt.task.id.clone(), index, subtask, 10));
            index += 1;
        }
    }
    rt
}

/// Outcome counters of one simulated schedule.
#[derive(Debug, Default)]
pub struct ScheduleRun {
    pub violations: usize,
    pub orphans: usize,
    pub dispatched: usize,
}

/// Drives random tasks through the scheduler with random robot
/// availability and random subtask outcomes, auditing after every pass.
pub fn simulate_schedule(seed: u64) -> ScheduleRun {
    use stemos::orchestrator::{audit_conservation, audit_running, step_scheduler};
    let mut r = rng(seed);
    let mut tasks: Vec<TaskRuntime> = (0..r.random_range(1..=4)).map(|i| random_task(&mut r, &format!("t{i}"))).collect();
    let mut out = ScheduleRun::default();
    for now in 1..=500 {
        let offline: BTreeSet<RobotId> = ROBOTS.iter().filter(|_| r.random_bool(0.2)).map(|s| RobotId::new(*s)).collect();
        let mut busy: BTreeSet<RobotId> = tasks
            .iter()
            .flat_map(|t| t.subtasks.iter().filter(|s| s.state == SubtaskState::Running).flat_map(|s| s.robots().to_vec()))
            .collect();
        for d in step_scheduler(now, &mut tasks, &mut busy, |id| !offline.contains(id)) {
            out.dispatched += d.batch.len();
        }
        out.violations += audit_running(&tasks).len();
        for t in tasks.iter_mut().filter(|t| t.is_open()) {
            let mut failed = false;
            for s in t.subtasks.iter_mut().filter(|s| s.state == SubtaskState::Running) {
                match r.random_range(0..10) {
                    0..=3 => s.state = SubtaskState::Done,
                    4 => {
                        s.state = SubtaskState::Failed;
                        failed = true;
                    }
                    _ => {}
                }
            }
            if failed {
                for s in t.subtasks.iter_mut().filter(|s| !s.state.is_terminal()) {
                    s.state = SubtaskState::Failed;
                }
                t.status = TaskStatus::Failed;
            } else if t.all_done() {
                t.status = TaskStatus::Completed;
            }
        }
        out.violations += audit_running(&tasks).len();
        if tasks.iter().all(|t| !t.is_open()) {
            break;
        }
    }
    for t in tasks.iter_mut().filter(|t| t.is_open()) {
        for s in t.subtasks.iter_mut().filter(|s| !s.state.is_terminal()) {
            s.state = SubtaskState::Failed;
        }
        t.status = TaskStatus::Failed;
    }
    out.orphans = audit_conservation(&tasks).len();
    out
}

// Alignment scenes ------------------------------------------------------------

pub fn random_rotation(r: &mut ChaCha8Rng, max_angle: f64) -> RigidTransform {
    let axis = Vector3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)).normalize();
    let angle = r.random_range(0.0..max_angle);
    RigidTransform::from_axis_angle(&(axis * angle), Vector3::zeros())
}

/// A non-planar point cloud of `n` points in a 4 m box.
pub fn cloud(r: &mut ChaCha8Rng, n: usize) -> Vec<Vector3<f64>> {
    (0..n).map(|_| Vector3::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0), r.random_range(-1.0..1.0))).collect()
}

/// Ground-truth map pose: mostly yaw, a little tilt, planar offset.
pub fn map_pose(r: &mut ChaCha8Rng) -> RigidTransform {
    let yaw = RigidTransform::from_yaw(r.random_range(-1.0..1.0), Vector3::new(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0), 0.0));
    let tilt = RigidTransform::from_axis_angle(&Vector3::new(r.random_range(-0.1..0.1), r.random_range(-0.1..0.1), 0.0), Vector3::zeros());
    yaw.compose(&tilt)
}

pub fn map_targets(points: &[Vector3<f64>], proj: &MapProjection, truth: &RigidTransform, noise: Option<(&mut ChaCha8Rng, f64)>) -> Vec<Vector2<f64>> {
    let mut targets: Vec<Vector2<f64>> = points.iter().map(|p| {
        let q = truth.apply(p);
        Vector2::new(proj.scale * q.x + proj.offset[0], proj.scale * q.y + proj.offset[1])
    }).collect();
    if let Some((r, sigma)) = noise {
        let n = Normal::new(0.0, sigma).expect("sigma");
        for t in &mut targets {
            t.x += n.sample(r);
            t.y += n.sample(r);
        }
    }
    targets
}

pub fn camera() -> CameraIntrinsics {
    CameraIntrinsics { fx: 525.0, fy: 525.0, cx: 320.0, cy: 240.0 }
}

/// Points in front of a camera at `pose` rendered to pixels with the
/// pinhole model written out directly.
pub fn render(r: &mut ChaCha8Rng, n: usize, pose: &RigidTransform, k: &CameraIntrinsics, sigma: f64) -> Vec<Correspondence3D2D> {
    let noise = Normal::new(0.0, sigma.max(1e-300)).expect("sigma");
    let inv = pose.inverse();
    (0..n)
        .map(|_| {
            let xc = Vector3::new(r.random_range(-1.5..1.5), r.random_range(-1.0..1.0), r.random_range(3.0..7.0));
            let x = inv.apply(&xc);
            let mut u = Vector2::new(k.fx * xc.x / xc.z + k.cx, k.fy * xc.y / xc.z + k.cy);
            if sigma > 0.0 {
                u.x += noise.sample(r);
                u.y += noise.sample(r);
            }
            Correspondence3D2D::new(x, u)
        })
        .collect()
}

/// Central finite differences of `f` under left increments of `t`,
/// returned column by column.
pub fn fd_jacobian(t: &RigidTransform, h: f64, f: impl Fn(&RigidTransform) -> Vec<f64>) -> Vec<Vec<f64>> {
    (0..6)
        .map(|k| {
            let mut plus = [0.0; 6];
            let mut minus = [0.0; 6];
            plus[k] = h;
            minus[k] = -h;
            let (a, b) = (f(&t.retract(&plus)), f(&t.retract(&minus)));
            a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect()
        })
        .collect()
}

/// Largest entrywise error relative to the Jacobian's scale.
pub fn jacobian_error(analytic: &nalgebra::DMatrix<f64>, numeric: &[Vec<f64>]) -> f64 {
    let scale = analytic.amax().max(1.0);
    let mut worst: f64 = 0.0;
    for (k, col) in numeric.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            worst = worst.max((analytic[(i, k)] - v).abs() / scale);
        }
    }
    worst
}

// Metrics ---------------------------------------------------------------------

/// Published (SR %, AEST, SS) rows.
pub const PUBLISHED: [(f64, f64, f64); 6] =
    [(76.6, 34.8, 2.20), (69.7, 8.5, 8.20), (70.7, 10.5, 6.73), (89.2, 11.6, 7.69), (24.2, 58.1, 0.42), (38.3, 8.7, 4.40)];

/// Task records with exactly `sr` percent completed over 10 000 tasks and
/// `aest` mean steps over the completed ones.
pub fn synthetic_report(sr: f64, aest: f64) -> stemos::metrics::RunReport {
    use stemos::metrics::{RunReport, TaskRecord};
    let n = 10_000usize;
    let done = (sr * 100.0).round() as usize;
    let total = (aest * done as f64).round() as u64;
    let base = total / done as u64;
    let extra = (total % done as u64) as usize;
    let tasks = (0..n)
        .map(|i| TaskRecord {
            task: TaskId::new(format!("t{i}")),
            cell: "published".into(),
            sq_index: 1,
            is_final: true,
            completed: i < done,
            steps: if i < done { (base + u64::from(i < extra)) as u32 } else { 40 },
            cause: (i >= done).then(|| "GOAL_UNMET".to_owned()),
        })
        .collect();
    RunReport { scenario: "published".into(), arm: "-".into(), seed: 0, tasks, error: None }
}
