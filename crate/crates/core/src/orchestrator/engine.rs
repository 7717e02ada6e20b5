use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use super::agent::{next_action, observe, sweep_order, Action, AgentView};
use super::config::{EmbodimentMode, RunConfig};
use super::monitor::{commit, reconcile};
use super::runtime::{FailureCause, SubtaskRuntime, SubtaskState, TaskRuntime, TaskStatus};
use super::scheduler::{step_scheduler, DispatchDecision};
use super::trace::TraceLine;
use crate::embodiment::{Availability, EmbodimentDelta, EmbodimentError, HeartbeatStatus, ProfilePatch, Resources};
use crate::ids::{RobotId, TaskId, Tick};
use crate::planner::{rank_robots, HallucinatingPlanner, Intent, PlanError, Planner, PlannerContext, RulePlanner, RuleSet, WorkflowGraph};
use crate::sim::{catalog, FaultError, FaultMode, Scenario, TaskSpec, ToolCall, World, WorldError};
use crate::spatial::{build_observed_tree, SpatialDelta, SpatialError, TreeEdit};
use crate::stem::{all_regions, build_digest, DigestScope, MemoryState, RobotSummary, StemError, ToolCallRecord, ToolStatus};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Fault(#[from] FaultError),
    #[error(transparent)]
    Memory(#[from] StemError),
    #[error(transparent)]
    Embodiment(#[from] EmbodimentError),
    #[error("world: {0}")]
    Spatial(#[from] SpatialError),
}

/// Everything a finished run leaves behind.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trace: Vec<TraceLine>,
    pub memory: MemoryState,
    pub tasks: Vec<TaskRuntime>,
    pub dispatches: Vec<DispatchDecision>,
    pub ticks: Tick,
    /// Object conservation held at the end of the run.
    pub conserved: bool,
}

/// Reassignments per task before falling back to a new plan.
const MAX_REASSIGNMENTS: u32 = 4;

/// Drives one scenario: planner, scheduler, agents and monitor around a
/// simulated world, one tick at a time.
pub struct Engine {
    pub config: RunConfig,
    pub world: World,
    pub memory: MemoryState,
    pub rules: RuleSet,
    planner: Box<dyn Planner>,
    pub tasks: Vec<TaskRuntime>,
    queue: VecDeque<TaskSpec>,
    meta: BTreeMap<TaskId, (u32, bool)>,
    /// Roster as registered at start-up.
    roster: Vec<RobotSummary>,
    busy: BTreeSet<RobotId>,
    pub trace: Vec<TraceLine>,
    pub dispatches: Vec<DispatchDecision>,
    cell: String,
    horizon: u64,
}

fn mix(seed: u64, parts: &[&str]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ seed;
    for p in parts {
        for b in p.bytes().chain([0xff]) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x100_0000_01b3);
        }
    }
    h
}

impl Engine {
    /// Engine with the rule planner, wrapped in the hallucination fixture
    /// when the scenario injects E3.
    pub fn new(scenario: &Scenario, config: RunConfig) -> Result<Self, EngineError> {
        let planner: Box<dyn Planner> = match &scenario.fault {
            Some(f) if f.mode == FaultMode::E3 => {
                let seed = mix(config.seed, &["planner", &scenario.name]);
                match f.task() {
                    Some(t) => Box::new(HallucinatingPlanner::for_task(RulePlanner, seed, t.clone())),
                    None => Box::new(HallucinatingPlanner::new(RulePlanner, seed)),
                }
            }
            _ => Box::new(RulePlanner),
        };
        Self::with_planner(scenario, config, planner)
    }

    pub fn with_planner(scenario: &Scenario, config: RunConfig, planner: Box<dyn Planner>) -> Result<Self, EngineError> {
        let spec = scenario.world.resolve();
        let mut world = World::new(spec.clone(), &scenario.robots, config.registry)?;
        if let Some(f) = &scenario.fault {
            world.inject_fault(f.clone())?;
        }
        let mut memory = MemoryState::initial(spec.params, config.registry);

        // Initial memory: the floor plan and whatever is visible without opening anything.
        let observed = build_observed_tree(&spec)?;
        let mut deltas = vec![SpatialDelta::TreeEdit(TreeEdit::SetMedia { id: observed.root.clone(), media: spec.root_media.clone() })];
        for r in &spec.regions {
            deltas.push(SpatialDelta::TreeEdit(TreeEdit::AddRegion {
                id: r.id.clone(),
                name: r.name.clone(),
                position: r.position,
                media: r.media.clone(),
            }));
        }
        for c in &spec.carriers {
            deltas.push(SpatialDelta::TreeEdit(TreeEdit::AddCarrier {
                id: c.id.clone(),
                region: c.region.clone(),
                name: c.name.clone(),
                position: c.position,
                attrs: spec.carrier_attrs(c),
            }));
        }
        for (carrier, o) in observed.objects() {
            deltas.push(SpatialDelta::Add { carrier: carrier.clone(), node: o.clone() });
        }
        commit(&mut memory, 0, None, Vec::new(), deltas, Vec::new())?;
        let mut reg = Vec::new();
        for body in world.bodies.values() {
            let d = memory.embodiment.register_robot(body.profile(), &memory.spatial.tree)?;
            reg.push(d);
        }
        commit(&mut memory, 0, None, Vec::new(), Vec::new(), reg)?;
        let roster = build_digest(&memory, &DigestScope::default()).robots;

        let meta = scenario.tasks.iter().map(|t| (t.task.id.clone(), (t.sq_index, t.is_final))).collect();
        Ok(Self {
            config,
            rules: RuleSet::for_world(&spec),
            world,
            memory,
            planner,
            tasks: Vec::new(),
            queue: scenario.tasks.iter().cloned().collect(),
            meta,
            roster,
            busy: BTreeSet::new(),
            trace: Vec::new(),
            dispatches: Vec::new(),
            cell: scenario.cell.clone(),
            horizon: 0,
        })
    }

    pub fn now(&self) -> Tick {
        self.world.tick
    }

    /// Runs until every task has ended or `max_ticks` pass.
    pub fn run(mut self, max_ticks: Tick) -> Result<RunOutcome, EngineError> {
        while (!self.queue.is_empty() || self.tasks.iter().any(TaskRuntime::is_open)) && self.now() < max_ticks {
            self.step()?;
        }
        let now = self.now();
        for t in 0..self.tasks.len() {
            if self.tasks[t].is_open() {
                self.finish(t, Some(FailureCause::Deadline), now);
            }
        }
        Ok(RunOutcome {
            conserved: self.world.conserved(),
            ticks: now,
            trace: self.trace,
            memory: self.memory,
            tasks: self.tasks,
            dispatches: self.dispatches,
        })
    }

    /// Default tick cap for a scenario: every task may use its full deadline.
    pub fn tick_cap(&self) -> Tick {
        let arrivals = self.queue.iter().map(|t| t.task.arrival).max().unwrap_or(0);
        arrivals + (self.queue.len() as Tick + 1) * (self.config.budgets.ticks + 1)
    }

    /// One tick: faults and heartbeats, arrivals, liveness, deadlines,
    /// dispatch, then one action per working robot.
    pub fn step(&mut self) -> Result<(), EngineError> {
        let report = self.world.advance_tick();
        let now = report.tick;
        for f in report.faults {
            self.trace.push(TraceLine::Fault { tick: now, fault: f });
        }
        self.refresh_busy();
        let mut beats = Vec::new();
        for r in &report.heartbeats {
            let claim = if self.busy.contains(r) { Availability::Busy } else { Availability::Idle };
            let status = HeartbeatStatus { robot: r.clone(), tick: now, resources: Resources::default(), sensors: BTreeMap::new(), claim };
            beats.push(self.memory.embodiment.heartbeat(&status)?);
        }
        commit(&mut self.memory, now, None, Vec::new(), Vec::new(), beats)?;
        let silent = self.memory.embodiment.sweep_offline(now);
        commit(&mut self.memory, now, None, Vec::new(), Vec::new(), silent)?;

        self.admit(now);
        if self.config.memory.embodiment == EmbodimentMode::Live {
            self.check_liveness(now);
        }
        for t in 0..self.tasks.len() {
            if self.tasks[t].is_open() && now.saturating_sub(self.tasks[t].started) > self.config.budgets.ticks {
                self.finish(t, Some(FailureCause::Deadline), now);
            }
        }
        self.settle(now);
        self.dispatch(now)?;
        self.act(now)?;
        self.settle(now);
        self.refresh_busy();
        self.sync_availability(now)?;
        Ok(())
    }

    fn refresh_busy(&mut self) {
        self.busy = self
            .tasks
            .iter()
            .filter(|t| t.is_open())
            .flat_map(|t| t.subtasks.iter().filter(|s| s.state == SubtaskState::Running))
            .flat_map(|s| s.robots().iter().cloned())
            .collect();
    }

    /// Keeps registry availability in line with the busy set; OFFLINE is
    /// left to heartbeats.
    fn sync_availability(&mut self, now: Tick) -> Result<(), EngineError> {
        let deltas: Vec<EmbodimentDelta> = self
            .memory
            .embodiment
            .robots
            .values()
            .filter(|p| p.availability != Availability::Offline)
            .filter_map(|p| {
                let want = if self.busy.contains(&p.id) { Availability::Busy } else { Availability::Idle };
                (p.availability != want).then(|| EmbodimentDelta::update(p.id.clone(), ProfilePatch::availability(want)))
            })
            .collect();
        commit(&mut self.memory, now, None, Vec::new(), Vec::new(), deltas)?;
        Ok(())
    }

    fn admit(&mut self, now: Tick) {
        while let Some(next) = self.queue.front() {
            let blocked = next.after_previous && self.tasks.iter().any(TaskRuntime::is_open);
            if next.task.arrival > now || blocked {
                break;
            }
            let spec = self.queue.pop_front().expect("front exists");
            if spec.sq_index <= 1 {
                self.horizon = self.memory.version;
            }
            let mut rt = TaskRuntime::new(spec.task.clone(), now, self.horizon);
            rt.status = TaskStatus::Active;
            self.trace.push(TraceLine::TaskStart {
                tick: now,
                task: spec.task.id.clone(),
                instruction: spec.task.instruction.clone(),
                sq_index: spec.sq_index,
                is_final: spec.is_final,
                cell: self.cell.clone(),
            });
            self.tasks.push(rt);
            let t = self.tasks.len() - 1;
            if let Err(cause) = self.plan(t, now) {
                self.finish(t, Some(cause), now);
            }
        }
    }

    /// Planner input under the configured memory visibility.
    pub fn context(&self, t: usize) -> PlannerContext {
        let task = &self.tasks[t];
        let scope = DigestScope {
            task: Some(task.task.id.clone()),
            regions: all_regions(&self.memory),
            history: self.config.history,
            since: task.horizon,
        };
        let d = build_digest(&self.memory, &scope);
        let m = &self.config.memory;
        PlannerContext {
            task: task.task.id.clone(),
            spatial: if m.spatial { d.spatial } else { Vec::new() },
            temporal: if m.temporal { d.temporal } else { Vec::new() },
            moves: if m.temporal { d.moves } else { Vec::new() },
            robots: match m.embodiment {
                EmbodimentMode::Live => d.robots,
                EmbodimentMode::Static => self.roster.clone(),
                EmbodimentMode::Off => Vec::new(),
            },
            instruction: task.task.instruction.clone(),
            history: m.temporal,
        }
    }

    fn log(&mut self, now: Tick, task: &TaskId, record: ToolCallRecord) {
        // Bookkeeping records cannot conflict with memory; a failure here is a bug.
        commit(&mut self.memory, now, Some(task), vec![record], Vec::new(), Vec::new()).expect("record-only event applies");
    }

    /// Plans task `t`, retrying while validation fails and plans remain.
    fn plan(&mut self, t: usize, now: Tick) -> Result<(), FailureCause> {
        loop {
            let ctx = self.context(t);
            let id = self.tasks[t].task.id.clone();
            self.tasks[t].plans += 1;
            let attempt = self.tasks[t].plans;
            let args = BTreeMap::from([("attempt".to_owned(), attempt.to_string())]);
            match self.planner.decompose(&ctx, &self.rules) {
                Ok(plan) => {
                    let n = plan.graph.subtasks.len();
                    let detail = plan.trace.join("; ");
                    self.log(now, &id, ToolCallRecord::new("planner.decompose", args, ToolStatus::Ok, format!("{n} subtask(s)")));
                    self.trace.push(TraceLine::Plan { tick: now, task: id, attempt, ok: true, detail, subtasks: n });
                    self.install(t, plan.graph);
                    return Ok(());
                }
                Err(PlanError::Hallucination(violations)) => {
                    let detail: Vec<String> = violations.iter().map(|v| v.feedback()).collect();
                    let records = detail
                        .iter()
                        .map(|f| ToolCallRecord::new("planner.validate", args.clone(), ToolStatus::Fail, f.clone()))
                        .collect();
                    commit(&mut self.memory, now, Some(&id), records, Vec::new(), Vec::new()).expect("record-only event applies");
                    let detail = detail.join("; ");
                    self.trace.push(TraceLine::Plan { tick: now, task: id.clone(), attempt, ok: false, detail: detail.clone(), subtasks: 0 });
                    let cause = FailureCause::Hallucination { detail };
                    if attempt > self.config.budgets.replan {
                        return Err(FailureCause::RecoveryExhausted { last: Box::new(cause) });
                    }
                    self.trace.push(TraceLine::Recovery { tick: now, task: id, subtask: None, cause: cause.code().into(), action: "replan".into() });
                }
                Err(e) => {
                    let text = e.to_string();
                    self.log(now, &id, ToolCallRecord::new("planner.decompose", args, ToolStatus::Fail, text.clone()));
                    self.trace.push(TraceLine::Plan { tick: now, task: id, attempt, ok: false, detail: text.clone(), subtasks: 0 });
                    return Err(match e {
                        PlanError::NoCapableRobot { .. } => FailureCause::NoCapableRobot { detail: text },
                        PlanError::UnknownTemplate(_) => FailureCause::UnknownTemplate { detail: text },
                        _ => FailureCause::ToolFailed { feedback: text },
                    });
                }
            }
        }
    }

    /// Appends a plan below everything the task already had; unfinished old
    /// subtasks are superseded.
    fn install(&mut self, t: usize, graph: WorkflowGraph) {
        let task = &mut self.tasks[t];
        let offset = task.max_depth();
        for s in task.subtasks.iter_mut().filter(|s| !s.state.is_terminal()) {
            s.state = SubtaskState::Replanned;
        }
        for mut s in graph.subtasks {
            s.depth += offset;
            let index = task.subtasks.len();
            task.subtasks.push(SubtaskRuntime::new(task.task.id.clone(), index, s, self.config.budgets.tool_calls));
        }
    }

    fn check_liveness(&mut self, now: Tick) {
        let offline = |reg: &crate::embodiment::EmbodimentRegistry, r: &RobotId| {
            reg.get(r).is_some_and(|p| p.availability == Availability::Offline)
        };
        let mut hits = Vec::new();
        for (t, task) in self.tasks.iter().enumerate().filter(|(_, t)| t.is_open()) {
            for s in task.subtasks.iter().filter(|s| matches!(s.state, SubtaskState::Running | SubtaskState::Ready)) {
                if let Some(r) = s.robots().iter().find(|r| offline(&self.memory.embodiment, r)) {
                    hits.push((t, s.index, r.clone()));
                }
            }
        }
        for (t, s, robot) in hits {
            if self.tasks[t].is_open() && !self.tasks[t].subtasks[s].state.is_terminal() {
                self.handle_failure(t, s, FailureCause::Offline { robot }, now);
            }
        }
    }

    /// Roster the orchestrator may recover with.
    fn recovery_roster(&self) -> Vec<RobotSummary> {
        match self.config.memory.embodiment {
            EmbodimentMode::Live => build_digest(&self.memory, &DigestScope::default()).robots,
            EmbodimentMode::Static => self.roster.clone(),
            EmbodimentMode::Off => Vec::new(),
        }
    }

    /// Best replacement for `robot` in subtask `s`, if the roster has one.
    fn replacement(&self, t: usize, s: usize, robot: &RobotId) -> Option<RobotId> {
        let task = &self.tasks[t];
        let sub = &task.subtasks[s];
        let roles = sub.subtask.intent.roles();
        let mut tools: BTreeSet<&str> = BTreeSet::new();
        for role in sub.roles_of(robot) {
            tools.extend(sub.subtask.intent.required(role, roles));
        }
        let tools: Vec<&str> = tools.into_iter().collect();
        let near = sub.subtask.intent.locations().first().map(|n| (*n).clone())?;
        let roster = self.recovery_roster();
        rank_robots(&roster, &tools, &near, &self.rules.map)
            .into_iter()
            .find(|r| r != robot && !task.excluded.contains_key(r) && !sub.robots().contains(r))
    }

    /// Recovery for a failed subtask: swap the robot when the failure is
    /// tied to one, otherwise plan again.
    fn handle_failure(&mut self, t: usize, s: usize, cause: FailureCause, now: Tick) {
        let id = self.tasks[t].task.id.clone();
        {
            let sub = &mut self.tasks[t].subtasks[s];
            sub.state = SubtaskState::Replanned;
            sub.cause = Some(cause.clone());
        }
        let culprit = match &cause {
            FailureCause::Offline { robot } | FailureCause::ToolBroken { robot, .. } => Some(robot.clone()),
            _ => None,
        };
        if let Some(robot) = &culprit {
            self.tasks[t].excluded.insert(robot.clone(), cause.code().to_owned());
        }
        let swap = culprit
            .as_ref()
            .filter(|_| self.tasks[t].reassignments < MAX_REASSIGNMENTS)
            .and_then(|r| self.replacement(t, s, r).map(|n| (r.clone(), n)));
        let action = match &swap {
            Some((old, new)) => format!("reassign {old} -> {new}"),
            None => "replan".to_owned(),
        };
        let args = BTreeMap::from([("subtask".to_owned(), s.to_string()), ("action".to_owned(), action.clone())]);
        let feedback = match &cause {
            FailureCause::Offline { robot } => format!("{}: {robot} stopped reporting", cause.code()),
            FailureCause::ToolBroken { robot, tool } => format!("{}: {tool} on {robot} keeps failing", cause.code()),
            other => format!("{}: {}", other.code(), serde_json::to_string(other).unwrap_or_default()),
        };
        self.log(now, &id, ToolCallRecord::new("monitor.recover", args, ToolStatus::Fail, feedback));
        self.trace.push(TraceLine::Recovery { tick: now, task: id.clone(), subtask: Some(s), cause: cause.code().into(), action });

        match swap {
            Some((old, new)) => {
                let task = &mut self.tasks[t];
                task.reassignments += 1;
                let prev = &task.subtasks[s];
                let mut subtask = prev.subtask.clone();
                for r in subtask.robots.iter_mut().filter(|r| **r == old) {
                    *r = new.clone();
                }
                subtask.robots.dedup();
                let mut copy = SubtaskRuntime::new(id, task.subtasks.len(), subtask, self.config.budgets.tool_calls);
                copy.scratch = prev.scratch.clone();
                copy.scratch.retry = None;
                copy.scratch.sweep.clear();
                copy.replaces = Some(s);
                task.subtasks.push(copy);
            }
            None => {
                if self.tasks[t].plans > self.config.budgets.replan {
                    self.finish(t, Some(FailureCause::RecoveryExhausted { last: Box::new(cause) }), now);
                } else if let Err(c) = self.plan(t, now) {
                    self.finish(t, Some(c), now);
                }
            }
        }
    }

    fn dispatch(&mut self, now: Tick) -> Result<(), EngineError> {
        self.refresh_busy();
        let live = self.config.memory.embodiment == EmbodimentMode::Live;
        let reg = &self.memory.embodiment;
        let usable = |r: &RobotId| !live || reg.get(r).is_some_and(|p| p.availability != Availability::Offline);
        let decisions = step_scheduler(now, &mut self.tasks, &mut self.busy, usable);
        for d in &decisions {
            let t = self.tasks.iter().position(|x| x.task.id == d.task).expect("decision for a known task");
            for &i in &d.batch {
                let robots = self.tasks[t].subtasks[i].robots().to_vec();
                for r in &robots {
                    self.world.notify_dispatch(&d.task, r, now);
                }
                if !self.config.memory.spatial {
                    let sub = &self.tasks[t].subtasks[i];
                    if let Intent::Fetch { source, .. } = &sub.subtask.intent {
                        let start = self.memory.embodiment.get(&robots[0]).map(|p| p.location.node.clone()).expect("dispatched robots are registered");
                        let seed = mix(self.config.seed, &[d.task.as_str(), &i.to_string(), robots[0].as_str()]);
                        let order = sweep_order(&self.rules.map, &start, source.as_ref(), seed);
                        self.tasks[t].subtasks[i].scratch.sweep = order;
                    }
                }
            }
            self.trace.push(TraceLine::Dispatch {
                tick: now,
                task: d.task.clone(),
                subtasks: d.batch.clone(),
                depth: d.depth,
                rationale: d.rationale.clone(),
            });
        }
        self.dispatches.extend(decisions);
        self.refresh_busy();
        self.sync_availability(now)
    }

    /// One action for every robot with work, in robot-id order.
    fn act(&mut self, now: Tick) -> Result<(), EngineError> {
        let mut work: Vec<(RobotId, usize, usize)> = Vec::new();
        for (t, task) in self.tasks.iter().enumerate().filter(|(_, t)| t.is_open()) {
            for s in task.subtasks.iter().filter(|s| s.state == SubtaskState::Running) {
                let robots: BTreeSet<&RobotId> = s.robots().iter().collect();
                work.extend(robots.into_iter().map(|r| (r.clone(), t, s.index)));
            }
        }
        work.sort();
        for (robot, t, s) in work {
            if !self.tasks[t].is_open() || self.tasks[t].subtasks[s].state != SubtaskState::Running {
                continue;
            }
            let Some(role) = self.tasks[t].subtasks[s].current_role(&robot) else { continue };
            // A silent robot simply does nothing.
            if !self.world.is_online(&robot) {
                continue;
            }
            let view = AgentView { memory: &self.memory, map: &self.rules.map, config: &self.config.memory };
            match next_action(&view, &self.tasks[t].subtasks[s], &robot, role) {
                Action::Wait => {}
                Action::RoleDone => {
                    self.tasks[t].subtasks[s].scratch.roles_done.insert(role);
                }
                Action::Fail(cause) => {
                    self.handle_failure(t, s, cause, now);
                    continue;
                }
                Action::Call(call) => self.invoke(t, s, &robot, role, call, now)?,
            }
            self.progress(t, s, now);
        }
        Ok(())
    }

    fn invoke(&mut self, t: usize, s: usize, robot: &RobotId, role: usize, call: ToolCall, now: Tick) -> Result<(), EngineError> {
        let id = self.tasks[t].task.id.clone();
        let outcome = self.world.invoke_tool(robot, &call);
        let mut record = outcome.record(&call);
        record.args.insert("robot".into(), robot.to_string());

        let mut inconsistent = None;
        let mut record = Some(record);
        let mut embodiment = outcome.embodiment.clone();
        let carriers = if outcome.observed.is_empty() { vec![None] } else { outcome.observed.iter().map(Some).collect() };
        for seen in carriers {
            let spatial = seen.map(|(c, objs)| reconcile(&self.memory, c, objs)).unwrap_or_default();
            let records: Vec<ToolCallRecord> = record.take().into_iter().collect();
            let emb = std::mem::take(&mut embodiment);
            if let Err(e) = commit(&mut self.memory, now, Some(&id), records, spatial, emb) {
                inconsistent = Some(e.to_string());
                break;
            }
        }

        let task = &mut self.tasks[t];
        task.steps += 1;
        let sub = &mut task.subtasks[s];
        sub.steps += 1;
        sub.budget = sub.budget.saturating_sub(1);
        self.trace.push(TraceLine::Tool {
            tick: now,
            task: id.clone(),
            subtask: s,
            robot: robot.clone(),
            tool: call.tool.clone(),
            args: call.args.clone(),
            status: outcome.status,
            feedback: outcome.feedback.clone(),
        });
        if let Some(detail) = inconsistent {
            self.handle_failure(t, s, FailureCause::MemoryInconsistent { detail }, now);
            return Ok(());
        }

        let here = self.world.body(robot).map(|b| b.location.clone()).expect("acting robots have bodies");
        let sub = &mut self.tasks[t].subtasks[s];
        if observe(sub, &here, role, &call, &outcome) {
            sub.scratch.roles_done.insert(role);
        }
        if outcome.status == ToolStatus::Fail {
            let code = outcome.feedback.split(':').next().unwrap_or_default();
            match code {
                "TOOL_BROKEN" => {
                    let tool = catalog::capability_of(&call.tool).unwrap_or(call.tool.as_str()).to_owned();
                    let reports = self
                        .memory
                        .temporal
                        .for_task(&id)
                        .filter(|e| e.tool_log.iter().any(|r| r.code() == Some("TOOL_BROKEN") && r.arg("robot") == Some(robot.as_str())))
                        .count() as u32;
                    if self.config.memory.temporal && reports > self.config.budgets.retry {
                        self.handle_failure(t, s, FailureCause::ToolBroken { robot: robot.clone(), tool }, now);
                        return Ok(());
                    }
                    self.tasks[t].subtasks[s].scratch.retry = Some(call);
                }
                "CAPABILITY_MISSING" | "UNKNOWN_TOOL" | "UNKNOWN_LOCATION" | "UNREACHABLE" | "NO_SPACE" | "MISSING_INPUT"
                | "NOT_OPENABLE" => {
                    self.handle_failure(t, s, FailureCause::ToolFailed { feedback: outcome.feedback.clone() }, now);
                    return Ok(());
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Marks a subtask done when all roles are, and enforces its budget.
    fn progress(&mut self, t: usize, s: usize, now: Tick) {
        if !self.tasks[t].is_open() {
            return;
        }
        let sub = &mut self.tasks[t].subtasks[s];
        if sub.state != SubtaskState::Running {
            return;
        }
        if sub.all_roles_done() {
            sub.state = SubtaskState::Done;
        } else if sub.budget == 0 {
            self.handle_failure(t, s, FailureCause::BudgetExhausted, now);
        }
        if self.tasks[t].is_open() && self.tasks[t].steps >= self.config.budgets.steps && !self.tasks[t].all_done() {
            self.finish(t, Some(FailureCause::BudgetExhausted), now);
        }
    }

    /// Closes tasks whose subtasks are all done, judging them by the world.
    fn settle(&mut self, now: Tick) {
        for t in 0..self.tasks.len() {
            let task = &self.tasks[t];
            if task.status != TaskStatus::Active || !task.all_done() {
                continue;
            }
            let met = task.task.goal.iter().all(|a| self.world.holds(a));
            self.finish(t, (!met).then_some(FailureCause::GoalUnmet), now);
        }
    }

    fn finish(&mut self, t: usize, cause: Option<FailureCause>, now: Tick) {
        let task = &mut self.tasks[t];
        if !task.is_open() {
            return;
        }
        for s in task.subtasks.iter_mut().filter(|s| !s.state.is_terminal()) {
            s.state = SubtaskState::Failed;
        }
        task.status = if cause.is_none() { TaskStatus::Completed } else { TaskStatus::Failed };
        self.trace.push(TraceLine::TaskEnd {
            tick: now,
            task: task.task.id.clone(),
            completed: cause.is_none(),
            steps: task.steps,
            cause: cause.as_ref().map(FailureCause::label),
        });
        task.cause = cause;
    }

    /// Sequence position and finality of a task, as scripted.
    pub fn sequence_of(&self, task: &TaskId) -> Option<(u32, bool)> {
        self.meta.get(task).copied()
    }
}

/// Builds and runs a scenario with the default tick cap.
pub fn run_scenario(scenario: &Scenario, config: RunConfig) -> Result<RunOutcome, EngineError> {
    let engine = Engine::new(scenario, config)?;
    let cap = engine.tick_cap();
    engine.run(cap)
}
