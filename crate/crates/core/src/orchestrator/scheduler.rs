use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::runtime::{SubtaskState, TaskRuntime};
use crate::ids::{RobotId, TaskId, Tick};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DispatchDecision {
    pub tick: Tick,
    pub task: TaskId,
    pub depth: u32,
    /// Indices of the subtasks that start now.
    pub batch: Vec<usize>,
    pub rationale: String,
}

/// One scheduling pass over the open tasks, oldest first.
///
/// Pending subtasks at a task's frontier depth become READY; a READY
/// subtask starts once every robot it names is free and usable, and those
/// robots are claimed for the rest of the pass. `usable` says whether a
/// robot may take work at all (e.g. not known to be offline).
pub fn step_scheduler(
    now: Tick,
    tasks: &mut [TaskRuntime],
    busy: &mut BTreeSet<RobotId>,
    usable: impl Fn(&RobotId) -> bool,
) -> Vec<DispatchDecision> {
    let mut out = Vec::new();
    for t in tasks.iter_mut().filter(|t| t.is_open()) {
        let Some(depth) = t.frontier() else { continue };
        let mut batch = Vec::new();
        let mut waiting = 0;
        for s in t.subtasks.iter_mut().filter(|s| s.depth() == depth) {
            if s.state == SubtaskState::Pending {
                s.state = SubtaskState::Ready;
            }
            if s.state != SubtaskState::Ready {
                continue;
            }
            let free = s.robots().iter().all(|r| !busy.contains(r) && usable(r));
            if free {
                busy.extend(s.robots().iter().cloned());
                s.state = SubtaskState::Running;
                s.started = Some(now);
                batch.push(s.index);
            } else {
                waiting += 1;
            }
        }
        if !batch.is_empty() {
            let rationale = if waiting > 0 {
                format!("layer {depth}: {} start, {waiting} wait for robots", batch.len())
            } else {
                format!("layer {depth}: {} start, all shallower layers finished", batch.len())
            };
            out.push(DispatchDecision { tick: now, task: t.task.id.clone(), depth, batch, rationale });
        }
    }
    out
}

/// A broken scheduling invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleViolation {
    /// A subtask is running while a shallower one of its graph is unfinished.
    Barrier { task: TaskId, index: usize },
    /// A robot is running two subtasks.
    Exclusivity { robot: RobotId },
    /// A subtask ended in a non-terminal state.
    Orphan { task: TaskId, index: usize },
}

/// Checks barrier safety and robot exclusivity on the current state.
pub fn audit_running(tasks: &[TaskRuntime]) -> Vec<ScheduleViolation> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for t in tasks {
        for s in t.subtasks.iter().filter(|s| s.state == SubtaskState::Running) {
            let blocked = t.subtasks.iter().any(|o| o.depth() < s.depth() && !o.state.clears_barrier());
            if blocked {
                out.push(ScheduleViolation::Barrier { task: t.task.id.clone(), index: s.index });
            }
            for r in s.robots() {
                if !seen.insert(r.clone()) {
                    out.push(ScheduleViolation::Exclusivity { robot: r.clone() });
                }
            }
        }
    }
    out
}

/// Checks that every subtask of a finished run has terminated.
pub fn audit_conservation(tasks: &[TaskRuntime]) -> Vec<ScheduleViolation> {
    tasks
        .iter()
        .flat_map(|t| {
            t.subtasks
                .iter()
                .filter(|s| !s.state.is_terminal())
                .map(|s| ScheduleViolation::Orphan { task: t.task.id.clone(), index: s.index })
        })
        .collect()
}
