use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ids::{RobotId, TaskId, Tick};
use crate::sim::FaultFired;
use crate::stem::ToolStatus;

/// One line of a run trace. Serialized as canonical JSON, one per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceLine {
    TaskStart {
        tick: Tick,
        task: TaskId,
        instruction: String,
        /// Position in its lifelong sequence, from 1.
        sq_index: u32,
        /// Last task of its sequence.
        is_final: bool,
        #[serde(default)]
        cell: String,
    },
    Plan {
        tick: Tick,
        task: TaskId,
        attempt: u32,
        ok: bool,
        detail: String,
        subtasks: usize,
    },
    Dispatch {
        tick: Tick,
        task: TaskId,
        subtasks: Vec<usize>,
        depth: u32,
        rationale: String,
    },
    Tool {
        tick: Tick,
        task: TaskId,
        subtask: usize,
        robot: RobotId,
        tool: String,
        args: BTreeMap<String, String>,
        status: ToolStatus,
        feedback: String,
    },
    Recovery {
        tick: Tick,
        task: TaskId,
        #[serde(default)]
        subtask: Option<usize>,
        cause: String,
        action: String,
    },
    Fault {
        tick: Tick,
        fault: FaultFired,
    },
    TaskEnd {
        tick: Tick,
        task: TaskId,
        completed: bool,
        steps: u32,
        #[serde(default)]
        cause: Option<String>,
    },
}

impl TraceLine {
    pub fn task(&self) -> Option<&TaskId> {
        match self {
            TraceLine::TaskStart { task, .. }
            | TraceLine::Plan { task, .. }
            | TraceLine::Dispatch { task, .. }
            | TraceLine::Tool { task, .. }
            | TraceLine::Recovery { task, .. }
            | TraceLine::TaskEnd { task, .. } => Some(task),
            TraceLine::Fault { .. } => None,
        }
    }
}

/// Canonical text of a trace, one line per entry.
pub fn encode_trace(lines: &[TraceLine]) -> String {
    let mut out = String::new();
    for l in lines {
        out.push_str(&crate::canonical::to_string(l).expect("trace lines serialize"));
        out.push('\n');
    }
    out
}

pub fn decode_trace(text: &str) -> Result<Vec<TraceLine>, (usize, String)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| crate::canonical::from_str(l).map_err(|e| (i + 1, e.to_string())))
        .collect()
}
