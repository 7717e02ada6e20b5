use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::embodiment::EmbodimentDelta;
use crate::ids::{TaskId, Tick};
use crate::spatial::SpatialDelta;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ToolStatus {
    Ok,
    Fail,
}

/// One tool invocation and its result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolCallRecord {
    pub tool: String,
    pub args: BTreeMap<String, String>,
    pub status: ToolStatus,
    pub feedback: String,
}

impl ToolCallRecord {
    pub fn new(tool: impl Into<String>, args: BTreeMap<String, String>, status: ToolStatus, feedback: impl Into<String>) -> Self {
        Self { tool: tool.into(), args, status, feedback: feedback.into() }
    }

    pub fn arg(&self, key: &str) -> Option<&str> {
        self.args.get(key).map(String::as_str)
    }

    /// Robot skills have plain names; bookkeeping records written by the
    /// monitor or planner use a dotted namespace (`monitor.recover`).
    pub fn is_robot_call(&self) -> bool {
        !self.tool.contains('.')
    }

    /// Leading `CODE:` of the feedback text, if any.
    pub fn code(&self) -> Option<&str> {
        let (head, _) = self.feedback.split_once(':')?;
        (!head.is_empty() && head.chars().all(|c| c.is_ascii_uppercase() || c == '_')).then_some(head)
    }
}

/// One entry of the temporal log: what changed, for which task, and the
/// tool call that caused it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub tau: Tick,
    pub spatial_delta: Option<SpatialDelta>,
    pub embodiment_delta: Option<EmbodimentDelta>,
    pub task_id: Option<TaskId>,
    #[serde(default)]
    pub pre_subtask_queue: Vec<String>,
    #[serde(default)]
    pub tool_log: Vec<ToolCallRecord>,
}

impl Event {
    pub fn new(seq: u64, tau: Tick) -> Self {
        Self { seq, tau, spatial_delta: None, embodiment_delta: None, task_id: None, pre_subtask_queue: Vec::new(), tool_log: Vec::new() }
    }

    pub fn with_spatial(mut self, d: SpatialDelta) -> Self {
        self.spatial_delta = Some(d);
        self
    }

    pub fn with_embodiment(mut self, d: EmbodimentDelta) -> Self {
        self.embodiment_delta = Some(d);
        self
    }

    pub fn with_task(mut self, task: Option<TaskId>) -> Self {
        self.task_id = task;
        self
    }

    pub fn with_tool(mut self, r: ToolCallRecord) -> Self {
        self.tool_log.push(r);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.spatial_delta.is_none() && self.embodiment_delta.is_none() && self.tool_log.is_empty()
    }
}
