use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{RobotId, TaskId, Tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FaultMode {
    #[default]
    None,
    /// Robot goes silent: no heartbeats, no tool responses.
    E1,
    /// One tool of one robot fails every call.
    E2,
    /// The planner grounds part of the plan in a location that does not exist.
    E3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Persistence {
    Transient { ticks: Tick },
    Persistent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Trigger {
    AtTick { tick: Tick },
    /// `delay` ticks after the first dispatch of `task` (any task if `None`).
    AfterDispatch {
        #[serde(default)]
        task: Option<TaskId>,
        delay: Tick,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultPlan {
    pub mode: FaultMode,
    pub trigger: Trigger,
    /// Target robot; `None` picks the first robot dispatched after the trigger arms.
    #[serde(default)]
    pub robot: Option<RobotId>,
    /// Target tool capability for E2.
    #[serde(default)]
    pub tool: Option<String>,
    pub persistence: Persistence,
}

impl FaultPlan {
    pub fn none() -> Self {
        Self { mode: FaultMode::None, trigger: Trigger::AtTick { tick: 0 }, robot: None, tool: None, persistence: Persistence::Persistent }
    }

    pub fn task(&self) -> Option<&TaskId> {
        match &self.trigger {
            Trigger::AfterDispatch { task, .. } => task.as_ref(),
            Trigger::AtTick { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FaultError {
    #[error("INVALID_PLAN: {0}")]
    InvalidPlan(String),
}

/// Where a fault currently stands inside the world.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) enum FaultState {
    /// Waiting for a dispatch to fix the trigger tick (and maybe the robot).
    Armed,
    Due { tick: Tick, robot: RobotId },
    Active { until: Option<Tick>, robot: RobotId },
    Over,
}

/// A fault that actually happened, for the trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultFired {
    pub mode: FaultMode,
    pub robot: RobotId,
    #[serde(default)]
    pub tool: Option<String>,
    /// True when the fault starts, false when a transient one ends.
    pub start: bool,
}
