use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::ids::{NodeId, ObjectId, RobotId, TaskId, Tick};
use crate::planner::{GlobalTask, Subtask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SubtaskState {
    Pending,
    Ready,
    Running,
    Done,
    Failed,
    /// Superseded by a reassignment or a new plan.
    Replanned,
}

impl SubtaskState {
    pub fn is_terminal(self) -> bool {
        matches!(self, SubtaskState::Done | SubtaskState::Failed | SubtaskState::Replanned)
    }

    /// Finished in a way that unblocks deeper layers.
    pub fn clears_barrier(self) -> bool {
        matches!(self, SubtaskState::Done | SubtaskState::Replanned)
    }
}

/// Why a subtask or task failed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "cause", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FailureCause {
    /// E1: a robot stopped answering.
    Offline { robot: RobotId },
    /// E2: a tool of a robot keeps failing.
    ToolBroken { robot: RobotId, tool: String },
    /// E3: the plan did not survive validation.
    Hallucination { detail: String },
    NoCapableRobot { detail: String },
    UnknownTemplate { detail: String },
    BudgetExhausted,
    Deadline,
    NotFound { category: String },
    ToolFailed { feedback: String },
    MemoryInconsistent { detail: String },
    GoalUnmet,
    RecoveryExhausted { last: Box<FailureCause> },
}

impl FailureCause {
    pub fn code(&self) -> &'static str {
        match self {
            FailureCause::Offline { .. } => "E1_OFFLINE",
            FailureCause::ToolBroken { .. } => "E2_TOOL_FAIL",
            FailureCause::Hallucination { .. } => "HALLUCINATION",
            FailureCause::NoCapableRobot { .. } => "NO_CAPABLE_ROBOT",
            FailureCause::UnknownTemplate { .. } => "UNKNOWN_TEMPLATE",
            FailureCause::BudgetExhausted => "BUDGET_EXHAUSTED",
            FailureCause::Deadline => "DEADLINE",
            FailureCause::NotFound { .. } => "NOT_FOUND",
            FailureCause::ToolFailed { .. } => "TOOL_FAILED",
            FailureCause::MemoryInconsistent { .. } => "MEMORY_INCONSISTENT",
            FailureCause::GoalUnmet => "GOAL_UNMET",
            FailureCause::RecoveryExhausted { .. } => "RECOVERY_EXHAUSTED",
        }
    }

    /// The innermost cause.
    pub fn root(&self) -> &FailureCause {
        match self {
            FailureCause::RecoveryExhausted { last } => last.root(),
            other => other,
        }
    }

    /// `CODE` or `RECOVERY_EXHAUSTED/CODE`.
    pub fn label(&self) -> String {
        match self {
            FailureCause::RecoveryExhausted { last } => format!("RECOVERY_EXHAUSTED/{}", last.root().code()),
            other => other.code().to_owned(),
        }
    }
}

/// Working notes shared by the robots of one subtask.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Scratch {
    /// Carriers searched without finding the target.
    pub visited: BTreeSet<NodeId>,
    /// Target seen by this subtask: where and which object.
    pub found: Option<(NodeId, ObjectId)>,
    /// Search order for agents without spatial memory.
    pub sweep: Vec<NodeId>,
    /// A call to repeat because its tool reported a transient failure.
    pub retry: Option<crate::sim::ToolCall>,
    pub container: Option<ObjectId>,
    pub container_open: bool,
    pub product: Option<ObjectId>,
    pub roles_done: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubtaskRuntime {
    pub task: TaskId,
    pub index: usize,
    pub subtask: Subtask,
    pub state: SubtaskState,
    pub budget: u32,
    /// Tool calls issued, equal to the number of its tool records.
    pub steps: u32,
    /// Index of the runtime this one replaces after a reassignment.
    #[serde(default)]
    pub replaces: Option<usize>,
    #[serde(default)]
    pub cause: Option<FailureCause>,
    #[serde(default)]
    pub scratch: Scratch,
    #[serde(default)]
    pub started: Option<Tick>,
}

impl SubtaskRuntime {
    pub fn new(task: TaskId, index: usize, subtask: Subtask, budget: u32) -> Self {
        Self {
            task,
            index,
            subtask,
            state: SubtaskState::Pending,
            budget,
            steps: 0,
            replaces: None,
            cause: None,
            scratch: Scratch::default(),
            started: None,
        }
    }

    pub fn depth(&self) -> u32 {
        self.subtask.depth
    }

    pub fn robots(&self) -> &[RobotId] {
        &self.subtask.robots
    }

    /// Roles played by `robot`, in order.
    pub fn roles_of(&self, robot: &RobotId) -> Vec<usize> {
        let n = self.subtask.robots.len();
        let roles = self.subtask.intent.roles();
        (0..roles).filter(|&role| self.subtask.robots[role.min(n - 1)] == *robot).collect()
    }

    /// Next unfinished role of `robot`, if any.
    pub fn current_role(&self, robot: &RobotId) -> Option<usize> {
        self.roles_of(robot).into_iter().find(|r| !self.scratch.roles_done.contains(r))
    }

    pub fn all_roles_done(&self) -> bool {
        (0..self.subtask.intent.roles()).all(|r| self.scratch.roles_done.contains(&r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TaskStatus {
    Waiting,
    Active,
    Completed,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRuntime {
    pub task: GlobalTask,
    pub status: TaskStatus,
    pub subtasks: Vec<SubtaskRuntime>,
    pub plans: u32,
    pub reassignments: u32,
    pub steps: u32,
    pub started: Tick,
    /// Memory version when the task's lifelong sequence began.
    pub horizon: u64,
    #[serde(default)]
    pub cause: Option<FailureCause>,
    /// Robots whose failures this task has already recovered from, by cause code.
    #[serde(default)]
    pub excluded: BTreeMap<RobotId, String>,
}

impl TaskRuntime {
    pub fn new(task: GlobalTask, started: Tick, horizon: u64) -> Self {
        Self {
            task,
            status: TaskStatus::Waiting,
            subtasks: Vec::new(),
            plans: 0,
            reassignments: 0,
            steps: 0,
            started,
            horizon,
            cause: None,
            excluded: BTreeMap::new(),
        }
    }

    pub fn is_open(&self) -> bool {
        matches!(self.status, TaskStatus::Waiting | TaskStatus::Active)
    }

    /// Smallest depth that still has work, if any.
    pub fn frontier(&self) -> Option<u32> {
        self.subtasks.iter().filter(|s| !s.state.clears_barrier()).map(|s| s.depth()).min()
    }

    pub fn max_depth(&self) -> u32 {
        self.subtasks.iter().map(|s| s.depth()).max().unwrap_or(0)
    }

    pub fn all_done(&self) -> bool {
        self.subtasks.iter().all(|s| s.state.clears_barrier())
    }
}
