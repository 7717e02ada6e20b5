use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::ids::{NodeId, ObjectId, RobotId, TaskId, Tick};
use crate::stem::{CarrierSummary, FeedbackEntry, ObjectMove, RobotSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Template {
    Fetch,
    Deliver,
    Gather,
    PrepareAndServe,
    Package,
    Restore,
}

/// A condition on the true world that decides whether a task succeeded.
/// It is not shown to the planner.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "atom", rename_all = "snake_case")]
pub enum GoalAtom {
    ObjectAt { object: ObjectId, carrier: NodeId },
    CategoryAt { category: String, carrier: NodeId },
    CategoryIn { category: String, container: String },
    /// Every object of the category is back on the carrier it started on.
    CategoryRestored { category: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalTask {
    pub id: TaskId,
    pub instruction: String,
    pub template: Template,
    pub arrival: Tick,
    #[serde(default)]
    pub goal: Vec<GoalAtom>,
}

/// What a subtask has to achieve, in a form the agents can execute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "intent", rename_all = "snake_case")]
pub enum Intent {
    /// Bring one object (a specific one, or any of the category) onto `dest`.
    Fetch {
        category: String,
        #[serde(default)]
        object: Option<ObjectId>,
        #[serde(default)]
        source: Option<NodeId>,
        dest: NodeId,
    },
    /// Role 0 combines `inputs` into `product` at `station`; the last role
    /// carries the product to `dest`.
    Assemble { inputs: Vec<String>, product: String, station: NodeId, dest: NodeId },
    /// Role 0 opens the container at `station`; the last role puts `item` into it.
    Pack { item: String, container: String, station: NodeId },
}

impl Intent {
    /// Capabilities needed by the robot playing `role` out of `roles`.
    pub fn required(&self, role: usize, roles: usize) -> Vec<&'static str> {
        let last = role + 1 == roles;
        let first = role == 0;
        let mut out: BTreeSet<&'static str> = BTreeSet::from(["navigate"]);
        match self {
            Intent::Fetch { .. } => out.extend(["detect", "grasp"]),
            Intent::Assemble { .. } => {
                if first {
                    out.insert("assemble");
                }
                if last {
                    out.insert("grasp");
                }
            }
            Intent::Pack { .. } => {
                if first {
                    out.extend(["detect", "open"]);
                }
                if last {
                    out.extend(["detect", "grasp"]);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Every capability any role needs.
    pub fn all_required(&self) -> Vec<&'static str> {
        let mut set = BTreeSet::new();
        set.extend(self.required(0, 1));
        set.extend(self.required(0, 2));
        set.extend(self.required(1, 2));
        set.into_iter().collect()
    }

    pub fn locations(&self) -> Vec<&NodeId> {
        match self {
            Intent::Fetch { source, dest, .. } => source.iter().chain(std::iter::once(dest)).collect(),
            Intent::Assemble { station, dest, .. } => vec![station, dest],
            Intent::Pack { station, .. } => vec![station],
        }
    }

    pub fn categories(&self) -> Vec<&str> {
        match self {
            Intent::Fetch { category, .. } => vec![category.as_str()],
            Intent::Assemble { inputs, .. } => inputs.iter().map(String::as_str).collect(),
            Intent::Pack { item, container, .. } => vec![item.as_str(), container.as_str()],
        }
    }

    /// Number of distinct roles.
    pub fn roles(&self) -> usize {
        match self {
            Intent::Fetch { .. } => 1,
            Intent::Assemble { .. } | Intent::Pack { .. } => 2,
        }
    }
}

/// One `(description, depth, robots)` triple of a workflow graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subtask {
    pub description: String,
    pub depth: u32,
    pub robots: Vec<RobotId>,
    pub intent: Intent,
}

impl Subtask {
    pub fn is_collaboration(&self) -> bool {
        self.robots.len() >= 2
    }

    /// Robot playing `role`; a single robot plays every role.
    pub fn robot_for_role(&self, role: usize) -> &RobotId {
        &self.robots[role.min(self.robots.len() - 1)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkflowGraph {
    pub task: TaskId,
    pub subtasks: Vec<Subtask>,
}

impl WorkflowGraph {
    pub fn max_depth(&self) -> u32 {
        self.subtasks.iter().map(|s| s.depth).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub trace: Vec<String>,
    pub graph: WorkflowGraph,
}

/// Planner input. Sections are always combined in the order
/// spatial ⊕ temporal ⊕ robots ⊕ instruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerContext {
    pub task: TaskId,
    pub spatial: Vec<CarrierSummary>,
    pub temporal: Vec<FeedbackEntry>,
    pub moves: Vec<ObjectMove>,
    pub robots: Vec<RobotSummary>,
    pub instruction: String,
    /// Whether `temporal` and `moves` come from a task history at all.
    #[serde(default)]
    pub history: bool,
}

impl PlannerContext {
    pub fn sections(&self) -> serde_json::Value {
        serde_json::json!([
            { "M_s": self.spatial },
            { "M_t": { "feedback": self.temporal, "moves": self.moves } },
            { "M_r": self.robots },
            { "T_global": self.instruction },
        ])
    }

    pub fn feedback_mentions(&self, code: &str) -> bool {
        self.temporal.iter().any(|f| f.feedback.contains(code))
    }
}
