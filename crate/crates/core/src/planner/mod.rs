//! Task decomposition: a global instruction plus a memory digest becomes a
//! reasoning trace and a layered workflow graph of subtasks.
//!
//! [`RulePlanner`] is the deterministic template-based planner. [`RemotePlanner`]
//! forwards the same context to an external planner over TCP and validates what
//! comes back.

mod fixture;
mod remote;
mod rules;
mod types;
mod validate;

use thiserror::Error;

pub use fixture::HallucinatingPlanner;
pub use remote::{serve_one, PlanRequest, PlanResponse, RemotePlanner, DEFAULT_TIMEOUT};
pub use rules::{classify, decompose, rank_robots, RuleSet, PRODUCT};
pub use types::{GlobalTask, GoalAtom, Intent, PlanResult, PlannerContext, Subtask, Template, WorkflowGraph};
pub use validate::{validate_graph, Violation, ViolationKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("UNKNOWN_TEMPLATE: {0}")]
    UnknownTemplate(String),
    #[error("NO_CAPABLE_ROBOT: no robot offers {tools} for {subtask}")]
    NoCapableRobot { tools: String, subtask: String },
    #[error("HALLUCINATION: {} violation(s)", .0.len())]
    Hallucination(Vec<Violation>),
    #[error("TRANSPORT_FAILURE: {0}")]
    TransportFailure(String),
    #[error("TIMEOUT after {0:?}")]
    Timeout(std::time::Duration),
}

impl PlanError {
    pub fn code(&self) -> &'static str {
        match self {
            PlanError::UnknownTemplate(_) => "UNKNOWN_TEMPLATE",
            PlanError::NoCapableRobot { .. } => "NO_CAPABLE_ROBOT",
            PlanError::Hallucination(_) => "HALLUCINATION",
            PlanError::TransportFailure(_) => "TRANSPORT_FAILURE",
            PlanError::Timeout(_) => "TIMEOUT",
        }
    }
}

/// Anything that can turn a context into a plan.
pub trait Planner: Send {
    fn decompose(&mut self, ctx: &PlannerContext, rules: &RuleSet) -> Result<PlanResult, PlanError>;
}

/// The rule-based planner.
#[derive(Debug, Clone, Copy, Default)]
pub struct RulePlanner;

impl Planner for RulePlanner {
    fn decompose(&mut self, ctx: &PlannerContext, rules: &RuleSet) -> Result<PlanResult, PlanError> {
        decompose(ctx, rules)
    }
}
