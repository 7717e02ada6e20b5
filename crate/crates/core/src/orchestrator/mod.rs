//! Runs global tasks against a world: plans them, dispatches subtasks layer
//! by layer, drives one agent per robot, folds every tool outcome into
//! memory and recovers from failures by reassigning or replanning.
//!
//! Everything happens on a tick loop owned by [`Engine`]. Within a tick the
//! order is fixed: faults and heartbeats, task arrivals, liveness checks,
//! deadlines, dispatch, then one action per working robot in robot-id order.

mod agent;
mod config;
mod engine;
mod monitor;
mod runtime;
mod scheduler;
mod trace;

pub use agent::{next_action, observe, sweep_order, Action, AgentView};
pub use config::{Ablation, Budgets, EmbodimentMode, MemoryConfig, RunConfig};
pub use engine::{run_scenario, Engine, EngineError, RunOutcome};
pub use monitor::{commit, reconcile};
pub use runtime::{FailureCause, Scratch, SubtaskRuntime, SubtaskState, TaskRuntime, TaskStatus};
pub use scheduler::{audit_conservation, audit_running, step_scheduler, DispatchDecision, ScheduleViolation};
pub use trace::{decode_trace, encode_trace, TraceLine};
