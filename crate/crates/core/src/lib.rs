//! Shared spatio-temporal-embodiment memory for multi-robot teams.
//!
//! The crate is organised around one value, [`stem::MemoryState`], that is
//! only ever changed by folding [`stem::Event`]s. Around it sit:
//!
//! - [`spatial`]: scene tree, per-carrier object graphs and relation predicates,
//! - [`embodiment`]: robot profiles, heartbeats and capability lookup,
//! - [`geo`]: rigid alignment and PnP solvers used to register scans,
//! - [`planner`]: rule-based and remote task decomposition into workflow graphs,
//! - [`orchestrator`]: layered dispatch, subtask agents and failure recovery,
//! - [`sim`]: a deterministic tick-driven world with fault injection,
//! - [`metrics`]: success/step metrics and the experiment suites.

pub mod canonical;
pub mod embodiment;
pub mod geo;
pub mod ids;
pub mod metrics;
pub mod orchestrator;
pub mod planner;
pub mod sim;
pub mod spatial;
pub mod stem;

pub use ids::{NodeId, ObjectId, RobotId, TaskId, Tick};
