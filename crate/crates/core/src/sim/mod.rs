//! Deterministic stand-in for the physical world: generated environments,
//! simulated tools that change the true scene, and fault injection.
//!
//! The simulator keeps its own ground truth. Memory only learns about it
//! through tool outcomes, which is what makes memory-less and memory-backed
//! agents behave differently.

pub mod catalog;
mod fault;
mod scenario;
mod world;
mod worldgen;

pub use fault::{FaultError, FaultFired, FaultMode, FaultPlan, Persistence, Trigger};
pub use scenario::{lifelong_scenario, robustness_scenario, scalability_scenario, spawn_team, templates, Scenario, TaskSpec, WorldSource};
pub use world::{Body, RobotSpec, TickReport, ToolCall, ToolOutcome, World, WorldError};
pub use worldgen::{free_slot, generate_world, region_positions, Footprint, REGION_PITCH};
