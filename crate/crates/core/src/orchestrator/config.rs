use serde::{Deserialize, Serialize};

use crate::embodiment::RegistryParams;

/// How much of the robot roster agents and planner can see.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbodimentMode {
    /// Live registry: locations, availability and liveness from heartbeats.
    Live,
    /// The roster as it was at start-up, never refreshed.
    Static,
    /// No roster at all.
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ablation {
    Spatial,
    Temporal,
    Embodiment,
}

/// Which memory layers the planner and agents may read. Memory is always
/// written; these switches only control what is visible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MemoryConfig {
    pub spatial: bool,
    pub temporal: bool,
    pub embodiment: EmbodimentMode,
}

impl MemoryConfig {
    pub fn full() -> Self {
        Self { spatial: true, temporal: true, embodiment: EmbodimentMode::Live }
    }

    /// Perceives only the current carrier; knows the floor plan and the
    /// start-up roster, nothing else.
    pub fn baseline() -> Self {
        Self { spatial: false, temporal: false, embodiment: EmbodimentMode::Static }
    }

    pub fn without(ablation: Ablation) -> Self {
        let mut c = Self::full();
        match ablation {
            Ablation::Spatial => c.spatial = false,
            Ablation::Temporal => c.temporal = false,
            Ablation::Embodiment => c.embodiment = EmbodimentMode::Off,
        }
        c
    }

    pub fn live(&self) -> bool {
        self.embodiment == EmbodimentMode::Live
    }
}

impl Default for MemoryConfig {
    fn default() -> Self {
        Self::full()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Tool calls one subtask may issue.
    pub tool_calls: u32,
    /// Extra attempts of a failing tool before the robot is given up on.
    pub retry: u32,
    /// Plans per task beyond the first.
    pub replan: u32,
    /// Tool calls per task; more counts as failure.
    pub steps: u32,
    /// Ticks a task may stay open after it arrives.
    pub ticks: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Self { tool_calls: 40, retry: 2, replan: 2, steps: 120, ticks: 250 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub memory: MemoryConfig,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub registry: RegistryParams,
    /// Feedback records handed to the planner.
    #[serde(default = "default_history")]
    pub history: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_history() -> usize {
    24
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { memory: MemoryConfig::full(), budgets: Budgets::default(), registry: RegistryParams::default(), history: 24, seed: 0 }
    }
}
