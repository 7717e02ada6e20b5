use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify_failures, compute_metrics, FailureStage, MetricsReport, RunReport};
use crate::orchestrator::{run_scenario, Ablation, Budgets, MemoryConfig, RunConfig};
use crate::sim::{lifelong_scenario, robustness_scenario, scalability_scenario, FaultMode, Scenario};
use crate::spatial::{Domain, Level};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Suite {
    Lifelong,
    Scalability,
    Robustness,
    Ablation,
}

/// What a suite sweeps over. Fields a suite does not use are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    /// Trials per cell; every arm of a cell sees the same seeds.
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub domains: Vec<Domain>,
    #[serde(default)]
    pub levels: Vec<Level>,
    #[serde(default)]
    pub sqs: Vec<u32>,
    #[serde(default)]
    pub team: Vec<String>,
    #[serde(default)]
    pub modes: Vec<FaultMode>,
    #[serde(default)]
    pub team_sizes: Vec<usize>,
    #[serde(default)]
    pub budgets: Budgets,
}

impl SuiteConfig {
    fn base(suite: Suite) -> Self {
        Self {
            suite,
            trials: 40,
            seed: 1,
            domains: vec![Domain::Household, Domain::Restaurant, Domain::Supermarket],
            levels: vec![Level::L1, Level::L2],
            sqs: vec![1, 3, 5],
            team: vec!["wheeled".into(), "humanoid".into()],
            modes: vec![FaultMode::None, FaultMode::E1, FaultMode::E2, FaultMode::E3],
            team_sizes: vec![1, 3, 5],
            budgets: Budgets::default(),
        }
    }

    pub fn lifelong() -> Self {
        Self::base(Suite::Lifelong)
    }

    pub fn robustness() -> Self {
        Self::base(Suite::Robustness)
    }

    pub fn scalability() -> Self {
        Self::base(Suite::Scalability)
    }

    pub fn ablation() -> Self {
        Self::base(Suite::Ablation)
    }

    pub fn for_suite(suite: Suite) -> Self {
        Self::base(suite)
    }
}

/// Metrics of one arm in one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub cell: String,
    pub arm: String,
    pub metrics: Option<MetricsReport>,
    pub failures: BTreeMap<FailureStage, usize>,
    /// Trials that could not run.
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cells: Vec<CellResult>,
}

impl SuiteReport {
    pub fn get(&self, cell: &str, arm: &str) -> Option<&MetricsReport> {
        self.cells.iter().find(|c| c.cell == cell && c.arm == arm).and_then(|c| c.metrics.as_ref())
    }

    pub fn table(&self) -> String {
        super::render_table(&self.cells)
    }
}

type StageCounts = BTreeMap<FailureStage, usize>;

struct Trial {
    cell: String,
    arm: &'static str,
    scenario: Scenario,
    config: RunConfig,
}

type Arm = (&'static str, fn() -> MemoryConfig);

const ARMS: [Arm; 2] = [("memory", MemoryConfig::full), ("baseline", MemoryConfig::baseline)];

/// Runs a scenario under `config` and reads the trace back into a report.
pub fn run_trial(scenario: &Scenario, arm: &str, config: RunConfig) -> RunReport {
    match run_scenario(scenario, config) {
        Ok(out) => RunReport::from_trace(&scenario.name, arm, config.seed, &out.trace),
        Err(e) => RunReport { scenario: scenario.name.clone(), arm: arm.to_owned(), seed: config.seed, tasks: Vec::new(), error: Some(e.to_string()) },
    }
}

fn trials(cfg: &SuiteConfig) -> Vec<Trial> {
    let run = |memory: MemoryConfig, seed: u64| RunConfig { memory, budgets: cfg.budgets, seed, ..RunConfig::default() };
    let team: Vec<&str> = cfg.team.iter().map(String::as_str).collect();
    let mut out = Vec::new();
    for i in 0..cfg.trials {
        let seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
        match cfg.suite {
            Suite::Lifelong => {
                let domain = cfg.domains[i % cfg.domains.len().max(1)];
                for &level in &cfg.levels {
                    for &sq in &cfg.sqs {
                        let scenario = lifelong_scenario(domain, level, sq, seed, &team);
                        let cell = format!("{level:?}/SQ{sq}");
                        for (arm, memory) in ARMS {
                            out.push(Trial { cell: cell.clone(), arm, scenario: scenario.clone(), config: run(memory(), seed) });
                        }
                    }
                }
            }
            Suite::Robustness => {
                for &mode in &cfg.modes {
                    let scenario = robustness_scenario(mode, seed, &team);
                    let cell = serde_json::to_value(mode).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
                    for (arm, memory) in ARMS {
                        out.push(Trial { cell: cell.clone(), arm, scenario: scenario.clone(), config: run(memory(), seed) });
                    }
                }
            }
            Suite::Scalability => {
                let domain = cfg.domains[i % cfg.domains.len().max(1)];
                for &n in &cfg.team_sizes {
                    let scenario = scalability_scenario(domain, n, seed);
                    out.push(Trial { cell: format!("wheeled_x{n}"), arm: "memory", scenario, config: run(MemoryConfig::full(), seed) });
                }
            }
            Suite::Ablation => {
                let scenario = robustness_scenario(FaultMode::None, seed, &team);
                let arms: [(&'static str, MemoryConfig); 4] = [
                    ("full", MemoryConfig::full()),
                    ("no_spatial", MemoryConfig::without(Ablation::Spatial)),
                    ("no_temporal", MemoryConfig::without(Ablation::Temporal)),
                    ("no_embodiment", MemoryConfig::without(Ablation::Embodiment)),
                ];
                for (arm, memory) in arms {
                    out.push(Trial { cell: "household/L1".into(), arm, scenario: scenario.clone(), config: run(memory, seed) });
                }
            }
        }
    }
    out
}

/// Runs every trial of the suite in parallel and aggregates per cell and arm.
pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let trials = trials(cfg);
    let results: Vec<(String, &'static str, RunReport, StageCounts)> = trials
        .par_iter()
        .map(|t| match run_scenario(&t.scenario, t.config) {
            Ok(out) => {
                let report = RunReport::from_trace(&t.scenario.name, t.arm, t.config.seed, &out.trace);
                (t.cell.clone(), t.arm, report, classify_failures(&out.trace))
            }
            Err(e) => {
                let report = RunReport {
                    scenario: t.scenario.name.clone(),
                    arm: t.arm.to_owned(),
                    seed: t.config.seed,
                    tasks: Vec::new(),
                    error: Some(e.to_string()),
                };
                (t.cell.clone(), t.arm, report, BTreeMap::new())
            }
        })
        .collect();

    let mut groups: BTreeMap<(String, String), (Vec<RunReport>, StageCounts)> = BTreeMap::new();
    let mut arm_order: Vec<&str> = Vec::new();
    for (cell, arm, report, failures) in results {
        if !arm_order.contains(&arm) {
            arm_order.push(arm);
        }
        let g = groups.entry((cell, arm.to_owned())).or_default();
        for (k, v) in failures {
            *g.1.entry(k).or_default() += v;
        }
        g.0.push(report);
    }
    let mut cells: Vec<CellResult> = groups
        .into_iter()
        .map(|((cell, arm), (reports, failures))| CellResult {
            errors: reports.iter().filter(|r| r.error.is_some()).count(),
            metrics: compute_metrics(&reports).ok(),
            failures,
            cell,
            arm,
        })
        .collect();
    cells.sort_by_key(|c| (c.cell.clone(), arm_order.iter().position(|a| *a == c.arm)));
    SuiteReport { suite: cfg.suite, cells }
}
