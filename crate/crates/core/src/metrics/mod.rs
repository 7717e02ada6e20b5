//! Success and efficiency metrics computed from run traces, failure
//! attribution, and the experiment suites that compare memory arms.

mod suite;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::TaskId;
use crate::orchestrator::TraceLine;

pub use suite::{run_suite, run_trial, CellResult, Suite, SuiteConfig, SuiteReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("EMPTY_INPUT: no task records")]
    EmptyInput,
}

/// Outcome of one task, as read back from a trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task: TaskId,
    pub cell: String,
    pub sq_index: u32,
    pub is_final: bool,
    pub completed: bool,
    /// Tool calls the task issued.
    pub steps: u32,
    #[serde(default)]
    pub cause: Option<String>,
}

/// One trial: its task records plus where it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub arm: String,
    pub seed: u64,
    pub tasks: Vec<TaskRecord>,
    /// Set when the trial could not run at all.
    #[serde(default)]
    pub error: Option<String>,
}

impl RunReport {
    /// Task records from a trace; steps are the task's tool lines.
    pub fn from_trace(scenario: &str, arm: &str, seed: u64, trace: &[TraceLine]) -> Self {
        let mut order: Vec<TaskId> = Vec::new();
        let mut recs: BTreeMap<TaskId, TaskRecord> = BTreeMap::new();
        for line in trace {
            match line {
                TraceLine::TaskStart { task, sq_index, is_final, cell, .. } => {
                    order.push(task.clone());
                    recs.insert(
                        task.clone(),
                        TaskRecord {
                            task: task.clone(),
                            cell: cell.clone(),
                            sq_index: *sq_index,
                            is_final: *is_final,
                            completed: false,
                            steps: 0,
                            cause: None,
                        },
                    );
                }
                TraceLine::Tool { task, .. } => {
                    if let Some(r) = recs.get_mut(task) {
                        r.steps += 1;
                    }
                }
                TraceLine::TaskEnd { task, completed, cause, .. } => {
                    if let Some(r) = recs.get_mut(task) {
                        r.completed = *completed;
                        r.cause = cause.clone();
                    }
                }
                _ => {}
            }
        }
        let tasks = order.iter().filter_map(|t| recs.remove(t)).collect();
        Self { scenario: scenario.to_owned(), arm: arm.to_owned(), seed, tasks, error: None }
    }
}

/// Aggregate metrics of a set of runs. Rates are percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub tasks: usize,
    pub sequences: usize,
    pub sr: f64,
    pub msr: f64,
    /// Mean steps over completed tasks; absent without completions.
    pub aest: Option<f64>,
    pub ss: Option<f64>,
}

/// Success rate per step.
pub fn success_per_step(sr: f64, aest: Option<f64>) -> Option<f64> {
    aest.filter(|a| *a > 0.0).map(|a| sr / a)
}

pub fn compute_metrics(reports: &[RunReport]) -> Result<MetricsReport, MetricsError> {
    let tasks: Vec<&TaskRecord> = reports.iter().flat_map(|r| r.tasks.iter()).collect();
    if tasks.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let done: Vec<&&TaskRecord> = tasks.iter().filter(|t| t.completed).collect();
    let sr = 100.0 * done.len() as f64 / tasks.len() as f64;
    let finals: Vec<&&TaskRecord> = tasks.iter().filter(|t| t.is_final).collect();
    let msr = if finals.is_empty() { 0.0 } else { 100.0 * finals.iter().filter(|t| t.completed).count() as f64 / finals.len() as f64 };
    let aest = (!done.is_empty()).then(|| done.iter().map(|t| f64::from(t.steps)).sum::<f64>() / done.len() as f64);
    Ok(MetricsReport { tasks: tasks.len(), sequences: finals.len(), sr, msr, aest, ss: success_per_step(sr, aest) })
}

/// Pipeline stage a task failure is charged to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureStage {
    SubtaskGeneration,
    ToolInvocation,
    MemoryOperation,
    Unattributed,
}

/// Stage of a failure label such as `DEADLINE` or `RECOVERY_EXHAUSTED/HALLUCINATION`.
pub fn stage_of(label: &str) -> FailureStage {
    let root = label.rsplit('/').next().unwrap_or(label);
    match root {
        "HALLUCINATION" | "NO_CAPABLE_ROBOT" | "UNKNOWN_TEMPLATE" => FailureStage::SubtaskGeneration,
        "E1_OFFLINE" | "E2_TOOL_FAIL" | "TOOL_FAILED" | "BUDGET_EXHAUSTED" | "DEADLINE" => FailureStage::ToolInvocation,
        "GOAL_UNMET" | "NOT_FOUND" | "MEMORY_INCONSISTENT" => FailureStage::MemoryOperation,
        _ => FailureStage::Unattributed,
    }
}

/// Failed tasks of a trace by stage; sums to the number of failures.
pub fn classify_failures(trace: &[TraceLine]) -> BTreeMap<FailureStage, usize> {
    let mut out = BTreeMap::new();
    for line in trace {
        if let TraceLine::TaskEnd { completed: false, cause, .. } = line {
            let stage = cause.as_deref().map_or(FailureStage::Unattributed, stage_of);
            *out.entry(stage).or_default() += 1;
        }
    }
    out
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".to_owned(), |x| format!("{x:.digits$}"))
}

/// Fixed-width text table of cells, one row per (cell, arm).
pub fn render_table(cells: &[CellResult]) -> String {
    let mut out = format!("{:<28} {:<14} {:>5} {:>7} {:>7} {:>7} {:>6}\n", "cell", "arm", "n", "SR%", "MSR%", "AEST", "SS");
    for c in cells {
        match &c.metrics {
            Some(m) => out.push_str(&format!(
                "{:<28} {:<14} {:>5} {:>7.1} {:>7.1} {:>7} {:>6}\n",
                c.cell,
                c.arm,
                m.tasks,
                m.sr,
                m.msr,
                fmt_opt(m.aest, 1),
                fmt_opt(m.ss, 2)
            )),
            None => out.push_str(&format!("{:<28} {:<14} {:>5} {:>7} {:>7} {:>7} {:>6}\n", c.cell, c.arm, 0, "-", "-", "-", "-")),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(task: &str, is_final: bool, completed: bool, steps: u32) -> TaskRecord {
        TaskRecord { task: task.into(), cell: "c".into(), sq_index: 1, is_final, completed, steps, cause: None }
    }

    #[test]
    fn all_failed_has_no_aest() {
        let r = RunReport { scenario: "s".into(), arm: "a".into(), seed: 0, tasks: vec![rec("t1", true, false, 9)], error: None };
        let m = compute_metrics(&[r]).unwrap();
        assert_eq!(m.sr, 0.0);
        assert!(m.aest.is_none() && m.ss.is_none());
        assert_eq!(compute_metrics(&[]), Err(MetricsError::EmptyInput));
    }

    #[test]
    fn msr_counts_final_tasks_only() {
        let r = RunReport {
            scenario: "s".into(),
            arm: "a".into(),
            seed: 0,
            tasks: vec![rec("t1", false, true, 4), rec("t2", true, false, 6), rec("t3", false, true, 8), rec("t4", true, true, 2)],
            error: None,
        };
        let m = compute_metrics(&[r]).unwrap();
        assert_eq!(m.sequences, 2);
        assert_eq!(m.msr, 50.0);
        assert_eq!(m.sr, 75.0);
        assert_eq!(m.aest, Some(14.0 / 3.0));
    }

    #[test]
    fn stages() {
        assert_eq!(stage_of("RECOVERY_EXHAUSTED/HALLUCINATION"), FailureStage::SubtaskGeneration);
        assert_eq!(stage_of("E2_TOOL_FAIL"), FailureStage::ToolInvocation);
        assert_eq!(stage_of("GOAL_UNMET"), FailureStage::MemoryOperation);
        assert_eq!(stage_of("WEIRD"), FailureStage::Unattributed);
    }
}
