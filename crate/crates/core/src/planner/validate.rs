use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::rules::RuleSet;
use super::types::WorkflowGraph;
use crate::ids::RobotId;
use crate::stem::{CarrierSummary, RobotSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationKind {
    NoncontiguousDepths,
    EmptyAssignment,
    UnknownRobot,
    CapabilityMissing,
    HallucinatedLocation,
    UnknownCategory,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub subtask: Option<usize>,
    pub detail: String,
}

impl Violation {
    /// `KIND: detail`, the form written into temporal feedback.
    pub fn feedback(&self) -> String {
        let kind = serde_json::to_value(self.kind).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        format!("{kind}: {}", self.detail)
    }
}

/// Structural and grounding checks of a graph against the roster, the map
/// and the categories known from memory or storage conventions.
pub fn validate_graph(
    graph: &WorkflowGraph,
    roster: &[RobotSummary],
    rules: &RuleSet,
    spatial: &[CarrierSummary],
) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let depths: BTreeSet<u32> = graph.subtasks.iter().map(|s| s.depth).collect();
    let contiguous = depths.iter().enumerate().all(|(i, d)| *d == i as u32 + 1);
    if !contiguous {
        out.push(Violation {
            kind: ViolationKind::NoncontiguousDepths,
            subtask: None,
            detail: format!("depths {depths:?} are not 1..D"),
        });
    }
    let robots: BTreeMap<&RobotId, &RobotSummary> = roster.iter().map(|r| (&r.id, r)).collect();
    let mut categories: BTreeSet<&str> = rules.categories.iter().map(String::as_str).collect();
    for c in spatial {
        categories.extend(c.objects.iter().map(|o| o.category.as_str()));
    }
    for (i, s) in graph.subtasks.iter().enumerate() {
        if s.robots.is_empty() {
            out.push(Violation { kind: ViolationKind::EmptyAssignment, subtask: Some(i), detail: s.description.clone() });
        }
        let n = s.robots.len();
        for (role, id) in s.robots.iter().enumerate() {
            let Some(profile) = robots.get(id) else {
                out.push(Violation { kind: ViolationKind::UnknownRobot, subtask: Some(i), detail: format!("no robot {id}") });
                continue;
            };
            let needed = if n == 1 { s.intent.all_required() } else { s.intent.required(role, n) };
            for tool in needed {
                if !profile.capabilities.iter().any(|c| c == tool) {
                    out.push(Violation {
                        kind: ViolationKind::CapabilityMissing,
                        subtask: Some(i),
                        detail: format!("{id} lacks {tool}"),
                    });
                }
            }
        }
        for loc in s.intent.locations() {
            if !rules.map.contains(loc) {
                out.push(Violation {
                    kind: ViolationKind::HallucinatedLocation,
                    subtask: Some(i),
                    detail: format!("{loc} does not exist"),
                });
            }
        }
        for cat in s.intent.categories() {
            if !categories.contains(cat) {
                out.push(Violation {
                    kind: ViolationKind::UnknownCategory,
                    subtask: Some(i),
                    detail: format!("no known {cat}"),
                });
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
