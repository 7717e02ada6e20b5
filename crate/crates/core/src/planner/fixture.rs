use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::types::{Intent, PlanResult, PlannerContext};
use super::validate::validate_graph;
use super::{PlanError, Planner, RuleSet};
use crate::ids::{NodeId, TaskId};

/// Stand-in for a planner that grounds a destination in a room that does not
/// exist. The first plan is always wrong. Later plans are corrected when the
/// context carries a `HALLUCINATED_LOCATION` report, and stay wrong with
/// probability `persist` otherwise.
#[derive(Debug, Clone)]
pub struct HallucinatingPlanner<P> {
    pub inner: P,
    pub phantom: NodeId,
    pub persist: f64,
    /// Only this task is affected; `None` affects every task.
    pub only: Option<TaskId>,
    calls: usize,
    rng: ChaCha8Rng,
}

impl<P: Planner> HallucinatingPlanner<P> {
    pub fn new(inner: P, seed: u64) -> Self {
        Self { inner, phantom: NodeId::from("room_99"), persist: 0.8, only: None, calls: 0, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn for_task(inner: P, seed: u64, task: TaskId) -> Self {
        Self { only: Some(task), ..Self::new(inner, seed) }
    }

    pub fn calls(&self) -> usize {
        self.calls
    }
}

impl<P: Planner> Planner for HallucinatingPlanner<P> {
    fn decompose(&mut self, ctx: &PlannerContext, rules: &RuleSet) -> Result<PlanResult, PlanError> {
        if self.only.as_ref().is_some_and(|t| *t != ctx.task) {
            return self.inner.decompose(ctx, rules);
        }
        self.calls += 1;
        let mut plan = self.inner.decompose(ctx, rules)?;
        let hallucinate = if self.calls == 1 {
            true
        } else if ctx.feedback_mentions("HALLUCINATED_LOCATION") {
            false
        } else {
            self.rng.random::<f64>() < self.persist
        };
        if !hallucinate {
            return Ok(plan);
        }
        if let Some(s) = plan.graph.subtasks.first_mut() {
            match &mut s.intent {
                Intent::Fetch { dest, .. } | Intent::Assemble { dest, .. } => *dest = self.phantom.clone(),
                Intent::Pack { station, .. } => *station = self.phantom.clone(),
            }
            s.description = format!("{} via {}", s.description, self.phantom);
        }
        plan.trace.push(format!("route through {}", self.phantom));
        validate_graph(&plan.graph, &ctx.robots, rules, &ctx.spatial).map_err(PlanError::Hallucination)?;
        Ok(plan)
    }
}
