use serde::{Deserialize, Serialize};

use super::event::{Event, ToolStatus};
use super::StemError;
use crate::embodiment::{EmbodimentError, EmbodimentRegistry, RegistryParams};
use crate::ids::TaskId;
use crate::spatial::{PredicateParams, SpatialError, SpatialMemory};

/// Append-only record of applied events.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TemporalQueue {
    pub records: Vec<Event>,
}

impl TemporalQueue {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&Event> {
        self.records.last()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &Event> {
        self.records.iter()
    }

    pub fn for_task<'a>(&'a self, task: &'a TaskId) -> impl DoubleEndedIterator<Item = &'a Event> + 'a {
        self.records.iter().filter(move |e| e.task_id.as_ref() == Some(task))
    }

    /// Events with `seq > after`.
    pub fn since(&self, after: u64) -> &[Event] {
        // seq == index + 1 for a log folded from M0.
        let start = self.records.partition_point(|e| e.seq <= after);
        &self.records[start..]
    }
}

/// The shared memory triple plus the number of events folded into it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MemoryState {
    pub spatial: SpatialMemory,
    pub temporal: TemporalQueue,
    pub embodiment: EmbodimentRegistry,
    pub version: u64,
}

fn spatial_err(e: SpatialError) -> StemError {
    match e {
        SpatialError::UnknownNode(_) | SpatialError::UnknownObject(_) | SpatialError::OrphanCarrier { .. } => {
            StemError::DanglingReference(e.to_string())
        }
        other => StemError::MalformedDelta(other.to_string()),
    }
}

fn embodiment_err(e: EmbodimentError) -> StemError {
    match e {
        EmbodimentError::UnknownRobot(_) | EmbodimentError::UnknownLocation(_) => StemError::DanglingReference(e.to_string()),
        other => StemError::MalformedDelta(other.to_string()),
    }
}

impl MemoryState {
    /// Empty memory: a root-only scene tree and no robots.
    pub fn initial(predicates: PredicateParams, registry: RegistryParams) -> Self {
        Self {
            spatial: SpatialMemory { params: predicates, ..SpatialMemory::default() },
            temporal: TemporalQueue::default(),
            embodiment: EmbodimentRegistry::new(registry),
            version: 0,
        }
    }

    fn validate_header(&self, event: &Event) -> Result<(), StemError> {
        if event.seq != self.version + 1 {
            return Err(StemError::SequenceGap { expected: self.version + 1, found: event.seq });
        }
        if let Some(last) = self.temporal.last() {
            if event.tau < last.tau {
                return Err(StemError::MalformedDelta(format!("tau {} precedes {}", event.tau, last.tau)));
            }
        }
        if event.is_empty() {
            return Err(StemError::MalformedDelta("event carries no delta and no tool record".into()));
        }
        if event.tool_log.iter().any(|r| r.status == ToolStatus::Fail && r.feedback.trim().is_empty()) {
            return Err(StemError::MalformedDelta("FAIL record without feedback".into()));
        }
        Ok(())
    }

    /// Applies `event` in place. On error the state is untouched.
    pub fn apply_mut(&mut self, event: &Event) -> Result<(), StemError> {
        self.validate_header(event)?;
        match (&event.spatial_delta, &event.embodiment_delta) {
            (Some(sd), Some(ed)) => {
                let mut staged = self.spatial.clone();
                staged.apply(sd).map_err(spatial_err)?;
                self.embodiment.check(ed, &staged.tree).map_err(embodiment_err)?;
                self.spatial = staged;
                self.embodiment.apply(ed, &self.spatial.tree).map_err(embodiment_err)?;
            }
            (Some(sd), None) => self.spatial.apply(sd).map_err(spatial_err)?,
            (None, Some(ed)) => self.embodiment.apply(ed, &self.spatial.tree).map_err(embodiment_err)?,
            (None, None) => {}
        }
        self.temporal.records.push(event.clone());
        self.version += 1;
        Ok(())
    }
}

/// One step of the fold: returns the successor state, leaving `state` as is.
pub fn apply_event(state: &MemoryState, event: &Event) -> Result<MemoryState, StemError> {
    let mut next = state.clone();
    next.apply_mut(event)?;
    Ok(next)
}

/// Left fold of `events` over `initial`.
pub fn reduce<'a>(initial: &MemoryState, events: impl IntoIterator<Item = &'a Event>) -> Result<MemoryState, StemError> {
    let mut state = initial.clone();
    for e in events {
        state.apply_mut(e).map_err(|source| StemError::AtEvent { seq: e.seq, source: Box::new(source) })?;
    }
    Ok(state)
}
