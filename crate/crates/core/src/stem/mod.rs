//! The memory state triple and its event fold.
//!
//! `MemoryState` is never edited directly: every change is an [`Event`]
//! applied by [`apply_event`] / [`MemoryState::apply_mut`], and the state at
//! version `k` is the fold of events `1..=k` over the initial state. The
//! temporal queue keeps every applied event, so a snapshot plus the
//! remainder of the log reproduces the full fold byte for byte.

mod digest;
mod event;
mod snapshot;
mod state;

pub use digest::{
    all_regions, build_digest, object_origins, CarrierSummary, DigestScope, FeedbackEntry, MemoryDigest, ObjectMove,
    ObjectSummary, RobotSummary,
};
pub use event::{Event, ToolCallRecord, ToolStatus};
pub use snapshot::{decode_log, encode_log, read_log, read_snapshot, restore, snapshot, write_log, write_snapshot};
pub use state::{apply_event, reduce, MemoryState, TemporalQueue};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StemError {
    #[error("sequence gap: expected seq {expected}, found {found}")]
    SequenceGap { expected: u64, found: u64 },
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("malformed delta: {0}")]
    MalformedDelta(String),
    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),
    #[error("corrupt event log at line {line}: {reason}")]
    CorruptLog { line: usize, reason: String },
    #[error("at event {seq}: {source}")]
    AtEvent { seq: u64, source: Box<StemError> },
    #[error("io: {0}")]
    Io(String),
}

impl StemError {
    /// The underlying error without the event-position wrapper.
    pub fn root(&self) -> &StemError {
        match self {
            StemError::AtEvent { source, .. } => source.root(),
            other => other,
        }
    }
}
