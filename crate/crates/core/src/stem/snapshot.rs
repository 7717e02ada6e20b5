use std::path::Path;

use serde::{Deserialize, Serialize};

use super::event::Event;
use super::state::MemoryState;
use super::StemError;
use crate::canonical;

pub const SNAPSHOT_FORMAT: u32 = 1;

#[derive(Serialize, Deserialize)]
struct SnapshotDoc {
    format_version: u32,
    version: u64,
    state: MemoryState,
}

/// Canonical bytes of `state`; equal states give equal bytes.
pub fn snapshot(state: &MemoryState) -> Vec<u8> {
    #[derive(Serialize)]
    struct Doc<'a> {
        format_version: u32,
        version: u64,
        state: &'a MemoryState,
    }
    canonical::to_bytes(&Doc { format_version: SNAPSHOT_FORMAT, version: state.version, state })
        .expect("memory state is always serializable")
}

pub fn restore(bytes: &[u8]) -> Result<MemoryState, StemError> {
    let doc: SnapshotDoc = canonical::from_slice(bytes).map_err(|e| StemError::CorruptSnapshot(e.to_string()))?;
    if doc.format_version != SNAPSHOT_FORMAT {
        return Err(StemError::CorruptSnapshot(format!("unsupported format {}", doc.format_version)));
    }
    if doc.version != doc.state.version || doc.state.temporal.len() as u64 != doc.state.version {
        return Err(StemError::CorruptSnapshot("header version disagrees with state".into()));
    }
    doc.state.spatial.tree.validate().map_err(|e| StemError::CorruptSnapshot(e.to_string()))?;
    Ok(doc.state)
}

pub fn write_snapshot(path: &Path, state: &MemoryState) -> Result<(), StemError> {
    std::fs::write(path, snapshot(state)).map_err(|e| StemError::Io(e.to_string()))
}

pub fn read_snapshot(path: &Path) -> Result<MemoryState, StemError> {
    restore(&std::fs::read(path).map_err(|e| StemError::Io(e.to_string()))?)
}

/// One canonical line per event.
pub fn encode_log(events: &[Event]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&canonical::to_string(e).expect("events are serializable"));
        out.push('\n');
    }
    out
}

pub fn decode_log(text: &str) -> Result<Vec<Event>, StemError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| canonical::from_str(l).map_err(|e| StemError::CorruptLog { line: i + 1, reason: e.to_string() }))
        .collect()
}

pub fn write_log(path: &Path, events: &[Event]) -> Result<(), StemError> {
    std::fs::write(path, encode_log(events)).map_err(|e| StemError::Io(e.to_string()))
}

pub fn read_log(path: &Path) -> Result<Vec<Event>, StemError> {
    decode_log(&std::fs::read_to_string(path).map_err(|e| StemError::Io(e.to_string()))?)
}
