//! Canonical text encoding.
//!
//! Every persisted artifact (snapshots, event logs, traces, reports) goes
//! through [`to_string`]: JSON with lexicographically sorted object keys
//! and shortest round-trip float formatting. Equal values always produce
//! equal bytes, and decoding then re-encoding is the identity.

use serde::de::DeserializeOwned;
use serde::Serialize;

pub use serde_json::Error;

/// Encodes `value` canonically on a single line.
pub fn to_string<T: Serialize + ?Sized>(value: &T) -> Result<String, Error> {
    // `Value`'s map is ordered, so routing through it sorts struct fields
    // and map keys alike.
    let value = serde_json::to_value(value)?;
    serde_json::to_string(&value)
}

pub fn to_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, Error> {
    to_string(value).map(String::into_bytes)
}

pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T, Error> {
    serde_json::from_str(text)
}

pub fn from_slice<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, Error> {
    serde_json::from_slice(bytes)
}

/// Hex SHA-256 of the canonical encoding; used to compare large states.
pub fn digest<T: Serialize + ?Sized>(value: &T) -> Result<String, Error> {
    use sha2::{Digest, Sha256};
    let bytes = to_bytes(value)?;
    let hash = Sha256::digest(&bytes);
    Ok(hash.iter().map(|b| format!("{b:02x}")).collect())
}
