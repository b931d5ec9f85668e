//! Versioned text container for on-disk objects.
//!
//! Every persisted object (instance, parameter snapshot, run manifest) is one
//! JSON document per file with an explicit `schema_version` field. JSON keeps
//! the files human-readable at desk scale and serde's float formatting
//! round-trips every `f64` bit-exactly.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

use crate::error::{CpraError, Result};

/// Current container schema version.
pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Serialize, Deserialize)]
struct Envelope<T> {
    schema_version: String,
    kind: String,
    body: T,
}

/// Writes `body` to `path` as a versioned document of the given kind.
pub fn save<T: Serialize>(path: &Path, kind: &str, body: &T) -> Result<()> {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION.to_string(),
        kind: kind.to_string(),
        body,
    };
    let text = serde_json::to_string_pretty(&envelope)?;
    fs::write(path, text)?;
    Ok(())
}

/// Reads a versioned document of the expected kind from `path`.
///
/// Rejects documents whose schema version or kind does not match, and maps
/// malformed/truncated files to a schema error.
pub fn load<T: DeserializeOwned>(path: &Path, expected_kind: &str) -> Result<T> {
    let text = fs::read_to_string(path)?;
    let envelope: Envelope<T> = serde_json::from_str(&text)
        .map_err(|e| CpraError::Schema(format!("{}: {e}", path.display())))?;
    if envelope.schema_version != SCHEMA_VERSION {
        return Err(CpraError::Schema(format!(
            "unsupported schema version {:?} (expected {:?})",
            envelope.schema_version, SCHEMA_VERSION
        )));
    }
    if envelope.kind != expected_kind {
        return Err(CpraError::Schema(format!(
            "unexpected document kind {:?} (expected {:?})",
            envelope.kind, expected_kind
        )));
    }
    Ok(envelope.body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Blob {
        x: f64,
        tag: String,
    }

    #[test]
    fn round_trip_preserves_floats_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("blob.json");
        let blob = Blob {
            x: 0.1 + 0.2,
            tag: "t".into(),
        };
        save(&path, "blob", &blob).unwrap();
        let back: Blob = load(&path, "blob").unwrap();
        assert_eq!(back.x.to_bits(), blob.x.to_bits());
        assert_eq!(back, blob);
    }

    #[test]
    fn truncated_file_is_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("blob.json");
        let blob = Blob { x: 1.0, tag: "t".into() };
        save(&path, "blob", &blob).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, &text[..text.len() / 2]).unwrap();
        let err = load::<Blob>(&path, "blob").unwrap_err();
        assert!(matches!(err, CpraError::Schema(_)));
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("blob.json");
        save(&path, "blob", &Blob { x: 1.0, tag: "t".into() }).unwrap();
        let err = load::<Blob>(&path, "other").unwrap_err();
        assert!(matches!(err, CpraError::Schema(_)));
    }
}
