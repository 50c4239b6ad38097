//! Run metadata written next to every output.

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::material::config::ParameterRecord;
use crate::mesh::Mesh;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub tool_version: String,
    /// Fully resolved configuration, defaults included.
    pub config: serde_json::Value,
    /// SHA-256 of the mesh in text form.
    pub mesh_sha256: Option<String>,
    /// Material parameters with their provenance (`paper`, `default`, `user`).
    pub parameters: Vec<ParameterRecord>,
    pub seed: Option<u64>,
    pub jobs: usize,
    pub started_unix_s: u64,
    pub wall_clock_s: f64,
    pub outputs: Vec<String>,
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| crate::Error::Parse(e.to_string()))
    }
}

pub fn mesh_hash(mesh: &Mesh) -> String {
    Sha256::digest(mesh.to_text().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Clock started when a command begins.
pub(crate) struct Clock {
    started: SystemTime,
    timer: Instant,
}

impl Clock {
    pub fn start() -> Self {
        Self {
            started: SystemTime::now(),
            timer: Instant::now(),
        }
    }

    pub fn unix_s(&self) -> u64 {
        self.started.duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
    }

    pub fn elapsed_s(&self) -> f64 {
        self.timer.elapsed().as_secs_f64()
    }
}
