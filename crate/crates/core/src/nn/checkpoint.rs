//! JSON weight checkpoints.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::adam::AdamState;
use super::net::{NetParams, NetSpec};
use crate::error::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub spec_fingerprint: String,
    pub spec: NetSpec,
    pub seed: u64,
    pub weights: Vec<f64>,
    pub adam: Option<AdamState>,
}

impl Checkpoint {
    pub fn new(spec: &NetSpec, params: &NetParams, seed: u64, adam: Option<&AdamState>) -> Self {
        Self {
            format_version: CHECKPOINT_VERSION,
            spec_fingerprint: spec.fingerprint(),
            spec: spec.clone(),
            seed,
            weights: params.weights.clone(),
            adam: adam.cloned(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self)?;
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ckpt: Checkpoint = serde_json::from_str(&text)?;
        if ckpt.format_version != CHECKPOINT_VERSION {
            return Err(Error::Validation(format!(
                "checkpoint format version {} (expected {CHECKPOINT_VERSION})",
                ckpt.format_version
            )));
        }
        Ok(ckpt)
    }

    /// Reads a checkpoint and verifies it was produced for `spec`.
    pub fn load(path: &Path, spec: &NetSpec) -> Result<(Self, NetParams)> {
        let ckpt = Self::read(path)?;
        let expected = spec.fingerprint();
        if ckpt.spec_fingerprint != expected || ckpt.spec.fingerprint() != expected {
            return Err(Error::Fingerprint {
                expected,
                found: ckpt.spec_fingerprint,
            });
        }
        let params = NetParams::from_weights(spec, ckpt.weights.clone())?;
        Ok((ckpt, params))
    }
}
