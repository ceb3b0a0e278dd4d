//! Checkpoint files: one line of JSON header followed by the field as
//! little-endian 64-bit floats.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::sim::SimState;
use crate::error::{Error, Result};
use crate::report::{write_file, Provenance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub config: SimConfig,
    pub provenance: Provenance,
    pub step: usize,
    pub t: f64,
    pub shift: f64,
    pub shift_rate: f64,
    pub len: usize,
}

pub fn encode_checkpoint(config: &SimConfig, state: &SimState) -> Result<Vec<u8>> {
    let header = CheckpointHeader {
        config: config.clone(),
        provenance: Provenance::of(config)?,
        step: state.step,
        t: state.t,
        shift: state.shift,
        shift_rate: state.shift_rate,
        len: state.u.len(),
    };
    let mut bytes = serde_json::to_vec(&header)?;
    bytes.push(b'\n');
    bytes.reserve(8 * state.u.len());
    for v in &state.u {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    Ok(bytes)
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<(CheckpointHeader, Vec<f64>)> {
    let split = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Config("checkpoint has no header line".into()))?;
    let header: CheckpointHeader = serde_json::from_slice(&bytes[..split])?;
    let body = &bytes[split + 1..];
    if body.len() != 8 * header.len {
        return Err(Error::Config(format!("checkpoint body holds {} bytes, expected {}", body.len(), 8 * header.len)));
    }
    let u = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunks of eight bytes"))).collect();
    Ok((header, u))
}

pub fn write_checkpoint(path: impl AsRef<Path>, config: &SimConfig, state: &SimState) -> Result<()> {
    write_file(path, encode_checkpoint(config, state)?)
}

pub fn read_checkpoint(path: impl AsRef<Path>) -> Result<(CheckpointHeader, Vec<f64>)> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_checkpoint(&bytes)
}
