use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::field::{Slot, TensorField};
use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// File layout: u64 little-endian header length, the JSON header, then the
/// component array as little-endian f64 in storage order (slots outermost,
/// grid axes innermost).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub n: usize,
    pub resolution: usize,
    pub slots: Vec<Slot>,
    pub byte_order: String,
    pub element: String,
    #[serde(default)]
    pub label: String,
}

pub fn write_snapshot(path: &Path, field: &TensorField, label: &str) -> Result<()> {
    let header = SnapshotHeader {
        n: field.grid().n(),
        resolution: field.grid().resolution(),
        slots: field.slots().to_vec(),
        byte_order: "little-endian".into(),
        element: "binary64".into(),
        label: label.into(),
    };
    let json = serde_json::to_vec(&header)?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&(json.len() as u64).to_le_bytes())?;
    w.write_all(&json)?;
    for v in field.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<(SnapshotHeader, TensorField)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut len = [0u8; 8];
    r.read_exact(&mut len)?;
    let len = u64::from_le_bytes(len) as usize;
    if len > 1 << 20 {
        return Err(Error::Config(format!("snapshot header of {len} bytes is implausible")));
    }
    let mut json = vec![0u8; len];
    r.read_exact(&mut json)?;
    let header: SnapshotHeader = serde_json::from_slice(&json)?;
    if header.byte_order != "little-endian" || header.element != "binary64" {
        return Err(Error::Config("unsupported snapshot encoding".into()));
    }
    let grid = TorusGrid::new(header.n, header.resolution)?;
    let count = grid.dim().pow(header.slots.len() as u32) * grid.npts();
    let mut raw = vec![0u8; count * 8];
    r.read_exact(&mut raw)?;
    let data = raw.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes"))).collect();
    let field = TensorField::from_data(grid, &header.slots, data)?;
    Ok((header, field))
}
