//! Field snapshot files.
//!
//! Layout (little-endian): magic `SLPF`, version `u32`, `n1 u32`, `n2 u32`,
//! name length `u32`, name bytes, then row-major `f64` node values
//! (`(n2+1) * n1` of them, `y2`-major).

use crate::error::{Error, Result};
use ndarray::Array2;
use std::io::{Read, Write};
use std::path::Path;

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"SLPF";
pub const SNAPSHOT_VERSION: u32 = 1;

pub fn write_snapshot(path: &Path, name: &str, n1: usize, n2: usize, data: &Array2<f64>) -> Result<()> {
    assert_eq!(data.dim(), (n2 + 1, n1));
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    w.write_all(&(n1 as u32).to_le_bytes())?;
    w.write_all(&(n2 as u32).to_le_bytes())?;
    w.write_all(&(name.len() as u32).to_le_bytes())?;
    w.write_all(name.as_bytes())?;
    for v in data.iter() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<(String, usize, usize, Array2<f64>)> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::SnapshotFormat(format!("bad magic {magic:?}")));
    }
    let mut buf4 = [0u8; 4];
    r.read_exact(&mut buf4)?;
    let version = u32::from_le_bytes(buf4);
    if version != SNAPSHOT_VERSION {
        return Err(Error::SnapshotFormat(format!("unsupported version {version}")));
    }
    r.read_exact(&mut buf4)?;
    let n1 = u32::from_le_bytes(buf4) as usize;
    r.read_exact(&mut buf4)?;
    let n2 = u32::from_le_bytes(buf4) as usize;
    r.read_exact(&mut buf4)?;
    let name_len = u32::from_le_bytes(buf4) as usize;
    if name_len > 4096 {
        return Err(Error::SnapshotFormat(format!("implausible name length {name_len}")));
    }
    let mut name_bytes = vec![0u8; name_len];
    r.read_exact(&mut name_bytes)?;
    let name = String::from_utf8(name_bytes)
        .map_err(|e| Error::SnapshotFormat(format!("name is not utf-8: {e}")))?;
    let count = (n2 + 1) * n1;
    let mut values = Vec::with_capacity(count);
    let mut buf8 = [0u8; 8];
    for _ in 0..count {
        r.read_exact(&mut buf8)?;
        values.push(f64::from_le_bytes(buf8));
    }
    let data = Array2::from_shape_vec((n2 + 1, n1), values)
        .map_err(|e| Error::SnapshotFormat(e.to_string()))?;
    Ok((name, n1, n2, data))
}
