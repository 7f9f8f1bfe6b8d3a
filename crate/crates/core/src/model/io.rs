//! Binary model files.
//!
//! Layout, all integers and floats little-endian:
//!
//! | bytes     | content                                  |
//! |-----------|------------------------------------------|
//! | 8         | magic `SPCLFMD1`                         |
//! | 8         | `d`, feature dimension (u64)             |
//! | 8         | `k`, class count (u64)                   |
//! | 32        | SHA-256 manifest hash                    |
//! | 8·k·d     | `W`, row-major f64                       |
//! | 8·k       | `b`, f64                                 |

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{LinearModel, ModelError};
use crate::corpus::Manifest;

pub const MODEL_MAGIC: &[u8; 8] = b"SPCLFMD1";

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_model(model: &LinearModel, path: &Path) -> Result<(), ModelError> {
    let io_err = |source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    w.write_all(MODEL_MAGIC).map_err(io_err)?;
    w.write_all(&(model.dim() as u64).to_le_bytes()).map_err(io_err)?;
    w.write_all(&(model.num_classes() as u64).to_le_bytes()).map_err(io_err)?;
    w.write_all(model.manifest_hash()).map_err(io_err)?;
    for v in model.weights().iter().chain(model.bias()) {
        w.write_all(&v.to_le_bytes()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Read a model and check it was trained against `manifest`.
pub fn read_model(path: &Path, manifest: &Manifest) -> Result<LinearModel, ModelError> {
    let io_err = |source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::open(path).map_err(io_err)?;
    let mut r = BufReader::new(file);
    let truncated = |_| ModelError::Format("file truncated".into());

    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(truncated)?;
    if &magic != MODEL_MAGIC {
        return Err(ModelError::Format("bad magic".into()));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word).map_err(truncated)?;
    let d = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word).map_err(truncated)?;
    let k = u64::from_le_bytes(word) as usize;
    let mut hash = [0u8; 32];
    r.read_exact(&mut hash).map_err(truncated)?;

    let expected = manifest.hash();
    if hash != expected {
        return Err(ModelError::ManifestMismatch {
            model: hex(&hash),
            given: hex(&expected),
        });
    }
    if k != manifest.len() {
        return Err(ModelError::Format(format!(
            "model has {k} classes, manifest has {}",
            manifest.len()
        )));
    }
    let n = k
        .checked_mul(d)
        .and_then(|kd| kd.checked_add(k))
        .filter(|&n| n <= (1 << 32))
        .ok_or_else(|| ModelError::Format(format!("implausible shape {k}x{d}")))?;

    let mut buf = vec![0u8; n * 8];
    r.read_exact(&mut buf).map_err(truncated)?;
    let mut rest = Vec::new();
    r.read_to_end(&mut rest).map_err(io_err)?;
    if !rest.is_empty() {
        return Err(ModelError::Format("trailing bytes".into()));
    }
    let mut values: Vec<f64> = buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let b = values.split_off(k * d);
    LinearModel::from_parts(k, d, values, b, hash)
}
