use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{BitString, MonthlyString, RatioDirection};
use crate::error::{Error, Result};

/// JSON sidecar written next to every ASCII bit file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitFileMeta {
    pub ticker: String,
    pub month: String,
    pub level: usize,
    pub sample: usize,
    pub length: usize,
    pub day_boundaries: Vec<usize>,
    pub ratio_direction: RatioDirection,
}

impl BitFileMeta {
    pub fn for_month(m: &MonthlyString, direction: RatioDirection) -> Self {
        Self {
            ticker: m.ticker.clone(),
            month: m.month.clone(),
            level: m.level,
            sample: m.sample,
            length: m.bits.len(),
            day_boundaries: m.day_boundaries.clone(),
            ratio_direction: direction,
        }
    }

    /// `TICKER_YYYY-MM_L007_J003`
    pub fn stem(&self) -> String {
        format!("{}_{}_L{:03}_J{:03}", self.ticker, self.month, self.level, self.sample)
    }
}

/// Writes `<dir>/<stem>.bits` (ASCII `0`/`1`, no separators) and `<dir>/<stem>.json`.
/// Returns the path of the bit file.
pub fn write_bit_file(dir: &Path, bits: &BitString, meta: &BitFileMeta) -> Result<PathBuf> {
    if meta.length != bits.len() {
        return Err(Error::Domain(format!(
            "sidecar length {} does not match {} bits",
            meta.length,
            bits.len()
        )));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = meta.stem();
    let bit_path = dir.join(format!("{stem}.bits"));
    fs::write(&bit_path, bits.to_ascii()).map_err(|e| Error::io(&bit_path, e))?;
    let json_path = dir.join(format!("{stem}.json"));
    let json = serde_json::to_string_pretty(meta)?;
    fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))?;
    Ok(bit_path)
}

/// Reads a bit file and, when present, its sidecar.
pub fn read_bit_file(path: &Path) -> Result<(BitString, Option<BitFileMeta>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bits = BitString::from_ascii(&text)?;
    let sidecar = path.with_extension("json");
    let meta = if sidecar.exists() {
        let raw = fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
        let meta: BitFileMeta = serde_json::from_str(&raw)?;
        if meta.length != bits.len() {
            return Err(Error::Domain(format!(
                "{}: sidecar says {} bits, file has {}",
                path.display(),
                meta.length,
                bits.len()
            )));
        }
        Some(meta)
    } else {
        None
    };
    Ok((bits, meta))
}
