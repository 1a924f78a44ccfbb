use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::RunConfig;
use crate::error::Result;

/// Hex SHA-256 of the config's JSON form. Thread count is not part of it.
pub fn config_hash(config: &RunConfig) -> Result<String> {
    let json = serde_json::to_vec(config)?;
    Ok(Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthRecord {
    pub ticker: String,
    pub month: String,
    pub days: Vec<NaiveDate>,
    pub missing: Vec<NaiveDate>,
    pub ticks: usize,
    pub length_class: Option<usize>,
    pub tests: Vec<String>,
}

/// Written next to every result table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub code_version: String,
    pub config_hash: String,
    pub alpha: f64,
    pub p_floor: f64,
    pub max_level: usize,
    pub seeds: Vec<u64>,
    pub config: RunConfig,
    pub months: Vec<MonthRecord>,
}

impl Manifest {
    pub fn new(config: &RunConfig, months: Vec<MonthRecord>) -> Result<Self> {
        Ok(Self {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash(config)?,
            alpha: config.alpha.get(),
            p_floor: config.p_floor,
            max_level: config.max_level,
            seeds: Vec::new(),
            config: config.clone(),
            months,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
