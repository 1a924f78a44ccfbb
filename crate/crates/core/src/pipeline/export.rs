use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{month_strings, run_strings, ResultRow};
use crate::bitcore::{BitString, MonthlyString, RatioDirection, Symbolization};
use crate::error::{Error, Result};
use crate::ingest::TradeDay;
use crate::stattests::{run_units, BatteryOptions, Outcome, TestSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExportSamples {
    /// One phase sample `j`.
    One(usize),
    /// Samples `1..=ℓ` concatenated in order.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportOptions {
    pub level: usize,
    pub samples: ExportSamples,
    /// Levels below this are refused outright.
    pub min_level: usize,
}

impl ExportOptions {
    pub fn new(level: usize) -> Self {
        Self {
            level,
            samples: ExportSamples::One(1),
            min_level: 1,
        }
    }
}

/// Provenance of an exported stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub ticker: String,
    pub month: String,
    pub level: usize,
    pub samples: Vec<usize>,
    pub n_bits: usize,
    pub ties: usize,
    pub days: usize,
    pub alpha: f64,
    /// Tests that ran and passed on every exported sample.
    pub certifying_tests: Vec<String>,
    /// Tests too long for the exported strings.
    pub skipped_tests: Vec<String>,
    /// Smallest p-value per certifying test over the exported samples.
    pub min_p_values: BTreeMap<String, f64>,
    pub code_version: String,
}

impl Certificate {
    pub fn stem(&self) -> String {
        let samples = match self.samples.as_slice() {
            [j] => format!("J{j:03}"),
            _ => "Jall".to_string(),
        };
        format!("{}_{}_L{:03}_{samples}", self.ticker, self.month, self.level)
    }
}

/// Certifies and concatenates the chosen `(ℓ, j)` strings of one ticker-month.
///
/// Refuses when any spec rejects any exported sample, when no spec could run,
/// or when `ℓ` is below `min_level`.
pub fn export_bits(
    strings: &[MonthlyString],
    specs: &[TestSpec],
    opts: &BatteryOptions,
    export: &ExportOptions,
) -> Result<(BitString, Certificate)> {
    let level = export.level;
    if level < export.min_level {
        return Err(Error::ExportRefused(format!(
            "level {level} is below the minimum level {}",
            export.min_level
        )));
    }
    let wanted: Vec<usize> = match export.samples {
        ExportSamples::One(j) if j == 0 || j > level => {
            return Err(Error::Config(format!("sample {j} is not in 1..={level}")))
        }
        ExportSamples::One(j) => vec![j],
        ExportSamples::All => (1..=level).collect(),
    };
    let chosen: Vec<&MonthlyString> = wanted
        .iter()
        .map(|&j| {
            strings
                .iter()
                .find(|m| m.level == level && m.sample == j)
                .ok_or_else(|| Error::Config(format!("no monthly string at level {level}, sample {j}")))
        })
        .collect::<Result<_>>()?;
    let first = chosen[0];

    let mut failures = Vec::new();
    let mut ran: BTreeMap<String, f64> = BTreeMap::new();
    let mut skipped = Vec::new();
    for spec in specs {
        for m in &chosen {
            let r = run_units(spec, &m.bits.to_units(), opts)?;
            match r.outcome {
                Outcome::Reject => failures.push(format!("{} (j={})", spec.id, m.sample)),
                Outcome::Pass => {
                    let p = r.p_value().unwrap_or(1.0);
                    let e = ran.entry(spec.id.clone()).or_insert(p);
                    *e = e.min(p);
                }
                Outcome::Skipped => {
                    if !skipped.contains(&spec.id) {
                        skipped.push(spec.id.clone());
                    }
                }
            }
        }
    }
    if !failures.is_empty() {
        return Err(Error::ExportRefused(format!(
            "{} {} level {level}: rejected by {}",
            first.ticker,
            first.month,
            failures.join(", ")
        )));
    }
    if ran.is_empty() {
        return Err(Error::ExportRefused(format!(
            "{} {} level {level}: no test could run on {} bits",
            first.ticker,
            first.month,
            first.bits.len()
        )));
    }
    // a spec that ran on some samples but was too long for others certifies nothing
    let certifying: Vec<String> = specs
        .iter()
        .filter(|s| ran.contains_key(&s.id) && !skipped.contains(&s.id))
        .map(|s| s.id.clone())
        .collect();
    ran.retain(|id, _| certifying.contains(id));

    let mut bits = BitString::new();
    for m in &chosen {
        bits.extend_from(&m.bits);
    }
    let cert = Certificate {
        ticker: first.ticker.clone(),
        month: first.month.clone(),
        level,
        samples: wanted,
        n_bits: bits.len(),
        ties: chosen.iter().map(|m| m.ties).sum(),
        days: first.day_boundaries.len(),
        alpha: opts.alpha.get(),
        certifying_tests: certifying,
        skipped_tests: skipped,
        min_p_values: ran,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    Ok((bits, cert))
}

/// Writes `<stem>.bits` and `<stem>.cert.json`; returns the bit file path.
pub fn write_export(dir: &Path, bits: &BitString, cert: &Certificate) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = cert.stem();
    let bit_path = dir.join(format!("{stem}.bits"));
    fs::write(&bit_path, bits.to_ascii()).map_err(|e| Error::io(&bit_path, e))?;
    let cert_path = dir.join(format!("{stem}.cert.json"));
    fs::write(&cert_path, serde_json::to_string_pretty(cert)?).map_err(|e| Error::io(&cert_path, e))?;
    Ok(bit_path)
}

/// Base and median-balanced results for the same `(test, ℓ, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedRow {
    pub ticker: String,
    pub month: String,
    pub test_id: String,
    pub level: usize,
    pub sample: usize,
    pub base_n_bits: usize,
    pub base_p: Option<f64>,
    pub base_decision: Outcome,
    pub median_n_bits: usize,
    pub median_p: Option<f64>,
    pub median_decision: Outcome,
}

impl PairedRow {
    fn pair(base: ResultRow, median: ResultRow) -> Self {
        debug_assert_eq!((&base.test_id, base.level, base.sample), (&median.test_id, median.level, median.sample));
        Self {
            ticker: base.ticker,
            month: base.month,
            test_id: base.test_id,
            level: base.level,
            sample: base.sample,
            base_n_bits: base.n_bits,
            base_p: base.p_value,
            base_decision: base.decision,
            median_n_bits: median.n_bits,
            median_p: median.p_value,
            median_decision: median.decision,
        }
    }

    pub fn agree(&self) -> bool {
        self.base_decision == self.median_decision
    }
}

/// Runs both symbolizations of one ticker-month side by side.
pub fn compare_variants(
    days: &[TradeDay],
    max_level: usize,
    direction: RatioDirection,
    specs: &[TestSpec],
    opts: &BatteryOptions,
) -> Result<Vec<PairedRow>> {
    let run = |mode| -> Result<Vec<ResultRow>> {
        let strings = month_strings(days, max_level, direction, mode)?;
        run_strings(&strings, specs, opts, super::P_FLOOR)
    };
    let base = run(Symbolization::Base)?;
    let median = run(Symbolization::Median)?;
    Ok(base.into_iter().zip(median).map(|(b, m)| PairedRow::pair(b, m)).collect())
}

pub const PAIRED_HEADER: [&str; 11] = [
    "ticker",
    "month",
    "test_id",
    "level",
    "sample",
    "base_n_bits",
    "base_p_value",
    "base_decision",
    "median_n_bits",
    "median_p_value",
    "median_decision",
];

pub fn write_paired_csv<W: Write>(rows: &[PairedRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PAIRED_HEADER)?;
    let opt = |p: Option<f64>| p.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.ticker.clone(),
            r.month.clone(),
            r.test_id.clone(),
            r.level.to_string(),
            r.sample.to_string(),
            r.base_n_bits.to_string(),
            opt(r.base_p),
            r.base_decision.as_str().to_string(),
            r.median_n_bits.to_string(),
            opt(r.median_p),
            r.median_decision.as_str().to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<paired>", e))?;
    Ok(())
}
