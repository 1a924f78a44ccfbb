//! End-to-end runs: day files → monthly strings → filtered battery → result tables.

mod export;
mod manifest;
mod results;

pub use export::{
    compare_variants, export_bits, write_export, write_paired_csv, Certificate, ExportOptions, ExportSamples, PairedRow,
    PAIRED_HEADER,
};
pub use manifest::{config_hash, Manifest, MonthRecord};
pub use results::{
    neg_log10, quantile_sorted, summarize, write_boxplot_csv, BoxplotRow, ResultRow, ResultSet, BOXPLOT_HEADER,
    P_FLOOR, RESULT_HEADER,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitcore::{build_grid_with, concat_month, month_label, DayGrid, MonthlyString, RatioDirection, Symbolization};
use crate::error::{Error, Result};
use crate::ingest::{read_day_file, TradeDay};
use crate::sanity::{nearest_class, ExclusionFile, LengthClass};
use crate::stattests::{run_units, Alpha, BatteryOptions, NullModel, Outcome, TestSpec};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingDays {
    /// Run on the days present and record the gaps.
    #[default]
    Warn,
    Fatal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub tickers: Vec<String>,
    /// `YYYY-MM` labels.
    pub months: Vec<String>,
    pub max_level: usize,
    pub alpha: Alpha,
    pub specs: Vec<TestSpec>,
    pub exclusions: Option<ExclusionFile>,
    /// Explicit ticker classes; unlisted tickers get the canonical length
    /// nearest to their level-1 monthly string.
    pub length_classes: LengthClass,
    pub direction: RatioDirection,
    pub symbolization: Symbolization,
    pub missing: MissingDays,
    pub p_floor: f64,
    pub entropy_k: Option<usize>,
    pub null_model: NullModel,
    /// Worker threads; 0 lets the pool decide.
    #[serde(skip)]
    pub jobs: usize,
}

impl RunConfig {
    pub fn new(tickers: Vec<String>, months: Vec<String>, specs: Vec<TestSpec>) -> Self {
        Self {
            tickers,
            months,
            max_level: 100,
            alpha: Alpha::default(),
            specs,
            exclusions: None,
            length_classes: LengthClass::default(),
            direction: RatioDirection::default(),
            symbolization: Symbolization::Base,
            missing: MissingDays::Warn,
            p_floor: P_FLOOR,
            entropy_k: None,
            null_model: NullModel::default(),
            jobs: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_level == 0 {
            return Err(Error::Config("max level must be at least 1".into()));
        }
        if self.months.is_empty() {
            return Err(Error::Config("no months selected".into()));
        }
        if self.tickers.is_empty() {
            return Err(Error::Config("no tickers selected".into()));
        }
        if !(self.p_floor > 0.0 && self.p_floor < 1.0) {
            return Err(Error::Config(format!("p floor {} outside (0, 1)", self.p_floor)));
        }
        for m in &self.months {
            parse_month(m)?;
        }
        for s in &self.specs {
            s.validate()?;
        }
        Ok(())
    }

    pub fn battery_options(&self) -> BatteryOptions {
        BatteryOptions {
            alpha: self.alpha,
            null_model: self.null_model,
            entropy_k: self.entropy_k,
        }
    }

    /// Runs `f` on a pool of `jobs` threads, or on the global pool when `jobs` is 0.
    pub fn in_pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        if self.jobs == 0 {
            return Ok(f());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}

fn parse_month(label: &str) -> Result<(i32, u32)> {
    NaiveDate::parse_from_str(&format!("{label}-01"), "%Y-%m-%d")
        .map(|d| (chrono::Datelike::year(&d), chrono::Datelike::month(&d)))
        .map_err(|_| Error::Config(format!("month `{label}` is not YYYY-MM")))
}

/// The days of one ticker in one month, plus the expected days that are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthInput {
    pub ticker: String,
    pub month: String,
    pub days: Vec<TradeDay>,
    pub missing: Vec<NaiveDate>,
}

/// `(ticker, date) → path` of every `TICKER_YYYY-MM-DD.day.csv` in `dir`.
pub fn discover_days(dir: &Path) -> Result<BTreeMap<(String, NaiveDate), PathBuf>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        let Some(stem) = name.strip_suffix(".day.csv") else {
            continue;
        };
        let parsed = stem
            .rsplit_once('_')
            .and_then(|(t, d)| Some((t.to_string(), NaiveDate::parse_from_str(d, "%Y-%m-%d").ok()?)));
        match parsed {
            Some(key) => {
                out.insert(key, path);
            }
            None => log::warn!("ignoring {name}: not TICKER_YYYY-MM-DD.day.csv"),
        }
    }
    Ok(out)
}

/// Loads the configured tickers and months from `dir`.
///
/// A month's expected days are the dates present for any configured ticker;
/// a ticker lacking one of them has a missing day.
pub fn load_months(dir: &Path, config: &RunConfig) -> Result<Vec<MonthInput>> {
    config.validate()?;
    let files = discover_days(dir)?;
    let mut out = Vec::new();
    let mut all_missing = Vec::new();
    for month in &config.months {
        let in_month = |d: &NaiveDate| month_label(*d) == *month;
        let expected: BTreeSet<NaiveDate> = files
            .keys()
            .filter(|(t, d)| config.tickers.contains(t) && in_month(d))
            .map(|(_, d)| *d)
            .collect();
        for ticker in &config.tickers {
            let mut days = Vec::new();
            let mut missing = Vec::new();
            for date in &expected {
                match files.get(&(ticker.clone(), *date)) {
                    Some(path) => days.push(read_day_file(path)?),
                    None => missing.push(*date),
                }
            }
            if days.is_empty() {
                log::warn!("{ticker} {month}: no day files");
                all_missing.push(format!("{ticker} {month} (all days)"));
                continue;
            }
            if !missing.is_empty() {
                log::warn!("{ticker} {month}: missing {missing:?}");
                all_missing.extend(missing.iter().map(|d| format!("{ticker} {d}")));
            }
            out.push(MonthInput {
                ticker: ticker.clone(),
                month: month.clone(),
                days,
                missing,
            });
        }
    }
    if config.missing == MissingDays::Fatal && !all_missing.is_empty() {
        return Err(Error::MissingDays(all_missing));
    }
    if out.is_empty() {
        return Err(Error::Config(format!("no day files for the selection in {}", dir.display())));
    }
    Ok(out)
}

/// Every `(ℓ, j)` monthly string, level-major.
pub fn month_strings(
    days: &[TradeDay],
    max_level: usize,
    direction: RatioDirection,
    mode: Symbolization,
) -> Result<Vec<MonthlyString>> {
    let grids: Vec<DayGrid> = days
        .iter()
        .map(|d| {
            Ok(DayGrid {
                ticker: d.ticker.clone(),
                date: d.date,
                grid: build_grid_with(&d.prices, max_level, direction, mode)?,
            })
        })
        .collect::<Result<_>>()?;
    let cells: Vec<(usize, usize)> = (1..=max_level).flat_map(|l| (1..=l).map(move |j| (l, j))).collect();
    cells.par_iter().map(|&(l, j)| concat_month(&grids, l, j)).collect()
}

/// One row per `(string, spec)`, strings outer, specs inner.
pub fn run_strings(
    strings: &[MonthlyString],
    specs: &[TestSpec],
    opts: &BatteryOptions,
    p_floor: f64,
) -> Result<Vec<ResultRow>> {
    let per_string: Vec<Vec<ResultRow>> = strings
        .par_iter()
        .map(|m| {
            let eps = m.bits.to_units();
            specs
                .iter()
                .map(|spec| {
                    let r = run_units(spec, &eps, opts)?;
                    let p = r.p_value();
                    Ok(ResultRow {
                        ticker: m.ticker.clone(),
                        month: m.month.clone(),
                        test_id: spec.id.clone(),
                        level: m.level,
                        sample: m.sample,
                        n_bits: m.bits.len(),
                        statistic: r.statistic,
                        p_value: p,
                        neg_log10_p: p.map(|p| neg_log10(p, p_floor)),
                        decision: r.outcome,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_string.into_iter().flatten().collect())
}

/// Specs left after sanity exclusions, and the length class that chose them.
pub fn specs_for(config: &RunConfig, ticker: &str, level_one_bits: usize) -> Result<(Vec<TestSpec>, Option<usize>)> {
    let Some(ex) = &config.exclusions else {
        return Ok((config.specs.clone(), None));
    };
    let mut classes = config.length_classes.clone();
    if classes.class_of(ticker).is_err() {
        let lengths: Vec<usize> = ex.excluded.keys().copied().collect();
        let class = nearest_class(level_one_bits, &lengths)
            .ok_or_else(|| Error::Config("exclusion file lists no lengths".into()))?;
        log::info!("{ticker}: {level_one_bits} level-1 bits, length class {class}");
        classes.insert(ticker, class);
    }
    let class = classes.class_of(ticker)?;
    Ok((ex.apply(&config.specs, &classes, ticker)?, Some(class)))
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub results: ResultSet,
    pub manifest: Manifest,
}

/// Runs the battery over every monthly string of every input month.
pub fn run_months(inputs: &[MonthInput], config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let opts = config.battery_options();
    config.in_pool(|| {
        let mut rows = Vec::new();
        let mut records = Vec::new();
        for input in inputs {
            let strings = month_strings(&input.days, config.max_level, config.direction, config.symbolization)?;
            let level_one = strings.first().map_or(0, |m| m.bits.len());
            let (specs, class) = specs_for(config, &input.ticker, level_one)?;
            rows.extend(run_strings(&strings, &specs, &opts, config.p_floor)?);
            records.push(MonthRecord {
                ticker: input.ticker.clone(),
                month: input.month.clone(),
                days: input.days.iter().map(|d| d.date).collect(),
                missing: input.missing.clone(),
                ticks: input.days.iter().map(TradeDay::len).sum(),
                length_class: class,
                tests: specs.iter().map(|s| s.id.clone()).collect(),
            });
        }
        Ok(RunOutput {
            results: ResultSet { rows },
            manifest: Manifest::new(config, records)?,
        })
    })?
}

/// Loads and runs the configured months from a directory of day files.
pub fn run_month(dir: &Path, config: &RunConfig) -> Result<RunOutput> {
    let inputs = load_months(dir, config)?;
    run_months(&inputs, config)
}

/// Level-1 decision counts, handy for quick summaries.
pub fn outcome_counts(results: &ResultSet) -> BTreeMap<&'static str, usize> {
    let mut out = BTreeMap::new();
    for r in &results.rows {
        *out.entry(r.decision.as_str()).or_insert(0) += 1;
    }
    for o in [Outcome::Pass, Outcome::Reject, Outcome::Skipped] {
        out.entry(o.as_str()).or_insert(0);
    }
    out
}
