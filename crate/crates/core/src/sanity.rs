//! Test validation against reference generators.
//!
//! Each generator's stream is turned into a full aggregation grid, exactly like
//! a ticker's prices; every registered test runs on every cell and a test is
//! excluded at a length when more than 2% of its evaluations reject.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitcore::{build_grid, grid_cell_count, RatioDirection};
use crate::error::{Error, Result};
use crate::rngsrc::GeneratorSpec;
use crate::stattests::{run_units, Alpha, BatteryOptions, Outcome, TestSpec};

pub const CANONICAL_LENGTHS: [usize; 4] = [50_000, 100_000, 500_000, 1_000_000];

/// Largest tolerated failure fraction, as a percentage.
pub const THRESHOLD_PERCENT: u64 = 2;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pooling {
    /// Failures and totals summed over all generators.
    #[default]
    Pooled,
    /// The generator with the highest failure fraction decides.
    WorstCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Valid,
    Excluded,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Valid => "valid",
            Verdict::Excluded => "excluded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExclusionReason {
    FailureRate,
    /// Every evaluation was skipped for length.
    NeverRan,
}

/// `Excluded` iff `failures / total > 2%`, compared in integers.
pub fn verdict(failures: u64, total: u64) -> (Verdict, Option<ExclusionReason>) {
    if total == 0 {
        (Verdict::Excluded, Some(ExclusionReason::NeverRan))
    } else if failures * 100 > THRESHOLD_PERCENT * total {
        (Verdict::Excluded, Some(ExclusionReason::FailureRate))
    } else {
        (Verdict::Valid, None)
    }
}

/// Counts for one generator at one `(test, length)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorCount {
    pub generator: String,
    pub failures: u64,
    pub total: u64,
    pub skipped: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SanityRow {
    pub test_id: String,
    pub length: usize,
    pub failures: u64,
    pub total: u64,
    pub skipped: u64,
    pub fraction: f64,
    pub verdict: Verdict,
    pub reason: Option<ExclusionReason>,
    pub per_generator: Vec<GeneratorCount>,
}

impl SanityRow {
    fn assemble(test_id: &str, length: usize, per_generator: Vec<GeneratorCount>, pooling: Pooling) -> Self {
        let failures: u64 = per_generator.iter().map(|g| g.failures).sum();
        let total: u64 = per_generator.iter().map(|g| g.total).sum();
        let skipped: u64 = per_generator.iter().map(|g| g.skipped).sum();
        let (verdict, reason) = match pooling {
            Pooling::Pooled => verdict(failures, total),
            Pooling::WorstCase => per_generator
                .iter()
                .map(|g| verdict(g.failures, g.total))
                .max_by_key(|(v, r)| (*v == Verdict::Excluded, *r))
                .unwrap_or((Verdict::Excluded, Some(ExclusionReason::NeverRan))),
        };
        Self {
            test_id: test_id.to_string(),
            length,
            failures,
            total,
            skipped,
            fraction: if total == 0 { 0.0 } else { failures as f64 / total as f64 },
            verdict,
            reason,
            per_generator,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SanityConfig {
    pub lengths: Vec<usize>,
    pub max_level: usize,
    pub alpha: Alpha,
    pub pooling: Pooling,
    pub direction: RatioDirection,
}

impl Default for SanityConfig {
    fn default() -> Self {
        Self {
            lengths: CANONICAL_LENGTHS.to_vec(),
            max_level: 100,
            alpha: Alpha::default(),
            pooling: Pooling::default(),
            direction: RatioDirection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SanityReport {
    pub alpha: f64,
    pub max_level: usize,
    pub pooling: Pooling,
    pub generators: Vec<String>,
    pub rows: Vec<SanityRow>,
}

/// Runs every spec on every grid cell of every generator at every length.
pub fn run_sanity(generators: &[GeneratorSpec], specs: &[TestSpec], config: &SanityConfig) -> Result<SanityReport> {
    if generators.is_empty() {
        return Err(Error::Config("sanity check needs at least one generator".into()));
    }
    if config.lengths.is_empty() {
        return Err(Error::Config("sanity check needs at least one length".into()));
    }
    for s in specs {
        s.validate()?;
    }
    let opts = BatteryOptions {
        alpha: config.alpha,
        ..Default::default()
    };
    let mut lengths = config.lengths.clone();
    lengths.sort_unstable();
    lengths.dedup();
    let longest = *lengths.last().unwrap();

    // counts[(spec index, length)] per generator, in generator order
    let mut counts: BTreeMap<(usize, usize), Vec<GeneratorCount>> = BTreeMap::new();
    for generator in generators {
        let stream = generator.values(longest)?;
        let name = generator.name();
        for &length in &lengths {
            // `length` comparisons need `length + 1` values
            let grid = build_grid(&stream.values[..=length], config.max_level, config.direction)?;
            let cells: Vec<Vec<u8>> = grid.iter().map(|(_, _, b)| b.to_units()).collect();
            debug_assert_eq!(cells.len(), grid_cell_count(config.max_level));
            let per_spec: Vec<GeneratorCount> = specs
                .par_iter()
                .map(|spec| {
                    let mut c = GeneratorCount {
                        generator: name.clone(),
                        failures: 0,
                        total: 0,
                        skipped: 0,
                    };
                    for eps in &cells {
                        match run_units(spec, eps, &opts)?.outcome {
                            Outcome::Pass => c.total += 1,
                            Outcome::Reject => {
                                c.total += 1;
                                c.failures += 1;
                            }
                            Outcome::Skipped => c.skipped += 1,
                        }
                    }
                    Ok(c)
                })
                .collect::<Result<_>>()?;
            for (i, c) in per_spec.into_iter().enumerate() {
                counts.entry((i, length)).or_default().push(c);
            }
            log::info!("sanity: {name} at length {length} done");
        }
    }
    let rows = counts
        .into_iter()
        .map(|((i, length), per_generator)| SanityRow::assemble(&specs[i].id, length, per_generator, config.pooling))
        .collect();
    Ok(SanityReport {
        alpha: config.alpha.get(),
        max_level: config.max_level,
        pooling: config.pooling,
        generators: generators.iter().map(GeneratorSpec::name).collect(),
        rows,
    })
}

impl SanityReport {
    pub fn row(&self, test_id: &str, length: usize) -> Option<&SanityRow> {
        self.rows.iter().find(|r| r.test_id == test_id && r.length == length)
    }

    pub fn lengths(&self) -> BTreeSet<usize> {
        self.rows.iter().map(|r| r.length).collect()
    }

    /// Writes `test_id,length,failures,total,fraction,verdict`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["test_id", "length", "failures", "total", "fraction", "verdict"])?;
        for r in &self.rows {
            w.write_record([
                r.test_id.clone(),
                r.length.to_string(),
                r.failures.to_string(),
                r.total.to_string(),
                format!("{:.6}", r.fraction),
                r.verdict.as_str().to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(Path::new("<csv>"), e))?;
        Ok(())
    }

    pub fn exclusions(&self) -> ExclusionFile {
        let mut excluded: BTreeMap<usize, BTreeMap<String, ExclusionReason>> = BTreeMap::new();
        for length in self.lengths() {
            excluded.entry(length).or_default();
        }
        for r in &self.rows {
            if let Some(reason) = r.reason {
                excluded.entry(r.length).or_default().insert(r.test_id.clone(), reason);
            }
        }
        ExclusionFile {
            alpha: self.alpha,
            pooling: self.pooling,
            excluded,
        }
    }
}

/// Excluded tests per canonical length, as consumed by the pipeline.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExclusionFile {
    pub alpha: f64,
    pub pooling: Pooling,
    pub excluded: BTreeMap<usize, BTreeMap<String, ExclusionReason>>,
}

impl ExclusionFile {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut text = String::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Removes every spec excluded at `ticker`'s length class, keeping order.
    ///
    /// A spec that never ran at that length counts as excluded.
    pub fn apply(&self, specs: &[TestSpec], classes: &LengthClass, ticker: &str) -> Result<Vec<TestSpec>> {
        let length = classes.class_of(ticker)?;
        let excluded = self.excluded.get(&length).ok_or_else(|| {
            Error::Config(format!("sanity report does not cover length {length} needed by {ticker}"))
        })?;
        Ok(specs.iter().filter(|s| !excluded.contains_key(&s.id)).cloned().collect())
    }
}

/// Report-level shorthand for [`ExclusionFile::apply`].
pub fn apply_exclusions(
    report: &SanityReport,
    classes: &LengthClass,
    ticker: &str,
    specs: &[TestSpec],
) -> Result<Vec<TestSpec>> {
    report.exclusions().apply(specs, classes, ticker)
}

/// Ticker → canonical length class.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthClass {
    pub classes: BTreeMap<String, usize>,
}

impl LengthClass {
    pub fn insert(&mut self, ticker: &str, length: usize) {
        self.classes.insert(ticker.to_string(), length);
    }

    pub fn class_of(&self, ticker: &str) -> Result<usize> {
        self.classes
            .get(ticker)
            .copied()
            .ok_or_else(|| Error::UnknownTicker(ticker.to_string()))
    }

    /// Parses `TICKER=LENGTH` pairs separated by commas.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Self::default();
        for pair in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (t, l) = pair
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected TICKER=LENGTH, got `{pair}`")))?;
            let l = l
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad length in `{pair}`")))?;
            out.insert(t.trim(), l);
        }
        Ok(out)
    }
}

/// The canonical length nearest to `n` on a log scale.
pub fn nearest_class(n: usize, lengths: &[usize]) -> Option<usize> {
    let ln = (n.max(1) as f64).ln();
    lengths
        .iter()
        .copied()
        .min_by(|a, b| {
            let da = ((*a as f64).ln() - ln).abs();
            let db = ((*b as f64).ln() - ln).abs();
            da.total_cmp(&db)
        })
}
