use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stattests::Outcome;

/// Default floor applied to p-values before taking `−log₁₀`.
pub const P_FLOOR: f64 = 1e-300;

pub const RESULT_HEADER: [&str; 10] = [
    "ticker",
    "month",
    "test_id",
    "level",
    "sample",
    "n_bits",
    "statistic",
    "p_value",
    "neg_log10_p",
    "decision",
];

/// `−log₁₀ max(p, floor)`, never `-0`.
pub fn neg_log10(p: f64, floor: f64) -> f64 {
    let v = -p.max(floor).log10();
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub ticker: String,
    pub month: String,
    pub test_id: String,
    pub level: usize,
    pub sample: usize,
    pub n_bits: usize,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub neg_log10_p: Option<f64>,
    pub decision: Outcome,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultSet {
    pub rows: Vec<ResultRow>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_opt(field: &str, line: usize, name: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field.parse().map(Some).map_err(|_| Error::Parse {
        path: "<results>".into(),
        line,
        message: format!("bad {name} `{field}`"),
    })
}

impl ResultSet {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(RESULT_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.ticker.clone(),
                r.month.clone(),
                r.test_id.clone(),
                r.level.to_string(),
                r.sample.to_string(),
                r.n_bits.to_string(),
                opt(r.statistic),
                opt(r.p_value),
                opt(r.neg_log10_p),
                r.decision.as_str().to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<results>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Domain(e.to_string()))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != RESULT_HEADER {
            return Err(Error::Parse {
                path: "<results>".into(),
                line: 1,
                message: format!("unexpected header {header:?}"),
            });
        }
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            let int = |k: usize| -> Result<usize> {
                rec[k].parse().map_err(|_| Error::Parse {
                    path: "<results>".into(),
                    line,
                    message: format!("bad {} `{}`", RESULT_HEADER[k], &rec[k]),
                })
            };
            let decision = match &rec[9] {
                "pass" => Outcome::Pass,
                "reject" => Outcome::Reject,
                "skipped" => Outcome::Skipped,
                other => {
                    return Err(Error::Parse {
                        path: "<results>".into(),
                        line,
                        message: format!("bad decision `{other}`"),
                    })
                }
            };
            rows.push(ResultRow {
                ticker: rec[0].to_string(),
                month: rec[1].to_string(),
                test_id: rec[2].to_string(),
                level: int(3)?,
                sample: int(4)?,
                n_bits: int(5)?,
                statistic: parse_opt(&rec[6], line, "statistic")?,
                p_value: parse_opt(&rec[7], line, "p_value")?,
                neg_log10_p: parse_opt(&rec[8], line, "neg_log10_p")?,
                decision,
            });
        }
        Ok(Self { rows })
    }
}

/// Type-7 quantile of sorted data: `x[⌊h⌋] + (h − ⌊h⌋)(x[⌊h⌋+1] − x[⌊h⌋])`, `h = (n−1)q`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotRow {
    pub ticker: String,
    pub month: String,
    pub test_id: String,
    pub level: usize,
    pub samples: usize,
    pub skipped: usize,
    /// `[min, q1, median, q3, max]`; `None` when every sample was skipped.
    pub five: Option<[f64; 5]>,
}

impl BoxplotRow {
    pub fn median(&self) -> Option<f64> {
        self.five.map(|f| f[2])
    }
}

pub const BOXPLOT_HEADER: [&str; 11] = [
    "ticker", "month", "test_id", "level", "samples", "skipped", "min", "q1", "median", "q3", "max",
];

/// Five-number summaries of `neg_log10_p` per `(ticker, month, test, level)`,
/// in first-appearance order.
pub fn summarize(results: &ResultSet) -> Vec<BoxplotRow> {
    let mut index: HashMap<(&str, &str, &str, usize), usize> = HashMap::new();
    let mut groups: Vec<(BoxplotRow, Vec<f64>)> = Vec::new();
    for r in &results.rows {
        let key = (r.ticker.as_str(), r.month.as_str(), r.test_id.as_str(), r.level);
        let i = *index.entry(key).or_insert_with(|| {
            groups.push((
                BoxplotRow {
                    ticker: r.ticker.clone(),
                    month: r.month.clone(),
                    test_id: r.test_id.clone(),
                    level: r.level,
                    samples: 0,
                    skipped: 0,
                    five: None,
                },
                Vec::new(),
            ));
            groups.len() - 1
        });
        match (r.decision, r.neg_log10_p) {
            (Outcome::Skipped, _) | (_, None) => groups[i].0.skipped += 1,
            (_, Some(v)) => groups[i].1.push(v),
        }
    }
    groups
        .into_iter()
        .map(|(mut row, mut v)| {
            row.samples = v.len();
            if !v.is_empty() {
                v.sort_by(f64::total_cmp);
                row.five = Some([0.0, 0.25, 0.5, 0.75, 1.0].map(|q| quantile_sorted(&v, q)));
            }
            row
        })
        .collect()
}

pub fn write_boxplot_csv<W: Write>(rows: &[BoxplotRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BOXPLOT_HEADER)?;
    for r in rows {
        let mut rec = vec![
            r.ticker.clone(),
            r.month.clone(),
            r.test_id.clone(),
            r.level.to_string(),
            r.samples.to_string(),
            r.skipped.to_string(),
        ];
        match r.five {
            Some(f) => rec.extend(f.iter().map(f64::to_string)),
            None => rec.extend(std::iter::repeat_n(String::new(), 5)),
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<boxplot>", e))?;
    Ok(())
}
