use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::BitString;
use crate::error::{Error, Result};

/// Which price ratio maps to a `1`.
///
/// `NewOverOld` uses `r = s_new / s_old` with `r > 1 → 1` (an up-move is a one).
/// `OldOverNew` uses `r = s_old / s_new` with the same rule, which yields the
/// bitwise complement of `NewOverOld`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioDirection {
    #[default]
    NewOverOld,
    OldOverNew,
}

impl RatioDirection {
    fn bit(self, up: bool) -> bool {
        match self {
            RatioDirection::NewOverOld => up,
            RatioDirection::OldOverNew => !up,
        }
    }
}

impl std::str::FromStr for RatioDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "new-over-old" => Ok(RatioDirection::NewOverOld),
            "old-over-new" => Ok(RatioDirection::OldOverNew),
            other => Err(Error::Config(format!(
                "unknown ratio direction `{other}` (expected new-over-old or old-over-new)"
            ))),
        }
    }
}

impl std::fmt::Display for RatioDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RatioDirection::NewOverOld => "new-over-old",
            RatioDirection::OldOverNew => "old-over-new",
        })
    }
}

/// Bits produced for one `(level, sample)` plus the number of skipped ties.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Symbolized {
    pub bits: BitString,
    pub ties: usize,
}

impl Symbolized {
    pub fn comparisons(&self) -> usize {
        self.bits.len() + self.ties
    }
}

/// Zero-based `(old, new)` index pairs compared by sample `sample` at `level`:
/// `(j-1 + (i-1)ℓ, j-1 + iℓ)` for `i = 1, 2, …` while the new index is in range.
pub fn sample_pairs(n: usize, level: usize, sample: usize) -> impl Iterator<Item = (usize, usize)> {
    debug_assert!(level >= 1 && (1..=level).contains(&sample));
    let start = sample - 1;
    (start..)
        .step_by(level)
        .take_while(move |&old| old + level < n)
        .map(move |old| (old, old + level))
}

pub(crate) fn check_prices(prices: &[u64]) -> Result<()> {
    match prices.iter().position(|&p| p == 0) {
        Some(i) => Err(Error::Domain(format!("nonpositive price at index {i}"))),
        None => Ok(()),
    }
}

fn check_phase(level: usize, sample: usize) -> Result<()> {
    if level == 0 || sample == 0 || sample > level {
        return Err(Error::Domain(format!(
            "sample {sample} is not in 1..={level} (level must be >= 1)"
        )));
    }
    Ok(())
}

pub(crate) fn symbolize_unchecked(
    prices: &[u64],
    level: usize,
    sample: usize,
    direction: RatioDirection,
) -> Symbolized {
    let mut out = Symbolized {
        bits: BitString::with_capacity(prices.len() / level),
        ties: 0,
    };
    for (old, new) in sample_pairs(prices.len(), level, sample) {
        match prices[new].cmp(&prices[old]) {
            Ordering::Greater => out.bits.push(direction.bit(true)),
            Ordering::Less => out.bits.push(direction.bit(false)),
            Ordering::Equal => out.ties += 1,
        }
    }
    out
}

/// Symbolizes the phase-`sample` subsequence at aggregation `level`.
///
/// Prices are compared exactly as integers; equal prices emit nothing.
pub fn symbolize(prices: &[u64], level: usize, sample: usize, direction: RatioDirection) -> Result<BitString> {
    Ok(symbolize_counted(prices, level, sample, direction)?.bits)
}

/// Like [`symbolize`], also reporting how many comparisons were ties.
pub fn symbolize_counted(
    prices: &[u64],
    level: usize,
    sample: usize,
    direction: RatioDirection,
) -> Result<Symbolized> {
    check_phase(level, sample)?;
    check_prices(prices)?;
    Ok(symbolize_unchecked(prices, level, sample, direction))
}

/// Prices above this bound are rejected by the median variant so that
/// cross-multiplied ratio comparisons stay inside `u128`.
pub const MEDIAN_PRICE_LIMIT: u64 = 1 << 40;

/// An exact positive rational `num / den`.
#[derive(Debug, Clone, Copy)]
struct Ratio {
    num: u128,
    den: u128,
}

impl Ratio {
    fn cmp_exact(&self, other: &Ratio) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

/// Median-balanced symbolization of the `(level, sample)` subsequence.
///
/// Ratios of consecutive subsampled prices are compared against their median
/// (midpoint of the two central ratios for even counts); ratios equal to the
/// median are skipped. Needs the whole day, so this is an offline transform.
pub fn median_symbolize(
    prices: &[u64],
    level: usize,
    sample: usize,
    direction: RatioDirection,
) -> Result<Symbolized> {
    check_phase(level, sample)?;
    check_prices(prices)?;
    if let Some(i) = prices.iter().position(|&p| p > MEDIAN_PRICE_LIMIT) {
        return Err(Error::Domain(format!(
            "price at index {i} exceeds the median-variant limit {MEDIAN_PRICE_LIMIT}"
        )));
    }
    Ok(median_symbolize_unchecked(prices, level, sample, direction))
}

pub(crate) fn median_symbolize_unchecked(
    prices: &[u64],
    level: usize,
    sample: usize,
    direction: RatioDirection,
) -> Symbolized {
    let ratios: Vec<Ratio> = sample_pairs(prices.len(), level, sample)
        .map(|(old, new)| Ratio {
            num: prices[new] as u128,
            den: prices[old] as u128,
        })
        .collect();
    if ratios.is_empty() {
        return Symbolized::default();
    }
    let mut sorted = ratios.clone();
    sorted.sort_by(Ratio::cmp_exact);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        let (a, b) = (sorted[n / 2 - 1], sorted[n / 2]);
        Ratio {
            num: a.num * b.den + b.num * a.den,
            den: 2 * a.den * b.den,
        }
    };
    let mut out = Symbolized {
        bits: BitString::with_capacity(n),
        ties: 0,
    };
    for r in &ratios {
        match r.cmp_exact(&median) {
            Ordering::Greater => out.bits.push(direction.bit(true)),
            Ordering::Less => out.bits.push(direction.bit(false)),
            Ordering::Equal => out.ties += 1,
        }
    }
    out
}
