//! Price series → bit strings.
//!
//! A day of prices is turned into an [`AggregationGrid`] holding one string per
//! `(level, sample)` pair; grids for consecutive days are concatenated per cell
//! into [`MonthlyString`]s, the unit every randomness test runs on.

mod bitstring;
mod files;
mod symbolize;

pub use bitstring::{BitString, Iter};
pub use files::{read_bit_file, write_bit_file, BitFileMeta};
pub use symbolize::{
    median_symbolize, sample_pairs, symbolize, symbolize_counted, RatioDirection, Symbolized,
    MEDIAN_PRICE_LIMIT,
};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of cells in a grid with levels `1..=max_level`.
pub const fn grid_cell_count(max_level: usize) -> usize {
    max_level * (max_level + 1) / 2
}

/// How a grid turns prices into bits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symbolization {
    /// Online up/down rule against the previous subsampled price.
    #[default]
    Base,
    /// Offline rule against the day's median ratio in each cell.
    Median,
}

/// All `(level, sample)` strings derived from one price series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregationGrid {
    max_level: usize,
    // cells[level - 1][sample - 1]
    cells: Vec<Vec<Symbolized>>,
}

impl AggregationGrid {
    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    /// Panics if `(level, sample)` lies outside the grid.
    pub fn cell(&self, level: usize, sample: usize) -> &BitString {
        &self.entry(level, sample).bits
    }

    pub fn ties(&self, level: usize, sample: usize) -> usize {
        self.entry(level, sample).ties
    }

    fn entry(&self, level: usize, sample: usize) -> &Symbolized {
        assert!(
            (1..=self.max_level).contains(&level) && (1..=level).contains(&sample),
            "cell ({level}, {sample}) outside grid of max level {}",
            self.max_level
        );
        &self.cells[level - 1][sample - 1]
    }

    /// `(level, sample, bits)` in level-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BitString)> {
        self.cells.iter().enumerate().flat_map(|(l, row)| {
            row.iter()
                .enumerate()
                .map(move |(j, cell)| (l + 1, j + 1, &cell.bits))
        })
    }
}

/// Builds every cell `(ℓ, j)` with `ℓ ≤ max_level`, `j ≤ ℓ`.
pub fn build_grid(prices: &[u64], max_level: usize, direction: RatioDirection) -> Result<AggregationGrid> {
    build_grid_with(prices, max_level, direction, Symbolization::Base)
}

pub fn build_grid_with(
    prices: &[u64],
    max_level: usize,
    direction: RatioDirection,
    mode: Symbolization,
) -> Result<AggregationGrid> {
    if max_level == 0 {
        return Err(Error::Config("max level must be at least 1".into()));
    }
    symbolize::check_prices(prices)?;
    if mode == Symbolization::Median {
        if let Some(i) = prices.iter().position(|&p| p > MEDIAN_PRICE_LIMIT) {
            return Err(Error::Domain(format!(
                "price at index {i} exceeds the median-variant limit {MEDIAN_PRICE_LIMIT}"
            )));
        }
    }
    let cells = (1..=max_level)
        .into_par_iter()
        .map(|level| {
            (1..=level)
                .map(|sample| match mode {
                    Symbolization::Base => symbolize::symbolize_unchecked(prices, level, sample, direction),
                    Symbolization::Median => {
                        symbolize::median_symbolize_unchecked(prices, level, sample, direction)
                    }
                })
                .collect()
        })
        .collect();
    Ok(AggregationGrid { max_level, cells })
}

/// A day's grid tagged with where it came from.
#[derive(Debug, Clone)]
pub struct DayGrid {
    pub ticker: String,
    pub date: NaiveDate,
    pub grid: AggregationGrid,
}

/// One `(ticker, month, level, sample)` test unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonthlyString {
    pub ticker: String,
    pub month: String,
    pub level: usize,
    pub sample: usize,
    pub bits: BitString,
    /// Offset of each day's first bit inside `bits`.
    pub day_boundaries: Vec<usize>,
    pub ties: usize,
}

impl MonthlyString {
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn below_min(&self, min_length: usize) -> bool {
        self.bits.len() < min_length
    }

    pub fn comparisons(&self) -> usize {
        self.bits.len() + self.ties
    }
}

pub fn month_label(date: NaiveDate) -> String {
    date.format("%Y-%m").to_string()
}

/// Concatenates the `(level, sample)` cell of each day, in the given order.
///
/// Each day was symbolized on its own, so no comparison spans two days.
pub fn concat_month(days: &[DayGrid], level: usize, sample: usize) -> Result<MonthlyString> {
    let first = days
        .first()
        .ok_or_else(|| Error::Config("cannot build a month from zero days".into()))?;
    let mut out = MonthlyString {
        ticker: first.ticker.clone(),
        month: month_label(first.date),
        level,
        sample,
        bits: BitString::new(),
        day_boundaries: Vec::with_capacity(days.len()),
        ties: 0,
    };
    let mut previous: Option<NaiveDate> = None;
    for day in days {
        if day.ticker != first.ticker {
            return Err(Error::MixedTickers(first.ticker.clone(), day.ticker.clone()));
        }
        if previous.is_some_and(|p| p >= day.date) {
            return Err(Error::Domain(format!(
                "days must be in strictly increasing calendar order ({} after {})",
                day.date,
                previous.unwrap()
            )));
        }
        previous = Some(day.date);
        if level > day.grid.max_level() || sample == 0 || sample > level {
            return Err(Error::Config(format!(
                "cell ({level}, {sample}) not available in grid of max level {}",
                day.grid.max_level()
            )));
        }
        out.day_boundaries.push(out.bits.len());
        out.bits.extend_from(day.grid.cell(level, sample));
        out.ties += day.grid.ties(level, sample);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2022, 8, day).unwrap()
    }

    #[test]
    fn cell_counts() {
        let prices: Vec<u64> = (1..=300).map(|i| 1000 + (i * 37 % 11)).collect();
        assert_eq!(build_grid(&prices, 100, RatioDirection::NewOverOld).unwrap().cell_count(), 5050);
        let g1 = build_grid(&prices, 1, RatioDirection::NewOverOld).unwrap();
        assert_eq!(g1.cell_count(), 1);
        assert_eq!(
            g1.cell(1, 1),
            &symbolize(&prices, 1, 1, RatioDirection::NewOverOld).unwrap()
        );
        assert!(build_grid(&prices, 0, RatioDirection::NewOverOld).is_err());
    }

    #[test]
    fn four_prices_level_three() {
        // by hand: (3,1) compares s4 with s1; (3,2), (3,3) have no partner
        let g = build_grid(&[10, 12, 9, 11], 3, RatioDirection::NewOverOld).unwrap();
        assert_eq!(g.cell(3, 1).to_ascii(), "1");
        assert!(g.cell(3, 2).is_empty());
        assert!(g.cell(3, 3).is_empty());
        assert_eq!(g.cell(2, 1).to_ascii(), "0");
        assert_eq!(g.cell(2, 2).to_ascii(), "0");
        assert_eq!(g.cell(1, 1).to_ascii(), "101");
    }

    fn day_with(bits: &str, day: u32) -> DayGrid {
        // walk whose level-1 string is `bits`
        let mut p = vec![100u64];
        for c in bits.chars() {
            let last = *p.last().unwrap();
            p.push(if c == '1' { last + 1 } else { last - 1 });
        }
        DayGrid {
            ticker: "TEST".into(),
            date: d(day),
            grid: build_grid(&p, 1, RatioDirection::NewOverOld).unwrap(),
        }
    }

    #[test]
    fn month_concatenation() {
        let m = concat_month(&[day_with("10", 1), day_with("01", 2)], 1, 1).unwrap();
        assert_eq!(m.bits.to_ascii(), "1001");
        assert_eq!(m.day_boundaries, vec![0, 2]);
        assert_eq!(m.month, "2022-08");
    }

    #[test]
    fn month_of_empty_cells() {
        let flat = DayGrid {
            ticker: "TEST".into(),
            date: d(3),
            grid: build_grid(&[7, 7, 7], 1, RatioDirection::NewOverOld).unwrap(),
        };
        let m = concat_month(&[flat], 1, 1).unwrap();
        assert!(m.is_empty());
        assert!(m.below_min(1));
        assert_eq!(m.ties, 2);
    }

    #[test]
    fn month_errors() {
        let mut other = day_with("1", 2);
        other.ticker = "OTHER".into();
        assert!(matches!(
            concat_month(&[day_with("1", 1), other], 1, 1),
            Err(Error::MixedTickers(..))
        ));
        assert!(concat_month(&[day_with("1", 2), day_with("1", 1)], 1, 1).is_err());
        assert!(concat_month(&[day_with("1", 1)], 2, 1).is_err());
        assert!(concat_month(&[], 1, 1).is_err());
    }

    proptest! {
        #[test]
        fn prefix_consistency(steps in proptest::collection::vec(-3i64..=3, 2..400),
                              level in 1usize..12, cut in 0usize..400) {
            let mut prices = vec![10_000u64];
            for s in &steps {
                let last = *prices.last().unwrap() as i64;
                prices.push((last + s) as u64);
            }
            let cut = cut.min(prices.len());
            for sample in 1..=level {
                let full = symbolize(&prices, level, sample, RatioDirection::NewOverOld).unwrap();
                let part = symbolize(&prices[..cut], level, sample, RatioDirection::NewOverOld).unwrap();
                prop_assert!(part.len() <= full.len());
                prop_assert_eq!(full.slice(0, part.len()), part);
            }
        }

        #[test]
        fn direction_duality(prices in proptest::collection::vec(1u64..50, 0..200), level in 1usize..8) {
            for sample in 1..=level {
                let a = symbolize(&prices, level, sample, RatioDirection::NewOverOld).unwrap();
                let b = symbolize(&prices, level, sample, RatioDirection::OldOverNew).unwrap();
                prop_assert_eq!(a.complement(), b);
            }
        }

        #[test]
        fn median_balance_bound(prices in proptest::collection::vec(1u64..40, 2..200), level in 1usize..6) {
            for sample in 1..=level {
                let s = median_symbolize(&prices, level, sample, RatioDirection::NewOverOld).unwrap();
                let diff = (s.bits.count_ones() as i64 - s.bits.count_zeros() as i64).unsigned_abs() as usize;
                prop_assert!(diff <= s.ties + 1);
            }
        }

        #[test]
        fn equal_prices_never_emit(prices in proptest::collection::vec(1u64..4, 0..200), level in 1usize..10) {
            for sample in 1..=level {
                let pairs: Vec<_> = sample_pairs(prices.len(), level, sample).collect();
                let moves = pairs.iter().filter(|(o, n)| prices[*o] != prices[*n]).count();
                let s = symbolize_counted(&prices, level, sample, RatioDirection::NewOverOld).unwrap();
                prop_assert_eq!(s.bits.len(), moves);
                prop_assert_eq!(s.ties, pairs.len() - moves);
            }
        }
    }
}
