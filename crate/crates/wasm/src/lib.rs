//! Browser bindings: symbolize a price list, generate reference bits, run tests.
//!
//! Everything runs on the calling thread; the battery is evaluated one test at a time.

use serde::Serialize;
use tickbits::bitcore::{symbolize_counted, BitString, RatioDirection};
use tickbits::rngsrc::{mobius_bits, persistent_walk, prng_bits, WalkParams};
use tickbits::stattests::{run_units, select, Alpha, BatteryOptions, Outcome};
use tickbits::{Error, Result};
use wasm_bindgen::prelude::*;

/// Longest bit string the page will generate or test.
pub const MAX_BITS: usize = 2_000_000;

#[derive(Debug, Serialize)]
pub struct Symbolized {
    pub bits: String,
    pub ties: usize,
    pub comparisons: usize,
}

#[derive(Debug, Serialize)]
pub struct Row {
    pub test: String,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub outcome: Outcome,
}

fn parse_prices(text: &str) -> Result<Vec<u64>> {
    text.split(|c: char| c.is_whitespace() || c == ',' || c == ';')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u64>()
                .ok()
                .filter(|&p| p > 0)
                .ok_or_else(|| Error::Config(format!("not a positive integer price: {t:?}")))
        })
        .collect()
}

fn too_long(n: usize) -> Result<()> {
    if n > MAX_BITS {
        return Err(Error::Config(format!("{n} bits is more than the demo limit of {MAX_BITS}")));
    }
    Ok(())
}

/// Bits of sample `j` at level `l` of a whitespace or comma separated price list.
pub fn symbolize_prices(prices: &str, level: usize, sample: usize, old_over_new: bool) -> Result<Symbolized> {
    let prices = parse_prices(prices)?;
    let direction = if old_over_new { RatioDirection::OldOverNew } else { RatioDirection::NewOverOld };
    let s = symbolize_counted(&prices, level, sample, direction)?;
    Ok(Symbolized { comparisons: s.comparisons(), bits: s.bits.to_ascii(), ties: s.ties })
}

/// `prng`, `mobius`, or `walk` (one day of a persistent walk, symbolized at level 1).
pub fn generate_bits(kind: &str, n: usize, seed: u64, rho: f64) -> Result<String> {
    too_long(n)?;
    let bits = match kind {
        "prng" => prng_bits(seed, n),
        "mobius" => mobius_bits(n),
        "walk" => {
            let prices = persistent_walk(seed, n + 1, &WalkParams::with_rho(rho))?;
            symbolize_counted(&prices, 1, 1, RatioDirection::default())?.bits
        }
        other => return Err(Error::Config(format!("unknown generator {other:?}"))),
    };
    Ok(bits.to_ascii())
}

/// One row per selected test, in selection order.
pub fn test_bits(bits: &str, tests: &str, alpha: f64) -> Result<Vec<Row>> {
    let compact: String = bits.chars().filter(|c| !c.is_whitespace()).collect();
    let bits = BitString::from_ascii(&compact)?;
    too_long(bits.len())?;
    let opts = BatteryOptions { alpha: Alpha::new(alpha)?, ..BatteryOptions::default() };
    let eps = bits.to_units();
    select(tests)?
        .iter()
        .map(|spec| {
            let r = run_units(spec, &eps, &opts)?;
            Ok(Row { p_value: r.p_value(), test: r.spec_id, statistic: r.statistic, outcome: r.outcome })
        })
        .collect()
}

fn js<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn symbolize(prices: &str, level: usize, sample: usize, old_over_new: bool) -> std::result::Result<String, JsError> {
    js(symbolize_prices(prices, level, sample, old_over_new))
}

#[wasm_bindgen]
pub fn generate(kind: &str, n: usize, seed: u64, rho: f64) -> std::result::Result<String, JsError> {
    generate_bits(kind, n, seed, rho).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn run_tests(bits: &str, tests: &str, alpha: f64) -> std::result::Result<String, JsError> {
    js(test_bits(bits, tests, alpha))
}

/// Ids of every test in the catalog.
#[wasm_bindgen]
pub fn catalog() -> String {
    tickbits::stattests::registry().into_iter().map(|s| s.id).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbolizes_with_ties() {
        let s = symbolize_prices("100 101, 101\n99 100", 1, 1, false).unwrap();
        assert_eq!(s.bits, "101");
        assert_eq!((s.ties, s.comparisons), (1, 4));
        assert_eq!(symbolize_prices("100 101 101 99 100", 1, 1, true).unwrap().bits, "010");
        assert_eq!(symbolize_prices("1 2 3 4 5", 2, 1, false).unwrap().bits, "11");
        assert_eq!(symbolize_prices("1 2 3 4 5", 2, 2, false).unwrap().bits, "1");
    }

    #[test]
    fn rejects_bad_prices() {
        assert!(symbolize_prices("100 abc", 1, 1, false).is_err());
        assert!(symbolize_prices("100 0 3", 1, 1, false).is_err());
        assert!(symbolize_prices("1 2 3", 2, 3, false).is_err());
    }

    #[test]
    fn generators() {
        assert_eq!(generate_bits("mobius", 6, 0, 0.5).unwrap(), "100010");
        assert_eq!(generate_bits("prng", 64, 5, 0.5).unwrap(), prng_bits(5, 64).to_ascii());
        assert_eq!(generate_bits("walk", 1000, 2, 0.7).unwrap(), generate_bits("walk", 1000, 2, 0.7).unwrap());
        assert!(generate_bits("dice", 10, 0, 0.5).is_err());
        assert!(generate_bits("prng", MAX_BITS + 1, 0, 0.5).is_err());
    }

    #[test]
    fn tests_follow_the_selection() {
        let bits = generate_bits("prng", 20_000, 1, 0.5).unwrap();
        let rows = test_bits(&bits, "Runs,Frequency", 0.01).unwrap();
        assert_eq!(rows.iter().map(|r| r.test.as_str()).collect::<Vec<_>>(), ["Runs", "Frequency"]);
        assert!(rows.iter().all(|r| r.outcome == Outcome::Pass));

        let persistent = generate_bits("walk", 20_000, 1, 0.8).unwrap();
        assert_eq!(test_bits(&persistent, "Runs", 0.01).unwrap()[0].outcome, Outcome::Reject);

        let short = test_bits("0110", "all", 0.01).unwrap();
        assert!(short.iter().all(|r| r.outcome == Outcome::Skipped && r.p_value.is_none()));
        assert!(test_bits("01x", "Runs", 0.01).is_err());
        assert!(test_bits("0101", "Runs", 2.0).is_err());
    }

    #[test]
    fn catalog_lists_every_test() {
        assert_eq!(catalog().split(',').count(), tickbits::stattests::registry().len());
    }
}
