use std::collections::BTreeMap;

use super::{Category, Tail, TestSpec};
use crate::error::{Error, Result};

/// NIST substring length for most tests.
pub const NIST_SHORT: usize = 128;
/// NIST substring length for the spectral and template tests.
pub const NIST_LONG: usize = 1000;
/// Fewest substrings a NIST test needs for its uniformity check.
pub const NIST_MIN_SUBSTRINGS: usize = 20;

fn spec(id: &str, category: Category, tail: Tail, min_length: usize, params: &[(&str, usize)]) -> TestSpec {
    TestSpec {
        id: id.to_string(),
        category,
        params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect::<BTreeMap<_, _>>(),
        tail,
        min_length,
    }
}

fn nist(id: &str, category: Category, t: usize, params: &[(&str, usize)]) -> TestSpec {
    let mut all = vec![("t", t)];
    all.extend_from_slice(params);
    spec(id, category, Tail::One, NIST_MIN_SUBSTRINGS * t, &all)
}

/// Every in-scope test with its default parameters.
pub fn registry() -> Vec<TestSpec> {
    use Category::*;
    let mut out = vec![
        nist("Frequency", Frequency, NIST_SHORT, &[]),
        nist("BlockFrequency", Frequency, NIST_SHORT, &[("M", 20)]),
        nist("CumulativeSums", RandomWalk, NIST_SHORT, &[]),
        nist("Runs", Pattern, NIST_SHORT, &[]),
        nist("LongestRun", Pattern, NIST_SHORT, &[("M", 8)]),
        nist("DFT", Spectral, NIST_LONG, &[]),
        nist("NonOverlappingTemplate", Pattern, NIST_LONG, &[("m", 9), ("N", 8)]),
        nist("ApproximateEntropy", EntropyComplexity, NIST_SHORT, &[("m", 5)]),
        nist("Serial", Pattern, NIST_SHORT, &[("m", 2)]),
    ];
    for l in [2, 4, 8, 16] {
        out.push(spec(
            &format!("MultinomialBitsOverlapping_L{l}"),
            Frequency,
            Tail::Two,
            500.max(1 << l),
            &[("L", l)],
        ));
    }
    out.push(spec("HammingWeight_L32", Frequency, Tail::Two, 1000, &[("L", 32)]));
    for l in [32, 64, 128] {
        out.push(spec(
            &format!("HammingCorrelation_L{l}"),
            Pattern,
            Tail::Two,
            500.max(30 * l),
            &[("L", l)],
        ));
    }
    for l in [16, 32, 64] {
        out.push(spec(
            &format!("HammingIndependence_L{l}"),
            Pattern,
            Tail::Two,
            500.max(100 * l),
            &[("L", l)],
        ));
    }
    for d in [1, 2] {
        out.push(spec(&format!("AutoCorrelation_d{d}"), Pattern, Tail::Two, 500, &[("d", d)]));
    }
    out.push(spec("LongestHeadRun", Pattern, Tail::Two, 2000, &[]));
    out.push(spec("Run", Pattern, Tail::Two, 500, &[]));
    out.push(spec("ShannonEntropy", EntropyComplexity, Tail::One, 500, &[]));
    out.push(spec("KL", EntropyComplexity, Tail::One, 500, &[]));
    out.push(spec("ArithmeticMean", Frequency, Tail::One, 100, &[]));
    out
}

pub fn find(id: &str) -> Result<TestSpec> {
    registry()
        .into_iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::UnknownTest(id.to_string()))
}

/// Registry entries named in a comma-separated list, in list order;
/// `all` selects the whole registry.
pub fn select(list: &str) -> Result<Vec<TestSpec>> {
    if list.trim() == "all" {
        return Ok(registry());
    }
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(find)
        .collect()
}

pub fn catalog_json(specs: &[TestSpec]) -> Result<String> {
    Ok(serde_json::to_string_pretty(specs)?)
}

pub fn from_catalog_json(text: &str) -> Result<Vec<TestSpec>> {
    let specs: Vec<TestSpec> = serde_json::from_str(text)?;
    for s in &specs {
        if s.min_length == 0 {
            return Err(Error::Config(format!("{}: min_length must be positive", s.id)));
        }
    }
    Ok(specs)
}
