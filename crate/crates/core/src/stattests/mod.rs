//! The randomness-test battery.
//!
//! Every test maps a bit string to a statistic and one or more p-values; a
//! string shorter than the test's `min_length` yields [`Outcome::Skipped`],
//! never a rejection.

pub mod entropy;
pub mod nist;
pub mod registry;
pub mod testu01;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use entropy::block_length;
pub use nist::{NistKernel, NullModel};
pub use registry::{registry, select};

use crate::bitcore::BitString;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    Frequency,
    Pattern,
    EntropyComplexity,
    Spectral,
    RandomWalk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    One,
    Two,
}

/// Significance level, `0 < α < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(a: f64) -> Result<Self> {
        if a > 0.0 && a < 1.0 {
            Ok(Alpha(a))
        } else {
            Err(Error::Config(format!("alpha must lie in (0, 1), got {a}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for Alpha {
    fn default() -> Self {
        Alpha(0.01)
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(a: f64) -> Result<Self> {
        Alpha::new(a)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Reject,
    Skipped,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Reject => "reject",
            Outcome::Skipped => "skipped",
        }
    }
}

/// One-tailed: pass iff `p ≥ α`. Two-tailed: pass iff `α/2 ≤ p ≤ 1 − α/2`.
pub fn decide(p: f64, tail: Tail, alpha: Alpha) -> Result<Outcome> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p-value {p} outside [0, 1]")));
    }
    let a = alpha.get();
    let pass = match tail {
        Tail::One => p >= a,
        Tail::Two => p >= a / 2.0 && p <= 1.0 - a / 2.0,
    };
    Ok(if pass { Outcome::Pass } else { Outcome::Reject })
}

/// A registered test and its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestSpec {
    pub id: String,
    pub category: Category,
    pub params: BTreeMap<String, usize>,
    pub tail: Tail,
    pub min_length: usize,
}

impl TestSpec {
    /// Test family: the id up to the first `_`.
    pub fn family(&self) -> &str {
        self.id.split('_').next().unwrap_or(&self.id)
    }

    pub fn param(&self, key: &str) -> Result<usize> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| Error::Config(format!("{}: missing parameter `{key}`", self.id)))
    }

    fn nist_kernel(&self) -> Result<Option<NistKernel>> {
        Ok(Some(match self.family() {
            "Frequency" => NistKernel::Frequency,
            "BlockFrequency" => NistKernel::BlockFrequency { m: self.param("M")? },
            "CumulativeSums" => NistKernel::CumulativeSums,
            "Runs" => NistKernel::Runs,
            "LongestRun" => NistKernel::LongestRun { m: self.param("M")? },
            "DFT" => NistKernel::Dft,
            "NonOverlappingTemplate" => NistKernel::NonOverlappingTemplate {
                m: self.param("m")?,
                blocks: self.param("N")?,
            },
            "ApproximateEntropy" => NistKernel::ApproximateEntropy { m: self.param("m")? },
            "Serial" => NistKernel::Serial { m: self.param("m")? },
            _ => return Ok(None),
        }))
    }

    /// Fails for unknown families and for parameters no kernel accepts.
    pub fn validate(&self) -> Result<()> {
        if self.min_length == 0 {
            return Err(Error::Config(format!("{}: min_length must be positive", self.id)));
        }
        if let Some(kernel) = self.nist_kernel()? {
            let t = self.param("t")?;
            if t < kernel.min_substring() || self.min_length < t {
                return Err(Error::Config(format!("{}: substring length {t} too short", self.id)));
            }
            if let NistKernel::LongestRun { m } = kernel {
                if !nist::kernels::LONGEST_RUN_BLOCKS.contains(&m) {
                    return Err(Error::Config(format!("{}: unsupported block size M = {m}", self.id)));
                }
            }
            return Ok(());
        }
        let positive = |key: &str| -> Result<usize> {
            match self.param(key)? {
                0 => Err(Error::Config(format!("{}: `{key}` must be positive", self.id))),
                v => Ok(v),
            }
        };
        match self.family() {
            "MultinomialBitsOverlapping" => {
                if !(1..=24).contains(&positive("L")?) {
                    return Err(Error::Config(format!("{}: L must be in 1..=24", self.id)));
                }
            }
            "HammingWeight" | "HammingCorrelation" | "HammingIndependence" => {
                let l = positive("L")?;
                if self.min_length < 2 * l {
                    return Err(Error::Config(format!("{}: min_length below two blocks", self.id)));
                }
            }
            "AutoCorrelation" => {
                if self.min_length <= positive("d")? {
                    return Err(Error::Config(format!("{}: min_length must exceed d", self.id)));
                }
            }
            "LongestHeadRun" => {
                if self.min_length < testu01::HEAD_RUN_BLOCK {
                    return Err(Error::Config(format!("{}: min_length below one block", self.id)));
                }
            }
            "Run" | "ArithmeticMean" => {}
            "ShannonEntropy" | "KL" => {
                if self.min_length < 4 {
                    return Err(Error::Config(format!("{}: min_length must be at least 4", self.id)));
                }
            }
            _ => return Err(Error::UnknownTest(self.id.clone())),
        }
        Ok(())
    }
}

/// Settings shared by every test in a battery run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BatteryOptions {
    pub alpha: Alpha,
    pub null_model: NullModel,
    /// Overrides the entropy tests' block length `k`.
    pub entropy_k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub spec_id: String,
    pub statistic: Option<f64>,
    pub p_values: Vec<f64>,
    pub outcome: Outcome,
    pub n_bits_used: usize,
    pub diagnostics: BTreeMap<String, f64>,
}

impl TestResult {
    fn skipped(spec: &TestSpec, n: usize) -> Self {
        Self {
            spec_id: spec.id.clone(),
            statistic: None,
            p_values: Vec::new(),
            outcome: Outcome::Skipped,
            n_bits_used: n,
            diagnostics: BTreeMap::new(),
        }
    }

    /// Smallest reported p-value, the one the decision is based on.
    pub fn p_value(&self) -> Option<f64> {
        self.p_values.iter().copied().reduce(f64::min)
    }

    pub fn is_skipped(&self) -> bool {
        self.outcome == Outcome::Skipped
    }
}

/// Runs one test on `bits`.
pub fn run_test(spec: &TestSpec, bits: &BitString, opts: &BatteryOptions) -> Result<TestResult> {
    spec.validate()?;
    run_units(spec, &bits.to_units(), opts)
}

/// Like [`run_test`] on a `0`/`1` byte slice; the spec is assumed valid.
pub fn run_units(spec: &TestSpec, eps: &[u8], opts: &BatteryOptions) -> Result<TestResult> {
    let n = eps.len();
    if n < spec.min_length {
        return Ok(TestResult::skipped(spec, n));
    }
    let alpha = opts.alpha.get();
    let (statistic, p, diagnostics) = if let Some(kernel) = spec.nist_kernel()? {
        let t = spec.param("t")?;
        let s = nist::run_substrings(kernel, t, eps, alpha, opts.null_model);
        (s.statistic, s.p_value, s.diagnostics)
    } else {
        let stat = match spec.family() {
            "MultinomialBitsOverlapping" => testu01::multinomial_bits_overlapping(eps, spec.param("L")?),
            "HammingWeight" => testu01::hamming_weight(eps, spec.param("L")?),
            "HammingCorrelation" => testu01::hamming_correlation(eps, spec.param("L")?),
            "HammingIndependence" => testu01::hamming_independence(eps, spec.param("L")?),
            "AutoCorrelation" => testu01::autocorrelation(eps, spec.param("d")?),
            "LongestHeadRun" => testu01::longest_head_run(eps),
            "Run" => testu01::run_lengths(eps),
            "ShannonEntropy" | "KL" => {
                let k = spec
                    .params
                    .get("k")
                    .copied()
                    .or(opts.entropy_k)
                    .unwrap_or_else(|| block_length(n));
                let r = if spec.family() == "KL" {
                    entropy::kl_independence(eps, k)?
                } else {
                    entropy::shannon_entropy(eps, k)?
                };
                let mut d = BTreeMap::new();
                d.insert("k".into(), k as f64);
                d.insert("df".into(), r.df);
                testu01::Stat {
                    statistic: r.statistic,
                    p_value: r.p_value,
                    diagnostics: d,
                }
            }
            "ArithmeticMean" => {
                let (z, p) = entropy::arithmetic_mean(eps);
                testu01::Stat {
                    statistic: z,
                    p_value: p,
                    diagnostics: BTreeMap::new(),
                }
            }
            _ => return Err(Error::UnknownTest(spec.id.clone())),
        };
        (stat.statistic, stat.p_value, stat.diagnostics)
    };
    let p = p.clamp(0.0, 1.0);
    Ok(TestResult {
        spec_id: spec.id.clone(),
        statistic: Some(statistic),
        p_values: vec![p],
        outcome: decide(p, spec.tail, opts.alpha)?,
        n_bits_used: n,
        diagnostics,
    })
}

/// One result per spec, in spec order.
pub fn run_battery(bits: &BitString, specs: &[TestSpec], opts: &BatteryOptions) -> Result<Vec<TestResult>> {
    for s in specs {
        s.validate()?;
    }
    let eps = bits.to_units();
    specs.par_iter().map(|s| run_units(s, &eps, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rngsrc::prng_bits;

    #[test]
    fn decision_kernel() {
        let a = Alpha::default();
        assert_eq!(decide(0.5, Tail::One, a).unwrap(), Outcome::Pass);
        assert_eq!(decide(0.004, Tail::Two, a).unwrap(), Outcome::Reject);
        assert_eq!(decide(0.996, Tail::Two, a).unwrap(), Outcome::Reject);
        assert_eq!(decide(0.996, Tail::One, a).unwrap(), Outcome::Pass);
        assert_eq!(decide(0.01, Tail::One, a).unwrap(), Outcome::Pass);
        assert!(decide(1.5, Tail::One, a).is_err());
        assert!(decide(-0.1, Tail::Two, a).is_err());
        assert!(Alpha::new(0.0).is_err());
        assert!(Alpha::new(1.0).is_err());
    }

    #[test]
    fn frequency_on_a_balanced_block() {
        let eps: Vec<u8> = (0..128).map(|i| (i % 2) as u8).collect();
        assert_eq!(nist::kernels::frequency(&eps), 1.0);
    }

    #[test]
    fn skipped_is_not_reject() {
        let spec = registry::find("HammingWeight_L32").unwrap();
        let bits = prng_bits(1, 500);
        let r = run_test(&spec, &bits, &BatteryOptions::default()).unwrap();
        assert_eq!(r.outcome, Outcome::Skipped);
        assert!(r.p_value().is_none());
    }

    #[test]
    fn empty_battery() {
        let bits = prng_bits(1, 1000);
        assert!(run_battery(&bits, &[], &BatteryOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn unknown_family_is_an_error() {
        let mut spec = registry::find("Run").unwrap();
        spec.id = "Mystery".into();
        assert!(matches!(
            run_test(&spec, &prng_bits(0, 1000), &BatteryOptions::default()),
            Err(Error::UnknownTest(_))
        ));
    }

    #[test]
    fn battery_preserves_order_and_is_pure() {
        let bits = prng_bits(42, 30_000);
        let specs = registry();
        let opts = BatteryOptions::default();
        let a = run_battery(&bits, &specs, &opts).unwrap();
        let b = run_battery(&bits, &specs, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().map(|r| r.spec_id.clone()).collect::<Vec<_>>(), specs.iter().map(|s| s.id.clone()).collect::<Vec<_>>());
        let rejects: Vec<_> = a.iter().filter(|r| r.outcome == Outcome::Reject).map(|r| &r.spec_id).collect();
        assert!(rejects.len() <= 2, "{rejects:?}");
    }

    #[test]
    fn alternating_string_is_rejected_by_autocorrelation() {
        let alt: BitString = (0..10_000).map(|i| i % 2 == 1).collect();
        let r = run_test(&registry::find("AutoCorrelation_d1").unwrap(), &alt, &BatteryOptions::default()).unwrap();
        assert_eq!(r.outcome, Outcome::Reject);
    }

    #[test]
    fn monotone_decisions_in_alpha() {
        let bits = prng_bits(9, 20_000);
        let specs: Vec<_> = registry().into_iter().filter(|s| s.tail == Tail::One).collect();
        let strict = BatteryOptions { alpha: Alpha::new(0.001).unwrap(), ..Default::default() };
        let loose = BatteryOptions::default();
        for s in &specs {
            let p = run_test(s, &bits, &loose).unwrap();
            if p.outcome == Outcome::Pass {
                let q = run_test(s, &bits, &strict).unwrap();
                assert_eq!(q.outcome, Outcome::Pass, "{}", s.id);
            }
        }
    }
}
