//! NIST-style tests run on consecutive substrings and aggregated two ways:
//! the proportion of passing substrings and a χ² check on how the substring
//! p-values fall into ten equal bins.
//!
//! For short substrings many statistics are discrete, so their p-values are
//! not uniform even for perfect bits. By default each kernel's null bin
//! probabilities are therefore estimated once by simulation with the same
//! kernel and substring length ([`NullModel::Calibrated`]); the flat 0.1 bins
//! of the stock battery remain available as [`NullModel::Uniform`].

pub mod kernels;
mod templates;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

pub use templates::aperiodic_templates;

use crate::rngsrc::SplitMix64;
use crate::special::chi2_sf;

pub const BINS: usize = 10;

/// Expected-count floor when merging adjacent p-value bins.
const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullModel {
    #[default]
    Calibrated,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NistKernel {
    Frequency,
    BlockFrequency { m: usize },
    CumulativeSums,
    Runs,
    LongestRun { m: usize },
    Dft,
    NonOverlappingTemplate { m: usize, blocks: usize },
    ApproximateEntropy { m: usize },
    Serial { m: usize },
}

fn template_values(m: usize) -> Arc<Vec<usize>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<usize>>>>> = OnceLock::new();
    let mut map = CACHE.get_or_init(Default::default).lock().expect("template cache poisoned");
    map.entry(m)
        .or_insert_with(|| {
            Arc::new(
                aperiodic_templates(m)
                    .iter()
                    .map(|t| templates::template_value(t))
                    .collect(),
            )
        })
        .clone()
}

impl NistKernel {
    /// Number of p-values produced per substring.
    pub fn streams(&self) -> usize {
        match self {
            NistKernel::CumulativeSums | NistKernel::Serial { .. } => 2,
            NistKernel::NonOverlappingTemplate { m, .. } => template_values(*m).len(),
            _ => 1,
        }
    }

    /// Streams that share one null distribution (forward and backward sums;
    /// all aperiodic templates of one length).
    fn shared_null(&self) -> bool {
        matches!(self, NistKernel::CumulativeSums | NistKernel::NonOverlappingTemplate { .. })
    }

    /// Smallest substring the kernel accepts.
    pub fn min_substring(&self) -> usize {
        match *self {
            NistKernel::BlockFrequency { m } | NistKernel::LongestRun { m } => m,
            NistKernel::NonOverlappingTemplate { m, blocks } => m * blocks,
            NistKernel::ApproximateEntropy { m } => m + 1,
            NistKernel::Serial { m } => m,
            _ => 2,
        }
    }

    /// Appends this substring's p-values to `out`.
    pub fn evaluate(&self, eps: &[u8], out: &mut Vec<f64>) {
        match *self {
            NistKernel::Frequency => out.push(kernels::frequency(eps)),
            NistKernel::BlockFrequency { m } => out.push(kernels::block_frequency(eps, m)),
            NistKernel::CumulativeSums => out.extend(kernels::cumulative_sums(eps)),
            NistKernel::Runs => out.push(kernels::runs(eps)),
            NistKernel::LongestRun { m } => out.push(kernels::longest_run(eps, m)),
            NistKernel::Dft => out.push(kernels::dft(eps)),
            NistKernel::NonOverlappingTemplate { m, blocks } => all_templates(eps, m, blocks, out),
            NistKernel::ApproximateEntropy { m } => out.push(kernels::approximate_entropy(eps, m)),
            NistKernel::Serial { m } => out.extend(kernels::serial(eps, m)),
        }
    }
}

/// Every aperiodic template at once: in each block, a window equal to value
/// `v` counts when it starts at least `m` after the previous counted `v`.
fn all_templates(eps: &[u8], m: usize, blocks: usize, out: &mut Vec<f64>) {
    let values = template_values(m);
    let block_len = eps.len() / blocks;
    let size = 1usize << m;
    let mask = size - 1;
    let mut counts = vec![vec![0usize; blocks]; values.len()];
    let mut hits = vec![0usize; size];
    let mut next_free = vec![0usize; size];
    for (b, block) in eps.chunks_exact(block_len).take(blocks).enumerate() {
        hits.fill(0);
        next_free.fill(0);
        let mut v = 0usize;
        for (i, &bit) in block.iter().enumerate() {
            v = ((v << 1) | bit as usize) & mask;
            if i + 1 < m {
                continue;
            }
            let start = i + 1 - m;
            if start >= next_free[v] {
                hits[v] += 1;
                next_free[v] = start + m;
            }
        }
        for (k, &tv) in values.iter().enumerate() {
            counts[k][b] = hits[tv];
        }
    }
    out.extend(counts.iter().map(|w| kernels::template_p(w, block_len, m)));
}

fn bin_of(p: f64) -> usize {
    ((p * BINS as f64) as usize).min(BINS - 1)
}

type NullBins = Vec<[f64; BINS]>;

/// Substrings simulated per calibration; kept near 5·10⁷ bits.
fn calibration_substrings(kernel: &NistKernel, t: usize) -> usize {
    let by_bits = 50_000_000 / t;
    let base = by_bits.min(200_000);
    if kernel.shared_null() {
        (base / kernel.streams()).max(10_000).min(base)
    } else {
        base
    }
}

fn simulate_null(kernel: NistKernel, t: usize) -> NullBins {
    let streams = kernel.streams();
    let classes = if kernel.shared_null() { 1 } else { streams };
    let mut counts = vec![[0u64; BINS]; classes];
    let mut seed_mix = SplitMix64::new(0x6e75_6c6c ^ (t as u64).rotate_left(32));
    let mut rng = SplitMix64::new(seed_mix.next_u64() ^ hash_kernel(&kernel));
    let mut eps = vec![0u8; t];
    let mut ps = Vec::with_capacity(streams);
    for _ in 0..calibration_substrings(&kernel, t) {
        fill_bits(&mut rng, &mut eps);
        ps.clear();
        kernel.evaluate(&eps, &mut ps);
        for (s, &p) in ps.iter().enumerate() {
            counts[if classes == 1 { 0 } else { s }][bin_of(p)] += 1;
        }
    }
    counts
        .into_iter()
        .map(|c| {
            let total: u64 = c.iter().sum();
            let mut q = [0.0; BINS];
            for (qi, ci) in q.iter_mut().zip(c) {
                *qi = ci as f64 / total as f64;
            }
            q
        })
        .collect()
}

fn hash_kernel(k: &NistKernel) -> u64 {
    // stable across runs and platforms, unlike std's hasher
    let (tag, a, b) = match *k {
        NistKernel::Frequency => (1, 0, 0),
        NistKernel::BlockFrequency { m } => (2, m, 0),
        NistKernel::CumulativeSums => (3, 0, 0),
        NistKernel::Runs => (4, 0, 0),
        NistKernel::LongestRun { m } => (5, m, 0),
        NistKernel::Dft => (6, 0, 0),
        NistKernel::NonOverlappingTemplate { m, blocks } => (7, m, blocks),
        NistKernel::ApproximateEntropy { m } => (8, m, 0),
        NistKernel::Serial { m } => (9, m, 0),
    };
    SplitMix64::new(((tag as u64) << 56) ^ ((a as u64) << 24) ^ b as u64).next_u64()
}

pub(crate) fn fill_bits(rng: &mut SplitMix64, out: &mut [u8]) {
    for chunk in out.chunks_mut(64) {
        let w = rng.next_u64();
        for (i, b) in chunk.iter_mut().enumerate() {
            *b = ((w >> (63 - i)) & 1) as u8;
        }
    }
}

/// Simulated null bin probabilities for `(kernel, t)`, computed on first use.
pub fn null_bins(kernel: NistKernel, t: usize) -> Arc<NullBins> {
    type Slot = Arc<OnceLock<Arc<NullBins>>>;
    static CACHE: OnceLock<Mutex<HashMap<(NistKernel, usize), Slot>>> = OnceLock::new();
    let slot = CACHE
        .get_or_init(Default::default)
        .lock()
        .expect("null cache poisoned")
        .entry((kernel, t))
        .or_default()
        .clone();
    slot.get_or_init(|| {
        log::debug!("calibrating null p-value bins for {kernel:?} at t = {t}");
        Arc::new(simulate_null(kernel, t))
    })
    .clone()
}

/// χ² of observed bin counts against expected probabilities after merging
/// adjacent bins until each expects at least five substrings.
/// Returns `(statistic, p, merged bin count)`; fewer than two bins gives p = 1.
pub fn uniformity(counts: &[u64; BINS], probs: &[f64; BINS]) -> (f64, f64, usize) {
    let n: u64 = counts.iter().sum();
    let mut groups: Vec<(f64, f64)> = Vec::with_capacity(BINS);
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&c, &q) in counts.iter().zip(probs) {
        obs += c as f64;
        exp += q * n as f64;
        if exp >= MIN_EXPECTED {
            groups.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if obs > 0.0 || exp > 0.0 {
        match groups.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => groups.push((obs, exp)),
        }
    }
    if groups.len() < 2 {
        return (0.0, 1.0, groups.len());
    }
    let chi2: f64 = groups.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    (chi2, chi2_sf(chi2, (groups.len() - 1) as f64), groups.len())
}

/// Battery-level outcome of one NIST test on one string.
#[derive(Debug, Clone, PartialEq)]
pub struct NistSummary {
    /// Uniformity χ² of the stream with the smallest p.
    pub statistic: f64,
    /// Uniformity p, Šidák-combined over streams when there is more than one.
    pub p_value: f64,
    pub diagnostics: BTreeMap<String, f64>,
}

/// Splits `eps` into `⌊n / t⌋` substrings and aggregates the kernel's p-values.
pub fn run_substrings(kernel: NistKernel, t: usize, eps: &[u8], alpha: f64, null: NullModel) -> NistSummary {
    assert!(t >= kernel.min_substring(), "substring length {t} too short for {kernel:?}");
    let n_sub = eps.len() / t;
    assert!(n_sub >= 1, "string shorter than one substring");
    let streams = kernel.streams();
    let mut counts = vec![[0u64; BINS]; streams];
    let mut passes = vec![0usize; streams];
    let mut ps = Vec::with_capacity(streams);
    for sub in eps.chunks_exact(t) {
        ps.clear();
        kernel.evaluate(sub, &mut ps);
        for (s, &p) in ps.iter().enumerate() {
            counts[s][bin_of(p)] += 1;
            passes[s] += usize::from(p >= alpha);
        }
    }
    let calibrated = match null {
        NullModel::Calibrated => Some(null_bins(kernel, t)),
        NullModel::Uniform => None,
    };
    let flat = [1.0 / BINS as f64; BINS];
    let mut best = (f64::INFINITY, 1.0, 0usize);
    for (s, c) in counts.iter().enumerate() {
        let probs = match &calibrated {
            Some(bins) if bins.len() == 1 => &bins[0],
            Some(bins) => &bins[s],
            None => &flat,
        };
        let (chi2, p, _) = uniformity(c, probs);
        if p < best.1 || best.0.is_infinite() {
            best = (chi2, p, s);
        }
    }
    let p_min = best.1;
    let p_value = if streams == 1 {
        p_min
    } else {
        // Šidák: P(min of S uniforms ≤ p)
        (-(streams as f64 * (-p_min).ln_1p()).exp_m1()).clamp(0.0, 1.0)
    };
    let proportion = passes.iter().copied().min().unwrap_or(0) as f64 / n_sub as f64;
    let floor = (1.0 - alpha) - 3.0 * (alpha * (1.0 - alpha) / n_sub as f64).sqrt();
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("substrings".into(), n_sub as f64);
    diagnostics.insert("pass_proportion".into(), proportion);
    diagnostics.insert("proportion_floor".into(), floor);
    if streams > 1 {
        diagnostics.insert("streams".into(), streams as f64);
        diagnostics.insert("min_stream_p".into(), p_min);
    }
    NistSummary {
        statistic: best.0,
        p_value,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::erfc;

    fn random_units(seed: u64, n: usize) -> Vec<u8> {
        let mut v = vec![0u8; n];
        fill_bits(&mut SplitMix64::new(seed), &mut v);
        v
    }

    #[test]
    fn fast_templates_match_direct_scan() {
        let eps = random_units(11, 1000);
        let mut fast = Vec::new();
        all_templates(&eps, 9, 8, &mut fast);
        let direct: Vec<f64> = aperiodic_templates(9)
            .iter()
            .map(|t| kernels::non_overlapping_template(&eps, t, 8))
            .collect();
        assert_eq!(fast.len(), 148);
        for (a, b) in fast.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn frequency_null_bins_match_binomial() {
        // exact: p = erfc(|2k − t| / √(2t)) with k ~ Binomial(t, ½)
        let t = 128usize;
        let mut exact = [0.0f64; BINS];
        let mut ln_choose = 0.0f64;
        for k in 0..=t {
            if k > 0 {
                ln_choose += ((t - k + 1) as f64 / k as f64).ln();
            }
            let prob = (ln_choose - t as f64 * std::f64::consts::LN_2).exp();
            let p = erfc((2.0 * k as f64 - t as f64).abs() / (2.0 * t as f64).sqrt());
            exact[bin_of(p)] += prob;
        }
        let sim = null_bins(NistKernel::Frequency, t);
        for (a, b) in sim[0].iter().zip(&exact) {
            assert!((a - b).abs() < 0.004, "{a} vs {b}");
        }
    }

    #[test]
    fn uniformity_merging() {
        let flat = [0.1; BINS];
        let (_, p, bins) = uniformity(&[10; BINS], &flat);
        assert_eq!(bins, 10);
        assert!((p - 1.0).abs() < 1e-12);
        // expected 2 per bin: groups 0..=2, 3..=5, 6..=9
        let (_, p, bins) = uniformity(&[3, 2, 1, 0, 2, 3, 1, 2, 3, 3], &flat);
        assert_eq!(bins, 3);
        assert!(p > 0.01);
        let (_, p, bins) = uniformity(&[2, 0, 0, 0, 0, 0, 0, 0, 0, 0], &flat);
        assert_eq!((bins, p), (1, 1.0));
        let (_, p, _) = uniformity(&[100, 0, 0, 0, 0, 0, 0, 0, 0, 0], &flat);
        assert!(p < 1e-20);
    }

    #[test]
    fn random_strings_pass_and_constant_fails() {
        let eps = random_units(5, 100_000);
        for kernel in [
            NistKernel::Frequency,
            NistKernel::Runs,
            NistKernel::Serial { m: 2 },
            NistKernel::CumulativeSums,
        ] {
            let s = run_substrings(kernel, 128, &eps, 0.01, NullModel::Calibrated);
            assert!(s.p_value > 1e-4, "{kernel:?}: {}", s.p_value);
        }
        let ones = vec![1u8; 12_800];
        let s = run_substrings(NistKernel::Frequency, 128, &ones, 0.01, NullModel::Calibrated);
        assert!(s.p_value < 1e-10);
        assert_eq!(s.diagnostics["pass_proportion"], 0.0);
    }
}
