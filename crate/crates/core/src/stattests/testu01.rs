//! Whole-string tests in the style of the Alphabit and Rabbit batteries.
//!
//! Every kernel returns the upper-tail p-value of its statistic; callers
//! apply a two-tailed decision so that suspiciously good fits are flagged too.

use std::collections::BTreeMap;

use super::nist::kernels::cyclic_counts;
use crate::special::{chi2_sf, normal_sf};

#[derive(Debug, Clone, PartialEq)]
pub struct Stat {
    pub statistic: f64,
    pub p_value: f64,
    pub diagnostics: BTreeMap<String, f64>,
}

impl Stat {
    fn new(statistic: f64, p_value: f64) -> Self {
        Self {
            statistic,
            p_value: p_value.clamp(0.0, 1.0),
            diagnostics: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }
}

fn psi2(eps: &[u8], l: usize) -> f64 {
    if l == 0 {
        return 0.0;
    }
    let n = eps.len() as f64;
    let sum_sq: f64 = cyclic_counts(eps, l).into_iter().map(|c| (c as f64).powi(2)).sum();
    sum_sq * (1u64 << l) as f64 / n - n
}

/// Overlapping `L`-bit pattern counts (cyclic): `∇ψ² = ψ²_L − ψ²_{L−1}`, χ² with `2^{L−1}` df.
pub fn multinomial_bits_overlapping(eps: &[u8], l: usize) -> Stat {
    assert!((1..=24).contains(&l) && eps.len() >= l);
    let d = psi2(eps, l) - psi2(eps, l - 1);
    let df = (1u64 << (l - 1)) as f64;
    Stat::new(d, chi2_sf(d, df)).with("df", df)
}

fn block_weights(eps: &[u8], l: usize) -> Vec<usize> {
    eps.chunks_exact(l).map(|b| b.iter().filter(|&&x| x != 0).count()).collect()
}

/// `Σ (2w − L)² / L` over `⌊n/L⌋` disjoint blocks, χ² with one df per block.
pub fn hamming_weight(eps: &[u8], l: usize) -> Stat {
    let w = block_weights(eps, l);
    assert!(!w.is_empty());
    let x: f64 = w.iter().map(|&w| (2.0 * w as f64 - l as f64).powi(2) / l as f64).sum();
    Stat::new(x, chi2_sf(x, w.len() as f64)).with("blocks", w.len() as f64)
}

/// Lag-one correlation of successive block weights, `z = ρ̂ √(K − 1)`.
pub fn hamming_correlation(eps: &[u8], l: usize) -> Stat {
    let w = block_weights(eps, l);
    assert!(w.len() >= 2);
    let k = w.len() as f64;
    let half = l as f64 / 2.0;
    let sum: f64 = w.windows(2).map(|p| (p[0] as f64 - half) * (p[1] as f64 - half)).sum();
    let rho = 4.0 * sum / ((k - 1.0) * l as f64);
    let z = rho * (k - 1.0).sqrt();
    Stat::new(z, normal_sf(z)).with("rho", rho)
}

fn binomial_half_pmf(l: usize) -> Vec<f64> {
    let mut pmf = Vec::with_capacity(l + 1);
    let mut p = 0.5f64.powi(l as i32);
    for w in 0..=l {
        pmf.push(p);
        p *= (l - w) as f64 / (w + 1) as f64;
    }
    pmf
}

/// Groups consecutive outcomes into classes of probability at least `min_prob`;
/// a short tail is folded into the last class. Returns the class of each outcome.
fn lump(probs: &[f64], min_prob: f64) -> (Vec<usize>, Vec<f64>) {
    let mut class_of = Vec::with_capacity(probs.len());
    let mut class_prob: Vec<f64> = Vec::new();
    let mut acc = 0.0;
    for &p in probs {
        class_of.push(class_prob.len());
        acc += p;
        if acc >= min_prob {
            class_prob.push(acc);
            acc = 0.0;
        }
    }
    if acc > 0.0 || class_prob.is_empty() {
        if class_prob.is_empty() {
            class_prob.push(acc);
        } else {
            let last = class_prob.len() - 1;
            class_prob[last] += acc;
            for c in class_of.iter_mut().filter(|c| **c > last) {
                *c = last;
            }
        }
    }
    (class_of, class_prob)
}

fn chi2_counts(obs: &[u64], probs: &[f64], total: f64) -> f64 {
    obs.iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = total * p;
            (o as f64 - e).powi(2) / e
        })
        .sum()
}

/// Joint weights of disjoint block pairs against the product of binomials.
/// Weight classes are lumped so that every cell expects at least five pairs.
pub fn hamming_independence(eps: &[u8], l: usize) -> Stat {
    let w = block_weights(eps, l);
    let pairs = w.len() / 2;
    assert!(pairs >= 1);
    let min_prob = (5.0 / pairs as f64).sqrt();
    let (class_of, class_prob) = lump(&binomial_half_pmf(l), min_prob);
    let c = class_prob.len();
    if c < 2 {
        return Stat::new(0.0, 1.0).with("classes", c as f64);
    }
    let mut obs = vec![0u64; c * c];
    for p in w.chunks_exact(2) {
        obs[class_of[p[0]] * c + class_of[p[1]]] += 1;
    }
    let probs: Vec<f64> = (0..c * c).map(|i| class_prob[i / c] * class_prob[i % c]).collect();
    let x = chi2_counts(&obs, &probs, pairs as f64);
    let df = (c * c - 1) as f64;
    Stat::new(x, chi2_sf(x, df)).with("classes", c as f64).with("df", df)
}

/// `A = Σ b_i ⊕ b_{i+d}`, `z = (A − (n−d)/2) / √((n−d)/4)`.
pub fn autocorrelation(eps: &[u8], d: usize) -> Stat {
    assert!(d >= 1 && eps.len() > d);
    let m = (eps.len() - d) as f64;
    let a = eps.iter().zip(&eps[d..]).filter(|(x, y)| x != y).count() as f64;
    let z = (a - m / 2.0) / (m / 4.0).sqrt();
    Stat::new(z, normal_sf(z)).with("disagreements", a)
}

/// Block length used by [`longest_head_run`].
pub const HEAD_RUN_BLOCK: usize = 64;

/// `P(longest run of ones = r)` in `n` fair bits, `r = 0..=n`.
fn longest_run_pmf(n: usize) -> Vec<f64> {
    // cdf[r]: probability that no run exceeds r
    let mut cdf = Vec::with_capacity(n + 1);
    for r in 0..=n {
        // state[j]: current run length j ≤ r
        let mut state = vec![0.0f64; r + 1];
        state[0] = 1.0;
        for _ in 0..n {
            let mut next = vec![0.0f64; r + 1];
            let total: f64 = state.iter().sum();
            next[0] = 0.5 * total;
            for j in 0..r {
                next[j + 1] = 0.5 * state[j];
            }
            state = next;
        }
        cdf.push(state.iter().sum::<f64>());
    }
    let mut pmf = vec![cdf[0]];
    pmf.extend(cdf.windows(2).map(|w| (w[1] - w[0]).max(0.0)));
    pmf
}

/// Longest run of ones in each 64-bit block, χ² against its exact distribution.
pub fn longest_head_run(eps: &[u8]) -> Stat {
    use std::sync::OnceLock;
    static PMF: OnceLock<Vec<f64>> = OnceLock::new();
    let pmf = PMF.get_or_init(|| longest_run_pmf(HEAD_RUN_BLOCK));
    let blocks = eps.len() / HEAD_RUN_BLOCK;
    assert!(blocks >= 1);
    let (class_of, class_prob) = lump(pmf, 5.0 / blocks as f64);
    let mut obs = vec![0u64; class_prob.len()];
    let mut global = 0usize;
    let mut run = 0usize;
    for block in eps.chunks_exact(HEAD_RUN_BLOCK) {
        let mut best = 0usize;
        let mut r = 0usize;
        for &b in block {
            r = if b != 0 { r + 1 } else { 0 };
            best = best.max(r);
        }
        obs[class_of[best]] += 1;
    }
    for &b in eps {
        run = if b != 0 { run + 1 } else { 0 };
        global = global.max(run);
    }
    let c = class_prob.len();
    if c < 2 {
        return Stat::new(0.0, 1.0).with("longest_run", global as f64);
    }
    let x = chi2_counts(&obs, &class_prob, blocks as f64);
    Stat::new(x, chi2_sf(x, (c - 1) as f64))
        .with("longest_run", global as f64)
        .with("classes", c as f64)
}

/// Number of run-length classes `1, …, R−1, ≥R` for a string of `n` bits.
fn run_classes(n: usize) -> usize {
    let runs_per_symbol = n as f64 / 4.0;
    let r = (runs_per_symbol / 5.0).log2().floor() as i64 + 1;
    r.clamp(2, 20) as usize
}

/// Lengths of complete runs of zeros and of ones against Geometric(½),
/// combined χ² with `2(R − 1)` df.
pub fn run_lengths(eps: &[u8]) -> Stat {
    let r = run_classes(eps.len());
    let mut counts = [vec![0u64; r], vec![0u64; r]];
    let mut start = 0usize;
    for i in 1..eps.len() {
        if eps[i] != eps[i - 1] {
            let len = i - start;
            counts[eps[i - 1] as usize][len.min(r) - 1] += 1;
            start = i;
        }
    }
    let probs: Vec<f64> = (1..=r)
        .map(|k| if k < r { 0.5f64.powi(k as i32) } else { 0.5f64.powi(k as i32 - 1) })
        .collect();
    let mut x = 0.0;
    let mut used = 0usize;
    for c in &counts {
        let total: u64 = c.iter().sum();
        if total > 0 {
            x += chi2_counts(c, &probs, total as f64);
            used += 1;
        }
    }
    if used == 0 {
        return Stat::new(0.0, 0.0).with("classes", r as f64);
    }
    let df = (used * (r - 1)) as f64;
    Stat::new(x, chi2_sf(x, df)).with("classes", r as f64)
}
