//! Single-sequence NIST statistics. Inputs are slices of `0`/`1` bytes.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::{LN_2, SQRT_2};
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::special::{erfc, gamma_q, normal_cdf};

fn pm_sum(eps: &[u8]) -> i64 {
    eps.iter().map(|&b| if b != 0 { 1 } else { -1 }).sum()
}

/// Monobit frequency.
pub fn frequency(eps: &[u8]) -> f64 {
    let n = eps.len() as f64;
    erfc(pm_sum(eps).unsigned_abs() as f64 / (2.0 * n).sqrt())
}

/// Frequency within `n / m` non-overlapping blocks of `m` bits.
pub fn block_frequency(eps: &[u8], m: usize) -> f64 {
    assert!(m >= 1 && eps.len() >= m, "block frequency needs at least one block");
    let blocks = eps.len() / m;
    let chi2: f64 = eps
        .chunks_exact(m)
        .map(|b| {
            let pi = b.iter().filter(|&&x| x != 0).count() as f64 / m as f64;
            (pi - 0.5).powi(2)
        })
        .sum::<f64>()
        * 4.0
        * m as f64;
    gamma_q(blocks as f64 / 2.0, chi2 / 2.0)
}

fn cusum_p(n: i64, z: i64) -> f64 {
    let nf = n as f64;
    let sq = nf.sqrt();
    let zf = z as f64;
    let mut sum1 = 0.0;
    let mut k = (-n / z + 1) / 4;
    while k <= (n / z - 1) / 4 {
        let kf = k as f64;
        sum1 += normal_cdf((4.0 * kf + 1.0) * zf / sq) - normal_cdf((4.0 * kf - 1.0) * zf / sq);
        k += 1;
    }
    let mut sum2 = 0.0;
    let mut k = (-n / z - 3) / 4;
    while k <= (n / z - 1) / 4 {
        let kf = k as f64;
        sum2 += normal_cdf((4.0 * kf + 3.0) * zf / sq) - normal_cdf((4.0 * kf + 1.0) * zf / sq);
        k += 1;
    }
    (1.0 - sum1 + sum2).clamp(0.0, 1.0)
}

/// Cumulative sums, `[forward, backward]`.
pub fn cumulative_sums(eps: &[u8]) -> [f64; 2] {
    assert!(!eps.is_empty());
    let mut s = 0i64;
    let mut fwd = 0i64;
    for &b in eps {
        s += if b != 0 { 1 } else { -1 };
        fwd = fwd.max(s.abs());
    }
    // backward partial sums are s_total - s_k for k = n-1, …, 0
    let total = s;
    let mut bwd = total.abs();
    let mut prefix = 0i64;
    for &b in &eps[..eps.len() - 1] {
        prefix += if b != 0 { 1 } else { -1 };
        bwd = bwd.max((total - prefix).abs());
    }
    let n = eps.len() as i64;
    [cusum_p(n, fwd), cusum_p(n, bwd)]
}

/// Runs; 0 when the monobit prerequisite `|π − ½| < 2/√n` fails.
pub fn runs(eps: &[u8]) -> f64 {
    let n = eps.len() as f64;
    let pi = eps.iter().filter(|&&b| b != 0).count() as f64 / n;
    if (pi - 0.5).abs() >= 2.0 / n.sqrt() {
        return 0.0;
    }
    let v = 1 + eps.windows(2).filter(|w| w[0] != w[1]).count();
    let q = pi * (1.0 - pi);
    erfc((v as f64 - 2.0 * n * q).abs() / (2.0 * (2.0 * n).sqrt() * q))
}

struct LongestRunTable {
    m: usize,
    lowest: usize,
    pi: &'static [f64],
}

const LONGEST_RUN_TABLES: [LongestRunTable; 3] = [
    LongestRunTable {
        m: 8,
        lowest: 1,
        pi: &[0.21484375, 0.3671875, 0.23046875, 0.1875],
    },
    LongestRunTable {
        m: 128,
        lowest: 4,
        pi: &[0.1174035788, 0.242955959, 0.249363483, 0.17517706, 0.102701071, 0.112398847],
    },
    LongestRunTable {
        m: 10_000,
        lowest: 10,
        pi: &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727],
    },
];

/// Block sizes supported by [`longest_run`].
pub const LONGEST_RUN_BLOCKS: [usize; 3] = [8, 128, 10_000];

/// Longest run of ones in blocks of `m ∈ {8, 128, 10000}` bits.
pub fn longest_run(eps: &[u8], m: usize) -> f64 {
    let table = LONGEST_RUN_TABLES
        .iter()
        .find(|t| t.m == m)
        .unwrap_or_else(|| panic!("longest run: unsupported block size {m}"));
    let blocks = eps.len() / m;
    assert!(blocks >= 1, "longest run needs at least one block");
    let k = table.pi.len() - 1;
    let mut v = vec![0usize; k + 1];
    for block in eps.chunks_exact(m) {
        let mut run = 0usize;
        let mut best = 0usize;
        for &b in block {
            run = if b != 0 { run + 1 } else { 0 };
            best = best.max(run);
        }
        v[best.clamp(table.lowest, table.lowest + k) - table.lowest] += 1;
    }
    let nb = blocks as f64;
    let chi2: f64 = v
        .iter()
        .zip(table.pi)
        .map(|(&obs, &p)| (obs as f64 - nb * p).powi(2) / (nb * p))
        .sum();
    gamma_q(k as f64 / 2.0, chi2 / 2.0)
}

thread_local! {
    static FFT_PLANS: RefCell<HashMap<usize, Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn fft_plan(n: usize) -> Arc<dyn Fft<f64>> {
    FFT_PLANS.with(|plans| {
        plans
            .borrow_mut()
            .entry(n)
            .or_insert_with(|| FftPlanner::new().plan_fft_forward(n))
            .clone()
    })
}

/// Discrete Fourier transform (spectral) test with the 95% peak threshold.
pub fn dft(eps: &[u8]) -> f64 {
    let n = eps.len();
    assert!(n >= 2);
    let mut buf: Vec<Complex<f64>> = eps
        .iter()
        .map(|&b| Complex::new(if b != 0 { 1.0 } else { -1.0 }, 0.0))
        .collect();
    fft_plan(n).process(&mut buf);
    let nf = n as f64;
    let threshold = (20.0f64.ln() * nf).sqrt();
    let below = buf[..n / 2].iter().filter(|c| c.norm() < threshold).count() as f64;
    let n0 = 0.95 * nf / 2.0;
    let d = (below - n0) / (nf * 0.95 * 0.05 / 4.0).sqrt();
    erfc(d.abs() / SQRT_2)
}

/// Non-overlapping matches of `template` in each of `blocks` equal blocks.
pub fn non_overlapping_template(eps: &[u8], template: &[u8], blocks: usize) -> f64 {
    let m = template.len();
    let block_len = eps.len() / blocks;
    assert!(m >= 1 && block_len >= m, "template longer than a block");
    let counts: Vec<usize> = eps
        .chunks_exact(block_len)
        .take(blocks)
        .map(|block| {
            let mut w = 0;
            let mut i = 0;
            while i + m <= block_len {
                if &block[i..i + m] == template {
                    w += 1;
                    i += m;
                } else {
                    i += 1;
                }
            }
            w
        })
        .collect();
    template_p(&counts, block_len, m)
}

pub(crate) fn template_p(counts: &[usize], block_len: usize, m: usize) -> f64 {
    let two_m = (1u64 << m) as f64;
    let mu = (block_len - m + 1) as f64 / two_m;
    let var = block_len as f64 * (1.0 / two_m - (2 * m - 1) as f64 / (two_m * two_m));
    let chi2: f64 = counts.iter().map(|&w| (w as f64 - mu).powi(2) / var).sum();
    gamma_q(counts.len() as f64 / 2.0, chi2 / 2.0)
}

/// Counts of every cyclic overlapping `width`-bit pattern, indexed by value
/// with the first bit most significant.
pub(crate) fn cyclic_counts(eps: &[u8], width: usize) -> Vec<u32> {
    let mut counts = vec![0u32; 1 << width];
    if width == 0 {
        counts[0] = eps.len() as u32;
        return counts;
    }
    let n = eps.len();
    let mask = (1usize << width) - 1;
    let mut v = 0usize;
    for i in 0..width - 1 {
        v = (v << 1) | eps[i % n] as usize;
    }
    for i in 0..n {
        v = ((v << 1) | eps[(i + width - 1) % n] as usize) & mask;
        counts[v] += 1;
    }
    counts
}

fn phi(eps: &[u8], m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let n = eps.len() as f64;
    cyclic_counts(eps, m)
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let f = c as f64 / n;
            f * f.ln()
        })
        .sum()
}

/// Approximate entropy with block length `m`.
pub fn approximate_entropy(eps: &[u8], m: usize) -> f64 {
    assert!(m >= 1);
    let n = eps.len() as f64;
    let ap_en = phi(eps, m) - phi(eps, m + 1);
    let chi2 = 2.0 * n * (LN_2 - ap_en);
    gamma_q((1u64 << (m - 1)) as f64, chi2 / 2.0)
}

/// `n·ψ²_m = 2^m Σ c² − n²`, exact.
fn n_psi2(eps: &[u8], m: usize) -> i128 {
    if m == 0 {
        return 0;
    }
    let n = eps.len() as i128;
    let sum_sq: i128 = cyclic_counts(eps, m).into_iter().map(|c| (c as i128).pow(2)).sum();
    (sum_sq << m) - n * n
}

/// Serial test, `[p1, p2]` from the first and second differences of ψ².
///
/// The differences are formed on exact integers so that a zero difference
/// stays zero; with `m = 2` the second has half a degree of freedom and
/// rounding noise would otherwise show up in the p-value.
pub fn serial(eps: &[u8], m: usize) -> [f64; 2] {
    assert!(m >= 2);
    let n = eps.len() as f64;
    let (a, b, c) = (n_psi2(eps, m), n_psi2(eps, m - 1), n_psi2(eps, m - 2));
    let d1 = (a - b) as f64 / n;
    let d2 = (a - 2 * b + c) as f64 / n;
    [
        gamma_q((1u64 << (m - 2)) as f64, d1 / 2.0),
        gamma_q((1u64 << m) as f64 / 8.0, d2 / 2.0),
    ]
}
