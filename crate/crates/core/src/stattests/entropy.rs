//! Block-entropy and conditional-independence statistics, plus the
//! arithmetic-mean balance test.

use std::f64::consts::{LN_2, SQRT_2};

use crate::error::{Error, Result};
use crate::special::{chi2_sf, erfc};

/// `round(½·log₂ n)` with ties rounded up, at least 1.
pub fn block_length(n: usize) -> usize {
    assert!(n >= 1);
    let x = 0.5 * (n as f64).log2();
    ((x + 0.5).floor() as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: f64,
    pub p_value: f64,
}

impl ChiSquare {
    fn new(statistic: f64, df: f64) -> Self {
        let statistic = statistic.max(0.0);
        Self {
            statistic,
            df,
            p_value: chi2_sf(statistic, df),
        }
    }
}

fn block_counts(eps: &[u8], k: usize, step: usize, windows: usize) -> Vec<u64> {
    let mut counts = vec![0u64; 1 << k];
    for w in 0..windows {
        let v = eps[w * step..w * step + k].iter().fold(0usize, |v, &b| (v << 1) | b as usize);
        counts[v] += 1;
    }
    counts
}

/// `Y₁ = 2N_b(k ln 2 − Ĥ)` over `N_b = ⌊N/k⌋` disjoint `k`-blocks, χ² with `2^k − 1` df.
pub fn shannon_entropy(eps: &[u8], k: usize) -> Result<ChiSquare> {
    let n = eps.len();
    if k == 0 || k > 24 || n < 2 * k {
        return Err(Error::InsufficientLength {
            test: "ShannonEntropy".into(),
            needed: 2 * k.max(1),
            got: n,
        });
    }
    let nb = n / k;
    let nbf = nb as f64;
    let h: f64 = block_counts(eps, k, k, nb)
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let f = c as f64 / nbf;
            -f * f.ln()
        })
        .sum();
    let y1 = 2.0 * nbf * (k as f64 * LN_2 - h);
    Ok(ChiSquare::new(y1, ((1u64 << k) - 1) as f64))
}

/// `Y₂ = 2 Σ f_ij ln(N_o f_ij / (f_i· f_·j))` over `N_o = N − k + 1` overlapping
/// windows split into a `(k−1)`-bit prefix and the next bit; χ² with `2^{k−1} − 1` df.
pub fn kl_independence(eps: &[u8], k: usize) -> Result<ChiSquare> {
    let n = eps.len();
    if !(2..=24).contains(&k) || n < k + 1 {
        return Err(Error::InsufficientLength {
            test: "KL".into(),
            needed: k.max(2) + 1,
            got: n,
        });
    }
    let windows = n - k + 1;
    let joint = block_counts(eps, k, 1, windows);
    let prefixes = 1usize << (k - 1);
    let mut row = vec![0u64; prefixes];
    let mut col = [0u64; 2];
    for (v, &c) in joint.iter().enumerate() {
        row[v >> 1] += c;
        col[v & 1] += c;
    }
    let no = windows as f64;
    let y2: f64 = joint
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(v, &c)| {
            let f = c as f64;
            f * (no * f / (row[v >> 1] as f64 * col[v & 1] as f64)).ln()
        })
        .sum::<f64>()
        * 2.0;
    Ok(ChiSquare::new(y2, (prefixes - 1) as f64))
}

/// `Z = (2/√N)|c − N/2|` with `c` the number of zeros; `p = erfc(Z/√2)`.
pub fn arithmetic_mean(eps: &[u8]) -> (f64, f64) {
    let n = eps.len() as f64;
    let zeros = eps.iter().filter(|&&b| b == 0).count() as f64;
    let z = 2.0 / n.sqrt() * (zeros - n / 2.0).abs();
    (z, erfc(z / SQRT_2))
}
