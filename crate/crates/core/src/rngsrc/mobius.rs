use crate::bitcore::BitString;

/// `μ(n)` for `n = 0..=n_max` by a linear sieve; index 0 holds 0.
pub fn mobius_values(n_max: usize) -> Vec<i8> {
    let mut mu = vec![0i8; n_max + 1];
    if n_max == 0 {
        return mu;
    }
    mu[1] = 1;
    let mut composite = vec![false; n_max + 1];
    let mut primes: Vec<usize> = Vec::new();
    for i in 2..=n_max {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let m = i * p;
            if m > n_max {
                break;
            }
            composite[m] = true;
            if i % p == 0 {
                mu[m] = 0;
                break;
            }
            mu[m] = -mu[i];
        }
    }
    mu
}

/// Signs of `μ(1..=n_max)`: `+1 → 1`, `−1 → 0`, zeros dropped.
pub fn mobius_stream(n_max: usize) -> BitString {
    mobius_values(n_max)
        .into_iter()
        .skip(1)
        .filter(|&m| m != 0)
        .map(|m| m > 0)
        .collect()
}

/// The first `n` Möbius bits, sieving as far as needed.
pub fn mobius_bits(n: usize) -> BitString {
    // squarefree density is 6/π² ≈ 0.608
    let mut n_max = n + n * 7 / 10 + 64;
    loop {
        let bits = mobius_stream(n_max);
        if bits.len() >= n {
            return bits.slice(0, n);
        }
        n_max += n_max / 4;
    }
}
