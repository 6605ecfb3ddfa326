//! Integer substrate: prime sieving, factorization, greatest prime factors,
//! smooth-number enumeration and radicals.
//!
//! All arithmetic is on `u64` with checked multiplication; anything that would
//! wrap is reported as [`DsError::Range`].

use serde::{Deserialize, Serialize};

use crate::error::{DsError, Result};

/// Ascending list of all primes up to `limit`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeTable {
    primes: Vec<u64>,
    limit: u64,
}

impl PrimeTable {
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// `p_n` with 1-based `n`, if the table reaches it.
    pub fn nth(&self, n: usize) -> Option<u64> {
        n.checked_sub(1).and_then(|i| self.primes.get(i).copied())
    }
}

/// Bit-packed sieve of Eratosthenes over odd numbers.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(DsError::invalid(format!("sieve limit must be >= 2, got {limit}")));
    }
    if limit > 1 << 40 {
        return Err(DsError::range(format!("sieve limit {limit} exceeds desk scale")));
    }
    // bit i stands for the odd number 2i + 1
    let odd_count = ((limit - 1) / 2 + 1) as usize;
    let mut composite = vec![0u64; odd_count.div_ceil(64)];
    let mut i = 1usize;
    loop {
        let p = 2 * i as u64 + 1;
        if p * p > limit {
            break;
        }
        if composite[i / 64] >> (i % 64) & 1 == 0 {
            let mut j = (p * p / 2) as usize;
            while j < odd_count {
                composite[j / 64] |= 1 << (j % 64);
                j += p as usize;
            }
        }
        i += 1;
    }
    let mut primes = vec![2];
    for i in 1..odd_count {
        if composite[i / 64] >> (i % 64) & 1 == 0 {
            primes.push(2 * i as u64 + 1);
        }
    }
    Ok(PrimeTable { primes, limit })
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Result<Vec<u64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    // Rosser's bound p_n < n (ln n + ln ln n) for n >= 6
    let n = count as f64;
    let mut limit = if count < 6 {
        15
    } else {
        (n * (n.ln() + n.ln().ln())).ceil() as u64 + 1
    };
    loop {
        let table = sieve_primes(limit)?;
        if table.len() >= count {
            return Ok(table.primes[..count].to_vec());
        }
        limit *= 2;
    }
}

/// Index `n >= 1` selecting the prime cutoff `p_n` of a smooth subseries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SmoothBound(usize);

impl SmoothBound {
    pub fn new(index: usize) -> Result<Self> {
        if index == 0 {
            return Err(DsError::invalid("smooth bound index must be >= 1"));
        }
        Ok(SmoothBound(index))
    }

    pub fn index(self) -> usize {
        self.0
    }

    /// `p_1, ..., p_n`.
    pub fn primes(self) -> Vec<u64> {
        first_primes(self.0).expect("prime count within desk scale")
    }

    pub fn cutoff(self) -> u64 {
        *self.primes().last().expect("index >= 1")
    }
}

/// Prime factorization as ascending `(prime, exponent)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Factorization(Vec<(u64, u32)>);

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn largest_prime(&self) -> Option<u64> {
        self.0.last().map(|&(p, _)| p)
    }

    /// Multiplies the factorization back out.
    pub fn value(&self) -> Result<u64> {
        let mut acc: u64 = 1;
        for &(p, e) in &self.0 {
            let pe = p
                .checked_pow(e)
                .ok_or_else(|| DsError::range(format!("{p}^{e} overflows u64")))?;
            acc = acc
                .checked_mul(pe)
                .ok_or_else(|| DsError::range("factorization value overflows u64"))?;
        }
        Ok(acc)
    }

    pub fn radical(&self) -> u64 {
        self.0.iter().map(|&(p, _)| p).product()
    }
}

/// Trial-division factorization.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(DsError::invalid("cannot factorize 0"));
    }
    let mut pairs = Vec::new();
    let mut m = n;
    let mut push = |m: &mut u64, p: u64| {
        let mut e = 0;
        while (*m).is_multiple_of(p) {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            pairs.push((p, e));
        }
    };
    push(&mut m, 2);
    let mut p = 3u64;
    while p <= m / p {
        push(&mut m, p);
        p += 2;
    }
    if m > 1 {
        pairs.push((m, 1));
    }
    Ok(Factorization(pairs))
}

/// Greatest prime factor, with `gpf(1) = 1`.
pub fn gpf(n: u64) -> Result<u64> {
    Ok(factorize(n)?.largest_prime().unwrap_or(1))
}

/// Product of the distinct primes dividing `n`; `radical(1) = 1`.
pub fn radical(n: u64) -> Result<u64> {
    Ok(factorize(n)?.radical())
}

/// All `j <= limit` with `gpf(j) <= p_n`, ascending.
///
/// Built by recursing over the exponent of each allowed prime and pruning as
/// soon as the running product passes `limit`.
pub fn smooth_numbers(bound: SmoothBound, limit: u64) -> Result<Vec<u64>> {
    if limit == 0 {
        return Err(DsError::invalid("smooth limit must be >= 1"));
    }
    let primes = bound.primes();
    let mut out = Vec::new();
    extend_smooth(&primes, 1, limit, &mut out);
    out.sort_unstable();
    Ok(out)
}

fn extend_smooth(primes: &[u64], current: u64, limit: u64, out: &mut Vec<u64>) {
    match primes.split_first() {
        None => out.push(current),
        Some((&p, rest)) => {
            let mut value = current;
            loop {
                extend_smooth(rest, value, limit, out);
                // overflow means the product already passed any u64 limit
                match value.checked_mul(p) {
                    Some(v) if v <= limit => value = v,
                    _ => break,
                }
            }
        }
    }
}

/// Smallest-prime-factor table for bulk factorization of `1..=limit`.
#[derive(Debug, Clone)]
pub struct SpfTable {
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn new(limit: usize) -> Result<Self> {
        if limit > u32::MAX as usize {
            return Err(DsError::range("spf table limit exceeds u32"));
        }
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Ok(SpfTable { spf })
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    /// Factorizes `n` in `1..=limit`.
    pub fn factorize(&self, n: usize) -> Factorization {
        assert!(n >= 1 && n <= self.limit(), "{n} outside spf table");
        let mut pairs: Vec<(u64, u32)> = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            pairs.push((p as u64, e));
        }
        Factorization(pairs)
    }
}
