//! Sparse coefficient arithmetic on a `p_n`-smooth index set.
//!
//! The set `{j <= L : gpf(j) <= p_n}` is closed under taking divisors, so a
//! Dirichlet convolution or reciprocal restricted to it only ever reads indices
//! inside it. That lets smooth subseries be built for `L` far beyond anything
//! a dense buffer could hold.

use std::collections::HashMap;

use crate::error::Result;
use crate::primes::{smooth_numbers, SmoothBound};
use crate::series::Coef;

#[derive(Debug, Clone)]
pub struct SmoothSupport {
    bound: SmoothBound,
    limit: u64,
    primes: Vec<u64>,
    elements: Vec<u64>,
    /// exponent vectors, `primes.len()` entries per element
    exponents: Vec<u8>,
    index: HashMap<u64, u32>,
}

impl SmoothSupport {
    pub fn new(bound: SmoothBound, limit: u64) -> Result<Self> {
        let primes = bound.primes();
        let elements = smooth_numbers(bound, limit)?;
        let k = primes.len();
        let mut exponents = vec![0u8; elements.len() * k];
        for (i, &j) in elements.iter().enumerate() {
            let mut m = j;
            for (slot, &p) in exponents[i * k..(i + 1) * k].iter_mut().zip(&primes) {
                while m % p == 0 {
                    m /= p;
                    *slot += 1;
                }
            }
        }
        let index = elements.iter().enumerate().map(|(i, &j)| (j, i as u32)).collect();
        Ok(SmoothSupport { bound, limit, primes, elements, exponents, index })
    }

    pub fn bound(&self) -> SmoothBound {
        self.bound
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn exponents(&self, i: usize) -> &[u8] {
        let k = self.primes.len();
        &self.exponents[i * k..(i + 1) * k]
    }

    pub fn position(&self, j: u64) -> Option<usize> {
        self.index.get(&j).map(|&i| i as usize)
    }

    /// Calls `f(d_index, q_index)` for every factorization `elements[i] = d * q`.
    pub fn for_each_divisor(&self, i: usize, mut f: impl FnMut(usize, usize)) {
        let n = self.elements[i];
        let exps = self.exponents(i);
        let mut digits = vec![0u8; exps.len()];
        let mut d = 1u64;
        loop {
            let di = self.index[&d] as usize;
            let qi = self.index[&(n / d)] as usize;
            f(di, qi);
            // mixed-radix increment over the exponent vector
            let mut slot = 0;
            loop {
                if slot == exps.len() {
                    return;
                }
                if digits[slot] < exps[slot] {
                    digits[slot] += 1;
                    d *= self.primes[slot];
                    break;
                }
                d /= self.primes[slot].pow(u32::from(digits[slot]));
                digits[slot] = 0;
                slot += 1;
            }
        }
    }

    pub(crate) fn convolve<T: Coef>(&self, a: &[T], b: &[T]) -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let mut acc = T::ZERO;
            let mut err = None;
            self.for_each_divisor(i, |di, qi| {
                if err.is_some() || a[di].is_zero() || b[qi].is_zero() {
                    return;
                }
                match a[di].mul(b[qi]).and_then(|t| acc.add(t)) {
                    Ok(v) => acc = v,
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// `c_1 = finish(0, true)`, `c_n = finish(sum_{d | n, d >= 2} b_d c_{n/d}, false)`.
    pub(crate) fn reciprocal<T: Coef>(&self, b: &[T], finish: impl Fn(T, bool) -> T) -> Result<Vec<T>> {
        let mut c: Vec<T> = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            if i == 0 {
                c.push(finish(T::ZERO, true));
                continue;
            }
            let mut acc = T::ZERO;
            let mut err = None;
            self.for_each_divisor(i, |di, qi| {
                // d = 1 pairs with q = n, which is not yet known and has b_1 = 0
                if err.is_some() || di == 0 || b[di].is_zero() || c[qi].is_zero() {
                    return;
                }
                match b[di].mul(c[qi]).and_then(|t| acc.add(t)) {
                    Ok(v) => acc = v,
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            c.push(finish(acc, false));
        }
        Ok(c)
    }
}
