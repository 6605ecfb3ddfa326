//! Coefficient-sequence algebra and partial-sum evaluation of Dirichlet series.
//!
//! A [`CoefficientSequence`] holds `a_1..a_N` either as exact integers (`i128`,
//! checked) or as `f64`. Operations stay exact while every input is exact and
//! promote to `f64` otherwise. Index `n` lives at slot `n - 1`.
//!
//! Truncation is harmless: every operation here determines the first `N`
//! coefficients of the infinite series from the first `N` coefficients of its
//! inputs, because divisors of `n` never exceed `n`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DsError, Result};
use crate::primes::{smooth_numbers, SmoothBound, SpfTable};
use crate::sum::{pow_neg, ComplexKahanSum};

/// Scalar arithmetic shared by the exact and real payloads.
pub(crate) trait Coef: Copy + PartialEq + fmt::Debug + Send + Sync {
    const ZERO: Self;
    fn add(self, other: Self) -> Result<Self>;
    fn mul(self, other: Self) -> Result<Self>;
    fn is_zero(self) -> bool {
        self == Self::ZERO
    }
}

impl Coef for i128 {
    const ZERO: Self = 0;

    fn add(self, other: Self) -> Result<Self> {
        self.checked_add(other)
            .ok_or_else(|| DsError::range("exact coefficient addition overflows i128"))
    }

    fn mul(self, other: Self) -> Result<Self> {
        self.checked_mul(other)
            .ok_or_else(|| DsError::range("exact coefficient product overflows i128"))
    }
}

impl Coef for f64 {
    const ZERO: Self = 0.0;

    fn add(self, other: Self) -> Result<Self> {
        Ok(self + other)
    }

    fn mul(self, other: Self) -> Result<Self> {
        Ok(self * other)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PayloadKind {
    ExactInteger,
    Real,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Exact(Vec<i128>),
    Real(Vec<f64>),
}

impl Payload {
    pub fn len(&self) -> usize {
        match self {
            Payload::Exact(v) => v.len(),
            Payload::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> PayloadKind {
        match self {
            Payload::Exact(_) => PayloadKind::ExactInteger,
            Payload::Real(_) => PayloadKind::Real,
        }
    }

    /// Value at slot `i` (0-based) as `f64`.
    pub fn get_f64(&self, i: usize) -> f64 {
        match self {
            Payload::Exact(v) => v[i] as f64,
            Payload::Real(v) => v[i],
        }
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        match self {
            Payload::Exact(v) => v.iter().map(|&x| x as f64).collect(),
            Payload::Real(v) => v.clone(),
        }
    }

    fn truncated(&self, n: usize) -> Payload {
        match self {
            Payload::Exact(v) => Payload::Exact(v[..n].to_vec()),
            Payload::Real(v) => Payload::Real(v[..n].to_vec()),
        }
    }
}

/// `|a_n| <= scale * n^exponent` for every `n >= 1` of the infinite series.
///
/// Only constructions whose growth is known in closed form carry one; it is
/// what makes integral-comparison tail bounds available.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub scale: f64,
    pub exponent: f64,
}

impl Envelope {
    pub const UNIT: Envelope = Envelope { scale: 1.0, exponent: 0.0 };

    /// Bound on `sum_{n > terms} |a_n| n^{-sigma}`; `None` when divergent.
    pub fn tail_bound(&self, sigma: f64, terms: u64) -> Option<f64> {
        let gap = sigma - self.exponent - 1.0;
        if gap <= 0.0 || terms == 0 {
            return None;
        }
        // x^{exponent - sigma} is decreasing, so the tail sits under the integral from N
        Some(self.scale * (terms as f64).powf(-gap) / gap)
    }

    /// Bound on the part of a `p_n`-smooth sum beyond `limit`.
    ///
    /// Rankin's trick: for `0 < theta < sigma - exponent`,
    /// `sum_{j > L smooth} j^{exponent - sigma} <= L^{-theta} zeta_n(sigma - exponent - theta)`;
    /// the best `theta` on a 64-point grid is taken.
    pub fn smooth_tail_bound(&self, primes: &[u64], sigma: f64, limit: u64) -> Option<f64> {
        let room = sigma - self.exponent;
        if room <= 0.0 {
            return None;
        }
        let ln_l = (limit as f64).ln();
        (1..64)
            .map(|k| {
                let theta = room * k as f64 / 64.0;
                let rest = room - theta;
                let product: f64 = primes.iter().map(|&p| 1.0 / (1.0 - (p as f64).powf(-rest))).product();
                self.scale * (-theta * ln_l).exp() * product
            })
            .filter(|b| b.is_finite())
            .reduce(f64::min)
    }
}

/// Coefficients `a_1..a_N` of a Dirichlet series.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    payload: Payload,
    provenance: String,
    envelope: Option<Envelope>,
}

impl CoefficientSequence {
    pub fn from_exact(values: Vec<i128>, provenance: impl Into<String>) -> Self {
        Self { payload: Payload::Exact(values), provenance: provenance.into(), envelope: None }
    }

    pub fn from_real(values: Vec<f64>, provenance: impl Into<String>) -> Self {
        Self { payload: Payload::Real(values), provenance: provenance.into(), envelope: None }
    }

    pub fn with_envelope(mut self, envelope: Envelope) -> Self {
        self.envelope = Some(envelope);
        self
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn envelope(&self) -> Option<Envelope> {
        self.envelope
    }

    pub fn kind(&self) -> PayloadKind {
        self.payload.kind()
    }

    pub fn len(&self) -> usize {
        self.payload.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payload.is_empty()
    }

    /// `a_n` as `f64`, 1-based.
    pub fn get(&self, n: usize) -> f64 {
        self.payload.get_f64(n - 1)
    }

    /// `a_n` when the payload is exact.
    pub fn exact(&self, n: usize) -> Option<i128> {
        match &self.payload {
            Payload::Exact(v) => Some(v[n - 1]),
            Payload::Real(_) => None,
        }
    }

    pub fn as_exact(&self) -> Option<&[i128]> {
        match &self.payload {
            Payload::Exact(v) => Some(v),
            Payload::Real(_) => None,
        }
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.payload.to_f64_vec()
    }

    /// `a_1..a_n` with the same provenance and envelope.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        self.require_len(n)?;
        Ok(Self { payload: self.payload.truncated(n), ..self.clone() })
    }

    pub fn is_positive(&self) -> bool {
        (1..=self.len()).all(|n| self.get(n) > 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        (1..=self.len()).all(|n| self.get(n) >= 0.0)
    }

    pub(crate) fn require_len(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(DsError::invalid("sequence length must be >= 1"));
        }
        if n > self.len() {
            return Err(DsError::invalid(format!(
                "sequence '{}' materialized to {} terms, {} requested",
                self.provenance,
                self.len(),
                n
            )));
        }
        Ok(())
    }

    fn real_values(&self, n: usize) -> Vec<f64> {
        match &self.payload {
            Payload::Exact(v) => {
                log::debug!("promoting exact sequence '{}' to real", self.provenance);
                v[..n].iter().map(|&x| x as f64).collect()
            }
            Payload::Real(v) => v[..n].to_vec(),
        }
    }

    /// Same coefficients with `a_1` replaced by zero.
    pub fn without_unit(&self) -> Self {
        let mut out = self.clone();
        match &mut out.payload {
            Payload::Exact(v) => v[0] = 0,
            Payload::Real(v) => v[0] = 0.0,
        }
        out.provenance = format!("{} - 1", self.provenance);
        out
    }
}

fn require_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(DsError::invalid("N must be >= 1"))
    } else {
        Ok(())
    }
}

/// `a_n = 1`: the Riemann zeta function.
pub fn ones(n: usize) -> Result<CoefficientSequence> {
    require_n(n)?;
    Ok(CoefficientSequence::from_exact(vec![1; n], "zeta").with_envelope(Envelope::UNIT))
}

/// Unit sequence `e = (1, 0, 0, ...)`, the convolution identity.
pub fn unit(n: usize) -> Result<CoefficientSequence> {
    require_n(n)?;
    let mut v = vec![0; n];
    v[0] = 1;
    Ok(CoefficientSequence::from_exact(v, "unit").with_envelope(Envelope::UNIT))
}

/// `a_m = m^t`, evaluated as `exp(t ln m)`.
pub fn power_shift(t: f64, n: usize) -> Result<CoefficientSequence> {
    require_n(n)?;
    if !t.is_finite() {
        return Err(DsError::invalid("power exponent must be finite"));
    }
    let values = (1..=n).map(|m| (t * (m as f64).ln()).exp()).collect();
    Ok(CoefficientSequence::from_real(values, format!("power:t={t}"))
        .with_envelope(Envelope { scale: 1.0, exponent: t }))
}

pub(crate) fn convolve_dense<T: Coef>(a: &[T], b: &[T]) -> Result<Vec<T>> {
    let n = a.len().min(b.len());
    let mut c = vec![T::ZERO; n];
    for d in 1..=n {
        let ad = a[d - 1];
        if ad.is_zero() {
            continue;
        }
        for (k, m) in (d..=n).step_by(d).enumerate() {
            let bk = b[k];
            if !bk.is_zero() {
                c[m - 1] = c[m - 1].add(ad.mul(bk)?)?;
            }
        }
    }
    Ok(c)
}

/// Dirichlet convolution `c_n = sum_{d | n} a_d b_{n/d}` for `n <= N`.
///
/// Exact when both inputs are exact; overflow is a range error.
pub fn dirichlet_convolve(
    a: &CoefficientSequence,
    b: &CoefficientSequence,
    n: usize,
) -> Result<CoefficientSequence> {
    a.require_len(n)?;
    b.require_len(n)?;
    let provenance = format!("conv({},{})", a.provenance, b.provenance);
    match (&a.payload, &b.payload) {
        (Payload::Exact(x), Payload::Exact(y)) => {
            Ok(CoefficientSequence::from_exact(convolve_dense(&x[..n], &y[..n])?, provenance))
        }
        _ => {
            let c = convolve_dense(&a.real_values(n), &b.real_values(n))?;
            Ok(CoefficientSequence::from_real(c, provenance))
        }
    }
}

/// `c_1 = 1`, `c_n = prod h(p, e)` over the factorization of `n`.
pub fn multiplicative_extend(
    h: impl Fn(u64, u32) -> f64,
    n: usize,
    provenance: impl Into<String>,
) -> Result<CoefficientSequence> {
    require_n(n)?;
    let spf = SpfTable::new(n)?;
    let values = (1..=n)
        .map(|m| spf.factorize(m).pairs().iter().map(|&(p, e)| h(p, e)).product())
        .collect();
    Ok(CoefficientSequence::from_real(values, provenance))
}

/// Exact-integer variant of [`multiplicative_extend`].
pub fn multiplicative_extend_exact(
    h: impl Fn(u64, u32) -> Result<i128>,
    n: usize,
    provenance: impl Into<String>,
) -> Result<CoefficientSequence> {
    require_n(n)?;
    let spf = SpfTable::new(n)?;
    let mut values = Vec::with_capacity(n);
    for m in 1..=n {
        let mut acc: i128 = 1;
        for &(p, e) in spf.factorize(m).pairs() {
            acc = acc.mul(h(p, e)?)?;
        }
        values.push(acc);
    }
    Ok(CoefficientSequence::from_exact(values, provenance))
}

/// Pushes `b_d c_n` into `acc[n d]` as soon as `c_n` is final, so every
/// `c_n` sees its contributions in ascending order of `n / d`.
pub(crate) fn reciprocal_dense<T: Coef>(b: &[T], finish: impl Fn(T, bool) -> T) -> Result<Vec<T>> {
    let n = b.len();
    let support: Vec<(usize, T)> =
        (2..=n).filter(|&d| !b[d - 1].is_zero()).map(|d| (d, b[d - 1])).collect();
    let mut acc = vec![T::ZERO; n];
    let mut c = vec![T::ZERO; n];
    for m in 1..=n {
        let cm = finish(acc[m - 1], m == 1);
        c[m - 1] = cm;
        if cm.is_zero() {
            continue;
        }
        for &(d, bd) in &support {
            let Some(target) = m.checked_mul(d).filter(|&t| t <= n) else { break };
            acc[target - 1] = acc[target - 1].add(bd.mul(cm)?)?;
        }
    }
    Ok(c)
}

/// Coefficients of `1 / (alpha - g)` where `g` has coefficients `b` with `b_1 = 0`:
/// `c_1 = 1/alpha`, `c_n = (1/alpha) sum_{d | n, d >= 2} b_d c_{n/d}`.
///
/// Exact when `b` is exact and `alpha = 1`.
pub fn reciprocal_coeffs(alpha: f64, b: &CoefficientSequence, n: usize) -> Result<CoefficientSequence> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(DsError::invalid(format!("alpha must be a positive real, got {alpha}")));
    }
    b.require_len(n)?;
    if b.get(1) != 0.0 {
        return Err(DsError::invalid("reciprocal base must have zero first coefficient"));
    }
    let provenance = format!("recip:alpha={alpha},base={}", b.provenance);
    match (&b.payload, alpha == 1.0) {
        (Payload::Exact(v), true) => {
            let c = reciprocal_dense(&v[..n], |acc, first| if first { 1 } else { acc })?;
            Ok(CoefficientSequence::from_exact(c, provenance))
        }
        _ => {
            let c = reciprocal_dense(&b.real_values(n), |acc, first| {
                if first { 1.0 / alpha } else { acc / alpha }
            })?;
            Ok(CoefficientSequence::from_real(c, provenance))
        }
    }
}

/// `alpha e - b`; exact when `b` is exact and `alpha` is an integer.
pub fn unit_minus(alpha: f64, b: &CoefficientSequence) -> CoefficientSequence {
    let provenance = format!("{alpha}e - {}", b.provenance);
    match &b.payload {
        Payload::Exact(v) if alpha.fract() == 0.0 && alpha.abs() < 1e18 => {
            let mut out: Vec<i128> = v.iter().map(|&x| -x).collect();
            out[0] += alpha as i128;
            CoefficientSequence::from_exact(out, provenance)
        }
        _ => {
            let mut out: Vec<f64> = b.to_f64_vec().iter().map(|&x| -x).collect();
            out[0] += alpha;
            CoefficientSequence::from_real(out, provenance)
        }
    }
}

/// Partial sum with optional tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    #[serde(with = "crate::complex_json")]
    pub value: Complex64,
    pub terms_used: u64,
    /// `None` means "unavailable".
    pub tail_bound: Option<f64>,
}

/// `sum_{n <= N} a_n n^{-s}` in ascending `n` with compensated accumulation.
///
/// With `tail` set, a bound on the omitted terms is attached when the sequence
/// carries a growth envelope and the envelope series converges at `Re(s)`.
pub fn evaluate(a: &CoefficientSequence, s: Complex64, n: usize, tail: bool) -> Result<EvalResult> {
    a.require_len(n)?;
    let mut acc = ComplexKahanSum::new();
    for m in 1..=n {
        let am = a.get(m);
        if am != 0.0 {
            acc.add(pow_neg((m as f64).ln(), s) * am);
        }
    }
    let tail_bound = if tail { a.envelope.and_then(|e| e.tail_bound(s.re, n as u64)) } else { None };
    Ok(EvalResult { value: acc.value(), terms_used: n as u64, tail_bound })
}

/// Partial sum over the `p_n`-smooth indices `j <= limit`.
///
/// The tail bound comes from [`Envelope::smooth_tail_bound`] when an envelope
/// is present.
pub fn evaluate_smooth(
    a: &CoefficientSequence,
    s: Complex64,
    bound: SmoothBound,
    limit: usize,
) -> Result<EvalResult> {
    a.require_len(limit)?;
    let support = smooth_numbers(bound, limit as u64)?;
    let mut acc = ComplexKahanSum::new();
    for &j in &support {
        let aj = a.get(j as usize);
        if aj != 0.0 {
            acc.add(pow_neg((j as f64).ln(), s) * aj);
        }
    }
    let tail_bound =
        a.envelope.and_then(|e| e.smooth_tail_bound(&bound.primes(), s.re, limit as u64));
    Ok(EvalResult { value: acc.value(), terms_used: support.len() as u64, tail_bound })
}

/// `zeta_n(s) = prod_{j <= n} 1 / (1 - p_j^{-s})`.
pub fn euler_product_zeta_n(bound: SmoothBound, s: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for p in bound.primes() {
        let denom = Complex64::new(1.0, 0.0) - pow_neg((p as f64).ln(), s);
        if denom.norm() == 0.0 {
            return Err(DsError::Singular(format!("p^s = 1 at p = {p}, s = {s}")));
        }
        acc /= denom;
    }
    Ok(acc)
}

/// `prod_{j <= n} (1 + p_j^{r-1-s} / (1 - p_j^{-s}))`, for `Re(s) > 0`.
pub fn euler_product_construction_ii(bound: SmoothBound, r: f64, s: Complex64) -> Result<Complex64> {
    if !(s.re > 0.0) {
        return Err(DsError::invalid(format!("Re(s) must be > 0, got {}", s.re)));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut acc = one;
    for p in bound.primes() {
        let ln_p = (p as f64).ln();
        let numer = pow_neg(ln_p, s - (r - 1.0));
        acc *= one + numer / (one - pow_neg(ln_p, s));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bound(n: usize) -> SmoothBound {
        SmoothBound::new(n).unwrap()
    }

    #[test]
    fn ones_and_unit() {
        assert_eq!(ones(5).unwrap().as_exact().unwrap(), &[1, 1, 1, 1, 1]);
        assert_eq!(unit(3).unwrap().as_exact().unwrap(), &[1, 0, 0]);
        assert!(ones(0).is_err());
    }

    #[test]
    fn ones_at_two_within_tail_bound() {
        let n = 1_000_000;
        let r = evaluate(&ones(n).unwrap(), c(2.0), n, true).unwrap();
        let tail = r.tail_bound.unwrap();
        assert!(tail <= 1.0 / n as f64 + 1e-18);
        let err = PI * PI / 6.0 - r.value.re;
        assert!(err > 0.0 && err <= tail, "err {err} tail {tail}");
    }

    #[test]
    fn power_shift_examples() {
        let p0 = power_shift(0.0, 6).unwrap();
        assert!(p0.to_f64_vec().iter().all(|&x| x == 1.0));
        let p1 = power_shift(1.0, 4).unwrap().to_f64_vec();
        for (got, want) in p1.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        // 8^1.5 two ways: exp-log and sqrt(8)^3
        let a8 = power_shift(1.5, 8).unwrap().get(8);
        let via_sqrt = 8f64.sqrt().powi(3);
        assert!((a8 - via_sqrt).abs() < 4.0 * f64::EPSILON * a8);
        assert!((a8 - 22.627_416_997_969_52).abs() < 1e-12);
    }

    #[test]
    fn divisor_counts() {
        let one = ones(12).unwrap();
        let d = dirichlet_convolve(&one, &one, 12).unwrap();
        assert_eq!(d.exact(6), Some(4));
        assert_eq!(d.exact(12), Some(6));
        let d3 = dirichlet_convolve(&d, &one, 12).unwrap();
        // ordered triples with product 4: (4,1,1)x3, (2,2,1)x3
        assert_eq!(d3.exact(4), Some(6));
        let brute = (1..=4).flat_map(|x| (1..=4).map(move |y| (x, y))).filter(|&(x, y)| 4 % (x * y) == 0).count();
        assert_eq!(brute, 6);
    }

    #[test]
    fn unit_is_identity() {
        let a = power_shift(0.3, 50).unwrap();
        let e = unit(50).unwrap();
        assert_eq!(dirichlet_convolve(&a, &e, 50).unwrap().to_f64_vec(), a.to_f64_vec());
        assert_eq!(dirichlet_convolve(&e, &a, 50).unwrap().to_f64_vec(), a.to_f64_vec());
    }

    #[test]
    fn exact_overflow_is_range_error() {
        let big = CoefficientSequence::from_exact(vec![i128::MAX / 2; 4], "big");
        assert!(matches!(dirichlet_convolve(&big, &big, 4), Err(DsError::Range(_))));
    }

    #[test]
    fn convolve_requires_materialized_length() {
        let a = ones(4).unwrap();
        assert!(dirichlet_convolve(&a, &a, 5).is_err());
    }

    #[test]
    fn multiplicative_extend_examples() {
        let one = multiplicative_extend(|_, _| 1.0, 100, "one").unwrap();
        assert!(one.to_f64_vec().iter().all(|&x| x == 1.0));
        let rad = multiplicative_extend_exact(|p, _| Ok(p as i128), 10_000, "rad").unwrap();
        assert_eq!(rad.exact(12), Some(6));
        for n in 1..=10_000u64 {
            assert_eq!(rad.exact(n as usize), Some(crate::primes::radical(n).unwrap() as i128));
        }
    }

    #[test]
    fn reciprocal_examples() {
        let zm1 = ones(8).unwrap().without_unit();
        let c = reciprocal_coeffs(1.0, &zm1, 8).unwrap();
        assert_eq!(c.as_exact().unwrap(), &[1, 1, 1, 2, 1, 3, 1, 4]);

        let zero = CoefficientSequence::from_real(vec![0.0; 6], "zero");
        let c = reciprocal_coeffs(2.0, &zero, 6).unwrap();
        assert_eq!(c.to_f64_vec(), vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.0]);

        let mut b = vec![0i128; 64];
        b[1] = 1;
        let c = reciprocal_coeffs(1.0, &CoefficientSequence::from_exact(b, "2^-s"), 64).unwrap();
        for n in 1..=64usize {
            let want = i128::from(n.is_power_of_two());
            assert_eq!(c.exact(n), Some(want), "n = {n}");
        }
    }

    #[test]
    fn reciprocal_rejects_bad_input() {
        let zm1 = ones(8).unwrap().without_unit();
        assert!(matches!(reciprocal_coeffs(0.0, &zm1, 8), Err(DsError::InvalidArgument(_))));
        assert!(matches!(reciprocal_coeffs(-1.0, &zm1, 8), Err(DsError::InvalidArgument(_))));
        assert!(reciprocal_coeffs(1.0, &ones(8).unwrap(), 8).is_err());
    }

    #[test]
    fn reciprocal_inverts_exactly_in_integer_mode() {
        let n = 2048;
        let zm1 = ones(n).unwrap().without_unit();
        let c = reciprocal_coeffs(1.0, &zm1, n).unwrap();
        let check = dirichlet_convolve(&c, &unit_minus(1.0, &zm1), n).unwrap();
        assert_eq!(check, CoefficientSequence::from_exact(unit(n).unwrap().as_exact().unwrap().to_vec(), check.provenance()));
    }

    #[test]
    fn reciprocal_inverts_in_real_mode() {
        let n = 2048;
        let b = power_shift(-1.5, n).unwrap().without_unit();
        let alpha = 0.7;
        let c = reciprocal_coeffs(alpha, &b, n).unwrap();
        let check = dirichlet_convolve(&c, &unit_minus(alpha, &b), n).unwrap();
        let e = unit(n).unwrap();
        for m in 1..=n {
            assert!((check.get(m) - e.get(m)).abs() <= 1e-10, "m = {m}");
        }
    }

    #[test]
    fn evaluate_examples() {
        let r = evaluate(&ones(1000).unwrap(), c(2.0), 1000, true).unwrap();
        assert!((r.value.re - 1.643_934_566_681_559_8).abs() < 1e-12);
        assert!(r.tail_bound.unwrap() <= 0.001);
        let a = power_shift(0.7, 5).unwrap();
        let r = evaluate(&a, c(0.0), 5, false).unwrap();
        let direct: f64 = a.to_f64_vec().iter().sum();
        assert!((r.value.re - direct).abs() < 1e-12);
        assert_eq!(r.tail_bound, None);
        let n = 1_000_000;
        let h = evaluate(&ones(n).unwrap(), c(1.0), n, true).unwrap();
        assert!((h.value.re - 14.392_726_722_865_724).abs() < 1e-9);
        // divergent at sigma = 1
        assert_eq!(h.tail_bound, None);
    }

    #[test]
    fn evaluate_smooth_examples() {
        let a = ones(1 << 20).unwrap();
        let r = evaluate_smooth(&a, c(1.0), bound(1), 1 << 20).unwrap();
        assert_eq!(r.value.re, 2.0 - 2f64.powi(-20));

        let a = ones(1_000_000).unwrap();
        let r = evaluate_smooth(&a, c(2.0), bound(2), 1_000_000).unwrap();
        assert!((r.value.re - 1.5).abs() < 1e-5);
        assert!(1.5 - r.value.re <= r.tail_bound.unwrap());

        // sequence supported on smooth numbers only: smooth sum = full sum
        let mut v = vec![0.0; 5000];
        for j in smooth_numbers(bound(2), 5000).unwrap() {
            v[j as usize - 1] = 1.0 / j as f64;
        }
        let a = CoefficientSequence::from_real(v, "smooth-only");
        let s = Complex64::new(0.5, 2.0);
        let full = evaluate(&a, s, 5000, false).unwrap().value;
        let smooth = evaluate_smooth(&a, s, bound(2), 5000).unwrap().value;
        assert!((full - smooth).norm() < 1e-14);
    }

    #[test]
    fn zeta_n_examples() {
        assert!((euler_product_zeta_n(bound(1), c(1.0)).unwrap().re - 2.0).abs() < 1e-15);
        assert!((euler_product_zeta_n(bound(2), c(2.0)).unwrap().re - 1.5).abs() < 1e-15);
        assert!((euler_product_zeta_n(bound(3), c(2.0)).unwrap().re - 25.0 / 16.0).abs() < 1e-15);
        assert!(matches!(euler_product_zeta_n(bound(2), c(0.0)), Err(DsError::Singular(_))));
    }

    #[test]
    fn construction_ii_product_examples() {
        assert!((euler_product_construction_ii(bound(1), 1.0, c(1.0)).unwrap().re - 2.0).abs() < 1e-15);
        assert!((euler_product_construction_ii(bound(2), 1.0, c(2.0)).unwrap().re - 1.5).abs() < 1e-15);
        assert!(euler_product_construction_ii(bound(2), 1.0, c(0.0)).is_err());
    }

    #[test]
    fn smooth_sum_converges_to_euler_product() {
        let limit = 1_000_000;
        let a = ones(limit).unwrap();
        for n in 1..=4 {
            for sigma in [0.8, 1.0, 2.0] {
                let r = evaluate_smooth(&a, c(sigma), bound(n), limit).unwrap();
                let exact = euler_product_zeta_n(bound(n), c(sigma)).unwrap().re;
                let diff = exact - r.value.re;
                assert!(diff >= -1e-12 && diff <= r.tail_bound.unwrap(), "n {n} s {sigma}: {diff}");
            }
        }
    }

    #[test]
    fn prefix_determinism() {
        let a = power_shift(0.5, 300).unwrap();
        let zm1 = power_shift(-2.0, 300).unwrap().without_unit();
        let c_short = reciprocal_coeffs(0.9, &zm1.prefix(150).unwrap(), 150).unwrap();
        let c_long = reciprocal_coeffs(0.9, &zm1, 300).unwrap();
        assert_eq!(c_short.to_f64_vec()[..], c_long.to_f64_vec()[..150]);
        let x_short = dirichlet_convolve(&a.prefix(150).unwrap(), &zm1.prefix(150).unwrap(), 150).unwrap();
        let x_long = dirichlet_convolve(&a, &zm1, 300).unwrap();
        assert_eq!(x_short.to_f64_vec()[..], x_long.to_f64_vec()[..150]);
    }

    mod props {
        use super::*;
        use proptest::collection::vec;
        use proptest::prelude::*;

        const N: usize = 512;

        fn exact_seq() -> impl Strategy<Value = CoefficientSequence> {
            vec(-50i128..50, N).prop_map(|v| CoefficientSequence::from_exact(v, "x"))
        }

        fn real_seq() -> impl Strategy<Value = CoefficientSequence> {
            vec(0.1f64..10.0, N).prop_map(|v| CoefficientSequence::from_real(v, "x"))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn exact_convolution_commutes_and_associates(a in exact_seq(), b in exact_seq(), c in exact_seq()) {
                let ab = dirichlet_convolve(&a, &b, N).unwrap();
                let ba = dirichlet_convolve(&b, &a, N).unwrap();
                prop_assert_eq!(ab.as_exact(), ba.as_exact());
                let left = dirichlet_convolve(&ab, &c, N).unwrap();
                let right = dirichlet_convolve(&a, &dirichlet_convolve(&b, &c, N).unwrap(), N).unwrap();
                prop_assert_eq!(left.as_exact(), right.as_exact());
            }

            #[test]
            fn real_convolution_associates(a in real_seq(), b in real_seq(), c in real_seq()) {
                let left = dirichlet_convolve(&dirichlet_convolve(&a, &b, N).unwrap(), &c, N).unwrap();
                let right = dirichlet_convolve(&a, &dirichlet_convolve(&b, &c, N).unwrap(), N).unwrap();
                for m in 1..=N {
                    let (l, r) = (left.get(m), right.get(m));
                    prop_assert!((l - r).abs() <= 1e-10 * l.abs().max(r.abs()));
                }
            }

            #[test]
            fn multiplicative_extension_is_multiplicative(m in 1u64..300, n in 1u64..300, t in -2.0f64..2.0) {
                prop_assume!(gcd(m, n) == 1);
                let c = multiplicative_extend(|p, e| (t * (p as f64).ln()).exp() + e as f64, 90_000, "h").unwrap();
                let (cm, cn, cmn) = (c.get(m as usize), c.get(n as usize), c.get((m * n) as usize));
                prop_assert!((cmn - cm * cn).abs() <= 1e-12 * cmn.abs());
            }
        }

        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 { a } else { gcd(b, a % b) }
        }
    }
}
