//! Concrete series realizing prescribed gaps between the abscissa of absolute
//! convergence and the smooth-subseries abscissa, plus the root finding that
//! locates where a decreasing series crosses a level `alpha`.
//!
//! * `g(s) = sum_p p^{r-1-s} / (1 - p^{-s})`: coefficient `p^{r-1}` on every
//!   prime power `p^k`, zero elsewhere.
//! * construction i: `zeta(s - r + 1) (1 + g(s))`.
//! * construction ii: multiplicative with `c_{p^m} = p^{r-1}`, i.e.
//!   `c_n = rad(n)^{r-1}`.
//! * reciprocal: `1 / (alpha - g)` for a positive base `g` without constant term.
//! * Kalmár: `1 / (2 - zeta^m)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DsError, Result};
use crate::primes::{sieve_primes, SmoothBound};
use crate::series::{
    dirichlet_convolve, multiplicative_extend, multiplicative_extend_exact, ones, power_shift,
    reciprocal_coeffs, CoefficientSequence, Envelope,
};
use crate::series_spec::SeriesSpec;
use crate::sum::KahanSum;
use crate::support::SmoothSupport;
use crate::zeta::zeta_real;

/// Largest smooth limit the adaptive root finder will reach for.
pub const MAX_SMOOTH_LIMIT: u64 = 1_000_000_000_000_000_000;

pub(crate) fn check_r(r: f64) -> Result<()> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        Err(DsError::invalid(format!("r must be a finite real >= 0, got {r}")))
    }
}

/// `p^{r-1}` as `exp((r-1) ln p)`.
pub(crate) fn prime_weight(p: u64, r: f64) -> f64 {
    ((r - 1.0) * (p as f64).ln()).exp()
}

pub(crate) fn growth_envelope(r: f64) -> Envelope {
    Envelope { scale: 1.0, exponent: (r - 1.0).max(0.0) }
}

/// Coefficients of `g`: `p^{r-1}` at each prime power, zero elsewhere.
pub fn g_coeffs(r: f64, n: usize) -> Result<CoefficientSequence> {
    check_r(r)?;
    if n == 0 {
        return Err(DsError::invalid("N must be >= 1"));
    }
    let mut values = vec![0.0; n];
    if n >= 2 {
        for &p in sieve_primes(n as u64)?.primes() {
            let w = prime_weight(p, r);
            let mut pk = p;
            while pk <= n as u64 {
                values[pk as usize - 1] = w;
                match pk.checked_mul(p) {
                    Some(next) => pk = next,
                    None => break,
                }
            }
        }
    }
    Ok(CoefficientSequence::from_real(values, format!("g:r={r}")).with_envelope(growth_envelope(r)))
}

/// `g_n(sigma) = sum_{j <= n} p_j^{r-1-sigma} / (1 - p_j^{-sigma})` in closed form.
pub fn g_truncated_eval(r: f64, bound: SmoothBound, sigma: f64) -> Result<f64> {
    check_r(r)?;
    if !(sigma > 0.0) {
        return Err(DsError::invalid(format!("sigma must be > 0, got {sigma}")));
    }
    let acc: KahanSum = bound
        .primes()
        .into_iter()
        .map(|p| {
            let ln_p = (p as f64).ln();
            ((r - 1.0 - sigma) * ln_p).exp() / (1.0 - (-sigma * ln_p).exp())
        })
        .collect();
    Ok(acc.value())
}

/// `c = (m^{r-1}) * (e + g)`; every `c_m > 0` and `c_p = 2 p^{r-1}`.
pub fn construction_i_coeffs(r: f64, n: usize) -> Result<CoefficientSequence> {
    let shift = power_shift(r - 1.0, n)?;
    let mut one_plus_g = g_coeffs(r, n)?.to_f64_vec();
    one_plus_g[0] = 1.0;
    let base = CoefficientSequence::from_real(one_plus_g, "1+g");
    let c = dirichlet_convolve(&shift, &base, n)?;
    Ok(CoefficientSequence::from_real(c.to_f64_vec(), format!("ci:r={r}")))
}

/// Exponent `k = r - 1` when `rad(n)^k` is an exact integer that fits `i128`
/// for every `n <= limit`.
pub(crate) fn exact_radical_power(r: f64, limit: u64) -> Option<u32> {
    let k = r - 1.0;
    if k < 0.0 || k.fract() != 0.0 || k > 126.0 {
        return None;
    }
    let k = k as u32;
    ((limit as f64).powi(k as i32) < 1e37).then_some(k)
}

/// Multiplicative `c_{p^m} = p^{r-1}`, so `c_n = rad(n)^{r-1}`.
///
/// Exact integers when `r - 1` is a non-negative integer and the values fit,
/// `f64` otherwise.
pub fn construction_ii_coeffs(r: f64, n: usize) -> Result<CoefficientSequence> {
    check_r(r)?;
    let name = format!("cii:r={r}");
    let seq = match exact_radical_power(r, n as u64) {
        Some(k) => multiplicative_extend_exact(|p, _| Ok((p as i128).pow(k)), n, name)?,
        None => multiplicative_extend(|p, _| prime_weight(p, r), n, name)?,
    };
    Ok(seq.with_envelope(growth_envelope(r)))
}

/// Coefficients of `1 / (2 - zeta^m)`, exact.
pub fn kalmar_dm_coeffs(m: u32, n: usize) -> Result<CoefficientSequence> {
    if m == 0 {
        return Err(DsError::invalid("m must be >= 1"));
    }
    let one = ones(n)?;
    let mut power = one.clone();
    for _ in 1..m {
        power = dirichlet_convolve(&power, &one, n)?;
    }
    let c = reciprocal_coeffs(1.0, &power.without_unit(), n)?;
    Ok(CoefficientSequence::from_exact(c.as_exact().expect("exact").to_vec(), format!("kalmar:m={m}")))
}

/// Number of ordered tuples of integers `>= min_factor` whose product is `n`,
/// by explicit depth-first enumeration of the tuples.
pub fn ordered_factorizations_bruteforce(n: u64, min_factor: u64) -> Result<u128> {
    if n == 0 {
        return Err(DsError::invalid("n must be >= 1"));
    }
    if min_factor < 2 {
        return Err(DsError::invalid("min_factor must be >= 2"));
    }
    fn walk(rest: u64, min_factor: u64) -> u128 {
        if rest == 1 {
            return 1;
        }
        let mut count = 0;
        let mut d = 1;
        while d * d <= rest {
            if rest.is_multiple_of(d) {
                let (small, large) = (d, rest / d);
                if small >= min_factor {
                    count += walk(rest / small, min_factor);
                }
                if large != small && large >= min_factor {
                    count += walk(rest / large, min_factor);
                }
            }
            d += 1;
        }
        count
    }
    Ok(walk(n, min_factor))
}

/// Root of `g(rho) = alpha` for a strictly decreasing `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoResult {
    pub rho: f64,
    pub bracket: (f64, f64),
    pub residual: f64,
    pub iterations: u32,
}

const BRACKET_STEPS: u32 = 200;

fn above(v: f64, alpha: f64) -> bool {
    // non-finite values come from the divergent side of the domain
    !v.is_finite() || v > alpha
}

/// Solves `g(rho) = alpha` for `g` strictly decreasing on `(domain_start, inf)`.
///
/// Bracketing starts at `domain_start + 1`, doubling the distance from
/// `domain_start` upward or halving it downward until `g` straddles `alpha`
/// (at most 200 steps). Bisection then runs until the bracket is at most `tol`
/// wide and `|g(rho) - alpha| <= tol`, or the bracket stops shrinking in
/// floating point.
pub fn find_rho(g: impl Fn(f64) -> f64, alpha: f64, tol: f64, domain_start: f64) -> Result<RhoResult> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(DsError::invalid(format!("alpha must be a positive real, got {alpha}")));
    }
    if !(tol > 0.0) {
        return Err(DsError::invalid(format!("tolerance must be > 0, got {tol}")));
    }
    let start = domain_start + 1.0;
    let (mut lo, mut hi);
    let mut steps = 0;
    if above(g(start), alpha) {
        lo = start;
        hi = start;
        loop {
            hi = domain_start + 2.0 * (hi - domain_start);
            steps += 1;
            if !above(g(hi), alpha) {
                break;
            }
            if steps >= BRACKET_STEPS || !hi.is_finite() {
                return Err(DsError::NoRoot(format!("g stays above alpha = {alpha} up to sigma = {hi}")));
            }
            lo = hi;
        }
    } else {
        hi = start;
        lo = start;
        loop {
            lo = domain_start + 0.5 * (lo - domain_start);
            steps += 1;
            if above(g(lo), alpha) {
                break;
            }
            if steps >= BRACKET_STEPS {
                return Err(DsError::NoRoot(format!(
                    "g stays below alpha = {alpha} down to sigma = {lo}"
                )));
            }
            hi = lo;
        }
    }
    let mut iterations = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        let value = g(mid);
        iterations += 1;
        let residual = (value - alpha).abs();
        let converged = hi - lo <= tol && residual <= tol;
        if converged || mid <= lo || mid >= hi || iterations >= 10_000 {
            return Ok(RhoResult { rho: mid, bracket: (lo, hi), residual, iterations });
        }
        if above(value, alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// `rho_m` with `zeta(rho_m)^m = 2`.
pub fn rho_m(m: u32, tol: f64) -> Result<RhoResult> {
    if m == 0 {
        return Err(DsError::invalid("m must be >= 1"));
    }
    find_rho(
        |s| zeta_real(s).map(|z| z.powi(m as i32) - 1.0).unwrap_or(f64::INFINITY),
        1.0,
        tol,
        1.0,
    )
}

/// One `rho_n` of the smooth truncations `g_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothRho {
    pub index: usize,
    /// smooth indices `j <= smooth_limit` were summed
    pub smooth_limit: u64,
    pub smooth_terms: usize,
    /// bound on the omitted part of `g_n(rho_n)`, when the base has an envelope
    pub tail_bound: Option<f64>,
    pub result: RhoResult,
}

/// `g_n` as a sum over the `p_n`-smooth support of `base` with the unit dropped.
pub(crate) struct SmoothPartialSum {
    terms: Vec<(f64, f64)>,
}

impl SmoothPartialSum {
    pub(crate) fn new(base: &SeriesSpec, support: &SmoothSupport) -> Result<Self> {
        let values = base.coeffs_on(support)?.to_f64_vec();
        let terms = support
            .elements()
            .iter()
            .zip(values)
            .skip(1)
            .filter(|&(_, b)| b != 0.0)
            .map(|(&j, b)| ((j as f64).ln(), b))
            .collect();
        Ok(SmoothPartialSum { terms })
    }

    pub(crate) fn eval(&self, sigma: f64) -> f64 {
        self.terms.iter().map(|&(ln_j, b)| b * (-sigma * ln_j).exp()).collect::<KahanSum>().value()
    }
}

/// Solves `g_n(rho_n) = alpha` on the `p_n`-smooth part of `base` (unit dropped).
///
/// The smooth limit starts at `limit` and grows tenfold, up to
/// [`MAX_SMOOTH_LIMIT`], until the smooth tail bound at the root is at most
/// `tol / 10`. Bases without a growth envelope are summed to `limit` only.
pub fn smooth_rho(base: &SeriesSpec, alpha: f64, bound: SmoothBound, tol: f64, limit: u64) -> Result<SmoothRho> {
    check_reciprocal_base(base)?;
    let envelope = base.envelope();
    let domain_start = envelope.map_or(0.0, |e| e.exponent);
    let mut limit = limit.max(2);
    loop {
        let support = SmoothSupport::new(bound, limit)?;
        let g_n = SmoothPartialSum::new(base, &support)?;
        let result = find_rho(|s| g_n.eval(s), alpha, tol, domain_start)?;
        let tail_bound = envelope.and_then(|e| e.smooth_tail_bound(support.primes(), result.rho, limit));
        let settled = tail_bound.is_none_or(|t| t <= tol / 10.0);
        if settled || limit >= MAX_SMOOTH_LIMIT {
            return Ok(SmoothRho {
                index: bound.index(),
                smooth_limit: limit,
                smooth_terms: support.len(),
                tail_bound,
                result,
            });
        }
        limit = limit.saturating_mul(10).min(MAX_SMOOTH_LIMIT);
    }
}

/// `rho_1, ..., rho_{n_max}` for the smooth truncations of `base`.
///
/// Indices where `g_n` never reaches `alpha` are skipped. Solves run in
/// parallel; the output is ordered by index.
pub fn rho_sequence(
    base: &SeriesSpec,
    alpha: f64,
    n_max: usize,
    tol: f64,
    limit: u64,
) -> Result<Vec<SmoothRho>> {
    let solved: Vec<Result<SmoothRho>> = (1..=n_max)
        .into_par_iter()
        .map(|n| smooth_rho(base, alpha, SmoothBound::new(n)?, tol, limit))
        .collect();
    let mut out = Vec::new();
    for r in solved {
        match r {
            Ok(v) => out.push(v),
            Err(DsError::NoRoot(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Reciprocal bases must be non-negative with at least one positive
/// coefficient past the unit; checked on a short prefix.
pub(crate) fn check_reciprocal_base(base: &SeriesSpec) -> Result<()> {
    let probe = base.materialize(64)?;
    let tail: Vec<f64> = probe.to_f64_vec()[1..].to_vec();
    if tail.iter().any(|&b| b < 0.0) || !tail.iter().any(|&b| b > 0.0) {
        return Err(DsError::invalid(format!(
            "reciprocal base '{base}' needs non-negative coefficients with at least one positive"
        )));
    }
    Ok(())
}
