//! Numerical estimates of the abscissa of absolute convergence from the growth
//! of partial coefficient sums, on the full series and on its `p_n`-smooth
//! subseries.
//!
//! With `A(N) = sum_{n <= N} a_n` and `A(N) ~ N^sigma`, the local exponent
//! `(ln A(N_2) - ln A(N_1)) / (ln N_2 - ln N_1)` between dyadic checkpoints
//! tracks `sigma`. No extrapolation is applied: slow drift (for example the
//! `k / ln N` exponent of polylogarithmic growth) is reported as a caveat.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DsError, Result};
use crate::primes::SmoothBound;
use crate::series::{CoefficientSequence, Payload};
use crate::series_spec::SeriesSpec;
use crate::sum::KahanSum;
use crate::support::SmoothSupport;

pub const DEFAULT_CHECKPOINTS: usize = 8;

/// Slopes differing by more than this between the last two checkpoint pairs
/// are flagged as drifting.
const DRIFT: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GlobalSlope,
    TwoPointSlope,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbscissaReport {
    pub estimate: f64,
    /// `(N_k, slope between N_{k-1} and N_k)`
    pub checkpoint_slopes: Vec<(u64, f64)>,
    pub method: Method,
    pub caveat: Option<String>,
    /// `ln A(N) / ln N` at the last checkpoint
    pub global_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub per_n: Vec<(usize, AbscissaReport)>,
    pub delta_estimate: f64,
}

/// Dyadic checkpoints `N >> (K - k)` for `k = 0..=K`, deduplicated.
fn dyadic_checkpoints(n: u64, checkpoints: usize) -> Result<Vec<u64>> {
    if checkpoints < 2 {
        return Err(DsError::invalid("at least 2 checkpoints are needed"));
    }
    let mut out: Vec<u64> = (0..=checkpoints)
        .map(|k| n.checked_shr((checkpoints - k) as u32).unwrap_or(0))
        .filter(|&x| x >= 1)
        .collect();
    out.dedup();
    if out.len() < 2 {
        return Err(DsError::invalid(format!("N = {n} too small for {checkpoints} checkpoints")));
    }
    Ok(out)
}

/// Builds the report from `(N_k, A(N_k))` pairs.
fn slope_report(points: &[(u64, f64)]) -> Result<AbscissaReport> {
    let points: Vec<(u64, f64)> = points.iter().copied().filter(|&(_, a)| a > 0.0).collect();
    if points.len() < 2 {
        return Err(DsError::invalid("partial sums vanish at all but one checkpoint"));
    }
    if points.iter().any(|&(_, a)| !a.is_finite()) {
        return Err(DsError::range("partial sums overflow f64"));
    }
    let checkpoint_slopes: Vec<(u64, f64)> = points
        .windows(2)
        .map(|w| {
            let ((n1, a1), (n2, a2)) = (w[0], w[1]);
            (n2, (a2.ln() - a1.ln()) / ((n2 as f64).ln() - (n1 as f64).ln()))
        })
        .collect();
    let &(n_last, a_last) = points.last().expect("non-empty");
    let a_prev = points[points.len() - 2].1;
    let global_slope = if n_last > 1 { a_last.ln() / (n_last as f64).ln() } else { 0.0 };
    let last = checkpoint_slopes.last().expect("non-empty").1;
    let (estimate, caveat) = if a_last / a_prev < 1.0 + 1e-9 {
        (0.0, Some("possible sigma_a <= 0: partial sums stopped growing".to_string()))
    } else if checkpoint_slopes.len() >= 2 {
        let prev = checkpoint_slopes[checkpoint_slopes.len() - 2].1;
        let drift = (last - prev).abs();
        let caveat = (drift > DRIFT)
            .then(|| format!("slope still drifting: last two checkpoint slopes differ by {drift:.3e}"));
        (last, caveat)
    } else {
        (last, None)
    };
    Ok(AbscissaReport { estimate, checkpoint_slopes, method: Method::TwoPointSlope, caveat, global_slope })
}

fn require_nonnegative(values: impl IntoIterator<Item = f64>) -> Result<()> {
    if values.into_iter().any(|x| !(x >= 0.0)) {
        return Err(DsError::invalid("abscissa estimation needs non-negative coefficients"));
    }
    Ok(())
}

/// Two-point slopes of `A(N_k)` at `N_k = N 2^{k-K}`.
pub fn estimate_sigma_a(a: &CoefficientSequence, n: usize, checkpoints: usize) -> Result<AbscissaReport> {
    a.require_len(n)?;
    let values = a.to_f64_vec();
    require_nonnegative(values[..n].iter().copied())?;
    let marks = dyadic_checkpoints(n as u64, checkpoints)?;
    let mut acc = KahanSum::new();
    let mut points = Vec::with_capacity(marks.len());
    let mut next = 0;
    for (i, &v) in values[..n].iter().enumerate() {
        acc.add(v);
        if (i + 1) as u64 == marks[next] {
            points.push((marks[next], acc.value()));
            next += 1;
        }
    }
    slope_report(&points)
}

/// Same estimator over a smooth support given as ascending indices with values.
///
/// Checkpoints are the dyadic magnitudes `limit 2^{k-K}`; each dyadic interval
/// holds a power of two, so every checkpoint adds at least one index.
fn smooth_report(
    elements: &[u64],
    values: &[f64],
    limit: u64,
    checkpoints: usize,
) -> Result<AbscissaReport> {
    require_nonnegative(values.iter().copied())?;
    let marks = dyadic_checkpoints(limit, checkpoints)?;
    let mut acc = KahanSum::new();
    let mut points = Vec::with_capacity(marks.len());
    let mut idx = 0;
    for &mark in &marks {
        while idx < elements.len() && elements[idx] <= mark {
            acc.add(values[idx]);
            idx += 1;
        }
        points.push((mark, acc.value()));
    }
    slope_report(&points)
}

/// Estimate of `sigma_a(f_n)` from a dense sequence materialized to `limit`.
pub fn estimate_sigma_a_smooth(
    a: &CoefficientSequence,
    bound: SmoothBound,
    limit: usize,
    checkpoints: usize,
) -> Result<AbscissaReport> {
    a.require_len(limit)?;
    let elements = crate::primes::smooth_numbers(bound, limit as u64)?;
    let values: Vec<f64> = elements.iter().map(|&j| a.get(j as usize)).collect();
    smooth_report(&elements, &values, limit as u64, checkpoints)
}

/// Estimate of `sigma_a(f_n)` computed on the smooth support directly, so
/// `limit` may go up to `u64` range.
pub fn estimate_sigma_a_smooth_series(
    series: &SeriesSpec,
    bound: SmoothBound,
    limit: u64,
    checkpoints: usize,
) -> Result<AbscissaReport> {
    let support = SmoothSupport::new(bound, limit)?;
    let values = match series.coeffs_on(&support)? {
        Payload::Exact(v) => v.into_iter().map(|x| x as f64).collect(),
        Payload::Real(v) => v,
    };
    smooth_report(support.elements(), &values, limit, checkpoints)
}

fn delta_from(per_n: Vec<(usize, AbscissaReport)>) -> DeltaReport {
    let delta_estimate = per_n.iter().map(|(_, r)| r.estimate).fold(f64::NEG_INFINITY, f64::max);
    DeltaReport { per_n, delta_estimate }
}

fn indices(n_max: usize) -> Result<Vec<SmoothBound>> {
    if n_max == 0 {
        return Err(DsError::invalid("n_max must be >= 1"));
    }
    (1..=n_max).map(SmoothBound::new).collect()
}

/// `max_{n <= n_max}` of the smooth-subseries estimates.
pub fn estimate_delta_a(
    a: &CoefficientSequence,
    n_max: usize,
    limit: usize,
    checkpoints: usize,
) -> Result<DeltaReport> {
    let per_n = indices(n_max)?
        .into_par_iter()
        .map(|b| Ok((b.index(), estimate_sigma_a_smooth(a, b, limit, checkpoints)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(delta_from(per_n))
}

/// [`estimate_delta_a`] on smooth supports built directly from the series.
pub fn estimate_delta_a_series(
    series: &SeriesSpec,
    n_max: usize,
    limit: u64,
    checkpoints: usize,
) -> Result<DeltaReport> {
    let per_n = indices(n_max)?
        .into_par_iter()
        .map(|b| Ok((b.index(), estimate_sigma_a_smooth_series(series, b, limit, checkpoints)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(delta_from(per_n))
}

/// Partial sums `sum_{n <= N} a_n n^{-sigma}`; `values[i][j]` is at `ns[i]`, `sigmas[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub sigmas: Vec<f64>,
    pub ns: Vec<u64>,
    pub values: Vec<Vec<f64>>,
}

pub fn convergence_table(a: &CoefficientSequence, sigmas: &[f64], ns: &[u64]) -> Result<ConvergenceTable> {
    if ns.is_empty() || sigmas.is_empty() {
        return Err(DsError::invalid("convergence table needs at least one sigma and one N"));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) || ns[0] == 0 {
        return Err(DsError::invalid("table N values must be positive and strictly increasing"));
    }
    let n_max = *ns.last().expect("non-empty") as usize;
    a.require_len(n_max)?;
    let mut columns = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let mut acc = KahanSum::new();
        let mut column = Vec::with_capacity(ns.len());
        let mut next = 0;
        for m in 1..=n_max {
            let am = a.get(m);
            if am != 0.0 {
                acc.add(am * (-sigma * (m as f64).ln()).exp());
            }
            if m as u64 == ns[next] {
                column.push(acc.value());
                next += 1;
            }
        }
        columns.push(column);
    }
    let values = (0..ns.len()).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    Ok(ConvergenceTable { sigmas: sigmas.to_vec(), ns: ns.to_vec(), values })
}
