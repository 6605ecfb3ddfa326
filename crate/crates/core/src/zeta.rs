//! Riemann zeta on the real half-line `sigma > 1` by Euler–Maclaurin summation.

use crate::error::{DsError, Result};
use crate::sum::KahanSum;

const TARGET: f64 = 1e-14;

/// `zeta(sigma)` for real `sigma > 1`.
///
/// Head sum over `n < M`, the integral and boundary terms, and the `B_2`, `B_4`
/// corrections. `M` is doubled until the first omitted (`B_6`) term, which
/// bounds the remainder for real arguments, falls below `1e-14`.
pub fn zeta_real(sigma: f64) -> Result<f64> {
    if !(sigma > 1.0) || !sigma.is_finite() {
        return Err(DsError::invalid(format!("zeta_real needs finite sigma > 1, got {sigma}")));
    }
    let mut m = 8u64;
    while remainder_bound(sigma, m as f64) > TARGET && m < 1 << 20 {
        m *= 2;
    }
    let mf = m as f64;
    let mut acc = KahanSum::new();
    // smallest terms first
    for n in (1..m).rev() {
        acc.add((n as f64).powf(-sigma));
    }
    let m_pow = mf.powf(-sigma);
    acc.add(mf * m_pow / (sigma - 1.0));
    acc.add(0.5 * m_pow);
    acc.add(sigma / 12.0 * m_pow / mf);
    acc.add(-sigma * (sigma + 1.0) * (sigma + 2.0) / 720.0 * m_pow / (mf * mf * mf));
    Ok(acc.value())
}

/// Magnitude of the `B_6` Euler–Maclaurin term.
fn remainder_bound(sigma: f64, m: f64) -> f64 {
    let rising: f64 = (0..5).map(|k| sigma + k as f64).product();
    rising / 30240.0 * m.powf(-sigma - 5.0)
}
