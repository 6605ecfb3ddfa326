//! Diagonal Dirichlet-series kernels `kappa(s, u) = sum a_n n^{-s - conj(u)}`
//! with positive coefficients: evaluation, Gram matrices and their
//! positive-semidefiniteness check, and the membership ratio
//! `sum |b_n|^2 / a_n` of the associated Hilbert space.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex_json::ReIm;
use crate::error::{DsError, Result};
use crate::series::{evaluate, CoefficientSequence, EvalResult};
use crate::sum::KahanSum;

/// Points whose pairwise real-part sum is closer than this to the estimated
/// abscissa are evaluated with every materialized coefficient.
const BOUNDARY_MARGIN: f64 = 0.25;

/// Pivot tolerance of the semidefiniteness check.
pub const PIVOT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct KernelSpec {
    coeffs: CoefficientSequence,
    sigma_a_estimate: f64,
    delta_a_estimate: f64,
}

impl KernelSpec {
    pub fn new(coeffs: CoefficientSequence, sigma_a_estimate: f64, delta_a_estimate: f64) -> Result<Self> {
        if coeffs.is_empty() || !coeffs.is_positive() {
            return Err(DsError::invalid(format!(
                "kernel coefficients of '{}' must all be positive",
                coeffs.provenance()
            )));
        }
        if !sigma_a_estimate.is_finite() || !delta_a_estimate.is_finite() {
            return Err(DsError::invalid("abscissa estimates must be finite"));
        }
        Ok(KernelSpec { coeffs, sigma_a_estimate, delta_a_estimate })
    }

    pub fn coeffs(&self) -> &CoefficientSequence {
        &self.coeffs
    }

    pub fn sigma_a_estimate(&self) -> f64 {
        self.sigma_a_estimate
    }

    pub fn delta_a_estimate(&self) -> f64 {
        self.delta_a_estimate
    }

    /// Terms to use for a pair whose real parts sum to `re_sum`.
    fn terms_for(&self, re_sum: f64, n: usize) -> usize {
        if re_sum - self.sigma_a_estimate < BOUNDARY_MARGIN {
            log::warn!(
                "Re(s) + Re(u) = {re_sum} is within {BOUNDARY_MARGIN} of the estimated abscissa {}; \
                 using all {} materialized terms",
                self.sigma_a_estimate,
                self.coeffs.len()
            );
            self.coeffs.len()
        } else {
            n
        }
    }
}

/// `sum_{n <= N} a_n n^{-s - conj(u)}`.
pub fn kappa(spec: &KernelSpec, s: Complex64, u: Complex64, n: usize) -> Result<EvalResult> {
    let terms = spec.terms_for(s.re + u.re, n);
    evaluate(&spec.coeffs, s + u.conj(), terms, true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramResult {
    pub points: Vec<ReIm>,
    pub dim: usize,
    /// row-major `[re, im]` pairs
    pub matrix: Vec<[f64; 2]>,
    pub psd: bool,
    pub min_pivot: f64,
}

impl GramResult {
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        let [re, im] = self.matrix[i * self.dim + j];
        Complex64::new(re, im)
    }
}

/// Gram matrix `kappa(p_i, p_j)`; the upper triangle is computed and mirrored.
pub fn gram_matrix(spec: &KernelSpec, points: &[Complex64], n: usize) -> Result<GramResult> {
    if points.is_empty() {
        return Err(DsError::invalid("gram matrix needs at least one point"));
    }
    let dim = points.len();
    let pairs: Vec<(usize, usize)> = (0..dim).flat_map(|i| (i..dim).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| kappa(spec, points[i], points[j], n).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let mut matrix = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        if i == j {
            matrix[i * dim + i] = Complex64::new(v.re, 0.0);
        } else {
            matrix[i * dim + j] = v;
            matrix[j * dim + i] = v.conj();
        }
    }
    let (psd, min_pivot) = pivoted_psd_check(&matrix, dim);
    Ok(GramResult {
        points: points.iter().map(|&p| p.into()).collect(),
        dim,
        matrix: matrix.iter().map(|z| [z.re, z.im]).collect(),
        psd,
        min_pivot,
    })
}

/// Pivoted Cholesky on a Hermitian matrix (row-major, `dim x dim`).
///
/// Each step pivots on the largest remaining diagonal of the Schur complement.
/// Returns `(psd, min_pivot)`: the matrix passes when no pivot falls below
/// `-PIVOT_TOLERANCE`; once the largest remaining diagonal is within the
/// tolerance the remaining block is treated as numerically zero.
pub fn pivoted_psd_check(matrix: &[Complex64], dim: usize) -> (bool, f64) {
    assert_eq!(matrix.len(), dim * dim, "matrix is not {dim}x{dim}");
    let mut a = matrix.to_vec();
    let mut order: Vec<usize> = (0..dim).collect();
    let mut min_pivot = f64::INFINITY;
    for k in 0..dim {
        let (j, pivot) = (k..dim)
            .map(|j| (j, a[order[j] * dim + order[j]].re))
            .fold((k, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot <= PIVOT_TOLERANCE {
            let remaining_min = (k..dim).map(|j| a[order[j] * dim + order[j]].re).fold(f64::INFINITY, f64::min);
            min_pivot = min_pivot.min(remaining_min);
            return (min_pivot >= -PIVOT_TOLERANCE, min_pivot);
        }
        min_pivot = min_pivot.min(pivot);
        order.swap(k, j);
        let p = order[k];
        let root = pivot.sqrt();
        // column k of L, stored in place over the remaining rows
        for &r in &order[k + 1..] {
            a[r * dim + p] /= root;
        }
        for (x, &r) in order.iter().enumerate().skip(k + 1) {
            let lr = a[r * dim + p];
            for &c in &order[k + 1..=x] {
                let lc = a[c * dim + p];
                let v = a[r * dim + c] - lr * lc.conj();
                a[r * dim + c] = v;
                a[c * dim + r] = v.conj();
            }
        }
    }
    (true, min_pivot)
}

/// `sum_{n <= N} |b_n|^2 / a_n`, returned as the real part of the value.
pub fn membership_ratio(spec: &KernelSpec, b: &CoefficientSequence, n: usize) -> Result<EvalResult> {
    spec.coeffs.require_len(n)?;
    b.require_len(n)?;
    let acc: KahanSum = (1..=n)
        .map(|m| {
            let bm = b.get(m);
            bm * bm / spec.coeffs.get(m)
        })
        .collect();
    Ok(EvalResult { value: Complex64::new(acc.value(), 0.0), terms_used: n as u64, tail_bound: None })
}

/// Half-plane edges derived from the abscissa estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlanes {
    /// `sigma_a / 2`: every member of the Hilbert space converges absolutely to its right
    pub common_domain_edge: f64,
    /// `delta_a / 2`: multipliers are bounded analytic functions to its right
    pub multiplier_edge: f64,
}

pub fn halfplane_constants(spec: &KernelSpec) -> HalfPlanes {
    HalfPlanes {
        common_domain_edge: spec.sigma_a_estimate / 2.0,
        multiplier_edge: spec.delta_a_estimate / 2.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::construction_ii_coeffs;
    use crate::series::{ones, power_shift};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn zeta_kernel(n: usize) -> KernelSpec {
        KernelSpec::new(ones(n).unwrap(), 1.0, 0.0).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `x^H G x` for random `x`; an independent check on the pivot verdict.
    fn quadratic_forms_nonnegative(g: &GramResult, rng: &mut ChaCha8Rng) -> bool {
        (0..200).all(|_| {
            let x: Vec<Complex64> = (0..g.dim).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let mut q = c(0.0, 0.0);
            for i in 0..g.dim {
                for j in 0..g.dim {
                    q += x[i].conj() * g.entry(i, j) * x[j];
                }
            }
            q.re >= -1e-9
        })
    }

    #[test]
    fn kappa_examples() {
        let spec = zeta_kernel(1_000_000);
        let r = kappa(&spec, c(1.0, 0.0), c(1.0, 0.0), 1_000_000).unwrap();
        let err = std::f64::consts::PI.powi(2) / 6.0 - r.value.re;
        assert!(err >= 0.0 && err <= r.tail_bound.unwrap());

        let a = power_shift(-2.0, 1_000_000).unwrap();
        let spec = KernelSpec::new(a, -1.0, -1.0).unwrap();
        let r = kappa(&spec, c(0.25, 0.0), c(0.25, 0.0), 1_000_000).unwrap();
        assert!((r.value.re - 1.341_487_257_250_917_2).abs() <= r.tail_bound.unwrap() + 1e-12);
    }

    #[test]
    fn hermitian_symmetry() {
        let spec = zeta_kernel(20_000);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let s = c(rng.gen_range(0.8..3.0), rng.gen_range(-20.0..20.0));
            let u = c(rng.gen_range(0.8..3.0), rng.gen_range(-20.0..20.0));
            let a = kappa(&spec, s, u, 20_000).unwrap().value;
            let b = kappa(&spec, u, s, 20_000).unwrap().value;
            assert!((a - b.conj()).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn gram_examples() {
        let spec = zeta_kernel(100_000);
        let g = gram_matrix(&spec, &[c(1.0, 2.0)], 100_000).unwrap();
        assert_eq!(g.dim, 1);
        assert!(g.entry(0, 0).re > 0.0 && g.psd);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let points: Vec<Complex64> = (0..6).map(|_| c(rng.gen_range(0.76..2.0), rng.gen_range(-5.0..5.0))).collect();
        let g = gram_matrix(&spec, &points, 100_000).unwrap();
        assert!(g.psd);
        assert!(quadratic_forms_nonnegative(&g, &mut rng));
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(g.entry(i, j), g.entry(j, i).conj());
            }
        }

        let dup = [c(1.0, 0.5), c(1.0, 0.5), c(1.5, -1.0)];
        let g = gram_matrix(&spec, &dup, 100_000).unwrap();
        assert!(g.psd);
        assert!(g.min_pivot.abs() <= PIVOT_TOLERANCE, "{}", g.min_pivot);
    }

    #[test]
    fn psd_check_rejects_indefinite() {
        let m = [c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)];
        let (psd, min_pivot) = pivoted_psd_check(&m, 2);
        assert!(!psd);
        assert!(min_pivot < -1.0);
        let m = [c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)];
        assert_eq!(pivoted_psd_check(&m, 2), (true, 1.5));
        let m = [c(-1e-12, 0.0)];
        assert!(pivoted_psd_check(&m, 1).0);
    }

    #[test]
    fn random_point_sets_are_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let zeta = zeta_kernel(50_000);
        let cii = KernelSpec::new(construction_ii_coeffs(2.0, 50_000).unwrap(), 2.0, 0.0).unwrap();
        for spec in [&zeta, &cii] {
            for _ in 0..20 {
                let size = rng.gen_range(2..=8);
                let lo = spec.sigma_a_estimate() / 2.0 + 0.25;
                let points: Vec<Complex64> =
                    (0..size).map(|_| c(rng.gen_range(lo..lo + 2.0), rng.gen_range(-10.0..10.0))).collect();
                let g = gram_matrix(spec, &points, 50_000).unwrap();
                assert!(g.psd, "min pivot {}", g.min_pivot);
            }
        }
    }

    #[test]
    fn membership_examples() {
        let n = 1_000_000;
        let spec = zeta_kernel(n);
        let b = power_shift(-1.0, n).unwrap();
        let r = membership_ratio(&spec, &b, n).unwrap().value.re;
        assert!((1.6449..=1.6450).contains(&r), "{r}");
        let r = membership_ratio(&spec, &ones(n).unwrap(), n).unwrap().value.re;
        assert_eq!(r, n as f64);
        let a = power_shift(-1.5, 1000).unwrap();
        let spec = KernelSpec::new(a.clone(), -0.5, -0.5).unwrap();
        let r = membership_ratio(&spec, &a, 1000).unwrap().value.re;
        let direct: f64 = a.to_f64_vec().iter().sum();
        assert!((r - direct).abs() < 1e-12);
    }

    #[test]
    fn membership_partial_sums_nondecreasing() {
        let spec = zeta_kernel(5000);
        let b = power_shift(-0.7, 5000).unwrap();
        let sums: Vec<f64> =
            [10, 100, 1000, 5000].iter().map(|&n| membership_ratio(&spec, &b, n).unwrap().value.re).collect();
        assert!(sums.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn halfplanes() {
        assert_eq!(
            halfplane_constants(&zeta_kernel(10)),
            HalfPlanes { common_domain_edge: 0.5, multiplier_edge: 0.0 }
        );
        let cii = KernelSpec::new(construction_ii_coeffs(2.0, 10).unwrap(), 2.0, 0.0).unwrap();
        assert_eq!(halfplane_constants(&cii), HalfPlanes { common_domain_edge: 1.0, multiplier_edge: 0.0 });
    }

    #[test]
    fn rejects_nonpositive_coefficients() {
        let zm1 = ones(10).unwrap().without_unit();
        assert!(KernelSpec::new(zm1, 1.0, 0.0).is_err());
    }
}
