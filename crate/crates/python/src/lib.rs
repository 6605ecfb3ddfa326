//! Python bindings: series specs, evaluation, abscissa estimates, roots and
//! kernel Gram matrices.

use ds_core::abscissa::DEFAULT_CHECKPOINTS;
use ds_core::verify::{run_battery, VerifyOptions, DEFAULT_SEED};
use ds_core::{
    estimate_delta_a, estimate_delta_a_series, estimate_sigma_a, estimate_sigma_a_smooth_series, evaluate,
    evaluate_smooth, AbscissaReport, DsError, KernelSpec, Payload, SeriesSpec, SmoothBound,
};
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn to_py(e: DsError) -> PyErr {
    match e {
        DsError::Range(_) => PyOverflowError::new_err(e.to_string()),
        DsError::Singular(_) | DsError::NoRoot(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPyResult<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPyResult<T> for ds_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn report_dict<'py>(py: Python<'py>, r: &AbscissaReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("estimate", r.estimate)?;
    d.set_item("checkpoint_slopes", r.checkpoint_slopes.clone())?;
    d.set_item("method", format!("{:?}", r.method))?;
    d.set_item("caveat", r.caveat.clone())?;
    d.set_item("global_slope", r.global_slope)?;
    Ok(d)
}

/// A Dirichlet series given by its spec text, e.g. `cii:r=2`.
#[pyclass(name = "Series", frozen)]
struct PySeries {
    spec: SeriesSpec,
}

impl PySeries {
    fn kernel(&self, limit: usize) -> PyResult<KernelSpec> {
        let coeffs = self.spec.materialize(limit).py()?;
        let sigma = match self.spec.known_abscissa() {
            Some(s) => s,
            None => estimate_sigma_a(&coeffs, limit, DEFAULT_CHECKPOINTS).py()?.estimate,
        };
        let delta = estimate_delta_a(&coeffs, 3, limit, DEFAULT_CHECKPOINTS).py()?.delta_estimate;
        KernelSpec::new(coeffs, sigma, delta).py()
    }
}

#[pymethods]
impl PySeries {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PySeries { spec: text.parse().py()? })
    }

    fn __repr__(&self) -> String {
        format!("Series('{}')", self.spec)
    }

    fn __str__(&self) -> String {
        self.spec.to_string()
    }

    /// Coefficients a_1..a_limit as Python ints (exact payloads) or floats.
    fn coeffs<'py>(&self, py: Python<'py>, limit: usize) -> PyResult<Bound<'py, PyList>> {
        match self.spec.materialize(limit).py()?.payload() {
            Payload::Exact(v) => PyList::new(py, v),
            Payload::Real(v) => PyList::new(py, v),
        }
    }

    /// `(value, tail_bound)` of the partial sum at `s`, optionally restricted
    /// to `p_n`-smooth indices.
    #[pyo3(signature = (s, limit, smooth_index=None))]
    fn evaluate(&self, s: Complex64, limit: usize, smooth_index: Option<usize>) -> PyResult<(Complex64, Option<f64>)> {
        let seq = self.spec.materialize(limit).py()?;
        let r = match smooth_index {
            Some(i) => evaluate_smooth(&seq, s, SmoothBound::new(i).py()?, limit).py()?,
            None => evaluate(&seq, s, limit, true).py()?,
        };
        Ok((r.value, r.tail_bound))
    }

    #[pyo3(signature = (limit, checkpoints=DEFAULT_CHECKPOINTS, smooth_index=None))]
    fn sigma_a<'py>(
        &self,
        py: Python<'py>,
        limit: u64,
        checkpoints: usize,
        smooth_index: Option<usize>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let r = match smooth_index {
            Some(i) => estimate_sigma_a_smooth_series(&self.spec, SmoothBound::new(i).py()?, limit, checkpoints).py()?,
            None => {
                let n = usize::try_from(limit).map_err(|_| PyOverflowError::new_err("limit too large"))?;
                estimate_sigma_a(&self.spec.materialize(n).py()?, n, checkpoints).py()?
            }
        };
        report_dict(py, &r)
    }

    /// Smooth-subseries estimates for n = 1..max_index and their maximum.
    #[pyo3(signature = (max_index, limit, checkpoints=DEFAULT_CHECKPOINTS))]
    fn delta_a<'py>(&self, py: Python<'py>, max_index: usize, limit: u64, checkpoints: usize) -> PyResult<Bound<'py, PyDict>> {
        let r = estimate_delta_a_series(&self.spec, max_index, limit, checkpoints).py()?;
        let d = PyDict::new(py);
        d.set_item("delta_estimate", r.delta_estimate)?;
        let per_n = PyList::empty(py);
        for (n, rep) in &r.per_n {
            per_n.append((n, report_dict(py, rep)?))?;
        }
        d.set_item("per_n", per_n)?;
        Ok(d)
    }

    /// `rho_n` solving `g_n(rho_n) = alpha` on the smooth part of the base.
    #[pyo3(signature = (alpha, smooth_index, tol=1e-8, limit=1_000_000))]
    fn smooth_rho(&self, alpha: f64, smooth_index: usize, tol: f64, limit: u64) -> PyResult<f64> {
        let bound = SmoothBound::new(smooth_index).py()?;
        Ok(ds_core::smooth_rho(self.spec.reciprocal_base(), alpha, bound, tol, limit).py()?.result.rho)
    }

    /// Gram matrix of the diagonal kernel; returns `(matrix, psd, min_pivot)`.
    fn gram(&self, points: Vec<Complex64>, limit: usize) -> PyResult<(Vec<Vec<Complex64>>, bool, f64)> {
        let spec = self.kernel(limit)?;
        let g = ds_core::gram_matrix(&spec, &points, limit).py()?;
        let rows = (0..g.dim).map(|i| (0..g.dim).map(|j| g.entry(i, j)).collect()).collect();
        Ok((rows, g.psd, g.min_pivot))
    }

    /// `sum |b_n|^2 / a_n` with `b` given as a spec.
    fn membership_ratio(&self, b: &str, limit: usize) -> PyResult<f64> {
        let spec = self.kernel(limit)?;
        let b: SeriesSpec = b.parse().py()?;
        Ok(ds_core::membership_ratio(&spec, &b.materialize(limit).py()?, limit).py()?.value.re)
    }
}

#[pyfunction]
fn sieve_primes(limit: u64) -> PyResult<Vec<u64>> {
    Ok(ds_core::sieve_primes(limit).py()?.primes().to_vec())
}

#[pyfunction]
fn first_primes(count: usize) -> PyResult<Vec<u64>> {
    ds_core::first_primes(count).py()
}

#[pyfunction]
fn smooth_numbers(index: usize, limit: u64) -> PyResult<Vec<u64>> {
    ds_core::smooth_numbers(SmoothBound::new(index).py()?, limit).py()
}

#[pyfunction]
fn factorize(n: u64) -> PyResult<Vec<(u64, u32)>> {
    Ok(ds_core::factorize(n).py()?.pairs().to_vec())
}

#[pyfunction]
fn gpf(n: u64) -> PyResult<u64> {
    ds_core::gpf(n).py()
}

#[pyfunction]
fn radical(n: u64) -> PyResult<u64> {
    ds_core::radical(n).py()
}

#[pyfunction]
fn zeta_real(sigma: f64) -> PyResult<f64> {
    ds_core::zeta_real(sigma).py()
}

#[pyfunction]
fn euler_product_zeta_n(index: usize, s: Complex64) -> PyResult<Complex64> {
    ds_core::euler_product_zeta_n(SmoothBound::new(index).py()?, s).py()
}

#[pyfunction]
fn ordered_factorizations(n: u64) -> PyResult<u128> {
    ds_core::ordered_factorizations_bruteforce(n, 2).py()
}

/// Root of `zeta(rho)^m = 2`.
#[pyfunction]
#[pyo3(signature = (m, tol=1e-10))]
fn rho_m(m: u32, tol: f64) -> PyResult<f64> {
    Ok(ds_core::rho_m(m, tol).py()?.rho)
}

/// `[(n, rho_n)]` for the smooth truncations of `base`.
#[pyfunction]
#[pyo3(signature = (base, alpha, n_max, tol=1e-8, limit=10_000_000))]
fn rho_sequence(base: &str, alpha: f64, n_max: usize, tol: f64, limit: u64) -> PyResult<Vec<(usize, f64)>> {
    let base: SeriesSpec = base.parse().py()?;
    let seq = ds_core::rho_sequence(&base, alpha, n_max, tol, limit).py()?;
    Ok(seq.into_iter().map(|r| (r.index, r.result.rho)).collect())
}

/// Runs the acceptance battery; returns `[(id, title, passed, detail)]`.
#[pyfunction]
#[pyo3(signature = (quick=false, seed=DEFAULT_SEED))]
fn verify(py: Python<'_>, quick: bool, seed: u64) -> Vec<(u32, String, bool, String)> {
    py.detach(|| run_battery(VerifyOptions { quick, seed }))
        .into_iter()
        .map(|o| (o.id, o.title, o.passed, o.detail))
        .collect()
}

#[pymodule]
fn dseries(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySeries>()?;
    m.add_function(wrap_pyfunction!(sieve_primes, m)?)?;
    m.add_function(wrap_pyfunction!(first_primes, m)?)?;
    m.add_function(wrap_pyfunction!(smooth_numbers, m)?)?;
    m.add_function(wrap_pyfunction!(factorize, m)?)?;
    m.add_function(wrap_pyfunction!(gpf, m)?)?;
    m.add_function(wrap_pyfunction!(radical, m)?)?;
    m.add_function(wrap_pyfunction!(zeta_real, m)?)?;
    m.add_function(wrap_pyfunction!(euler_product_zeta_n, m)?)?;
    m.add_function(wrap_pyfunction!(ordered_factorizations, m)?)?;
    m.add_function(wrap_pyfunction!(rho_m, m)?)?;
    m.add_function(wrap_pyfunction!(rho_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
