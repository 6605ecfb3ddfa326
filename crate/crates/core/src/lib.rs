//! Dirichlet series with multiplicative structure: prime tools, coefficient
//! arithmetic, the two constructions with controlled abscissas, Kalmár-type
//! reciprocals, abscissa estimators and the associated positive kernels.
//!
//! Coefficients are indexed from 1 at the public surface. Exact payloads use
//! checked `i128` arithmetic; real payloads use `f64` with compensated sums.

pub mod abscissa;
pub mod complex_json;
pub mod constructions;
pub mod error;
pub mod kernel;
pub mod primes;
pub mod series;
pub mod series_spec;
pub mod sum;
pub mod support;
pub mod verify;
pub mod zeta;

pub use abscissa::{
    convergence_table, estimate_delta_a, estimate_delta_a_series, estimate_sigma_a, estimate_sigma_a_smooth,
    estimate_sigma_a_smooth_series, AbscissaReport, ConvergenceTable, DeltaReport, Method,
};
pub use constructions::{
    construction_i_coeffs, construction_ii_coeffs, find_rho, g_coeffs, g_truncated_eval, kalmar_dm_coeffs,
    ordered_factorizations_bruteforce, rho_m, rho_sequence, smooth_rho, RhoResult, SmoothRho,
};
pub use error::{DsError, Result};
pub use kernel::{gram_matrix, halfplane_constants, kappa, membership_ratio, GramResult, HalfPlanes, KernelSpec};
pub use primes::{factorize, first_primes, gpf, radical, sieve_primes, smooth_numbers, PrimeTable, SmoothBound};
pub use series::{
    dirichlet_convolve, euler_product_construction_ii, euler_product_zeta_n, evaluate, evaluate_smooth,
    multiplicative_extend, ones, power_shift, reciprocal_coeffs, unit, CoefficientSequence, Envelope, EvalResult,
    Payload, PayloadKind,
};
pub use series_spec::SeriesSpec;
pub use zeta::zeta_real;
