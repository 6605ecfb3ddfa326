use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use ds_core::complex_json::ReIm;
use ds_core::verify::{run_battery, VerifyOptions, DEFAULT_SEED};
use ds_core::{
    estimate_delta_a, estimate_delta_a_series, estimate_sigma_a, estimate_sigma_a_smooth_series, evaluate,
    evaluate_smooth, find_rho, first_primes, gram_matrix, halfplane_constants, membership_ratio, rho_m,
    smooth_numbers, smooth_rho, DsError, KernelSpec, Payload, RhoResult, SeriesSpec, SmoothBound,
};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

mod output;

use output::{csv_value, Emit};

const DEFAULT_CHECKPOINTS: usize = ds_core::abscissa::DEFAULT_CHECKPOINTS;

#[derive(Parser)]
#[command(name = "ds", version, about = "Dirichlet series abscissa experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// First K primes.
    Primes {
        #[arg(long)]
        count: usize,
    },
    /// p_n-smooth numbers up to a limit.
    Smooth {
        #[arg(long)]
        index: usize,
        #[arg(long)]
        limit: u64,
    },
    /// Coefficients a_1..a_N of a series.
    Coeffs {
        #[arg(long)]
        series: String,
        #[arg(long)]
        limit: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Partial sum of the series at s, with a tail bound when available.
    Eval {
        #[arg(long)]
        series: String,
        /// RE or RE,IM
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long)]
        limit: usize,
        #[arg(long)]
        smooth_index: Option<usize>,
    },
    /// Slope estimate of the abscissa of absolute convergence.
    Abscissa {
        #[arg(long)]
        series: String,
        #[arg(long)]
        limit: u64,
        #[arg(long, default_value_t = DEFAULT_CHECKPOINTS)]
        checkpoints: usize,
        /// Restrict to the p_n-smooth subseries (limit may go up to 1e18).
        #[arg(long)]
        smooth_index: Option<usize>,
    },
    /// Smooth-subseries estimates for n = 1..K and their maximum.
    Delta {
        #[arg(long)]
        series: String,
        #[arg(long)]
        max_index: usize,
        #[arg(long)]
        limit: u64,
        #[arg(long, default_value_t = DEFAULT_CHECKPOINTS)]
        checkpoints: usize,
    },
    /// Root of g(rho) = alpha for the base g of a reciprocal series.
    Rho {
        #[arg(long)]
        series: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        tol: f64,
        #[arg(long)]
        smooth_index: Option<usize>,
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Root of zeta(rho)^m = 2.
    Rhom {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        tol: f64,
    },
    /// Kernel Gram matrices and membership ratios.
    Kernel {
        #[command(subcommand)]
        command: KernelCommand,
    },
    /// Run the acceptance battery.
    Verify {
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Print the outcomes as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum KernelCommand {
    /// Gram matrix on points read from a JSON array of {re, im}.
    Gram {
        #[arg(long)]
        series: String,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        limit: usize,
    },
    /// Membership ratio sum |b_n|^2 / a_n.
    Member {
        #[arg(long)]
        series: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        limit: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_series(text: &str) -> anyhow::Result<SeriesSpec> {
    Ok(text.parse::<SeriesSpec>()?)
}

fn parse_point(text: &str) -> anyhow::Result<Complex64> {
    let bad = || DsError::Parse { position: 0, message: format!("expected RE or RE,IM, got '{text}'") };
    let mut parts = text.split(',');
    let re: f64 = parts.next().and_then(|p| p.trim().parse().ok()).ok_or_else(bad)?;
    let im: f64 = match parts.next() {
        Some(p) => p.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(bad().into());
    }
    Ok(Complex64::new(re, im))
}

fn smooth_bound(index: usize) -> anyhow::Result<SmoothBound> {
    Ok(SmoothBound::new(index)?)
}

#[derive(Serialize)]
struct RhoReport {
    series: String,
    alpha: f64,
    tol: f64,
    method: &'static str,
    #[serde(flatten)]
    result: RhoResult,
}

/// Solves `g(rho) = alpha` for the full base series, using the closed form
/// when one exists and dense partial sums otherwise.
fn rho_full(spec: &SeriesSpec, alpha: f64, tol: f64, limit: Option<u64>) -> anyhow::Result<RhoReport> {
    let base = spec.reciprocal_base();
    let unit = base.materialize(1)?.get(1);
    let domain = base
        .known_abscissa()
        .or_else(|| base.envelope().map(|e| e.exponent + 1.0))
        .unwrap_or(1.0);
    let (method, result) = if base.eval_real(domain + 1.0).is_some() {
        let g = |s: f64| base.eval_real(s).map_or(f64::INFINITY, |v| v - unit);
        ("closed-form", find_rho(g, alpha, tol, domain)?)
    } else {
        let n = usize::try_from(limit.unwrap_or(1_000_000)).context("limit does not fit in memory")?;
        let coeffs = base.materialize(n)?.without_unit();
        let terms: Vec<(f64, f64)> = (2..=n)
            .map(|j| ((j as f64).ln(), coeffs.get(j)))
            .filter(|&(_, b)| b != 0.0)
            .collect();
        let g = |s: f64| terms.iter().map(|&(l, b)| b * (-s * l).exp()).sum::<f64>();
        ("partial-sum", find_rho(g, alpha, tol, domain)?)
    };
    Ok(RhoReport { series: spec.to_string(), alpha, tol, method, result })
}

/// Kernel parameters for a series: closed-form abscissa when known, the
/// slope estimates otherwise.
fn kernel_spec(spec: &SeriesSpec, n: usize) -> anyhow::Result<KernelSpec> {
    let coeffs = spec.materialize(n)?;
    let sigma = match spec.known_abscissa() {
        Some(s) => s,
        None => estimate_sigma_a(&coeffs, n, DEFAULT_CHECKPOINTS)?.estimate,
    };
    let delta = estimate_delta_a(&coeffs, 3, n, DEFAULT_CHECKPOINTS)?.delta_estimate;
    Ok(KernelSpec::new(coeffs, sigma, delta)?)
}

fn run(cli: Cli, out: &mut Emit) -> anyhow::Result<bool> {
    match cli.command {
        Command::Primes { count } => {
            let primes = first_primes(count)?;
            out.json(&json!({ "count": count, "primes": primes }))?;
        }
        Command::Smooth { index, limit } => {
            let bound = smooth_bound(index)?;
            let numbers = smooth_numbers(bound, limit)?;
            out.json(&json!({
                "index": index,
                "prime": bound.cutoff(),
                "limit": limit,
                "count": numbers.len(),
                "numbers": numbers,
            }))?;
        }
        Command::Coeffs { series, limit, format } => {
            let spec = parse_series(&series)?;
            let seq = spec.materialize(limit)?;
            match format {
                Format::Json => out.json(&json!({
                    "series": spec.to_string(),
                    "kind": seq.kind(),
                    "limit": limit,
                    "values": match seq.payload() {
                        Payload::Exact(v) => json!(v),
                        Payload::Real(v) => json!(v),
                    },
                }))?,
                Format::Csv => {
                    let mut text = String::from("n,value\n");
                    match seq.payload() {
                        Payload::Exact(v) => v.iter().enumerate().for_each(|(i, x)| {
                            text.push_str(&format!("{},{x}\n", i + 1));
                        }),
                        Payload::Real(v) => v.iter().enumerate().for_each(|(i, &x)| {
                            text.push_str(&format!("{},{}\n", i + 1, csv_value(x)));
                        }),
                    }
                    out.raw(&text)?;
                }
            }
        }
        Command::Eval { series, s, limit, smooth_index } => {
            let spec = parse_series(&series)?;
            let s = parse_point(&s)?;
            let seq = spec.materialize(limit)?;
            let result = match smooth_index {
                Some(i) => evaluate_smooth(&seq, s, smooth_bound(i)?, limit)?,
                None => evaluate(&seq, s, limit, true)?,
            };
            out.json(&json!({
                "series": spec.to_string(),
                "s": ReIm::from(s),
                "limit": limit,
                "smooth_index": smooth_index,
                "value": ReIm::from(result.value),
                "terms_used": result.terms_used,
                "tail_bound": result.tail_bound,
            }))?;
        }
        Command::Abscissa { series, limit, checkpoints, smooth_index } => {
            let spec = parse_series(&series)?;
            let report = match smooth_index {
                Some(i) => estimate_sigma_a_smooth_series(&spec, smooth_bound(i)?, limit, checkpoints)?,
                None => {
                    let n = usize::try_from(limit).context("limit does not fit in memory")?;
                    estimate_sigma_a(&spec.materialize(n)?, n, checkpoints)?
                }
            };
            out.json(&json!({
                "series": spec.to_string(),
                "limit": limit,
                "smooth_index": smooth_index,
                "report": report,
            }))?;
        }
        Command::Delta { series, max_index, limit, checkpoints } => {
            let spec = parse_series(&series)?;
            let report = estimate_delta_a_series(&spec, max_index, limit, checkpoints)?;
            out.json(&json!({ "series": spec.to_string(), "limit": limit, "report": report }))?;
        }
        Command::Rho { series, alpha, tol, smooth_index, limit } => {
            let spec = parse_series(&series)?;
            match smooth_index {
                Some(i) => {
                    let r = smooth_rho(spec.reciprocal_base(), alpha, smooth_bound(i)?, tol, limit.unwrap_or(1_000_000))?;
                    out.json(&json!({ "series": spec.to_string(), "alpha": alpha, "tol": tol, "smooth": r }))?;
                }
                None => out.json(&rho_full(&spec, alpha, tol, limit)?)?,
            }
        }
        Command::Rhom { m, tol } => {
            let r = rho_m(m, tol)?;
            out.json(&json!({ "m": m, "tol": tol, "result": r }))?;
        }
        Command::Kernel { command: KernelCommand::Gram { series, points, limit } } => {
            let spec = parse_series(&series)?;
            let text = std::fs::read_to_string(&points)
                .with_context(|| format!("reading points file {}", points.display()))?;
            let pts: Vec<ReIm> = serde_json::from_str(&text).map_err(|e| DsError::Parse {
                position: e.column(),
                message: format!("points file: {e}"),
            })?;
            let pts: Vec<Complex64> = pts.into_iter().map(Complex64::from).collect();
            let kernel = kernel_spec(&spec, limit)?;
            let gram = gram_matrix(&kernel, &pts, limit)?;
            out.json(&json!({
                "series": spec.to_string(),
                "limit": limit,
                "sigma_a_estimate": kernel.sigma_a_estimate(),
                "delta_a_estimate": kernel.delta_a_estimate(),
                "halfplanes": halfplane_constants(&kernel),
                "gram": gram,
            }))?;
        }
        Command::Kernel { command: KernelCommand::Member { series, b, limit } } => {
            let spec = parse_series(&series)?;
            let b_spec = parse_series(&b)?;
            let kernel = kernel_spec(&spec, limit)?;
            let ratio = membership_ratio(&kernel, &b_spec.materialize(limit)?, limit)?;
            out.json(&json!({
                "series": spec.to_string(),
                "b": b_spec.to_string(),
                "limit": limit,
                "ratio": ratio.value.re,
                "terms_used": ratio.terms_used,
            }))?;
        }
        Command::Verify { quick, seed, json } => {
            let outcomes = run_battery(VerifyOptions { quick, seed });
            let all = outcomes.iter().all(|o| o.passed);
            if json {
                out.json(&outcomes)?;
            } else {
                let mut text = String::new();
                for o in &outcomes {
                    text.push_str(&o.line());
                    text.push('\n');
                }
                let passed = outcomes.iter().filter(|o| o.passed).count();
                text.push_str(&format!("{passed}/{} checks passed\n", outcomes.len()));
                out.raw(&text)?;
            }
            return Ok(all);
        }
    }
    Ok(true)
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("DS_THREADS") {
        let n: usize = v.parse().map_err(|_| anyhow!("DS_THREADS must be a positive integer, got '{v}'"))?;
        if n == 0 {
            bail!("DS_THREADS must be a positive integer, got '{v}'");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn report_error(code: &str, message: &str) {
    let line = json!({ "code": code, "message": message });
    let _ = writeln!(std::io::stderr(), "{line}");
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string().split_whitespace().collect::<Vec<_>>().join(" ");
            report_error("usage", &message);
            return ExitCode::from(2);
        }
    };
    if let Err(e) = configure_threads() {
        report_error("invalid-argument", &e.to_string());
        return ExitCode::from(1);
    }
    let mut out = Emit::stdout();
    match run(cli, &mut out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let (code, exit) = match e.downcast_ref::<DsError>() {
                Some(d @ DsError::Parse { .. }) => (d.code(), 2),
                Some(d) => (d.code(), 1),
                None => ("io", 1),
            };
            report_error(code, &format!("{e:#}"));
            ExitCode::from(exit)
        }
    }
}
