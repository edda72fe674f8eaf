//! Stationarity of the parametric energy with respect to ξ_p.
//!
//! Setting `∂E_p/∂ξ_p = 0` at fixed density gives
//!
//! ```text
//! ξ_pᵠ / [q(ξ_p^{2q−1} − ξ_p) + (1−q)(1 − ξ_p^{2q})] · ((1+ξ_p)/(1−ξ_p))³ = Λ(ω₀/2ω_s)²
//! ```
//!
//! The left side vanishes at ξ_p → 0 like `ξ_p^{min(q,1−q)}` and diverges at
//! ξ_p → 1, so a bracketing search with bisection finds the root without
//! derivatives. At q = ½ the root is exactly ξ(Λ).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functional::{energy_parametric, KernelSpec};
use crate::info::{dual_coupling, linear_entropy, purity};
use crate::model::{derive_frequencies, exact_energy, ModelParams, LAMBDA_MAX};
use crate::numeric::{linear_fit, logspace};

pub const DEFAULT_ROOT_TOL: f64 = 1e-15;

/// Validated window for the operator power.
pub const Q_MIN: f64 = 0.3;
pub const Q_MAX: f64 = 0.7;

const SCAN_POINTS: usize = 2048;
const SCAN_LO: f64 = 1e-12;
const SCAN_HI: f64 = 1.0 - 1e-9;

/// Crossing search window.
pub const CROSSING_LO: f64 = 0.001;
pub const CROSSING_HI: f64 = LAMBDA_MAX;

/// Coupling window for the small-Λ scaling fit.
pub const SCALING_WINDOW: (f64, f64) = (1e-4, 1e-3);
pub const SCALING_POINTS: usize = 8;

fn check_q(q: f64) -> Result<()> {
    if !(Q_MIN..=Q_MAX).contains(&q) {
        return Err(Error::domain("q", q, "0.3 <= q <= 0.7"));
    }
    Ok(())
}

/// Left side of the stationarity condition for general q.
pub fn stationarity_lhs(q: f64, xi_p: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain("q", q, "0 < q < 1"));
    }
    if !(xi_p > 0.0 && xi_p < 1.0) {
        return Err(Error::domain("xi_p", xi_p, "0 < xi_p < 1"));
    }
    Ok(lhs_unchecked(q, xi_p))
}

#[inline]
fn lhs_unchecked(q: f64, x: f64) -> f64 {
    let ratio = (1.0 + x) / (1.0 - x);
    let denom = q * (x.powf(2.0 * q - 1.0) - x) + (1.0 - q) * (1.0 - x.powf(2.0 * q));
    x.powf(q) / denom * ratio * ratio * ratio
}

/// The q = ½ form `√ξ_p/(1−ξ_p) · ((1+ξ_p)/(1−ξ_p))³`.
pub fn stationarity_lhs_symmetric(xi_p: f64) -> Result<f64> {
    if !(xi_p > 0.0 && xi_p < 1.0) {
        return Err(Error::domain("xi_p", xi_p, "0 < xi_p < 1"));
    }
    let ratio = (1.0 + xi_p) / (1.0 - xi_p);
    Ok(xi_p.sqrt() / (1.0 - xi_p) * ratio.powi(3))
}

/// `Λ(ω₀/2ω_s)²`.
pub fn stationarity_rhs(params: &ModelParams) -> Result<f64> {
    params.check_window()?;
    let f = derive_frequencies(params)?;
    let ratio = params.omega0() / (2.0 * f.omega_s);
    Ok(params.lambda() * ratio * ratio)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaritySolution {
    pub lambda: f64,
    pub q: f64,
    pub xi_p: f64,
    pub rhs: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Root of the stationarity condition for ξ_p ∈ [0, 1).
///
/// A 2048-point log-spaced scan of `(1e−12, 1−1e−9)` must show exactly one
/// sign change of LHS − RHS; the bracket is then bisected until its relative
/// width drops below `tol` (or the endpoints become adjacent doubles). Roots
/// below the scan floor are bracketed by `[0, 1e−12]`.
pub fn solve_xi_p(params: &ModelParams, q: f64, tol: f64) -> Result<StationaritySolution> {
    check_q(q)?;
    if !(1e-15..1.0).contains(&tol) {
        return Err(Error::domain("tol", tol, "1e-15 <= tol < 1"));
    }
    if params.lambda() < 0.0 {
        return Err(Error::domain("lambda", params.lambda(), "0 <= lambda <= 0.4999"));
    }
    let rhs = stationarity_rhs(params)?;
    let lambda = params.lambda();
    if lambda == 0.0 {
        return Ok(StationaritySolution {
            lambda,
            q,
            xi_p: 0.0,
            rhs,
            iterations: 0,
            residual: 0.0,
        });
    }

    let g = |x: f64| lhs_unchecked(q, x) - rhs;
    let grid = logspace(SCAN_LO, SCAN_HI, SCAN_POINTS);
    let signs: Vec<bool> = grid.iter().map(|&x| g(x) > 0.0).collect();
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    let (mut lo, mut hi) = if signs[0] {
        // root below the scan floor; LHS(0) = 0 < RHS
        if changes != 0 {
            return Err(Error::MultipleRoots { lambda, q, count: changes + 1 });
        }
        (0.0, SCAN_LO)
    } else {
        match changes {
            0 => return Err(Error::BracketFailure { lambda, q }),
            1 => {
                let i = signs.iter().position(|&s| s).expect("one sign change");
                (grid[i - 1], grid[i])
            }
            count => return Err(Error::MultipleRoots { lambda, q, count }),
        }
    };

    let mut iterations = 0;
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    let (xi_p, residual) = [lo, hi]
        .into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| (x, g(x).abs()))
        .fold((hi, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best });
    Ok(StationaritySolution {
        lambda,
        q,
        xi_p,
        rhs,
        iterations,
        residual,
    })
}

/// `R(Λ) = ξ_p(q, Λ)/ξ(Λ)`.
pub fn ratio(params: &ModelParams, q: f64) -> Result<f64> {
    let xi = derive_frequencies(params)?.xi;
    let xi_p = solve_xi_p(params, q, DEFAULT_ROOT_TOL)?.xi_p;
    Ok(xi_p / xi)
}

/// One row of a (q, Λ) sweep. Failed points keep their coordinates and carry
/// the error message; numeric fields are then NaN.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub lambda: f64,
    pub q: f64,
    pub xi: f64,
    pub xi_p: f64,
    pub ratio: f64,
    pub e_p: f64,
    pub e_ex: f64,
    pub purity: f64,
    pub linear_entropy: f64,
    /// Linear entropy at the exact ξ(Λ), the partner of `dual_linear_entropy`.
    pub exact_linear_entropy: f64,
    pub dual_lambda: f64,
    pub dual_linear_entropy: f64,
    pub error: Option<String>,
}

impl SweepRecord {
    fn failed(lambda: f64, q: f64, err: &Error) -> Self {
        Self {
            lambda,
            q,
            xi: f64::NAN,
            xi_p: f64::NAN,
            ratio: f64::NAN,
            e_p: f64::NAN,
            e_ex: f64::NAN,
            purity: f64::NAN,
            linear_entropy: f64::NAN,
            exact_linear_entropy: f64::NAN,
            dual_lambda: f64::NAN,
            dual_linear_entropy: f64::NAN,
            error: Some(err.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

fn sweep_point(base: &ModelParams, q: f64, lambda: f64, tol: f64) -> Result<SweepRecord> {
    let params = base.with_lambda(lambda)?;
    let f = derive_frequencies(&params)?;
    let sol = solve_xi_p(&params, q, tol)?;
    let spec = KernelSpec::sum_one(q)?;
    let e_p = energy_parametric(&params, &spec, sol.xi_p)?.total;
    let e_ex = exact_energy(&params)?.total;
    let ratio = if f.xi > 0.0 { sol.xi_p / f.xi } else { f64::NAN };
    let (dual_lambda, dual_linear_entropy) = if lambda > 0.0 {
        let d = dual_coupling(lambda)?;
        let xi_d = derive_frequencies(&params.with_lambda(d)?)?.xi;
        (d, linear_entropy(xi_d)?)
    } else {
        (0.0, 0.0)
    };
    Ok(SweepRecord {
        lambda,
        q,
        xi: f.xi,
        xi_p: sol.xi_p,
        ratio,
        e_p,
        e_ex,
        purity: purity(sol.xi_p)?,
        linear_entropy: linear_entropy(sol.xi_p)?,
        exact_linear_entropy: linear_entropy(f.xi)?,
        dual_lambda,
        dual_linear_entropy,
        error: None,
    })
}

/// Evaluates every (q, Λ) pair, q-major and Λ-minor.
///
/// Points are computed in parallel on the current rayon pool; the output order
/// depends only on the inputs.
pub fn sweep(base: &ModelParams, q_list: &[f64], lambda_grid: &[f64], tol: f64) -> Vec<SweepRecord> {
    let points: Vec<(f64, f64)> = q_list
        .iter()
        .flat_map(|&q| lambda_grid.iter().map(move |&l| (q, l)))
        .collect();
    points
        .par_iter()
        .map(|&(q, lambda)| {
            sweep_point(base, q, lambda, tol).unwrap_or_else(|e| SweepRecord::failed(lambda, q, &e))
        })
        .collect()
}

/// Bisection on a scalar function with a sign change on `[lo, hi]`.
pub(crate) fn bisect_sign_change<F>(mut g: F, mut lo: f64, mut hi: f64, target: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut g_lo = g(lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid)?;
        if g_mid.abs() <= target {
            return Ok(mid);
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Coupling Λ₀ where `R(Λ₀) = 1`, by bisection on `R − 1` over `(0.001, 0.4999)`.
pub fn find_crossing(base: &ModelParams, q: f64) -> Result<f64> {
    check_q(q)?;
    let (lo, hi) = (CROSSING_LO, CROSSING_HI);
    let no_crossing = Error::NoCrossing { q, lo, hi };
    if (q - 0.5).abs() < 1e-12 {
        return Err(no_crossing);
    }
    let g = |lambda: f64| -> Result<f64> { Ok(ratio(&base.with_lambda(lambda)?, q)? - 1.0) };
    let (g_lo, g_hi) = (g(lo)?, g(hi)?);
    if (g_lo > 0.0) == (g_hi > 0.0) {
        return Err(no_crossing);
    }
    bisect_sign_change(g, lo, hi, 1e-13)
}

/// Least-squares slope of `ln ξ_p` against `ln Λ` over 8 log-spaced couplings
/// in `[1e−4, 1e−3]`; tends to `2/(1 + 2|q − ½|)`.
pub fn scaling_exponent(base: &ModelParams, q: f64) -> Result<f64> {
    check_q(q)?;
    let lambdas = logspace(SCALING_WINDOW.0, SCALING_WINDOW.1, SCALING_POINTS);
    let mut ln_l = Vec::with_capacity(lambdas.len());
    let mut ln_xi = Vec::with_capacity(lambdas.len());
    for &lambda in &lambdas {
        let sol = solve_xi_p(&base.with_lambda(lambda)?, q, DEFAULT_ROOT_TOL)?;
        ln_l.push(lambda.ln());
        ln_xi.push(sol.xi_p.ln());
    }
    Ok(linear_fit(&ln_l, &ln_xi).0)
}
