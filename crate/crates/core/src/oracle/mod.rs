//! Brute-force verification engine.
//!
//! Every closed form in the crate is re-derived here by numerical integration
//! of the wave function or of the kernels. Code paths are kept separate from
//! the modules under test: Hermite functions come from the raw polynomial
//! recurrence with log-factorial normalization (not the normalized recurrence
//! in [`crate::spectral`]), and all sums use compensated accumulation.
//!
//! Each integral is evaluated with the given rule and with the rule refined to
//! twice the node count; the reported value is the refined one and the
//! difference is returned as `doubling_shift`.

pub mod quadrature;
pub mod verify;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functional::{energy_parametric, KernelSpec};
use crate::model::{derive_frequencies, wavefunction_from, ModelParams};
use crate::numeric::golden_section;
use crate::spectral::ParametricState;
use crate::summation::{compensated_sum, NeumaierSum};

pub use quadrature::{QuadratureRule, RuleKind};

/// Largest coupling for which the default rules are trusted.
pub const ORACLE_LAMBDA_MAX: f64 = 0.45;

/// Node-doubling shifts above this are flagged as unconverged.
pub const DOUBLING_TOL: f64 = 1e-9;

/// Highest Hermite order the raw-polynomial evaluation supports.
const MAX_ORACLE_ORDER: usize = 160;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleEstimate {
    pub value: f64,
    /// |value(2n nodes) − value(n nodes)|.
    pub doubling_shift: f64,
}

impl OracleEstimate {
    fn from_pair(coarse: f64, fine: f64) -> Self {
        Self {
            value: fine,
            doubling_shift: (fine - coarse).abs(),
        }
    }

    pub fn converged(&self) -> bool {
        self.doubling_shift <= DOUBLING_TOL
    }
}

fn check_oracle_window(params: &ModelParams) -> Result<()> {
    if params.lambda() > ORACLE_LAMBDA_MAX {
        return Err(Error::domain("lambda", params.lambda(), "lambda <= 0.45 for the quadrature oracle"));
    }
    Ok(())
}

fn with_refinement<F: Fn(&QuadratureRule) -> Result<f64>>(rule: &QuadratureRule, eval: F) -> Result<OracleEstimate> {
    let coarse = eval(rule)?;
    let fine = eval(&rule.refined())?;
    Ok(OracleEstimate::from_pair(coarse, fine))
}

/// `∫∫ψ² dx₁dx₂`.
pub fn wavefunction_norm_numeric(params: &ModelParams, rule: &QuadratureRule) -> Result<OracleEstimate> {
    check_oracle_window(params)?;
    let f = derive_frequencies(params)?;
    let s = 1.0 / f.omega1.min(f.omega2).sqrt();
    with_refinement(rule, |r| {
        Ok(r.scaled(s).integrate_2d(|a, b| wavefunction_from(&f, a, b).powi(2)))
    })
}

/// `∫ n₁(x) dx` where n₁ is the diagonal of the numerically integrated one-matrix.
pub fn density_norm_numeric(params: &ModelParams, rule: &QuadratureRule) -> Result<OracleEstimate> {
    check_oracle_window(params)?;
    let f = derive_frequencies(params)?;
    let s = 1.0 / f.omega1.min(f.omega2).sqrt();
    with_refinement(rule, |r| {
        let inner = r.clone();
        Ok(r.scaled(s).integrate(|x| reduced_one_matrix(&f, &inner, x, x)))
    })
}

fn reduced_one_matrix(f: &crate::model::DerivedFrequencies, rule: &QuadratureRule, x: f64, x_prime: f64) -> f64 {
    // integrand in the traced variable is a Gaussian of width 2/(ω₁+ω₂)
    let s = (2.0 / (f.omega1 + f.omega2)).sqrt();
    rule.scaled(s)
        .integrate(|y| wavefunction_from(f, x, y) * wavefunction_from(f, x_prime, y))
}

/// `γ(x, x′) = ∫ψ(x, y)ψ(x′, y) dy`.
pub fn one_matrix_numeric(params: &ModelParams, x: f64, x_prime: f64, rule: &QuadratureRule) -> Result<OracleEstimate> {
    check_oracle_window(params)?;
    let f = derive_frequencies(params)?;
    with_refinement(rule, |r| Ok(reduced_one_matrix(&f, r, x, x_prime)))
}

/// Expectation values of the Hamiltonian terms in the exact ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HamiltonianEstimate {
    pub kinetic: f64,
    pub external: f64,
    pub interaction: f64,
    pub total: f64,
    pub doubling_shift: f64,
}

/// `⟨ψ|Ĥ|ψ⟩` by 2-D quadrature. The Laplacian is applied analytically to the
/// Gaussian exponent `S = −a(x₁²+x₂²) − b·x₁x₂`: `∇²ψ/ψ = |∇S|² − 4a`.
pub fn hamiltonian_expectation_numeric(params: &ModelParams, rule: &QuadratureRule) -> Result<HamiltonianEstimate> {
    check_oracle_window(params)?;
    let f = derive_frequencies(params)?;
    let a = 0.25 * (f.omega1 + f.omega2);
    let b = 0.5 * (f.omega1 - f.omega2);
    let w0sq = params.omega0() * params.omega0();
    let lambda = params.lambda();
    let s = 1.0 / f.omega1.min(f.omega2).sqrt();
    let terms = |r: &QuadratureRule| -> [f64; 3] {
        let r = r.scaled(s);
        let mut acc = [NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new()];
        for (&x1, &w1) in r.nodes.iter().zip(&r.weights) {
            for (&x2, &w2) in r.nodes.iter().zip(&r.weights) {
                let rho = w1 * w2 * wavefunction_from(&f, x1, x2).powi(2);
                let s1 = -2.0 * a * x1 - b * x2;
                let s2 = -2.0 * a * x2 - b * x1;
                let laplacian = s1 * s1 + s2 * s2 - 4.0 * a;
                acc[0].add(-0.5 * laplacian * rho);
                acc[1].add(0.5 * w0sq * (x1 * x1 + x2 * x2) * rho);
                acc[2].add(-0.5 * lambda * w0sq * (x1 - x2).powi(2) * rho);
            }
        }
        [acc[0].value(), acc[1].value(), acc[2].value()]
    };
    let coarse = terms(rule);
    let fine = terms(&rule.refined());
    let shift = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (c - f).abs())
        .fold(0.0, f64::max);
    Ok(HamiltonianEstimate {
        kinetic: fine[0],
        external: fine[1],
        interaction: fine[2],
        total: compensated_sum(fine),
        doubling_shift: shift,
    })
}

/// Values `φ_0..φ_{count−1}` at `x`, from the physicists' polynomials
/// `H_{n+1} = 2yH_n − 2nH_{n−1}` divided by `√(2ⁿn!)` in log space.
pub fn oscillator_functions(count: usize, omega: f64, x: f64) -> Result<Vec<f64>> {
    if count > MAX_ORACLE_ORDER {
        return Err(Error::Truncation {
            needed: count,
            limit: MAX_ORACLE_ORDER,
        });
    }
    let y = omega.sqrt() * x;
    let log_prefactor = 0.25 * (omega / std::f64::consts::PI).ln() - 0.5 * y * y;
    let mut out = Vec::with_capacity(count);
    let (mut h_prev, mut h) = (0.0f64, 1.0f64);
    let mut log_norm = 0.0; // ½ ln(2ⁿ n!)
    for n in 0..count {
        if n > 0 {
            log_norm += 0.5 * (2.0 * n as f64).ln();
        }
        let value = if h == 0.0 {
            0.0
        } else {
            h.signum() * (h.abs().ln() + log_prefactor - log_norm).exp()
        };
        out.push(value);
        let next = 2.0 * y * h - 2.0 * n as f64 * h_prev;
        h_prev = h;
        h = next;
    }
    Ok(out)
}

/// Oracle-side occupations `((1−ξ)ξⁿ)^power`, cut once they drop below 1e−17.
fn oracle_weights(xi: f64, power: f64) -> Vec<f64> {
    let lead = (1.0 - xi).powf(power);
    if xi == 0.0 {
        return vec![lead];
    }
    let mut out = Vec::new();
    let mut n = 0i32;
    loop {
        let w = lead * xi.powf(power * n as f64);
        if w < 1e-17 * lead || out.len() > MAX_ORACLE_ORDER {
            break;
        }
        out.push(w);
        n += 1;
    }
    out
}

fn powered_one_matrix_grid(weights: &[f64], table: &[Vec<f64>]) -> Vec<f64> {
    let m = table.len();
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            let v = weights
                .iter()
                .zip(table[i].iter().zip(&table[j]))
                .map(|(w, (a, b))| w * a * b)
                .collect::<NeumaierSum>()
                .value();
            out[i * m + j] = v;
            out[j * m + i] = v;
        }
    }
    out
}

/// Integrates `K_p(x₁,x₂)·g(x₁,x₂)` with the pair part on a grid matched to
/// ω_s and the γᵠγʳ part on a grid matched to ω_p.
fn kernel_moment<G: Fn(f64, f64) -> f64>(
    params: &ModelParams,
    spec: &KernelSpec,
    state: &ParametricState,
    rule: &QuadratureRule,
    g: G,
) -> Result<f64> {
    let f = derive_frequencies(params)?;
    let n1 = |x: f64| (f.omega_s / std::f64::consts::PI).sqrt() * (-f.omega_s * x * x).exp();
    let pair = rule
        .scaled(1.0 / f.omega_s.sqrt())
        .integrate_2d(|a, b| 2.0 * n1(a) * n1(b) * g(a, b));

    let wq = oracle_weights(state.xi_p, spec.q);
    let wr = oracle_weights(state.xi_p, spec.r);
    let count = wq.len().max(wr.len());
    let grid = rule.scaled(1.0 / state.omega_p.sqrt());
    let table = grid
        .nodes
        .iter()
        .map(|&x| oscillator_functions(count, state.omega_p, x))
        .collect::<Result<Vec<_>>>()?;
    let gq = powered_one_matrix_grid(&wq, &table);
    let gr = powered_one_matrix_grid(&wr, &table);
    let m = grid.len();
    let mut acc = NeumaierSum::new();
    for i in 0..m {
        for j in 0..m {
            let (a, b) = (grid.nodes[i], grid.nodes[j]);
            acc.add(grid.weights[i] * grid.weights[j] * gq[i * m + j] * gr[i * m + j] * g(a, b));
        }
    }
    Ok(pair - acc.value())
}

/// `∫∫ K_p(x₁,x₂)·(−½Λω₀²(x₁−x₂)²) dx₁dx₂`.
pub fn kernel_interaction_numeric(
    params: &ModelParams,
    spec: &KernelSpec,
    state: &ParametricState,
    rule: &QuadratureRule,
) -> Result<OracleEstimate> {
    check_oracle_window(params)?;
    let c = -0.5 * params.lambda() * params.omega0() * params.omega0();
    with_refinement(rule, |r| {
        kernel_moment(params, spec, state, r, |a, b| c * (a - b) * (a - b))
    })
}

/// `∫∫ K_p(x₁,x₂) dx₁dx₂`, which should equal `2 − Σ P_nᵠP_nʳ`.
pub fn kernel_integral_numeric(
    params: &ModelParams,
    spec: &KernelSpec,
    state: &ParametricState,
    rule: &QuadratureRule,
) -> Result<OracleEstimate> {
    check_oracle_window(params)?;
    with_refinement(rule, |r| kernel_moment(params, spec, state, r, |_, _| 1.0))
}

/// Two-particle kinetic energy `2·Σ_n P_n⟨φ_n|−½d²/dx²|φ_n⟩` of the parametric
/// one-matrix (trace normalized to one, two particles).
///
/// Each matrix element is obtained from the oscillator equation
/// `−½φ_n'' = ½ω((2n+1) − y²)φ_n` with `⟨y²⟩` integrated numerically.
pub fn spectral_kinetic_sum(state: &ParametricState, rule: &QuadratureRule) -> Result<OracleEstimate> {
    let weights = oracle_weights(state.xi_p, 1.0);
    let omega = state.omega_p;
    with_refinement(rule, |r| {
        let grid = r.scaled(1.0 / omega.sqrt());
        let table = grid
            .nodes
            .iter()
            .map(|&x| oscillator_functions(weights.len(), omega, x))
            .collect::<Result<Vec<_>>>()?;
        let mut total = NeumaierSum::new();
        for (n, w) in weights.iter().enumerate() {
            let y2 = grid
                .nodes
                .iter()
                .zip(&grid.weights)
                .zip(&table)
                .map(|((&x, &wt), row)| wt * omega * x * x * row[n] * row[n])
                .collect::<NeumaierSum>()
                .value();
            let t_n = 0.5 * omega * ((2 * n + 1) as f64 - y2);
            total.add(2.0 * w * t_n);
        }
        Ok(total.value())
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BruteForceMinimum {
    pub xi_p: f64,
    pub energy: f64,
}

pub const BRUTE_FORCE_SCAN: usize = 4096;
pub const BRUTE_FORCE_XI_MAX: f64 = 0.999;

/// Direct minimization of `E_p` over ξ_p ∈ [0, 0.999]: a 4096-point scan
/// followed by golden-section refinement around the best grid point.
pub fn brute_force_minimize(params: &ModelParams, spec: &KernelSpec) -> Result<BruteForceMinimum> {
    let energy = |x: f64| energy_parametric(params, spec, x).map(|e| e.total);
    let h = BRUTE_FORCE_XI_MAX / (BRUTE_FORCE_SCAN - 1) as f64;
    let mut best = (0usize, energy(0.0)?);
    for i in 1..BRUTE_FORCE_SCAN {
        let e = energy(h * i as f64)?;
        if e < best.1 {
            best = (i, e);
        }
    }
    let lo = h * best.0.saturating_sub(1) as f64;
    let hi = (h * (best.0 + 1) as f64).min(BRUTE_FORCE_XI_MAX);
    let (xi_p, e) = golden_section(|x| energy(x).unwrap_or(f64::INFINITY), lo, hi, 1e-13);
    if e <= best.1 {
        Ok(BruteForceMinimum { xi_p, energy: e })
    } else {
        Ok(BruteForceMinimum {
            xi_p: h * best.0 as f64,
            energy: best.1,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::hermite_orbital;

    #[test]
    fn oracle_orbitals_match_normalized_recurrence() {
        for &omega in &[0.5, 1.0, 2.3] {
            for &x in &[-4.0, -0.3, 0.0, 1.7, 6.0] {
                let table = oscillator_functions(120, omega, x).unwrap();
                for (n, v) in table.iter().enumerate() {
                    let r = hermite_orbital(n, omega, x);
                    assert!((v - r).abs() <= 1e-11 * (1.0 + r.abs()), "n={n} x={x}");
                }
            }
        }
        assert!(oscillator_functions(MAX_ORACLE_ORDER + 1, 1.0, 0.0).is_err());
    }

    #[test]
    fn oracle_weights_cut() {
        assert_eq!(oracle_weights(0.0, 0.5), vec![1.0]);
        let w = oracle_weights(0.3, 0.5);
        assert!(w.last().unwrap() / w[0] >= 1e-17);
        let sum: f64 = oracle_weights(0.3, 1.0).iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn window_is_enforced() {
        let params = ModelParams::new(1.0, 0.46).unwrap();
        assert!(one_matrix_numeric(&params, 0.0, 0.0, &QuadratureRule::default_rule()).is_err());
    }
}
