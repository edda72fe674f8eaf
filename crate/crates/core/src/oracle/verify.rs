//! The verification suite behind `mh verify`.

use serde::Serialize;

use crate::error::Result;
use crate::functional::{energy_parametric, kernel_normalization, KernelSpec};
use crate::model::{density, derive_frequencies, exact_energy, ModelParams};
use crate::oracle::{
    brute_force_minimize, density_norm_numeric, hamiltonian_expectation_numeric, kernel_integral_numeric,
    kernel_interaction_numeric, one_matrix_numeric, spectral_kinetic_sum, wavefunction_norm_numeric,
    QuadratureRule, DOUBLING_TOL,
};
use crate::solver::{solve_xi_p, DEFAULT_ROOT_TOL};
use crate::spectral::{occupation_spectrum, one_matrix, ParametricState, DEFAULT_TRUNCATION_TOL};

pub const TOL_NORMALIZATION: f64 = 1e-9;
pub const TOL_HAMILTONIAN: f64 = 1e-8;
pub const TOL_VIRIAL: f64 = 1e-7;
pub const TOL_ONE_MATRIX: f64 = 1e-8;
pub const TOL_INTERACTION: f64 = 1e-7;
/// Interaction tolerance for couplings above 0.4, near the oracle window edge.
pub const TOL_INTERACTION_STRESS: f64 = 1e-6;
pub const TOL_KINETIC: f64 = 1e-10;
pub const TOL_BRUTE_FORCE: f64 = 1e-6;

/// Relative perturbation applied to the closed forms by the mutation switch.
pub const TAMPER_FACTOR: f64 = 1e-5;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub omega0: f64,
    pub lambdas: Vec<f64>,
    pub qs: Vec<f64>,
    pub rule: QuadratureRule,
    pub truncation_tol: f64,
    /// Perturb the closed forms so that the suite must fail (negative control).
    pub tamper: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            omega0: 1.0,
            lambdas: vec![0.1, 0.3],
            qs: vec![0.5, 0.4],
            rule: QuadratureRule::default_rule(),
            truncation_tol: DEFAULT_TRUNCATION_TOL,
            tamper: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: String, measured_error: f64, tolerance: f64) -> Self {
        Self {
            name,
            measured_error,
            tolerance,
            pass: measured_error <= tolerance,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Runs every oracle comparison for each configured coupling.
pub fn run_verification(config: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let rule = &config.rule;
    let tamper = if config.tamper { 1.0 + TAMPER_FACTOR } else { 1.0 };
    let mut max_shift: f64 = 0.0;
    let mut track = |shift: f64| max_shift = max_shift.max(shift);

    for &lambda in &config.lambdas {
        let params = ModelParams::new(config.omega0, lambda)?;
        let f = derive_frequencies(&params)?;
        let tag = |name: &str| format!("{name}[lambda={lambda}]");

        let norm = wavefunction_norm_numeric(&params, rule)?;
        track(norm.doubling_shift);
        checks.push(Check::new(tag("wavefunction_norm"), (norm.value - 1.0).abs(), TOL_NORMALIZATION));

        let dnorm = density_norm_numeric(&params, rule)?;
        track(dnorm.doubling_shift);
        checks.push(Check::new(tag("density_norm"), (dnorm.value - 1.0).abs(), TOL_NORMALIZATION));

        let exact = exact_energy(&params)?;
        let h = hamiltonian_expectation_numeric(&params, rule)?;
        track(h.doubling_shift);
        checks.push(Check::new(
            tag("hamiltonian_expectation"),
            rel(h.total, exact.total * tamper),
            TOL_HAMILTONIAN,
        ));
        checks.push(Check::new(
            tag("virial"),
            (h.kinetic - (h.external + h.interaction)).abs() / h.kinetic,
            TOL_VIRIAL,
        ));

        // one-matrix: integral over the traced coordinate vs. spectral series
        let spectrum = occupation_spectrum(f.xi, config.truncation_tol)?;
        let mut lattice_err: f64 = 0.0;
        for i in 0..7 {
            for j in 0..7 {
                let x = -3.0 + i as f64;
                let xp = -3.0 + j as f64;
                let numeric = one_matrix_numeric(&params, x, xp, rule)?;
                track(numeric.doubling_shift);
                let series = one_matrix(&spectrum, f.omega_bar, 1.0, x, xp) * tamper;
                lattice_err = lattice_err.max((numeric.value - series).abs());
            }
        }
        checks.push(Check::new(tag("one_matrix_lattice"), lattice_err, TOL_ONE_MATRIX));
        let diag = one_matrix_numeric(&params, 0.0, 0.0, rule)?;
        checks.push(Check::new(
            tag("one_matrix_diagonal"),
            (diag.value - density(&params, 0.0)? * tamper).abs(),
            TOL_NORMALIZATION,
        ));

        let tol_int = if lambda > 0.4 { TOL_INTERACTION_STRESS } else { TOL_INTERACTION };
        for &q in &config.qs {
            let spec = KernelSpec::sum_one(q)?;
            for xi_p in [f.xi, 0.05] {
                let state = ParametricState::constrained(f.omega_s, spec.q, spec.r, xi_p)?;
                let numeric = kernel_interaction_numeric(&params, &spec, &state, rule)?;
                track(numeric.doubling_shift);
                let closed = energy_parametric(&params, &spec, xi_p)?.interaction * tamper;
                checks.push(Check::new(
                    format!("kernel_interaction[lambda={lambda},q={q},xi_p={xi_p:.6}]"),
                    rel(numeric.value, closed),
                    tol_int,
                ));
                let integral = kernel_integral_numeric(&params, &spec, &state, rule)?;
                track(integral.doubling_shift);
                let norm = 2.0 - kernel_normalization(&spec, xi_p)? * tamper;
                checks.push(Check::new(
                    format!("kernel_integral[lambda={lambda},q={q},xi_p={xi_p:.6}]"),
                    (integral.value - norm).abs(),
                    TOL_NORMALIZATION,
                ));
            }

            let brute = brute_force_minimize(&params, &spec)?;
            let root = solve_xi_p(&params, q, DEFAULT_ROOT_TOL)?.xi_p * tamper;
            checks.push(Check::new(
                format!("brute_force_minimum[lambda={lambda},q={q}]"),
                (brute.xi_p - root).abs(),
                TOL_BRUTE_FORCE,
            ));
        }

        let equal = KernelSpec::equal_powers(0.6)?;
        let state = ParametricState::constrained(f.omega_s, equal.q, equal.r, f.xi)?;
        let numeric = kernel_interaction_numeric(&params, &equal, &state, rule)?;
        track(numeric.doubling_shift);
        let closed = energy_parametric(&params, &equal, f.xi)?.interaction * tamper;
        checks.push(Check::new(
            tag("equal_powers_interaction[q=r=0.6]"),
            rel(numeric.value, closed),
            tol_int,
        ));

        for xi_p in [0.0, 0.1, 0.3] {
            let state = ParametricState::constrained(f.omega_s, 0.5, 0.5, xi_p)?;
            let sum = spectral_kinetic_sum(&state, rule)?;
            track(sum.doubling_shift);
            let closed = energy_parametric(&params, &KernelSpec::sum_one(0.5)?, xi_p)?.kinetic * tamper;
            checks.push(Check::new(
                format!("spectral_kinetic[lambda={lambda},xi_p={xi_p}]"),
                (sum.value - closed).abs(),
                TOL_KINETIC,
            ));
        }
    }
    checks.push(Check::new("node_doubling".to_string(), max_shift, DOUBLING_TOL));
    Ok(checks)
}
