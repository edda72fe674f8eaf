//! Müller-type pair-density kernels and the parametric energy.
//!
//! The exact pair density is replaced by
//! `K_p(x₁,x₂) = 2n₁(x₁)n₁(x₂) − γ_pᵠ(x₁,x₂)·γ_pʳ(x₁,x₂)`. With the density held
//! at its exact value, only the kinetic and interaction terms depend on ξ_p:
//!
//! ```text
//! E_p = ω_s/2·((1+ξ_p)/(1−ξ_p))² + ω₀²/(2ω_s) − Λω₀²/(2ω_s)·B(ξ_p)
//! ```
//!
//! where `B` is the interaction bracket of the chosen kernel family. At
//! `ξ_p = ξ(Λ)` this is also the fixed-ξ energy `E_{q,r}`, so no separate
//! routine exists for it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{derive_frequencies, gaussian_density, EnergyBreakdown, ModelParams};
use crate::spectral::{occupation_spectrum, one_matrix_with_weights, pow0, ParametricState, DEFAULT_TRUNCATION_TOL};

/// ξ_p at or above this value is rejected instead of returning an infinite energy.
pub const XI_P_MAX: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    /// q + r = 1: the kernel integrates to one particle pair.
    SumOne,
    /// q = r; violates the pair normalization unless q = ½.
    EqualPowers,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSpec {
    pub q: f64,
    pub r: f64,
    pub family: KernelFamily,
}

impl KernelSpec {
    pub fn sum_one(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain("q", q, "0 < q < 1"));
        }
        Ok(Self {
            q,
            r: 1.0 - q,
            family: KernelFamily::SumOne,
        })
    }

    /// Equal operator powers; values around 0.525–0.65 are the usual choice.
    pub fn equal_powers(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain("q", q, "0 < q < 1"));
        }
        Ok(Self {
            q,
            r: q,
            family: KernelFamily::EqualPowers,
        })
    }

    /// Interaction bracket for this family.
    pub fn bracket(&self, xi: f64) -> f64 {
        match self.family {
            KernelFamily::SumOne => interaction_bracket(self.q, xi),
            KernelFamily::EqualPowers => equal_powers_bracket(self.q, self.r, xi),
        }
    }
}

/// `K_p(x₁, x₂)` for a given parametric state.
///
/// Pass a state with `(ξ_p, ω_p) = (ξ(Λ), ω̄)` to get the fixed-ξ kernel `K`.
pub fn kernel_eval(
    spec: &KernelSpec,
    params: &ModelParams,
    state: &ParametricState,
    x1: f64,
    x2: f64,
) -> Result<f64> {
    let f = derive_frequencies(params)?;
    let spectrum = occupation_spectrum(state.xi_p, DEFAULT_TRUNCATION_TOL)?;
    let gq = one_matrix_with_weights(&spectrum.powered_weights(spec.q), state.omega_p, x1, x2);
    let gr = if spec.r == spec.q {
        gq
    } else {
        one_matrix_with_weights(&spectrum.powered_weights(spec.r), state.omega_p, x1, x2)
    };
    let pair = 2.0 * gaussian_density(f.omega_s, x1) * gaussian_density(f.omega_s, x2);
    Ok(pair - gq * gr)
}

/// `Σ_n P_nᵠP_nʳ = (1−ξ)^{q+r}/(1−ξ^{q+r})`; one when q + r = 1 or ξ = 0.
pub fn kernel_normalization(spec: &KernelSpec, xi: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::domain("xi", xi, "0 <= xi < 1"));
    }
    if xi == 0.0 {
        return Ok(1.0);
    }
    let s = spec.q + spec.r;
    Ok((1.0 - xi).powf(s) / (1.0 - xi.powf(s)))
}

/// `2 − (1−ξᵠ)(1−ξ^{1−q})/(1+ξ)` for the q + r = 1 family.
pub fn interaction_bracket(q: f64, xi: f64) -> f64 {
    2.0 - (1.0 - pow0(xi, q)) * (1.0 - pow0(xi, 1.0 - q)) / (1.0 + xi)
}

/// Bracket for general powers:
/// `2 − (1−ξᵠ)(1−ξʳ)(1−ξ)^{q+r+1} / ((1+ξ)(1−ξ^{q+r})²)`.
///
/// Reduces to [`interaction_bracket`] when q + r = 1.
pub fn equal_powers_bracket(q: f64, r: f64, xi: f64) -> f64 {
    if xi == 0.0 {
        return 1.0;
    }
    let s = q + r;
    let denom = (1.0 + xi) * (1.0 - xi.powf(s)).powi(2);
    2.0 - (1.0 - xi.powf(q)) * (1.0 - xi.powf(r)) * (1.0 - xi).powf(s + 1.0) / denom
}

/// `T_p = (ω_s/2)·((1+ξ_p)/(1−ξ_p))²`; equals the Kohn–Sham value ω_s/2 at ξ_p = 0.
pub fn kinetic_parametric(omega_s: f64, xi_p: f64) -> Result<f64> {
    check_xi_p(xi_p)?;
    let ratio = (1.0 + xi_p) / (1.0 - xi_p);
    Ok(0.5 * omega_s * ratio * ratio)
}

fn check_xi_p(xi_p: f64) -> Result<()> {
    if !(0.0..XI_P_MAX).contains(&xi_p) {
        return Err(Error::domain("xi_p", xi_p, "0 <= xi_p < 1 - 1e-9"));
    }
    Ok(())
}

/// Parametric energy `E_p(q, Λ, ξ_p)` split into its three terms.
///
/// The external term `ω₀²/(2ω_s)` does not depend on ξ_p since the density
/// is held at its exact value.
pub fn energy_parametric(params: &ModelParams, spec: &KernelSpec, xi_p: f64) -> Result<EnergyBreakdown> {
    params.check_window()?;
    check_xi_p(xi_p)?;
    let f = derive_frequencies(params)?;
    let w0sq = params.omega0() * params.omega0();
    let kinetic = kinetic_parametric(f.omega_s, xi_p)?;
    let external = 0.5 * w0sq / f.omega_s;
    let interaction = -0.5 * params.lambda() * w0sq / f.omega_s * spec.bracket(xi_p);
    Ok(EnergyBreakdown::new(kinetic, external, interaction))
}
