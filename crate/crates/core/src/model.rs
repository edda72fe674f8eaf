//! Closed-form ground state of the two-particle harmonic model
//!
//! ```text
//! H = -½(∂²/∂x₁² + ∂²/∂x₂²) + ½ω₀²(x₁² + x₂²) − ½Λω₀²(x₁ − x₂)²
//! ```
//!
//! The centre-of-mass and relative coordinates decouple into oscillators with
//! frequencies `ω₁ = ω₀` and `ω₂ = ω₀√(1 − 2Λ)`; everything else in the crate
//! is a function of these two numbers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::golden_section;

/// Couplings at or above this value make ω₂ imaginary.
pub const STABILITY_BOUND: f64 = 0.5;

/// Upper end of the coupling window used by the functional and the solver.
/// Closer to the stability bound ω₂ → 0 and the spectra become ill-conditioned.
pub const LAMBDA_MAX: f64 = 0.4999;

/// Physical inputs: confinement frequency ω₀ and dimensionless coupling Λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    omega0: f64,
    lambda: f64,
    allow_attractive: bool,
}

impl ModelParams {
    /// Validates `omega0 > 0` and a finite `lambda < 1`.
    ///
    /// The stability bound `Λ < 0.5` is enforced by [`derive_frequencies`]
    /// so that the Hartree–Fock reduction, which is well defined up to `Λ < 1`,
    /// stays reachable.
    pub fn new(omega0: f64, lambda: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::domain("omega0", omega0, "a finite value > 0"));
        }
        if !lambda.is_finite() || lambda >= 1.0 {
            return Err(Error::domain("lambda", lambda, "a finite value < 1"));
        }
        Ok(Self {
            omega0,
            lambda,
            allow_attractive: false,
        })
    }

    /// Opt in to energy evaluations on the attractive branch `Λ < 0`.
    pub fn with_attractive(mut self, allow: bool) -> Self {
        self.allow_attractive = allow;
        self
    }

    /// Same confinement, different coupling.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Ok(Self::new(self.omega0, lambda)?.with_attractive(self.allow_attractive))
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn allows_attractive(&self) -> bool {
        self.allow_attractive
    }

    pub(crate) fn check_energy_branch(&self) -> Result<()> {
        if self.lambda < 0.0 && !self.allow_attractive {
            Err(Error::AttractiveRejected {
                lambda: self.lambda,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_window(&self) -> Result<()> {
        self.check_energy_branch()?;
        if self.lambda >= STABILITY_BOUND {
            return Err(Error::Unstable { lambda: self.lambda });
        }
        if self.lambda > LAMBDA_MAX {
            return Err(Error::domain("lambda", self.lambda, "lambda <= 0.4999"));
        }
        Ok(())
    }
}

/// Frequencies and Schmidt parameters derived from [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedFrequencies {
    /// Centre-of-mass frequency, equal to ω₀.
    pub omega1: f64,
    /// Relative-motion frequency ω₀√(1 − 2Λ).
    pub omega2: f64,
    /// Kohn–Sham frequency 2ω₁ω₂/(ω₁ + ω₂); the density is `exp(−ω_s x²)`.
    pub omega_s: f64,
    /// Natural-orbital frequency √(ω₁ω₂).
    pub omega_bar: f64,
    /// Schmidt ratio −(√ω₁ − √ω₂)/(√ω₁ + √ω₂); negative for repulsion.
    pub z: f64,
    /// Occupation ratio ξ = z².
    pub xi: f64,
}

pub fn derive_frequencies(params: &ModelParams) -> Result<DerivedFrequencies> {
    let lambda = params.lambda;
    if lambda >= STABILITY_BOUND {
        return Err(Error::Unstable { lambda });
    }
    let omega1 = params.omega0;
    let omega2 = params.omega0 * (1.0 - 2.0 * lambda).sqrt();
    // a = (1 − 2Λ)^{1/4} = √(ω₂/ω₁); 1 − a is formed without cancellation
    let ln_a = 0.25 * (-2.0 * lambda).ln_1p();
    let one_minus_a = -ln_a.exp_m1();
    let a = ln_a.exp();
    let z = -one_minus_a / (1.0 + a);
    Ok(DerivedFrequencies {
        omega1,
        omega2,
        omega_s: 2.0 * omega1 * omega2 / (omega1 + omega2),
        omega_bar: (omega1 * omega2).sqrt(),
        z,
        xi: z * z,
    })
}

/// ξ(Λ) alone; accepts the attractive branch.
pub fn xi_of_lambda(lambda: f64) -> Result<f64> {
    Ok(derive_frequencies(&ModelParams::new(1.0, lambda)?)?.xi)
}

/// Kinetic, external, interaction and total energy of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub external: f64,
    pub interaction: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(kinetic: f64, external: f64, interaction: f64) -> Self {
        Self {
            kinetic,
            external,
            interaction,
            total: kinetic + external + interaction,
        }
    }
}

/// Exact ground-state energy split into its three expectation values.
///
/// The kinetic term `(ω₁+ω₂)/4` equals the total potential energy (virial
/// theorem), and the sum is `(ω₁+ω₂)/2`.
pub fn exact_energy(params: &ModelParams) -> Result<EnergyBreakdown> {
    params.check_energy_branch()?;
    let f = derive_frequencies(params)?;
    let w0sq = params.omega0 * params.omega0;
    let kinetic = 0.25 * (f.omega1 + f.omega2);
    let external = 0.5 * w0sq / f.omega_s;
    let interaction = -0.5 * params.lambda * w0sq / f.omega_s * (2.0 - f.omega_s / f.omega1);
    Ok(EnergyBreakdown::new(kinetic, external, interaction))
}

/// Ground-state wave function ψ(x₁, x₂); real and symmetric.
pub fn wavefunction(params: &ModelParams, x1: f64, x2: f64) -> Result<f64> {
    let f = derive_frequencies(params)?;
    Ok(wavefunction_from(&f, x1, x2))
}

pub(crate) fn wavefunction_from(f: &DerivedFrequencies, x1: f64, x2: f64) -> f64 {
    let norm = (f.omega1 * f.omega2 / (std::f64::consts::PI * std::f64::consts::PI)).powf(0.25);
    let exponent =
        -0.25 * (x1 * x1 + x2 * x2) * (f.omega1 + f.omega2) - 0.5 * x1 * x2 * (f.omega1 - f.omega2);
    norm * exponent.exp()
}

/// Single-particle density `(ω_s/π)^{1/2} exp(−ω_s x²)`, normalized to one.
pub fn density(params: &ModelParams, x: f64) -> Result<f64> {
    let f = derive_frequencies(params)?;
    Ok(gaussian_density(f.omega_s, x))
}

pub(crate) fn gaussian_density(omega_s: f64, x: f64) -> f64 {
    (omega_s / std::f64::consts::PI).sqrt() * (-omega_s * x * x).exp()
}

/// Kohn–Sham potential value at a point and the chemical potential μ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectivePotential {
    pub value: f64,
    pub mu: f64,
}

/// `V_s(x) = ω_s²x²/2 + (μ − ω_s/2)` with `μ = (ω₁+ω₂)²/(4ω₂)`.
///
/// `√n₁` is the ground state of `−½d²/dx² + V_s` with eigenvalue μ.
pub fn effective_potential(params: &ModelParams, x: f64) -> Result<EffectivePotential> {
    let f = derive_frequencies(params)?;
    let mu = (f.omega1 + f.omega2).powi(2) / (4.0 * f.omega2);
    let value = 0.5 * f.omega_s * f.omega_s * x * x + (mu - 0.5 * f.omega_s);
    Ok(EffectivePotential { value, mu })
}

/// Result of the Hartree–Fock reduction of the parametric functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HartreeFock {
    pub omega_hf: f64,
    pub energy: EnergyBreakdown,
}

/// The parametric energy at ξ_p = 0 with the orbital frequency ω left free:
/// `ω/2 + ω₀²/(2ω) − Λω₀²/(2ω)`.
pub fn hartree_fock_objective(params: &ModelParams, omega: f64) -> EnergyBreakdown {
    let w0sq = params.omega0 * params.omega0;
    EnergyBreakdown::new(
        0.5 * omega,
        0.5 * w0sq / omega,
        -0.5 * params.lambda * w0sq / omega,
    )
}

/// Minimizes [`hartree_fock_objective`] over ω for `Λ < 1`.
///
/// The stationary point is `ω_HF = ω₀√(1 − Λ)` and the minimum is
/// `E_HF = ω₀√(1 − Λ)` (one factor of ω₀√(1−Λ), which reduces to E_ex = ω₀ at
/// Λ = 0). Golden-section search is used if the closed form fails its
/// stationarity check.
pub fn hartree_fock(params: &ModelParams) -> Result<HartreeFock> {
    params.check_energy_branch()?;
    let closed = params.omega0 * (1.0 - params.lambda).sqrt();
    let omega_hf = if hf_gradient(params, closed).abs() <= 1e-12 {
        closed
    } else {
        hartree_fock_search(params)
    };
    Ok(HartreeFock {
        omega_hf,
        energy: hartree_fock_objective(params, omega_hf),
    })
}

fn hf_gradient(params: &ModelParams, omega: f64) -> f64 {
    0.5 - 0.5 * (1.0 - params.lambda) * params.omega0 * params.omega0 / (omega * omega)
}

fn hartree_fock_search(params: &ModelParams) -> f64 {
    let w0 = params.omega0;
    // ω_HF ∈ (0, ω₀√2) for Λ ∈ (−1, 1); widen generously for strong attraction
    let hi = w0 * (2.0 * (1.0 - params.lambda)).sqrt().max(2.0);
    golden_section(
        |w| hartree_fock_objective(params, w).total,
        1e-12 * w0,
        hi,
        1e-14 * w0,
    )
    .0
}
