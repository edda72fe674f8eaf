//! Parametric Müller-type pair-density functional for the exactly solvable
//! two-particle harmonic model (two particles in a harmonic trap with a
//! harmonic interparticle coupling).
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: closed-form exact solution (frequencies, wave function,
//!   density, Kohn–Sham potential, exact and Hartree–Fock energies).
//! - [`spectral`]: Hermite natural orbitals, geometric occupation spectra and
//!   the spectral one-matrix with fractional operator powers.
//! - [`functional`]: the Müller-type kernels and the parametric energy
//!   `E_p(q, Λ, ξ_p)` together with its equal-powers variant.
//! - [`solver`]: stationarity conditions for the occupation parameter,
//!   sweeps, ratio crossings and small-coupling scaling fits.
//! - [`info`]: purity, linear entropy, quasiparticle weight and the
//!   repulsive/attractive duality.
//! - [`oracle`]: an independent quadrature engine that checks every closed
//!   form by brute-force integration.
//! - [`report`]: CSV/JSON emitters and run configuration used by the `mh`
//!   command-line tool.
//!
//! All quantities are in Hartree atomic units.

pub mod error;
pub mod functional;
pub mod info;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod report;
pub mod solver;
pub mod spectral;
pub mod summation;

pub use error::{Error, Result};
pub use functional::{energy_parametric, KernelFamily, KernelSpec};
pub use model::{derive_frequencies, exact_energy, DerivedFrequencies, EnergyBreakdown, ModelParams};
pub use solver::{solve_xi_p, StationaritySolution, SweepRecord};
pub use spectral::{OccupationSpectrum, ParametricState};
