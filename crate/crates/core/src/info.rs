//! Purity, linear entropy, quasiparticle weight and the coupling duality.
//!
//! All measures depend on the occupation ratio only. Because `P_n` is blind to
//! the sign of z, each repulsive coupling Λ has an attractive partner
//! `Λ_a = −Λ/(1−2Λ)` with the same ξ: `(1−2Λ_a)^{1/4} = (1−2Λ)^{−1/4}` maps
//! `(1−a)/(1+a)` to `(a−1)/(a+1)`, which squares to the same value.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{derive_frequencies, ModelParams};
use crate::solver::{solve_xi_p, DEFAULT_ROOT_TOL};

fn check_xi(xi: f64) -> Result<()> {
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::domain("xi", xi, "0 <= xi < 1"));
    }
    Ok(())
}

/// `Σ P_n² = (1−ξ)/(1+ξ)`.
pub fn purity(xi: f64) -> Result<f64> {
    check_xi(xi)?;
    Ok((1.0 - xi) / (1.0 + xi))
}

/// `L = 1 − Π = 2ξ/(1+ξ)`.
pub fn linear_entropy(xi: f64) -> Result<f64> {
    check_xi(xi)?;
    Ok(2.0 * xi / (1.0 + xi))
}

/// `P₀ − P₁ = (1−ξ)²`.
pub fn quasiparticle_weight(xi: f64) -> Result<f64> {
    check_xi(xi)?;
    Ok((1.0 - xi) * (1.0 - xi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyReport {
    pub xi: f64,
    pub purity: f64,
    pub linear_entropy: f64,
    pub quasiparticle_weight: f64,
}

impl EntropyReport {
    pub fn from_xi(xi: f64) -> Result<Self> {
        Ok(Self {
            xi,
            purity: purity(xi)?,
            linear_entropy: linear_entropy(xi)?,
            quasiparticle_weight: quasiparticle_weight(xi)?,
        })
    }
}

/// Attractive coupling with the same occupation spectrum as `lambda ∈ (0, 0.5)`.
pub fn dual_coupling(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 0.5) {
        return Err(Error::domain("lambda", lambda, "0 < lambda < 0.5"));
    }
    Ok(-lambda / (1.0 - 2.0 * lambda))
}

/// Which linear entropy is larger at a given coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyOrdering {
    ParametricLarger,
    Equal,
    ExactLarger,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyComparison {
    pub lambda: f64,
    pub q: f64,
    /// Linear entropy at the variational ξ_p.
    pub parametric: f64,
    /// Linear entropy at the exact ξ(Λ).
    pub exact: f64,
    pub ordering: EntropyOrdering,
}

impl EntropyComparison {
    pub fn difference(&self) -> f64 {
        self.parametric - self.exact
    }
}

/// Compares `L_p = L(ξ_p(q, Λ))` with `L = L(ξ(Λ))`.
pub fn entropy_comparison(params: &ModelParams, q: f64) -> Result<EntropyComparison> {
    let xi = derive_frequencies(params)?.xi;
    let xi_p = solve_xi_p(params, q, DEFAULT_ROOT_TOL)?.xi_p;
    let parametric = linear_entropy(xi_p)?;
    let exact = linear_entropy(xi)?;
    let ordering = match parametric.partial_cmp(&exact) {
        Some(Ordering::Greater) => EntropyOrdering::ParametricLarger,
        Some(Ordering::Less) => EntropyOrdering::ExactLarger,
        _ => EntropyOrdering::Equal,
    };
    Ok(EntropyComparison {
        lambda: params.lambda(),
        q,
        parametric,
        exact,
        ordering,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::xi_of_lambda;
    use crate::spectral::occupation_spectrum;
    use approx::assert_relative_eq;

    const XI_03: f64 = 0.013_004_689_310_986_747;

    #[test]
    fn purity_values() {
        assert_eq!(purity(0.0).unwrap(), 1.0);
        assert_relative_eq!(purity(1.0 / 3.0).unwrap(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(purity(XI_03).unwrap(), 0.974_324_522_979_588_34, max_relative = 1e-14);
        assert!(purity(1.0).is_err());
        // partial sums of (1−ξ)²ξ^{2n} at ξ = 1/3
        let partial: f64 = (0..60).map(|n| (2.0f64 / 3.0).powi(2) * (1.0f64 / 9.0).powi(n)).sum();
        assert_relative_eq!(partial, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn purity_matches_truncated_series() {
        for xi in [0.1, 0.5, 0.9] {
            let s = occupation_spectrum(xi, 1e-14).unwrap();
            let series: f64 = s.weights().iter().map(|w| w * w).sum();
            let bound = 2.0 * xi.powi(2 * s.truncation() as i32);
            assert!((purity(xi).unwrap() - series).abs() <= bound.max(1e-15));
            assert!((purity(xi).unwrap() - series).abs() <= 1e-12);
        }
    }

    #[test]
    fn quasiparticle_weight_is_occupation_gap() {
        assert_eq!(quasiparticle_weight(0.0).unwrap(), 1.0);
        assert_relative_eq!(
            quasiparticle_weight(XI_03).unwrap(),
            0.974_159_743_322_101_8,
            max_relative = 1e-14
        );
        for xi in [0.0, 0.01, 0.3, 0.77] {
            let s = occupation_spectrum(xi, 1e-14).unwrap();
            let gap = s.weights()[0] - s.weights()[1];
            assert_relative_eq!(quasiparticle_weight(xi).unwrap(), gap, max_relative = 1e-14);
        }
    }

    #[test]
    fn entropy_report_consistency() {
        let r = EntropyReport::from_xi(0.2).unwrap();
        assert_relative_eq!(r.purity + r.linear_entropy, 1.0, max_relative = 1e-15);
        assert_eq!(EntropyReport::from_xi(0.0).unwrap().purity, 1.0);
    }

    #[test]
    fn dual_coupling_values() {
        assert_relative_eq!(dual_coupling(0.3).unwrap(), -0.75, max_relative = 1e-15);
        let tiny = dual_coupling(1e-9).unwrap();
        assert!(tiny < 0.0 && tiny > -2e-9);
        assert!(dual_coupling(0.0).is_err());
        assert!(dual_coupling(0.5).is_err());
        for i in 1..=9 {
            let lambda = 0.05 * i as f64;
            let dual = dual_coupling(lambda).unwrap();
            let a = xi_of_lambda(lambda).unwrap();
            let b = xi_of_lambda(dual).unwrap();
            assert!((a - b).abs() <= 1e-12);
            assert!((linear_entropy(a).unwrap() - linear_entropy(b).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn entropy_ordering_small_and_large_coupling() {
        let small = entropy_comparison(&ModelParams::new(1.0, 0.01).unwrap(), 0.4).unwrap();
        assert_eq!(small.ordering, EntropyOrdering::ParametricLarger);
        let large = entropy_comparison(&ModelParams::new(1.0, 0.48).unwrap(), 0.4).unwrap();
        assert_eq!(large.ordering, EntropyOrdering::ExactLarger);
    }
}
