//! Natural orbitals, occupation spectra and the spectral one-matrix.
//!
//! The exact one-matrix is diagonal in harmonic-oscillator functions of
//! frequency ω̄ with geometric occupations `P_n = (1−ξ)ξⁿ`. The parametric
//! family replaces (ξ, ω̄) by (ξ_p, ω_p) tied together so that the diagonal
//! still reproduces the exact density. Operator powers γ^q are taken on the
//! occupations, `P_n → P_nᵠ`.

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-14;
pub const MIN_TERMS: usize = 16;
pub const MAX_TERMS: usize = 512;

const RESCALE_ABOVE: f64 = 1e150;

/// Normalized oscillator functions `φ_n(x)` for n = 0, 1, 2, … at fixed (ω, x).
///
/// Uses the normalized three-term recurrence
/// `φ_{n+1} = √(2/(n+1))·y·φ_n − √(n/(n+1))·φ_{n−1}` with `y = √ω·x`, carrying
/// a separate log-scale so the Gaussian prefactor never underflows mid-sequence.
#[derive(Debug, Clone)]
pub struct HermiteFunctions {
    y: f64,
    n: usize,
    prev: f64,
    cur: f64,
    log_base: f64,
    log_scale: f64,
    factor: f64,
}

impl HermiteFunctions {
    pub fn new(omega: f64, x: f64) -> Self {
        let y = omega.sqrt() * x;
        let log_base = 0.25 * (omega / std::f64::consts::PI).ln() - 0.5 * y * y;
        Self {
            y,
            n: 0,
            prev: 0.0,
            cur: 1.0,
            log_base,
            log_scale: 0.0,
            factor: log_base.exp(),
        }
    }
}

impl Iterator for HermiteFunctions {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let value = self.cur * self.factor;
        let n = self.n as f64;
        let next = (2.0 / (n + 1.0)).sqrt() * self.y * self.cur - (n / (n + 1.0)).sqrt() * self.prev;
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        if self.cur.abs() > RESCALE_ABOVE {
            self.prev /= RESCALE_ABOVE;
            self.cur /= RESCALE_ABOVE;
            self.log_scale += RESCALE_ABOVE.ln();
            self.factor = (self.log_base + self.log_scale).exp();
        }
        Some(value)
    }
}

/// `(ω/π)^{1/4}(2ⁿn!)^{−1/2} e^{−ωx²/2} H_n(√ω x)`.
pub fn hermite_orbital(n: usize, omega: f64, x: f64) -> f64 {
    HermiteFunctions::new(omega, x)
        .nth(n)
        .expect("HermiteFunctions is infinite")
}

/// `base^exponent` with the continuous limits `0^0 = 1` and `0^q = 0` for q > 0.
#[inline]
pub(crate) fn pow0(base: f64, exponent: f64) -> f64 {
    if exponent == 0.0 {
        1.0
    } else if base == 0.0 {
        0.0
    } else {
        base.powf(exponent)
    }
}

/// Geometric occupation numbers `P_n = (1−ξ)ξⁿ`, truncated after N terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationSpectrum {
    xi: f64,
    weights: Vec<f64>,
    tail_mass: f64,
}

impl OccupationSpectrum {
    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn truncation(&self) -> usize {
        self.weights.len()
    }

    /// Discarded occupation `ξ^N`.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Number of terms needed so that `(P_n)^power` is negligible beyond the
    /// cut. For `power < 1` the powered weights decay more slowly than the
    /// spectrum itself, so the count grows as `N/power`.
    pub fn terms_for_power(&self, power: f64) -> usize {
        if power >= 1.0 || self.xi == 0.0 {
            self.weights.len()
        } else {
            ((self.weights.len() as f64 / power).ceil() as usize).min(MAX_TERMS)
        }
    }

    /// `(P_n)^power` for n < [`terms_for_power`](Self::terms_for_power).
    pub fn powered_weights(&self, power: f64) -> Vec<f64> {
        let count = self.terms_for_power(power);
        let lead = pow0(1.0 - self.xi, power);
        let ratio = pow0(self.xi, power);
        let mut out = Vec::with_capacity(count);
        let mut w = lead;
        for _ in 0..count {
            out.push(w);
            w *= ratio;
        }
        out
    }
}

/// Builds the spectrum with N the smallest integer such that `ξ^N ≤ tol`,
/// clamped to `[16, 512]`.
pub fn occupation_spectrum(xi: f64, tol: f64) -> Result<OccupationSpectrum> {
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::domain("xi", xi, "0 <= xi < 1"));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::domain("tol", tol, "0 < tol < 1"));
    }
    let count = if xi == 0.0 {
        MIN_TERMS
    } else {
        ((tol.ln() / xi.ln()).ceil() as usize).clamp(MIN_TERMS, MAX_TERMS)
    };
    let mut weights = Vec::with_capacity(count);
    let mut power = 1.0;
    for _ in 0..count {
        weights.push((1.0 - xi) * power);
        power *= xi;
    }
    Ok(OccupationSpectrum {
        xi,
        weights,
        tail_mass: power,
    })
}

/// `Σ_n (P_n)^power φ_n(x) φ_n(x′)` with orbitals of frequency `omega`.
///
/// With (ξ(Λ), ω̄) this is the exact one-matrix; with (ξ_p, ω_p) it is the
/// parametric one-matrix; `power` gives the operator power γ^power.
pub fn one_matrix(spectrum: &OccupationSpectrum, omega: f64, power: f64, x: f64, x_prime: f64) -> f64 {
    let weights = spectrum.powered_weights(power);
    one_matrix_with_weights(&weights, omega, x, x_prime)
}

pub(crate) fn one_matrix_with_weights(weights: &[f64], omega: f64, x: f64, x_prime: f64) -> f64 {
    let left = HermiteFunctions::new(omega, x);
    if x == x_prime {
        return weights.iter().zip(left).map(|(w, p)| w * p * p).sum();
    }
    let right = HermiteFunctions::new(omega, x_prime);
    weights
        .iter()
        .zip(left.zip(right))
        .map(|(w, (a, b))| w * a * b)
        .sum()
}

/// Diagonal of the power-one one-matrix.
pub fn density_from_spectrum(spectrum: &OccupationSpectrum, omega: f64, x: f64) -> f64 {
    one_matrix_with_weights(spectrum.weights(), omega, x, x)
}

/// `ω_p = ω_s (1+ξ_p)/(1−ξ_p)`, the orbital frequency that keeps the density fixed.
pub fn omega_p_from_constraint(omega_s: f64, xi_p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&xi_p) {
        return Err(Error::domain("xi_p", xi_p, "0 <= xi_p < 1"));
    }
    Ok(omega_s * (1.0 + xi_p) / (1.0 - xi_p))
}

/// Variational degrees of freedom of the parametric one-matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParametricState {
    pub q: f64,
    pub r: f64,
    pub xi_p: f64,
    pub omega_p: f64,
}

impl ParametricState {
    /// State reproducing the density of Kohn–Sham frequency `omega_s`.
    pub fn constrained(omega_s: f64, q: f64, r: f64, xi_p: f64) -> Result<Self> {
        Ok(Self {
            q,
            r,
            xi_p,
            omega_p: omega_p_from_constraint(omega_s, xi_p)?,
        })
    }

    /// State with an arbitrary orbital frequency (used for negative controls).
    pub fn unconstrained(q: f64, r: f64, xi_p: f64, omega_p: f64) -> Self {
        Self { q, r, xi_p, omega_p }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{density, derive_frequencies, ModelParams};
    use approx::assert_relative_eq;

    /// Simpson's rule on a wide uniform grid; independent of the oracle module.
    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let x = a + h * i as f64;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn orbital_values() {
        assert_relative_eq!(
            hermite_orbital(0, 1.0, 0.0),
            std::f64::consts::PI.powf(-0.25),
            max_relative = 1e-15
        );
        assert_eq!(hermite_orbital(1, 1.0, 0.0), 0.0);
        // φ₂(x) = π^{-1/4}(2x²−1)/√2 · e^{−x²/2}
        let x: f64 = 0.8;
        let expected = std::f64::consts::PI.powf(-0.25) * (2.0 * x * x - 1.0) / 2f64.sqrt()
            * (-0.5 * x * x).exp();
        assert_relative_eq!(hermite_orbital(2, 1.0, x), expected, max_relative = 1e-14);
    }

    #[test]
    fn orbitals_finite_at_extremes() {
        for n in [0, 1, 100, 511, 512] {
            for y in [-40.0, -12.5, 0.0, 3.0, 39.9, 40.0] {
                assert!(hermite_orbital(n, 1.0, y).is_finite(), "n={n} y={y}");
            }
        }
        // scaled recurrence keeps moderate values where the naive start underflows
        let v = hermite_orbital(512, 1.0, 30.0);
        assert!(v.is_finite() && v != 0.0);
    }

    #[test]
    fn orthonormal_low_orders() {
        let omega = 1.3;
        let table: Vec<Vec<f64>> = (0..4001)
            .map(|i| -12.0 + 24.0 * i as f64 / 4000.0)
            .map(|x| HermiteFunctions::new(omega, x).take(21).collect())
            .collect();
        for m in 0..=20 {
            for n in m..=20 {
                let h = 24.0 / 4000.0;
                let s: f64 = table.iter().map(|row| row[m] * row[n]).sum::<f64>() * h;
                let target = if m == n { 1.0 } else { 0.0 };
                assert!((s - target).abs() < 1e-10, "({m},{n}) -> {s}");
            }
        }
    }

    #[test]
    fn orthonormal_high_orders() {
        // trapezoid on a Gaussian-decaying integrand is spectrally accurate
        let omega = 1.0;
        let half = 24.0;
        let count = 6001;
        let h = 2.0 * half / (count - 1) as f64;
        let table: Vec<Vec<f64>> = (0..count)
            .map(|i| -half + h * i as f64)
            .map(|x| HermiteFunctions::new(omega, x).take(201).collect())
            .collect();
        for &(m, n) in &[(200, 200), (199, 200), (150, 200), (120, 120), (198, 200)] {
            let s: f64 = table.iter().map(|row| row[m] * row[n]).sum::<f64>() * h;
            let target = if m == n { 1.0 } else { 0.0 };
            assert!((s - target).abs() < 1e-10, "({m},{n}) -> {s}");
        }
    }

    #[test]
    fn spectrum_truncation_and_weights() {
        let s = occupation_spectrum(0.0, 1e-14).unwrap();
        assert_eq!(s.truncation(), 16);
        assert_eq!(s.weights()[0], 1.0);
        assert!(s.weights()[1..].iter().all(|&w| w == 0.0));
        assert_eq!(s.tail_mass(), 0.0);

        let xi = 0.013_004_689_310_986_747;
        let s = occupation_spectrum(xi, 1e-14).unwrap();
        assert_relative_eq!(s.weights()[0], 0.986_995_310_689_013_25, max_relative = 1e-15);
        assert_relative_eq!(s.weights()[1], 0.012_835_567_366_911_454, max_relative = 1e-14);
        assert_eq!(s.truncation(), 16);

        let s = occupation_spectrum(0.9, 1e-14).unwrap();
        assert_eq!(s.truncation(), (1e-14f64.ln() / 0.9f64.ln()).ceil() as usize);
        assert!(s.tail_mass() <= 1e-14);
        assert_eq!(occupation_spectrum(0.9999, 1e-14).unwrap().truncation(), 512);

        assert!(occupation_spectrum(1.0, 1e-14).is_err());
        assert!(occupation_spectrum(-0.1, 1e-14).is_err());
    }

    #[test]
    fn idempotent_one_matrix_at_zero_xi() {
        let s = occupation_spectrum(0.0, 1e-14).unwrap();
        for &(x, xp) in &[(0.0, 0.0), (0.5, -1.2), (2.0, 1.0)] {
            let expected = hermite_orbital(0, 0.9, x) * hermite_orbital(0, 0.9, xp);
            assert_relative_eq!(one_matrix(&s, 0.9, 1.0, x, xp), expected, max_relative = 1e-15);
            assert_relative_eq!(one_matrix(&s, 0.9, 0.4, x, xp), expected, max_relative = 1e-15);
        }
    }

    #[test]
    fn diagonal_reproduces_exact_density() {
        let params = ModelParams::new(1.0, 0.3).unwrap();
        let f = derive_frequencies(&params).unwrap();
        let s = occupation_spectrum(f.xi, DEFAULT_TRUNCATION_TOL).unwrap();
        let g = one_matrix(&s, f.omega_bar, 1.0, 0.0, 0.0);
        assert!((g - 0.496_631_633_924_756_05).abs() <= 1e-9);
        // Mehler reference, 40-digit quadrature of ∫ψ(0.7,y)ψ(−0.4,y)dy
        let g = one_matrix(&s, f.omega_bar, 1.0, 0.7, -0.4);
        assert!((g - 0.381_269_131_611_651_91).abs() <= 1e-8, "{g}");
        for x in [-2.5, -0.3, 1.1, 3.0] {
            let d = density_from_spectrum(&s, f.omega_bar, x);
            assert_relative_eq!(d, density(&params, x).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn isospectral_deformation_preserves_density() {
        let params = ModelParams::new(1.0, 0.3).unwrap();
        let omega_s = derive_frequencies(&params).unwrap().omega_s;
        for xi_p in [0.0, 0.1, 0.2, 0.3, 0.6] {
            let s = occupation_spectrum(xi_p, DEFAULT_TRUNCATION_TOL).unwrap();
            let omega_p = omega_p_from_constraint(omega_s, xi_p).unwrap();
            for x in [0.0, 0.5, 1.3] {
                let d = density_from_spectrum(&s, omega_p, x);
                let exact = density(&params, x).unwrap();
                assert!((d - exact).abs() <= 1e-8, "xi_p={xi_p} x={x}");
            }
        }
        // xi_p = 0, omega_p = omega_s is exactly the Gaussian
        let s = occupation_spectrum(0.0, DEFAULT_TRUNCATION_TOL).unwrap();
        assert_relative_eq!(
            density_from_spectrum(&s, omega_s, 0.4),
            density(&params, 0.4).unwrap(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn unconstrained_frequency_breaks_the_density() {
        let params = ModelParams::new(1.0, 0.3).unwrap();
        let omega_s = derive_frequencies(&params).unwrap().omega_s;
        let s = occupation_spectrum(0.2, DEFAULT_TRUNCATION_TOL).unwrap();
        let d = density_from_spectrum(&s, 2.0 * omega_s, 0.0);
        assert!((d - density(&params, 0.0).unwrap()).abs() > 1e-3);
    }

    #[test]
    fn omega_p_values() {
        assert_eq!(omega_p_from_constraint(0.77, 0.0).unwrap(), 0.77);
        assert_relative_eq!(
            omega_p_from_constraint(0.774_851_773_445_586_22, 0.013_004_689_310_986_747).unwrap(),
            0.795_270_728_767_050_67,
            max_relative = 1e-14
        );
        assert_relative_eq!(omega_p_from_constraint(1.0, 0.5).unwrap(), 3.0, max_relative = 1e-15);
        assert!(omega_p_from_constraint(1.0, 1.0).is_err());
    }

    #[test]
    fn trace_and_powered_overlap() {
        let xi = 0.3;
        let omega = 0.8;
        let s = occupation_spectrum(xi, DEFAULT_TRUNCATION_TOL).unwrap();
        let trace = simpson(|x| one_matrix(&s, omega, 1.0, x, x), -14.0, 14.0, 2000);
        assert!((trace - 1.0).abs() <= 1e-9);
        let (q, r) = (0.6, 0.6);
        let wq = s.powered_weights(q);
        let wr = s.powered_weights(r);
        let series: f64 = wq.iter().zip(&wr).map(|(a, b)| a * b).sum();
        let closed = (1.0f64 - xi).powf(q + r) / (1.0 - xi.powf(q + r));
        assert_relative_eq!(series, closed, max_relative = 1e-13);
    }

    #[test]
    fn powered_weights_cover_slow_decay() {
        let s = occupation_spectrum(0.5, 1e-14).unwrap();
        let w = s.powered_weights(0.25);
        assert!(w.len() > s.truncation());
        assert!(*w.last().unwrap() < 1e-13);
    }
}
