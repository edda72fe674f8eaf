//! Quadrature rules for integrals over the real line.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::summation::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    /// Gauss–Hermite nodes with the weight function folded into the weights,
    /// so that `Σ wᵢ f(xᵢ) ≈ ∫ f(x) dx` for Gaussian-decaying `f`.
    GaussHermiteMapped,
    /// Uniform trapezoid on `[−L, L]`.
    UniformTrapezoid,
}

/// Nodes and weights for `∫_ℝ f(x) dx`, for integrands of unit Gaussian width.
/// Use [`QuadratureRule::scaled`] to adapt the rule to a given frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Domain half-width (trapezoid only).
    pub half_width: Option<f64>,
}

pub const DEFAULT_GH_NODES: usize = 96;
pub const MIN_TRAPEZOID_NODES: usize = 400;

impl QuadratureRule {
    /// `n`-point Gauss–Hermite rule with weights multiplied by `e^{x²}`.
    ///
    /// Nodes come from Newton iteration on the orthonormal Hermite recurrence;
    /// weights are formed in log space so the tail nodes keep full relative
    /// precision.
    pub fn gauss_hermite_mapped(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("nodes", 0.0, "at least one node"));
        }
        let (nodes, weights) = gauss_hermite(n);
        Ok(Self {
            kind: RuleKind::GaussHermiteMapped,
            nodes,
            weights,
            half_width: None,
        })
    }

    /// Trapezoid rule with `n ≥ 400` nodes on `[−half_width, half_width]`.
    pub fn uniform_trapezoid(n: usize, half_width: f64) -> Result<Self> {
        if n < MIN_TRAPEZOID_NODES {
            return Err(Error::domain("nodes", n as f64, "at least 400 trapezoid nodes"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::domain("half_width", half_width, "a finite value > 0"));
        }
        let h = 2.0 * half_width / (n - 1) as f64;
        let nodes = (0..n).map(|i| -half_width + h * i as f64).collect();
        let weights = (0..n)
            .map(|i| if i == 0 || i + 1 == n { 0.5 * h } else { h })
            .collect();
        Ok(Self {
            kind: RuleKind::UniformTrapezoid,
            nodes,
            weights,
            half_width: Some(half_width),
        })
    }

    pub fn default_rule() -> Self {
        Self::gauss_hermite_mapped(DEFAULT_GH_NODES).expect("nonzero node count")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Rule for `∫ f(x) dx` after the substitution `x = s·u`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            kind: self.kind,
            nodes: self.nodes.iter().map(|x| x * s).collect(),
            weights: self.weights.iter().map(|w| w * s).collect(),
            half_width: self.half_width.map(|l| l * s),
        }
    }

    /// Same kind of rule with twice as many nodes.
    pub fn refined(&self) -> Self {
        match self.kind {
            RuleKind::GaussHermiteMapped => Self::gauss_hermite_mapped(2 * self.len()).expect("nonzero"),
            RuleKind::UniformTrapezoid => {
                let l = self.half_width.expect("trapezoid has a half-width");
                Self::uniform_trapezoid(2 * self.len() - 1, l).expect("valid trapezoid")
            }
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .collect::<NeumaierSum>()
            .value()
    }

    /// Tensor-product integral `∫∫ f(x₁, x₂) dx₁ dx₂`.
    pub fn integrate_2d<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let mut acc = NeumaierSum::new();
        for (&x1, &w1) in self.nodes.iter().zip(&self.weights) {
            for (&x2, &w2) in self.nodes.iter().zip(&self.weights) {
                acc.add(w1 * w2 * f(x1, x2));
            }
        }
        acc.value()
    }
}

/// Orthonormal Hermite polynomials: returns `(p_n(z), p_{n−1}(z))`.
fn orthonormal_hermite(n: usize, z: f64) -> (f64, f64) {
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
    let mut p1 = PIM4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, p2)
}

fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n.div_ceil(2) {
        // initial guesses for the largest roots, then extrapolated from previous roots
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        for _ in 0..100 {
            let (p, p_prev) = orthonormal_hermite(n, z);
            let step = p / ((2.0 * nf).sqrt() * p_prev);
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let derivative = (2.0 * nf).sqrt() * orthonormal_hermite(n, z).1;
        let w = (std::f64::consts::LN_2 - 2.0 * derivative.abs().ln() + z * z).exp();
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}
