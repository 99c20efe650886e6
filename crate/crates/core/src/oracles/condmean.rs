//! Conditional means of the covariate by Gauss–Legendre quadrature.
//!
//! The attributes have density `f(t) = 6 (¼ − t²)` on `[−½, ½]`. For the
//! designs that add fixed effects to `X`, the conditioning set of a node is
//! its full latent pair: `(A_i, θ_i)` for the ego, `(B_j, ξ_j)` for the
//! alter. Integrals are split at the kinks of `|a − b|` and of the
//! indicators, so each piece is smooth.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::simulate::design::Design;

/// Quadrature nodes per interval; doubling changes no result by 1e-8.
pub const DEFAULT_NODES: usize = 48;

const LO: f64 = -0.5;
const HI: f64 = 0.5;

/// Density of `V − ½` with `V ~ Beta(2, 2)`.
pub fn attribute_density(t: f64) -> f64 {
    if (LO..=HI).contains(&t) {
        6.0 * (0.25 - t * t)
    } else {
        0.0
    }
}

/// Distribution function of `V − ½`, closed form.
pub fn attribute_cdf(t: f64) -> f64 {
    let t = t.clamp(LO, HI);
    0.5 + 1.5 * t - 2.0 * t * t * t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CondMeanSummary {
    pub design: Design,
    pub nodes: usize,
    pub grand_mean: f64,
}

/// `E[X_ij | ego]`, `E[X_ij | alter]` and `E[X_ij]` for one design.
pub struct CondMeanSpec {
    pub design: Design,
    nodes: usize,
    rule: GaussLegendre,
    normal: Normal,
    grand_mean: f64,
}

impl std::fmt::Debug for CondMeanSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CondMeanSpec")
            .field("design", &self.design)
            .field("nodes", &self.nodes)
            .field("grand_mean", &self.grand_mean)
            .finish()
    }
}

impl CondMeanSpec {
    pub fn new(design: Design) -> Self {
        Self::with_nodes(design, DEFAULT_NODES).expect("default node count is valid")
    }

    pub fn with_nodes(design: Design, nodes: usize) -> Result<Self> {
        let degree = NonZeroUsize::new(nodes)
            .filter(|d| d.get() >= 2)
            .ok_or_else(|| Error::OracleInput(format!("quadrature needs at least 2 nodes, got {nodes}")))?;
        let mut spec = Self {
            design,
            nodes,
            rule: GaussLegendre::new(degree),
            normal: Normal::new(0.0, 1.0).expect("unit normal"),
            grand_mean: 0.0,
        };
        spec.grand_mean = spec.compute_grand_mean();
        Ok(spec)
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn summary(&self) -> CondMeanSummary {
        CondMeanSummary { design: self.design, nodes: self.nodes, grand_mean: self.grand_mean }
    }

    /// `∫ f(t) g(t) dt` over `[lo, hi] ∩ [−½, ½]`, split at `kink` when it
    /// falls inside.
    fn integrate(&self, lo: f64, hi: f64, kink: Option<f64>, g: impl Fn(f64) -> f64) -> f64 {
        let (lo, hi) = (lo.max(LO), hi.min(HI));
        if lo >= hi {
            return 0.0;
        }
        let h = |t: f64| attribute_density(t) * g(t);
        match kink {
            Some(k) if k > lo && k < hi => self.rule.integrate(lo, k, &h) + self.rule.integrate(k, hi, &h),
            _ => self.rule.integrate(lo, hi, h),
        }
    }

    /// `−E|a − B|`, also `−E|A − b|` by the shared attribute law.
    fn minus_mean_abs(&self, a: f64) -> f64 {
        -self.integrate(LO, HI, Some(a), |b| (a - b).abs())
    }

    fn phi(&self, z: f64) -> f64 {
        self.normal.cdf(z)
    }

    /// `E[X_ij | A_i = a, θ_i = theta]`.
    pub fn mean_given_ego(&self, a: f64, theta: f64) -> f64 {
        match self.design {
            Design::D1 => self.minus_mean_abs(a),
            Design::D2 => self.minus_mean_abs(a) + theta,
            // P(B < a)
            Design::D3 => self.integrate(LO, a, None, |_| 1.0),
            // P(B − ξ < a + θ) with ξ ~ N(0,1)
            Design::D4 => self.integrate(LO, HI, None, |b| self.phi(a + theta - b)),
        }
    }

    /// `E[X_ij | B_j = b, ξ_j = xi]`.
    pub fn mean_given_alter(&self, b: f64, xi: f64) -> f64 {
        match self.design {
            Design::D1 => self.minus_mean_abs(b),
            Design::D2 => self.minus_mean_abs(b) + xi,
            // P(A > b)
            Design::D3 => self.integrate(b, HI, None, |_| 1.0),
            // P(A + θ > b − ξ) with θ ~ N(0,1)
            Design::D4 => self.integrate(LO, HI, None, |a| self.phi(a - b + xi)),
        }
    }

    pub fn grand_mean(&self) -> f64 {
        self.grand_mean
    }

    fn compute_grand_mean(&self) -> f64 {
        match self.design {
            // E θ = E ξ = 0
            Design::D1 | Design::D2 => self.integrate(LO, HI, None, |a| self.minus_mean_abs(a)),
            Design::D3 => self.integrate(LO, HI, None, attribute_cdf),
            // θ + ξ ~ N(0, 2)
            Design::D4 => self.integrate(LO, HI, None, |a| {
                self.integrate(LO, HI, None, |b| self.phi((a - b) / std::f64::consts::SQRT_2))
            }),
        }
    }

    /// `h_ij = x_ij − E[X | ego] − E[X | alter] + E[X]`.
    pub fn centred(&self, x_ij: f64, a_i: f64, theta_i: f64, b_j: f64, xi_j: f64) -> f64 {
        x_ij - self.mean_given_ego(a_i, theta_i) - self.mean_given_alter(b_j, xi_j) + self.grand_mean
    }
}
