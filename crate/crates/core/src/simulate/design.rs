//! The four simulation designs.
//!
//! Every node gets an ego attribute `A_i = V_i − ½` and an independent alter
//! attribute `B_i = W_i − ½` with `V, W ~ Beta(2, 2)`, plus fixed effects
//! `θ_i, ξ_i ~ N(0, 1)`. Errors `U_ij ~ N(0, σ_u²)` are independent over
//! ordered dyads and `Y_ij = β₁ X_ij + θ_i + ξ_j + U_ij`.
//!
//! | design | `X_ij` |
//! |--------|--------|
//! | D1 | `−\|A_i − B_j\|` |
//! | D2 | `−\|A_i − B_j\| + θ_i + ξ_j` |
//! | D3 | `1{A_i − B_j > 0}` |
//! | D4 | `1{A_i − B_j + θ_i + ξ_j > 0}` |

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{DyadicDataset, LatentTruth};
use crate::error::{Error, Result};
use crate::simulate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Design {
    D1,
    D2,
    D3,
    D4,
}

impl Design {
    pub const ALL: [Design; 4] = [Design::D1, Design::D2, Design::D3, Design::D4];

    /// The covariate for one dyad given both nodes' latents.
    #[inline]
    pub fn covariate(self, a_i: f64, theta_i: f64, b_j: f64, xi_j: f64) -> f64 {
        match self {
            Design::D1 => -(a_i - b_j).abs(),
            Design::D2 => -(a_i - b_j).abs() + theta_i + xi_j,
            Design::D3 => indicator(a_i - b_j > 0.0),
            Design::D4 => indicator(a_i - b_j + theta_i + xi_j > 0.0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Design::D1 => "d1",
            Design::D2 => "d2",
            Design::D3 => "d3",
            Design::D4 => "d4",
        }
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Design {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d1" | "1" => Ok(Design::D1),
            "d2" | "2" => Ok(Design::D2),
            "d3" | "3" => Ok(Design::D3),
            "d4" | "4" => Ok(Design::D4),
            other => Err(Error::InvalidInput(format!("unknown design `{other}` (expected d1..d4)"))),
        }
    }
}

/// One dataset with unit error variance.
pub fn generate(design: Design, n_nodes: usize, beta1: f64, rep_seed: u64) -> Result<DyadicDataset> {
    generate_with_noise(design, n_nodes, beta1, 1.0, rep_seed)
}

/// One dataset with errors scaled by `sigma_u` (zero gives an exact fit).
///
/// Draw order from the replication stream: `A`, `B`, `θ`, `ξ` (each length
/// `N`), then `U` over off-diagonal cells in row-major order.
pub fn generate_with_noise(
    design: Design,
    n_nodes: usize,
    beta1: f64,
    sigma_u: f64,
    rep_seed: u64,
) -> Result<DyadicDataset> {
    if n_nodes < 4 {
        return Err(Error::DegenerateSize { n: n_nodes });
    }
    if !sigma_u.is_finite() || sigma_u < 0.0 || !beta1.is_finite() {
        return Err(Error::InvalidInput(format!("beta1 = {beta1}, sigma_u = {sigma_u}")));
    }
    let mut rng = stream(rep_seed);
    let beta22 = Beta::new(2.0, 2.0).expect("valid Beta parameters");
    let centred = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        (0..n_nodes).map(|_| beta22.sample(rng) - 0.5).collect()
    };
    let a = centred(&mut rng);
    let b = centred(&mut rng);
    let normals = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        (0..n_nodes).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
    };
    let theta = normals(&mut rng);
    let xi = normals(&mut rng);
    let mut u = Array2::<f64>::zeros((n_nodes, n_nodes));
    for i in 0..n_nodes {
        for j in 0..n_nodes {
            if i != j {
                u[[i, j]] = sigma_u * rng.sample::<f64, _>(StandardNormal);
            }
        }
    }
    let x = Array2::from_shape_fn((n_nodes, n_nodes), |(i, j)| {
        if i == j {
            0.0
        } else {
            design.covariate(a[i], theta[i], b[j], xi[j])
        }
    });
    let y = Array2::from_shape_fn((n_nodes, n_nodes), |(i, j)| {
        if i == j {
            0.0
        } else {
            beta1 * x[[i, j]] + theta[i] + xi[j] + u[[i, j]]
        }
    });
    let latent = LatentTruth { a, b, theta, xi, u, beta1 };
    DyadicDataset::new(y, x)?.with_latent(latent)
}
