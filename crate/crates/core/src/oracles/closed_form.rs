//! `Δ₂` as a weighted sum of ten covariate moments.
//!
//! ```text
//! Δ₂ = σ_u² / 24² · Σ_k c_k E[x̃_{t_k} x̃_{t'_k}]
//! ```
//!
//! over tetrads on six nodes, where the two tetrads of each moment share the
//! pair `{0, 1}` (one-based `{1, 2}`).

use serde::{Deserialize, Serialize};

use crate::combinatorics::Tetrad;
use crate::differencing::tilde;
use crate::error::{Error, Result};
use crate::oracles::{par_draws, Estimate};
use crate::simulate::design::{generate, Design};

/// `(c_k, t_k, t'_k)` with 0-based node labels.
pub const CLOSED_FORM_TERMS: [(f64, [usize; 4], [usize; 4]); 10] = [
    (8.0, [0, 1, 2, 3], [0, 1, 4, 5]),
    (-16.0, [0, 1, 2, 3], [0, 4, 1, 5]),
    (-16.0, [0, 1, 2, 3], [4, 1, 5, 0]),
    (16.0, [0, 1, 2, 3], [5, 4, 1, 0]),
    (8.0, [0, 2, 1, 3], [0, 4, 1, 5]),
    (16.0, [0, 2, 1, 3], [4, 1, 5, 0]),
    (-16.0, [0, 2, 1, 3], [5, 4, 1, 0]),
    (8.0, [2, 1, 3, 0], [4, 1, 5, 0]),
    (-16.0, [2, 1, 3, 0], [5, 4, 1, 0]),
    (8.0, [3, 2, 1, 0], [5, 4, 1, 0]),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormReport {
    pub design: Design,
    pub sigma_u2: f64,
    pub draws: usize,
    pub seed: u64,
    pub delta2: Estimate,
}

/// Monte Carlo evaluation of the moment display over `n_draws` six-node
/// networks.
pub fn closed_form_delta2(design: Design, sigma_u2: f64, n_draws: usize, seed: u64) -> Result<ClosedFormReport> {
    if !(sigma_u2 >= 0.0) || !sigma_u2.is_finite() {
        return Err(Error::OracleInput(format!("sigma_u2 must be finite and non-negative, got {sigma_u2}")));
    }
    if n_draws < 2 {
        return Err(Error::OracleInput("need at least 2 draws".into()));
    }
    let per_draw = par_draws(n_draws, seed, |s| {
        let data = generate(design, 6, 0.0, s)?;
        let x = data.x();
        Ok(CLOSED_FORM_TERMS
            .iter()
            .map(|(c, t1, t2)| c * tilde(x, Tetrad(*t1)) * tilde(x, Tetrad(*t2)))
            .sum::<f64>())
    })?;
    let moments = Estimate::from_samples(&per_draw);
    Ok(ClosedFormReport {
        design,
        sigma_u2,
        draws: n_draws,
        seed,
        delta2: moments.scaled(sigma_u2 / 576.0),
    })
}
