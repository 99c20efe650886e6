//! Exact finite-`N` variance of the score statistic from the `Δ_q`.
//!
//! ```text
//! Var(U_N) = C(N,4)⁻¹ Σ_q C(4,q) C(N−4, 4−q) Δ_q
//! ```

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, pairs_with_q_common};
use crate::error::{Error, Result};
use crate::oracles::deltaq::{delta_q_draws, linear_combination};
use crate::oracles::{par_draws, sub_seed, u_statistic, Estimate};
use crate::simulate::design::{generate, Design};

/// Weights `C(4,q) C(N−4,4−q) / C(N,4)` for `q = 0 … 4`.
pub fn hoeffding_weights(n_nodes: usize) -> Result<[f64; 5]> {
    if n_nodes < 4 {
        return Err(Error::DegenerateSize { n: n_nodes });
    }
    let total = binomial(n_nodes, 4) as f64;
    Ok(std::array::from_fn(|q| pairs_with_q_common(n_nodes, q) as f64 / total))
}

pub fn hoeffding_variance(delta_q: &[f64; 5], n_nodes: usize) -> Result<f64> {
    let w = hoeffding_weights(n_nodes)?;
    Ok(w.iter().zip(delta_q).map(|(w, d)| w * d).sum())
}

/// Monte Carlo `Var(U_N)` at the truth, each draw a fresh `n_nodes` network.
pub fn direct_variance(design: Design, n_nodes: usize, n_draws: usize, seed: u64) -> Result<Estimate> {
    let values = par_draws(n_draws, seed, |s| {
        let data = generate(design, n_nodes, 0.0, s)?;
        u_statistic(data.x(), &data.latent().expect("simulated").u)
    })?;
    Ok(crate::oracles::covariance(&values, &values))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoeffdingReport {
    pub design: Design,
    pub n_nodes: usize,
    pub draws: usize,
    pub seed: u64,
    /// `Var(U_N)` from direct simulation.
    pub direct: Estimate,
    /// The weighted `Δ_q` sum from an independent set of 8-node draws.
    pub formula: Estimate,
    pub z: f64,
}

/// Direct `Var(U_N)` against the weighted `Δ_q` sum, on separate draw sets.
pub fn hoeffding_check(design: Design, n_nodes: usize, n_draws: usize, seed: u64) -> Result<HoeffdingReport> {
    let direct = direct_variance(design, n_nodes, n_draws, sub_seed(seed, 0))?;
    let draws = delta_q_draws(design, n_draws, sub_seed(seed, 1), 1.0)?;
    let formula = linear_combination(&draws, hoeffding_weights(n_nodes)?);
    Ok(HoeffdingReport {
        design,
        n_nodes,
        draws: n_draws,
        seed,
        direct,
        formula,
        z: direct.z_between(&formula),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_nodes() {
        let w = hoeffding_weights(5).unwrap();
        assert_eq!(w, [0.0, 0.0, 0.0, 0.8, 0.2]);
        let v = hoeffding_variance(&[9.0, 9.0, 9.0, 2.0, 3.0], 5).unwrap();
        assert!((v - (3.0 + 4.0 * 2.0) / 5.0).abs() < 1e-15);
    }

    #[test]
    fn zero_inputs() {
        assert_eq!(hoeffding_variance(&[0.0; 5], 17).unwrap(), 0.0);
        assert!(hoeffding_variance(&[1.0; 5], 3).is_err());
    }

    #[test]
    fn weights_sum_to_one() {
        for n in 4..60 {
            let s: f64 = hoeffding_weights(n).unwrap().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_variance_approaches_pair_term() {
        // N(N−1) Var(U_N) → 72 Δ₂ for fixed Δ_q
        let d = [0.0, 0.0, 0.01, 0.05, 0.2];
        let gap = |n: usize| {
            let v = hoeffding_variance(&d, n).unwrap() * (n * (n - 1)) as f64;
            (v - 72.0 * d[2]).abs() / (72.0 * d[2])
        };
        assert!(gap(30) < gap(10));
        assert!(gap(100) < gap(30));
    }
}
