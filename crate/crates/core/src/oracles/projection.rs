//! Hájek projections of the score statistic with true conditional means.
//!
//! With `h_ij = x_ij − E[X|ego_i] − E[X|alter_j] + E[X]`,
//!
//! ```text
//! Û₁ = 4/(N(N−1)) Σ_{i≠j} h_ij u_ij
//! Û₂ = 4/(N(N−1)) Σ_{i<j} (h_ij u_ij + h_ji u_ji)
//! ```
//!
//! Both contain the same `N(N−1)` terms; only the grouping differs.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::DyadicDataset;
use crate::error::{Error, Result};
use crate::oracles::condmean::CondMeanSpec;
use crate::oracles::deltaq::estimate_delta_q_scaled;
use crate::oracles::{covariance, par_draws, sub_seed, u_statistic, Estimate};
use crate::simulate::design::{generate_with_noise, Design};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionValue {
    pub u_n: f64,
    pub hajek1: f64,
    pub hajek2: f64,
}

/// The centred covariate `h` of a simulated dataset; zero diagonal.
pub fn centred_covariate(data: &DyadicDataset, spec: &CondMeanSpec) -> Result<Array2<f64>> {
    let lat = data
        .latent()
        .ok_or_else(|| Error::OracleInput("projections need the latent truth of a simulated dataset".into()))?;
    let n = data.n_nodes();
    let ego: Vec<f64> = (0..n).map(|i| spec.mean_given_ego(lat.a[i], lat.theta[i])).collect();
    let alter: Vec<f64> = (0..n).map(|j| spec.mean_given_alter(lat.b[j], lat.xi[j])).collect();
    let x = data.x();
    Ok(Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            0.0
        } else {
            x[[i, j]] - ego[i] - alter[j] + spec.grand_mean()
        }
    }))
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    carry: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn hajek_projections(data: &DyadicDataset, spec: &CondMeanSpec) -> Result<ProjectionValue> {
    let h = centred_covariate(data, spec)?;
    let u = &data.latent().expect("checked by centred_covariate").u;
    let n = data.n_nodes();
    let scale = 4.0 / (n * (n - 1)) as f64;
    // compensated sums, so the two groupings agree to rounding of the total
    let mut directed = Neumaier::default();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                directed.add(h[[i, j]] * u[[i, j]]);
            }
        }
    }
    let mut paired = Neumaier::default();
    for i in 0..n {
        for j in i + 1..n {
            paired.add(h[[i, j]] * u[[i, j]]);
            paired.add(h[[j, i]] * u[[j, i]]);
        }
    }
    Ok(ProjectionValue {
        u_n: u_statistic(data.x(), u)?,
        hajek1: scale * directed.total(),
        hajek2: scale * paired.total(),
    })
}

fn projection_draws(
    design: Design,
    n_nodes: usize,
    n_draws: usize,
    seed: u64,
    sigma_u: f64,
) -> Result<Vec<ProjectionValue>> {
    let spec = CondMeanSpec::new(design);
    par_draws(n_draws, seed, |s| {
        let data = generate_with_noise(design, n_nodes, 0.0, sigma_u, s)?;
        hajek_projections(&data, &spec)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub design: Design,
    pub n_nodes: usize,
    pub draws: usize,
    pub seed: u64,
    pub sigma_u: f64,
    /// Largest `|Û₁ − Û₂| / max(|Û₁|, |Û₂|)` over draws.
    pub max_rel_gap_12: f64,
    /// `Var(√(N(N−1)) Û₁)`.
    pub var_hajek1: Estimate,
    /// `Var(√(N(N−1)) Û₂)`.
    pub var_hajek2: Estimate,
    /// `Var(√(N(N−1)) U_N)`.
    pub var_u_n: Estimate,
    /// `144 δ₂` from independent 8-node draws.
    pub target_delta: Estimate,
    /// `72 Δ₂` from the same 8-node draws.
    pub target_pair: Estimate,
    pub z_delta: f64,
    pub z_pair: f64,
    /// `N(N−1) [Cov(U_N, Û₁) − Var(Û₁)]`, paired within draws.
    pub orthogonality_gap: Estimate,
}

/// Variance identities for both projections at one `N`.
pub fn projection_variance_check(
    design: Design,
    n_nodes: usize,
    n_draws: usize,
    seed: u64,
    sigma_u: f64,
) -> Result<ProjectionReport> {
    if n_draws < crate::oracles::deltaq::MIN_DRAWS {
        return Err(Error::OracleInput(format!(
            "need at least {} draws, got {n_draws}",
            crate::oracles::deltaq::MIN_DRAWS
        )));
    }
    let vals = projection_draws(design, n_nodes, n_draws, sub_seed(seed, 0), sigma_u)?;
    let root = ((n_nodes * (n_nodes - 1)) as f64).sqrt();
    let h1: Vec<f64> = vals.iter().map(|v| root * v.hajek1).collect();
    let h2: Vec<f64> = vals.iter().map(|v| root * v.hajek2).collect();
    let un: Vec<f64> = vals.iter().map(|v| root * v.u_n).collect();
    let max_rel_gap_12 = vals
        .iter()
        .map(|v| {
            let d = (v.hajek1 - v.hajek2).abs();
            if d == 0.0 {
                0.0
            } else {
                d / v.hajek1.abs().max(v.hajek2.abs())
            }
        })
        .fold(0.0, f64::max);
    let n = n_draws as f64;
    let m1 = h1.iter().sum::<f64>() / n;
    let mu = un.iter().sum::<f64>() / n;
    let orth: Vec<f64> = h1
        .iter()
        .zip(&un)
        .map(|(a, b)| (a - m1) * (b - mu) - (a - m1) * (a - m1))
        .collect();

    let dq = estimate_delta_q_scaled(design, n_draws, sub_seed(seed, 1), sigma_u)?;
    let target_delta = dq.delta2_small.scaled(144.0);
    let target_pair = dq.delta_q[2].scaled(72.0);
    let var_hajek1 = covariance(&h1, &h1);
    let var_hajek2 = covariance(&h2, &h2);
    Ok(ProjectionReport {
        design,
        n_nodes,
        draws: n_draws,
        seed,
        sigma_u,
        max_rel_gap_12,
        var_hajek1,
        var_hajek2,
        var_u_n: covariance(&un, &un),
        target_delta,
        target_pair,
        z_delta: var_hajek1.z_between(&target_delta),
        z_pair: var_hajek2.z_between(&target_pair),
        orthogonality_gap: Estimate::from_samples(&orth),
    })
}

/// `N(N−1) E[(Û₁ − U_N)²]` by simulation.
pub fn equivalence_gap(design: Design, n_nodes: usize, n_draws: usize, seed: u64) -> Result<Estimate> {
    let vals = projection_draws(design, n_nodes, n_draws, seed, 1.0)?;
    let nn1 = (n_nodes * (n_nodes - 1)) as f64;
    let sq: Vec<f64> = vals.iter().map(|v| nn1 * (v.hajek1 - v.u_n).powi(2)).collect();
    Ok(Estimate::from_samples(&sq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::rng::derive;

    #[test]
    fn projections_agree_on_every_draw() {
        for d in Design::ALL {
            let spec = CondMeanSpec::new(d);
            for r in 0..5 {
                let data = generate_with_noise(d, 9, 0.0, 1.0, derive(4, r)).unwrap();
                let p = hajek_projections(&data, &spec).unwrap();
                assert!((p.hajek1 - p.hajek2).abs() <= 1e-12 * p.hajek1.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn zero_noise_gives_zero() {
        let spec = CondMeanSpec::new(Design::D1);
        let data = generate_with_noise(Design::D1, 7, 0.0, 0.0, 3).unwrap();
        let p = hajek_projections(&data, &spec).unwrap();
        assert_eq!((p.u_n, p.hajek1, p.hajek2), (0.0, 0.0, 0.0));
    }

    #[test]
    fn needs_latent_truth() {
        let data = generate_with_noise(Design::D1, 6, 0.0, 1.0, 3).unwrap();
        let bare = DyadicDataset::new(data.y().clone(), data.x().clone()).unwrap();
        assert!(matches!(
            hajek_projections(&bare, &CondMeanSpec::new(Design::D1)),
            Err(Error::OracleInput(_))
        ));
    }

    #[test]
    fn projection_variance_scales_with_noise() {
        let a = projection_draws(Design::D1, 6, 200, 8, 1.0).unwrap();
        let b = projection_draws(Design::D1, 6, 200, 8, 3.0).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((q.hajek1 - 3.0 * p.hajek1).abs() <= 1e-12 * q.hajek1.abs().max(1e-12));
        }
    }

    #[test]
    fn centred_covariate_is_additively_clean() {
        // h differs from x by sender and receiver terms only
        let spec = CondMeanSpec::new(Design::D2);
        let data = generate_with_noise(Design::D2, 6, 0.0, 1.0, 5).unwrap();
        let h = centred_covariate(&data, &spec).unwrap();
        let diff = data.x() - &h;
        for c in crate::combinatorics::combinations4(6).unwrap() {
            for t in crate::combinatorics::permutations(c) {
                assert!(crate::differencing::tilde(&diff, t).abs() < 1e-12);
            }
        }
    }
}
