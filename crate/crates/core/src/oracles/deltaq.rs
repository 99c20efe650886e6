//! Covariances `Δ_q` of two kernels whose combinations share `q` nodes.
//!
//! Each draw builds an 8-node network and evaluates the kernel on a fixed
//! first combination `{0,1,2,3}` and on one partner per `q`. The same draw
//! also yields the projections `s̄_ij = h_ij u_ij / 3` used for `δ₂`.

use serde::{Deserialize, Serialize};

use crate::combinatorics::Combination;
use crate::differencing::kernel_s;
use crate::error::{Error, Result};
use crate::oracles::condmean::CondMeanSpec;
use crate::oracles::{covariance, par_draws, Estimate};
use crate::simulate::design::{generate_with_noise, Design};

pub const FIRST: [usize; 4] = [0, 1, 2, 3];

/// Partner of [`FIRST`] sharing exactly `q` nodes, indexed by `q`.
pub const PARTNERS: [[usize; 4]; 5] = [
    [4, 5, 6, 7],
    [3, 4, 5, 6],
    [0, 1, 4, 5],
    [1, 2, 3, 4],
    [0, 1, 2, 3],
];

/// A second `q = 2` partner with the shared pair in other positions.
pub const Q2_ALTERNATE: [usize; 4] = [2, 3, 4, 5];

pub const MIN_DRAWS: usize = 10_000;

/// Kernel values and projections from one 8-node draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaQDraw {
    pub first: f64,
    pub partners: [f64; 5],
    pub q2_alternate: f64,
    /// `s̄_01 + s̄_10`: the pair projection shared by `FIRST` and `PARTNERS[2]`.
    pub pair_projection: f64,
    /// Mean of `s̄_ij²` over all 56 directed dyads of the draw.
    pub mean_sq_projection: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaQReport {
    pub design: Design,
    pub draws: usize,
    pub seed: u64,
    /// `Δ₀ … Δ₄`.
    pub delta_q: [Estimate; 5],
    /// `Δ₂` from [`Q2_ALTERNATE`].
    pub delta2_alternate: Estimate,
    /// `δ₂ = E[s̄_ij²]`.
    pub delta2_small: Estimate,
    /// `Δ₂ − 2δ₂`, paired within draws.
    pub pair_gap: Estimate,
}

fn combo(nodes: [usize; 4]) -> Combination {
    Combination::new(nodes).expect("fixed index sets are distinct")
}

pub fn delta_q_draw(design: Design, spec: &CondMeanSpec, sigma_u: f64, draw_seed: u64) -> Result<DeltaQDraw> {
    let data = generate_with_noise(design, 8, 0.0, sigma_u, draw_seed)?;
    let lat = data.latent().expect("simulated data carries its latent truth");
    let (x, u) = (data.x(), &lat.u);
    let first = kernel_s(x, u, combo(FIRST));
    let partners = PARTNERS.map(|p| kernel_s(x, u, combo(p)));
    let q2_alternate = kernel_s(x, u, combo(Q2_ALTERNATE));

    let ego: Vec<f64> = (0..8).map(|i| spec.mean_given_ego(lat.a[i], lat.theta[i])).collect();
    let alter: Vec<f64> = (0..8).map(|j| spec.mean_given_alter(lat.b[j], lat.xi[j])).collect();
    let s_bar = |i: usize, j: usize| (x[[i, j]] - ego[i] - alter[j] + spec.grand_mean()) * u[[i, j]] / 3.0;
    let mut sq = 0.0;
    for i in 0..8 {
        for j in 0..8 {
            if i != j {
                sq += s_bar(i, j).powi(2);
            }
        }
    }
    Ok(DeltaQDraw {
        first,
        partners,
        q2_alternate,
        pair_projection: s_bar(0, 1) + s_bar(1, 0),
        mean_sq_projection: sq / 56.0,
    })
}

pub fn delta_q_draws(design: Design, n_draws: usize, seed: u64, sigma_u: f64) -> Result<Vec<DeltaQDraw>> {
    let spec = CondMeanSpec::new(design);
    par_draws(n_draws, seed, |s| delta_q_draw(design, &spec, sigma_u, s))
}

/// `Σ_q c_q Δ_q` with a standard error from the per-draw combination of
/// centred products.
pub fn linear_combination(draws: &[DeltaQDraw], coeffs: [f64; 5]) -> Estimate {
    let n = draws.len() as f64;
    let m_first = draws.iter().map(|d| d.first).sum::<f64>() / n;
    let m_partner: [f64; 5] =
        std::array::from_fn(|q| draws.iter().map(|d| d.partners[q]).sum::<f64>() / n);
    let z: Vec<f64> = draws
        .iter()
        .map(|d| {
            (0..5)
                .map(|q| coeffs[q] * (d.first - m_first) * (d.partners[q] - m_partner[q]))
                .sum()
        })
        .collect();
    let e = Estimate::from_samples(&z);
    Estimate { value: e.value * n / (n - 1.0), se: e.se }
}

/// Monte Carlo `Δ₀ … Δ₄` and `δ₂` with unit error variance.
pub fn estimate_delta_q(design: Design, n_draws: usize, seed: u64) -> Result<DeltaQReport> {
    estimate_delta_q_scaled(design, n_draws, seed, 1.0)
}

pub fn estimate_delta_q_scaled(design: Design, n_draws: usize, seed: u64, sigma_u: f64) -> Result<DeltaQReport> {
    if n_draws < MIN_DRAWS {
        return Err(Error::OracleInput(format!("need at least {MIN_DRAWS} draws, got {n_draws}")));
    }
    let draws = delta_q_draws(design, n_draws, seed, sigma_u)?;
    let first: Vec<f64> = draws.iter().map(|d| d.first).collect();
    let delta_q: [Estimate; 5] = std::array::from_fn(|q| {
        let partner: Vec<f64> = draws.iter().map(|d| d.partners[q]).collect();
        covariance(&first, &partner)
    });
    let alt: Vec<f64> = draws.iter().map(|d| d.q2_alternate).collect();
    let delta2_small = Estimate::from_samples(&draws.iter().map(|d| d.mean_sq_projection).collect::<Vec<_>>());
    // E[s_a s_b] = E[(s̄_01 + s̄_10)²] = 2δ₂ when the shared pair is {0, 1}
    let m_first = first.iter().sum::<f64>() / n_draws as f64;
    let m_second = draws.iter().map(|d| d.partners[2]).sum::<f64>() / n_draws as f64;
    let gap: Vec<f64> = draws
        .iter()
        .map(|d| (d.first - m_first) * (d.partners[2] - m_second) - d.pair_projection.powi(2))
        .collect();
    Ok(DeltaQReport {
        design,
        draws: n_draws,
        seed,
        delta_q,
        delta2_alternate: covariance(&first, &alt),
        delta2_small,
        pair_gap: Estimate::from_samples(&gap),
    })
}
