//! Monte Carlo and quadrature checks of the variance theory.
//!
//! Every expectation here is a sample mean over independent draws with a
//! reported standard error. Draw `d` of a check seeded with `s` uses the
//! stream `derive(s, d)`, so results do not depend on the worker count.

pub mod closed_form;
pub mod condmean;
pub mod deltaq;
pub mod hoeffding;
pub mod projection;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use ndarray::Array2;

use crate::combinatorics::{binomial, combinations4};
use crate::differencing::kernel_s;
use crate::error::Result;
use crate::simulate::rng::derive;

pub use closed_form::closed_form_delta2;
pub use condmean::CondMeanSpec;
pub use deltaq::{estimate_delta_q, DeltaQReport};
pub use hoeffding::{hoeffding_check, hoeffding_variance, HoeffdingReport};
pub use projection::{equivalence_gap, hajek_projections, projection_variance_check, ProjectionReport, ProjectionValue};

/// A Monte Carlo mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    /// Sample mean with `sd / √n`.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let m = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
        Self { value: m, se: (var / n).sqrt() }
    }

    pub fn scaled(self, c: f64) -> Self {
        Self { value: c * self.value, se: c.abs() * self.se }
    }

    /// Standard-error multiples separating `self` from a fixed target.
    pub fn z_against(&self, target: f64) -> f64 {
        (self.value - target) / self.se
    }

    /// Standard-error multiples between two independent estimates.
    pub fn z_between(&self, other: &Estimate) -> f64 {
        (self.value - other.value) / self.se.hypot(other.se)
    }
}

/// Runs `f` once per draw on the rayon pool and returns results in draw order.
pub fn par_draws<T, F>(n_draws: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    (0..n_draws as u64)
        .into_par_iter()
        .map(|d| f(derive(seed, d)))
        .collect()
}

/// Sub-seed for one named part of a composite check.
pub(crate) fn sub_seed(seed: u64, part: u64) -> u64 {
    derive(seed ^ 0xA5A5_A5A5_A5A5_A5A5, part)
}

/// The score statistic at the truth: the average kernel over all
/// combinations, by full enumeration.
pub fn u_statistic(x: &Array2<f64>, u: &Array2<f64>) -> Result<f64> {
    let n = x.nrows();
    let mut acc = 0.0;
    for c in combinations4(n)? {
        acc += kernel_s(x, u, c);
    }
    Ok(acc / binomial(n, 4) as f64)
}

/// Sample covariance `1/(n−1) Σ (a − ā)(b − b̄)` and the standard error of
/// the mean of the centred products.
pub fn covariance(a: &[f64], b: &[f64]) -> Estimate {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let prods: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).collect();
    let e = Estimate::from_samples(&prods);
    Estimate { value: e.value * n / (n - 1.0), se: e.se }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_basics() {
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.value, 2.5);
        assert!((e.se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(e.z_against(2.5), 0.0);
        let c = covariance(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]);
        assert!((c.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn u_statistic_zero_noise() {
        let x = Array2::from_shape_fn((6, 6), |(i, j)| (i * j) as f64);
        let u = Array2::zeros((6, 6));
        assert_eq!(u_statistic(&x, &u).unwrap(), 0.0);
    }
}
