//! Pairwise-differences least squares.
//!
//! `β̂ = Σ x̃ỹ / Σ x̃²` over every ordered tetrad of distinct nodes. The
//! [`FitPath::Naive`] path walks the tetrads combination by combination; the
//! [`FitPath::Reduced`] path gets the same two sums from row, column and
//! total margins in `O(N²)` (see [`ordered_cross_sum`]).

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, combinations4, ordered_tetrads, permutations};
use crate::data::DyadicDataset;
use crate::differencing::{ordered_cross_sum, tilde};
use crate::error::{Error, Result};

/// Which summation strategy to use for tetrad sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FitPath {
    /// Full enumeration of combinations and their 24 orderings.
    Naive,
    /// Margin-based algebra, `O(N²)` for the fit and `O(N³)` for the scores.
    Reduced,
}

impl FitPath {
    /// Reduced above 40 nodes, naive otherwise.
    pub fn default_for(n_nodes: usize) -> Self {
        if n_nodes > 40 {
            FitPath::Reduced
        } else {
            FitPath::Naive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FitPath::Naive => "naive",
            FitPath::Reduced => "reduced",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub beta_hat: f64,
    /// Tetrad average of `x̃²`.
    pub gamma_hat: f64,
    /// Tetrad average of `x̃ ỹ`; `beta_hat = score_hat / gamma_hat`.
    pub score_hat: f64,
    pub n_nodes: usize,
    pub path: FitPath,
}

fn mean_offdiag_sq(x: &Array2<f64>) -> f64 {
    let n = x.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += x[[i, j]] * x[[i, j]];
            }
        }
    }
    acc / (n * (n - 1)) as f64
}

fn check_hessian(gamma: f64, x: &Array2<f64>) -> Result<f64> {
    let threshold = 1e-12 * mean_offdiag_sq(x);
    if !(gamma > threshold) {
        return Err(Error::DegenerateHessian { gamma, threshold });
    }
    Ok(gamma)
}

/// Combination-by-combination accumulation of `(Σ x̃², Σ x̃ỹ)`, each
/// combination averaged over its orderings first.
fn naive_sums(x: &Array2<f64>, y: &Array2<f64>) -> Result<(f64, f64)> {
    let n = x.nrows();
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for c in combinations4(n)? {
        let mut cxx = 0.0;
        let mut cxy = 0.0;
        for t in permutations(c) {
            let xt = tilde(x, t);
            cxx += xt * xt;
            cxy += xt * tilde(y, t);
        }
        sxx += cxx / 24.0;
        sxy += cxy / 24.0;
    }
    let combos = binomial(n, 4) as f64;
    Ok((sxx / combos, sxy / combos))
}

/// `Γ̂` by full enumeration.
pub fn hessian_naive(data: &DyadicDataset) -> Result<f64> {
    let (gamma, _) = naive_sums(data.x(), data.x())?;
    check_hessian(gamma, data.x())
}

/// `Γ̂` from margins in `O(N²)`.
pub fn hessian_reduced(data: &DyadicDataset) -> Result<f64> {
    let n = data.n_nodes();
    let gamma = ordered_cross_sum(data.x(), data.x()) / ordered_tetrads(n) as f64;
    check_hessian(gamma, data.x())
}

pub fn fit(data: &DyadicDataset, path: FitPath) -> Result<FitResult> {
    let n = data.n_nodes();
    let (gamma, score) = match path {
        FitPath::Naive => naive_sums(data.x(), data.y())?,
        FitPath::Reduced => {
            let count = ordered_tetrads(n) as f64;
            (
                ordered_cross_sum(data.x(), data.x()) / count,
                ordered_cross_sum(data.x(), data.y()) / count,
            )
        }
    };
    let gamma = check_hessian(gamma, data.x())?;
    Ok(FitResult {
        beta_hat: score / gamma,
        gamma_hat: gamma,
        score_hat: score,
        n_nodes: n,
        path,
    })
}

/// Dyad-level residuals `û_ij = y_ij − β̂ x_ij`; the diagonal is zero.
///
/// `û` still carries the fixed effects, which the tetrad transform removes:
/// `tilde(û) = ỹ − β̂ x̃`.
pub fn residual_matrix(data: &DyadicDataset, beta_hat: f64) -> Array2<f64> {
    let (x, y) = (data.x(), data.y());
    Array2::from_shape_fn(y.dim(), |(i, j)| {
        if i == j {
            0.0
        } else {
            y[[i, j]] - beta_hat * x[[i, j]]
        }
    })
}

/// Slope from classical two-way fixed-effects OLS on the same dyads.
///
/// Diagnostic only: sender and receiver means are swept out of `x` and `y`
/// by alternating projections over off-diagonal cells until the update is
/// below `tol`, then the slope of the swept variables is returned.
pub fn two_way_fe_slope(data: &DyadicDataset, tol: f64, max_sweeps: usize) -> Result<f64> {
    let sweep = |m: &Array2<f64>| -> Array2<f64> {
        let n = m.nrows();
        let mut r = m.clone();
        for i in 0..n {
            r[[i, i]] = 0.0;
        }
        for _ in 0..max_sweeps {
            let mut change: f64 = 0.0;
            for i in 0..n {
                let mean = (0..n).filter(|&j| j != i).map(|j| r[[i, j]]).sum::<f64>() / (n - 1) as f64;
                change = change.max(mean.abs());
                for j in 0..n {
                    if j != i {
                        r[[i, j]] -= mean;
                    }
                }
            }
            for j in 0..n {
                let mean = (0..n).filter(|&i| i != j).map(|i| r[[i, j]]).sum::<f64>() / (n - 1) as f64;
                change = change.max(mean.abs());
                for i in 0..n {
                    if i != j {
                        r[[i, j]] -= mean;
                    }
                }
            }
            if change < tol {
                break;
            }
        }
        r
    };
    let xs = sweep(data.x());
    let ys = sweep(data.y());
    let sxx: f64 = xs.iter().map(|v| v * v).sum();
    let sxy: f64 = xs.iter().zip(ys.iter()).map(|(a, b)| a * b).sum();
    check_hessian(sxx / (data.n_nodes() * (data.n_nodes() - 1)) as f64, data.x())?;
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn product_x(n: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        Array2::from_shape_fn((n, n), |(i, j)| a[i] * b[j])
    }

    fn noise(n: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, n), |_| rng.random_range(-1.0..1.0))
    }

    fn brute_force_gamma(x: &Array2<f64>) -> f64 {
        let n = x.nrows();
        let mut acc = 0.0;
        let mut count = 0usize;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        if i == j || i == k || i == l || j == k || j == l || k == l {
                            continue;
                        }
                        let v = x[[i, j]] - x[[i, k]] - x[[l, j]] + x[[l, k]];
                        acc += v * v;
                        count += 1;
                    }
                }
            }
        }
        acc / count as f64
    }

    #[test]
    fn additive_x_is_degenerate() {
        let n = 7;
        let x = Array2::from_shape_fn((n, n), |(i, j)| i as f64 * 0.3 - j as f64 * 1.7);
        let d = DyadicDataset::new(noise(n, 1), x).unwrap();
        assert!(matches!(hessian_naive(&d), Err(Error::DegenerateHessian { .. })));
        assert!(matches!(hessian_reduced(&d), Err(Error::DegenerateHessian { .. })));
        assert!(matches!(fit(&d, FitPath::Reduced), Err(Error::DegenerateHessian { .. })));
    }

    #[test]
    fn product_x_matches_brute_force() {
        let x = product_x(7, 3);
        let d = DyadicDataset::new(noise(7, 4), x.clone()).unwrap();
        let g = hessian_naive(&d).unwrap();
        assert!(g > 0.0);
        let brute = brute_force_gamma(&x);
        assert!((g - brute).abs() < 1e-12 * brute);
        let r = hessian_reduced(&d).unwrap();
        assert!((r - brute).abs() < 1e-9 * brute);
    }

    #[test]
    fn hessian_scales_quadratically() {
        let x = product_x(6, 5);
        let d1 = DyadicDataset::new(noise(6, 6), x.clone()).unwrap();
        let d2 = DyadicDataset::new(noise(6, 6), x * 3.0).unwrap();
        let (g1, g2) = (hessian_naive(&d1).unwrap(), hessian_naive(&d2).unwrap());
        assert!((g2 - 9.0 * g1).abs() < 1e-12 * g2);
    }

    #[test]
    fn exact_fit_recovers_slope() {
        let n = 8;
        let x = noise(n, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let th: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let xi: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let y = Array2::from_shape_fn((n, n), |(i, j)| 2.0 * x[[i, j]] + th[i] + xi[j]);
        let d = DyadicDataset::new(y, x).unwrap();
        for path in [FitPath::Naive, FitPath::Reduced] {
            let f = fit(&d, path).unwrap();
            assert!((f.beta_hat - 2.0).abs() < 1e-10, "{path:?}: {}", f.beta_hat);
            assert_eq!(f.path, path);
        }
        let resid = residual_matrix(&d, fit(&d, FitPath::Naive).unwrap().beta_hat);
        for c in combinations4(n).unwrap() {
            for t in permutations(c) {
                assert!(tilde(&resid, t).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn residual_identity() {
        let n = 9;
        let d = DyadicDataset::new(noise(n, 10), noise(n, 11)).unwrap();
        let f = fit(&d, FitPath::Naive).unwrap();
        let r = residual_matrix(&d, f.beta_hat);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let mut nodes = [0usize; 4];
            loop {
                for v in nodes.iter_mut() {
                    *v = rng.random_range(0..n);
                }
                if crate::combinatorics::Tetrad::new(nodes).is_ok() {
                    break;
                }
            }
            let t = crate::combinatorics::Tetrad(nodes);
            let lhs = tilde(&r, t);
            let rhs = tilde(d.y(), t) - f.beta_hat * tilde(d.x(), t);
            assert!((lhs - rhs).abs() < 1e-12);
        }
        let zero = residual_matrix(&d, 0.0);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    assert_eq!(zero[[i, j]], d.y()[[i, j]]);
                }
            }
        }
    }

    #[test]
    fn paths_agree() {
        for (n, seed) in [(6, 1), (10, 2), (13, 3)] {
            let d = DyadicDataset::new(noise(n, seed), noise(n, seed + 50)).unwrap();
            let a = fit(&d, FitPath::Naive).unwrap();
            let b = fit(&d, FitPath::Reduced).unwrap();
            assert!((a.beta_hat - b.beta_hat).abs() <= 1e-9 * a.beta_hat.abs());
            assert!((a.gamma_hat - b.gamma_hat).abs() <= 1e-9 * a.gamma_hat);
        }
    }

    #[test]
    fn two_way_fe_runs_on_exact_fit() {
        let n = 8;
        let x = noise(n, 20);
        let y = Array2::from_shape_fn((n, n), |(i, j)| -1.5 * x[[i, j]] + i as f64 - 2.0 * j as f64);
        let d = DyadicDataset::new(y, x).unwrap();
        let slope = two_way_fe_slope(&d, 1e-14, 10_000).unwrap();
        assert!((slope + 1.5).abs() < 1e-8);
    }
}
