//! Plug-in asymptotic variance from the estimated dyad projections.
//!
//! `ŝ_ij` is the part of the kernel sum that loads on the directed error
//! `U_ij`, averaged over the `C(N−2, 2)` completions `{k, l}` of the dyad.
//! `ŝ_ij,2` is the same for the unordered pair, loading on `U_ij` or `U_ji`.
//! The terms are selected mechanically from the 24 orderings of each
//! combination: an ordering contributes to dyad `(i, j)` when `(i, j)` is one
//! of the four cells entering its `ũ`.
//!
//! ```text
//! δ̂₂ = 1/(N(N−1)) Σ_{i≠j} ŝ_ij²         avar_δ = 144 δ̂₂ / (N(N−1) Γ̂²)
//! Δ̂₂ = 2/(N(N−1)) Σ_{i<j} ŝ_ij,2²       avar_Δ =  72 Δ̂₂ / (N(N−1) Γ̂²)
//! ```

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, combinations4, permutations, Combination};
use crate::differencing::{margins, tilde};
use crate::error::{Error, Result};
use crate::estimator::{FitPath, FitResult};

/// Which variance estimator(s) to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
pub enum AvarMode {
    /// Directed-dyad projection, `144 δ̂₂`.
    #[value(name = "delta2")]
    #[serde(rename = "delta2")]
    Directed,
    /// Unordered-pair projection, `72 Δ̂₂`.
    #[value(name = "Delta2")]
    #[serde(rename = "Delta2")]
    Pair,
    #[value(name = "both")]
    #[serde(rename = "both")]
    Both,
}

impl AvarMode {
    pub fn wants_directed(self) -> bool {
        matches!(self, AvarMode::Directed | AvarMode::Both)
    }

    pub fn wants_pair(self) -> bool {
        matches!(self, AvarMode::Pair | AvarMode::Both)
    }
}

/// Estimated projections for every directed dyad and every unordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SBarEstimates {
    /// `s_bar[[i, j]] = ŝ_ij`; diagonal is zero.
    pub s_bar: Array2<f64>,
    /// `s_bar2[[i, j]] = ŝ_ij,2` for `i < j`; other cells are zero.
    pub s_bar2: Array2<f64>,
}

impl SBarEstimates {
    /// `ŝ_ij,2` with the pair given in either order.
    pub fn pair(&self, i: usize, j: usize) -> f64 {
        if i < j {
            self.s_bar2[[i, j]]
        } else {
            self.s_bar2[[j, i]]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AvarResult {
    pub delta2_hat: f64,
    #[serde(rename = "Delta2_hat")]
    pub pair_delta2_hat: f64,
    #[serde(rename = "avar_delta2")]
    pub avar_delta: f64,
    #[serde(rename = "avar_Delta2")]
    pub avar_pair: f64,
    #[serde(rename = "t_delta2")]
    pub t_delta: f64,
    #[serde(rename = "t_Delta2")]
    pub t_pair: f64,
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::DegenerateSize { n });
    }
    if i == j || i >= n || j >= n {
        return Err(Error::InvalidInput(format!("({i}, {j}) is not a dyad of a {n}-node network")));
    }
    Ok(())
}

/// `ŝ_ij` for one directed dyad.
///
/// The eight orderings of `{i, j, k, l}` that load on `U_ij` all contribute
/// `x̃_ijkl ũ_ijkl` for one of the two orders of `(k, l)`, so the average
/// collapses to a sum over ordered completions divided by `3 (N−2)(N−3)`.
pub fn s_bar_directed(x: &Array2<f64>, u_hat: &Array2<f64>, i: usize, j: usize) -> Result<f64> {
    let n = x.nrows();
    check_pair(n, i, j)?;
    let mut acc = 0.0;
    for k in 0..n {
        if k == i || k == j {
            continue;
        }
        for l in 0..n {
            if l == i || l == j || l == k {
                continue;
            }
            let t = crate::combinatorics::Tetrad([i, j, k, l]);
            acc += tilde(x, t) * tilde(u_hat, t);
        }
    }
    Ok(acc / (3 * (n - 2) * (n - 3)) as f64)
}

/// `ŝ_ij,2` for one unordered pair, by selecting the 16 orderings of each
/// completion `{i, j, k, l}` that load on `U_ij` or `U_ji`.
pub fn s_bar_pair(x: &Array2<f64>, u_hat: &Array2<f64>, i: usize, j: usize) -> Result<f64> {
    let n = x.nrows();
    check_pair(n, i, j)?;
    let mut acc = 0.0;
    for k in 0..n {
        if k == i || k == j {
            continue;
        }
        for l in k + 1..n {
            if l == i || l == j {
                continue;
            }
            let c = Combination::new([i, j, k, l])?;
            for t in permutations(c) {
                let hit = t
                    .signed_dyads()
                    .iter()
                    .any(|&(d, _)| d == (i, j) || d == (j, i));
                if hit {
                    acc += tilde(x, t) * tilde(u_hat, t) / 24.0;
                }
            }
        }
    }
    Ok(acc / binomial(n - 2, 2) as f64)
}

/// Every `ŝ_ij` and `ŝ_ij,2` at once.
///
/// [`FitPath::Naive`] makes one pass over all combinations and orderings and
/// credits each summand to the four dyads of its `ũ` (and to their four
/// unordered pairs, which are always distinct). [`FitPath::Reduced`] uses
/// column margins and the cross table `G[a][b] = Σ_l x_la û_lb` for an
/// `O(N³)` total.
pub fn s_bar_all(x: &Array2<f64>, u_hat: &Array2<f64>, path: FitPath) -> Result<SBarEstimates> {
    match path {
        FitPath::Naive => s_bar_naive(x, u_hat),
        FitPath::Reduced => s_bar_reduced(x, u_hat),
    }
}

fn s_bar_naive(x: &Array2<f64>, u_hat: &Array2<f64>) -> Result<SBarEstimates> {
    let n = x.nrows();
    let mut directed = Array2::<f64>::zeros((n, n));
    let mut pair = Array2::<f64>::zeros((n, n));
    for c in combinations4(n)? {
        for t in permutations(c) {
            let term = tilde(x, t) * tilde(u_hat, t) / 24.0;
            for ((a, b), _) in t.signed_dyads() {
                directed[[a, b]] += term;
                pair[[a.min(b), a.max(b)]] += term;
            }
        }
    }
    let completions = binomial(n - 2, 2) as f64;
    directed.mapv_inplace(|v| v / completions);
    pair.mapv_inplace(|v| v / completions);
    Ok(SBarEstimates { s_bar: directed, s_bar2: pair })
}

fn s_bar_reduced(x: &Array2<f64>, u: &Array2<f64>) -> Result<SBarEstimates> {
    let n = x.nrows();
    if n < 4 {
        return Err(Error::DegenerateSize { n });
    }
    let (_, cx, _) = margins(x);
    let (_, cu, _) = margins(u);
    let mut cxu = vec![0.0; n];
    for l in 0..n {
        for k in 0..n {
            if l != k {
                cxu[k] += x[[l, k]] * u[[l, k]];
            }
        }
    }
    // g[[a, b]] = Σ_{l ∉ {a, b}} x_la u_lb
    let mut g = Array2::<f64>::zeros((n, n));
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let mut s = 0.0;
            for l in 0..n {
                if l != a && l != b {
                    s += x[[l, a]] * u[[l, b]];
                }
            }
            g[[a, b]] = s;
        }
    }

    let m = (n - 2) as f64;
    let scale = (3 * (n - 2) * (n - 3)) as f64;
    let mut directed = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (xij, uij) = (x[[i, j]], u[[i, j]]);
            let uj = cu[j] - uij;
            let xj = cx[j] - xij;
            let xuj = cxu[j] - xij * uij;
            let mut p = 0.0;
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let (xik, uik) = (x[[i, k]], u[[i, k]]);
                let (xjk, ujk) = (x[[j, k]], u[[j, k]]);
                let (xkj, ukj) = (x[[k, j]], u[[k, j]]);
                let alpha = xij - xik;
                let beta = uij - uik;
                p += (m - 1.0) * alpha * beta
                    - alpha * (uj - ukj)
                    + alpha * (cu[k] - uik - ujk)
                    - beta * (xj - xkj)
                    + (xuj - xkj * ukj)
                    - (g[[j, k]] - xij * uik)
                    + beta * (cx[k] - xik - xjk)
                    - (g[[k, j]] - xik * uij)
                    + (cxu[k] - xik * uik - xjk * ujk);
            }
            directed[[i, j]] = p / scale;
        }
    }
    let mut pair = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            pair[[i, j]] = directed[[i, j]] + directed[[j, i]];
        }
    }
    Ok(SBarEstimates { s_bar: directed, s_bar2: pair })
}

/// `δ̂₂ = 1/(N(N−1)) Σ_{i≠j} ŝ_ij²`.
pub fn delta2_hat(s_bar: &Array2<f64>) -> f64 {
    let n = s_bar.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += s_bar[[i, j]] * s_bar[[i, j]];
            }
        }
    }
    acc / (n * (n - 1)) as f64
}

/// `Δ̂₂ = 2/(N(N−1)) Σ_{i<j} ŝ_ij,2²`, reading the upper triangle.
pub fn pair_delta2_hat(s_bar2: &Array2<f64>) -> f64 {
    let n = s_bar2.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            acc += s_bar2[[i, j]] * s_bar2[[i, j]];
        }
    }
    2.0 * acc / (n * (n - 1)) as f64
}

/// Both variance estimates and the t-statistics for `H0: β = beta_null`.
///
/// Estimators not requested by `mode` are reported as NaN.
pub fn avar_and_tstats(
    fit: &FitResult,
    delta2: f64,
    pair_delta2: f64,
    beta_null: f64,
    mode: AvarMode,
) -> Result<AvarResult> {
    let n = fit.n_nodes as f64;
    let denom = n * (n - 1.0) * fit.gamma_hat * fit.gamma_hat;
    let side = |wanted: bool, v: f64, name: &str| -> Result<(f64, f64)> {
        if !wanted {
            return Ok((f64::NAN, f64::NAN));
        }
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::DegenerateVariance(format!("{name} = {v:e}")));
        }
        Ok((v, (fit.beta_hat - beta_null) / v.sqrt()))
    };
    let (avar_delta, t_delta) = side(mode.wants_directed(), 144.0 * delta2 / denom, "avar_delta2")?;
    let (avar_pair, t_pair) = side(mode.wants_pair(), 72.0 * pair_delta2 / denom, "avar_Delta2")?;
    Ok(AvarResult {
        delta2_hat: delta2,
        pair_delta2_hat: pair_delta2,
        avar_delta,
        avar_pair,
        t_delta,
        t_pair,
    })
}

/// Fit, residuals, projections and variance for one dataset.
pub fn fit_with_variance(
    data: &crate::data::DyadicDataset,
    path: FitPath,
    mode: AvarMode,
    beta_null: f64,
) -> Result<(FitResult, AvarResult)> {
    let fit = crate::estimator::fit(data, path)?;
    let resid = crate::estimator::residual_matrix(data, fit.beta_hat);
    let s = s_bar_all(data.x(), &resid, path)?;
    let avar = avar_and_tstats(&fit, delta2_hat(&s.s_bar), pair_delta2_hat(&s.s_bar2), beta_null, mode)?;
    Ok((fit, avar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(n: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, n), |(i, j)| if i == j { 0.0 } else { rng.random_range(-1.0..1.0) })
    }

    /// Term selection straight off the kernel definition.
    fn selection_oracle(x: &Array2<f64>, u: &Array2<f64>, i: usize, j: usize) -> f64 {
        let n = x.nrows();
        let mut acc = 0.0;
        for c in combinations4(n).unwrap() {
            if !(c.contains(i) && c.contains(j)) {
                continue;
            }
            for t in permutations(c) {
                let [p1, p2, p3, p4] = t.0;
                let cells = [(p1, p2), (p1, p3), (p4, p2), (p4, p3)];
                if cells.contains(&(i, j)) {
                    let xt = x[[p1, p2]] - x[[p1, p3]] - x[[p4, p2]] + x[[p4, p3]];
                    let ut = u[[p1, p2]] - u[[p1, p3]] - u[[p4, p2]] + u[[p4, p3]];
                    acc += xt * ut / 24.0;
                }
            }
        }
        acc / binomial(n - 2, 2) as f64
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn zero_residuals_give_zero() {
        let x = noise(6, 1);
        let u = Array2::zeros((6, 6));
        assert_eq!(s_bar_directed(&x, &u, 0, 3).unwrap(), 0.0);
        assert_eq!(s_bar_pair(&x, &u, 0, 3).unwrap(), 0.0);
        for path in [FitPath::Naive, FitPath::Reduced] {
            let s = s_bar_all(&x, &u, path).unwrap();
            assert!(s.s_bar.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn directed_matches_selection_oracle() {
        let x = noise(6, 2);
        let u = noise(6, 3);
        let all = s_bar_all(&x, &u, FitPath::Naive).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                if i == j {
                    continue;
                }
                let oracle = selection_oracle(&x, &u, i, j);
                assert!(close(s_bar_directed(&x, &u, i, j).unwrap(), oracle, 1e-12));
                assert!(close(all.s_bar[[i, j]], oracle, 1e-12));
            }
        }
        assert!((all.s_bar[[0, 1]] - all.s_bar[[1, 0]]).abs() > 1e-6);
    }

    #[test]
    fn pair_is_sum_of_directions() {
        let x = noise(7, 4);
        let u = noise(7, 5);
        let all = s_bar_all(&x, &u, FitPath::Naive).unwrap();
        for i in 0..7 {
            for j in i + 1..7 {
                let sum = all.s_bar[[i, j]] + all.s_bar[[j, i]];
                assert!(close(all.pair(i, j), sum, 1e-9));
                assert!(close(all.pair(j, i), sum, 1e-9));
                assert!(close(s_bar_pair(&x, &u, i, j).unwrap(), sum, 1e-9));
            }
        }
    }

    #[test]
    fn symmetric_inputs_double() {
        let n = 6;
        let a = noise(n, 6);
        let b = noise(n, 7);
        let x = Array2::from_shape_fn((n, n), |(i, j)| a[[i, j]] + a[[j, i]]);
        let u = Array2::from_shape_fn((n, n), |(i, j)| b[[i, j]] + b[[j, i]]);
        for (i, j) in [(0, 1), (2, 5), (4, 3)] {
            let directed = s_bar_directed(&x, &u, i, j).unwrap();
            assert!(close(s_bar_pair(&x, &u, i, j).unwrap(), 2.0 * directed, 1e-12));
        }
    }

    #[test]
    fn reduced_matches_naive() {
        for (n, seed) in [(4, 1), (5, 2), (8, 3), (12, 4)] {
            let x = noise(n, seed);
            let u = noise(n, seed + 99);
            let a = s_bar_all(&x, &u, FitPath::Naive).unwrap();
            let b = s_bar_all(&x, &u, FitPath::Reduced).unwrap();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        assert!(close(a.s_bar[[i, j]], b.s_bar[[i, j]], 1e-9), "n={n} ({i},{j})");
                        assert!(close(a.pair(i, j), b.pair(i, j), 1e-9));
                    }
                }
            }
        }
    }

    #[test]
    fn bad_dyads_are_rejected() {
        let x = noise(5, 1);
        assert!(s_bar_directed(&x, &x, 2, 2).is_err());
        assert!(s_bar_pair(&x, &x, 0, 9).is_err());
        let small = noise(3, 1);
        assert!(matches!(s_bar_directed(&small, &small, 0, 1), Err(Error::DegenerateSize { n: 3 })));
    }

    #[test]
    fn delta_averages() {
        let zero = Array2::<f64>::zeros((5, 5));
        assert_eq!(delta2_hat(&zero), 0.0);
        assert_eq!(pair_delta2_hat(&zero), 0.0);
        let c = Array2::from_shape_fn((5, 5), |(i, j)| if i == j { 99.0 } else { 0.3 });
        assert!((delta2_hat(&c) - 0.09).abs() < 1e-15);
    }

    fn fake_fit(beta: f64, gamma: f64, n: usize) -> FitResult {
        FitResult { beta_hat: beta, gamma_hat: gamma, score_hat: beta * gamma, n_nodes: n, path: FitPath::Naive }
    }

    #[test]
    fn half_pair_delta_gives_equal_avar() {
        let fit = fake_fit(0.3, 0.7, 12);
        let r = avar_and_tstats(&fit, 0.125, 0.25, 0.0, AvarMode::Both).unwrap();
        assert_eq!(r.avar_delta, r.avar_pair);
        assert_eq!(r.t_delta, r.t_pair);
    }

    #[test]
    fn t_statistic_arithmetic() {
        // 144 δ / (N(N−1) Γ²) = 0.0025 with N(N−1) = 144, Γ = 1
        let fit = fake_fit(0.1, 1.0, 12);
        let nn1 = 12.0 * 11.0;
        let delta = 0.0025 * nn1 / 144.0;
        let r = avar_and_tstats(&fit, delta, 2.0 * delta, 0.0, AvarMode::Both).unwrap();
        assert!((r.avar_delta - 0.0025).abs() < 1e-15);
        assert!((r.t_delta - 2.0).abs() < 1e-12);
        let shifted = avar_and_tstats(&fit, delta, 2.0 * delta, 0.1, AvarMode::Both).unwrap();
        assert_eq!(shifted.t_delta, 0.0);
    }

    #[test]
    fn zero_variance_is_an_error() {
        let fit = fake_fit(0.1, 1.0, 10);
        assert!(matches!(
            avar_and_tstats(&fit, 0.0, 1.0, 0.0, AvarMode::Both),
            Err(Error::DegenerateVariance(_))
        ));
        let r = avar_and_tstats(&fit, 0.0, 1.0, 0.0, AvarMode::Pair).unwrap();
        assert!(r.avar_delta.is_nan());
        assert!(r.avar_pair > 0.0);
    }

    #[test]
    fn avar_gap_is_cross_product() {
        // 72 Δ̂₂ − 144 δ̂₂ = 288/(N(N−1)) Σ_{i<j} ŝ_ij ŝ_ji
        let n = 7;
        let s = s_bar_all(&noise(n, 8), &noise(n, 9), FitPath::Naive).unwrap();
        let lhs = 72.0 * pair_delta2_hat(&s.s_bar2) - 144.0 * delta2_hat(&s.s_bar);
        let mut cross = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                cross += s.s_bar[[i, j]] * s.s_bar[[j, i]];
            }
        }
        let rhs = 288.0 * cross / (n * (n - 1)) as f64;
        assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(lhs.abs()).max(1e-12));
    }
}
