//! The tetrad difference transform and the permutation-averaged score kernel.

use ndarray::Array2;

use crate::combinatorics::{permutations, Combination, Tetrad};

/// `(v[π1][π2] − v[π1][π3]) − (v[π4][π2] − v[π4][π3])`.
///
/// Additive sender/receiver structure `v_ij = a_i + b_j` cancels exactly.
#[inline]
pub fn tilde(v: &Array2<f64>, t: Tetrad) -> f64 {
    let [a, b, c, d] = t.0;
    (v[[a, b]] - v[[a, c]]) - (v[[d, b]] - v[[d, c]])
}

/// Differenced outcome, covariate and (when known) error for one tetrad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetradValue {
    pub y_tilde: f64,
    pub x_tilde: f64,
    pub u_tilde: Option<f64>,
}

impl TetradValue {
    pub fn of(data: &crate::data::DyadicDataset, t: Tetrad) -> Self {
        Self {
            y_tilde: tilde(data.y(), t),
            x_tilde: tilde(data.x(), t),
            u_tilde: data.latent().map(|l| tilde(&l.u, t)),
        }
    }
}

/// The symmetric kernel `s` of a combination: the average over its 24
/// orderings of `x̃ · ũ`.
///
/// Summation follows the canonical permutation order of the sorted
/// combination, so the result does not depend on how `c` was built.
pub fn kernel_s(x: &Array2<f64>, u: &Array2<f64>, c: Combination) -> f64 {
    let mut acc = 0.0;
    for t in permutations(c) {
        acc += tilde(x, t) * tilde(u, t);
    }
    acc / 24.0
}

/// [`kernel_s`] with estimated residuals `û = y − β̂ x` in place of `u`.
pub fn kernel_s_on_residuals(x: &Array2<f64>, u_hat: &Array2<f64>, c: Combination) -> f64 {
    kernel_s(x, u_hat, c)
}

/// Row and column sums over off-diagonal entries.
pub(crate) fn margins(v: &Array2<f64>) -> (Vec<f64>, Vec<f64>, f64) {
    let n = v.nrows();
    let mut rows = vec![0.0; n];
    let mut cols = vec![0.0; n];
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let e = v[[i, j]];
                rows[i] += e;
                cols[j] += e;
                total += e;
            }
        }
    }
    (rows, cols, total)
}

/// `Σ ã_t · b̃_t` over all `n(n−1)(n−2)(n−3)` ordered tetrads in `O(n²)`.
///
/// Expanding the product gives 16 terms that fall into four overlap classes
/// (same dyad, same sender, same receiver, disjoint dyads), each weighted 4:
///
/// ```text
/// Σ = 4 [ (n−2)(n−3) S − (n−3)(R + C) + D ]
/// S = Σ_{i≠j} a_ij b_ij
/// R = Σ_i ra_i rb_i − S          (shared sender)
/// C = Σ_j ca_j cb_j − S          (shared receiver)
/// D = Σ_{i≠j} a_ij (B − rb_i − rb_j − cb_i − cb_j + b_ij + b_ji)
/// ```
pub fn ordered_cross_sum(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let (ra, ca, _) = margins(a);
    let (rb, cb, total_b) = margins(b);
    let mut same = 0.0;
    let mut disjoint = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let aij = a[[i, j]];
            same += aij * b[[i, j]];
            let rest = total_b - rb[i] - rb[j] - cb[i] - cb[j] + b[[i, j]] + b[[j, i]];
            disjoint += aij * rest;
        }
    }
    let rows: f64 = ra.iter().zip(&rb).map(|(p, q)| p * q).sum::<f64>() - same;
    let cols: f64 = ca.iter().zip(&cb).map(|(p, q)| p * q).sum::<f64>() - same;
    let nf = n as f64;
    4.0 * ((nf - 2.0) * (nf - 3.0) * same - (nf - 3.0) * (rows + cols) + disjoint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::combinations4;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, n), |(i, j)| if i == j { f64::NAN } else { rng.random_range(-1.0..1.0) })
    }

    fn additive(n: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        Array2::from_shape_fn((n, n), |(i, j)| a[i] + b[j])
    }

    #[test]
    fn hand_evaluation() {
        let v = random_matrix(4, 3);
        let by_hand = v[[0, 1]] - v[[0, 2]] - v[[3, 1]] + v[[3, 2]];
        assert_eq!(tilde(&v, Tetrad([0, 1, 2, 3])), by_hand);
    }

    #[test]
    fn additive_and_constant_vanish() {
        let v = additive(7, 1);
        let c = Array2::from_elem((7, 7), 2.5);
        for comb in combinations4(7).unwrap() {
            for t in permutations(comb) {
                assert!(tilde(&v, t).abs() < 1e-12);
                assert_eq!(tilde(&c, t), 0.0);
            }
        }
    }

    #[test]
    fn kernel_zero_cases() {
        let x = random_matrix(6, 5);
        let u_const = Array2::from_elem((6, 6), 0.7);
        let x_add = additive(6, 9);
        let u = random_matrix(6, 8);
        for c in combinations4(6).unwrap() {
            assert_eq!(kernel_s(&x, &u_const, c), 0.0);
            assert!(kernel_s(&x_add, &u, c).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_matches_independent_enumeration() {
        let x = random_matrix(4, 11);
        let u = random_matrix(4, 12);
        // separate enumerator: nested loops over distinct orderings
        let mut acc = 0.0;
        for p in 0..4 {
            for q in 0..4 {
                for r in 0..4 {
                    for s in 0..4 {
                        let distinct = p != q && p != r && p != s && q != r && q != s && r != s;
                        if !distinct {
                            continue;
                        }
                        let xt = x[[p, q]] - x[[p, r]] - x[[s, q]] + x[[s, r]];
                        let ut = u[[p, q]] - u[[p, r]] - u[[s, q]] + u[[s, r]];
                        acc += xt * ut;
                    }
                }
            }
        }
        let c = Combination::new([0, 1, 2, 3]).unwrap();
        assert!((kernel_s(&x, &u, c) - acc / 24.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_is_bit_stable_under_reordering() {
        let x = random_matrix(8, 21);
        let u = random_matrix(8, 22);
        let a = Combination::new([1, 5, 2, 7]).unwrap();
        let b = Combination::new([7, 2, 5, 1]).unwrap();
        assert_eq!(kernel_s(&x, &u, a).to_bits(), kernel_s(&x, &u, b).to_bits());
    }

    #[test]
    fn cross_sum_matches_enumeration() {
        for (n, seed) in [(4, 1), (5, 2), (7, 3), (9, 4)] {
            let a = random_matrix(n, seed);
            let b = random_matrix(n, seed + 100);
            let mut brute = 0.0;
            for c in combinations4(n).unwrap() {
                for t in permutations(c) {
                    brute += tilde(&a, t) * tilde(&b, t);
                }
            }
            let fast = ordered_cross_sum(&a, &b);
            assert!((fast - brute).abs() <= 1e-10 * brute.abs().max(1.0), "n={n}: {fast} vs {brute}");
        }
    }
}
