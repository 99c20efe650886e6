//! Tetrad differences remove sender and receiver effects exactly.
//!
//! `cargo run --example differencing`

use dyadic_pd::combinatorics::{combinations4, permutations, ordered_tetrads};
use dyadic_pd::differencing::{kernel_s, tilde};
use ndarray::Array2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 6;
    let theta = [0.3, -1.2, 2.0, 0.0, 0.7, -0.4];
    let xi = [1.5, 0.2, -0.9, 0.4, -2.2, 0.8];
    let x = Array2::from_shape_fn((n, n), |(i, j)| ((i * 7 + j * 3) % 5) as f64 / 4.0);
    let fe = Array2::from_shape_fn((n, n), |(i, j)| theta[i] + xi[j]);
    let u = Array2::from_shape_fn((n, n), |(i, j)| if i == j { 0.0 } else { ((i + 2 * j) % 3) as f64 - 1.0 });

    let mut worst: f64 = 0.0;
    for c in combinations4(n)? {
        for t in permutations(c) {
            worst = worst.max(tilde(&fe, t).abs());
        }
    }
    println!("{} ordered tetrads on {n} nodes", ordered_tetrads(n));
    println!("largest |differenced fixed effect| = {worst:.1e}");

    let first = combinations4(n)?.next().expect("n >= 4");
    println!("kernel on {:?}: {:.6}", first.nodes(), kernel_s(&x, &u, first));
    Ok(())
}
