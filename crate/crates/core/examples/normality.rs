//! Standardized estimates against the normal: histogram, QQ pairs and the
//! Kolmogorov distance at two network sizes.
//!
//! `cargo run --release --example normality -- d4`

use dyadic_pd::simulate::export::{histogram, ks_distance_normal, max_qq_gap, qq_pairs, standardize};
use dyadic_pd::simulate::{run_mc, Design, McConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let design: Design = std::env::args().nth(1).unwrap_or_else(|| "d1".into()).parse()?;
    for n in [10, 30] {
        let betas = run_mc(&McConfig::new(design, n, 1000, 9))?.betas();
        let z = standardize(&betas)?;
        println!("N = {n}: KS = {:.4}, max QQ gap = {:.3}", ks_distance_normal(&betas)?, max_qq_gap(&qq_pairs(&betas)?));
        for b in histogram(&z, 12)? {
            println!("  [{:+.2}, {:+.2}) {}", b.lo, b.hi, "#".repeat(b.count / 4));
        }
    }
    Ok(())
}
