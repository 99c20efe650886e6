//! Replication seeds depend only on the master seed and the replication
//! index, so results do not change with the number of worker threads.
//!
//! `cargo run --release --example seeds`

use dyadic_pd::simulate::{derive, run_mc_with_threads, Design, McConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for r in 0..4 {
        println!("rep {r}: seed {:#018x}", derive(42, r));
    }
    let cfg = McConfig::new(Design::D3, 12, 200, 42);
    let one = run_mc_with_threads(&cfg, 1)?;
    let many = run_mc_with_threads(&cfg, 8)?;
    let same = one.per_rep.iter().zip(&many.per_rep).all(|(a, b)| a.beta_hat.to_bits() == b.beta_hat.to_bits());
    println!("1 thread vs 8 threads: identical = {same}");
    Ok(())
}
