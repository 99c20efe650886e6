//! One Monte Carlo cell: bias, variance, both variance estimates and the
//! size of the 5% t-test.
//!
//! `cargo run --release --example monte_carlo -- d2 20 500`

use dyadic_pd::simulate::{run_mc, Design, McConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let design: Design = args.next().unwrap_or_else(|| "d1".into()).parse()?;
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let reps: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(500);

    let cfg = McConfig::new(design, n, reps, 42);
    let r = run_mc(&cfg)?.summary;
    println!("design {} N = {} S = {}", r.design, r.n, r.s);
    println!("bias             {:+.4}", r.bias);
    println!("var(beta_hat)    {:.4}", r.var_beta);
    println!("mean avar delta2 {:.4}   size {:.3}", r.mean_avar_delta, r.size_delta);
    println!("mean avar Delta2 {:.4}   size {:.3}", r.mean_avar_pair, r.size_pair);
    if r.failures > 0 {
        println!("{} replications failed", r.failures);
    }
    Ok(())
}
