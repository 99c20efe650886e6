//! The naive and reduced paths give the same answer; only the cost differs.
//!
//! `cargo run --release --example fast_path -- 40`

use std::time::Instant;

use dyadic_pd::simulate::{generate, Design};
use dyadic_pd::variance::fit_with_variance;
use dyadic_pd::{AvarMode, FitPath};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(30);
    let data = generate(Design::D2, n, 0.5, 3)?;
    let mut out = Vec::new();
    for path in [FitPath::Naive, FitPath::Reduced] {
        let t = Instant::now();
        let (fit, avar) = fit_with_variance(&data, path, AvarMode::Both, 0.0)?;
        let secs = t.elapsed().as_secs_f64();
        println!("{:>7}: beta_hat {:.12} avar {:.12e} / {:.12e} in {secs:.4}s",
            path.as_str(), fit.beta_hat, avar.avar_delta, avar.avar_pair);
        out.push((fit.beta_hat, avar.avar_delta, avar.avar_pair, secs));
    }
    let (a, b) = (out[0], out[1]);
    let rel = |p: f64, q: f64| (p - q).abs() / p.abs().max(q.abs());
    println!("relative gaps {:.1e} {:.1e} {:.1e}, speedup {:.0}x",
        rel(a.0, b.0), rel(a.1, b.1), rel(a.2, b.2), a.3 / b.3);
    Ok(())
}
