//! Fit one dataset from an `i,j,y,x` CSV and print both standard errors.
//!
//! `cargo run --release --example estimate -- data.csv`
//!
//! Without an argument a design-3 network with `β = 1` is simulated and
//! written to a temporary file first.

use std::path::PathBuf;

use dyadic_pd::simulate::{generate, Design};
use dyadic_pd::variance::fit_with_variance;
use dyadic_pd::{AvarMode, DyadicDataset, FitPath};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => {
            let p = std::env::temp_dir().join("dyadpd_example.csv");
            generate(Design::D3, 25, 1.0, 11)?.write_csv_file(&p)?;
            p
        }
    };
    let data = DyadicDataset::read_csv_file(&path)?;
    let n = data.n_nodes();
    let (fit, avar) = fit_with_variance(&data, FitPath::default_for(n), AvarMode::Both, 0.0)?;

    println!("{}: N = {n}, {} directed dyads", path.display(), n * (n - 1));
    println!("beta_hat  = {:.6}", fit.beta_hat);
    println!("gamma_hat = {:.6}", fit.gamma_hat);
    println!("se (delta2) = {:.6}   t = {:.3}", avar.avar_delta.sqrt(), avar.t_delta);
    println!("se (Delta2) = {:.6}   t = {:.3}", avar.avar_pair.sqrt(), avar.t_pair);
    Ok(())
}
