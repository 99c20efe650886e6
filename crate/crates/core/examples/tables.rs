//! Regenerate a grid of simulation tables as CSV on stdout.
//!
//! `cargo run --release --example tables -- 1000`
//!
//! The argument is the number of replications per cell (default 200).

use dyadic_pd::report::{emit_tables, write_table_csv, TableGrid};
use dyadic_pd::simulate::Design;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reps: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(200);
    let grid = TableGrid {
        designs: Design::ALL.to_vec(),
        reps: vec![reps],
        nodes: vec![10, 20, 30],
        seed: 20240601,
        beta1: 0.0,
        avar: dyadic_pd::AvarMode::Both,
        path: None,
    };
    let rows: Vec<_> = emit_tables(&grid)?.into_iter().map(|r| r.summary).collect();
    write_table_csv(&rows, std::io::stdout().lock())?;
    Ok(())
}
