//! Numerical checks of the variance theory on one design.
//!
//! `cargo run --release --example oracles -- d1`

use dyadic_pd::oracles::{
    closed_form_delta2, equivalence_gap, estimate_delta_q, hoeffding_check, projection_variance_check,
};
use dyadic_pd::simulate::Design;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let design: Design = std::env::args().nth(1).unwrap_or_else(|| "d1".into()).parse()?;
    let seed = 2024;

    let dq = estimate_delta_q(design, 50_000, seed)?;
    for (q, e) in dq.delta_q.iter().enumerate() {
        println!("Delta_{q} = {:+.6e}  (se {:.2e}, z {:+.2})", e.value, e.se, e.z_against(0.0));
    }
    println!("Delta_2 (other positions) = {:+.6e}", dq.delta2_alternate.value);
    println!("delta_2 = {:.6e}, Delta_2 - 2 delta_2 = {:+.3e} (z {:+.2})",
        dq.delta2_small.value, dq.pair_gap.value, dq.pair_gap.z_against(0.0));

    let cf = closed_form_delta2(design, 1.0, 1_000_000, seed + 1)?;
    println!("closed-form Delta_2 = {:.6e} (se {:.2e}), z vs MC {:+.2}",
        cf.delta2.value, cf.delta2.se, cf.delta2.z_between(&dq.delta_q[2]));

    let h = hoeffding_check(design, 5, 200_000, seed + 2)?;
    println!("N=5: Var(U_N) = {:.6e}, (D4 + 4 D3)/5 = {:.6e}, z {:+.2}", h.direct.value, h.formula.value, h.z);

    let p = projection_variance_check(design, 10, 20_000, seed + 3, 1.0)?;
    println!("N=10: Var(sqrt(N(N-1)) U1) = {:.5e} vs 144 delta_2 = {:.5e} (z {:+.2})",
        p.var_hajek1.value, p.target_delta.value, p.z_delta);
    println!("       Var(sqrt(N(N-1)) U2) = {:.5e} vs 72 Delta_2 = {:.5e} (z {:+.2})",
        p.var_hajek2.value, p.target_pair.value, p.z_pair);
    println!("       Var(sqrt(N(N-1)) U_N) = {:.5e}, max |U1-U2| rel = {:.1e}", p.var_u_n.value, p.max_rel_gap_12);

    for n in [8, 12, 16] {
        let g = equivalence_gap(design, n, 2000, seed + 4)?;
        println!("N={n:2}: N(N-1) E[(U1 - U_N)^2] = {:.5e} (se {:.1e})", g.value, g.se);
    }
    Ok(())
}
