use dyadic_pd::oracles::{
    closed_form_delta2, estimate_delta_q, hoeffding_check, hoeffding_variance, projection_variance_check,
};
use dyadic_pd::simulate::Design;

#[test]
fn first_order_degeneracy_on_every_design() {
    for (k, d) in Design::ALL.into_iter().enumerate() {
        let r = estimate_delta_q(d, 20_000, 31 + k as u64).unwrap();
        for q in [0, 1] {
            assert!(r.delta_q[q].z_against(0.0).abs() <= 4.0, "{d} q={q}: {:?}", r.delta_q[q]);
        }
        assert!(r.delta_q[2].z_against(0.0) > 4.0, "{d}: Delta_2 should be clearly positive");
        assert!(r.pair_gap.z_against(0.0).abs() <= 4.0, "{d}: {:?}", r.pair_gap);
        assert!(r.delta2_alternate.z_between(&r.delta_q[2]).abs() <= 4.0, "{d}");
    }
}

#[test]
fn pair_term_triangle_on_every_design() {
    for (k, d) in Design::ALL.into_iter().enumerate() {
        let dq = estimate_delta_q(d, 20_000, 41 + k as u64).unwrap();
        let cf = closed_form_delta2(d, 1.0, 200_000, 51 + k as u64).unwrap().delta2;
        assert!(cf.z_between(&dq.delta_q[2]).abs() <= 4.0, "{d}");
        assert!(cf.z_between(&dq.delta2_small.scaled(2.0)).abs() <= 4.0, "{d}");
    }
}

#[test]
fn hoeffding_identity_on_every_design() {
    for (k, d) in Design::ALL.into_iter().enumerate() {
        let h = hoeffding_check(d, 5, 40_000, 61 + k as u64).unwrap();
        assert!(h.z.abs() <= 4.0, "{d}: {h:?}");
    }
}

#[test]
fn six_node_identity() {
    // at N = 6 two combinations share at least two nodes
    let h = hoeffding_check(Design::D3, 6, 40_000, 70).unwrap();
    assert!(h.z.abs() <= 4.0, "{h:?}");
    assert_eq!(hoeffding_variance(&[7.0, 7.0, 0.0, 0.0, 15.0], 6).unwrap(), 1.0);
}

#[test]
fn projection_identities_and_orthogonality() {
    for (k, d) in Design::ALL.into_iter().enumerate() {
        let p = projection_variance_check(d, 8, 10_000, 81 + k as u64, 1.0).unwrap();
        assert!(p.max_rel_gap_12 <= 1e-12, "{d}");
        assert!(p.z_delta.abs() <= 4.0 && p.z_pair.abs() <= 4.0, "{d}: {p:?}");
        assert!(p.orthogonality_gap.z_against(0.0).abs() <= 4.0, "{d}: {:?}", p.orthogonality_gap);
    }
}

#[test]
fn scaled_score_variance_approaches_its_limit() {
    let p10 = projection_variance_check(Design::D1, 10, 10_000, 91, 1.0).unwrap();
    let p20 = projection_variance_check(Design::D1, 20, 10_000, 92, 1.0).unwrap();
    let gap = |p: &dyadic_pd::oracles::projection::ProjectionReport| (p.var_u_n.value - p.target_pair.value).abs();
    assert!(gap(&p20) < gap(&p10), "{} -> {}", gap(&p10), gap(&p20));
}
