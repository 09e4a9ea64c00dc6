//! Each example value is computed by a brute-force oracle, frozen, and
//! matched against the library.

mod common;

macro_rules! oracle_tests {
    ($($name:ident => $row:expr;)*) => {
        $(
            #[test]
            fn $name() {
                let r = $row;
                assert!(r.pass, "{}: oracle {} library {} frozen {}", r.name, r.oracle, r.library, r.frozen);
            }
        )*
    };
}

use common::*;
use groupoid_pmu::groupoid::{cyclic_groupoid, pair_groupoid};

oracle_tests! {
    counting_haar => row_counting_haar();
    radon_nikodym => row_radon_nikodym();
    random_span => row_random_span();
    leg_closed_under_products => row_leg_closed_under_products();
    commutant => row_commutant();
    hopf_zoo => row_hopf_zoo();
    random_unitary_not_morphism => row_random_unitary_not_morphism();
    triple_dims => row_triple_dims();
    unitarity_pair2 => row_unitarity_pair2();
    pentagon_pair3 => row_pentagon("pentagon on pair3", &pair_groupoid(3), &[1.0, 2.0, 0.5]);
    pentagon_z4 => row_pentagon("pentagon on z4", &cyclic_groupoid(4), &[1.0]);
    flip_fails => row_flip_fails();
    opposite => row_opposite();
    direct_sum_iso => row_direct_sum_iso();
    tensor_iso => row_tensor_iso();
    pair2_leg_dim => row_pair2_leg_dim();
    unit_legs => row_unit_legs();
    zoo_relations => row_zoo_relations();
    delta_in_fiber_product => row_delta_in_fiber_product();
    junk_not_in_fiber_product => row_junk_not_in_fiber_product();
    coassociativity => row_coassociativity();
    convolution => row_convolution();
    pair_fixed_elements => row_pair_fixed_elements();
    group_flags => row_group_flags();
    haar_pair => row_haar_pair();
    regular_reps => row_regular_reps();
    tampered_rep => row_tampered_rep();
    functor_f_passes => row_functor_f_passes();
    tensor_legs => row_tensor_legs();
    end_trivial_pair => row_end_trivial_pair();
    end_trivial_unit => row_end_trivial_unit();
    left_regular_iso => row_left_regular_iso();
    characters => row_characters();
    cli_verify_pair3 => row_cli_verify_pair3();
    cli_legs_z2 => row_cli_legs_z2();
}

#[test]
fn pentagon_oracle_rejects_a_broken_groupoid_unitary() {
    let g = pair_groupoid(2);
    let mut w = groupoid_w(&g);
    w.swap_columns(0, 5);
    let n = g.n_arrows();
    let id = groupoid_pmu::linalg::eye(n);
    let w12 = groupoid_pmu::linalg::kron(&w, &id);
    let w23 = groupoid_pmu::linalg::kron(&id, &w);
    let lhs = groupoid_pmu::linalg::mul(&w23, &w12);
    let rhs = groupoid_pmu::linalg::mul(&w12, &w23);
    assert!(groupoid_pmu::linalg::fro(&(lhs - rhs)) > 1e-3);
}
