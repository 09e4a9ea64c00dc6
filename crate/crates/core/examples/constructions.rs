//! Opposite, direct sum and tensor product of unitaries.

use groupoid_pmu::groupoid::{counting_haar, cyclic_groupoid, disjoint_union, pair_groupoid, product};
use groupoid_pmu::linalg::eye;
use groupoid_pmu::pmu::{direct_sum, groupoid_pmu, isomorphism_residual, opposite, tensor, verify_pmu, GroupoidPmu};

fn build(g: &groupoid_pmu::groupoid::FiniteGroupoid) -> groupoid_pmu::Result<GroupoidPmu> {
    groupoid_pmu(g, &counting_haar(g), &vec![1.0; g.n_units()])
}

fn main() -> groupoid_pmu::Result<()> {
    let (a, b) = (pair_groupoid(2), cyclic_groupoid(2));
    let (pa, pb) = (build(&a)?.pmu, build(&b)?.pmu);

    let op = opposite(&pa)?;
    println!("V^op passes: {}", verify_pmu(&op, 1e-8).all_pass());

    let sum = direct_sum(&[pa.clone(), pb.clone()])?;
    let union = build(&disjoint_union(&a, &b))?.pmu;
    println!("V(G ⊔ G') vs V(G) ⊞ V(G'): {:.3e}", isomorphism_residual(&sum, &union, &eye(union.h))?);

    let prod = tensor(&pa, &pb)?;
    let cart = build(&product(&a, &b))?.pmu;
    println!("V(G × G') vs V(G) ⊗ V(G'): {:.3e}", isomorphism_residual(&prod, &cart, &eye(cart.h))?);
    Ok(())
}
