//! Trivial and regular representations, their tensor products, End(𝟙).

use groupoid_pmu::groupoid::{counting_haar, pair_groupoid, unit_groupoid};
use groupoid_pmu::pmu::groupoid_pmu;
use groupoid_pmu::reps::{end_trivial, regular_rep, rep_legs, rep_tensor, trivial_rep, unit_residuals, verify_rep};

fn main() -> groupoid_pmu::Result<()> {
    let g = pair_groupoid(2);
    let gp = groupoid_pmu(&g, &counting_haar(&g), &[1.0, 2.0])?;
    let p = &gp.pmu;
    let one = trivial_rep(p)?;
    let reg = regular_rep(p);
    for (name, x) in [("trivial", &one), ("regular", &reg)] {
        let (hat, plain) = rep_legs(p, x)?;
        println!("{name}: passes {}, dim Â_X {}, dim A_X {}", verify_rep(p, x, 1e-8).all_pass(), hat.dim(), plain.dim());
    }
    let both = rep_tensor(p, &reg, &one)?;
    println!("regular ⊠ 𝟙 on a {}-dim space passes {}", both.k(), verify_rep(p, &both, 1e-8).all_pass());
    println!("unit isomorphism residuals {:?}", unit_residuals(p, &reg)?);

    for g in [pair_groupoid(3), unit_groupoid(3)] {
        let gp = groupoid_pmu(&g, &counting_haar(&g), &vec![1.0; g.n_units()])?;
        println!("dim End(𝟙) = {} for |G⁰| = {}", end_trivial(&gp.pmu)?.dim(), g.n_units());
    }
    Ok(())
}
