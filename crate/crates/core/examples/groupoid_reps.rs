//! Groupoid representations and corepresentations of the unitary.

use groupoid_pmu::groupoid::{counting_haar, cyclic_groupoid, pair_groupoid};
use groupoid_pmu::pmu::groupoid_pmu;
use groupoid_pmu::reps::{character_hom_dims, corep_from_groupoid_rep, round_trip_residuals, sample_bundles, verify_corep};

fn main() -> groupoid_pmu::Result<()> {
    let g = pair_groupoid(2);
    let gp = groupoid_pmu(&g, &counting_haar(&g), &[1.0, 3.0])?;
    for (name, rep) in sample_bundles(&g, 1) {
        let c = corep_from_groupoid_rep(&gp, &rep)?;
        let [gf, fg] = round_trip_residuals(&gp, &rep)?;
        println!(
            "{name}: fiber dims {:?}, F(rep) passes {}, G∘F {gf:.1e}, F∘G {fg:.1e}",
            rep.dims,
            verify_corep(&gp.pmu, &c, 1e-8).all_pass()
        );
    }

    let z = cyclic_groupoid(4);
    let gz = groupoid_pmu(&z, &counting_haar(&z), &[1.0])?;
    println!("dim Hom(χ_i, χ_j) on z4:");
    for row in character_hom_dims(&gz)? {
        println!("  {row:?}");
    }
    Ok(())
}
