//! Both legs of a group unitary as Hopf C*-bimodules, and Δ(U_x) = U_x ⊗ U_x.

use groupoid_pmu::groupoid::{counting_haar, cyclic_groupoid};
use groupoid_pmu::legs::{indicator, max_entry, verify_hopf, LegSide};
use groupoid_pmu::linalg::{adj, kron, mul};
use groupoid_pmu::pmu::groupoid_pmu;

fn main() -> groupoid_pmu::Result<()> {
    let g = cyclic_groupoid(3);
    let gp = groupoid_pmu(&g, &counting_haar(&g), &[1.0])?;
    for side in [LegSide::Hat, LegSide::Plain] {
        print!("{}", verify_hopf(&gp.pmu, side, 1e-8).to_text());
    }
    let ur = gp.phi_rng()?;
    for x in 0..3 {
        let u = gp.conv(&indicator(3, x));
        let d = mul(&ur, &mul(&gp.pmu.delta(&u)?, &adj(&ur)));
        println!("Δ(U_{x}) - U_{x} ⊗ U_{x}: {:.3e}", max_entry(&(d - kron(&u, &u))));
    }
    Ok(())
}
