//! The legs of a groupoid unitary: multiplication and convolution operators.

use groupoid_pmu::groupoid::{counting_haar, pair_groupoid};
use groupoid_pmu::legs::{indicator, leg, leg_hat, regularity_residual, verify_leg_relations};
use groupoid_pmu::opspace::OperatorSpace;
use groupoid_pmu::pmu::groupoid_pmu;

fn main() -> groupoid_pmu::Result<()> {
    let g = pair_groupoid(3);
    let gp = groupoid_pmu(&g, &counting_haar(&g), &[1.0, 1.0, 2.0])?;
    let p = &gp.pmu;
    let n = g.n_arrows();

    let ahat = leg_hat(p)?;
    let a = leg(p)?;
    println!("dim Â = {}, dim A = {}", ahat.dim(), a.dim());
    println!("Â vs diagonals: {:.3e}", ahat.equality_residual(&OperatorSpace::diagonals(n)));
    let conv: Vec<_> = (0..n).map(|x| gp.conv(&indicator(n, x))).collect();
    println!("A vs span L(δ_x): {:.3e}", a.equality_residual(&OperatorSpace::span(n, n, &conv)?));
    println!("A commutative: {}", a.commutator_residual() < 1e-9);
    println!("C_V vs [αα*]: {:.3e}", regularity_residual(p)?);
    let r = verify_leg_relations(p, 1e-8);
    println!("leg relations: {} of {} pass", r.checks.iter().filter(|c| c.pass).count(), r.checks.len());
    Ok(())
}
