//! The pairing between the Fourier algebras of z3.

use groupoid_pmu::groupoid::{counting_haar, cyclic_groupoid};
use groupoid_pmu::legs::{pairing_ranks, pi, pi_hat, pi_hat_convolution, spanning_functionals, spanning_hat_functionals};
use groupoid_pmu::linalg::fro;
use groupoid_pmu::pmu::groupoid_pmu;

fn main() -> groupoid_pmu::Result<()> {
    let g = cyclic_groupoid(3);
    let gp = groupoid_pmu(&g, &counting_haar(&g), &[1.0])?;
    let p = &gp.pmu;
    let (l, r) = pairing_ranks(p)?;
    println!("pairing ranks {l}, {r} for |G| = {}", g.n_arrows());

    let hats = spanning_hat_functionals(p);
    let plains = spanning_functionals(p);
    println!("{} spanning functionals on each side", hats.len().min(plains.len()));
    let (w, w2) = (&hats[0], &hats[hats.len() - 1]);
    let prod = pi_hat(p, w)? * pi_hat(p, w2)?;
    println!("π̂(ω)π̂(ω') vs π̂(ω∗ω'): {:.3e}", fro(&(prod - pi_hat_convolution(p, w, w2)?)));
    println!("‖π(υ₀)‖ = {:.3}", fro(&pi(p, &plains[0])?));
    Ok(())
}
