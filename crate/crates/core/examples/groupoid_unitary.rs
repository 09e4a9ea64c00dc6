//! Build the unitary of the pair groupoid on three points and check it.

use groupoid_pmu::groupoid::{counting_haar, pair_groupoid, radon_nikodym};
use groupoid_pmu::pmu::{groupoid_pmu, intertwining_residuals, pentagon_residual, verify_pmu};

fn main() -> groupoid_pmu::Result<()> {
    let g = pair_groupoid(3);
    let lambda = counting_haar(&g);
    let mu = [1.0, 2.0, 0.5];
    let q = radon_nikodym(&g, &lambda, &mu)?;
    println!("|G| = {}, |G⁰| = {}", g.n_arrows(), g.n_units());
    println!("D = {:?}", q.d);

    let gp = groupoid_pmu(&g, &lambda, &mu)?;
    let p = &gp.pmu;
    println!("V : {}-dim -> {}-dim", p.src.dim(), p.rng.dim());
    println!("intertwining residuals {:?}", intertwining_residuals(p)?);
    println!("pentagon residual {:.3e}", pentagon_residual(p)?);
    println!("fast path residual {:.3e}", gp.fast_path_residual()?);
    print!("{}", verify_pmu(p, 1e-8).to_text());
    Ok(())
}
