//! Fixed and cofixed elements, the counit, and the Haar weight of pair(3).

use groupoid_pmu::fixedpoints::{cofixed_space, counit, fixed_space, haar_weight, is_compact, is_etale, is_proper};
use groupoid_pmu::groupoid::{counting_haar, pair_groupoid};
use groupoid_pmu::linalg::{c, diag};
use groupoid_pmu::pmu::groupoid_pmu;

fn main() -> groupoid_pmu::Result<()> {
    let g = pair_groupoid(3);
    let gp = groupoid_pmu(&g, &counting_haar(&g), &[1.0; 3])?;
    let p = &gp.pmu;
    let fix = fixed_space(p, 0)?;
    let cofix = cofixed_space(p, 0)?;
    println!("dim Fix = {}, dim Cofix = {}", fix.dim(), cofix.dim());
    println!("étale {}, proper {}, compact {}", is_etale(p, 0)?, is_proper(p, 0)?, is_compact(p, 0)?);

    // f(x) = 1 + index of x; arrows of pair(n) are ordered by range, then source
    let f: Vec<_> = (0..g.n_arrows()).map(|x| c(1.0 + x as f64)).collect();
    let eps = counit(p, fix.normalized.expect("étale"))?;
    let phi = haar_weight(p, cofix.normalized.expect("proper"))?;
    let on_units = eps.apply(&diag(&f));
    let avg = phi.apply(&diag(&f));
    for u in 0..g.n_units() {
        println!("u = {u}: ε̂(m(f)) = {:.3}, φ(m(f)) = {:.3}", on_units[(u, u)].re, avg[(u, u)].re);
    }
    Ok(())
}
