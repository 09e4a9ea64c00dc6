//! Fixed and cofixed elements, étale/proper/compact, counit and bounded
//! Haar weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cstar::Module;
use crate::error::{Error, Result};
use crate::legs::{self, Functional};
use crate::linalg::{self, adj, fro, herm_eigen, herm_fn, kron, mul, nullspace, vcat, Mat, C64};
use crate::opspace::OperatorSpace;
use crate::pmu::{opposite, GroupoidPmu, Pmu};
use crate::report::Report;

/// `M(γ) = {T : T𝔄 ⊆ γ, T*γ ⊆ 𝔄}` where `𝔄 = [γ*γ]`.
pub fn multiplier_space(m: &Module) -> Result<OperatorSpace> {
    let (h, k) = (m.h, m.base.k);
    let alg = m.alg();
    let perp = |q: &Mat, n: usize| linalg::eye(n) - mul(q, &adj(q));
    let pg = perp(m.space.vecs(), h * k);
    let pa = perp(alg.vecs(), k * k);
    let mut rows = Vec::new();
    for b in alg.basis() {
        // vec(T b) = (bᵀ ⊗ I) vec(T)
        rows.push(mul(&pg, &kron(&b.transpose(), &linalg::eye(h))));
    }
    for g in m.basis() {
        // g* T ∈ 𝔄 is linear in T and equivalent to T* g ∈ 𝔄
        rows.push(mul(&pa, &kron(&linalg::eye(k), &adj(g))));
    }
    if rows.is_empty() {
        return Ok(OperatorSpace::full(h, k));
    }
    Ok(OperatorSpace::from_vecs(h, k, &nullspace(&vcat(&rows))))
}

/// A solution space of fixed or cofixed elements.
#[derive(Clone, Debug)]
pub struct FixedData {
    pub space: OperatorSpace,
    /// An element with `x* x = Id`, when one exists.
    pub normalized: Option<Mat>,
}

impl FixedData {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

/// `Fix(V) = {η ∈ M(β̂) ∩ M(α) : V|η⟩₁ = |η⟩₁}`.
pub fn fixed_space(p: &Pmu, seed: u64) -> Result<FixedData> {
    let dom = multiplier_space(&p.betahat)?.intersect(&multiplier_space(&p.alpha)?)?;
    let space = dom.kernel_of(|x| Ok(mul(&p.v, &p.src.ket1(x)?) - p.rng.ket1(x)?))?;
    let normalized = normalized_element(&space, seed);
    Ok(FixedData { space, normalized })
}

/// `Cofix(V) = {ξ ∈ M(α) ∩ M(β) : V|ξ⟩₂ = |ξ⟩₂}`.
pub fn cofixed_space(p: &Pmu, seed: u64) -> Result<FixedData> {
    let dom = multiplier_space(&p.alpha)?.intersect(&multiplier_space(&p.beta)?)?;
    let space = dom.kernel_of(|x| Ok(mul(&p.v, &p.src.ket2(x)?) - p.rng.ket2(x)?))?;
    let normalized = normalized_element(&space, seed);
    Ok(FixedData { space, normalized })
}

/// Looks for `x` in the space with `x* x = Id`.
///
/// `[X* X]` is a commutative algebra, so such an element exists iff the
/// supports of the `x* x` cover the base space. Then a generic combination
/// `x` has invertible `x* x`, and `x (x* x)^{-1/2}` is normalized; the
/// result is checked against the space before it is returned.
pub fn normalized_element(space: &OperatorSpace, seed: u64) -> Option<Mat> {
    let basis = space.basis();
    let k = space.cols();
    if basis.is_empty() {
        return None;
    }
    let cover = basis.iter().fold(linalg::zeros(k, k), |acc, x| acc + mul(&adj(x), x));
    if linalg::rank(&cover) < k {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // the plain sum of the basis first, so the usual choice is deterministic
    for attempt in 0..9 {
        let x = basis.iter().fold(linalg::zeros(space.rows(), k), |acc, b| {
            let w = if attempt == 0 { C64::new(1.0, 0.0) } else { C64::new(rng.gen_range(0.5..1.5), rng.gen_range(-0.5..0.5)) };
            acc + b * w
        });
        let t = mul(&adj(&x), &x);
        let (ev, _) = herm_eigen(&t);
        let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ev.iter().cloned().fold(0.0, f64::max);
        if lo <= 1e-8 * hi.max(1.0) {
            continue;
        }
        let y = mul(&x, &herm_fn(&t, |l| l.powf(-0.5)));
        if space.residual_of(&y) < 1e-9 && fro(&(mul(&adj(&y), &y) - linalg::eye(k))) < 1e-9 {
            return Some(y);
        }
    }
    None
}

pub fn is_etale(p: &Pmu, seed: u64) -> Result<bool> {
    Ok(fixed_space(p, seed)?.normalized.is_some())
}

pub fn is_proper(p: &Pmu, seed: u64) -> Result<bool> {
    Ok(cofixed_space(p, seed)?.normalized.is_some())
}

/// Proper, and `𝔅`, `𝔅†` unital (contain `Id`).
pub fn is_compact(p: &Pmu, seed: u64) -> Result<bool> {
    let id = linalg::eye(p.k());
    let unital = p.base.b.contains_op(&id, 1e-9) && p.base.bdag.contains_op(&id, 1e-9);
    Ok(unital && is_proper(p, seed)?)
}

/// Residual of `η ∈ Fix(V)` with `η* η = Id`.
fn fixed_defect(p: &Pmu, eta: &Mat) -> Result<f64> {
    let fix = fro(&(mul(&p.v, &p.src.ket1(eta)?) - p.rng.ket1(eta)?));
    Ok(fix.max(fro(&(mul(&adj(eta), eta) - linalg::eye(p.k())))))
}

fn cofixed_defect(p: &Pmu, xi: &Mat) -> Result<f64> {
    let fix = fro(&(mul(&p.v, &p.src.ket2(xi)?) - p.rng.ket2(xi)?));
    Ok(fix.max(fro(&(mul(&adj(xi), xi) - linalg::eye(p.k())))))
}

/// `ε̂(â) = η₀* â η₀`.
#[derive(Clone, Debug)]
pub struct Counit {
    pub eta0: Mat,
}

impl Counit {
    pub fn new(p: &Pmu, eta0: Mat) -> Result<Counit> {
        match fixed_defect(p, &eta0) {
            Ok(d) if d <= 1e-8 => Ok(Counit { eta0 }),
            _ => Err(Error::NotNormalizedFixed),
        }
    }

    pub fn apply(&self, a: &Mat) -> Mat {
        mul(&adj(&self.eta0), &mul(a, &self.eta0))
    }
}

pub fn counit(p: &Pmu, eta0: Mat) -> Result<Counit> {
    Counit::new(p, eta0)
}

/// Homomorphism property, both counit diagrams and `ε̂ ∘ π̂_V = π̂_𝟙`.
pub fn verify_counit(p: &Pmu, eps: &Counit, tol: f64) -> Report {
    let mut r = Report::new("counit", tol);
    if let Err(e) = counit_into(p, eps, &mut r) {
        r.attempt("counit checks", Err(e), "counit");
    }
    r
}

fn counit_into(p: &Pmu, eps: &Counit, r: &mut Report) -> Result<()> {
    let ahat = legs::leg_hat(p)?.basis();
    let eta0 = &eps.eta0;
    let mut hom: f64 = 0.0;
    let mut left: f64 = 0.0;
    let mut right: f64 = 0.0;
    let k1 = p.src.ket1(eta0)?;
    let k2 = p.src.ket2(eta0)?;
    for (i, a) in ahat.iter().enumerate() {
        hom = hom.max(fro(&(eps.apply(&adj(a)) - adj(&eps.apply(a)))));
        for b in &ahat[i..] {
            hom = hom.max(fro(&(eps.apply(&mul(a, b)) - mul(&eps.apply(a), &eps.apply(b)))));
        }
        let d = p.delta_hat(a)?;
        left = left.max(fro(&(mul(&adj(&k1), &mul(&d, &k1)) - a)));
        right = right.max(fro(&(mul(&adj(&k2), &mul(&d, &k2)) - a)));
    }
    r.residual("ε̂(Id) = Id", fro(&(eps.apply(&linalg::eye(p.h)) - linalg::eye(p.k()))), "counit");
    r.residual("ε̂ is a *-homomorphism", hom, "counit");
    r.residual("⟨η₀|₁Δ̂(â)|η₀⟩₁ = â", left, "counit");
    r.residual("⟨η₀|₂Δ̂(â)|η₀⟩₂ = â", right, "counit");
    let mut pi1: f64 = 0.0;
    for l in p.beta.basis() {
        for rr in p.alpha.basis() {
            let w = Functional::single(l.clone(), rr.clone());
            pi1 = pi1.max(fro(&(eps.apply(&legs::pi_hat(p, &w)?) - mul(&adj(l), rr))));
        }
    }
    r.residual("ε̂ ∘ π̂_V = π̂_𝟙", pi1, "counit");
    Ok(())
}

/// `φ(â) = ξ₀* â ξ₀`.
#[derive(Clone, Debug)]
pub struct HaarWeight {
    pub xi0: Mat,
}

impl HaarWeight {
    pub fn new(p: &Pmu, xi0: Mat) -> Result<HaarWeight> {
        match cofixed_defect(p, &xi0) {
            Ok(d) if d <= 1e-8 => Ok(HaarWeight { xi0 }),
            _ => Err(Error::NotNormalizedCofixed),
        }
    }

    pub fn apply(&self, a: &Mat) -> Mat {
        mul(&adj(&self.xi0), &mul(a, &self.xi0))
    }
}

pub fn haar_weight(p: &Pmu, xi0: Mat) -> Result<HaarWeight> {
    HaarWeight::new(p, xi0)
}

/// Axioms of a bounded left Haar weight `φ : Â_V → 𝔅†`:
/// `φ(â ρ_α(b†)) = φ(â) b†`, `φ(⟨ξ|₁Δ̂(â)|ξ'⟩₁) = ξ* ρ_α(φ(â)) ξ'` for
/// `ξ, ξ' ∈ β̂`, values in `𝔅†`, and complete positivity. The contraction
/// property is only checked when `contraction` is set.
pub fn verify_left_haar(p: &Pmu, phi: &dyn Fn(&Mat) -> Result<Mat>, tol: f64, contraction: bool) -> Report {
    let mut r = Report::new("haar", tol);
    if let Err(e) = haar_into(p, phi, &mut r, contraction) {
        r.attempt("haar checks", Err(e), "haar");
    }
    r
}

fn haar_into(p: &Pmu, phi: &dyn Fn(&Mat) -> Result<Mat>, r: &mut Report, contraction: bool) -> Result<()> {
    let ahat = legs::leg_hat(p)?;
    let basis = ahat.basis();
    let bdag = &p.base.bdag;
    let mut range: f64 = 0.0;
    let mut modular: f64 = 0.0;
    let mut inv: f64 = 0.0;
    let bh = p.betahat.basis();
    for a in &basis {
        let fa = phi(a)?;
        range = range.max(bdag.residual_of(&fa) * fro(&fa));
        for b in bdag.basis() {
            let lhs = phi(&mul(a, &p.alpha.rho(&b)?))?;
            modular = modular.max(fro(&(lhs - mul(&fa, &b))));
        }
        let d = p.delta_hat(a)?;
        let rho_fa = p.alpha.rho(&fa)?;
        for x in bh {
            let kx = p.src.ket1(x)?;
            for y in bh {
                let slice = mul(&adj(&kx), &mul(&d, &p.src.ket1(y)?));
                let lhs = phi(&slice)?;
                inv = inv.max(fro(&(lhs - mul(&adj(x), &mul(&rho_fa, y)))));
            }
        }
    }
    r.residual("φ(Â) ⊆ 𝔅†", range, "haar");
    r.residual("φ(â ρ_α(b†)) = φ(â) b†", modular, "haar");
    r.residual("φ(⟨ξ|₁Δ̂(â)|ξ'⟩₁) = ξ* ρ_α(φ(â)) ξ'", inv, "haar");

    // block matrix [φ(a_i* a_j)] over a spanning family
    let k = p.k();
    let m = basis.len();
    let mut choi = linalg::zeros(m * k, m * k);
    for i in 0..m {
        for j in 0..m {
            let v = phi(&mul(&adj(&basis[i]), &basis[j]))?;
            choi.view_mut((i * k, j * k), (k, k)).copy_from(&v);
        }
    }
    let (ev, _) = herm_eigen(&choi);
    let lo = ev.iter().cloned().fold(0.0, f64::min);
    r.residual("complete positivity", (-lo).max(0.0), "haar");
    if contraction {
        let n = linalg::opnorm(&phi(&linalg::eye(p.h))?);
        r.residual("contraction", (n - 1.0).max(0.0), "haar");
    }
    Ok(())
}

/// `(Id ∗ φ)(Δ̂(â)) = ⟨ξ₀|₂ Δ̂(â) |ξ₀⟩₂ = ρ_α(φ(â))`.
pub fn haar_slice_residual(p: &Pmu, phi: &HaarWeight) -> Result<f64> {
    let k2 = p.src.ket2(&phi.xi0)?;
    let mut worst: f64 = 0.0;
    for a in legs::leg_hat(p)?.basis() {
        let lhs = mul(&adj(&k2), &mul(&p.delta_hat(&a)?, &k2));
        worst = worst.max(fro(&(lhs - p.alpha.rho(&phi.apply(&a))?)));
    }
    Ok(worst)
}

fn space_of(xs: &[Mat], rows: usize, cols: usize) -> Result<OperatorSpace> {
    OperatorSpace::span(rows, cols, xs)
}

/// Fixed-point suite: spaces, structural relations, counit and Haar weight.
pub fn verify_fixed(p: &Pmu, tol: f64, seed: u64) -> Report {
    let mut r = Report::new("fixed", tol);
    if let Err(e) = fixed_into(p, &mut r, seed) {
        r.attempt("fixed-point checks", Err(e), "fixed");
    }
    r
}

fn fixed_into(p: &Pmu, r: &mut Report, seed: u64) -> Result<()> {
    let fix = fixed_space(p, seed)?;
    let cofix = cofixed_space(p, seed)?;
    let (h, k) = (p.h, p.k());
    r.value("dim_Fix", fix.dim() as i64);
    r.value("dim_Cofix", cofix.dim() as i64);

    let fb = fix.space.basis();
    let cb = cofix.space.basis();
    let mut lemma: f64 = 0.0;
    for x in &cb {
        for y in &cb {
            let lhs = mul(&p.rng.bra2(x)?, &mul(&p.v, &p.src.ket2(y)?));
            let xy = mul(&adj(x), y);
            lemma = lemma.max(fro(&(&lhs - p.alpha.rho(&xy)?)).max(fro(&(&lhs - p.betahat.rho(&xy)?))));
        }
    }
    for x in &fb {
        for y in &fb {
            let lhs = mul(&p.rng.bra1(x)?, &mul(&p.v, &p.src.ket1(y)?));
            let xy = mul(&adj(x), y);
            lemma = lemma.max(fro(&(&lhs - p.beta.rho(&xy)?)).max(fro(&(&lhs - p.alpha.rho(&xy)?))));
        }
    }
    r.residual("⟨ξ|₂V|ξ'⟩₂ and ⟨η|₁V|η'⟩₁ on (co)fixed elements", lemma, "fixed");

    for (name, sp, rho_mod) in [("Cofix", &cofix.space, &p.betahat), ("Fix", &fix.space, &p.beta)] {
        let triple = sp.product(&sp.adjoint())?.product(sp)?;
        r.residual(format!("[{name} {name}* {name}] = {name}"), triple.equality_residual(sp), "fixed");
        let moved = rho_mod.rho_space().product(sp)?;
        r.residual(format!("ρ(𝔅) {name} ⊆ {name}"), sp.containment_residual(&moved), "fixed");
        let alg = sp.adjoint().product(sp)?;
        r.residual(format!("[{name}* {name}] commutative C*-algebra"), alg.cstar_residual().max(alg.commutator_residual()), "fixed");
    }

    let op = opposite(p)?;
    let fix_op = fixed_space(&op, seed)?;
    let cofix_op = cofixed_space(&op, seed)?;
    r.residual("Fix(V) = Cofix(V^op)", fix.space.equality_residual(&cofix_op.space), "fixed");
    r.residual("Cofix(V) = Fix(V^op)", cofix.space.equality_residual(&fix_op.space), "fixed");

    let etale = fix.normalized.is_some();
    let proper = cofix.normalized.is_some();
    let compact = is_compact(p, seed)?;
    r.flag("étale", etale, "fixed");
    r.flag("proper", proper, "fixed");
    r.flag("compact", compact, "fixed");
    let id = linalg::eye(h);
    if etale {
        r.residual("étale ⇒ Id ∈ A_V", legs::leg(p)?.residual_of(&id), "fixed");
    }
    if proper {
        r.residual("proper ⇒ Id ∈ Â_V", legs::leg_hat(p)?.residual_of(&id), "fixed");
    }

    if let Some(eta0) = fix.normalized.clone() {
        let eps = Counit::new(p, eta0)?;
        r.absorb("counit: ", verify_counit(p, &eps, r.tol));
    }
    if let Some(xi0) = cofix.normalized.clone() {
        let phi = HaarWeight::new(p, xi0)?;
        r.residual("φ(Id) = Id", fro(&(phi.apply(&id) - linalg::eye(k))), "haar");
        r.attempt("(Id ∗ φ)Δ̂ = ρ_α ∘ φ", haar_slice_residual(p, &phi), "haar");
        let f = |a: &Mat| Ok(phi.apply(a));
        r.absorb("φ_ξ₀: ", verify_left_haar(p, &f, r.tol, true));
    }
    Ok(())
}

/// The unnormalized groupoid Haar weight `φ(m(f))(u) = Σ_{x ∈ G^u} f(x) λ(x)`,
/// applied to the diagonal part of its argument.
pub fn unnormalized_haar(gp: &GroupoidPmu, a: &Mat) -> Result<Mat> {
    let g = &gp.g;
    let n = g.n_arrows();
    let off = fro(&(a - linalg::diag(&(0..n).map(|i| a[(i, i)]).collect::<Vec<_>>())));
    if off > 1e-9 * fro(a).max(1.0) {
        return Err(Error::NotInAlgebra("unnormalized Haar weight needs a multiplication operator".into()));
    }
    let vals: Vec<C64> = (0..g.n_units())
        .map(|u| g.range_fiber(u).into_iter().map(|x| a[(x, x)] * gp.lambda.weight[x]).sum())
        .collect();
    Ok(linalg::diag(&vals))
}

/// Groupoid formulas for the fixed spaces, counits and Haar weights.
pub fn verify_groupoid_fixed(gp: &GroupoidPmu, tol: f64, seed: u64) -> Report {
    let mut r = Report::new("groupoid fixed", tol);
    if let Err(e) = groupoid_fixed_into(gp, &mut r, seed) {
        r.attempt("groupoid fixed-point formulas", Err(e), "groupoid");
    }
    r
}

fn groupoid_fixed_into(gp: &GroupoidPmu, r: &mut Report, seed: u64) -> Result<()> {
    let p = &gp.pmu;
    let g = &gp.g;
    let (n, k) = (gp.n(), gp.k());
    let fix = fixed_space(p, seed)?;
    let cofix = cofixed_space(p, seed)?;
    // supported on unit arrows
    let unit_gens: Vec<Mat> = (0..k).map(|u| linalg::unit(n, k, g.unit_arrow(u), u)).collect();
    r.residual("Fix = functions on unit arrows", fix.space.equality_residual(&space_of(&unit_gens, n, k)?), "groupoid");
    // ξ(x) = ξ(s(x)): one generator per unit, constant on its source fiber
    let cofix_gens: Vec<Mat> = (0..k)
        .map(|u| g.source_fiber(u).into_iter().fold(linalg::zeros(n, k), |acc, x| acc + gp.j(x)))
        .collect();
    r.residual("Cofix = {ξ : ξ(x) = ξ(s(x))}", cofix.space.equality_residual(&space_of(&cofix_gens, n, k)?), "groupoid");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs: Vec<Vec<C64>> = (0..3).map(|_| (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()).collect();

    if let Some(eta0) = fix.normalized.clone() {
        let eps = Counit::new(p, eta0)?;
        let mut worst: f64 = 0.0;
        for f in &fs {
            let want: Vec<C64> = (0..k).map(|u| f[g.unit_arrow(u)]).collect();
            worst = worst.max(fro(&(eps.apply(&linalg::diag(f)) - linalg::diag(&want))));
        }
        r.residual("ε̂(m(f)) = f on units", worst, "groupoid");
    }
    let op = opposite(p)?;
    if let Some(eta0) = fixed_space(&op, seed)?.normalized {
        let eps = Counit::new(&op, eta0)?;
        let mut worst: f64 = 0.0;
        for f in &fs {
            let mut want = linalg::zeros(k, k);
            for u in 0..k {
                for x in g.range_fiber(u) {
                    let s = g.s(x);
                    let w = gp.q.d[x].powf(-0.5) * gp.lambda.weight[x] * (gp.q.mu[u] / gp.q.mu[s]).sqrt();
                    want[(u, s)] += f[x] * w;
                }
            }
            worst = worst.max(fro(&(eps.apply(&gp.conv(f)) - want)));
        }
        r.residual("ε̂(L(f)) on A_V = Â(V^op)", worst, "groupoid");
    }

    // the unnormalized weight: axioms are reported, the norm is informational
    let phi = |a: &Mat| unnormalized_haar(gp, a);
    let rep = verify_left_haar(p, &phi, r.tol, false);
    r.absorb("unnormalized φ: ", rep);
    let norm = linalg::opnorm(&unnormalized_haar(gp, &linalg::eye(n))?);
    r.value("unnormalized_haar_norm", norm.round() as i64);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{counting_haar, cyclic_groupoid, pair_groupoid, unit_groupoid, FiniteGroupoid};
    use crate::linalg::c;
    use crate::pmu::groupoid_pmu;

    fn gp(g: FiniteGroupoid, mu: &[f64]) -> GroupoidPmu {
        groupoid_pmu(&g, &counting_haar(&g), mu).unwrap()
    }

    #[test]
    fn fixed_dims() {
        for (g, mu) in [(pair_groupoid(3), vec![1.0, 2.0, 3.0]), (cyclic_groupoid(4), vec![1.0]), (unit_groupoid(2), vec![1.0, 5.0])] {
            let k = g.n_units();
            let p = gp(g, &mu);
            assert_eq!(fixed_space(&p.pmu, 0).unwrap().dim(), k);
            assert_eq!(cofixed_space(&p.pmu, 0).unwrap().dim(), k);
        }
    }

    #[test]
    fn suites_pass() {
        let p = gp(pair_groupoid(2), &[1.0, 2.0]);
        let r = verify_fixed(&p.pmu, 1e-8, 1);
        assert!(r.all_pass(), "{}", r.to_text());
        let r = verify_groupoid_fixed(&p, 1e-8, 1);
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn pair_haar_is_fiber_average() {
        let n = 3;
        let p = gp(pair_groupoid(n), &[1.0; 3]);
        let xi0 = cofixed_space(&p.pmu, 2).unwrap().normalized.unwrap();
        let phi = HaarWeight::new(&p.pmu, xi0).unwrap();
        let f: Vec<C64> = (0..n * n).map(|i| c(i as f64 + 1.0)).collect();
        let got = phi.apply(&linalg::diag(&f));
        for u in 0..n {
            // ξ₀ is constant, so φ averages over G^u
            let avg: f64 = (0..n).map(|v| (u * n + v) as f64 + 1.0).sum::<f64>() / n as f64;
            assert!((got[(u, u)].re - avg).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_eta_rejected() {
        let p = gp(cyclic_groupoid(2), &[1.0]);
        let bogus = linalg::unit(2, 1, 1, 0);
        assert_eq!(Counit::new(&p.pmu, bogus.clone()).unwrap_err(), Error::NotNormalizedFixed);
        assert_eq!(HaarWeight::new(&p.pmu, bogus).unwrap_err(), Error::NotNormalizedCofixed);
    }
}
