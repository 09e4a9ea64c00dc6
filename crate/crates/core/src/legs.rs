//! Legs `Â_V`, `A_V`, `C_V`, comultiplications, fiber products, Fourier
//! algebras and the duality pairing.

use rand::Rng;

use crate::cstar::{op_tensor_left, op_tensor_right, Rtp};
use crate::error::{Error, Result};
use crate::frame::{Pentagon, Rep};
use crate::linalg::{self, adj, c, fro, lstsq, mul, vec_of, Mat, C64};
use crate::opspace::OperatorSpace;
use crate::pmu::{opposite, GroupoidPmu, Pmu};
use crate::report::Report;

/// `ω_{l,r}(a) = Σ_k l_k* a r_k`, an operator on the base space.
#[derive(Clone, Debug)]
pub struct Functional {
    pub left: Vec<Mat>,
    pub right: Vec<Mat>,
}

impl Functional {
    pub fn new(left: Vec<Mat>, right: Vec<Mat>) -> Functional {
        assert_eq!(left.len(), right.len(), "functional tuples must have equal length");
        Functional { left, right }
    }

    pub fn single(l: Mat, r: Mat) -> Functional {
        Functional { left: vec![l], right: vec![r] }
    }

    pub fn eval(&self, a: &Mat) -> Mat {
        let k = self.left.first().map_or(0, |l| l.ncols());
        let mut out = linalg::zeros(k, self.right.first().map_or(0, |r| r.ncols()));
        for (l, r) in self.left.iter().zip(&self.right) {
            out += mul(&adj(l), &mul(a, r));
        }
        out
    }

    /// `ω*(a) = ω(a*)*`.
    pub fn star(&self) -> Functional {
        Functional { left: self.right.clone(), right: self.left.clone() }
    }
}

fn span_of(rows: usize, cols: usize, gens: Vec<Mat>) -> Result<OperatorSpace> {
    OperatorSpace::span(rows, cols, &gens)
}

/// `Â_V = [⟨β|₂ V |α⟩₂]`.
pub fn leg_hat(p: &Pmu) -> Result<OperatorSpace> {
    let mut gens = Vec::new();
    for b in p.beta.basis() {
        let bra = p.rng.bra2(b)?;
        let bv = mul(&bra, &p.v);
        for a in p.alpha.basis() {
            gens.push(mul(&bv, &p.src.ket2(a)?));
        }
    }
    span_of(p.h, p.h, gens)
}

/// `A_V = [⟨α|₁ V |β̂⟩₁]`.
pub fn leg(p: &Pmu) -> Result<OperatorSpace> {
    let mut gens = Vec::new();
    for a in p.alpha.basis() {
        let av = mul(&p.rng.bra1(a)?, &p.v);
        for b in p.betahat.basis() {
            gens.push(mul(&av, &p.src.ket1(b)?));
        }
    }
    span_of(p.h, p.h, gens)
}

/// `C_V = [⟨α|₁ V |α⟩₂]`.
pub fn c_space(p: &Pmu) -> Result<OperatorSpace> {
    let mut gens = Vec::new();
    for a in p.alpha.basis() {
        let av = mul(&p.rng.bra1(a)?, &p.v);
        for a2 in p.alpha.basis() {
            gens.push(mul(&av, &p.src.ket2(a2)?));
        }
    }
    span_of(p.h, p.h, gens)
}

/// `[α α*]`.
pub fn alpha_alpha_star(p: &Pmu) -> Result<OperatorSpace> {
    p.alpha.space.product(&p.alpha.space.adjoint())
}

pub fn regularity_residual(p: &Pmu) -> Result<f64> {
    Ok(c_space(p)?.equality_residual(&alpha_alpha_star(p)?))
}

pub fn is_regular(p: &Pmu, tol: f64) -> Result<bool> {
    Ok(regularity_residual(p)? <= tol)
}

pub fn is_semiregular(p: &Pmu, tol: f64) -> Result<bool> {
    Ok(c_space(p)?.contains(&alpha_alpha_star(p)?, tol))
}

/// `[X Y] = Z` residual, with shape errors mapped to failure.
fn prod_eq(x: &OperatorSpace, y: &OperatorSpace, z: &OperatorSpace) -> f64 {
    x.product(y).map_or(f64::MAX, |s| s.equality_residual(z))
}

/// `[X H] = H` as a residual: number of missing range directions.
fn range_defect(x: &OperatorSpace) -> f64 {
    (x.rows() - x.range().ncols()) as f64
}

/// The stability relations `[X ρ] = [ρ X] = X` for each algebra `ρ`.
fn stability(r: &mut Report, name: &str, x: &OperatorSpace, algs: &[(&str, OperatorSpace)], tag: &str) {
    for (an, a) in algs {
        r.residual(format!("[{name}{an}] = {name}"), prod_eq(x, a, x), tag);
        r.residual(format!("[{an}{name}] = {name}"), prod_eq(a, x, x), tag);
    }
}

/// Relations satisfied by `Â_V`, `A_V` and `C_V`, together with
/// regularity-dependent ones.
pub fn verify_leg_relations(p: &Pmu, tol: f64) -> Report {
    let mut r = Report::new("leg relations", tol);
    if let Err(e) = leg_relations_into(p, &mut r) {
        r.attempt("leg relations", Err(e), "legs");
    }
    r
}

fn leg_relations_into(p: &Pmu, r: &mut Report) -> Result<()> {
    let ahat = leg_hat(p)?;
    let a = leg(p)?;
    let cv = c_space(p)?;
    let op = opposite(p)?;
    let rho_bh = p.betahat.rho_space();
    let rho_a = p.alpha.rho_space();
    let rho_b = p.beta.rho_space();
    let (al, be, bh) = (&p.alpha.space, &p.beta.space, &p.betahat.space);
    r.value("dim_Ahat", ahat.dim() as i64);
    r.value("dim_A", a.dim() as i64);
    r.value("dim_C", cv.dim() as i64);

    r.residual("Â(V^op) = A*", leg_hat(&op)?.equality_residual(&a.adjoint()), "legs");
    r.residual("[ÂÂ] = Â", prod_eq(&ahat, &ahat, &ahat), "legs");
    r.residual("[ÂH] = H", range_defect(&ahat), "legs");
    r.residual("[Â*H] = H", range_defect(&ahat.adjoint()), "legs");
    r.residual("[Âβ] = β", prod_eq(&ahat, be, be), "legs");
    r.residual("[Â*β] = β", prod_eq(&ahat.adjoint(), be, be), "legs");
    stability(r, "Â", &ahat, &[("ρ_β̂(𝔅)", rho_bh.clone()), ("ρ_α(𝔅†)", rho_a.clone())], "legs");

    r.residual("A(V^op) = Â*", leg(&op)?.equality_residual(&ahat.adjoint()), "legs");
    r.residual("[AA] = A", prod_eq(&a, &a, &a), "legs");
    r.residual("[AH] = H", range_defect(&a), "legs");
    r.residual("[A*H] = H", range_defect(&a.adjoint()), "legs");
    r.residual("[Aβ̂] = β̂", prod_eq(&a, bh, bh), "legs");
    r.residual("[A*β̂] = β̂", prod_eq(&a.adjoint(), bh, bh), "legs");
    stability(r, "A", &a, &[("ρ_β(𝔅)", rho_b.clone()), ("ρ_α(𝔅†)", rho_a.clone())], "legs");

    r.residual("[CC] = C", prod_eq(&cv, &cv, &cv), "regularity");
    r.residual("C(V^op) = C*", c_space(&op)?.equality_residual(&cv.adjoint()), "regularity");
    r.residual("[Cα] = α", prod_eq(&cv, al, al), "regularity");
    stability(r, "C", &cv, &[("ρ_β(𝔅)", rho_b), ("ρ_β̂(𝔅)", rho_bh)], "regularity");

    let aa = alpha_alpha_star(p)?;
    let regular = cv.equality_residual(&aa);
    r.residual("C = [αα*]", regular, "regularity");
    r.residual("C ⊇ [αα*]", cv.containment_residual(&aa), "regularity");
    if regular <= r.tol {
        r.residual("C is a C*-algebra", cv.cstar_residual(), "regularity");
        let ahat1 = be.adjoint().product(al)?;
        r.residual("[βÂ_𝟙] = [αÂ_𝟙]", be.product(&ahat1)?.equality_residual(&al.product(&ahat1)?), "regularity");
    }
    Ok(())
}

/// Membership test for the fiber product `A ∗ B` on `H β⊗γ K`, with the
/// target spans `[|β⟩₁ B]` and `[|γ⟩₂ A]` computed once.
pub struct FiberProduct<'a> {
    r: &'a Rtp,
    k1: Vec<Mat>,
    k2: Vec<Mat>,
    target1: OperatorSpace,
    target2: OperatorSpace,
}

impl<'a> FiberProduct<'a> {
    /// `A` acts on `H`, `B` on `K`.
    pub fn new(r: &'a Rtp, a: &OperatorSpace, b: &OperatorSpace) -> Result<FiberProduct<'a>> {
        let k1: Vec<Mat> = (0..r.left.dim()).map(|i| r.ket1_basis(i)).collect();
        let k2: Vec<Mat> = (0..r.right.dim()).map(|j| r.ket2_basis(j).clone()).collect();
        let target1 = OperatorSpace::span(r.dim(), r.h_right(), &prods(&k1, &b.basis()))?;
        let target2 = OperatorSpace::span(r.dim(), r.h_left(), &prods(&k2, &a.basis()))?;
        Ok(FiberProduct { r, k1, k2, target1, target2 })
    }

    /// Residual of `x|β⟩₁, x*|β⟩₁ ⊆ [|β⟩₁ B]` and `x|γ⟩₂, x*|γ⟩₂ ⊆ [|γ⟩₂ A]`.
    pub fn residual(&self, x: &Mat) -> Result<f64> {
        let r = self.r;
        if x.nrows() != r.dim() || x.ncols() != r.dim() {
            return Err(Error::ShapeMismatch("fiber product membership".into()));
        }
        let xs = adj(x);
        let mut worst: f64 = 0.0;
        for y in [x, &xs] {
            for (ks, t) in [(&self.k1, &self.target1), (&self.k2, &self.target2)] {
                for k in ks {
                    let z = mul(y, k);
                    worst = worst.max(fro(&(&z - t.project(&z))));
                }
            }
        }
        Ok(worst)
    }
}

/// Residual of `x ∈ A ∗ B` on `H β⊗γ K`; see [`FiberProduct`].
pub fn fiber_product_residual(x: &Mat, r: &Rtp, a: &OperatorSpace, b: &OperatorSpace) -> Result<f64> {
    FiberProduct::new(r, a, b)?.residual(x)
}

pub fn in_fiber_product(x: &Mat, r: &Rtp, a: &OperatorSpace, b: &OperatorSpace, tol: f64) -> Result<bool> {
    Ok(fiber_product_residual(x, r, a, b)? <= tol)
}

fn prods(xs: &[Mat], ys: &[Mat]) -> Vec<Mat> {
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for x in xs {
        for y in ys {
            out.push(mul(x, y));
        }
    }
    out
}

/// The two iterated comultiplications `(Δ̂ ∗ Id)` and `(Id ∗ Δ̂)` on the
/// triple product `(H β̂⊗α H) β̂⊗α H`.
pub struct Coassoc {
    pent: Pentagon,
    /// `V₂₃` followed by the flip and reassociation onto `(H β̂⊗α H) ⊗ H`.
    u: Mat,
}

impl Coassoc {
    pub fn new(p: &Pmu) -> Result<Coassoc> {
        let pent = Pentagon::new(p, &Rep::regular(p))?;
        let f = &pent.frame;
        let u = mul(&adj(&f.a4), &mul(&f.id_sigma, &mul(&f.y23, &f.a1)));
        Ok(Coassoc { pent, u })
    }

    /// `V₁₂* x₂₃ V₁₂`.
    pub fn hat_left(&self, x: &Mat) -> Result<Mat> {
        let p = &self.pent;
        let x23 = op_tensor_left(&p.r2, &p.r2, None, x)?;
        let w = mul(&p.a2, &p.x12_top);
        Ok(mul(&adj(&w), &mul(&x23, &w)))
    }

    /// `V₂₃* x₁₃ V₂₃`.
    pub fn hat_right(&self, x: &Mat) -> Result<Mat> {
        let t = &self.pent.frame.t4ll;
        let x13 = op_tensor_right(t, t, x, None)?;
        Ok(mul(&adj(&self.u), &mul(&x13, &self.u)))
    }
}

/// Checks of `(Â_V, Δ̂_V)` as a Hopf C*-bimodule.
fn hopf_hat_into(p: &Pmu, r: &mut Report, prefix: &str) -> Result<()> {
    let ahat = leg_hat(p)?;
    r.residual(format!("{prefix}C*-algebra"), ahat.cstar_residual(), "hopf");
    r.residual(format!("{prefix}[ρ_α(𝔅†)·] ⊆ ·"), prod_eq(&p.alpha.rho_space(), &ahat, &ahat), "hopf");
    r.residual(format!("{prefix}[ρ_β̂(𝔅)·] ⊆ ·"), prod_eq(&p.betahat.rho_space(), &ahat, &ahat), "hopf");
    let basis = ahat.basis();
    let mut fib: f64 = 0.0;
    let mut hom: f64 = 0.0;
    let deltas: Vec<Mat> = basis.iter().map(|a| p.delta_hat(a)).collect::<Result<_>>()?;
    let fp = FiberProduct::new(&p.src, &ahat, &ahat)?;
    for (i, a) in basis.iter().enumerate() {
        fib = fib.max(fp.residual(&deltas[i])?);
        hom = hom.max(fro(&(p.delta_hat(&adj(a))? - adj(&deltas[i]))));
        for (j, b) in basis.iter().enumerate() {
            let lhs = p.delta_hat(&mul(a, b))?;
            hom = hom.max(fro(&(lhs - mul(&deltas[i], &deltas[j]))));
        }
    }
    r.residual(format!("{prefix}Δ lands in the fiber product"), fib, "hopf");
    r.residual(format!("{prefix}Δ is a *-homomorphism"), hom, "hopf");
    let worst = Coassoc::new(p).and_then(|co| {
        let mut worst: f64 = 0.0;
        for d in &deltas {
            worst = worst.max(linalg::opnorm(&(co.hat_left(d)? - co.hat_right(d)?)));
        }
        Ok(worst)
    });
    r.attempt(format!("{prefix}coassociativity"), worst, "hopf");
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LegSide {
    Hat,
    Plain,
}

/// Hopf C*-bimodule checks for `(Â_V, Δ̂_V)` or `(A_V, Δ_V)`.
///
/// The plain side is checked through `V^op`, using `Δ̂_{V^op} = Ad_Σ ∘ Δ_V`
/// and `Â_{V^op} = A_V*`; both identities are part of the report.
pub fn verify_hopf(p: &Pmu, side: LegSide, tol: f64) -> Report {
    let name = match side {
        LegSide::Hat => "hopf Â",
        LegSide::Plain => "hopf A",
    };
    let mut r = Report::new(name, tol);
    let res = match side {
        LegSide::Hat => hopf_hat_into(p, &mut r, ""),
        LegSide::Plain => hopf_plain_into(p, &mut r),
    };
    if let Err(e) = res {
        r.attempt("hopf checks", Err(e), "hopf");
    }
    r
}

fn hopf_plain_into(p: &Pmu, r: &mut Report) -> Result<()> {
    let a = leg(p)?;
    let op = opposite(p)?;
    r.residual("C*-algebra", a.cstar_residual(), "hopf");
    r.residual("[ρ_β(𝔅)·] ⊆ ·", prod_eq(&p.beta.rho_space(), &a, &a), "hopf");
    r.residual("[ρ_α(𝔅†)·] ⊆ ·", prod_eq(&p.alpha.rho_space(), &a, &a), "hopf");
    let mut fib: f64 = 0.0;
    let mut sig: f64 = 0.0;
    let sigma = crate::cstar::flip(&p.rng, &op.src)?;
    let fp = FiberProduct::new(&p.rng, &a, &a)?;
    for z in a.basis() {
        let d = p.delta(&z)?;
        fib = fib.max(fp.residual(&d)?);
        sig = sig.max(fro(&(op.delta_hat(&z)? - mul(&sigma, &mul(&d, &adj(&sigma))))));
    }
    r.residual("Δ lands in the fiber product", fib, "hopf");
    r.residual("Δ̂(V^op) = Ad_Σ ∘ Δ", sig, "hopf");
    hopf_hat_into(&op, r, "op: ")
}

/// `π̂(ω) = Σ ⟨l_n|₂ V |r_n⟩₂` for `l ∈ β`, `r ∈ α`.
pub fn pi_hat(p: &Pmu, w: &Functional) -> Result<Mat> {
    let mut out = linalg::zeros(p.h, p.h);
    for (l, r) in w.left.iter().zip(&w.right) {
        out += mul(&p.rng.bra2(l)?, &mul(&p.v, &p.src.ket2(r)?));
    }
    Ok(out)
}

/// `π(υ) = Σ ⟨l_n|₁ V |r_n⟩₁` for `l ∈ α`, `r ∈ β̂`.
pub fn pi(p: &Pmu, u: &Functional) -> Result<Mat> {
    let mut out = linalg::zeros(p.h, p.h);
    for (l, r) in u.left.iter().zip(&u.right) {
        out += mul(&p.rng.bra1(l)?, &mul(&p.v, &p.src.ket1(r)?));
    }
    Ok(out)
}

/// `ω ⊠ ω'` on `H α⊗β H` for `ω, ω'` over `(β, α)`.
pub fn boxtimes_rng(p: &Pmu, w: &Functional, w2: &Functional) -> Result<Functional> {
    let (mut th, mut th2) = (Vec::new(), Vec::new());
    for (xi, eta) in w.left.iter().zip(&w.right) {
        for (xi2, eta2) in w2.left.iter().zip(&w2.right) {
            th.push(mul(&p.rng.ket2(xi2)?, xi));
            th2.push(mul(&p.rng.ket1(eta)?, eta2));
        }
    }
    Ok(Functional::new(th, th2))
}

/// `υ ⊠ υ'` on `H β̂⊗α H` for `υ, υ'` over `(α, β̂)`.
pub fn boxtimes_src(p: &Pmu, u: &Functional, u2: &Functional) -> Result<Functional> {
    let (mut k, mut k2) = (Vec::new(), Vec::new());
    for (eta, zeta) in u.left.iter().zip(&u.right) {
        for (eta2, zeta2) in u2.left.iter().zip(&u2.right) {
            k.push(mul(&p.src.ket2(eta2)?, eta));
            k2.push(mul(&p.src.ket1(zeta)?, zeta2));
        }
    }
    Ok(Functional::new(k, k2))
}

/// Single-term functionals over `(β, α)` from basis pairs.
pub fn spanning_hat_functionals(p: &Pmu) -> Vec<Functional> {
    let mut out = Vec::new();
    for l in p.beta.basis() {
        for r in p.alpha.basis() {
            out.push(Functional::single(l.clone(), r.clone()));
        }
    }
    out
}

/// Single-term functionals over `(α, β̂)` from basis pairs.
pub fn spanning_functionals(p: &Pmu) -> Vec<Functional> {
    let mut out = Vec::new();
    for l in p.alpha.basis() {
        for r in p.betahat.basis() {
            out.push(Functional::single(l.clone(), r.clone()));
        }
    }
    out
}

/// `(â | a)` computed both ways: `ω(π(υ))` and `υ(π̂(ω))`.
pub fn pairing(p: &Pmu, w: &Functional, u: &Functional) -> Result<(Mat, Mat)> {
    Ok((w.eval(&pi(p, u)?), u.eval(&pi_hat(p, w)?)))
}

/// The element `π̂(ω ∗ ω')` of `Â_V`, recovered from its pairings
/// `υ ↦ (ω ⊠ ω')(Δ(π(υ)))` against spanning functionals.
pub fn pi_hat_convolution(p: &Pmu, w: &Functional, w2: &Functional) -> Result<Mat> {
    let ahat = leg_hat(p)?;
    let wb = boxtimes_rng(p, w, w2)?;
    let us = spanning_functionals(p);
    let basis = ahat.basis();
    let k = p.k();
    let mut a = linalg::zeros(us.len() * k * k, basis.len());
    let mut b = linalg::zeros(us.len() * k * k, 1);
    for (ui, u) in us.iter().enumerate() {
        for (bi, x) in basis.iter().enumerate() {
            let v = vec_of(&u.eval(x));
            a.view_mut((ui * k * k, bi), (k * k, 1)).copy_from(&v);
        }
        let target = wb.eval(&p.delta(&pi(p, u)?)?);
        b.view_mut((ui * k * k, 0), (k * k, 1)).copy_from(&vec_of(&target));
    }
    let (coef, res) = lstsq(&a, &b);
    if res > 1e-8 && fro(&b) > 1e-12 {
        return Err(Error::InconsistentSystem { what: "convolution product".into(), residual: res });
    }
    Ok((0..basis.len()).fold(linalg::zeros(p.h, p.h), |acc, i| acc + &basis[i] * coef[(i, 0)]))
}

/// Ranks of the pairing: rows are spanning Fourier elements on one side,
/// columns all pairing values against the other side.
pub fn pairing_ranks(p: &Pmu) -> Result<(usize, usize)> {
    let ws = spanning_hat_functionals(p);
    let us = spanning_functionals(p);
    let k = p.k();
    let mut m = linalg::zeros(ws.len(), us.len() * k * k);
    for (i, w) in ws.iter().enumerate() {
        for (j, u) in us.iter().enumerate() {
            let (x, _) = pairing(p, w, u)?;
            for (t, z) in vec_of(&x).iter().enumerate() {
                m[(i, j * k * k + t)] = *z;
            }
        }
    }
    let left = linalg::rank(&m);
    // the transpose has the same rank; recompute from the other side's grouping
    let mut mt = linalg::zeros(us.len(), ws.len() * k * k);
    for (j, u) in us.iter().enumerate() {
        for (i, w) in ws.iter().enumerate() {
            let (_, y) = pairing(p, w, u)?;
            for (t, z) in vec_of(&y).iter().enumerate() {
                mt[(j, i * k * k + t)] = *z;
            }
        }
    }
    Ok((left, linalg::rank(&mt)))
}

fn random_combo(rng: &mut impl Rng, basis: &[Mat]) -> Mat {
    let mut out = linalg::zeros(basis[0].nrows(), basis[0].ncols());
    for b in basis {
        out += b * C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    out
}

fn random_functional(rng: &mut impl Rng, l: &[Mat], r: &[Mat], terms: usize) -> Functional {
    let left = (0..terms).map(|_| random_combo(rng, l)).collect();
    let right = (0..terms).map(|_| random_combo(rng, r)).collect();
    Functional::new(left, right)
}

/// Pairing, convolution and Fourier-algebra checks with seeded random
/// functionals.
pub fn verify_pairing(p: &Pmu, tol: f64, seed: u64) -> Report {
    let mut r = Report::new("pairing", tol);
    if let Err(e) = pairing_into(p, &mut r, seed) {
        r.attempt("pairing checks", Err(e), "pairing");
    }
    r
}

fn pairing_into(p: &Pmu, r: &mut Report, seed: u64) -> Result<()> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (b, a, bh) = (p.beta.basis(), p.alpha.basis(), p.betahat.basis());
    let ws: Vec<Functional> = (0..3).map(|_| random_functional(&mut rng, b, a, 2)).collect();
    let us: Vec<Functional> = (0..3).map(|_| random_functional(&mut rng, a, bh, 2)).collect();
    let ahat = leg_hat(p)?;
    let aleg = leg(p)?;

    let mut well: f64 = 0.0;
    let mut mem: f64 = 0.0;
    for w in &ws {
        mem = mem.max(ahat.residual_of(&pi_hat(p, w)?));
        for u in &us {
            let (x, y) = pairing(p, w, u)?;
            well = well.max(fro(&(x - y)));
        }
    }
    for u in &us {
        mem = mem.max(aleg.residual_of(&pi(p, u)?));
    }
    r.residual("π̂, π land in the legs", mem, "pairing");
    r.residual("ω(π(υ)) = υ(π̂(ω))", well, "pairing");

    let (lr, rr) = pairing_ranks(p)?;
    r.value("pairing_rank_left", lr as i64);
    r.value("pairing_rank_right", rr as i64);
    r.count("pairing left rank = dim Â", lr, ahat.dim(), "pairing");
    r.count("pairing right rank = dim A", rr, aleg.dim(), "pairing");

    let mut prod_hat: f64 = 0.0;
    let mut prod_plain: f64 = 0.0;
    let mut conv: f64 = 0.0;
    for w in &ws[..2] {
        for w2 in &ws[1..] {
            let lhs = mul(&pi_hat(p, w)?, &pi_hat(p, w2)?);
            let wb = boxtimes_rng(p, w, w2)?;
            for u in &us {
                let got = u.eval(&lhs);
                let want = wb.eval(&p.delta(&pi(p, u)?)?);
                prod_hat = prod_hat.max(fro(&(got - want)));
            }
            conv = conv.max(fro(&(pi_hat_convolution(p, w, w2)? - lhs)));
        }
    }
    for u in &us[..2] {
        for u2 in &us[1..] {
            let lhs = mul(&pi(p, u)?, &pi(p, u2)?);
            let ub = boxtimes_src(p, u, u2)?;
            for w in &ws {
                let got = w.eval(&lhs);
                let want = ub.eval(&p.delta_hat(&pi_hat(p, w)?)?);
                prod_plain = prod_plain.max(fro(&(got - want)));
            }
        }
    }
    r.residual("(π̂(ω)π̂(ω')|a) = (ω⊠ω')(Δ(a))", prod_hat, "pairing");
    r.residual("(â|π(υ)π(υ')) = (υ⊠υ')(Δ̂(â))", prod_plain, "pairing");
    r.residual("π̂(ω)π̂(ω') = π̂(ω∗ω')", conv, "pairing");

    // (ω∗ω')∗ω'' = ω∗(ω'∗ω''), evaluated through the pairing
    let (w0, w1, w2) = (&ws[0], &ws[1], &ws[2]);
    let left = mul(&pi_hat_convolution(p, w0, w1)?, &pi_hat(p, w2)?);
    let right = mul(&pi_hat(p, w0)?, &pi_hat_convolution(p, w1, w2)?);
    r.residual("convolution is associative", fro(&(left - right)), "pairing");

    let mut star: f64 = 0.0;
    for w in &ws {
        let x = random_combo(&mut rng, &ahat.basis());
        star = star.max(fro(&(w.star().eval(&x) - adj(&w.eval(&adj(&x))))));
    }
    r.residual("ω*(a) = ω(a*)*", star, "pairing");

    // Δ̂(π̂_V(ω)) = π̂_{V⊠V}(ω)
    let reg = Rep::regular(p);
    let frame = crate::frame::Frame::new(p, &reg, &reg)?;
    let vv = frame.tensor_rep();
    let mut tens: f64 = 0.0;
    for w in &ws {
        let mut rhs = linalg::zeros(vv.src.h_left(), vv.src.h_left());
        for (l, rr) in w.left.iter().zip(&w.right) {
            rhs += mul(&vv.rng.bra2(l)?, &mul(&vv.x, &vv.src.ket2(rr)?));
        }
        tens = tens.max(fro(&(p.delta_hat(&pi_hat(p, w)?)? - rhs)));
    }
    r.residual("Δ̂(π̂_V(ω)) = π̂_{V⊠V}(ω)", tens, "pairing");
    Ok(())
}

/// `(ξ̄ ∗ ξ'*)(x) = Σ_{y ∈ G^{r(x)}} conj ξ(y) ξ'(x⁻¹y) λ(y)`.
pub fn hat_symbol(gp: &GroupoidPmu, xi: &[C64], xi2: &[C64]) -> Vec<C64> {
    let g = &gp.g;
    (0..g.n_arrows())
        .map(|x| {
            g.range_fiber(g.r(x))
                .into_iter()
                .map(|y| xi[y].conj() * xi2[g.mul(g.inv(x), y)] * gp.lambda.weight[y])
                .sum()
        })
        .collect()
}

/// `Δ(L(g))` in function coordinates on `G r×r G`, conjugated to
/// orthonormal ones.
pub fn delta_conv_formula(gp: &GroupoidPmu, f: &[C64]) -> Mat {
    let g = &gp.g;
    let pairs = g.range_pairs();
    let idx = |a: usize, b: usize| pairs.iter().position(|&t| t == (a, b)).expect("range pair");
    let w: Vec<f64> = pairs
        .iter()
        .map(|&(a, b)| gp.q.mu[g.r(a)] * gp.lambda.weight[a] * gp.lambda.weight[b])
        .collect();
    let mut m = linalg::zeros(pairs.len(), pairs.len());
    for (i, &(x, y)) in pairs.iter().enumerate() {
        for z in g.range_fiber(g.r(x)) {
            let zi = g.inv(z);
            let j = idx(g.mul(zi, x), g.mul(zi, y));
            let coef = f[z] * gp.q.d[z].powf(-0.5) * gp.lambda.weight[z] * (w[i] / w[j]).sqrt();
            m[(i, j)] += coef;
        }
    }
    m
}

/// Groupoid-specific formulas for the legs and comultiplications.
pub fn verify_groupoid_legs(gp: &GroupoidPmu, tol: f64, seed: u64) -> Report {
    let mut r = Report::new("groupoid legs", tol);
    if let Err(e) = groupoid_legs_into(gp, &mut r, seed) {
        r.attempt("groupoid leg formulas", Err(e), "groupoid");
    }
    r
}

fn groupoid_legs_into(gp: &GroupoidPmu, r: &mut Report, seed: u64) -> Result<()> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let p = &gp.pmu;
    let n = gp.n();
    let ahat = leg_hat(p)?;
    let aleg = leg(p)?;
    r.value("dim_Ahat", ahat.dim() as i64);
    r.value("dim_A", aleg.dim() as i64);
    r.residual("Â = m(C(G))", ahat.equality_residual(&OperatorSpace::diagonals(n)), "groupoid");
    r.residual("Â commutative", ahat.commutator_residual(), "groupoid");
    let conv_gens: Vec<Mat> = (0..n).map(|x| gp.conv(&indicator(n, x))).collect();
    r.residual("A = span L(C(G))", aleg.equality_residual(&OperatorSpace::span(n, n, &conv_gens)?), "groupoid");

    let rand_fn = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<C64> {
        (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    };
    let mut hat_err: f64 = 0.0;
    let mut a_err: f64 = 0.0;
    for _ in 0..3 {
        let (xi, xi2) = (rand_fn(&mut rng), rand_fn(&mut rng));
        let w = Functional::single(gp.j_fn(&xi), gp.j_fn(&xi2));
        hat_err = hat_err.max(fro(&(pi_hat(p, &w)? - linalg::diag(&hat_symbol(gp, &xi, &xi2)))));
        let (eta, eta2) = (rand_fn(&mut rng), rand_fn(&mut rng));
        let u = Functional::single(gp.j_fn(&eta), gp.jhat_fn(&eta2));
        let prod: Vec<C64> = eta.iter().zip(&eta2).map(|(a, b)| a.conj() * b).collect();
        a_err = a_err.max(fro(&(pi(p, &u)? - gp.conv(&prod))));
    }
    r.residual("π̂(ω_{j(ξ),j(ξ')}) = m(ξ̄∗ξ'*)", hat_err, "groupoid");
    r.residual("π(ω_{j(η),ĵ(η')}) = L(η̄η')", a_err, "groupoid");

    let us = gp.phi_src()?;
    let ur = gp.phi_rng()?;
    let src_pairs = gp.g.composable_pairs();
    let mut dh: f64 = 0.0;
    let mut dl: f64 = 0.0;
    for _ in 0..2 {
        let f = rand_fn(&mut rng);
        let got = mul(&us, &mul(&p.delta_hat(&linalg::diag(&f))?, &adj(&us)));
        let want: Vec<C64> = src_pairs.iter().map(|&(x, y)| f[gp.g.mul(x, y)]).collect();
        dh = dh.max(max_entry(&(got - linalg::diag(&want))));
        let got = mul(&ur, &mul(&p.delta(&gp.conv(&f))?, &adj(&ur)));
        dl = dl.max(max_entry(&(got - delta_conv_formula(gp, &f))));
    }
    r.residual("Δ̂(m(f)) = m(f(xy))", dh, "groupoid");
    r.residual("Δ(L(g)) formula", dl, "groupoid");
    if gp.k() == 1 {
        let mut grp: f64 = 0.0;
        for x in 0..n {
            let ux = gp.conv(&indicator(n, x));
            let got = mul(&ur, &mul(&p.delta(&ux)?, &adj(&ur)));
            grp = grp.max(max_entry(&(got - linalg::kron(&ux, &ux))));
        }
        r.residual("Δ(U_x) = U_x ⊗ U_x", grp, "groupoid");
    }
    Ok(())
}

pub fn indicator(n: usize, x: usize) -> Vec<C64> {
    let mut v = vec![c(0.0); n];
    v[x] = c(1.0);
    v
}

/// Largest entry modulus, for entrywise comparisons.
pub fn max_entry(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{counting_haar, cyclic_groupoid, pair_groupoid, unit_groupoid, FiniteGroupoid};
    use crate::pmu::{groupoid_pmu, tamper};

    fn gp(g: FiniteGroupoid, mu: &[f64]) -> GroupoidPmu {
        groupoid_pmu(&g, &counting_haar(&g), mu).unwrap()
    }

    #[test]
    fn leg_dimensions() {
        let p = gp(pair_groupoid(2), &[1.0, 2.0]);
        assert_eq!(leg_hat(&p.pmu).unwrap().dim(), 4);
        assert_eq!(leg(&p.pmu).unwrap().dim(), 4);
        let u = gp(unit_groupoid(3), &[1.0, 1.0, 1.0]);
        assert_eq!(leg_hat(&u.pmu).unwrap().dim(), 3);
        assert_eq!(leg(&u.pmu).unwrap().dim(), 3);
    }

    #[test]
    fn relations_and_regularity() {
        let p = gp(cyclic_groupoid(3), &[1.0]);
        let r = verify_leg_relations(&p.pmu, 1e-8);
        assert!(r.all_pass(), "{}", r.to_text());
        assert!(is_regular(&p.pmu, 1e-9).unwrap());
    }

    #[test]
    fn groupoid_formulas() {
        let p = gp(pair_groupoid(2), &[1.0, 2.0]);
        let r = verify_groupoid_legs(&p, 1e-9, 7);
        assert!(r.all_pass(), "{}", r.to_text());
        let z = gp(cyclic_groupoid(3), &[1.0]);
        let r = verify_groupoid_legs(&z, 1e-9, 7);
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn hopf_both_sides() {
        let p = gp(pair_groupoid(2), &[1.0, 2.0]);
        for side in [LegSide::Hat, LegSide::Plain] {
            let r = verify_hopf(&p.pmu, side, 1e-8);
            assert!(r.all_pass(), "{}", r.to_text());
        }
    }

    #[test]
    fn tampered_breaks_coassociativity() {
        let p = gp(cyclic_groupoid(3), &[1.0]);
        let bad = tamper(&p.pmu, 0, 1);
        let r = verify_hopf(&bad, LegSide::Hat, 1e-8);
        assert!(!r.all_pass());
    }

    #[test]
    fn pairing_suite() {
        let p = gp(cyclic_groupoid(3), &[1.0]);
        let r = verify_pairing(&p.pmu, 1e-8, 1);
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn random_operator_not_in_fiber_product() {
        use rand::SeedableRng;
        let p = gp(pair_groupoid(2), &[1.0, 1.0]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let x = linalg::random_mat(&mut rng, p.pmu.src.dim(), p.pmu.src.dim());
        let ahat = leg_hat(&p.pmu).unwrap();
        assert!(!in_fiber_product(&x, &p.pmu.src, &ahat, &ahat, 1e-8).unwrap());
        let id = linalg::eye(p.pmu.src.dim());
        assert!(in_fiber_product(&id, &p.pmu.src, &ahat, &ahat, 1e-8).unwrap());
    }
}
