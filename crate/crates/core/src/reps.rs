//! Representations and corepresentations, their tensor products and legs,
//! and the correspondence with representations of a finite groupoid.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cstar::{flip, op_tensor_left, op_tensor_right, rtp, unit_left, unit_right, Module, RtpRef, Side};
use crate::error::{Error, Result};
use crate::fixedpoints::multiplier_space;
use crate::frame::{Frame, Pentagon};
pub use crate::frame::Rep;
use crate::groupoid::FiniteGroupoid;
use crate::legs::{self, Functional};
use crate::linalg::{self, adj, block_diag, fro, hcat, herm_eigen, herm_fn, kron, mul, nullspace, opnorm, solve_on_span, unitarity_defect, vcat, Mat, C64};
use crate::opspace::OperatorSpace;
use crate::pmu::{opposite, GroupoidPmu, Pmu};
use crate::report::Report;

/// `𝟙_V = Ψ* Φ` on `(𝔎, 𝔅, 𝔅†)`.
pub fn trivial_rep(p: &Pmu) -> Result<Rep> {
    let gamma = Arc::new(Module::unit(p.base.clone(), Side::B));
    let deltahat = Arc::new(Module::unit(p.base.clone(), Side::Bdag));
    let src = rtp(&deltahat, &p.alpha)?;
    let rng = rtp(&gamma, &p.beta)?;
    let phi = canonical_to_h(&src, &p.alpha)?;
    let psi = canonical_to_h(&rng, &p.beta)?;
    Ok(Rep { gamma, deltahat, src, rng, x: mul(&adj(&psi), &phi) })
}

/// `𝔎 ⊗ H → H`, `b ▷ ζ ↦ ρ(b) ζ`.
fn canonical_to_h(r: &RtpRef, m: &Module) -> Result<Mat> {
    let blocks: Vec<Mat> = r.left.basis().iter().map(|b| m.rho(b)).collect::<Result<_>>()?;
    solve_on_span(r.q(), &hcat(&blocks), "canonical identification")
}

pub fn regular_rep(p: &Pmu) -> Rep {
    Rep::regular(p)
}

/// `X(γ◁α) = γ▷α`, `X(δ̂▷β) = δ̂◁β`, `X(δ̂▷β̂) = γ▷β̂`.
pub fn rep_intertwining_residuals(p: &Pmu, x: &Rep) -> Result<[f64; 3]> {
    let (g, d) = (&x.gamma.space, &x.deltahat.space);
    let pairs = [
        (x.src.ket2_space(g)?, x.rng.ket1_space(&p.alpha.space)?),
        (x.src.ket1_space(&p.beta.space)?, x.rng.ket2_space(d)?),
        (x.src.ket1_space(&p.betahat.space)?, x.rng.ket1_space(&p.betahat.space)?),
    ];
    let mut out = [0.0; 3];
    for (k, (from, to)) in pairs.iter().enumerate() {
        out[k] = from.left_mul(&x.x)?.equality_residual(to);
    }
    Ok(out)
}

/// Unitarity, the intertwining relations and the pentagon.
pub fn verify_rep(p: &Pmu, x: &Rep, tol: f64) -> Report {
    verify_rep_with(p, x, tol, true)
}

fn verify_rep_with(p: &Pmu, x: &Rep, tol: f64, pentagon: bool) -> Report {
    let mut r = Report::new("rep", tol);
    r.residual("X unitary", unitarity_defect(&x.x), "rep");
    match rep_intertwining_residuals(p, x) {
        Ok(res) => {
            let names = ["X(γ◁α) = γ▷α", "X(δ̂▷β) = δ̂◁β", "X(δ̂▷β̂) = γ▷β̂"];
            for (n, v) in names.iter().zip(res) {
                r.residual(*n, v, "rep");
            }
        }
        Err(e) => r.attempt("intertwining relations", Err(e), "rep"),
    }
    if pentagon {
        r.attempt("pentagon", Pentagon::new(p, x).map(|pt| pt.residual()), "pentagon");
    }
    r
}

/// A corepresentation `X : H β̂⊗γ K → H α⊗δ K`.
#[derive(Clone, Debug)]
pub struct Corep {
    /// Side `B`.
    pub gamma: Arc<Module>,
    /// Side `B†`.
    pub delta: Arc<Module>,
    pub src: RtpRef,
    pub rng: RtpRef,
    pub x: Mat,
}

impl Corep {
    pub fn on_module(p: &Pmu, gamma: Arc<Module>, delta: Arc<Module>, x: Mat) -> Result<Corep> {
        let src = rtp(&p.betahat, &gamma)?;
        let rng = rtp(&p.alpha, &delta)?;
        if x.nrows() != rng.dim() || x.ncols() != src.dim() {
            return Err(Error::ShapeMismatch("corepresentation operator".into()));
        }
        Ok(Corep { gamma, delta, src, rng, x })
    }

    /// `V` itself on `(H, α, β)`.
    pub fn regular(p: &Pmu) -> Corep {
        Corep { gamma: p.alpha.clone(), delta: p.beta.clone(), src: p.src.clone(), rng: p.rng.clone(), x: p.v.clone() }
    }

    pub fn k(&self) -> usize {
        self.gamma.h
    }

    /// `Σ X* Σ`, a representation of `V^op` on `(K, γ, δ)`.
    pub fn to_op_rep(&self, op: &Pmu) -> Result<Rep> {
        let src = rtp(&self.delta, &op.alpha)?;
        let rng = rtp(&self.gamma, &op.beta)?;
        let s_in = flip(&src, &self.rng)?;
        let s_out = flip(&self.src, &rng)?;
        let y = mul(&s_out, &mul(&adj(&self.x), &s_in));
        Ok(Rep { gamma: self.gamma.clone(), deltahat: self.delta.clone(), src, rng, x: y })
    }
}

/// Corepresentation axioms, checked on the associated representation of
/// `V^op`.
pub fn verify_corep(p: &Pmu, c: &Corep, tol: f64) -> Report {
    let mut r = Report::new("corep", tol);
    match opposite(p).and_then(|op| Ok((c.to_op_rep(&op)?, op))) {
        Ok((y, op)) => {
            let mut inner = verify_rep(&op, &y, tol);
            inner.suite = "corep".into();
            r.absorb("", inner);
        }
        Err(e) => r.attempt("corepresentation of V^op", Err(e), "corep"),
    }
    r
}

/// `X ⊠ Y = X₁₃ Y₂₃`.
pub fn rep_tensor(p: &Pmu, x: &Rep, y: &Rep) -> Result<Rep> {
    Ok(Frame::new(p, x, y)?.tensor_rep())
}

/// `(Â_X, A_X) = ([⟨β|₂ X |α⟩₂], [⟨γ|₁ X |δ̂⟩₁])`.
pub fn rep_legs(p: &Pmu, x: &Rep) -> Result<(OperatorSpace, OperatorSpace)> {
    let mut hat = Vec::new();
    let kets2: Vec<Mat> = p.alpha.basis().iter().map(|a| x.src.ket2(a)).collect::<Result<_>>()?;
    for b in p.beta.basis() {
        let left = mul(&x.rng.bra2(b)?, &x.x);
        for k in &kets2 {
            hat.push(mul(&left, k));
        }
    }
    let mut plain = Vec::new();
    let kets1: Vec<Mat> = x.deltahat.basis().iter().map(|d| x.src.ket1(d)).collect::<Result<_>>()?;
    for g in x.gamma.basis() {
        let left = mul(&x.rng.bra1(g)?, &x.x);
        for k in &kets1 {
            plain.push(mul(&left, k));
        }
    }
    Ok((OperatorSpace::span(x.k(), x.k(), &hat)?, OperatorSpace::span(p.h, p.h, &plain)?))
}

/// `π̂_X(ω_{ξ,ξ'}) = Σ ⟨ξ_n|₂ X |ξ'_n⟩₂`.
pub fn pi_hat_rep(x: &Rep, w: &Functional) -> Result<Mat> {
    let mut out = linalg::zeros(x.k(), x.k());
    for (l, r) in w.left.iter().zip(&w.right) {
        out += mul(&x.rng.bra2(l)?, &mul(&x.x, &x.src.ket2(r)?));
    }
    Ok(out)
}

/// `End(𝟙_V) = {b ∈ M(𝔅) ∩ M(𝔅†) : ρ_α(b) = ρ_β(b)}`.
pub fn end_trivial(p: &Pmu) -> Result<OperatorSpace> {
    let dom = module_maps(&Module::unit(p.base.clone(), Side::B), &Module::unit(p.base.clone(), Side::Bdag))?;
    dom.kernel_of(|b| Ok(p.alpha.rho(b)? - p.beta.rho(b)?))
}

/// `L(_γK_δ̂) = M(γ) ∩ M(δ̂)`-style operators on a single module pair,
/// here `{T : T 𝔅 ⊆ 𝔅, T 𝔅† ⊆ 𝔅†, ...}` for the base modules.
fn module_maps(gamma: &Module, deltahat: &Module) -> Result<OperatorSpace> {
    multiplier_space(gamma)?.intersect(&multiplier_space(deltahat)?)
}

/// `L(_γK_δ̂, _εL_φ̂)`: `T γ ⊆ ε`, `T* ε ⊆ γ`, `T δ̂ ⊆ φ̂`, `T* φ̂ ⊆ δ̂`.
pub fn module_map_space(from: [&Module; 2], to: [&Module; 2]) -> Result<OperatorSpace> {
    let (n_in, n_out) = (from[0].h, to[0].h);
    let perp = |q: &Mat, n: usize| linalg::eye(n) - mul(q, &adj(q));
    let mut rows = Vec::new();
    for (a, b) in from.iter().zip(to.iter()) {
        let k = a.base.k;
        let pb = perp(b.space.vecs(), n_out * k);
        for g in a.basis() {
            // vec(T g) = (gᵀ ⊗ I) vec(T)
            rows.push(mul(&pb, &kron(&g.transpose(), &linalg::eye(n_out))));
        }
        // ε* T ⊆ γ*
        let pa = perp(a.space.adjoint().vecs(), k * n_in);
        for e in b.basis() {
            rows.push(mul(&pa, &kron(&linalg::eye(n_in), &adj(e))));
        }
    }
    if rows.is_empty() {
        return Ok(OperatorSpace::full(n_out, n_in));
    }
    Ok(OperatorSpace::from_vecs(n_out, n_in, &nullspace(&vcat(&rows))))
}

/// Morphisms `T` with `Y (T ⊗ Id) = (T ⊗ Id) X`.
pub fn rep_morphisms(x: &Rep, y: &Rep) -> Result<OperatorSpace> {
    let dom = module_map_space([&x.gamma, &x.deltahat], [&y.gamma, &y.deltahat])?;
    dom.kernel_of(|t| {
        let ts = op_tensor_right(&x.src, &y.src, t, None)?;
        let tr = op_tensor_right(&x.rng, &y.rng, t, None)?;
        Ok(mul(&y.x, &ts) - mul(&tr, &x.x))
    })
}

/// Morphisms `T` with `Y (Id ⊗ T) = (Id ⊗ T) X`.
pub fn corep_morphisms(x: &Corep, y: &Corep) -> Result<OperatorSpace> {
    let dom = module_map_space([&x.gamma, &x.delta], [&y.gamma, &y.delta])?;
    dom.kernel_of(|t| {
        let ts = op_tensor_left(&x.src, &y.src, None, t)?;
        let tr = op_tensor_left(&x.rng, &y.rng, None, t)?;
        Ok(mul(&y.x, &ts) - mul(&tr, &x.x))
    })
}

/// A unitary in a space of intertwiners, via the polar part of a generic
/// element.
pub fn unitary_in(space: &OperatorSpace, seed: u64) -> Option<Mat> {
    if space.rows() != space.cols() || space.dim() == 0 {
        return None;
    }
    let basis = space.basis();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..8 {
        let t = basis
            .iter()
            .fold(linalg::zeros(space.rows(), space.cols()), |acc, b| acc + b * C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let tt = mul(&adj(&t), &t);
        let (ev, _) = herm_eigen(&tt);
        let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ev.iter().cloned().fold(0.0, f64::max);
        if lo <= 1e-8 * hi.max(1e-300) {
            continue;
        }
        let w = mul(&t, &herm_fn(&tt, |l| l.powf(-0.5)));
        if space.residual_of(&w) < 1e-9 {
            return Some(w);
        }
    }
    None
}

/// `X ⊠ V ≅ Id ⊗ V` via `X` itself: returns the amplification as a
/// representation on `(K γ⊗β H, γ▷α, γ▷β̂)` and the residual of
/// `(Id ⊗ V)(X ⊗ Id) = (X ⊗ Id)(X ⊠ V)`.
pub fn absorption(p: &Pmu, x: &Rep) -> Result<(Rep, f64)> {
    let pt = Pentagon::new(p, x)?;
    let amp = mul(&adj(&pt.a3), &mul(&pt.v23, &pt.a2));
    let rep = Rep { gamma: pt.l3.left.clone(), deltahat: pt.l2.left.clone(), src: pt.l2.clone(), rng: pt.l3.clone(), x: amp };
    let res = opnorm(&(mul(&rep.x, &pt.x12_top) - mul(&pt.x12_bot, &pt.frame.xy)));
    Ok((rep, res))
}

/// Residuals of `r : X ⊠ 𝟙 ≅ X` and `l : 𝟙 ⊠ X ≅ X` as morphisms.
pub fn unit_residuals(p: &Pmu, x: &Rep) -> Result<[f64; 2]> {
    let one = trivial_rep(p)?;
    let mut out = [0.0; 2];
    for (k, (a, b)) in [(x, &one), (&one, x)].into_iter().enumerate() {
        let f = Frame::new(p, a, b)?;
        let t = if k == 0 { unit_right(&f.kl)? } else { unit_left(&f.kl)? };
        let ts = op_tensor_right(&f.t1l, &x.src, &t, None)?;
        let tr = op_tensor_right(&f.tout, &x.rng, &t, None)?;
        out[k] = opnorm(&(mul(&x.x, &ts) - mul(&tr, &f.xy))).max(unitarity_defect(&t));
    }
    Ok(out)
}

/// Relations of the legs of a representation.
fn rep_leg_relations(p: &Pmu, x: &Rep, prefix: &str, r: &mut Report) -> Result<()> {
    let (hat, plain) = rep_legs(p, x)?;
    let one = trivial_rep(p)?;
    let (hat1, _) = rep_legs(p, &one)?;
    let t = "rep legs";
    let k = x.k();
    r.residual(format!("{prefix}[Â_X Â_X] = Â_X"), hat.product(&hat)?.equality_residual(&hat), t);
    r.residual(format!("{prefix}Â_X = Â_X*"), hat.equality_residual(&hat.adjoint()), t);
    r.residual(format!("{prefix}[Â_X K] = K"), hat.product(&OperatorSpace::full(k, 1))?.equality_residual(&OperatorSpace::full(k, 1)), t);
    r.residual(format!("{prefix}[Â_X γ] = [γ Â_𝟙]"), hat.product(&x.gamma.space)?.equality_residual(&x.gamma.space.product(&hat1)?), t);
    r.residual(
        format!("{prefix}[Â_X* δ̂] = [δ̂ Â_𝟙*]"),
        hat.adjoint().product(&x.deltahat.space)?.equality_residual(&x.deltahat.space.product(&hat1.adjoint())?),
        t,
    );
    let mut stab: f64 = 0.0;
    for s in [x.deltahat.rho_space(), x.gamma.rho_space()] {
        stab = stab.max(hat.product(&s)?.equality_residual(&hat)).max(s.product(&hat)?.equality_residual(&hat));
    }
    r.residual(format!("{prefix}Â_X stable under ρ_δ̂(𝔅), ρ_γ(𝔅†)"), stab, t);

    let av = legs::leg(p)?;
    r.residual(format!("{prefix}[A_X β̂] = β̂"), plain.product(&p.betahat.space)?.equality_residual(&p.betahat.space), t);
    let bgd = p.beta.space.product(&x.gamma.space.adjoint())?.product(&x.deltahat.space)?;
    r.residual(format!("{prefix}[A_X β] = [β γ* δ̂]"), plain.product(&p.beta.space)?.equality_residual(&bgd), t);
    let adg = p.alpha.space.product(&x.deltahat.space.adjoint())?.product(&x.gamma.space)?;
    r.residual(format!("{prefix}[A_X* α] = [α δ̂* γ]"), plain.adjoint().product(&p.alpha.space)?.equality_residual(&adg), t);
    r.residual(format!("{prefix}[A_X A_V] = A_V"), plain.product(&av)?.equality_residual(&av), t);
    let mut stab: f64 = 0.0;
    for s in [p.beta.rho_space(), p.alpha.rho_space()] {
        stab = stab.max(plain.product(&s)?.equality_residual(&plain)).max(s.product(&plain)?.equality_residual(&plain));
    }
    r.residual(format!("{prefix}A_X stable under ρ_β(𝔅), ρ_α(𝔅†)"), stab, t);

    // [Δ(A_X)|β⟩₂] ⊆ [|β⟩₂ A_X] and [Δ(A_X*)|α⟩₁] ⊆ [|α⟩₁ A_X*]
    let (hr, n) = (p.rng.dim(), p.h);
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    let mut lhs_s = Vec::new();
    let mut rhs_s = Vec::new();
    for a in plain.basis() {
        let d = p.delta(&a)?;
        let ds = p.delta(&adj(&a))?;
        for b in p.beta.basis() {
            let kb = p.rng.ket2(b)?;
            lhs.push(mul(&d, &kb));
            rhs.push(mul(&kb, &a));
        }
        for al in p.alpha.basis() {
            let ka = p.rng.ket1(al)?;
            lhs_s.push(mul(&ds, &ka));
            rhs_s.push(mul(&ka, &adj(&a)));
        }
    }
    let span = |g: &[Mat]| OperatorSpace::span(hr, n, g);
    let c1 = span(&rhs)?.containment_residual(&span(&lhs)?);
    let c2 = span(&rhs_s)?.containment_residual(&span(&lhs_s)?);
    r.residual(format!("{prefix}[Δ(A_X)|β⟩₂] ⊆ [|β⟩₂ A_X]"), c1, t);
    r.residual(format!("{prefix}[Δ(A_X*)|α⟩₁] ⊆ [|α⟩₁ A_X*]"), c2, t);
    Ok(())
}

const SLICE_SAMPLES: usize = 12;

/// `η* π̂_X(ω) η' = ω(⟨η|₁X|η'⟩₁)` and `π̂_X(ω) π̂_X(ω') = π̂_X(ω ∗ ω')`,
/// tested through `η* π̂_X(ω) π̂_X(ω') η' = (ω ⊠ ω')(Δ(⟨η|₁X|η'⟩₁))`.
fn pi_hat_rep_residuals(p: &Pmu, x: &Rep, seed: u64) -> Result<[f64; 2]> {
    let ws = legs::spanning_hat_functionals(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick: Vec<&Functional> = (0..3.min(ws.len())).map(|_| &ws[rng.gen_range(0..ws.len())]).collect();
    let mut well: f64 = 0.0;
    let mut hom: f64 = 0.0;
    let (gs, ds) = (x.gamma.basis(), x.deltahat.basis());
    let mut slices: Vec<(Mat, Mat, Mat)> = Vec::new();
    for _ in 0..SLICE_SAMPLES.min(gs.len() * ds.len()) {
        let (g, d) = (&gs[rng.gen_range(0..gs.len())], &ds[rng.gen_range(0..ds.len())]);
        slices.push((g.clone(), d.clone(), mul(&x.rng.bra1(g)?, &mul(&x.x, &x.src.ket1(d)?))));
    }
    for w in &pick {
        let pw = pi_hat_rep(x, w)?;
        for (g, d, s) in &slices {
            well = well.max(fro(&(mul(&adj(g), &mul(&pw, d)) - w.eval(s))));
        }
        for w2 in &pick {
            let pw2 = pi_hat_rep(x, w2)?;
            let wb = legs::boxtimes_rng(p, w, w2)?;
            for (g, d, s) in &slices {
                let lhs = mul(&adj(g), &mul(&mul(&pw, &pw2), d));
                hom = hom.max(fro(&(lhs - wb.eval(&p.delta(s)?))));
            }
        }
    }
    Ok([well, hom])
}

/// Largest `dim K · dim H² / dim 𝔎` for which the suites run the full
/// pentagon on derived representations.
pub const PENTAGON_BUDGET: usize = 1024;

fn pentagon_affordable(p: &Pmu, x: &Rep) -> bool {
    x.k() * p.h * p.h / p.k() <= PENTAGON_BUDGET
}

/// Suite over the trivial and regular representations, their tensor
/// products, legs, `End(𝟙)` and absorption.
pub fn verify_reps(p: &Pmu, tol: f64, seed: u64) -> Report {
    let mut r = Report::new("reps", tol);
    if let Err(e) = reps_into(p, &mut r, seed) {
        r.attempt("representation checks", Err(e), "rep");
    }
    r
}

fn reps_into(p: &Pmu, r: &mut Report, seed: u64) -> Result<()> {
    let tol = r.tol;
    let one = trivial_rep(p)?;
    let reg = regular_rep(p);
    r.absorb("𝟙: ", verify_rep(p, &one, tol));
    r.absorb("regular: ", verify_rep(p, &reg, tol));
    if p.v.ncols() >= 2 {
        let bad = Rep { x: { let mut v = reg.x.clone(); v.swap_columns(0, 1); v }, ..reg.clone() };
        r.flag("tampered X is rejected", !verify_rep(p, &bad, tol).all_pass(), "rep");
    }
    r.absorb("regular corep: ", verify_corep(p, &Corep::regular(p), tol));

    let (hat1, plain1) = rep_legs(p, &one)?;
    let ba = p.beta.space.adjoint().product(&p.alpha.space)?;
    r.residual("Â_𝟙 = [β*α]", hat1.equality_residual(&ba), "rep legs");
    let rr = p.beta.rho_space().product(&p.alpha.rho_space())?;
    r.residual("A_𝟙 = [ρ_β(𝔅) ρ_α(𝔅†)]", plain1.equality_residual(&rr), "rep legs");
    let (hat_v, plain_v) = rep_legs(p, &reg)?;
    r.residual("Â of the regular rep = Â_V", hat_v.equality_residual(&legs::leg_hat(p)?), "rep legs");
    r.residual("A of the regular rep = A_V", plain_v.equality_residual(&legs::leg(p)?), "rep legs");
    rep_leg_relations(p, &one, "𝟙: ", r)?;
    rep_leg_relations(p, &reg, "regular: ", r)?;

    let end1 = end_trivial(p)?;
    r.value("dim_End1", end1.dim() as i64);
    let morph = rep_morphisms(&one, &one)?;
    r.residual("End(𝟙) = morphisms 𝟙 → 𝟙", end1.equality_residual(&morph), "rep");
    let comm = module_maps(&one.gamma, &one.deltahat)?.intersect(&hat1.commutant()?)?;
    r.residual("End(𝟙) = L(𝔎) ∩ (Â_𝟙)'", end1.equality_residual(&comm), "rep");
    r.residual("End(𝟙) is commutative", end1.commutator_residual(), "rep");

    let mut pis: f64 = 0.0;
    for (k, x) in [&one, &reg].into_iter().enumerate() {
        let [w, h] = pi_hat_rep_residuals(p, x, seed + k as u64)?;
        pis = pis.max(w);
        r.residual(format!("{} π̂_X(ω)π̂_X(ω') = π̂_X(ω∗ω')", if k == 0 { "𝟙:" } else { "regular:" }), h, "rep");
    }
    r.residual("η* π̂_X(ω) η' = ω(⟨η|₁X|η'⟩₁)", pis, "rep");
    let ws = legs::spanning_hat_functionals(p);
    let mut inter: f64 = 0.0;
    for t in end1.basis() {
        for w in ws.iter().take(6) {
            inter = inter.max(fro(&(mul(&t, &pi_hat_rep(&one, w)?) - mul(&pi_hat_rep(&one, w)?, &t))));
        }
    }
    r.residual("morphisms intertwine π̂_X", inter, "rep");

    // tensor products
    let mut pairs: Vec<(&str, &Rep, &Rep)> = vec![("regular ⊠ 𝟙", &reg, &one), ("𝟙 ⊠ regular", &one, &reg)];
    if reg.k() * reg.k() * p.h * p.h / p.k() <= PENTAGON_BUDGET {
        pairs.push(("regular ⊠ regular", &reg, &reg));
    }
    for (name, x, y) in pairs {
        let z = rep_tensor(p, x, y)?;
        r.absorb(&format!("{name}: "), verify_rep_with(p, &z, tol, pentagon_affordable(p, &z)));
        let (_, az) = rep_legs(p, &z)?;
        let (_, ax) = rep_legs(p, x)?;
        let (_, ay) = rep_legs(p, y)?;
        r.residual(format!("{name}: A_(X⊠Y) = [A_X A_Y]"), az.equality_residual(&ax.product(&ay)?), "rep legs");
        r.residual(format!("{name}: Â_(X⊠Y) = Â_(X⊠Y)*"), rep_legs(p, &z)?.0.equality_residual(&rep_legs(p, &z)?.0.adjoint()), "rep legs");
    }

    let [ru, lu] = unit_residuals(p, &reg)?;
    r.residual("X ⊠ 𝟙 ≅ X", ru, "rep");
    r.residual("𝟙 ⊠ X ≅ X", lu, "rep");
    for (name, x) in [("𝟙", &one), ("regular", &reg)] {
        let (amp, res) = absorption(p, x)?;
        r.residual(format!("{name}: X intertwines X ⊠ V and Id ⊗ V"), res, "rep");
        if pentagon_affordable(p, &amp) {
            r.absorb(&format!("{name}: Id ⊗ V: "), verify_rep(p, &amp, tol));
        }
    }
    Ok(())
}

/// A unitary representation `{E_u, U_x}` of a finite groupoid.
#[derive(Clone, Debug)]
pub struct GroupoidRep {
    pub dims: Vec<usize>,
    /// `U_x : E_{s(x)} → E_{r(x)}`.
    pub u: Vec<Mat>,
}

impl GroupoidRep {
    /// Checks shapes, unitarity, units and `U_x U_y = U_{xy}`.
    pub fn new(g: &FiniteGroupoid, dims: Vec<usize>, u: Vec<Mat>) -> Result<GroupoidRep> {
        if dims.len() != g.n_units() || u.len() != g.n_arrows() {
            return Err(Error::ShapeMismatch("groupoid representation data".into()));
        }
        for (x, ux) in u.iter().enumerate() {
            if ux.nrows() != dims[g.r(x)] || ux.ncols() != dims[g.s(x)] {
                return Err(Error::ShapeMismatch(format!("U_{} has the wrong shape", g.arrow_label(x))));
            }
            if unitarity_defect(ux) > 1e-9 {
                return Err(Error::CocycleViolation(format!("U_{} is not unitary", g.arrow_label(x))));
            }
        }
        let rep = GroupoidRep { dims, u };
        let res = rep.cocycle_residual(g);
        if res > 1e-9 {
            return Err(Error::CocycleViolation(format!("U_x U_y = U_xy fails by {res:.3e}")));
        }
        Ok(rep)
    }

    pub fn cocycle_residual(&self, g: &FiniteGroupoid) -> f64 {
        let mut worst: f64 = 0.0;
        for (x, y) in g.composable_pairs() {
            worst = worst.max(fro(&(mul(&self.u[x], &self.u[y]) - &self.u[g.mul(x, y)])));
        }
        for v in 0..g.n_units() {
            worst = worst.max(fro(&(&self.u[g.unit_arrow(v)] - linalg::eye(self.dims[v]))));
        }
        worst
    }

    /// `E_u = ℂ`, `U_x = 1`.
    pub fn trivial(g: &FiniteGroupoid) -> GroupoidRep {
        GroupoidRep { dims: vec![1; g.n_units()], u: vec![linalg::eye(1); g.n_arrows()] }
    }

    /// `E_u = ℓ²(G^u)`, `U_x δ_y = δ_{xy}`.
    pub fn left_regular(g: &FiniteGroupoid) -> GroupoidRep {
        let fibers: Vec<Vec<usize>> = (0..g.n_units()).map(|v| g.range_fiber(v)).collect();
        let dims = fibers.iter().map(|f| f.len()).collect();
        let u = (0..g.n_arrows())
            .map(|x| {
                let (from, to) = (&fibers[g.s(x)], &fibers[g.r(x)]);
                let mut m = linalg::zeros(to.len(), from.len());
                for (j, &y) in from.iter().enumerate() {
                    let i = to.iter().position(|&z| z == g.mul(x, y)).expect("xy lies in G^r(x)");
                    m[(i, j)] = linalg::c(1.0);
                }
                m
            })
            .collect();
        GroupoidRep { dims, u }
    }

    /// `E_u = ℂ^d`, `U_x = W_{r(x)} W_{s(x)}*` for random unitaries `W_u`.
    pub fn frame(g: &FiniteGroupoid, d: usize, seed: u64) -> GroupoidRep {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<Mat> = (0..g.n_units()).map(|_| linalg::random_unitary(&mut rng, d)).collect();
        let u = (0..g.n_arrows()).map(|x| mul(&w[g.r(x)], &adj(&w[g.s(x)]))).collect();
        GroupoidRep { dims: vec![d; g.n_units()], u }
    }

    /// The character `a^k ↦ e^{2πi jk/n}` of a cyclic group with
    /// generator `a`.
    pub fn character(g: &FiniteGroupoid, j: usize) -> Result<GroupoidRep> {
        let powers = cyclic_powers(g).ok_or_else(|| Error::InvalidGroupoid("not a cyclic group".into()))?;
        let n = powers.len();
        let mut u = vec![linalg::eye(1); n];
        for (k, &x) in powers.iter().enumerate() {
            let t = 2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
            u[x] = Mat::from_element(1, 1, C64::from_polar(1.0, t));
        }
        GroupoidRep::new(g, vec![1], u)
    }

    /// `(U ⊠ U')_x = U_x ⊗ U'_x` on `E_u ⊗ E'_u`.
    pub fn tensor(&self, other: &GroupoidRep) -> GroupoidRep {
        GroupoidRep {
            dims: self.dims.iter().zip(&other.dims).map(|(a, b)| a * b).collect(),
            u: self.u.iter().zip(&other.u).map(|(a, b)| kron(a, b)).collect(),
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    fn offsets(&self) -> Vec<usize> {
        self.dims.iter().scan(0, |acc, d| { let o = *acc; *acc += d; Some(o) }).collect()
    }
}

/// `[e, a, a², ...]` for a generator `a` of a cyclic group.
fn cyclic_powers(g: &FiniteGroupoid) -> Option<Vec<usize>> {
    if g.n_units() != 1 {
        return None;
    }
    let n = g.n_arrows();
    let e = g.unit_arrow(0);
    (0..n).find_map(|a| {
        let mut seq = vec![e];
        let mut cur = a;
        while cur != e && seq.len() <= n {
            seq.push(cur);
            cur = g.mul(cur, a);
        }
        (seq.len() == n).then_some(seq)
    })
}

/// Block-diagonal morphisms `T_{r(x)} U_x = U'_x T_{s(x)}`.
pub fn groupoid_rep_morphisms(g: &FiniteGroupoid, a: &GroupoidRep, b: &GroupoidRep) -> Result<OperatorSpace> {
    let (oa, ob) = (a.offsets(), b.offsets());
    let (na, nb) = (a.total_dim(), b.total_dim());
    let mut gens = Vec::new();
    for v in 0..g.n_units() {
        for i in 0..b.dims[v] {
            for j in 0..a.dims[v] {
                gens.push(linalg::unit(nb, na, ob[v] + i, oa[v] + j));
            }
        }
    }
    let dom = OperatorSpace::span(nb, na, &gens)?;
    dom.kernel_of(|t| {
        let blocks: Vec<Mat> = (0..g.n_arrows())
            .map(|x| {
                let (s, r) = (g.s(x), g.r(x));
                let ts = t.view((ob[s], oa[s]), (b.dims[s], a.dims[s])).into_owned();
                let tr = t.view((ob[r], oa[r]), (b.dims[r], a.dims[r])).into_owned();
                let d = mul(&tr, &a.u[x]) - mul(&b.u[x], &ts);
                Mat::from_column_slice(d.len(), 1, d.as_slice())
            })
            .collect();
        Ok(vcat(&blocks))
    })
}

/// Orthonormal frames `B_u` of the fibers `E_u = ρ_γ(e_u) K`.
fn fiber_frames(gamma: &Module) -> Result<Vec<Mat>> {
    let k = gamma.base.k;
    (0..k)
        .map(|v| {
            let pr = gamma.rho(&linalg::unit(k, k, v, v))?;
            Ok(linalg::pivoted_gs(&pr, linalg::RANK_TOL).0)
        })
        .collect()
}

/// `H ⊗ K → ⊕_x δ_x ⊗ E_{f(x)}`, `ξ ▷ ζ ↦ Σ_x ξ(x, f(x)) δ_x ⊗ B*_{f(x)} ζ`.
fn fiber_identification(r: &RtpRef, g: &FiniteGroupoid, f: impl Fn(usize) -> usize, frames: &[Mat]) -> Result<Mat> {
    let n = g.n_arrows();
    let offs: Vec<usize> = (0..n).scan(0, |acc, x| { let o = *acc; *acc += frames[f(x)].ncols(); Some(o) }).collect();
    let total: usize = (0..n).map(|x| frames[f(x)].ncols()).sum();
    let kdim = r.h_right();
    let mut blocks = Vec::new();
    for xi in r.left.basis() {
        let mut t = linalg::zeros(total, kdim);
        for x in 0..n {
            let c = xi[(x, f(x))];
            if c.norm() == 0.0 {
                continue;
            }
            let bf = adj(&frames[f(x)]);
            let mut view = t.view_mut((offs[x], 0), (bf.nrows(), kdim));
            view += bf * c;
        }
        blocks.push(t);
    }
    solve_on_span(r.q(), &hcat(&blocks), "fiber identification")
}

/// Functor `F`: `K = ⊕ E_u` with `γ = δ = span{|u,i⟩⟨e_u|}` and
/// `X = Φ^r (Id ◁ U) Φ^s*`.
pub fn corep_from_groupoid_rep(gp: &GroupoidPmu, rep: &GroupoidRep) -> Result<Corep> {
    let g = &gp.g;
    let res = rep.cocycle_residual(g);
    if res > 1e-9 || rep.dims.len() != g.n_units() {
        return Err(Error::CocycleViolation(format!("U_x U_y = U_xy fails by {res:.3e}")));
    }
    let p = &gp.pmu;
    let k = p.k();
    let n = rep.total_dim();
    let offs = rep.offsets();
    let gens: Vec<Mat> = (0..k).flat_map(|v| (0..rep.dims[v]).map(move |i| (v, i))).map(|(v, i)| linalg::unit(n, k, offs[v] + i, v)).collect();
    let gamma = Arc::new(Module::from_gens(p.base.clone(), Side::B, n, &gens)?);
    let delta = Arc::new(Module::from_gens(p.base.clone(), Side::Bdag, n, &gens)?);
    let src = rtp(&p.betahat, &gamma)?;
    let rng = rtp(&p.alpha, &delta)?;
    let frames = fiber_frames(&gamma)?;
    let js = fiber_identification(&src, g, |x| g.s(x), &frames)?;
    let jr = fiber_identification(&rng, g, |x| g.r(x), &frames)?;
    // U_x expressed in the frames
    let blocks: Vec<Mat> = (0..g.n_arrows())
        .map(|x| {
            let emb = |v: usize| frame_embedding(&frames[v], &offs, &rep.dims, v);
            mul(&adj(&emb(g.r(x))), &mul(&rep.u[x], &emb(g.s(x))))
        })
        .collect();
    let x = mul(&adj(&jr), &mul(&block_diag(&blocks), &js));
    Ok(Corep { gamma, delta, src, rng, x })
}

/// `B_v* ι_v`, the coordinates of the standard basis of `E_v` in the frame.
fn frame_embedding(frame: &Mat, offs: &[usize], dims: &[usize], v: usize) -> Mat {
    let n = frame.nrows();
    let mut iota = linalg::zeros(n, dims[v]);
    for i in 0..dims[v] {
        iota[(offs[v] + i, i)] = linalg::c(1.0);
    }
    mul(&adj(frame), &iota)
}

/// Functor `G`: the fibers `E_u = ρ_γ(e_u) K` and `U = Ψ^r X Ψ^s*`.
/// Also returns the frames used, as columns in `K`.
pub fn groupoid_rep_from_corep(gp: &GroupoidPmu, c: &Corep) -> Result<(GroupoidRep, Vec<Mat>)> {
    let g = &gp.g;
    if c.gamma.space.equality_residual(&c.delta.space) > 1e-9 {
        return Err(Error::NotGroupoidPmu);
    }
    let frames = fiber_frames(&c.gamma)?;
    let js = fiber_identification(&c.src, g, |x| g.s(x), &frames)?;
    let jr = fiber_identification(&c.rng, g, |x| g.r(x), &frames)?;
    let m = mul(&jr, &mul(&c.x, &adj(&js)));
    let mut u = Vec::with_capacity(g.n_arrows());
    let mut off = 0;
    for x in 0..g.n_arrows() {
        let (dr, ds) = (frames[g.r(x)].ncols(), frames[g.s(x)].ncols());
        u.push(m.view((off, off), (dr, ds)).into_owned());
        off += ds;
    }
    let dims = frames.iter().map(|f| f.ncols()).collect();
    let rep = GroupoidRep::new(g, dims, u)?;
    let off_diag = fro(&(&m - block_diag(&rep.u)));
    if off_diag > 1e-8 {
        return Err(Error::InconsistentSystem { what: "corepresentation is not fiberwise".into(), residual: off_diag });
    }
    Ok((rep, frames))
}

/// `max_x ‖W_{r(x)} U_x − U'_x W_{s(x)}‖` and the unitarity of `W`.
pub fn groupoid_iso_residual(g: &FiniteGroupoid, a: &GroupoidRep, b: &GroupoidRep, w: &[Mat]) -> f64 {
    let mut worst: f64 = w.iter().map(unitarity_defect).fold(0.0, f64::max);
    for x in 0..g.n_arrows() {
        worst = worst.max(fro(&(mul(&w[g.r(x)], &a.u[x]) - mul(&b.u[x], &w[g.s(x)]))));
    }
    worst
}

/// `G(F(R)) ≅ R` and `F(G(F(R))) ≅ F(R)` with their explicit unitaries.
pub fn round_trip_residuals(gp: &GroupoidPmu, rep: &GroupoidRep) -> Result<[f64; 2]> {
    let c = corep_from_groupoid_rep(gp, rep)?;
    let (back, frames) = groupoid_rep_from_corep(gp, &c)?;
    let offs = rep.offsets();
    let w: Vec<Mat> = (0..gp.g.n_units()).map(|v| frame_embedding(&frames[v], &offs, &rep.dims, v)).collect();
    let gf = groupoid_iso_residual(&gp.g, rep, &back, &w);
    Ok([gf, corep_round_trip(gp, &c)?])
}

/// `F(G(C)) ≅ C` via `T = ⊕ B_u*`.
pub fn corep_round_trip(gp: &GroupoidPmu, c: &Corep) -> Result<f64> {
    let (rep, frames) = groupoid_rep_from_corep(gp, c)?;
    let d = corep_from_groupoid_rep(gp, &rep)?;
    let t = vcat(&frames.iter().map(adj).collect::<Vec<_>>());
    let ts = op_tensor_left(&c.src, &d.src, None, &t)?;
    let tr = op_tensor_left(&c.rng, &d.rng, None, &t)?;
    Ok(opnorm(&(mul(&d.x, &ts) - mul(&tr, &c.x))).max(unitarity_defect(&t)))
}

/// Residual of an isomorphism of corepresentations found by searching the
/// morphism space; `None` when no unitary intertwiner exists.
pub fn corep_iso_residual(a: &Corep, b: &Corep, seed: u64) -> Result<Option<f64>> {
    let space = corep_morphisms(a, b)?;
    Ok(unitary_in(&space, seed).map(|t| {
        let ts = op_tensor_left(&a.src, &b.src, None, &t);
        let tr = op_tensor_left(&a.rng, &b.rng, None, &t);
        match (ts, tr) {
            (Ok(ts), Ok(tr)) => opnorm(&(mul(&b.x, &ts) - mul(&tr, &a.x))).max(unitarity_defect(&t)),
            _ => f64::MAX,
        }
    }))
}

/// The bundles used by the groupoid suite.
pub fn sample_bundles(g: &FiniteGroupoid, seed: u64) -> Vec<(String, GroupoidRep)> {
    let mut out = vec![
        ("trivial".to_string(), GroupoidRep::trivial(g)),
        ("left regular".to_string(), GroupoidRep::left_regular(g)),
        ("frame".to_string(), GroupoidRep::frame(g, 2, seed)),
    ];
    if let Some(powers) = cyclic_powers(g) {
        if powers.len() > 1 {
            out.push(("character 1".to_string(), GroupoidRep::character(g, 1).expect("cyclic")));
        }
    }
    out
}

/// `dim Hom(F(χ_i), F(χ_j))` for the characters of a cyclic group.
pub fn character_hom_dims(gp: &GroupoidPmu) -> Result<Vec<Vec<usize>>> {
    let n = cyclic_powers(&gp.g).ok_or_else(|| Error::InvalidGroupoid("not a cyclic group".into()))?.len();
    let coreps: Vec<Corep> = (0..n).map(|j| corep_from_groupoid_rep(gp, &GroupoidRep::character(&gp.g, j)?)).collect::<Result<_>>()?;
    coreps.iter().map(|a| coreps.iter().map(|b| Ok(corep_morphisms(a, b)?.dim())).collect()).collect()
}

/// Functors `F` and `G` on sample bundles: axioms, round trips, known
/// images, morphisms and tensor compatibility.
pub fn verify_groupoid_reps(gp: &GroupoidPmu, tol: f64, seed: u64) -> Report {
    let mut r = Report::new("groupoid reps", tol);
    if let Err(e) = groupoid_reps_into(gp, &mut r, seed) {
        r.attempt("groupoid representation checks", Err(e), "groupoid");
    }
    r
}

fn groupoid_reps_into(gp: &GroupoidPmu, r: &mut Report, seed: u64) -> Result<()> {
    let g = &gp.g;
    let p = &gp.pmu;
    let tol = r.tol;
    let op = opposite(p)?;
    let bundles = sample_bundles(g, seed);
    let mut coreps = Vec::new();
    for (name, b) in &bundles {
        r.residual(format!("{name}: U_x U_y = U_xy"), b.cocycle_residual(g), "groupoid");
        let c = corep_from_groupoid_rep(gp, b)?;
        r.absorb(&format!("F({name}): "), verify_corep(p, &c, tol));
        let [gf, fg] = round_trip_residuals(gp, b)?;
        r.residual(format!("{name}: G∘F ≅ id"), gf, "groupoid");
        r.residual(format!("{name}: F∘G ≅ id"), fg, "groupoid");
        let hom_g = groupoid_rep_morphisms(g, b, b)?.dim();
        let hom_c = corep_morphisms(&c, &c)?.dim();
        r.count(&format!("{name}: dim End matches under F"), hom_c, hom_g, "groupoid");
        coreps.push(c);
    }
    r.attempt("F∘G ≅ id on the regular corepresentation", corep_round_trip(gp, &Corep::regular(p)), "groupoid");

    // known images
    let triv_op = trivial_rep(&op)?;
    let f_triv = coreps[0].to_op_rep(&op)?;
    let iso = unitary_in(&rep_morphisms(&f_triv, &triv_op)?, seed);
    r.flag("F(trivial) ≅ trivial corepresentation", iso.is_some(), "groupoid");
    let reg = Corep::regular(p);
    match corep_iso_residual(&coreps[1], &reg, seed)? {
        Some(res) => r.residual("F(left regular) ≅ regular corepresentation", res, "groupoid"),
        None => r.flag("F(left regular) ≅ regular corepresentation", false, "groupoid"),
    }

    // morphisms map to morphisms: F T = Id ◁ T
    let (a, b) = (&bundles[0].1, &bundles[2].1);
    let hg = groupoid_rep_morphisms(g, a, b)?;
    let (ca, cb) = (&coreps[0], &coreps[2]);
    let mut worst: f64 = 0.0;
    for t in hg.basis() {
        let ts = op_tensor_left(&ca.src, &cb.src, None, &t)?;
        let tr = op_tensor_left(&ca.rng, &cb.rng, None, &t)?;
        worst = worst.max(fro(&(mul(&cb.x, &ts) - mul(&tr, &ca.x))));
    }
    r.residual("F maps morphisms to morphisms", worst, "groupoid");
    r.count("dim Hom(trivial, frame) matches under F", corep_morphisms(ca, cb)?.dim(), hg.dim(), "groupoid");

    // F(R ⊠ R') ≅ F(R) ⊠ F(R') as representations of V^op
    let (i, j) = if bundles.len() > 3 { (3, 2) } else { (2, 0) };
    let (x, y) = (&bundles[i], &bundles[j]);
    let fx = coreps[i].to_op_rep(&op)?;
    let fy = coreps[j].to_op_rep(&op)?;
    let fxy = rep_tensor(&op, &fx, &fy)?;
    let f_tensor = corep_from_groupoid_rep(gp, &x.1.tensor(&y.1))?.to_op_rep(&op)?;
    let name = format!("F({} ⊠ {}) ≅ F({}) ⊠ F({})", x.0, y.0, x.0, y.0);
    match unitary_in(&rep_morphisms(&f_tensor, &fxy)?, seed) {
        Some(t) => {
            let ts = op_tensor_right(&f_tensor.src, &fxy.src, &t, None)?;
            let tr = op_tensor_right(&f_tensor.rng, &fxy.rng, &t, None)?;
            r.residual(name, opnorm(&(mul(&fxy.x, &ts) - mul(&tr, &f_tensor.x))), "groupoid");
        }
        None => r.flag(name, false, "groupoid"),
    }

    if cyclic_powers(g).is_some() {
        let dims = character_hom_dims(gp)?;
        let n = dims.len();
        let ok = (0..n).all(|a| (0..n).all(|b| dims[a][b] == usize::from(a == b)));
        r.flag_detail("dim Hom(χ_i, χ_j) = δ_ij", ok, "groupoid", format!("{dims:?}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{counting_haar, cyclic_groupoid, pair_groupoid, unit_groupoid};
    use crate::pmu::groupoid_pmu;

    fn gp(g: FiniteGroupoid, mu: &[f64]) -> GroupoidPmu {
        groupoid_pmu(&g, &counting_haar(&g), mu).unwrap()
    }

    #[test]
    fn trivial_of_unit_groupoid_is_identity() {
        let p = gp(unit_groupoid(3), &[1.0, 2.0, 3.0]);
        let one = trivial_rep(&p.pmu).unwrap();
        assert!(fro(&(&one.x - linalg::eye(3))) < 1e-12);
    }

    #[test]
    fn rep_suite_passes() {
        let p = gp(pair_groupoid(2), &[1.0, 2.0]);
        let r = verify_reps(&p.pmu, 1e-8, 3);
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn groupoid_suite_passes() {
        for (g, mu) in [(pair_groupoid(2), vec![1.0, 3.0]), (cyclic_groupoid(3), vec![1.0])] {
            let p = gp(g, &mu);
            let r = verify_groupoid_reps(&p, 1e-8, 5);
            assert!(r.all_pass(), "{}", r.to_text());
        }
    }

    #[test]
    fn broken_cocycle_rejected() {
        let g = cyclic_groupoid(2);
        let u = vec![linalg::eye(1), linalg::eye(1) * linalg::c(-1.0)];
        assert!(GroupoidRep::new(&g, vec![1], u.clone()).is_ok());
        let bad = vec![linalg::eye(1) * linalg::c(-1.0), linalg::eye(1)];
        assert!(matches!(GroupoidRep::new(&g, vec![1], bad), Err(Error::CocycleViolation(_))));
    }
}
