//! C*-bases, C*-modules over them and relative tensor products.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, adj, eye, fro, hcat, kron, mul, Mat, RANK_TOL, ZERO};
use crate::opspace::OperatorSpace;

/// Tolerance for internal consistency checks of constructed objects.
pub const CHECK_TOL: f64 = 1e-8;

/// A C*-base `(𝔎, 𝔅, 𝔅†)` with `𝔎 = C^k`.
#[derive(Debug)]
pub struct Base {
    pub k: usize,
    pub b: OperatorSpace,
    pub bdag: OperatorSpace,
}

/// Validates the base axioms.
pub fn make_base(k: usize, b: OperatorSpace, bdag: OperatorSpace) -> Result<Arc<Base>> {
    for (name, a) in [("B", &b), ("B†", &bdag)] {
        if a.rows() != k || a.cols() != k {
            return Err(Error::ShapeMismatch(format!("{name} does not act on C^{k}")));
        }
        if !a.is_cstar_algebra(CHECK_TOL) {
            return Err(Error::BaseAxiomFailed(format!("{name} is not a C*-algebra")));
        }
        if !a.is_nondegenerate() {
            return Err(Error::BaseAxiomFailed(format!("{name} is degenerate")));
        }
    }
    for x in b.basis() {
        for y in bdag.basis() {
            if fro(&(mul(&x, &y) - mul(&y, &x))) > CHECK_TOL {
                return Err(Error::BaseAxiomFailed("B and B† do not commute".into()));
            }
        }
    }
    Ok(Arc::new(Base { k, b, bdag }))
}

/// The commutative base `(C^k, diagonals, diagonals)`.
pub fn diagonal_base(k: usize) -> Arc<Base> {
    make_base(k, OperatorSpace::diagonals(k), OperatorSpace::diagonals(k)).expect("diagonal base")
}

/// Which algebra of the base a module is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// A C*-𝔟-module: `[α*α] = 𝔅`, with `ρ_α` defined on `𝔅†`.
    B,
    /// A C*-𝔟†-module: `[α*α] = 𝔅†`, with `ρ_α` defined on `𝔅`.
    Bdag,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::B => Side::Bdag,
            Side::Bdag => Side::B,
        }
    }
}

/// A C*-module `(H, α)` with `α ⊆ L(𝔎, H)`.
#[derive(Debug)]
pub struct Module {
    pub base: Arc<Base>,
    pub side: Side,
    pub h: usize,
    pub space: OperatorSpace,
    basis: Vec<Mat>,
    /// `[ξ_1 .. ξ_p]`, an `h x (p k)` matrix.
    bmat: Mat,
    /// Right inverse of `bmat`.
    bpinv: Mat,
}

impl Module {
    /// Builds the module data without checking the axioms.
    pub fn new(base: Arc<Base>, side: Side, space: OperatorSpace) -> Module {
        assert_eq!(space.cols(), base.k, "module operators must start at the base space");
        let h = space.rows();
        let basis = space.basis();
        let bmat = if basis.is_empty() { linalg::zeros(h, 0) } else { hcat(&basis) };
        let gram = mul(&bmat, &adj(&bmat));
        let bpinv = match gram.clone().cholesky() {
            Some(ch) => adj(&ch.solve(&bmat)),
            None if bmat.ncols() == 0 || h == 0 => linalg::zeros(bmat.ncols(), h),
            None => bmat.clone().pseudo_inverse(1e-12).unwrap_or_else(|_| linalg::zeros(bmat.ncols(), h)),
        };
        Module { base, side, h, space, basis, bmat, bpinv }
    }

    pub fn from_gens(base: Arc<Base>, side: Side, h: usize, gens: &[Mat]) -> Result<Module> {
        let k = base.k;
        Ok(Module::new(base, side, OperatorSpace::span(h, k, gens)?))
    }

    /// The algebra the module is over (`[α*α]`).
    pub fn alg(&self) -> &OperatorSpace {
        match self.side {
            Side::B => &self.base.b,
            Side::Bdag => &self.base.bdag,
        }
    }

    /// The algebra represented on `H` by `ρ_α`.
    pub fn rho_alg(&self) -> &OperatorSpace {
        match self.side {
            Side::B => &self.base.bdag,
            Side::Bdag => &self.base.b,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Mat] {
        &self.basis
    }

    pub fn bmat(&self) -> &Mat {
        &self.bmat
    }

    /// Residuals of `[α𝔎] = H`, `[α𝔄] = α`, `[α*α] = 𝔄`.
    pub fn axiom_residuals(&self) -> [f64; 3] {
        let range = self.space.range().ncols();
        let nondeg = if range == self.h { 0.0 } else { f64::MAX };
        let stable = self.space.product(self.alg()).map(|s| self.space.containment_residual(&s)).unwrap_or(f64::MAX);
        let inner = self
            .space
            .adjoint()
            .product(&self.space)
            .map(|s| s.equality_residual(self.alg()))
            .unwrap_or(f64::MAX);
        [nondeg, stable, inner]
    }

    /// `ρ_α(b)`, the operator with `ρ(b) ξ ζ = ξ b ζ`.
    pub fn rho(&self, b: &Mat) -> Result<Mat> {
        if !self.rho_alg().contains_op(b, CHECK_TOL) {
            return Err(Error::NotInAlgebra("argument of ρ".into()));
        }
        Ok(self.rho_unchecked(b))
    }

    pub(crate) fn rho_unchecked(&self, b: &Mat) -> Mat {
        let p = self.dim();
        let target = mul(&self.bmat, &kron(&eye(p), b));
        mul(&target, &self.bpinv)
    }

    /// Consistency residual of `ρ(b)` on the spanning set.
    pub fn rho_residual(&self, b: &Mat) -> f64 {
        let p = self.dim();
        let target = mul(&self.bmat, &kron(&eye(p), b));
        let r = mul(&self.rho_unchecked(b), &self.bmat);
        fro(&(r - &target)) / fro(&target).max(1.0)
    }

    /// Images `ρ(b_m)` of the basis of the represented algebra.
    pub fn rho_basis(&self) -> Vec<Mat> {
        self.rho_alg().basis().iter().map(|b| self.rho_unchecked(b)).collect()
    }

    /// `[ρ(𝔄†)]` as an operator space on `H`.
    pub fn rho_space(&self) -> OperatorSpace {
        OperatorSpace::span(self.h, self.h, &self.rho_basis()).expect("square")
    }

    /// The module `(𝔎, 𝔅)` or `(𝔎, 𝔅†)` given by the algebra itself.
    pub fn unit(base: Arc<Base>, side: Side) -> Module {
        let space = match side {
            Side::B => base.b.clone(),
            Side::Bdag => base.bdag.clone(),
        };
        Module::new(base, side, space)
    }

    /// `T α` for an operator `T`, with the same base and side.
    pub fn transport(&self, t: &Mat) -> Result<Module> {
        Ok(Module::new(self.base.clone(), self.side, self.space.left_mul(t)?))
    }
}

/// Validates a module against its three axioms.
pub fn make_module(base: Arc<Base>, side: Side, space: OperatorSpace) -> Result<Module> {
    if space.cols() != base.k {
        return Err(Error::ShapeMismatch("module operators must start at 𝔎".into()));
    }
    let m = Module::new(base, side, space);
    let [nondeg, stable, inner] = m.axiom_residuals();
    if nondeg > CHECK_TOL {
        return Err(Error::ModuleAxiomFailed("[α𝔎] = H".into()));
    }
    if stable > CHECK_TOL {
        return Err(Error::ModuleAxiomFailed("[α𝔅] = α".into()));
    }
    if inner > CHECK_TOL {
        return Err(Error::ModuleAxiomFailed("[α*α] = 𝔅".into()));
    }
    Ok(m)
}

/// `[T α] ⊆ β`.
pub fn is_semi_morphism(t: &Mat, from: &Module, to: &Module, tol: f64) -> bool {
    match from.space.left_mul(t) {
        Ok(s) => to.space.contains(&s, tol),
        Err(_) => false,
    }
}

/// `[T α] ⊆ β` and `[T* β] ⊆ α`.
pub fn is_morphism(t: &Mat, from: &Module, to: &Module, tol: f64) -> bool {
    is_semi_morphism(t, from, to, tol) && is_semi_morphism(&adj(t), to, from, tol)
}

/// The relative tensor product `H β⊗γ K`.
///
/// The pre-space is `β ⊗ K` with index `i * dim K + a`; `q` is a factor of
/// its Gram matrix, so column `(i, a)` is the vector `ξ_i ▷ e_a`.
#[derive(Debug)]
pub struct Rtp {
    pub left: Arc<Module>,
    pub right: Arc<Module>,
    q: Mat,
    ket2_basis: Vec<Mat>,
}

impl Rtp {
    pub fn new(left: Arc<Module>, right: Arc<Module>) -> Result<Rtp> {
        if left.side == right.side {
            return Err(Error::ShapeMismatch("relative tensor product needs modules over opposite algebras".into()));
        }
        if !Arc::ptr_eq(&left.base, &right.base) && left.base.k != right.base.k {
            return Err(Error::ShapeMismatch("modules over different bases".into()));
        }
        let p = left.dim();
        let hr = right.h;
        let mut gram = linalg::zeros(p * hr, p * hr);
        let alg = left.alg();
        let ltl: Vec<Vec<Mat>> = (0..p)
            .map(|i| (0..p).map(|j| mul(&adj(&left.basis[i]), &left.basis[j])).collect())
            .collect();
        for bm in alg.basis() {
            let mut cm = linalg::zeros(p, p);
            for i in 0..p {
                for j in 0..p {
                    cm[(i, j)] = linalg::hs(&bm, &ltl[i][j]);
                }
            }
            if cm.iter().all(|z| z.norm() < 1e-15) {
                continue;
            }
            let rb = right.rho_unchecked(&bm);
            gram += kron(&cm, &rb);
        }
        let gram = (&gram + adj(&gram)) * linalg::c(0.5);
        let l = linalg::pivoted_cholesky(&gram, RANK_TOL);
        let q = adj(&l);
        let mut rtp = Rtp { left, right, q, ket2_basis: Vec::new() };
        let mut kb = Vec::with_capacity(rtp.right.dim());
        for eta in rtp.right.basis().to_vec() {
            let (k2, res) = rtp.ket2_raw(&eta);
            if res > CHECK_TOL {
                return Err(Error::InconsistentSystem { what: "ket2 on the relative tensor product".into(), residual: res });
            }
            kb.push(k2);
        }
        rtp.ket2_basis = kb;
        Ok(rtp)
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    /// Dimension of the left factor's Hilbert space.
    pub fn h_left(&self) -> usize {
        self.left.h
    }

    pub fn h_right(&self) -> usize {
        self.right.h
    }

    /// Gram factor: column `(i, a)` is `ξ_i ▷ e_a`.
    pub fn q(&self) -> &Mat {
        &self.q
    }

    /// `|ξ_i⟩₁` for the `i`-th basis element of the left module.
    pub fn ket1_basis(&self, i: usize) -> Mat {
        let hr = self.right.h;
        self.q.columns(i * hr, hr).into_owned()
    }

    pub fn ket2_basis(&self, j: usize) -> &Mat {
        &self.ket2_basis[j]
    }

    fn coords_checked(m: &Module, x: &Mat, what: &str) -> Result<Vec<linalg::C64>> {
        if x.nrows() != m.h || x.ncols() != m.base.k {
            return Err(Error::ShapeMismatch(what.into()));
        }
        if !m.space.contains_op(x, CHECK_TOL) {
            return Err(Error::NotInAlgebra(format!("{what}: operator outside the module")));
        }
        Ok(m.space.coords(x))
    }

    /// `|ξ⟩₁ : K → H ⊗ K` for `ξ` in the left module.
    pub fn ket1(&self, xi: &Mat) -> Result<Mat> {
        let c = Self::coords_checked(&self.left, xi, "ket1")?;
        let mut out = linalg::zeros(self.dim(), self.right.h);
        for (i, ci) in c.iter().enumerate() {
            if ci.norm() > 0.0 {
                out += self.ket1_basis(i) * *ci;
            }
        }
        Ok(out)
    }

    fn ket2_raw(&self, eta: &Mat) -> (Mat, f64) {
        let p = self.left.dim();
        let hr = self.right.h;
        let k = self.left.base.k;
        // Q (I_p ⊗ η), block i is Q_i η
        let mut qe = linalg::zeros(self.dim(), p * k);
        for i in 0..p {
            let blk = mul(&self.q.columns(i * hr, hr).into_owned(), eta);
            qe.view_mut((0, i * k), (self.dim(), k)).copy_from(&blk);
        }
        let k2 = mul(&qe, &self.left.bpinv);
        let res = fro(&(mul(&k2, &self.left.bmat) - &qe)) / fro(&qe).max(1.0);
        (k2, res)
    }

    /// `|η⟩₂ : H → H ⊗ K` for `η` in the right module.
    pub fn ket2(&self, eta: &Mat) -> Result<Mat> {
        let c = Self::coords_checked(&self.right, eta, "ket2")?;
        let mut out = linalg::zeros(self.dim(), self.left.h);
        for (j, cj) in c.iter().enumerate() {
            if cj.norm() > 0.0 {
                out += &self.ket2_basis[j] * *cj;
            }
        }
        Ok(out)
    }

    pub fn bra1(&self, xi: &Mat) -> Result<Mat> {
        Ok(adj(&self.ket1(xi)?))
    }

    pub fn bra2(&self, eta: &Mat) -> Result<Mat> {
        Ok(adj(&self.ket2(eta)?))
    }

    /// `ξ ▷ ζ ◁ η`, i.e. `|ξ⟩₁ η ζ`.
    pub fn embed(&self, xi: &Mat, zeta: &Mat, eta: &Mat) -> Result<Mat> {
        Ok(mul(&self.ket1(xi)?, &mul(eta, zeta)))
    }

    /// `β ▷ δ = [|β⟩₁ δ]` for a module `δ` on the right factor.
    pub fn lift_right(&self, delta: &Module) -> Result<Module> {
        if delta.h != self.right.h {
            return Err(Error::ShapeMismatch("lift_right".into()));
        }
        let mut gens = Vec::with_capacity(self.left.dim() * delta.dim());
        for i in 0..self.left.dim() {
            let k1 = self.ket1_basis(i);
            for d in delta.basis() {
                gens.push(mul(&k1, d));
            }
        }
        Module::from_gens(delta.base.clone(), delta.side, self.dim(), &gens)
    }

    /// `α ◁ γ = [|γ⟩₂ α]` for a module `α` on the left factor.
    pub fn lift_left(&self, alpha: &Module) -> Result<Module> {
        if alpha.h != self.left.h {
            return Err(Error::ShapeMismatch("lift_left".into()));
        }
        let mut gens = Vec::with_capacity(self.right.dim() * alpha.dim());
        for k2 in &self.ket2_basis {
            for a in alpha.basis() {
                gens.push(mul(k2, a));
            }
        }
        Module::from_gens(alpha.base.clone(), alpha.side, self.dim(), &gens)
    }

    /// `[|β⟩₁ δ]` as a bare operator space (no module structure needed).
    pub fn ket1_space(&self, delta: &OperatorSpace) -> Result<OperatorSpace> {
        let mut gens = Vec::new();
        for i in 0..self.left.dim() {
            let k1 = self.ket1_basis(i);
            for d in delta.basis() {
                gens.push(mul(&k1, &d));
            }
        }
        OperatorSpace::span(self.dim(), delta.cols(), &gens)
    }

    /// `[|γ⟩₂ α]` as a bare operator space.
    pub fn ket2_space(&self, alpha: &OperatorSpace) -> Result<OperatorSpace> {
        let mut gens = Vec::new();
        for k2 in &self.ket2_basis {
            for a in alpha.basis() {
                gens.push(mul(k2, &a));
            }
        }
        OperatorSpace::span(self.dim(), alpha.cols(), &gens)
    }

    /// All `|ξ_i⟩₁`, stacked horizontally; equals the Gram factor.
    pub fn ket1_all(&self) -> &Mat {
        &self.q
    }

    /// All `|η_j⟩₂`, stacked horizontally.
    pub fn ket2_all(&self) -> Mat {
        hcat(&self.ket2_basis)
    }

    /// Largest deviation of `⟨ξ|₁|ξ'⟩₁ = ρ_γ(ξ*ξ')` over basis pairs.
    pub fn ket1_relation_residual(&self) -> f64 {
        let p = self.left.dim();
        let mut worst: f64 = 0.0;
        for i in 0..p {
            for j in 0..p {
                let lhs = mul(&adj(&self.ket1_basis(i)), &self.ket1_basis(j));
                let rhs = self.right.rho_unchecked(&mul(&adj(&self.left.basis[i]), &self.left.basis[j]));
                worst = worst.max(fro(&(lhs - rhs)));
            }
        }
        worst
    }

    /// Largest deviation of `⟨η|₂|η'⟩₂ = ρ_β(η*η')` over basis pairs.
    pub fn ket2_relation_residual(&self) -> f64 {
        let q = self.right.dim();
        let mut worst: f64 = 0.0;
        for i in 0..q {
            for j in 0..q {
                let lhs = mul(&adj(&self.ket2_basis[i]), &self.ket2_basis[j]);
                let rhs = self.left.rho_unchecked(&mul(&adj(&self.right.basis[i]), &self.right.basis[j]));
                worst = worst.max(fro(&(lhs - rhs)));
            }
        }
        worst
    }
}

/// Shared handle used throughout.
pub type RtpRef = Arc<Rtp>;

pub fn rtp(left: &Arc<Module>, right: &Arc<Module>) -> Result<RtpRef> {
    Ok(Arc::new(Rtp::new(left.clone(), right.clone())?))
}

/// The flip `H β⊗γ K → K γ⊗β H`.
pub fn flip(src: &Rtp, tgt: &Rtp) -> Result<Mat> {
    let mut outs = Vec::with_capacity(src.left.dim());
    for xi in src.left.basis() {
        outs.push(tgt.ket2(xi)?);
    }
    linalg::solve_on_span(src.q(), &hcat(&outs), "flip")
}

fn check_commutes(t: &Mat, from: &Module, to: &Module) -> Result<()> {
    for b in from.rho_alg().basis() {
        let lhs = mul(&to.rho_unchecked(&b), t);
        let rhs = mul(t, &from.rho_unchecked(&b));
        if fro(&(&lhs - &rhs)) > CHECK_TOL * fro(t).max(1.0) {
            return Err(Error::NotInCommutant("operator does not intertwine ρ".into()));
        }
    }
    Ok(())
}

/// `S ⊗ T` from its action `ξ ▷ ω ↦ Sξ ▷ Tω`; `S` is a semi-morphism of
/// the left modules (or the identity when `None`).
pub fn op_tensor_left(src: &Rtp, tgt: &Rtp, s: Option<&Mat>, t: &Mat) -> Result<Mat> {
    if t.ncols() != src.h_right() || t.nrows() != tgt.h_right() {
        return Err(Error::ShapeMismatch("op_tensor: right operator".into()));
    }
    if s.is_none() {
        check_commutes(t, &src.right, &tgt.right)?;
    }
    let mut outs = Vec::with_capacity(src.left.dim());
    for xi in src.left.basis() {
        let sx = match s {
            Some(s) => mul(s, xi),
            None => xi.clone(),
        };
        outs.push(mul(&tgt.ket1(&sx)?, t));
    }
    linalg::solve_on_span(src.q(), &hcat(&outs), "op_tensor (left form)")
}

/// `S ⊗ T` from its action `ω ◁ η ↦ Sω ◁ Tη`; `T` is a semi-morphism of
/// the right modules (or the identity when `None`).
pub fn op_tensor_right(src: &Rtp, tgt: &Rtp, s: &Mat, t: Option<&Mat>) -> Result<Mat> {
    if s.ncols() != src.h_left() || s.nrows() != tgt.h_left() {
        return Err(Error::ShapeMismatch("op_tensor: left operator".into()));
    }
    if t.is_none() {
        check_commutes(s, &src.left, &tgt.left)?;
    }
    let mut outs = Vec::with_capacity(src.right.dim());
    for eta in src.right.basis() {
        let te = match t {
            Some(t) => mul(t, eta),
            None => eta.clone(),
        };
        outs.push(mul(&tgt.ket2(&te)?, s));
    }
    linalg::solve_on_span(&src.ket2_all(), &hcat(&outs), "op_tensor (right form)")
}

/// `S ⊗ T = (S ◁ Id)(Id ▷ T)` with `S`, `T` commuting with the base actions.
pub fn op_tensor(src: &Rtp, tgt: &Rtp, s: &Mat, t: &Mat) -> Result<Mat> {
    let mid = Rtp::new(src.left.clone(), tgt.right.clone())?;
    let inner = op_tensor_left(src, &mid, None, t)?;
    let outer = op_tensor_right(&mid, tgt, s, None)?;
    Ok(mul(&outer, &inner))
}

/// The associativity isomorphism
/// `(H β⊗γ K) ⊗φ L → H ⊗ (K ε⊗φ L)`, `(ξ ▷ ζ) ◁ φ ↦ ξ ▷ (ζ ◁ φ)`.
///
/// `lo` is the outer product on the left bracketing with inner product
/// `li`; `ro` and `ri` likewise on the right.
pub fn assoc(lo: &Rtp, li: &Rtp, ro: &Rtp, ri: &Rtp) -> Result<Mat> {
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for phi in lo.right.basis() {
        let k2l = lo.ket2(phi)?;
        let k2r = ri.ket2(phi)?;
        for (i, xi) in li.left.basis().iter().enumerate() {
            ins.push(mul(&k2l, &li.ket1_basis(i)));
            outs.push(mul(&ro.ket1(xi)?, &k2r));
        }
    }
    linalg::solve_on_span(&hcat(&ins), &hcat(&outs), "associativity")
}

/// `Σ₂₃ : (ζ ◁ ξ) ◁ η ↦ (ζ ◁ η) ◁ ξ`.
///
/// `so = si ⊗ (η-factor)` with `si = K ⊗ (ξ-factor)`, and `to = ti ⊗
/// (ξ-factor)` with `ti = K ⊗ (η-factor)`.
pub fn sigma23(so: &Rtp, si: &Rtp, to: &Rtp, ti: &Rtp) -> Result<Mat> {
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for eta in so.right.basis() {
        let a = so.ket2(eta)?;
        let b = ti.ket2(eta)?;
        for xi in si.right.basis() {
            ins.push(mul(&a, &si.ket2(xi)?));
            outs.push(mul(&to.ket2(xi)?, &b));
        }
    }
    linalg::solve_on_span(&hcat(&ins), &hcat(&outs), "Σ₂₃")
}

/// `l : H β⊗ (𝔎, 𝔅†) → H`, `ξ ▷ ζ ◁ b† ↦ ξ b† ζ`.
pub fn unit_right(r: &Rtp) -> Result<Mat> {
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for b in r.right.basis() {
        for (i, xi) in r.left.basis().iter().enumerate() {
            ins.push(mul(&r.ket1_basis(i), b));
            outs.push(mul(xi, b));
        }
    }
    linalg::solve_on_span(&hcat(&ins), &hcat(&outs), "right unit")
}

/// `r : (𝔎, 𝔅) ⊗γ K → K`, `b ▷ ζ ◁ η ↦ η b ζ`.
pub fn unit_left(r: &Rtp) -> Result<Mat> {
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for (i, b) in r.left.basis().iter().enumerate() {
        for eta in r.right.basis() {
            ins.push(mul(&r.ket1_basis(i), eta));
            outs.push(mul(eta, b));
        }
    }
    linalg::solve_on_span(&hcat(&ins), &hcat(&outs), "left unit")
}

/// Residual of `⟨v, w⟩` reproduction on random elementary tensors.
pub fn gram_reproduction_residual(r: &Rtp, rng: &mut impl rand::Rng, samples: usize) -> f64 {
    let k = r.left.base.k;
    let rand_in = |rng: &mut dyn rand::RngCore, m: &Module| -> Mat {
        let mut x = linalg::zeros(m.h, k);
        for b in m.basis() {
            let c = linalg::C64::new(rand::Rng::gen_range(rng, -1.0..1.0), rand::Rng::gen_range(rng, -1.0..1.0));
            x += b * c;
        }
        x
    };
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (x1, x2) = (rand_in(rng, &r.left), rand_in(rng, &r.left));
        let (e1, e2) = (rand_in(rng, &r.right), rand_in(rng, &r.right));
        let z1 = linalg::random_mat(rng, k, 1);
        let z2 = linalg::random_mat(rng, k, 1);
        let v1 = r.embed(&x1, &z1, &e1).unwrap();
        let v2 = r.embed(&x2, &z2, &e2).unwrap();
        let lhs = linalg::hs(&v1, &v2);
        let inner = mul(&mul(&adj(&x1), &x2), &mul(&adj(&e1), &e2));
        let rhs = linalg::hs(&z1, &mul(&inner, &z2));
        worst = worst.max((lhs - rhs).norm());
    }
    if worst.is_nan() {
        f64::MAX
    } else {
        worst
    }
}

/// Zero test helper used by reports.
pub fn is_zero(m: &Mat) -> bool {
    m.iter().all(|z| *z == ZERO)
}
