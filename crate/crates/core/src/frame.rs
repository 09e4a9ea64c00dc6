//! Triple relative tensor products, leg operators `X₁₂`, `X₁₃`, `Y₂₃`, and
//! the two sides of the pentagon.

use std::sync::Arc;

use crate::cstar::{assoc, flip, op_tensor_left, op_tensor_right, rtp, sigma23, Module, RtpRef};
use crate::error::Result;
use crate::linalg::{adj, mul, opnorm, Mat};
use crate::pmu::Pmu;

/// A representation `X : K δ̂⊗α H → K γ⊗β H` of a unitary `V`.
#[derive(Clone, Debug)]
pub struct Rep {
    /// `γ`, a module over `𝔟`.
    pub gamma: Arc<Module>,
    /// `δ̂`, a module over `𝔟†`.
    pub deltahat: Arc<Module>,
    /// `K δ̂⊗α H`.
    pub src: RtpRef,
    /// `K γ⊗β H`.
    pub rng: RtpRef,
    pub x: Mat,
}

impl Rep {
    pub fn k(&self) -> usize {
        self.gamma.h
    }

    /// `(H, α, β̂, V)`.
    pub fn regular(p: &Pmu) -> Rep {
        Rep { gamma: p.alpha.clone(), deltahat: p.betahat.clone(), src: p.src.clone(), rng: p.rng.clone(), x: p.v.clone() }
    }

    /// Builds the rtps for `(K, γ, δ̂)` and wraps `x`, given in their bases.
    pub fn on_module(p: &Pmu, gamma: Arc<Module>, deltahat: Arc<Module>, x: Mat) -> Result<Rep> {
        let src = rtp(&deltahat, &p.alpha)?;
        let rng = rtp(&gamma, &p.beta)?;
        Ok(Rep { gamma, deltahat, src, rng, x })
    }
}

/// Spaces and identifications for `X ⊠ Y` with `X` on `K(γ, δ̂)` and `Y` on
/// `L(ε, φ̂)`.
pub struct Frame {
    /// `K δ̂⊗ε L`.
    pub kl: RtpRef,
    /// `δ̂ ▷ φ̂` on `K ⊗ L`.
    pub mod_dphi: Arc<Module>,
    /// `γ ◁ ε` on `K ⊗ L`.
    pub mod_ge: Arc<Module>,
    /// `(K ⊗ L) ⊗α H`, the source of `X ⊠ Y`.
    pub t1l: RtpRef,
    /// `K ⊗ (L φ̂⊗α H)`.
    pub t1r: RtpRef,
    pub a1: Mat,
    /// `K ⊗ (L ε⊗β H)`.
    pub t5: RtpRef,
    pub y23: Mat,
    /// `H β⊗ε L`.
    pub hl: RtpRef,
    /// `K ⊗ (H β⊗ε L)`.
    pub t4lr: RtpRef,
    pub id_sigma: Mat,
    /// `(K δ̂⊗α H) ⊗ε L`.
    pub t4ll: RtpRef,
    pub a4: Mat,
    /// `(K γ⊗β H) ⊗ε L`.
    pub t4r: RtpRef,
    pub x12: Mat,
    /// `(K ⊗ L) γ◁ε⊗β H`, the range of `X ⊠ Y`.
    pub tout: RtpRef,
    pub s23: Mat,
    /// `X₁₃ Y₂₃ : t1l → tout`.
    pub xy: Mat,
}

impl Frame {
    pub fn new(p: &Pmu, x: &Rep, y: &Rep) -> Result<Frame> {
        let eps = &y.gamma;
        let kl = if Arc::ptr_eq(eps, &p.alpha) { x.src.clone() } else { rtp(&x.deltahat, eps)? };
        let mod_dphi = Arc::new(kl.lift_right(&y.deltahat)?);
        let mod_ge = Arc::new(kl.lift_left(&x.gamma)?);
        let t1l = rtp(&mod_dphi, &p.alpha)?;
        let mod_ea = Arc::new(y.src.lift_left(eps)?);
        let t1r = rtp(&x.deltahat, &mod_ea)?;
        let a1 = assoc(&t1l, &kl, &t1r, &y.src)?;
        let mod_e_a_rng = Arc::new(y.rng.lift_right(&p.alpha)?);
        let t5 = rtp(&x.deltahat, &mod_e_a_rng)?;
        let y23 = op_tensor_left(&t1r, &t5, None, &y.x)?;
        let hl = rtp(&p.beta, eps)?;
        let sigma_l = flip(&y.rng, &hl)?;
        let mod_ae = Arc::new(hl.lift_left(&p.alpha)?);
        let t4lr = rtp(&x.deltahat, &mod_ae)?;
        let id_sigma = op_tensor_left(&t5, &t4lr, None, &sigma_l)?;
        let mod_db = Arc::new(x.src.lift_right(&p.beta)?);
        let t4ll = rtp(&mod_db, eps)?;
        let a4 = assoc(&t4ll, &x.src, &t4lr, &hl)?;
        let mod_d_b_rng = Arc::new(x.rng.lift_left(&x.deltahat)?);
        let t4r = rtp(&mod_d_b_rng, eps)?;
        let x12 = op_tensor_right(&t4ll, &t4r, &x.x, None)?;
        let tout = rtp(&mod_ge, &p.beta)?;
        let s23 = sigma23(&t4r, &x.rng, &tout, &kl)?;
        let mut xy = mul(&id_sigma, &mul(&y23, &a1));
        xy = mul(&adj(&a4), &xy);
        xy = mul(&x12, &xy);
        xy = mul(&s23, &xy);
        Ok(Frame { kl, mod_dphi, mod_ge, t1l, t1r, a1, t5, y23, hl, t4lr, id_sigma, t4ll, a4, t4r, x12, tout, s23, xy })
    }

    /// `X ⊠ Y` as a representation on `(K ⊗ L, γ ◁ ε, δ̂ ▷ φ̂)`.
    pub fn tensor_rep(&self) -> Rep {
        Rep { gamma: self.mod_ge.clone(), deltahat: self.mod_dphi.clone(), src: self.t1l.clone(), rng: self.tout.clone(), x: self.xy.clone() }
    }
}

/// The pieces of the pentagon `V₂₃ X₁₂ = X₁₂ X₁₃ V₂₃` for a rep `X`, on top
/// of `Frame::new(p, x, regular)`.
pub struct Pentagon {
    pub frame: Frame,
    /// `(K γ⊗β H) γ▷β̂⊗α H`.
    pub l2: RtpRef,
    pub x12_top: Mat,
    /// `K γ⊗ (H β̂⊗α H)`.
    pub r2: RtpRef,
    pub a2: Mat,
    /// `K γ⊗ (H α⊗β H)`.
    pub r3: RtpRef,
    pub v23: Mat,
    /// `(K γ⊗β H) γ▷α⊗β H`.
    pub l3: RtpRef,
    pub a3: Mat,
    pub x12_bot: Mat,
}

impl Pentagon {
    pub fn new(p: &Pmu, x: &Rep) -> Result<Pentagon> {
        let reg = Rep::regular(p);
        let frame = Frame::new(p, x, &reg)?;
        let l2 = rtp(&Arc::new(x.rng.lift_right(&p.betahat)?), &p.alpha)?;
        let x12_top = op_tensor_right(&frame.t1l, &l2, &x.x, None)?;
        let r2 = rtp(&x.gamma, &Arc::new(p.src.lift_left(&p.beta)?))?;
        let a2 = assoc(&l2, &x.rng, &r2, &p.src)?;
        let r3 = rtp(&x.gamma, &Arc::new(p.rng.lift_left(&p.beta)?))?;
        let v23 = op_tensor_left(&r2, &r3, None, &p.v)?;
        let l3 = rtp(&Arc::new(x.rng.lift_right(&p.alpha)?), &p.beta)?;
        let a3 = assoc(&l3, &x.rng, &r3, &p.rng)?;
        let x12_bot = op_tensor_right(&frame.tout, &l3, &x.x, None)?;
        Ok(Pentagon { frame, l2, x12_top, r2, a2, r3, v23, l3, a3, x12_bot })
    }

    /// `a₃* V₂₃ a₂ X₁₂` (top path, into `l3`).
    pub fn top(&self) -> Mat {
        mul(&adj(&self.a3), &mul(&self.v23, &mul(&self.a2, &self.x12_top)))
    }

    /// `X₁₂ X₁₃ V₂₃` (bottom path, into `l3`).
    pub fn bottom(&self) -> Mat {
        mul(&self.x12_bot, &self.frame.xy)
    }

    pub fn residual(&self) -> f64 {
        opnorm(&(self.top() - self.bottom()))
    }
}
