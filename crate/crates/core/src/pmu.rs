//! C*-pseudo-multiplicative unitaries: the groupoid example, opposite,
//! direct sums, tensor products and axiom verification.

use std::sync::Arc;

use crate::cstar::{self, flip, make_base, op_tensor_left, rtp, Base, Module, Rtp, RtpRef, Side};
use crate::error::{Error, Result};
use crate::frame::{Pentagon, Rep};
use crate::groupoid::{left_invariance_residual, radon_nikodym, FiniteGroupoid, HaarSystem, QuasiInvariantMeasure};
use crate::linalg::{self, adj, c, fro, hcat, kron, mul, opnorm, solve_on_span, unitarity_defect, unit, Mat, C64};
use crate::opspace::OperatorSpace;
use crate::report::Report;

/// `(𝔟, H, β̂, α, β, V)` with `V : H β̂⊗α H → H α⊗β H`.
#[derive(Clone, Debug)]
pub struct Pmu {
    pub base: Arc<Base>,
    pub h: usize,
    pub betahat: Arc<Module>,
    pub alpha: Arc<Module>,
    pub beta: Arc<Module>,
    pub src: RtpRef,
    pub rng: RtpRef,
    pub v: Mat,
}

impl Pmu {
    /// Builds both relative tensor products; `make_v` receives them and
    /// returns `V` in their bases.
    pub fn assemble(
        betahat: Arc<Module>,
        alpha: Arc<Module>,
        beta: Arc<Module>,
        make_v: impl FnOnce(&Rtp, &Rtp) -> Result<Mat>,
    ) -> Result<Pmu> {
        if betahat.side != Side::Bdag || alpha.side != Side::B || beta.side != Side::Bdag {
            return Err(Error::ModuleAxiomFailed("expected modules over (𝔟†, 𝔟, 𝔟†)".into()));
        }
        let src = rtp(&betahat, &alpha)?;
        let rng = rtp(&alpha, &beta)?;
        let v = make_v(&src, &rng)?;
        if v.nrows() != rng.dim() || v.ncols() != src.dim() {
            return Err(Error::ShapeMismatch(format!(
                "V is {}x{} but the products have dimensions {} and {}",
                v.nrows(),
                v.ncols(),
                rng.dim(),
                src.dim()
            )));
        }
        Ok(Pmu { base: alpha.base.clone(), h: alpha.h, betahat, alpha, beta, src, rng, v })
    }

    /// Same modules and products, different `V`.
    pub fn with_v(&self, v: Mat) -> Pmu {
        Pmu { v, ..self.clone() }
    }

    pub fn k(&self) -> usize {
        self.base.k
    }

    /// `Id ⊗ y` on `H α⊗β H`.
    pub fn id_tensor_rng(&self, y: &Mat) -> Result<Mat> {
        op_tensor_left(&self.rng, &self.rng, None, y)
    }

    /// `z ⊗ Id` on `H β̂⊗α H`.
    pub fn tensor_id_src(&self, z: &Mat) -> Result<Mat> {
        cstar::op_tensor_right(&self.src, &self.src, z, None)
    }

    /// `Δ̂(y) = V* (Id ⊗ y) V`.
    pub fn delta_hat(&self, y: &Mat) -> Result<Mat> {
        Ok(mul(&adj(&self.v), &mul(&self.id_tensor_rng(y)?, &self.v)))
    }

    /// `Δ(z) = V (z ⊗ Id) V*`.
    pub fn delta(&self, z: &Mat) -> Result<Mat> {
        Ok(mul(&self.v, &mul(&self.tensor_id_src(z)?, &adj(&self.v))))
    }
}

/// Residuals of the four intertwining relations, in the order
/// `α◁α`, `β̂▷β`, `β̂▷β̂`, `β◁α`.
pub fn intertwining_residuals(p: &Pmu) -> Result<[f64; 4]> {
    let (a, b, bh) = (&p.alpha.space, &p.beta.space, &p.betahat.space);
    let pairs = [
        (p.src.ket2_space(a)?, p.rng.ket1_space(a)?),
        (p.src.ket1_space(b)?, p.rng.ket2_space(bh)?),
        (p.src.ket1_space(bh)?, p.rng.ket1_space(bh)?),
        (p.src.ket2_space(b)?, p.rng.ket2_space(b)?),
    ];
    let mut out = [0.0; 4];
    for (k, (from, to)) in pairs.iter().enumerate() {
        out[k] = from.left_mul(&p.v)?.equality_residual(to);
    }
    Ok(out)
}

pub fn pentagon_residual(p: &Pmu) -> Result<f64> {
    Ok(Pentagon::new(p, &Rep::regular(p))?.residual())
}

/// Unitarity, the four intertwining relations and the pentagon.
pub fn verify_pmu(p: &Pmu, tol: f64) -> Report {
    let mut r = Report::new("pmu", tol);
    r.residual("V unitary", unitarity_defect(&p.v), "pmu");
    match intertwining_residuals(p) {
        Ok(res) => {
            let names = ["V(α◁α) = α▷α", "V(β̂▷β) = β̂◁β", "V(β̂▷β̂) = α▷β̂", "V(β◁α) = β◁β"];
            for (n, x) in names.iter().zip(res) {
                r.residual(*n, x, "pmu");
            }
        }
        Err(e) => r.attempt("intertwining relations", Err(e), "pmu"),
    }
    r.attempt("pentagon", pentagon_residual(p), "pentagon");
    r
}

/// The unitary of a finite groupoid together with the data it came from.
#[derive(Clone, Debug)]
pub struct GroupoidPmu {
    pub g: FiniteGroupoid,
    pub lambda: HaarSystem,
    pub q: QuasiInvariantMeasure,
    pub pmu: Pmu,
}

impl GroupoidPmu {
    pub fn n(&self) -> usize {
        self.g.n_arrows()
    }

    pub fn k(&self) -> usize {
        self.g.n_units()
    }

    /// `j(δ_a)` in orthonormal coordinates: `√λ(a) E_{a, r(a)}`.
    pub fn j(&self, a: usize) -> Mat {
        unit(self.n(), self.k(), a, self.g.r(a)) * c(self.lambda.weight[a].sqrt())
    }

    /// `ĵ(δ_a)`: `√ν(a) D^{-1/2}(a) / √μ(s(a)) E_{a, s(a)}`.
    pub fn jhat(&self, a: usize) -> Mat {
        let s = self.g.s(a);
        let w = (self.q.nu[a] / self.q.d[a] / self.q.mu[s]).sqrt();
        unit(self.n(), self.k(), a, s) * c(w)
    }

    /// `j(ξ)` for a function `ξ` on `G`.
    pub fn j_fn(&self, xi: &[C64]) -> Mat {
        (0..self.n()).fold(linalg::zeros(self.n(), self.k()), |acc, a| acc + self.j(a) * xi[a])
    }

    pub fn jhat_fn(&self, xi: &[C64]) -> Mat {
        (0..self.n()).fold(linalg::zeros(self.n(), self.k()), |acc, a| acc + self.jhat(a) * xi[a])
    }

    /// The indicator `δ_u ∈ ℓ²(G⁰, μ)` in orthonormal coordinates.
    pub fn delta_unit(&self, u: usize) -> Mat {
        unit(self.k(), 1, u, 0) * c(self.q.mu[u].sqrt())
    }

    /// Multiplication by `f` on `ℓ²(G, ν)`.
    pub fn mult(&self, f: &[C64]) -> Mat {
        linalg::diag(f)
    }

    /// Multiplication by `f` on `ℓ²(G⁰, μ)`.
    pub fn mult_units(&self, f: &[C64]) -> Mat {
        linalg::diag(f)
    }

    /// `L(f)ξ(y) = Σ_{x ∈ G^{r(y)}} f(x) D^{-1/2}(x) ξ(x⁻¹y) λ(x)`, in
    /// orthonormal coordinates.
    pub fn conv(&self, f: &[C64]) -> Mat {
        let n = self.n();
        let mut m = linalg::zeros(n, n);
        for y in 0..n {
            for x in self.g.range_fiber(self.g.r(y)) {
                let z = self.g.mul(self.g.inv(x), y);
                let w = self.q.d[x].powf(-0.5) * self.lambda.weight[x] * (self.q.nu[y] / self.q.nu[z]).sqrt();
                m[(y, z)] += f[x] * w;
            }
        }
        m
    }

    /// Orthonormal identification of `H β̂⊗α H` with `ℓ²(G s×r G)`.
    pub fn phi_src(&self) -> Result<Mat> {
        let pairs = self.g.composable_pairs();
        let mut ins = Vec::with_capacity(pairs.len());
        let mut outs = linalg::zeros(pairs.len(), pairs.len());
        for (idx, &(a, b)) in pairs.iter().enumerate() {
            let s = self.g.s(a);
            ins.push(mul(&self.pmu.src.ket1(&self.jhat(a))?, &mul(&self.j(b), &self.delta_unit(s))));
            let w = self.q.mu[self.g.r(a)] * self.lambda.weight[a] * self.lambda.weight[b];
            outs[(idx, idx)] = c((w / self.q.d[a]).sqrt());
        }
        solve_on_span(&hcat(&ins), &outs, "Φ on the source")
    }

    /// Orthonormal identification of `H α⊗β H` with `ℓ²(G r×r G)`.
    pub fn phi_rng(&self) -> Result<Mat> {
        let pairs = self.g.range_pairs();
        let mut ins = Vec::with_capacity(pairs.len());
        let mut outs = linalg::zeros(pairs.len(), pairs.len());
        for (idx, &(a, b)) in pairs.iter().enumerate() {
            let r = self.g.r(a);
            ins.push(mul(&self.pmu.rng.ket1(&self.j(a))?, &mul(&self.j(b), &self.delta_unit(r))));
            let w = self.q.mu[r] * self.lambda.weight[a] * self.lambda.weight[b];
            outs[(idx, idx)] = c(w.sqrt());
        }
        solve_on_span(&hcat(&ins), &outs, "Φ on the range")
    }

    /// `(x, y) ↦ (x, xy)` from `G s×r G` to `G r×r G`.
    pub fn pair_permutation(&self) -> Mat {
        let src = self.g.composable_pairs();
        let rng = self.g.range_pairs();
        let mut p = linalg::zeros(rng.len(), src.len());
        for (j, &(x, y)) in src.iter().enumerate() {
            let i = rng.iter().position(|&t| t == (x, self.g.mul(x, y))).expect("range pair");
            p[(i, j)] = c(1.0);
        }
        p
    }

    /// Largest of: unitarity of both identifications and `‖Φ_r V Φ_s* − P‖`.
    pub fn fast_path_residual(&self) -> Result<f64> {
        let us = self.phi_src()?;
        let ur = self.phi_rng()?;
        let d = mul(&ur, &mul(&self.pmu.v, &adj(&us))) - self.pair_permutation();
        Ok(unitarity_defect(&us).max(unitarity_defect(&ur)).max(opnorm(&d)))
    }
}

/// The unitary of `G` with Haar system `λ` and measure `μ` on the units.
pub fn groupoid_pmu(g: &FiniteGroupoid, lambda: &HaarSystem, mu: &[f64]) -> Result<GroupoidPmu> {
    let inv = left_invariance_residual(g, lambda);
    if inv > 1e-12 {
        return Err(Error::InvalidGroupoid(format!("λ is not left invariant (residual {inv:.3e})")));
    }
    let q = radon_nikodym(g, lambda, mu)?;
    let n = g.n_arrows();
    let k = g.n_units();
    let base = cstar::diagonal_base(k);
    let by_range: Vec<Mat> = (0..n).map(|x| unit(n, k, x, g.r(x))).collect();
    let by_source: Vec<Mat> = (0..n).map(|x| unit(n, k, x, g.s(x))).collect();
    let alpha = Arc::new(Module::from_gens(base.clone(), Side::B, n, &by_range)?);
    let beta = Arc::new(Module::from_gens(base.clone(), Side::Bdag, n, &by_range)?);
    let betahat = Arc::new(Module::from_gens(base.clone(), Side::Bdag, n, &by_source)?);
    let mut gp = GroupoidPmu {
        g: g.clone(),
        lambda: lambda.clone(),
        q,
        pmu: Pmu {
            base,
            h: n,
            betahat: betahat.clone(),
            alpha: alpha.clone(),
            beta: beta.clone(),
            src: rtp(&betahat, &alpha)?,
            rng: rtp(&alpha, &beta)?,
            v: linalg::zeros(0, 0),
        },
    };
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for (a, b) in g.composable_pairs() {
        let ab = g.mul(a, b);
        let s = g.s(a);
        let r = g.r(a);
        ins.push(mul(&gp.pmu.src.ket1(&gp.jhat(a))?, &mul(&gp.j(b), &gp.delta_unit(s))));
        let out = mul(&gp.pmu.rng.ket1(&gp.j(a))?, &mul(&gp.j(ab), &gp.delta_unit(r)));
        outs.push(out * c(gp.q.d[a].powf(-0.5)));
    }
    gp.pmu.v = solve_on_span(&hcat(&ins), &hcat(&outs), "groupoid unitary")?;
    Ok(gp)
}

/// `(𝔟, H, β, α, β̂, Σ V* Σ)`.
pub fn opposite(p: &Pmu) -> Result<Pmu> {
    Pmu::assemble(p.beta.clone(), p.alpha.clone(), p.betahat.clone(), |src_op, rng_op| {
        let f_in = flip(src_op, &p.rng)?;
        let f_out = flip(&p.src, rng_op)?;
        Ok(mul(&f_out, &mul(&adj(&p.v), &f_in)))
    })
}

fn embed_block(x: &Mat, rows: usize, cols: usize, r0: usize, c0: usize) -> Mat {
    let mut m = linalg::zeros(rows, cols);
    m.view_mut((r0, c0), (x.nrows(), x.ncols())).copy_from(x);
    m
}

/// Maps `ξ ▷ ω ↦ ι(ξ) ▷ ι(ω)` from a summand product into the total product.
fn summand_embedding(part: &Rtp, total: &Rtp, h_off: usize, k_off: usize) -> Result<Mat> {
    let (ht, kt) = (total.h_left(), total.left.base.k);
    let hr_total = total.h_right();
    let iota_h = embed_block(&linalg::eye(part.h_right()), hr_total, part.h_right(), h_off, 0);
    let mut outs = Vec::new();
    for xi in part.left.basis() {
        let big = embed_block(xi, ht, kt, h_off, k_off);
        outs.push(mul(&total.ket1(&big)?, &iota_h));
    }
    solve_on_span(part.q(), &hcat(&outs), "direct sum embedding")
}

/// `⊞ P_i` over the direct sum of the bases.
pub fn direct_sum(parts: &[Pmu]) -> Result<Pmu> {
    if parts.is_empty() {
        return Err(Error::ShapeMismatch("empty direct sum".into()));
    }
    let k: usize = parts.iter().map(|p| p.k()).sum();
    let h: usize = parts.iter().map(|p| p.h).sum();
    let mut b_gens = Vec::new();
    let mut bd_gens = Vec::new();
    let (mut ko, mut ho) = (0, 0);
    let mut offsets = Vec::new();
    for p in parts {
        for x in p.base.b.basis() {
            b_gens.push(embed_block(&x, k, k, ko, ko));
        }
        for x in p.base.bdag.basis() {
            bd_gens.push(embed_block(&x, k, k, ko, ko));
        }
        offsets.push((ho, ko));
        ko += p.k();
        ho += p.h;
    }
    let base = make_base(k, OperatorSpace::span(k, k, &b_gens)?, OperatorSpace::span(k, k, &bd_gens)?)?;
    let boxplus = |pick: &dyn Fn(&Pmu) -> &Arc<Module>, side: Side| -> Result<Arc<Module>> {
        let mut gens = Vec::new();
        for (p, &(hoff, koff)) in parts.iter().zip(&offsets) {
            for x in pick(p).basis() {
                gens.push(embed_block(x, h, k, hoff, koff));
            }
        }
        Ok(Arc::new(Module::from_gens(base.clone(), side, h, &gens)?))
    };
    let betahat = boxplus(&|p| &p.betahat, Side::Bdag)?;
    let alpha = boxplus(&|p| &p.alpha, Side::B)?;
    let beta = boxplus(&|p| &p.beta, Side::Bdag)?;
    Pmu::assemble(betahat, alpha, beta, |src, rng| {
        let mut v = linalg::zeros(rng.dim(), src.dim());
        for (p, &(hoff, koff)) in parts.iter().zip(&offsets) {
            let js = summand_embedding(&p.src, src, hoff, koff)?;
            let jr = summand_embedding(&p.rng, rng, hoff, koff)?;
            v += mul(&jr, &mul(&p.v, &adj(&js)));
        }
        Ok(v)
    })
}

/// `(ξ ▷ ω) ⊗ (ξ' ▷ ω') ↦ (ξ ⊗ ξ') ▷ (ω ⊗ ω')`.
fn kron_identification(a: &Rtp, b: &Rtp, total: &Rtp) -> Result<Mat> {
    let (ha, hb) = (a.h_right(), b.h_right());
    let mut outs = Vec::new();
    for xa in a.left.basis() {
        for xb in b.left.basis() {
            let k1 = total.ket1(&kron(xa, xb))?;
            outs.push(k1);
        }
    }
    // column order of the stacked kets: (i, i', a, a'); reorder to kron(Q_a, Q_b)
    let (pa, pb) = (a.left.dim(), b.left.dim());
    let mut m_out = linalg::zeros(total.dim(), pa * ha * pb * hb);
    for i in 0..pa {
        for ip in 0..pb {
            let blk = &outs[i * pb + ip];
            for aa in 0..ha {
                for ab in 0..hb {
                    let col = (i * ha + aa) * (pb * hb) + ip * hb + ab;
                    m_out.set_column(col, &blk.column(aa * hb + ab));
                }
            }
        }
    }
    solve_on_span(&kron(a.q(), b.q()), &m_out, "tensor identification")
}

/// `P ⊗ Q` over the spatial tensor product of the bases.
pub fn tensor(p: &Pmu, q: &Pmu) -> Result<Pmu> {
    let k = p.k() * q.k();
    let h = p.h * q.h;
    let kr = |x: &OperatorSpace, y: &OperatorSpace, rows: usize| -> Result<OperatorSpace> {
        let mut gens = Vec::new();
        for a in x.basis() {
            for b in y.basis() {
                gens.push(kron(&a, &b));
            }
        }
        OperatorSpace::span(rows, k, &gens)
    };
    let base = make_base(k, kr(&p.base.b, &q.base.b, k)?, kr(&p.base.bdag, &q.base.bdag, k)?)?;
    let m = |x: &Module, y: &Module, side: Side| -> Result<Arc<Module>> {
        Ok(Arc::new(Module::new(base.clone(), side, kr(&x.space, &y.space, h)?)))
    };
    let betahat = m(&p.betahat, &q.betahat, Side::Bdag)?;
    let alpha = m(&p.alpha, &q.alpha, Side::B)?;
    let beta = m(&p.beta, &q.beta, Side::Bdag)?;
    Pmu::assemble(betahat, alpha, beta, |src, rng| {
        let cs = kron_identification(&p.src, &q.src, src)?;
        let cr = kron_identification(&p.rng, &q.rng, rng)?;
        Ok(mul(&cr, &mul(&kron(&p.v, &q.v), &adj(&cs))))
    })
}

/// `U ⊗ U` between two products whose factors are related by `u`.
fn induced(from: &Rtp, to: &Rtp, u: &Mat) -> Result<Mat> {
    let mut outs = Vec::new();
    for xi in from.left.basis() {
        outs.push(mul(&to.ket1(&mul(u, xi))?, u));
    }
    solve_on_span(from.q(), &hcat(&outs), "induced map")
}

/// Residual of `u` as an isomorphism `P → Q` over the same base: module
/// transport and `V` intertwining.
pub fn isomorphism_residual(p: &Pmu, q: &Pmu, u: &Mat) -> Result<f64> {
    if p.k() != q.k() || p.h != q.h || p.base.b.equality_residual(&q.base.b) > 1e-9 {
        return Ok(f64::MAX);
    }
    let mut worst = unitarity_defect(u);
    for (a, b) in [(&p.betahat, &q.betahat), (&p.alpha, &q.alpha), (&p.beta, &q.beta)] {
        worst = worst.max(a.space.left_mul(u)?.equality_residual(&b.space));
    }
    let ws = induced(&p.src, &q.src, u)?;
    let wr = induced(&p.rng, &q.rng, u)?;
    worst = worst.max(opnorm(&(mul(&wr, &p.v) - mul(&q.v, &ws))));
    Ok(worst)
}

/// Swaps two columns of `V`; used to check that the verifier notices.
pub fn tamper(p: &Pmu, i: usize, j: usize) -> Pmu {
    let mut v = p.v.clone();
    v.swap_columns(i, j);
    p.with_v(v)
}

/// Replaces `V` with the flip `H β̂⊗α H → H α⊗β H`, which exists when
/// `β̂ = β` as spaces.
pub fn flip_counterexample(p: &Pmu) -> Result<Pmu> {
    if p.betahat.space.equality_residual(&p.beta.space) > 1e-9 {
        return Err(Error::ModuleAxiomFailed("flip needs β̂ = β".into()));
    }
    // H β̂⊗α H → H α⊗β̂ H, then relabel β̂ as β on the second factor
    let via = Rtp::new(p.alpha.clone(), p.betahat.clone())?;
    let f = flip(&p.src, &via)?;
    let mut outs = Vec::new();
    for (i, _) in via.left.basis().iter().enumerate() {
        outs.push(p.rng.ket1(&via.left.basis()[i])?);
    }
    let relabel = solve_on_span(via.q(), &hcat(&outs), "relabel")?;
    Ok(p.with_v(mul(&relabel, &f)))
}

/// `‖x − y‖_F` helper for tests and reports.
pub fn distance(x: &Mat, y: &Mat) -> f64 {
    fro(&(x - y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{counting_haar, cyclic_groupoid, pair_groupoid, unit_groupoid};

    fn build(g: &FiniteGroupoid, mu: &[f64]) -> GroupoidPmu {
        groupoid_pmu(g, &counting_haar(g), mu).unwrap()
    }

    #[test]
    fn unit_groupoid_gives_identity() {
        let g = unit_groupoid(3);
        let gp = build(&g, &[1.0, 2.0, 3.0]);
        assert_eq!(gp.pmu.src.dim(), 3);
        assert!(fro(&(gp.pmu.v.clone() - linalg::eye(3))) < 1e-12);
    }

    #[test]
    fn z2_is_the_pair_permutation() {
        let g = cyclic_groupoid(2);
        let gp = build(&g, &[1.0]);
        assert_eq!(gp.pmu.src.dim(), 4);
        assert!(gp.fast_path_residual().unwrap() < 1e-12);
        let rep = verify_pmu(&gp.pmu, 1e-8);
        assert!(rep.all_pass(), "{}", rep.to_text());
    }

    #[test]
    fn pair2_nonuniform_is_unitary() {
        let g = pair_groupoid(2);
        let gp = build(&g, &[1.0, 2.0]);
        assert!(unitarity_defect(&gp.pmu.v) < 1e-12);
        let rep = verify_pmu(&gp.pmu, 1e-8);
        assert!(rep.all_pass(), "{}", rep.to_text());
        assert!(gp.fast_path_residual().unwrap() < 1e-9);
    }

    #[test]
    fn flip_fails_pentagon() {
        let gp = build(&cyclic_groupoid(3), &[1.0]);
        let bad = flip_counterexample(&gp.pmu).unwrap();
        let rep = verify_pmu(&bad, 1e-8);
        assert!(!rep.find("pentagon").unwrap().pass);
    }

    #[test]
    fn opposite_is_involutive() {
        let gp = build(&pair_groupoid(2), &[1.0, 3.0]);
        let op = opposite(&gp.pmu).unwrap();
        assert!(verify_pmu(&op, 1e-8).all_pass());
        let opop = opposite(&op).unwrap();
        assert!(fro(&(opop.v - gp.pmu.v.clone())) < 1e-9);
    }
}
