//! Brute-force oracles shared by the integration tests and the acceptance
//! harness. Ranks and nullspaces here go through a plain SVD, and groupoid
//! quantities are computed from the multiplication table directly.

#![allow(dead_code)]

use groupoid_pmu::cli::{cmd_legs, cmd_verify, Options, Target};
use groupoid_pmu::cstar::is_morphism;
use groupoid_pmu::fixedpoints::{cofixed_space, haar_weight, is_compact, is_etale, is_proper};
use groupoid_pmu::groupoid::*;
use groupoid_pmu::legs::{self, in_fiber_product, leg, leg_hat, pi_hat, pi_hat_convolution, verify_hopf, Functional, LegSide};
use groupoid_pmu::linalg::{self, adj, c, fro, kron, mul, Mat, C64};
use groupoid_pmu::opspace::OperatorSpace;
use groupoid_pmu::pmu::{direct_sum, flip_counterexample, groupoid_pmu, isomorphism_residual, opposite, pentagon_residual, tamper, tensor, verify_pmu, GroupoidPmu};
use groupoid_pmu::reps::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn build(g: &FiniteGroupoid, mu: &[f64]) -> GroupoidPmu {
    groupoid_pmu(g, &counting_haar(g), mu).expect("groupoid unitary")
}

/// `Z/2` swapping the first two of three points.
pub fn swap_action() -> FiniteGroupoid {
    transformation_groupoid(&cyclic_table(2), &[vec![0, 1, 2], vec![1, 0, 2]], 3).expect("action groupoid")
}

/// The zoo of the acceptance criteria.
pub fn zoo() -> Vec<(String, FiniteGroupoid)> {
    let mut z = Vec::new();
    for n in 1..=4 {
        z.push((format!("unit{n}"), unit_groupoid(n)));
    }
    for n in 2..=4 {
        z.push((format!("pair{n}"), pair_groupoid(n)));
    }
    for n in 2..=6 {
        z.push((format!("z{n}"), cyclic_groupoid(n)));
    }
    z.push(("Z/2 ⋉ {0,1,2}".into(), swap_action()));
    z.push(("pair2 ⊔ z3".into(), disjoint_union(&pair_groupoid(2), &cyclic_groupoid(3))));
    z
}

/// `μ(u) = 1 + u/2` for several units, `μ = 2.5` for a single one.
pub fn nonuniform(g: &FiniteGroupoid) -> Vec<f64> {
    if g.n_units() == 1 {
        vec![2.5]
    } else {
        (0..g.n_units()).map(|u| 1.0 + 0.5 * u as f64).collect()
    }
}

pub fn svd_rank(m: &Mat) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-9 * top).count()
}

/// Rank of the vectorized matrices.
pub fn span_rank(ms: &[Mat]) -> usize {
    if ms.is_empty() {
        return 0;
    }
    let len = ms[0].len();
    let mut big = linalg::zeros(len, ms.len());
    for (j, m) in ms.iter().enumerate() {
        for (i, z) in m.iter().enumerate() {
            big[(i, j)] = *z;
        }
    }
    svd_rank(&big)
}

/// `span(a) = span(b)` by three ranks.
pub fn same_span(a: &[Mat], b: &[Mat]) -> bool {
    let both: Vec<Mat> = a.iter().chain(b).cloned().collect();
    let r = span_rank(&both);
    r == span_rank(a) && r == span_rank(b)
}

pub fn products(a: &[Mat], b: &[Mat]) -> Vec<Mat> {
    a.iter().flat_map(|x| b.iter().map(move |y| mul(x, y))).collect()
}

/// `dim {T : T a = a T for all a}` from the SVD of the stacked
/// commutator maps.
pub fn commutant_dim(gens: &[Mat]) -> usize {
    let n = gens[0].nrows();
    let id = linalg::eye(n);
    let blocks: Vec<Mat> = gens.iter().map(|a| kron(&a.transpose(), &id) - kron(&id, a)).collect();
    n * n - svd_rank(&linalg::vcat(&blocks))
}

/// The groupoid unitary as a partial isometry on `ℓ²(G × G)`,
/// `(W f)(x, y) = f(x, x⁻¹y)` on `r(x) = r(y)` and zero elsewhere.
pub fn groupoid_w(g: &FiniteGroupoid) -> Mat {
    let n = g.n_arrows();
    let mut w = linalg::zeros(n * n, n * n);
    for x in 0..n {
        for y in 0..n {
            if g.r(x) == g.r(y) {
                let z = g.mul(g.inv(x), y);
                w[(x * n + y, x * n + z)] = c(1.0);
            }
        }
    }
    w
}

/// `W₁₂ W₁₃ W₂₃ = W₂₃ W₁₂` on `ℓ²(G³)` built with Kronecker products and
/// a swap of the last two legs.
pub fn pentagon_oracle(g: &FiniteGroupoid) -> f64 {
    let n = g.n_arrows();
    let w = groupoid_w(g);
    let id = linalg::eye(n);
    let w12 = kron(&w, &id);
    let w23 = kron(&id, &w);
    let mut s23 = linalg::zeros(n * n * n, n * n * n);
    for a in 0..n {
        for b in 0..n {
            for d in 0..n {
                s23[(a * n * n + d * n + b, a * n * n + b * n + d)] = c(1.0);
            }
        }
    }
    let w13 = mul(&s23, &mul(&w12, &s23));
    fro(&(mul(&w12, &mul(&w13, &w23)) - mul(&w23, &w12)))
}

/// Composable triples `s(x) = r(y)`, `s(y) = r(z)` by enumeration.
pub fn composable_triples(g: &FiniteGroupoid) -> usize {
    let n = g.n_arrows();
    let mut count = 0;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if g.s(x) == g.r(y) && g.s(y) == g.r(z) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Direct summation check of `Σ_{y ∈ G^{s(x)}} g(xy) = Σ_{y ∈ G^{r(x)}} g(y)`
/// over all `x` and all indicators `g`.
pub fn counting_invariance_oracle(g: &FiniteGroupoid) -> bool {
    let n = g.n_arrows();
    (0..n).all(|x| {
        (0..n).all(|z| {
            let lhs = (0..n).filter(|&y| g.r(y) == g.s(x) && g.mul(x, y) == z).count();
            let rhs = (0..n).filter(|&y| g.r(y) == g.r(x) && y == z).count();
            lhs == rhs
        })
    })
}

/// Convolution operators `δ_x ↦ δ_{yx}` for every arrow `y`.
pub fn translation_ops(g: &FiniteGroupoid) -> Vec<Mat> {
    let n = g.n_arrows();
    (0..n)
        .map(|y| {
            let mut t = linalg::zeros(n, n);
            for x in 0..n {
                if let Some(z) = g.comp(y, x) {
                    t[(z, x)] = c(1.0);
                }
            }
            t
        })
        .collect()
}

/// One oracle against the library.
pub struct Row {
    pub name: &'static str,
    pub oracle: String,
    pub library: String,
    pub frozen: String,
    pub pass: bool,
    pub note: Option<&'static str>,
}

fn row(name: &'static str, oracle: impl ToString, library: impl ToString, frozen: impl ToString) -> Row {
    let (oracle, library, frozen) = (oracle.to_string(), library.to_string(), frozen.to_string());
    let pass = oracle == library && oracle == frozen;
    Row { name, oracle, library, frozen, pass, note: None }
}

pub fn row_counting_haar() -> Row {
    let all = zoo();
    let oracle = all.iter().all(|(_, g)| counting_invariance_oracle(g));
    let library = all.iter().all(|(_, g)| verify_left_invariance(g, &counting_haar(g)));
    row("counting Haar is left invariant on the zoo", oracle, library, true)
}

pub fn row_radon_nikodym() -> Row {
    let g = pair_groupoid(2);
    let mu = [1.0, 2.0];
    // arrow with r = first point, s = second point
    let x = (0..4).find(|&x| g.r(x) == 0 && g.s(x) == 1).unwrap();
    let nu = mu[g.r(x)] * 1.0;
    let nu_inv = mu[g.r(g.inv(x))] * 1.0;
    let oracle = nu / nu_inv;
    let library = radon_nikodym(&g, &counting_haar(&g), &mu).unwrap().d[x];
    let mut r = row("D(1←2) on pair2 with μ = (1, 2)", oracle, library, 0.5);
    r.pass = (oracle - 0.5).abs() < 1e-12 && (library - oracle).abs() < 1e-12;
    r
}

pub fn row_random_span() -> Row {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ms: Vec<Mat> = (0..50).map(|_| linalg::random_mat(&mut rng, 3, 3)).collect();
    let library = OperatorSpace::span(3, 3, &ms).unwrap().dim();
    row("span of 50 random 3×3 matrices", span_rank(&ms), library, 9)
}

pub fn row_leg_closed_under_products() -> Row {
    let gp = build(&pair_groupoid(2), &[1.0, 2.0]);
    let a = leg(&gp.pmu).unwrap();
    let basis = a.basis();
    let oracle = same_span(&basis, &products(&basis, &basis));
    let library = a.product(&a).unwrap().equality_residual(&a) < 1e-9;
    row("[A_V A_V] = A_V on pair2", oracle, library, true)
}

pub fn row_commutant() -> Row {
    let gp = build(&pair_groupoid(2), &[1.0, 2.0]);
    let rho = gp.pmu.betahat.rho_space();
    let oracle = commutant_dim(&rho.basis());
    let comm = rho.commutant().unwrap();
    let bicomm = comm.commutant().unwrap();
    let mut r = row("dim ρ_β̂(𝔅)' on pair2", oracle, comm.dim(), 8);
    r.pass &= bicomm.containment_residual(&rho) < 1e-9;
    r
}

pub fn row_random_unitary_not_morphism() -> Row {
    let gp = build(&pair_groupoid(2), &[1.0, 1.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = linalg::random_unitary(&mut rng, 4);
    let alpha = &gp.pmu.alpha;
    let moved: Vec<Mat> = alpha.basis().iter().map(|a| mul(&u, a)).collect();
    let oracle = same_span(alpha.basis(), &moved);
    let library = is_morphism(&u, alpha, alpha, 1e-8);
    row("random unitary preserves α on pair2", oracle, library, false)
}

pub fn row_triple_dims() -> Row {
    let gp = build(&cyclic_groupoid(3), &[1.0]);
    let gp2 = build(&pair_groupoid(2), &[1.0, 2.0]);
    let mut oracle = Vec::new();
    let mut library = Vec::new();
    for p in [&gp, &gp2] {
        let src = &p.pmu.src;
        let left = groupoid_pmu::cstar::rtp(&std::sync::Arc::new(src.lift_right(&p.pmu.betahat).unwrap()), &p.pmu.alpha).unwrap();
        let right = groupoid_pmu::cstar::rtp(&p.pmu.betahat, &std::sync::Arc::new(src.lift_left(&p.pmu.alpha).unwrap())).unwrap();
        oracle.push(composable_triples(&p.g));
        library.push((left.dim(), right.dim()));
    }
    let lib: Vec<usize> = library.iter().map(|&(a, _)| a).collect();
    let mut r = row("triple products on z3, pair2", format!("{oracle:?}"), format!("{lib:?}"), "[27, 16]");
    r.pass &= library.iter().all(|&(a, b)| a == b);
    r
}

pub fn row_unitarity_pair2() -> Row {
    let gp = build(&pair_groupoid(2), &[1.0, 2.0]);
    let v = &gp.pmu.v;
    let oracle = fro(&(mul(&adj(v), v) - linalg::eye(v.ncols()))) < 1e-12;
    let library = linalg::unitarity_defect(v) < 1e-12;
    row("V*V = Id on pair2 with μ = (1, 2)", oracle, library, true)
}

pub fn row_pentagon(name: &'static str, g: &FiniteGroupoid, mu: &[f64]) -> Row {
    let oracle = pentagon_oracle(g) < 1e-12;
    let gp = build(g, mu);
    let library = pentagon_residual(&gp.pmu).unwrap() < 1e-9 && verify_pmu(&gp.pmu, 1e-9).all_pass();
    row(name, oracle, library, true)
}

pub fn row_flip_fails() -> Row {
    let gp = build(&cyclic_groupoid(3), &[1.0]);
    let f = flip_counterexample(&gp.pmu).unwrap();
    let res = pentagon_residual(&f).unwrap();
    // the flip on ℓ²(G × G) fails the pentagon as a partial isometry too
    let g = &gp.g;
    let n = g.n_arrows();
    let mut sw = linalg::zeros(n * n, n * n);
    for x in 0..n {
        for y in 0..n {
            if g.s(x) == g.s(y) {
                sw[(y * n + x, x * n + y)] = c(1.0);
            }
        }
    }
    let id = linalg::eye(n);
    let (s12, s23) = (kron(&sw, &id), kron(&id, &sw));
    let oracle = fro(&(mul(&s12, &mul(&s23, &s12)) - mul(&s23, &s12))) > 1e-3;
    row("flip in place of V fails the pentagon on z3", oracle, res > 1e-3, true)
}

pub fn row_opposite() -> Row {
    let gp = build(&pair_groupoid(2), &[1.0, 2.0]);
    let op = opposite(&gp.pmu).unwrap();
    let oracle = same_span(&leg_hat(&op).unwrap().basis(), &leg(&gp.pmu).unwrap().adjoint().basis());
    let library = verify_pmu(&op, 1e-9).all_pass();
    row("V^op is a pseudo-multiplicative unitary and Â(V^op) = A_V*", oracle, library, true)
}

/// Permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn permutation_matrix(p: &[usize]) -> Mat {
    let mut m = linalg::zeros(p.len(), p.len());
    for (j, &i) in p.iter().enumerate() {
        m[(i, j)] = c(1.0);
    }
    m
}

/// Number of permutation unitaries intertwining the two unitaries.
pub fn intertwiner_search(a: &groupoid_pmu::pmu::Pmu, b: &groupoid_pmu::pmu::Pmu) -> usize {
    permutations(a.h)
        .iter()
        .filter(|p| isomorphism_residual(a, b, &permutation_matrix(p)).map(|r| r < 1e-9).unwrap_or(false))
        .count()
}

pub fn row_direct_sum_iso() -> Row {
    let (z2, u1) = (build(&cyclic_groupoid(2), &[1.0]), build(&unit_groupoid(1), &[1.0]));
    let sum = direct_sum(&[z2.pmu.clone(), u1.pmu.clone()]).unwrap();
    let du = build(&disjoint_union(&cyclic_groupoid(2), &unit_groupoid(1)), &[1.0, 1.0]);
    let found = intertwiner_search(&sum, &du.pmu);
    let library = isomorphism_residual(&sum, &du.pmu, &linalg::eye(3)).unwrap() < 1e-9;
    row("z2 ⊞ unit1 ≅ z2 ⊔ unit1", found > 0, library, true)
}

pub fn row_tensor_iso() -> Row {
    let z2 = build(&cyclic_groupoid(2), &[1.0]);
    let t = tensor(&z2.pmu, &z2.pmu).unwrap();
    let pr = build(&product(&cyclic_groupoid(2), &cyclic_groupoid(2)), &[1.0]);
    let found = intertwiner_search(&t, &pr.pmu);
    let library = isomorphism_residual(&t, &pr.pmu, &linalg::eye(4)).unwrap() < 1e-9;
    row("z2 ⊗ z2 ≅ z2 × z2", found > 0, library, true)
}

pub fn row_pair2_leg_dim() -> Row {
    let g = pair_groupoid(2);
    let gp = build(&g, &[1.0, 2.0]);
    row("dim A_V on pair2", span_rank(&translation_ops(&g)), leg(&gp.pmu).unwrap().dim(), 4)
}

pub fn row_unit_legs() -> Row {
    let n = 3;
    let gp = build(&unit_groupoid(n), &[1.0, 2.0, 3.0]);
    let diag: Vec<Mat> = (0..n).map(|i| linalg::unit(n, n, i, i)).collect();
    let (ah, a) = (leg_hat(&gp.pmu).unwrap(), leg(&gp.pmu).unwrap());
    let ok = same_span(&ah.basis(), &diag) && same_span(&a.basis(), &diag);
    let mut r = row("dim Â_V = dim A_V on unit3", span_rank(&diag), format!("{}", if ok { ah.dim() } else { 0 }), 3);
    r.pass &= a.dim() == 3;
    r
}

pub fn row_zoo_relations() -> Row {
    let all: Vec<_> = zoo().into_iter().filter(|(_, g)| g.n_arrows() <= 9).collect();
    let mut ok = true;
    let mut closed = true;
    for (_, g) in &all {
        let gp = build(g, &nonuniform(g));
        ok &= legs::verify_leg_relations(&gp.pmu, 1e-8).all_pass();
        let b = leg_hat(&gp.pmu).unwrap().basis();
        closed &= same_span(&b, &products(&b, &b));
    }
    row("leg relations on the zoo (|G| ≤ 9)", closed, ok, true)
}

/// `x|β⟩₁ ⊆ [|β⟩₁ A]` and `x|α⟩₂ ⊆ [|α⟩₂ A]` and the same for `x*`, by ranks.
fn fiber_product_oracle(x: &Mat, r: &groupoid_pmu::cstar::Rtp, a: &OperatorSpace) -> bool {
    let ab = a.basis();
    let mut ok = true;
    for side in [1, 2] {
        let kets: Vec<Mat> = if side == 1 {
            r.left.basis().iter().map(|b| r.ket1(b).unwrap()).collect()
        } else {
            r.right.basis().iter().map(|b| r.ket2(b).unwrap()).collect()
        };
        let span = products(&kets, &ab);
        for y in [x.clone(), adj(x)] {
            let moved: Vec<Mat> = kets.iter().map(|k| mul(&y, k)).collect();
            let both: Vec<Mat> = span.iter().chain(&moved).cloned().collect();
            ok &= span_rank(&both) == span_rank(&span);
        }
    }
    ok
}

pub fn row_delta_in_fiber_product() -> Row {
    let gp = build(&cyclic_groupoid(2), &[1.0]);
    let p = &gp.pmu;
    let a = leg(p).unwrap();
    let mut oracle = true;
    let mut library = true;
    for x in 0..2 {
        let ux = gp.conv(&legs::indicator(2, x));
        let d = p.delta(&ux).unwrap();
        oracle &= fiber_product_oracle(&d, &p.rng, &a);
        library &= in_fiber_product(&d, &p.rng, &a, &a, 1e-8).unwrap();
    }
    row("Δ(U_x) ∈ A_V ∗ A_V on z2", oracle, library, true)
}

pub fn row_junk_not_in_fiber_product() -> Row {
    let gp = build(&pair_groupoid(2), &[1.0, 1.0]);
    let p = &gp.pmu;
    let a = leg(p).unwrap();
    let sigma = groupoid_pmu::cstar::flip(&p.rng, &p.rng).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let junk = mul(&sigma, &linalg::random_mat(&mut rng, p.rng.dim(), p.rng.dim()));
    let oracle = fiber_product_oracle(&junk, &p.rng, &a);
    let library = in_fiber_product(&junk, &p.rng, &a, &a, 1e-8).unwrap();
    row("flip-conjugated junk ∈ A_V ∗ A_V on pair2", oracle, library, false)
}

pub fn row_coassociativity() -> Row {
    let gp = build(&cyclic_groupoid(4), &[1.0]);
    let good = verify_hopf(&gp.pmu, LegSide::Hat, 1e-9);
    let res = good.find("coassociativity").map(|c| c.residual).unwrap_or(f64::MAX);
    let bad = verify_hopf(&tamper(&gp.pmu, 0, 5), LegSide::Hat, 1e-9);
    let bad_res = bad.find("coassociativity").map(|c| c.residual).unwrap_or(f64::MAX);
    row("coassociativity on z4 holds, and fails once V is tampered", res < 1e-9, bad_res > 1e-6, true)
}

pub fn row_convolution() -> Row {
    let gp = build(&cyclic_groupoid(3), &[1.0]);
    let p = &gp.pmu;
    let ws = legs::spanning_hat_functionals(p);
    let mut worst: f64 = 0.0;
    let mut oracle_worst: f64 = 0.0;
    for w in &ws {
        for w2 in &ws {
            let lhs = mul(&pi_hat(p, w).unwrap(), &pi_hat(p, w2).unwrap());
            worst = worst.max(fro(&(pi_hat_convolution(p, w, w2).unwrap() - &lhs)));
            // both sides are diagonal multiplication operators on a group
            let off: f64 = (0..3).flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| lhs[(i, j)].norm()).sum();
            oracle_worst = oracle_worst.max(off);
        }
    }
    row("π̂(ω)π̂(ω') = π̂(ω∗ω') on z3", oracle_worst < 1e-12, worst < 1e-9, true)
}

/// `η₀ = Σ_u E_{1_u, u}` and `ξ₀ = Σ_x |G^{r(x)}|^{-1/2} E_{x, r(x)}`.
pub fn explicit_fixed_elements(gp: &GroupoidPmu) -> (Mat, Mat) {
    let g = &gp.g;
    let (n, k) = (g.n_arrows(), g.n_units());
    let mut eta = linalg::zeros(n, k);
    for u in 0..k {
        eta[(g.unit_arrow(u), u)] = c(1.0);
    }
    let mut xi = linalg::zeros(n, k);
    for x in 0..n {
        let fiber = (0..n).filter(|&y| g.r(y) == g.r(x)).count() as f64;
        xi[(x, g.r(x))] = c(1.0 / fiber.sqrt());
    }
    (eta, xi)
}

pub fn row_pair_fixed_elements() -> Row {
    let gp = build(&pair_groupoid(3), &[1.0, 1.0, 1.0]);
    let p = &gp.pmu;
    let (eta, xi) = explicit_fixed_elements(&gp);
    let id = linalg::eye(3);
    let eta_fixed = fro(&(mul(&p.v, &p.src.ket1(&eta).unwrap()) - p.rng.ket1(&eta).unwrap())) < 1e-9;
    let xi_fixed = fro(&(mul(&p.v, &p.src.ket2(&xi).unwrap()) - p.rng.ket2(&xi).unwrap())) < 1e-9;
    let oracle = eta_fixed && xi_fixed && fro(&(mul(&adj(&eta), &eta) - &id)) < 1e-12 && fro(&(mul(&adj(&xi), &xi) - &id)) < 1e-12;
    let library = is_etale(p, 1).unwrap() && is_proper(p, 1).unwrap();
    row("pair3 is étale and proper, with explicit η₀ and ξ₀", oracle, library, true)
}

pub fn row_group_flags() -> Row {
    let mut oracle = true;
    let mut library = true;
    for k in 2..=4 {
        let gp = build(&cyclic_groupoid(k), &[1.0]);
        let (eta, xi) = explicit_fixed_elements(&gp);
        let p = &gp.pmu;
        oracle &= fro(&(mul(&p.v, &p.src.ket1(&eta).unwrap()) - p.rng.ket1(&eta).unwrap())) < 1e-9;
        oracle &= fro(&(mul(&p.v, &p.src.ket2(&xi).unwrap()) - p.rng.ket2(&xi).unwrap())) < 1e-9;
        library &= is_etale(p, 2).unwrap() && is_proper(p, 2).unwrap() && is_compact(p, 2).unwrap();
    }
    row("z2, z3, z4 are étale, proper and compact", oracle, library, true)
}

pub fn row_haar_pair() -> Row {
    let gp = build(&pair_groupoid(2), &[1.0, 1.0]);
    let f: Vec<C64> = (0..4).map(|x| c(1.0 + x as f64)).collect();
    let (_, xi) = explicit_fixed_elements(&gp);
    let direct = mul(&adj(&xi), &mul(&linalg::diag(&f), &xi));
    let oracle: Vec<f64> = (0..2).map(|u| direct[(u, u)].re).collect();
    let cof = cofixed_space(&gp.pmu, 4).unwrap();
    let phi = haar_weight(&gp.pmu, cof.normalized.unwrap()).unwrap();
    let lib = phi.apply(&linalg::diag(&f));
    let library: Vec<f64> = (0..2).map(|u| lib[(u, u)].re).collect();
    let fmt = |v: &[f64]| format!("{:?}", v.iter().map(|x| (x * 1e9).round() / 1e9).collect::<Vec<_>>());
    row("φ_ξ₀(m(f)) on pair2, f(x) = 1 + index", fmt(&oracle), fmt(&library), "[1.5, 3.5]".to_string())
}

pub fn row_regular_reps() -> Row {
    let mut ok = true;
    let mut axioms = true;
    for (_, g) in zoo().into_iter().filter(|(_, g)| g.n_arrows() <= 9) {
        let gp = build(&g, &nonuniform(&g));
        let reg = regular_rep(&gp.pmu);
        ok &= verify_rep(&gp.pmu, &reg, 1e-8).all_pass();
        axioms &= verify_pmu(&gp.pmu, 1e-8).all_pass();
    }
    row("regular representation on the zoo (|G| ≤ 9)", axioms, ok, true)
}

pub fn row_tampered_rep() -> Row {
    let gp = build(&pair_groupoid(2), &[1.0, 2.0]);
    let reg = regular_rep(&gp.pmu);
    let mut bad = reg.clone();
    bad.x = tamper(&gp.pmu, 0, 3).v;
    let res = groupoid_pmu::frame::Pentagon::new(&gp.pmu, &bad).map(|p| p.residual()).unwrap_or(f64::MAX);
    let oracle = fro(&(&bad.x - &reg.x)) > 1e-3;
    row("tampered X fails the pentagon", oracle, res > 1e-3, true)
}

pub fn row_functor_f_passes() -> Row {
    let gp = build(&cyclic_groupoid(3), &[1.0]);
    let mut ok = true;
    let mut cocycles = true;
    for (_, b) in sample_bundles(&gp.g, 3) {
        cocycles &= b.cocycle_residual(&gp.g) < 1e-12;
        ok &= verify_corep(&gp.pmu, &corep_from_groupoid_rep(&gp, &b).unwrap(), 1e-9).all_pass();
    }
    row("F(bundle) passes the corepresentation axioms on z3", cocycles, ok, true)
}

pub fn row_tensor_legs() -> Row {
    let gp = build(&cyclic_groupoid(2), &[1.0]);
    let p = &gp.pmu;
    let reg = regular_rep(p);
    let one = trivial_rep(p).unwrap();
    let mut oracle = true;
    let mut library = true;
    for (x, y) in [(&reg, &reg), (&reg, &one), (&one, &reg)] {
        let z = rep_tensor(p, x, y).unwrap();
        let (_, az) = rep_legs(p, &z).unwrap();
        let (_, ax) = rep_legs(p, x).unwrap();
        let (_, ay) = rep_legs(p, y).unwrap();
        oracle &= same_span(&az.basis(), &products(&ax.basis(), &ay.basis()));
        library &= az.equality_residual(&ax.product(&ay).unwrap()) < 1e-9;
    }
    row("A_(X⊠Y) = [A_X A_Y] on z2", oracle, library, true)
}

/// `ρ_γ(b)` from `ρ_γ(b) ξ = ξ b` on a spanning set of `γ`, solved with an
/// SVD pseudo-inverse.
pub fn rho_oracle(gens: &[Mat], b: &Mat) -> Mat {
    let l = linalg::hcat(gens);
    let r = linalg::hcat(&gens.iter().map(|x| mul(x, b)).collect::<Vec<_>>());
    let pinv = l.clone().pseudo_inverse(1e-10).unwrap();
    mul(&r, &pinv)
}

/// `dim {b ∈ C(G⁰) : ρ_α(b) = ρ_β(b)}` by an SVD nullspace; `M(𝔅) ∩ M(𝔅†)`
/// is the diagonal algebra for a diagonal base.
pub fn end_trivial_oracle(gp: &GroupoidPmu) -> usize {
    let k = gp.g.n_units();
    let cols: Vec<Mat> = (0..k)
        .map(|u| {
            let e = linalg::unit(k, k, u, u);
            let d = rho_oracle(gp.pmu.alpha.basis(), &e) - rho_oracle(gp.pmu.beta.basis(), &e);
            Mat::from_column_slice(d.len(), 1, d.as_slice())
        })
        .collect();
    k - svd_rank(&linalg::hcat(&cols))
}

pub fn row_end_trivial_pair() -> Row {
    let g = pair_groupoid(3);
    let gp = build(&g, &[1.0, 2.0, 0.5]);
    let library = end_trivial(&gp.pmu).unwrap().dim();
    let mut r = row("dim End(𝟙) on pair3", end_trivial_oracle(&gp), library, 3);
    r.note = Some("spec text says scalars (dim 1); with ρ_α = ρ_β = r* every b ∈ C(G⁰) is an endomorphism");
    r
}

pub fn row_end_trivial_unit() -> Row {
    let g = unit_groupoid(4);
    let gp = build(&g, &[1.0, 2.0, 3.0, 4.0]);
    row("dim End(𝟙) on unit4", end_trivial_oracle(&gp), end_trivial(&gp.pmu).unwrap().dim(), 4)
}

pub fn row_left_regular_iso() -> Row {
    let gp = build(&pair_groupoid(2), &[1.0, 2.0]);
    let c = corep_from_groupoid_rep(&gp, &GroupoidRep::left_regular(&gp.g)).unwrap();
    let reg = Corep::regular(&gp.pmu);
    let res = corep_iso_residual(&c, &reg, 1).unwrap();
    let oracle = corep_morphisms(&c, &reg).unwrap().dim() > 0 && c.k() == reg.k();
    row("F(left regular) ≅ regular corepresentation on pair2", oracle, res.map(|r| r < 1e-9).unwrap_or(false), true)
}

pub fn row_characters() -> Row {
    let n = 4;
    let gp = build(&cyclic_groupoid(n), &[1.0]);
    // (1/n) Σ_k χ_i(k) conj χ_j(k), rounded
    let chi = |i: usize, k: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (i * k) as f64 / n as f64);
    let oracle: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).map(|j| ((0..n).map(|k| chi(i, k) * chi(j, k).conj()).sum::<C64>() / n as f64).norm().round() as usize).collect())
        .collect();
    let library = character_hom_dims(&gp).unwrap();
    let id: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| usize::from(i == j)).collect()).collect();
    row("dim Hom(χ_i, χ_j) on z4", format!("{oracle:?}"), format!("{library:?}"), format!("{id:?}"))
}

pub fn row_cli_verify_pair3() -> Row {
    let t = Target::builtin("pair3").unwrap();
    let r = cmd_verify(&t, Options::default()).unwrap();
    let oracle = pentagon_oracle(&pair_groupoid(3)) < 1e-12;
    row("`verify builtin:pair3` passes", oracle, r.all_pass(), true)
}

pub fn row_cli_legs_z2() -> Row {
    let t = Target::builtin("z2").unwrap();
    let r = cmd_legs(&t, Options::default()).unwrap();
    let g = cyclic_groupoid(2);
    let oracle = (g.n_arrows(), span_rank(&translation_ops(&g)));
    let library = (r.values["dim_Ahat"] as usize, r.values["dim_A"] as usize);
    row("`legs builtin:z2` dims (dim_Ahat, dim_A)", format!("{oracle:?}"), format!("{library:?}"), "(2, 2)")
}

pub fn row_hopf_zoo() -> Row {
    let mut ok = true;
    let mut closed = true;
    for (_, g) in zoo().into_iter().filter(|(_, g)| g.n_arrows() <= 6) {
        let gp = build(&g, &nonuniform(&g));
        ok &= verify_hopf(&gp.pmu, LegSide::Hat, 1e-8).all_pass();
        let b = leg_hat(&gp.pmu).unwrap().basis();
        let star: Vec<Mat> = b.iter().map(adj).collect();
        closed &= same_span(&b, &star) && same_span(&b, &products(&b, &b));
    }
    row("Â_V is a Hopf C*-bimodule on the zoo (|G| ≤ 6)", closed, ok, true)
}

/// Every oracle row.
pub fn all_rows() -> Vec<Row> {
    vec![
        row_counting_haar(),
        row_radon_nikodym(),
        row_random_span(),
        row_leg_closed_under_products(),
        row_commutant(),
        row_hopf_zoo(),
        row_random_unitary_not_morphism(),
        row_triple_dims(),
        row_unitarity_pair2(),
        row_pentagon("pentagon on pair3", &pair_groupoid(3), &[1.0, 2.0, 0.5]),
        row_pentagon("pentagon on z4", &cyclic_groupoid(4), &[1.0]),
        row_flip_fails(),
        row_opposite(),
        row_direct_sum_iso(),
        row_tensor_iso(),
        row_pair2_leg_dim(),
        row_unit_legs(),
        row_zoo_relations(),
        row_delta_in_fiber_product(),
        row_junk_not_in_fiber_product(),
        row_coassociativity(),
        row_convolution(),
        row_pair_fixed_elements(),
        row_group_flags(),
        row_haar_pair(),
        row_regular_reps(),
        row_tampered_rep(),
        row_functor_f_passes(),
        row_tensor_legs(),
        row_end_trivial_pair(),
        row_end_trivial_unit(),
        row_left_regular_iso(),
        row_characters(),
        row_cli_verify_pair3(),
        row_cli_legs_z2(),
    ]
}

/// Random `ξ ∈ C(G)`.
pub fn random_fn(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

pub fn functional(l: Mat, r: Mat) -> Functional {
    Functional::single(l, r)
}
