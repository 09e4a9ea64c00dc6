//! Finite groupoids, Haar systems and quasi-invariant measures.

use crate::error::{Error, Result};

/// A finite groupoid with integer-indexed units and arrows.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGroupoid {
    unit_labels: Vec<String>,
    arrow_labels: Vec<String>,
    src: Vec<usize>,
    tgt: Vec<usize>,
    /// Dense composition table, `comp[x * n + y]` for `s(x) = r(y)`.
    comp: Vec<Option<usize>>,
    inv: Vec<usize>,
    unit_arrow: Vec<usize>,
}

/// Raw data accepted by [`make_groupoid`].
#[derive(Clone, Debug, Default)]
pub struct GroupoidData {
    pub units: Vec<String>,
    pub arrows: Vec<String>,
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    /// Triples `(x, y, xy)`.
    pub comp: Vec<(usize, usize, usize)>,
    pub inv: Vec<usize>,
}

fn bad<T>(msg: String) -> Result<T> {
    Err(Error::InvalidGroupoid(msg))
}

/// Validates groupoid data and returns the groupoid.
pub fn make_groupoid(data: GroupoidData) -> Result<FiniteGroupoid> {
    let GroupoidData { units, arrows, src, tgt, comp: triples, inv } = data;
    let n = arrows.len();
    let k = units.len();
    if src.len() != n || tgt.len() != n || inv.len() != n {
        return bad("src, tgt and inv must be defined on every arrow".into());
    }
    if let Some(x) = (0..n).find(|&x| src[x] >= k || tgt[x] >= k) {
        return bad(format!("arrow {} has an unknown source or range", arrows[x]));
    }
    if let Some(x) = (0..n).find(|&x| inv[x] >= n) {
        return bad(format!("inverse of {} is not an arrow", arrows[x]));
    }
    let mut comp = vec![None; n * n];
    for &(x, y, z) in &triples {
        if x >= n || y >= n || z >= n {
            return bad("composition refers to an unknown arrow".into());
        }
        if src[x] != tgt[y] {
            return bad(format!("{} . {} defined but s(x) != r(y)", arrows[x], arrows[y]));
        }
        if let Some(old) = comp[x * n + y] {
            if old != z {
                return bad(format!("{} . {} defined twice", arrows[x], arrows[y]));
            }
        }
        comp[x * n + y] = Some(z);
    }
    for x in 0..n {
        for y in 0..n {
            if src[x] == tgt[y] {
                match comp[x * n + y] {
                    None => return bad(format!("{} . {} missing", arrows[x], arrows[y])),
                    Some(z) => {
                        if tgt[z] != tgt[x] {
                            return bad(format!("r({}.{}) != r({})", arrows[x], arrows[y], arrows[x]));
                        }
                        if src[z] != src[y] {
                            return bad(format!("s({}.{}) != s({})", arrows[x], arrows[y], arrows[y]));
                        }
                    }
                }
            }
        }
    }
    let c = |x: usize, y: usize| comp[x * n + y];
    for x in 0..n {
        for y in 0..n {
            let Some(xy) = c(x, y) else { continue };
            for z in 0..n {
                let Some(yz) = c(y, z) else { continue };
                if c(xy, z) != c(x, yz) {
                    return bad(format!(
                        "associativity fails on ({}, {}, {})",
                        arrows[x], arrows[y], arrows[z]
                    ));
                }
            }
        }
    }
    let mut unit_arrow = Vec::with_capacity(k);
    for u in 0..k {
        let cand = (0..n).find(|&e| {
            src[e] == u
                && tgt[e] == u
                && (0..n).all(|y| tgt[y] != u || c(e, y) == Some(y))
                && (0..n).all(|y| src[y] != u || c(y, e) == Some(y))
        });
        match cand {
            Some(e) => unit_arrow.push(e),
            None => return bad(format!("unit {} has no neutral arrow", units[u])),
        }
    }
    for x in 0..n {
        let y = inv[x];
        if src[y] != tgt[x] || tgt[y] != src[x] {
            return bad(format!("inverse of {} has the wrong endpoints", arrows[x]));
        }
        if c(y, x) != Some(unit_arrow[src[x]]) || c(x, y) != Some(unit_arrow[tgt[x]]) {
            return bad(format!("inverse of {} is not two-sided", arrows[x]));
        }
    }
    Ok(FiniteGroupoid { unit_labels: units, arrow_labels: arrows, src, tgt, comp, inv, unit_arrow })
}

impl FiniteGroupoid {
    pub fn n_units(&self) -> usize {
        self.unit_labels.len()
    }

    pub fn n_arrows(&self) -> usize {
        self.arrow_labels.len()
    }

    pub fn unit_label(&self, u: usize) -> &str {
        &self.unit_labels[u]
    }

    pub fn arrow_label(&self, x: usize) -> &str {
        &self.arrow_labels[x]
    }

    pub fn unit_labels(&self) -> &[String] {
        &self.unit_labels
    }

    pub fn arrow_labels(&self) -> &[String] {
        &self.arrow_labels
    }

    /// Source map `s`.
    pub fn s(&self, x: usize) -> usize {
        self.src[x]
    }

    /// Range map `r`.
    pub fn r(&self, x: usize) -> usize {
        self.tgt[x]
    }

    pub fn comp(&self, x: usize, y: usize) -> Option<usize> {
        self.comp[x * self.n_arrows() + y]
    }

    /// `xy`, panicking on non-composable pairs.
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.comp(x, y).expect("arrows not composable")
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inv[x]
    }

    pub fn unit_arrow(&self, u: usize) -> usize {
        self.unit_arrow[u]
    }

    pub fn is_unit_arrow(&self, x: usize) -> bool {
        self.unit_arrow[self.tgt[x]] == x
    }

    /// `G^u = r⁻¹(u)`.
    pub fn range_fiber(&self, u: usize) -> Vec<usize> {
        (0..self.n_arrows()).filter(|&x| self.tgt[x] == u).collect()
    }

    /// `G_u = s⁻¹(u)`.
    pub fn source_fiber(&self, u: usize) -> Vec<usize> {
        (0..self.n_arrows()).filter(|&x| self.src[x] == u).collect()
    }

    /// Pairs `(x, y)` with `s(x) = r(y)`, row-major.
    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n_arrows();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if self.src[x] == self.tgt[y] {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Pairs `(x, y)` with `r(x) = r(y)`, row-major.
    pub fn range_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n_arrows();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if self.tgt[x] == self.tgt[y] {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        let k = self.n_units();
        (0..k).all(|u| (0..k).all(|v| (0..self.n_arrows()).any(|x| self.tgt[x] == u && self.src[x] == v)))
    }

    /// True when every arrow is a unit arrow.
    pub fn is_unit_space(&self) -> bool {
        (0..self.n_arrows()).all(|x| self.is_unit_arrow(x))
    }

    /// The underlying data, e.g. for re-validation.
    pub fn data(&self) -> GroupoidData {
        let n = self.n_arrows();
        let mut comp = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if let Some(z) = self.comp(x, y) {
                    comp.push((x, y, z));
                }
            }
        }
        GroupoidData {
            units: self.unit_labels.clone(),
            arrows: self.arrow_labels.clone(),
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            comp,
            inv: self.inv.clone(),
        }
    }
}

/// Left Haar system: `weight[x] = λ^{r(x)}({x})`.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarSystem {
    pub weight: Vec<f64>,
}

pub fn counting_haar(g: &FiniteGroupoid) -> HaarSystem {
    HaarSystem { weight: vec![1.0; g.n_arrows()] }
}

/// Largest violation of left invariance, by direct summation against
/// every indicator function on `G^{r(x)}`.
pub fn left_invariance_residual(g: &FiniteGroupoid, lambda: &HaarSystem) -> f64 {
    let n = g.n_arrows();
    let mut worst: f64 = 0.0;
    for x in 0..n {
        for z in g.range_fiber(g.r(x)) {
            // g = δ_z
            let lhs: f64 = g
                .range_fiber(g.s(x))
                .into_iter()
                .filter(|&y| g.mul(x, y) == z)
                .map(|y| lambda.weight[y])
                .sum();
            let rhs = lambda.weight[z];
            worst = worst.max((lhs - rhs).abs());
        }
    }
    worst
}

pub fn verify_left_invariance(g: &FiniteGroupoid, lambda: &HaarSystem) -> bool {
    left_invariance_residual(g, lambda) <= 1e-12
}

/// `μ`, together with `ν = μ∘r · λ`, `ν⁻¹` and `D = ν / ν⁻¹`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiInvariantMeasure {
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub nu_inv: Vec<f64>,
    pub d: Vec<f64>,
}

pub fn radon_nikodym(g: &FiniteGroupoid, lambda: &HaarSystem, mu: &[f64]) -> Result<QuasiInvariantMeasure> {
    if mu.len() != g.n_units() {
        return Err(Error::ShapeMismatch(format!("measure has {} weights for {} units", mu.len(), g.n_units())));
    }
    if lambda.weight.len() != g.n_arrows() {
        return Err(Error::ShapeMismatch("Haar system size".into()));
    }
    if let Some(u) = (0..mu.len()).find(|&u| !(mu[u] > 0.0) || !mu[u].is_finite()) {
        return Err(Error::NotQuasiInvariant(format!("μ({}) = {}", g.unit_label(u), mu[u])));
    }
    if let Some(x) = (0..g.n_arrows()).find(|&x| !(lambda.weight[x] > 0.0)) {
        return Err(Error::NotQuasiInvariant(format!("λ({}) = {}", g.arrow_label(x), lambda.weight[x])));
    }
    let n = g.n_arrows();
    let nu: Vec<f64> = (0..n).map(|x| mu[g.r(x)] * lambda.weight[x]).collect();
    let nu_inv: Vec<f64> = (0..n).map(|x| nu[g.inv(x)]).collect();
    let d: Vec<f64> = (0..n).map(|x| nu[x] / nu_inv[x]).collect();
    let q = QuasiInvariantMeasure { mu: mu.to_vec(), nu, nu_inv, d };
    let res = q.cocycle_residual(g);
    if res > 1e-12 {
        return Err(Error::CocycleViolation(format!("D is not multiplicative (residual {res:.3e})")));
    }
    Ok(q)
}

impl QuasiInvariantMeasure {
    /// Largest relative deviation from `D(x)D(y) = D(xy)`.
    pub fn cocycle_residual(&self, g: &FiniteGroupoid) -> f64 {
        g.composable_pairs()
            .into_iter()
            .map(|(x, y)| {
                let z = g.mul(x, y);
                (self.d[x] * self.d[y] - self.d[z]).abs() / self.d[z]
            })
            .fold(0.0, f64::max)
    }
}

/// All arrows `i <- j` on `n` points; arrow `(i, j)` has index `i * n + j`.
pub fn pair_groupoid(n: usize) -> FiniteGroupoid {
    let mut d = GroupoidData {
        units: (0..n).map(|i| i.to_string()).collect(),
        ..Default::default()
    };
    for i in 0..n {
        for j in 0..n {
            d.arrows.push(format!("({i},{j})"));
            d.tgt.push(i);
            d.src.push(j);
            d.inv.push(j * n + i);
        }
    }
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                d.comp.push((i * n + j, j * n + l, i * n + l));
            }
        }
    }
    make_groupoid(d).expect("pair groupoid is valid")
}

/// Only unit arrows.
pub fn unit_groupoid(n: usize) -> FiniteGroupoid {
    let d = GroupoidData {
        units: (0..n).map(|i| i.to_string()).collect(),
        arrows: (0..n).map(|i| format!("e{i}")).collect(),
        src: (0..n).collect(),
        tgt: (0..n).collect(),
        comp: (0..n).map(|i| (i, i, i)).collect(),
        inv: (0..n).collect(),
    };
    make_groupoid(d).expect("unit groupoid is valid")
}

/// A group as a one-unit groupoid, from its Cayley table.
pub fn group_groupoid(cayley: &[Vec<usize>]) -> Result<FiniteGroupoid> {
    let n = cayley.len();
    if cayley.iter().any(|row| row.len() != n) {
        return bad("Cayley table is not square".into());
    }
    let e = (0..n)
        .find(|&e| (0..n).all(|g| cayley[e][g] == g && cayley[g][e] == g))
        .ok_or_else(|| Error::InvalidGroupoid("Cayley table has no identity".into()))?;
    let mut inv = Vec::with_capacity(n);
    for g in 0..n {
        match (0..n).find(|&h| cayley[g][h] == e) {
            Some(h) => inv.push(h),
            None => return bad(format!("element {g} has no inverse")),
        }
    }
    let mut comp = Vec::new();
    for g in 0..n {
        for h in 0..n {
            comp.push((g, h, cayley[g][h]));
        }
    }
    make_groupoid(GroupoidData {
        units: vec!["*".into()],
        arrows: (0..n).map(|g| format!("g{g}")).collect(),
        src: vec![0; n],
        tgt: vec![0; n],
        comp,
        inv,
    })
}

pub fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()
}

/// ℤ/n as a groupoid.
pub fn cyclic_groupoid(n: usize) -> FiniteGroupoid {
    group_groupoid(&cyclic_table(n)).expect("cyclic group is valid")
}

/// The action groupoid `Γ ⋉ X`: arrow `(g, x)` goes from `x` to `g·x` and has
/// index `g * |X| + x`. `action[g][x]` is `g·x`.
pub fn transformation_groupoid(cayley: &[Vec<usize>], action: &[Vec<usize>], set_size: usize) -> Result<FiniteGroupoid> {
    let grp = group_groupoid(cayley)?;
    let m = cayley.len();
    if action.len() != m || action.iter().any(|p| p.len() != set_size || p.iter().any(|&v| v >= set_size)) {
        return bad("action table has the wrong shape".into());
    }
    for g in 0..m {
        for h in 0..m {
            for x in 0..set_size {
                if action[cayley[g][h]][x] != action[g][action[h][x]] {
                    return bad("action is not a homomorphism".into());
                }
            }
        }
    }
    let e = grp.unit_arrow(0);
    if (0..set_size).any(|x| action[e][x] != x) {
        return bad("identity does not act trivially".into());
    }
    let idx = |g: usize, x: usize| g * set_size + x;
    let mut d = GroupoidData { units: (0..set_size).map(|x| x.to_string()).collect(), ..Default::default() };
    for g in 0..m {
        for x in 0..set_size {
            d.arrows.push(format!("(g{g},{x})"));
            d.src.push(x);
            d.tgt.push(action[g][x]);
            d.inv.push(idx(grp.inv(g), action[g][x]));
        }
    }
    for g in 0..m {
        for h in 0..m {
            for x in 0..set_size {
                // (g, h·x)(h, x) = (gh, x)
                d.comp.push((idx(g, action[h][x]), idx(h, x), idx(cayley[g][h], x)));
            }
        }
    }
    make_groupoid(d)
}

/// `G₁ ⊔ G₂`, units and arrows of `G₁` first, labels prefixed `L.`/`R.`.
pub fn disjoint_union(a: &FiniteGroupoid, b: &FiniteGroupoid) -> FiniteGroupoid {
    let (da, db) = (a.data(), b.data());
    let (ka, na) = (a.n_units(), a.n_arrows());
    let mut d = GroupoidData::default();
    d.units.extend(da.units.iter().map(|u| format!("L.{u}")));
    d.units.extend(db.units.iter().map(|u| format!("R.{u}")));
    d.arrows.extend(da.arrows.iter().map(|u| format!("L.{u}")));
    d.arrows.extend(db.arrows.iter().map(|u| format!("R.{u}")));
    d.src = da.src.iter().cloned().chain(db.src.iter().map(|s| s + ka)).collect();
    d.tgt = da.tgt.iter().cloned().chain(db.tgt.iter().map(|s| s + ka)).collect();
    d.inv = da.inv.iter().cloned().chain(db.inv.iter().map(|s| s + na)).collect();
    d.comp = da.comp.clone();
    d.comp.extend(db.comp.iter().map(|&(x, y, z)| (x + na, y + na, z + na)));
    make_groupoid(d).expect("disjoint union of groupoids is a groupoid")
}

/// `G₁ × G₂`; unit `(u, v)` has index `u * |G₂⁰| + v` and arrow `(x, y)`
/// index `x * |G₂| + y`, matching Kronecker order.
pub fn product(a: &FiniteGroupoid, b: &FiniteGroupoid) -> FiniteGroupoid {
    let (kb, nb) = (b.n_units(), b.n_arrows());
    let mut d = GroupoidData::default();
    for u in a.unit_labels() {
        for v in b.unit_labels() {
            d.units.push(format!("({u},{v})"));
        }
    }
    for x in 0..a.n_arrows() {
        for y in 0..nb {
            d.arrows.push(format!("({},{})", a.arrow_label(x), b.arrow_label(y)));
            d.src.push(a.s(x) * kb + b.s(y));
            d.tgt.push(a.r(x) * kb + b.r(y));
            d.inv.push(a.inv(x) * nb + b.inv(y));
        }
    }
    for (x1, x2) in a.composable_pairs() {
        for (y1, y2) in b.composable_pairs() {
            d.comp.push((x1 * nb + y1, x2 * nb + y2, a.mul(x1, x2) * nb + b.mul(y1, y2)));
        }
    }
    make_groupoid(d).expect("product of groupoids is a groupoid")
}
