//! Targets and suite runners behind the `gpmu` command.

use crate::error::{Error, Result};
use crate::fixedpoints::{verify_fixed, verify_groupoid_fixed};
use crate::groupoid::{counting_haar, cyclic_groupoid, disjoint_union, left_invariance_residual, pair_groupoid, product, unit_groupoid, FiniteGroupoid, HaarSystem};
use crate::legs::{regularity_residual, verify_groupoid_legs, verify_hopf, verify_leg_relations, verify_pairing, LegSide};
use crate::linalg;
use crate::pmu::{direct_sum, groupoid_pmu, isomorphism_residual, tamper, tensor, verify_pmu, GroupoidPmu};
use crate::report::Report;
use crate::reps::{verify_groupoid_reps, verify_reps};
use crate::specfile::parse_spec;

/// Largest `|G|` accepted for builtins; keeps every suite at desk scale.
pub const MAX_BUILTIN_ARROWS: usize = 36;

#[derive(Clone, Debug)]
enum Shape {
    Atom,
    Sum(Box<Target>, Box<Target>),
    Prod(Box<Target>, Box<Target>),
}

/// A groupoid with Haar system and measure, plus how it was assembled.
#[derive(Clone, Debug)]
pub struct Target {
    pub name: String,
    pub groupoid: FiniteGroupoid,
    pub haar: HaarSystem,
    pub mu: Vec<f64>,
    shape: Shape,
    measure_overridden: bool,
}

impl Target {
    fn atom(name: &str, g: FiniteGroupoid) -> Target {
        Target {
            name: name.to_string(),
            haar: counting_haar(&g),
            mu: vec![1.0; g.n_units()],
            groupoid: g,
            shape: Shape::Atom,
            measure_overridden: false,
        }
    }

    /// `unit{n}`, `pair{n}`, `z{n}`, `dsum:<a>,<b>` and `prod:<a>,<b>`.
    /// Composite arguments split at the first comma, so nesting goes to
    /// the right: `dsum:z2,prod:pair2,z2`.
    pub fn builtin(name: &str) -> Result<Target> {
        let unknown = || Error::InvalidGroupoid(format!("unknown builtin `{name}`"));
        let t = if let Some(rest) = name.strip_prefix("dsum:").or_else(|| name.strip_prefix("prod:")) {
            let (a, b) = rest.split_once(',').ok_or_else(unknown)?;
            let (a, b) = (Target::builtin(a)?, Target::builtin(b)?);
            if name.starts_with("dsum:") {
                let mut t = Target::atom(name, disjoint_union(&a.groupoid, &b.groupoid));
                t.mu = a.mu.iter().chain(&b.mu).cloned().collect();
                t.haar.weight = a.haar.weight.iter().chain(&b.haar.weight).cloned().collect();
                t.shape = Shape::Sum(Box::new(a), Box::new(b));
                t
            } else {
                let mut t = Target::atom(name, product(&a.groupoid, &b.groupoid));
                t.mu = a.mu.iter().flat_map(|x| b.mu.iter().map(move |y| x * y)).collect();
                t.haar.weight = a.haar.weight.iter().flat_map(|x| b.haar.weight.iter().map(move |y| x * y)).collect();
                t.shape = Shape::Prod(Box::new(a), Box::new(b));
                t
            }
        } else {
            let split = name.find(|c: char| c.is_ascii_digit()).ok_or_else(unknown)?;
            let n: usize = name[split..].parse().map_err(|_| unknown())?;
            if n == 0 {
                return Err(Error::InvalidGroupoid(format!("`{name}` has no units")));
            }
            let g = match &name[..split] {
                "unit" => unit_groupoid(n),
                "pair" => pair_groupoid(n),
                "z" => cyclic_groupoid(n),
                _ => return Err(unknown()),
            };
            Target::atom(name, g)
        };
        if t.groupoid.n_arrows() > MAX_BUILTIN_ARROWS {
            return Err(Error::InvalidGroupoid(format!("`{name}` has {} arrows, more than {MAX_BUILTIN_ARROWS}", t.groupoid.n_arrows())));
        }
        Ok(t)
    }

    /// A groupoid from the text of a spec file.
    pub fn from_spec(name: &str, text: &str) -> Result<Target> {
        let spec = parse_spec(text)?;
        let mut t = Target::atom(name, spec.groupoid);
        t.haar = spec.haar;
        t.mu = spec.mu;
        Ok(t)
    }

    /// Applies `u=w,...`; units are matched by label, then by index.
    pub fn override_measure(&mut self, arg: &str) -> Result<()> {
        let g = &self.groupoid;
        for item in arg.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let bad = |msg: &str| Error::InvalidGroupoid(format!("measure override `{item}`: {msg}"));
            let (u, w) = item.split_once('=').ok_or_else(|| bad("expected `unit=weight`"))?;
            let (u, w) = (u.trim(), w.trim());
            let idx = g
                .unit_labels()
                .iter()
                .position(|l| l == u)
                .or_else(|| u.parse::<usize>().ok().filter(|&i| i < g.n_units()))
                .ok_or_else(|| bad("unknown unit"))?;
            let w: f64 = w.parse().map_err(|_| bad("weight is not a number"))?;
            if !(w > 0.0 && w.is_finite()) {
                return Err(bad("weight must be positive"));
            }
            self.mu[idx] = w;
            self.measure_overridden = true;
        }
        Ok(())
    }

    pub fn build(&self) -> Result<GroupoidPmu> {
        groupoid_pmu(&self.groupoid, &self.haar, &self.mu)
    }
}

/// Per-command options.
#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub tol: f64,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Options {
        Options { tol: 1e-8, seed: 0 }
    }
}

/// Appends `other`'s checks under `"<suite>: "` and its values unprefixed.
fn merge(into: &mut Report, other: Report) {
    let values = other.values.clone();
    let prefix = format!("{}: ", other.suite);
    let mut other = other;
    other.values.clear();
    into.absorb(&prefix, other);
    into.values.extend(values);
}

/// Axioms of the unitary, and cross-checks of its construction.
pub fn cmd_verify(t: &Target, o: Options) -> Result<Report> {
    let gp = t.build()?;
    let p = &gp.pmu;
    let mut r = Report::new("verify", o.tol);
    merge(&mut r, verify_pmu(p, o.tol));

    let mut x = Report::new("construction", o.tol);
    x.residual("λ left invariant", left_invariance_residual(&gp.g, &gp.lambda), "groupoid");
    x.residual("D(xy) = D(x)D(y)", gp.q.cocycle_residual(&gp.g), "groupoid");
    for (name, m) in [("α", &p.alpha), ("β", &p.beta), ("β̂", &p.betahat)] {
        x.residual(format!("{name} module axioms"), m.axiom_residuals().into_iter().fold(0.0, f64::max), "module");
    }
    x.count("dim H β̂⊗α H = |G s×r G|", p.src.dim(), gp.g.composable_pairs().len(), "cross-validation");
    x.count("dim H α⊗β H = |G r×r G|", p.rng.dim(), gp.g.range_pairs().len(), "cross-validation");
    x.attempt("Gram quotient agrees with the groupoid identification", gp.fast_path_residual(), "cross-validation");
    if p.v.ncols() >= 2 {
        let bad = verify_pmu(&tamper(p, 0, p.v.ncols() - 1), o.tol);
        x.flag("tampered V is rejected", !bad.all_pass(), "pmu");
    }
    if !t.measure_overridden {
        match &t.shape {
            Shape::Atom => {}
            Shape::Sum(a, b) => {
                let res = direct_sum(&[a.build()?.pmu, b.build()?.pmu]).and_then(|s| isomorphism_residual(&s, p, &linalg::eye(p.h)));
                x.attempt("V(G ⊔ G') ≅ V(G) ⊞ V(G')", res, "cross-validation");
            }
            Shape::Prod(a, b) => {
                let res = tensor(&a.build()?.pmu, &b.build()?.pmu).and_then(|s| isomorphism_residual(&s, p, &linalg::eye(p.h)));
                x.attempt("V(G × G') ≅ V(G) ⊗ V(G')", res, "cross-validation");
            }
        }
    }
    merge(&mut r, x);
    Ok(r)
}

/// Legs, their relations, regularity and the duality pairing.
pub fn cmd_legs(t: &Target, o: Options) -> Result<Report> {
    let gp = t.build()?;
    let p = &gp.pmu;
    let mut r = Report::new("legs", o.tol);
    merge(&mut r, verify_groupoid_legs(&gp, o.tol, o.seed));
    merge(&mut r, verify_leg_relations(p, o.tol));
    r.attempt("regularity: C_V = [αα*]", regularity_residual(p), "regularity");
    merge(&mut r, verify_pairing(p, o.tol, o.seed));
    Ok(r)
}

pub fn cmd_hopf(t: &Target, o: Options) -> Result<Report> {
    let gp = t.build()?;
    let mut r = Report::new("hopf", o.tol);
    merge(&mut r, verify_hopf(&gp.pmu, LegSide::Hat, o.tol));
    merge(&mut r, verify_hopf(&gp.pmu, LegSide::Plain, o.tol));
    Ok(r)
}

pub fn cmd_fixed(t: &Target, o: Options) -> Result<Report> {
    let gp = t.build()?;
    let mut r = Report::new("fixed", o.tol);
    merge(&mut r, verify_fixed(&gp.pmu, o.tol, o.seed));
    merge(&mut r, verify_groupoid_fixed(&gp, o.tol, o.seed));
    Ok(r)
}

pub fn cmd_reps(t: &Target, o: Options) -> Result<Report> {
    let gp = t.build()?;
    let mut r = Report::new("reps", o.tol);
    merge(&mut r, verify_reps(&gp.pmu, o.tol, o.seed));
    merge(&mut r, verify_groupoid_reps(&gp, o.tol, o.seed));
    Ok(r)
}

pub fn cmd_all(t: &Target, o: Options) -> Result<Report> {
    let mut r = Report::new("all", o.tol);
    for sub in [cmd_verify(t, o)?, cmd_legs(t, o)?, cmd_hopf(t, o)?, cmd_fixed(t, o)?, cmd_reps(t, o)?] {
        merge(&mut r, sub);
    }
    Ok(r)
}
