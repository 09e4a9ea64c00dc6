//! One line per acceptance criterion. Exits nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{all_rows, build, nonuniform, zoo};
use groupoid_pmu::fixedpoints::{cofixed_space, fixed_space, is_compact, is_etale, is_proper, verify_fixed, verify_groupoid_fixed};
use groupoid_pmu::groupoid::{cyclic_groupoid, pair_groupoid, FiniteGroupoid};
use groupoid_pmu::legs::{leg, leg_hat, pairing_ranks, regularity_residual, verify_groupoid_legs, verify_hopf, verify_leg_relations, verify_pairing, LegSide};
use groupoid_pmu::pmu::{verify_pmu, GroupoidPmu};
use groupoid_pmu::report::Report;
use groupoid_pmu::reps::{character_hom_dims, round_trip_residuals, sample_bundles};

const TOL: f64 = 1e-8;
const TIGHT: f64 = 1e-9;
const SEED: u64 = 7;

type Outcome = Result<String, String>;

/// Both measures for every zoo member.
fn zoo_builds() -> Vec<(String, GroupoidPmu)> {
    let mut out = Vec::new();
    for (name, g) in zoo() {
        out.push((format!("{name} uniform"), build(&g, &vec![1.0; g.n_units()])));
        out.push((format!("{name} non-uniform"), build(&g, &nonuniform(&g))));
    }
    out
}

fn first_failure(r: &Report) -> String {
    r.checks.iter().find(|c| !c.pass).map(|c| c.name.clone()).unwrap_or_default()
}

fn require(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn pentagon_and_axioms(builds: &[(String, GroupoidPmu)]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (name, gp) in builds {
        let r = verify_pmu(&gp.pmu, TOL);
        require(r.all_pass(), || format!("{name}: {}", first_failure(&r)))?;
        worst = worst.max(r.max_residual());
    }
    require(worst < TOL, || format!("max residual {worst:.3e}"))?;
    Ok(format!("{} unitaries, max residual {worst:.3e}", builds.len()))
}

/// `dim C*_r` of the named zoo member, from its family.
fn expected_dim_a(name: &str, g: &FiniteGroupoid) -> usize {
    let n = |p: &str| name.strip_prefix(p).and_then(|s| s.parse::<usize>().ok());
    if let Some(k) = n("pair") {
        k * k
    } else if let Some(k) = n("z").or_else(|| n("unit")) {
        k
    } else if name.starts_with("pair2 ⊔ z3") {
        4 + 3
    } else {
        g.n_arrows()
    }
}

fn groupoid_legs(builds: &[(String, GroupoidPmu)]) -> Outcome {
    for (name, gp) in builds {
        let r = verify_groupoid_legs(gp, TOL, SEED);
        require(r.find("Â = m(C(G))").is_some_and(|c| c.pass), || format!("{name}: Â is not m(C(G))"))?;
        require(r.find("Â commutative").is_some_and(|c| c.pass), || format!("{name}: Â not commutative"))?;
        let base = name.rsplit_once(' ').map_or(name.as_str(), |(b, _)| b);
        let (dh, da) = (leg_hat(&gp.pmu).map_err(|e| e.to_string())?.dim(), leg(&gp.pmu).map_err(|e| e.to_string())?.dim());
        let want = expected_dim_a(base, &gp.g);
        require(dh == gp.n() && da == want, || format!("{name}: dim Â {dh}, dim A {da}, expected {} and {want}", gp.n()))?;
    }
    Ok("Â = m(C(G)) commutative, dim A = n², n, n, additive".into())
}

fn comultiplication(builds: &[(String, GroupoidPmu)]) -> Outcome {
    let mut groups = 0;
    for (name, gp) in builds {
        let r = verify_groupoid_legs(gp, TIGHT, SEED);
        let mut names = vec!["Δ̂(m(f)) = m(f(xy))", "Δ(L(g)) formula"];
        if gp.k() == 1 {
            names.push("Δ(U_x) = U_x ⊗ U_x");
            groups += 1;
        }
        for n in names {
            let c = r.find(n).ok_or_else(|| format!("{name}: no check `{n}`"))?;
            require(c.pass, || format!("{name}: {n} residual {:.3e}", c.residual))?;
        }
    }
    Ok(format!("entrywise at {TIGHT:e}, {groups} group cases"))
}

fn regularity(builds: &[(String, GroupoidPmu)]) -> Outcome {
    for (name, gp) in builds {
        let res = regularity_residual(&gp.pmu).map_err(|e| format!("{name}: {e}"))?;
        require(res < TIGHT, || format!("{name}: C_V vs [αα*] residual {res:.3e}"))?;
        let r = verify_leg_relations(&gp.pmu, TOL);
        require(r.all_pass(), || format!("{name}: {}", first_failure(&r)))?;
    }
    Ok("C_V = [αα*] and relation suites on the zoo".into())
}

fn hopf(builds: &[(String, GroupoidPmu)]) -> Outcome {
    for (name, gp) in builds {
        for side in [LegSide::Hat, LegSide::Plain] {
            let r = verify_hopf(&gp.pmu, side, TOL);
            require(r.all_pass(), || format!("{name}: {}", first_failure(&r)))?;
        }
    }
    Ok("both legs on the zoo".into())
}

fn pairing() -> Outcome {
    for (name, g) in [("z2", cyclic_groupoid(2)), ("z3", cyclic_groupoid(3)), ("pair2", pair_groupoid(2))] {
        let gp = build(&g, &vec![1.0; g.n_units()]);
        let (l, r) = pairing_ranks(&gp.pmu).map_err(|e| format!("{name}: {e}"))?;
        let n = gp.n();
        require(l == n && r == n, || format!("{name}: pairing ranks {l}, {r}, expected {n}"))?;
        let rep = verify_pairing(&gp.pmu, TIGHT, SEED);
        require(rep.all_pass(), || format!("{name}: {}", first_failure(&rep)))?;
    }
    Ok("full rank on z2, z3, pair2; identities at 1e-9".into())
}

fn fixed_points(builds: &[(String, GroupoidPmu)]) -> Outcome {
    for (name, gp) in builds {
        let p = &gp.pmu;
        let e = |e: groupoid_pmu::Error| format!("{name}: {e}");
        let (fd, cd) = (fixed_space(p, SEED).map_err(e)?.dim(), cofixed_space(p, SEED).map_err(e)?.dim());
        require(fd == gp.k() && cd == gp.k(), || format!("{name}: dim Fix {fd}, dim Cofix {cd}, |G⁰| = {}", gp.k()))?;
        let flags = (is_etale(p, SEED).map_err(e)?, is_proper(p, SEED).map_err(e)?, is_compact(p, SEED).map_err(e)?);
        require(flags == (true, true, true), || format!("{name}: (étale, proper, compact) = {flags:?}"))?;
        for r in [verify_fixed(p, TIGHT, SEED), verify_groupoid_fixed(gp, TIGHT, SEED)] {
            require(r.all_pass(), || format!("{name}: {}", first_failure(&r)))?;
        }
    }
    Ok("dims |G⁰|, étale/proper/compact, counit and Haar at 1e-9".into())
}

fn representations() -> Outcome {
    let mut bundles = 0;
    for (name, g) in [("pair2", pair_groupoid(2)), ("z3", cyclic_groupoid(3))] {
        let gp = build(&g, &nonuniform(&g));
        let sample = sample_bundles(&g, SEED);
        require(sample.len() >= 3, || format!("{name}: only {} bundles", sample.len()))?;
        for (b, rep) in &sample {
            let [gf, fg] = round_trip_residuals(&gp, rep).map_err(|e| format!("{name} {b}: {e}"))?;
            require(gf < TIGHT && fg < TIGHT, || format!("{name} {b}: G∘F {gf:.3e}, F∘G {fg:.3e}"))?;
            bundles += 1;
        }
    }
    for n in 2..=4 {
        let gp = build(&cyclic_groupoid(n), &[1.0]);
        let dims = character_hom_dims(&gp).map_err(|e| e.to_string())?;
        let id: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| usize::from(i == j)).collect()).collect();
        require(dims == id, || format!("z{n}: Hom dims {dims:?}"))?;
    }
    Ok(format!("{bundles} round trips at 1e-9, characters of z2..z4 orthogonal"))
}

fn cross_validation(builds: &[(String, GroupoidPmu)]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (name, gp) in builds {
        let res = gp.fast_path_residual().map_err(|e| format!("{name}: {e}"))?;
        worst = worst.max(res);
        let (s, r) = (gp.pmu.src.dim(), gp.pmu.rng.dim());
        let (ws, wr) = (gp.g.composable_pairs().len(), gp.g.range_pairs().len());
        require(s == ws && r == wr, || format!("{name}: rtp dims {s}, {r}, expected {ws}, {wr}"))?;
    }
    require(worst < TIGHT, || format!("fast path residual {worst:.3e}"))?;
    Ok(format!("fast path residual {worst:.3e}, rtp dims match"))
}

fn oracles() -> Outcome {
    let rows = all_rows();
    for r in &rows {
        if let Some(note) = r.note {
            println!("    note on `{}`: {note}", r.name);
        }
    }
    let bad: Vec<_> = rows.iter().filter(|r| !r.pass).map(|r| format!("{} (oracle {}, library {}, frozen {})", r.name, r.oracle, r.library, r.frozen)).collect();
    require(bad.is_empty(), || bad.join("; "))?;
    Ok(format!("{} oracle rows match", rows.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let builds = zoo_builds();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("pentagon and axioms", Box::new(|| pentagon_and_axioms(&builds))),
        ("groupoid legs", Box::new(|| groupoid_legs(&builds))),
        ("comultiplication formulas", Box::new(|| comultiplication(&builds))),
        ("regularity", Box::new(|| regularity(&builds))),
        ("Hopf verification", Box::new(|| hopf(&builds))),
        ("duality pairing", Box::new(pairing)),
        ("fixed points", Box::new(|| fixed_points(&builds))),
        ("representation equivalence", Box::new(representations)),
        ("cross-validation", Box::new(|| cross_validation(&builds))),
        ("oracle equivalence", Box::new(oracles)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass ({:.1}s)", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
