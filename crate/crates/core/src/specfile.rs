//! Line-based groupoid description format.
//!
//! ```text
//! # two points and the arrows between them
//! unit a
//! unit b
//! arrow f : a -> b
//! arrow g : b -> a
//! compose f g = 1_b
//! compose g f = 1_a
//! inverse f = g
//! measure a = 2.0
//! haar f = 1.0
//! ```
//!
//! Every unit `u` gets an identity arrow `1_u` together with its
//! compositions, so files only list the non-trivial part of the table.
//! Inverses may be omitted when the composition table determines them.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::groupoid::{make_groupoid, FiniteGroupoid, GroupoidData, HaarSystem};

#[derive(Clone, Debug)]
pub struct GroupoidSpec {
    pub groupoid: FiniteGroupoid,
    pub haar: HaarSystem,
    pub mu: Vec<f64>,
}

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn parse_float(tok: &str, line: usize) -> Result<f64> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => perr(line, format!("expected a number, found `{tok}`")),
    }
}

pub fn parse_spec(text: &str) -> Result<GroupoidSpec> {
    let mut units: Vec<String> = Vec::new();
    let mut unit_idx: BTreeMap<String, usize> = BTreeMap::new();
    let mut arrows: Vec<(String, usize, usize)> = Vec::new();
    let mut arrow_idx: BTreeMap<String, usize> = BTreeMap::new();
    // raw statements resolved after all arrows are known
    let mut composes: Vec<(usize, String, String, String)> = Vec::new();
    let mut inverses: Vec<(usize, String, String)> = Vec::new();
    let mut measures: Vec<(usize, String, f64)> = Vec::new();
    let mut haars: Vec<(usize, String, f64)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        match toks[0] {
            "unit" => {
                if toks.len() != 2 {
                    return perr(line, "expected `unit <name>`");
                }
                let name = toks[1].to_string();
                if unit_idx.contains_key(&name) {
                    return perr(line, format!("duplicate unit `{name}`"));
                }
                unit_idx.insert(name.clone(), units.len());
                units.push(name);
            }
            "arrow" => {
                if toks.len() != 6 || toks[2] != ":" || toks[4] != "->" {
                    return perr(line, "expected `arrow <name> : <src> -> <tgt>`");
                }
                let name = toks[1].to_string();
                if arrow_idx.contains_key(&name) {
                    return perr(line, format!("duplicate arrow `{name}`"));
                }
                let (Some(&s), Some(&t)) = (unit_idx.get(toks[3]), unit_idx.get(toks[5])) else {
                    return perr(line, "arrow endpoints must be declared units");
                };
                arrow_idx.insert(name.clone(), arrows.len());
                arrows.push((name, s, t));
            }
            "compose" => {
                if toks.len() != 5 || toks[3] != "=" {
                    return perr(line, "expected `compose <x> <y> = <z>`");
                }
                composes.push((line, toks[1].into(), toks[2].into(), toks[4].into()));
            }
            "inverse" => {
                if toks.len() != 4 || toks[2] != "=" {
                    return perr(line, "expected `inverse <x> = <y>`");
                }
                inverses.push((line, toks[1].into(), toks[3].into()));
            }
            "measure" => {
                if toks.len() != 4 || toks[2] != "=" {
                    return perr(line, "expected `measure <unit> = <float>`");
                }
                measures.push((line, toks[1].into(), parse_float(toks[3], line)?));
            }
            "haar" => {
                if toks.len() != 4 || toks[2] != "=" {
                    return perr(line, "expected `haar <arrow> = <float>`");
                }
                haars.push((line, toks[1].into(), parse_float(toks[3], line)?));
            }
            other => return perr(line, format!("unknown statement `{other}`")),
        }
    }

    // identity arrows
    let mut ids = Vec::with_capacity(units.len());
    for (u, name) in units.iter().enumerate() {
        let id_name = format!("1_{name}");
        match arrow_idx.get(&id_name) {
            Some(&a) => {
                if arrows[a].1 != u || arrows[a].2 != u {
                    return Err(Error::InvalidGroupoid(format!("`{id_name}` must be a loop at `{name}`")));
                }
                ids.push(a);
            }
            None => {
                arrow_idx.insert(id_name.clone(), arrows.len());
                ids.push(arrows.len());
                arrows.push((id_name, u, u));
            }
        }
    }

    let n = arrows.len();
    let lookup = |name: &str, line: usize| -> Result<usize> {
        arrow_idx.get(name).copied().ok_or_else(|| Error::Parse { line, msg: format!("unknown arrow `{name}`") })
    };
    let mut table: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (line, x, y, z) in &composes {
        let (x, y, z) = (lookup(x, *line)?, lookup(y, *line)?, lookup(z, *line)?);
        if table.insert((x, y), z).is_some_and(|old| old != z) {
            return perr(*line, "conflicting composition");
        }
    }
    for a in 0..n {
        let (_, s, t) = arrows[a];
        table.entry((ids[t], a)).or_insert(a);
        table.entry((a, ids[s])).or_insert(a);
    }
    let mut inv: Vec<Option<usize>> = vec![None; n];
    for (line, x, y) in &inverses {
        let (x, y) = (lookup(x, *line)?, lookup(y, *line)?);
        inv[x] = Some(y);
        if inv[y].is_none() {
            inv[y] = Some(x);
        }
    }
    let mut inv_full = Vec::with_capacity(n);
    for a in 0..n {
        let (_, s, t) = arrows[a];
        let found = inv[a].or_else(|| {
            (0..n).find(|&b| table.get(&(b, a)) == Some(&ids[s]) && table.get(&(a, b)) == Some(&ids[t]))
        });
        match found {
            Some(b) => inv_full.push(b),
            None => return Err(Error::InvalidGroupoid(format!("arrow `{}` has no inverse", arrows[a].0))),
        }
    }

    let mut mu = vec![1.0; units.len()];
    for (line, u, w) in &measures {
        let Some(&ui) = unit_idx.get(u) else {
            return perr(*line, format!("unknown unit `{u}`"));
        };
        mu[ui] = *w;
    }
    let mut weight = vec![1.0; n];
    for (line, a, w) in &haars {
        weight[lookup(a, *line)?] = *w;
    }

    let data = GroupoidData {
        units,
        arrows: arrows.iter().map(|a| a.0.clone()).collect(),
        src: arrows.iter().map(|a| a.1).collect(),
        tgt: arrows.iter().map(|a| a.2).collect(),
        comp: table.iter().map(|(&(x, y), &z)| (x, y, z)).collect(),
        inv: inv_full,
    };
    let groupoid = make_groupoid(data)?;
    Ok(GroupoidSpec { groupoid, haar: HaarSystem { weight }, mu })
}
