//! Detour detection and reduction.
//!
//! Redexes are found anywhere in a derivation; `normalize` reduces the one
//! with the largest formula (by connective count), breaking ties by the
//! deepest path and then the smallest path.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::proof::{Derivation, Node, Rule};
use crate::syntax::{expand_sugar, rename_context, rename_var, Context, Formula, Label};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RedexKind {
    AndRed,
    ImpRed,
    AbsurdAtomize,
    R9R8,
    R9R7,
    R13R14,
    R14R13,
    R15R16,
    R16R15,
    R21R22,
    R22R21,
    R17R19,
    R18R20,
    R23Cycle,
    R24Cycle,
    R25Cycle,
    R26Cycle,
}

impl RedexKind {
    pub fn name(self) -> String {
        serde_json::to_value(self).unwrap().as_str().unwrap().to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Redex {
    pub kind: RedexKind,
    /// Path of the lower step of the detour.
    pub path: Vec<usize>,
    /// Path, relative to `path`, of the node the reduction keeps or the partner step.
    pub inner: Vec<usize>,
    /// Number of steps in an inclusion cycle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle: Option<usize>,
    /// Connective count of the formula the detour passes through.
    pub rank: usize,
    /// For the existential pairs: 0 when the introduction feeds the major
    /// premise, 1 when the minor premise reintroduces the discharged hypothesis.
    #[serde(skip_serializing_if = "is_zero")]
    pub variant: u8,
}

fn is_zero(v: &u8) -> bool {
    *v == 0
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NormError {
    #[error("stale redex {kind} at {path:?}")]
    Stale { kind: String, path: Vec<usize> },
    #[error("no normal form within {0} reductions")]
    Budget(usize),
}

pub const DEFAULT_STEPS: usize = 10_000;

#[derive(Clone, Debug, Serialize)]
pub struct Normalized {
    #[serde(skip)]
    pub derivation: Derivation,
    pub log: Vec<Redex>,
    /// Classical absurd steps left on compound conclusions (disjunction,
    /// negation, or under an existential label).
    pub residual: Vec<Vec<usize>>,
}

fn redex(kind: RedexKind, path: &[usize], inner: Vec<usize>, rank: usize) -> Redex {
    Redex { kind, path: path.to_vec(), inner, cycle: None, rank, variant: 0 }
}

fn num(n: &Node) -> Option<u8> {
    n.rule().and_then(Rule::number)
}

fn judgement(n: &Node) -> (&Context, &Formula) {
    (n.context(), n.formula())
}

fn rename_node(n: &Node, old: &str, new: &str) -> Node {
    n.map_all(&|f| rename_var(f, old, new), &|c| rename_context(c, old, new))
}

fn fresh_name(base: &str, used: &BTreeSet<String>) -> String {
    (1..).map(|i| format!("{base}{i}")).find(|v| !used.contains(v)).unwrap()
}

/// Ids discharged by the steps from `top` (exclusive) down to `bottom` (inclusive).
fn discharged_between(d: &Node, bottom: &[usize], top: &[usize]) -> BTreeSet<u32> {
    (bottom.len()..top.len())
        .flat_map(|k| d.at_path(&top[..k]).unwrap().discharge().to_vec())
        .collect()
}

/// Scope variable of the hypotheses a rule 18/20 step discharges in `minor`.
fn bound_var(minor: &Node, ids: &[u32]) -> Option<String> {
    minor
        .open_hyps()
        .into_iter()
        .find(|h| ids.contains(&h.id))
        .and_then(|h| h.context.scope().and_then(|l| l.var_name().map(str::to_string)))
}

/// (major index, minor index) for a rule 18/20 step.
fn exists_elim_parts(n: &Node) -> Option<(usize, usize)> {
    let bound = if num(n)? == 18 { Label::WorldSome } else { Label::NeighSome };
    let ps = n.premises();
    if ps.len() != 2 {
        return None;
    }
    [(0, 1), (1, 0)].into_iter().find(|&(m, k)| {
        ps[m].context().scope() == Some(&bound) && judgement(&ps[k]) == judgement(n)
    })
}

/// Renames eigenvariables of `n` that occur in `avoid`.
fn freshen(n: &Node, avoid: &BTreeSet<String>, used: &mut BTreeSet<String>) -> Node {
    let mut n = n.clone();
    if let Node::Step { rule: Rule::Num(k), premises, discharge, context, formula } = &mut n {
        let slot = match *k {
            15 | 21 => premises[0].context().scope().and_then(Label::var_name).map(|v| (0, v.to_string())),
            18 | 20 => {
                let probe = Node::Step {
                    rule: Rule::Num(*k),
                    context: context.clone(),
                    formula: formula.clone(),
                    premises: premises.clone(),
                    discharge: discharge.clone(),
                };
                exists_elim_parts(&probe)
                    .and_then(|(_, minor)| bound_var(&premises[minor], discharge).map(|v| (minor, v)))
            }
            _ => None,
        };
        if let Some((i, v)) = slot {
            if avoid.contains(&v) && !formula.mentions(&v) && !context.mentions(&v) {
                let new = fresh_name(&v[..1], used);
                used.insert(new.clone());
                premises[i] = rename_node(&premises[i], &v, &new);
            }
        }
    }
    match n {
        Node::Step { rule, context, formula, premises, discharge } => Node::Step {
            rule,
            context,
            formula,
            premises: premises.iter().map(|p| freshen(p, avoid, used)).collect(),
            discharge,
        },
        hyp => hyp,
    }
}

/// `host` with every use of hypothesis `ids` replaced by `with`.
fn plug(host: &Node, ids: &[u32], with: &Node, all: &Node) -> Node {
    let avoid = with.variables();
    let mut used = all.variables();
    used.extend(avoid.iter().cloned());
    let mut h = freshen(host, &avoid, &mut used);
    for &id in ids {
        h.graft(id, with);
    }
    h
}

fn detour_partner(p: u8) -> Option<(u8, RedexKind)> {
    Some(match p {
        14 => (13, RedexKind::R13R14),
        13 => (14, RedexKind::R14R13),
        16 => (15, RedexKind::R15R16),
        15 => (16, RedexKind::R16R15),
        22 => (21, RedexKind::R21R22),
        21 => (22, RedexKind::R22R21),
        _ => return None,
    })
}

/// For r15-r16 and r21-r22 with different variables: (old, new) to rename in the kept subtree.
fn rename_for(p: &Node, kept: &Node) -> Option<Option<(String, String)>> {
    if judgement(p) == judgement(kept) {
        return Some(None);
    }
    if !matches!(num(p), Some(16) | Some(22)) || p.formula() != kept.formula() {
        return None;
    }
    let (pb, pv) = (p.context().base()?, p.context().scope()?);
    let (kb, kv) = (kept.context().base()?, kept.context().scope()?);
    let (u, v) = (pv.var_name()?, kv.var_name()?);
    if pb != kb || pv.sort() != kv.sort() || p.formula().mentions(v) || pb.mentions(v) || kept.variables().contains(u) {
        return None;
    }
    Some(Some((v.to_string(), u.to_string())))
}

fn cycle_carrier(n: &Node) -> Option<usize> {
    let ps = n.premises();
    if ps.len() != 2 {
        return None;
    }
    match num(n)? {
        23 | 24 => ps.iter().position(|p| p.formula() == n.formula()),
        25 | 26 => ps.iter().position(|p| p.context() == n.context()),
        _ => None,
    }
}

fn is_compound_target(f: &Formula) -> bool {
    matches!(f, Formula::And(..) | Formula::Implies(..))
}

fn desugar(d: &Derivation) -> Derivation {
    d.map_all(&expand_sugar, &Context::clone)
}

/// Every redex in `d`, in walk order. `<=` is read expanded.
pub fn find_redexes(d: &Derivation) -> Vec<Redex> {
    redexes(&desugar(d))
}

fn redexes(d: &Derivation) -> Vec<Redex> {
    let mut out = Vec::new();
    for (path, n) in d.walk() {
        let Some(k) = num(n) else { continue };
        let ps = n.premises();
        match k {
            1 | 2 if num(&ps[0]) == Some(3) => {
                out.push(redex(RedexKind::AndRed, &path, vec![0], ps[0].formula().connectives()));
            }
            12 if ps.len() == 2 => {
                let hit = (0..2).find(|&i| {
                    let minor = ps[1 - i].formula();
                    num(&ps[i]) == Some(11)
                        && (*ps[i].formula() == Formula::implies(minor.clone(), n.formula().clone())
                            || (n.formula().is_bot() && *ps[i].formula() == Formula::not(minor.clone())))
                });
                if let Some(i) = hit {
                    out.push(redex(RedexKind::ImpRed, &path, vec![i], ps[i].formula().connectives()));
                }
            }
            _ => {}
        }
        if k == 7 && is_compound_target(n.formula()) && !n.context().has_existential() {
            out.push(redex(RedexKind::AbsurdAtomize, &path, vec![], n.formula().connectives()));
        }
        if (k == 7 || k == 8) && ps.len() == 1 {
            let kind = if k == 7 { RedexKind::R9R7 } else { RedexKind::R9R8 };
            let found = ps[0].walk().into_iter().find(|(rel, q)| {
                if num(q) != Some(9) || q.premises().len() != 1 || q.premises()[0].context() != n.context() {
                    return false;
                }
                let mut top = path.clone();
                top.push(0);
                top.extend(rel.iter().copied());
                let blocked = discharged_between(d, &path, &top);
                q.premises()[0].open_ids().is_disjoint(&blocked)
            });
            if let Some((rel, _)) = found {
                let mut inner = vec![0];
                inner.extend(rel);
                out.push(redex(kind, &path, inner, n.formula().connectives()));
            }
        }
        if let Some((partner, kind)) = detour_partner(k) {
            let mut best = None;
            'search: for (i, p) in ps.iter().enumerate() {
                for (rel, q) in p.walk() {
                    if num(q) != Some(partner) {
                        continue;
                    }
                    for (j, kept) in q.premises().iter().enumerate() {
                        if rename_for(n, kept).is_none() {
                            continue;
                        }
                        let mut inner = vec![i];
                        inner.extend(rel.iter().copied());
                        inner.push(j);
                        let mut top = path.clone();
                        top.extend(inner.iter().copied());
                        if kept.open_ids().is_disjoint(&discharged_between(d, &path, &top)) {
                            best = Some(inner);
                            break 'search;
                        }
                    }
                }
            }
            if let Some(inner) = best {
                out.push(redex(kind, &path, inner, n.formula().connectives()));
            }
        }
        if k == 18 || k == 20 {
            if let Some(r) = exists_pair(n, &path) {
                out.push(r);
            }
        }
        if (23..=26).contains(&k) {
            let mut cur = n;
            let mut inner = Vec::new();
            for len in 1.. {
                let Some(c) = cycle_carrier(cur) else { break };
                inner.push(c);
                let next = &cur.premises()[c];
                if len >= 2 && judgement(next) == judgement(n) {
                    let kind = [RedexKind::R23Cycle, RedexKind::R24Cycle, RedexKind::R25Cycle, RedexKind::R26Cycle]
                        [(k - 23) as usize];
                    let mut r = redex(kind, &path, inner.clone(), n.formula().connectives());
                    r.cycle = Some(len);
                    out.push(r);
                    break;
                }
                if num(next) != Some(k) {
                    break;
                }
                cur = next;
            }
        }
    }
    out
}

fn exists_pair(n: &Node, path: &[usize]) -> Option<Redex> {
    let k = num(n)?;
    let (intro, kind) = if k == 18 { (17, RedexKind::R17R19) } else { (19, RedexKind::R18R20) };
    let (mi, ni) = exists_elim_parts(n)?;
    let (major, minor) = (&n.premises()[mi], &n.premises()[ni]);
    let ds = n.discharge();
    let rank = major.formula().connectives();
    let rest: BTreeSet<String> = minor
        .open_hyps()
        .into_iter()
        .filter(|h| !ds.contains(&h.id))
        .flat_map(|h| {
            let mut v = h.formula.variables();
            v.extend(h.context.variables());
            v
        })
        .collect();
    if num(major) == Some(intro) {
        let q_prem = witness(major)?;
        let u = q_prem.context().scope()?.var_name()?.to_string();
        if n.formula().mentions(&u) || n.context().mentions(&u) || rest.contains(&u) {
            return None;
        }
        return Some(redex(kind, path, vec![mi], rank));
    }
    // the minor premise only uses the hypotheses to reintroduce the major premise
    if ds.is_empty() {
        return None;
    }
    let uses: Vec<Vec<usize>> = minor.walk().into_iter().filter(|(_, q)| is_use_of(q, ds)).map(|(p, _)| p).collect();
    let reintro = |u: &Vec<usize>| {
        let q = u.split_last().and_then(|(_, up)| minor.at_path(up));
        q.is_some_and(|q| num(q) == Some(intro) && judgement(q) == judgement(major))
    };
    if uses.is_empty() || !uses.iter().all(reintro) {
        return None;
    }
    let mut r = redex(kind, path, vec![ni], rank);
    r.variant = 1;
    Some(r)
}

fn is_use_of(p: &Node, ds: &[u32]) -> bool {
    matches!(p, Node::Step { rule: Rule::Num(10), premises, .. }
        if matches!(premises.as_slice(), [Node::Hyp { id, .. }] if ds.contains(id)))
}

/// The premise of an existential introduction that carries the witness.
fn witness(q: &Node) -> Option<&Node> {
    q.premises().iter().find(|p| p.formula() == q.formula() && p.context().scope().is_some_and(Label::is_var))
}

/// Replaces every reintroduction step in `minor` by `major`.
fn replace_reintro(n: &Node, intro: u8, major: &Node, ds: &[u32]) -> Node {
    if num(n) == Some(intro) && judgement(n) == judgement(major) && n.premises().iter().any(|p| is_use_of(p, ds)) {
        return major.clone();
    }
    match n {
        Node::Step { rule, context, formula, premises, discharge } => Node::Step {
            rule: *rule,
            context: context.clone(),
            formula: formula.clone(),
            premises: premises.iter().map(|p| replace_reintro(p, intro, major, ds)).collect(),
            discharge: discharge.clone(),
        },
        h => h.clone(),
    }
}

fn replace_at(d: &Node, path: &[usize], new: Node) -> Node {
    let mut out = d.clone();
    *out.at_path_mut(path).expect("path exists") = new;
    out
}

fn sub(n: &Node, rel: &[usize]) -> Node {
    n.at_path(rel).expect("inner path exists").clone()
}

fn step(rule: u8, ctx: &Context, f: Formula, ps: Vec<Node>) -> Node {
    Node::step(Rule::Num(rule), ctx.clone(), f, ps)
}

fn hyp(id: u32, ctx: &Context, f: Formula) -> Node {
    step(10, ctx, f.clone(), vec![Node::hyp(id, ctx.clone(), f)])
}

/// Classical absurd on a conjunction or implication, pushed to its parts.
fn atomize(d: &Node, p: &Node) -> Node {
    let ctx = p.context();
    let bot = Formula::bot(ctx.formula_sort());
    let body = &p.premises()[0];
    let ks = p.discharge();
    let mut next = d.max_id();
    let mut id = || {
        next += 1;
        next
    };
    let with_neg = |neg: &Node| plug(body, ks, neg, d);
    match p.formula() {
        Formula::And(a, b) => {
            let part = |pick: u8, x: &Formula, id1: u32, id2: u32| {
                let g = p.formula().clone();
                let neg = step(
                    11,
                    ctx,
                    Formula::not(g.clone()),
                    vec![step(12, ctx, bot.clone(), vec![step(pick, ctx, x.clone(), vec![hyp(id1, ctx, g)]), hyp(id2, ctx, Formula::not(x.clone()))])],
                )
                .discharging(&[id1]);
                step(7, ctx, x.clone(), vec![with_neg(&neg)]).discharging(&[id2])
            };
            let (i1, i2, i3, i4) = (id(), id(), id(), id());
            step(3, ctx, p.formula().clone(), vec![part(1, a, i1, i2), part(2, b, i3, i4)])
        }
        Formula::Implies(a, b) => {
            let (ia, inb, iimp) = (id(), id(), id());
            let g = p.formula().clone();
            let neg = step(
                11,
                ctx,
                Formula::not(g.clone()),
                vec![step(
                    12,
                    ctx,
                    bot.clone(),
                    vec![step(12, ctx, (**b).clone(), vec![hyp(ia, ctx, (**a).clone()), hyp(iimp, ctx, g.clone())]), hyp(inb, ctx, Formula::not((**b).clone()))],
                )],
            )
            .discharging(&[iimp]);
            let inner = step(7, ctx, (**b).clone(), vec![with_neg(&neg)]).discharging(&[inb]);
            step(11, ctx, g, vec![inner]).discharging(&[ia])
        }
        _ => unreachable!("atomize on a compound target"),
    }
}

/// Applies one reduction. The result concludes the same judgement.
///
/// Inner formulas come back with `<=` expanded; the root keeps its spelling.
pub fn reduce(d: &Derivation, r: &Redex) -> Result<Derivation, NormError> {
    let mut out = reduce_plain(&desugar(d), r)?;
    if let (Node::Step { formula, .. }, Node::Step { formula: orig, .. }) = (&mut out, d) {
        *formula = orig.clone();
    }
    Ok(out)
}

fn reduce_plain(d: &Derivation, r: &Redex) -> Result<Derivation, NormError> {
    if !redexes(d).contains(r) {
        return Err(NormError::Stale { kind: r.kind.name(), path: r.path.clone() });
    }
    let p = d.at_path(&r.path).unwrap();
    use RedexKind::*;
    let new = match r.kind {
        AndRed => {
            let pick = if num(p) == Some(1) { 0 } else { 1 };
            p.premises()[0].premises()[pick].clone()
        }
        ImpRed => {
            let i = r.inner[0];
            let major = &p.premises()[i];
            let minor = &p.premises()[1 - i];
            plug(&major.premises()[0], major.discharge(), minor, d)
        }
        AbsurdAtomize => atomize(d, p),
        R9R8 | R9R7 => {
            let q = sub(p, &r.inner);
            step(8, p.context(), p.formula().clone(), vec![q.premises()[0].clone()])
        }
        R13R14 | R14R13 | R15R16 | R16R15 | R21R22 | R22R21 => {
            let kept = sub(p, &r.inner);
            match rename_for(p, &kept).expect("checked by find_redexes") {
                None => kept,
                Some((old, new)) => rename_node(&kept, &old, &new),
            }
        }
        R17R19 | R18R20 if r.variant == 0 => {
            let (_, ni) = exists_elim_parts(p).unwrap();
            let q = &p.premises()[r.inner[0]];
            let pi1 = witness(q).unwrap();
            let minor = &p.premises()[ni];
            let ds = p.discharge();
            match bound_var(minor, ds) {
                None => minor.clone(),
                Some(v) => {
                    let u = pi1.context().scope().unwrap().var_name().unwrap().to_string();
                    let mut host = minor.clone();
                    if u != v {
                        let mut used = d.variables();
                        let w = fresh_name(&u[..1], &used);
                        used.insert(w.clone());
                        host = rename_node(&rename_node(&host, &u, &w), &v, &u);
                    }
                    plug(&host, ds, pi1, d)
                }
            }
        }
        R17R19 | R18R20 => {
            let (mi, ni) = exists_elim_parts(p).unwrap();
            let major = &p.premises()[mi];
            let intro = if r.kind == R17R19 { 17 } else { 19 };
            let avoid = major.variables();
            let mut used = d.variables();
            let minor = freshen(&p.premises()[ni], &avoid, &mut used);
            replace_reintro(&minor, intro, major, p.discharge())
        }
        R23Cycle | R24Cycle | R25Cycle | R26Cycle => sub(p, &r.inner),
    };
    Ok(replace_at(d, &r.path, new))
}

fn pick(rs: &[Redex]) -> Option<&Redex> {
    rs.iter().max_by(|a, b| {
        a.rank
            .cmp(&b.rank)
            .then(a.path.len().cmp(&b.path.len()))
            .then(b.path.cmp(&a.path))
    })
}

/// Classical absurd steps on compound conclusions that atomization leaves alone.
pub fn residual_sites(d: &Derivation) -> Vec<Vec<usize>> {
    d.walk()
        .into_iter()
        .filter(|(_, n)| {
            num(n) == Some(7)
                && match n.formula() {
                    Formula::Or(..) | Formula::Not(..) => true,
                    f => is_compound_target(f) && n.context().has_existential(),
                }
        })
        .map(|(p, _)| p)
        .collect()
}

pub fn normalize(d: &Derivation) -> Result<Normalized, NormError> {
    normalize_within(d, DEFAULT_STEPS)
}

pub fn normalize_within(d: &Derivation, steps: usize) -> Result<Normalized, NormError> {
    let mut cur = d.clone();
    let mut log = Vec::new();
    loop {
        let rs = find_redexes(&cur);
        let Some(r) = pick(&rs) else { break };
        if log.len() == steps {
            return Err(NormError::Budget(steps));
        }
        cur = reduce(&cur, r)?;
        log.push(r.clone());
    }
    let residual = residual_sites(&cur);
    Ok(Normalized { derivation: cur, log, residual })
}
