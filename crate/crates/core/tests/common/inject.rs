//! Mechanical detour injection into checked derivations.
#![allow(dead_code)]

use std::collections::BTreeSet;

use puc::checker::check;
use puc::normalizer::{find_redexes, RedexKind};
use puc::proof::{Derivation, Node, Profile, Rule};
use puc::syntax::{Context, Formula, Label, Sort};

pub const KINDS: [RedexKind; 17] = [
    RedexKind::AndRed,
    RedexKind::ImpRed,
    RedexKind::AbsurdAtomize,
    RedexKind::R9R8,
    RedexKind::R9R7,
    RedexKind::R13R14,
    RedexKind::R14R13,
    RedexKind::R15R16,
    RedexKind::R16R15,
    RedexKind::R21R22,
    RedexKind::R22R21,
    RedexKind::R17R19,
    RedexKind::R18R20,
    RedexKind::R23Cycle,
    RedexKind::R24Cycle,
    RedexKind::R25Cycle,
    RedexKind::R26Cycle,
];

fn step(rule: u8, ctx: &Context, f: Formula, ps: Vec<Node>) -> Node {
    Node::step(Rule::Num(rule), ctx.clone(), f, ps)
}

fn hyp(id: u32, ctx: &Context, f: &Formula) -> Node {
    step(10, ctx, f.clone(), vec![Node::hyp(id, ctx.clone(), f.clone())])
}

fn fresh(base: &str, used: &BTreeSet<String>) -> String {
    (1..).map(|i| format!("{base}{i}")).find(|v| !used.contains(v)).unwrap()
}

/// Hypothesis ids usable at `path`: open at the root or discharged below it.
fn available(d: &Derivation, path: &[usize]) -> BTreeSet<u32> {
    let mut ids = d.open_ids();
    for k in 0..path.len() {
        ids.extend(d.at_path(&path[..k]).unwrap().discharge().iter().copied());
    }
    ids
}

/// Candidate replacements for `n`, each concluding its judgement.
fn candidates(d: &Derivation, path: &[usize], n: &Node, kind: RedexKind) -> Vec<Node> {
    let ctx = n.context();
    let f = n.formula();
    let id = d.max_id() + 1;
    let used = d.variables();
    let bot = |c: &Context| Formula::bot(c.formula_sort());
    let scope = ctx.scope().cloned();
    let base = ctx.base();
    use RedexKind::*;
    let mut out = Vec::new();
    match kind {
        AndRed => out.push(step(1, ctx, f.clone(), vec![step(3, ctx, Formula::and(f.clone(), f.clone()), vec![n.clone(), n.clone()])])),
        ImpRed => out.push(step(
            12,
            ctx,
            f.clone(),
            vec![n.clone(), step(11, ctx, Formula::implies(f.clone(), f.clone()), vec![hyp(id, ctx, f)]).discharging(&[id])],
        )),
        AbsurdAtomize if matches!(f, Formula::And(..) | Formula::Implies(..)) => out.push(
            step(7, ctx, f.clone(), vec![step(12, ctx, bot(ctx), vec![n.clone(), hyp(id, ctx, &Formula::not(f.clone()))])])
                .discharging(&[id]),
        ),
        R9R8 | R9R7 if f.is_bot() && !ctx.is_empty() => {
            let nine = step(9, &Context::empty(), Formula::BotN, vec![n.clone()]);
            let packed = bot(ctx).labels(ctx.labels().iter().rev().cloned());
            let mut cur = step(8, &Context::empty(), packed, vec![nine]);
            let mut c = Context::empty();
            for l in ctx.labels() {
                c = c.push(l.clone());
                let Formula::Labeled(inner, _) = cur.formula().clone() else { unreachable!() };
                cur = step(13, &c, *inner, vec![cur]);
            }
            if kind == R9R8 {
                out.push(step(8, ctx, f.clone(), vec![cur]));
            } else {
                // classical absurd discharging nothing
                out.push(step(7, ctx, f.clone(), vec![cur]));
            }
        }
        R13R14 => {
            if let (Some(b), Some(l)) = (&base, &scope) {
                out.push(step(13, ctx, f.clone(), vec![step(14, b, f.clone().label(l.clone()), vec![n.clone()])]));
            }
        }
        R14R13 => {
            if let Formula::Labeled(inner, l) = f {
                out.push(step(14, ctx, f.clone(), vec![step(13, &ctx.push(l.clone()), (**inner).clone(), vec![n.clone()])]));
            }
        }
        R15R16 | R21R22 => {
            let (all, var) = if kind == R15R16 { (Label::WorldAll, Sort::W) } else { (Label::NeighAll, Sort::N) };
            let (up, down) = if kind == R15R16 { (15, 16) } else { (21, 22) };
            if let (Some(b), Some(l)) = (&base, &scope) {
                if l.is_var() && l.sort() == var {
                    let top = step(up, &b.push(all), f.clone(), vec![n.clone()]);
                    let mut ps = vec![top];
                    if down == 22 {
                        ps.push(step(30, ctx, Formula::top(ctx.formula_sort()), vec![]));
                    }
                    out.push(step(down, ctx, f.clone(), ps));
                }
            }
        }
        R16R15 | R22R21 => {
            let (all, name) = if kind == R16R15 { (Label::WorldAll, fresh("u", &used)) } else { (Label::NeighAll, fresh("N", &used)) };
            let (up, down) = if kind == R16R15 { (15, 16) } else { (21, 22) };
            if let (Some(b), Some(l)) = (&base, &scope) {
                if *l == all {
                    let c = b.push(Label::var(&name));
                    let mut ps = vec![n.clone()];
                    if down == 22 {
                        ps.push(step(30, &c, Formula::top(c.formula_sort()), vec![]));
                    }
                    out.push(step(up, ctx, f.clone(), vec![step(down, &c, f.clone(), ps)]));
                }
            }
        }
        R17R19 | R18R20 => {
            let (some, name, intro, elim) = if kind == R17R19 {
                (Label::WorldSome, fresh("v", &used), 17, 18)
            } else {
                (Label::NeighSome, fresh("K", &used), 19, 20)
            };
            if let (Some(b), Some(l)) = (&base, &scope) {
                if *l == some {
                    let c = b.push(Label::var(&name));
                    let mut ps = vec![hyp(id, &c, f)];
                    if intro == 19 {
                        ps.push(n.clone());
                    }
                    let minor = step(intro, ctx, f.clone(), ps);
                    out.push(step(elim, ctx, f.clone(), vec![n.clone(), minor]).discharging(&[id]));
                }
            }
        }
        R23Cycle | R24Cycle => {
            let (idx, incl): (Label, fn(String) -> Formula) =
                if kind == R23Cycle { (Label::WorldSome, Formula::Cont) } else { (Label::WorldAll, Formula::Sub) };
            let rule = if kind == R23Cycle { 23 } else { 24 };
            if let (Some(b), Some(Label::NeighVar(m))) = (&base, &scope) {
                if f.index() == Some(&idx) {
                    let pool = pool(d, path);
                    for (_, x) in &pool {
                        let Some(Label::NeighVar(k)) = x.context().scope() else { continue };
                        if x.context().base().as_ref() != Some(b) || *x.formula() != incl(m.clone()) || k == m {
                            continue;
                        }
                        let ck = x.context().clone();
                        let Some((_, y)) = pool.iter().find(|(_, y)| y.context() == ctx && *y.formula() == incl(k.clone())) else {
                            continue;
                        };
                        let inner = step(rule, &ck, f.clone(), vec![n.clone(), (*x).clone()]);
                        out.push(step(rule, ctx, f.clone(), vec![inner, (*y).clone()]));
                    }
                }
            }
        }
        R25Cycle | R26Cycle => {
            let incl: fn(String) -> Formula = if kind == R25Cycle { Formula::Cont } else { Formula::Sub };
            let rule = if kind == R25Cycle { 25 } else { 26 };
            let target = match f {
                Formula::Cont(p) if kind == R25Cycle => Some(p.clone()),
                Formula::Sub(p) if kind == R26Cycle => Some(p.clone()),
                _ => None,
            };
            if let (Some(b), Some(p)) = (&base, target) {
                // [Δ,K] incl(P) from [Δ,K] incl(M) and [Δ,M] incl(P); [Δ,K] incl(M) from [Δ,K] incl(P) and [Δ,P] incl(M)
                let pool = pool(d, path);
                for (_, x) in &pool {
                    let Some(Label::NeighVar(m)) = x.context().scope() else { continue };
                    if x.context().base().as_ref() != Some(b) || *x.formula() != incl(p.clone()) {
                        continue;
                    }
                    let back = b.push(Label::var(&p));
                    let Some((_, y)) = pool.iter().find(|(_, y)| *y.context() == back && *y.formula() == incl(m.clone())) else {
                        continue;
                    };
                    let inner = step(rule, ctx, incl(m.clone()), vec![n.clone(), (*y).clone()]);
                    out.push(step(rule, ctx, f.clone(), vec![inner, (*x).clone()]));
                }
            }
        }
        _ => {}
    }
    out
}

/// Subderivations that may be copied to `path` without leaving hypotheses unbound.
fn pool<'a>(d: &'a Derivation, path: &[usize]) -> Vec<(Vec<usize>, &'a Node)> {
    let ok = available(d, path);
    d.walk()
        .into_iter()
        .filter(|(_, x)| matches!(x, Node::Step { .. }) && x.open_ids().is_subset(&ok))
        .collect()
}

/// First site where a detour of `kind` can be injected and the result still checks.
pub fn inject(d: &Derivation, kind: RedexKind, profile: Profile) -> Option<Derivation> {
    for (path, n) in d.walk() {
        if matches!(n, Node::Hyp { .. }) {
            continue;
        }
        for cand in candidates(d, &path, n, kind) {
            let mut out = d.clone();
            *out.at_path_mut(&path).unwrap() = cand;
            if check(&out, profile).ok && find_redexes(&out).iter().any(|r| r.kind == kind) {
                return Some(out);
            }
        }
    }
    None
}
