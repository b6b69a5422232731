//! Natural-deduction proof checking, and lifting proofs into a context.

mod rules;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::proof::{Derivation, Node, OpenHyp, Profile, Rule};
use crate::syntax::{expand_sugar, Context, Formula, Label, Sort};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// Child indices from the root.
    pub path: Vec<usize>,
    #[serde(serialize_with = "ser_rule")]
    pub rule: Option<Rule>,
    /// Letter of the violated restriction; `None` for shape and bookkeeping errors.
    pub restriction: Option<char>,
    pub message: String,
}

fn ser_rule<S: serde::Serializer>(r: &Option<Rule>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(r.alias()),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OpenHypothesis {
    pub id: u32,
    pub context: String,
    pub formula: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub ok: bool,
    pub diagnostics: Vec<Diagnostic>,
    pub open_hypotheses: Vec<OpenHypothesis>,
}

impl CheckReport {
    /// First diagnostic naming `letter` for `rule`, if any.
    pub fn violates(&self, rule: Rule, letter: char) -> bool {
        self.diagnostics.iter().any(|d| d.rule == Some(rule) && d.restriction == Some(letter))
    }
}

fn diag(path: &[usize], rule: Option<Rule>, restriction: Option<char>, body: &str) -> Diagnostic {
    let message = match (rule, restriction) {
        (Some(r), Some(c)) => format!("{r} restriction ({c}): {body}"),
        (Some(r), None) => format!("{r}: {body}"),
        (None, _) => body.to_string(),
    };
    Diagnostic { path: path.to_vec(), rule, restriction, message }
}

/// Checks every step of `d` under `profile`. `<=` is expanded first.
pub fn check(d: &Derivation, profile: Profile) -> CheckReport {
    let d = d.map_all(&expand_sugar, &Context::clone);
    let mut diagnostics = Vec::new();
    let mut leaves: BTreeMap<u32, (Vec<usize>, Context, Formula)> = BTreeMap::new();

    if matches!(d, Node::Hyp { .. }) {
        diagnostics.push(diag(&[], None, None, "a hypothesis must be introduced by rule 10"));
    }
    for (path, n) in d.walk() {
        let ctx = n.context();
        if !ctx.is_alternating() || !ctx.parity_holds() {
            diagnostics.push(diag(&path, n.rule(), None, &format!("context {ctx} does not alternate N, W from the bottom")));
        }
        match n {
            Node::Hyp { id, context, formula } => {
                match leaves.get(id) {
                    Some((first, c, f)) if c != context || f != formula => diagnostics.push(diag(
                        &path,
                        None,
                        None,
                        &format!("hypothesis {id} differs from its occurrence at {first:?}"),
                    )),
                    Some(_) => {}
                    None => {
                        leaves.insert(*id, (path.clone(), context.clone(), formula.clone()));
                    }
                }
            }
            Node::Step { rule, premises, .. } => {
                if *rule != Rule::Num(10) && premises.iter().any(|p| matches!(p, Node::Hyp { .. })) {
                    diagnostics.push(diag(&path, Some(*rule), None, "a hypothesis may only be the premise of rule 10"));
                }
                for (letter, msg) in rules::check_step(n, profile) {
                    diagnostics.push(diag(&path, Some(*rule), letter, &msg));
                }
            }
        }
    }
    // an id discharged twice on one branch
    for (path, n) in d.walk() {
        for &id in n.discharge() {
            let below = (0..path.len()).map(|k| d.at_path(&path[..k]).unwrap());
            if below.into_iter().any(|m| m.discharge().contains(&id)) {
                diagnostics.push(diag(&path, n.rule(), None, &format!("hypothesis {id} is discharged again below")));
            }
        }
    }

    let open_hypotheses = d.open_hyps().into_iter().map(open_entry).collect();
    CheckReport { ok: diagnostics.is_empty(), diagnostics, open_hypotheses }
}

fn open_entry(h: OpenHyp) -> OpenHypothesis {
    OpenHypothesis {
        id: h.id,
        context: crate::parser::render_context(&h.context),
        formula: crate::parser::render_formula(&h.formula),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("derivation has open hypotheses: {0:?}")]
    OpenHypotheses(Vec<u32>),
    #[error("variable `{0}` already occurs in the derivation")]
    NotFresh(String),
    #[error("suffix {0} must be alternating variables ending in a world variable")]
    BadSuffix(Context),
}

/// The default suffix `[N,u]`, renamed away from the variables of `d`.
pub fn fresh_suffix(d: &Derivation) -> Context {
    let used = d.variables();
    let pick = |base: &str| {
        (0..)
            .map(|i| if i == 0 { base.to_string() } else { format!("{base}{i}") })
            .find(|v| !used.contains(v))
            .unwrap()
    };
    Context::new(vec![Label::var(&pick("N")), Label::var(&pick("u"))])
}

/// Puts `suffix` below every context of a closed derivation.
///
/// Rule 9 always concludes in the empty context, so each use of it is
/// followed by rule 8 and one rule 13 per suffix label.
pub fn lift(d: &Derivation, suffix: &Context) -> Result<Derivation, LiftError> {
    let open = d.open_ids();
    if !open.is_empty() {
        return Err(LiftError::OpenHypotheses(open.into_iter().collect()));
    }
    if suffix.is_empty() || !suffix.is_alternating() || suffix.sort() != Sort::W || !suffix.labels().iter().all(Label::is_var) {
        return Err(LiftError::BadSuffix(suffix.clone()));
    }
    let used = d.variables();
    if let Some(v) = suffix.variables().into_iter().find(|v| used.contains(v)) {
        return Err(LiftError::NotFresh(v));
    }
    Ok(lift_node(d, suffix))
}

fn lift_node(n: &Node, suffix: &Context) -> Node {
    match n {
        Node::Hyp { id, context, formula } => Node::hyp(*id, suffix.concat(context), formula.clone()),
        Node::Step { rule: Rule::Num(9), premises, .. } => {
            let bot9 = Node::step(Rule::Num(9), Context::empty(), Formula::BotN, premises.iter().map(|p| lift_node(p, suffix)).collect());
            let packed = Formula::BotN.labels(suffix.labels().iter().rev().cloned());
            let mut cur = Node::step(Rule::Num(8), Context::empty(), packed, vec![bot9]);
            let mut ctx = Context::empty();
            for l in suffix.labels() {
                ctx = ctx.push(l.clone());
                let Formula::Labeled(inner, _) = cur.formula().clone() else { unreachable!() };
                cur = Node::step(Rule::Num(13), ctx.clone(), *inner, vec![cur]);
            }
            cur
        }
        Node::Step { rule, context, formula, premises, discharge } => Node::Step {
            rule: *rule,
            context: suffix.concat(context),
            formula: formula.clone(),
            premises: premises.iter().map(|p| lift_node(p, suffix)).collect(),
            discharge: discharge.clone(),
        },
    }
}
