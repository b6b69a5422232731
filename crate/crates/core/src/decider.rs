//! Satisfiability and validity of N-sort sentences.
//!
//! Two phases. Small frames are enumerated first, in the canonical order of
//! the bounded search, so short answers come with the smallest model. When
//! that finds nothing, world types are eliminated: a type assigns truth
//! values to the atoms and to the neighbourhood-labelled subformulas, and it
//! survives while some chain of neighbourhoods built from surviving types
//! realizes it. A neighbourhood is summarized by which world-label arguments
//! hold somewhere in it and which hold everywhere, since nothing else of it
//! is visible to a formula.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::model::{validate, Assignment, Frame, Model, Structure};
use crate::parser::{model_to_json, render_formula, ModelDoc};
use crate::semantics::{satisfies, valid_bounded, BoundedVerdict, EvalError};
use crate::syntax::{classify, expand_sugar, flat_depth, label_occurrences, label_rank, Formula, Label, Sort};

pub const DEFAULT_MAX_WORLDS: usize = 3;
pub const DEFAULT_BUDGET: u64 = 20_000_000;

/// Type elimination gives up past this many atoms plus neighbourhood-labelled subformulas.
const MAX_TYPE_BITS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("not a sentence: {0}")]
    NotSentence(String),
    #[error("decider takes N-sort sentences, got a W-sort one")]
    WSort,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelBounds {
    /// Label rank of the sentence.
    pub depth: i64,
    pub neigh_per_world: BTreeMap<i64, usize>,
    pub worlds_per_neigh: BTreeMap<i64, usize>,
}

impl ModelBounds {
    /// Reference world plus every budgeted world.
    pub fn world_total(&self) -> usize {
        1 + self
            .neigh_per_world
            .iter()
            .map(|(l, n)| n * self.worlds_per_neigh.get(l).copied().unwrap_or(0))
            .sum::<usize>()
    }
}

fn sentence(f: &Formula) -> Result<Formula, DecideError> {
    let f = expand_sugar(f);
    if !f.is_sentence() {
        return Err(DecideError::NotSentence(render_formula(&f)));
    }
    match classify(&f).map_err(EvalError::from)? {
        Sort::N => Ok(f),
        Sort::W => Err(DecideError::WSort),
    }
}

pub fn bounds(f: &Formula) -> Result<ModelBounds, DecideError> {
    let f = sentence(f)?;
    let k = label_rank(&f).to_integer();
    let depths: Vec<_> = label_occurrences(&f).iter().map(|o| flat_depth(&f, o).unwrap()).collect();
    let count = |d: crate::syntax::Rational| depths.iter().filter(|&&x| x == d).count();
    let mut neigh = BTreeMap::new();
    let mut worlds = BTreeMap::new();
    for n in 0..k.max(1) {
        let level = crate::syntax::Rational::from_integer(n);
        neigh.insert(n, count(level));
        worlds.insert(n, count(level + crate::syntax::Rational::new(1, 2)) + count(level));
    }
    Ok(ModelBounds { depth: k, neigh_per_world: neigh, worlds_per_neigh: worlds })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Outcome {
    Valid,
    Unsat,
    Sat,
    Countermodel,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    /// Concrete models visited.
    pub models: u64,
    /// World types considered.
    pub types: u64,
    /// Elimination rounds.
    pub rounds: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub model: Option<ModelDoc>,
    /// The sentence lies in the fragment of conjunction, implication and the `+`, `@+`, `@*` labels.
    pub fragment_certified: bool,
    /// Type elimination was skipped and the answer rests on frames up to `max_worlds`.
    pub bound_limited: bool,
    pub stats: Stats,
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("verdict", &self.outcome)?;
        if let Some(doc) = &self.model {
            m.serialize_entry("model", &model_to_json(doc))?;
        }
        m.serialize_entry("fragment_certified", &self.fragment_certified)?;
        m.serialize_entry("bound_limited", &self.bound_limited)?;
        m.serialize_entry("stats", &self.stats)?;
        m.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    /// Largest frame for the concrete phase and for the fallback.
    pub max_worlds: usize,
    pub budget: u64,
}

impl Default for Options {
    fn default() -> Options {
        Options { max_worlds: DEFAULT_MAX_WORLDS, budget: DEFAULT_BUDGET }
    }
}

pub fn in_fragment(f: &Formula) -> bool {
    let ok = match f {
        Formula::Atom(_) | Formula::TopN | Formula::BotN | Formula::TopW | Formula::BotW => true,
        Formula::And(..) | Formula::Implies(..) => true,
        Formula::Labeled(_, l) => matches!(l, Label::WorldSome | Label::NeighSome | Label::NeighAll),
        _ => false,
    };
    ok && f.children().into_iter().all(in_fragment)
}

pub fn decide_sat(f: &Formula, opts: Options) -> Result<Verdict, DecideError> {
    let f = sentence(f)?;
    let fragment_certified = in_fragment(&f);
    let mut stats = Stats::default();

    let small = bounds(&f)?.world_total().min(opts.max_worlds).max(1);
    if let Some(doc) = concrete(&f, small, opts.budget, &mut stats)? {
        return Ok(Verdict { outcome: Outcome::Sat, model: Some(doc), fragment_certified, bound_limited: false, stats });
    }
    match Types::new(&f) {
        Some(t) => {
            let found = t.solve(&f, &mut stats);
            let model = found.map(|doc| certify(&f, doc)).transpose()?;
            let outcome = if model.is_some() { Outcome::Sat } else { Outcome::Unsat };
            Ok(Verdict { outcome, model, fragment_certified, bound_limited: false, stats })
        }
        None => {
            let doc = concrete(&f, opts.max_worlds, opts.budget, &mut stats)?;
            let outcome = if doc.is_some() { Outcome::Sat } else { Outcome::Unsat };
            let bound_limited = doc.is_none();
            Ok(Verdict { outcome, model: doc, fragment_certified, bound_limited, stats })
        }
    }
}

pub fn decide_valid(f: &Formula, opts: Options) -> Result<Verdict, DecideError> {
    let g = sentence(f)?;
    let mut v = decide_sat(&Formula::not(g.clone()), opts)?;
    v.fragment_certified = in_fragment(&g);
    v.outcome = match v.outcome {
        Outcome::Sat => Outcome::Countermodel,
        _ => Outcome::Valid,
    };
    Ok(v)
}

/// First model of `f` on frames of up to `n` worlds.
fn concrete(f: &Formula, n: usize, budget: u64, stats: &mut Stats) -> Result<Option<ModelDoc>, DecideError> {
    match valid_bounded(&Formula::not(f.clone()), n, budget.saturating_sub(stats.models)) {
        Ok(BoundedVerdict::Valid { models }) => {
            stats.models += models;
            Ok(None)
        }
        Ok(BoundedVerdict::Countermodel { model, models }) => {
            stats.models += models;
            Ok(Some(certify(f, model.0)?))
        }
        Err(EvalError::Budget(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Re-checks a model before it leaves the decider.
fn certify(f: &Formula, doc: ModelDoc) -> Result<ModelDoc, DecideError> {
    let report = validate(&doc.model.frame, &doc.model.reference, None);
    assert!(report.is_valid(), "decider built an invalid frame: {report:?}");
    let s = Structure::Model(doc.model.clone());
    assert!(satisfies(&s, f, &Assignment::default())?, "decider model does not satisfy {}", render_formula(f));
    Ok(doc)
}

/// Subformula tables for type elimination.
struct Types {
    atoms: Vec<String>,
    /// Neighbourhood-labelled subformulas: argument and whether the label is `@*`.
    modal: Vec<(Formula, bool)>,
    /// Arguments of world labels.
    args: Vec<Formula>,
}

/// (somewhere, everywhere) over `args`.
type Summary = (u64, u64);

struct Realizer {
    summaries: Vec<Summary>,
    /// For each summary, the patterns whose join it is.
    makers: Vec<Vec<u64>>,
}

impl Types {
    fn new(f: &Formula) -> Option<Types> {
        let mut t = Types { atoms: Vec::new(), modal: Vec::new(), args: Vec::new() };
        t.collect(f);
        t.atoms.sort();
        t.atoms.dedup();
        (t.atoms.len() + t.modal.len() <= MAX_TYPE_BITS && t.args.len() <= 6).then_some(t)
    }

    fn collect(&mut self, f: &Formula) {
        match f {
            Formula::Atom(a) => self.atoms.push(a.clone()),
            Formula::Labeled(a, l) => {
                let entry = match l {
                    Label::NeighAll => Some((&mut self.modal, ((**a).clone(), true))),
                    Label::NeighSome => Some((&mut self.modal, ((**a).clone(), false))),
                    _ => None,
                };
                if let Some((v, e)) = entry {
                    if !v.contains(&e) {
                        v.push(e);
                    }
                } else if !self.args.contains(a) {
                    self.args.push((**a).clone());
                }
            }
            _ => {}
        }
        for c in f.children() {
            self.collect(c);
        }
    }

    fn bits(&self) -> usize {
        self.atoms.len() + self.modal.len()
    }

    fn eval_n(&self, f: &Formula, t: u64) -> bool {
        match f {
            Formula::Atom(a) => t >> self.atoms.iter().position(|x| x == a).unwrap() & 1 == 1,
            Formula::TopN => true,
            Formula::BotN => false,
            Formula::Not(a) => !self.eval_n(a, t),
            Formula::And(a, b) => self.eval_n(a, t) && self.eval_n(b, t),
            Formula::Or(a, b) => self.eval_n(a, t) || self.eval_n(b, t),
            Formula::Implies(a, b) => !self.eval_n(a, t) || self.eval_n(b, t),
            Formula::Labeled(a, l) => {
                let key = ((**a).clone(), *l == Label::NeighAll);
                let i = self.modal.iter().position(|m| *m == key).unwrap();
                t >> (self.atoms.len() + i) & 1 == 1
            }
            _ => unreachable!("N-sort sentence"),
        }
    }

    fn eval_w(&self, f: &Formula, (some, every): Summary) -> bool {
        match f {
            Formula::TopW => true,
            Formula::BotW => false,
            Formula::Not(a) => !self.eval_w(a, (some, every)),
            Formula::And(a, b) => self.eval_w(a, (some, every)) && self.eval_w(b, (some, every)),
            Formula::Or(a, b) => self.eval_w(a, (some, every)) || self.eval_w(b, (some, every)),
            Formula::Implies(a, b) => !self.eval_w(a, (some, every)) || self.eval_w(b, (some, every)),
            Formula::Labeled(a, l) => {
                let i = self.args.iter().position(|x| x == &**a).unwrap();
                let set = if *l == Label::WorldAll { every } else { some };
                set >> i & 1 == 1
            }
            _ => unreachable!("W-sort sentence"),
        }
    }

    fn pattern(&self, t: u64) -> u64 {
        self.args.iter().enumerate().filter(|(_, a)| self.eval_n(a, t)).fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Every summary of a non-empty set of the given patterns.
    fn realizer(&self, patterns: &BTreeSet<u64>) -> Realizer {
        let mut index: HashMap<Summary, usize> = HashMap::new();
        let mut r = Realizer { summaries: Vec::new(), makers: Vec::new() };
        for &p in patterns {
            let base: Vec<usize> = (0..r.summaries.len()).collect();
            let mut add = |s: Summary, m: Vec<u64>, r: &mut Realizer| {
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(s) {
                    e.insert(r.summaries.len());
                    r.summaries.push(s);
                    r.makers.push(m);
                }
            };
            add((p, p), vec![p], &mut r);
            for i in base {
                let (s, e) = r.summaries[i];
                let mut m = r.makers[i].clone();
                m.push(p);
                add((s | p, e & p), m, &mut r);
            }
        }
        r
    }

    /// A chain of summary indices realizing the modal bits of `t`, if any.
    fn chain(&self, t: u64, real: &Realizer) -> Option<Vec<usize>> {
        // true `@*` and false `@+` constrain every neighbourhood; the others
        // want one neighbourhood each, refuting or satisfying the argument
        let mut keep: Vec<(&Formula, bool)> = Vec::new();
        let mut wants: Vec<(&Formula, bool)> = Vec::new();
        for (i, (arg, every)) in self.modal.iter().enumerate() {
            let on = t >> (self.atoms.len() + i) & 1 == 1;
            if *every == on {
                keep.push((arg, on));
            } else {
                wants.push((arg, on));
            }
        }
        if wants.is_empty() {
            return Some(Vec::new());
        }
        let full = (1u32 << wants.len()) - 1;
        let mut order: Vec<usize> = (0..real.summaries.len())
            .filter(|&i| keep.iter().all(|(a, v)| self.eval_w(a, real.summaries[i]) == *v))
            .collect();
        order.sort_by_key(|&i| {
            let (s, e) = real.summaries[i];
            (s.count_ones() as i64 - e.count_ones() as i64, i)
        });
        let below = |a: Summary, b: Summary| a != b && a.0 & !b.0 == 0 && b.1 & !a.1 == 0;
        // masks reachable by chains topped at each element, with a predecessor for rebuilding
        let mut reach: Vec<HashMap<u32, Option<(usize, u32)>>> = Vec::with_capacity(order.len());
        for (k, &i) in order.iter().enumerate() {
            let q = real.summaries[i];
            let hit = wants
                .iter()
                .enumerate()
                .filter(|(_, (a, v))| self.eval_w(a, q) == *v)
                .fold(0u32, |acc, (j, _)| acc | 1 << j);
            let mut here: HashMap<u32, Option<(usize, u32)>> = HashMap::new();
            here.insert(hit, None);
            for j in 0..k {
                if !below(real.summaries[order[j]], q) {
                    continue;
                }
                for &m in reach[j].keys() {
                    here.entry(m | hit).or_insert(Some((j, m)));
                }
            }
            if here.contains_key(&full) {
                let mut out = vec![i];
                let (mut pos, mut mask) = (k, full);
                while let Some((j, m)) = if pos == k { here[&mask] } else { reach[pos][&mask] } {
                    out.push(order[j]);
                    pos = j;
                    mask = m;
                }
                out.reverse();
                return Some(out);
            }
            reach.push(here);
        }
        None
    }

    fn solve(&self, f: &Formula, stats: &mut Stats) -> Option<ModelDoc> {
        let consistent: Vec<u64> = (0..1u64 << self.bits()).collect();
        stats.types += consistent.len() as u64;
        let mut alive: BTreeSet<u64> = consistent.into_iter().collect();
        // the modal bits decide realizability, so group by them
        let shift = self.atoms.len();
        loop {
            stats.rounds += 1;
            let patterns: BTreeSet<u64> = alive.iter().map(|&t| self.pattern(t)).collect();
            let real = self.realizer(&patterns);
            let mut ok: HashMap<u64, bool> = HashMap::new();
            let before = alive.len();
            alive.retain(|&t| *ok.entry(t >> shift).or_insert_with(|| self.chain(t, &real).is_some()));
            if alive.len() == before {
                break;
            }
        }
        let root = *alive.iter().find(|&&t| self.eval_n(f, t))?;
        Some(self.build(root, &alive))
    }

    /// A model whose worlds are types reached from `root`, one world per type.
    fn build(&self, root: u64, alive: &BTreeSet<u64>) -> ModelDoc {
        let patterns: BTreeSet<u64> = alive.iter().map(|&t| self.pattern(t)).collect();
        let real = self.realizer(&patterns);
        let mut rep: BTreeMap<u64, u64> = BTreeMap::new();
        for &t in alive.iter().rev() {
            rep.insert(self.pattern(t), t);
        }
        let mut ids: Vec<u64> = vec![root];
        let mut seen: HashSet<u64> = HashSet::from([root]);
        let mut chains: Vec<Vec<Vec<u64>>> = Vec::new();
        let mut i = 0;
        while i < ids.len() {
            let t = ids[i];
            let steps = self.chain(t, &real).expect("surviving type is realizable");
            let mut acc: BTreeSet<u64> = BTreeSet::new();
            let mut chain: Vec<Vec<u64>> = Vec::new();
            for s in steps {
                let before = acc.len();
                acc.extend(real.makers[s].iter().copied());
                if acc.len() == before && !chain.is_empty() {
                    continue;
                }
                let members: Vec<u64> = acc.iter().map(|p| rep[p]).collect();
                for &m in &members {
                    if seen.insert(m) {
                        ids.push(m);
                    }
                }
                chain.push(members);
            }
            chains.push(chain);
            i += 1;
        }
        let name = |t: u64| format!("w{}", ids.iter().position(|&x| x == t).unwrap());
        let worlds: Vec<String> = (0..ids.len()).map(|k| format!("w{k}")).collect();
        let mut nesting = BTreeMap::new();
        for (k, chain) in chains.iter().enumerate() {
            if !chain.is_empty() {
                nesting.insert(
                    worlds[k].clone(),
                    chain.iter().map(|n| n.iter().map(|&t| name(t)).collect()).collect(),
                );
            }
        }
        let valuation = self
            .atoms
            .iter()
            .enumerate()
            .map(|(j, a)| (a.clone(), ids.iter().filter(|&&t| t >> j & 1 == 1).map(|&t| name(t)).collect()))
            .collect();
        let frame = Frame { worlds, nesting, valuation };
        ModelDoc {
            model: Model { frame, reference: "w0".into() },
            reference_neighbourhood: None,
            assignment: Assignment::default(),
        }
    }
}
