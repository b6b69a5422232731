//! Satisfaction on models and templates, resolution through a context, and
//! brute-force bounded validity.

mod bounded;
mod fast;

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::model::{compile, validate_structure, Assignment, Compiled, Model, Structure, ValidationReport};
use crate::syntax::{classify, expand_sugar, fits, relocate, Context, Formula, Label, Sort, SortError};

pub use bounded::{
    consequence_bounded, valid_bounded, BoundedVerdict, FrameSpace, DEFAULT_BUDGET,
};
pub use fast::{FastEval, FastError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not assigned")]
    Unassigned(String),
    #[error("a {structure} needs an {expected}-sort formula, got {found}-sort")]
    SortMismatch { structure: &'static str, expected: Sort, found: Sort },
    #[error(transparent)]
    IllSorted(#[from] SortError),
    #[error("invalid structure: {}", .0.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(ValidationReport),
    #[error("not a sentence: {0}")]
    NotSentence(String),
    #[error("formulas of mixed sort")]
    MixedSorts,
    #[error("search budget of {0} exhausted")]
    Budget(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    /// `model w` or `template w {a,b}`.
    pub structure: String,
    pub formula: String,
    pub value: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvalOutcome {
    pub value: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceEntry>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Point {
    Model(usize),
    Template(usize, u64),
}

/// Assignment with world names resolved to indices.
#[derive(Clone, Debug, Default)]
pub struct CompiledAssignment {
    pub neigh: HashMap<String, u64>,
    pub world: HashMap<String, usize>,
}

impl CompiledAssignment {
    pub fn new(c: &Compiled, a: &Assignment) -> CompiledAssignment {
        CompiledAssignment {
            neigh: a.neigh.iter().map(|(k, v)| (k.clone(), c.mask(v))).collect(),
            world: a.world.iter().filter_map(|(k, w)| c.index.get(w).map(|&i| (k.clone(), i))).collect(),
        }
    }
}

/// Recursive evaluator over a compiled frame; `Prec` must already be expanded.
pub struct Evaluator<'a> {
    pub frame: &'a Compiled,
    pub sigma: &'a CompiledAssignment,
    trace: Option<Vec<TraceEntry>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(frame: &'a Compiled, sigma: &'a CompiledAssignment) -> Evaluator<'a> {
        Evaluator { frame, sigma, trace: None }
    }

    pub fn with_trace(mut self) -> Evaluator<'a> {
        self.trace = Some(Vec::new());
        self
    }

    pub fn take_trace(&mut self) -> Option<Vec<TraceEntry>> {
        self.trace.take()
    }

    fn neigh(&self, n: &str) -> Result<u64, EvalError> {
        self.sigma.neigh.get(n).copied().ok_or_else(|| EvalError::Unassigned(n.to_string()))
    }

    fn in_system(&self, chi: usize, n: u64) -> bool {
        self.frame.nesting[chi].contains(&n)
    }

    pub fn eval(&mut self, f: &Formula, at: Point) -> Result<bool, EvalError> {
        let v = self.eval_inner(f, at)?;
        if let Some(t) = &mut self.trace {
            let structure = match at {
                Point::Model(w) => format!("model {}", self.frame.names[w]),
                Point::Template(w, n) => format!(
                    "template {} {{{}}}",
                    self.frame.names[w],
                    self.frame.names_of(n).join(",")
                ),
            };
            t.push(TraceEntry { structure, formula: crate::parser::render_formula(f), value: v });
        }
        Ok(v)
    }

    fn eval_inner(&mut self, f: &Formula, at: Point) -> Result<bool, EvalError> {
        Ok(match (f, at) {
            (Formula::Not(a), _) => !self.eval(a, at)?,
            (Formula::And(a, b), _) => self.eval(a, at)? & self.eval(b, at)?,
            (Formula::Or(a, b), _) => self.eval(a, at)? | self.eval(b, at)?,
            (Formula::Implies(a, b), _) => !self.eval(a, at)? | self.eval(b, at)?,
            (Formula::Prec(..), _) => {
                let e = expand_sugar(f);
                self.eval(&e, at)?
            }
            (Formula::Atom(p), Point::Model(w)) => self.frame.atom(p) >> w & 1 == 1,
            (Formula::TopN, Point::Model(_)) => true,
            (Formula::BotN, Point::Model(_)) => false,
            (Formula::TopW, Point::Template(..)) => true,
            (Formula::BotW, Point::Template(..)) => false,
            (Formula::Cont(m), Point::Template(chi, n)) => {
                let sm = self.neigh(m)?;
                self.in_system(chi, sm) && sm & !n == 0
            }
            (Formula::Sub(m), Point::Template(chi, n)) => {
                let sm = self.neigh(m)?;
                self.in_system(chi, sm) && n & !sm == 0
            }
            (Formula::Labeled(a, l), Point::Model(chi)) => match l {
                Label::NeighAll => {
                    let frame = self.frame;
                    let mut all = true;
                    for &n in &frame.nesting[chi] {
                        all &= self.eval(a, Point::Template(chi, n))?;
                    }
                    all
                }
                Label::NeighSome => {
                    let frame = self.frame;
                    let mut any = false;
                    for &n in &frame.nesting[chi] {
                        any |= self.eval(a, Point::Template(chi, n))?;
                    }
                    any
                }
                Label::NeighVar(v) => {
                    let n = self.neigh(v)?;
                    // the reference neighbourhood of a template lies in the system
                    self.in_system(chi, n) && self.eval(a, Point::Template(chi, n))?
                }
                _ => return Err(mismatch(at, f)),
            },
            (Formula::Labeled(a, l), Point::Template(_, n)) => match l {
                Label::WorldAll => {
                    let mut all = true;
                    for w in bits(n) {
                        all &= self.eval(a, Point::Model(w))?;
                    }
                    all
                }
                Label::WorldSome => {
                    let mut any = false;
                    for w in bits(n) {
                        any |= self.eval(a, Point::Model(w))?;
                    }
                    any
                }
                Label::WorldVar(v) => {
                    let w = *self.sigma.world.get(v).ok_or_else(|| EvalError::Unassigned(v.clone()))?;
                    n >> w & 1 == 1 && self.eval(a, Point::Model(w))?
                }
                _ => return Err(mismatch(at, f)),
            },
            _ => return Err(mismatch(at, f)),
        })
    }
}

fn mismatch(at: Point, f: &Formula) -> EvalError {
    let (structure, expected) = match at {
        Point::Model(_) => ("model", Sort::N),
        Point::Template(..) => ("template", Sort::W),
    };
    EvalError::SortMismatch { structure, expected, found: expected.flip() }.with_found(f)
}

impl EvalError {
    fn with_found(self, f: &Formula) -> EvalError {
        match (self, classify(f)) {
            (EvalError::SortMismatch { structure, expected, .. }, Ok(s)) => {
                EvalError::SortMismatch { structure, expected, found: s }
            }
            (e, _) => e,
        }
    }
}

pub(crate) fn bits(m: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| m >> i & 1 == 1)
}

fn point_of(c: &Compiled, s: &Structure) -> Point {
    match s {
        Structure::Model(m) => Point::Model(c.index[&m.reference]),
        Structure::Template(t) => {
            Point::Template(c.index[&t.model.reference], c.mask(&t.neighbourhood))
        }
    }
}

/// Full evaluation with optional trace. The structure is validated first.
pub fn evaluate(s: &Structure, f: &Formula, sigma: &Assignment, trace: bool) -> Result<EvalOutcome, EvalError> {
    let report = validate_structure(s, Some(sigma));
    if !report.is_valid() {
        return Err(EvalError::Invalid(report));
    }
    let sort = classify(f)?;
    let (structure, expected) = match s {
        Structure::Model(_) => ("model", Sort::N),
        Structure::Template(_) => ("template", Sort::W),
    };
    if sort != expected {
        return Err(EvalError::SortMismatch { structure, expected, found: sort });
    }
    let c = compile(s.frame());
    let sig = CompiledAssignment::new(&c, sigma);
    let mut ev = Evaluator::new(&c, &sig);
    if trace {
        ev = ev.with_trace();
    }
    let value = ev.eval(f, point_of(&c, s))?;
    Ok(EvalOutcome { value, trace: ev.take_trace() })
}

pub fn satisfies(s: &Structure, f: &Formula, sigma: &Assignment) -> Result<bool, EvalError> {
    evaluate(s, f, sigma, false).map(|o| o.value)
}

/// `m` satisfies `f` relocated through `ctx`; false when `f` does not fit.
pub fn resolves(m: &Model, ctx: &Context, f: &Formula, sigma: &Assignment) -> Result<bool, EvalError> {
    if !fits(f, ctx) {
        return Ok(false);
    }
    satisfies(&Structure::Model(m.clone()), &relocate(f, ctx), sigma)
}
