//! Labels, formulas and contexts of the two-sorted language.
//!
//! Attributes are never stored as a separate list: a label stack is a chain of
//! `Labeled` nodes, innermost first, so `(a^S)^D` and `a^{S,D}` are the same tree.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Rational64;
use thiserror::Error;

pub type Rational = Rational64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    N,
    W,
}

impl Sort {
    pub fn flip(self) -> Sort {
        match self {
            Sort::N => Sort::W,
            Sort::W => Sort::N,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::N => "N",
            Sort::W => "W",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    /// `@*`
    NeighAll,
    /// `@+`
    NeighSome,
    NeighVar(String),
    /// `*`
    WorldAll,
    /// `+`
    WorldSome,
    WorldVar(String),
}

impl Label {
    /// Builds a variable label, choosing the sort from the initial letter.
    pub fn var(name: &str) -> Label {
        if name.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
            Label::NeighVar(name.to_string())
        } else {
            Label::WorldVar(name.to_string())
        }
    }

    pub fn sort(&self) -> Sort {
        match self {
            Label::NeighAll | Label::NeighSome | Label::NeighVar(_) => Sort::N,
            Label::WorldAll | Label::WorldSome | Label::WorldVar(_) => Sort::W,
        }
    }

    pub fn is_existential(&self) -> bool {
        matches!(self, Label::NeighSome | Label::WorldSome)
    }

    pub fn is_universal(&self) -> bool {
        matches!(self, Label::NeighAll | Label::WorldAll)
    }

    pub fn var_name(&self) -> Option<&str> {
        match self {
            Label::NeighVar(n) | Label::WorldVar(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        self.var_name().is_some()
    }

    pub fn token(&self) -> &str {
        match self {
            Label::NeighAll => "@*",
            Label::NeighSome => "@+",
            Label::WorldAll => "*",
            Label::WorldSome => "+",
            Label::NeighVar(n) | Label::WorldVar(n) => n,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    TopN,
    BotN,
    TopW,
    BotW,
    /// `cont(N)`: the reference neighbourhood contains N.
    Cont(String),
    /// `sub(N)`: the reference neighbourhood is contained in N.
    Sub(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Labeled(Box<Formula>, Label),
    /// Comparative possibility `a <= b`; removed by `expand_sugar`.
    Prec(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn prec(a: Formula, b: Formula) -> Formula {
        Formula::Prec(Box::new(a), Box::new(b))
    }

    pub fn label(self, l: Label) -> Formula {
        Formula::Labeled(Box::new(self), l)
    }

    /// Appends labels left to right; the last one becomes the index.
    pub fn labels<I: IntoIterator<Item = Label>>(self, ls: I) -> Formula {
        ls.into_iter().fold(self, Formula::label)
    }

    pub fn bot(sort: Sort) -> Formula {
        match sort {
            Sort::N => Formula::BotN,
            Sort::W => Formula::BotW,
        }
    }

    pub fn top(sort: Sort) -> Formula {
        match sort {
            Sort::N => Formula::TopN,
            Sort::W => Formula::TopW,
        }
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, Formula::BotN | Formula::BotW)
    }

    /// The index (top label), if any.
    pub fn index(&self) -> Option<&Label> {
        match self {
            Formula::Labeled(_, l) => Some(l),
            _ => None,
        }
    }

    /// Splits off the whole attribute: base formula and labels bottom to top.
    pub fn attribute(&self) -> (&Formula, Vec<&Label>) {
        let mut labels = Vec::new();
        let mut cur = self;
        while let Formula::Labeled(inner, l) = cur {
            labels.push(l);
            cur = inner;
        }
        labels.reverse();
        (cur, labels)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Not(a) | Formula::Labeled(a, _) => vec![a],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Prec(a, b) => vec![a, b],
            _ => vec![],
        }
    }

    pub fn at_path(&self, path: &[usize]) -> Option<&Formula> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    /// Number of connectives (¬ ∧ ∨ →); labels are not counted.
    pub fn connectives(&self) -> usize {
        match self {
            Formula::Not(a) => 1 + a.connectives(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.connectives() + b.connectives()
            }
            Formula::Prec(a, b) => 1 + a.connectives() + b.connectives(),
            Formula::Labeled(a, _) => a.connectives(),
            _ => 0,
        }
    }

    pub fn depth(&self) -> usize {
        self.children().iter().map(|c| c.depth() + 1).max().unwrap_or(0)
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        if let Formula::Atom(a) = self {
            out.insert(a.clone());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    /// Variable names occurring in labels or in inclusion atoms.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Cont(n) | Formula::Sub(n) => {
                out.insert(n.clone());
            }
            Formula::Labeled(_, l) => {
                if let Some(n) = l.var_name() {
                    out.insert(n.to_string());
                }
            }
            _ => {}
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    pub fn mentions(&self, var: &str) -> bool {
        match self {
            Formula::Cont(n) | Formula::Sub(n) if n == var => true,
            Formula::Labeled(_, l) if l.var_name() == Some(var) => true,
            _ => self.children().iter().any(|c| c.mentions(var)),
        }
    }

    /// No variables and no inclusion atoms.
    pub fn is_sentence(&self) -> bool {
        match self {
            Formula::Cont(_) | Formula::Sub(_) => false,
            Formula::Labeled(_, l) if l.is_var() => false,
            _ => self.children().iter().all(|c| c.is_sentence()),
        }
    }

    pub fn has_sugar(&self) -> bool {
        matches!(self, Formula::Prec(..)) || self.children().iter().any(|c| c.has_sugar())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("sort error at {path:?}: {message}")]
pub struct SortError {
    pub path: Vec<usize>,
    pub message: String,
}

/// Sort of a syntax tree, or the path to the first ill-sorted subterm.
pub fn classify(f: &Formula) -> Result<Sort, SortError> {
    let mut path = Vec::new();
    classify_at(f, &mut path)
}

fn sort_err(path: &[usize], message: String) -> SortError {
    SortError { path: path.to_vec(), message }
}

fn classify_at(f: &Formula, path: &mut Vec<usize>) -> Result<Sort, SortError> {
    match f {
        Formula::Atom(_) | Formula::TopN | Formula::BotN => Ok(Sort::N),
        Formula::TopW | Formula::BotW => Ok(Sort::W),
        Formula::Cont(n) | Formula::Sub(n) => {
            if Label::var(n).sort() == Sort::N {
                Ok(Sort::W)
            } else {
                Err(sort_err(path, format!("`{n}` is not a neighbourhood variable")))
            }
        }
        Formula::Not(a) => {
            path.push(0);
            let s = classify_at(a, path)?;
            path.pop();
            Ok(s)
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            path.push(0);
            let sa = classify_at(a, path)?;
            path.pop();
            path.push(1);
            let sb = classify_at(b, path)?;
            path.pop();
            if sa == sb {
                Ok(sa)
            } else {
                Err(sort_err(path, format!("connective joins {sa}-sort and {sb}-sort formulas")))
            }
        }
        Formula::Prec(a, b) => {
            path.push(0);
            let sa = classify_at(a, path)?;
            path.pop();
            path.push(1);
            let sb = classify_at(b, path)?;
            path.pop();
            if sa == Sort::N && sb == Sort::N {
                Ok(Sort::N)
            } else {
                Err(sort_err(path, format!("`<=` needs N-sort operands, got {sa} and {sb}")))
            }
        }
        Formula::Labeled(a, l) => {
            path.push(0);
            let s = classify_at(a, path)?;
            path.pop();
            if s != l.sort() {
                Ok(l.sort())
            } else {
                Err(sort_err(
                    path,
                    format!("{}-sort label `{l}` applied to a {s}-sort formula", l.sort()),
                ))
            }
        }
    }
}

/// Stack of labels attached to an inference step; the last label is the scope.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context(pub Vec<Label>);

impl Context {
    pub fn empty() -> Context {
        Context(Vec::new())
    }

    pub fn new(labels: Vec<Label>) -> Context {
        Context(labels)
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scope(&self) -> Option<&Label> {
        self.0.last()
    }

    /// N when the scope is N-sort, W when empty or the scope is W-sort.
    pub fn sort(&self) -> Sort {
        match self.scope() {
            Some(l) => l.sort(),
            None => Sort::W,
        }
    }

    /// Sort a formula needs in order to fit here.
    pub fn formula_sort(&self) -> Sort {
        self.sort().flip()
    }

    pub fn push(&self, l: Label) -> Context {
        let mut v = self.0.clone();
        v.push(l);
        Context(v)
    }

    /// Context without its scope.
    pub fn base(&self) -> Option<Context> {
        if self.0.is_empty() {
            None
        } else {
            Some(Context(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// Labels alternate sort bottom to top, starting with an N-sort label.
    pub fn is_alternating(&self) -> bool {
        self.0.iter().enumerate().all(|(i, l)| {
            let want = if i % 2 == 0 { Sort::N } else { Sort::W };
            l.sort() == want
        })
    }

    /// Odd size exactly for N-sort contexts.
    pub fn parity_holds(&self) -> bool {
        (self.sort() == Sort::N) == (self.0.len() % 2 == 1)
    }

    pub fn has_existential(&self) -> bool {
        self.0.iter().any(Label::is_existential)
    }

    pub fn has_universal(&self) -> bool {
        self.0.iter().any(Label::is_universal)
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.0.contains(l)
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.0.iter().any(|l| l.var_name() == Some(var))
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.0.iter().filter_map(|l| l.var_name().map(str::to_string)).collect()
    }

    pub fn concat(&self, other: &Context) -> Context {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Context(v)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("]")
    }
}

/// `f^{reverse(ctx)}`: the formula relocated to the empty context.
pub fn relocate(f: &Formula, ctx: &Context) -> Formula {
    ctx.0.iter().rev().fold(f.clone(), |acc, l| acc.label(l.clone()))
}

pub fn fits(f: &Formula, ctx: &Context) -> bool {
    let Ok(mut s) = classify(f) else {
        return false;
    };
    for l in ctx.0.iter().rev() {
        if l.sort() == s {
            return false;
        }
        s = s.flip();
    }
    s == Sort::N
}

pub fn label_rank(f: &Formula) -> Rational {
    match f {
        Formula::Labeled(a, _) => label_rank(a) + Rational::new(1, 2),
        Formula::Not(a) => label_rank(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            label_rank(a).max(label_rank(b))
        }
        // (b^+ -> a^+)^@*
        Formula::Prec(a, b) => label_rank(a).max(label_rank(b)) + 1,
        // W-sort atoms sit half a level up, so N-sort ranks stay whole
        Formula::TopW | Formula::BotW | Formula::Cont(_) | Formula::Sub(_) => Rational::new(1, 2),
        _ => Rational::from_integer(0),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OccurrenceError {
    #[error("no subformula at path {0:?}")]
    NoSuchPath(Vec<usize>),
    #[error("subformula at path {0:?} is not labelled")]
    NotALabel(Vec<usize>),
}

/// Paths of every label occurrence, outermost first.
pub fn label_occurrences(f: &Formula) -> Vec<Vec<usize>> {
    fn go(f: &Formula, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if matches!(f, Formula::Labeled(..)) {
            out.push(path.clone());
        }
        for (i, c) in f.children().into_iter().enumerate() {
            path.push(i);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(f, &mut Vec::new(), &mut out);
    out
}

/// Relative label depth of the label indexing the subformula at `occ`.
pub fn flat_depth(f: &Formula, occ: &[usize]) -> Result<Rational, OccurrenceError> {
    let sub = f
        .at_path(occ)
        .ok_or_else(|| OccurrenceError::NoSuchPath(occ.to_vec()))?;
    if !matches!(sub, Formula::Labeled(..)) {
        return Err(OccurrenceError::NotALabel(occ.to_vec()));
    }
    Ok(label_rank(f) - label_rank(sub))
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("`{0}` is not a variable")]
    NotAVariable(String),
    #[error("cannot substitute {new} for {old}: sorts differ")]
    CrossSort { old: String, new: String },
}

/// Replaces every occurrence of variable `old` by `new` (labels and inclusion atoms).
pub fn substitute(f: &Formula, old: &str, new: &str) -> Result<Formula, SubstError> {
    check_same_sort(old, new)?;
    Ok(rename_var(f, old, new))
}

pub(crate) fn check_same_sort(old: &str, new: &str) -> Result<(), SubstError> {
    for v in [old, new] {
        if v.is_empty() || !v.chars().next().unwrap().is_ascii_alphabetic() {
            return Err(SubstError::NotAVariable(v.to_string()));
        }
    }
    if Label::var(old).sort() != Label::var(new).sort() {
        return Err(SubstError::CrossSort { old: old.into(), new: new.into() });
    }
    Ok(())
}

pub(crate) fn rename_var(f: &Formula, old: &str, new: &str) -> Formula {
    let r = |g: &Formula| Box::new(rename_var(g, old, new));
    match f {
        Formula::Cont(n) if n == old => Formula::Cont(new.to_string()),
        Formula::Sub(n) if n == old => Formula::Sub(new.to_string()),
        Formula::Not(a) => Formula::Not(r(a)),
        Formula::And(a, b) => Formula::And(r(a), r(b)),
        Formula::Or(a, b) => Formula::Or(r(a), r(b)),
        Formula::Implies(a, b) => Formula::Implies(r(a), r(b)),
        Formula::Prec(a, b) => Formula::Prec(r(a), r(b)),
        Formula::Labeled(a, l) => Formula::Labeled(r(a), rename_label(l, old, new)),
        other => other.clone(),
    }
}

pub(crate) fn rename_label(l: &Label, old: &str, new: &str) -> Label {
    match l {
        Label::NeighVar(n) | Label::WorldVar(n) if n == old => Label::var(new),
        other => other.clone(),
    }
}

pub(crate) fn rename_context(c: &Context, old: &str, new: &str) -> Context {
    Context(c.0.iter().map(|l| rename_label(l, old, new)).collect())
}

/// Replaces `a <= b` by `(b^+ -> a^+)^@*`, innermost first.
pub fn expand_sugar(f: &Formula) -> Formula {
    let e = |g: &Formula| Box::new(expand_sugar(g));
    match f {
        Formula::Prec(a, b) => Formula::implies(
            expand_sugar(b).label(Label::WorldSome),
            expand_sugar(a).label(Label::WorldSome),
        )
        .label(Label::NeighAll),
        Formula::Not(a) => Formula::Not(e(a)),
        Formula::And(a, b) => Formula::And(e(a), e(b)),
        Formula::Or(a, b) => Formula::Or(e(a), e(b)),
        Formula::Implies(a, b) => Formula::Implies(e(a), e(b)),
        Formula::Labeled(a, l) => Formula::Labeled(e(a), l.clone()),
        other => other.clone(),
    }
}
