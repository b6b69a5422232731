//! Bit-parallel evaluation of sentences on small frames.
//!
//! An N-sort value is the set of worlds (as reference) where the formula holds.
//! A W-sort value holds, for each world, the set of chain positions of its
//! neighbourhoods (as templates) where the formula holds.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::syntax::{classify, expand_sugar, Formula, Label, Sort};

/// Frames handled here have at most this many worlds.
pub const FAST_WORLDS: usize = 8;

pub type Value = [u64; FAST_WORLDS];

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FastError {
    #[error("not a sentence: `{0}` is a variable or inclusion atom")]
    NotSentence(String),
    #[error(transparent)]
    IllSorted(#[from] crate::syntax::SortError),
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Atom(usize),
    Top(Sort),
    Bot,
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Imp(usize, usize),
    NeighAll(usize),
    NeighSome(usize),
    WorldAll(usize),
    WorldSome(usize),
}

/// A compiled sentence.
#[derive(Clone, Debug)]
pub struct FastEval {
    ops: Vec<(Op, Sort)>,
    atoms: Vec<String>,
    sort: Sort,
}

/// Frame data in the shape the evaluator wants.
#[derive(Clone, Debug)]
pub struct FastFrame {
    pub n: usize,
    pub chains: Vec<Vec<u64>>,
    full: Value,
    all: u64,
}

impl FastFrame {
    pub fn new(chains: Vec<Vec<u64>>) -> FastFrame {
        let n = chains.len();
        assert!(n <= FAST_WORLDS, "fast evaluation supports at most {FAST_WORLDS} worlds");
        let mut full = [0u64; FAST_WORLDS];
        for (w, c) in chains.iter().enumerate() {
            full[w] = if c.len() >= 64 { u64::MAX } else { (1u64 << c.len()) - 1 };
        }
        FastFrame { n, chains, full, all: (1u64 << n) - 1 }
    }

    pub fn all(&self) -> u64 {
        self.all
    }

    pub fn full(&self, w: usize) -> u64 {
        self.full[w]
    }
}

impl FastEval {
    pub fn new(f: &Formula) -> Result<FastEval, FastError> {
        let f = expand_sugar(f);
        let sort = classify(&f)?;
        let mut atoms = BTreeMap::new();
        collect_atoms(&f, &mut atoms);
        let atoms: Vec<String> = atoms.into_keys().collect();
        let mut ev = FastEval { ops: Vec::new(), atoms, sort };
        ev.push(&f)?;
        Ok(ev)
    }

    pub fn sort(&self) -> Sort {
        self.sort
    }

    /// Atom names in valuation order.
    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    fn push(&mut self, f: &Formula) -> Result<usize, FastError> {
        let s = classify(f)?;
        let op = match f {
            Formula::Atom(a) => Op::Atom(self.atoms.iter().position(|x| x == a).unwrap()),
            Formula::TopN => Op::Top(Sort::N),
            Formula::BotN => Op::Bot,
            Formula::TopW => Op::Top(Sort::W),
            Formula::BotW => Op::Bot,
            Formula::Cont(v) | Formula::Sub(v) => return Err(FastError::NotSentence(v.clone())),
            Formula::Not(a) => Op::Not(self.push(a)?),
            Formula::And(a, b) => Op::And(self.push(a)?, self.push(b)?),
            Formula::Or(a, b) => Op::Or(self.push(a)?, self.push(b)?),
            Formula::Implies(a, b) => Op::Imp(self.push(a)?, self.push(b)?),
            Formula::Prec(..) => unreachable!("sugar expanded"),
            Formula::Labeled(a, l) => {
                let i = self.push(a)?;
                match l {
                    Label::NeighAll => Op::NeighAll(i),
                    Label::NeighSome => Op::NeighSome(i),
                    Label::WorldAll => Op::WorldAll(i),
                    Label::WorldSome => Op::WorldSome(i),
                    Label::NeighVar(v) | Label::WorldVar(v) => {
                        return Err(FastError::NotSentence(v.clone()))
                    }
                }
            }
        };
        self.ops.push((op, s));
        Ok(self.ops.len() - 1)
    }

    /// Evaluates with `valuation[i]` the world set of `atoms()[i]`.
    pub fn eval(&self, fr: &FastFrame, valuation: &[u64], scratch: &mut Vec<Value>) -> Value {
        scratch.clear();
        let n = fr.n;
        for &(op, s) in &self.ops {
            let mut v = [0u64; FAST_WORLDS];
            let mask = |w: usize| if s == Sort::N { fr.all } else { fr.full[w] };
            match op {
                Op::Atom(i) => v[0] = valuation[i],
                Op::Top(Sort::N) => v[0] = fr.all,
                Op::Top(Sort::W) => v[..n].copy_from_slice(&fr.full[..n]),
                Op::Bot => {}
                Op::Not(a) => {
                    let a = &scratch[a];
                    if s == Sort::N {
                        v[0] = fr.all & !a[0];
                    } else {
                        for w in 0..n {
                            v[w] = mask(w) & !a[w];
                        }
                    }
                }
                Op::And(a, b) => {
                    let (a, b) = (&scratch[a], &scratch[b]);
                    for w in 0..n {
                        v[w] = a[w] & b[w];
                    }
                }
                Op::Or(a, b) => {
                    let (a, b) = (&scratch[a], &scratch[b]);
                    for w in 0..n {
                        v[w] = a[w] | b[w];
                    }
                }
                Op::Imp(a, b) => {
                    let (a, b) = (&scratch[a], &scratch[b]);
                    if s == Sort::N {
                        v[0] = (!a[0] | b[0]) & fr.all;
                    } else {
                        for w in 0..n {
                            v[w] = (!a[w] | b[w]) & mask(w);
                        }
                    }
                }
                Op::NeighAll(a) => {
                    let a = &scratch[a];
                    for w in 0..n {
                        if a[w] == fr.full[w] {
                            v[0] |= 1 << w;
                        }
                    }
                }
                Op::NeighSome(a) => {
                    let a = &scratch[a];
                    for w in 0..n {
                        if a[w] != 0 {
                            v[0] |= 1 << w;
                        }
                    }
                }
                Op::WorldAll(a) => {
                    let m = scratch[a][0];
                    for w in 0..n {
                        for (i, &nb) in fr.chains[w].iter().enumerate() {
                            if nb & !m == 0 {
                                v[w] |= 1 << i;
                            }
                        }
                    }
                }
                Op::WorldSome(a) => {
                    let m = scratch[a][0];
                    for w in 0..n {
                        for (i, &nb) in fr.chains[w].iter().enumerate() {
                            if nb & m != 0 {
                                v[w] |= 1 << i;
                            }
                        }
                    }
                }
            }
            scratch.push(v);
        }
        *scratch.last().expect("formula compiles to at least one op")
    }
}

fn collect_atoms(f: &Formula, out: &mut BTreeMap<String, ()>) {
    if let Formula::Atom(a) = f {
        out.insert(a.clone(), ());
    }
    for c in f.children() {
        collect_atoms(c, out);
    }
}
