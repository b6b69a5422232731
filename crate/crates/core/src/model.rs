//! Finite frames, models, templates and variable assignments.
//!
//! Structures are kept by world name as read from JSON. Evaluation works on
//! [`Compiled`], where worlds become bit positions; that caps a frame at 64 worlds.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

pub const MAX_WORLDS: usize = 64;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Frame {
    pub worlds: Vec<String>,
    /// World to its neighbourhood chain, smallest first. Missing keys mean an empty system.
    pub nesting: BTreeMap<String, Vec<Vec<String>>>,
    pub valuation: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Model {
    pub frame: Frame,
    pub reference: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Template {
    pub model: Model,
    pub neighbourhood: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Model(Model),
    Template(Template),
}

impl Structure {
    pub fn frame(&self) -> &Frame {
        match self {
            Structure::Model(m) => &m.frame,
            Structure::Template(t) => &t.model.frame,
        }
    }

    pub fn reference(&self) -> &str {
        match self {
            Structure::Model(m) => &m.reference,
            Structure::Template(t) => &t.model.reference,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub neigh: BTreeMap<String, Vec<String>>,
    pub world: BTreeMap<String, String>,
}

impl Assignment {
    pub fn is_empty(&self) -> bool {
        self.neigh.is_empty() && self.world.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    EmptyUniverse,
    TooManyWorlds { count: usize },
    DuplicateWorld { world: String },
    UnknownWorld { location: String, world: String },
    EmptyNeighbourhood { world: String, index: usize },
    DuplicateNeighbourhood { world: String, index: usize },
    NotAChain { world: String, index: usize },
    DanglingReference { world: String },
    ReferenceNeighbourhoodNotInSystem,
    EmptyAssignment { var: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyUniverse => write!(f, "the set of worlds is empty"),
            Violation::TooManyWorlds { count } => {
                write!(f, "{count} worlds; at most {MAX_WORLDS} are supported")
            }
            Violation::DuplicateWorld { world } => write!(f, "world `{world}` listed twice"),
            Violation::UnknownWorld { location, world } => {
                write!(f, "{location} mentions `{world}`, which is not a world")
            }
            Violation::EmptyNeighbourhood { world, index } => {
                write!(f, "neighbourhood {index} of `{world}` is empty")
            }
            Violation::DuplicateNeighbourhood { world, index } => {
                write!(f, "neighbourhood {index} of `{world}` repeats the previous one")
            }
            Violation::NotAChain { world, index } => write!(
                f,
                "neighbourhood {index} of `{world}` does not include neighbourhood {}",
                index - 1
            ),
            Violation::DanglingReference { world } => {
                write!(f, "reference `{world}` is not a world")
            }
            Violation::ReferenceNeighbourhoodNotInSystem => {
                write!(f, "reference neighbourhood is not in the system of the reference world")
            }
            Violation::EmptyAssignment { var } => write!(f, "`{var}` is assigned the empty set"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn set_of(ws: &[String]) -> BTreeSet<&str> {
    ws.iter().map(String::as_str).collect()
}

pub fn validate_frame(frame: &Frame) -> ValidationReport {
    let mut v = Vec::new();
    if frame.worlds.is_empty() {
        v.push(Violation::EmptyUniverse);
    }
    if frame.worlds.len() > MAX_WORLDS {
        v.push(Violation::TooManyWorlds { count: frame.worlds.len() });
    }
    let mut seen = BTreeSet::new();
    for w in &frame.worlds {
        if !seen.insert(w.as_str()) {
            v.push(Violation::DuplicateWorld { world: w.clone() });
        }
    }
    let unknown = |location: String, w: &String, v: &mut Vec<Violation>| {
        if !seen.contains(w.as_str()) {
            v.push(Violation::UnknownWorld { location, world: w.clone() });
        }
    };
    for (w, chain) in &frame.nesting {
        unknown("nesting key".into(), w, &mut v);
        let mut prev: Option<BTreeSet<&str>> = None;
        for (i, n) in chain.iter().enumerate() {
            for x in n {
                unknown(format!("neighbourhood {i} of `{w}`"), x, &mut v);
            }
            let cur = set_of(n);
            if cur.is_empty() {
                v.push(Violation::EmptyNeighbourhood { world: w.clone(), index: i });
            }
            if let Some(p) = &prev {
                if *p == cur {
                    v.push(Violation::DuplicateNeighbourhood { world: w.clone(), index: i });
                } else if !p.is_subset(&cur) {
                    v.push(Violation::NotAChain { world: w.clone(), index: i });
                }
            }
            prev = Some(cur);
        }
    }
    for (atom, ws) in &frame.valuation {
        for x in ws {
            unknown(format!("valuation of `{atom}`"), x, &mut v);
        }
    }
    ValidationReport { violations: v }
}

/// Validates a frame with its reference world and, optionally, an assignment.
pub fn validate(frame: &Frame, reference: &str, assignment: Option<&Assignment>) -> ValidationReport {
    let mut report = validate_frame(frame);
    let known: BTreeSet<&str> = frame.worlds.iter().map(String::as_str).collect();
    if !known.contains(reference) {
        report.violations.push(Violation::DanglingReference { world: reference.to_string() });
    }
    if let Some(a) = assignment {
        for (var, ws) in &a.neigh {
            if ws.is_empty() {
                report.violations.push(Violation::EmptyAssignment { var: var.clone() });
            }
            for w in ws {
                if !known.contains(w.as_str()) {
                    report.violations.push(Violation::UnknownWorld {
                        location: format!("assignment of `{var}`"),
                        world: w.clone(),
                    });
                }
            }
        }
        for (var, w) in &a.world {
            if !known.contains(w.as_str()) {
                report.violations.push(Violation::UnknownWorld {
                    location: format!("assignment of `{var}`"),
                    world: w.clone(),
                });
            }
        }
    }
    report
}

pub fn validate_structure(s: &Structure, assignment: Option<&Assignment>) -> ValidationReport {
    let mut report = validate(s.frame(), s.reference(), assignment);
    if let Structure::Template(t) = s {
        let n = set_of(&t.neighbourhood);
        let in_system = t
            .model
            .frame
            .nesting
            .get(&t.model.reference)
            .is_some_and(|chain| chain.iter().any(|m| set_of(m) == n));
        if !in_system {
            report.violations.push(Violation::ReferenceNeighbourhoodNotInSystem);
        }
    }
    report
}

/// Worlds as bit positions, in the order of `Frame::worlds`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compiled {
    pub names: Vec<String>,
    pub index: HashMap<String, usize>,
    /// Chains as bitmasks, smallest first.
    pub nesting: Vec<Vec<u64>>,
    pub valuation: HashMap<String, u64>,
}

impl Compiled {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn mask(&self, ws: &[String]) -> u64 {
        ws.iter().filter_map(|w| self.index.get(w)).fold(0, |m, &i| m | (1 << i))
    }

    pub fn names_of(&self, mask: u64) -> Vec<String> {
        (0..self.names.len()).filter(|i| mask >> i & 1 == 1).map(|i| self.names[i].clone()).collect()
    }

    pub fn all(&self) -> u64 {
        if self.names.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.names.len()) - 1
        }
    }

    pub fn atom(&self, a: &str) -> u64 {
        self.valuation.get(a).copied().unwrap_or(0)
    }
}

/// Compiles a frame that passed `validate_frame`.
pub fn compile(frame: &Frame) -> Compiled {
    let index: HashMap<String, usize> =
        frame.worlds.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let mut c = Compiled {
        names: frame.worlds.clone(),
        index,
        nesting: vec![Vec::new(); frame.worlds.len()],
        valuation: HashMap::new(),
    };
    for (w, chain) in &frame.nesting {
        if let Some(&i) = c.index.get(w) {
            c.nesting[i] = chain.iter().map(|n| c.mask(n)).collect();
        }
    }
    for (a, ws) in &frame.valuation {
        let m = c.mask(ws);
        c.valuation.insert(a.clone(), m);
    }
    c
}

/// Rebuilds a named frame from bitmask data; world `i` is named `w{i}`.
pub fn decompile(n: usize, nesting: &[Vec<u64>], valuation: &BTreeMap<String, u64>) -> Frame {
    let names: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let list = |m: u64| -> Vec<String> {
        (0..n).filter(|i| m >> i & 1 == 1).map(|i| names[i].clone()).collect()
    };
    Frame {
        worlds: names.clone(),
        nesting: nesting.iter().enumerate().map(|(i, ch)| (names[i].clone(), ch.iter().map(|&m| list(m)).collect())).collect(),
        valuation: valuation.iter().map(|(a, &m)| (a.clone(), list(m))).collect(),
    }
}

/// Worlds reachable from the reference in at most `n` steps through neighbourhoods.
pub fn delta(model: &Model, n: usize) -> BTreeSet<String> {
    let c = compile(&model.frame);
    let Some(&chi) = c.index.get(&model.reference) else {
        return BTreeSet::new();
    };
    let mut acc: u64 = 1 << chi;
    let mut layer = acc;
    for _ in 0..n {
        let mut next = 0u64;
        for w in 0..c.len() {
            if layer >> w & 1 == 1 {
                next |= c.nesting[w].iter().fold(0, |m, &x| m | x);
            }
        }
        if next & !acc == 0 {
            // every later layer is then an image of a subset of `acc`
            break;
        }
        acc |= next;
        layer = next;
    }
    c.names_of(acc).into_iter().collect()
}

/// One step of the perspective relation.
pub fn perspectives(s: &Structure) -> Vec<Structure> {
    match s {
        Structure::Model(m) => m
            .frame
            .nesting
            .get(&m.reference)
            .map(|chain| {
                chain
                    .iter()
                    .map(|n| Structure::Template(Template { model: m.clone(), neighbourhood: n.clone() }))
                    .collect()
            })
            .unwrap_or_default(),
        Structure::Template(t) => t
            .neighbourhood
            .iter()
            .map(|w| {
                Structure::Model(Model { frame: t.model.frame.clone(), reference: w.clone() })
            })
            .collect(),
    }
}
