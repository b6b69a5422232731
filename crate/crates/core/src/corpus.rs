//! Bundled derivations.

use crate::checker::lift;
use crate::parser::{parse_context, parse_proof};
use crate::proof::{Derivation, Profile};

pub struct Entry {
    pub name: &'static str,
    /// Weakest profile the derivation checks under.
    pub profile: Profile,
    pub about: &'static str,
    build: fn() -> Derivation,
}

impl Entry {
    pub fn derivation(&self) -> Derivation {
        (self.build)()
    }
}

fn load(name: &str, json: &str) -> Derivation {
    parse_proof(json).unwrap_or_else(|e| panic!("bundled {name}: {e}"))
}

macro_rules! file {
    ($name:literal) => {
        || load($name, include_str!(concat!("../corpus/", $name, ".json")))
    };
}

/// Hypothesis ids standing for the theorem in the CPR template, with their contexts.
pub const CPR_SLOTS: [(u32, &str, u32); 2] = [(900, "[N,u]", 15), (901, "[M,u]", 16)];

/// The CPR template with `theorem` lifted into each slot. The theorem's own
/// hypothesis ids are shifted to stay distinct from the template's.
pub fn cpr_with(theorem: &Derivation) -> Derivation {
    let mut d = load("cpr_template", include_str!("../corpus/cpr_template.json"));
    for (slot, ctx, base) in CPR_SLOTS {
        let renumbered = theorem.map_ids(&|i| base + 100 * i);
        let lifted = lift(&renumbered, &parse_context(ctx).unwrap()).expect("theorem lifts");
        let n = d.graft(slot, &lifted);
        assert_eq!(n, 1, "slot {slot}");
    }
    d
}

pub fn xi() -> Derivation {
    load("xi", include_str!("../corpus/xi.json"))
}

pub const ENTRIES: &[Entry] = &[
    Entry {
        name: "tautology",
        profile: Profile::V,
        about: "a sphere with q-worlds and no p-worlds makes p^{+} -> q^{+} hold in every sphere",
        build: file!("tautology"),
    },
    Entry { name: "trans", profile: Profile::V, about: "((p <= q) & (q <= r)) -> (p <= r)", build: file!("trans") },
    Entry { name: "connex", profile: Profile::V, about: "(p <= q) | (q <= p)", build: file!("connex") },
    Entry {
        name: "xi",
        profile: Profile::V,
        about: "(p & q) -> (q | r), the theorem used by cpr",
        build: file!("xi"),
    },
    Entry {
        name: "cpr",
        profile: Profile::V,
        about: "(q <= p & q) | (r <= p & q), from xi by the comparative possibility rule",
        build: || cpr_with(&xi()),
    },
    Entry { name: "vn", profile: Profile::VN, about: "(p^{+})^{@*} -> (p^{+})^{@+}", build: file!("vn") },
    Entry { name: "vt", profile: Profile::VT, about: "(p^{*})^{@*} -> p", build: file!("vt") },
    Entry { name: "vw", profile: Profile::VW, about: "(p^{*})^{@+} -> p", build: file!("vw") },
    Entry { name: "vc", profile: Profile::VC, about: "(p^{+})^{@*} -> p", build: file!("vc") },
];

pub fn get(name: &str) -> Option<&'static Entry> {
    ENTRIES.iter().find(|e| e.name == name)
}
