//! Derivation trees, rule identifiers and logic profiles.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::syntax::{Context, Formula};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Profile {
    V,
    VN,
    VT,
    VW,
    VC,
}

impl Profile {
    pub const ALL: [Profile; 5] = [Profile::V, Profile::VN, Profile::VT, Profile::VW, Profile::VC];
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Profile, String> {
        match s.to_ascii_uppercase().as_str() {
            "V" => Ok(Profile::V),
            "VN" => Ok(Profile::VN),
            "VT" => Ok(Profile::VT),
            "VW" => Ok(Profile::VW),
            "VC" => Ok(Profile::VC),
            _ => Err(format!("unknown profile `{s}` (expected V, VN, VT, VW or VC)")),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// Rules 1 to 30 of the base calculus.
    Num(u8),
    /// `α (Δ,@*)  ⟹  α (Δ,N)`
    VnWildcardDrop,
    /// `α (Δ,@*,*)  ⟹  α Δ`
    VtReflexive,
    /// `α (Δ,@+,*)  ⟹  α Δ`
    VwWeakCenter,
    /// `α (Δ,@*,+)  ⟹  α Δ`
    VcCenter,
}

const ALIASES: [&str; 30] = [
    "and-elim-l",
    "and-elim-r",
    "and-intro",
    "or-intro-l",
    "or-elim",
    "or-intro-r",
    "bot-classical",
    "bot-intuitionistic",
    "absurd-expansion",
    "hyp-injection",
    "imp-intro",
    "imp-elim",
    "ctx-intro",
    "ctx-elim",
    "w-univ-intro",
    "w-univ-elim",
    "w-exist-intro",
    "w-exist-elim",
    "n-exist-intro",
    "n-exist-elim",
    "n-univ-intro",
    "n-univ-wildcard",
    "w-exist-prop",
    "w-univ-prop",
    "trans-incl-neg",
    "trans-incl-pos",
    "total-order-neg",
    "total-order-pos",
    "total-order-mixed",
    "truth",
];

impl Rule {
    pub fn all() -> Vec<Rule> {
        let mut v: Vec<Rule> = (1..=30).map(Rule::Num).collect();
        v.extend([Rule::VnWildcardDrop, Rule::VtReflexive, Rule::VwWeakCenter, Rule::VcCenter]);
        v
    }

    pub fn number(self) -> Option<u8> {
        match self {
            Rule::Num(n) => Some(n),
            _ => None,
        }
    }

    pub fn alias(self) -> &'static str {
        match self {
            Rule::Num(n) if (1..=30).contains(&n) => ALIASES[n as usize - 1],
            Rule::Num(_) => "invalid",
            Rule::VnWildcardDrop => "vn-wildcard-drop",
            Rule::VtReflexive => "vt-reflexive",
            Rule::VwWeakCenter => "vw-weak-center",
            Rule::VcCenter => "vc-center",
        }
    }

    pub fn from_number(n: u64) -> Option<Rule> {
        (1..=30).contains(&n).then_some(Rule::Num(n as u8))
    }

    /// Accepts a numeral or an alias.
    pub fn from_name(s: &str) -> Option<Rule> {
        if let Ok(n) = s.parse::<u64>() {
            return Rule::from_number(n);
        }
        if let Some(i) = ALIASES.iter().position(|a| *a == s) {
            return Some(Rule::Num(i as u8 + 1));
        }
        match s {
            "vn-wildcard-drop" => Some(Rule::VnWildcardDrop),
            "vt-reflexive" => Some(Rule::VtReflexive),
            "vw-weak-center" => Some(Rule::VwWeakCenter),
            "vc-center" => Some(Rule::VcCenter),
            _ => None,
        }
    }

    /// Weakest profile in which the rule is available.
    pub fn min_profile(self) -> Profile {
        match self {
            Rule::Num(_) => Profile::V,
            Rule::VnWildcardDrop => Profile::VN,
            Rule::VtReflexive => Profile::VT,
            Rule::VwWeakCenter => Profile::VW,
            Rule::VcCenter => Profile::VC,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Num(n) => write!(f, "rule {n} ({})", self.alias()),
            other => write!(f, "rule {}", other.alias()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Hyp {
        id: u32,
        context: Context,
        formula: Formula,
    },
    Step {
        rule: Rule,
        context: Context,
        formula: Formula,
        premises: Vec<Node>,
        discharge: Vec<u32>,
    },
}

/// A derivation is its root node.
pub type Derivation = Node;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OpenHyp {
    pub id: u32,
    pub context: Context,
    pub formula: Formula,
}

impl Node {
    pub fn hyp(id: u32, context: Context, formula: Formula) -> Node {
        Node::Hyp { id, context, formula }
    }

    pub fn step(rule: Rule, context: Context, formula: Formula, premises: Vec<Node>) -> Node {
        Node::Step { rule, context, formula, premises, discharge: Vec::new() }
    }

    pub fn discharging(mut self, ids: &[u32]) -> Node {
        if let Node::Step { discharge, .. } = &mut self {
            discharge.extend_from_slice(ids);
        }
        self
    }

    pub fn formula(&self) -> &Formula {
        match self {
            Node::Hyp { formula, .. } | Node::Step { formula, .. } => formula,
        }
    }

    pub fn context(&self) -> &Context {
        match self {
            Node::Hyp { context, .. } | Node::Step { context, .. } => context,
        }
    }

    pub fn rule(&self) -> Option<Rule> {
        match self {
            Node::Step { rule, .. } => Some(*rule),
            Node::Hyp { .. } => None,
        }
    }

    pub fn premises(&self) -> &[Node] {
        match self {
            Node::Step { premises, .. } => premises,
            Node::Hyp { .. } => &[],
        }
    }

    pub fn discharge(&self) -> &[u32] {
        match self {
            Node::Step { discharge, .. } => discharge,
            Node::Hyp { .. } => &[],
        }
    }

    pub fn at_path(&self, path: &[usize]) -> Option<&Node> {
        let mut cur = self;
        for &i in path {
            cur = cur.premises().get(i)?;
        }
        Some(cur)
    }

    pub fn at_path_mut(&mut self, path: &[usize]) -> Option<&mut Node> {
        let mut cur = self;
        for &i in path {
            cur = match cur {
                Node::Step { premises, .. } => premises.get_mut(i)?,
                Node::Hyp { .. } => return None,
            };
        }
        Some(cur)
    }

    /// Every node with its path, parents before children.
    pub fn walk(&self) -> Vec<(Vec<usize>, &Node)> {
        fn go<'a>(n: &'a Node, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a Node)>) {
            out.push((path.clone(), n));
            for (i, p) in n.premises().iter().enumerate() {
                path.push(i);
                go(p, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn size(&self) -> usize {
        1 + self.premises().iter().map(Node::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises().iter().map(Node::height).max().unwrap_or(0)
    }

    /// Hypothesis leaves not discharged below them, one entry per distinct id.
    pub fn open_hyps(&self) -> Vec<OpenHyp> {
        let mut map = BTreeMap::new();
        self.collect_open(&mut map);
        map.into_values().collect()
    }

    fn collect_open(&self, out: &mut BTreeMap<u32, OpenHyp>) {
        match self {
            Node::Hyp { id, context, formula } => {
                out.entry(*id).or_insert_with(|| OpenHyp {
                    id: *id,
                    context: context.clone(),
                    formula: formula.clone(),
                });
            }
            Node::Step { premises, discharge, .. } => {
                let mut inner = BTreeMap::new();
                for p in premises {
                    p.collect_open(&mut inner);
                }
                for d in discharge {
                    inner.remove(d);
                }
                for (k, v) in inner {
                    out.entry(k).or_insert(v);
                }
            }
        }
    }

    pub fn open_ids(&self) -> BTreeSet<u32> {
        self.open_hyps().into_iter().map(|h| h.id).collect()
    }

    pub fn hyp_ids(&self) -> BTreeSet<u32> {
        self.walk()
            .into_iter()
            .filter_map(|(_, n)| match n {
                Node::Hyp { id, .. } => Some(*id),
                _ => None,
            })
            .collect()
    }

    pub fn max_id(&self) -> u32 {
        self.walk()
            .into_iter()
            .flat_map(|(_, n)| match n {
                Node::Hyp { id, .. } => vec![*id],
                Node::Step { discharge, .. } => discharge.clone(),
            })
            .max()
            .unwrap_or(0)
    }

    /// Variable names used anywhere: formulas and contexts of every node.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (_, n) in self.walk() {
            out.extend(n.formula().variables());
            out.extend(n.context().variables());
        }
        out
    }

    pub fn rules_used(&self) -> BTreeSet<Rule> {
        self.walk().into_iter().filter_map(|(_, n)| n.rule()).collect()
    }

    /// Applies `f` to every formula and context in the tree.
    pub fn map_all(&self, f: &impl Fn(&Formula) -> Formula, g: &impl Fn(&Context) -> Context) -> Node {
        match self {
            Node::Hyp { id, context, formula } => {
                Node::Hyp { id: *id, context: g(context), formula: f(formula) }
            }
            Node::Step { rule, context, formula, premises, discharge } => Node::Step {
                rule: *rule,
                context: g(context),
                formula: f(formula),
                premises: premises.iter().map(|p| p.map_all(f, g)).collect(),
                discharge: discharge.clone(),
            },
        }
    }

    /// Replaces every rule-10 step over hypothesis `id` by `with`, which
    /// must conclude the same formula in the same context. Returns the count.
    pub fn graft(&mut self, id: u32, with: &Node) -> usize {
        match self {
            Node::Step { rule: Rule::Num(10), premises, context, formula, .. }
                if matches!(premises.as_slice(), [Node::Hyp { id: h, .. }] if *h == id) =>
            {
                assert!(
                    with.context() == context && with.formula() == formula,
                    "graft for hypothesis {id} concludes a different judgement"
                );
                *self = with.clone();
                1
            }
            Node::Step { premises, .. } => premises.iter_mut().map(|p| p.graft(id, with)).sum(),
            Node::Hyp { .. } => 0,
        }
    }

    /// Renames hypothesis ids, leaves and discharge lists alike.
    pub fn map_ids(&self, m: &impl Fn(u32) -> u32) -> Node {
        match self {
            Node::Hyp { id, context, formula } => {
                Node::Hyp { id: m(*id), context: context.clone(), formula: formula.clone() }
            }
            Node::Step { rule, context, formula, premises, discharge } => Node::Step {
                rule: *rule,
                context: context.clone(),
                formula: formula.clone(),
                premises: premises.iter().map(|p| p.map_ids(m)).collect(),
                discharge: discharge.iter().map(|d| m(*d)).collect(),
            },
        }
    }
}
