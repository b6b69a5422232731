//! Accepting and violating derivation fragments for every rule.
#![allow(dead_code)]

use puc::parser::{parse_context, parse_formula};
use puc::proof::{Node, Profile, Rule};
use puc::syntax::{Context, Formula};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Accept,
    /// Accepted with the premises swapped; covers the order permission letter.
    AcceptReversed(char),
    Violates(char),
}

pub struct Fixture {
    pub rule: Rule,
    pub profile: Profile,
    pub expect: Expect,
    pub tree: Node,
}

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn c(s: &str) -> Context {
    parse_context(s).unwrap()
}

/// Rule 10 over hypothesis `id`.
pub fn h(id: u32, ctx: &str, s: &str) -> Node {
    Node::step(Rule::Num(10), c(ctx), f(s), vec![Node::hyp(id, c(ctx), f(s))])
}

pub fn st(rule: u8, ctx: &str, s: &str, ps: Vec<Node>) -> Node {
    Node::step(Rule::Num(rule), c(ctx), f(s), ps)
}

fn pr(rule: Rule, ctx: &str, s: &str, ps: Vec<Node>) -> Node {
    Node::step(rule, c(ctx), f(s), ps)
}

/// Lettered restrictions per rule, leaving out the ones that only permit a premise order.
pub fn violable(rule: Rule) -> &'static [char] {
    match rule.number() {
        Some(1..=6) | Some(12) | Some(16) | Some(30) => &['a', 'b'],
        Some(9) | Some(15) | Some(18) | Some(20) | Some(21) => &['a', 'b', 'c'],
        _ => &['a'],
    }
}

/// Rules whose premises may come in either order, with the letter saying so.
pub fn order_letter(rule: Rule) -> Option<char> {
    match rule.number()? {
        12 => Some('c'),
        18 | 20 => Some('d'),
        19 | 22..=29 => Some('b'),
        _ => None,
    }
}

pub fn all() -> Vec<Fixture> {
    use Expect::*;
    let mut out = Vec::new();
    let mut add = |rule: Rule, profile: Profile, expect: Expect, tree: Node| {
        out.push(Fixture { rule, profile, expect, tree });
    };
    let v = Profile::V;
    let n = Rule::Num;

    for (k, pick) in [(1, "p"), (2, "q")] {
        add(n(k), v, Accept, st(k, "[]", pick, vec![h(1, "[]", "p & q")]));
        add(n(k), v, Violates('a'), st(k, "[@*]", pick, vec![h(1, "[@*]", "p & q")]));
        let w = format!("{pick}^{{*}}");
        add(n(k), v, Violates('b'), st(k, "[@+]", &w, vec![h(1, "[@+]", "p^{*} & q^{*}")]));
    }

    add(n(3), v, Accept, st(3, "[]", "p & q", vec![h(1, "[]", "p"), h(2, "[]", "q")]));
    add(n(3), v, Violates('a'), st(3, "[@*]", "p & q", vec![h(1, "[@*]", "p"), h(2, "[@*]", "q")]));
    add(n(3), v, Violates('b'), st(3, "[@+]", "p^{*} & q^{*}", vec![h(1, "[@+]", "p^{*}"), h(2, "[@+]", "q^{*}")]));

    for (k, pick) in [(4, "p"), (6, "q")] {
        add(n(k), v, Accept, st(k, "[]", "p | q", vec![h(1, "[]", pick)]));
        add(n(k), v, Violates('a'), st(k, "[@*]", "p | q", vec![h(1, "[@*]", pick)]));
        let w = format!("{pick}^{{*}}");
        add(n(k), v, Violates('b'), st(k, "[@*]", "p^{*} | q^{*}", vec![h(1, "[@*]", &w)]));
    }

    add(
        n(5),
        v,
        Accept,
        st(5, "[]", "q | p", vec![h(1, "[]", "p | q"), st(6, "[]", "q | p", vec![h(2, "[]", "p")]), st(4, "[]", "q | p", vec![h(3, "[]", "q")])])
            .discharging(&[2, 3]),
    );
    add(n(5), v, Violates('a'), st(5, "[]", "r", vec![h(1, "[@*]", "p | q"), h(4, "[]", "r"), h(5, "[]", "r")]));
    add(n(5), v, Violates('b'), st(5, "[]", "r", vec![h(1, "[@*]", "p^{*} | q^{*}"), h(4, "[]", "r"), h(5, "[]", "r")]));

    add(n(7), v, Accept, st(7, "[]", "p", vec![st(12, "[]", "Fn", vec![h(1, "[]", "~p"), h(2, "[]", "p")])]).discharging(&[1]));
    add(n(7), v, Violates('a'), st(7, "[@*]", "p", vec![h(1, "[@*]", "Fn")]));
    add(n(8), v, Accept, st(8, "[]", "p", vec![h(1, "[]", "Fn")]));
    add(n(8), v, Violates('a'), st(8, "[@*]", "p", vec![h(1, "[@*]", "Fn")]));

    add(n(9), v, Accept, st(9, "[]", "Fn", vec![h(1, "[N]", "Fw")]));
    add(n(9), v, Violates('a'), st(9, "[]", "Fn", vec![h(1, "[@*]", "Fw")]));
    add(n(9), Profile::VN, Accept, st(9, "[]", "Fn", vec![h(1, "[@*]", "Fw")]));
    add(n(9), v, Violates('b'), st(9, "[]", "Fn", vec![h(1, "[N]", "Fn")]));
    add(n(9), v, Violates('c'), st(9, "[]", "Fn", vec![h(1, "[]", "Fn")]));

    add(n(10), v, Accept, h(1, "[]", "p"));
    add(n(10), v, Violates('a'), h(1, "[@*]", "p"));

    add(n(11), v, Accept, st(11, "[]", "p -> p", vec![h(1, "[]", "p")]).discharging(&[1]));
    add(n(11), v, Accept, st(11, "[]", "p -> q", vec![h(2, "[]", "q")]));
    add(n(11), v, Accept, st(11, "[]", "~p", vec![st(12, "[]", "Fn", vec![h(1, "[]", "p"), h(2, "[]", "~p")])]).discharging(&[1]));
    add(n(11), v, Violates('a'), st(11, "[@*]", "p -> q", vec![h(2, "[@*]", "q")]));

    add(n(12), v, Accept, st(12, "[]", "q", vec![h(1, "[]", "p"), h(2, "[]", "p -> q")]));
    add(n(12), v, AcceptReversed('c'), st(12, "[]", "q", vec![h(2, "[]", "p -> q"), h(1, "[]", "p")]));
    add(n(12), v, Violates('a'), st(12, "[@*]", "q", vec![h(1, "[@*]", "p"), h(2, "[@*]", "p -> q")]));
    add(n(12), v, Violates('b'), st(12, "[@+]", "q^{*}", vec![h(1, "[@+]", "p^{*}"), h(2, "[@+]", "p^{*} -> q^{*}")]));

    add(n(13), v, Accept, st(13, "[N,+]", "p", vec![h(1, "[N]", "p^{+}")]));
    add(n(13), v, Violates('a'), st(13, "[+]", "p", vec![h(1, "[]", "p^{+}")]));
    add(n(14), v, Accept, st(14, "[N]", "p^{+}", vec![h(1, "[N,+]", "p")]));
    add(n(14), v, Violates('a'), st(14, "[]", "p^{+}", vec![h(1, "[+]", "p")]));

    add(n(15), v, Accept, st(15, "[N,*]", "Tn", vec![st(30, "[N,u]", "Tn", vec![])]));
    add(n(15), v, Violates('a'), st(15, "[N,*]", "Tw", vec![st(30, "[N,u]", "Tw", vec![])]));
    add(
        n(15),
        v,
        Violates('b'),
        st(15, "[N,*]", "q", vec![st(13, "[N,u]", "q", vec![st(13, "[N]", "q^{u}", vec![h(1, "[]", "q^{u,N}")])])]),
    );
    add(n(15), v, Violates('c'), st(15, "[N,*]", "q", vec![h(1, "[N,u]", "q")]));

    add(n(16), v, Accept, st(16, "[N,u]", "q", vec![h(1, "[N,*]", "q")]));
    add(n(16), v, Violates('a'), st(16, "[N,u]", "q^{+}", vec![h(1, "[N,*]", "q^{+}")]));
    add(n(16), v, Violates('b'), st(16, "[N,u]", "(p^{u})^{@*}", vec![h(1, "[N,*]", "(p^{u})^{@*}")]));
    add(n(16), v, Violates('b'), st(16, "[N,u,M,u]", "q", vec![h(1, "[N,u,M,*]", "q")]));

    add(n(17), v, Accept, st(17, "[N,+]", "q", vec![h(1, "[N,u]", "q")]));
    add(n(17), v, Violates('a'), st(17, "[N,+]", "q^{+}", vec![h(1, "[N,u]", "q^{+}")]));

    // p^{+} in [N] from p in [N,+] through a fresh witness u
    let witness = st(14, "[N]", "p^{+}", vec![st(17, "[N,+]", "p", vec![h(2, "[N,u]", "p")])]);
    add(n(18), v, Accept, st(18, "[N]", "p^{+}", vec![h(1, "[N,+]", "p"), witness.clone()]).discharging(&[2]));
    add(n(18), v, AcceptReversed('d'), st(18, "[N]", "p^{+}", vec![witness, h(1, "[N,+]", "p")]).discharging(&[2]));
    add(n(18), v, Violates('a'), st(18, "[]", "r", vec![h(1, "[N,+]", "p^{+}"), h(3, "[]", "r")]));
    let u_open = st(
        1,
        "[]",
        "r",
        vec![st(
            3,
            "[]",
            "r & p^{u,N}",
            vec![
                st(1, "[]", "r", vec![h(5, "[]", "r & q^{u,N}")]),
                st(14, "[]", "p^{u,N}", vec![st(14, "[N]", "p^{u}", vec![h(2, "[N,u]", "p")])]),
            ],
        )],
    );
    add(n(18), v, Violates('b'), st(18, "[]", "r", vec![h(1, "[N,+]", "p"), u_open]).discharging(&[2]));
    let u_ctx = st(
        14,
        "[N]",
        "(p & s)^{+}",
        vec![st(17, "[N,+]", "p & s", vec![st(3, "[N,u]", "p & s", vec![h(2, "[N,u]", "p"), h(6, "[N,u]", "s")])])],
    );
    add(n(18), v, Violates('c'), st(18, "[N]", "(p & s)^{+}", vec![h(1, "[N,+]", "p"), u_ctx]).discharging(&[2]));

    add(n(19), v, Accept, st(19, "[@+]", "p^{+}", vec![h(1, "[N]", "p^{+}"), h(2, "[@+]", "q^{+}")]));
    add(n(19), v, AcceptReversed('b'), st(19, "[@+]", "p^{+}", vec![h(2, "[@+]", "q^{+}"), h(1, "[N]", "p^{+}")]));
    add(n(19), v, Violates('a'), st(19, "[@+]", "p", vec![h(1, "[N]", "p"), h(2, "[@+]", "q")]));
    add(n(19), Profile::VN, Accept, st(19, "[@+]", "p^{+}", vec![h(1, "[N]", "p^{+}")]));

    let minor = st(19, "[@+]", "p^{+}", vec![h(2, "[N]", "p^{+}"), h(3, "[@+]", "q^{+}")]);
    add(n(20), v, Accept, st(20, "[@+]", "p^{+}", vec![h(1, "[@+]", "p^{+}"), minor.clone()]).discharging(&[2]));
    add(n(20), v, AcceptReversed('d'), st(20, "[@+]", "p^{+}", vec![minor, h(1, "[@+]", "p^{+}")]).discharging(&[2]));
    add(n(20), v, Violates('a'), st(20, "[]", "r", vec![h(1, "[@+]", "p"), h(4, "[]", "r")]));
    let n_open = st(
        1,
        "[]",
        "r",
        vec![st(
            3,
            "[]",
            "r & p^{+,N}",
            vec![st(1, "[]", "r", vec![h(5, "[]", "r & q^{+,N}")]), st(14, "[]", "p^{+,N}", vec![h(2, "[N]", "p^{+}")])],
        )],
    );
    add(n(20), v, Violates('b'), st(20, "[]", "r", vec![h(1, "[@+]", "p^{+}"), n_open]).discharging(&[2]));
    let n_ctx = st(
        19,
        "[@+]",
        "p^{+} & s^{+}",
        vec![st(3, "[N]", "p^{+} & s^{+}", vec![h(2, "[N]", "p^{+}"), h(6, "[N]", "s^{+}")]), h(7, "[@+]", "q^{+}")],
    );
    add(n(20), v, Violates('c'), st(20, "[@+]", "p^{+} & s^{+}", vec![h(1, "[@+]", "p^{+}"), n_ctx]).discharging(&[2]));

    add(n(21), v, Accept, st(21, "[@*]", "Tw", vec![st(30, "[N]", "Tw", vec![])]));
    add(n(21), v, Violates('a'), st(21, "[@*]", "Tn", vec![st(30, "[N]", "Tn", vec![])]));
    add(n(21), v, Violates('b'), st(21, "[@*]", "p^{+}", vec![st(13, "[N]", "p^{+}", vec![h(1, "[]", "p^{+,N}")])]));
    add(n(21), v, Violates('c'), st(21, "[@*]", "p^{+}", vec![h(1, "[N]", "p^{+}")]));

    add(n(22), v, Accept, st(22, "[N]", "p^{+}", vec![h(1, "[@*]", "p^{+}"), h(2, "[N]", "q^{+}")]));
    add(n(22), v, AcceptReversed('b'), st(22, "[N]", "p^{+}", vec![h(2, "[N]", "q^{+}"), h(1, "[@*]", "p^{+}")]));
    add(n(22), v, Violates('a'), st(22, "[N]", "p", vec![h(1, "[@*]", "p"), h(2, "[N]", "q")]));
    add(n(22), Profile::VN, Accept, st(22, "[N]", "p^{+}", vec![h(1, "[@*]", "p^{+}")]));

    for (k, idx, incl) in [(23, "+", "cont"), (24, "*", "sub")] {
        let a = format!("p^{{{idx}}}");
        let i = format!("{incl}(N)");
        add(n(k), v, Accept, st(k, "[M]", &a, vec![h(1, "[N]", &a), h(2, "[M]", &i)]));
        add(n(k), v, AcceptReversed('b'), st(k, "[M]", &a, vec![h(2, "[M]", &i), h(1, "[N]", &a)]));
        add(n(k), v, Violates('a'), st(k, "[u,M]", &a, vec![h(1, "[u,N]", &a), h(2, "[u,M]", &i)]));
    }

    for (k, incl) in [(25, "cont"), (26, "sub")] {
        let (m, p) = (format!("{incl}(M)"), format!("{incl}(P)"));
        add(n(k), v, Accept, st(k, "[N]", &p, vec![h(1, "[N]", &m), h(2, "[M]", &p)]));
        add(n(k), v, AcceptReversed('b'), st(k, "[N]", &p, vec![h(2, "[M]", &p), h(1, "[N]", &m)]));
        add(n(k), v, Violates('a'), st(k, "[u,N]", &p, vec![h(1, "[u,N]", &m), h(2, "[u,M]", &p)]));
    }

    // r in [] from r and a hypothesis x in [S], packed as x^{S}
    let use_hyp = |id: u32, x: &str, scope: &str| {
        let packed = format!("{x}^{{{scope}}}");
        let both = format!("r & {packed}");
        st(1, "[]", "r", vec![st(3, "[]", &both, vec![h(9, "[]", "r"), st(14, "[]", &packed, vec![h(id, &format!("[{scope}]"), x)])])])
    };
    for (k, l, r) in [(27, ("cont(M)", "N"), ("cont(N)", "M")), (28, ("sub(M)", "N"), ("sub(N)", "M")), (29, ("cont(N)", "M"), ("sub(N)", "M"))] {
        add(n(k), v, Accept, st(k, "[]", "r", vec![use_hyp(1, l.0, l.1), use_hyp(2, r.0, r.1)]).discharging(&[1, 2]));
        add(n(k), v, AcceptReversed('b'), st(k, "[]", "r", vec![use_hyp(2, r.0, r.1), use_hyp(1, l.0, l.1)]).discharging(&[1, 2]));
        add(n(k), v, Violates('a'), st(k, "[@*]", "r", vec![h(1, "[@*]", "r"), h(2, "[@*]", "r")]));
    }

    add(n(30), v, Accept, st(30, "[]", "Tn", vec![]));
    add(n(30), v, Accept, st(30, "[N]", "Tw", vec![]));
    add(n(30), v, Violates('a'), st(30, "[@+]", "Tw", vec![]));
    add(n(30), v, Violates('b'), st(30, "[]", "Tw", vec![]));

    let profile_rules = [
        (Rule::VnWildcardDrop, Profile::VN, "[N]", "[@*]"),
        (Rule::VtReflexive, Profile::VT, "[]", "[@*,*]"),
        (Rule::VwWeakCenter, Profile::VW, "[]", "[@+,*]"),
        (Rule::VcCenter, Profile::VC, "[]", "[@*,+]"),
    ];
    for (rule, prof, to, from) in profile_rules {
        let good = if to == "[]" { "p" } else { "p^{+}" };
        let bad = if to == "[]" { "p^{+}" } else { "p" };
        add(rule, prof, Accept, pr(rule, to, good, vec![h(1, from, good)]));
        add(rule, prof, Violates('a'), pr(rule, to, bad, vec![h(1, from, bad)]));
    }
    out
}
