//! Per-step schema matching and restriction checks.

use std::collections::BTreeSet;

use crate::proof::{Node, OpenHyp, Profile, Rule};
use crate::syntax::{fits, Context, Formula, Label};

/// A failed check: the lettered restriction it violates, or `None` for a shape error.
pub(super) type Issue = (Option<char>, String);

fn shape(msg: impl Into<String>) -> Issue {
    (None, msg.into())
}

fn restr(letter: char, msg: impl Into<String>) -> Issue {
    (Some(letter), msg.into())
}

/// Letter under which a rule reports fitting failures.
pub(super) fn fit_letter(rule: Rule) -> char {
    match rule {
        Rule::Num(9) | Rule::Num(30) => 'b',
        _ => 'a',
    }
}

struct Step<'a> {
    rule: Rule,
    ctx: &'a Context,
    f: &'a Formula,
    ps: &'a [Node],
    ds: &'a [u32],
    profile: Profile,
    out: Vec<Issue>,
}

/// `ctx` minus its scope, when the scope satisfies `pred`.
fn split(ctx: &Context, pred: impl Fn(&Label) -> bool) -> Option<(Context, &Label)> {
    let l = ctx.scope()?;
    pred(l).then(|| (ctx.base().unwrap(), l))
}

fn is_wvar(l: &Label) -> bool {
    matches!(l, Label::WorldVar(_))
}

fn is_nvar(l: &Label) -> bool {
    matches!(l, Label::NeighVar(_))
}

impl<'a> Step<'a> {
    fn arity(&mut self, n: usize) -> bool {
        if self.ps.len() == n {
            true
        } else {
            self.out.push(shape(format!("expects {n} premise(s), found {}", self.ps.len())));
            false
        }
    }

    fn same_ctx(&mut self, i: usize, want: &Context) -> bool {
        if self.ps[i].context() == want {
            true
        } else {
            self.out.push(shape(format!(
                "premise {} must be in context {want}, found {}",
                i + 1,
                self.ps[i].context()
            )));
            false
        }
    }

    fn fit(&mut self, f: &Formula, ctx: &Context) {
        if !fits(f, ctx) {
            let letter = fit_letter(self.rule);
            self.out.push(restr(
                letter,
                format!("{} must fit into the context {ctx}", crate::parser::render_formula(f)),
            ));
        }
    }

    fn no_discharge(&mut self) {
        if !self.ds.is_empty() {
            self.out.push(shape("this rule discharges no hypotheses"));
        }
    }

    /// Checks each discharged id against `allowed(premise index, hypothesis)`.
    fn discharges(&mut self, allowed: impl Fn(usize, &OpenHyp) -> Result<(), String>) {
        let mut seen = BTreeSet::new();
        for &d in self.ds {
            if !seen.insert(d) {
                self.out.push(shape(format!("hypothesis {d} is listed twice")));
                continue;
            }
            let mut found = false;
            for (i, p) in self.ps.iter().enumerate() {
                if let Some(h) = p.open_hyps().into_iter().find(|h| h.id == d) {
                    found = true;
                    if let Err(m) = allowed(i, &h) {
                        self.out.push(shape(format!("hypothesis {d} in premise {}: {m}", i + 1)));
                    }
                }
            }
            if !found {
                self.out.push(shape(format!("hypothesis {d} is not open in any premise")));
            }
        }
    }

    /// Open hypotheses of premise `i` that are not discharged here.
    fn open_after(&self, i: usize) -> Vec<OpenHyp> {
        self.ps[i].open_hyps().into_iter().filter(|h| !self.ds.contains(&h.id)).collect()
    }

    fn discharged_in(&self, i: usize) -> Vec<OpenHyp> {
        self.ps[i].open_hyps().into_iter().filter(|h| self.ds.contains(&h.id)).collect()
    }
}

fn expect_hyp(h: &OpenHyp, ctx: &Context, f: &Formula) -> Result<(), String> {
    if &h.context == ctx && &h.formula == f {
        Ok(())
    } else {
        Err(format!(
            "expected [{}] in {ctx}, found [{}] in {}",
            crate::parser::render_formula(f),
            crate::parser::render_formula(&h.formula),
            h.context
        ))
    }
}

fn no_discharge_here(_: &OpenHyp) -> Result<(), String> {
    Err("this premise discharges nothing".into())
}

fn check_rule(s: &mut Step) {
    let Rule::Num(k) = s.rule else {
        return profile_rule(s);
    };
    match k {
        1 | 2 => {
            s.no_discharge();
            if !s.arity(1) || !s.same_ctx(0, s.ctx) {
                return;
            }
            let Formula::And(a, b) = s.ps[0].formula() else {
                return s.out.push(shape("premise must be a conjunction"));
            };
            let want = if k == 1 { a } else { b };
            if **want != *s.f {
                return s.out.push(shape("conclusion must be the selected conjunct"));
            }
            let (a, b) = (a.clone(), b.clone());
            s.fit(&a, s.ctx);
            s.fit(&b, s.ctx);
            if s.ctx.has_existential() {
                s.out.push(restr('b', "Δ has no existential quantifier"));
            }
        }
        3 => {
            s.no_discharge();
            if !s.arity(2) || !s.same_ctx(0, s.ctx) || !s.same_ctx(1, s.ctx) {
                return;
            }
            let Formula::And(a, b) = s.f else {
                return s.out.push(shape("conclusion must be a conjunction"));
            };
            if s.ps[0].formula() != &**a || s.ps[1].formula() != &**b {
                return s.out.push(shape("premises must be the two conjuncts, in order"));
            }
            s.fit(a, s.ctx);
            s.fit(b, s.ctx);
            if s.ctx.has_existential() {
                s.out.push(restr('b', "Δ has no existential quantifier"));
            }
        }
        4 | 6 => {
            s.no_discharge();
            if !s.arity(1) || !s.same_ctx(0, s.ctx) {
                return;
            }
            let Formula::Or(a, b) = s.f else {
                return s.out.push(shape("conclusion must be a disjunction"));
            };
            let want = if k == 4 { a } else { b };
            if s.ps[0].formula() != &**want {
                return s.out.push(shape(if k == 4 {
                    "premise must be the left disjunct"
                } else {
                    "premise must be the right disjunct"
                }));
            }
            s.fit(a, s.ctx);
            s.fit(b, s.ctx);
            if s.ctx.has_universal() {
                s.out.push(restr('b', "Δ has no universal quantifier"));
            }
        }
        5 => {
            if !s.arity(3) {
                return;
            }
            let Formula::Or(a, b) = s.ps[0].formula() else {
                return s.out.push(shape("first premise must be a disjunction"));
            };
            let delta = s.ps[0].context().clone();
            if !s.same_ctx(1, s.ctx) || !s.same_ctx(2, s.ctx) {
                return;
            }
            if s.ps[1].formula() != s.f || s.ps[2].formula() != s.f {
                return s.out.push(shape("both minor premises must conclude the conclusion"));
            }
            let (a, b) = ((**a).clone(), (**b).clone());
            s.discharges(|i, h| match i {
                1 => expect_hyp(h, &delta, &a),
                2 => expect_hyp(h, &delta, &b),
                _ => no_discharge_here(h),
            });
            s.fit(&a, &delta);
            s.fit(&b, &delta);
            if delta.has_universal() {
                s.out.push(restr('b', "Δ has no universal quantifier"));
            }
        }
        7 | 8 => {
            if !s.arity(1) || !s.same_ctx(0, s.ctx) {
                return;
            }
            if !s.ps[0].formula().is_bot() {
                return s.out.push(shape("premise must be an absurdity"));
            }
            if k == 7 {
                let neg = Formula::not(s.f.clone());
                let ctx = s.ctx.clone();
                s.discharges(|_, h| expect_hyp(h, &ctx, &neg));
            } else {
                s.no_discharge();
            }
            let bot = s.ps[0].formula().clone();
            s.fit(&bot, s.ctx);
        }
        9 => {
            s.no_discharge();
            if !s.arity(1) {
                return;
            }
            if *s.f != Formula::BotN || !s.ctx.is_empty() {
                return s.out.push(shape("conclusion must be Fn in the empty context"));
            }
            let bot = s.ps[0].formula().clone();
            if !bot.is_bot() {
                return s.out.push(shape("premise must be an absurdity"));
            }
            let delta = s.ps[0].context().clone();
            if s.profile < Profile::VN && delta.contains(&Label::NeighAll) {
                s.out.push(restr('a', "Δ must not contain @*"));
            }
            s.fit(&bot, &delta);
            if delta.is_empty() {
                s.out.push(restr('c', "Δ must be non-empty"));
            }
        }
        10 => {
            s.no_discharge();
            if !s.arity(1) {
                return;
            }
            let Node::Hyp { context, formula, .. } = &s.ps[0] else {
                return s.out.push(shape("premise must be a hypothesis"));
            };
            if context != s.ctx {
                return s.out.push(shape(format!("hypothesis context {context} must equal the step context {}", s.ctx)));
            }
            if formula != s.f {
                s.out.push(shape("conclusion must repeat the hypothesis"));
            }
        }
        11 => {
            if !s.arity(1) || !s.same_ctx(0, s.ctx) {
                return;
            }
            let prem = s.ps[0].formula().clone();
            let (a, b) = match s.f {
                Formula::Implies(a, b) if **b == prem => ((**a).clone(), (**b).clone()),
                Formula::Not(a) if prem.is_bot() => ((**a).clone(), prem.clone()),
                _ => {
                    return s.out.push(shape(
                        "conclusion must be an implication whose consequent is the premise, or a negation of an absurd premise",
                    ))
                }
            };
            let ctx = s.ctx.clone();
            s.discharges(|_, h| expect_hyp(h, &ctx, &a));
            s.fit(&a, s.ctx);
            s.fit(&b, s.ctx);
        }
        12 => {
            s.no_discharge();
            if !s.arity(2) || !s.same_ctx(0, s.ctx) || !s.same_ctx(1, s.ctx) {
                return;
            }
            let matches = |x: &Formula, y: &Formula| {
                *y == Formula::implies(x.clone(), s.f.clone())
                    || (s.f.is_bot() && *y == Formula::not(x.clone()))
            };
            let (p0, p1) = (s.ps[0].formula(), s.ps[1].formula());
            let minor = if matches(p0, p1) {
                p0.clone()
            } else if matches(p1, p0) {
                p1.clone()
            } else {
                return s.out.push(shape("premises must be α and α -> β (or α and ~α with an absurd conclusion)"));
            };
            s.fit(&minor, s.ctx);
            if s.ctx.has_existential() {
                s.out.push(restr('b', "Δ has no existential quantifier"));
            }
        }
        13 => {
            s.no_discharge();
            if !s.arity(1) {
                return;
            }
            let Formula::Labeled(inner, phi) = s.ps[0].formula() else {
                return s.out.push(shape("premise must be labelled"));
            };
            if **inner != *s.f {
                return s.out.push(shape("conclusion must be the premise without its index"));
            }
            let want = s.ps[0].context().push(phi.clone());
            if *s.ctx != want {
                return s.out.push(shape(format!("context must be {want}")));
            }
            let (f, c) = (s.ps[0].formula().clone(), s.ps[0].context().clone());
            s.fit(&f, &c);
        }
        14 => {
            s.no_discharge();
            if !s.arity(1) {
                return;
            }
            let pc = s.ps[0].context();
            let (Some(base), Some(phi)) = (pc.base(), pc.scope()) else {
                return s.out.push(shape("premise context must be non-empty"));
            };
            if base != *s.ctx {
                return s.out.push(shape(format!("context must be {base}")));
            }
            if *s.f != s.ps[0].formula().clone().label(phi.clone()) {
                return s.out.push(shape("conclusion must be the premise indexed by the premise scope"));
            }
            let (f, c) = (s.ps[0].formula().clone(), pc.clone());
            s.fit(&f, &c);
        }
        15 | 17 | 21 => {
            s.no_discharge();
            if !s.arity(1) {
                return;
            }
            let (var_ok, top): (fn(&Label) -> bool, Label) = match k {
                15 => (is_wvar, Label::WorldAll),
                17 => (is_wvar, Label::WorldSome),
                _ => (is_nvar, Label::NeighAll),
            };
            let Some((delta, v)) = split(s.ps[0].context(), var_ok) else {
                return s.out.push(shape("premise scope must be a variable of the right sort"));
            };
            if *s.ctx != delta.push(top.clone()) {
                return s.out.push(shape(format!("context must be {}", delta.push(top))));
            }
            if s.ps[0].formula() != s.f {
                return s.out.push(shape("conclusion must repeat the premise"));
            }
            let (f, c) = (s.f.clone(), s.ps[0].context().clone());
            s.fit(&f, &c);
            if k != 17 {
                let name = v.var_name().unwrap().to_string();
                let open = s.open_after(0);
                if open.iter().any(|h| h.formula.mentions(&name)) {
                    s.out.push(restr('b', format!("{name} occurs in an open hypothesis of the premise")));
                }
                if open.iter().any(|h| h.context.mentions(&name)) {
                    s.out.push(restr('c', format!("{name} occurs in the context of an open hypothesis of the premise")));
                }
            }
        }
        16 => {
            s.no_discharge();
            if !s.arity(1) {
                return;
            }
            let Some((delta, _)) = split(s.ps[0].context(), |l| *l == Label::WorldAll) else {
                return s.out.push(shape("premise scope must be *"));
            };
            let Some((d2, u)) = split(s.ctx, is_wvar) else {
                return s.out.push(shape("scope must be a world variable"));
            };
            if d2 != delta {
                return s.out.push(shape(format!("context must extend {delta}")));
            }
            if s.ps[0].formula() != s.f {
                return s.out.push(shape("conclusion must repeat the premise"));
            }
            let (f, c) = (s.f.clone(), s.ps[0].context().clone());
            s.fit(&f, &c);
            let name = u.var_name().unwrap();
            if s.f.mentions(name) || delta.mentions(name) {
                s.out.push(restr('b', format!("{name} occurs in α or Δ")));
            }
        }
        18 | 20 => {
            if !s.arity(2) {
                return;
            }
            let first = exists_elim(s, 0, 1);
            if first.is_empty() {
                return;
            }
            let second = exists_elim(s, 1, 0);
            if second.is_empty() {
                return;
            }
            // report against the drawn order unless only the reverse matches the shape
            let drawn_shape_ok = first.iter().all(|i| i.0.is_some());
            let rev_shape_ok = second.iter().all(|i| i.0.is_some());
            s.out.extend(if !drawn_shape_ok && rev_shape_ok { second } else { first });
        }
        19 | 22 => {
            s.no_discharge();
            let (major_scope, concl_scope): (fn(&Label) -> bool, fn(&Label) -> bool) = if k == 19 {
                (is_nvar, |l| *l == Label::NeighSome)
            } else {
                (|l| *l == Label::NeighAll, is_nvar)
            };
            let Some((delta, _)) = split(s.ctx, concl_scope) else {
                return s.out.push(shape(if k == 19 { "scope must be @+" } else { "scope must be a neighbourhood variable" }));
            };
            let major_ok = |p: &Node| {
                p.formula() == s.f && split(p.context(), major_scope).is_some_and(|(d, _)| d == delta)
            };
            match s.ps.len() {
                1 if s.profile >= Profile::VN => {
                    if !major_ok(&s.ps[0]) {
                        return s.out.push(shape("premise must be the conclusion in the companion context"));
                    }
                }
                1 => return s.out.push(shape("the one-premise form needs profile VN or above")),
                2 => {
                    let ok = (major_ok(&s.ps[0]) && s.ps[1].context() == s.ctx)
                        || (major_ok(&s.ps[1]) && s.ps[0].context() == s.ctx);
                    if !ok {
                        return s.out.push(shape("premises do not match the schema in either order"));
                    }
                }
                _ => {
                    s.arity(2);
                    return;
                }
            }
            let c = s.ctx.clone();
            let f = s.f.clone();
            s.fit(&f, &c);
        }
        23 | 24 => {
            s.no_discharge();
            if !s.arity(2) {
                return;
            }
            let (idx, incl): (Label, fn(String) -> Formula) = if k == 23 {
                (Label::WorldSome, Formula::Cont)
            } else {
                (Label::WorldAll, Formula::Sub)
            };
            let try_order = |a: &Node, b: &Node| -> bool {
                let Some((delta, m)) = split(s.ctx, is_nvar) else { return false };
                let Some((da, n)) = split(a.context(), is_nvar) else { return false };
                let _ = m;
                da == delta
                    && a.formula() == s.f
                    && s.f.index() == Some(&idx)
                    && b.context() == s.ctx
                    && *b.formula() == incl(n.var_name().unwrap().to_string())
            };
            if !(try_order(&s.ps[0], &s.ps[1]) || try_order(&s.ps[1], &s.ps[0])) {
                return s.out.push(shape("premises do not match the schema in either order"));
            }
            let (f, c) = (s.f.clone(), s.ctx.clone());
            s.fit(&f, &c);
        }
        25 | 26 => {
            s.no_discharge();
            if !s.arity(2) {
                return;
            }
            let var_of = |f: &Formula| -> Option<String> {
                match (k, f) {
                    (25, Formula::Cont(v)) | (26, Formula::Sub(v)) => Some(v.clone()),
                    _ => None,
                }
            };
            let try_order = |a: &Node, b: &Node| -> bool {
                let Some((delta, _)) = split(s.ctx, is_nvar) else { return false };
                let (Some(m), Some(p)) = (var_of(a.formula()), var_of(b.formula())) else { return false };
                a.context() == s.ctx
                    && b.context() == &delta.push(Label::var(&m))
                    && var_of(s.f) == Some(p)
            };
            if !(try_order(&s.ps[0], &s.ps[1]) || try_order(&s.ps[1], &s.ps[0])) {
                return s.out.push(shape("premises do not match the schema in either order"));
            }
            let (f, c) = (s.f.clone(), s.ctx.clone());
            s.fit(&f, &c);
        }
        27..=29 => {
            if !s.arity(2) || !s.same_ctx(0, s.ctx) || !s.same_ctx(1, s.ctx) {
                return;
            }
            if s.ps[0].formula() != s.f || s.ps[1].formula() != s.f {
                return s.out.push(shape("both premises must conclude the conclusion"));
            }
            let h0 = s.discharged_in(0);
            let h1 = s.discharged_in(1);
            let ok = total_order_pattern(k, &h0, &h1) || (k == 29 && total_order_pattern(k, &h1, &h0));
            if !ok {
                return s.out.push(shape("discharged hypotheses do not match the case split"));
            }
            // every listed id must be open somewhere
            s.discharges(|_, _| Ok(()));
            let (f, c) = (s.f.clone(), s.ctx.clone());
            s.fit(&f, &c);
        }
        30 => {
            s.no_discharge();
            if !s.arity(0) {
                return;
            }
            if !matches!(s.f, Formula::TopN | Formula::TopW) {
                return s.out.push(shape("conclusion must be Tn or Tw"));
            }
            if s.ctx.contains(&Label::NeighSome) {
                s.out.push(restr('a', "Δ must not contain @+"));
            }
        }
        _ => s.out.push(shape("unknown rule")),
    }
}

/// One reading of rules 18/20 with the major premise at `mi`.
fn exists_elim(s: &Step, mi: usize, ni: usize) -> Vec<Issue> {
    let k = s.rule.number().unwrap();
    let (bound, var_ok): (Label, fn(&Label) -> bool) =
        if k == 18 { (Label::WorldSome, is_wvar) } else { (Label::NeighSome, is_nvar) };
    let (major, minor) = (&s.ps[mi], &s.ps[ni]);
    let mut out = Vec::new();
    let Some((delta, _)) = split(major.context(), |l| *l == bound) else {
        out.push(shape(format!("major premise scope must be {bound}")));
        return out;
    };
    if minor.context() != s.ctx || minor.formula() != s.f {
        out.push(shape("minor premise must conclude the conclusion in the same context"));
        return out;
    }
    let alpha = major.formula();
    let mut var: Option<String> = None;
    let mut seen = BTreeSet::new();
    for &d in s.ds {
        if !seen.insert(d) {
            out.push(shape(format!("hypothesis {d} is listed twice")));
            continue;
        }
        if major.open_ids().contains(&d) {
            out.push(shape(format!("hypothesis {d} is open in the major premise, which discharges nothing")));
        }
        let Some(h) = minor.open_hyps().into_iter().find(|h| h.id == d) else {
            if !major.open_ids().contains(&d) {
                out.push(shape(format!("hypothesis {d} is not open in any premise")));
            }
            continue;
        };
        let shape_ok = h.formula == *alpha
            && split(&h.context, var_ok).is_some_and(|(d2, v)| {
                let name = v.var_name().unwrap().to_string();
                let consistent = var.as_ref().is_none_or(|x| *x == name);
                var.get_or_insert(name);
                d2 == delta && consistent
            });
        if !shape_ok {
            out.push(shape(format!(
                "hypothesis {d} must be [{}] in {delta} extended by one fresh variable",
                crate::parser::render_formula(alpha)
            )));
        }
    }
    if !fits(alpha, major.context()) {
        out.push(restr('a', format!("{} must fit into the context {}", crate::parser::render_formula(alpha), major.context())));
    }
    if let Some(v) = var {
        let open: Vec<OpenHyp> = minor.open_hyps().into_iter().filter(|h| !s.ds.contains(&h.id)).collect();
        if alpha.mentions(&v)
            || delta.mentions(&v)
            || s.ctx.mentions(&v)
            || s.f.mentions(&v)
            || open.iter().any(|h| h.formula.mentions(&v))
        {
            out.push(restr('b', format!("{v} occurs in α, Δ, Θ, β or an open hypothesis of the minor premise")));
        }
        if open.iter().any(|h| h.context.mentions(&v)) {
            out.push(restr('c', format!("{v} occurs in the context of an open hypothesis of the minor premise")));
        }
    }
    if out.is_empty() {
        // an accepted reading; signal success with a benign marker the caller drops
        return Vec::new();
    }
    out
}

/// Rules 27 to 29: hypotheses discharged in the left and right premise.
fn total_order_pattern(k: u8, left: &[OpenHyp], right: &[OpenHyp]) -> bool {
    // (inclusion atom variable, scope variable, base context) per hypothesis
    let parts = |h: &OpenHyp| -> Option<(bool, String, String, Context)> {
        let (is_cont, v) = match &h.formula {
            Formula::Cont(v) => (true, v.clone()),
            Formula::Sub(v) => (false, v.clone()),
            _ => return None,
        };
        let (base, sc) = split(&h.context, is_nvar)?;
        Some((is_cont, v, sc.var_name()?.to_string(), base))
    };
    let mut l = Vec::new();
    for h in left {
        match parts(h) {
            Some(p) => l.push(p),
            None => return false,
        }
    }
    let mut r = Vec::new();
    for h in right {
        match parts(h) {
            Some(p) => r.push(p),
            None => return false,
        }
    }
    let uniform = |xs: &[(bool, String, String, Context)]| xs.windows(2).all(|w| w[0] == w[1]);
    if !uniform(&l) || !uniform(&r) {
        return false;
    }
    let want_cont = |left_side: bool| match k {
        27 => true,
        28 => false,
        _ => left_side,
    };
    if l.first().is_some_and(|x| x.0 != want_cont(true)) || r.first().is_some_and(|x| x.0 != want_cont(false)) {
        return false;
    }
    match (l.first(), r.first()) {
        (Some((_, lv, ls, lb)), Some((_, rv, rs, rb))) => {
            lb == rb
                && if k == 29 {
                    // both cases: the same atom variable in the same context
                    lv == rv && ls == rs
                } else {
                    // [x(M)](Δ,N) against [x(N)](Δ,M)
                    lv == rs && ls == rv
                }
        }
        _ => true,
    }
}

fn profile_rule(s: &mut Step) {
    s.no_discharge();
    if !s.arity(1) {
        return;
    }
    if s.ps[0].formula() != s.f {
        return s.out.push(shape("conclusion must repeat the premise"));
    }
    let pc = s.ps[0].context().clone();
    let ok = match s.rule {
        Rule::VnWildcardDrop => {
            split(&pc, |l| *l == Label::NeighAll).is_some_and(|(d, _)| split(s.ctx, is_nvar).is_some_and(|(d2, _)| d == d2))
        }
        Rule::VtReflexive => pc == s.ctx.push(Label::NeighAll).push(Label::WorldAll),
        Rule::VwWeakCenter => pc == s.ctx.push(Label::NeighSome).push(Label::WorldAll),
        Rule::VcCenter => pc == s.ctx.push(Label::NeighAll).push(Label::WorldSome),
        Rule::Num(_) => unreachable!(),
    };
    if !ok {
        return s.out.push(shape("premise context does not match the schema"));
    }
    let f = s.f.clone();
    s.fit(&f, &pc);
}

/// All issues for one step; the conclusion's own fit is checked here too.
pub(super) fn check_step(node: &Node, profile: Profile) -> Vec<Issue> {
    let Node::Step { rule, context, formula, premises, discharge } = node else {
        return Vec::new();
    };
    if rule.min_profile() > profile {
        return vec![shape(format!("rule not in profile {profile}"))];
    }
    let mut s = Step { rule: *rule, ctx: context, f: formula, ps: premises, ds: discharge, profile, out: Vec::new() };
    if !fits(formula, context) {
        s.out.push(restr(
            fit_letter(*rule),
            format!("{} must fit into the context {context}", crate::parser::render_formula(formula)),
        ));
    }
    check_rule(&mut s);
    // the same failure can be found twice, once for the conclusion and once for a premise
    let mut seen = BTreeSet::new();
    s.out.retain(|i| seen.insert(i.clone()));
    s.out
}
