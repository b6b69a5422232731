//! Random sentences.
#![allow(dead_code)]

use proptest::prelude::*;
use puc::syntax::{Formula, Label, Sort};
use rand::Rng;

const ATOMS: [&str; 3] = ["p", "q", "r"];

fn leaf(sort: Sort, full: bool) -> BoxedStrategy<Formula> {
    match sort {
        Sort::N if full => prop_oneof![
            4 => prop::sample::select(&ATOMS[..]).prop_map(Formula::atom),
            1 => Just(Formula::TopN),
            1 => Just(Formula::BotN),
        ]
        .boxed(),
        Sort::N => prop_oneof![
            4 => prop::sample::select(&ATOMS[..]).prop_map(Formula::atom),
            1 => Just(Formula::BotN),
        ]
        .boxed(),
        Sort::W => prop_oneof![Just(Formula::TopW), Just(Formula::BotW)].boxed(),
    }
}

/// Sentences of `sort` with at most `depth` nested connectives. `full`
/// allows every connective and label; otherwise only conjunction,
/// implication and the `+`, `@+`, `@*` labels.
pub fn sentence(sort: Sort, depth: u32, full: bool) -> BoxedStrategy<Formula> {
    if depth == 0 {
        return match sort {
            Sort::N => leaf(Sort::N, full),
            // a W-sort sentence needs a label or a constant
            Sort::W => prop_oneof![
                leaf(Sort::W, full),
                leaf(Sort::N, full).prop_map(|f| f.label(Label::WorldSome))
            ]
            .boxed(),
        };
    }
    let same = sentence(sort, depth - 1, full);
    let other = sentence(sort.flip(), depth - 1, full);
    let labels: Vec<Label> = match (sort, full) {
        (Sort::N, _) => vec![Label::NeighAll, Label::NeighSome],
        (Sort::W, true) => vec![Label::WorldAll, Label::WorldSome],
        (Sort::W, false) => vec![Label::WorldSome],
    };
    let labelled = (other, prop::sample::select(labels)).prop_map(|(f, l)| f.label(l));
    let bin = (same.clone(), same.clone(), 0..if full { 3u8 } else { 2 }).prop_map(|(a, b, op)| match op {
        0 => Formula::and(a, b),
        1 => Formula::implies(a, b),
        _ => Formula::or(a, b),
    });
    if full {
        prop_oneof![2 => same.clone(), 2 => labelled, 3 => bin, 1 => same.prop_map(Formula::not)].boxed()
    } else {
        prop_oneof![2 => same, 2 => labelled, 3 => bin].boxed()
    }
}

pub fn label_count(f: &Formula) -> usize {
    puc::syntax::label_occurrences(f).len()
}

/// Seeded N-sort sentence, every connective allowed.
pub fn random_sentence<R: Rng>(rng: &mut R, sort: Sort, depth: u32) -> Formula {
    let atom = |rng: &mut R| Formula::atom(ATOMS[rng.gen_range(0..ATOMS.len())]);
    if depth == 0 {
        return match sort {
            Sort::N => atom(rng),
            Sort::W => atom(rng).label(if rng.gen() { Label::WorldAll } else { Label::WorldSome }),
        };
    }
    match rng.gen_range(0..5) {
        0 => Formula::not(random_sentence(rng, sort, depth - 1)),
        1 | 2 => {
            let a = random_sentence(rng, sort, depth - 1);
            let b = random_sentence(rng, sort, depth - 1);
            match rng.gen_range(0..3) {
                0 => Formula::and(a, b),
                1 => Formula::or(a, b),
                _ => Formula::implies(a, b),
            }
        }
        _ => {
            let inner = random_sentence(rng, sort.flip(), depth - 1);
            let l = match (sort, rng.gen::<bool>()) {
                (Sort::N, true) => Label::NeighAll,
                (Sort::N, false) => Label::NeighSome,
                (Sort::W, true) => Label::WorldAll,
                (Sort::W, false) => Label::WorldSome,
            };
            inner.label(l)
        }
    }
}

const NVARS: [&str; 2] = ["N", "M"];
const WVARS: [&str; 2] = ["u", "v"];

fn any_label() -> BoxedStrategy<Label> {
    prop_oneof![
        Just(Label::NeighAll),
        Just(Label::NeighSome),
        Just(Label::WorldAll),
        Just(Label::WorldSome),
        prop::sample::select(&NVARS[..]).prop_map(Label::var),
        prop::sample::select(&WVARS[..]).prop_map(Label::var),
    ]
    .boxed()
}

fn label_of(sort: Sort) -> BoxedStrategy<Label> {
    let (all, some, vars) = match sort {
        Sort::N => (Label::NeighAll, Label::NeighSome, NVARS),
        Sort::W => (Label::WorldAll, Label::WorldSome, WVARS),
    };
    prop_oneof![Just(all), Just(some), prop::sample::select(vars.to_vec()).prop_map(Label::var)].boxed()
}

/// Well-sorted formulas with free variables, inclusion atoms and `<=`.
pub fn formula(sort: Sort, depth: u32) -> BoxedStrategy<Formula> {
    let leaf = match sort {
        Sort::N => prop_oneof![
            4 => prop::sample::select(&ATOMS[..]).prop_map(Formula::atom),
            1 => Just(Formula::TopN),
            1 => Just(Formula::BotN),
        ]
        .boxed(),
        Sort::W => prop_oneof![
            Just(Formula::TopW),
            Just(Formula::BotW),
            prop::sample::select(&NVARS[..]).prop_map(|n| Formula::Cont(n.into())),
            prop::sample::select(&NVARS[..]).prop_map(|n| Formula::Sub(n.into())),
        ]
        .boxed(),
    };
    if depth == 0 {
        return leaf;
    }
    let same = formula(sort, depth - 1);
    let labelled = (formula(sort.flip(), depth - 1), label_of(sort)).prop_map(|(f, l)| f.label(l));
    let bin = (same.clone(), same.clone(), 0..3u8).prop_map(|(a, b, op)| match op {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        _ => Formula::implies(a, b),
    });
    let mut arms = vec![(1, leaf), (2, labelled.boxed()), (3, bin.boxed()), (1, same.clone().prop_map(Formula::not).boxed())];
    if sort == Sort::N {
        arms.push((1, (same.clone(), same).prop_map(|(a, b)| Formula::prec(a, b)).boxed()));
    }
    prop::strategy::Union::new_weighted(arms).boxed()
}

/// Syntax trees with no regard for sorts.
pub fn tree(depth: u32) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        prop::sample::select(&ATOMS[..]).prop_map(Formula::atom),
        Just(Formula::TopN),
        Just(Formula::BotW),
        prop::sample::select(&["N", "u"][..]).prop_map(|n| Formula::Cont(n.into())),
        prop::sample::select(&["M", "v"][..]).prop_map(|n| Formula::Sub(n.into())),
    ];
    leaf.prop_recursive(depth, 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), any_label()).prop_map(|(f, l)| f.label(l)),
            (inner.clone(), inner.clone(), 0..4u8).prop_map(|(a, b, op)| match op {
                0 => Formula::and(a, b),
                1 => Formula::or(a, b),
                2 => Formula::implies(a, b),
                _ => Formula::prec(a, b),
            }),
        ]
    })
    .boxed()
}

/// Label sequences of length below `max`, sorts unconstrained.
pub fn labels(max: usize) -> BoxedStrategy<Vec<Label>> {
    prop::collection::vec(any_label(), 0..max).boxed()
}
