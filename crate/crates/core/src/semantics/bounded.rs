//! Exhaustive search over all small frames.
//!
//! Frames are visited up to renaming of worlds: only the lexicographically
//! least member of each isomorphism class is kept. Every valuation and every
//! reference world is tried on it, so nothing is lost.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::model::{decompile, Assignment, Model};
use crate::parser::ModelDoc;
use crate::syntax::{classify, Formula, Sort};

use super::fast::{FastEval, FastFrame, FAST_WORLDS};
use super::EvalError;

pub const DEFAULT_BUDGET: u64 = 200_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum BoundedVerdict {
    Valid { models: u64 },
    Countermodel { model: ModelDocJson, models: u64 },
}

impl BoundedVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, BoundedVerdict::Valid { .. })
    }

    pub fn countermodel(&self) -> Option<&ModelDoc> {
        match self {
            BoundedVerdict::Countermodel { model, .. } => Some(&model.0),
            _ => None,
        }
    }
}

/// Serializes as the model JSON format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelDocJson(pub ModelDoc);

impl Serialize for ModelDocJson {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        crate::parser::model_to_json(&self.0).serialize(s)
    }
}

/// All neighbourhood chains over `n` worlds, and frame representatives.
#[derive(Clone, Debug)]
pub struct FrameSpace {
    pub n: usize,
    /// Strictly increasing chains of non-empty sets, shortest first then lexicographic.
    pub chains: Vec<Vec<u64>>,
}

impl FrameSpace {
    pub fn new(n: usize) -> FrameSpace {
        assert!((1..=FAST_WORLDS).contains(&n));
        let full = (1u64 << n) - 1;
        let mut chains = vec![Vec::new()];
        let mut frontier: Vec<Vec<u64>> = vec![Vec::new()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for c in &frontier {
                let last = c.last().copied().unwrap_or(0);
                for s in 1..=full {
                    if s & last == last && s != last {
                        let mut d = c.clone();
                        d.push(s);
                        next.push(d);
                    }
                }
            }
            next.sort();
            chains.extend(next.iter().cloned());
            frontier = next;
        }
        FrameSpace { n, chains }
    }

    /// Number of frames before symmetry reduction.
    pub fn raw_size(&self) -> u128 {
        (self.chains.len() as u128).pow(self.n as u32)
    }

    /// Chain-index tuples, one per isomorphism class, in lexicographic order.
    pub fn representatives(&self) -> Vec<Vec<usize>> {
        let index: HashMap<&Vec<u64>, usize> = self.chains.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let perms = permutations(self.n);
        let k = self.chains.len();
        let mut out = Vec::new();
        let mut tuple = vec![0usize; self.n];
        loop {
            let canonical = perms.iter().all(|p| {
                let mut img = vec![0usize; self.n];
                for (w, &ci) in tuple.iter().enumerate() {
                    let mapped: Vec<u64> = self.chains[ci].iter().map(|&m| permute_mask(m, p)).collect();
                    img[p[w]] = index[&mapped];
                }
                img >= tuple
            });
            if canonical {
                out.push(tuple.clone());
            }
            // odometer, world 0 most significant
            let mut i = self.n;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                tuple[i] += 1;
                if tuple[i] < k {
                    break;
                }
                tuple[i] = 0;
            }
        }
    }

    pub fn frame(&self, tuple: &[usize]) -> FastFrame {
        FastFrame::new(tuple.iter().map(|&i| self.chains[i].clone()).collect())
    }
}

/// Number of strictly increasing chains of non-empty subsets of an n-set, the empty chain included.
pub fn chain_count(n: usize) -> u128 {
    // a chain of length k over a j-element union is an ordered partition of it into k blocks
    let mut binom = vec![vec![0u128; n + 1]; n + 1];
    let mut stirling = vec![vec![0u128; n + 1]; n + 1];
    for i in 0..=n {
        binom[i][0] = 1;
        for j in 1..=i {
            binom[i][j] = binom[i - 1][j - 1] + if j < i { binom[i - 1][j] } else { 0 };
        }
    }
    stirling[0][0] = 1;
    for i in 1..=n {
        for k in 1..=i {
            stirling[i][k] = k as u128 * stirling[i - 1][k] + stirling[i - 1][k - 1];
        }
    }
    let mut total = 0;
    for j in 0..=n {
        for k in 0..=j {
            total += binom[n][j] * factorial(k) * stirling[j][k];
        }
    }
    total
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn permute_mask(m: u64, p: &[usize]) -> u64 {
    (0..p.len()).filter(|&i| m >> i & 1 == 1).fold(0, |acc, i| acc | 1 << p[i])
}

fn require_sentences(fs: &[&Formula]) -> Result<Sort, EvalError> {
    let mut sort = None;
    for f in fs {
        let s = classify(f)?;
        if !f.is_sentence() {
            return Err(EvalError::NotSentence(crate::parser::render_formula(f)));
        }
        if sort.is_some_and(|t| t != s) {
            return Err(EvalError::MixedSorts);
        }
        sort = Some(s);
    }
    Ok(sort.unwrap_or(Sort::N))
}

fn countermodel(
    space: &FrameSpace,
    tuple: &[usize],
    atoms: &[String],
    val: &[u64],
    world: usize,
    neighbourhood: Option<usize>,
) -> ModelDoc {
    let chains: Vec<Vec<u64>> = tuple.iter().map(|&i| space.chains[i].clone()).collect();
    let valuation: BTreeMap<String, u64> = atoms.iter().cloned().zip(val.iter().copied()).collect();
    let frame = decompile(space.n, &chains, &valuation);
    let reference_neighbourhood = neighbourhood.map(|i| {
        let m = chains[world][i];
        (0..space.n).filter(|j| m >> j & 1 == 1).map(|j| format!("w{j}")).collect()
    });
    ModelDoc {
        model: Model { frame, reference: format!("w{world}") },
        reference_neighbourhood,
        assignment: Assignment::default(),
    }
}

/// Every premise true and the conclusion false, as a world mask (N) or per world chain masks (W).
fn search(gamma: &[&Formula], f: &Formula, max_worlds: usize, budget: u64) -> Result<BoundedVerdict, EvalError> {
    let mut all: Vec<&Formula> = gamma.to_vec();
    all.push(f);
    let sort = require_sentences(&all)?;
    let atoms: Vec<String> = all.iter().flat_map(|g| g.atoms()).collect::<BTreeSet<_>>().into_iter().collect();
    let evals: Vec<FastEval> = all.iter().map(|g| FastEval::new(g)).collect::<Result<_, _>>().map_err(fast_err)?;
    let positions: Vec<Vec<usize>> = evals
        .iter()
        .map(|e| e.atoms().iter().map(|a| atoms.iter().position(|b| b == a).unwrap()).collect())
        .collect();
    let mut models = 0u64;
    let mut scratch = Vec::new();
    let mut local = Vec::new();
    for n in 1..=max_worlds.min(FAST_WORLDS) {
        // building the representatives alone costs about chains^n * n! steps
        if chain_count(n).pow(n as u32) * factorial(n) > budget as u128 {
            return Err(EvalError::Budget(budget));
        }
        let space = FrameSpace::new(n);
        let vals_per_frame = 1u128 << (n * atoms.len());
        for tuple in space.representatives() {
            let fr = space.frame(&tuple);
            for code in 0..vals_per_frame as u64 {
                models += 1;
                if models > budget {
                    return Err(EvalError::Budget(budget));
                }
                let val: Vec<u64> = (0..atoms.len()).map(|j| (code >> (j * n)) & fr.all()).collect();
                let mut acc: Option<[u64; FAST_WORLDS]> = None;
                for (k, e) in evals.iter().enumerate() {
                    local.clear();
                    local.extend(positions[k].iter().map(|&p| val[p]));
                    let mut v = e.eval(&fr, &local, &mut scratch);
                    let is_conclusion = k == evals.len() - 1;
                    for w in 0..n {
                        let m = if sort == Sort::N { fr.all() } else { fr.full(w) };
                        if is_conclusion {
                            v[w] = !v[w] & m;
                        }
                    }
                    acc = Some(match acc {
                        None => v,
                        Some(mut a) => {
                            for w in 0..FAST_WORLDS {
                                a[w] &= v[w];
                            }
                            a
                        }
                    });
                }
                let bad = acc.unwrap();
                let hit = match sort {
                    Sort::N => (bad[0] != 0).then(|| (bad[0].trailing_zeros() as usize, None)),
                    Sort::W => (0..n).find(|&w| bad[w] != 0).map(|w| (w, Some(bad[w].trailing_zeros() as usize))),
                };
                if let Some((w, nb)) = hit {
                    return Ok(BoundedVerdict::Countermodel {
                        model: ModelDocJson(countermodel(&space, &tuple, &atoms, &val, w, nb)),
                        models,
                    });
                }
            }
        }
    }
    Ok(BoundedVerdict::Valid { models })
}

fn fast_err(e: super::FastError) -> EvalError {
    match e {
        super::FastError::NotSentence(s) => EvalError::NotSentence(s),
        super::FastError::IllSorted(e) => EvalError::IllSorted(e),
    }
}

/// Validity over every model (N-sort) or template (W-sort) with at most `max_worlds` worlds.
pub fn valid_bounded(f: &Formula, max_worlds: usize, budget: u64) -> Result<BoundedVerdict, EvalError> {
    search(&[], f, max_worlds, budget)
}

/// `gamma` entails `f` over every structure with at most `max_worlds` worlds.
pub fn consequence_bounded(
    gamma: &[Formula],
    f: &Formula,
    max_worlds: usize,
    budget: u64,
) -> Result<BoundedVerdict, EvalError> {
    let g: Vec<&Formula> = gamma.iter().collect();
    search(&g, f, max_worlds, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{compile, Structure};
    use crate::parser::parse_formula;
    use crate::semantics::satisfies;

    fn pf(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn chain_counts() {
        // chains of non-empty subsets of an n-set, counted by hand for small n
        assert_eq!(FrameSpace::new(1).chains.len(), 2);
        assert_eq!(FrameSpace::new(2).chains.len(), 6);
        assert_eq!(FrameSpace::new(3).chains.len(), 26);
        for n in 1..=4 {
            assert_eq!(chain_count(n), FrameSpace::new(n).chains.len() as u128);
        }
    }

    #[test]
    fn representatives_cover_orbits() {
        let s = FrameSpace::new(2);
        let reps = s.representatives();
        // 36 frames; 6 fixed by the swap, so (36 + 6) / 2 classes
        assert_eq!(reps.len(), 21);
    }

    #[test]
    fn trivial_examples() {
        assert!(valid_bounded(&Formula::TopN, 3, DEFAULT_BUDGET).unwrap().is_valid());
        let v = valid_bounded(&pf("p"), 3, DEFAULT_BUDGET).unwrap();
        let m = v.countermodel().unwrap();
        assert_eq!(m.model.frame.worlds.len(), 1);
        assert!(!satisfies(&m.structure(), &pf("p"), &Assignment::default()).unwrap());
    }

    #[test]
    fn consequence_examples() {
        let f = pf("p^{+,@+}");
        assert!(consequence_bounded(std::slice::from_ref(&f), &f, 3, DEFAULT_BUDGET).unwrap().is_valid());
        assert!(consequence_bounded(&[pf("p & q")], &pf("p"), 3, DEFAULT_BUDGET).unwrap().is_valid());
        let v = consequence_bounded(std::slice::from_ref(&f), &pf("p^{*,@*}"), 3, DEFAULT_BUDGET).unwrap();
        let m = v.countermodel().unwrap().structure();
        assert!(satisfies(&m, &f, &Assignment::default()).unwrap());
        assert!(!satisfies(&m, &pf("p^{*,@*}"), &Assignment::default()).unwrap());
    }

    #[test]
    fn w_sort_uses_templates() {
        let v = valid_bounded(&pf("p^{+}"), 2, DEFAULT_BUDGET).unwrap();
        let m = v.countermodel().unwrap();
        assert!(m.reference_neighbourhood.is_some());
        assert!(valid_bounded(&pf("p^{*} -> p^{+}"), 3, DEFAULT_BUDGET).unwrap().is_valid());
    }

    #[test]
    fn rejects_non_sentences() {
        assert!(matches!(valid_bounded(&pf("p^{+,N}"), 2, DEFAULT_BUDGET), Err(EvalError::NotSentence(_))));
        assert!(matches!(
            consequence_bounded(&[pf("p")], &pf("p^{+}"), 2, DEFAULT_BUDGET),
            Err(EvalError::MixedSorts)
        ));
    }

    #[test]
    fn tautology_instance_valid() {
        let f = pf("((~p)^{*} & q^{+})^{@+} -> (p^{+} -> q^{+})^{@*}");
        assert!(valid_bounded(&f, 3, DEFAULT_BUDGET).unwrap().is_valid());
    }

    #[test]
    fn budget_guard() {
        assert_eq!(valid_bounded(&pf("p | ~p"), 3, 10), Err(EvalError::Budget(10)));
    }

    #[test]
    fn fast_agrees_with_recursive() {
        let fs = ["p^{+,@+}", "(p^{*} -> q^{+})^{@*}", "~(p^{+} & q^{*})^{@+} | q", "(p^{+,@*,*})^{@+}"];
        let space = FrameSpace::new(2);
        for s in fs {
            let f = pf(s);
            let fe = FastEval::new(&f).unwrap();
            let mut scratch = Vec::new();
            for t in space.representatives() {
                let fr = space.frame(&t);
                for code in 0..(1u64 << (2 * fe.atoms().len())) {
                    let val: Vec<u64> = (0..fe.atoms().len()).map(|j| (code >> (2 * j)) & 3).collect();
                    let fast = fe.eval(&fr, &val, &mut scratch)[0];
                    let doc = countermodel(&space, &t, fe.atoms(), &val, 0, None);
                    let c = compile(&doc.model.frame);
                    for w in 0..2 {
                        let m = Model { frame: doc.model.frame.clone(), reference: c.names[w].clone() };
                        let slow = satisfies(&Structure::Model(m), &f, &Assignment::default()).unwrap();
                        assert_eq!(fast >> w & 1 == 1, slow, "{s} on {t:?} val {val:?} at w{w}");
                    }
                }
            }
        }
    }
}
