//! Brute-force oracles over bitmasks, and seeded random instances.
//!
//! Bit `i` of a mask stands for attribute `i` of the universe. Nothing here
//! calls the enumeration code under test.

#![allow(dead_code)]

use fcax_core::{
    AttributeSet, AttributeUniverse, BitSet, CellValue, FormalContext, Implication, ImplicationSet,
    IncompleteContext, Row, SimulatedView,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Mask = u32;

pub fn universe(n: usize) -> AttributeUniverse {
    AttributeUniverse::new((0..n).map(|i| format!("m{i}"))).unwrap()
}

pub fn full(n: usize) -> Mask {
    (1 << n) - 1
}

pub fn mask(set: &AttributeSet) -> Mask {
    set.indices().fold(0, |acc, i| acc | 1 << i)
}

pub fn bits(n: usize, m: Mask) -> BitSet {
    BitSet::from_indices(n, (0..n).filter(|i| m >> i & 1 == 1))
}

pub fn set(u: &AttributeUniverse, m: Mask) -> AttributeSet {
    let names: Vec<&str> = (0..u.len()).filter(|i| m >> i & 1 == 1).map(|i| u.name(i)).collect();
    u.set(names).unwrap()
}

pub fn subset(a: Mask, b: Mask) -> bool {
    a & !b == 0
}

/// `A < B` lectically: the smallest differing index lies in `B`.
pub fn lectic_less(a: Mask, b: Mask) -> bool {
    let d = a ^ b;
    d != 0 && b & (d & d.wrapping_neg()) != 0
}

pub fn intents(ctx: &FormalContext) -> Vec<Mask> {
    ctx.objects()
        .iter()
        .map(|g| mask(&ctx.derive_attributes(&[g]).unwrap()))
        .collect()
}

/// `X''`: the meet of all object intents containing `x`.
pub fn context_closure(rows: &[Mask], n: usize, x: Mask) -> Mask {
    rows.iter().filter(|r| subset(x, **r)).fold(full(n), |acc, r| acc & r)
}

pub fn rules(set: &ImplicationSet) -> Vec<(Mask, Mask)> {
    set.iter().map(|i| (mask(i.premise()), mask(i.conclusion()))).collect()
}

/// Naive fixpoint of a rule list.
pub fn rule_closure(rules: &[(Mask, Mask)], x: Mask) -> Mask {
    let mut x = x;
    loop {
        let next = rules.iter().filter(|(p, _)| subset(*p, x)).fold(x, |acc, (_, c)| acc | c);
        if next == x {
            return x;
        }
        x = next;
    }
}

/// Every `x` with `close(x) == x`, in lectic order.
pub fn closed_sets(n: usize, close: &dyn Fn(Mask) -> Mask) -> Vec<Mask> {
    let mut out: Vec<Mask> = (0..=full(n)).filter(|x| close(*x) == *x).collect();
    out.sort_by(|a, b| lectic_order(*a, *b));
    out
}

pub fn lectic_order(a: Mask, b: Mask) -> std::cmp::Ordering {
    if a == b {
        std::cmp::Ordering::Equal
    } else if lectic_less(a, b) {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Greater
    }
}

/// Pseudo-intents of `close` relative to `background`, by increasing size:
/// `P` respects the background, `P ≠ P''`, and `Q'' ⊆ P` for every
/// pseudo-intent `Q ⊊ P`. Returned in lectic order.
pub fn pseudo_intents(n: usize, close: &dyn Fn(Mask) -> Mask, background: &[(Mask, Mask)]) -> Vec<Mask> {
    let mut candidates: Vec<Mask> = (0..=full(n)).collect();
    candidates.sort_by_key(|x| x.count_ones());
    let mut found: Vec<Mask> = Vec::new();
    for p in candidates {
        if rule_closure(background, p) != p || close(p) == p {
            continue;
        }
        if found.iter().all(|q| !(subset(*q, p) && *q != p) || subset(close(*q), p)) {
            found.push(p);
        }
    }
    found.sort_by(|a, b| lectic_order(*a, *b));
    found
}

/// Every valid `premise → attribute` pair of `close`.
pub fn valid_unit_implications(n: usize, close: &dyn Fn(Mask) -> Mask) -> Vec<(Mask, usize)> {
    let mut out = Vec::new();
    for p in 0..=full(n) {
        let c = close(p);
        for m in 0..n {
            if c >> m & 1 == 1 && p >> m & 1 == 0 {
                out.push((p, m));
            }
        }
    }
    out
}

pub fn implication(u: &AttributeUniverse, premise: Mask, conclusion: Mask) -> Implication {
    Implication::new(set(u, premise), set(u, conclusion)).unwrap()
}

pub fn random_formal(rng: &mut ChaCha8Rng, u: &AttributeUniverse, max_objects: usize) -> FormalContext {
    let g = rng.gen_range(0..=max_objects);
    let rows: Vec<(String, Row)> = (0..g)
        .map(|k| (format!("g{k}"), Row::formal(bits(u.len(), rng.gen_range(0..=full(u.len()))))))
        .collect();
    IncompleteContext::from_rows(u.clone(), rows).unwrap().into_formal().unwrap()
}

pub fn random_incomplete(rng: &mut ChaCha8Rng, u: &AttributeUniverse, max_objects: usize) -> IncompleteContext {
    let g = rng.gen_range(0..=max_objects);
    let choices = [CellValue::Cross, CellValue::Blank, CellValue::Unknown];
    let rows: Vec<(String, Row)> = (0..g)
        .map(|k| {
            let cells: Vec<CellValue> = (0..u.len()).map(|_| *choices.choose(rng).unwrap()).collect();
            (format!("g{k}"), Row::from_cells(&cells))
        })
        .collect();
    IncompleteContext::from_rows(u.clone(), rows).unwrap()
}

pub fn random_theory(rng: &mut ChaCha8Rng, u: &AttributeUniverse, max_rules: usize) -> ImplicationSet {
    let n = u.len();
    let mut out = ImplicationSet::new(u.clone());
    for _ in 0..rng.gen_range(0..=max_rules) {
        let p = rng.gen_range(0..=full(n)) & rng.gen_range(0..=full(n));
        let c = rng.gen_range(0..=full(n)) & rng.gen_range(0..=full(n));
        out.push(implication(u, p, c)).unwrap();
    }
    out
}

/// A complete view: a random theory and a few of its models as objects.
pub fn random_expert(rng: &mut ChaCha8Rng, u: &AttributeUniverse) -> SimulatedView {
    let theory = random_theory(rng, u, 4);
    let rs = rules(&theory);
    let rows: Vec<(String, Row)> = (0..rng.gen_range(0..=3))
        .map(|k| {
            let m = rule_closure(&rs, rng.gen_range(0..=full(u.len())));
            (format!("g{k}"), Row::formal(bits(u.len(), m)))
        })
        .collect();
    let ctx = IncompleteContext::from_rows(u.clone(), rows).unwrap();
    SimulatedView::complete(ctx, theory).unwrap()
}
