//! Seeded random programs shared by the integration suites.

#![allow(dead_code)]

use choice_aft::lattice::{AtomSet, Pair, Signature};
use choice_aft::operators::{Approximator, OperatorKind};
use choice_aft::semantics::check_assumption;
use choice_aft::syntax::{
    ChoiceAtom, ChoiceProgram, ChoiceRule, DisjunctiveProgram, DisjunctiveRule, Literal,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn signature(n: usize) -> Signature {
    Signature::new((0..n).map(|i| ["a", "b", "c", "d", "e", "f"][i])).unwrap()
}

fn nonempty_subset(rng: &mut ChaCha8Rng, n: usize) -> AtomSet {
    loop {
        let s = AtomSet::from_bits(rng.gen_range(0..1u64 << n));
        if !s.is_empty() {
            return s;
        }
    }
}

/// Any of the five forms, over a random non-empty domain.
pub fn choice_atom(rng: &mut ChaCha8Rng, n: usize) -> ChoiceAtom {
    let dom = nonempty_subset(rng, n);
    let size = dom.len();
    match rng.gen_range(0..6) {
        0 => ChoiceAtom::literal(rng.gen_range(0..n), true),
        1 => ChoiceAtom::literal(rng.gen_range(0..n), false),
        2 => {
            let lo = rng.gen_range(0..=size);
            let hi = if rng.gen_bool(0.3) {
                None
            } else {
                Some(rng.gen_range(lo..=size))
            };
            ChoiceAtom::cardinality(dom, lo, hi).unwrap()
        }
        3 => ChoiceAtom::count_eq(dom, rng.gen_range(0..=size)).unwrap(),
        4 => ChoiceAtom::count_neq(dom, rng.gen_range(0..=size)).unwrap(),
        _ => {
            let sat: Vec<AtomSet> = dom.subsets().filter(|_| rng.gen_bool(0.5)).collect();
            ChoiceAtom::extensional(dom, sat).unwrap()
        }
    }
}

pub fn literal_atom(rng: &mut ChaCha8Rng, n: usize) -> ChoiceAtom {
    ChoiceAtom::literal(rng.gen_range(0..n), rng.gen_bool(0.5))
}

#[derive(Clone, Copy)]
pub enum Shape {
    /// Arbitrary heads and bodies.
    Any,
    /// Literal bodies, arbitrary heads.
    Normal,
    /// Positive atom heads, arbitrary bodies.
    Aggregate,
    /// Positive atom heads, literal bodies.
    NormalLogic,
}

pub fn program(rng: &mut ChaCha8Rng, n: usize, shape: Shape) -> ChoiceProgram {
    let rules = rng.gen_range(1..=4);
    let mut out = Vec::new();
    for _ in 0..rules {
        let head = match shape {
            Shape::Any | Shape::Normal => choice_atom(rng, n),
            Shape::Aggregate | Shape::NormalLogic => ChoiceAtom::literal(rng.gen_range(0..n), true),
        };
        let len = rng.gen_range(0..=2);
        let body = (0..len)
            .map(|_| match shape {
                Shape::Any | Shape::Aggregate => choice_atom(rng, n),
                Shape::Normal | Shape::NormalLogic => literal_atom(rng, n),
            })
            .collect();
        out.push(ChoiceRule::new(head, body));
    }
    ChoiceProgram::new(signature(n), out).unwrap()
}

/// Programs meeting the non-emptiness assumption, with the number of
/// rejected draws.
pub fn programs(
    seed: u64,
    count: usize,
    max_atoms: usize,
    shape: Shape,
) -> (Vec<ChoiceProgram>, usize) {
    let mut rng = rng(seed);
    let mut out = Vec::new();
    let mut rejected = 0;
    while out.len() < count {
        let n = rng.gen_range(1..=max_atoms);
        let p = program(&mut rng, n, shape);
        if check_assumption(&Approximator::new(&p), OperatorKind::Ult).is_ok() {
            out.push(p);
        } else {
            rejected += 1;
        }
    }
    (out, rejected)
}

pub fn dlp(rng: &mut ChaCha8Rng, n: usize) -> DisjunctiveProgram {
    let rules = rng.gen_range(1..=4);
    let mut out = Vec::new();
    for _ in 0..rules {
        let head = nonempty_subset(rng, n);
        let len = rng.gen_range(0..=2);
        let body = (0..len)
            .map(|_| Literal {
                atom: rng.gen_range(0..n),
                positive: rng.gen_bool(0.5),
            })
            .collect();
        out.push(DisjunctiveRule::new(head, body).unwrap());
    }
    DisjunctiveProgram::new(signature(n), out).unwrap()
}

pub fn dlps(seed: u64, count: usize, max_atoms: usize) -> Vec<DisjunctiveProgram> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_atoms);
            dlp(&mut rng, n)
        })
        .collect()
}

/// Every pair over the signature, consistent or not.
pub fn all_pairs(sig: &Signature) -> Vec<Pair> {
    let full = sig.full();
    full.subsets()
        .flat_map(|x| full.subsets().map(move |y| Pair::new(x, y)))
        .collect()
}

pub fn consistent_pairs(sig: &Signature) -> Vec<Pair> {
    all_pairs(sig)
        .into_iter()
        .filter(|p| p.is_consistent())
        .collect()
}

pub fn shuffled<T: Clone>(rng: &mut ChaCha8Rng, items: &[T]) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(rng);
    v
}
