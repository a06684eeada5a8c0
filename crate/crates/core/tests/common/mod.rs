//! Seeded random generators shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use rltl::formula::{Formula, Logic};
use rltl::kripke::KripkeStructure;
use rltl::lasso::{LassoWord, Letter};
use rltl::Rltl;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub const ATOMS: [&str; 3] = ["p", "q", "r"];

pub fn rng(seed: u64) -> TestRng {
    TestRng::seed_from_u64(seed)
}

#[derive(Clone, Copy)]
pub struct Shape {
    pub depth: usize,
    pub implications: bool,
    pub constants: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { depth: 4, implications: true, constants: true }
    }
}

fn gen<L: Logic>(rng: &mut TestRng, atoms: &[&str], depth: usize, shape: Shape) -> Formula<L> {
    if depth == 0 || rng.gen_bool(0.25) {
        if shape.constants && rng.gen_bool(0.08) {
            return if rng.gen() { Formula::tt() } else { Formula::ff() };
        }
        return Formula::atom(atoms.choose(rng).unwrap());
    }
    let d = depth - 1;
    let ops = if shape.implications { 11 } else { 10 };
    match rng.gen_range(0..ops) {
        0 => Formula::not(gen(rng, atoms, d, shape)),
        1 => Formula::and(gen(rng, atoms, d, shape), gen(rng, atoms, d, shape)),
        2 => Formula::or(gen(rng, atoms, d, shape), gen(rng, atoms, d, shape)),
        3 => Formula::next(gen(rng, atoms, d, shape)),
        4 => Formula::eventually(gen(rng, atoms, d, shape)),
        5 | 6 => Formula::always(gen(rng, atoms, d, shape)),
        7 => Formula::until(gen(rng, atoms, d, shape), gen(rng, atoms, d, shape)),
        8 | 9 => Formula::release(gen(rng, atoms, d, shape), gen(rng, atoms, d, shape)),
        _ => Formula::implies(gen(rng, atoms, d, shape), gen(rng, atoms, d, shape)),
    }
}

/// A random formula with at most `max_len` distinct subformulas.
pub fn formula<L: Logic>(rng: &mut TestRng, max_len: usize, shape: Shape) -> Formula<L> {
    loop {
        let f = gen(rng, &ATOMS, shape.depth, shape);
        if f.length() <= max_len {
            return f;
        }
    }
}

/// A random formula satisfying `keep`.
pub fn formula_where(rng: &mut TestRng, max_len: usize, shape: Shape, keep: impl Fn(&Rltl) -> bool) -> Rltl {
    loop {
        let f: Rltl = formula(rng, max_len, shape);
        if keep(&f) {
            return f;
        }
    }
}

/// A robust formula inside the efficiently checkable fragment.
pub fn fragment_formula(rng: &mut TestRng, max_len: usize) -> Rltl {
    formula_where(rng, max_len, Shape::default(), |f| f.classify().in_fragment())
}

pub fn letter(rng: &mut TestRng, atoms: &[&str]) -> Letter {
    atoms.iter().filter(|_| rng.gen_bool(0.5)).map(|a| a.to_string()).collect()
}

pub fn lasso(rng: &mut TestRng, max_stem: usize, max_loop: usize) -> LassoWord {
    let stem = (0..rng.gen_range(0..=max_stem)).map(|_| letter(rng, &ATOMS)).collect();
    let cycle = (0..rng.gen_range(1..=max_loop)).map(|_| letter(rng, &ATOMS)).collect();
    LassoWord::new(stem, cycle).unwrap()
}

/// A random Kripke structure over all of `ATOMS` with up to `max_states`
/// states, each with one to three successors.
pub fn kripke(rng: &mut TestRng, max_states: usize) -> KripkeStructure {
    let n = rng.gen_range(1..=max_states);
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let labels: Vec<Vec<&str>> =
        (0..n).map(|_| ATOMS.iter().copied().filter(|_| rng.gen_bool(0.5)).collect()).collect();
    let states: Vec<(&str, &[&str])> = names.iter().zip(&labels).map(|(n, l)| (n.as_str(), l.as_slice())).collect();
    let mut trans = Vec::new();
    for a in &names {
        let k = rng.gen_range(1..=3.min(n));
        for b in names.choose_multiple(rng, k) {
            trans.push((a.as_str(), b.as_str()));
        }
    }
    let k = rng.gen_range(1..=2.min(n));
    let init: Vec<&str> = names.choose_multiple(rng, k).map(String::as_str).collect();
    KripkeStructure::new(&ATOMS, &states, &init, &trans).unwrap()
}

/// A random lasso-shaped path of `k`: the walk stops once it revisits a
/// state, closing the loop there.
pub fn kripke_path(rng: &mut TestRng, k: &KripkeStructure) -> (Vec<usize>, Vec<usize>) {
    let mut seq = vec![*k.initial().choose(rng).unwrap()];
    loop {
        let next = *k.successors(*seq.last().unwrap()).choose(rng).unwrap();
        if let Some(i) = seq.iter().position(|&s| s == next) {
            let cycle = seq.split_off(i);
            return (seq, cycle);
        }
        seq.push(next);
    }
}
