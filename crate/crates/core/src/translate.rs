//! Reduction of each bit of a robust valuation to a classical LTL formula.
//!
//! For every rLTL formula `φ` and bit `j`, `ltl_bit(j, φ)` holds on a word
//! exactly when bit `j` of the robust value of `φ` is set. Structurally equal
//! subformulas are translated once, so the four translations share subtrees.

use std::collections::{BTreeSet, HashMap};

use crate::formula::{Kind, Ltl, Rltl};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bit index {0} is out of range, expected 1..=4")]
pub struct BitIndexError(pub usize);

/// Memoizing translator; reuse one instance to share subtrees across bits.
#[derive(Default)]
pub struct Translator {
    memo: HashMap<(usize, Rltl), Ltl>,
}

impl Translator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bit(&mut self, j: usize, f: &Rltl) -> Result<Ltl, BitIndexError> {
        if !(1..=4).contains(&j) {
            return Err(BitIndexError(j));
        }
        Ok(self.go(j, f))
    }

    fn go(&mut self, j: usize, f: &Rltl) -> Ltl {
        if let Some(hit) = self.memo.get(&(j, f.clone())) {
            return hit.clone();
        }
        let out = match f.kind() {
            Kind::True => Ltl::tt(),
            Kind::False => Ltl::ff(),
            Kind::Atom(a) => Ltl::atom(a),
            Kind::Not(a) => Ltl::not(self.go(1, a)),
            Kind::And(a, b) => Ltl::and(self.go(j, a), self.go(j, b)),
            Kind::Or(a, b) => Ltl::or(self.go(j, a), self.go(j, b)),
            Kind::Next(a) => Ltl::next(self.go(j, a)),
            Kind::Eventually(a) => Ltl::eventually(self.go(j, a)),
            Kind::Until(a, b) => Ltl::until(self.go(j, a), self.go(j, b)),
            Kind::Always(a) => {
                let a = self.go(j, a);
                match j {
                    1 => Ltl::always(a),
                    2 => Ltl::eventually(Ltl::always(a)),
                    3 => Ltl::always(Ltl::eventually(a)),
                    _ => Ltl::eventually(a),
                }
            }
            Kind::Release(a, b) => {
                let (a, b) = (self.go(j, a), self.go(j, b));
                match j {
                    1 => Ltl::release(a, b),
                    2 => Ltl::or(Ltl::eventually(a), Ltl::eventually(Ltl::always(b))),
                    3 => Ltl::or(Ltl::eventually(a), Ltl::always(Ltl::eventually(b))),
                    _ => Ltl::or(Ltl::eventually(a), Ltl::eventually(b)),
                }
            }
            Kind::Implies(a, b) => {
                let here = Ltl::implies(self.go(j, a), self.go(j, b));
                if j == 4 {
                    here
                } else {
                    Ltl::and(here, self.go(j + 1, f))
                }
            }
            Kind::WeakUntil(a, b) => {
                let expanded = Rltl::release(b.clone(), Rltl::or(b.clone(), a.clone()));
                self.go(j, &expanded)
            }
        };
        self.memo.insert((j, f.clone()), out.clone());
        out
    }
}

/// The LTL formula computing bit `j` (1-based) of the robust value of `f`.
pub fn ltl_bit(j: usize, f: &Rltl) -> Result<Ltl, BitIndexError> {
    Translator::new().bit(j, f)
}

/// All four translations, bit 1 first.
pub fn ltl_bits(f: &Rltl) -> [Ltl; 4] {
    let mut t = Translator::new();
    std::array::from_fn(|i| t.go(i + 1, f))
}

/// Number of distinct subformulas across the four translations of `f`.
pub fn translation_size(f: &Rltl) -> usize {
    ltl_bits(f).iter().flat_map(|g| g.closure()).collect::<BTreeSet<_>>().len()
}
