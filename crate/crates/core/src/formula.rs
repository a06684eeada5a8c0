//! Abstract syntax for LTL and robust LTL.
//!
//! Both logics share one tree shape; the `L` marker only decides how the
//! connectives are read (and rendered). Nodes are reference counted and carry
//! a cached structural hash, so shared subtrees are cheap to clone, compare
//! and use as map keys.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::marker::PhantomData;
use std::sync::Arc;

/// Marker for the two logics.
pub trait Logic:
    Copy + Clone + Default + fmt::Debug + PartialEq + Eq + PartialOrd + Ord + Hash + Send + Sync + 'static
{
    const ROBUST: bool;
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Classical;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Robust;

impl Logic for Classical {
    const ROBUST: bool = false;
}

impl Logic for Robust {
    const ROBUST: bool = true;
}

pub type Ltl = Formula<Classical>;
pub type Rltl = Formula<Robust>;

/// One node of a formula tree. In the robust logic `Implies`, `Next`,
/// `Eventually`, `Always`, `Until`, `Release` and `WeakUntil` denote the
/// dotted (robust) operators.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Kind<L: Logic> {
    True,
    False,
    Atom(Arc<str>),
    Not(Formula<L>),
    And(Formula<L>, Formula<L>),
    Or(Formula<L>, Formula<L>),
    Implies(Formula<L>, Formula<L>),
    Next(Formula<L>),
    Eventually(Formula<L>),
    Always(Formula<L>),
    Until(Formula<L>, Formula<L>),
    Release(Formula<L>, Formula<L>),
    WeakUntil(Formula<L>, Formula<L>),
}

struct Node<L: Logic> {
    hash: u64,
    kind: Kind<L>,
    logic: PhantomData<L>,
}

pub struct Formula<L: Logic>(Arc<Node<L>>);

impl<L: Logic> Clone for Formula<L> {
    fn clone(&self) -> Self {
        Formula(Arc::clone(&self.0))
    }
}

impl<L: Logic> PartialEq for Formula<L> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.hash == other.0.hash && self.0.kind == other.0.kind)
    }
}

impl<L: Logic> Eq for Formula<L> {}

impl<L: Logic> Hash for Formula<L> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl<L: Logic> PartialOrd for Formula<L> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<L: Logic> Ord for Formula<L> {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.kind.cmp(&other.0.kind)
    }
}

impl<L: Logic> fmt::Debug for Formula<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", self)
    }
}

impl<L: Logic> fmt::Display for Formula<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::render(self, crate::parser::RenderOptions::default()))
    }
}

impl<L: Logic> Kind<L> {
    fn tag(&self) -> u8 {
        match self {
            Kind::True => 0,
            Kind::False => 1,
            Kind::Atom(_) => 2,
            Kind::Not(_) => 3,
            Kind::And(..) => 4,
            Kind::Or(..) => 5,
            Kind::Implies(..) => 6,
            Kind::Next(_) => 7,
            Kind::Eventually(_) => 8,
            Kind::Always(_) => 9,
            Kind::Until(..) => 10,
            Kind::Release(..) => 11,
            Kind::WeakUntil(..) => 12,
        }
    }

    pub fn children(&self) -> Vec<&Formula<L>> {
        match self {
            Kind::True | Kind::False | Kind::Atom(_) => vec![],
            Kind::Not(a) | Kind::Next(a) | Kind::Eventually(a) | Kind::Always(a) => vec![a],
            Kind::And(a, b)
            | Kind::Or(a, b)
            | Kind::Implies(a, b)
            | Kind::Until(a, b)
            | Kind::Release(a, b)
            | Kind::WeakUntil(a, b) => vec![a, b],
        }
    }

    /// Rebuilds the same operator over new children (same arity required).
    fn with_children<M: Logic>(&self, mut kids: Vec<Formula<M>>) -> Kind<M> {
        let mut next = || kids.remove(0);
        match self {
            Kind::True => Kind::True,
            Kind::False => Kind::False,
            Kind::Atom(name) => Kind::Atom(name.clone()),
            Kind::Not(_) => Kind::Not(next()),
            Kind::Next(_) => Kind::Next(next()),
            Kind::Eventually(_) => Kind::Eventually(next()),
            Kind::Always(_) => Kind::Always(next()),
            Kind::And(..) => Kind::And(next(), next()),
            Kind::Or(..) => Kind::Or(next(), next()),
            Kind::Implies(..) => Kind::Implies(next(), next()),
            Kind::Until(..) => Kind::Until(next(), next()),
            Kind::Release(..) => Kind::Release(next(), next()),
            Kind::WeakUntil(..) => Kind::WeakUntil(next(), next()),
        }
    }
}

impl<L: Logic> Formula<L> {
    pub fn new(kind: Kind<L>) -> Self {
        let mut hasher = DefaultHasher::new();
        kind.tag().hash(&mut hasher);
        match &kind {
            Kind::Atom(name) => name.hash(&mut hasher),
            other => {
                for child in other.children() {
                    hasher.write_u64(child.0.hash);
                }
            }
        }
        Formula(Arc::new(Node { hash: hasher.finish(), kind, logic: PhantomData }))
    }

    pub fn kind(&self) -> &Kind<L> {
        &self.0.kind
    }

    pub fn tt() -> Self {
        Self::new(Kind::True)
    }

    pub fn ff() -> Self {
        Self::new(Kind::False)
    }

    pub fn atom(name: &str) -> Self {
        Self::new(Kind::Atom(Arc::from(name)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Self) -> Self {
        Self::new(Kind::Not(a))
    }

    pub fn and(a: Self, b: Self) -> Self {
        Self::new(Kind::And(a, b))
    }

    pub fn or(a: Self, b: Self) -> Self {
        Self::new(Kind::Or(a, b))
    }

    pub fn implies(a: Self, b: Self) -> Self {
        Self::new(Kind::Implies(a, b))
    }

    pub fn next(a: Self) -> Self {
        Self::new(Kind::Next(a))
    }

    pub fn eventually(a: Self) -> Self {
        Self::new(Kind::Eventually(a))
    }

    pub fn always(a: Self) -> Self {
        Self::new(Kind::Always(a))
    }

    pub fn until(a: Self, b: Self) -> Self {
        Self::new(Kind::Until(a, b))
    }

    pub fn release(a: Self, b: Self) -> Self {
        Self::new(Kind::Release(a, b))
    }

    pub fn weak_until(a: Self, b: Self) -> Self {
        Self::new(Kind::WeakUntil(a, b))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self.kind(), Kind::Atom(_))
    }

    pub fn atom_name(&self) -> Option<&str> {
        match self.kind() {
            Kind::Atom(name) => Some(name),
            _ => None,
        }
    }

    /// True for the boolean connectives and constants, whose value at a
    /// position is a function of their children at the same position.
    pub fn is_propositional_connective(&self) -> bool {
        matches!(
            self.kind(),
            Kind::True | Kind::False | Kind::Not(_) | Kind::And(..) | Kind::Or(..) | Kind::Implies(..)
        )
    }

    pub fn children(&self) -> Vec<&Formula<L>> {
        self.0.kind.children()
    }

    /// The distinct subformulas, children before parents.
    pub fn closure(&self) -> Vec<Formula<L>> {
        fn walk<L: Logic>(f: &Formula<L>, seen: &mut HashSet<Formula<L>>, out: &mut Vec<Formula<L>>) {
            if seen.contains(f) {
                return;
            }
            for child in f.children() {
                walk(child, seen, out);
            }
            seen.insert(f.clone());
            out.push(f.clone());
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        walk(self, &mut seen, &mut out);
        out
    }

    /// Number of distinct subformulas.
    pub fn length(&self) -> usize {
        self.closure().len()
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        self.closure().iter().filter_map(|f| f.atom_name().map(str::to_string)).collect()
    }

    pub fn contains(&self, pred: impl Fn(&Formula<L>) -> bool) -> bool {
        self.closure().iter().any(pred)
    }

    /// Bottom-up rewrite; `f` sees each node after its children were rewritten.
    /// Results are memoized on structurally equal subtrees.
    pub fn rewrite<M: Logic>(&self, f: &mut impl FnMut(Kind<M>) -> Formula<M>) -> Formula<M> {
        fn go<L: Logic, M: Logic>(
            node: &Formula<L>,
            f: &mut impl FnMut(Kind<M>) -> Formula<M>,
            memo: &mut HashMap<Formula<L>, Formula<M>>,
        ) -> Formula<M> {
            if let Some(done) = memo.get(node) {
                return done.clone();
            }
            let kids = node.children().into_iter().map(|c| go(c, f, memo)).collect();
            let out = f(node.kind().with_children(kids));
            memo.insert(node.clone(), out.clone());
            out
        }
        go(self, f, &mut HashMap::new())
    }

    /// Reinterprets the same tree in the other logic.
    pub fn cast<M: Logic>(&self) -> Formula<M> {
        self.rewrite(&mut Formula::new)
    }

    /// Replaces every `a W b` by `b R (b | a)`.
    pub fn desugar_weak_until(&self) -> Formula<L> {
        self.rewrite(&mut |kind| match kind {
            Kind::WeakUntil(a, b) => Formula::release(b.clone(), Formula::or(b, a)),
            other => Formula::new(other),
        })
    }

    /// Expresses eventually/always through until/release:
    /// `F a = true U a` and `G a = false R a`.
    pub fn normalize_unary_temporal(&self) -> Formula<L> {
        self.rewrite(&mut |kind| match kind {
            Kind::Eventually(a) => Formula::until(Formula::tt(), a),
            Kind::Always(a) => Formula::release(Formula::ff(), a),
            other => Formula::new(other),
        })
    }

    pub fn has_weak_until(&self) -> bool {
        self.contains(|f| matches!(f.kind(), Kind::WeakUntil(..)))
    }
}

impl Ltl {
    /// Negation normal form with implications eliminated. Weak until is
    /// desugared first.
    pub fn negation_normal_form(&self) -> Ltl {
        fn nnf(f: &Ltl, negated: bool, memo: &mut HashMap<(Ltl, bool), Ltl>) -> Ltl {
            if let Some(done) = memo.get(&(f.clone(), negated)) {
                return done.clone();
            }
            let out = match (f.kind(), negated) {
                (Kind::True, false) | (Kind::False, true) => Ltl::tt(),
                (Kind::True, true) | (Kind::False, false) => Ltl::ff(),
                (Kind::Atom(_), false) => f.clone(),
                (Kind::Atom(_), true) => Ltl::not(f.clone()),
                (Kind::Not(a), n) => nnf(a, !n, memo),
                (Kind::And(a, b), false) => Ltl::and(nnf(a, false, memo), nnf(b, false, memo)),
                (Kind::And(a, b), true) => Ltl::or(nnf(a, true, memo), nnf(b, true, memo)),
                (Kind::Or(a, b), false) => Ltl::or(nnf(a, false, memo), nnf(b, false, memo)),
                (Kind::Or(a, b), true) => Ltl::and(nnf(a, true, memo), nnf(b, true, memo)),
                (Kind::Implies(a, b), false) => Ltl::or(nnf(a, true, memo), nnf(b, false, memo)),
                (Kind::Implies(a, b), true) => Ltl::and(nnf(a, false, memo), nnf(b, true, memo)),
                (Kind::Next(a), n) => Ltl::next(nnf(a, n, memo)),
                (Kind::Eventually(a), false) => Ltl::eventually(nnf(a, false, memo)),
                (Kind::Eventually(a), true) => Ltl::always(nnf(a, true, memo)),
                (Kind::Always(a), false) => Ltl::always(nnf(a, false, memo)),
                (Kind::Always(a), true) => Ltl::eventually(nnf(a, true, memo)),
                (Kind::Until(a, b), false) => Ltl::until(nnf(a, false, memo), nnf(b, false, memo)),
                (Kind::Until(a, b), true) => Ltl::release(nnf(a, true, memo), nnf(b, true, memo)),
                (Kind::Release(a, b), false) => Ltl::release(nnf(a, false, memo), nnf(b, false, memo)),
                (Kind::Release(a, b), true) => Ltl::until(nnf(a, true, memo), nnf(b, true, memo)),
                (Kind::WeakUntil(a, b), n) => {
                    let expanded = Ltl::release(b.clone(), Ltl::or(b.clone(), a.clone()));
                    nnf(&expanded, n, memo)
                }
            };
            memo.insert((f.clone(), negated), out.clone());
            out
        }
        nnf(self, false, &mut HashMap::new())
    }

    /// The robust counterpart of an LTL formula: implications become
    /// `!a | b`, the result is put in negation normal form and every temporal
    /// operator is replaced by its dotted version. Bit 1 of the robust value
    /// of the result equals the classical value of `self`.
    pub fn dot(&self) -> Rltl {
        self.negation_normal_form().cast()
    }
}

/// Where a robust formula sits relative to the efficiently checkable fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FragmentClass {
    /// Every robust implication has an antecedent free of always and release.
    NoImplicationRestricted,
    /// `a => b` with `a` and `b` both in the restricted fragment.
    OuterImplication,
    Full,
}

impl FragmentClass {
    pub fn name(self) -> &'static str {
        match self {
            FragmentClass::NoImplicationRestricted => "no_implication_restricted",
            FragmentClass::OuterImplication => "outer_implication",
            FragmentClass::Full => "full",
        }
    }

    pub fn in_fragment(self) -> bool {
        self != FragmentClass::Full
    }
}

impl fmt::Display for FragmentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn is_always_or_release(f: &Rltl) -> bool {
    matches!(f.kind(), Kind::Always(_) | Kind::Release(..) | Kind::WeakUntil(..))
}

impl Rltl {
    /// Number of distinct subformulas shaped like robust always or robust
    /// release. Weak until is counted with release since it abbreviates one.
    pub fn kappa(&self) -> usize {
        self.closure().iter().filter(|f| is_always_or_release(f)).count()
    }

    /// True when the formula can only ever take the values `0000` and `1111`
    /// syntactically: it contains no robust always and no robust release.
    pub fn is_weakening_free(&self) -> bool {
        !self.contains(is_always_or_release)
    }

    fn implications_restricted(&self) -> bool {
        self.closure().iter().all(|f| match f.kind() {
            Kind::Implies(a, _) => a.is_weakening_free(),
            _ => true,
        })
    }

    pub fn classify(&self) -> FragmentClass {
        if self.implications_restricted() {
            return FragmentClass::NoImplicationRestricted;
        }
        match self.kind() {
            Kind::Implies(a, b) if a.implications_restricted() && b.implications_restricted() => {
                FragmentClass::OuterImplication
            }
            _ => FragmentClass::Full,
        }
    }

    /// Replaces `a => b` by `!a | b` wherever `a` has no always and no
    /// release; the two are equivalent in all five values there.
    pub fn rewrite_nonrobust_implications(&self) -> Rltl {
        self.rewrite(&mut |kind| match kind {
            Kind::Implies(a, b) if a.is_weakening_free() => Rltl::or(Rltl::not(a), b),
            other => Rltl::new(other),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_ltl, parse_rltl};

    fn r(s: &str) -> Rltl {
        parse_rltl(s).unwrap()
    }

    fn l(s: &str) -> Ltl {
        parse_ltl(s).unwrap()
    }

    #[test]
    fn closure_rules() {
        assert_eq!(l("p").closure(), vec![l("p")]);
        let g: BTreeSet<_> = l("G p").closure().into_iter().collect();
        assert_eq!(g, [l("G p"), l("p")].into_iter().collect());
        let u: BTreeSet<_> = l("p U (p | q)").closure().into_iter().collect();
        let expected = [l("p U (p | q)"), l("p"), l("p | q"), l("q")].into_iter().collect();
        assert_eq!(u, expected);
    }

    #[test]
    fn lengths() {
        assert_eq!(l("p").length(), 1);
        assert_eq!(r("G p => G q").length(), 5);
        assert_eq!(l("p & p").length(), 2);
        assert_eq!(l("true & false").length(), 3);
    }

    #[test]
    fn kappa_counts() {
        assert_eq!(r("G p => G q").kappa(), 2);
        assert_eq!(r("F p").kappa(), 0);
        assert_eq!(r("G (p => F q)").kappa(), 1);
        assert_eq!(r("(p R q) & G (p R q)").kappa(), 2);
    }

    #[test]
    fn classification() {
        assert_eq!(r("G (p => F q)").classify(), FragmentClass::NoImplicationRestricted);
        assert_eq!(r("G p => G q").classify(), FragmentClass::OuterImplication);
        assert_eq!(r("F (G p => q)").classify(), FragmentClass::Full);
        assert_eq!(r("(G p => q) => q").classify(), FragmentClass::Full);
        assert_eq!(r("p U q").classify(), FragmentClass::NoImplicationRestricted);
    }

    #[test]
    fn implication_rewrite() {
        assert_eq!(r("G (p => F q)").rewrite_nonrobust_implications(), r("G (!p | F q)"));
        assert_eq!(r("G p => G q").rewrite_nonrobust_implications(), r("G p => G q"));
        assert_eq!(r("!(p => (q R r))").rewrite_nonrobust_implications(), r("!(!p | (q R r))"));
        // inner implications are rewritten before the outer antecedent is inspected
        assert_eq!(r("(p => q) => G r").rewrite_nonrobust_implications(), r("!(!p | q) | G r"));
    }

    #[test]
    fn dotting() {
        assert_eq!(l("G p").dot(), r("G p"));
        assert_eq!(l("G p -> G q").dot(), r("F !p | G q"));
        assert_eq!(l("p U q").dot(), r("p U q"));
        assert_eq!(l("!(p U q)").dot(), r("!p R !q"));
    }

    #[test]
    fn weak_until() {
        let raw = Ltl::weak_until(l("p"), l("q"));
        assert_eq!(raw.desugar_weak_until(), l("q R (q | p)"));
        assert_eq!(l("G p").desugar_weak_until(), l("G p"));
        let conj = Ltl::and(raw, l("r"));
        assert_eq!(conj.desugar_weak_until(), l("(q R (q | p)) & r"));
    }

    #[test]
    fn unary_normalization() {
        assert_eq!(r("F p").normalize_unary_temporal(), r("true U p"));
        assert_eq!(r("G p").normalize_unary_temporal(), r("false R p"));
    }

    #[test]
    fn structural_equality_ignores_sharing() {
        let shared = l("G p");
        let a = Ltl::and(shared.clone(), shared);
        assert_eq!(a, l("G p & G p"));
        assert_eq!(a.length(), 3);
    }
}
