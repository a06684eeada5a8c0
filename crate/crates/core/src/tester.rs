//! Temporal testers.
//!
//! A tester for an LTL formula `φ` is a transition system whose states assign
//! bits to a set of tracked variables. Along every fair computation the bit
//! of `φ` at each step equals the truth of `φ` on the remaining input, and
//! every input word has such a computation.
//!
//! Testers for compound formulas are built by synchronous composition of
//! small primitive testers. Only atoms, temporal nodes and private auxiliary
//! variables are stored; boolean connectives are evaluated on demand.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use fixedbitset::FixedBitSet;

use crate::formula::{Kind, Ltl, Rltl};

static NEXT_AUX: AtomicU64 = AtomicU64::new(0);

/// A tracked tester variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Formula(Ltl),
    /// Private bookkeeping bit of a specialized tester.
    Aux(u64),
}

impl Var {
    fn formula(&self) -> Option<&Ltl> {
        match self {
            Var::Formula(f) => Some(f),
            Var::Aux(_) => None,
        }
    }

    fn fresh_aux() -> Var {
        Var::Aux(NEXT_AUX.fetch_add(1, Ordering::Relaxed))
    }
}

/// Whether `f` is a boolean connective or constant, whose value follows
/// from its children.
fn derivable_kind(f: &Ltl) -> bool {
    matches!(f.kind(), Kind::True | Kind::False | Kind::Not(_) | Kind::And(..) | Kind::Or(..) | Kind::Implies(..))
}

#[derive(Debug, Clone)]
pub struct Tester {
    vars: Vec<Var>,
    index: HashMap<Var, usize>,
    states: Vec<FixedBitSet>,
    succ: Vec<Vec<usize>>,
    initial: FixedBitSet,
    justice: Vec<FixedBitSet>,
    subject: Ltl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TesterStats {
    pub states: usize,
    pub initial: usize,
    pub transitions: usize,
    pub justice_sets: usize,
    pub variables: usize,
}

impl Tester {
    pub fn subject(&self) -> &Ltl {
        &self.subject
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Successors of state `s`, sorted.
    pub fn successors(&self, s: usize) -> &[usize] {
        &self.succ[s]
    }

    pub fn is_initial(&self, s: usize) -> bool {
        self.initial.contains(s)
    }

    pub fn justice(&self) -> &[FixedBitSet] {
        &self.justice
    }

    pub fn stats(&self) -> TesterStats {
        TesterStats {
            states: self.states.len(),
            initial: self.initial.count_ones(..),
            transitions: self.succ.iter().map(Vec::len).sum(),
            justice_sets: self.justice.len(),
            variables: self.vars.len(),
        }
    }

    /// Atom names tracked by the tester, sorted.
    pub fn atoms(&self) -> Vec<String> {
        let set: BTreeSet<String> =
            self.vars.iter().filter_map(|v| v.formula().and_then(|f| f.atom_name()).map(str::to_string)).collect();
        set.into_iter().collect()
    }

    /// Value of `f` in state `s`, if `f` is tracked or follows from tracked
    /// variables through boolean connectives.
    pub fn value(&self, s: usize, f: &Ltl) -> Option<bool> {
        self.eval_bits(&self.states[s], f)
    }

    pub fn can_evaluate(&self, f: &Ltl) -> bool {
        if self.index.contains_key(&Var::Formula(f.clone())) {
            return true;
        }
        derivable_kind(f) && f.children().into_iter().all(|c| self.can_evaluate(c))
    }

    /// Number of states with the given values on the given formulas.
    pub fn count_matching(&self, assignment: &[(&Ltl, bool)]) -> usize {
        (0..self.states.len()).filter(|&s| assignment.iter().all(|(f, v)| self.value(s, f) == Some(*v))).count()
    }

    fn eval_bits(&self, bits: &FixedBitSet, f: &Ltl) -> Option<bool> {
        if let Some(&i) = self.index.get(&Var::Formula(f.clone())) {
            return Some(bits.contains(i));
        }
        self.derive_bits(bits, f)
    }

    /// Value of a boolean connective from its children only.
    fn derive_bits(&self, bits: &FixedBitSet, f: &Ltl) -> Option<bool> {
        Some(match f.kind() {
            Kind::True => true,
            Kind::False => false,
            Kind::Not(a) => !self.eval_bits(bits, a)?,
            Kind::And(a, b) => {
                let x = self.eval_bits(bits, a)?;
                x & self.eval_bits(bits, b)?
            }
            Kind::Or(a, b) => {
                let x = self.eval_bits(bits, a)?;
                x | self.eval_bits(bits, b)?
            }
            Kind::Implies(a, b) => {
                let x = self.eval_bits(bits, a)?;
                !x | self.eval_bits(bits, b)?
            }
            _ => return None,
        })
    }

    fn with_subject(mut self, subject: Ltl) -> Tester {
        self.subject = subject;
        self
    }

    /// Renames a tracked formula variable; the new formula must denote the
    /// same language as the old one.
    fn rename(mut self, from: &Ltl, to: Ltl) -> Tester {
        let i = self.index.remove(&Var::Formula(from.clone())).expect("renamed variable is tracked");
        self.vars[i] = Var::Formula(to.clone());
        self.index.insert(Var::Formula(to.clone()), i);
        self.subject = to;
        self
    }

    /// Assembles a tester from raw parts, then prunes states without
    /// successors and states unreachable from an initial state.
    fn assemble(
        vars: Vec<Var>,
        states: Vec<FixedBitSet>,
        succ: Vec<Vec<usize>>,
        initial: FixedBitSet,
        justice: Vec<FixedBitSet>,
        subject: Ltl,
    ) -> Tester {
        let n = states.len();
        let mut alive = FixedBitSet::with_capacity(n);
        alive.insert_range(..);
        loop {
            let mut changed = false;
            for s in alive.clone().ones() {
                if !succ[s].iter().any(|&t| alive.contains(t)) {
                    alive.set(s, false);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut reach = FixedBitSet::with_capacity(n);
        let mut stack: Vec<usize> = initial.ones().filter(|&s| alive.contains(s)).collect();
        for &s in &stack {
            reach.insert(s);
        }
        while let Some(s) = stack.pop() {
            for &t in &succ[s] {
                if alive.contains(t) && !reach.contains(t) {
                    reach.insert(t);
                    stack.push(t);
                }
            }
        }
        let mut new_id = vec![usize::MAX; n];
        let mut kept = Vec::new();
        for s in reach.ones() {
            new_id[s] = kept.len();
            kept.push(s);
        }
        let remap_set = |set: &FixedBitSet| {
            let mut out = FixedBitSet::with_capacity(kept.len());
            for s in set.ones() {
                if new_id[s] != usize::MAX {
                    out.insert(new_id[s]);
                }
            }
            out
        };
        let index = vars.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        Tester {
            index,
            states: kept.iter().map(|&s| states[s].clone()).collect(),
            succ: kept
                .iter()
                .map(|&s| {
                    let mut out: Vec<usize> =
                        succ[s].iter().filter(|&&t| new_id[t] != usize::MAX).map(|&t| new_id[t]).collect();
                    out.sort_unstable();
                    out
                })
                .collect(),
            initial: remap_set(&initial),
            justice: justice.iter().map(remap_set).collect(),
            vars,
            subject,
        }
    }

    /// Removes tracked boolean connectives whose value already follows from
    /// the remaining variables.
    fn drop_derivable(mut self) -> Tester {
        loop {
            let victim = self.vars.iter().position(|v| {
                v.formula().is_some_and(|f| {
                    derivable_kind(f) && {
                        let mut probe = self.index.clone();
                        probe.remove(v);
                        let probe = Tester { index: probe, ..self.clone_shallow() };
                        f.children().into_iter().all(|c| probe.can_evaluate(c))
                    }
                })
            });
            let Some(i) = victim else { return self };
            self.vars.remove(i);
            self.index = self.vars.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
            let width = self.vars.len();
            for bits in &mut self.states {
                let mut out = FixedBitSet::with_capacity(width);
                for (j, k) in (0..=width).filter(|&k| k != i).enumerate() {
                    if bits.contains(k) {
                        out.insert(j);
                    }
                }
                *bits = out;
            }
        }
    }

    fn clone_shallow(&self) -> Tester {
        Tester {
            vars: self.vars.clone(),
            index: HashMap::new(),
            states: vec![],
            succ: vec![],
            initial: FixedBitSet::new(),
            justice: vec![],
            subject: self.subject.clone(),
        }
    }

    /// Graphviz rendering: one node per state labeled with its assignment,
    /// states in some justice set drawn as double circles.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tester {\n  rankdir=LR;\n");
        let mut fair = FixedBitSet::with_capacity(self.states.len());
        for j in &self.justice {
            fair.union_with(j);
        }
        for (s, bits) in self.states.iter().enumerate() {
            let label: Vec<String> = self
                .vars
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let name = match v {
                        Var::Formula(f) => f.to_string(),
                        Var::Aux(n) => format!("aux{n}"),
                    };
                    format!("{}={}", name, u8::from(bits.contains(i)))
                })
                .collect();
            let shape = if fair.contains(s) { "doublecircle" } else { "circle" };
            let label = label.join("\\n").replace('"', "\\\"");
            let _ = writeln!(out, "  s{s} [shape={shape}, label=\"{label}\"];");
        }
        for (s, succ) in self.succ.iter().enumerate() {
            for t in succ {
                let _ = writeln!(out, "  s{s} -> s{t};");
            }
        }
        out.push_str("}\n");
        out
    }
}

type Pred = Box<dyn Fn(&[bool]) -> bool>;

/// Enumerates every assignment to `vars`, keeping transitions allowed by
/// `step`. Formula variables that are constants are pinned to their value.
fn primitive(subject: Ltl, vars: Vec<Var>, step: impl Fn(&[bool], &[bool]) -> bool, justice: Vec<Pred>) -> Tester {
    let k = vars.len();
    let pinned: Vec<Option<bool>> = vars
        .iter()
        .map(|v| match v.formula().map(|f| f.kind()) {
            Some(Kind::True) => Some(true),
            Some(Kind::False) => Some(false),
            _ => None,
        })
        .collect();
    let assignments: Vec<Vec<bool>> = (0u64..1 << k)
        .map(|m| (0..k).map(|i| m >> i & 1 == 1).collect::<Vec<bool>>())
        .filter(|a| a.iter().zip(&pinned).all(|(x, p)| p.is_none_or(|p| p == *x)))
        .collect();
    let n = assignments.len();
    let states = assignments
        .iter()
        .map(|a| {
            let mut bits = FixedBitSet::with_capacity(k);
            for (i, &x) in a.iter().enumerate() {
                bits.set(i, x);
            }
            bits
        })
        .collect();
    let succ = assignments.iter().map(|a| (0..n).filter(|&t| step(a, &assignments[t])).collect()).collect();
    let mut initial = FixedBitSet::with_capacity(n);
    initial.insert_range(..);
    let justice = justice
        .iter()
        .map(|pred| {
            let mut set = FixedBitSet::with_capacity(n);
            for (s, a) in assignments.iter().enumerate() {
                set.set(s, pred(a));
            }
            set
        })
        .collect();
    Tester::assemble(vars, states, succ, initial, justice, subject)
}

/// Deduplicated variable list for a primitive; returns the slot of each
/// requested formula.
fn slots(formulas: &[&Ltl]) -> (Vec<Var>, Vec<usize>) {
    let mut vars: Vec<Var> = Vec::new();
    let idx = formulas
        .iter()
        .map(|f| {
            let v = Var::Formula((*f).clone());
            vars.iter().position(|w| *w == v).unwrap_or_else(|| {
                vars.push(v);
                vars.len() - 1
            })
        })
        .collect();
    (vars, idx)
}

/// Tester for a constant or an atom.
pub fn tester_leaf(f: &Ltl) -> Tester {
    match f.kind() {
        Kind::True | Kind::False => {
            let mut initial = FixedBitSet::with_capacity(1);
            initial.insert(0);
            Tester::assemble(vec![], vec![FixedBitSet::new()], vec![vec![0]], initial, vec![], f.clone())
        }
        Kind::Atom(_) => tester_atom(f.atom_name().unwrap()),
        _ => panic!("tester_leaf called on a compound formula"),
    }
}

pub fn tester_atom(name: &str) -> Tester {
    let p = Ltl::atom(name);
    primitive(p.clone(), vec![Var::Formula(p)], |_, _| true, vec![])
}

/// Synchronous composition: joint assignments that agree on every variable
/// both sides can evaluate, with transitions, initial states and justice
/// requirements of both. The subject is taken from `t1`.
pub fn compose(t1: &Tester, t2: &Tester) -> Tester {
    let mut vars = t1.vars.clone();
    for v in &t2.vars {
        if !t1.index.contains_key(v) {
            vars.push(v.clone());
        }
    }
    let keys: Vec<&Var> = vars
        .iter()
        .filter(|v| match v {
            Var::Formula(f) => t1.can_evaluate(f) && t2.can_evaluate(f),
            Var::Aux(_) => t1.index.contains_key(v) && t2.index.contains_key(v),
        })
        .collect();
    let key_of = |t: &Tester, s: usize| -> Vec<bool> {
        keys.iter()
            .map(|v| match v {
                Var::Formula(f) => t.value(s, f).unwrap(),
                Var::Aux(_) => t.states[s].contains(t.index[*v]),
            })
            .collect()
    };
    let mut groups: HashMap<Vec<bool>, Vec<usize>> = HashMap::new();
    for j in 0..t2.states.len() {
        groups.entry(key_of(t2, j)).or_default().push(j);
    }
    let width = vars.len();
    let joined = Tester {
        index: vars.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect(),
        vars: vars.clone(),
        ..t1.clone_shallow()
    };
    let mut pairs = Vec::new();
    let mut states = Vec::new();
    let mut by_first: Vec<Vec<(usize, usize)>> = vec![vec![]; t1.states.len()];
    for (i, row) in by_first.iter_mut().enumerate() {
        let Some(partners) = groups.get(&key_of(t1, i)) else { continue };
        for &j in partners {
            let mut bits = FixedBitSet::with_capacity(width);
            for (k, v) in vars.iter().enumerate() {
                let x = match t1.index.get(v) {
                    Some(&a) => t1.states[i].contains(a),
                    None => t2.states[j].contains(t2.index[v]),
                };
                bits.set(k, x);
            }
            // tracked connectives must agree with their tracked children
            let consistent = vars.iter().enumerate().all(|(k, v)| match v {
                Var::Formula(f) if derivable_kind(f) => {
                    let mut probe = joined.index.clone();
                    probe.remove(v);
                    let probe = Tester { index: probe, ..joined.clone_shallow() };
                    probe.derive_bits(&bits, f).is_none_or(|d| d == bits.contains(k))
                }
                _ => true,
            });
            if consistent {
                row.push((j, states.len()));
                pairs.push((i, j));
                states.push(bits);
            }
        }
    }
    let succ = pairs
        .iter()
        .map(|&(i, j)| {
            let mut out = Vec::new();
            for &i2 in &t1.succ[i] {
                for &(j2, q) in &by_first[i2] {
                    if t2.succ[j].binary_search(&j2).is_ok() {
                        out.push(q);
                    }
                }
            }
            out
        })
        .collect();
    let n = pairs.len();
    let lift = |set: &FixedBitSet, first: bool| {
        let mut out = FixedBitSet::with_capacity(n);
        for (q, &(i, j)) in pairs.iter().enumerate() {
            out.set(q, set.contains(if first { i } else { j }));
        }
        out
    };
    let mut initial = lift(&t1.initial, true);
    initial.intersect_with(&lift(&t2.initial, false));
    let justice = t1.justice.iter().map(|j| lift(j, true)).chain(t2.justice.iter().map(|j| lift(j, false))).collect();
    Tester::assemble(vars, states, succ, initial, justice, t1.subject.clone()).drop_derivable()
}

/// Attaches a primitive tester to the testers of its operands.
fn attach(prim: Tester, operands: &[&Tester]) -> Tester {
    let mut acc: Option<Tester> = None;
    for t in operands {
        acc = Some(match acc {
            None => (*t).clone(),
            Some(a) => compose(&a, t),
        });
    }
    match acc {
        None => prim,
        Some(a) => compose(&prim, &a),
    }
}

/// `a U b`: `u = b ∨ (a ∧ u')`, justice `¬u ∨ b`.
pub fn tester_until(ta: &Tester, tb: &Tester) -> Tester {
    let (a, b) = (ta.subject(), tb.subject());
    let node = Ltl::until(a.clone(), b.clone());
    let (vars, ix) = slots(&[a, b, &node]);
    let (ia, ib, iu) = (ix[0], ix[1], ix[2]);
    let prim = primitive(
        node,
        vars,
        move |s, t| s[iu] == (s[ib] || (s[ia] && t[iu])),
        vec![Box::new(move |s| !s[iu] || s[ib])],
    );
    attach(prim, &[ta, tb])
}

/// `a R b`: `r = b ∧ (a ∨ r')`, justice `r ∨ ¬b`.
pub fn tester_release(ta: &Tester, tb: &Tester) -> Tester {
    let (a, b) = (ta.subject(), tb.subject());
    let node = Ltl::release(a.clone(), b.clone());
    let (vars, ix) = slots(&[a, b, &node]);
    let (ia, ib, ir) = (ix[0], ix[1], ix[2]);
    let prim = primitive(
        node,
        vars,
        move |s, t| s[ir] == (s[ib] && (s[ia] || t[ir])),
        vec![Box::new(move |s| s[ir] || !s[ib])],
    );
    attach(prim, &[ta, tb])
}

/// `X a`: `n = a'`.
pub fn tester_next(ta: &Tester) -> Tester {
    let a = ta.subject();
    let node = Ltl::next(a.clone());
    let (vars, ix) = slots(&[a, &node]);
    let (ia, inx) = (ix[0], ix[1]);
    let prim = primitive(node, vars, move |s, t| s[inx] == t[ia], vec![]);
    attach(prim, &[ta])
}

/// `F a`, the until tester with a true left operand: `f = a ∨ f'`.
pub fn tester_eventually(ta: &Tester) -> Tester {
    let a = ta.subject();
    let node = Ltl::eventually(a.clone());
    let (vars, ix) = slots(&[a, &node]);
    let (ia, iff) = (ix[0], ix[1]);
    let prim =
        primitive(node, vars, move |s, t| s[iff] == (s[ia] || t[iff]), vec![Box::new(move |s| !s[iff] || s[ia])]);
    attach(prim, &[ta])
}

/// `G a`, the eventually tester for `!a` with the subject bit flipped.
pub fn tester_always(ta: &Tester) -> Tester {
    let a = ta.subject();
    let node = Ltl::always(a.clone());
    let (vars, ix) = slots(&[a, &node]);
    let (ia, ig) = (ix[0], ix[1]);
    let prim = primitive(node, vars, move |s, t| s[ig] == (s[ia] && t[ig]), vec![Box::new(move |s| s[ig] || !s[ia])]);
    attach(prim, &[ta])
}

/// `F G a` with the justice requirements of its `G` and `F` parts merged
/// into the single set `(a ∧ g ∧ fg) ∨ ¬(a ∨ g ∨ fg)`.
pub fn tester_eventually_always(ta: &Tester) -> Tester {
    let a = ta.subject();
    let g = Ltl::always(a.clone());
    let node = Ltl::eventually(g.clone());
    let (vars, ix) = slots(&[a, &g, &node]);
    let (ia, ig, ifg) = (ix[0], ix[1], ix[2]);
    let prim = primitive(
        node,
        vars,
        move |s, t| s[ig] == (s[ia] && t[ig]) && s[ifg] == (s[ig] || t[ifg]),
        vec![Box::new(move |s| (s[ia] && s[ig] && s[ifg]) || !(s[ia] || s[ig] || s[ifg]))],
    );
    attach(prim, &[ta])
}

/// `F a | F G b`, built as `F (G b | a)`.
pub fn tester_release_bit2(ta: &Tester, tb: &Tester) -> Tester {
    let (a, b) = (ta.subject().clone(), tb.subject().clone());
    let inner = compose(&tester_always(tb), ta).with_subject(Ltl::or(Ltl::always(b.clone()), a.clone()));
    let t = tester_eventually(&inner);
    let from = t.subject().clone();
    t.rename(&from, Ltl::or(Ltl::eventually(a), Ltl::eventually(Ltl::always(b))))
}

/// `F a | G F b` by a dedicated seven-state construction over
/// `(a, b, x, aux)` where `x` is the subject bit:
///
/// * two states with `a` and `x` set, leading anywhere;
/// * two states with `x` set and `a` clear, leading to themselves or to the
///   first group;
/// * three states with `x` and `a` clear: two with `aux` clear leading to
///   this group, and one with `aux` set and `b` clear that only loops on
///   itself.
///
/// The single justice set holds the states with `a`, the second-group state
/// with `b`, and the `aux` state.
pub fn tester_release_bit3(ta: &Tester, tb: &Tester) -> Tester {
    let (a, b) = (ta.subject().clone(), tb.subject().clone());
    let node = Ltl::or(Ltl::eventually(a.clone()), Ltl::always(Ltl::eventually(b.clone())));
    let (mut vars, ix) = slots(&[&a, &b, &node]);
    let (ia, ib, ix_) = (ix[0], ix[1], ix[2]);
    let iaux = vars.len();
    vars.push(Var::fresh_aux());
    let region = move |s: &[bool]| -> Option<u8> {
        match (s[ia], s[ix_], s[iaux]) {
            (true, true, false) => Some(0),
            (false, true, false) => Some(1),
            (false, false, false) => Some(2),
            (false, false, true) if !s[ib] => Some(3),
            _ => None,
        }
    };
    let prim = primitive(
        node,
        vars,
        move |s, t| match (region(s), region(t)) {
            (Some(0), Some(_)) => true,
            (Some(1), Some(r)) => r <= 1,
            (Some(2), Some(r)) => r >= 2,
            (Some(3), Some(r)) => r == 3,
            _ => false,
        },
        vec![Box::new(move |s| match region(s) {
            Some(0) | Some(3) => true,
            Some(1) => s[ib],
            _ => false,
        })],
    );
    attach(prim, &[ta, tb])
}

/// `F a | F b`, built as `F (a | b)`.
pub fn tester_release_bit4(ta: &Tester, tb: &Tester) -> Tester {
    let (a, b) = (ta.subject().clone(), tb.subject().clone());
    let inner = compose(ta, tb).with_subject(Ltl::or(a.clone(), b.clone()));
    let t = tester_eventually(&inner);
    let from = t.subject().clone();
    t.rename(&from, Ltl::or(Ltl::eventually(a), Ltl::eventually(b)))
}

/// Builds a tester for `f`, using the optimized constructions for `F G a`,
/// `F a | F G b`, `F a | G F b` and `F a | F b`.
pub fn build_tester(f: &Ltl) -> Tester {
    let f = f.desugar_weak_until();
    let mut memo = HashMap::new();
    build(&f, &mut memo)
}

fn build(f: &Ltl, memo: &mut HashMap<Ltl, Tester>) -> Tester {
    if let Some(t) = memo.get(f) {
        return t.clone();
    }
    let mut sub = |g: &Ltl| build(g, memo);
    let t = match f.kind() {
        Kind::True | Kind::False | Kind::Atom(_) => tester_leaf(f),
        Kind::Not(a) => sub(a).with_subject(f.clone()),
        Kind::And(a, b) | Kind::Or(a, b) | Kind::Implies(a, b) => {
            if let Some(t) = release_shape(f, &mut sub) {
                t
            } else {
                let (ta, tb) = (sub(a), sub(b));
                compose(&ta, &tb).with_subject(f.clone())
            }
        }
        Kind::Next(a) => tester_next(&sub(a)),
        Kind::Eventually(a) => match a.kind() {
            Kind::Always(b) => tester_eventually_always(&sub(b)),
            _ => tester_eventually(&sub(a)),
        },
        Kind::Always(a) => tester_always(&sub(a)),
        Kind::Until(a, b) if matches!(a.kind(), Kind::True) => {
            let t = tester_eventually(&sub(b));
            let from = t.subject().clone();
            t.rename(&from, f.clone())
        }
        Kind::Until(a, b) => {
            let (ta, tb) = (sub(a), sub(b));
            tester_until(&ta, &tb)
        }
        Kind::Release(a, b) => {
            let (ta, tb) = (sub(a), sub(b));
            tester_release(&ta, &tb)
        }
        Kind::WeakUntil(..) => unreachable!("weak until is desugared before building"),
    };
    memo.insert(f.clone(), t.clone());
    t
}

fn release_shape(f: &Ltl, sub: &mut impl FnMut(&Ltl) -> Tester) -> Option<Tester> {
    let Kind::Or(l, r) = f.kind() else { return None };
    let Kind::Eventually(a) = l.kind() else { return None };
    match r.kind() {
        Kind::Eventually(x) => match x.kind() {
            Kind::Always(b) => {
                let (ta, tb) = (sub(a), sub(b));
                Some(tester_release_bit2(&ta, &tb))
            }
            _ => {
                let (ta, tb) = (sub(a), sub(x));
                Some(tester_release_bit4(&ta, &tb))
            }
        },
        Kind::Always(x) => match x.kind() {
            Kind::Eventually(b) => {
                let (ta, tb) = (sub(a), sub(b));
                Some(tester_release_bit3(&ta, &tb))
            }
            _ => None,
        },
        _ => None,
    }
}

/// `2^(|φ|-κ) · 3^κ`, the size bound for testers of the bit translations of
/// a formula in the restricted fragment.
pub fn size_bound(f: &Rltl) -> u128 {
    let (len, kappa) = (f.length() as u32, f.kappa() as u32);
    2u128.pow(len - kappa) * 3u128.pow(kappa)
}

/// Every tracked connective in every state agrees with its children.
pub fn locally_consistent(t: &Tester) -> bool {
    let mut seen = HashSet::new();
    t.vars.iter().enumerate().all(|(k, v)| match v {
        Var::Formula(f) if derivable_kind(f) && seen.insert(f.clone()) => {
            let mut probe = t.index.clone();
            probe.remove(v);
            let probe = Tester { index: probe, ..t.clone_shallow() };
            t.states.iter().all(|bits| probe.derive_bits(bits, f).is_none_or(|d| d == bits.contains(k)))
        }
        _ => true,
    })
}
