//! Generalized Büchi automata over explicit letters.
//!
//! A letter is a subset of the automaton's atoms, stored as a bit mask in
//! atom order. Every transition reads one concrete letter; for automata
//! derived from testers, tableaux and Kripke structures that letter is the
//! label of the source state.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::formula::{Kind, Ltl};
use crate::lasso::{LassoWord, Letter};
use crate::tester::Tester;

pub const MAX_ATOMS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("atoms {} are not part of the model alphabet", .0.join(", "))]
    AlphabetMismatch(Vec<String>),
    #[error("{0} atoms exceed the supported maximum of {MAX_ATOMS}")]
    TooManyAtoms(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gba {
    atoms: Vec<String>,
    names: Vec<String>,
    initial: FixedBitSet,
    edges: Vec<Vec<(u64, usize)>>,
    acceptance: Vec<FixedBitSet>,
}

impl Gba {
    pub fn new(atoms: impl IntoIterator<Item = String>) -> Result<Gba, AutomatonError> {
        let atoms: BTreeSet<String> = atoms.into_iter().collect();
        if atoms.len() > MAX_ATOMS {
            return Err(AutomatonError::TooManyAtoms(atoms.len()));
        }
        Ok(Gba {
            atoms: atoms.into_iter().collect(),
            names: vec![],
            initial: FixedBitSet::new(),
            edges: vec![],
            acceptance: vec![],
        })
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.edges.push(vec![]);
        self.initial.grow(self.names.len());
        self.names.len() - 1
    }

    pub fn set_initial(&mut self, q: usize) {
        self.initial.insert(q);
    }

    pub fn add_edge(&mut self, from: usize, letter: u64, to: usize) {
        self.edges[from].push((letter, to));
    }

    /// Adds an acceptance set given as a list of states.
    pub fn add_acceptance(&mut self, states: impl IntoIterator<Item = usize>) {
        let mut set = FixedBitSet::with_capacity(self.names.len());
        set.extend(states);
        self.acceptance.push(set);
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn initial_states(&self) -> impl Iterator<Item = usize> + '_ {
        self.initial.ones()
    }

    pub fn edges(&self, q: usize) -> &[(u64, usize)] {
        &self.edges[q]
    }

    pub fn acceptance(&self) -> &[FixedBitSet] {
        &self.acceptance
    }

    pub fn letter_mask(&self, letter: &Letter) -> u64 {
        self.atoms.iter().enumerate().filter(|(_, a)| letter.contains(*a)).fold(0, |m, (i, _)| m | 1 << i)
    }

    pub fn letter_set(&self, mask: u64) -> Letter {
        self.atoms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a.clone()).collect()
    }

    /// Line-oriented dump: states, initial states, one line per transition
    /// in the form `q --{p,q}--> q'`, then the acceptance sets.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "atoms: {}", self.atoms.join(" "));
        let _ = writeln!(out, "states: {}", self.names.join(" "));
        let init: Vec<&str> = self.initial.ones().map(|q| self.names[q].as_str()).collect();
        let _ = writeln!(out, "initial: {}", init.join(" "));
        for (q, edges) in self.edges.iter().enumerate() {
            for &(m, t) in edges {
                let letter: Vec<String> = self.letter_set(m).into_iter().collect();
                let _ = writeln!(out, "{} --{{{}}}--> {}", self.names[q], letter.join(","), self.names[t]);
            }
        }
        for (i, set) in self.acceptance.iter().enumerate() {
            let members: Vec<&str> = set.ones().map(|q| self.names[q].as_str()).collect();
            let _ = writeln!(out, "accept {i}: {}", members.join(" "));
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph gba {\n  rankdir=LR;\n");
        for q in 0..self.names.len() {
            let sets: Vec<String> =
                (0..self.acceptance.len()).filter(|&i| self.acceptance[i].contains(q)).map(|i| i.to_string()).collect();
            let shape = if sets.is_empty() { "circle" } else { "doublecircle" };
            let mut label = self.names[q].replace('"', "\\\"");
            if !sets.is_empty() && self.acceptance.len() > 1 {
                let _ = write!(label, "\\n{{{}}}", sets.join(","));
            }
            let _ = writeln!(out, "  q{q} [shape={shape}, label=\"{label}\"];");
            if self.initial.contains(q) {
                let _ = writeln!(out, "  init{q} [shape=point];\n  init{q} -> q{q};");
            }
        }
        for (q, edges) in self.edges.iter().enumerate() {
            for &(m, t) in edges {
                let letter: Vec<String> = self.letter_set(m).into_iter().collect();
                let _ = writeln!(out, "  q{q} -> q{t} [label=\"{{{}}}\"];", letter.join(","));
            }
        }
        out.push_str("}\n");
        out
    }

    /// Strongly connected components of the reachable part.
    fn sccs(&self) -> Vec<Vec<usize>> {
        let n = self.names.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = FixedBitSet::with_capacity(n);
        let mut stack = Vec::new();
        let mut counter = 0;
        let mut out = Vec::new();
        for root in self.initial.ones() {
            if index[root] != usize::MAX {
                continue;
            }
            let mut calls = vec![(root, 0usize)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack.insert(root);
            while let Some(&mut (v, ref mut pos)) = calls.last_mut() {
                if let Some(&(_, w)) = self.edges[v].get(*pos) {
                    *pos += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack.insert(w);
                        calls.push((w, 0));
                    } else if on_stack.contains(w) {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                calls.pop();
                if let Some(&(u, _)) = calls.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack.set(w, false);
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(comp);
                }
            }
        }
        out
    }

    fn accepting_scc(&self) -> Option<Vec<usize>> {
        self.sccs().into_iter().find(|comp| {
            let nontrivial = comp.len() > 1 || self.edges[comp[0]].iter().any(|&(_, t)| t == comp[0]);
            nontrivial && self.acceptance.iter().all(|f| comp.iter().any(|&q| f.contains(q)))
        })
    }

    pub fn is_empty(&self) -> bool {
        self.accepting_scc().is_none()
    }

    /// Shortest path (as `(state, letter)` steps) from any of `sources`
    /// to a state satisfying `goal`, moving only inside `within`.
    /// With `nonempty`, at least one transition is taken.
    fn path(
        &self,
        sources: &[usize],
        goal: impl Fn(usize) -> bool,
        within: Option<&FixedBitSet>,
        nonempty: bool,
    ) -> Option<(Vec<(usize, u64)>, usize)> {
        let n = self.names.len();
        let mut parent: Vec<Option<(usize, u64)>> = vec![None; n];
        // states where the back-walk ends
        let mut root = FixedBitSet::with_capacity(n);
        let mut seen = FixedBitSet::with_capacity(n);
        let mut queue = VecDeque::new();
        let allowed = |q: usize| within.is_none_or(|w| w.contains(q));
        for &s in sources {
            if nonempty {
                for &(m, t) in &self.edges[s] {
                    if allowed(t) && !seen.put(t) {
                        parent[t] = Some((s, m));
                        root.insert(t);
                        queue.push_back(t);
                    }
                }
            } else if !seen.put(s) {
                root.insert(s);
                queue.push_back(s);
            }
        }
        while let Some(q) = queue.pop_front() {
            if goal(q) {
                let mut steps = Vec::new();
                let mut cur = q;
                loop {
                    if root.contains(cur) && !nonempty {
                        break;
                    }
                    let (p, m) = parent[cur].expect("non-root states have a parent");
                    steps.push((p, m));
                    if root.contains(cur) {
                        break;
                    }
                    cur = p;
                }
                steps.reverse();
                return Some((steps, q));
            }
            for &(m, t) in &self.edges[q] {
                if allowed(t) && !seen.put(t) {
                    parent[t] = Some((q, m));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// An accepted lasso, if the language is nonempty.
    pub fn find_witness(&self) -> Option<Witness> {
        let comp = self.accepting_scc()?;
        let mut inside = FixedBitSet::with_capacity(self.names.len());
        inside.extend(comp.iter().copied());
        let init: Vec<usize> = self.initial.ones().collect();
        let (stem, entry) = self.path(&init, |q| inside.contains(q), None, false)?;
        let mut cycle = Vec::new();
        let mut cur = entry;
        for f in &self.acceptance {
            let (steps, reached) = self.path(&[cur], |q| f.contains(q), Some(&inside), false)?;
            cycle.extend(steps);
            cur = reached;
        }
        let (steps, _) = self.path(&[cur], |q| q == entry, Some(&inside), true)?;
        cycle.extend(steps);
        let to_letters = |steps: &[(usize, u64)]| steps.iter().map(|&(_, m)| self.letter_set(m)).collect();
        let word = LassoWord::new(to_letters(&stem), to_letters(&cycle)).expect("cycle has a transition");
        Some(Witness {
            word,
            stem_states: stem.iter().map(|&(q, _)| q).collect(),
            cycle_states: cycle.iter().map(|&(q, _)| q).collect(),
        })
    }
}

/// An accepted lasso together with the automaton states along it: the run
/// visits `stem_states`, then repeats `cycle_states` forever, reading the
/// letters of `word` in step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub word: LassoWord,
    pub stem_states: Vec<usize>,
    pub cycle_states: Vec<usize>,
}

/// A Büchi automaton: a generalized one with exactly one acceptance set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ba(Gba);

impl Ba {
    pub fn as_gba(&self) -> &Gba {
        &self.0
    }

    pub fn accepting(&self) -> &FixedBitSet {
        &self.0.acceptance[0]
    }
}

/// Counter construction: copy `i` waits for acceptance set `i` and then
/// moves to copy `i + 1`; the accepting states are those of set 0 in copy 0.
pub fn degeneralize(g: &Gba) -> Ba {
    let n = g.num_states();
    if g.acceptance.is_empty() {
        let mut b = g.clone();
        b.add_acceptance(0..n);
        return Ba(b);
    }
    let k = g.acceptance.len();
    let mut b =
        Gba { atoms: g.atoms.clone(), names: vec![], initial: FixedBitSet::new(), edges: vec![], acceptance: vec![] };
    for i in 0..k {
        for q in 0..n {
            b.add_state(format!("{}#{}", g.names[q], i));
        }
    }
    for q in g.initial.ones() {
        b.set_initial(q);
    }
    for i in 0..k {
        for q in 0..n {
            let next = if g.acceptance[i].contains(q) { (i + 1) % k } else { i };
            for &(m, t) in &g.edges[q] {
                b.add_edge(i * n + q, m, next * n + t);
            }
        }
    }
    b.add_acceptance(g.acceptance[0].ones());
    Ba(b)
}

/// A product automaton and the component states behind each product state.
#[derive(Debug, Clone)]
pub struct Product {
    pub gba: Gba,
    pub pairs: Vec<(usize, usize)>,
}

/// Synchronous product over the reachable pairs. The right automaton's
/// atoms must be a subset of the left one's; a left letter is projected
/// onto them before matching.
pub fn product(left: &Gba, right: &Gba) -> Result<Product, AutomatonError> {
    let missing: Vec<String> = right.atoms.iter().filter(|a| !left.atoms.contains(a)).cloned().collect();
    if !missing.is_empty() {
        return Err(AutomatonError::AlphabetMismatch(missing));
    }
    let project = |m: u64| -> u64 {
        right.atoms.iter().enumerate().fold(0, |acc, (i, a)| {
            let j = left.atoms.iter().position(|b| b == a).unwrap();
            acc | ((m >> j) & 1) << i
        })
    };
    let mut out = Gba {
        atoms: left.atoms.clone(),
        names: vec![],
        initial: FixedBitSet::new(),
        edges: vec![],
        acceptance: vec![],
    };
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |p: (usize, usize), out: &mut Gba, queue: &mut VecDeque<usize>, pairs: &mut Vec<_>| {
        *ids.entry(p).or_insert_with(|| {
            let q = out.add_state(format!("{},{}", left.names[p.0], right.names[p.1]));
            pairs.push(p);
            queue.push_back(q);
            q
        })
    };
    for a in left.initial.ones() {
        for b in right.initial.ones() {
            let q = intern((a, b), &mut out, &mut queue, &mut pairs);
            out.set_initial(q);
        }
    }
    // right edges grouped by letter for each state
    let right_by_letter: Vec<HashMap<u64, Vec<usize>>> = right
        .edges
        .iter()
        .map(|es| {
            let mut m: HashMap<u64, Vec<usize>> = HashMap::new();
            for &(l, t) in es {
                m.entry(l).or_default().push(t);
            }
            m
        })
        .collect();
    while let Some(q) = queue.pop_front() {
        let (a, b) = pairs[q];
        for &(m, a2) in &left.edges[a] {
            if let Some(targets) = right_by_letter[b].get(&project(m)) {
                for &b2 in targets {
                    let t = intern((a2, b2), &mut out, &mut queue, &mut pairs);
                    out.add_edge(q, m, t);
                }
            }
        }
    }
    let n = pairs.len();
    for f in &left.acceptance {
        out.add_acceptance((0..n).filter(|&q| f.contains(pairs[q].0)));
    }
    for f in &right.acceptance {
        out.add_acceptance((0..n).filter(|&q| f.contains(pairs[q].1)));
    }
    for set in &mut out.acceptance {
        set.grow(n);
    }
    Ok(Product { gba: out, pairs })
}

/// One-run automaton accepting exactly `w`, over `atoms`.
pub fn lasso_gba(w: &LassoWord, atoms: impl IntoIterator<Item = String>) -> Result<Gba, AutomatonError> {
    let mut g = Gba::new(atoms.into_iter().chain(w.atoms()))?;
    let n = w.period_end();
    for t in 0..n {
        g.add_state(format!("t{t}"));
    }
    g.set_initial(0);
    for t in 0..n {
        let m = g.letter_mask(w.letter(t));
        g.add_edge(t, m, w.fold(t + 1));
    }
    Ok(g)
}

pub fn accepts_lasso(g: &Gba, w: &LassoWord) -> bool {
    let word = lasso_gba(w, g.atoms.iter().cloned()).expect("word atoms fit");
    !product(&word, g).expect("word alphabet covers the automaton's").gba.is_empty()
}

/// Automaton whose runs are the fair computations of `t` in which the
/// subject bit of the first state equals `polarity`.
pub fn tester_to_gba(t: &Tester, polarity: bool) -> Gba {
    let mut g = Gba::new(t.atoms()).expect("tester atoms fit");
    let atom_formulas: Vec<Ltl> = g.atoms.iter().map(|a| Ltl::atom(a)).collect();
    let letters: Vec<u64> = (0..t.num_states())
        .map(|s| {
            atom_formulas
                .iter()
                .enumerate()
                .filter(|(_, p)| t.value(s, p) == Some(true))
                .fold(0, |m, (i, _)| m | 1 << i)
        })
        .collect();
    for s in 0..t.num_states() {
        g.add_state(format!("x{s}"));
    }
    for (s, &letter) in letters.iter().enumerate() {
        if t.is_initial(s) && t.value(s, t.subject()) == Some(polarity) {
            g.set_initial(s);
        }
        for &s2 in t.successors(s) {
            g.add_edge(s, letter, s2);
        }
    }
    for j in t.justice() {
        g.add_acceptance(j.ones());
    }
    g
}

/// Classical tableau: a state fixes the atoms and, for every temporal
/// subformula, whether its obligation holds from the next step on.
struct Tableau {
    atoms: Vec<Ltl>,
    /// Temporal subformulas; `Next(a)` obliges `a`, the others oblige
    /// themselves.
    temporal: Vec<Ltl>,
    slot: HashMap<Ltl, usize>,
}

impl Tableau {
    fn new(f: &Ltl) -> Tableau {
        let closure = f.closure();
        let atoms: Vec<Ltl> =
            closure.iter().filter(|g| g.is_atom()).cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let temporal: Vec<Ltl> = closure
            .iter()
            .filter(|g| {
                matches!(
                    g.kind(),
                    Kind::Next(_) | Kind::Eventually(_) | Kind::Always(_) | Kind::Until(..) | Kind::Release(..)
                )
            })
            .cloned()
            .collect();
        let slot = atoms.iter().chain(&temporal).cloned().enumerate().map(|(i, g)| (g, i)).collect();
        Tableau { atoms, temporal, slot }
    }

    fn width(&self) -> usize {
        self.atoms.len() + self.temporal.len()
    }

    /// Three-valued truth of `f` under a partial assignment.
    fn sat(&self, f: &Ltl, x: &[Option<bool>]) -> Option<bool> {
        let xbit = |g: &Ltl| x[self.slot[g]];
        let and = |a: Option<bool>, b: Option<bool>| match (a, b) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        };
        let or = |a: Option<bool>, b: Option<bool>| match (a, b) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        };
        match f.kind() {
            Kind::True => Some(true),
            Kind::False => Some(false),
            Kind::Atom(_) => xbit(f),
            Kind::Not(a) => self.sat(a, x).map(|v| !v),
            Kind::And(a, b) => and(self.sat(a, x), self.sat(b, x)),
            Kind::Or(a, b) => or(self.sat(a, x), self.sat(b, x)),
            Kind::Implies(a, b) => or(self.sat(a, x).map(|v| !v), self.sat(b, x)),
            Kind::Next(_) => xbit(f),
            Kind::Eventually(a) => or(self.sat(a, x), xbit(f)),
            Kind::Always(a) => and(self.sat(a, x), xbit(f)),
            Kind::Until(a, b) => or(self.sat(b, x), and(self.sat(a, x), xbit(f))),
            Kind::Release(a, b) => and(self.sat(b, x), or(self.sat(a, x), xbit(f))),
            Kind::WeakUntil(..) => unreachable!("weak until is desugared first"),
        }
    }

    fn obligation<'a>(&self, g: &'a Ltl) -> &'a Ltl {
        match g.kind() {
            Kind::Next(a) => a,
            _ => g,
        }
    }

    /// All full assignments satisfying every `(formula, value)` constraint.
    fn solve(&self, constraints: &[(&Ltl, bool)]) -> Vec<Vec<bool>> {
        let mut out = Vec::new();
        let mut x = vec![None; self.width()];
        self.search(0, &mut x, constraints, &mut out);
        out
    }

    fn search(&self, i: usize, x: &mut Vec<Option<bool>>, cs: &[(&Ltl, bool)], out: &mut Vec<Vec<bool>>) {
        if cs.iter().any(|(f, v)| self.sat(f, x) == Some(!*v)) {
            return;
        }
        if i == x.len() {
            out.push(x.iter().map(|b| b.unwrap()).collect());
            return;
        }
        for v in [false, true] {
            x[i] = Some(v);
            self.search(i + 1, x, cs, out);
        }
        x[i] = None;
    }
}

/// Tableau automaton for `f`, independent of the tester construction.
/// States are reached lazily from the initial ones; there is one acceptance
/// set per `F`, `U`, `G` and `R` subformula, since a falsified `G` or `R`
/// is an eventuality as well.
pub fn tableau_gba(f: &Ltl) -> Gba {
    let f = f.desugar_weak_until();
    let tab = Tableau::new(&f);
    let mut g = Gba::new(tab.atoms.iter().map(|a| a.atom_name().unwrap().to_string())).expect("formula atoms fit");
    let mut ids: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut states: Vec<Vec<bool>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |s: Vec<bool>, g: &mut Gba, states: &mut Vec<Vec<bool>>, queue: &mut VecDeque<usize>| {
        *ids.entry(s.clone()).or_insert_with(|| {
            let bits: String = s.iter().map(|b| if *b { '1' } else { '0' }).collect();
            let q = g.add_state(format!("t{bits}"));
            states.push(s);
            queue.push_back(q);
            q
        })
    };
    for s in tab.solve(&[(&f, true)]) {
        let q = intern(s, &mut g, &mut states, &mut queue);
        g.set_initial(q);
    }
    let mut succ_cache: HashMap<Vec<bool>, Vec<Vec<bool>>> = HashMap::new();
    while let Some(q) = queue.pop_front() {
        let s = states[q].clone();
        let letter = (0..tab.atoms.len()).filter(|&i| s[i]).fold(0u64, |m, i| m | 1 << i);
        let req: Vec<bool> = s[tab.atoms.len()..].to_vec();
        let succs = succ_cache
            .entry(req.clone())
            .or_insert_with(|| {
                let cs: Vec<(&Ltl, bool)> =
                    tab.temporal.iter().zip(&req).map(|(t, &v)| (tab.obligation(t), v)).collect();
                tab.solve(&cs)
            })
            .clone();
        for t in succs {
            let to = intern(t, &mut g, &mut states, &mut queue);
            g.add_edge(q, letter, to);
        }
    }
    let full = |s: &[bool]| -> Vec<Option<bool>> { s.iter().map(|b| Some(*b)).collect() };
    for t in &tab.temporal {
        // an eventuality `t` promised at some point is fulfilled by `target`;
        // for `G`/`R` the eventuality is their failure
        let (target, positive) = match t.kind() {
            Kind::Eventually(a) | Kind::Until(_, a) => (a, true),
            Kind::Always(a) | Kind::Release(_, a) => (a, false),
            _ => continue,
        };
        let members: Vec<usize> = (0..states.len())
            .filter(|&q| {
                let x = full(&states[q]);
                tab.sat(t, &x) == Some(!positive) || tab.sat(target, &x) == Some(positive)
            })
            .collect();
        g.add_acceptance(members);
    }
    g
}
