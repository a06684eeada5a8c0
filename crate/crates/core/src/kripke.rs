//! Kripke structures: finite labeled transition systems used as models.
//!
//! Text format, one declaration per line, `#` starts a comment:
//!
//! ```text
//! atoms: p q
//! states: s0 s1
//! init: s0
//! label s0:
//! label s1: p
//! trans: s0 -> s1
//! trans: s1 -> s1
//! ```

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::automata::{AutomatonError, Gba};
use crate::lasso::{LassoWord, Letter};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KripkeError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("state `{state}` is labeled with undeclared atom `{atom}`")]
    UndeclaredAtom { state: String, atom: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state `{0}` is declared twice")]
    DuplicateState(String),
    #[error("the set of initial states is empty")]
    EmptyInit,
    #[error("state `{0}` has no outgoing transition")]
    NoSuccessor(String),
    #[error("state `{0}` has no label line")]
    MissingLabel(String),
    #[error(transparent)]
    Alphabet(#[from] AutomatonError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeStructure {
    atoms: Vec<String>,
    names: Vec<String>,
    initial: Vec<usize>,
    succ: Vec<Vec<usize>>,
    labels: Vec<Letter>,
}

impl KripkeStructure {
    /// Builds and validates a structure. `transitions` and `initial` refer
    /// to states by name.
    pub fn new(
        atoms: &[&str],
        states: &[(&str, &[&str])],
        initial: &[&str],
        transitions: &[(&str, &str)],
    ) -> Result<KripkeStructure, KripkeError> {
        Builder {
            atoms: Some(atoms.iter().map(|s| s.to_string()).collect()),
            states: Some(states.iter().map(|(s, _)| s.to_string()).collect()),
            init: Some(initial.iter().map(|s| s.to_string()).collect()),
            labels: states.iter().map(|(s, l)| (s.to_string(), l.iter().map(|a| a.to_string()).collect())).collect(),
            trans: transitions.iter().map(|(a, c)| (a.to_string(), c.to_string())).collect(),
        }
        .finish()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn successors(&self, s: usize) -> &[usize] {
        &self.succ[s]
    }

    pub fn label(&self, s: usize) -> &Letter {
        &self.labels[s]
    }

    /// Whether `stem` followed by `cycle` repeated forever is a path of the
    /// structure starting in an initial state.
    pub fn is_path(&self, stem: &[usize], cycle: &[usize]) -> bool {
        let seq: Vec<usize> = stem.iter().chain(cycle).copied().collect();
        let Some(&first) = seq.first() else { return false };
        !cycle.is_empty()
            && self.initial.contains(&first)
            && seq.windows(2).all(|w| self.succ[w[0]].contains(&w[1]))
            && self.succ[*cycle.last().unwrap()].contains(&cycle[0])
    }

    /// The computation induced by a lasso-shaped path.
    pub fn path_word(&self, stem: &[usize], cycle: &[usize]) -> LassoWord {
        let letters = |xs: &[usize]| xs.iter().map(|&s| self.labels[s].clone()).collect();
        LassoWord::new(letters(stem), letters(cycle)).expect("path cycle is nonempty")
    }
}

#[derive(Default)]
struct Builder {
    atoms: Option<Vec<String>>,
    states: Option<Vec<String>>,
    init: Option<Vec<String>>,
    labels: Vec<(String, Vec<String>)>,
    trans: Vec<(String, String)>,
}

impl Builder {
    fn finish(self) -> Result<KripkeStructure, KripkeError> {
        let atoms = self.atoms.unwrap_or_default();
        let names = self.states.unwrap_or_default();
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(KripkeError::DuplicateState(n.clone()));
            }
        }
        let lookup = |n: &str| index.get(n).copied().ok_or_else(|| KripkeError::UnknownState(n.to_string()));
        let declared: BTreeSet<&String> = atoms.iter().collect();
        let mut labels: Vec<Option<Letter>> = vec![None; names.len()];
        for (state, label) in &self.labels {
            let s = lookup(state)?;
            if let Some(atom) = label.iter().find(|a| !declared.contains(a)) {
                return Err(KripkeError::UndeclaredAtom { state: state.clone(), atom: atom.clone() });
            }
            labels[s] = Some(label.iter().cloned().collect());
        }
        let mut initial = Vec::new();
        for n in self.init.unwrap_or_default() {
            let s = lookup(&n)?;
            if !initial.contains(&s) {
                initial.push(s);
            }
        }
        let mut succ = vec![Vec::new(); names.len()];
        for (a, b) in &self.trans {
            let (a, b) = (lookup(a)?, lookup(b)?);
            if !succ[a].contains(&b) {
                succ[a].push(b);
            }
        }
        if initial.is_empty() {
            return Err(KripkeError::EmptyInit);
        }
        if let Some(s) = (0..names.len()).find(|&s| labels[s].is_none()) {
            return Err(KripkeError::MissingLabel(names[s].clone()));
        }
        if let Some(s) = (0..names.len()).find(|&s| succ[s].is_empty()) {
            return Err(KripkeError::NoSuccessor(names[s].clone()));
        }
        let mut sorted_atoms = atoms;
        sorted_atoms.sort();
        sorted_atoms.dedup();
        Ok(KripkeStructure {
            atoms: sorted_atoms,
            names,
            initial,
            succ,
            labels: labels.into_iter().map(Option::unwrap).collect(),
        })
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_kripke(text: &str) -> Result<KripkeStructure, KripkeError> {
    let mut b = Builder::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: String| KripkeError::Syntax { line: line_no, message };
        let Some((head, rest)) = line.split_once(':') else {
            return Err(syntax(format!("expected `keyword: ...`, found `{line}`")));
        };
        let words: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        let names = |words: Vec<String>| -> Result<Vec<String>, KripkeError> {
            match words.iter().find(|w| !is_ident(w)) {
                Some(w) => Err(syntax(format!("`{w}` is not a valid name"))),
                None => Ok(words),
            }
        };
        let head: Vec<&str> = head.split_whitespace().collect();
        match head.as_slice() {
            ["atoms"] => b.atoms.get_or_insert_with(Vec::new).extend(names(words)?),
            ["states"] => b.states.get_or_insert_with(Vec::new).extend(names(words)?),
            ["init"] => b.init.get_or_insert_with(Vec::new).extend(names(words)?),
            ["label", state] => {
                let label = names(
                    words.iter().flat_map(|w| w.split(',')).filter(|w| !w.is_empty()).map(str::to_string).collect(),
                )?;
                b.labels.push((state.to_string(), label));
            }
            ["trans"] => {
                let Some((from, to)) = rest.split_once("->") else {
                    return Err(syntax("expected `trans: a -> b`".into()));
                };
                let (from, to) = (from.trim(), to.trim());
                if !is_ident(from) || !is_ident(to) {
                    return Err(syntax(format!("malformed transition `{}`", rest.trim())));
                }
                b.trans.push((from.to_string(), to.to_string()));
            }
            _ => return Err(syntax(format!("unknown declaration `{}`", head.join(" ")))),
        }
    }
    b.finish()
}

/// The automaton whose runs read exactly the computations of `k`: one state
/// per model state, each transition reading the label of its source.
pub fn kripke_to_gba(k: &KripkeStructure) -> Gba {
    let mut g = Gba::new(k.atoms.iter().cloned()).expect("model atoms fit");
    for n in &k.names {
        g.add_state(n.clone());
    }
    for &s in &k.initial {
        g.set_initial(s);
    }
    for s in 0..k.names.len() {
        let letter = g.letter_mask(&k.labels[s]);
        for &t in &k.succ[s] {
            g.add_edge(s, letter, t);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::accepts_lasso;

    const CHAIN: &str = "\
# s0 then s1 forever
atoms: p q
states: s0 s1
init: s0
label s0:
label s1: p
trans: s0 -> s1
trans: s1 -> s1
";

    #[test]
    fn parses_chain() {
        let k = parse_kripke(CHAIN).unwrap();
        assert_eq!(k.num_states(), 2);
        assert_eq!(k.initial(), &[0]);
        assert_eq!(k.successors(1), &[1]);
        assert!(k.label(1).contains("p"));
        let g = kripke_to_gba(&k);
        assert!(g.num_states() <= k.num_states() + 1);
        assert!(accepts_lasso(&g, &"{} | {p}".parse().unwrap()));
        assert!(!accepts_lasso(&g, &"| {p}".parse().unwrap()));
        assert!(!accepts_lasso(&g, &"{} {} | {p}".parse().unwrap()));
    }

    #[test]
    fn two_cycle() {
        let k = KripkeStructure::new(&["p"], &[("s0", &["p"]), ("s1", &[])], &["s0"], &[("s0", "s1"), ("s1", "s0")])
            .unwrap();
        let g = kripke_to_gba(&k);
        assert!(accepts_lasso(&g, &"| {p} {}".parse().unwrap()));
        assert!(!accepts_lasso(&g, &"| {} {p}".parse().unwrap()));
        assert!(k.is_path(&[], &[0, 1]));
        assert!(!k.is_path(&[], &[1, 0]));
    }

    #[test]
    fn validation_errors() {
        let dead = CHAIN.replace("trans: s1 -> s1\n", "");
        assert_eq!(parse_kripke(&dead), Err(KripkeError::NoSuccessor("s1".into())));
        assert_eq!(parse_kripke(&dead).unwrap_err().to_string(), "state `s1` has no outgoing transition");
        let bad_atom = CHAIN.replace("label s1: p", "label s1: r");
        assert_eq!(parse_kripke(&bad_atom), Err(KripkeError::UndeclaredAtom { state: "s1".into(), atom: "r".into() }));
        let unknown = CHAIN.replace("trans: s0 -> s1", "trans: s0 -> s9");
        assert_eq!(parse_kripke(&unknown), Err(KripkeError::UnknownState("s9".into())));
        let no_init = CHAIN.replace("init: s0", "init:");
        assert_eq!(parse_kripke(&no_init), Err(KripkeError::EmptyInit));
        let no_label = CHAIN.replace("label s0:\n", "");
        assert_eq!(parse_kripke(&no_label), Err(KripkeError::MissingLabel("s0".into())));
        assert!(matches!(parse_kripke("atoms p"), Err(KripkeError::Syntax { line: 1, .. })));
        assert!(matches!(parse_kripke("trans: a b"), Err(KripkeError::Syntax { .. })));
    }

    #[test]
    fn whitespace_and_commas() {
        let k = parse_kripke("atoms:p q\nstates: a\ninit:  a\nlabel a : p,q\ntrans:a->a\n").unwrap();
        assert_eq!(k.label(0).len(), 2);
    }
}
