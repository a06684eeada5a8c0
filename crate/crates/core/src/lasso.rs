//! Ultimately periodic words and direct evaluation of LTL and robust LTL on
//! them.
//!
//! A lasso `stem · loop^ω` has `n = |stem| + |loop|` distinct positions.
//! Every quantity below is tabulated on those positions; position `t >= n`
//! of the infinite word is folded back to `|stem| + (t - |stem|) mod |loop|`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::TruthValue;
use crate::formula::{Kind, Ltl, Rltl};

pub type Letter = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LassoError {
    #[error("the loop of a lasso must be nonempty")]
    EmptyLoop,
    #[error("malformed lasso `{text}`: {reason}")]
    Syntax { text: String, reason: String },
    #[error("atom `{0}` is not declared")]
    UndeclaredAtom(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoWord {
    stem: Vec<Letter>,
    cycle: Vec<Letter>,
}

impl LassoWord {
    pub fn new(stem: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self, LassoError> {
        if cycle.is_empty() {
            return Err(LassoError::EmptyLoop);
        }
        Ok(LassoWord { stem, cycle })
    }

    /// Builds a lasso from letters given as slices of atom names.
    pub fn from_names(stem: &[&[&str]], cycle: &[&[&str]]) -> Result<Self, LassoError> {
        let conv =
            |ls: &[&[&str]]| -> Vec<Letter> { ls.iter().map(|l| l.iter().map(|s| s.to_string()).collect()).collect() };
        Self::new(conv(stem), conv(cycle))
    }

    pub fn stem(&self) -> &[Letter] {
        &self.stem
    }

    pub fn cycle(&self) -> &[Letter] {
        &self.cycle
    }

    /// Number of distinct positions, `|stem| + |loop|`.
    pub fn period_end(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    /// Folds a position of the infinite word onto `0..period_end()`.
    pub fn fold(&self, t: usize) -> usize {
        if t < self.stem.len() {
            t
        } else {
            self.stem.len() + (t - self.stem.len()) % self.cycle.len()
        }
    }

    /// `σ(t)`.
    pub fn letter(&self, t: usize) -> &Letter {
        let t = self.fold(t);
        if t < self.stem.len() {
            &self.stem[t]
        } else {
            &self.cycle[t - self.stem.len()]
        }
    }

    fn successor(&self, i: usize) -> usize {
        self.fold(i + 1)
    }

    /// The suffix starting at position `t`.
    pub fn suffix(&self, t: usize) -> LassoWord {
        if t < self.stem.len() {
            return LassoWord { stem: self.stem[t..].to_vec(), cycle: self.cycle.clone() };
        }
        let shift = (t - self.stem.len()) % self.cycle.len();
        let mut cycle = self.cycle.clone();
        cycle.rotate_left(shift);
        LassoWord { stem: vec![], cycle }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        self.stem.iter().chain(&self.cycle).flatten().cloned().collect()
    }

    pub fn check_atoms(&self, declared: &BTreeSet<String>) -> Result<(), LassoError> {
        match self.atoms().into_iter().find(|a| !declared.contains(a)) {
            Some(a) => Err(LassoError::UndeclaredAtom(a)),
            None => Ok(()),
        }
    }
}

fn write_letter(f: &mut fmt::Formatter<'_>, letter: &Letter) -> fmt::Result {
    f.write_str("{")?;
    for (i, a) in letter.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        f.write_str(a)?;
    }
    f.write_str("}")
}

/// Rendered as brace-delimited letters with a `|` between stem and loop,
/// e.g. `{} | {p}` for `∅·{p}^ω`.
impl fmt::Display for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for letter in &self.stem {
            write_letter(f, letter)?;
            f.write_str(" ")?;
        }
        f.write_str("|")?;
        for letter in &self.cycle {
            f.write_str(" ")?;
            write_letter(f, letter)?;
        }
        Ok(())
    }
}

fn parse_letters(text: &str, whole: &str) -> Result<Vec<Letter>, LassoError> {
    let err = |reason: &str| LassoError::Syntax { text: whole.to_string(), reason: reason.to_string() };
    let mut letters = Vec::new();
    let mut rest = text.trim_start();
    while !rest.is_empty() {
        let Some(body) = rest.strip_prefix('{') else {
            return Err(err("expected `{`"));
        };
        let Some(close) = body.find('}') else {
            return Err(err("unclosed `{`"));
        };
        let mut letter = Letter::new();
        for name in body[..close].split(|c: char| c == ',' || c.is_whitespace()) {
            if name.is_empty() {
                continue;
            }
            let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(err(&format!("`{name}` is not an atom name")));
            }
            letter.insert(name.to_string());
        }
        letters.push(letter);
        rest = body[close + 1..].trim_start();
    }
    Ok(letters)
}

impl FromStr for LassoWord {
    type Err = LassoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let Some((stem, cycle)) = s.split_once('|') else {
            return Err(LassoError::Syntax { text: s.to_string(), reason: "missing `|` between stem and loop".into() });
        };
        LassoWord::new(parse_letters(stem, s)?, parse_letters(cycle, s)?)
    }
}

/// Truth of an LTL formula at every position `0..period_end()`.
pub fn tabulate_ltl(f: &Ltl, w: &LassoWord) -> Vec<bool> {
    let mut memo = std::collections::HashMap::new();
    tab_ltl(f, w, &mut memo)
}

fn tab_ltl(f: &Ltl, w: &LassoWord, memo: &mut std::collections::HashMap<Ltl, Vec<bool>>) -> Vec<bool> {
    if let Some(v) = memo.get(f) {
        return v.clone();
    }
    let n = w.period_end();
    let out: Vec<bool> = match f.kind() {
        Kind::True => vec![true; n],
        Kind::False => vec![false; n],
        Kind::Atom(a) => (0..n).map(|t| w.letter(t).contains(&**a)).collect(),
        Kind::Not(a) => tab_ltl(a, w, memo).iter().map(|x| !x).collect(),
        Kind::And(a, b) => zip(&tab_ltl(a, w, memo), &tab_ltl(b, w, memo), |x, y| x && y),
        Kind::Or(a, b) => zip(&tab_ltl(a, w, memo), &tab_ltl(b, w, memo), |x, y| x || y),
        Kind::Implies(a, b) => zip(&tab_ltl(a, w, memo), &tab_ltl(b, w, memo), |x, y| !x || y),
        Kind::Next(a) => {
            let a = tab_ltl(a, w, memo);
            (0..n).map(|t| a[w.successor(t)]).collect()
        }
        Kind::Eventually(a) => {
            let a = tab_ltl(a, w, memo);
            fixpoint(w, false, |t, next| a[t] || next)
        }
        Kind::Always(a) => {
            let a = tab_ltl(a, w, memo);
            fixpoint(w, true, |t, next| a[t] && next)
        }
        Kind::Until(a, b) => {
            let (a, b) = (tab_ltl(a, w, memo), tab_ltl(b, w, memo));
            fixpoint(w, false, |t, next| b[t] || (a[t] && next))
        }
        Kind::Release(a, b) => {
            let (a, b) = (tab_ltl(a, w, memo), tab_ltl(b, w, memo));
            fixpoint(w, true, |t, next| b[t] && (a[t] || next))
        }
        Kind::WeakUntil(a, b) => {
            let (a, b) = (tab_ltl(a, w, memo), tab_ltl(b, w, memo));
            fixpoint(w, true, |t, next| b[t] || (a[t] && next))
        }
    };
    memo.insert(f.clone(), out.clone());
    out
}

fn zip(a: &[bool], b: &[bool], op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| op(*x, *y)).collect()
}

/// Least (`start = false`) or greatest (`start = true`) fixpoint of
/// `v[t] = step(t, v[succ t])` on the lasso positions.
fn fixpoint(w: &LassoWord, start: bool, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let n = w.period_end();
    let mut v = vec![start; n];
    loop {
        let mut changed = false;
        for t in (0..n).rev() {
            let new = step(t, v[w.successor(t)]);
            if new != v[t] {
                v[t] = new;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}

/// Classical truth of `f` on the word.
pub fn eval_ltl(f: &Ltl, w: &LassoWord) -> bool {
    tabulate_ltl(f, w)[0]
}

/// Robust value of an rLTL formula at every position `0..period_end()`,
/// computed from the quantifier definitions of each operator.
pub fn tabulate_rltl(f: &Rltl, w: &LassoWord) -> Vec<TruthValue> {
    let mut memo = std::collections::HashMap::new();
    tab_rltl(f, w, &mut memo)
}

/// Quantifier patterns over an eventually periodic 0/1 sequence `m_j`,
/// `j >= 0`, whose values repeat with period `|loop|` from `j = n` on.
/// `horizon = n + |loop|` covers one full period past the point where every
/// prefix aggregate has stabilized.
struct Window {
    n: usize,
    horizon: usize,
}

impl Window {
    fn sup(&self, m: impl Fn(usize) -> bool) -> bool {
        (0..self.horizon).any(m)
    }

    fn inf(&self, m: impl Fn(usize) -> bool) -> bool {
        (0..self.horizon).all(m)
    }

    /// `sup_k inf_{j >= k} m_j`
    fn eventually_always(&self, m: impl Fn(usize) -> bool) -> bool {
        (self.n..self.horizon).all(m)
    }

    /// `inf_k sup_{j >= k} m_j`
    fn infinitely_often(&self, m: impl Fn(usize) -> bool) -> bool {
        (self.n..self.horizon).any(m)
    }
}

fn tab_rltl(f: &Rltl, w: &LassoWord, memo: &mut std::collections::HashMap<Rltl, Vec<TruthValue>>) -> Vec<TruthValue> {
    if let Some(v) = memo.get(f) {
        return v.clone();
    }
    let n = w.period_end();
    let window = Window { n, horizon: n + w.cycle().len() };
    // bit k of child `a` at relative position j from t
    let bit = |a: &[TruthValue], t: usize, j: usize, k: usize| a[w.fold(t + j)].bit(k);
    let per_bit = |t: usize, g: &dyn Fn(usize, usize) -> bool| -> TruthValue {
        let bits = [g(t, 1), g(t, 2), g(t, 3), g(t, 4)];
        TruthValue::from_bits(bits).expect("quantified bits stay monotone")
    };
    let out: Vec<TruthValue> = match f.kind() {
        Kind::True => vec![TruthValue::TOP; n],
        Kind::False => vec![TruthValue::BOTTOM; n],
        Kind::Atom(a) => (0..n).map(|t| TruthValue::from_bool(w.letter(t).contains(&**a))).collect(),
        Kind::Not(a) => tab_rltl(a, w, memo).iter().map(|v| v.negate()).collect(),
        Kind::And(a, b) => {
            let (a, b) = (tab_rltl(a, w, memo), tab_rltl(b, w, memo));
            a.iter().zip(&b).map(|(x, y)| x.meet(*y)).collect()
        }
        Kind::Or(a, b) => {
            let (a, b) = (tab_rltl(a, w, memo), tab_rltl(b, w, memo));
            a.iter().zip(&b).map(|(x, y)| x.join(*y)).collect()
        }
        Kind::Implies(a, b) => {
            let (a, b) = (tab_rltl(a, w, memo), tab_rltl(b, w, memo));
            a.iter().zip(&b).map(|(x, y)| x.residual_implies(*y)).collect()
        }
        Kind::Next(a) => {
            let a = tab_rltl(a, w, memo);
            (0..n).map(|t| a[w.successor(t)]).collect()
        }
        Kind::Eventually(a) => {
            let a = tab_rltl(a, w, memo);
            (0..n).map(|t| per_bit(t, &|t, k| window.sup(|j| bit(&a, t, j, k)))).collect()
        }
        Kind::Always(a) => {
            let a = tab_rltl(a, w, memo);
            (0..n)
                .map(|t| {
                    per_bit(t, &|t, k| {
                        let m = |j| bit(&a, t, j, k);
                        match k {
                            1 => window.inf(m),
                            2 => window.eventually_always(m),
                            3 => window.infinitely_often(m),
                            _ => window.sup(m),
                        }
                    })
                })
                .collect()
        }
        Kind::Until(a, b) => {
            let (a, b) = (tab_rltl(a, w, memo), tab_rltl(b, w, memo));
            (0..n)
                .map(|t| {
                    per_bit(t, &|t, k| {
                        // sup_j min(b_j, inf_{i<j} a_i)
                        window.sup(|j| bit(&b, t, j, k) && (0..j).all(|i| bit(&a, t, i, k)))
                    })
                })
                .collect()
        }
        Kind::Release(a, b) => {
            let (a, b) = (tab_rltl(a, w, memo), tab_rltl(b, w, memo));
            robust_release(&a, &b, w, &window, n)
        }
        Kind::WeakUntil(a, b) => {
            let expanded = Rltl::release(b.clone(), Rltl::or(b.clone(), a.clone()));
            tab_rltl(&expanded, w, memo)
        }
    };
    memo.insert(f.clone(), out.clone());
    out
}

fn robust_release(a: &[TruthValue], b: &[TruthValue], w: &LassoWord, window: &Window, n: usize) -> Vec<TruthValue> {
    (0..n)
        .map(|t| {
            let bits = std::array::from_fn(|idx| {
                let k = idx + 1;
                // m_j = max(b_j, sup_{i<j} a_i)
                let m = |j: usize| b[w.fold(t + j)].bit(k) || (0..j).any(|i| a[w.fold(t + i)].bit(k));
                match k {
                    1 => window.inf(m),
                    2 => window.eventually_always(m),
                    3 => window.infinitely_often(m),
                    _ => window.sup(m),
                }
            });
            TruthValue::from_bits(bits).expect("quantified bits stay monotone")
        })
        .collect()
}

/// Robust value of `f` on the word.
pub fn eval_rltl(f: &Rltl, w: &LassoWord) -> TruthValue {
    tabulate_rltl(f, w)[0]
}
