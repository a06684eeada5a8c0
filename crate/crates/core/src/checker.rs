//! Robust model checking: the value of an rLTL formula on a Kripke structure
//! is the greatest truth value below the value of every computation.
//!
//! Bit `j` of that value is set iff every computation satisfies the LTL
//! translation of bit `j`. The bits are checked from 4 down to 1 and the
//! search stops at the first failing bit.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::algebra::TruthValue;
use crate::automata::{product, tableau_gba, tester_to_gba, Gba};
use crate::formula::{FragmentClass, Kind, Ltl, Rltl};
use crate::kripke::{kripke_to_gba, KripkeStructure};
use crate::lasso::LassoWord;
use crate::tester::build_tester;
use crate::translate::Translator;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("formula atoms {} are not declared by the model", .0.join(", "))]
    UndeclaredAtoms(Vec<String>),
    #[error("bit index {0} is out of range, expected 1..=4")]
    BitIndex(usize),
}

/// Which automaton construction to use for the specification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Testers inside the efficient fragment, the tableau outside it.
    #[default]
    Auto,
    Tester,
    Tableau,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathUsed {
    Tester,
    Tableau,
}

impl fmt::Display for PathUsed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathUsed::Tester => "tester",
            PathUsed::Tableau => "tableau",
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    pub method: Method,
    /// Check all four bits concurrently instead of stopping early.
    pub parallel: bool,
    /// Time of a classical check of the same property, used to report the
    /// blowup exponent.
    pub baseline: Option<Duration>,
}

/// A computation of the model violating one bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub word: LassoWord,
    /// Model states visited before the cycle.
    pub stem: Vec<usize>,
    /// Model states repeated forever.
    pub cycle: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct BitResult {
    pub bit: usize,
    pub holds: bool,
    pub path: PathUsed,
    /// The LTL formula every computation was checked against.
    pub formula: Ltl,
    pub spec_states: usize,
    pub product_states: usize,
    pub counterexample: Option<Counterexample>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub verdict: TruthValue,
    /// In the order they were checked.
    pub bits: Vec<BitResult>,
    pub steps: usize,
    pub fragment: FragmentClass,
    pub length: usize,
    pub kappa: usize,
    /// False outside the efficient fragment, where no tester size bound is
    /// promised.
    pub bound_guaranteed: bool,
    pub elapsed: Duration,
    pub zeta: Option<f64>,
}

impl CheckReport {
    /// The failing bit with the highest index, if any.
    pub fn failing(&self) -> Option<&BitResult> {
        self.bits.iter().filter(|b| !b.holds).max_by_key(|b| b.bit)
    }

    /// `key: value` lines for scripts.
    pub fn machine(&self) -> String {
        let mut out = format!(
            "verdict: {}\nsteps: {}\nfragment: {}\nlength: {}\nkappa: {}\n",
            self.verdict, self.steps, self.fragment, self.length, self.kappa
        );
        let mut bits: Vec<&BitResult> = self.bits.iter().collect();
        bits.sort_by_key(|b| std::cmp::Reverse(b.bit));
        for b in bits {
            out += &format!("bit{}: {}\n", b.bit, if b.holds { "pass" } else { "fail" });
        }
        if let Some(c) = self.failing().and_then(|b| b.counterexample.as_ref()) {
            out += &format!("counterexample: {}\n", c.word);
        }
        if let Some(z) = self.zeta {
            out += &format!("zeta: {z:.4}\n");
        }
        out
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {} after {} check(s)", self.verdict, self.steps)?;
        writeln!(
            f,
            "fragment {} (length {}, kappa {}){}",
            self.fragment,
            self.length,
            self.kappa,
            if self.bound_guaranteed { "" } else { ", no size guarantee" }
        )?;
        for b in &self.bits {
            writeln!(
                f,
                "  bit {}: {} via {} ({} spec states, {} product states, {:.3} ms)",
                b.bit,
                if b.holds { "holds" } else { "fails" },
                b.path,
                b.spec_states,
                b.product_states,
                b.elapsed.as_secs_f64() * 1e3
            )?;
            if let Some(c) = &b.counterexample {
                writeln!(f, "    counterexample: {}", c.word)?;
            }
        }
        if let Some(z) = self.zeta {
            writeln!(f, "blowup exponent {z:.4}")?;
        }
        Ok(())
    }
}

/// A formula prepared for checking: implications with weakening-free
/// antecedents replaced, and the fragment it then falls into.
struct Prepared {
    rewritten: Rltl,
    class: FragmentClass,
    length: usize,
    kappa: usize,
}

fn validate_atoms(k: &KripkeStructure, atoms: BTreeSet<String>) -> Result<(), CheckError> {
    let missing: Vec<String> = atoms.into_iter().filter(|a| !k.atoms().contains(a)).collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(CheckError::UndeclaredAtoms(missing))
    }
}

fn prepare(k: &KripkeStructure, f: &Rltl) -> Result<Prepared, CheckError> {
    validate_atoms(k, f.atoms())?;
    let rewritten = f.desugar_weak_until().rewrite_nonrobust_implications();
    Ok(Prepared { class: rewritten.classify(), length: f.length(), kappa: f.kappa(), rewritten })
}

/// Per-bit LTL formulas. With `single`, an outermost implication is checked
/// as the implication of its sides' translations, which is only sound once
/// every higher bit is known to hold.
fn bit_formula(p: &Prepared, t: &mut Translator, j: usize, single: bool) -> Ltl {
    if let (true, FragmentClass::OuterImplication, Kind::Implies(a, b)) = (single, p.class, p.rewritten.kind()) {
        return Ltl::implies(t.bit(j, a).unwrap(), t.bit(j, b).unwrap());
    }
    t.bit(j, &p.rewritten).unwrap()
}

/// The LTL formula verified for bit `j` when bits are checked from 4 down,
/// after the higher bits have passed.
pub fn sequential_bit_formula(f: &Rltl, j: usize) -> Result<Ltl, CheckError> {
    if !(1..=4).contains(&j) {
        return Err(CheckError::BitIndex(j));
    }
    let rewritten = f.desugar_weak_until().rewrite_nonrobust_implications();
    let p = Prepared { class: rewritten.classify(), length: f.length(), kappa: f.kappa(), rewritten };
    Ok(bit_formula(&p, &mut Translator::new(), j, true))
}

fn path_for(method: Method, class: FragmentClass) -> PathUsed {
    match (method, class) {
        (Method::Tester, _) => PathUsed::Tester,
        (Method::Tableau, _) | (Method::Auto, FragmentClass::Full) => PathUsed::Tableau,
        (Method::Auto, _) => PathUsed::Tester,
    }
}

/// Whether every computation of the model satisfies `f`.
fn check_ltl(model: &Gba, f: &Ltl, bit: usize, path: PathUsed) -> BitResult {
    let start = Instant::now();
    let spec = match path {
        PathUsed::Tester => tester_to_gba(&build_tester(f), false),
        PathUsed::Tableau => tableau_gba(&Ltl::not(f.clone())),
    };
    let prod = product(model, &spec).expect("atoms were validated");
    let counterexample = prod.gba.find_witness().map(|w| Counterexample {
        word: w.word,
        stem: w.stem_states.iter().map(|&q| prod.pairs[q].0).collect(),
        cycle: w.cycle_states.iter().map(|&q| prod.pairs[q].0).collect(),
    });
    BitResult {
        bit,
        holds: counterexample.is_none(),
        path,
        formula: f.clone(),
        spec_states: spec.num_states(),
        product_states: prod.gba.num_states(),
        counterexample,
        elapsed: start.elapsed(),
    }
}

/// Plain LTL model checking: whether every computation satisfies `f`.
/// `Method::Auto` uses a tester.
pub fn check_classical(k: &KripkeStructure, f: &Ltl, method: Method) -> Result<BitResult, CheckError> {
    validate_atoms(k, f.atoms())?;
    let path = if method == Method::Tableau { PathUsed::Tableau } else { PathUsed::Tester };
    Ok(check_ltl(&kripke_to_gba(k), &f.desugar_weak_until(), 1, path))
}

/// Whether bit `j` of the robust value holds on every computation.
pub fn check_bit(k: &KripkeStructure, f: &Rltl, j: usize) -> Result<BitResult, CheckError> {
    check_bit_with(k, f, j, &CheckOptions::default())
}

pub fn check_bit_with(k: &KripkeStructure, f: &Rltl, j: usize, opts: &CheckOptions) -> Result<BitResult, CheckError> {
    if !(1..=4).contains(&j) {
        return Err(CheckError::BitIndex(j));
    }
    let p = prepare(k, f)?;
    let model = kripke_to_gba(k);
    let path = path_for(opts.method, p.class);
    let mut t = Translator::new();
    if p.class == FragmentClass::OuterImplication {
        // the single implications of bits 4..j together decide bit j
        for i in (j + 1..=4).rev() {
            let r = check_ltl(&model, &bit_formula(&p, &mut t, i, true), i, path);
            if !r.holds {
                return Ok(BitResult { bit: j, ..r });
            }
        }
    }
    Ok(check_ltl(&model, &bit_formula(&p, &mut t, j, true), j, path))
}

pub fn model_check(k: &KripkeStructure, f: &Rltl) -> Result<CheckReport, CheckError> {
    model_check_with(k, f, &CheckOptions::default())
}

pub fn model_check_with(k: &KripkeStructure, f: &Rltl, opts: &CheckOptions) -> Result<CheckReport, CheckError> {
    let start = Instant::now();
    let p = prepare(k, f)?;
    let model = kripke_to_gba(k);
    let path = path_for(opts.method, p.class);
    let mut t = Translator::new();
    let bits: Vec<BitResult> = if opts.parallel {
        let formulas: Vec<Ltl> = (1..=4).rev().map(|j| bit_formula(&p, &mut t, j, false)).collect();
        std::thread::scope(|s| {
            let handles: Vec<_> = formulas
                .iter()
                .zip((1..=4).rev())
                .map(|(g, j)| {
                    let model = &model;
                    s.spawn(move || check_ltl(model, g, j, path))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("bit check panicked")).collect()
        })
    } else {
        let mut out = Vec::new();
        for j in (1..=4).rev() {
            let r = check_ltl(&model, &bit_formula(&p, &mut t, j, true), j, path);
            let stop = !r.holds;
            out.push(r);
            if stop {
                break;
            }
        }
        out
    };
    // bits hold from 4 down to the first failure
    let level = (1..=4).rev().take_while(|&j| bits.iter().any(|b| b.bit == j && b.holds)).count();
    let elapsed = start.elapsed();
    let zeta = opts.baseline.map(|base| {
        let ratio = elapsed.as_secs_f64() / base.as_secs_f64().max(f64::MIN_POSITIVE);
        1.0 + ratio.log2() / p.length as f64
    });
    Ok(CheckReport {
        verdict: TruthValue::ALL[level],
        steps: bits.len(),
        bits,
        fragment: p.class,
        length: p.length,
        kappa: p.kappa,
        bound_guaranteed: p.class.in_fragment(),
        elapsed,
        zeta,
    })
}

/// Whether every computation has value at least `b`.
pub fn check_threshold(k: &KripkeStructure, f: &Rltl, b: TruthValue) -> Result<bool, CheckError> {
    if b == TruthValue::BOTTOM {
        prepare(k, f)?;
        return Ok(true);
    }
    Ok(check_bit(k, f, 5 - b.level())?.holds)
}
