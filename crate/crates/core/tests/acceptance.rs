//! Acceptance criteria. Each criterion prints one `PASS`/`FAIL` line with its
//! runtime and limit; the test fails if any criterion fails or overruns.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use common::{formula, fragment_formula, kripke, lasso, rng, Shape};
use rltl::algebra::TruthValue::{self, *};
use rltl::automata::{accepts_lasso, tableau_gba, tester_to_gba};
use rltl::checker::sequential_bit_formula;
use rltl::checker::{
    check_threshold, model_check, model_check_with, CheckOptions, CheckReport, Counterexample, Method, PathUsed,
};
use rltl::kripke::KripkeStructure;
use rltl::lasso::{eval_ltl, eval_rltl, LassoWord};
use rltl::parser::{parse_ltl, parse_rltl};
use rltl::tester::{
    build_tester, compose, size_bound, tester_atom, tester_eventually_always, tester_release_bit3, tester_until,
};
use rltl::translate::{ltl_bit, translation_size};
use rltl::{FragmentClass, Ltl, Rltl};

type Outcome = Result<String, String>;

/// A failing bit's witness, kept for the counterexample criterion.
struct Failure {
    model: KripkeStructure,
    formula: Ltl,
    witness: Counterexample,
}

#[derive(Default)]
struct Run {
    failures: Vec<Failure>,
    red: Vec<usize>,
}

impl Run {
    fn criterion(&mut self, id: usize, limit: Duration, body: impl FnOnce(&mut Run) -> Outcome) {
        let start = Instant::now();
        let outcome = body(self);
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over time limit")),
            Err(e) => (false, e),
        };
        // written to the raw handle so the line shows even when output is captured
        let _ = writeln!(
            std::io::stderr(),
            "criterion {id:>2}: {} ({:.3}s, limit {}s) {detail}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        if !ok {
            self.red.push(id);
        }
    }

    fn record(&mut self, model: &KripkeStructure, report: &CheckReport) {
        for b in report.bits.iter().filter(|b| !b.holds) {
            if let Some(c) = &b.counterexample {
                self.failures.push(Failure { model: model.clone(), formula: b.formula.clone(), witness: c.clone() });
            }
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rl(s: &str) -> Rltl {
    parse_rltl(s).unwrap()
}

fn l(s: &str) -> Ltl {
    parse_ltl(s).unwrap()
}

fn word(s: &str) -> LassoWord {
    s.parse().unwrap()
}

/// Conjuncts of a right- or left-nested conjunction.
fn conjuncts(f: &Ltl, out: &mut BTreeSet<String>) {
    match f.kind() {
        rltl::formula::Kind::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        _ => {
            out.insert(f.to_string());
        }
    }
}

fn table_goldens(_: &mut Run) -> Outcome {
    let f = rl("G p => G q");
    ensure(f.length() == 5, || format!("length {} != 5", f.length()))?;
    let got = ltl_bit(2, &f).unwrap();
    let table = l("(F G p -> F G q) & ((G F p -> G F q) & (F p -> F q))");
    ensure(got == table, || format!("bit 2 is {got}"))?;
    let flattened = l("(G F p -> G F q) & (F G p -> F G q) & (F p -> F q)");
    let (mut a, mut b) = (BTreeSet::new(), BTreeSet::new());
    conjuncts(&got, &mut a);
    conjuncts(&flattened, &mut b);
    ensure(a == b, || format!("conjuncts {a:?} vs {b:?}"))?;
    ensure(got.length() == 15, || format!("bit 2 length {}", got.length()))?;
    let rows = ["p R q", "F p | F G q", "F p | G F q", "F p | F q"];
    for (j, row) in rows.iter().enumerate() {
        let bit = ltl_bit(j + 1, &rl("p R q")).unwrap();
        ensure(bit == l(row), || format!("release bit {} is {bit}", j + 1))?;
    }
    Ok("bit-2 cascade and release rows match".into())
}

fn algebra_axioms(_: &mut Run) -> Outcome {
    // oracle: values as monotone bit vectors, connectives computed bitwise or
    // by search over the lattice
    let bits = |v: TruthValue| v.bits();
    let and = |a: TruthValue, b: TruthValue| {
        TruthValue::ALL.into_iter().find(|c| (0..4).all(|i| bits(*c)[i] == (bits(a)[i] && bits(b)[i]))).unwrap()
    };
    let or = |a: TruthValue, b: TruthValue| {
        TruthValue::ALL.into_iter().find(|c| (0..4).all(|i| bits(*c)[i] == (bits(a)[i] || bits(b)[i]))).unwrap()
    };
    let le = |a: TruthValue, b: TruthValue| (0..4).all(|i| !bits(a)[i] || bits(b)[i]);
    let imp = |a: TruthValue, b: TruthValue| TruthValue::ALL.into_iter().rev().find(|&c| le(and(a, c), b)).unwrap();
    let mut triples = 0;
    for a in TruthValue::ALL {
        for b in TruthValue::ALL {
            ensure(a.meet(b) == and(a, b) && a.join(b) == or(a, b), || format!("meet/join {a} {b}"))?;
            ensure(a.leq(b) == le(a, b), || format!("leq {a} {b}"))?;
            ensure(a.residual_implies(b) == imp(a, b), || format!("implies {a} {b}"))?;
            for c in TruthValue::ALL {
                triples += 1;
                ensure(le(a.meet(b), c) == le(a, b.residual_implies(c)), || format!("residuation {a} {b} {c}"))?;
                ensure(a.meet(b.join(c)) == a.meet(b).join(a.meet(c)), || format!("distributivity {a} {b} {c}"))?;
            }
        }
        let expected_neg = if a == B1111 { B0000 } else { B1111 };
        ensure(a.negate() == expected_neg, || format!("negation of {a}"))?;
        ensure(a.join(a.negate()) == B1111, || format!("excluded middle at {a}"))?;
        let extremal = a == B0000 || a == B1111;
        ensure((a.meet(a.negate()) == B0000) == extremal, || format!("non-contradiction at {a}"))?;
    }
    Ok(format!("{triples} triples"))
}

fn canonical_words(_: &mut Run) -> Outcome {
    let f = rl("G p");
    let cases = [("| {p}", B1111), ("{} | {p}", B0111), ("| {} {p}", B0011), ("{p} | {}", B0001), ("| {}", B0000)];
    for (w, v) in cases {
        let got = eval_rltl(&f, &word(w));
        ensure(got == v, || format!("{w} gives {got}, expected {v}"))?;
    }
    Ok("five canonical values".into())
}

fn oracle_equivalence(_: &mut Run) -> Outcome {
    let mut r = rng(101);
    for _ in 0..1000 {
        let f: Rltl = formula(&mut r, 8, Shape::default());
        let w = lasso(&mut r, 5, 5);
        let v = eval_rltl(&f, &w);
        let got: Vec<bool> = (1..=4).map(|j| eval_ltl(&ltl_bit(j, &f).unwrap(), &w)).collect();
        ensure(got == v.bits(), || format!("{f} on {w}: {v} vs {got:?}"))?;
        ensure(got.windows(2).all(|p| p[0] <= p[1]), || format!("{f} on {w}: not monotone"))?;
    }
    Ok("1000 pairs, 0 mismatches".into())
}

fn rewrite_and_two_valued(_: &mut Run) -> Outcome {
    let mut r = rng(102);
    let mut two_valued = 0;
    for _ in 0..500 {
        let f: Rltl = formula(&mut r, 8, Shape::default());
        let w = lasso(&mut r, 4, 4);
        let g = f.rewrite_nonrobust_implications();
        ensure(eval_rltl(&f, &w) == eval_rltl(&g, &w), || format!("{f} vs {g} on {w}"))?;
        if f.is_weakening_free() {
            two_valued += 1;
            let v = eval_rltl(&f, &w);
            ensure(v == B0000 || v == B1111, || format!("{f} on {w}: {v}"))?;
        }
    }
    Ok(format!("500 rewrites, {two_valued} weakening-free samples"))
}

fn tester_sizes(_: &mut Run) -> Outcome {
    let (p, q) = (Ltl::atom("p"), Ltl::atom("q"));
    let until = tester_until(&tester_atom("p"), &tester_atom("q"));
    ensure(until.num_states() == 5 && until.justice().len() == 1, || {
        format!("pUq: {} states, {} justice", until.num_states(), until.justice().len())
    })?;
    let fg = tester_eventually_always(&tester_atom("p"));
    ensure(fg.num_states() <= 3 * tester_atom("p").num_states() && fg.justice().len() == 1, || {
        format!("FG p: {} states, {} justice", fg.num_states(), fg.justice().len())
    })?;
    let b3 = tester_release_bit3(&tester_atom("p"), &tester_atom("q"));
    let zero = b3.count_matching(&[(&p, false), (&q, false)]);
    ensure(zero == 3 && b3.num_states() <= 12, || {
        format!("bit-3 tester: {} states, {zero} at p=q=0", b3.num_states())
    })?;
    ensure(compose(&tester_atom("p"), &tester_atom("q")).num_states() == 4, || "p || q".into())?;
    let mut r = rng(103);
    let mut max_ratio = 0.0f64;
    for _ in 0..200 {
        let f = fragment_formula(&mut r, 10);
        let bound = size_bound(&f);
        for j in 1..=4 {
            let n = build_tester(&sequential_bit_formula(&f, j).unwrap()).num_states() as u128;
            ensure(n <= bound, || format!("{f} bit {j}: {n} > {bound}"))?;
            max_ratio = max_ratio.max(n as f64 / bound as f64);
        }
    }
    Ok(format!("200 fragment formulas within bound, max ratio {max_ratio:.3}"))
}

fn dual_construction(run: &mut Run) -> Outcome {
    let mut r = rng(104);
    let mut pairs = 0;
    while pairs < 2000 {
        let f = fragment_formula(&mut r, 7);
        for j in 1..=4 {
            let g = ltl_bit(j, &f).unwrap();
            let (t, tab) = (tester_to_gba(&build_tester(&g), true), tableau_gba(&g));
            for _ in 0..5 {
                let w = lasso(&mut r, 4, 4);
                ensure(accepts_lasso(&t, &w) == accepts_lasso(&tab, &w), || format!("{g} on {w}"))?;
                pairs += 1;
            }
        }
    }
    let tester = CheckOptions { method: Method::Tester, ..CheckOptions::default() };
    let tableau = CheckOptions { method: Method::Tableau, ..CheckOptions::default() };
    for _ in 0..100 {
        let k = kripke(&mut r, 5);
        let f = fragment_formula(&mut r, 7);
        let a = model_check_with(&k, &f, &tester).unwrap();
        let b = model_check_with(&k, &f, &tableau).unwrap();
        ensure(a.verdict == b.verdict, || format!("{f}: {} vs {}", a.verdict, b.verdict))?;
        run.record(&k, &a);
        run.record(&k, &b);
    }
    Ok(format!("{pairs} membership pairs, 100 models"))
}

fn model(labels: &[&[&str]], trans: &[(&str, &str)]) -> KripkeStructure {
    let names = ["s0", "s1"];
    let states: Vec<(&str, &[&str])> = labels.iter().enumerate().map(|(i, l)| (names[i], *l)).collect();
    KripkeStructure::new(&["p"], &states, &["s0"], trans).unwrap()
}

fn algorithm_behaviour(run: &mut Run) -> Outcome {
    let f = rl("G p");
    let cases = [
        (model(&[&["p"]], &[("s0", "s0")]), B1111, 4),
        (model(&[&[], &["p"]], &[("s0", "s1"), ("s1", "s1")]), B0111, 4),
        (model(&[&["p"], &[]], &[("s0", "s1"), ("s1", "s0")]), B0011, 3),
        (model(&[&["p"], &[]], &[("s0", "s1"), ("s1", "s1")]), B0001, 2),
        (model(&[&[]], &[("s0", "s0")]), B0000, 1),
    ];
    for (k, verdict, steps) in &cases {
        let rep = model_check(k, &f).map_err(|e| e.to_string())?;
        ensure(rep.verdict == *verdict && rep.steps == *steps, || {
            format!("expected {verdict}/{steps}, got {}/{}", rep.verdict, rep.steps)
        })?;
        for b in TruthValue::ALL {
            let t = check_threshold(k, &f, b).map_err(|e| e.to_string())?;
            ensure(t == b.leq(rep.verdict), || format!("threshold {b} on {verdict} model"))?;
        }
        run.record(k, &rep);
    }
    Ok("verdicts 1111/0111/0011/0001/0000, steps 4/4/3/2/1".into())
}

fn gr1_and_request_response(_: &mut Run) -> Outcome {
    let gf = rl("G F p");
    let mut r = rng(105);
    let mut seen = BTreeSet::new();
    for _ in 0..500 {
        let v = eval_rltl(&gf, &lasso(&mut r, 5, 5));
        ensure([B1111, B0001, B0000].contains(&v), || format!("G F p took {v}"))?;
        seen.insert(v);
    }
    let rr = rl("G (p => F q)");
    let class = rr.classify();
    ensure(class == FragmentClass::NoImplicationRestricted, || format!("classified {class}"))?;
    let s = |n: &'static str, l: &'static [&'static str]| (n, l);
    let models = [
        KripkeStructure::new(&["p", "q"], &[s("s0", &["p"]), s("s1", &["q"])], &["s0"], &[("s0", "s1"), ("s1", "s0")]),
        KripkeStructure::new(&["p", "q"], &[s("s0", &[]), s("s1", &["p"])], &["s0"], &[("s0", "s1"), ("s1", "s1")]),
    ];
    for k in models {
        let k = k.map_err(|e| e.to_string())?;
        let rep = model_check(&k, &rr).map_err(|e| e.to_string())?;
        ensure(rep.bits.iter().all(|b| b.path == PathUsed::Tester), || "tableau path used".into())?;
        // both models are deterministic, so their single computation is the oracle
        let only = k.path_word(&[0], &[1]);
        let expect = eval_rltl(&rr, &only);
        ensure(rep.verdict == expect, || format!("verdict {} vs path value {expect}", rep.verdict))?;
    }
    let seen: Vec<String> = seen.iter().map(|v| v.to_string()).collect();
    Ok(format!("G F p values {}, request-response checked by testers", seen.join("/")))
}

fn translation_bound(_: &mut Run) -> Outcome {
    let mut r = rng(106);
    let shape = Shape { depth: 6, ..Shape::default() };
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let f: Rltl = formula(&mut r, 20, shape);
        let size = translation_size(&f);
        ensure(size <= 12 * f.length(), || format!("{f}: {size} > 12*{}", f.length()))?;
        worst = worst.max(size as f64 / f.length() as f64);
    }
    Ok(format!("500 formulas, max ratio {worst:.2}"))
}

fn counterexamples(run: &mut Run) -> Outcome {
    ensure(!run.failures.is_empty(), || "no failing bits were collected".into())?;
    for fail in &run.failures {
        let c = &fail.witness;
        ensure(fail.model.is_path(&c.stem, &c.cycle), || format!("{} is not a path", c.word))?;
        ensure(fail.model.path_word(&c.stem, &c.cycle) == c.word, || format!("{} mislabeled", c.word))?;
        ensure(!eval_ltl(&fail.formula, &c.word), || format!("{} satisfies {}", c.word, fail.formula))?;
    }
    Ok(format!("{} witnesses replayed", run.failures.len()))
}

#[test]
fn acceptance() {
    let mut run = Run::default();
    let secs = Duration::from_secs;
    run.criterion(1, secs(1), table_goldens);
    run.criterion(2, secs(1), algebra_axioms);
    run.criterion(3, secs(1), canonical_words);
    run.criterion(4, secs(30), oracle_equivalence);
    run.criterion(5, secs(30), rewrite_and_two_valued);
    run.criterion(6, secs(120), tester_sizes);
    run.criterion(7, secs(300), dual_construction);
    run.criterion(8, secs(10), algorithm_behaviour);
    run.criterion(9, secs(30), gr1_and_request_response);
    run.criterion(10, secs(30), translation_bound);
    run.criterion(11, secs(30), counterexamples);
    assert!(run.red.is_empty(), "failing criteria: {:?}", run.red);
}
