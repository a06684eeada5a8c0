mod common;

use common::{formula, fragment_formula, kripke, kripke_path, rng, Shape};
use rltl::algebra::TruthValue;
use rltl::automata::accepts_lasso;
use rltl::checker::{check_threshold, model_check, model_check_with, CheckOptions, CheckReport, Method};
use rltl::kripke::{kripke_to_gba, KripkeStructure};
use rltl::lasso::{eval_ltl, eval_rltl};
use rltl::Rltl;

/// Every failing bit carries a lasso that is a path of `k` and violates the
/// bit's formula; the path's robust value is exactly the verdict.
fn assert_counterexamples(k: &KripkeStructure, f: &Rltl, report: &CheckReport) {
    for b in report.bits.iter().filter(|b| !b.holds) {
        let c = b.counterexample.as_ref().expect("failing bit has a witness");
        assert!(k.is_path(&c.stem, &c.cycle), "{f}: {:?} {:?}", c.stem, c.cycle);
        assert_eq!(k.path_word(&c.stem, &c.cycle), c.word);
        assert!(!eval_ltl(&b.formula, &c.word), "{f} bit {}: {}", b.bit, c.word);
    }
    if let Some(b) = report.failing() {
        let c = b.counterexample.as_ref().unwrap();
        assert_eq!(eval_rltl(f, &c.word), report.verdict, "{f} on {}", c.word);
    }
}

#[test]
fn verdict_is_the_meet_over_computations() {
    let mut r = rng(31);
    for _ in 0..150 {
        let k = kripke(&mut r, 4);
        let f: Rltl = formula(&mut r, 7, Shape::default());
        let report = model_check(&k, &f).unwrap();
        let level = report.verdict.level();
        assert_eq!(report.steps, (level + 1).min(4));
        for _ in 0..20 {
            let (stem, cycle) = kripke_path(&mut r, &k);
            let v = eval_rltl(&f, &k.path_word(&stem, &cycle));
            assert!(report.verdict.leq(v), "{f}: verdict {} but path value {v}", report.verdict);
        }
        assert_counterexamples(&k, &f, &report);
    }
}

#[test]
fn tester_and_tableau_paths_agree() {
    let mut r = rng(32);
    let tester = CheckOptions { method: Method::Tester, ..CheckOptions::default() };
    let tableau = CheckOptions { method: Method::Tableau, ..CheckOptions::default() };
    for _ in 0..100 {
        let k = kripke(&mut r, 5);
        let f = fragment_formula(&mut r, 7);
        let a = model_check_with(&k, &f, &tester).unwrap();
        let b = model_check_with(&k, &f, &tableau).unwrap();
        assert_eq!(a.verdict, b.verdict, "{f}");
        let bits = |rep: &CheckReport| rep.bits.iter().map(|b| (b.bit, b.holds)).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b), "{f}");
        assert_counterexamples(&k, &f, &a);
        assert_counterexamples(&k, &f, &b);
    }
}

#[test]
fn parallel_mode_matches_sequential() {
    let mut r = rng(33);
    let parallel = CheckOptions { parallel: true, ..CheckOptions::default() };
    for _ in 0..60 {
        let k = kripke(&mut r, 4);
        let f = fragment_formula(&mut r, 7);
        let seq = model_check(&k, &f).unwrap();
        let par = model_check_with(&k, &f, &parallel).unwrap();
        assert_eq!(seq.verdict, par.verdict, "{f}");
        assert_eq!(par.steps, 4);
        let holds: Vec<bool> = (1..=4).map(|j| par.bits.iter().any(|b| b.bit == j && b.holds)).collect();
        assert!(holds.windows(2).all(|p| p[0] <= p[1]), "{f}: {holds:?}");
    }
}

#[test]
fn thresholds_follow_the_order() {
    let mut r = rng(34);
    for _ in 0..60 {
        let k = kripke(&mut r, 4);
        let f: Rltl = formula(&mut r, 6, Shape::default());
        let verdict = model_check(&k, &f).unwrap().verdict;
        for b in TruthValue::ALL {
            assert_eq!(check_threshold(&k, &f, b).unwrap(), b.leq(verdict), "{f} at {b}");
        }
    }
}

#[test]
fn model_automaton_reads_exactly_the_paths() {
    let mut r = rng(35);
    for _ in 0..100 {
        let k = kripke(&mut r, 5);
        let g = kripke_to_gba(&k);
        assert!(g.num_states() <= k.num_states() + 1);
        for _ in 0..10 {
            let (stem, cycle) = kripke_path(&mut r, &k);
            assert!(k.is_path(&stem, &cycle));
            assert!(accepts_lasso(&g, &k.path_word(&stem, &cycle)));
        }
        let w = g.find_witness().expect("models have infinite paths");
        assert!(k.is_path(&w.stem_states, &w.cycle_states));
        assert_eq!(k.path_word(&w.stem_states, &w.cycle_states), w.word);
    }
}
