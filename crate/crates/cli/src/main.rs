//! `rltl`: robust LTL model checking from the command line.
//!
//! Exit status is 0 when the property holds at the requested level, 1 when
//! it does not, and 2 on usage, parse or validation errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::builder::FalseyValueParser;
use clap::{Parser, Subcommand, ValueEnum};

use rltl::algebra::TruthValue;
use rltl::checker::{check_classical, check_threshold, model_check_with, sequential_bit_formula, CheckOptions, Method};
use rltl::kripke::{parse_kripke, KripkeStructure};
use rltl::lasso::{eval_ltl, eval_rltl, LassoWord};
use rltl::parser::{parse_ltl, parse_rltl};
use rltl::tester::{build_tester, size_bound};
use rltl::translate::{ltl_bit, translation_size};
use rltl::{Ltl, Rltl};

#[derive(Parser)]
#[command(name = "rltl", version, about = "Robust LTL model checking")]
struct Cli {
    /// Print per-bit formulas and automaton statistics.
    #[arg(short, long, global = true, env = "RLTL_VERBOSE", value_parser = FalseyValueParser::new())]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Tester,
    Tableau,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Tester => Method::Tester,
            MethodArg::Tableau => Method::Tableau,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Model check a formula against a Kripke structure.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        /// Only decide whether every computation reaches this value.
        #[arg(long)]
        threshold: Option<TruthValue>,
        /// Also write the machine-readable report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Check all four bits concurrently.
        #[arg(long)]
        parallel: bool,
        /// Treat the formula as plain LTL.
        #[arg(long, conflicts_with_all = ["threshold", "parallel"])]
        classical: bool,
        /// Print only `key: value` lines.
        #[arg(long)]
        machine: bool,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Print the LTL translations of a robust formula.
    Translate {
        #[arg(long)]
        formula: String,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        bit: Option<u8>,
    },
    /// Build the tester for one bit of a robust formula.
    Tester {
        #[arg(long)]
        formula: String,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        bit: u8,
        /// Write the tester in DOT format to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Evaluate a formula on an ultimately periodic word such as `{} | {p}`.
    Eval {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        word: String,
        /// Use the five-valued robust semantics.
        #[arg(long)]
        robust: bool,
    },
}

fn robust(text: &str) -> Result<Rltl> {
    parse_rltl(text).with_context(|| format!("cannot parse formula `{text}`"))
}

fn classical(text: &str) -> Result<Ltl> {
    parse_ltl(text).with_context(|| format!("cannot parse formula `{text}`"))
}

fn load_model(path: &PathBuf) -> Result<KripkeStructure> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_kripke(&text).with_context(|| format!("invalid model {}", path.display()))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Check { model, formula, threshold, report, parallel, classical: plain, machine, method } => {
            let k = load_model(&model)?;
            if plain {
                let f = classical(&formula)?;
                let r = check_classical(&k, &f, method.into())?;
                println!("holds: {}", r.holds);
                if let Some(c) = &r.counterexample {
                    println!("counterexample: {}", c.word);
                }
                if cli.verbose {
                    println!("path: {}\nspec states: {}\nproduct states: {}", r.path, r.spec_states, r.product_states);
                }
                return Ok(r.holds);
            }
            let f = robust(&formula)?;
            if let Some(b) = threshold {
                let met = check_threshold(&k, &f, b)?;
                println!("threshold {b}: {}", if met { "met" } else { "not met" });
                return Ok(met);
            }
            let opts = CheckOptions { method: method.into(), parallel, baseline: None };
            let r = model_check_with(&k, &f, &opts)?;
            if machine {
                print!("{}", r.machine());
            } else {
                print!("{r}");
            }
            if cli.verbose {
                for b in &r.bits {
                    println!("bit {} formula: {}", b.bit, b.formula);
                }
            }
            if let Some(path) = report {
                fs::write(&path, r.machine()).with_context(|| format!("cannot write {}", path.display()))?;
            }
            Ok(r.verdict == TruthValue::TOP)
        }
        Command::Translate { formula, bit } => {
            let f = robust(&formula)?;
            let bits = match bit {
                Some(j) => vec![j as usize],
                None => (1..=4).collect(),
            };
            for j in bits {
                println!("bit{j}: {}", ltl_bit(j, &f)?);
            }
            println!("length: {}\nkappa: {}\ntranslation_size: {}", f.length(), f.kappa(), translation_size(&f));
            Ok(true)
        }
        Command::Tester { formula, bit, dot } => {
            let f = robust(&formula)?;
            let g = sequential_bit_formula(&f, bit as usize)?;
            let t = build_tester(&g);
            let s = t.stats();
            println!("formula: {g}");
            println!(
                "states: {}\ninitial: {}\ntransitions: {}\njustice: {}\nvariables: {}",
                s.states, s.initial, s.transitions, s.justice_sets, s.variables
            );
            let fragment = f.desugar_weak_until().rewrite_nonrobust_implications().classify();
            if fragment.in_fragment() {
                println!("bound: {}", size_bound(&f));
            } else {
                println!("bound: none ({fragment})");
            }
            if let Some(path) = dot {
                fs::write(&path, t.to_dot()).with_context(|| format!("cannot write {}", path.display()))?;
            }
            Ok(true)
        }
        Command::Eval { formula, word, robust: five } => {
            let w: LassoWord = word.parse().with_context(|| format!("cannot parse word `{word}`"))?;
            if five {
                let f = robust(&formula)?;
                println!("{}", eval_rltl(&f, &w));
            } else {
                let f = classical(&formula)?;
                println!("{}", eval_ltl(&f, &w));
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
