//! Robust linear temporal logic: a five-valued extension of LTL, with a
//! model checker built on temporal testers and generalized Büchi automata.
//!
//! The usual entry points are [`parser::parse_rltl`] to read a formula,
//! [`kripke::parse_kripke`] to read a model and [`checker::model_check`] to
//! compute the robust value of the formula on the model.

pub mod algebra;
pub mod automata;
pub mod checker;
pub mod formula;
pub mod kripke;
pub mod lasso;
pub mod parser;
pub mod tester;
pub mod translate;

pub use algebra::TruthValue;
pub use formula::{FragmentClass, Ltl, Rltl};
pub use lasso::LassoWord;
