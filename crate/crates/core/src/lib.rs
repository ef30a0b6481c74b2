//! Real recursive functions: terms over the constants 0, 1, -1 closed under
//! juxtaposition, composition, ODE-defined recursion and minimization, with a
//! domain-tracking numerical evaluator.

pub mod dalg;
pub mod eval;
pub mod iterate;
pub mod parser;
pub mod quad;
pub mod stdlib;
pub mod term;

pub use eval::{eval, eval_grid, EvalOutcome, Evaluator, MnCombine, MnDomain, SemanticsConfig, SolverTolerances, UndefReason};
pub use parser::{parse, print, ParseError};
pub use term::{Arity, PrVariant, Term, TermError};
