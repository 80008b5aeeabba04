//! The two-valued logic with threshold modalities `λ_q` and the quantitative
//! logic with Sugeno modalities `⟨λ⟩` and constant shifts.

pub mod arena;
pub mod eval;
pub mod parse;
pub mod print;
pub mod serialize;

pub use arena::{negate_q, relax, Arena, Formula, Formula2, FormulaQ, Metrics, MissingDual, Node2, NodeId, NodeQ};
pub use eval::{eval2, eval2_with, eval_q, eval_q_with, LazyEval2, LazyEvalQ};
pub use parse::{parse_formula, parse_formula2, parse_formula_q, AnyFormula, LogicKind, ParseError};
pub use print::{print_formula2, print_formula_q};
pub use serialize::{dag_of_formula2, dag_of_formula_q, formula2_of_dag, formula_q_of_dag, Dag, DagError};
