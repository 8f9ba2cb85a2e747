//! Terms, atoms and formulas over `<`, `1`, rational scalings and
//! infinitesimal constants; piecewise cost functions; instances; and the
//! s-expression surface syntax.

mod ast;
mod parser;
mod printer;
mod sexpr;

pub use ast::{
    Atom, FiniteCostTable, FiniteInstance, FoFormula, Language, Piece, PlhCostFunction, QfFormula,
    Rel, RelationDef, RelationSet, Summand, Term, Threshold, Var, VcspInstance,
};
pub use parser::{
    parse, parse_finite_instance, parse_fo_formula, parse_instance, parse_language,
    parse_laurent, parse_relations, Parsed, SourceKind,
};
pub use printer::{print_finite_instance, print_instance, print_language, print_relations};
