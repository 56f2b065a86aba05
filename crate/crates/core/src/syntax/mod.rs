//! Terms, formulas, questions, substitutions and the surface syntax.

mod formula;
mod parser;
mod printer;
mod signature;
mod subst;
mod term;

pub use formula::{alpha_eq, Formula, Question};
pub use parser::{
    parse, parse_formula, parse_question, parse_with, tokenize, FormulaParser, ParseOptions, Parsed, Token, TokenKind,
};
pub use printer::print;
pub use signature::{is_reserved_symbol, FunctionInfo, Rigidity, Signature, EXISTENCE_PREDICATE};
pub use subst::{match_term, mgu, mgu_atoms, Substitution};
pub use term::{Name, Term, Var};

/// Free variables of `f` in order of first occurrence.
pub fn free_variables(f: &Formula) -> Vec<Var> {
    f.free_variables()
}

/// Capture-avoiding substitution.
pub fn apply_substitution(f: &Formula, sigma: &Substitution) -> Formula {
    sigma.apply(f)
}
