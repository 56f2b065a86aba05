use crate::error::QaError;
use crate::prover::{Nnf, SkolemizedTheory};

/// Largest number of positive literals in a clause of the CNF of `n`.
fn max_positive(n: &Nnf) -> usize {
    match n {
        Nnf::Top | Nnf::Bottom => 0,
        Nnf::Lit(positive, _) => usize::from(*positive),
        Nnf::And(xs) => xs.iter().map(max_positive).max().unwrap_or(0),
        Nnf::Or(xs) => xs.iter().map(max_positive).sum(),
        Nnf::Forall(_, b) | Nnf::Exists(_, b) => max_positive(b),
    }
}

/// Every clause of the Skolemized theory has at most one positive literal.
pub fn check_horn(theory: &SkolemizedTheory) -> Result<(), QaError> {
    match theory.formulas.iter().find(|f| max_positive(f) > 1) {
        Some(f) => Err(QaError::NotHorn(f.to_formula().to_string())),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::skolemize;
    use crate::syntax::{parse_formula, Signature};

    fn horn(s: &str) -> bool {
        let f = parse_formula(s, &mut Signature::new()).unwrap();
        check_horn(&skolemize(&[f])).is_ok()
    }

    #[test]
    fn clause_shapes() {
        assert!(horn("p(a)"));
        assert!(horn("forall X. (p(X) & q(X) -> r(X))"));
        assert!(horn("forall X. (p(X) | q(X) -> r(X))"));
        assert!(horn("~p(a) | ~q(a)"));
        assert!(horn("forall X. (p(X) -> exists Y. e(X, Y))"));
        assert!(!horn("p(a) | q(a)"));
        assert!(!horn("forall X. (p(X) -> q(X) | r(X))"));
    }
}
