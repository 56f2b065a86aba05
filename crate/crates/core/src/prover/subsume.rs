//! Sets of literals compared by θ-subsumption.

use std::collections::BTreeMap;

use crate::syntax::{match_term, Formula, Term, Var};

fn match_literal(p: &Formula, t: &Formula, theta: &mut BTreeMap<Var, Term>) -> bool {
    match (p, t) {
        (Formula::Not(x), Formula::Not(y)) => match_literal(x, y, theta),
        (Formula::Atom(f, xs), Formula::Atom(g, ys)) if f == g && xs.len() == ys.len() => {
            xs.iter().zip(ys).all(|(x, y)| match_term(x, y, theta))
        }
        _ => false,
    }
}

fn match_all(a: &[Formula], b: &[Formula], theta: &BTreeMap<Var, Term>) -> bool {
    let Some((first, rest)) = a.split_first() else {
        return true;
    };
    b.iter().any(|l| {
        let mut t = theta.clone();
        match_literal(first, l, &mut t) && match_all(rest, b, &t)
    })
}

/// θ-subsumption: `aθ ⊆ b` for some θ, the variables of `b` held fixed.
pub fn set_subsumes(a: &[Formula], b: &[Formula]) -> bool {
    match_all(a, b, &BTreeMap::new())
}

/// Contains a literal and its complement.
pub fn is_tautological(set: &[Formula]) -> bool {
    set.iter().any(|l| l.as_not().is_some_and(|x| set.contains(x)))
}

/// Drops duplicates within each set, tautological sets, and sets subsumed
/// by another; among mutually subsuming sets the first one stays.
pub fn most_general_sets(sets: Vec<Vec<Formula>>) -> Vec<Vec<Formula>> {
    let mut keep: Vec<Vec<Formula>> = Vec::new();
    for mut s in sets {
        let mut seen = Vec::new();
        s.retain(|l| {
            let fresh = !seen.contains(l);
            seen.push(l.clone());
            fresh
        });
        if is_tautological(&s) || keep.iter().any(|k| set_subsumes(k, &s)) {
            continue;
        }
        keep.retain(|k| !set_subsumes(&s, k));
        keep.push(s);
    }
    keep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Signature};

    fn p(s: &str) -> Formula {
        parse_formula(s, &mut Signature::new()).unwrap()
    }

    #[test]
    fn subsumption_and_tautologies() {
        let general = vec![p("~p(Y)")];
        let specific = vec![p("~p(a)"), p("q(b)")];
        assert!(set_subsumes(&general, &specific));
        assert!(!set_subsumes(&specific, &general));
        assert!(set_subsumes(&[], &general));
        assert!(!set_subsumes(&[p("r(Y, Y)")], &[p("r(a, b)")]));
        let kept = most_general_sets(vec![specific.clone(), general.clone(), vec![p("p(Z)"), p("~p(Z)")]]);
        assert_eq!(kept, vec![general]);
    }
}
