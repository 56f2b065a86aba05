use std::collections::HashSet;

use crate::syntax::{alpha_eq, Formula, Substitution, Term, Var};

/// Equivalence-preserving cleanup: double negations, ⊤/⊥ folding,
/// duplicate and complementary conjuncts, vacuous quantifiers.
pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(..) | Formula::Equal(..) => f.clone(),
        Formula::Not(g) => negate(simplify(g)),
        Formula::And(..) => {
            let mut parts: Vec<Formula> = Vec::new();
            let mut keys: Vec<String> = Vec::new();
            for c in f.conjuncts() {
                let s = simplify(c);
                for d in s.conjuncts() {
                    match d {
                        Formula::Top => {}
                        Formula::Bottom => return Formula::Bottom,
                        d => {
                            if parts.iter().any(|p| complementary(p, d)) {
                                return Formula::Bottom;
                            }
                            let key = canonical_key(d);
                            if !keys.contains(&key) {
                                keys.push(key);
                                parts.push(d.clone());
                            }
                        }
                    }
                }
            }
            Formula::conj(parts)
        }
        Formula::Exists(v, g) => {
            let body = simplify(g);
            match body {
                Formula::Top | Formula::Bottom => body,
                b if !b.has_free(v) => b,
                b => Formula::exists(v.clone(), b),
            }
        }
    }
}

/// A string that is equal for formulas equal up to renaming of bound
/// variables and the order and grouping of conjuncts.
pub fn canonical_key(f: &Formula) -> String {
    fn canon(f: &Formula, depth: usize) -> Formula {
        match f {
            Formula::Top | Formula::Bottom | Formula::Atom(..) | Formula::Equal(..) => f.clone(),
            Formula::Not(g) => Formula::not(canon(g, depth)),
            Formula::And(..) => {
                let mut parts: Vec<(String, Formula)> = f
                    .conjuncts()
                    .into_iter()
                    .map(|c| {
                        let k = canon(c, depth);
                        (k.to_string(), k)
                    })
                    .collect();
                parts.sort_by(|a, b| a.0.cmp(&b.0));
                Formula::conj(parts.into_iter().map(|(_, k)| k))
            }
            Formula::Exists(v, g) => {
                let w = Var::new(format!("_B{depth}"));
                let body = Substitution::singleton(v.clone(), Term::Var(w.clone())).apply(g);
                Formula::exists(w, canon(&body, depth + 1))
            }
        }
    }
    canon(f, 0).to_string()
}

fn negate(f: Formula) -> Formula {
    match f {
        Formula::Top => Formula::Bottom,
        Formula::Bottom => Formula::Top,
        Formula::Not(g) => *g,
        g => Formula::not(g),
    }
}

fn complementary(a: &Formula, b: &Formula) -> bool {
    a.as_not().is_some_and(|x| alpha_eq(x, b)) || b.as_not().is_some_and(|x| alpha_eq(x, a))
}

/// Rewrites negated existentials as universals and orders negated
/// conjunctions so that they print as implications. Only double negations
/// are introduced, so the result is equivalent and keeps its shape as a
/// development.
pub fn present(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(..) | Formula::Equal(..) => f.clone(),
        Formula::And(a, b) => Formula::and(present(a), present(b)),
        Formula::Exists(v, g) => Formula::exists(v.clone(), present(g)),
        Formula::Not(_) if f.as_forall().is_some() => {
            let (v, body) = f.as_forall().expect("checked");
            Formula::forall(v.clone(), present(body))
        }
        Formula::Not(g) => match &**g {
            Formula::Exists(v, b) => {
                Formula::not(Formula::exists(v.clone(), Formula::not(present(&Formula::not((**b).clone())))))
            }
            Formula::And(a, b) if a.as_not().is_some() && b.as_not().is_none() => {
                Formula::not(Formula::and(present(b), present(a)))
            }
            _ => Formula::not(present(g)),
        },
    }
}

const NICE: [&str; 6] = ["X", "Y", "Z", "U", "V", "W"];

/// Renames bound variables to `X`, `Y`, `Z`, … choosing the first name not
/// in use in the enclosing scope.
pub fn tidy_variables(f: &Formula) -> Formula {
    let free: HashSet<Var> = f.free_variables().into_iter().collect();
    tidy(f, &free, &mut Vec::new())
}

fn candidate(i: usize) -> Var {
    if i < NICE.len() {
        Var::new(NICE[i])
    } else {
        Var::new(format!("{}{}", NICE[i % NICE.len()], i / NICE.len()))
    }
}

fn tidy(f: &Formula, free: &HashSet<Var>, scope: &mut Vec<Var>) -> Formula {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(..) | Formula::Equal(..) => f.clone(),
        Formula::Not(g) => Formula::not(tidy(g, free, scope)),
        Formula::And(a, b) => Formula::and(tidy(a, free, scope), tidy(b, free, scope)),
        Formula::Exists(v, g) => {
            let inner_free: HashSet<Var> = g.free_variables().into_iter().filter(|w| w != v).collect();
            let name = (0..)
                .map(candidate)
                .find(|c| !scope.contains(c) && !free.contains(c) && !inner_free.contains(c))
                .expect("unbounded name supply");
            let renamed = Substitution::singleton(v.clone(), Term::Var(name.clone())).apply(g);
            scope.push(name.clone());
            let body = tidy(&renamed, free, scope);
            scope.pop();
            Formula::exists(name, body)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Signature};

    fn p(s: &str) -> Formula {
        parse_formula(s, &mut Signature::new()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(simplify(&p("~~p(c)")), p("p(c)"));
        assert_eq!(simplify(&p("q(a) & true")), p("q(a)"));
        assert_eq!(simplify(&p("~(~p(a) & ~p(b))")), p("p(a) | p(b)"));
        assert_eq!(simplify(&p("q | false")), p("q"));
        assert_eq!(simplify(&p("q & q & r")), p("q & r"));
        let twice = p("(exists X. a(X) & b(X)) & exists Y. b(Y) & a(Y)");
        assert_eq!(simplify(&twice), p("exists X. a(X) & b(X)"));
        assert_eq!(simplify(&p("q & ~q")), Formula::Bottom);
        assert_eq!(simplify(&p("q | ~q")), Formula::Top);
        assert_eq!(simplify(&p("forall X. true")), Formula::Top);
        assert_eq!(simplify(&p("exists X. q")), p("q"));
    }

    #[test]
    fn presentation() {
        assert_eq!(present(&p("~exists X. p(X) & ~q(X)")).to_string(), "forall X. p(X) -> q(X)");
        assert_eq!(present(&p("~exists X Y. ~r(X, Y) & r(Y, X)")).to_string(), "forall X Y. r(Y, X) -> r(X, Y)");
        assert_eq!(present(&p("~exists X. p(X)")).to_string(), "forall X. ~p(X)");
        assert_eq!(present(&p("exists X. p(X)")).to_string(), "exists X. p(X)");
        let nested = p("~exists X. ~exists Y. ~r(X, Y) & ~exists Z. s(Z, Y)");
        assert_eq!(present(&nested).to_string(), "forall X. exists Y. ~r(X, Y) & forall Z. ~s(Z, Y)");
    }

    #[test]
    fn tidy_names() {
        let f = Formula::forall(Var::new("_7"), Formula::atom("p", vec![Term::var("_7")]));
        assert_eq!(tidy_variables(&f).to_string(), "forall X. p(X)");
        let g = p("(forall A. exists B. r(A, B)) & forall C. p(C)");
        assert_eq!(tidy_variables(&g).to_string(), "(forall X. exists Y. r(X, Y)) & forall X. p(X)");
    }
}
