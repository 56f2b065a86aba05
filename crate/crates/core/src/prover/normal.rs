use std::fmt;

use crate::syntax::{Formula, Name, Substitution, Term, Var};

/// Prefix of generated Skolem function symbols.
pub const SKOLEM_PREFIX: &str = "$sk";

pub fn is_skolem_symbol(name: &str) -> bool {
    name.starts_with(SKOLEM_PREFIX)
}

/// Negation normal form: negation only in front of atoms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Nnf {
    Top,
    Bottom,
    /// `(positive, atom)`; the atom is an `Atom` or `Equal`.
    Lit(bool, Formula),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
    Forall(Var, Box<Nnf>),
    Exists(Var, Box<Nnf>),
}

impl Nnf {
    fn and(items: Vec<Nnf>) -> Nnf {
        let mut out = Vec::new();
        for i in items {
            match i {
                Nnf::Top => {}
                Nnf::Bottom => return Nnf::Bottom,
                Nnf::And(xs) => out.extend(xs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Nnf::Top,
            1 => out.pop().expect("one element"),
            _ => Nnf::And(out),
        }
    }

    fn or(items: Vec<Nnf>) -> Nnf {
        let mut out = Vec::new();
        for i in items {
            match i {
                Nnf::Bottom => {}
                Nnf::Top => return Nnf::Top,
                Nnf::Or(xs) => out.extend(xs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Nnf::Bottom,
            1 => out.pop().expect("one element"),
            _ => Nnf::Or(out),
        }
    }

    /// Back to the core connectives (∨ and ∀ as their encodings).
    pub fn to_formula(&self) -> Formula {
        match self {
            Nnf::Top => Formula::Top,
            Nnf::Bottom => Formula::Bottom,
            Nnf::Lit(true, a) => a.clone(),
            Nnf::Lit(false, a) => Formula::not(a.clone()),
            Nnf::And(xs) => Formula::conj(xs.iter().map(Nnf::to_formula)),
            Nnf::Or(xs) => Formula::disj(xs.iter().map(Nnf::to_formula)),
            Nnf::Forall(v, b) => Formula::forall(v.clone(), b.to_formula()),
            Nnf::Exists(v, b) => Formula::exists(v.clone(), b.to_formula()),
        }
    }

    pub fn has_exists(&self) -> bool {
        match self {
            Nnf::Exists(..) => true,
            Nnf::And(xs) | Nnf::Or(xs) => xs.iter().any(Nnf::has_exists),
            Nnf::Forall(_, b) => b.has_exists(),
            _ => false,
        }
    }

    fn map_lits(&self, f: &mut impl FnMut(&Formula) -> Formula) -> Nnf {
        match self {
            Nnf::Lit(p, a) => Nnf::Lit(*p, f(a)),
            Nnf::And(xs) => Nnf::And(xs.iter().map(|x| x.map_lits(f)).collect()),
            Nnf::Or(xs) => Nnf::Or(xs.iter().map(|x| x.map_lits(f)).collect()),
            Nnf::Forall(v, b) => Nnf::Forall(v.clone(), Box::new(b.map_lits(f))),
            Nnf::Exists(v, b) => Nnf::Exists(v.clone(), Box::new(b.map_lits(f))),
            other => other.clone(),
        }
    }
}

impl fmt::Debug for Nnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// Pushes negations inward; `positive` is the polarity of `f`.
pub fn nnf(f: &Formula) -> Nnf {
    to_nnf(f, true)
}

fn to_nnf(f: &Formula, positive: bool) -> Nnf {
    match f {
        Formula::Top => {
            if positive {
                Nnf::Top
            } else {
                Nnf::Bottom
            }
        }
        Formula::Bottom => {
            if positive {
                Nnf::Bottom
            } else {
                Nnf::Top
            }
        }
        Formula::Atom(..) | Formula::Equal(..) => Nnf::Lit(positive, f.clone()),
        Formula::Not(g) => to_nnf(g, !positive),
        Formula::And(a, b) => {
            let items = vec![to_nnf(a, positive), to_nnf(b, positive)];
            if positive {
                Nnf::and(items)
            } else {
                Nnf::or(items)
            }
        }
        Formula::Exists(v, g) => {
            let body = to_nnf(g, positive);
            if matches!(body, Nnf::Top | Nnf::Bottom) {
                return body;
            }
            if positive {
                Nnf::Exists(v.clone(), Box::new(body))
            } else {
                Nnf::Forall(v.clone(), Box::new(body))
            }
        }
    }
}

/// Issues fresh Skolem symbols `$sk0`, `$sk1`, ….
#[derive(Clone, Debug, Default)]
pub struct SkolemNamer {
    next: usize,
}

impl SkolemNamer {
    pub fn fresh(&mut self) -> Name {
        let n = format!("{SKOLEM_PREFIX}{}", self.next);
        self.next += 1;
        n.into()
    }
}

/// A theory with every positive existential replaced by a Skolem term.
#[derive(Clone, Debug, Default)]
pub struct SkolemizedTheory {
    pub formulas: Vec<Nnf>,
    /// Generated symbols with their arities; all non-rigid.
    pub skolem_symbols: Vec<(Name, usize)>,
}

impl SkolemizedTheory {
    pub fn to_formulas(&self) -> Vec<Formula> {
        self.formulas.iter().map(Nnf::to_formula).collect()
    }
}

/// Skolemizes `formulas` with a fresh namer.
pub fn skolemize(formulas: &[Formula]) -> SkolemizedTheory {
    let mut namer = SkolemNamer::default();
    skolemize_with(formulas, &mut namer)
}

/// NNF followed by Skolemization. Skolem arguments are the universally
/// quantified (and free) variables in scope, in order.
pub fn skolemize_with(formulas: &[Formula], namer: &mut SkolemNamer) -> SkolemizedTheory {
    let mut out = SkolemizedTheory::default();
    for f in formulas {
        let scope: Vec<Var> = f.free_variables();
        let g = skolem_rec(&nnf(f), &mut scope.clone(), namer, &mut out.skolem_symbols);
        out.formulas.push(g);
    }
    out
}

fn skolem_rec(f: &Nnf, scope: &mut Vec<Var>, namer: &mut SkolemNamer, symbols: &mut Vec<(Name, usize)>) -> Nnf {
    match f {
        Nnf::And(xs) => Nnf::and(xs.iter().map(|x| skolem_rec(x, scope, namer, symbols)).collect()),
        Nnf::Or(xs) => Nnf::or(xs.iter().map(|x| skolem_rec(x, scope, namer, symbols)).collect()),
        Nnf::Forall(v, b) => {
            scope.push(v.clone());
            let body = skolem_rec(b, scope, namer, symbols);
            scope.pop();
            Nnf::Forall(v.clone(), Box::new(body))
        }
        Nnf::Exists(v, b) => {
            let name = namer.fresh();
            symbols.push((name.clone(), scope.len()));
            let term = Term::App(name, scope.iter().cloned().map(Term::Var).collect());
            let sigma = Substitution::singleton(v.clone(), term);
            let body = b.map_lits(&mut |a| sigma.apply(a));
            skolem_rec(&body, scope, namer, symbols)
        }
        other => other.clone(),
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
    fn nnf_pushes_negation() {
        let n = nnf(&p("~(a & ~exists X. q(X))"));
        assert_eq!(n.to_formula().to_string(), "~a | exists X. q(X)");
        assert_eq!(nnf(&p("~~true")), Nnf::Top);
    }

    #[test]
    fn skolem_constant() {
        let t = skolemize(&[p("exists X. p(X)")]);
        assert_eq!(t.formulas[0].to_formula().to_string(), "p($sk0)");
        assert_eq!(t.skolem_symbols, vec![("$sk0".into(), 0)]);
    }

    #[test]
    fn unchanged_without_existentials() {
        let t = skolemize(&[p("p(a)")]);
        assert_eq!(t.formulas[0].to_formula(), p("p(a)"));
        assert!(t.skolem_symbols.is_empty());
    }

    #[test]
    fn skolem_function_depends_on_universals() {
        let t = skolemize(&[p("forall Y. exists X. r(Y, X)")]);
        assert_eq!(t.formulas[0].to_formula().to_string(), "forall Y. r(Y, $sk0(Y))");
        assert_eq!(t.skolem_symbols, vec![("$sk0".into(), 1)]);
    }

    #[test]
    fn negative_universal_becomes_skolem() {
        let t = skolemize(&[p("~forall X. p(X)")]);
        assert_eq!(t.formulas[0].to_formula().to_string(), "~p($sk0)");
        assert!(!t.formulas[0].has_exists());
    }
}
