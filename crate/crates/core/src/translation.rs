//! Reduction of question entailment to classical first-order entailment.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{OracleError, TranslationError};
use crate::oracle::{ModalModel, Structure, Vocabulary};
use crate::syntax::{Formula, Name, Question, Rigidity, Signature, Term, EXISTENCE_PREDICATE};

/// The primed copy of a symbol. Primed names are terminal: priming them again
/// is the identity.
pub fn primed(name: &str) -> Name {
    if name.ends_with('\'') {
        name.into()
    } else {
        format!("{name}'").into()
    }
}

fn star_term(t: &Term, sig: &Signature) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, args) => {
            let name = if sig.is_rigid(f) { f.clone() } else { primed(f) };
            Term::App(name, args.iter().map(|a| star_term(a, sig)).collect())
        }
    }
}

/// Primes every predicate and every non-rigid function symbol.
pub fn star(f: &Formula, sig: &Signature) -> Formula {
    match f {
        Formula::Top | Formula::Bottom => f.clone(),
        Formula::Atom(p, args) => Formula::Atom(primed(p), args.iter().map(|t| star_term(t, sig)).collect()),
        Formula::Equal(s, t) => Formula::Equal(star_term(s, sig), star_term(t, sig)),
        Formula::Not(g) => Formula::not(star(g, sig)),
        Formula::And(a, b) => Formula::and(star(a, sig), star(b, sig)),
        Formula::Exists(v, g) => Formula::exists(v.clone(), star(g, sig)),
    }
}

/// `?φ#  =  ∀x̄ (φ ↔ φ*)`.
pub fn hash(q: &Question, sig: &Signature) -> Formula {
    let body = q.body();
    Formula::forall_many(q.free_vars(), Formula::iff(body.clone(), star(body, sig)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequent {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

impl Sequent {
    /// Drops ⊤ premises.
    pub fn without_trivial(&self) -> Sequent {
        Sequent {
            premises: self.premises.iter().filter(|p| **p != Formula::Top).cloned().collect(),
            conclusion: self.conclusion.clone(),
        }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.premises {
            writeln!(f, "  {p}")?;
        }
        write!(f, "  |= {}", self.conclusion)
    }
}

/// `?Φ ⊨_χ ?ψ` becomes `?Φ#, χ, χ* ⊨ ?ψ#`.
pub fn reduce_entailment(questions: &[Question], context: &Formula, target: &Question, sig: &Signature) -> Sequent {
    let mut premises: Vec<Formula> = questions.iter().map(|q| hash(q, sig)).collect();
    premises.push(context.clone());
    premises.push(star(context, sig));
    Sequent { premises, conclusion: hash(target, sig) }
}

fn check_existence_free(f: &Formula) -> Result<(), TranslationError> {
    if f.predicates().iter().any(|(p, _)| &**p == EXISTENCE_PREDICATE) {
        return Err(TranslationError::ExistenceCollision(EXISTENCE_PREDICATE.into()));
    }
    Ok(())
}

fn relativize_rec(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(..) | Formula::Equal(..) => f.clone(),
        Formula::Not(g) => Formula::not(relativize_rec(g)),
        Formula::And(a, b) => Formula::and(relativize_rec(a), relativize_rec(b)),
        Formula::Exists(v, g) => Formula::exists(
            v.clone(),
            Formula::and(Formula::atom(EXISTENCE_PREDICATE, vec![Term::Var(v.clone())]), relativize_rec(g)),
        ),
    }
}

/// Replaces every `∃x φ` by `∃x (e(x) ∧ φ)`.
pub fn relativize(f: &Formula) -> Result<Formula, TranslationError> {
    check_existence_free(f)?;
    Ok(relativize_rec(f))
}

/// Relativizes the body and guards each free variable: `?(e(x1) ∧ … ∧ e(xn) ∧ φ)`.
pub fn relativize_question(q: &Question) -> Result<Question, TranslationError> {
    let body = relativize(q.body())?;
    let guards = q.free_vars().iter().map(|v| Formula::atom(EXISTENCE_PREDICATE, vec![Term::Var(v.clone())]));
    Ok(Question::new(Formula::conj(guards.chain([body]))))
}

// --- models across the reduction --------------------------------------------

/// The vocabulary of a sequent over `base`: every symbol plus the primed copy
/// of every predicate and non-rigid function.
pub fn primed_vocabulary(base: &Vocabulary) -> Vocabulary {
    let mut predicates = base.predicates.clone();
    predicates.extend(base.predicates.iter().map(|(p, a)| (primed(p), *a)));
    let mut functions = base.functions.clone();
    functions.extend(
        base.functions
            .iter()
            .filter(|(_, _, r)| *r == Rigidity::NonRigid)
            .map(|(f, a, _)| (primed(f), *a, Rigidity::NonRigid)),
    );
    Vocabulary { predicates, functions }
}

/// Collapses worlds `w` and `v` into one classical model: `w` interprets the
/// plain symbols, `v` the primed ones.
pub fn two_world_to_classical(m: &ModalModel, w: usize, v: usize) -> Result<ModalModel, OracleError> {
    let base = m.vocabulary();
    let sw = m.world(w).ok_or(OracleError::NoSuchWorld(w))?;
    let sv = m.world(v).ok_or(OracleError::NoSuchWorld(v))?;
    let vocab = primed_vocabulary(base);
    let mut relations = sw.relations.clone();
    relations.extend(sv.relations.iter().cloned());
    let mut functions = sw.functions.clone();
    for (i, (_, _, r)) in base.functions.iter().enumerate() {
        if *r == Rigidity::NonRigid {
            functions.push(sv.functions[i].clone());
        }
    }
    ModalModel::new(Arc::new(vocab), m.domain_size(), vec![Structure { relations, functions }])
}

/// Splits a classical model into two worlds over `base`: plain symbols give
/// world 0, primed ones world 1. Symbols the classical model does not
/// interpret get the constant-false / constant-0 interpretation.
pub fn classical_to_two_world(m: &ModalModel, base: &Vocabulary) -> Result<ModalModel, OracleError> {
    let d = m.domain_size();
    let s = m.world(0).ok_or(OracleError::NoSuchWorld(0))?;
    let cv = m.vocabulary();
    let mut w = Structure::empty(base, d);
    let mut v = Structure::empty(base, d);
    for (i, (p, a)) in base.predicates.iter().enumerate() {
        if let Some(j) = cv.predicate_index(p, *a) {
            w.relations[i] = s.relations[j].clone();
        }
        if let Some(j) = cv.predicate_index(&primed(p), *a) {
            v.relations[i] = s.relations[j].clone();
        }
    }
    for (i, (f, a, r)) in base.functions.iter().enumerate() {
        if let Some(j) = cv.function_index(f, *a) {
            w.functions[i] = s.functions[j].clone();
        }
        let source = if *r == Rigidity::Rigid { cv.function_index(f, *a) } else { cv.function_index(&primed(f), *a) };
        if let Some(j) = source {
            v.functions[i] = s.functions[j].clone();
        }
    }
    ModalModel::new(Arc::new(base.clone()), d, vec![w, v])
}

/// Every symbol name `star` may produce from `f`.
pub fn starred_symbols(f: &Formula, sig: &Signature) -> HashSet<Name> {
    let g = star(f, sig);
    let mut out: HashSet<Name> = g.predicates().into_iter().map(|(p, _)| p).collect();
    out.extend(g.functions().into_iter().map(|(h, _)| h));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_question, Var};

    fn rigid(sig: &mut Signature, names: &[&str]) {
        for n in names {
            sig.declare_function(n, 0, Rigidity::Rigid).unwrap();
        }
    }

    #[test]
    fn star_examples() {
        let mut sig = Signature::new();
        rigid(&mut sig, &["c"]);
        sig.declare_function("f", 1, Rigidity::Rigid).unwrap();
        let p = parse_formula("p(X)", &mut sig).unwrap();
        assert_eq!(star(&p, &sig), Formula::atom("p'", vec![Term::var("X")]));
        let e = parse_formula("X = f(c)", &mut sig).unwrap();
        assert_eq!(star(&e, &sig), e);
        let pd = parse_formula("p(d)", &mut sig).unwrap();
        assert_eq!(star(&pd, &sig), Formula::atom("p'", vec![Term::constant("d'")]));
    }

    #[test]
    fn primes_are_terminal() {
        let mut sig = Signature::new();
        let f = parse_formula("forall X. (p(X) -> q(g(X), d))", &mut sig).unwrap();
        let once = star(&f, &sig);
        assert_eq!(star(&once, &sig), once);
    }

    #[test]
    fn hash_examples() {
        let mut sig = Signature::new();
        rigid(&mut sig, &["a"]);
        let q = parse_question("? p(X)", &mut sig).unwrap();
        let expected = Formula::forall(
            Var::new("X"),
            Formula::iff(Formula::atom("p", vec![Term::var("X")]), Formula::atom("p'", vec![Term::var("X")])),
        );
        assert_eq!(hash(&q, &sig), expected);
        let top = parse_question("? true", &mut sig).unwrap();
        assert_eq!(hash(&top, &sig), Formula::iff(Formula::Top, Formula::Top));
        let pa = parse_question("? p(a)", &mut sig).unwrap();
        assert_eq!(hash(&pa, &sig).to_string(), "p(a) <-> p'(a)");
    }

    #[test]
    fn reduction_shape() {
        let mut sig = Signature::new();
        rigid(&mut sig, &["a"]);
        let px = parse_question("? p(X)", &mut sig).unwrap();
        let qa = parse_question("? q(a)", &mut sig).unwrap();
        let chi = parse_formula("forall X. (p(X) <-> q(X))", &mut sig).unwrap();
        let s = reduce_entailment(&[px.clone()], &chi, &qa, &sig);
        assert_eq!(s.premises.len(), 3);
        assert_eq!(s.premises[2].to_string(), "forall X. p'(X) <-> q'(X)");
        assert_eq!(s.conclusion.to_string(), "q(a) <-> q'(a)");
        let t = reduce_entailment(&[px], &Formula::Top, &qa, &sig);
        assert_eq!(t.premises[1..], [Formula::Top, Formula::Top]);
        assert_eq!(t.without_trivial().premises.len(), 1);
    }

    #[test]
    fn relativize_examples() {
        let mut sig = Signature::new();
        let f = parse_formula("exists X. p(X)", &mut sig).unwrap();
        assert_eq!(relativize(&f).unwrap().to_string(), "exists X. e(X) & p(X)");
        let q = parse_question("? p(X)", &mut sig).unwrap();
        assert_eq!(relativize_question(&q).unwrap().body().to_string(), "e(X) & p(X)");
        assert_eq!(relativize(&Formula::Top).unwrap(), Formula::Top);
        let clash = parse_formula("e(a)", &mut sig).unwrap();
        assert!(relativize(&clash).is_err());
    }

    #[test]
    fn star_preserves_shape() {
        let mut sig = Signature::new();
        let f = parse_formula("exists X. ~(p(X) & q(f(X))) & X = c", &mut sig).unwrap();
        let g = star(&f, &sig);
        assert_eq!(f.size(), g.size());
        assert_eq!(f.free_variables(), g.free_variables());
    }
}
