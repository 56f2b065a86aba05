//! Existential generalization of non-rigid and Skolem terms.
//!
//! The input is a conjunction of universally closed formulas. Prefixes are
//! renamed apart and merged; universal conjuncts are instantiated at the
//! non-rigid terms occurring in the conjunction so that shared values stay
//! shared; then every outermost non-rigid term is replaced by a variable
//! that is existentially quantified right after the universals it depends
//! on, and quantifiers are pushed inward.

use std::collections::{BTreeMap, HashSet};

use crate::prover::{nnf, Nnf};
use crate::syntax::{match_term, Formula, Signature, Substitution, Term, Var};

const MAX_POOL_INSTANCES: usize = 64;

/// Unskolemizes with rigidity taken from `sig`; undeclared symbols (such as
/// Skolem functions) are non-rigid.
pub fn unskolemize(psi0: &Formula, sig: &Signature) -> Formula {
    unskolemize_with(psi0, &|f| sig.is_rigid(f))
}

pub fn unskolemize_with(psi0: &Formula, is_rigid: &dyn Fn(&str) -> bool) -> Formula {
    let mut fresh = 0usize;
    let mut next = |prefix: &str| {
        fresh += 1;
        Var::new(format!("_{prefix}{fresh}"))
    };
    let mut clauses: Vec<(Vec<Var>, Formula)> = Vec::new();
    for c in psi0.conjuncts() {
        let mut n = nnf(c);
        let mut vars = Vec::new();
        while let Nnf::Forall(v, b) = n {
            vars.push(v);
            n = *b;
        }
        let m = n.to_formula();
        if has_quantifier(&m) && !nonrigid_terms(&m, is_rigid, false).is_empty() {
            // Outside the supported shape; dropping a conjunct stays sound.
            continue;
        }
        let renaming: Vec<(Var, Var)> = vars.iter().map(|v| (v.clone(), next("U"))).collect();
        let sigma = Substitution::from_pairs(renaming.iter().map(|(v, w)| (v.clone(), Term::Var(w.clone()))));
        clauses.push((renaming.into_iter().map(|(_, w)| w).collect(), sigma.apply(&m)));
    }

    saturate(&mut clauses, is_rigid);

    let mut prefix: Vec<Var> = Vec::new();
    for v in clauses.iter().flat_map(|(vs, _)| vs) {
        if !prefix.contains(v) {
            prefix.push(v.clone());
        }
    }
    let matrix = Formula::conj(clauses.into_iter().map(|(_, m)| m));

    let terms = nonrigid_terms(&matrix, is_rigid, true);
    let table: BTreeMap<Term, Var> = terms.iter().map(|t| (t.clone(), next("E"))).collect();
    let matrix = matrix.map_terms(&mut |t| abstract_term(t, &table));

    let used: HashSet<Var> = matrix.free_variables().into_iter().collect();
    let mut universals: Vec<Var> = prefix.into_iter().filter(|v| used.contains(v)).collect();
    let mut pending: Vec<(Vec<Var>, Var)> = terms
        .iter()
        .map(|t| (t.vars().into_iter().filter(|v| universals.contains(v)).collect(), table[t].clone()))
        .collect();
    let mut quants: Vec<(bool, Var)> = Vec::new();
    let mut bound: HashSet<Var> = HashSet::new();
    loop {
        pending.retain(|(deps, z)| {
            if deps.iter().all(|d| bound.contains(d)) {
                quants.push((false, z.clone()));
                false
            } else {
                true
            }
        });
        // Bind the universals of the least demanding pending term next.
        let need = pending
            .iter()
            .map(|(deps, _)| deps.iter().filter(|d| !bound.contains(*d)).cloned().collect::<Vec<_>>())
            .min_by_key(Vec::len);
        let Some(need) = need else { break };
        for v in universals.iter().filter(|v| need.contains(v)) {
            quants.push((true, v.clone()));
            bound.insert(v.clone());
        }
    }
    universals.retain(|v| !bound.contains(v));
    quants.extend(universals.into_iter().map(|v| (true, v)));

    let mut out = nnf(&matrix);
    for (universal, v) in quants.into_iter().rev() {
        out = miniscope(universal, v, out);
    }
    out.to_formula()
}

fn has_quantifier(f: &Formula) -> bool {
    let mut found = false;
    f.visit(&mut |g| found |= matches!(g, Formula::Exists(..)));
    found
}

/// Non-rigid subterms in order of first occurrence; with `outermost`, those
/// nested inside another non-rigid term are skipped.
fn nonrigid_terms(f: &Formula, is_rigid: &dyn Fn(&str) -> bool, outermost: bool) -> Vec<Term> {
    fn go(t: &Term, is_rigid: &dyn Fn(&str) -> bool, outermost: bool, out: &mut Vec<Term>) {
        if let Term::App(g, args) = t {
            if !is_rigid(g) {
                if !out.contains(t) {
                    out.push(t.clone());
                }
                if outermost {
                    return;
                }
            }
            for a in args {
                go(a, is_rigid, outermost, out);
            }
        }
    }
    let mut out = Vec::new();
    f.map_terms(&mut |t| {
        go(t, is_rigid, outermost, &mut out);
        t.clone()
    });
    out
}

fn abstract_term(t: &Term, table: &BTreeMap<Term, Var>) -> Term {
    if let Some(z) = table.get(t) {
        return Term::Var(z.clone());
    }
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| abstract_term(a, table)).collect()),
    }
}

/// Adds instances of universal clauses at the non-rigid terms occurring in
/// the conjunction, so that values named by the same term stay linked once
/// terms are abstracted. One round, capped.
fn saturate(clauses: &mut Vec<(Vec<Var>, Formula)>, is_rigid: &dyn Fn(&str) -> bool) {
    let terms: Vec<Vec<Term>> = clauses.iter().map(|(_, m)| nonrigid_terms(m, is_rigid, false)).collect();
    let mut added = Vec::new();
    let mut seen: HashSet<Formula> = clauses.iter().map(|(_, m)| m.clone()).collect();
    for (i, (vars, m)) in clauses.iter().enumerate() {
        if vars.is_empty() {
            continue;
        }
        for s in terms[i].iter().filter(|s| !s.vars().is_empty()) {
            for g in terms.iter().flatten() {
                let mut theta = BTreeMap::new();
                if !match_term(s, g, &mut theta)
                    || !theta.keys().all(|k| vars.contains(k))
                    || theta.iter().all(|(k, t)| *t == Term::Var(k.clone()))
                {
                    continue;
                }
                let inst = Substitution::from_pairs(theta.clone()).apply(m);
                if added.len() < MAX_POOL_INSTANCES && seen.insert(inst.clone()) {
                    let rest: Vec<Var> = vars.iter().filter(|v| !theta.contains_key(*v)).cloned().collect();
                    added.push((rest, inst));
                }
            }
        }
    }
    clauses.extend(added);
}

fn mentions(n: &Nnf, v: &Var) -> bool {
    n.to_formula().has_free(v)
}

fn rebuild(and: bool, mut xs: Vec<Nnf>) -> Nnf {
    if xs.len() == 1 {
        return xs.pop().expect("one element");
    }
    if and {
        Nnf::And(xs)
    } else {
        Nnf::Or(xs)
    }
}

fn quantify(universal: bool, v: Var, body: Nnf) -> Nnf {
    if universal {
        Nnf::Forall(v, Box::new(body))
    } else {
        Nnf::Exists(v, Box::new(body))
    }
}

/// Places `Qv` as deep as the shape of `body` allows.
fn miniscope(universal: bool, v: Var, body: Nnf) -> Nnf {
    if !mentions(&body, &v) {
        return body;
    }
    match body {
        Nnf::And(xs) if universal => Nnf::And(xs.into_iter().map(|x| miniscope(true, v.clone(), x)).collect()),
        Nnf::Or(xs) if !universal => Nnf::Or(xs.into_iter().map(|x| miniscope(false, v.clone(), x)).collect()),
        Nnf::And(xs) => split(true, universal, v, xs),
        Nnf::Or(xs) => split(false, universal, v, xs),
        other => quantify(universal, v, other),
    }
}

fn split(and: bool, universal: bool, v: Var, xs: Vec<Nnf>) -> Nnf {
    let (with, without): (Vec<Nnf>, Vec<Nnf>) = xs.into_iter().partition(|x| mentions(x, &v));
    if without.is_empty() {
        return quantify(universal, v, rebuild(and, with));
    }
    let inner = miniscope(universal, v, rebuild(and, with));
    let mut all = without;
    all.push(inner);
    rebuild(and, all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qa::simplify::{simplify, tidy_variables};
    use crate::syntax::{parse_formula, Rigidity};

    fn run(s: &str, rigid: &[&str]) -> String {
        let mut sig = Signature::new();
        for r in rigid {
            sig.declare_function(r, 0, Rigidity::Rigid).unwrap();
        }
        let f = parse_formula(s, &mut sig).unwrap();
        tidy_variables(&simplify(&unskolemize(&f, &sig))).to_string()
    }

    #[test]
    fn nonrigid_constant() {
        assert_eq!(run("p(c)", &[]), "exists X. p(X)");
        assert_eq!(run("p(a)", &["a"]), "p(a)");
    }

    #[test]
    fn dependent_term_goes_after_its_universal() {
        assert_eq!(run("forall Y. ~i(Y, f(Y))", &[]), "forall X. exists Y. ~i(X, Y)");
    }

    #[test]
    fn identical_terms_share_a_variable() {
        assert_eq!(run("p(c) & q(c)", &[]), "exists X. p(X) & q(X)");
    }

    #[test]
    fn universal_conjunct_stays_outside() {
        assert_eq!(run("(forall Y. p(Y)) & q(c)", &[]), "(forall X. p(X)) & exists X. q(X)");
    }

    #[test]
    fn pool_instances_keep_links() {
        // Without the instance at a, the link between f(a) in both conjuncts
        // would be lost.
        let out = run("(forall Y. (r(Y) | s(f(Y)))) & t(f(a))", &["a"]);
        assert!(out.contains("exists"), "{out}");
        let mut sig = Signature::new();
        sig.declare_function("a", 0, Rigidity::Rigid).unwrap();
        let got = parse_formula(&out, &mut sig).unwrap();
        let want = parse_formula("exists Z. ((r(a) | s(Z)) & t(Z))", &mut sig).unwrap();
        let r = crate::prover::prove(&[got], &want, &crate::prover::ProverConfig::default()).unwrap();
        assert!(r.is_valid());
    }

    #[test]
    fn chained_skolem_terms_are_linked() {
        let out = run("(forall Y. ~i(Y, f(Y))) & forall Y. ~i(Y, f(f(Y)))", &[]);
        let mut sig = Signature::new();
        let got = parse_formula(&out, &mut sig).unwrap();
        let want = parse_formula("forall X. exists Z. exists W. (~i(X, Z) & ~i(Z, W) & ~i(X, W))", &mut sig).unwrap();
        let r = crate::prover::prove(&[got], &want, &crate::prover::ProverConfig::default()).unwrap();
        assert!(r.is_valid(), "{out}");
    }
}
