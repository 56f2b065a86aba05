use std::collections::BTreeSet;

use crate::syntax::{Formula, Name, Term, Var};

fn vars(prefix: &str, n: usize) -> Vec<Var> {
    (1..=n).map(|i| Var::new(format!("{prefix}{i}"))).collect()
}

fn terms(vs: &[Var]) -> Vec<Term> {
    vs.iter().cloned().map(Term::Var).collect()
}

/// Reflexivity plus one replacement axiom per argument position of every
/// predicate and function symbol in `formulas`. Symmetry and transitivity
/// follow from reflexivity and replacement for `=` itself, which is added
/// when equality occurs in `formulas` or in a function axiom.
pub fn equality_axioms(formulas: &[Formula]) -> Vec<Formula> {
    let mut preds: BTreeSet<(Name, usize)> = BTreeSet::new();
    let mut funcs: BTreeSet<(Name, usize)> = BTreeSet::new();
    let mut uses_eq = false;
    for f in formulas {
        preds.extend(f.predicates());
        funcs.extend(f.functions());
        uses_eq |= f.uses_equality();
    }
    let x = Var::new("X");
    let y = Var::new("Y");
    let eq_xy = Formula::equal(Term::Var(x.clone()), Term::Var(y.clone()));
    let mut out = vec![Formula::forall(x.clone(), Formula::equal(Term::Var(x.clone()), Term::Var(x.clone())))];
    for (p, n) in &preds {
        for i in 0..*n {
            let rest = vars("Z", n - 1);
            let with = |v: &Var| {
                let mut args = terms(&rest);
                args.insert(i, Term::Var(v.clone()));
                Formula::atom(p.clone(), args)
            };
            let body = Formula::implies(Formula::and(eq_xy.clone(), with(&x)), with(&y));
            let mut bound = vec![x.clone(), y.clone()];
            bound.extend(rest.iter().cloned());
            out.push(Formula::forall_many(&bound, body));
        }
    }
    let mut function_axioms = false;
    for (f, n) in &funcs {
        for i in 0..*n {
            function_axioms = true;
            let rest = vars("Z", n - 1);
            let with = |v: &Var| {
                let mut args = terms(&rest);
                args.insert(i, Term::Var(v.clone()));
                Term::App(f.clone(), args)
            };
            let body = Formula::implies(eq_xy.clone(), Formula::equal(with(&x), with(&y)));
            let mut bound = vec![x.clone(), y.clone()];
            bound.extend(rest.iter().cloned());
            out.push(Formula::forall_many(&bound, body));
        }
    }
    if uses_eq || function_axioms {
        let z = Var::new("Z");
        let body = Formula::implies(
            Formula::and(eq_xy, Formula::equal(Term::Var(x.clone()), Term::Var(z.clone()))),
            Formula::equal(Term::Var(y.clone()), Term::Var(z.clone())),
        );
        out.push(Formula::forall_many(&[x, y, z], body));
    }
    out
}
