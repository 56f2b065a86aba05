use std::collections::{BTreeSet, HashMap, HashSet};

use super::term::{Name, Term, Var};

/// Core first-order formula over {∧, ¬, ∃, ⊤, ⊥, ≈}. Disjunction, implication,
/// biconditional and universal quantification are encodings built by the
/// helper constructors below.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Bottom,
    Atom(Name, Vec<Term>),
    Equal(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
}

impl Formula {
    pub fn atom(pred: impl Into<Name>, args: Vec<Term>) -> Self {
        Formula::Atom(pred.into(), args)
    }

    pub fn equal(s: Term, t: Term) -> Self {
        Formula::Equal(s, t)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn exists(v: Var, f: Formula) -> Self {
        Formula::Exists(v, Box::new(f))
    }

    pub fn forall(v: Var, f: Formula) -> Self {
        Formula::not(Formula::exists(v, Formula::not(f)))
    }

    pub fn exists_many(vars: &[Var], f: Formula) -> Self {
        vars.iter().rev().fold(f, |acc, v| Formula::exists(v.clone(), acc))
    }

    pub fn forall_many(vars: &[Var], f: Formula) -> Self {
        vars.iter().rev().fold(f, |acc, v| Formula::forall(v.clone(), acc))
    }

    /// Right-nested conjunction; the empty conjunction is ⊤.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Self {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Formula::Top;
        };
        while let Some(f) = items.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    /// Right-nested disjunction; the empty disjunction is ⊥.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Self {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Formula::Bottom;
        };
        while let Some(f) = items.pop() {
            acc = Formula::or(f, acc);
        }
        acc
    }

    // --- derived-connective views -------------------------------------

    pub fn as_not(&self) -> Option<&Formula> {
        match self {
            Formula::Not(f) => Some(f),
            _ => None,
        }
    }

    /// `¬(¬a ∧ ¬b)` viewed as `a ∨ b`.
    pub fn as_or(&self) -> Option<(&Formula, &Formula)> {
        let Formula::And(a, b) = self.as_not()? else {
            return None;
        };
        Some((a.as_not()?, b.as_not()?))
    }

    /// `¬(a ∧ ¬b)` viewed as `a → b`.
    pub fn as_implies(&self) -> Option<(&Formula, &Formula)> {
        let Formula::And(a, b) = self.as_not()? else {
            return None;
        };
        Some((a, b.as_not()?))
    }

    /// `(a → b) ∧ (b → a)` viewed as `a ↔ b`.
    pub fn as_iff(&self) -> Option<(&Formula, &Formula)> {
        let Formula::And(l, r) = self else {
            return None;
        };
        let (a, b) = l.as_implies()?;
        let (b2, a2) = r.as_implies()?;
        (a == a2 && b == b2).then_some((a, b))
    }

    /// `¬∃x¬a` viewed as `∀x a`.
    pub fn as_forall(&self) -> Option<(&Var, &Formula)> {
        let Formula::Exists(v, body) = self.as_not()? else {
            return None;
        };
        Some((v, body.as_not()?))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(..) | Formula::Equal(..))
    }

    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Not(f) => f.is_atomic(),
            f => f.is_atomic(),
        }
    }

    /// Splits a right- or left-nested conjunction into its conjuncts.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::And(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    // --- variables ----------------------------------------------------

    /// Free variables in order of first occurrence.
    pub fn free_variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
        let push_term = |t: &Term, bound: &Vec<Var>, out: &mut Vec<Var>| {
            for v in t.vars() {
                if !bound.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        match self {
            Formula::Top | Formula::Bottom => {}
            Formula::Atom(_, args) => args.iter().for_each(|t| push_term(t, bound, out)),
            Formula::Equal(s, t) => {
                push_term(s, bound, out);
                push_term(t, bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    pub fn has_free(&self, v: &Var) -> bool {
        match self {
            Formula::Top | Formula::Bottom => false,
            Formula::Atom(_, args) => args.iter().any(|t| t.contains_var(v)),
            Formula::Equal(s, t) => s.contains_var(v) || t.contains_var(v),
            Formula::Not(f) => f.has_free(v),
            Formula::And(a, b) => a.has_free(v) || b.has_free(v),
            Formula::Exists(w, f) => w != v && f.has_free(v),
        }
    }

    /// Every variable name occurring anywhere (free or bound).
    pub fn all_variables(&self) -> HashSet<Var> {
        let mut out = HashSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(_, args) => args.iter().for_each(|t| out.extend(t.vars())),
            Formula::Equal(s, t) => {
                out.extend(s.vars());
                out.extend(t.vars());
            }
            Formula::Exists(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Not(g) | Formula::Exists(_, g) => g.visit(f),
            Formula::And(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Predicate symbols with arities (equality excluded).
    pub fn predicates(&self) -> BTreeSet<(Name, usize)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p, args) = f {
                out.insert((p.clone(), args.len()));
            }
        });
        out
    }

    /// Function symbols with arities.
    pub fn functions(&self) -> BTreeSet<(Name, usize)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(_, args) => args.iter().for_each(|t| t.collect_functions(&mut out)),
            Formula::Equal(s, t) => {
                s.collect_functions(&mut out);
                t.collect_functions(&mut out);
            }
            _ => {}
        });
        out
    }

    pub fn uses_equality(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::Equal(..)));
        found
    }

    /// Applies `f` to every term argument position, bottom-up over formulas.
    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Formula {
        match self {
            Formula::Top | Formula::Bottom => self.clone(),
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(&mut *f).collect()),
            Formula::Equal(s, t) => Formula::Equal(f(s), f(t)),
            Formula::Not(g) => Formula::not(g.map_terms(f)),
            Formula::And(a, b) => Formula::and(a.map_terms(f), b.map_terms(f)),
            Formula::Exists(v, g) => Formula::exists(v.clone(), g.map_terms(f)),
        }
    }

    /// Rewrites every atom (including equalities) with `f`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Formula) -> Formula) -> Formula {
        match self {
            Formula::Top | Formula::Bottom => self.clone(),
            Formula::Atom(..) | Formula::Equal(..) => f(self),
            Formula::Not(g) => Formula::not(g.map_atoms(f)),
            Formula::And(a, b) => Formula::and(a.map_atoms(f), b.map_atoms(f)),
            Formula::Exists(v, g) => Formula::exists(v.clone(), g.map_atoms(f)),
        }
    }

    /// Number of connective and quantifier nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Universal closure over the free variables, in order of first occurrence.
    pub fn universal_closure(&self) -> Formula {
        Formula::forall_many(&self.free_variables(), self.clone())
    }

    /// Renames bound variables so that no binder shadows another binder or a
    /// free variable, and no two binders share a name.
    pub fn rename_bound_apart(&self) -> Formula {
        let mut used: HashSet<Var> = self.free_variables().into_iter().collect();
        let mut taken_names = self.all_variables();
        let mut scope: HashMap<Var, Var> = HashMap::new();
        rename_rec(self, &mut used, &mut taken_names, &mut scope)
    }
}

fn fresh_like(base: &Var, taken: &HashSet<Var>) -> Var {
    let stem = base.name().split('_').next().filter(|s| !s.is_empty()).unwrap_or(base.name());
    (1..).map(|i| Var::new(format!("{stem}_{i}"))).find(|v| !taken.contains(v)).expect("unbounded name supply")
}

fn rename_rec(
    f: &Formula,
    used: &mut HashSet<Var>,
    taken: &mut HashSet<Var>,
    scope: &mut HashMap<Var, Var>,
) -> Formula {
    let rename_term = |t: &Term, scope: &HashMap<Var, Var>| rename_term_vars(t, scope);
    match f {
        Formula::Top | Formula::Bottom => f.clone(),
        Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|t| rename_term(t, scope)).collect()),
        Formula::Equal(s, t) => Formula::Equal(rename_term(s, scope), rename_term(t, scope)),
        Formula::Not(g) => Formula::not(rename_rec(g, used, taken, scope)),
        Formula::And(a, b) => {
            let a = rename_rec(a, used, taken, scope);
            let b = rename_rec(b, used, taken, scope);
            Formula::and(a, b)
        }
        Formula::Exists(v, g) => {
            let target = if used.contains(v) {
                let fresh = fresh_like(v, taken);
                taken.insert(fresh.clone());
                fresh
            } else {
                v.clone()
            };
            used.insert(target.clone());
            let saved = scope.insert(v.clone(), target.clone());
            let body = rename_rec(g, used, taken, scope);
            match saved {
                Some(s) => scope.insert(v.clone(), s),
                None => scope.remove(v),
            };
            Formula::exists(target, body)
        }
    }
}

fn rename_term_vars(t: &Term, scope: &HashMap<Var, Var>) -> Term {
    match t {
        Term::Var(v) => Term::Var(scope.get(v).cloned().unwrap_or_else(|| v.clone())),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| rename_term_vars(a, scope)).collect()),
    }
}

/// α-equivalence: equal up to consistent renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    fn terms_eq(s: &Term, t: &Term, env: &[(Var, Var)]) -> bool {
        match (s, t) {
            (Term::Var(x), Term::Var(y)) => {
                for (l, r) in env.iter().rev() {
                    if l == x || r == y {
                        return l == x && r == y;
                    }
                }
                x == y
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| terms_eq(x, y, env))
            }
            _ => false,
        }
    }
    fn go(a: &Formula, b: &Formula, env: &mut Vec<(Var, Var)>) -> bool {
        match (a, b) {
            (Formula::Top, Formula::Top) | (Formula::Bottom, Formula::Bottom) => true,
            (Formula::Atom(p, xs), Formula::Atom(q, ys)) => {
                p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| terms_eq(x, y, env))
            }
            (Formula::Equal(s1, t1), Formula::Equal(s2, t2)) => terms_eq(s1, s2, env) && terms_eq(t1, t2, env),
            (Formula::Not(x), Formula::Not(y)) => go(x, y, env),
            (Formula::And(a1, b1), Formula::And(a2, b2)) => go(a1, a2, env) && go(b1, b2, env),
            (Formula::Exists(x, f), Formula::Exists(y, g)) => {
                env.push((x.clone(), y.clone()));
                let r = go(f, g, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

/// A question `?φ`: a formula together with its free variables in canonical
/// (first-occurrence) order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Question {
    body: Formula,
    free: Vec<Var>,
}

impl Question {
    pub fn new(body: Formula) -> Self {
        let free = body.free_variables();
        Question { body, free }
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }

    pub fn free_vars(&self) -> &[Var] {
        &self.free
    }

    pub fn into_body(self) -> Formula {
        self.body
    }

    /// `P(X1,…,Xn)` with pairwise distinct variables: already an answer literal.
    pub fn is_literal_form(&self) -> bool {
        match &self.body {
            Formula::Atom(_, args) => {
                let mut seen = HashSet::new();
                args.iter().all(|t| matches!(t, Term::Var(v) if seen.insert(v.clone())))
            }
            _ => false,
        }
    }
}

impl std::fmt::Debug for Question {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}
