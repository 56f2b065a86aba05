use std::collections::{BTreeMap, HashSet};
use std::fmt;

use super::formula::Formula;
use super::term::{Term, Var};
use crate::error::UnifyError;

/// Finite map from variables to terms.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Substitution(BTreeMap<Var, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(v: Var, t: Term) -> Self {
        let mut s = Self::new();
        s.0.insert(v, t);
        s
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Term)>) -> Self {
        Substitution(pairs.into_iter().collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: Var, t: Term) {
        self.0.insert(v, t);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.0.keys()
    }

    pub fn range_vars(&self) -> HashSet<Var> {
        self.0.values().flat_map(Term::vars).collect()
    }

    pub fn restrict(&self, keep: impl Fn(&Var) -> bool) -> Substitution {
        Substitution(self.0.iter().filter(|(v, _)| keep(v)).map(|(v, t)| (v.clone(), t.clone())).collect())
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply_term(a)).collect()),
        }
    }

    /// Capture-avoiding application: binders that would capture a variable of
    /// a substituted term are renamed.
    pub fn apply(&self, f: &Formula) -> Formula {
        match f {
            Formula::Top | Formula::Bottom => f.clone(),
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|t| self.apply_term(t)).collect()),
            Formula::Equal(s, t) => Formula::Equal(self.apply_term(s), self.apply_term(t)),
            Formula::Not(g) => Formula::not(self.apply(g)),
            Formula::And(a, b) => Formula::and(self.apply(a), self.apply(b)),
            Formula::Exists(v, g) => {
                let inner = self.restrict(|w| w != v && g.has_free(w));
                if inner.is_empty() {
                    return f.clone();
                }
                let range = inner.range_vars();
                if range.contains(v) {
                    let mut avoid = range;
                    avoid.extend(g.all_variables());
                    avoid.extend(inner.domain().cloned());
                    let fresh = fresh_variant(v, &avoid);
                    let mut inner = inner;
                    inner.insert(v.clone(), Term::Var(fresh.clone()));
                    Formula::exists(fresh, inner.apply(g))
                } else {
                    Formula::exists(v.clone(), inner.apply(g))
                }
            }
        }
    }

    /// `self` followed by `other`: x(self∘other) = (x self) other.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out: BTreeMap<Var, Term> = self.0.iter().map(|(v, t)| (v.clone(), other.apply_term(t))).collect();
        for (v, t) in &other.0 {
            out.entry(v.clone()).or_insert_with(|| t.clone());
        }
        out.retain(|v, t| t.as_var() != Some(v));
        Substitution(out)
    }

    /// Resolves chains so that the substitution is idempotent. Assumes the
    /// bindings are acyclic (true of anything built by [`mgu`]).
    pub fn normalize(&self) -> Substitution {
        let mut cur = self.clone();
        loop {
            let next = Substitution(cur.0.iter().map(|(v, t)| (v.clone(), cur.apply_term(t))).collect());
            if next == cur {
                let mut out = next;
                out.0.retain(|v, t| t.as_var() != Some(v));
                return out;
            }
            cur = next;
        }
    }

    pub fn is_idempotent(&self) -> bool {
        let range = self.range_vars();
        self.domain().all(|v| !range.contains(v))
    }

    /// True if there is θ with `other = self ∘ θ` on the variables mentioned
    /// by either substitution.
    pub fn is_more_general_than(&self, other: &Substitution) -> bool {
        let vars: Vec<Var> = self.domain().chain(other.domain()).cloned().collect::<HashSet<_>>().into_iter().collect();
        let mut theta = BTreeMap::new();
        vars.iter().all(|v| {
            let lhs = self.apply_term(&Term::Var(v.clone()));
            let rhs = other.apply_term(&Term::Var(v.clone()));
            match_term(&lhs, &rhs, &mut theta)
        })
    }
}

/// One-way matching: extends `theta` so that `pattern θ = target`.
pub fn match_term(pattern: &Term, target: &Term, theta: &mut BTreeMap<Var, Term>) -> bool {
    match pattern {
        Term::Var(v) => match theta.get(v) {
            Some(bound) => bound == target,
            None => {
                theta.insert(v.clone(), target.clone());
                true
            }
        },
        Term::App(f, xs) => match target {
            Term::App(g, ys) if f == g && xs.len() == ys.len() => {
                xs.iter().zip(ys).all(|(x, y)| match_term(x, y, theta))
            }
            _ => false,
        },
    }
}

pub(crate) fn fresh_variant(v: &Var, avoid: &HashSet<Var>) -> Var {
    let stem = v.name().trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
    let stem = if stem.is_empty() { v.name() } else { stem };
    (1..).map(|i| Var::new(format!("{stem}_{i}"))).find(|w| !avoid.contains(w)).expect("unbounded name supply")
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}:={t}")?;
        }
        f.write_str("}")
    }
}

/// Robinson unification with occurs check over a list of term pairs. The
/// result is idempotent.
pub fn mgu(pairs: &[(Term, Term)]) -> Result<Substitution, UnifyError> {
    let mut sigma = Substitution::new();
    let mut work: Vec<(Term, Term)> = pairs.iter().rev().cloned().collect();
    while let Some((s, t)) = work.pop() {
        let s = sigma.apply_term(&s);
        let t = sigma.apply_term(&t);
        match (&s, &t) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if other.contains_var(x) {
                    return Err(UnifyError::OccursCheck { var: x.to_string(), term: other.to_string() });
                }
                let bind = Substitution::singleton(x.clone(), other.clone());
                sigma = Substitution(sigma.0.iter().map(|(v, t)| (v.clone(), bind.apply_term(t))).collect());
                sigma.insert(x.clone(), other.clone());
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return Err(UnifyError::Clash { left: s.to_string(), right: t.to_string() });
                }
                for (x, y) in xs.iter().zip(ys).rev() {
                    work.push((x.clone(), y.clone()));
                }
            }
        }
    }
    Ok(sigma)
}

/// Unifies two atoms (same predicate) or two equalities.
pub fn mgu_atoms(a: &Formula, b: &Formula) -> Result<Substitution, UnifyError> {
    match (a, b) {
        (Formula::Atom(p, xs), Formula::Atom(q, ys)) if p == q && xs.len() == ys.len() => {
            let pairs: Vec<_> = xs.iter().cloned().zip(ys.iter().cloned()).collect();
            mgu(&pairs)
        }
        (Formula::Equal(s1, t1), Formula::Equal(s2, t2)) => mgu(&[(s1.clone(), s2.clone()), (t1.clone(), t2.clone())]),
        _ => Err(UnifyError::Clash { left: a.to_string(), right: b.to_string() }),
    }
}
