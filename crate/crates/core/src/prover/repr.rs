//! Compact terms and formulas for proof search, with a trailed binding store.

use std::collections::HashMap;
use std::rc::Rc;

use super::normal::Nnf;
use crate::syntax::{Formula, Name, Term, Var};

pub(crate) type Sym = u32;
pub(crate) type VarId = u32;

/// Predicate used for `≈` inside the prover (no built-in equality reasoning).
pub(crate) const EQ_NAME: &str = "=";

#[derive(Default, Debug)]
pub(crate) struct Interner {
    names: Vec<Name>,
    index: HashMap<Name, Sym>,
}

impl Interner {
    pub fn intern(&mut self, name: &Name) -> Sym {
        if let Some(&s) = self.index.get(name) {
            return s;
        }
        let s = self.names.len() as Sym;
        self.names.push(name.clone());
        self.index.insert(name.clone(), s);
        s
    }

    pub fn name(&self, s: Sym) -> &Name {
        &self.names[s as usize]
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) enum T {
    V(VarId),
    F(Sym, Rc<[T]>),
}

impl T {
    pub fn map_vars(&self, f: &impl Fn(VarId) -> VarId) -> T {
        match self {
            T::V(v) => T::V(f(*v)),
            T::F(s, args) if args.is_empty() => T::F(*s, args.clone()),
            T::F(s, args) => T::F(*s, args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Lit {
    pub positive: bool,
    pub pred: Sym,
    pub args: Rc<[T]>,
    /// Index of the added question instance this literal is, if any.
    pub inst: Option<u32>,
}

/// Compiled NNF; bound variables are template ids renamed on instantiation.
#[derive(Debug)]
pub(crate) enum C {
    True,
    False,
    Lit(Lit),
    And(Vec<Rc<C>>),
    Or(Vec<Rc<C>>),
    All(Vec<VarId>, Rc<C>),
}

impl C {
    /// Copy of `self` with template variables renamed by `map`.
    pub fn rename(&self, map: &HashMap<VarId, VarId>) -> Rc<C> {
        let f = |v: VarId| *map.get(&v).unwrap_or(&v);
        Rc::new(match self {
            C::True => C::True,
            C::False => C::False,
            C::Lit(l) => C::Lit(Lit {
                positive: l.positive,
                pred: l.pred,
                args: l.args.iter().map(|a| a.map_vars(&f)).collect(),
                inst: l.inst,
            }),
            C::And(xs) => C::And(xs.iter().map(|x| x.rename(map)).collect()),
            C::Or(xs) => C::Or(xs.iter().map(|x| x.rename(map)).collect()),
            C::All(vs, b) => C::All(vs.iter().map(|v| f(*v)).collect(), b.rename(map)),
        })
    }
}

/// Symbol tables and the variable supply shared by one search.
#[derive(Default, Debug)]
pub(crate) struct Context {
    pub preds: Interner,
    pub funcs: Interner,
    pub var_names: Vec<Option<Var>>,
}

impl Context {
    pub fn fresh_var(&mut self) -> VarId {
        self.var_names.push(None);
        (self.var_names.len() - 1) as VarId
    }

    pub fn named_var(&mut self, v: &Var) -> VarId {
        self.var_names.push(Some(v.clone()));
        (self.var_names.len() - 1) as VarId
    }

    pub fn term(&mut self, t: &Term, scope: &[(Var, VarId)]) -> T {
        match t {
            Term::Var(v) => {
                let id = scope.iter().rev().find(|(w, _)| w == v).map(|(_, id)| *id);
                T::V(id.unwrap_or_else(|| panic!("unbound variable {v} in compiled formula")))
            }
            Term::App(f, args) => {
                let s = self.funcs.intern(f);
                T::F(s, args.iter().map(|a| self.term(a, scope)).collect())
            }
        }
    }

    pub fn atom(&mut self, a: &Formula, positive: bool, scope: &[(Var, VarId)], inst: Option<u32>) -> Lit {
        let eq: Name = EQ_NAME.into();
        let (pred, args): (Sym, Rc<[T]>) = match a {
            Formula::Atom(p, args) => (self.preds.intern(p), args.iter().map(|t| self.term(t, scope)).collect()),
            Formula::Equal(s, t) => (self.preds.intern(&eq), vec![self.term(s, scope), self.term(t, scope)].into()),
            other => panic!("not an atom: {other}"),
        };
        Lit { positive, pred, args, inst }
    }

    /// Compiles an NNF formula without existentials. `scope` binds its free
    /// variables.
    pub fn compile(&mut self, f: &Nnf, scope: &mut Vec<(Var, VarId)>) -> Rc<C> {
        Rc::new(match f {
            Nnf::Top => C::True,
            Nnf::Bottom => C::False,
            Nnf::Lit(p, a) => C::Lit(self.atom(a, *p, scope, None)),
            Nnf::And(xs) => C::And(xs.iter().map(|x| self.compile(x, scope)).collect()),
            Nnf::Or(xs) => C::Or(xs.iter().map(|x| self.compile(x, scope)).collect()),
            Nnf::Forall(..) => {
                let mut vars = Vec::new();
                let mut body = f;
                while let Nnf::Forall(v, b) = body {
                    let id = self.named_var(v);
                    scope.push((v.clone(), id));
                    vars.push(id);
                    body = b;
                }
                let c = self.compile(body, scope);
                scope.truncate(scope.len() - vars.len());
                C::All(vars, c)
            }
            Nnf::Exists(..) => panic!("existential left after Skolemization"),
        })
    }

    pub fn var_name(&self, v: VarId) -> Var {
        Var::new(format!("_{v}"))
    }

    pub fn to_term(&self, t: &T) -> Term {
        match t {
            T::V(v) => Term::Var(self.var_name(*v)),
            T::F(s, args) => Term::App(self.funcs.name(*s).clone(), args.iter().map(|a| self.to_term(a)).collect()),
        }
    }

    /// The atom of a literal as a formula (sign dropped).
    pub fn to_atom(&self, pred: Sym, args: &[T]) -> Formula {
        let name = self.preds.name(pred);
        let args: Vec<Term> = args.iter().map(|a| self.to_term(a)).collect();
        if &**name == EQ_NAME && args.len() == 2 {
            let mut it = args.into_iter();
            Formula::Equal(it.next().expect("lhs"), it.next().expect("rhs"))
        } else {
            Formula::Atom(name.clone(), args)
        }
    }
}

/// Triangular substitution with an undo trail.
#[derive(Default, Debug)]
pub(crate) struct Store {
    bind: Vec<Option<T>>,
    trail: Vec<VarId>,
}

impl Store {
    fn slot(&mut self, v: VarId) -> &mut Option<T> {
        let i = v as usize;
        if i >= self.bind.len() {
            self.bind.resize(i + 1, None);
        }
        &mut self.bind[i]
    }

    pub fn lookup(&self, v: VarId) -> Option<&T> {
        self.bind.get(v as usize).and_then(Option::as_ref)
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("non-empty trail");
            self.bind[v as usize] = None;
        }
    }

    pub fn walk<'a>(&'a self, mut t: &'a T) -> &'a T {
        while let T::V(v) = t {
            match self.lookup(*v) {
                Some(b) => t = b,
                None => break,
            }
        }
        t
    }

    pub fn resolve(&self, t: &T) -> T {
        match self.walk(t) {
            T::V(v) => T::V(*v),
            T::F(s, args) if args.is_empty() => T::F(*s, args.clone()),
            T::F(s, args) => T::F(*s, args.iter().map(|a| self.resolve(a)).collect()),
        }
    }

    fn occurs(&self, v: VarId, t: &T) -> bool {
        match self.walk(t) {
            T::V(w) => *w == v,
            T::F(_, args) => args.iter().any(|a| self.occurs(v, a)),
        }
    }

    fn bind_var(&mut self, v: VarId, t: T) {
        *self.slot(v) = Some(t);
        self.trail.push(v);
    }

    /// Unifies under the current bindings. On failure the bindings made by
    /// this call are left on the trail; callers undo to their mark.
    pub fn unify(&mut self, a: &T, b: &T) -> bool {
        let a = self.walk(a).clone();
        let b = self.walk(b).clone();
        match (&a, &b) {
            (T::V(x), T::V(y)) if x == y => true,
            (T::V(x), other) | (other, T::V(x)) => {
                if self.occurs(*x, other) {
                    return false;
                }
                self.bind_var(*x, other.clone());
                true
            }
            (T::F(f, xs), T::F(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| self.unify(x, y))
            }
        }
    }

    pub fn unify_args(&mut self, xs: &[T], ys: &[T]) -> bool {
        xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify(x, y))
    }

    /// Equal under the current bindings without binding anything.
    pub fn identical(&self, a: &T, b: &T) -> bool {
        match (self.walk(a), self.walk(b)) {
            (T::V(x), T::V(y)) => x == y,
            (T::F(f, xs), T::F(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| self.identical(x, y))
            }
            _ => false,
        }
    }
}
