use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::OracleError;
use crate::syntax::{Formula, Name, Rigidity, Signature, Term, Var};

/// The non-logical symbols a model interprets, with fixed indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub predicates: Vec<(Name, usize)>,
    pub functions: Vec<(Name, usize, Rigidity)>,
}

impl Vocabulary {
    /// Collects the symbols of `formulas`; rigidity is taken from `sig`
    /// (undeclared functions are non-rigid).
    pub fn from_formulas<'a>(formulas: impl IntoIterator<Item = &'a Formula>, sig: &Signature) -> Self {
        let mut preds = BTreeMap::new();
        let mut funcs = BTreeMap::new();
        for f in formulas {
            preds.extend(f.predicates());
            funcs.extend(f.functions());
        }
        Vocabulary {
            predicates: preds.into_iter().collect(),
            functions: funcs
                .into_iter()
                .map(|(n, a)| {
                    let r = if sig.is_rigid(&n) { Rigidity::Rigid } else { Rigidity::NonRigid };
                    (n, a, r)
                })
                .collect(),
        }
    }

    pub fn predicate_index(&self, name: &str, arity: usize) -> Option<usize> {
        self.predicates.iter().position(|(n, a)| &**n == name && *a == arity)
    }

    pub fn function_index(&self, name: &str, arity: usize) -> Option<usize> {
        self.functions.iter().position(|(n, a, _)| &**n == name && *a == arity)
    }
}

/// Number of argument tuples over a domain of size `d`.
pub(crate) fn tuples(d: usize, arity: usize) -> usize {
    d.pow(arity as u32)
}

/// Interpretation of the vocabulary in one world. Relations and function
/// tables are indexed by the base-`d` code of the argument tuple (first
/// argument least significant).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Structure {
    pub relations: Vec<Vec<bool>>,
    pub functions: Vec<Vec<usize>>,
}

impl Structure {
    /// Everything false, every function constantly 0.
    pub fn empty(vocab: &Vocabulary, d: usize) -> Self {
        Structure {
            relations: vocab.predicates.iter().map(|(_, a)| vec![false; tuples(d, *a)]).collect(),
            functions: vocab.functions.iter().map(|(_, a, _)| vec![0; tuples(d, *a)]).collect(),
        }
    }
}

/// Finite constant-domain first-order modal structure `(W, D, I)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModalModel {
    vocab: Arc<Vocabulary>,
    domain: usize,
    worlds: Vec<Structure>,
}

impl ModalModel {
    /// Validates totality, ranges and rigidity (rigid functions must agree in
    /// every world).
    pub fn new(vocab: Arc<Vocabulary>, domain: usize, worlds: Vec<Structure>) -> Result<Self, OracleError> {
        if domain == 0 {
            return Err(OracleError::InvalidModel("empty domain".into()));
        }
        if worlds.is_empty() {
            return Err(OracleError::InvalidModel("no worlds".into()));
        }
        for (w, s) in worlds.iter().enumerate() {
            if s.relations.len() != vocab.predicates.len() || s.functions.len() != vocab.functions.len() {
                return Err(OracleError::InvalidModel(format!("world {w} does not match the vocabulary")));
            }
            for (i, (_, a)) in vocab.predicates.iter().enumerate() {
                if s.relations[i].len() != tuples(domain, *a) {
                    return Err(OracleError::InvalidModel(format!("world {w}: relation table {i} is not total")));
                }
            }
            for (i, (name, a, r)) in vocab.functions.iter().enumerate() {
                let table = &s.functions[i];
                if table.len() != tuples(domain, *a) || table.iter().any(|&x| x >= domain) {
                    return Err(OracleError::InvalidModel(format!("world {w}: function `{name}` is not total over D")));
                }
                if *r == Rigidity::Rigid && table != &worlds[0].functions[i] {
                    return Err(OracleError::InvalidModel(format!("rigid `{name}` differs between worlds")));
                }
            }
        }
        Ok(ModalModel { vocab, domain, worlds })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn domain_size(&self) -> usize {
        self.domain
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn world(&self, w: usize) -> Option<&Structure> {
        self.worlds.get(w)
    }
}

/// Map from variables to domain elements.
pub type Assignment = BTreeMap<Var, usize>;

// --- compiled evaluation ---------------------------------------------------

#[derive(Clone, Debug)]
pub(crate) enum CTerm {
    Slot(usize),
    App(usize, Vec<CTerm>),
}

#[derive(Clone, Debug)]
pub(crate) enum CFormula {
    Top,
    Bottom,
    Atom(usize, Vec<CTerm>),
    Eq(CTerm, CTerm),
    Not(Box<CFormula>),
    And(Box<CFormula>, Box<CFormula>),
    Exists(usize, Box<CFormula>),
}

/// A formula compiled against a vocabulary; free variables occupy the first
/// slots in `free` order.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    pub formula: CFormula,
    pub free: Vec<Var>,
    pub slots: usize,
}

pub(crate) fn compile(f: &Formula, vocab: &Vocabulary, free: &[Var]) -> Result<Compiled, OracleError> {
    let mut scope: Vec<(Var, usize)> = free.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let mut next = free.len();
    let formula = compile_rec(f, vocab, &mut scope, &mut next)?;
    Ok(Compiled { formula, free: free.to_vec(), slots: next })
}

fn compile_term(t: &Term, vocab: &Vocabulary, scope: &[(Var, usize)]) -> Result<CTerm, OracleError> {
    match t {
        Term::Var(v) => scope
            .iter()
            .rev()
            .find(|(w, _)| w == v)
            .map(|(_, s)| CTerm::Slot(*s))
            .ok_or_else(|| OracleError::UnassignedVariable(v.to_string())),
        Term::App(f, args) => {
            let idx = vocab.function_index(f, args.len()).ok_or_else(|| OracleError::UnknownSymbol(f.to_string()))?;
            let args = args.iter().map(|a| compile_term(a, vocab, scope)).collect::<Result<_, _>>()?;
            Ok(CTerm::App(idx, args))
        }
    }
}

fn compile_rec(
    f: &Formula,
    vocab: &Vocabulary,
    scope: &mut Vec<(Var, usize)>,
    next: &mut usize,
) -> Result<CFormula, OracleError> {
    Ok(match f {
        Formula::Top => CFormula::Top,
        Formula::Bottom => CFormula::Bottom,
        Formula::Atom(p, args) => {
            let idx = vocab.predicate_index(p, args.len()).ok_or_else(|| OracleError::UnknownSymbol(p.to_string()))?;
            CFormula::Atom(idx, args.iter().map(|a| compile_term(a, vocab, scope)).collect::<Result<_, _>>()?)
        }
        Formula::Equal(s, t) => CFormula::Eq(compile_term(s, vocab, scope)?, compile_term(t, vocab, scope)?),
        Formula::Not(g) => CFormula::Not(Box::new(compile_rec(g, vocab, scope, next)?)),
        Formula::And(a, b) => {
            CFormula::And(Box::new(compile_rec(a, vocab, scope, next)?), Box::new(compile_rec(b, vocab, scope, next)?))
        }
        Formula::Exists(v, g) => {
            let slot = *next;
            *next += 1;
            scope.push((v.clone(), slot));
            let body = compile_rec(g, vocab, scope, next)?;
            scope.pop();
            CFormula::Exists(slot, Box::new(body))
        }
    })
}

fn eval_term(t: &CTerm, s: &Structure, d: usize, env: &[usize]) -> usize {
    match t {
        CTerm::Slot(i) => env[i.to_owned()],
        CTerm::App(f, args) => {
            let mut code = 0;
            for a in args.iter().rev() {
                code = code * d + eval_term(a, s, d, env);
            }
            s.functions[*f][code]
        }
    }
}

pub(crate) fn eval(f: &CFormula, s: &Structure, d: usize, env: &mut [usize]) -> bool {
    match f {
        CFormula::Top => true,
        CFormula::Bottom => false,
        CFormula::Atom(p, args) => {
            let mut code = 0;
            for a in args.iter().rev() {
                code = code * d + eval_term(a, s, d, env);
            }
            s.relations[*p][code]
        }
        CFormula::Eq(a, b) => eval_term(a, s, d, env) == eval_term(b, s, d, env),
        CFormula::Not(g) => !eval(g, s, d, env),
        CFormula::And(a, b) => eval(a, s, d, env) && eval(b, s, d, env),
        CFormula::Exists(slot, g) => {
            let saved = env[*slot];
            let mut found = false;
            for e in 0..d {
                env[*slot] = e;
                if eval(g, s, d, env) {
                    found = true;
                    break;
                }
            }
            env[*slot] = saved;
            found
        }
    }
}

/// Truth values of a compiled formula under every assignment of its free
/// variables, in base-`d` order of the assignment tuple.
pub(crate) fn extension(c: &Compiled, s: &Structure, d: usize, out: &mut Vec<bool>) {
    let n = c.free.len();
    let mut env = vec![0usize; c.slots.max(1)];
    for code in 0..tuples(d, n) {
        let mut rest = code;
        for slot in env.iter_mut().take(n) {
            *slot = rest % d;
            rest /= d;
        }
        out.push(eval(&c.formula, s, d, &mut env));
    }
}

/// Standard Tarskian truth of `f` at world `w` under `g`.
pub fn evaluate(m: &ModalModel, w: usize, g: &Assignment, f: &Formula) -> Result<bool, OracleError> {
    let s = m.world(w).ok_or(OracleError::NoSuchWorld(w))?;
    let free = f.free_variables();
    let c = compile(f, &m.vocab, &free)?;
    let mut env = vec![0usize; c.slots.max(1)];
    for (i, v) in free.iter().enumerate() {
        let e = *g.get(v).ok_or_else(|| OracleError::UnassignedVariable(v.to_string()))?;
        if e >= m.domain {
            return Err(OracleError::InvalidModel(format!("{v} assigned outside the domain")));
        }
        env[i] = e;
    }
    Ok(eval(&c.formula, s, m.domain, &mut env))
}

fn tuple_label(code: usize, d: usize, arity: usize) -> String {
    let mut rest = code;
    let parts: Vec<String> = (0..arity)
        .map(|_| {
            let x = rest % d;
            rest /= d;
            x.to_string()
        })
        .collect();
    parts.join(",")
}

pub(crate) fn write_structure(
    f: &mut fmt::Formatter<'_>,
    vocab: &Vocabulary,
    d: usize,
    s: &Structure,
    indent: &str,
) -> fmt::Result {
    for (i, (name, a)) in vocab.predicates.iter().enumerate() {
        let members: Vec<String> = s.relations[i]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(code, _)| format!("({})", tuple_label(code, d, *a)))
            .collect();
        if *a == 0 {
            writeln!(f, "{indent}{name} = {}", !members.is_empty())?;
        } else {
            writeln!(f, "{indent}{name} = {{{}}}", members.join(", "))?;
        }
    }
    for (i, (name, a, _)) in vocab.functions.iter().enumerate() {
        if *a == 0 {
            writeln!(f, "{indent}{name} = {}", s.functions[i][0])?;
        } else {
            let entries: Vec<String> = s.functions[i]
                .iter()
                .enumerate()
                .map(|(code, v)| format!("({})->{v}", tuple_label(code, d, *a)))
                .collect();
            writeln!(f, "{indent}{name} = {{{}}}", entries.join(", "))?;
        }
    }
    Ok(())
}

impl fmt::Display for ModalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let elems: Vec<String> = (0..self.domain).map(|e| e.to_string()).collect();
        writeln!(f, "domain: {{{}}}", elems.join(", "))?;
        for (w, s) in self.worlds.iter().enumerate() {
            writeln!(f, "world {w}:")?;
            write_structure(f, &self.vocab, self.domain, s, "  ")?;
        }
        Ok(())
    }
}

/// Symbol lookup by name for building models by hand in tests and tools.
pub fn structure_from(
    vocab: &Vocabulary,
    d: usize,
    relations: &[(&str, &[&[usize]])],
    functions: &[(&str, &[(&[usize], usize)])],
) -> Result<Structure, OracleError> {
    let mut s = Structure::empty(vocab, d);
    let by_name: HashMap<&str, usize> = vocab.predicates.iter().enumerate().map(|(i, (n, _))| (&**n, i)).collect();
    for (name, members) in relations {
        let i = *by_name.get(name).ok_or_else(|| OracleError::UnknownSymbol(name.to_string()))?;
        for tuple in *members {
            let code = tuple.iter().rev().fold(0, |acc, &x| acc * d + x);
            s.relations[i][code] = true;
        }
    }
    for (name, entries) in functions {
        let i = vocab
            .functions
            .iter()
            .position(|(n, _, _)| &**n == *name)
            .ok_or_else(|| OracleError::UnknownSymbol(name.to_string()))?;
        for (args, value) in *entries {
            let code = args.iter().rev().fold(0, |acc, &x| acc * d + x);
            s.functions[i][code] = *value;
        }
    }
    Ok(s)
}
