//! Free-variable tableau prover: NNF and Skolemization, depth-first search
//! with iterative deepening over the gamma multiplicity, closure enumeration
//! for answer extraction, and an explicit tableau for step-by-step use.

mod equality;
mod normal;
mod repr;
mod search;
mod subsume;
mod tableau;

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::rc::Rc;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::{Duration, Instant};

pub use equality::equality_axioms;
pub use normal::{is_skolem_symbol, nnf, skolemize, skolemize_with, Nnf, SkolemNamer, SkolemizedTheory, SKOLEM_PREFIX};
pub use subsume::{is_tautological, most_general_sets, set_subsumes};
pub use tableau::{Closure, Node, Provenance, Tableau};

use crate::error::ProverError;
use crate::syntax::Formula;
use repr::{Context, Lit, C};
use search::{Branch, Closing, Engine, Limits};

#[derive(Clone, Debug)]
pub struct ProverConfig {
    /// Deepening runs k = 1..=max_gamma instantiations per universal per branch.
    pub max_gamma: u32,
    pub max_branches: usize,
    pub max_steps: u64,
    pub timeout: Option<Duration>,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for ProverConfig {
    fn default() -> Self {
        ProverConfig { max_gamma: 6, max_branches: 4096, max_steps: 2_000_000, timeout: None, cancel: None }
    }
}

impl ProverConfig {
    fn limits(&self, started: Instant) -> Limits {
        Limits {
            max_steps: self.max_steps,
            max_branches: self.max_branches,
            deadline: self.timeout.map(|t| started + t),
            cancel: self.cancel.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProofResult {
    /// Closed tableau found at this multiplicity.
    Valid {
        gamma: u32,
    },
    /// Search space exhausted without hitting any bound: the negated
    /// conclusion is satisfiable together with the premises.
    Invalid,
    Unknown,
}

impl ProofResult {
    pub fn is_valid(self) -> bool {
        matches!(self, ProofResult::Valid { .. })
    }
}

const SEARCH_STACK: usize = 1 << 29;

/// Runs `f` on a thread with a deep stack; the search recurses per literal.
pub(crate) fn with_deep_stack<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(SEARCH_STACK)
            .spawn_scoped(s, f)
            .expect("spawn search thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

fn check_closed(fs: &[Formula]) -> Result<(), ProverError> {
    match fs.iter().find(|f| !f.is_closed()) {
        Some(f) => Err(ProverError::NotClosed(f.to_string())),
        None => Ok(()),
    }
}

/// Tries to show `premises ⊨ conclusion` by refuting premises ∪ {¬conclusion}.
pub fn prove(premises: &[Formula], conclusion: &Formula, cfg: &ProverConfig) -> Result<ProofResult, ProverError> {
    let mut all = premises.to_vec();
    all.push(Formula::not(conclusion.clone()));
    refute(&all, cfg)
}

/// Tries to show that `formulas` are jointly unsatisfiable.
pub fn refute(formulas: &[Formula], cfg: &ProverConfig) -> Result<ProofResult, ProverError> {
    check_closed(formulas)?;
    let theory = skolemize(formulas);
    Ok(with_deep_stack(|| refute_skolemized(&theory, cfg)))
}

fn refute_skolemized(theory: &SkolemizedTheory, cfg: &ProverConfig) -> ProofResult {
    let started = Instant::now();
    let mut ctx = Context::default();
    let roots: Vec<_> = theory.formulas.iter().map(|f| ctx.compile(f, &mut Vec::new())).collect();
    for k in 1..=cfg.max_gamma.max(1) {
        let mut engine = Engine::new(&mut ctx, k, cfg.limits(started));
        let found = engine.branch(Branch::new(roots.clone()), &mut |_| true);
        if found && !engine.aborted {
            return ProofResult::Valid { gamma: k };
        }
        if engine.aborted {
            return ProofResult::Unknown;
        }
        if !engine.limited {
            return ProofResult::Invalid;
        }
    }
    ProofResult::Unknown
}

/// Knobs for closure enumeration.
#[derive(Clone, Debug)]
pub struct EnumerationConfig {
    pub max_closures: usize,
    pub max_branches: usize,
    pub max_steps: u64,
    pub deadline: Option<Instant>,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig { max_closures: 2000, max_branches: 4096, max_steps: 2_000_000, deadline: None }
    }
}

/// A closure projected onto the question instances it uses: each entry is
/// the index of an added instance and that instance after the closing
/// substitution (a literal, possibly with free variables).
pub type InstanceClosure = Vec<(usize, Formula)>;

#[derive(Clone, Debug, Default)]
pub struct ClosureSearch {
    pub closures: Vec<InstanceClosure>,
    /// False when a budget cut the enumeration short.
    pub complete: bool,
    pub steps: u64,
}

/// Enumerates the closures of the tableau for `theory` plus the given
/// question instances (atoms with free variables, each with a polarity),
/// expanding universals at most `k` times per branch.
pub fn enumerate_closures(
    theory: &SkolemizedTheory,
    instances: &[(Formula, bool)],
    k: u32,
    cfg: &EnumerationConfig,
) -> ClosureSearch {
    with_deep_stack(|| enumerate_inner(theory, instances, k, cfg))
}

fn enumerate_inner(
    theory: &SkolemizedTheory,
    instances: &[(Formula, bool)],
    k: u32,
    cfg: &EnumerationConfig,
) -> ClosureSearch {
    let mut ctx = Context::default();
    let mut roots = Vec::new();
    let mut inst_lits: Vec<Lit> = Vec::new();
    for (i, (atom, positive)) in instances.iter().enumerate() {
        let mut scope = Vec::new();
        for v in atom.free_variables() {
            let id = ctx.named_var(&v);
            scope.push((v, id));
        }
        let lit = ctx.atom(atom, *positive, &scope, Some(i as u32));
        inst_lits.push(lit.clone());
        roots.push(std::rc::Rc::new(C::Lit(lit)));
    }
    for f in &theory.formulas {
        roots.push(ctx.compile(f, &mut Vec::new()));
    }
    let limits =
        Limits { max_steps: cfg.max_steps, max_branches: cfg.max_branches, deadline: cfg.deadline, cancel: None };
    let found: Rc<RefCell<Vec<Vec<Formula>>>> = Rc::default();
    let lits = &inst_lits;
    let project = move |e: &Engine| -> InstanceClosure {
        let mut used = BTreeSet::new();
        for c in &e.closings {
            if let Closing::Pair(a, b) = c {
                used.extend(a.inst);
                used.extend(b.inst);
            }
        }
        used.into_iter()
            .map(|i| {
                let l = &lits[i as usize];
                let args: Vec<repr::T> = l.args.iter().map(|t| e.store.resolve(t)).collect();
                let atom = e.ctx.to_atom(l.pred, &args);
                (i as usize, if l.positive { atom } else { Formula::not(atom) })
            })
            .collect()
    };
    // A partial closure whose projection is already subsumed (or
    // tautological) can only end in a subsumed one.
    let redundant = {
        let found = found.clone();
        move |c: &InstanceClosure| {
            let set: Vec<Formula> = c.iter().map(|(_, l)| l.clone()).collect();
            is_tautological(&set) || found.borrow().iter().any(|s| set_subsumes(s, &set))
        }
    };
    let mut engine = Engine::new(&mut ctx, k, limits);
    {
        let redundant = redundant.clone();
        engine.prune = Some(Box::new(move |e: &Engine| redundant(&project(e))));
    }
    let mut closures: Vec<InstanceClosure> = Vec::new();
    let mut full = false;
    engine.branch(Branch::new(roots), &mut |e: &mut Engine| {
        let c = project(e);
        if !redundant(&c) {
            found.borrow_mut().push(c.iter().map(|(_, l)| l.clone()).collect());
            closures.push(c);
        }
        full = closures.len() >= cfg.max_closures;
        full
    });
    let steps = engine.steps();
    let complete = !engine.aborted && !full;
    ClosureSearch { closures, complete, steps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Signature};

    fn p(s: &str) -> Formula {
        parse_formula(s, &mut Signature::new()).unwrap()
    }

    fn valid(premises: &[&str], c: &str) -> ProofResult {
        let ps: Vec<Formula> = premises.iter().map(|s| p(s)).collect();
        prove(&ps, &p(c), &ProverConfig::default()).unwrap()
    }

    #[test]
    fn translation_instance() {
        assert!(valid(&["forall X. (p(X) <-> q(X))"], "p(a) <-> q(a)").is_valid());
    }

    #[test]
    fn excluded_middle() {
        assert!(valid(&[], "p | ~p").is_valid());
    }

    #[test]
    fn shared_closure_over_branches() {
        assert!(valid(&["(p(a) & p(c)) | (p(b) & p(c))"], "p(c)").is_valid());
        assert_eq!(valid(&["(p(a) & p(c)) | (p(b) & p(c))"], "p(a)"), ProofResult::Invalid);
    }

    #[test]
    fn quantifier_reasoning() {
        assert!(valid(&["forall X. (p(X) -> q(X))", "p(a)"], "exists Y. q(Y)").is_valid());
        assert!(valid(&["exists X. forall Y. r(X, Y)"], "forall Y. exists X. r(X, Y)").is_valid());
        assert!(valid(&[], "exists X. (d(X) -> forall Y. d(Y))").is_valid());
    }

    #[test]
    fn invalid_first_order_is_unknown_or_invalid() {
        let r = valid(&["forall Y. exists X. r(X, Y)"], "exists X. forall Y. r(X, Y)");
        assert!(!r.is_valid());
    }

    #[test]
    fn bottom_and_top() {
        assert!(valid(&["false"], "q").is_valid());
        assert!(valid(&[], "true").is_valid());
        assert_eq!(valid(&[], "false"), ProofResult::Invalid);
    }

    #[test]
    fn enumerate_two_branches() {
        let theory = skolemize(&[p("(p(a) & p(c)) | (p(b) & p(c))")]);
        let inst = vec![(p("p(Y)"), false)];
        let out = enumerate_closures(&theory, &inst, 1, &EnumerationConfig::default());
        assert!(out.complete);
        let rendered: Vec<String> =
            out.closures.iter().map(|c| c.iter().map(|(_, l)| l.to_string()).collect::<Vec<_>>().join(",")).collect();
        assert_eq!(rendered, vec!["~p(c)".to_string()]);
    }

    #[test]
    fn enumerate_two_instances() {
        let theory = skolemize(&[p("p(a) & p(b)")]);
        let inst = vec![(p("p(Y)"), false)];
        let out = enumerate_closures(&theory, &inst, 1, &EnumerationConfig::default());
        let mut rendered: Vec<String> = out.closures.iter().map(|c| c[0].1.to_string()).collect();
        rendered.sort();
        assert_eq!(rendered, vec!["~p(a)", "~p(b)"]);
    }
}
