//! Syntactic answerhood: rigid instances, the development relation, and a
//! combined prover/oracle answerhood check.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;
use std::time::Duration;

use crate::error::{CheckError, OracleError};
use crate::oracle::{entails_bounded_cancellable, Bounds, Countermodel, Verdict};
use crate::prover::{prove, ProofResult, ProverConfig};
use crate::syntax::{Formula, Question, Signature, Substitution, Term, Var};
use crate::translation::{reduce_entailment, Sequent};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DevelopmentConfig {
    /// Whether rigid identity statements count as building blocks.
    pub equality_allowed: bool,
}

impl Default for DevelopmentConfig {
    fn default() -> Self {
        DevelopmentConfig { equality_allowed: true }
    }
}

pub fn is_rigid_term(t: &Term, sig: &Signature) -> bool {
    sig.is_rigid_term(t)
}

struct Matcher<'a> {
    sig: &'a Signature,
    /// Bound variables in scope as (pattern, candidate) pairs.
    env: Vec<(Var, Var)>,
    sigma: BTreeMap<Var, Term>,
}

impl Matcher<'_> {
    fn bound_in_pattern(&self, v: &Var) -> Option<&Var> {
        self.env.iter().rev().find(|(p, _)| p == v).map(|(_, c)| c)
    }

    fn mentions_candidate_bound(&self, t: &Term) -> bool {
        t.vars().iter().any(|v| self.env.iter().any(|(_, c)| c == v))
    }

    fn term(&mut self, cand: &Term, pat: &Term) -> bool {
        match pat {
            Term::Var(v) => {
                if let Some(c) = self.bound_in_pattern(v) {
                    return matches!(cand, Term::Var(w) if w == c);
                }
                if !self.sig.is_rigid_term(cand) || self.mentions_candidate_bound(cand) {
                    return false;
                }
                match self.sigma.get(v) {
                    Some(t) => t == cand,
                    None => {
                        self.sigma.insert(v.clone(), cand.clone());
                        true
                    }
                }
            }
            Term::App(f, xs) => match cand {
                Term::App(g, ys) if f == g && xs.len() == ys.len() => xs.iter().zip(ys).all(|(x, y)| self.term(y, x)),
                _ => false,
            },
        }
    }

    fn formula(&mut self, cand: &Formula, pat: &Formula) -> bool {
        match (cand, pat) {
            (Formula::Top, Formula::Top) | (Formula::Bottom, Formula::Bottom) => true,
            (Formula::Atom(p, ys), Formula::Atom(q, xs)) => {
                p == q && xs.len() == ys.len() && ys.iter().zip(xs).all(|(y, x)| self.term(y, x))
            }
            (Formula::Equal(s1, t1), Formula::Equal(s2, t2)) => self.term(s1, s2) && self.term(t1, t2),
            (Formula::Not(c), Formula::Not(p)) => self.formula(c, p),
            (Formula::And(c1, c2), Formula::And(p1, p2)) => self.formula(c1, p1) && self.formula(c2, p2),
            (Formula::Exists(w, c), Formula::Exists(v, p)) => {
                self.env.push((v.clone(), w.clone()));
                let ok = self.formula(c, p);
                self.env.pop();
                ok
            }
            _ => false,
        }
    }
}

/// Finds σ with rigid range such that `pattern σ` is `candidate` up to
/// renaming of bound variables. Identity bindings are left out.
pub fn rigid_instance_match(candidate: &Formula, pattern: &Formula, sig: &Signature) -> Option<Substitution> {
    let mut m = Matcher { sig, env: Vec::new(), sigma: BTreeMap::new() };
    if !m.formula(candidate, pattern) {
        return None;
    }
    Some(Substitution::from_pairs(m.sigma.into_iter().filter(|(v, t)| *t != Term::Var(v.clone()))))
}

/// Which clause of the development definition justifies a node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Top,
    Bottom,
    /// Rigid instance of pattern number `pattern`.
    Instance {
        pattern: usize,
        sigma: Substitution,
    },
    Identity,
    Not(Box<Witness>),
    And(Box<Witness>, Box<Witness>),
    Exists(Var, Box<Witness>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub formula: Formula,
    pub rule: Justification,
}

impl Witness {
    fn write(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = depth * 2;
        match &self.rule {
            Justification::Top => writeln!(f, "{:pad$}true", ""),
            Justification::Bottom => writeln!(f, "{:pad$}false", ""),
            Justification::Instance { pattern, sigma } => {
                writeln!(f, "{:pad$}{}  instance of #{pattern} by {sigma}", "", self.formula)
            }
            Justification::Identity => writeln!(f, "{:pad$}{}  rigid identity", "", self.formula),
            Justification::Not(w) => {
                writeln!(f, "{:pad$}not", "")?;
                w.write(f, depth + 1)
            }
            Justification::And(a, b) => {
                writeln!(f, "{:pad$}and", "")?;
                a.write(f, depth + 1)?;
                b.write(f, depth + 1)
            }
            Justification::Exists(v, w) => {
                writeln!(f, "{:pad$}exists {v}", "")?;
                w.write(f, depth + 1)
            }
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

/// Decides whether `psi` is a development of `patterns`; on success returns
/// the decomposition. Each node is first tried as a rigid instance, then
/// (if allowed) as a rigid identity, then split at its main connective.
pub fn is_development(psi: &Formula, patterns: &[Formula], sig: &Signature, cfg: DevelopmentConfig) -> Option<Witness> {
    let rule = match psi {
        Formula::Top => Justification::Top,
        Formula::Bottom => Justification::Bottom,
        _ => {
            if let Some((pattern, sigma)) =
                patterns.iter().enumerate().find_map(|(i, p)| rigid_instance_match(psi, p, sig).map(|s| (i, s)))
            {
                Justification::Instance { pattern, sigma }
            } else {
                match psi {
                    Formula::Equal(s, t) if cfg.equality_allowed && sig.is_rigid_term(s) && sig.is_rigid_term(t) => {
                        Justification::Identity
                    }
                    Formula::Not(g) => Justification::Not(Box::new(is_development(g, patterns, sig, cfg)?)),
                    Formula::And(a, b) => Justification::And(
                        Box::new(is_development(a, patterns, sig, cfg)?),
                        Box::new(is_development(b, patterns, sig, cfg)?),
                    ),
                    Formula::Exists(v, g) => {
                        Justification::Exists(v.clone(), Box::new(is_development(g, patterns, sig, cfg)?))
                    }
                    _ => return None,
                }
            }
        }
    };
    Some(Witness { formula: psi.clone(), rule })
}

// --- semantic check ----------------------------------------------------------

/// Resources for [`check_answerhood`] and [`decide_entailment`].
#[derive(Clone, Debug)]
pub struct CheckBudget {
    pub timeout: Duration,
    pub max_gamma: u32,
    pub max_branches: usize,
    pub oracle: Bounds,
}

impl Default for CheckBudget {
    fn default() -> Self {
        CheckBudget { timeout: Duration::from_secs(10), max_gamma: 6, max_branches: 4096, oracle: Bounds::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
    Unknown,
}

impl Decision {
    /// Exit status convention: 0 yes, 1 no, 2 unknown.
    pub fn exit_code(self) -> i32 {
        match self {
            Decision::Yes => 0,
            Decision::No => 1,
            Decision::Unknown => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub decision: Decision,
    pub sequent: Sequent,
    /// Multiplicity at which the prover closed the tableau.
    pub proof_gamma: Option<u32>,
    pub countermodel: Option<Countermodel>,
    /// True if the prover exhausted its search space without a proof.
    pub saturated: bool,
}

enum Report {
    Prover(ProofResult),
    Oracle(Result<Verdict, OracleError>),
}

/// Decides `?Φ ⊨_χ ?ψ`: the prover works on the reduced classical sequent
/// while the oracle looks for a two-world countermodel. The first definitive
/// verdict cancels the other search.
pub fn decide_entailment(
    questions: &[Question],
    context: &Formula,
    target: &Question,
    sig: &Signature,
    budget: &CheckBudget,
) -> Result<CheckOutcome, CheckError> {
    if budget.timeout.is_zero() || budget.max_gamma == 0 || budget.oracle.max_domain == 0 {
        return Err(CheckError::EmptyBudget);
    }
    if !context.is_closed() {
        return Err(CheckError::NotClosed(context.to_string()));
    }
    let sequent = reduce_entailment(questions, context, target, sig);
    let trimmed = sequent.without_trivial();
    let cancel = std::sync::Arc::new(AtomicBool::new(false));
    let cfg = ProverConfig {
        max_gamma: budget.max_gamma,
        max_branches: budget.max_branches,
        max_steps: u64::MAX,
        timeout: Some(budget.timeout),
        cancel: Some(cancel.clone()),
    };
    let mut outcome =
        CheckOutcome { decision: Decision::Unknown, sequent, proof_gamma: None, countermodel: None, saturated: false };
    std::thread::scope(|s| {
        let (tx, rx) = mpsc::channel();
        let ptx = tx.clone();
        s.spawn(move || {
            let r = prove(&trimmed.premises, &trimmed.conclusion, &cfg).unwrap_or(ProofResult::Unknown);
            let _ = ptx.send(Report::Prover(r));
        });
        let flag = &cancel;
        s.spawn(move || {
            let r = entails_bounded_cancellable(questions, context, target, sig, budget.oracle, flag);
            let _ = tx.send(Report::Oracle(r));
        });
        for _ in 0..2 {
            let Ok(report) = rx.recv() else { break };
            match report {
                Report::Prover(ProofResult::Valid { gamma }) => {
                    outcome.decision = Decision::Yes;
                    outcome.proof_gamma = Some(gamma);
                }
                Report::Prover(ProofResult::Invalid) => {
                    outcome.decision = Decision::No;
                    outcome.saturated = true;
                }
                Report::Oracle(Ok(Verdict::Countermodel(c))) => {
                    outcome.decision = Decision::No;
                    outcome.countermodel = Some(c);
                }
                _ => {}
            }
            if outcome.decision != Decision::Unknown {
                cancel.store(true, Ordering::Relaxed);
                break;
            }
        }
        cancel.store(true, Ordering::Relaxed);
    });
    Ok(outcome)
}

/// Decides whether the closed formula `psi` answers `?Φ` in context `χ`.
pub fn check_answerhood(
    psi: &Formula,
    questions: &[Question],
    context: &Formula,
    sig: &Signature,
    budget: &CheckBudget,
) -> Result<CheckOutcome, CheckError> {
    if !psi.is_closed() {
        return Err(CheckError::NotClosed(psi.to_string()));
    }
    decide_entailment(questions, context, &Question::new(psi.clone()), sig, budget)
}

// --- enumeration ---------------------------------------------------------------

/// Limits for [`enumerate_developments`].
#[derive(Clone, Copy, Debug)]
pub struct DevelopmentBounds {
    /// Maximum number of connectives and quantifiers (surface count: ∨, →,
    /// ∀ count once).
    pub connectives: usize,
    /// Stop once this many formulas (open or closed) have been built.
    pub max_formulas: usize,
}

impl Default for DevelopmentBounds {
    fn default() -> Self {
        DevelopmentBounds { connectives: 2, max_formulas: 20_000 }
    }
}

const VARIABLE_POOL: [&str; 4] = ["X", "Y", "Z", "U"];

/// Closed developments of `patterns` built from rigid constants of `sig`
/// and a small variable pool, by increasing number of connectives.
pub fn enumerate_developments(
    patterns: &[Formula],
    sig: &Signature,
    cfg: DevelopmentConfig,
    bounds: DevelopmentBounds,
) -> Vec<Formula> {
    let width = patterns.iter().map(|p| p.free_variables().len()).max().unwrap_or(0).clamp(1, VARIABLE_POOL.len());
    let vars: Vec<Var> = VARIABLE_POOL[..width].iter().map(|n| Var::new(*n)).collect();
    let mut pool: Vec<Term> = sig.rigid_constants().into_iter().map(|c| Term::App(c, Vec::new())).collect();
    pool.extend(vars.iter().cloned().map(Term::Var));

    let mut seen: HashSet<Formula> = HashSet::new();
    let mut layers: Vec<Vec<Formula>> = vec![Vec::new()];
    let mut total = 0usize;
    let mut push = |layer: &mut Vec<Formula>, f: Formula, seen: &mut HashSet<Formula>| {
        if total < bounds.max_formulas && seen.insert(f.clone()) {
            total += 1;
            layer.push(f);
        }
    };
    let mut base = vec![Formula::Top, Formula::Bottom];
    for p in patterns {
        let free = p.free_variables();
        let mut idx = vec![0usize; free.len()];
        loop {
            let sigma = Substitution::from_pairs(free.iter().cloned().zip(idx.iter().map(|&i| pool[i].clone())));
            base.push(sigma.apply(p));
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < pool.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    if cfg.equality_allowed {
        for (i, s) in pool.iter().enumerate() {
            for t in &pool[i + 1..] {
                base.push(Formula::equal(s.clone(), t.clone()));
            }
        }
    }
    for f in base {
        push(&mut layers[0], f, &mut seen);
    }
    let usable = |f: &Formula| !matches!(f, Formula::Top | Formula::Bottom);
    for n in 1..=bounds.connectives {
        let mut layer = Vec::new();
        for a in layers[n - 1].iter().filter(|f| usable(f)) {
            if a.as_not().is_none() {
                push(&mut layer, Formula::not(a.clone()), &mut seen);
            }
            let free = a.free_variables();
            for v in vars.iter().filter(|v| free.contains(v)) {
                push(&mut layer, Formula::exists(v.clone(), a.clone()), &mut seen);
                push(&mut layer, Formula::forall(v.clone(), a.clone()), &mut seen);
            }
        }
        for i in 0..n {
            let j = n - 1 - i;
            if i > j {
                break;
            }
            for (x, a) in layers[i].iter().enumerate().filter(|(_, f)| usable(f)) {
                for (y, b) in layers[j].iter().enumerate().filter(|(_, f)| usable(f)) {
                    if i == j && y <= x {
                        continue;
                    }
                    push(&mut layer, Formula::and(a.clone(), b.clone()), &mut seen);
                    push(&mut layer, Formula::or(a.clone(), b.clone()), &mut seen);
                }
            }
        }
        layers.push(layer);
    }
    layers.into_iter().flatten().filter(Formula::is_closed).collect()
}
