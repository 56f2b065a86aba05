//! Answer generation: answer literals, the Add Instance rule, synthesis of
//! answers from closures, unskolemization and the fair answer stream.

mod horn;
mod reference;
mod session;
mod simplify;
mod unskolem;

use std::collections::{HashMap, VecDeque};
use std::time::{Duration, Instant};

pub use horn::check_horn;
pub use reference::reference_answers;
pub use session::QaSession;
pub use simplify::{canonical_key, present, simplify, tidy_variables};
pub use unskolem::{unskolemize, unskolemize_with};

use crate::error::{ProverError, QaError};
use crate::prover::{
    enumerate_closures, equality_axioms, prove, skolemize, EnumerationConfig, ProverConfig, SkolemizedTheory,
};
pub use crate::prover::{is_tautological, most_general_sets, set_subsumes};
use crate::syntax::{alpha_eq, Formula, Question, Signature, Substitution, Term};

/// Prefix of generated answer-literal predicates.
pub const ANSWER_PREFIX: &str = "$ans";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EqualityMode {
    /// `=` is an uninterpreted predicate.
    #[default]
    Off,
    /// Reflexivity and replacement axioms are added to the theory.
    Axioms,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Algorithm {
    /// Closure-driven answer stream.
    #[default]
    Tableau,
    /// Enumerate developments and prove each one.
    Enumerate,
}

#[derive(Clone, Debug)]
pub struct QaConfig {
    /// Last deepening level (k + m) to run.
    pub max_level: u32,
    pub max_answers: Option<usize>,
    /// Largest m: instances per question and polarity.
    pub max_instances: usize,
    pub timeout: Option<Duration>,
    pub horn: bool,
    /// Treat every declared function symbol as rigid.
    pub assume_rigid: bool,
    pub equality: EqualityMode,
    pub algorithm: Algorithm,
    /// Step budget of one closure enumeration.
    pub step_budget: u64,
    pub max_branches: usize,
    pub max_closures: usize,
    /// Step budget of each direction of an equivalence check.
    pub equivalence_budget: u64,
}

impl Default for QaConfig {
    fn default() -> Self {
        QaConfig {
            max_level: 6,
            max_answers: None,
            max_instances: 2,
            timeout: None,
            horn: false,
            assume_rigid: false,
            equality: EqualityMode::Off,
            algorithm: Algorithm::Tableau,
            step_budget: 400_000,
            max_branches: 4096,
            max_closures: 500,
            equivalence_budget: 30_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Answer {
    pub formula: Formula,
    pub level: u32,
    /// Gamma multiplicity (k) of the run that found it.
    pub gamma: u32,
    /// Instances per question and polarity (m).
    pub instances: usize,
    /// The most general closures, each projected onto the instances it uses.
    pub closures: Vec<Vec<Formula>>,
}

/// The atomic question standing in for one user question.
#[derive(Clone, Debug, PartialEq)]
pub struct AnswerLiteral {
    pub question: Question,
    pub atom: Formula,
    /// `∀x̄ (P(x̄) ↔ body)` when `P` was generated.
    pub definition: Option<Formula>,
}

impl AnswerLiteral {
    fn predicate(&self) -> &str {
        match &self.atom {
            Formula::Atom(p, _) => p,
            _ => unreachable!("answer literals are atoms"),
        }
    }
}

/// One answer literal per question. Atomic questions over rigid symbols are
/// kept as they are; any other question gets a fresh predicate, so that the
/// non-rigid symbols it mentions are never generalized away.
pub fn introduce_answer_literal(questions: &[Question], sig: &Signature) -> Vec<AnswerLiteral> {
    questions
        .iter()
        .enumerate()
        .map(|(i, q)| match q.body() {
            Formula::Atom(..) if q.body().functions().iter().all(|(f, _)| sig.is_rigid(f)) => {
                AnswerLiteral { question: q.clone(), atom: q.body().clone(), definition: None }
            }
            body => {
                let vars = q.free_vars().to_vec();
                let atom = Formula::atom(format!("{ANSWER_PREFIX}{i}"), vars.iter().cloned().map(Term::Var).collect());
                let definition = Formula::forall_many(&vars, Formula::iff(atom.clone(), body.clone()));
                AnswerLiteral { question: q.clone(), atom, definition: Some(definition) }
            }
        })
        .collect()
}

/// Replaces every generated `P(t̄)` by the question body at `t̄`.
pub fn rewrite_answer_literals(f: &Formula, literals: &[AnswerLiteral]) -> Formula {
    f.map_atoms(&mut |a| {
        if let Formula::Atom(p, args) = a {
            for lit in literals.iter().filter(|l| l.definition.is_some()) {
                if lit.predicate() == &**p {
                    let sigma =
                        Substitution::from_pairs(lit.question.free_vars().iter().cloned().zip(args.iter().cloned()));
                    return sigma.apply(lit.question.body());
                }
            }
        }
        a.clone()
    })
}

/// `∀(¬⋀ S)`.
pub fn ans_formula(set: &[Formula]) -> Formula {
    Formula::not(Formula::conj(set.iter().cloned())).universal_closure()
}

/// Theory, answer literals and signature shared by the answer engines.
#[derive(Clone, Debug)]
pub(crate) struct Prepared {
    pub sig: Signature,
    pub literals: Vec<AnswerLiteral>,
    pub formulas: Vec<Formula>,
    pub theory: SkolemizedTheory,
}

impl Prepared {
    pub fn new(axioms: &[Formula], questions: &[Question], sig: &Signature, cfg: &QaConfig) -> Result<Self, QaError> {
        if questions.is_empty() {
            return Err(QaError::NoQuestion);
        }
        if let Some(open) = axioms.iter().find(|f| !f.is_closed()) {
            return Err(ProverError::NotClosed(open.to_string()).into());
        }
        let mut sig = sig.clone();
        for f in axioms.iter().chain(questions.iter().map(Question::body)) {
            sig.absorb(f)?;
        }
        if cfg.assume_rigid {
            sig.assume_all_rigid();
        }
        if cfg.horn {
            if let Some(q) = questions.iter().find(|q| !matches!(q.body(), Formula::Atom(..))) {
                return Err(QaError::NonAtomicQuestion(q.body().to_string()));
            }
        }
        let literals = introduce_answer_literal(questions, &sig);
        let mut formulas: Vec<Formula> = axioms.iter().filter(|f| **f != Formula::Top).cloned().collect();
        if cfg.equality == EqualityMode::Axioms {
            let mut scope = formulas.clone();
            scope.extend(questions.iter().map(|q| q.body().clone()));
            formulas.extend(equality_axioms(&scope));
        }
        formulas.extend(literals.iter().filter_map(|l| l.definition.clone()));
        let theory = skolemize(&formulas);
        if cfg.horn {
            check_horn(&theory)?;
        }
        Ok(Prepared { sig, literals, formulas, theory })
    }

    pub fn is_rigid(&self, f: &str) -> bool {
        self.sig.is_rigid(f)
    }

    /// Mentions a Skolem or other non-rigid function symbol that does not
    /// come from a question.
    pub fn forbidden(&self, f: &Formula) -> bool {
        f.functions().iter().any(|(g, _)| {
            !self.is_rigid(g)
                && !self.literals.iter().any(|l| l.question.body().functions().iter().any(|(h, _)| h == g))
        })
    }

    /// Unskolemize, simplify, rewrite answer literals, simplify, tidy, present.
    pub fn finish(&self, psi0: &Formula) -> Formula {
        let u = unskolemize_with(psi0, &|f| self.is_rigid(f));
        let r = rewrite_answer_literals(&simplify(&u), &self.literals);
        present(&tidy_variables(&simplify(&r)))
    }

    /// Fresh copy of answer literal `i` with variables `_I{n}`.
    pub fn instance(&self, i: usize, counter: &mut usize) -> Formula {
        let atom = &self.literals[i].atom;
        let sigma = Substitution::from_pairs(atom.free_variables().into_iter().map(|v| {
            *counter += 1;
            (v, Term::var(format!("_I{counter}")))
        }));
        sigma.apply(atom)
    }
}

fn equivalent(a: &Formula, b: &Formula, budget: u64) -> bool {
    if alpha_eq(a, b) || canonical_key(a) == canonical_key(b) {
        return true;
    }
    let cfg = ProverConfig { max_gamma: 3, max_branches: 1024, max_steps: budget, ..ProverConfig::default() };
    let entails = |x: &Formula, y: &Formula| prove(std::slice::from_ref(x), y, &cfg).is_ok_and(|r| r.is_valid());
    entails(a, b) && entails(b, a)
}

/// Pull-based answer stream over deepening levels `k + m`.
pub struct AnswerStream {
    prepared: Prepared,
    cfg: QaConfig,
    deadline: Option<Instant>,
    level: u32,
    pairs: VecDeque<(u32, usize)>,
    pending: VecDeque<Answer>,
    emitted: Vec<Formula>,
    /// Whether the theory entails the universal closure of an instance
    /// literal, by canonical key.
    valid_literals: HashMap<String, bool>,
    started: bool,
    done: bool,
    produced: usize,
    truncated: bool,
    timed_out: bool,
}

/// Starts the answer stream for `questions` over `axioms`. Symbols not in
/// `sig` are taken to be non-rigid.
pub fn answer_stream(
    axioms: &[Formula],
    questions: &[Question],
    sig: &Signature,
    cfg: &QaConfig,
) -> Result<AnswerStream, QaError> {
    let prepared = Prepared::new(axioms, questions, sig, cfg)?;
    Ok(AnswerStream {
        prepared,
        cfg: cfg.clone(),
        deadline: cfg.timeout.map(|t| Instant::now() + t),
        level: 0,
        pairs: VecDeque::new(),
        pending: VecDeque::new(),
        emitted: Vec::new(),
        valid_literals: HashMap::new(),
        started: false,
        done: false,
        produced: 0,
        truncated: false,
        timed_out: false,
    })
}

/// Collects answers with either algorithm.
pub fn answers(
    axioms: &[Formula],
    questions: &[Question],
    sig: &Signature,
    cfg: &QaConfig,
) -> Result<Vec<Answer>, QaError> {
    match cfg.algorithm {
        Algorithm::Tableau => Ok(answer_stream(axioms, questions, sig, cfg)?.collect()),
        Algorithm::Enumerate => reference_answers(axioms, questions, sig, cfg),
    }
}

impl AnswerStream {
    /// Answers emitted so far.
    pub fn emitted(&self) -> &[Formula] {
        &self.emitted
    }

    /// True if some closure enumeration hit its budget.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// True if the stream ended because the timeout passed.
    pub fn timed_out(&self) -> bool {
        self.timed_out
    }

    /// The level currently being explored.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn literals(&self) -> &[AnswerLiteral] {
        &self.prepared.literals
    }

    /// The Skolemized theory the tableau runs on, answer-literal definitions
    /// included. The closures of every answer are refutations over it.
    pub fn theory(&self) -> Vec<Formula> {
        self.prepared.theory.to_formulas()
    }

    fn schedule(&self, level: u32) -> VecDeque<(u32, usize)> {
        if self.cfg.horn {
            return if level >= 1 { VecDeque::from([(level - 1, 1)]) } else { VecDeque::new() };
        }
        let top = (level as usize).min(self.cfg.max_instances);
        // Cheaper runs (fewer universal instances) first.
        (1..=top).rev().map(|m| (level - m as u32, m)).collect()
    }

    fn offer(&mut self, formula: Formula, k: u32, m: usize, closures: Vec<Vec<Formula>>) {
        if self.prepared.forbidden(&formula) {
            return;
        }
        let budget = self.cfg.equivalence_budget;
        if self.emitted.iter().any(|e| equivalent(e, &formula, budget)) {
            return;
        }
        self.emitted.push(formula.clone());
        self.pending.push_back(Answer { formula, level: k + m as u32, gamma: k, instances: m, closures });
    }

    /// Σ ⊨ ∀L. Such a literal can be left out of a closure set: the rest of
    /// the set is refuted on its own.
    fn theory_entails(&mut self, lit: &Formula) -> bool {
        let goal = lit.universal_closure();
        let key = canonical_key(&goal);
        if let Some(&known) = self.valid_literals.get(&key) {
            return known;
        }
        let cfg = ProverConfig {
            max_gamma: 2,
            max_branches: 1024,
            max_steps: self.cfg.equivalence_budget,
            ..ProverConfig::default()
        };
        let theory = self.prepared.theory.to_formulas();
        let valid = prove(&theory, &goal, &cfg).is_ok_and(|r| r.is_valid());
        self.valid_literals.insert(key, valid);
        valid
    }

    fn run(&mut self, k: u32, m: usize) {
        let mut counter = 0;
        let mut instances = Vec::new();
        for i in 0..self.prepared.literals.len() {
            for _ in 0..m {
                instances.push((self.prepared.instance(i, &mut counter), false));
                if !self.cfg.horn {
                    instances.push((self.prepared.instance(i, &mut counter), true));
                }
            }
        }
        let ecfg = EnumerationConfig {
            max_closures: self.cfg.max_closures,
            max_branches: self.cfg.max_branches,
            max_steps: self.cfg.step_budget,
            deadline: self.deadline,
        };
        let search = enumerate_closures(&self.prepared.theory, &instances, k, &ecfg);
        self.truncated |= !search.complete;
        let sets: Vec<Vec<Formula>> = most_general_sets(
            search
                .closures
                .into_iter()
                .map(|c| c.into_iter().map(|(_, l)| l).filter(|l| !self.theory_entails(l)).collect())
                .collect(),
        );
        if sets.is_empty() {
            return;
        }
        if self.cfg.horn {
            for s in sets {
                let f = self.prepared.finish(&ans_formula(&s));
                self.offer(f, k, m, vec![s]);
            }
        } else {
            let psi0 = Formula::conj(sets.iter().map(|s| ans_formula(s)));
            let f = self.prepared.finish(&psi0);
            self.offer(f, k, m, sets);
        }
    }
}

impl Iterator for AnswerStream {
    type Item = Answer;

    fn next(&mut self) -> Option<Answer> {
        loop {
            if self.cfg.max_answers.is_some_and(|n| self.produced >= n) {
                return None;
            }
            if let Some(a) = self.pending.pop_front() {
                self.produced += 1;
                return Some(a);
            }
            if self.done {
                return None;
            }
            if !self.started {
                self.started = true;
                self.offer(Formula::Top, 0, 0, Vec::new());
                continue;
            }
            if self.deadline.is_some_and(|d| Instant::now() >= d) {
                self.done = true;
                self.timed_out = true;
                continue;
            }
            match self.pairs.pop_front() {
                Some((k, m)) => self.run(k, m),
                None => {
                    self.level += 1;
                    if self.level > self.cfg.max_level {
                        self.done = true;
                    } else {
                        self.pairs = self.schedule(self.level);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_question, Rigidity};

    fn setup(axioms: &[&str], question: &str, rigid: &[&str]) -> (Vec<Formula>, Vec<Question>, Signature) {
        let mut sig = Signature::new();
        for r in rigid {
            sig.declare_function(r, 0, Rigidity::Rigid).unwrap();
        }
        let ax = axioms.iter().map(|a| parse_formula(a, &mut sig).unwrap()).collect();
        let q = parse_question(question, &mut sig).unwrap();
        (ax, vec![q], sig)
    }

    fn stream(axioms: &[&str], question: &str, rigid: &[&str], cfg: &QaConfig) -> Vec<Answer> {
        let (ax, qs, sig) = setup(axioms, question, rigid);
        answer_stream(&ax, &qs, &sig, cfg).unwrap().collect()
    }

    fn shown(answers: &[Answer]) -> Vec<String> {
        answers.iter().map(|a| a.formula.to_string()).collect()
    }

    #[test]
    fn answer_literal_for_compound_or_nonrigid_questions() {
        let mut sig = Signature::new();
        let atomic = parse_question("p(X)", &mut sig).unwrap();
        let compound = parse_question("p(X) & q(X)", &mut sig).unwrap();
        sig.declare_function("a", 0, Rigidity::Rigid).unwrap();
        let named = parse_question("r(a, X)", &mut sig).unwrap();
        let nonrigid = parse_question("r(c, X)", &mut sig).unwrap();
        let lits = introduce_answer_literal(&[atomic, compound, named, nonrigid], &sig);
        assert_eq!(lits[0].definition, None);
        assert_eq!(lits[0].atom.to_string(), "p(X)");
        assert_eq!(lits[1].atom.to_string(), "$ans1(X)");
        assert_eq!(lits[1].definition.as_ref().unwrap().to_string(), "forall X. $ans1(X) <-> p(X) & q(X)");
        let back = rewrite_answer_literals(&Formula::atom("$ans1", vec![Term::constant("a")]), &lits);
        assert_eq!(back.to_string(), "p(a) & q(a)");
        assert_eq!(lits[2].definition, None);
        assert_eq!(lits[3].atom.to_string(), "$ans3(X)");
    }

    #[test]
    fn nonrigid_symbol_of_the_question_is_kept() {
        let out = stream(&["r(c, b)", "r(c, d)"], "r(c, X)", &["b"], &QaConfig::default());
        let shown = shown(&out);
        assert!(out.iter().any(|a| a.formula.conjuncts().iter().any(|c| c.to_string() == "r(c, b)")), "{shown:?}");
        assert!(shown.iter().all(|f| !f.contains("d)")), "{shown:?}");
    }

    #[test]
    fn two_branches() {
        let out = stream(&["(p(a) & p(c)) | (p(b) & p(c))"], "p(X)", &["a", "b", "c"], &QaConfig::default());
        assert_eq!(shown(&out)[0], "true");
        assert_eq!(out[1].formula.to_string(), "p(c)");
        assert!(out[1].level <= 2);
    }

    #[test]
    fn both_rigid_constants() {
        let out = stream(&["p(a) & p(b)"], "p(X)", &["a", "b"], &QaConfig::default());
        assert!(shown(&out).contains(&"p(a) & p(b)".to_string()), "{:?}", shown(&out));
    }

    #[test]
    fn nonrigid_constant_is_generalized() {
        let out = stream(&["p(c)"], "p(X)", &[], &QaConfig::default());
        assert_eq!(shown(&out), vec!["true", "exists X. p(X)"]);
    }

    #[test]
    fn empty_theory_gives_only_top() {
        let cfg = QaConfig { max_level: 3, ..QaConfig::default() };
        assert_eq!(shown(&stream(&[], "p(X)", &[], &cfg)), vec!["true"]);
    }

    #[test]
    fn inconsistent_theory_gives_bottom() {
        let out = stream(&["q & ~q"], "p(X)", &[], &QaConfig::default());
        assert!(shown(&out).contains(&"false".to_string()));
    }

    #[test]
    fn max_answers_stops_the_stream() {
        let cfg = QaConfig { max_answers: Some(1), ..QaConfig::default() };
        assert_eq!(stream(&["p(a)"], "p(X)", &["a"], &cfg).len(), 1);
    }

    #[test]
    fn compound_question_is_rewritten() {
        let out = stream(&["p(a)", "q(a)"], "p(X) & q(X)", &["a"], &QaConfig::default());
        assert!(shown(&out).contains(&"p(a) & q(a)".to_string()), "{:?}", shown(&out));
    }

    #[test]
    fn universal_answer() {
        let out = stream(&["forall X. p(X)"], "p(X)", &[], &QaConfig::default());
        assert!(shown(&out).contains(&"forall X. p(X)".to_string()), "{:?}", shown(&out));
    }
}
