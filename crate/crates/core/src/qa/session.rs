use super::{ans_formula, Prepared, QaConfig};
use crate::error::QaError;
use crate::prover::{Closure, Provenance, Tableau};
use crate::syntax::{Formula, Question, Signature};

/// Stepwise question answering on an explicit tableau: the caller decides
/// when to expand, when to add instances and when to read off an answer.
pub struct QaSession {
    prepared: Prepared,
    tableau: Tableau,
    /// Question index of each added instance.
    registry: Vec<usize>,
    emitted: Vec<Formula>,
}

impl QaSession {
    pub fn new(axioms: &[Formula], questions: &[Question], sig: &Signature) -> Result<Self, QaError> {
        let prepared = Prepared::new(axioms, questions, sig, &QaConfig::default())?;
        let tableau = Tableau::from_theory(&prepared.theory);
        Ok(QaSession { prepared, tableau, registry: Vec::new(), emitted: Vec::new() })
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tableau
    }

    /// Atomic questions the session works with, one per user question.
    pub fn questions(&self) -> Vec<&Formula> {
        self.prepared.literals.iter().map(|l| &l.atom).collect()
    }

    /// Adds a fresh copy of question `question`'s atom to every branch and
    /// returns the new occurrence ids.
    pub fn add_instance(&mut self, question: usize, positive: bool) -> Vec<usize> {
        let atom = self.prepared.literals[question].atom.clone();
        self.registry.push(question);
        self.tableau.add_instance(&atom, positive)
    }

    /// Expands the tableau with multiplicity `k`; returns the rule
    /// applications made.
    pub fn expand(&mut self, k: u32, max_steps: usize) -> usize {
        self.tableau.saturate(k, max_steps)
    }

    pub fn closures(&self) -> Vec<Closure> {
        self.tableau.find_most_general_closures()
    }

    /// `∀(¬⋀ Φ_κ σ)` before any rewriting.
    pub fn ans(&self, closure: &Closure) -> Formula {
        let mut used: Vec<usize> = Vec::new();
        for id in &closure.kappa {
            if let Some(Provenance::Instance { index, .. }) = self.tableau.node(*id).map(|n| &n.provenance) {
                if !used.contains(index) {
                    used.push(*index);
                }
            }
        }
        used.sort_unstable();
        let set: Vec<Formula> = used
            .into_iter()
            .map(|i| {
                let (atom, positive) = &self.tableau.instances()[i];
                let lit = if *positive { atom.clone() } else { Formula::not(atom.clone()) };
                closure.sigma.apply(&lit)
            })
            .collect();
        ans_formula(&set)
    }

    /// The conjunction of `ans` over the most general closures, unskolemized
    /// and simplified.
    pub fn answer_step(&mut self) -> Result<Formula, QaError> {
        let closures = self.closures();
        if closures.is_empty() {
            return Err(QaError::NoClosure);
        }
        let psi0 = Formula::conj(closures.iter().map(|c| self.ans(c)));
        let answer = self.prepared.finish(&psi0);
        self.emitted.push(answer.clone());
        Ok(answer)
    }

    pub fn emitted(&self) -> &[Formula] {
        &self.emitted
    }

    /// Question index of each added instance, in order.
    pub fn instance_questions(&self) -> &[usize] {
        &self.registry
    }
}
