use std::collections::HashSet;
use std::time::Instant;

use super::{equivalent, Answer, EqualityMode, Prepared, QaConfig};
use crate::development::{enumerate_developments, DevelopmentBounds, DevelopmentConfig};
use crate::error::QaError;
use crate::prover::{prove, ProverConfig};
use crate::syntax::{Formula, Question, Signature};

/// Enumerates closed developments of the questions by number of connectives
/// up to `cfg.max_level` and reports those the prover shows entailed,
/// skipping equivalents of earlier reports.
pub fn reference_answers(
    axioms: &[Formula],
    questions: &[Question],
    sig: &Signature,
    cfg: &QaConfig,
) -> Result<Vec<Answer>, QaError> {
    let prepared = Prepared::new(axioms, questions, sig, cfg)?;
    let deadline = cfg.timeout.map(|t| Instant::now() + t);
    let patterns: Vec<Formula> = questions.iter().map(|q| q.body().clone()).collect();
    let dcfg = DevelopmentConfig { equality_allowed: cfg.equality == EqualityMode::Axioms };
    let pcfg =
        ProverConfig { max_gamma: 3, max_branches: 1024, max_steps: cfg.equivalence_budget, ..ProverConfig::default() };
    let mut seen: HashSet<Formula> = HashSet::new();
    let mut out: Vec<Answer> = Vec::new();
    for depth in 0..=cfg.max_level as usize {
        let bounds = DevelopmentBounds { connectives: depth, ..DevelopmentBounds::default() };
        for psi in enumerate_developments(&patterns, &prepared.sig, dcfg, bounds) {
            if deadline.is_some_and(|d| Instant::now() >= d) || cfg.max_answers.is_some_and(|n| out.len() >= n) {
                return Ok(out);
            }
            if !seen.insert(psi.clone()) {
                continue;
            }
            if !prove(&prepared.formulas, &psi, &pcfg).is_ok_and(|r| r.is_valid()) {
                continue;
            }
            if out.iter().any(|a| equivalent(&a.formula, &psi, cfg.equivalence_budget)) {
                continue;
            }
            out.push(Answer { formula: psi, level: depth as u32, gamma: 0, instances: 0, closures: Vec::new() });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_question, Rigidity};

    #[test]
    fn rigid_instance_and_existential() {
        let mut sig = Signature::new();
        sig.declare_function("a", 0, Rigidity::Rigid).unwrap();
        let ax = vec![parse_formula("p(a)", &mut sig).unwrap()];
        let q = vec![parse_question("p(X)", &mut sig).unwrap()];
        let cfg = QaConfig { max_level: 1, ..QaConfig::default() };
        let out: Vec<String> =
            reference_answers(&ax, &q, &sig, &cfg).unwrap().iter().map(|a| a.formula.to_string()).collect();
        assert!(out.contains(&"p(a)".to_string()), "{out:?}");
        assert!(out.contains(&"exists X. p(X)".to_string()), "{out:?}");
    }
}
