//! Explicit free-variable tableau over the core connectives, for stepwise
//! use, tracing and closure inspection. Proof search proper lives in
//! `search`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use super::normal::SkolemizedTheory;
use crate::error::ProverError;
use crate::syntax::{mgu, Formula, Substitution, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Theory,
    /// Produced by expanding occurrence `from`.
    Rule {
        from: usize,
    },
    /// Added instance number `index` of the question.
    Instance {
        index: usize,
        positive: bool,
    },
}

#[derive(Clone, Debug)]
pub struct Node {
    pub id: usize,
    pub parent: Option<usize>,
    pub formula: Formula,
    pub provenance: Provenance,
}

/// A substitution σ and occurrence set κ such that on every branch, κ after
/// σ contains a formula and its negation (or ⊥).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    pub sigma: Substitution,
    pub kappa: BTreeSet<usize>,
}

impl Closure {
    /// Checks the defining property against `t`.
    pub fn closes(&self, t: &Tableau) -> bool {
        (0..t.branch_count()).all(|b| {
            let on: Vec<Formula> = t
                .path(b)
                .into_iter()
                .filter(|id| self.kappa.contains(id))
                .map(|id| self.sigma.apply(&t.nodes[id].formula))
                .collect();
            on.iter().any(|f| {
                matches!(f, Formula::Bottom) || f.as_not().is_some_and(|g| matches!(g, Formula::Top) || on.contains(g))
            })
        })
    }

    /// `self` is at least as general as `other`.
    pub fn subsumes(&self, other: &Closure) -> bool {
        self.kappa.is_subset(&other.kappa) && self.sigma.is_more_general_than(&other.sigma)
    }
}

#[derive(Clone, Debug, Default)]
struct BranchState {
    leaf: Option<usize>,
    done: HashSet<usize>,
    gamma: HashMap<usize, u32>,
}

#[derive(Clone, Debug, Default)]
pub struct Tableau {
    nodes: Vec<Node>,
    branches: Vec<BranchState>,
    next_var: usize,
    instances: Vec<(Formula, bool)>,
}

enum Rule {
    Alpha(Vec<Formula>),
    Beta(Formula, Formula),
    Gamma(Var, Formula),
}

fn rule_for(f: &Formula) -> Option<Rule> {
    match f {
        Formula::And(a, b) => Some(Rule::Alpha(vec![(**a).clone(), (**b).clone()])),
        Formula::Not(g) => match &**g {
            Formula::Not(h) => Some(Rule::Alpha(vec![(**h).clone()])),
            Formula::And(a, b) => Some(Rule::Beta(Formula::not((**a).clone()), Formula::not((**b).clone()))),
            Formula::Exists(v, h) => Some(Rule::Gamma(v.clone(), Formula::not((**h).clone()))),
            _ => None,
        },
        _ => None,
    }
}

impl Tableau {
    /// A single branch holding `formulas` in order.
    pub fn new(formulas: &[Formula]) -> Self {
        let mut t = Tableau { branches: vec![BranchState::default()], ..Tableau::default() };
        for f in formulas {
            t.push(0, f.clone(), Provenance::Theory);
        }
        t
    }

    pub fn from_theory(theory: &SkolemizedTheory) -> Self {
        Tableau::new(&theory.to_formulas())
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// Added question instances, in order, with their polarity.
    pub fn instances(&self) -> &[(Formula, bool)] {
        &self.instances
    }

    /// Occurrence ids on branch `b`, root first.
    pub fn path(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.branches.get(b).and_then(|s| s.leaf);
        while let Some(id) = cur {
            out.push(id);
            cur = self.nodes[id].parent;
        }
        out.reverse();
        out
    }

    pub fn branch_formulas(&self, b: usize) -> Vec<&Formula> {
        self.path(b).into_iter().map(|id| &self.nodes[id].formula).collect()
    }

    fn push(&mut self, b: usize, formula: Formula, provenance: Provenance) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node { id, parent: self.branches[b].leaf, formula, provenance });
        self.branches[b].leaf = Some(id);
        id
    }

    pub fn fresh_var(&mut self) -> Var {
        self.next_var += 1;
        Var::new(format!("_Y{}", self.next_var))
    }

    /// Adds `f` below every leaf.
    pub fn add_to_all_branches(&mut self, f: &Formula, provenance: Provenance) -> Vec<usize> {
        (0..self.branches.len()).map(|b| self.push(b, f.clone(), provenance.clone())).collect()
    }

    /// Adds a copy of the question atom with fresh variables, positively or
    /// negated, to the whole tableau.
    pub fn add_instance(&mut self, atom: &Formula, positive: bool) -> Vec<usize> {
        let sigma =
            Substitution::from_pairs(atom.free_variables().into_iter().map(|v| (v, Term::Var(self.fresh_var()))));
        let inst = sigma.apply(atom);
        let lit = if positive { inst.clone() } else { Formula::not(inst.clone()) };
        let index = self.instances.len();
        self.instances.push((inst, positive));
        self.add_to_all_branches(&lit, Provenance::Instance { index, positive })
    }

    /// Applies the rule matching `occurrence` on branch `b`.
    pub fn expand(&mut self, b: usize, occurrence: usize) -> Result<(), ProverError> {
        if b >= self.branches.len() {
            return Err(ProverError::NoSuchBranch(b));
        }
        if !self.path(b).contains(&occurrence) {
            return Err(ProverError::NotOnBranch { occurrence, branch: b });
        }
        let from = Provenance::Rule { from: occurrence };
        match rule_for(&self.nodes[occurrence].formula).ok_or(ProverError::NoApplicableRule(occurrence))? {
            Rule::Alpha(parts) => {
                self.branches[b].done.insert(occurrence);
                for p in parts {
                    self.push(b, p, from.clone());
                }
            }
            Rule::Beta(left, right) => {
                self.branches[b].done.insert(occurrence);
                let mut copy = self.branches[b].clone();
                let parent = copy.leaf;
                let id = self.nodes.len();
                self.nodes.push(Node { id, parent, formula: right, provenance: from.clone() });
                copy.leaf = Some(id);
                self.push(b, left, from);
                self.branches.insert(b + 1, copy);
            }
            Rule::Gamma(v, body) => {
                *self.branches[b].gamma.entry(occurrence).or_insert(0) += 1;
                let y = self.fresh_var();
                let inst = Substitution::singleton(v, Term::Var(y)).apply(&body);
                self.push(b, inst, from);
            }
        }
        Ok(())
    }

    /// Expands every branch until no rule applies, instantiating each
    /// universal at most `k` times per branch. Returns the number of rule
    /// applications, or stops early once `max_steps` is reached.
    pub fn saturate(&mut self, k: u32, max_steps: usize) -> usize {
        let mut steps = 0;
        while steps < max_steps {
            let Some((b, id)) = self.next_expansion(k) else {
                break;
            };
            self.expand(b, id).expect("selected occurrence is expandable");
            steps += 1;
        }
        steps
    }

    fn next_expansion(&self, k: u32) -> Option<(usize, usize)> {
        let mut gamma: Option<(u32, usize, usize)> = None;
        let mut beta: Option<(usize, usize)> = None;
        for b in 0..self.branches.len() {
            let st = &self.branches[b];
            for id in self.path(b) {
                match rule_for(&self.nodes[id].formula) {
                    Some(Rule::Alpha(_)) if !st.done.contains(&id) => return Some((b, id)),
                    Some(Rule::Beta(..)) if !st.done.contains(&id) => {
                        beta.get_or_insert((b, id));
                    }
                    Some(Rule::Gamma(..)) => {
                        let n = st.gamma.get(&id).copied().unwrap_or(0);
                        if n < k && gamma.is_none_or(|(m, ..)| n < m) {
                            gamma = Some((n, b, id));
                        }
                    }
                    _ => {}
                }
            }
        }
        match gamma {
            Some((0, b, id)) => Some((b, id)),
            _ => beta.or(gamma.map(|(_, b, id)| (b, id))),
        }
    }

    /// Ways to close branch `b` on its own: κ and the term pairs to unify.
    fn branch_candidates(&self, b: usize) -> Vec<(Vec<usize>, Vec<(Term, Term)>)> {
        let path = self.path(b);
        let mut out = Vec::new();
        for &i in &path {
            let f = &self.nodes[i].formula;
            if matches!(f, Formula::Bottom) || matches!(f.as_not(), Some(Formula::Top)) {
                out.push((vec![i], Vec::new()));
            }
        }
        for &i in &path {
            let pos = &self.nodes[i].formula;
            if !pos.is_atomic() {
                continue;
            }
            for &j in &path {
                let Some(neg) = self.nodes[j].formula.as_not() else {
                    continue;
                };
                let pairs = match (pos, neg) {
                    (Formula::Atom(p, xs), Formula::Atom(q, ys)) if p == q && xs.len() == ys.len() => {
                        xs.iter().cloned().zip(ys.iter().cloned()).collect()
                    }
                    (Formula::Equal(s1, t1), Formula::Equal(s2, t2)) => {
                        vec![(s1.clone(), s2.clone()), (t1.clone(), t2.clone())]
                    }
                    _ => continue,
                };
                if mgu(&pairs).is_ok() {
                    out.push((vec![i, j], pairs));
                }
            }
        }
        out
    }

    /// All closures choosing one complementary pair per branch, reduced to
    /// the most general ones.
    pub fn find_most_general_closures(&self) -> Vec<Closure> {
        let cands: Vec<_> = (0..self.branches.len()).map(|b| self.branch_candidates(b)).collect();
        if cands.iter().any(Vec::is_empty) {
            return Vec::new();
        }
        let mut all = Vec::new();
        combine(&cands, 0, &mut Vec::new(), &mut BTreeSet::new(), &mut all);
        let mut kept: Vec<Closure> = Vec::new();
        for (i, c) in all.iter().enumerate() {
            let dominated = all.iter().enumerate().any(|(j, d)| j != i && d.subsumes(c) && (!c.subsumes(d) || j < i));
            if !dominated && !kept.contains(c) {
                kept.push(c.clone());
            }
        }
        kept
    }

    /// Indented dump: one line per occurrence with id, branches, formula and
    /// provenance.
    pub fn trace(&self) -> String {
        let mut on: HashMap<usize, Vec<usize>> = HashMap::new();
        for b in 0..self.branches.len() {
            for id in self.path(b) {
                on.entry(id).or_default().push(b);
            }
        }
        let mut children: HashMap<Option<usize>, Vec<usize>> = HashMap::new();
        for n in &self.nodes {
            children.entry(n.parent).or_default().push(n.id);
        }
        let mut out = String::new();
        let mut stack: Vec<(usize, usize)> =
            children.get(&None).into_iter().flatten().rev().map(|&id| (id, 0)).collect();
        while let Some((id, depth)) = stack.pop() {
            let n = &self.nodes[id];
            let prov = match &n.provenance {
                Provenance::Theory => "theory".to_string(),
                Provenance::Rule { from } => format!("from {from}"),
                Provenance::Instance { index, positive } => {
                    format!("instance {index}{}", if *positive { "+" } else { "-" })
                }
            };
            let branches: Vec<String> = on.get(&id).into_iter().flatten().map(|b| b.to_string()).collect();
            let _ = writeln!(
                out,
                "{:indent$}{id} [{}] {}  ({prov})",
                "",
                branches.join(","),
                n.formula,
                indent = depth * 2
            );
            let kids = children.get(&Some(id)).cloned().unwrap_or_default();
            let next = if kids.len() > 1 { depth + 1 } else { depth };
            stack.extend(kids.into_iter().rev().map(|k| (k, next)));
        }
        out
    }
}

fn combine(
    cands: &[Vec<(Vec<usize>, Vec<(Term, Term)>)>],
    b: usize,
    pairs: &mut Vec<(Term, Term)>,
    kappa: &mut BTreeSet<usize>,
    out: &mut Vec<Closure>,
) {
    const MAX_COMBINATIONS: usize = 100_000;
    if out.len() >= MAX_COMBINATIONS {
        return;
    }
    if b == cands.len() {
        if let Ok(sigma) = mgu(pairs) {
            out.push(Closure { sigma, kappa: kappa.clone() });
        }
        return;
    }
    for (ids, ps) in &cands[b] {
        let before = pairs.len();
        pairs.extend(ps.iter().cloned());
        if mgu(pairs).is_ok() {
            let added: Vec<usize> = ids.iter().copied().filter(|i| kappa.insert(*i)).collect();
            combine(cands, b + 1, pairs, kappa, out);
            for i in added {
                kappa.remove(&i);
            }
        }
        pairs.truncate(before);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::skolemize;
    use crate::syntax::{parse_formula, Signature};

    fn p(s: &str) -> Formula {
        parse_formula(s, &mut Signature::new()).unwrap()
    }

    #[test]
    fn two_branch_closure() {
        let mut t = Tableau::new(&[p("(p(a) & p(c)) | (p(b) & p(c))")]);
        t.saturate(1, 100);
        assert_eq!(t.branch_count(), 2);
        let added = t.add_instance(&p("p(X)"), false);
        assert_eq!(added.len(), 2);
        let closures = t.find_most_general_closures();
        let y = t.instances()[0].0.free_variables()[0].clone();
        let target =
            closures.iter().find(|c| c.sigma.get(&y) == Some(&Term::constant("c"))).expect("closure with y := c");
        assert!(target.closes(&t));
        assert!(added.iter().all(|id| target.kappa.contains(id)));
        assert_eq!(closures.len(), 1);
    }

    #[test]
    fn two_incomparable_closures() {
        let mut t = Tableau::new(&[p("p(a)"), p("p(b)")]);
        t.add_instance(&p("p(X)"), false);
        let cs = t.find_most_general_closures();
        assert_eq!(cs.len(), 2);
        for (i, c) in cs.iter().enumerate() {
            assert!(c.closes(&t));
            for (j, d) in cs.iter().enumerate() {
                assert!(i == j || !c.subsumes(d));
            }
        }
    }

    #[test]
    fn open_tableau_has_no_closure() {
        let t = Tableau::new(&[p("p(a)")]);
        assert!(t.find_most_general_closures().is_empty());
    }

    #[test]
    fn rules() {
        let mut t = Tableau::new(&[p("p(a) & p(c)"), p("~~p(c)"), p("~exists X. ~p(X)")]);
        t.expand(0, 0).unwrap();
        assert_eq!(t.branch_formulas(0).len(), 5);
        t.expand(0, 1).unwrap();
        assert_eq!(t.branch_formulas(0).last().unwrap().to_string(), "p(c)");
        t.expand(0, 2).unwrap();
        let last = t.branch_formulas(0).last().unwrap().to_string();
        assert!(last.starts_with("~~p(_Y"), "{last}");
        assert_eq!(t.expand(0, 3), Err(ProverError::NoApplicableRule(3)));
        assert_eq!(t.expand(4, 0), Err(ProverError::NoSuchBranch(4)));
    }

    #[test]
    fn fresh_instances_differ() {
        let mut t = Tableau::new(&[]);
        t.add_instance(&p("p(X)"), false);
        t.add_instance(&p("p(X)"), false);
        assert_ne!(t.instances()[0].0, t.instances()[1].0);
    }

    #[test]
    fn gamma_instance_closes() {
        let th = skolemize(&[p("forall X. p(X)")]);
        let mut t = Tableau::from_theory(&th);
        t.add_instance(&p("p(Z)"), false);
        t.saturate(1, 100);
        let cs = t.find_most_general_closures();
        assert_eq!(cs.len(), 1);
        assert!(cs[0].closes(&t));
        assert!(t.trace().contains("instance 0-"));
    }
}
