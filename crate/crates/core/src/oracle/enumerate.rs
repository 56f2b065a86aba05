use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use super::model::{compile, eval, extension, tuples, Compiled, ModalModel, Structure, Vocabulary};
use crate::error::OracleError;
use crate::syntax::{Formula, Question, Rigidity, Signature};

/// Search limits for bounded model enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_worlds: usize,
    pub max_domain: usize,
    /// Cap on single-world structures visited for one domain size.
    pub max_structures: u128,
    /// Worker threads for evaluating structures; 1 runs inline.
    pub jobs: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_worlds: 2, max_domain: 3, max_structures: 1 << 22, jobs: 1 }
    }
}

#[derive(Clone, Debug)]
pub struct Countermodel {
    pub model: ModalModel,
    pub w: usize,
    pub v: usize,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    /// No countermodel with domains up to `domain` (possibly smaller than
    /// requested when the structure cap cut the search short).
    NoCountermodel {
        domain: usize,
    },
    Countermodel(Countermodel),
}

impl Verdict {
    pub fn is_countermodel(&self) -> bool {
        matches!(self, Verdict::Countermodel(_))
    }
}

/// One adjustable entry of a structure: a relation bit or a function value.
#[derive(Clone, Copy, Debug)]
enum Cell {
    Rel(usize, usize),
    Fun(usize, usize),
}

/// Mixed-radix layout of all structures over a vocabulary and domain.
struct Layout {
    d: usize,
    rigid: Vec<Cell>,
    flexible: Vec<Cell>,
}

impl Layout {
    fn new(vocab: &Vocabulary, d: usize) -> Self {
        let mut rigid = Vec::new();
        let mut flexible = Vec::new();
        for (i, (_, a)) in vocab.predicates.iter().enumerate() {
            flexible.extend((0..tuples(d, *a)).map(|c| Cell::Rel(i, c)));
        }
        for (i, (_, a, r)) in vocab.functions.iter().enumerate() {
            let cells = (0..tuples(d, *a)).map(|c| Cell::Fun(i, c));
            match r {
                Rigidity::Rigid => rigid.extend(cells),
                Rigidity::NonRigid => flexible.extend(cells),
            }
        }
        Layout { d, rigid, flexible }
    }

    fn radix(&self, c: Cell) -> u128 {
        match c {
            Cell::Rel(..) => 2,
            Cell::Fun(..) => self.d as u128,
        }
    }

    fn count(&self, cells: &[Cell]) -> u128 {
        cells.iter().try_fold(1u128, |acc, &c| acc.checked_mul(self.radix(c))).unwrap_or(u128::MAX)
    }

    fn set(s: &mut Structure, c: Cell, value: usize) {
        match c {
            Cell::Rel(i, code) => s.relations[i][code] = value == 1,
            Cell::Fun(i, code) => s.functions[i][code] = value,
        }
    }

    fn get(s: &Structure, c: Cell) -> usize {
        match c {
            Cell::Rel(i, code) => s.relations[i][code] as usize,
            Cell::Fun(i, code) => s.functions[i][code],
        }
    }

    /// Sets `cells` to the digits of `index` (first cell least significant).
    fn decode(&self, s: &mut Structure, cells: &[Cell], mut index: u128) {
        for &c in cells {
            let r = self.radix(c);
            Self::set(s, c, (index % r) as usize);
            index /= r;
        }
    }

    /// Odometer step; false once every combination has been visited.
    fn increment(&self, s: &mut Structure, cells: &[Cell]) -> bool {
        for &c in cells {
            let next = Self::get(s, c) + 1;
            if (next as u128) < self.radix(c) {
                Self::set(s, c, next);
                return true;
            }
            Self::set(s, c, 0);
        }
        false
    }
}

/// What a single world looks like to the entailment check.
struct Probe {
    context: Compiled,
    questions: Vec<Compiled>,
    target: Compiled,
}

impl Probe {
    /// `None` if the context fails; otherwise the question extensions (the
    /// partition key) and the target extension.
    fn observe(&self, s: &Structure, d: usize) -> Option<(Vec<bool>, Vec<bool>)> {
        let mut env = vec![0usize; self.context.slots.max(1)];
        if !eval(&self.context.formula, s, d, &mut env) {
            return None;
        }
        let mut key = Vec::new();
        for q in &self.questions {
            extension(q, s, d, &mut key);
        }
        let mut target = Vec::new();
        extension(&self.target, s, d, &mut target);
        Some((key, target))
    }
}

fn observe_block(
    probe: &Probe,
    layout: &Layout,
    base: &Structure,
    start: u128,
    len: u128,
) -> Vec<Option<(Vec<bool>, Vec<bool>)>> {
    let mut s = base.clone();
    layout.decode(&mut s, &layout.flexible, start);
    let mut out = Vec::with_capacity(len as usize);
    for i in 0..len {
        if i > 0 {
            layout.increment(&mut s, &layout.flexible);
        }
        out.push(probe.observe(&s, layout.d));
    }
    out
}

const BLOCK: u128 = 1 << 12;

/// Bounded check of `?Φ ⊨_χ ?ψ`.
///
/// A violating pair of worlds survives restriction to a two-world submodel,
/// so only |W| = 2 is searched (one world can never violate refinement).
/// Per domain size and rigid interpretation, single-world structures are
/// enumerated in lexicographic order and grouped by their Φ-extensions; the
/// first structure whose ψ-extension differs from the earliest member of its
/// group yields the countermodel.
pub fn entails_bounded(
    questions: &[Question],
    context: &Formula,
    target: &Question,
    sig: &Signature,
    bounds: Bounds,
) -> Result<Verdict, OracleError> {
    entails_bounded_cancellable(questions, context, target, sig, bounds, &AtomicBool::new(false))
}

/// Like [`entails_bounded`], but gives up with `Ok(None)` once `cancel` is
/// set (checked between blocks of structures), returning
/// `OracleError::Cancelled`.
pub fn entails_bounded_cancellable(
    questions: &[Question],
    context: &Formula,
    target: &Question,
    sig: &Signature,
    bounds: Bounds,
    cancel: &AtomicBool,
) -> Result<Verdict, OracleError> {
    if !context.is_closed() {
        return Err(OracleError::NotClosed(context.to_string()));
    }
    let formulas: Vec<&Formula> = questions.iter().map(Question::body).chain([context, target.body()]).collect();
    let vocab = Arc::new(Vocabulary::from_formulas(formulas, sig));
    let probe = Probe {
        context: compile(context, &vocab, &[])?,
        questions: questions.iter().map(|q| compile(q.body(), &vocab, q.free_vars())).collect::<Result<_, _>>()?,
        target: compile(target.body(), &vocab, target.free_vars())?,
    };
    let mut searched = 0;
    if bounds.max_worlds < 2 {
        return Ok(Verdict::NoCountermodel { domain: bounds.max_domain });
    }
    for d in 1..=bounds.max_domain {
        let layout = Layout::new(&vocab, d);
        let rigid_count = layout.count(&layout.rigid);
        let flex_count = layout.count(&layout.flexible);
        let total = rigid_count.saturating_mul(flex_count);
        if total > bounds.max_structures {
            if d == 1 {
                return Err(OracleError::BoundOverflow(total));
            }
            break;
        }
        let mut base = Structure::empty(&vocab, d);
        for r in 0..rigid_count {
            layout.decode(&mut base, &layout.rigid, r);
            layout.decode(&mut base, &layout.flexible, 0);
            if cancel.load(Ordering::Relaxed) {
                return Err(OracleError::Cancelled);
            }
            if let Some((i, j)) = scan(&probe, &layout, &base, flex_count, bounds.jobs, cancel)? {
                let mut w = base.clone();
                layout.decode(&mut w, &layout.flexible, i);
                let mut v = base.clone();
                layout.decode(&mut v, &layout.flexible, j);
                let model = ModalModel::new(vocab.clone(), d, vec![w, v])?;
                return Ok(Verdict::Countermodel(Countermodel { model, w: 0, v: 1 }));
            }
        }
        searched = d;
    }
    Ok(Verdict::NoCountermodel { domain: searched })
}

/// Returns the canonical violating pair of flexible indices, if any.
fn scan(
    probe: &Probe,
    layout: &Layout,
    base: &Structure,
    count: u128,
    jobs: usize,
    cancel: &AtomicBool,
) -> Result<Option<(u128, u128)>, OracleError> {
    let mut groups: HashMap<Vec<bool>, (u128, Vec<bool>)> = HashMap::new();
    let jobs = jobs.max(1) as u128;
    let mut start = 0u128;
    while start < count {
        if cancel.load(Ordering::Relaxed) {
            return Err(OracleError::Cancelled);
        }
        let chunk = (BLOCK * jobs).min(count - start);
        let results: Vec<Option<(Vec<bool>, Vec<bool>)>> = if jobs == 1 {
            observe_block(probe, layout, base, start, chunk)
        } else {
            let per = chunk.div_ceil(jobs);
            std::thread::scope(|scope| {
                let handles: Vec<_> = (0..jobs)
                    .map(|k| k * per)
                    .filter(|&off| off < chunk)
                    .map(|off| {
                        let len = per.min(chunk - off);
                        scope.spawn(move || observe_block(probe, layout, base, start + off, len))
                    })
                    .collect();
                handles.into_iter().flat_map(|h| h.join().expect("oracle worker panicked")).collect()
            })
        };
        for (k, obs) in results.into_iter().enumerate() {
            let Some((key, ext)) = obs else { continue };
            let j = start + k as u128;
            match groups.get(&key) {
                Some((i, first)) if *first != ext => return Ok(Some((*i, j))),
                Some(_) => {}
                None => {
                    groups.insert(key, (j, ext));
                }
            }
        }
        start += chunk;
    }
    Ok(None)
}

/// Bounded check that the closed formula `answer` is an answer to `?Φ`.
pub fn is_answer_bounded(
    answer: &Formula,
    questions: &[Question],
    sig: &Signature,
    bounds: Bounds,
) -> Result<Verdict, OracleError> {
    if !answer.is_closed() {
        return Err(OracleError::NotClosed(answer.to_string()));
    }
    entails_bounded(questions, &Formula::Top, &Question::new(answer.clone()), sig, bounds)
}

/// `(w, v) ∈ [?φ]_M`: every assignment of the free variables gives the body
/// the same truth value at both worlds.
pub fn partition_equivalent(m: &ModalModel, w: usize, v: usize, q: &Question) -> Result<bool, OracleError> {
    let sw = m.world(w).ok_or(OracleError::NoSuchWorld(w))?;
    let sv = m.world(v).ok_or(OracleError::NoSuchWorld(v))?;
    let c = compile(q.body(), m.vocabulary(), q.free_vars())?;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    extension(&c, sw, m.domain_size(), &mut a);
    extension(&c, sv, m.domain_size(), &mut b);
    Ok(a == b)
}

/// `[?Φ]_M` as a boolean matrix over worlds. The empty question set relates
/// every pair.
pub fn partition(m: &ModalModel, questions: &[Question]) -> Result<Vec<Vec<bool>>, OracleError> {
    let n = m.world_count();
    let mut rel = vec![vec![true; n]; n];
    for q in questions {
        for (w, row) in rel.iter_mut().enumerate() {
            for (v, cell) in row.iter_mut().enumerate() {
                if *cell && !partition_equivalent(m, w, v, q)? {
                    *cell = false;
                }
            }
        }
    }
    Ok(rel)
}

/// Whether `f` holds at every world.
pub fn holds_everywhere(m: &ModalModel, f: &Formula) -> Result<bool, OracleError> {
    if !f.is_closed() {
        return Err(OracleError::NotClosed(f.to_string()));
    }
    let c = compile(f, m.vocabulary(), &[])?;
    let mut env = vec![0usize; c.slots.max(1)];
    Ok((0..m.world_count()).all(|w| eval(&c.formula, m.world(w).expect("in range"), m.domain_size(), &mut env)))
}

/// Searches one-world (classical) models, domain sizes 1..=`max_domain`, for
/// one satisfying every premise and falsifying the conclusion. Rigidity plays
/// no role here.
pub fn classical_countermodel(
    premises: &[Formula],
    conclusion: &Formula,
    max_domain: usize,
    max_structures: u128,
) -> Result<Option<ModalModel>, OracleError> {
    for f in premises.iter().chain([conclusion]) {
        if !f.is_closed() {
            return Err(OracleError::NotClosed(f.to_string()));
        }
    }
    let negated = Formula::not(conclusion.clone());
    let all = Formula::conj(premises.iter().cloned().chain([negated]));
    let vocab = Arc::new(Vocabulary::from_formulas([&all], &Signature::new()));
    let c = compile(&all, &vocab, &[])?;
    let mut env = vec![0usize; c.slots.max(1)];
    for d in 1..=max_domain {
        let layout = Layout::new(&vocab, d);
        let cells: Vec<Cell> = layout.rigid.iter().chain(&layout.flexible).copied().collect();
        let total = layout.count(&cells);
        if total > max_structures {
            if d == 1 {
                return Err(OracleError::BoundOverflow(total));
            }
            break;
        }
        let mut s = Structure::empty(&vocab, d);
        loop {
            if eval(&c.formula, &s, d, &mut env) {
                return Ok(Some(ModalModel::new(vocab, d, vec![s])?));
            }
            if !layout.increment(&mut s, &cells) {
                break;
            }
        }
    }
    Ok(None)
}
