//! Depth-first free-variable tableau search in the style of leanTAP.
//!
//! Bindings are global to the tableau; a branch closes by unifying a new
//! literal with a complementary one already on it, and the remaining
//! branches are proved in a continuation so that failure there backtracks
//! into the choice of closing pair.

use std::collections::{HashMap, VecDeque};
use std::rc::Rc;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use super::repr::{Context, Lit, Store, C};

#[derive(Clone, Debug)]
pub(crate) struct Limits {
    pub max_steps: u64,
    pub max_branches: usize,
    pub deadline: Option<Instant>,
    pub cancel: Option<Arc<AtomicBool>>,
}

#[derive(Clone, Default)]
pub(crate) struct Branch {
    pub agenda: Vec<Rc<C>>,
    lits: Vec<Rc<Lit>>,
    betas: VecDeque<Rc<C>>,
    gammas: Vec<(Rc<C>, u32)>,
}

impl Branch {
    pub fn new(roots: Vec<Rc<C>>) -> Self {
        let mut agenda = roots;
        agenda.reverse();
        Branch { agenda, ..Branch::default() }
    }
}

/// How one branch was closed.
#[derive(Clone, Debug)]
pub(crate) enum Closing {
    Pair(Rc<Lit>, Rc<Lit>),
    Bottom,
}

pub(crate) struct Engine<'c> {
    pub ctx: &'c mut Context,
    pub store: Store,
    k: u32,
    limits: Limits,
    steps: u64,
    open_branches: usize,
    pub aborted: bool,
    /// Some branch gave up because of the multiplicity or branch bound.
    pub limited: bool,
    pub closings: Vec<Closing>,
    /// Rejects a closing pair just made; checked whenever the pair involves
    /// a question instance or binds a variable.
    pub prune: Option<Box<dyn FnMut(&Engine<'c>) -> bool + 'c>>,
}

impl<'c> Engine<'c> {
    pub fn new(ctx: &'c mut Context, k: u32, limits: Limits) -> Self {
        Engine {
            ctx,
            store: Store::default(),
            k,
            limits,
            steps: 0,
            open_branches: 1,
            aborted: false,
            limited: false,
            closings: Vec::new(),
            prune: None,
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn tick(&mut self) -> bool {
        self.steps += 1;
        if self.steps > self.limits.max_steps {
            self.aborted = true;
        } else if self.steps.is_multiple_of(1024) {
            if self.limits.deadline.is_some_and(|d| Instant::now() >= d) {
                self.aborted = true;
            }
            if self.limits.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed)) {
                self.aborted = true;
            }
        }
        self.aborted
    }

    fn pruned(&mut self) -> bool {
        match self.prune.take() {
            Some(mut p) => {
                let r = p(self);
                self.prune = Some(p);
                r
            }
            None => false,
        }
    }

    fn instantiate(&mut self, b: &mut Branch, i: usize) {
        let (gamma, count) = &mut b.gammas[i];
        *count += 1;
        let C::All(vars, body) = &**gamma else { unreachable!("gamma list holds universals") };
        let map: HashMap<u32, u32> = vars.iter().map(|&v| (v, self.ctx.fresh_var())).collect();
        b.agenda.push(body.rename(&map));
    }

    /// Expands and closes `b`, then runs `cont` for the remaining branches.
    /// Returns true to stop the whole search.
    pub fn branch(&mut self, mut b: Branch, cont: &mut dyn FnMut(&mut Self) -> bool) -> bool {
        loop {
            if self.tick() {
                return true;
            }
            if let Some(item) = b.agenda.pop() {
                match &*item {
                    C::True => {}
                    C::False => {
                        self.closings.push(Closing::Bottom);
                        let stop = cont(self);
                        self.closings.pop();
                        return stop;
                    }
                    C::Lit(l) => {
                        let duplicate = b.lits.iter().any(|o| {
                            o.positive == l.positive
                                && o.pred == l.pred
                                && (o.inst.is_none() || o.inst == l.inst)
                                && o.args.iter().zip(l.args.iter()).all(|(x, y)| self.store.identical(x, y))
                        });
                        if duplicate {
                            continue;
                        }
                        let lit = Rc::new(l.clone());
                        let candidates: Vec<Rc<Lit>> = b
                            .lits
                            .iter()
                            .filter(|o| o.pred == lit.pred && o.positive != lit.positive)
                            // Two question instances closing against each other
                            // only ever yield a tautological answer set.
                            .filter(|o| o.inst.is_none() || lit.inst.is_none())
                            .cloned()
                            .collect();
                        if candidates.is_empty() {
                            b.lits.push(lit);
                            continue;
                        }
                        return self.add_literal(b, lit, candidates, cont);
                    }
                    C::And(xs) => b.agenda.extend(xs.iter().rev().cloned()),
                    C::Or(_) => b.betas.push_back(item),
                    C::All(..) => b.gammas.push((item, 0)),
                }
                continue;
            }
            if self.k > 0 {
                if let Some(i) = b.gammas.iter().position(|(_, n)| *n == 0) {
                    self.instantiate(&mut b, i);
                    continue;
                }
            }
            if let Some(beta) = b.betas.pop_front() {
                return self.split(b, beta, cont);
            }
            let least = b.gammas.iter().enumerate().min_by_key(|(_, (_, n))| *n).map(|(i, (_, n))| (i, *n));
            match least {
                Some((i, n)) if n < self.k => self.instantiate(&mut b, i),
                Some(_) => {
                    self.limited = true;
                    return false;
                }
                None => return false,
            }
        }
    }

    fn add_literal(
        &mut self,
        mut b: Branch,
        lit: Rc<Lit>,
        candidates: Vec<Rc<Lit>>,
        cont: &mut dyn FnMut(&mut Self) -> bool,
    ) -> bool {
        for other in candidates {
            let mark = self.store.mark();
            if self.store.unify_args(&lit.args, &other.args) {
                let no_new_bindings = self.store.mark() == mark;
                let tag_free = lit.inst.is_none() && other.inst.is_none();
                self.closings.push(Closing::Pair(lit.clone(), other));
                if !(no_new_bindings && tag_free) && self.pruned() {
                    self.closings.pop();
                    self.store.undo(mark);
                    continue;
                }
                let stop = cont(self);
                self.closings.pop();
                self.store.undo(mark);
                if stop {
                    return true;
                }
                // Any other way to go on from here needs at least these
                // bindings and at least these instances.
                if no_new_bindings && tag_free {
                    return false;
                }
            } else {
                self.store.undo(mark);
            }
        }
        b.lits.push(lit);
        self.branch(b, cont)
    }

    fn split(&mut self, b: Branch, beta: Rc<C>, cont: &mut dyn FnMut(&mut Self) -> bool) -> bool {
        let C::Or(xs) = &*beta else { unreachable!("beta list holds disjunctions") };
        let extra = xs.len() - 1;
        if self.open_branches + extra > self.limits.max_branches {
            self.limited = true;
            return false;
        }
        self.open_branches += extra;
        let stop = self.split_from(&b, xs, 0, cont);
        self.open_branches -= extra;
        stop
    }

    fn split_from(&mut self, b: &Branch, xs: &[Rc<C>], i: usize, cont: &mut dyn FnMut(&mut Self) -> bool) -> bool {
        let mut bi = b.clone();
        bi.agenda.push(xs[i].clone());
        if i + 1 == xs.len() {
            return self.branch(bi, cont);
        }
        self.branch(bi, &mut |e: &mut Self| e.split_from(b, xs, i + 1, cont))
    }
}
