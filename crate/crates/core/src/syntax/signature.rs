use std::collections::BTreeMap;

use super::formula::Formula;
use super::term::{Name, Term};
use crate::error::SignatureError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rigidity {
    Rigid,
    NonRigid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FunctionInfo {
    pub arity: usize,
    pub rigidity: Rigidity,
}

/// Existence predicate introduced by relativization.
pub const EXISTENCE_PREDICATE: &str = "e";

/// Generated symbols use a `$` prefix or a trailing prime, neither of which
/// the surface grammar admits outside reserved-symbol parsing.
pub fn is_reserved_symbol(name: &str) -> bool {
    name.starts_with('$') || name.contains('\'')
}

/// Predicate and function symbols with arities and per-function rigidity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    predicates: BTreeMap<Name, usize>,
    functions: BTreeMap<Name, FunctionInfo>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_predicate(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        if self.functions.contains_key(name) {
            return Err(SignatureError::KindClash(name.to_string()));
        }
        match self.predicates.get(name) {
            Some(&a) if a != arity => {
                Err(SignatureError::ArityMismatch { symbol: name.to_string(), expected: a, found: arity })
            }
            Some(_) => Ok(()),
            None => {
                self.predicates.insert(name.into(), arity);
                Ok(())
            }
        }
    }

    /// Declares a function symbol. Re-declaring with the same arity keeps the
    /// strongest rigidity seen (an explicit `rigid` declaration wins).
    pub fn declare_function(&mut self, name: &str, arity: usize, rigidity: Rigidity) -> Result<(), SignatureError> {
        if self.predicates.contains_key(name) {
            return Err(SignatureError::KindClash(name.to_string()));
        }
        match self.functions.get_mut(name) {
            Some(info) if info.arity != arity => {
                Err(SignatureError::ArityMismatch { symbol: name.to_string(), expected: info.arity, found: arity })
            }
            Some(info) => {
                if rigidity == Rigidity::Rigid {
                    info.rigidity = Rigidity::Rigid;
                }
                Ok(())
            }
            None => {
                self.functions.insert(name.into(), FunctionInfo { arity, rigidity });
                Ok(())
            }
        }
    }

    pub fn predicate_arity(&self, name: &str) -> Option<usize> {
        self.predicates.get(name).copied()
    }

    pub fn function(&self, name: &str) -> Option<FunctionInfo> {
        self.functions.get(name).copied()
    }

    /// Unknown function symbols count as non-rigid.
    pub fn is_rigid(&self, name: &str) -> bool {
        matches!(self.functions.get(name), Some(FunctionInfo { rigidity: Rigidity::Rigid, .. }))
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&Name, usize)> {
        self.predicates.iter().map(|(n, a)| (n, *a))
    }

    pub fn functions(&self) -> impl Iterator<Item = (&Name, FunctionInfo)> {
        self.functions.iter().map(|(n, i)| (n, *i))
    }

    pub fn rigid_constants(&self) -> Vec<Name> {
        self.functions
            .iter()
            .filter(|(_, i)| i.arity == 0 && i.rigidity == Rigidity::Rigid)
            .map(|(n, _)| n.clone())
            .collect()
    }

    /// Marks every function symbol rigid.
    pub fn assume_all_rigid(&mut self) {
        for info in self.functions.values_mut() {
            info.rigidity = Rigidity::Rigid;
        }
    }

    /// Declares every symbol of `f` that is not declared yet (functions
    /// default to non-rigid) and checks arities of the rest.
    pub fn absorb(&mut self, f: &Formula) -> Result<(), SignatureError> {
        for (p, n) in f.predicates() {
            self.declare_predicate(&p, n)?;
        }
        for (g, n) in f.functions() {
            self.declare_function(&g, n, Rigidity::NonRigid)?;
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &Signature) -> Result<(), SignatureError> {
        for (p, n) in other.predicates() {
            self.declare_predicate(p, n)?;
        }
        for (g, info) in other.functions() {
            self.declare_function(g, info.arity, info.rigidity)?;
        }
        Ok(())
    }

    /// A term is rigid if it is built from variables and rigid function symbols.
    pub fn is_rigid_term(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App(f, args) => self.is_rigid(f) && args.iter().all(|a| self.is_rigid_term(a)),
        }
    }
}
