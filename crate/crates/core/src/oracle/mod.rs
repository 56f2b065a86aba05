//! Brute-force semantics: finite constant-domain modal structures, partitions,
//! and bounded search for counterexamples to question entailment.

mod enumerate;
mod model;

pub use enumerate::{
    classical_countermodel, entails_bounded, entails_bounded_cancellable, holds_everywhere, is_answer_bounded,
    partition, partition_equivalent, Bounds, Countermodel, Verdict,
};
pub use model::{evaluate, structure_from, Assignment, ModalModel, Structure, Vocabulary};
