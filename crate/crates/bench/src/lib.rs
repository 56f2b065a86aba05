//! Fixtures shared by the benchmarks: the regression corpus.

use std::path::PathBuf;

use erotetic_core::problem::Problem;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn load(name: &str) -> Problem {
    let path = corpus_dir().join(format!("{name}.p"));
    Problem::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
