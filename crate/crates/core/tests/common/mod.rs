#![allow(dead_code)]

use std::path::PathBuf;

use erotetic_core::problem::Problem;
use erotetic_core::syntax::{parse_formula, ParseOptions, Parsed};
use erotetic_core::{Formula, Signature};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Every corpus problem, sorted by file name.
pub fn corpus() -> Vec<(String, Problem)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "p"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let problem = Problem::load(&p).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, problem)
        })
        .collect()
}

pub fn load(name: &str) -> Problem {
    Problem::load(corpus_dir().join(format!("{name}.p"))).unwrap()
}

/// Parses with the problem's signature, generated names allowed.
pub fn formula(problem: &Problem, text: &str) -> Formula {
    let mut sig: Signature = problem.sig.clone();
    match erotetic_core::syntax::parse_with(text, &mut sig, ParseOptions { allow_reserved: true }).unwrap() {
        Parsed::Formula(f) => f,
        Parsed::Question(q) => q.into_body(),
    }
}

pub fn plain(text: &str) -> Formula {
    parse_formula(text, &mut Signature::new()).unwrap()
}
