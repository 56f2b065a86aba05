use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use erotetic_bench::load;
use erotetic_core::development::{
    decide_entailment, enumerate_developments, CheckBudget, DevelopmentBounds, DevelopmentConfig,
};
use erotetic_core::oracle::{entails_bounded, Bounds};
use erotetic_core::prover::{prove, ProverConfig};
use erotetic_core::qa::{answer_stream, QaConfig};
use erotetic_core::{Formula, Question};

fn answers(c: &mut Criterion) {
    let mut g = c.benchmark_group("answers");
    g.sample_size(10);
    for (name, level) in [("two_branches", 2), ("invited", 3), ("chain", 3), ("unbounded_order", 3)] {
        let p = load(name);
        let questions = p.effective_questions();
        let cfg = QaConfig { max_level: level, ..QaConfig::default() };
        g.bench_with_input(BenchmarkId::new(name, level), &cfg, |b, cfg| {
            b.iter(|| answer_stream(&p.axioms, &questions, &p.sig, cfg).unwrap().count())
        });
    }
    let p = load("horn_path");
    let cfg = QaConfig { max_level: 4, horn: true, assume_rigid: true, ..QaConfig::default() };
    g.bench_function("horn_path", |b| {
        b.iter(|| answer_stream(&p.axioms, &p.effective_questions(), &p.sig, &cfg).unwrap().count())
    });
}

fn entailment(c: &mut Criterion) {
    let mut g = c.benchmark_group("entailment");
    for name in ["rigid_name", "nonrigid_name", "context_equivalence"] {
        let p = load(name);
        let questions = p.effective_questions();
        let target = Question::new(p.conjecture.clone().unwrap());
        let context = p.context_formula();
        g.bench_function(BenchmarkId::new("decide", name), |b| {
            b.iter(|| decide_entailment(&questions, &context, &target, &p.sig, &CheckBudget::default()).unwrap())
        });
        g.bench_function(BenchmarkId::new("oracle", name), |b| {
            b.iter(|| entails_bounded(&questions, &context, &target, &p.sig, Bounds::default()).unwrap())
        });
    }
}

fn proving(c: &mut Criterion) {
    let p = load("unbounded_order");
    let goal = erotetic_core::syntax::parse_formula("forall X. exists Y. ~i(X, Y)", &mut p.sig.clone()).unwrap();
    let cfg = ProverConfig::default();
    c.bench_function("prove/unbounded_order", |b| b.iter(|| prove(black_box(&p.axioms), &goal, &cfg).unwrap()));
}

fn developments(c: &mut Criterion) {
    let p = load("two_rigid");
    let patterns: Vec<Formula> = p.effective_questions().iter().map(|q| q.body().clone()).collect();
    let cfg = DevelopmentConfig { equality_allowed: false };
    c.bench_function("developments/two_rigid", |b| {
        b.iter(|| enumerate_developments(&patterns, &p.sig, cfg, DevelopmentBounds::default()).len())
    });
}

criterion_group!(benches, answers, entailment, proving, developments);
criterion_main!(benches);
