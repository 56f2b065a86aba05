//! One line per acceptance criterion; exits non-zero if any fails.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use erotetic_core::development::{is_development, DevelopmentConfig};
use erotetic_core::oracle::{entails_bounded, Bounds, Verdict};
use erotetic_core::problem::Problem;
use erotetic_core::prover::{prove, ProverConfig};
use erotetic_core::qa::{ans_formula, answer_stream, reference_answers, Answer, EqualityMode, QaConfig};
use erotetic_core::syntax::{alpha_eq, parse_formula};
use erotetic_core::translation::reduce_entailment;
use erotetic_core::{Formula, Question, Rigidity, Signature, Term, Var};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(format!("{name}.p"))
}

fn corpus_files() -> Vec<(String, Problem)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "p"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| (p.file_stem().unwrap().to_string_lossy().into_owned(), Problem::load(&p).unwrap()))
        .collect()
}

fn erotetic(args: &[&str]) -> (Output, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_erotetic")).args(args).output().expect("run erotetic");
    (out, start.elapsed())
}

/// `(formula, level)` for every `answer[i]: ... % level=L` line.
fn answer_lines(out: &Output) -> Vec<(String, u32)> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter_map(|l| {
            let rest = l.strip_prefix("answer[")?;
            let (_, rest) = rest.split_once("]: ")?;
            let (f, level) = rest.rsplit_once("  % level=")?;
            Some((f.to_string(), level.parse().ok()?))
        })
        .collect()
}

fn first_line(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).lines().next().unwrap_or("").to_string()
}

fn parse_in(problem: &Problem, text: &str) -> Formula {
    parse_formula(text, &mut problem.sig.clone()).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn entails_with(premises: &[Formula], goal: &Formula, max_gamma: u32, max_steps: u64) -> bool {
    let cfg = ProverConfig { max_gamma, max_steps, ..ProverConfig::default() };
    prove(premises, goal, &cfg).is_ok_and(|r| r.is_valid())
}

fn entails(premises: &[Formula], goal: &Formula) -> bool {
    entails_with(premises, goal, 4, 5_000_000)
}

fn equivalent(a: &Formula, b: &Formula) -> bool {
    entails(&[a.clone()], b) && entails(&[b.clone()], a)
}

fn qa_config(name: &str, max_level: u32) -> QaConfig {
    let horn = name.starts_with("horn_");
    QaConfig { max_level, horn, assume_rigid: horn, ..QaConfig::default() }
}

fn plain_config(max_level: u32) -> QaConfig {
    QaConfig { max_level, ..QaConfig::default() }
}

fn stream(problem: &Problem, cfg: &QaConfig) -> Vec<Answer> {
    answer_stream(&problem.axioms, &problem.effective_questions(), &problem.sig, cfg).unwrap().collect()
}

fn two_branches() -> Outcome {
    let file = corpus("two_branches");
    let (out, took) = erotetic(&["answer", file.to_str().unwrap(), "--max-level", "2"]);
    let problem = Problem::load(&file).unwrap();
    let target = parse_in(&problem, "p(c)");
    let hit =
        answer_lines(&out).into_iter().find(|(f, level)| *level <= 2 && equivalent(&parse_in(&problem, f), &target));
    match hit {
        Some((f, level)) if took < Duration::from_secs(1) => Ok(format!("{f} at level {level} in {took:.2?}")),
        Some(_) => Err(format!("found, but took {took:.2?}")),
        None => Err(format!("no answer equivalent to p(c): {}", String::from_utf8_lossy(&out.stdout))),
    }
}

fn entail_verdict(name: &str, extra: &[&str]) -> (String, Duration) {
    let file = corpus(name);
    let mut args = vec!["entail", file.to_str().unwrap()];
    args.extend_from_slice(extra);
    let (out, took) = erotetic(&args);
    (first_line(&out), took)
}

fn translation_pair() -> Outcome {
    let (rigid, t1) = entail_verdict("rigid_name", &[]);
    let (nonrigid, t2) = entail_verdict("nonrigid_name", &[]);
    let (oracle, _) = entail_verdict("nonrigid_name", &["--oracle", "--max-worlds", "2", "--max-domain", "1"]);
    let (wider, _) = entail_verdict("nonrigid_name", &["--oracle", "--max-worlds", "2", "--max-domain", "2"]);
    let detail = format!(
        "rigid: {rigid} ({t1:.2?}), non-rigid: {nonrigid} ({t2:.2?}), oracle |D|=1: {oracle}, oracle |D|=2: {wider}"
    );
    if rigid == "yes" && nonrigid == "no" && oracle == "no" && t1.max(t2) < Duration::from_secs(1) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn context_entailment() -> Outcome {
    let (verdict, took) = entail_verdict("context_equivalence", &[]);
    if verdict == "yes" && took < Duration::from_secs(5) {
        Ok(format!("yes in {took:.2?}"))
    } else {
        Err(format!("{verdict} in {took:.2?}"))
    }
}

fn unskolemization_pair() -> Outcome {
    let want = parse_formula("exists X. p(X)", &mut Signature::new()).unwrap();
    let mut shown = Vec::new();
    for name in ["nonrigid_constant", "existential"] {
        let file = corpus(name);
        let (out, _) = erotetic(&["answer", file.to_str().unwrap()]);
        let answers: Vec<String> = answer_lines(&out).into_iter().map(|(f, _)| f).filter(|f| f != "true").collect();
        if answers.iter().any(|f| f.contains('c') || f.contains('$')) {
            return Err(format!("{name}: forbidden symbol in {answers:?}"));
        }
        let exact = answers.len() == 1 && alpha_eq(&parse_formula(&answers[0], &mut Signature::new()).unwrap(), &want);
        if !exact {
            return Err(format!("{name}: {answers:?}"));
        }
        shown.push(format!("{name}: {}", answers[0]));
    }
    Ok(shown.join("; "))
}

/// Σ ⊨ ψ, conjunct by conjunct. A conjunct the prover misses directly is
/// proved by a cut on the answer's own lemma ψ0: Σ_sk ⊨ ψ0 and ψ0 ⊨ ψ.
fn certify(axioms: &[Formula], theory: &[Formula], definitions: &[Formula], a: &Answer) -> Result<(), String> {
    let psi0 = Formula::conj(a.closures.iter().map(|s| ans_formula(s)));
    let mut lemma_checked = false;
    for part in a.formula.conjuncts() {
        if entails(axioms, part) {
            continue;
        }
        if a.closures.is_empty() {
            return Err(format!("{part} not entailed"));
        }
        if !lemma_checked {
            if let Some(s) = a.closures.iter().find(|s| !entails(theory, &ans_formula(s))) {
                return Err(format!("closure {} not refuted by the theory", ans_formula(s)));
            }
            lemma_checked = true;
        }
        let mut premises = vec![psi0.clone()];
        premises.extend(definitions.iter().cloned());
        if !entails(&premises, part) {
            return Err(format!("{part} follows neither from the axioms nor from {psi0}"));
        }
    }
    Ok(())
}

fn soundness_sweep() -> Outcome {
    let start = Instant::now();
    let problems = corpus_files();
    if problems.len() < 20 {
        return Err(format!("corpus has only {} problems", problems.len()));
    }
    let mut checked = 0;
    let runs = problems.iter().flat_map(|(name, problem)| {
        let own = qa_config(name, 4);
        // Horn problems also go through the unrestricted mode.
        let plain = own.horn.then(|| plain_config(4));
        std::iter::once(own).chain(plain).map(move |cfg| (name, problem, cfg))
    });
    for (name, problem, cfg) in runs {
        let mut sig = problem.sig.clone();
        if cfg.assume_rigid {
            sig.assume_all_rigid();
        }
        let patterns: Vec<Formula> = problem.effective_questions().iter().map(|q| q.body().clone()).collect();
        let mut s = answer_stream(&problem.axioms, &problem.effective_questions(), &problem.sig, &cfg).unwrap();
        let answers: Vec<Answer> = s.by_ref().collect();
        let theory = s.theory();
        let definitions: Vec<Formula> = s.literals().iter().filter_map(|l| l.definition.clone()).collect();
        for a in answers {
            let f = &a.formula;
            certify(&problem.axioms, &theory, &definitions, &a).map_err(|e| format!("{name}: {f}: {e}"))?;
            if is_development(f, &patterns, &sig, DevelopmentConfig { equality_allowed: false }).is_none() {
                return Err(format!("{name}: not a development: {f}"));
            }
            let from_question = |g: &str| patterns.iter().any(|p| p.functions().iter().any(|(h, _)| &**h == g));
            if let Some((g, _)) = f.functions().into_iter().find(|(g, _)| !sig.is_rigid(g) && !from_question(g)) {
                return Err(format!("{name}: forbidden symbol {g} in {f}"));
            }
            checked += 1;
        }
    }
    let took = start.elapsed();
    let detail = format!("{checked} answers over {} problems in {took:.2?}", problems.len());
    if took < Duration::from_secs(60) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// A formula over unary `p`, `q`, constants `a`, `b` and the variables in
/// `free`, with at most `depth` connectives deep.
fn random_formula(rng: &mut StdRng, free: &[&str], depth: u32) -> Formula {
    let term = |rng: &mut StdRng| -> Term {
        let pool: Vec<Term> =
            free.iter().map(|v| Term::var(*v)).chain([Term::constant("a"), Term::constant("b")]).collect();
        pool[rng.gen_range(0..pool.len())].clone()
    };
    if depth == 0 || rng.gen_bool(0.3) {
        let pred = if rng.gen_bool(0.5) { "p" } else { "q" };
        return Formula::atom(pred, vec![term(rng)]);
    }
    match rng.gen_range(0..5) {
        0 => Formula::not(random_formula(rng, free, depth - 1)),
        1 => Formula::and(random_formula(rng, free, depth - 1), random_formula(rng, free, depth - 1)),
        2 => Formula::or(random_formula(rng, free, depth - 1), random_formula(rng, free, depth - 1)),
        3 => Formula::implies(random_formula(rng, free, depth - 1), random_formula(rng, free, depth - 1)),
        _ => {
            let mut inner = free.to_vec();
            inner.push("Z");
            let body = random_formula(rng, &inner, depth - 1);
            if rng.gen_bool(0.5) {
                Formula::exists(Var::new("Z"), body)
            } else {
                Formula::forall(Var::new("Z"), body)
            }
        }
    }
}

fn oracle_agreement() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let bounds = Bounds { max_worlds: 2, max_domain: 3, ..Bounds::default() };
    let cfg = ProverConfig { max_gamma: 3, max_steps: 200_000, ..ProverConfig::default() };
    let (mut valid, mut refuted, mut contradictions) = (0, 0, Vec::new());
    for i in 0..200 {
        let mut sig = Signature::new();
        for c in ["a", "b"] {
            if rng.gen_bool(0.5) {
                sig.declare_function(c, 0, Rigidity::Rigid).unwrap();
            }
        }
        let questions: Vec<Question> =
            (0..rng.gen_range(1..=2)).map(|_| Question::new(random_formula(&mut rng, &["X"], 2))).collect();
        let context = if rng.gen_bool(0.3) { random_formula(&mut rng, &[], 2) } else { Formula::Top };
        let target = Question::new(random_formula(&mut rng, &["Y"], 2));
        let sequent = reduce_entailment(&questions, &context, &target, &sig).without_trivial();
        let proved = prove(&sequent.premises, &sequent.conclusion, &cfg).is_ok_and(|r| r.is_valid());
        let verdict = entails_bounded(&questions, &context, &target, &sig, bounds).map_err(|e| e.to_string())?;
        let countermodel = matches!(verdict, Verdict::Countermodel(_));
        valid += proved as usize;
        refuted += countermodel as usize;
        if proved && countermodel {
            contradictions.push(format!("#{i}: {:?} |= {} ?{}", questions, context, target.body()));
        }
    }
    if contradictions.is_empty() {
        Ok(format!("200 instances, {valid} prover-valid, {refuted} oracle-refuted, 0 contradictions"))
    } else {
        Err(contradictions.join("; "))
    }
}

fn common_ground() -> Outcome {
    let file = corpus("invited");
    let problem = Problem::load(&file).unwrap();
    let (out, _) = erotetic(&["answer", file.to_str().unwrap(), "--max-level", "3"]);
    let target = parse_in(&problem, "forall X. (i(X) <-> p(X))");
    answer_lines(&out)
        .into_iter()
        .find(|(f, level)| *level <= 3 && entails(&[parse_in(&problem, f)], &target))
        .map(|(f, level)| format!("{f} at level {level}"))
        .ok_or_else(|| format!("no answer entails the equivalence: {}", String::from_utf8_lossy(&out.stdout)))
}

fn unbounded_order() -> Outcome {
    let problem = Problem::load(corpus("unbounded_order")).unwrap();
    let cfg = QaConfig {
        max_level: 1000,
        timeout: Some(Duration::from_secs(30)),
        equality: EqualityMode::Off,
        ..QaConfig::default()
    };
    let start = Instant::now();
    let mut s = answer_stream(&problem.axioms, &problem.effective_questions(), &problem.sig, &cfg).unwrap();
    let answers: Vec<Answer> = s.by_ref().collect();
    let took = start.elapsed();
    if !s.timed_out() {
        return Err(format!("the stream ended on its own after {took:.2?} at level {}", s.level()));
    }
    let informative: Vec<&Answer> = answers.iter().filter(|a| a.formula != Formula::Top).collect();
    // Longest chain, in emission order, where each answer strictly entails
    // the previous one.
    let n = informative.len();
    let mut best = vec![1usize; n];
    let mut prev = vec![None; n];
    for j in 0..n {
        for i in 0..j {
            let (a, b) = (&informative[i].formula, &informative[j].formula);
            if best[i] + 1 > best[j]
                && entails_with(&[b.clone()], a, 4, 2_000_000)
                && !entails_with(&[a.clone()], b, 4, 2_000_000)
            {
                best[j] = best[i] + 1;
                prev[j] = Some(i);
            }
        }
    }
    let Some(end) = (0..n).max_by_key(|&j| best[j]) else {
        return Err("no informative answer".into());
    };
    if best[end] < 2 {
        return Err(format!("no strictly stronger pair among {n} answers"));
    }
    let mut chain = vec![end];
    while let Some(i) = prev[*chain.last().unwrap()] {
        chain.push(i);
    }
    let levels: Vec<String> = chain.iter().rev().map(|&i| informative[i].level.to_string()).collect();
    Ok(format!(
        "{n} answers in {took:.2?}, reached level {} before the budget; strict chain at levels {}",
        s.level(),
        levels.join(" < ")
    ))
}

fn horn() -> Outcome {
    let expected: [(&str, &[&str]); 5] = [
        ("horn_grandparent", &["grandparent(tom, ann)", "grandparent(tom, pat)"]),
        ("horn_path", &["path(a, b)", "path(a, c)", "path(a, d)"]),
        ("horn_likes", &["likes(john, mary)"]),
        ("horn_colors", &["color(red)", "color(green)"]),
        ("horn_siblings", &["sibling(ann, ann)", "sibling(ann, bob)"]),
    ];
    let mut report = Vec::new();
    for (name, want) in expected {
        let file = corpus(name);
        let (out, _) = erotetic(&["answer", file.to_str().unwrap(), "--horn", "--assume-rigid"]);
        let mut got: Vec<String> = answer_lines(&out).into_iter().map(|(f, _)| f).filter(|f| f != "true").collect();
        let mut want: Vec<String> = want.iter().map(|s| s.to_string()).collect();
        got.sort();
        want.sort();
        if got != want {
            return Err(format!("{name}: got {got:?}, expected {want:?}"));
        }
        report.push(format!("{name}: {}", got.len()));
    }
    Ok(report.join(", "))
}

fn cross_check() -> Outcome {
    let mut compared = 0;
    for (name, problem) in corpus_files() {
        let questions = problem.effective_questions();
        let reference = reference_answers(&problem.axioms, &questions, &problem.sig, &plain_config(2))
            .map_err(|e| format!("{name}: {e}"))?;
        let tableau = stream(&problem, &plain_config(4));
        for r in &reference {
            if !tableau.iter().any(|t| entails(&[t.formula.clone()], &r.formula)) {
                return Err(format!("{name}: {} is not entailed by any tableau answer", r.formula));
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} enumerated answers, each entailed by a tableau answer"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("answer p(c) on two branches within level 2", two_branches),
        ("rigid/non-rigid entailment pair", translation_pair),
        ("entailment under a context", context_entailment),
        ("unskolemization of p(c) and exists X. p(X)", unskolemization_pair),
        ("corpus soundness sweep", soundness_sweep),
        ("oracle/prover agreement", oracle_agreement),
        ("answer to a question with common ground", common_ground),
        ("unbounded strict ordering", unbounded_order),
        ("Horn restriction against SLD answers", horn),
        ("enumeration cross-check", cross_check),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2}: PASS  {title}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {title}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
