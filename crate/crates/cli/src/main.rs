//! `erotetic`: question entailment, answerhood checks and answer generation
//! over problem files.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use erotetic_core::development::{
    check_answerhood, decide_entailment, is_development, CheckBudget, CheckOutcome, DevelopmentConfig,
};
use erotetic_core::oracle::{entails_bounded, Bounds, Verdict};
use erotetic_core::problem::Problem;
use erotetic_core::prover::Tableau;
use erotetic_core::qa::{self, QaConfig};
use erotetic_core::translation::reduce_entailment;
use erotetic_core::{Formula, Question};

const EXIT_USAGE: u8 = 64;
const EXIT_INPUT: u8 = 65;
const EXIT_ONLY_TOP: u8 = 3;

#[derive(Parser)]
#[command(name = "erotetic", version, about = "Questions, answers and question entailment in first-order logic")]
struct Cli {
    #[command(subcommand)]
    mode: Mode,
}

#[derive(Subcommand)]
enum Mode {
    /// Stream answers to the problem's questions entailed by its axioms.
    Answer(AnswerArgs),
    /// Decide whether the questions entail the conjecture (as a question).
    Entail(EntailArgs),
    /// Check syntactically that the conjecture is a development of the questions.
    CheckDevelopment(DevelopmentArgs),
    /// Check semantically that the conjecture answers the questions.
    CheckAnswer(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Tableau,
    Enumerate,
}

#[derive(Clone, Copy, ValueEnum)]
enum EqualityArg {
    Off,
    Axioms,
}

#[derive(Args)]
struct AnswerArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 4)]
    max_level: u32,
    #[arg(long)]
    max_answers: Option<usize>,
    /// Instances per question and polarity.
    #[arg(long, default_value_t = 2)]
    max_instances: usize,
    #[arg(long)]
    timeout_ms: Option<u64>,
    /// Horn theories and atomic questions only; negative instances.
    #[arg(long)]
    horn: bool,
    /// Treat every function symbol of the problem as rigid.
    #[arg(long)]
    assume_rigid: bool,
    #[arg(long, value_enum, default_value = "tableau")]
    algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value = "off")]
    equality: EqualityArg,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = 10_000)]
    timeout_ms: u64,
    #[arg(long, default_value_t = 6)]
    max_gamma: u32,
    #[arg(long, default_value_t = 4096)]
    max_branches: usize,
    #[arg(long, default_value_t = 2)]
    max_worlds: usize,
    #[arg(long, default_value_t = 3)]
    max_domain: usize,
    /// Threads for the countermodel search.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl BudgetArgs {
    fn bounds(&self) -> Bounds {
        Bounds { max_worlds: self.max_worlds, max_domain: self.max_domain, jobs: self.jobs.max(1), ..Bounds::default() }
    }

    fn budget(&self) -> CheckBudget {
        CheckBudget {
            timeout: Duration::from_millis(self.timeout_ms),
            max_gamma: self.max_gamma,
            max_branches: self.max_branches,
            oracle: self.bounds(),
        }
    }
}

#[derive(Args)]
struct EntailArgs {
    file: PathBuf,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Use only the countermodel search.
    #[arg(long)]
    oracle: bool,
    /// Print the reduced classical sequent.
    #[arg(long)]
    show_translation: bool,
    /// Dump the expanded tableau of the reduced sequent.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct DevelopmentArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "axioms")]
    equality: EqualityArg,
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    #[command(flatten)]
    budget: BudgetArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.mode) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn input(message: impl ToString) -> Failure {
    Failure { code: EXIT_INPUT, message: message.to_string() }
}

fn load(path: &PathBuf) -> Result<Problem, Failure> {
    Problem::load(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn run(mode: Mode) -> Result<u8, Failure> {
    match mode {
        Mode::Answer(a) => answer(a),
        Mode::Entail(a) => entail(a),
        Mode::CheckDevelopment(a) => check_development(a),
        Mode::CheckAnswer(a) => check_answer(a),
    }
}

fn answer(args: AnswerArgs) -> Result<u8, Failure> {
    if args.horn && matches!(args.algorithm, AlgorithmArg::Enumerate) {
        return Err(usage("--horn applies to the tableau algorithm only"));
    }
    if args.max_instances == 0 {
        return Err(usage("--max-instances must be positive"));
    }
    let problem = load(&args.file)?;
    let questions = problem.effective_questions();
    if questions.is_empty() {
        return Err(input("the problem declares no question"));
    }
    let cfg = QaConfig {
        max_level: args.max_level,
        max_answers: args.max_answers,
        max_instances: args.max_instances,
        timeout: args.timeout_ms.map(Duration::from_millis),
        horn: args.horn,
        assume_rigid: args.assume_rigid,
        equality: match args.equality {
            EqualityArg::Off => qa::EqualityMode::Off,
            EqualityArg::Axioms => qa::EqualityMode::Axioms,
        },
        algorithm: match args.algorithm {
            AlgorithmArg::Tableau => qa::Algorithm::Tableau,
            AlgorithmArg::Enumerate => qa::Algorithm::Enumerate,
        },
        ..QaConfig::default()
    };
    let mut nontrivial = false;
    let mut print = |i: usize, a: &qa::Answer| {
        nontrivial |= a.formula != Formula::Top;
        println!("answer[{}]: {}  % level={}", i + 1, a.formula, a.level);
    };
    match cfg.algorithm {
        qa::Algorithm::Tableau => {
            let stream = qa::answer_stream(&problem.axioms, &questions, &problem.sig, &cfg).map_err(input)?;
            for (i, a) in stream.enumerate() {
                print(i, &a);
            }
        }
        qa::Algorithm::Enumerate => {
            let all = qa::reference_answers(&problem.axioms, &questions, &problem.sig, &cfg).map_err(input)?;
            for (i, a) in all.iter().enumerate() {
                print(i, a);
            }
        }
    }
    Ok(if nontrivial { 0 } else { EXIT_ONLY_TOP })
}

fn conjecture(problem: &Problem) -> Result<Formula, Failure> {
    problem.conjecture.clone().ok_or_else(|| input("the problem declares no conjecture"))
}

fn report(outcome: &CheckOutcome) {
    let verdict = match outcome.decision {
        erotetic_core::development::Decision::Yes => "yes",
        erotetic_core::development::Decision::No => "no",
        erotetic_core::development::Decision::Unknown => "unknown",
    };
    println!("{verdict}");
    if let Some(k) = outcome.proof_gamma {
        println!("% proved with gamma multiplicity {k}");
    }
    if outcome.saturated {
        println!("% the tableau saturated without closing");
    }
    if let Some(c) = &outcome.countermodel {
        println!("% countermodel, worlds w={} v={}:", c.w, c.v);
        print!("{}", c.model);
    }
}

fn entail(args: EntailArgs) -> Result<u8, Failure> {
    let problem = load(&args.file)?;
    let questions = problem.effective_questions();
    if questions.is_empty() {
        return Err(input("the problem declares no question"));
    }
    let target = Question::new(conjecture(&problem)?);
    let context = problem.context_formula();
    if args.show_translation || args.trace {
        let sequent = reduce_entailment(&questions, &context, &target, &problem.sig);
        if args.show_translation {
            println!("% reduced sequent:\n{sequent}");
        }
        if args.trace {
            let mut formulas = sequent.without_trivial().premises;
            formulas.push(Formula::not(sequent.conclusion.clone()));
            let mut t = Tableau::new(&formulas);
            t.saturate(args.budget.max_gamma, 10_000);
            print!("{}", t.trace());
        }
    }
    if args.oracle {
        let verdict =
            entails_bounded(&questions, &context, &target, &problem.sig, args.budget.bounds()).map_err(input)?;
        return Ok(match verdict {
            Verdict::Countermodel(c) => {
                println!("no");
                println!("% countermodel, worlds w={} v={}:", c.w, c.v);
                print!("{}", c.model);
                1
            }
            Verdict::NoCountermodel { domain } => {
                println!("unknown");
                println!("% no countermodel with up to {domain} individuals");
                2
            }
        });
    }
    let outcome =
        decide_entailment(&questions, &context, &target, &problem.sig, &args.budget.budget()).map_err(input)?;
    report(&outcome);
    Ok(outcome.decision.exit_code() as u8)
}

fn check_development(args: DevelopmentArgs) -> Result<u8, Failure> {
    let problem = load(&args.file)?;
    let psi = conjecture(&problem)?;
    let patterns: Vec<Formula> = problem.effective_questions().iter().map(|q| q.body().clone()).collect();
    let cfg = DevelopmentConfig { equality_allowed: matches!(args.equality, EqualityArg::Axioms) };
    match is_development(&psi, &patterns, &problem.sig, cfg) {
        Some(w) => {
            println!("yes");
            print!("{w}");
            Ok(0)
        }
        None => {
            println!("no");
            Ok(1)
        }
    }
}

fn check_answer(args: CheckArgs) -> Result<u8, Failure> {
    let problem = load(&args.file)?;
    let psi = conjecture(&problem)?;
    let questions = problem.effective_questions();
    if questions.is_empty() {
        return Err(input("the problem declares no question"));
    }
    let outcome = check_answerhood(&psi, &questions, &problem.context_formula(), &problem.sig, &args.budget.budget())
        .map_err(input)?;
    report(&outcome);
    Ok(outcome.decision.exit_code() as u8)
}
