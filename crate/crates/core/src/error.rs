use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("`{0}` is used both as a predicate and as a function symbol")]
    KindClash(String),
    #[error("`{symbol}` used with arity {found}, but it has arity {expected}")]
    ArityMismatch { symbol: String, expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    BadCharacter(char),
    #[error("unexpected {found}, expected {expected}")]
    Unexpected { found: String, expected: String },
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEof(String),
    #[error("reserved symbol `{0}` may not appear in input")]
    ReservedSymbol(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("occurs check: {var} occurs in {term}")]
    OccursCheck { var: String, term: String },
    #[error("symbol clash: {left} vs {right}")]
    Clash { left: String, right: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("variable {0} is not assigned")]
    UnassignedVariable(String),
    #[error("symbol `{0}` is not interpreted by the model")]
    UnknownSymbol(String),
    #[error("world {0} does not exist")]
    NoSuchWorld(usize),
    #[error("enumeration would visit {0} structures, over the configured limit")]
    BoundOverflow(u128),
    #[error("formula must be closed: {0}")]
    NotClosed(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("search cancelled")]
    Cancelled,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslationError {
    #[error("the existence predicate `{0}` already occurs in the input")]
    ExistenceCollision(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error("no tableau rule applies to occurrence {0}")]
    NoApplicableRule(usize),
    #[error("occurrence {occurrence} is not on branch {branch}")]
    NotOnBranch { occurrence: usize, branch: usize },
    #[error("no such branch {0}")]
    NoSuchBranch(usize),
    #[error("gamma multiplicity bound reached for occurrence {0}")]
    MultiplicityExhausted(usize),
    #[error("formula must be closed: {0}")]
    NotClosed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QaError {
    #[error("no closure available yet")]
    NoClosure,
    #[error("horn mode requires Horn clauses: {0}")]
    NotHorn(String),
    #[error("horn mode requires an atomic question: {0}")]
    NonAtomicQuestion(String),
    #[error("at least one question is required")]
    NoQuestion,
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Prover(#[from] ProverError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("budget must be positive")]
    EmptyBudget,
    #[error("formula must be closed: {0}")]
    NotClosed(String),
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Invalid(String),
}
