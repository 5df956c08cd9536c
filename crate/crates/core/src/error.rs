use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{total} is not divisible by {parts}")]
    InvalidDivisibility { total: usize, parts: usize },
    #[error("k = {k} is out of range for n = {n}: {reason}")]
    KOutOfRange { k: usize, n: usize, reason: &'static str },
    #[error("decomposed structure needs k = {expected} (block size - 1), got k = {k}")]
    DecomposedCrossK { k: usize, expected: usize },
    #[error("{kind} matrices cannot be built from parameters; load them from a matrix file")]
    UnbuildableKind { kind: &'static str },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("n = {n} exceeds the enumeration limit of {max} decisions")]
    TooLarge { n: usize, max: usize },
    #[error("invalid bitstring {0:?}")]
    InvalidBits(String),
    #[error("matrix file line {line}: {message}")]
    MatrixFormat { line: usize, message: String },
    #[error("invalid payoff table: {0}")]
    InvalidTable(String),
    #[error("invalid incentive scheme: alpha = {alpha}, beta = {beta} (both in [0,1], summing to 1)")]
    InvalidScheme { alpha: f64, beta: f64 },
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("agent {agent} holds slot {agent_slot}, context is for slot {ctx_slot}")]
    SlotMismatch { agent: usize, agent_slot: usize, ctx_slot: usize },
    #[error("no candidates for slot {slot}")]
    EmptyCandidatePool { slot: usize },
    #[error("expected {expected} blocks, got {actual}")]
    MissingBlock { expected: usize, actual: usize },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("replication {replication} of scenario {scenario} failed: {message}")]
    Replication { scenario: String, replication: usize, message: String },
    #[error("empty input")]
    EmptyInput,
    #[error("denominator is zero; the coefficient is undefined")]
    ZeroDenominator,
    #[error("samples need at least two observations each (got {a} and {b})")]
    SampleTooSmall { a: usize, b: usize },
    #[error("incomplete grid: {0}")]
    IncompleteGrid(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io { path: path.display().to_string(), message: err.to_string() }
    }
}
