use alloc::string::String;

use crate::analysis::HardnessVerdict;
use crate::boolfun::Valuation;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the core algorithms.
///
/// Every variant names the precondition that failed so that front-ends can
/// report it without further context.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("variable {var} is out of range for k = {k}")]
    VariableOutOfRange { var: usize, k: usize },
    #[error("k = {k} is outside the supported range {min}..={max}")]
    UnsupportedK { k: usize, min: usize, max: usize },
    #[error("operands have different variable sets (k = {left} vs k = {right})")]
    ArityMismatch { left: usize, right: usize },
    #[error("function is not monotone")]
    NotMonotone,
    #[error("function is degenerate (does not depend on variable {var})")]
    Degenerate { var: usize },
    #[error("function is nondegenerate")]
    Nondegenerate,
    #[error("the constant-false function has no minimized DNF")]
    EmptyFunction,
    #[error("the constant-true function has no minimized CNF")]
    ConstantTrue,
    #[error("{what} exceeds the limit of {limit}")]
    TooLarge { what: &'static str, limit: usize },
    #[error("step {index} is invalid: {reason} at valuation {nu}")]
    InvalidStep { index: usize, nu: Valuation, reason: &'static str },
    #[error("invalid chain: {0}")]
    InvalidChain(&'static str),
    #[error("nothing to fetch: #φ = {count} equals |euler| = {euler_abs}")]
    NothingToFetch { count: usize, euler_abs: i64 },
    #[error("euler characteristic is {euler}; reduction to the constant-false function requires 0")]
    NotReducible { euler: i64 },
    #[error("euler characteristic is {euler} < 0; negate the function first")]
    WrongSign { euler: i64 },
    #[error("satisfying valuation {nu} has odd size")]
    OddSupport { nu: Valuation },
    #[error("no rewrite witness: euler characteristics differ ({left} vs {right})")]
    NoWitness { left: i64, right: i64 },
    #[error("euler characteristic is {euler}; a fragmentation requires 0")]
    NotFragmentable { euler: i64 },
    #[error("template expects {expected} leaves, got {got}")]
    TemplateArity { expected: usize, got: usize },
    #[error("malformed template: {0}")]
    MalformedTemplate(&'static str),
    #[error("trace is invalid at step {index}")]
    InvalidTrace { index: usize },
    #[error("euler characteristic {target} is not reachable by a monotone function (window {min}..={max})")]
    Unreachable { target: i64, min: i64, max: i64 },
    #[error("variable order is missing fact {fact}")]
    IncompleteOrder { fact: usize },
    #[error("OBDD operands use different variable orders")]
    OrderMismatch,
    #[error("fact index {index} is out of range ({count} facts)")]
    FactOutOfRange { index: usize, count: usize },
    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),
    #[error("circuit has not been verified as a d-D: {0}")]
    Unverified(&'static str),
    #[error("semantic determinism check needs {vars} variables, limit is {limit}; use the certified mode")]
    SemanticGuard { vars: usize, limit: usize },
    #[error("query is not compilable by this method: {verdict}")]
    NotCompilable { verdict: HardnessVerdict },
    #[error("invalid database: {0}")]
    InvalidDatabase(String),
}
