use thiserror::Error;

use crate::board::Position;

pub type Result<T, E = KrkError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KrkError {
    #[error("board size {0} is outside the supported range 4..=1024")]
    BoardSize(i32),
    #[error("the classic8 strategy variant requires n = 8 (got n = {0})")]
    Classic8Size(i32),
    #[error("position {0} is not legal")]
    IllegalPosition(Position),
    #[error("position {0} is not well formed")]
    MalformedPosition(Position),
    #[error("the white rook has been captured")]
    RookCaptured,
    #[error("the critical square is undefined when the rook and the black king coincide")]
    DegenerateCriticalSquare,
    #[error("invalid packed encoding: {0}")]
    InvalidEncoding(String),
    #[error("no strategy move kind applies in {0}")]
    NoKindApplicable(Position),
    #[error("board size {n} is too large for {what}")]
    TooLarge { n: i32, what: &'static str },
    #[error("predicate {0} is not invariant under board reflections")]
    NotReflectionInvariant(String),
    #[error("invalid lemma {0}")]
    InvalidLemma(String),
    #[error("I/O: {0}")]
    Io(String),
    #[error("SMT-LIB: {0}")]
    Smt(String),
}
