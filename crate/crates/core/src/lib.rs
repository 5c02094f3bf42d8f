//! Verification engine for the king-and-rook versus king endgame on square
//! boards of any size from 4x4 up.

pub mod board;
pub mod error;
pub mod formula;
pub mod geometry;
pub mod lemma;
pub mod patterns;
pub mod retrograde;
pub mod smt;
pub mod strategy;
pub mod symmetry;

pub use board::{
    chebyshev, count_legal, enumerate_legal, enumerate_well_formed, manhattan, BoardSpec,
    PackedPosition, Piece, Position, Square, Variant, WhiteMove,
};
pub use error::{KrkError, Result};
pub use geometry::Room;
pub use lemma::{
    builtin_lemma, builtin_lemmas, check_equivalence, check_lemma, check_refinement, Domain,
    EndsWith, LemmaReport, LemmaSpec, PositionPredicate,
};
pub use patterns::{mate_opt, stalemate_opt};
pub use strategy::{
    classify_all, Candidate, KindHistogram, Mode, MoveKind, Mutations, SqueezeChoice, Strategy,
    StrategyMove,
};
pub use symmetry::{
    canonical_symmetry, canonize, is_canonical, orbit, reflect, Reflection, Symmetry,
};
