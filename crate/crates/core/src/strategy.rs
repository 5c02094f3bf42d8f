//! The white strategy: per-kind move conditions, the priority cascade, the
//! deterministic move choice, and bounded candidate sets that make the
//! "no move of this kind exists" checks independent of the board size.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::board::{
    bk_has_move, chebyshev, for_each_black_move, for_each_white_king_move, for_each_white_move,
    for_each_white_rook_move, manhattan, white_king_step, white_rook_move, BoardSpec, Piece,
    Position, Square, Variant, WhiteMove,
};
use crate::error::{KrkError, Result};
use crate::geometry::{
    critical_square_sq, kings_same_edge_sq, l_pattern_sq, room_sq, wr_divides_sq, wr_exposed_sq,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    ImmediateMate,
    ReadyToMate,
    Squeeze,
    ApproachDiag,
    ApproachNonDiag,
    KeepRoomDiag,
    KeepRoomNonDiag,
    RookHome,
    RookSafe,
    RookSafeSmallBoards,
}

impl MoveKind {
    /// Cascade order: a kind is played only if no earlier kind is possible.
    pub const ALL: [MoveKind; 10] = [
        MoveKind::ImmediateMate,
        MoveKind::ReadyToMate,
        MoveKind::Squeeze,
        MoveKind::ApproachDiag,
        MoveKind::ApproachNonDiag,
        MoveKind::KeepRoomDiag,
        MoveKind::KeepRoomNonDiag,
        MoveKind::RookHome,
        MoveKind::RookSafe,
        MoveKind::RookSafeSmallBoards,
    ];

    pub const BASIC: [MoveKind; 5] = [
        MoveKind::Squeeze,
        MoveKind::ApproachDiag,
        MoveKind::ApproachNonDiag,
        MoveKind::KeepRoomDiag,
        MoveKind::KeepRoomNonDiag,
    ];

    pub const MATE: [MoveKind; 2] = [MoveKind::ImmediateMate, MoveKind::ReadyToMate];

    pub fn is_basic(self) -> bool {
        Self::BASIC.contains(&self)
    }

    pub fn is_mate(self) -> bool {
        Self::MATE.contains(&self)
    }

    pub fn name(self) -> &'static str {
        match self {
            MoveKind::ImmediateMate => "ImmediateMate",
            MoveKind::ReadyToMate => "ReadyToMate",
            MoveKind::Squeeze => "Squeeze",
            MoveKind::ApproachDiag => "ApproachDiag",
            MoveKind::ApproachNonDiag => "ApproachNonDiag",
            MoveKind::KeepRoomDiag => "KeepRoomDiag",
            MoveKind::KeepRoomNonDiag => "KeepRoomNonDiag",
            MoveKind::RookHome => "RookHome",
            MoveKind::RookSafe => "RookSafe",
            MoveKind::RookSafeSmallBoards => "RookSafeSmallBoards",
        }
    }

    /// Which piece moves, or `None` when either may (ReadyToMate).
    pub fn piece(self) -> Option<Piece> {
        match self {
            MoveKind::ReadyToMate => None,
            MoveKind::ApproachDiag
            | MoveKind::ApproachNonDiag
            | MoveKind::KeepRoomDiag
            | MoveKind::KeepRoomNonDiag => Some(Piece::King),
            _ => Some(Piece::Rook),
        }
    }

    /// Kinds that exist for the given variant.
    pub fn cascade(variant: Variant) -> &'static [MoveKind] {
        match variant {
            Variant::Classic8 => &Self::ALL[..9],
            Variant::Generalized => &Self::ALL,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MoveKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        MoveKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown move kind `{s}`"))
    }
}

/// Which white moves count: the single move of the deterministic function,
/// or every move the relation allows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// The deterministic strategy function.
    Function,
    /// Every move the strategy relation allows must win.
    Relation,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Function => "function",
            Mode::Relation => "relation",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "function" => Ok(Mode::Function),
            "relation" => Ok(Mode::Relation),
            other => Err(format!(
                "unknown mode `{other}` (expected function or relation)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrategyMove {
    pub to: Position,
    pub kind: MoveKind,
}

/// Deliberate defects used to show the verifiers catch broken strategies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Mutations {
    pub squeeze_ignores_exposure: bool,
    pub rook_home_ignores_stalemate: bool,
}

/// How the deterministic function picks among several Squeeze moves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SqueezeChoice {
    /// Smallest resulting room, ties by enumeration index.
    #[default]
    Maximal,
    /// The first Squeeze in enumeration order.
    First,
}

/// A target square proposed by a candidate generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Candidate {
    pub piece: Piece,
    pub square: Square,
}

/// The strategy on a given board, plus the knobs used by the mutation
/// and tie-break experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Strategy {
    spec: BoardSpec,
    pub mutations: Mutations,
    pub squeeze_choice: SqueezeChoice,
    /// Scan rook targets within each direction in descending order.
    pub reversed_rook_order: bool,
}

impl Strategy {
    pub fn new(spec: BoardSpec) -> Self {
        Strategy {
            spec,
            mutations: Mutations::default(),
            squeeze_choice: SqueezeChoice::Maximal,
            reversed_rook_order: false,
        }
    }

    pub fn with_mutations(mut self, mutations: Mutations) -> Self {
        self.mutations = mutations;
        self
    }

    #[inline]
    pub fn spec(&self) -> &BoardSpec {
        &self.spec
    }

    pub fn kinds(&self) -> &'static [MoveKind] {
        MoveKind::cascade(self.spec.variant())
    }

    fn check_input(&self, p: &Position) -> Result<Square> {
        if !p.white_to_move || !p.is_legal(&self.spec) {
            return Err(KrkError::IllegalPosition(*p));
        }
        p.rook()
    }

    // ---- per-kind conditions on a legal white move -------------------------

    /// `q` (black to move) is not stalemate.
    #[inline]
    fn not_stalemate(&self, q: &Position) -> bool {
        q.wr_attacks_bk() || bk_has_move(q, &self.spec)
    }

    #[inline]
    fn is_mate(&self, q: &Position) -> bool {
        q.wr_attacks_bk() && !bk_has_move(q, &self.spec)
    }

    /// Once the room is at most 3 the white king stays off the edge
    /// (classic8) or off any edge the black king shares with it.
    #[inline]
    fn endgame_edge_clause(&self, q: &Position, wr: Square) -> bool {
        if room_sq(wr, q.bk, self.spec.n()) > 3 {
            return true;
        }
        match self.spec.variant() {
            Variant::Classic8 => !self.spec.on_edge(q.wk),
            Variant::Generalized => !kings_same_edge_sq(q.wk, q.bk, self.spec.n()),
        }
    }

    /// Does some rook move from `r` (white to move) mate?
    pub(crate) fn has_immediate_mate(&self, r: &Position) -> bool {
        let Some(wr) = r.wr else { return false };
        if !self.spec.on_edge(r.bk) {
            return false;
        }
        edge_targets(wr, &self.spec).into_iter().flatten().any(|t| {
            on_edge_line_of(t, r.bk, &self.spec)
                && white_rook_move(r, &self.spec, t).is_some_and(|q| self.is_mate(&q))
        })
    }

    fn ready_to_mate(&self, q: &Position) -> bool {
        if q.wr.is_none() || !self.not_stalemate(q) || self.is_mate(q) {
            return false;
        }
        let mut all = true;
        let mut any = false;
        for_each_black_move(q, &self.spec, |r| {
            any = true;
            if all && !self.has_immediate_mate(&r) {
                all = false;
            }
        });
        any && all
    }

    /// The kind's full side condition for a legal white move `mv` from `p`.
    pub(crate) fn cond(&self, kind: MoveKind, p: &Position, mv: &WhiteMove) -> bool {
        if let Some(piece) = kind.piece() {
            if piece != mv.piece {
                return false;
            }
        }
        let spec = &self.spec;
        let q = &mv.to;
        let (Some(wr0), Some(wr)) = (p.wr, q.wr) else {
            return false;
        };
        match kind {
            MoveKind::ImmediateMate => self.is_mate(q),
            MoveKind::ReadyToMate => {
                // every reply needs an edge square, so the black king must be near one
                let near_edge =
                    p.bk.x <= 1 || p.bk.y <= 1 || p.bk.x >= spec.n() - 2 || p.bk.y >= spec.n() - 2;
                near_edge && self.ready_to_mate(q)
            }
            MoveKind::Squeeze => {
                room_sq(wr, q.bk, spec.n()) < room_sq(wr0, p.bk, spec.n())
                    && (self.mutations.squeeze_ignores_exposure
                        || !wr_exposed_sq(q.wk, q.bk, wr, false))
                    && wr_divides_sq(q.wk, q.bk, wr)
                    && self.not_stalemate(q)
            }
            MoveKind::ApproachDiag | MoveKind::ApproachNonDiag => {
                let diagonal = mv.is_diagonal_king_step(p);
                if diagonal != (kind == MoveKind::ApproachDiag) {
                    return false;
                }
                let cs = critical_square_sq(wr, q.bk);
                manhattan(q.wk, cs) < manhattan(p.wk, cs)
                    && !wr_exposed_sq(q.wk, q.bk, wr, false)
                    && (wr_divides_sq(q.wk, q.bk, wr) || l_pattern_sq(q.wk, q.bk, wr))
                    && self.endgame_edge_clause(q, wr)
                    && self.not_stalemate(q)
            }
            MoveKind::KeepRoomDiag | MoveKind::KeepRoomNonDiag => {
                let diagonal = mv.is_diagonal_king_step(p);
                if diagonal != (kind == MoveKind::KeepRoomDiag) {
                    return false;
                }
                chebyshev(q.wk, wr) <= chebyshev(p.wk, wr)
                    && !wr_exposed_sq(q.wk, q.bk, wr, false)
                    && wr_divides_sq(q.wk, q.bk, wr)
                    && self.endgame_edge_clause(q, wr)
                    && self.not_stalemate(q)
            }
            MoveKind::RookHome => {
                rook_home_target(wr0, wr, q.wk, q.bk, wr_exposed_sq(q.wk, q.bk, wr, false))
                    && (chebyshev(q.bk, wr) != 1 || chebyshev(q.wk, wr) == 1)
                    && (self.mutations.rook_home_ignores_stalemate || self.not_stalemate(q))
            }
            MoveKind::RookSafe => {
                reaches_new_edge(wr0, wr, spec)
                    && ((chebyshev(q.wk, wr) == 1 && chebyshev(q.bk, wr) == 1)
                        || chebyshev(wr, q.bk) > 2)
                    && self.not_stalemate(q)
            }
            MoveKind::RookSafeSmallBoards => {
                spec.variant() == Variant::Generalized
                    && reaches_new_edge(wr0, wr, spec)
                    && on_edge_line_of(wr, q.wk, spec)
                    && chebyshev(wr, q.bk) == 2
                    && self.not_stalemate(q)
            }
        }
    }

    /// `q` is reached from `p` by a legal move of the kind's piece and meets
    /// the kind's condition (no cascade check).
    pub fn move_cond(&self, kind: MoveKind, p: &Position, q: &Position) -> Result<bool> {
        self.check_input(p)?;
        Ok(self
            .find_move(p, q)
            .is_some_and(|mv| self.cond(kind, p, &mv)))
    }

    fn find_move(&self, p: &Position, q: &Position) -> Option<WhiteMove> {
        let mut found = None;
        for_each_white_move(p, &self.spec, |mv| {
            if found.is_none() && mv.to == *q {
                found = Some(mv);
            }
        });
        found
    }

    // ---- existence checks --------------------------------------------------

    /// No kind move exists, by scanning every legal white move.
    pub fn no_move_naive(&self, kind: MoveKind, p: &Position) -> Result<bool> {
        self.check_input(p)?;
        Ok(!self.exists_naive(kind, p))
    }

    fn exists_naive(&self, kind: MoveKind, p: &Position) -> bool {
        let mut found = false;
        let mut visit = |mv: WhiteMove| {
            if !found && self.cond(kind, p, &mv) {
                found = true;
            }
        };
        match kind.piece() {
            Some(Piece::King) => for_each_white_king_move(p, &self.spec, &mut visit),
            Some(Piece::Rook) => for_each_white_rook_move(p, &self.spec, &mut visit),
            None => for_each_white_move(p, &self.spec, &mut visit),
        }
        found
    }

    /// No kind move exists, checking only the bounded candidate set.
    pub fn no_move(&self, kind: MoveKind, p: &Position) -> Result<bool> {
        self.check_input(p)?;
        Ok(!self.exists_by_candidates(kind, p))
    }

    fn exists_by_candidates(&self, kind: MoveKind, p: &Position) -> bool {
        let mut found = false;
        self.for_each_candidate(kind, p, |c| {
            if found {
                return;
            }
            let to = match c.piece {
                Piece::King => white_king_step(p, &self.spec, c.square),
                Piece::Rook => white_rook_move(p, &self.spec, c.square),
            };
            if let Some(to) = to {
                let mv = WhiteMove {
                    piece: c.piece,
                    index: 0,
                    to,
                };
                if self.cond(kind, p, &mv) {
                    found = true;
                }
            }
        });
        found
    }

    /// Bounded superset of the target squares a kind move can use.
    pub fn candidates(&self, kind: MoveKind, p: &Position) -> Result<Vec<Candidate>> {
        p.rook()?;
        let mut out = Vec::new();
        self.for_each_candidate(kind, p, |c| {
            if !out.contains(&c) {
                out.push(c)
            }
        });
        Ok(out)
    }

    fn for_each_candidate(&self, kind: MoveKind, p: &Position, mut f: impl FnMut(Candidate)) {
        let Some(wr) = p.wr else { return };
        let spec = &self.spec;
        let rook = |x: i32, y: i32| Candidate {
            piece: Piece::Rook,
            square: Square::new(x, y),
        };
        let king_steps = |f: &mut dyn FnMut(Candidate)| {
            for (dx, dy) in crate::board::KING_STEPS {
                f(Candidate {
                    piece: Piece::King,
                    square: p.wk.offset(dx, dy),
                });
            }
        };
        match kind {
            MoveKind::ImmediateMate => {
                for t in edge_targets(wr, spec).into_iter().flatten() {
                    if on_edge_line_of(t, p.bk, spec) {
                        f(rook(t.x, t.y));
                    }
                }
            }
            MoveKind::ReadyToMate => {
                king_steps(&mut f);
                for t in ready_to_mate_rook_targets(p, spec) {
                    f(rook(t.x, t.y));
                }
            }
            MoveKind::Squeeze => {
                for t in squeeze_targets(p) {
                    f(rook(t.x, t.y));
                }
            }
            MoveKind::ApproachDiag
            | MoveKind::ApproachNonDiag
            | MoveKind::KeepRoomDiag
            | MoveKind::KeepRoomNonDiag => king_steps(&mut f),
            MoveKind::RookHome => {
                for t in [
                    Square::new(p.wk.x - 1, wr.y),
                    Square::new(p.wk.x + 1, wr.y),
                    Square::new(wr.x, p.wk.y - 1),
                    Square::new(wr.x, p.wk.y + 1),
                ] {
                    f(rook(t.x, t.y));
                }
            }
            MoveKind::RookSafe | MoveKind::RookSafeSmallBoards => {
                for t in edge_targets(wr, spec).into_iter().flatten() {
                    f(rook(t.x, t.y));
                }
            }
        }
    }

    // ---- the relation ------------------------------------------------------

    /// The first kind in the cascade for which a move exists.
    pub fn classify(&self, p: &Position) -> Result<MoveKind> {
        self.check_input(p)?;
        self.kinds()
            .iter()
            .copied()
            .find(|&k| self.exists_by_candidates(k, p))
            .ok_or(KrkError::NoKindApplicable(*p))
    }

    /// Same as [`Strategy::classify`] but every existence check scans all
    /// legal moves.
    pub fn classify_naive(&self, p: &Position) -> Result<MoveKind> {
        self.check_input(p)?;
        self.kinds()
            .iter()
            .copied()
            .find(|&k| self.exists_naive(k, p))
            .ok_or(KrkError::NoKindApplicable(*p))
    }

    /// `q` is reached from `p` by a strategy move of kind `kind`.
    pub fn strategy_relation(&self, p: &Position, q: &Position, kind: MoveKind) -> bool {
        if self.check_input(p).is_err() || !self.kinds().contains(&kind) {
            return false;
        }
        let Some(mv) = self.find_move(p, q) else {
            return false;
        };
        self.cond(kind, p, &mv)
            && self
                .kinds()
                .iter()
                .take_while(|&&k| k != kind)
                .all(|&k| !self.exists_by_candidates(k, p))
    }

    /// Every strategy move from `p`; all share the kind `classify(p)`.
    pub fn strategy_successors(&self, p: &Position) -> Result<Vec<StrategyMove>> {
        let kind = self.classify(p)?;
        let mut out = Vec::new();
        for_each_white_move(p, &self.spec, |mv| {
            if self.cond(kind, p, &mv) {
                out.push(StrategyMove { to: mv.to, kind });
            }
        });
        Ok(out)
    }

    /// The single move the deterministic strategy plays, or `None` for
    /// inputs it is not defined on.
    pub fn strategy_function(&self, p: &Position) -> Option<StrategyMove> {
        self.check_input(p).ok()?;
        for &kind in self.kinds() {
            if let Some(to) = self.choose(kind, p) {
                return Some(StrategyMove { to, kind });
            }
        }
        None
    }

    fn choose(&self, kind: MoveKind, p: &Position) -> Option<Position> {
        let spec = &self.spec;
        // (score, position) of the best move so far; lower wins, first wins ties
        let mut best: Option<(i32, Position)> = None;
        let score = |q: &Position| -> i32 {
            match kind {
                MoveKind::Squeeze if self.squeeze_choice == SqueezeChoice::Maximal => {
                    room_sq(q.wr.unwrap(), q.bk, spec.n())
                }
                MoveKind::RookHome => manhattan(q.wr.unwrap(), q.bk),
                _ => 0,
            }
        };
        let mut visit = |mv: WhiteMove| {
            if self.cond(kind, p, &mv) {
                let s = score(&mv.to);
                if best.is_none_or(|(b, _)| s < b) {
                    best = Some((s, mv.to));
                }
            }
        };
        match kind.piece() {
            Some(Piece::King) => for_each_white_king_move(p, spec, &mut visit),
            Some(Piece::Rook) => self.for_each_rook_move_ordered(p, &mut visit),
            None => {
                for_each_white_king_move(p, spec, &mut visit);
                self.for_each_rook_move_ordered(p, &mut visit);
            }
        }
        best.map(|(_, q)| q)
    }

    fn for_each_rook_move_ordered(&self, p: &Position, f: &mut impl FnMut(WhiteMove)) {
        if !self.reversed_rook_order {
            for_each_white_rook_move(p, &self.spec, f);
            return;
        }
        let mut moves = Vec::with_capacity(2 * self.spec.n() as usize);
        for_each_white_rook_move(p, &self.spec, |mv| moves.push(mv));
        let wr = p.wr.unwrap();
        let split = moves
            .iter()
            .position(|mv| mv.to.wr.unwrap().x == wr.x)
            .unwrap_or(moves.len());
        moves[..split].reverse();
        moves[split..].reverse();
        moves.into_iter().for_each(f);
    }
}

/// How often each kind is the classified kind over all legal white-to-move
/// positions with the rook.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct KindHistogram {
    pub n: i32,
    pub variant: Variant,
    pub total: u64,
    pub counts: BTreeMap<MoveKind, u64>,
    /// Positions where no kind applies (never expected).
    pub unclassified: u64,
}

pub fn classify_all(strategy: &Strategy) -> KindHistogram {
    let spec = *strategy.spec();
    let mut h = KindHistogram {
        n: spec.n(),
        variant: spec.variant(),
        total: 0,
        counts: strategy.kinds().iter().map(|&k| (k, 0)).collect(),
        unclassified: 0,
    };
    for p in crate::board::enumerate_legal(spec, Some(true), true) {
        h.total += 1;
        match strategy.classify(&p) {
            Ok(k) => *h.counts.entry(k).or_default() += 1,
            Err(_) => h.unclassified += 1,
        }
    }
    h
}

/// The up to four squares where a rook move lands on a board edge: moving
/// along its rank to file 0 / n-1, or along its file to rank 0 / n-1.
fn edge_targets(wr: Square, spec: &BoardSpec) -> [Option<Square>; 4] {
    let last = spec.last();
    let keep = |s: Square| (s != wr).then_some(s);
    [
        keep(Square::new(0, wr.y)),
        keep(Square::new(last, wr.y)),
        keep(Square::new(wr.x, 0)),
        keep(Square::new(wr.x, last)),
    ]
}

/// The rook moved onto the file (or rank) next to the white king's, on the
/// black king's side. When both kings share that file (or rank) either
/// neighbour will do, but only if black cannot attack the rook first.
#[inline]
fn rook_home_target(from: Square, to: Square, wk: Square, bk: Square, exposed: bool) -> bool {
    let along = |f: i32, t: i32, k: i32, b: i32| {
        t != f
            && (t - k).abs() == 1
            && if b == k {
                !exposed
            } else {
                t - k == (b - k).signum()
            }
    };
    along(from.x, to.x, wk.x, bk.x) || along(from.y, to.y, wk.y, bk.y)
}

/// The rook moved onto an edge line it did not stand on before.
fn reaches_new_edge(from: Square, to: Square, spec: &BoardSpec) -> bool {
    let last = spec.last();
    (to.x != from.x && (to.x == 0 || to.x == last))
        || (to.y != from.y && (to.y == 0 || to.y == last))
}

/// `rook_sq` lies on an edge line that also contains `other`.
fn on_edge_line_of(rook_sq: Square, other: Square, spec: &BoardSpec) -> bool {
    let last = spec.last();
    let edge = |v: i32| v == 0 || v == last;
    (rook_sq.x == other.x && edge(other.x)) || (rook_sq.y == other.y && edge(other.y))
}

/// Rook targets for ReadyToMate: cutting the black king off on the next
/// line, a far tempo move to an edge, or a one-step tempo move.
fn ready_to_mate_rook_targets(p: &Position, spec: &BoardSpec) -> [Square; 12] {
    let wr = p.wr.unwrap();
    let (bk, last) = (p.bk, spec.last());
    [
        Square::new(bk.x - 1, wr.y),
        Square::new(bk.x + 1, wr.y),
        Square::new(wr.x, bk.y - 1),
        Square::new(wr.x, bk.y + 1),
        Square::new(0, wr.y),
        Square::new(last, wr.y),
        Square::new(wr.x, 0),
        Square::new(wr.x, last),
        wr.offset(1, 0),
        wr.offset(-1, 0),
        wr.offset(0, 1),
        wr.offset(0, -1),
    ]
}

/// Targets of a maximal Squeeze: the rook stops where it is exactly as far
/// from the white king as from the black king, or one or two lines from the
/// black king's file or rank.
fn squeeze_targets(p: &Position) -> [Square; 20] {
    let wr = p.wr.unwrap();
    let (wk, bk) = (p.wk, p.bk);
    let half_up = |s: i32| (s + 1).div_euclid(2);
    let half_down = |s: i32| s.div_euclid(2);
    [
        Square::new(half_up(wk.x + bk.x), wr.y),
        Square::new(half_down(wk.x + bk.x), wr.y),
        Square::new(wr.x, half_up(wk.y + bk.y)),
        Square::new(wr.x, half_down(wk.y + bk.y)),
        // wr.x + wr.y = bk.x + wk.y
        Square::new(bk.x + wk.y - wr.y, wr.y),
        Square::new(wr.x, bk.x + wk.y - wr.x),
        // wr.x + wr.y = wk.x + bk.y
        Square::new(wk.x + bk.y - wr.y, wr.y),
        Square::new(wr.x, wk.x + bk.y - wr.x),
        // wr.x - wr.y = bk.x - wk.y
        Square::new(bk.x - wk.y + wr.y, wr.y),
        Square::new(wr.x, wr.x - bk.x + wk.y),
        // wr.x - wr.y = wk.x - bk.y
        Square::new(wk.x - bk.y + wr.y, wr.y),
        Square::new(wr.x, wr.x - wk.x + bk.y),
        Square::new(bk.x + 1, wr.y),
        Square::new(bk.x - 1, wr.y),
        Square::new(wr.x, bk.y + 1),
        Square::new(wr.x, bk.y - 1),
        // one line further when the nearest cut stalemates
        Square::new(bk.x + 2, wr.y),
        Square::new(bk.x - 2, wr.y),
        Square::new(wr.x, bk.y + 2),
        Square::new(wr.x, bk.y - 2),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::enumerate_legal;
    use crate::symmetry::{reflect, Reflection};

    fn gen(n: i32) -> Strategy {
        Strategy::new(BoardSpec::generalized(n).unwrap())
    }

    #[test]
    fn kinds_round_trip_through_names() {
        for k in MoveKind::ALL {
            assert_eq!(k.name().parse::<MoveKind>().unwrap(), k);
            assert_eq!(
                serde_json::to_string(&k).unwrap(),
                format!("\"{}\"", k.name())
            );
        }
        assert_eq!(MoveKind::cascade(Variant::Classic8).len(), 9);
        assert!("Mate".parse::<MoveKind>().is_err());
    }

    #[test]
    fn mate_in_one_yields_exactly_the_mating_moves() {
        let st = gen(8);
        let p = Position::with_rook((2, 3), (0, 3), (5, 6), true);
        let moves = st.strategy_successors(&p).unwrap();
        assert_eq!(moves.len(), 1);
        assert_eq!(moves[0].kind, MoveKind::ImmediateMate);
        assert_eq!(moves[0].to.wr, Some(Square::new(0, 6)));
        assert!(moves[0].to.is_checkmate(st.spec()));
        assert_eq!(st.strategy_function(&p), Some(moves[0]));
    }

    #[test]
    fn rejects_bad_inputs() {
        let st = gen(8);
        let black = Position::with_rook((2, 3), (0, 3), (5, 6), false);
        assert!(st.classify(&black).is_err());
        assert!(st.strategy_function(&black).is_none());
        assert_eq!(
            st.classify(&Position::new((2, 3), (0, 3), None, true)),
            Err(KrkError::RookCaptured)
        );
        assert!(st
            .classify(&Position::with_rook((1, 3), (0, 3), (5, 6), true))
            .is_err());
    }

    #[test]
    fn candidate_sets_are_bounded() {
        let st = gen(16);
        for p in enumerate_legal(*st.spec(), Some(true), true).step_by(9973) {
            for k in MoveKind::ALL {
                let c = st.candidates(k, &p).unwrap().len();
                let bound = match k {
                    MoveKind::ImmediateMate
                    | MoveKind::RookHome
                    | MoveKind::RookSafe
                    | MoveKind::RookSafeSmallBoards => 4,
                    MoveKind::ReadyToMate => 20,
                    MoveKind::Squeeze => 20,
                    _ => 8,
                };
                assert!(c <= bound, "{k}: {c}");
            }
        }
    }

    #[test]
    fn candidates_decide_existence_like_a_full_scan() {
        for n in 4..=8 {
            let st = gen(n);
            for p in enumerate_legal(*st.spec(), Some(true), true) {
                for &k in st.kinds() {
                    assert_eq!(
                        st.no_move(k, &p).unwrap(),
                        st.no_move_naive(k, &p).unwrap(),
                        "n={n} {k} {p}"
                    );
                }
            }
        }
        let st = Strategy::new(BoardSpec::classic8());
        for p in enumerate_legal(*st.spec(), Some(true), true).step_by(7) {
            assert_eq!(st.classify(&p), st.classify_naive(&p), "{p}");
        }
    }

    #[test]
    fn strategy_moves_are_legal_and_keep_the_rook() {
        for n in 4..=8 {
            let st = gen(n);
            let spec = *st.spec();
            for p in enumerate_legal(spec, Some(true), true) {
                let moves = st.strategy_successors(&p).unwrap();
                assert!(!moves.is_empty(), "{p}");
                for m in &moves {
                    assert!(p.is_legal_move(&m.to, &spec), "{p} -> {}", m.to);
                    assert!(st.strategy_relation(&p, &m.to, m.kind));
                    for_each_black_move(&m.to, &spec, |r| {
                        assert!(r.wr.is_some(), "{p} -> {} -> {r}", m.to)
                    });
                }
            }
        }
    }

    #[test]
    fn strategy_commutes_with_reflections() {
        for n in 4..=6 {
            let st = gen(n);
            let spec = *st.spec();
            for p in enumerate_legal(spec, Some(true), true) {
                let kind = st.classify(&p).unwrap();
                let moves = st.strategy_successors(&p).unwrap();
                for axis in Reflection::ALL {
                    let rp = reflect(&p, axis, &spec);
                    assert_eq!(st.classify(&rp).unwrap(), kind, "{p} {axis}");
                    let mut reflected: Vec<Position> =
                        moves.iter().map(|m| reflect(&m.to, axis, &spec)).collect();
                    let mut direct: Vec<Position> = st
                        .strategy_successors(&rp)
                        .unwrap()
                        .iter()
                        .map(|m| m.to)
                        .collect();
                    reflected
                        .sort_by_key(|q| crate::board::PackedPosition::pack_unchecked(q, &spec));
                    direct.sort_by_key(|q| crate::board::PackedPosition::pack_unchecked(q, &spec));
                    assert_eq!(reflected, direct, "{p} {axis}");
                }
            }
        }
    }

    #[test]
    fn small_board_moves_only_on_small_boards() {
        for n in [4, 5, 6, 7] {
            let st = gen(n);
            let used = enumerate_legal(*st.spec(), Some(true), true)
                .any(|p| st.classify(&p).unwrap() == MoveKind::RookSafeSmallBoards);
            assert_eq!(used, n <= 5, "n={n}");
        }
    }
}
