//! Positions, legality and move generation for the king-and-rook vs. king
//! fragment of chess on an `n x n` board.
//!
//! Only three pieces exist: the white king, the black king and the white
//! rook (which black may capture). Squares are 0-based `(file, rank)` pairs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{KrkError, Result};

pub const MIN_N: i32 = 4;
pub const MAX_N: i32 = 1024;

/// King step directions in the fixed enumeration order: `(dx, dy)`
/// lexicographic over `{-1, 0, 1}^2` without `(0, 0)`.
pub const KING_STEPS: [(i32, i32); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// The original 8x8 formulation: during the endgame phase the white
    /// king must stay off every edge.
    Classic8,
    /// The n x n formulation: the kings must not share an edge, and the
    /// extra small-board rook escape is available.
    Generalized,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Classic8 => "classic8",
            Variant::Generalized => "generalized",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "classic8" => Ok(Variant::Classic8),
            "generalized" => Ok(Variant::Generalized),
            other => Err(format!(
                "unknown variant `{other}` (expected classic8 or generalized)"
            )),
        }
    }
}

/// Board dimension plus the strategy variant played on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BoardSpec {
    n: i32,
    variant: Variant,
}

impl BoardSpec {
    pub fn new(n: i32, variant: Variant) -> Result<Self> {
        if !(MIN_N..=MAX_N).contains(&n) {
            return Err(KrkError::BoardSize(n));
        }
        if variant == Variant::Classic8 && n != 8 {
            return Err(KrkError::Classic8Size(n));
        }
        Ok(BoardSpec { n, variant })
    }

    pub fn generalized(n: i32) -> Result<Self> {
        Self::new(n, Variant::Generalized)
    }

    pub fn classic8() -> Self {
        BoardSpec {
            n: 8,
            variant: Variant::Classic8,
        }
    }

    #[inline]
    pub fn n(&self) -> i32 {
        self.n
    }

    #[inline]
    pub fn variant(&self) -> Variant {
        self.variant
    }

    #[inline]
    pub fn last(&self) -> i32 {
        self.n - 1
    }

    #[inline]
    pub fn on_board(&self, sq: Square) -> bool {
        sq.x >= 0 && sq.y >= 0 && sq.x < self.n && sq.y < self.n
    }

    #[inline]
    pub fn on_edge(&self, sq: Square) -> bool {
        sq.x == 0 || sq.y == 0 || sq.x == self.n - 1 || sq.y == self.n - 1
    }

    /// Bits per coordinate in the packed encoding, `ceil(log2 n)`.
    pub fn coord_bits(&self) -> u32 {
        u32::BITS - ((self.n - 1) as u32).leading_zeros()
    }

    /// Total width of a [`PackedPosition`]: six coordinates and two flags.
    pub fn packed_width(&self) -> u32 {
        2 + 6 * self.coord_bits()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct Square {
    pub x: i32,
    pub y: i32,
}

impl Square {
    #[inline]
    pub const fn new(x: i32, y: i32) -> Self {
        Square { x, y }
    }

    #[inline]
    pub fn offset(self, dx: i32, dy: i32) -> Self {
        Square {
            x: self.x + dx,
            y: self.y + dy,
        }
    }
}

impl From<[i32; 2]> for Square {
    fn from([x, y]: [i32; 2]) -> Self {
        Square { x, y }
    }
}

impl From<Square> for [i32; 2] {
    fn from(sq: Square) -> Self {
        [sq.x, sq.y]
    }
}

impl From<(i32, i32)> for Square {
    fn from((x, y): (i32, i32)) -> Self {
        Square { x, y }
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[inline]
pub fn chebyshev(a: Square, b: Square) -> i32 {
    (a.x - b.x).abs().max((a.y - b.y).abs())
}

#[inline]
pub fn manhattan(a: Square, b: Square) -> i32 {
    (a.x - b.x).abs() + (a.y - b.y).abs()
}

#[inline]
fn strictly_between(v: i32, a: i32, b: i32) -> bool {
    a.min(b) < v && v < a.max(b)
}

/// A KRK position. `wr == None` means black has captured the rook.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Position {
    pub wk: Square,
    pub bk: Square,
    pub wr: Option<Square>,
    pub white_to_move: bool,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "wk={} bk={} wr=", self.wk, self.bk)?;
        match self.wr {
            Some(wr) => write!(f, "{wr}")?,
            None => f.write_str("x")?,
        }
        f.write_str(if self.white_to_move { " w" } else { " b" })
    }
}

impl Position {
    pub fn new(
        wk: impl Into<Square>,
        bk: impl Into<Square>,
        wr: Option<Square>,
        white_to_move: bool,
    ) -> Self {
        Position {
            wk: wk.into(),
            bk: bk.into(),
            wr,
            white_to_move,
        }
    }

    /// Shorthand for a position with the rook on the board.
    pub fn with_rook(
        wk: impl Into<Square>,
        bk: impl Into<Square>,
        wr: impl Into<Square>,
        white_to_move: bool,
    ) -> Self {
        Position {
            wk: wk.into(),
            bk: bk.into(),
            wr: Some(wr.into()),
            white_to_move,
        }
    }

    pub fn rook(&self) -> Result<Square> {
        self.wr.ok_or(KrkError::RookCaptured)
    }

    pub fn with_side(mut self, white_to_move: bool) -> Self {
        self.white_to_move = white_to_move;
        self
    }

    pub fn is_well_formed(&self, spec: &BoardSpec) -> bool {
        if !spec.on_board(self.wk) || !spec.on_board(self.bk) || self.wk == self.bk {
            return false;
        }
        match self.wr {
            Some(wr) => spec.on_board(wr) && wr != self.wk && wr != self.bk,
            None => true,
        }
    }

    /// True iff the rook gives check along a file or rank, i.e. the white
    /// king does not stand strictly between the rook and the black king.
    #[inline]
    pub fn wr_attacks_bk(&self) -> bool {
        match self.wr {
            Some(wr) => rook_attacks(wr, self.bk, self.wk),
            None => false,
        }
    }

    /// Well formed and the side not on turn is not in check. White can only
    /// be "in check" from the black king, so adjacent kings are never legal.
    pub fn is_legal(&self, spec: &BoardSpec) -> bool {
        self.is_well_formed(spec)
            && chebyshev(self.wk, self.bk) >= 2
            && !(self.white_to_move && self.wr_attacks_bk())
    }

    /// All positions reachable by one legal move of the side on turn.
    pub fn legal_successors(&self, spec: &BoardSpec) -> Result<Vec<Position>> {
        if !self.is_legal(spec) {
            return Err(KrkError::IllegalPosition(*self));
        }
        let mut out = Vec::with_capacity(8 + 2 * spec.n() as usize);
        if self.white_to_move {
            for_each_white_move(self, spec, |mv| out.push(mv.to));
        } else {
            for_each_black_move(self, spec, |q| out.push(q));
        }
        Ok(out)
    }

    pub fn is_legal_move(&self, to: &Position, spec: &BoardSpec) -> bool {
        match self.legal_successors(spec) {
            Ok(succ) => succ.contains(to),
            Err(_) => false,
        }
    }

    pub fn is_checkmate(&self, spec: &BoardSpec) -> bool {
        !self.white_to_move
            && self.is_legal(spec)
            && !bk_has_move(self, spec)
            && self.wr_attacks_bk()
    }

    pub fn is_stalemate(&self, spec: &BoardSpec) -> bool {
        !self.white_to_move
            && self.is_legal(spec)
            && !bk_has_move(self, spec)
            && !self.wr_attacks_bk()
    }
}

/// Does a rook on `wr` attack `target`, with the white king the only
/// possible blocker?
#[inline]
pub fn rook_attacks(wr: Square, target: Square, wk: Square) -> bool {
    if wr == target {
        return false;
    }
    if wr.x == target.x {
        !(wk.x == wr.x && strictly_between(wk.y, wr.y, target.y))
    } else if wr.y == target.y {
        !(wk.y == wr.y && strictly_between(wk.x, wr.x, target.x))
    } else {
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Piece {
    King,
    Rook,
}

/// A white move together with its index in the fixed enumeration
/// (1..=8 king steps, 9.. rook targets: horizontal by ascending file, then
/// vertical by ascending rank).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WhiteMove {
    pub piece: Piece,
    pub index: u32,
    pub to: Position,
}

impl WhiteMove {
    #[inline]
    pub fn is_diagonal_king_step(&self, from: &Position) -> bool {
        self.piece == Piece::King && self.to.wk.x != from.wk.x && self.to.wk.y != from.wk.y
    }
}

/// Legal white king steps from a legal white-to-move position.
#[inline]
pub fn for_each_white_king_move(p: &Position, spec: &BoardSpec, mut f: impl FnMut(WhiteMove)) {
    for (i, &(dx, dy)) in KING_STEPS.iter().enumerate() {
        if let Some(to) = white_king_step(p, spec, p.wk.offset(dx, dy)) {
            f(WhiteMove {
                piece: Piece::King,
                index: i as u32 + 1,
                to,
            });
        }
    }
}

/// The position after the white king steps to `target`, if that is legal.
#[inline]
pub fn white_king_step(p: &Position, spec: &BoardSpec, target: Square) -> Option<Position> {
    if !spec.on_board(target)
        || Some(target) == p.wr
        || chebyshev(target, p.bk) < 2
        || chebyshev(target, p.wk) != 1
    {
        return None;
    }
    Some(Position {
        wk: target,
        white_to_move: false,
        ..*p
    })
}

/// Range of files (or ranks) the rook can reach along a line, given the
/// coordinates of pieces standing on that same line.
#[inline]
fn slide_range(from: i32, blockers: &[i32], n: i32) -> (i32, i32) {
    let mut lo = 0;
    let mut hi = n - 1;
    for &b in blockers {
        if b < from {
            lo = lo.max(b + 1);
        } else if b > from {
            hi = hi.min(b - 1);
        }
    }
    (lo, hi)
}

/// Legal rook moves in enumeration order (horizontal then vertical).
#[inline]
pub fn for_each_white_rook_move(p: &Position, spec: &BoardSpec, mut f: impl FnMut(WhiteMove)) {
    let Some(wr) = p.wr else { return };
    let n = spec.n();
    let mut index = 9;
    let push = |to_sq: Square, index: &mut u32, f: &mut dyn FnMut(WhiteMove)| {
        f(WhiteMove {
            piece: Piece::Rook,
            index: *index,
            to: Position {
                wr: Some(to_sq),
                white_to_move: false,
                ..*p
            },
        });
        *index += 1;
    };
    let mut row_blockers = [i32::MIN; 2];
    let mut k = 0;
    for s in [p.wk, p.bk] {
        if s.y == wr.y {
            row_blockers[k] = s.x;
            k += 1;
        }
    }
    let (lo, hi) = slide_range(wr.x, &row_blockers[..k], n);
    for x in lo..=hi {
        if x != wr.x {
            push(Square::new(x, wr.y), &mut index, &mut f);
        }
    }
    let mut col_blockers = [i32::MIN; 2];
    k = 0;
    for s in [p.wk, p.bk] {
        if s.x == wr.x {
            col_blockers[k] = s.y;
            k += 1;
        }
    }
    let (lo, hi) = slide_range(wr.y, &col_blockers[..k], n);
    for y in lo..=hi {
        if y != wr.y {
            push(Square::new(wr.x, y), &mut index, &mut f);
        }
    }
}

/// The position after the rook moves to `target`, if that is a legal rook
/// move (same line, nothing in the way, destination empty).
pub fn white_rook_move(p: &Position, spec: &BoardSpec, target: Square) -> Option<Position> {
    let wr = p.wr?;
    if !spec.on_board(target) || target == wr || target == p.wk || target == p.bk {
        return None;
    }
    let blocked = |s: Square| {
        if wr.x == target.x {
            s.x == wr.x && strictly_between(s.y, wr.y, target.y)
        } else {
            s.y == wr.y && strictly_between(s.x, wr.x, target.x)
        }
    };
    if (wr.x != target.x && wr.y != target.y) || blocked(p.wk) || blocked(p.bk) {
        return None;
    }
    Some(Position {
        wr: Some(target),
        white_to_move: false,
        ..*p
    })
}

/// All legal white moves, king steps first, in enumeration order.
#[inline]
pub fn for_each_white_move(p: &Position, spec: &BoardSpec, mut f: impl FnMut(WhiteMove)) {
    for_each_white_king_move(p, spec, &mut f);
    for_each_white_rook_move(p, spec, &mut f);
}

/// The position after the black king steps to `target`, if legal.
#[inline]
pub fn black_king_step(p: &Position, spec: &BoardSpec, target: Square) -> Option<Position> {
    if !spec.on_board(target) || chebyshev(target, p.wk) < 2 {
        return None;
    }
    let wr = if p.wr == Some(target) { None } else { p.wr };
    let q = Position {
        bk: target,
        wr,
        white_to_move: true,
        ..*p
    };
    if q.wr_attacks_bk() {
        return None;
    }
    Some(q)
}

/// Legal black king moves (captures of an unprotected rook included).
#[inline]
pub fn for_each_black_move(p: &Position, spec: &BoardSpec, mut f: impl FnMut(Position)) {
    for &(dx, dy) in KING_STEPS.iter() {
        if let Some(q) = black_king_step(p, spec, p.bk.offset(dx, dy)) {
            f(q);
        }
    }
}

#[inline]
pub fn bk_has_move(p: &Position, spec: &BoardSpec) -> bool {
    KING_STEPS
        .iter()
        .any(|&(dx, dy)| black_king_step(p, spec, p.bk.offset(dx, dy)).is_some())
}

/// Fixed-width encoding, most significant first: wk.x, wk.y, wr.x, wr.y,
/// bk.x, bk.y (each `ceil(log2 n)` bits), white-to-move bit, rook-captured
/// bit. A captured rook stores zero coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PackedPosition(pub u64);

impl PackedPosition {
    pub fn pack(p: &Position, spec: &BoardSpec) -> Result<Self> {
        if !p.is_well_formed(spec) {
            return Err(KrkError::MalformedPosition(*p));
        }
        Ok(Self::pack_unchecked(p, spec))
    }

    #[inline]
    pub(crate) fn pack_unchecked(p: &Position, spec: &BoardSpec) -> Self {
        let b = spec.coord_bits();
        let wr = p.wr.unwrap_or(Square::new(0, 0));
        let mut v = 0u64;
        for c in [p.wk.x, p.wk.y, wr.x, wr.y, p.bk.x, p.bk.y] {
            v = (v << b) | c as u64;
        }
        v = (v << 1) | p.white_to_move as u64;
        v = (v << 1) | p.wr.is_none() as u64;
        PackedPosition(v)
    }

    pub fn unpack(self, spec: &BoardSpec) -> Result<Position> {
        let width = spec.packed_width();
        if width < 64 && self.0 >> width != 0 {
            return Err(KrkError::InvalidEncoding(format!(
                "{:#x} is wider than {width} bits",
                self.0
            )));
        }
        let b = spec.coord_bits();
        let mask = (1u64 << b) - 1;
        let captured = self.0 & 1 == 1;
        let white_to_move = (self.0 >> 1) & 1 == 1;
        let mut coords = [0i32; 6];
        let mut v = self.0 >> 2;
        for c in coords.iter_mut().rev() {
            *c = (v & mask) as i32;
            v >>= b;
        }
        if let Some(c) = coords.iter().find(|&&c| c >= spec.n()) {
            return Err(KrkError::InvalidEncoding(format!(
                "coordinate {c} is off a {0}x{0} board",
                spec.n()
            )));
        }
        let wr = if captured {
            if coords[2] != 0 || coords[3] != 0 {
                return Err(KrkError::InvalidEncoding(
                    "captured rook with nonzero coordinates".into(),
                ));
            }
            None
        } else {
            Some(Square::new(coords[2], coords[3]))
        };
        Ok(Position {
            wk: Square::new(coords[0], coords[1]),
            wr,
            bk: Square::new(coords[4], coords[5]),
            white_to_move,
        })
    }

    /// Zero-padded binary string of exactly `packed_width` characters.
    pub fn to_bit_string(self, spec: &BoardSpec) -> String {
        format!("{:0width$b}", self.0, width = spec.packed_width() as usize)
    }

    pub fn from_bit_string(s: &str, spec: &BoardSpec) -> Result<Self> {
        let width = spec.packed_width() as usize;
        if s.len() != width || !s.bytes().all(|c| c == b'0' || c == b'1') {
            return Err(KrkError::InvalidEncoding(format!(
                "expected {width} binary digits, got `{s}`"
            )));
        }
        let v = u64::from_str_radix(s, 2).map_err(|e| KrkError::InvalidEncoding(e.to_string()))?;
        Ok(PackedPosition(v))
    }

    /// The coordinate part only (flags stripped), used as a dense table key.
    #[inline]
    pub fn coords(self) -> u64 {
        self.0 >> 2
    }
}

/// Every legal position matching the filters, in ascending packed order.
/// `white_to_move == None` yields both sides.
pub fn enumerate_legal(
    spec: BoardSpec,
    white_to_move: Option<bool>,
    rook_present: bool,
) -> impl Iterator<Item = Position> {
    let n = spec.n() as u64;
    let sides: &'static [bool] = match white_to_move {
        None => &[false, true],
        Some(false) => &[false],
        Some(true) => &[true],
    };
    let total = if rook_present { n.pow(6) } else { n.pow(4) };
    (0..total).flat_map(move |idx| {
        let mut d = [0i32; 6];
        let mut v = idx;
        let digits = if rook_present { 6 } else { 4 };
        for i in (0..digits).rev() {
            d[i] = (v % n) as i32;
            v /= n;
        }
        let (wk, wr, bk) = if rook_present {
            (
                Square::new(d[0], d[1]),
                Some(Square::new(d[2], d[3])),
                Square::new(d[4], d[5]),
            )
        } else {
            (Square::new(d[0], d[1]), None, Square::new(d[2], d[3]))
        };
        sides.iter().filter_map(move |&side| {
            let p = Position {
                wk,
                bk,
                wr,
                white_to_move: side,
            };
            p.is_legal(&spec).then_some(p)
        })
    })
}

/// Number of legal positions, computed without materializing them.
pub fn count_legal(spec: BoardSpec, white_to_move: Option<bool>, rook_present: bool) -> u64 {
    enumerate_legal(spec, white_to_move, rook_present).count() as u64
}

/// Every well-formed position (legal or not), both sides, rook present or
/// captured.
pub fn enumerate_well_formed(spec: BoardSpec) -> impl Iterator<Item = Position> {
    let n = spec.n();
    let squares = move || (0..n).flat_map(move |x| (0..n).map(move |y| Square::new(x, y)));
    squares()
        .flat_map(move |wk| {
            squares().flat_map(move |bk| {
                squares()
                    .map(Some)
                    .chain(std::iter::once(None))
                    .flat_map(move |wr| {
                        [false, true].map(|w| Position {
                            wk,
                            bk,
                            wr,
                            white_to_move: w,
                        })
                    })
            })
        })
        .filter(move |p| p.is_well_formed(&spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b8() -> BoardSpec {
        BoardSpec::generalized(8).unwrap()
    }

    #[test]
    fn board_spec_bounds() {
        assert!(BoardSpec::generalized(3).is_err());
        assert!(BoardSpec::new(9, Variant::Classic8).is_err());
        assert_eq!(BoardSpec::generalized(8).unwrap().packed_width(), 20);
        assert_eq!(BoardSpec::generalized(16).unwrap().packed_width(), 26);
        assert_eq!(BoardSpec::generalized(5).unwrap().coord_bits(), 3);
        assert_eq!(BoardSpec::generalized(4).unwrap().coord_bits(), 2);
    }

    #[test]
    fn well_formed_examples() {
        assert!(Position::with_rook((3, 2), (5, 4), (2, 6), true).is_well_formed(&b8()));
        assert!(!Position::new((0, 0), (0, 0), None, true).is_well_formed(&b8()));
        let b4 = BoardSpec::generalized(4).unwrap();
        assert!(!Position::with_rook((4, 0), (0, 0), (1, 1), true).is_well_formed(&b4));
    }

    #[test]
    fn legality_examples() {
        let spec = b8();
        assert!(!Position::with_rook((0, 0), (1, 1), (5, 5), true).is_legal(&spec));
        assert!(Position::with_rook((2, 0), (0, 0), (0, 5), false).is_legal(&spec));
        assert!(!Position::with_rook((2, 0), (0, 0), (0, 5), true).is_legal(&spec));
    }

    #[test]
    fn rook_attack_blocking() {
        assert!(Position::with_rook((2, 0), (0, 0), (0, 5), true).wr_attacks_bk());
        assert!(!Position::with_rook((0, 3), (0, 0), (0, 5), true).wr_attacks_bk());
        assert!(!Position::new((0, 3), (0, 0), None, true).wr_attacks_bk());
    }

    #[test]
    fn successor_examples() {
        let spec = b8();
        let stale = Position::with_rook((2, 0), (0, 0), (5, 1), false);
        assert!(stale.legal_successors(&spec).unwrap().is_empty());

        let capture = Position::with_rook((4, 4), (0, 0), (1, 1), false);
        let succ = capture.legal_successors(&spec).unwrap();
        assert_eq!(succ, vec![Position::new((4, 4), (1, 1), None, true)]);
        assert!(capture.is_legal_move(&succ[0], &spec));
        assert!(!capture.is_legal_move(&capture.with_side(true), &spec));

        let b4 = BoardSpec::generalized(4).unwrap();
        let p = Position::with_rook((0, 0), (2, 2), (3, 3), true);
        let succ = p.legal_successors(&b4).unwrap();
        assert_eq!(succ.iter().filter(|q| q.wk != p.wk).count(), 2);
        // nothing blocks the rook on file 3 or rank 3
        assert_eq!(succ.iter().filter(|q| q.wr != p.wr).count(), 6);

        let illegal = Position::with_rook((0, 0), (1, 1), (5, 5), true);
        assert!(illegal.legal_successors(&spec).is_err());
        assert!(!illegal.is_legal_move(&illegal, &spec));
    }

    #[test]
    fn mate_and_stalemate_examples() {
        let spec = b8();
        let mate = Position::with_rook((2, 0), (0, 0), (0, 5), false);
        assert!(mate.is_checkmate(&spec));
        assert!(!mate.is_stalemate(&spec));
        let stale = Position::with_rook((2, 0), (0, 0), (5, 1), false);
        assert!(stale.is_stalemate(&spec));
        assert!(!stale.is_checkmate(&spec));
        assert!(!mate.with_side(true).is_checkmate(&spec));
    }

    #[test]
    fn packs_the_reference_example() {
        let spec = b8();
        let p = Position::with_rook((3, 2), (2, 6), (5, 4), true);
        let packed = PackedPosition::pack(&p, &spec).unwrap();
        assert_eq!(packed.to_bit_string(&spec), "01101010110001011010");
        assert_eq!(packed.unpack(&spec).unwrap(), p);
        assert!(PackedPosition::from_bit_string("01101010110001011020", &spec).is_err());
        assert_eq!(
            PackedPosition::from_bit_string("01101010110001011010", &spec).unwrap(),
            packed
        );
    }

    #[test]
    fn unpack_rejects_off_board_coordinates() {
        let spec = BoardSpec::generalized(5).unwrap();
        // wk.x = 7 on a 5x5 board
        let bad = PackedPosition(7 << (2 + 5 * 3));
        assert!(bad.unpack(&spec).is_err());
    }

    #[test]
    fn small_board_counts() {
        let b4 = BoardSpec::generalized(4).unwrap();
        assert_eq!(count_legal(b4, Some(true), true), 1312);
    }

    #[test]
    fn enumeration_is_ascending_in_packed_order() {
        let spec = BoardSpec::generalized(4).unwrap();
        let packed: Vec<u64> = enumerate_legal(spec, None, true)
            .map(|p| PackedPosition::pack(&p, &spec).unwrap().0)
            .collect();
        assert!(packed.windows(2).all(|w| w[0] < w[1]));
    }
}
