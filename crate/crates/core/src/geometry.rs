//! Auxiliary measures the strategy is phrased in: room, critical square,
//! rook exposure, division, the L-pattern and edge relations.
//!
//! The `*_sq` functions work on raw squares and are what the strategy uses
//! internally; the position-level wrappers report a captured rook as an
//! error instead.

use serde::{Deserialize, Serialize};

pub use crate::board::{chebyshev, manhattan};
use crate::board::{BoardSpec, Position, Square};
use crate::error::{KrkError, Result};

/// Half-perimeter of the rectangle the rook confines the black king to,
/// or `2n - 1` when the rook and the black king share a line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Room(pub i32);

impl Room {
    pub fn is_confined(self, spec: &BoardSpec) -> bool {
        self.0 < 2 * spec.n() - 1
    }
}

#[inline]
pub fn room_sq(wr: Square, bk: Square, n: i32) -> i32 {
    if wr.x == bk.x || wr.y == bk.y {
        return 2 * n - 1;
    }
    let x = if wr.x > bk.x { wr.x } else { n - 1 - wr.x };
    let y = if wr.y > bk.y { wr.y } else { n - 1 - wr.y };
    x + y
}

#[inline]
pub fn critical_square_sq(wr: Square, bk: Square) -> Square {
    Square::new(wr.x - (wr.x - bk.x).signum(), wr.y - (wr.y - bk.y).signum())
}

/// Exposure depends on who moves next: white needs one tempo more.
#[inline]
pub fn wr_exposed_sq(wk: Square, bk: Square, wr: Square, white_to_move: bool) -> bool {
    let dw = chebyshev(wr, wk);
    let db = chebyshev(wr, bk);
    if white_to_move {
        dw >= db + 2
    } else {
        dw > db
    }
}

#[inline]
pub fn wr_divides_sq(wk: Square, bk: Square, wr: Square) -> bool {
    let between = |v: i32, a: i32, b: i32| a.min(b) < v && v < a.max(b);
    between(wr.x, wk.x, bk.x) || between(wr.y, wk.y, bk.y)
}

#[inline]
pub fn l_pattern_sq(wk: Square, bk: Square, wr: Square) -> bool {
    (wk.y == bk.y && (wk.x - bk.x).abs() == 2 && wr.x == wk.x && (wr.y - wk.y).abs() == 1)
        || (wk.x == bk.x && (wk.y - bk.y).abs() == 2 && wr.y == wk.y && (wr.x - wk.x).abs() == 1)
}

#[inline]
pub fn kings_same_edge_sq(wk: Square, bk: Square, n: i32) -> bool {
    let edge = |v: i32| v == 0 || v == n - 1;
    (wk.x == bk.x && edge(wk.x)) || (wk.y == bk.y && edge(wk.y))
}

/// Does the white king step `from -> to` get strictly closer to some edge
/// line the black king stands on?
#[inline]
pub fn towards_bk_edge(from: Square, to: Square, bk: Square, spec: &BoardSpec) -> bool {
    let last = spec.last();
    (bk.x == 0 && to.x < from.x)
        || (bk.x == last && to.x > from.x)
        || (bk.y == 0 && to.y < from.y)
        || (bk.y == last && to.y > from.y)
}

pub fn room(p: &Position, spec: &BoardSpec) -> Result<Room> {
    Ok(Room(room_sq(p.rook()?, p.bk, spec.n())))
}

pub fn critical_square(p: &Position) -> Result<Square> {
    let wr = p.rook()?;
    if wr == p.bk {
        return Err(KrkError::DegenerateCriticalSquare);
    }
    Ok(critical_square_sq(wr, p.bk))
}

pub fn wr_exposed(p: &Position) -> Result<bool> {
    Ok(wr_exposed_sq(p.wk, p.bk, p.rook()?, p.white_to_move))
}

pub fn wr_divides(p: &Position) -> Result<bool> {
    Ok(wr_divides_sq(p.wk, p.bk, p.rook()?))
}

pub fn l_pattern(p: &Position) -> Result<bool> {
    Ok(l_pattern_sq(p.wk, p.bk, p.rook()?))
}

pub fn kings_same_edge(p: &Position, spec: &BoardSpec) -> bool {
    kings_same_edge_sq(p.wk, p.bk, spec.n())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(x: i32, y: i32) -> Square {
        Square::new(x, y)
    }

    fn b8() -> BoardSpec {
        BoardSpec::generalized(8).unwrap()
    }

    #[test]
    fn distances() {
        assert_eq!(manhattan(sq(3, 2), sq(5, 4)), 4);
        assert_eq!(manhattan(sq(4, 4), sq(4, 4)), 0);
        assert_eq!(manhattan(sq(0, 7), sq(7, 0)), 14);
        assert_eq!(chebyshev(sq(3, 2), sq(5, 4)), 2);
        assert_eq!(chebyshev(sq(0, 0), sq(3, 5)), 5);
        assert_eq!(chebyshev(sq(4, 4), sq(4, 4)), 0);
    }

    #[test]
    fn room_examples() {
        let spec = b8();
        let p = |wr: (i32, i32), bk: (i32, i32)| Position::with_rook((7, 0), bk, wr, true);
        assert_eq!(room(&p((3, 3), (3, 6)), &spec).unwrap(), Room(15));
        assert_eq!(room(&p((5, 4), (2, 6)), &spec).unwrap(), Room(8));
        assert_eq!(room(&p((1, 1), (0, 0)), &spec).unwrap(), Room(2));
        assert_eq!(
            room(&Position::new((7, 0), (0, 0), None, true), &spec),
            Err(KrkError::RookCaptured)
        );
    }

    #[test]
    fn critical_square_examples() {
        let cs = |wr: (i32, i32), bk: (i32, i32)| {
            critical_square(&Position::with_rook((7, 0), bk, wr, true)).unwrap()
        };
        assert_eq!(cs((5, 4), (2, 6)), sq(4, 5));
        assert_eq!(cs((3, 3), (3, 6)), sq(3, 4));
        assert_eq!(cs((2, 5), (6, 5)), sq(3, 5));
    }

    #[test]
    fn exposure_examples() {
        assert!(wr_exposed(&Position::with_rook((0, 0), (4, 4), (5, 5), true)).unwrap());
        // dW = 2, dB = 2 with black to move: 2 >= 3 is false
        assert!(!wr_exposed(&Position::with_rook((3, 3), (7, 7), (5, 5), false)).unwrap());
        assert!(!wr_exposed(&Position::with_rook((4, 4), (7, 0), (5, 5), true)).unwrap());
    }

    #[test]
    fn divides_examples() {
        assert!(wr_divides(&Position::with_rook((0, 0), (6, 2), (3, 5), true)).unwrap());
        assert!(wr_divides(&Position::with_rook((2, 0), (2, 7), (2, 5), true)).unwrap());
        assert!(wr_divides(&Position::with_rook((0, 0), (0, 2), (0, 1), true)).unwrap());
        assert!(!wr_divides(&Position::with_rook((0, 0), (2, 2), (5, 5), true)).unwrap());
    }

    #[test]
    fn l_pattern_examples() {
        assert!(l_pattern(&Position::with_rook((4, 4), (6, 4), (4, 5), true)).unwrap());
        assert!(l_pattern(&Position::with_rook((4, 4), (4, 6), (5, 4), true)).unwrap());
        assert!(!l_pattern(&Position::with_rook((4, 4), (7, 4), (4, 5), true)).unwrap());
    }

    #[test]
    fn same_edge_examples() {
        let spec = b8();
        assert!(kings_same_edge(
            &Position::with_rook((0, 3), (0, 6), (4, 4), true),
            &spec
        ));
        assert!(!kings_same_edge(
            &Position::with_rook((7, 3), (0, 6), (4, 4), true),
            &spec
        ));
        assert!(!kings_same_edge(
            &Position::with_rook((3, 3), (0, 6), (4, 4), true),
            &spec
        ));
    }

    #[test]
    fn towards_edge_examples() {
        let spec = b8();
        assert!(towards_bk_edge(sq(3, 4), sq(2, 4), sq(0, 4), &spec));
        assert!(!towards_bk_edge(sq(3, 4), sq(3, 5), sq(0, 4), &spec));
        for (dx, dy) in crate::board::KING_STEPS {
            assert!(!towards_bk_edge(
                sq(4, 4),
                sq(4 + dx, 4 + dy),
                sq(3, 3),
                &spec
            ));
        }
    }

    #[test]
    fn confined_room_bounds_on_small_boards() {
        for n in 4..=9 {
            let spec = BoardSpec::generalized(n).unwrap();
            for p in crate::board::enumerate_legal(spec, Some(true), true) {
                let wr = p.wr.unwrap();
                let r = room_sq(wr, p.bk, n);
                if wr.x == p.bk.x || wr.y == p.bk.y {
                    assert_eq!(r, 2 * n - 1);
                } else {
                    assert!((2..=2 * n - 2).contains(&r), "{p}: room {r}");
                }
                assert_eq!(chebyshev(critical_square_sq(wr, p.bk), wr), 1);
            }
        }
    }
}
