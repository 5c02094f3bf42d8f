//! Checkmate and stalemate as a handful of coordinate patterns on the
//! canonical image of a position.
//!
//! Once the black king has been reflected into the lower-left eighth, it can
//! only be mated or stalemated on the file `x = 0`, and every such position
//! looks like one of the patterns below whatever the board size.

use crate::board::{BoardSpec, Position};
use crate::symmetry::canonize;

/// Checkmate patterns on a canonical position with black to move.
pub fn mate_pattern(c: &Position) -> bool {
    let Some(wr) = c.wr else { return false };
    let (wk, bk) = (c.wk, c.bk);
    if c.white_to_move || bk.x != 0 {
        return false;
    }
    // rook checks along the edge file, king in opposition
    let on_file = wr.x == 0 && wk.x == 2 && wk.y == bk.y && (wr.y - bk.y).abs() >= 2;
    // corner: rook checks along the first rank, king guards the second
    let corner = bk.y == 0 && wr.y == 0 && wr.x >= 2 && wk.y == 2 && wk.x <= 1;
    on_file || corner
}

/// Stalemate patterns on a canonical position with black to move.
pub fn stalemate_pattern(c: &Position) -> bool {
    let Some(wr) = c.wr else { return false };
    let (wk, bk) = (c.wk, c.bk);
    if c.white_to_move || bk.x != 0 || bk.y != 0 {
        return false;
    }
    let rook_on_second_file = wr.x == 1 && wr.y >= 1 && wk.x == 0 && wk.y == 2;
    let guarded_diagonal = wr.x == 1 && wr.y == 1 && wk.y == 2 && wk.x <= 2;
    rook_on_second_file || guarded_diagonal
}

pub fn mate_opt(p: &Position, spec: &BoardSpec) -> bool {
    p.is_well_formed(spec) && mate_pattern(&canonize(p, spec))
}

pub fn stalemate_opt(p: &Position, spec: &BoardSpec) -> bool {
    p.is_well_formed(spec) && stalemate_pattern(&canonize(p, spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::enumerate_well_formed;

    #[test]
    fn examples() {
        let spec = BoardSpec::generalized(8).unwrap();
        let mate = Position::with_rook((2, 4), (0, 4), (0, 0), false);
        assert!(mate.is_checkmate(&spec) && mate_opt(&mate, &spec));
        let mirrored = Position::with_rook((5, 4), (7, 4), (7, 0), false);
        assert!(mate_opt(&mirrored, &spec));
        let stale = Position::with_rook((2, 0), (0, 0), (5, 1), false);
        assert!(stale.is_stalemate(&spec) && stalemate_opt(&stale, &spec));
        assert!(!mate_opt(&mate.with_side(true), &spec));
    }

    #[test]
    fn patterns_match_the_rules_on_small_boards() {
        for n in 4..=8 {
            let spec = BoardSpec::generalized(n).unwrap();
            let mut mates = 0;
            for p in enumerate_well_formed(spec) {
                assert_eq!(mate_opt(&p, &spec), p.is_checkmate(&spec), "{p}");
                assert_eq!(stalemate_opt(&p, &spec), p.is_stalemate(&spec), "{p}");
                mates += p.is_checkmate(&spec) as u32;
            }
            assert!(mates > 0);
        }
    }
}
