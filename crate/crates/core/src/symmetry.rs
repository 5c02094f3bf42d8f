//! Reflections of the square board and canonical orbit representatives.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::board::{BoardSpec, PackedPosition, Position, Square};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reflection {
    /// `(x, y) -> (n-1-x, y)`
    Horizontal,
    /// `(x, y) -> (x, n-1-y)`
    Vertical,
    /// `(x, y) -> (y, x)`
    Diagonal,
}

impl Reflection {
    pub const ALL: [Reflection; 3] = [
        Reflection::Horizontal,
        Reflection::Vertical,
        Reflection::Diagonal,
    ];

    #[inline]
    pub fn apply(self, sq: Square, spec: &BoardSpec) -> Square {
        match self {
            Reflection::Horizontal => Square::new(spec.last() - sq.x, sq.y),
            Reflection::Vertical => Square::new(sq.x, spec.last() - sq.y),
            Reflection::Diagonal => Square::new(sq.y, sq.x),
        }
    }
}

impl fmt::Display for Reflection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reflection::Horizontal => "horizontal",
            Reflection::Vertical => "vertical",
            Reflection::Diagonal => "diagonal",
        })
    }
}

pub fn reflect(p: &Position, axis: Reflection, spec: &BoardSpec) -> Position {
    Position {
        wk: axis.apply(p.wk, spec),
        bk: axis.apply(p.bk, spec),
        wr: p.wr.map(|wr| axis.apply(wr, spec)),
        white_to_move: p.white_to_move,
    }
}

/// One of the eight symmetries of the square, as "optionally transpose,
/// then optionally mirror x, then optionally mirror y".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Symmetry {
    pub transpose: bool,
    pub flip_x: bool,
    pub flip_y: bool,
}

impl Symmetry {
    pub const IDENTITY: Symmetry = Symmetry {
        transpose: false,
        flip_x: false,
        flip_y: false,
    };

    pub fn all() -> impl Iterator<Item = Symmetry> {
        (0..8u8).map(|i| Symmetry {
            transpose: i & 4 != 0,
            flip_x: i & 1 != 0,
            flip_y: i & 2 != 0,
        })
    }

    #[inline]
    pub fn apply(self, sq: Square, spec: &BoardSpec) -> Square {
        let (mut x, mut y) = if self.transpose {
            (sq.y, sq.x)
        } else {
            (sq.x, sq.y)
        };
        if self.flip_x {
            x = spec.last() - x;
        }
        if self.flip_y {
            y = spec.last() - y;
        }
        Square::new(x, y)
    }

    pub fn apply_position(self, p: &Position, spec: &BoardSpec) -> Position {
        Position {
            wk: self.apply(p.wk, spec),
            bk: self.apply(p.bk, spec),
            wr: p.wr.map(|wr| self.apply(wr, spec)),
            white_to_move: p.white_to_move,
        }
    }
}

/// Black king in the lower-left eighth of the board, with ties on the
/// middle lines and the diagonal resolved by the white king, then the rook.
pub fn is_canonical(p: &Position, spec: &BoardSpec) -> bool {
    let n = spec.n();
    let half = |v: i32| 2 * v + 1;
    let (xs, ys) = match p.wr {
        Some(wr) => ([p.bk.x, p.wk.x, wr.x], [p.bk.y, p.wk.y, wr.y]),
        None => ([p.bk.x, p.wk.x, 0], [p.bk.y, p.wk.y, 0]),
    };
    let len = if p.wr.is_some() { 3 } else { 2 };
    let below_middle = |t: &[i32; 3]| {
        let mapped: Vec<i32> = t[..len].iter().map(|&v| half(v)).collect();
        mapped.as_slice().cmp(&vec![n; len][..]) != Ordering::Greater
    };
    below_middle(&xs) && below_middle(&ys) && xs[..len] <= ys[..len]
}

/// The canonical image of `p` with the smallest packed value.
pub fn canonize(p: &Position, spec: &BoardSpec) -> Position {
    canonical_symmetry(p, spec).apply_position(p, spec)
}

/// The symmetry that [`canonize`] applies to `p`.
pub fn canonical_symmetry(p: &Position, spec: &BoardSpec) -> Symmetry {
    Symmetry::all()
        .map(|s| (s, s.apply_position(p, spec)))
        .filter(|(_, q)| is_canonical(q, spec))
        .min_by_key(|(_, q)| PackedPosition::pack_unchecked(q, spec))
        .expect("every orbit contains a canonical position")
        .0
}

/// The distinct images of `p` under the eight board symmetries.
pub fn orbit(p: &Position, spec: &BoardSpec) -> Vec<Position> {
    let mut out: Vec<Position> = Vec::with_capacity(8);
    for s in Symmetry::all() {
        let q = s.apply_position(p, spec);
        if !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::enumerate_legal;

    fn b(n: i32) -> BoardSpec {
        BoardSpec::generalized(n).unwrap()
    }

    #[test]
    fn reflection_formulas() {
        let spec = b(8);
        assert_eq!(
            Reflection::Horizontal.apply(Square::new(3, 2), &spec),
            Square::new(4, 2)
        );
        assert_eq!(
            Reflection::Vertical.apply(Square::new(3, 2), &spec),
            Square::new(3, 5)
        );
        let p = Position::with_rook((1, 5), (6, 0), (2, 2), true);
        assert_eq!(
            reflect(&p, Reflection::Diagonal, &spec).wk,
            Square::new(5, 1)
        );
        for axis in Reflection::ALL {
            assert_eq!(reflect(&reflect(&p, axis, &spec), axis, &spec), p);
        }
    }

    #[test]
    fn canonical_examples() {
        let spec = b(8);
        assert!(is_canonical(
            &Position::with_rook((3, 3), (1, 1), (5, 5), true),
            &spec
        ));
        assert!(!is_canonical(
            &Position::with_rook((3, 3), (6, 1), (5, 5), true),
            &spec
        ));
        assert!(!is_canonical(
            &Position::with_rook((1, 2), (2, 2), (3, 3), true),
            &b(5)
        ));
        let c = canonize(&Position::with_rook((4, 4), (6, 6), (0, 0), true), &spec);
        assert_eq!(c.bk, Square::new(1, 1));
        assert!(is_canonical(&c, &spec));
    }

    #[test]
    fn captured_rook_ignores_third_component() {
        let spec = b(5);
        assert!(is_canonical(
            &Position::new((1, 1), (2, 2), None, false),
            &spec
        ));
        assert!(!is_canonical(
            &Position::new((1, 3), (2, 2), None, false),
            &spec
        ));
        assert!(!is_canonical(
            &Position::new((3, 1), (2, 2), None, false),
            &spec
        ));
    }

    #[test]
    fn orbit_sizes() {
        let spec = b(8);
        assert_eq!(
            orbit(&Position::with_rook((1, 2), (5, 3), (6, 0), true), &spec).len(),
            8
        );
        assert_eq!(
            orbit(&Position::with_rook((1, 1), (4, 4), (6, 6), true), &spec).len(),
            4
        );
        for n in 4..=8 {
            let spec = b(n);
            for p in enumerate_legal(spec, Some(true), true) {
                assert!(orbit(&p, &spec).len() > 1);
            }
        }
    }

    #[test]
    fn canonize_is_an_orbit_invariant() {
        for n in [4, 5, 7] {
            let spec = b(n);
            for p in enumerate_legal(spec, None, true).chain(enumerate_legal(spec, None, false)) {
                let c = canonize(&p, &spec);
                assert!(is_canonical(&c, &spec));
                if is_canonical(&p, &spec) {
                    assert!(
                        PackedPosition::pack_unchecked(&c, &spec)
                            <= PackedPosition::pack_unchecked(&p, &spec)
                    );
                }
                for axis in Reflection::ALL {
                    assert_eq!(canonize(&reflect(&p, axis, &spec), &spec), c, "{p} {axis}");
                }
            }
        }
    }
}
