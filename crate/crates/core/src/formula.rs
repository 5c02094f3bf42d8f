//! Conditions over bounded game traces, used as lemma pre- and
//! postconditions. Every construct is linear, so the same tree can be
//! evaluated on concrete traces or handed to the LIA encoder.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::board::{BoardSpec, Position};
use crate::geometry::{critical_square_sq, l_pattern_sq, room_sq, wr_divides_sq, wr_exposed_sq};
use crate::strategy::MoveKind;

/// A position in a trace `p0, p0', p1, p1', ...`: `White(i)` is `p_i`
/// (white to move), `Black(i)` is `p_i'` (black to move).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Point {
    White(usize),
    Black(usize),
}

impl Point {
    pub fn index(self) -> usize {
        match self {
            Point::White(i) => 2 * i,
            Point::Black(i) => 2 * i + 1,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::White(i) => write!(f, "p{i}"),
            Point::Black(i) => write!(f, "p{i}'"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coord {
    WkX,
    WkY,
    BkX,
    BkY,
    WrX,
    WrY,
}

impl Coord {
    pub const ALL: [Coord; 6] = [
        Coord::WkX,
        Coord::WkY,
        Coord::WrX,
        Coord::WrY,
        Coord::BkX,
        Coord::BkY,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Coord::WkX => "wkx",
            Coord::WkY => "wky",
            Coord::BkX => "bkx",
            Coord::BkY => "bky",
            Coord::WrX => "wrx",
            Coord::WrY => "wry",
        }
    }

    fn of(self, p: &Position) -> Option<i32> {
        Some(match self {
            Coord::WkX => p.wk.x,
            Coord::WkY => p.wk.y,
            Coord::BkX => p.bk.x,
            Coord::BkY => p.bk.y,
            Coord::WrX => p.wr?.x,
            Coord::WrY => p.wr?.y,
        })
    }
}

/// A set of move kinds as a bit mask over [`MoveKind::index`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct KindSet(u16);

impl KindSet {
    pub fn of(kinds: &[MoveKind]) -> Self {
        KindSet(kinds.iter().fold(0, |m, k| m | 1 << k.index()))
    }

    pub fn basic() -> Self {
        Self::of(&MoveKind::BASIC)
    }

    pub fn mate() -> Self {
        Self::of(&MoveKind::MATE)
    }

    pub fn contains(self, k: MoveKind) -> bool {
        self.0 & (1 << k.index()) != 0
    }

    pub fn union(self, other: KindSet) -> Self {
        KindSet(self.0 | other.0)
    }

    pub fn complement(self) -> Self {
        KindSet(!self.0 & ((1 << MoveKind::ALL.len()) - 1))
    }

    pub fn kinds(self) -> impl Iterator<Item = MoveKind> {
        MoveKind::ALL.into_iter().filter(move |&k| self.contains(k))
    }
}

impl Serialize for KindSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.kinds())
    }
}

impl<'de> Deserialize<'de> for KindSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let kinds = Vec::<MoveKind>::deserialize(d)?;
        Ok(KindSet::of(&kinds))
    }
}

impl fmt::Display for KindSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.kinds().map(MoveKind::name).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Term {
    Int(i32),
    /// The board size.
    N,
    Coord(Point, Coord),
    Room(Point),
    /// Manhattan distance from the white king to the critical square.
    CriticalDistance(Point),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Formula {
    True,
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Lt(Term, Term),
    Le(Term, Term),
    Eq(Term, Term),
    /// The i-th white move has one of these kinds.
    KindIn(usize, KindSet),
    RookPresent(Point),
    Checkmate(Point),
    Exposed(Point),
    Divides(Point),
    LPattern(Point),
    /// The rook attacks the black king.
    InCheck(Point),
}

/// Positions `p0, p0', p1, ...` and the kinds of the white moves between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub positions: Vec<Position>,
    pub kinds: Vec<MoveKind>,
}

impl Trace {
    pub fn at(&self, pt: Point) -> Option<&Position> {
        self.positions.get(pt.index())
    }
}

impl Term {
    /// `None` when the term refers to a missing position or rook.
    pub fn eval(&self, t: &Trace, spec: &BoardSpec) -> Option<i32> {
        match self {
            Term::Int(v) => Some(*v),
            Term::N => Some(spec.n()),
            Term::Coord(pt, c) => c.of(t.at(*pt)?),
            Term::Room(pt) => {
                let p = t.at(*pt)?;
                Some(room_sq(p.wr?, p.bk, spec.n()))
            }
            Term::CriticalDistance(pt) => {
                let p = t.at(*pt)?;
                let wr = p.wr?;
                (wr != p.bk).then(|| crate::board::manhattan(p.wk, critical_square_sq(wr, p.bk)))
            }
        }
    }

    fn is_invariant(&self) -> bool {
        !matches!(self, Term::Coord(..))
    }
}

impl Formula {
    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::And(parts.into_iter().collect())
    }

    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::Or(parts.into_iter().collect())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Comparisons involving a missing rook are false, as is every
    /// position predicate on a missing rook except `RookPresent`.
    pub fn eval(&self, t: &Trace, spec: &BoardSpec) -> bool {
        let cmp = |a: &Term, b: &Term, f: fn(i32, i32) -> bool| match (
            a.eval(t, spec),
            b.eval(t, spec),
        ) {
            (Some(x), Some(y)) => f(x, y),
            _ => false,
        };
        let with_rook = |pt: &Point, f: &dyn Fn(&Position, crate::board::Square) -> bool| {
            t.at(*pt).is_some_and(|p| p.wr.is_some_and(|wr| f(p, wr)))
        };
        match self {
            Formula::True => true,
            Formula::Not(f) => !f.eval(t, spec),
            Formula::And(fs) => fs.iter().all(|f| f.eval(t, spec)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(t, spec)),
            Formula::Implies(a, b) => !a.eval(t, spec) || b.eval(t, spec),
            Formula::Lt(a, b) => cmp(a, b, |x, y| x < y),
            Formula::Le(a, b) => cmp(a, b, |x, y| x <= y),
            Formula::Eq(a, b) => cmp(a, b, |x, y| x == y),
            Formula::KindIn(i, set) => t.kinds.get(*i).is_some_and(|&k| set.contains(k)),
            Formula::RookPresent(pt) => t.at(*pt).is_some_and(|p| p.wr.is_some()),
            Formula::Checkmate(pt) => t.at(*pt).is_some_and(|p| p.is_checkmate(spec)),
            Formula::Exposed(pt) => {
                with_rook(pt, &|p, wr| wr_exposed_sq(p.wk, p.bk, wr, p.white_to_move))
            }
            Formula::Divides(pt) => with_rook(pt, &|p, wr| wr_divides_sq(p.wk, p.bk, wr)),
            Formula::LPattern(pt) => with_rook(pt, &|p, wr| l_pattern_sq(p.wk, p.bk, wr)),
            Formula::InCheck(pt) => t.at(*pt).is_some_and(|p| p.wr_attacks_bk()),
        }
    }

    /// Syntactic check: no raw coordinates, so the value cannot change
    /// under a reflection of the whole trace.
    pub fn is_invariant(&self) -> bool {
        match self {
            Formula::Not(f) => f.is_invariant(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_invariant),
            Formula::Implies(a, b) => a.is_invariant() && b.is_invariant(),
            Formula::Lt(a, b) | Formula::Le(a, b) | Formula::Eq(a, b) => {
                a.is_invariant() && b.is_invariant()
            }
            _ => true,
        }
    }

    /// The conjuncts of a top-level conjunction (or the formula itself).
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(fs) => fs.iter().collect(),
            f => vec![f],
        }
    }

    /// Highest trace point index and white move index mentioned.
    pub fn extent(&self) -> (Option<usize>, Option<usize>) {
        fn max(a: Option<usize>, b: Option<usize>) -> Option<usize> {
            a.max(b)
        }
        fn term(t: &Term) -> Option<usize> {
            match t {
                Term::Coord(p, _) | Term::Room(p) | Term::CriticalDistance(p) => Some(p.index()),
                _ => None,
            }
        }
        match self {
            Formula::True => (None, None),
            Formula::Not(f) => f.extent(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().fold((None, None), |(a, b), f| {
                let (x, y) = f.extent();
                (max(a, x), max(b, y))
            }),
            Formula::Implies(a, b) => {
                let ((w, x), (y, z)) = (a.extent(), b.extent());
                (max(w, y), max(x, z))
            }
            Formula::Lt(a, b) | Formula::Le(a, b) | Formula::Eq(a, b) => {
                (max(term(a), term(b)), None)
            }
            Formula::KindIn(i, _) => (None, Some(*i)),
            Formula::RookPresent(p)
            | Formula::Checkmate(p)
            | Formula::Exposed(p)
            | Formula::Divides(p)
            | Formula::LPattern(p)
            | Formula::InCheck(p) => (Some(p.index()), None),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(v) => write!(f, "{v}"),
            Term::N => f.write_str("n"),
            Term::Coord(p, c) => write!(f, "{}({p})", c.name()),
            Term::Room(p) => write!(f, "room({p})"),
            Term::CriticalDistance(p) => write!(f, "dist_cs({p})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, fs: &[Formula], op: &str| -> fmt::Result {
            f.write_str("(")?;
            for (i, x) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        };
        match self {
            Formula::True => f.write_str("true"),
            Formula::Not(x) => write!(f, "!{x}"),
            Formula::And(fs) => join(f, fs, "&&"),
            Formula::Or(fs) => join(f, fs, "||"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Lt(a, b) => write!(f, "{a} < {b}"),
            Formula::Le(a, b) => write!(f, "{a} <= {b}"),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::KindIn(i, set) => write!(f, "m{i} in {set}"),
            Formula::RookPresent(p) => write!(f, "rook({p})"),
            Formula::Checkmate(p) => write!(f, "mate({p})"),
            Formula::Exposed(p) => write!(f, "exposed({p})"),
            Formula::Divides(p) => write!(f, "divides({p})"),
            Formula::LPattern(p) => write!(f, "l_pattern({p})"),
            Formula::InCheck(p) => write!(f, "check({p})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace() -> Trace {
        Trace {
            positions: vec![
                Position::with_rook((2, 2), (6, 5), (4, 3), true),
                Position::with_rook((2, 2), (6, 5), (4, 4), false),
                Position::with_rook((2, 2), (6, 4), (4, 4), true),
            ],
            kinds: vec![MoveKind::Squeeze],
        }
    }

    #[test]
    fn evaluates_on_a_trace() {
        let spec = BoardSpec::generalized(8).unwrap();
        let t = trace();
        assert_eq!(Term::Room(Point::White(0)).eval(&t, &spec), Some(3 + 4));
        assert_eq!(Term::Room(Point::Black(0)).eval(&t, &spec), Some(3 + 3));
        assert_eq!(
            Term::Coord(Point::White(1), Coord::BkY).eval(&t, &spec),
            Some(4)
        );
        assert_eq!(Term::Room(Point::White(3)).eval(&t, &spec), None);
        assert!(Formula::KindIn(0, KindSet::basic()).eval(&t, &spec));
        assert!(!Formula::KindIn(1, KindSet::basic()).eval(&t, &spec));
        assert!(Formula::Divides(Point::White(0)).eval(&t, &spec));
        let f = Formula::implies(Formula::True, Formula::Lt(Term::Int(1), Term::N));
        assert!(f.eval(&t, &spec) && f.is_invariant());
        assert!(
            !Formula::Le(Term::Coord(Point::White(0), Coord::WkX), Term::Int(3)).is_invariant()
        );
    }

    #[test]
    fn kind_sets() {
        let b = KindSet::basic();
        assert_eq!(b.kinds().count(), 5);
        assert_eq!(b.union(KindSet::mate()).complement().kinds().count(), 3);
        let json = serde_json::to_string(&KindSet::of(&[MoveKind::RookHome])).unwrap();
        assert_eq!(json, "[\"RookHome\"]");
        assert_eq!(
            serde_json::from_str::<KindSet>(&json).unwrap(),
            KindSet::of(&[MoveKind::RookHome])
        );
    }

    #[test]
    fn extent_and_display() {
        let f = Formula::and([
            Formula::KindIn(2, KindSet::basic()),
            Formula::Checkmate(Point::Black(3)),
        ]);
        assert_eq!(f.extent(), (Some(7), Some(2)));
        assert_eq!(f.conjuncts().len(), 2);
        assert_eq!(
            format!("{}", Formula::Lt(Term::Room(Point::White(1)), Term::Int(3))),
            "room(p1) < 3"
        );
    }
}
