//! Exhaustive checking of bounded lemmas "Pre p0 and a compliant sequence
//! of strategy moves and black replies imply Post", plus the equivalence and
//! refinement checks.

use std::collections::HashSet;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::board::{
    enumerate_legal, enumerate_well_formed, for_each_black_move, BoardSpec, PackedPosition,
    Position, Variant,
};
use crate::error::{KrkError, Result};
use crate::formula::{Formula, KindSet, Point, Term, Trace};
use crate::patterns::{mate_opt, stalemate_opt};
use crate::strategy::{Mode, MoveKind, Strategy};
use crate::symmetry::{canonical_symmetry, is_canonical, Reflection, Symmetry};

/// Counterexamples kept per report.
pub const MAX_COUNTEREXAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndsWith {
    White,
    Black,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LemmaSpec {
    pub name: String,
    pub description: String,
    /// Number of white moves in the sequence.
    pub k: usize,
    /// Condition on `p0`; legality and the rook's presence are implied.
    pub pre: Formula,
    /// Allowed kinds for each white move, `None` for any.
    pub steps: Vec<Option<KindSet>>,
    pub post: Formula,
    pub ends_with: EndsWith,
    pub semantics: Mode,
}

impl LemmaSpec {
    pub fn with_semantics(mut self, semantics: Mode) -> Self {
        self.semantics = semantics;
        self
    }

    /// Positions in a complete trace.
    pub fn trace_len(&self) -> usize {
        match self.ends_with {
            EndsWith::White => 2 * self.k,
            EndsWith::Black => 2 * self.k + 1,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |why: &str| Err(KrkError::InvalidLemma(format!("{}: {why}", self.name)));
        if self.k == 0 || self.steps.len() != self.k {
            return bad("needs k >= 1 and one step constraint per white move");
        }
        if self.pre.extent().0.is_some_and(|i| i > 0) || self.pre.extent().1.is_some() {
            return bad("the precondition may only mention p0");
        }
        let (points, moves) = self.post.extent();
        if points.is_some_and(|i| i >= self.trace_len()) || moves.is_some_and(|i| i >= self.k) {
            return bad("the postcondition refers past the end of the trace");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trace: Trace,
    /// The first conjunct of the postcondition that fails.
    pub violated: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LemmaReport {
    pub name: String,
    pub n: i32,
    pub variant: Variant,
    pub mode: Mode,
    pub use_symmetry: bool,
    pub holds: bool,
    /// Start positions enumerated.
    pub scanned: u64,
    /// Complete traces checked against the postcondition.
    pub traces: u64,
    /// Traces that could not be extended to full length.
    pub vacuous: u64,
    pub violations: u64,
    pub counterexamples: Vec<Counterexample>,
    pub elapsed_ms: u64,
}

const NO_KIND: u8 = u8::MAX;

/// Strategy moves of every legal white-to-move position, indexed by the
/// coordinate part of the packed encoding.
pub struct MoveTable {
    spec: BoardSpec,
    start: Vec<u32>,
    kinds: Vec<u8>,
    targets: Vec<Position>,
}

impl MoveTable {
    pub fn build(strategy: &Strategy, mode: Mode) -> Self {
        let spec = *strategy.spec();
        let len = 1usize << (6 * spec.coord_bits());
        let mut start = Vec::with_capacity(len + 1);
        let mut kinds = vec![NO_KIND; len];
        let mut targets = Vec::new();
        for p in enumerate_legal(spec, Some(true), true) {
            let key = key(&p, &spec);
            start.resize(key + 1, targets.len() as u32);
            let moves = match mode {
                Mode::Function => strategy.strategy_function(&p).into_iter().collect(),
                Mode::Relation => strategy.strategy_successors(&p).unwrap_or_default(),
            };
            if let Some(m) = moves.first() {
                kinds[key] = m.kind.index() as u8;
            }
            targets.extend(moves.iter().map(|m| m.to));
        }
        start.resize(len + 1, targets.len() as u32);
        MoveTable {
            spec,
            start,
            kinds,
            targets,
        }
    }

    /// The kind and the positions after white's move; empty for positions
    /// outside the strategy's domain.
    pub fn moves(&self, p: &Position) -> (Option<MoveKind>, &[Position]) {
        if !p.white_to_move || p.wr.is_none() || !p.is_well_formed(&self.spec) {
            return (None, &[]);
        }
        let k = key(p, &self.spec);
        let kind = (self.kinds[k] != NO_KIND).then(|| MoveKind::ALL[self.kinds[k] as usize]);
        (
            kind,
            &self.targets[self.start[k] as usize..self.start[k + 1] as usize],
        )
    }
}

fn key(p: &Position, spec: &BoardSpec) -> usize {
    PackedPosition::pack_unchecked(p, spec).coords() as usize
}

fn transform_trace(t: &Trace, s: Symmetry, spec: &BoardSpec) -> Trace {
    Trace {
        positions: t
            .positions
            .iter()
            .map(|p| s.apply_position(p, spec))
            .collect(),
        kinds: t.kinds.clone(),
    }
}

fn reflect_trace(t: &Trace, axis: Reflection, spec: &BoardSpec) -> Trace {
    Trace {
        positions: t
            .positions
            .iter()
            .map(|p| crate::symmetry::reflect(p, axis, spec))
            .collect(),
        kinds: t.kinds.clone(),
    }
}

/// Traces whose postcondition is re-evaluated on their reflections.
const SPOT_CHECKS: u64 = 256;

struct Search<'a> {
    lemma: &'a LemmaSpec,
    table: &'a MoveTable,
    spec: BoardSpec,
    use_symmetry: bool,
    traces: u64,
    vacuous: u64,
    violations: u64,
    seen: HashSet<Vec<Position>>,
    counterexamples: Vec<Counterexample>,
    not_invariant: bool,
}

impl Search<'_> {
    fn extend(&mut self, t: &mut Trace, i: usize) {
        let p = *t.positions.last().unwrap();
        let (kind, moves) = self.table.moves(&p);
        let Some(kind) = kind else {
            self.vacuous += 1;
            return;
        };
        if self.lemma.steps[i].is_some_and(|set| !set.contains(kind)) {
            return;
        }
        let last = i + 1 == self.lemma.k;
        for q in moves {
            t.positions.push(*q);
            t.kinds.push(kind);
            if last && self.lemma.ends_with == EndsWith::White {
                self.finish(t);
            } else {
                let mut replies = Vec::with_capacity(8);
                for_each_black_move(q, &self.spec, |r| replies.push(r));
                if replies.is_empty() {
                    self.vacuous += 1;
                }
                for r in replies {
                    t.positions.push(r);
                    if last {
                        self.finish(t);
                    } else {
                        self.extend(t, i + 1);
                    }
                    t.positions.pop();
                }
            }
            t.positions.pop();
            t.kinds.pop();
        }
    }

    fn finish(&mut self, t: &Trace) {
        self.traces += 1;
        let holds = self.lemma.post.eval(t, &self.spec);
        if self.use_symmetry && self.traces <= SPOT_CHECKS {
            for axis in Reflection::ALL {
                if self
                    .lemma
                    .post
                    .eval(&reflect_trace(t, axis, &self.spec), &self.spec)
                    != holds
                {
                    self.not_invariant = true;
                }
            }
        }
        if holds {
            return;
        }
        self.violations += 1;
        let canonical = transform_trace(
            t,
            canonical_symmetry(&t.positions[0], &self.spec),
            &self.spec,
        );
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES
            && self.seen.insert(canonical.positions.clone())
        {
            let violated = self
                .lemma
                .post
                .conjuncts()
                .into_iter()
                .find(|c| !c.eval(t, &self.spec))
                .map_or_else(|| self.lemma.post.to_string(), |c| c.to_string());
            self.counterexamples.push(Counterexample {
                trace: canonical,
                violated,
            });
        }
    }
}

/// Checks `lemma` exhaustively against `strategy`. With `use_symmetry` only
/// canonical start positions are enumerated, which requires both conditions
/// to be invariant under reflections.
pub fn check_lemma(
    lemma: &LemmaSpec,
    strategy: &Strategy,
    use_symmetry: bool,
) -> Result<LemmaReport> {
    let table = MoveTable::build(strategy, lemma.semantics);
    check_lemma_with(lemma, &table, use_symmetry)
}

/// As [`check_lemma`], reusing a move table built for the lemma's semantics.
pub fn check_lemma_with(
    lemma: &LemmaSpec,
    table: &MoveTable,
    use_symmetry: bool,
) -> Result<LemmaReport> {
    lemma.validate()?;
    let started = Instant::now();
    let spec = table.spec;
    let not_invariant = || KrkError::NotReflectionInvariant(lemma.name.clone());
    if use_symmetry && !(lemma.pre.is_invariant() && lemma.post.is_invariant()) {
        return Err(not_invariant());
    }
    let mut search = Search {
        lemma,
        table,
        spec,
        use_symmetry,
        traces: 0,
        vacuous: 0,
        violations: 0,
        seen: HashSet::new(),
        counterexamples: Vec::new(),
        not_invariant: false,
    };
    let mut scanned = 0u64;
    let mut trace = Trace {
        positions: Vec::with_capacity(lemma.trace_len()),
        kinds: Vec::with_capacity(lemma.k),
    };
    for p0 in enumerate_legal(spec, Some(true), true) {
        if use_symmetry && !is_canonical(&p0, &spec) {
            continue;
        }
        scanned += 1;
        trace.positions.clear();
        trace.kinds.clear();
        trace.positions.push(p0);
        let pre = lemma.pre.eval(&trace, &spec);
        if use_symmetry && scanned <= SPOT_CHECKS {
            for axis in Reflection::ALL {
                if lemma.pre.eval(&reflect_trace(&trace, axis, &spec), &spec) != pre {
                    return Err(not_invariant());
                }
            }
        }
        if pre {
            search.extend(&mut trace, 0);
        }
    }
    if search.not_invariant {
        return Err(not_invariant());
    }
    Ok(LemmaReport {
        name: lemma.name.clone(),
        n: spec.n(),
        variant: spec.variant(),
        mode: lemma.semantics,
        use_symmetry,
        holds: search.violations == 0,
        scanned,
        traces: search.traces,
        vacuous: search.vacuous,
        violations: search.violations,
        counterexamples: search.counterexamples,
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

/// Replays a counterexample through the legality rules and the strategy
/// relation.
pub fn replay(trace: &Trace, strategy: &Strategy) -> bool {
    let spec = strategy.spec();
    trace.positions.windows(2).enumerate().all(|(j, w)| {
        if j % 2 == 0 {
            trace
                .kinds
                .get(j / 2)
                .is_some_and(|&k| strategy.strategy_relation(&w[0], &w[1], k))
        } else {
            w[0].is_legal_move(&w[1], spec)
        }
    })
}

/// The conjuncts of `¬exposed ∧ (divides ∨ L-pattern) ∧ ¬check ∧ room > 2`
/// at a point.
fn safe_confinement(pt: Point, strict_divides: bool) -> [Formula; 4] {
    let shape = if strict_divides {
        Formula::Divides(pt)
    } else {
        Formula::or([Formula::Divides(pt), Formula::LPattern(pt)])
    };
    [
        Formula::not(Formula::Exposed(pt)),
        shape,
        Formula::not(Formula::InCheck(pt)),
        Formula::Lt(Term::Int(2), Term::Room(pt)),
    ]
}

/// The built-in lemmas, in relation semantics.
pub fn builtin_lemmas() -> Vec<LemmaSpec> {
    use Point::{Black, White};
    let any = |k: usize| vec![None; k];
    let rook_safe = KindSet::of(&[MoveKind::RookSafe, MoveKind::RookSafeSmallBoards]);
    let rook_moves = rook_safe.union(KindSet::of(&[MoveKind::RookHome]));
    let rook_home = KindSet::of(&[MoveKind::RookHome]);
    let lemma = |name: &str, description: &str, k, pre, steps, post, ends_with| LemmaSpec {
        name: name.into(),
        description: description.into(),
        k,
        pre,
        steps,
        post,
        ends_with,
        semantics: Mode::Relation,
    };
    vec![
        lemma(
            "rook_safe",
            "after a strategy move black cannot capture the rook",
            1,
            Formula::True,
            any(1),
            Formula::RookPresent(White(1)),
            EndsWith::Black,
        ),
        lemma(
            "immediate_mate",
            "an ImmediateMate move checkmates",
            1,
            Formula::True,
            vec![Some(KindSet::of(&[MoveKind::ImmediateMate]))],
            Formula::Checkmate(Black(0)),
            EndsWith::White,
        ),
        lemma(
            "ready_to_mate",
            "after a ReadyToMate move and any reply white mates at once",
            2,
            Formula::True,
            vec![Some(KindSet::of(&[MoveKind::ReadyToMate])), None],
            Formula::and([Formula::KindIn(1, KindSet::of(&[MoveKind::ImmediateMate])), Formula::Checkmate(Black(1))]),
            EndsWith::White,
        ),
        lemma(
            "rook_moves_early",
            "rook moves are only played in the first three moves",
            4,
            Formula::True,
            any(4),
            Formula::not(Formula::KindIn(3, rook_moves)),
            EndsWith::White,
        ),
        lemma(
            "progress",
            "with room above 3, three basic moves shrink the room or keep it and bring the king closer to the critical square",
            3,
            Formula::Lt(Term::Int(3), Term::Room(White(0))),
            vec![Some(KindSet::basic()); 3],
            Formula::or([
                Formula::Lt(Term::Room(White(3)), Term::Room(White(0))),
                Formula::and([
                    Formula::Eq(Term::Room(White(3)), Term::Room(White(0))),
                    Formula::Lt(Term::CriticalDistance(White(3)), Term::CriticalDistance(White(0))),
                ]),
            ]),
            EndsWith::Black,
        ),
        lemma(
            "endgame_mate",
            "with room at most 3, after three basic moves the next move mates or prepares mate",
            4,
            Formula::Le(Term::Room(White(0)), Term::Int(3)),
            vec![Some(KindSet::basic()), Some(KindSet::basic()), Some(KindSet::basic()), None],
            Formula::KindIn(3, KindSet::mate()),
            EndsWith::White,
        ),
        lemma(
            "basic_progress",
            "after a basic move only a basic or a mating move follows",
            2,
            Formula::True,
            vec![Some(KindSet::basic()), None],
            Formula::KindIn(1, KindSet::basic().union(KindSet::mate())),
            EndsWith::White,
        ),
        lemma(
            "rook_safe_first",
            "RookSafe is only played as the first move",
            2,
            Formula::True,
            any(2),
            Formula::not(Formula::KindIn(1, KindSet::of(&[MoveKind::RookSafe]))),
            EndsWith::White,
        ),
        lemma(
            "rook_home_after_rook_move",
            "RookHome only follows another rook move",
            2,
            Formula::True,
            any(2),
            Formula::implies(Formula::KindIn(1, rook_home), Formula::KindIn(0, rook_moves)),
            EndsWith::White,
        ),
        lemma(
            "no_third_rook_home",
            "RookHome is never played three times in a row",
            3,
            Formula::True,
            any(3),
            Formula::not(Formula::and([
                Formula::KindIn(0, rook_home),
                Formula::KindIn(1, rook_home),
                Formula::KindIn(2, rook_home),
            ])),
            EndsWith::White,
        ),
        lemma(
            "after_two_rook_home",
            "two RookHome moves leave the rook safe, dividing, not checking, with room above 2",
            2,
            Formula::True,
            vec![Some(rook_home), Some(rook_home)],
            Formula::and(safe_confinement(Black(1), true)),
            EndsWith::White,
        ),
        lemma(
            "confinement_preserved",
            "safe confinement survives every non-mating white move and every black reply",
            1,
            Formula::and(safe_confinement(White(0), false)),
            vec![Some(KindSet::mate().complement())],
            Formula::and(safe_confinement(Black(0), false).into_iter().chain(safe_confinement(White(1), false))),
            EndsWith::Black,
        ),
    ]
}

pub fn builtin_lemma(name: &str) -> Option<LemmaSpec> {
    builtin_lemmas().into_iter().find(|l| l.name == name)
}

/// Named position predicates for [`check_equivalence`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PositionPredicate {
    Checkmate,
    MateOpt,
    Stalemate,
    StalemateOpt,
    /// No move of the kind exists, by a full scan.
    NoMoveNaive(MoveKind),
    /// No move of the kind exists, by the candidate sets.
    NoMove(MoveKind),
}

impl PositionPredicate {
    /// `None` where the predicate is undefined.
    pub fn eval(self, p: &Position, strategy: &Strategy) -> Option<bool> {
        let spec = strategy.spec();
        match self {
            PositionPredicate::Checkmate => Some(p.is_checkmate(spec)),
            PositionPredicate::MateOpt => Some(mate_opt(p, spec)),
            PositionPredicate::Stalemate => Some(p.is_stalemate(spec)),
            PositionPredicate::StalemateOpt => Some(stalemate_opt(p, spec)),
            PositionPredicate::NoMoveNaive(k) => strategy.no_move_naive(k, p).ok(),
            PositionPredicate::NoMove(k) => strategy.no_move(k, p).ok(),
        }
    }
}

impl fmt::Display for PositionPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositionPredicate::Checkmate => f.write_str("checkmate"),
            PositionPredicate::MateOpt => f.write_str("mate_opt"),
            PositionPredicate::Stalemate => f.write_str("stalemate"),
            PositionPredicate::StalemateOpt => f.write_str("stalemate_opt"),
            PositionPredicate::NoMoveNaive(k) => write!(f, "no_move_naive({k})"),
            PositionPredicate::NoMove(k) => write!(f, "no_move({k})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Domain {
    WellFormed,
    Legal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EquivalenceReport {
    pub left: String,
    pub right: String,
    pub n: i32,
    pub holds: bool,
    pub scanned: u64,
    /// Positions where either side is undefined.
    pub skipped: u64,
    pub discrepancies: Vec<Position>,
}

pub fn check_equivalence(
    a: PositionPredicate,
    b: PositionPredicate,
    strategy: &Strategy,
    domain: Domain,
) -> EquivalenceReport {
    let spec = *strategy.spec();
    let positions: Box<dyn Iterator<Item = Position>> = match domain {
        Domain::WellFormed => Box::new(enumerate_well_formed(spec)),
        Domain::Legal => {
            Box::new(enumerate_legal(spec, None, true).chain(enumerate_legal(spec, None, false)))
        }
    };
    let mut report = EquivalenceReport {
        left: a.to_string(),
        right: b.to_string(),
        n: spec.n(),
        holds: true,
        scanned: 0,
        skipped: 0,
        discrepancies: Vec::new(),
    };
    for p in positions {
        report.scanned += 1;
        match (a.eval(&p, strategy), b.eval(&p, strategy)) {
            (Some(x), Some(y)) if x != y => {
                report.holds = false;
                if report.discrepancies.len() < MAX_COUNTEREXAMPLES {
                    report.discrepancies.push(p);
                }
            }
            (Some(_), Some(_)) => {}
            _ => report.skipped += 1,
        }
    }
    report
}

/// The predicate pairs that should agree, with the domain they are checked on.
pub fn standard_equivalences(
    variant: Variant,
) -> Vec<(PositionPredicate, PositionPredicate, Domain)> {
    let mut out = vec![
        (
            PositionPredicate::Checkmate,
            PositionPredicate::MateOpt,
            Domain::WellFormed,
        ),
        (
            PositionPredicate::Stalemate,
            PositionPredicate::StalemateOpt,
            Domain::WellFormed,
        ),
    ];
    for &k in MoveKind::cascade(variant) {
        out.push((
            PositionPredicate::NoMoveNaive(k),
            PositionPredicate::NoMove(k),
            Domain::Legal,
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RefinementReport {
    pub n: i32,
    pub variant: Variant,
    pub holds: bool,
    pub scanned: u64,
    pub failures: Vec<Position>,
}

/// Every legal white-to-move position has a function move, and that move
/// is allowed by the relation.
pub fn check_refinement(strategy: &Strategy) -> RefinementReport {
    let spec = *strategy.spec();
    let mut report = RefinementReport {
        n: spec.n(),
        variant: spec.variant(),
        holds: true,
        scanned: 0,
        failures: Vec::new(),
    };
    for p in enumerate_legal(spec, Some(true), true) {
        report.scanned += 1;
        let ok = strategy
            .strategy_function(&p)
            .is_some_and(|m| strategy.strategy_relation(&p, &m.to, m.kind));
        if !ok {
            report.holds = false;
            if report.failures.len() < MAX_COUNTEREXAMPLES {
                report.failures.push(p);
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Coord;
    use crate::retrograde::{closure_check, retrograde_verify};
    use crate::strategy::Mutations;

    fn gen(n: i32) -> Strategy {
        Strategy::new(BoardSpec::generalized(n).unwrap())
    }

    fn run_all(st: &Strategy, mode: Mode, use_symmetry: bool) -> Vec<LemmaReport> {
        let table = MoveTable::build(st, mode);
        builtin_lemmas()
            .into_iter()
            .map(|l| check_lemma_with(&l.with_semantics(mode), &table, use_symmetry).unwrap())
            .collect()
    }

    #[test]
    fn builtin_names_are_unique() {
        let lemmas = builtin_lemmas();
        let names: HashSet<_> = lemmas.iter().map(|l| l.name.as_str()).collect();
        assert_eq!(names.len(), lemmas.len());
        assert_eq!(lemmas.len(), 12);
        assert!(builtin_lemma("progress").is_some_and(|l| l.k == 3));
        assert!(builtin_lemma("nope").is_none());
    }

    #[test]
    fn everything_holds_on_4x4() {
        for mode in [Mode::Relation, Mode::Function] {
            for r in run_all(&gen(4), mode, true) {
                assert!(r.holds, "{} {mode}: {:?}", r.name, r.counterexamples);
            }
        }
    }

    #[test]
    fn symmetry_reduction_does_not_change_verdicts() {
        for n in [4, 5] {
            let st = gen(n);
            let with = run_all(&st, Mode::Relation, true);
            let without = run_all(&st, Mode::Relation, false);
            for (a, b) in with.iter().zip(&without) {
                assert_eq!(a.holds, b.holds, "{} n={n}", a.name);
                assert!(a.scanned < b.scanned);
            }
        }
    }

    #[test]
    fn function_traces_are_relation_traces() {
        for n in 4..=6 {
            let st = gen(n);
            let rel = run_all(&st, Mode::Relation, true);
            let fun = run_all(&st, Mode::Function, true);
            for (r, f) in rel.iter().zip(&fun) {
                assert!(f.traces <= r.traces, "{}", r.name);
                assert!(f.violations <= r.violations, "{}", r.name);
                assert!(!r.holds || f.holds, "{}", r.name);
            }
        }
    }

    #[test]
    fn rook_safety_agrees_with_the_closure_check() {
        for n in 4..=6 {
            let st = gen(n);
            let r = check_lemma(&builtin_lemma("rook_safe").unwrap(), &st, true).unwrap();
            assert_eq!(r.holds, closure_check(&st));
            assert!(r.holds);
        }
    }

    #[test]
    fn refined_rook_lemmas_imply_rook_moves_early() {
        let refined = [
            "rook_safe_first",
            "rook_home_after_rook_move",
            "no_third_rook_home",
        ];
        for n in 4..=6 {
            let reports = run_all(&gen(n), Mode::Relation, true);
            let holds = |name: &str| reports.iter().find(|r| r.name == name).unwrap().holds;
            if refined.iter().all(|&l| holds(l)) {
                assert!(holds("rook_moves_early"), "n={n}");
            }
        }
    }

    #[test]
    fn counterexamples_replay_and_violate() {
        let st = gen(5);
        let lemma = builtin_lemma("confinement_preserved").unwrap();
        let r = check_lemma(&lemma, &st, true).unwrap();
        assert!(!r.holds);
        assert!(!r.counterexamples.is_empty() && r.counterexamples.len() <= MAX_COUNTEREXAMPLES);
        for c in &r.counterexamples {
            assert!(replay(&c.trace, &st));
            assert!(is_canonical(&c.trace.positions[0], st.spec()));
            assert!(lemma.pre.eval(&c.trace, st.spec()));
            assert!(!lemma.post.eval(&c.trace, st.spec()));
            assert_eq!(c.trace.positions.len(), lemma.trace_len());
        }
    }

    #[test]
    fn mutations_are_caught() {
        let mutations = [
            Mutations {
                squeeze_ignores_exposure: true,
                ..Default::default()
            },
            Mutations {
                rook_home_ignores_stalemate: true,
                ..Default::default()
            },
        ];
        for m in mutations {
            let caught = (4..=8).any(|n| {
                let st = gen(n).with_mutations(m);
                !retrograde_verify(&st, Mode::Function).all_winning
                    || run_all(&st, Mode::Function, true).iter().any(|r| {
                        !r.holds && r.name != "endgame_mate" && r.name != "confinement_preserved"
                    })
            });
            assert!(caught, "{m:?}");
        }
    }

    #[test]
    fn rejects_malformed_and_asymmetric_lemmas() {
        let st = gen(4);
        let mut bad = builtin_lemma("progress").unwrap();
        bad.steps.pop();
        assert!(matches!(
            check_lemma(&bad, &st, false),
            Err(KrkError::InvalidLemma(_))
        ));
        let mut late = builtin_lemma("rook_safe").unwrap();
        late.post = Formula::RookPresent(Point::White(3));
        assert!(matches!(
            check_lemma(&late, &st, false),
            Err(KrkError::InvalidLemma(_))
        ));

        let mut corner = builtin_lemma("rook_safe").unwrap();
        corner.pre = Formula::Eq(Term::Coord(Point::White(0), Coord::BkX), Term::Int(0));
        assert!(matches!(
            check_lemma(&corner, &st, true),
            Err(KrkError::NotReflectionInvariant(_))
        ));
        assert!(check_lemma(&corner, &st, false).unwrap().holds);
    }

    #[test]
    fn equivalences_hold_on_small_boards() {
        for n in 4..=6 {
            let st = gen(n);
            for (a, b, domain) in standard_equivalences(Variant::Generalized) {
                let r = check_equivalence(a, b, &st, domain);
                assert!(
                    r.holds,
                    "n={n} {} vs {}: {:?}",
                    r.left, r.right, r.discrepancies
                );
                assert!(r.scanned > 0);
            }
        }
    }

    #[test]
    fn equivalence_reports_discrepancies() {
        let st = gen(4);
        let r = check_equivalence(
            PositionPredicate::Checkmate,
            PositionPredicate::Stalemate,
            &st,
            Domain::WellFormed,
        );
        assert!(!r.holds);
        assert!(!r.discrepancies.is_empty());
    }

    #[test]
    fn function_refines_relation() {
        for n in 4..=6 {
            let r = check_refinement(&gen(n));
            assert!(r.holds, "n={n}: {:?}", r.failures);
            assert_eq!(
                r.scanned,
                crate::board::count_legal(*gen(n).spec(), Some(true), true)
            );
        }
    }

    #[test]
    fn report_serializes() {
        let r = check_lemma(&builtin_lemma("immediate_mate").unwrap(), &gen(4), true).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["name"], "immediate_mate");
        assert_eq!(v["useSymmetry"], true);
        assert!(v["elapsedMs"].is_u64());
    }
}
