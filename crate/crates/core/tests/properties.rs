use krk_core::geometry::{critical_square_sq, room_sq};
use krk_core::{
    canonize, is_canonical, orbit, BoardSpec, Mode, PackedPosition, Position, Square,
    Strategy as KrkStrategy, Symmetry,
};
use proptest::prelude::*;

fn board(max: i32) -> impl proptest::strategy::Strategy<Value = i32> {
    4..=max
}

fn square(n: i32) -> impl proptest::strategy::Strategy<Value = Square> {
    (0..n, 0..n).prop_map(|(x, y)| Square::new(x, y))
}

/// A board size with a well-formed position on it.
fn well_formed(max: i32) -> impl proptest::strategy::Strategy<Value = (BoardSpec, Position)> {
    board(max).prop_flat_map(|n| {
        let spec = BoardSpec::generalized(n).unwrap();
        (
            square(n),
            square(n),
            proptest::option::weighted(0.9, square(n)),
            any::<bool>(),
        )
            .prop_map(move |(wk, bk, wr, side)| (spec, Position::new(wk, bk, wr, side)))
            .prop_filter("well-formed", move |(spec, p)| p.is_well_formed(spec))
    })
}

/// A board size with a legal white-to-move position (rook on board).
fn legal_white(max: i32) -> impl proptest::strategy::Strategy<Value = (BoardSpec, Position)> {
    well_formed(max)
        .prop_map(|(spec, p)| {
            (
                spec,
                Position::new(p.wk, p.bk, p.wr.or(Some(Square::new(0, 0))), true),
            )
        })
        .prop_filter("legal", |(spec, p)| p.is_legal(spec))
}

fn symmetry() -> impl proptest::strategy::Strategy<Value = Symmetry> {
    (0..8usize).prop_map(|i| Symmetry::all().nth(i).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn packing_round_trips((spec, p) in well_formed(1024)) {
        let packed = PackedPosition::pack(&p, &spec).unwrap();
        prop_assert!(packed.0 < 1u64 << spec.packed_width());
        prop_assert_eq!(packed.unpack(&spec).unwrap(), p);
        prop_assert_eq!(PackedPosition::from_bit_string(&packed.to_bit_string(&spec), &spec).unwrap(), packed);
    }

    #[test]
    fn rules_are_reflection_invariant((spec, p) in well_formed(40), s in symmetry()) {
        let q = s.apply_position(&p, &spec);
        prop_assert!(q.is_well_formed(&spec));
        prop_assert_eq!(p.is_legal(&spec), q.is_legal(&spec));
        prop_assert_eq!(p.is_checkmate(&spec), q.is_checkmate(&spec));
        prop_assert_eq!(p.is_stalemate(&spec), q.is_stalemate(&spec));
        if let (Some(a), Some(b)) = (p.wr, q.wr) {
            prop_assert_eq!(room_sq(a, p.bk, spec.n()), room_sq(b, q.bk, spec.n()));
            prop_assert_eq!(s.apply(critical_square_sq(a, p.bk), &spec), critical_square_sq(b, q.bk));
        }
    }

    #[test]
    fn canonical_form_is_unique((spec, p) in well_formed(40)) {
        let c = canonize(&p, &spec);
        prop_assert!(is_canonical(&c, &spec));
        prop_assert_eq!(canonize(&c, &spec), c);
        for q in orbit(&p, &spec) {
            prop_assert_eq!(canonize(&q, &spec), c);
        }
    }

    #[test]
    fn successors_are_legal_and_alternate((spec, p) in well_formed(24)) {
        prop_assume!(p.is_legal(&spec) && p.wr.is_some());
        for q in p.legal_successors(&spec).unwrap() {
            prop_assert!(q.is_legal(&spec));
            prop_assert_eq!(q.white_to_move, !p.white_to_move);
            prop_assert!(p.is_legal_move(&q, &spec));
        }
    }

    #[test]
    fn strategy_moves_are_legal_and_safe((spec, p) in legal_white(24)) {
        let st = KrkStrategy::new(spec);
        let kind = st.classify(&p).unwrap();
        let m = st.strategy_function(&p).unwrap();
        prop_assert_eq!(m.kind, kind);
        prop_assert!(p.is_legal_move(&m.to, &spec));
        prop_assert!(!m.to.is_stalemate(&spec));
        prop_assert!(st.strategy_relation(&p, &m.to, m.kind));
        // the black king can never take the rook after a strategy move
        for r in m.to.legal_successors(&spec).unwrap() {
            prop_assert!(r.wr.is_some(), "{} -> {} lets {} take the rook", p, m.to, r.bk);
        }
        let all = st.strategy_successors(&p).unwrap();
        prop_assert!(all.iter().all(|s| s.kind == kind));
        prop_assert!(all.iter().any(|s| s.to == m.to));
    }

    #[test]
    fn modes_parse_round_trip(m in prop_oneof![Just(Mode::Function), Just(Mode::Relation)]) {
        prop_assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
    }
}
