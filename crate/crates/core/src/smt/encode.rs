//! The strategy and the lemmas as quantifier-free linear integer arithmetic
//! over a symbolic board size `n`.
//!
//! Every helper is emitted once as a `define-fun`; a lemma then declares
//! the coordinates of each trace position and asserts the precondition,
//! the move sequence and the negated postcondition. An `unsat` answer
//! proves the lemma for every board size the script allows.

use std::collections::HashMap;

use crate::board::{BoardSpec, Position, Square, Variant, KING_STEPS};
use crate::error::{KrkError, Result};
use crate::formula::{Coord, Formula, KindSet, Point, Term, Trace};
use crate::lemma::LemmaSpec;
use crate::strategy::{MoveKind, Strategy};

use super::sexp::Sexp;

fn sym(s: &str) -> Sexp {
    Sexp::atom(s)
}

fn num(v: i64) -> Sexp {
    Sexp::int(v)
}

fn and(parts: Vec<Sexp>) -> Sexp {
    let mut flat = Vec::with_capacity(parts.len());
    for p in parts {
        if p.head() == Some("and") {
            flat.extend(p.as_list().unwrap()[1..].iter().cloned());
        } else if p.as_atom() != Some("true") {
            flat.push(p);
        }
    }
    match flat.len() {
        0 => sym("true"),
        1 => flat.pop().unwrap(),
        _ => Sexp::app("and", flat),
    }
}

fn or(parts: Vec<Sexp>) -> Sexp {
    let mut flat: Vec<Sexp> = parts
        .into_iter()
        .filter(|p| p.as_atom() != Some("false"))
        .collect();
    match flat.len() {
        0 => sym("false"),
        1 => flat.pop().unwrap(),
        _ => Sexp::app("or", flat),
    }
}

fn not(x: Sexp) -> Sexp {
    Sexp::app("not", [x])
}

fn bin(op: &str, a: Sexp, b: Sexp) -> Sexp {
    Sexp::app(op, [a, b])
}

fn eq(a: Sexp, b: Sexp) -> Sexp {
    bin("=", a, b)
}

fn lt(a: Sexp, b: Sexp) -> Sexp {
    bin("<", a, b)
}

fn le(a: Sexp, b: Sexp) -> Sexp {
    bin("<=", a, b)
}

fn ite(c: Sexp, a: Sexp, b: Sexp) -> Sexp {
    Sexp::app("ite", [c, a, b])
}

fn add(a: Sexp, b: Sexp) -> Sexp {
    bin("+", a, b)
}

fn sub(a: Sexp, b: Sexp) -> Sexp {
    bin("-", a, b)
}

/// `a + k` without emitting `(+ a 0)`.
fn plus(a: &Sexp, k: i64) -> Sexp {
    match k {
        0 => a.clone(),
        k if k > 0 => add(a.clone(), num(k)),
        k => sub(a.clone(), num(-k)),
    }
}

fn call(f: &str, args: Vec<Sexp>) -> Sexp {
    Sexp::app(f, args)
}

fn last() -> Sexp {
    sub(sym("n"), num(1))
}

type Sq = (Sexp, Sexp);

fn sq_eq(a: &Sq, b: &Sq) -> Sexp {
    and(vec![
        eq(a.0.clone(), b.0.clone()),
        eq(a.1.clone(), b.1.clone()),
    ])
}

/// Symbolic coordinates of the three pieces.
#[derive(Clone, Debug)]
struct Pos {
    wk: Sq,
    bk: Sq,
    wr: Sq,
}

impl Pos {
    fn named(prefix: &str) -> Pos {
        let v = |c: &str| sym(&format!("{prefix}{c}"));
        Pos {
            wk: (v("wkx"), v("wky")),
            bk: (v("bkx"), v("bky")),
            wr: (v("wrx"), v("wry")),
        }
    }

    fn args(&self) -> Vec<Sexp> {
        vec![
            self.wk.0.clone(),
            self.wk.1.clone(),
            self.bk.0.clone(),
            self.bk.1.clone(),
            self.wr.0.clone(),
            self.wr.1.clone(),
        ]
    }

    fn with_wk(&self, wk: Sq) -> Pos {
        Pos { wk, ..self.clone() }
    }

    fn with_bk(&self, bk: Sq) -> Pos {
        Pos { bk, ..self.clone() }
    }

    fn with_wr(&self, wr: Sq) -> Pos {
        Pos { wr, ..self.clone() }
    }
}

fn p6(f: &str, p: &Pos) -> Sexp {
    call(f, p.args())
}

fn sq_args(f: &str, a: &Sq, b: &Sq) -> Sexp {
    call(f, vec![a.0.clone(), a.1.clone(), b.0.clone(), b.1.clone()])
}

fn cheb(a: &Sq, b: &Sq) -> Sexp {
    sq_args("cheb", a, b)
}

fn manh(a: &Sq, b: &Sq) -> Sexp {
    sq_args("manh", a, b)
}

/// `cond_<kind>` takes the position before the move and the white king and
/// rook after it.
fn cond_call(kind: MoveKind, p: &Pos, q: &Pos) -> Sexp {
    let mut args = p.args();
    args.extend([
        q.wk.0.clone(),
        q.wk.1.clone(),
        q.wr.0.clone(),
        q.wr.1.clone(),
    ]);
    call(&format!("cond_{}", kind_tag(kind)), args)
}

pub(crate) fn kind_tag(kind: MoveKind) -> &'static str {
    match kind {
        MoveKind::ImmediateMate => "immediate_mate",
        MoveKind::ReadyToMate => "ready_to_mate",
        MoveKind::Squeeze => "squeeze",
        MoveKind::ApproachDiag => "approach_diag",
        MoveKind::ApproachNonDiag => "approach_nondiag",
        MoveKind::KeepRoomDiag => "keep_room_diag",
        MoveKind::KeepRoomNonDiag => "keep_room_nondiag",
        MoveKind::RookHome => "rook_home",
        MoveKind::RookSafe => "rook_safe",
        MoveKind::RookSafeSmallBoards => "rook_safe_small",
    }
}

const P6: [&str; 6] = ["wkx", "wky", "bkx", "bky", "wrx", "wry"];
const Q4: [&str; 4] = ["qwkx", "qwky", "qwrx", "qwry"];

fn int_params(names: &[&str]) -> Sexp {
    Sexp::List(
        names
            .iter()
            .map(|p| Sexp::List(vec![sym(p), sym("Int")]))
            .collect(),
    )
}

fn define(name: &str, params: &[&str], ret: &str, body: Sexp) -> Sexp {
    Sexp::List(vec![
        sym("define-fun"),
        sym(name),
        int_params(params),
        sym(ret),
        body,
    ])
}

fn edge_targets(wr: &Sq) -> [Sq; 4] {
    [
        (num(0), wr.1.clone()),
        (last(), wr.1.clone()),
        (wr.0.clone(), num(0)),
        (wr.0.clone(), last()),
    ]
}

fn king_steps(wk: &Sq) -> Vec<Sq> {
    KING_STEPS
        .iter()
        .map(|&(dx, dy)| (plus(&wk.0, dx as i64), plus(&wk.1, dy as i64)))
        .collect()
}

/// Candidate target squares per kind, mirroring the engine's candidate
/// sets. `half` is `(floor((wk.x + bk.x) / 2), floor((wk.y + bk.y) / 2))`.
fn candidates(kind: MoveKind, p: &Pos, half: &Sq) -> Vec<(bool, Sq)> {
    let (wk, bk, wr) = (&p.wk, &p.bk, &p.wr);
    let rook = |v: Vec<Sq>| v.into_iter().map(|s| (false, s)).collect::<Vec<_>>();
    let king = || {
        king_steps(wk)
            .into_iter()
            .map(|s| (true, s))
            .collect::<Vec<_>>()
    };
    match kind {
        MoveKind::ImmediateMate | MoveKind::RookSafe | MoveKind::RookSafeSmallBoards => {
            rook(edge_targets(wr).to_vec())
        }
        MoveKind::ReadyToMate => {
            let mut out = king();
            out.extend(rook(vec![
                (plus(&bk.0, -1), wr.1.clone()),
                (plus(&bk.0, 1), wr.1.clone()),
                (wr.0.clone(), plus(&bk.1, -1)),
                (wr.0.clone(), plus(&bk.1, 1)),
                (num(0), wr.1.clone()),
                (last(), wr.1.clone()),
                (wr.0.clone(), num(0)),
                (wr.0.clone(), last()),
                (plus(&wr.0, 1), wr.1.clone()),
                (plus(&wr.0, -1), wr.1.clone()),
                (wr.0.clone(), plus(&wr.1, 1)),
                (wr.0.clone(), plus(&wr.1, -1)),
            ]));
            out
        }
        MoveKind::Squeeze => {
            let sx = add(wk.0.clone(), bk.0.clone());
            let sy = add(wk.1.clone(), bk.1.clone());
            let lin = |terms: &[(i64, &Sexp)]| {
                terms
                    .iter()
                    .skip(1)
                    .fold(terms[0].1.clone(), |acc, (sign, t)| {
                        if *sign > 0 {
                            add(acc, (*t).clone())
                        } else {
                            sub(acc, (*t).clone())
                        }
                    })
            };
            rook(vec![
                (sub(sx, half.0.clone()), wr.1.clone()),
                (half.0.clone(), wr.1.clone()),
                (wr.0.clone(), sub(sy, half.1.clone())),
                (wr.0.clone(), half.1.clone()),
                (lin(&[(1, &bk.0), (1, &wk.1), (-1, &wr.1)]), wr.1.clone()),
                (wr.0.clone(), lin(&[(1, &bk.0), (1, &wk.1), (-1, &wr.0)])),
                (lin(&[(1, &wk.0), (1, &bk.1), (-1, &wr.1)]), wr.1.clone()),
                (wr.0.clone(), lin(&[(1, &wk.0), (1, &bk.1), (-1, &wr.0)])),
                (lin(&[(1, &bk.0), (-1, &wk.1), (1, &wr.1)]), wr.1.clone()),
                (wr.0.clone(), lin(&[(1, &wr.0), (-1, &bk.0), (1, &wk.1)])),
                (lin(&[(1, &wk.0), (-1, &bk.1), (1, &wr.1)]), wr.1.clone()),
                (wr.0.clone(), lin(&[(1, &wr.0), (-1, &wk.0), (1, &bk.1)])),
                (plus(&bk.0, 1), wr.1.clone()),
                (plus(&bk.0, -1), wr.1.clone()),
                (wr.0.clone(), plus(&bk.1, 1)),
                (wr.0.clone(), plus(&bk.1, -1)),
                (plus(&bk.0, 2), wr.1.clone()),
                (plus(&bk.0, -2), wr.1.clone()),
                (wr.0.clone(), plus(&bk.1, 2)),
                (wr.0.clone(), plus(&bk.1, -2)),
            ])
        }
        MoveKind::ApproachDiag
        | MoveKind::ApproachNonDiag
        | MoveKind::KeepRoomDiag
        | MoveKind::KeepRoomNonDiag => king(),
        MoveKind::RookHome => rook(vec![
            (plus(&wk.0, -1), wr.1.clone()),
            (plus(&wk.0, 1), wr.1.clone()),
            (wr.0.clone(), plus(&wk.1, -1)),
            (wr.0.clone(), plus(&wk.1, 1)),
        ]),
    }
}

/// The `define-fun` library for a strategy: board geometry, legality,
/// mate and stalemate, every kind's condition and candidate-based
/// existence.
pub fn library(strategy: &Strategy) -> Vec<Sexp> {
    let spec = strategy.spec();
    let m = strategy.mutations;
    let p = Pos::named("");
    let q = Pos {
        wk: (sym("qwkx"), sym("qwky")),
        bk: p.bk.clone(),
        wr: (sym("qwrx"), sym("qwry")),
    };
    let (a, b) = ((sym("ax"), sym("ay")), (sym("bx"), sym("by")));
    let mut lib = Vec::new();

    lib.push(define(
        "absd",
        &["a", "b"],
        "Int",
        ite(
            le(sym("b"), sym("a")),
            sub(sym("a"), sym("b")),
            sub(sym("b"), sym("a")),
        ),
    ));
    lib.push(define(
        "sgn",
        &["a"],
        "Int",
        ite(
            lt(num(0), sym("a")),
            num(1),
            ite(lt(sym("a"), num(0)), num(-1), num(0)),
        ),
    ));
    let (dx, dy) = (
        call("absd", vec![a.0.clone(), b.0.clone()]),
        call("absd", vec![a.1.clone(), b.1.clone()]),
    );
    lib.push(define(
        "cheb",
        &["ax", "ay", "bx", "by"],
        "Int",
        ite(le(dy.clone(), dx.clone()), dx.clone(), dy.clone()),
    ));
    lib.push(define(
        "manh",
        &["ax", "ay", "bx", "by"],
        "Int",
        add(dx, dy),
    ));
    lib.push(define(
        "onb",
        &["x", "y"],
        "Bool",
        and(vec![
            le(num(0), sym("x")),
            lt(sym("x"), sym("n")),
            le(num(0), sym("y")),
            lt(sym("y"), sym("n")),
        ]),
    ));
    lib.push(define(
        "edge",
        &["v"],
        "Bool",
        or(vec![eq(sym("v"), num(0)), eq(sym("v"), last())]),
    ));
    lib.push(define(
        "sbt",
        &["v", "a", "b"],
        "Bool",
        or(vec![
            and(vec![lt(sym("a"), sym("v")), lt(sym("v"), sym("b"))]),
            and(vec![lt(sym("b"), sym("v")), lt(sym("v"), sym("a"))]),
        ]),
    ));
    // rook on r attacks t, the white king on k being the only blocker
    let (r, t, k) = (
        (sym("rx"), sym("ry")),
        (sym("tx"), sym("ty")),
        (sym("kx"), sym("ky")),
    );
    lib.push(define(
        "ratt",
        &["rx", "ry", "tx", "ty", "kx", "ky"],
        "Bool",
        and(vec![
            not(sq_eq(&r, &t)),
            or(vec![
                and(vec![
                    eq(r.0.clone(), t.0.clone()),
                    not(and(vec![
                        eq(k.0.clone(), r.0.clone()),
                        call("sbt", vec![k.1.clone(), r.1.clone(), t.1.clone()]),
                    ])),
                ]),
                and(vec![
                    not(eq(r.0.clone(), t.0.clone())),
                    eq(r.1.clone(), t.1.clone()),
                    not(and(vec![
                        eq(k.1.clone(), r.1.clone()),
                        call("sbt", vec![k.0.clone(), r.0.clone(), t.0.clone()]),
                    ])),
                ]),
            ]),
        ]),
    ));
    let onb = |s: &Sq| call("onb", vec![s.0.clone(), s.1.clone()]);
    lib.push(define(
        "wf",
        &P6,
        "Bool",
        and(vec![
            onb(&p.wk),
            onb(&p.bk),
            onb(&p.wr),
            not(sq_eq(&p.wk, &p.bk)),
            not(sq_eq(&p.wr, &p.wk)),
            not(sq_eq(&p.wr, &p.bk)),
        ]),
    ));
    let ratt_p = |p: &Pos| {
        call(
            "ratt",
            vec![
                p.wr.0.clone(),
                p.wr.1.clone(),
                p.bk.0.clone(),
                p.bk.1.clone(),
                p.wk.0.clone(),
                p.wk.1.clone(),
            ],
        )
    };
    lib.push(define(
        "legal_w",
        &P6,
        "Bool",
        and(vec![
            p6("wf", &p),
            le(num(2), cheb(&p.wk, &p.bk)),
            not(ratt_p(&p)),
        ]),
    ));
    lib.push(define(
        "legal_b",
        &P6,
        "Bool",
        and(vec![p6("wf", &p), le(num(2), cheb(&p.wk, &p.bk))]),
    ));
    // black king step to t
    let bstep_params = ["wkx", "wky", "bkx", "bky", "wrx", "wry", "tx", "ty"];
    lib.push(define(
        "bstep",
        &bstep_params,
        "Bool",
        and(vec![
            onb(&t),
            le(num(2), cheb(&t, &p.wk)),
            or(vec![
                sq_eq(&t, &p.wr),
                not(call(
                    "ratt",
                    vec![
                        p.wr.0.clone(),
                        p.wr.1.clone(),
                        t.0.clone(),
                        t.1.clone(),
                        p.wk.0.clone(),
                        p.wk.1.clone(),
                    ],
                )),
            ]),
        ]),
    ));
    let bstep = |p: &Pos, t: &Sq| {
        let mut args = p.args();
        args.extend([t.0.clone(), t.1.clone()]);
        call("bstep", args)
    };
    lib.push(define(
        "bmoves",
        &P6,
        "Bool",
        or(king_steps(&p.bk).iter().map(|t| bstep(&p, t)).collect()),
    ));
    lib.push(define(
        "mate",
        &P6,
        "Bool",
        and(vec![ratt_p(&p), not(p6("bmoves", &p))]),
    ));
    lib.push(define(
        "nstale",
        &P6,
        "Bool",
        or(vec![ratt_p(&p), p6("bmoves", &p)]),
    ));
    let side = |wr: &Sexp, bk: &Sexp| {
        ite(
            lt(bk.clone(), wr.clone()),
            wr.clone(),
            sub(last(), wr.clone()),
        )
    };
    lib.push(define(
        "room",
        &["rx", "ry", "bx", "by"],
        "Int",
        ite(
            or(vec![eq(sym("rx"), sym("bx")), eq(sym("ry"), sym("by"))]),
            sub(bin("*", num(2), sym("n")), num(1)),
            add(side(&sym("rx"), &sym("bx")), side(&sym("ry"), &sym("by"))),
        ),
    ));
    let room = |wr: &Sq, bk: &Sq| sq_args("room", wr, bk);
    let cs = |wr: &Sq, bk: &Sq| {
        (
            sub(
                wr.0.clone(),
                call("sgn", vec![sub(wr.0.clone(), bk.0.clone())]),
            ),
            sub(
                wr.1.clone(),
                call("sgn", vec![sub(wr.1.clone(), bk.1.clone())]),
            ),
        )
    };
    lib.push(define("csd", &P6, "Int", manh(&p.wk, &cs(&p.wr, &p.bk))));
    lib.push(define(
        "exp_w",
        &P6,
        "Bool",
        le(plus(&cheb(&p.wr, &p.bk), 2), cheb(&p.wr, &p.wk)),
    ));
    lib.push(define(
        "exp_b",
        &P6,
        "Bool",
        le(plus(&cheb(&p.wr, &p.bk), 1), cheb(&p.wr, &p.wk)),
    ));
    let between = |v: &Sexp, x: &Sexp, y: &Sexp| call("sbt", vec![v.clone(), x.clone(), y.clone()]);
    lib.push(define(
        "divides",
        &P6,
        "Bool",
        or(vec![
            between(&p.wr.0, &p.wk.0, &p.bk.0),
            between(&p.wr.1, &p.wk.1, &p.bk.1),
        ]),
    ));
    let absd = |x: &Sexp, y: &Sexp| call("absd", vec![x.clone(), y.clone()]);
    lib.push(define(
        "lpat",
        &P6,
        "Bool",
        or(vec![
            and(vec![
                eq(p.wk.1.clone(), p.bk.1.clone()),
                eq(absd(&p.wk.0, &p.bk.0), num(2)),
                eq(p.wr.0.clone(), p.wk.0.clone()),
                eq(absd(&p.wr.1, &p.wk.1), num(1)),
            ]),
            and(vec![
                eq(p.wk.0.clone(), p.bk.0.clone()),
                eq(absd(&p.wk.1, &p.bk.1), num(2)),
                eq(p.wr.1.clone(), p.wk.1.clone()),
                eq(absd(&p.wr.0, &p.wk.0), num(1)),
            ]),
        ]),
    ));
    let edge = |v: &Sexp| call("edge", vec![v.clone()]);
    // r lies on an edge line that also contains o
    lib.push(define(
        "edge_line",
        &["rx", "ry", "ox", "oy"],
        "Bool",
        or(vec![
            and(vec![eq(sym("rx"), sym("ox")), edge(&sym("ox"))]),
            and(vec![eq(sym("ry"), sym("oy")), edge(&sym("oy"))]),
        ]),
    ));
    lib.push(define(
        "new_edge",
        &["fx", "fy", "tx", "ty"],
        "Bool",
        or(vec![
            and(vec![not(eq(sym("tx"), sym("fx"))), edge(&sym("tx"))]),
            and(vec![not(eq(sym("ty"), sym("fy"))), edge(&sym("ty"))]),
        ]),
    ));
    let with_target = |f: &str, p: &Pos, t: &Sq| {
        let mut args = p.args();
        args.extend([t.0.clone(), t.1.clone()]);
        call(f, args)
    };
    lib.push(define(
        "kstep",
        &bstep_params,
        "Bool",
        and(vec![
            onb(&t),
            not(sq_eq(&t, &p.wr)),
            le(num(2), cheb(&t, &p.bk)),
            eq(cheb(&t, &p.wk), num(1)),
        ]),
    ));
    // s stands strictly between the rook and t on their common line
    lib.push(define(
        "blk",
        &["rx", "ry", "tx", "ty", "sx", "sy"],
        "Bool",
        ite(
            eq(sym("rx"), sym("tx")),
            and(vec![
                eq(sym("sx"), sym("rx")),
                between(&sym("sy"), &sym("ry"), &sym("ty")),
            ]),
            and(vec![
                eq(sym("sy"), sym("ry")),
                between(&sym("sx"), &sym("rx"), &sym("tx")),
            ]),
        ),
    ));
    let blk = |s: &Sq| {
        call(
            "blk",
            vec![
                p.wr.0.clone(),
                p.wr.1.clone(),
                t.0.clone(),
                t.1.clone(),
                s.0.clone(),
                s.1.clone(),
            ],
        )
    };
    lib.push(define(
        "rmove",
        &bstep_params,
        "Bool",
        and(vec![
            onb(&t),
            not(sq_eq(&t, &p.wr)),
            not(sq_eq(&t, &p.wk)),
            not(sq_eq(&t, &p.bk)),
            or(vec![
                eq(p.wr.0.clone(), t.0.clone()),
                eq(p.wr.1.clone(), t.1.clone()),
            ]),
            not(blk(&p.wk)),
            not(blk(&p.bk)),
        ]),
    ));
    let on_edge = |s: &Sq| or(vec![edge(&s.0), edge(&s.1)]);
    let edge_line = |r: &Sq, o: &Sq| sq_args("edge_line", r, o);
    lib.push(define(
        "has_mate",
        &P6,
        "Bool",
        and(vec![
            on_edge(&p.bk),
            or(edge_targets(&p.wr)
                .iter()
                .map(|t| {
                    and(vec![
                        edge_line(t, &p.bk),
                        with_target("rmove", &p, t),
                        p6("mate", &p.with_wr(t.clone())),
                    ])
                })
                .collect()),
        ]),
    ));
    lib.push(define(
        "rtm",
        &P6,
        "Bool",
        and(vec![
            p6("nstale", &p),
            not(p6("mate", &p)),
            p6("bmoves", &p),
            and(king_steps(&p.bk)
                .iter()
                .map(|t| {
                    Sexp::app(
                        "=>",
                        [
                            bstep(&p, t),
                            and(vec![
                                not(sq_eq(t, &p.wr)),
                                p6("has_mate", &p.with_bk(t.clone())),
                            ]),
                        ],
                    )
                })
                .collect()),
        ]),
    ));
    let eclause = |q: &Pos| {
        let variant = match spec.variant() {
            Variant::Classic8 => not(on_edge(&q.wk)),
            Variant::Generalized => not(or(vec![
                and(vec![eq(q.wk.0.clone(), q.bk.0.clone()), edge(&q.wk.0)]),
                and(vec![eq(q.wk.1.clone(), q.bk.1.clone()), edge(&q.wk.1)]),
            ])),
        };
        or(vec![lt(num(3), room(&q.wr, &q.bk)), variant])
    };

    let cond_params: Vec<&str> = P6.iter().chain(Q4.iter()).copied().collect();
    let king_move = and(vec![
        eq(q.wr.0.clone(), p.wr.0.clone()),
        eq(q.wr.1.clone(), p.wr.1.clone()),
    ]);
    let rook_move = and(vec![
        eq(q.wk.0.clone(), p.wk.0.clone()),
        eq(q.wk.1.clone(), p.wk.1.clone()),
    ]);
    let diagonal = and(vec![
        not(eq(q.wk.0.clone(), p.wk.0.clone())),
        not(eq(q.wk.1.clone(), p.wk.1.clone())),
    ]);
    let nstale_q = p6("nstale", &q);
    let exposed_q = p6("exp_b", &q);
    for &kind in MoveKind::cascade(spec.variant()) {
        let body = match kind {
            MoveKind::ImmediateMate => and(vec![rook_move.clone(), p6("mate", &q)]),
            MoveKind::ReadyToMate => and(vec![
                or(vec![
                    le(p.bk.0.clone(), num(1)),
                    le(p.bk.1.clone(), num(1)),
                    le(sub(sym("n"), num(2)), p.bk.0.clone()),
                    le(sub(sym("n"), num(2)), p.bk.1.clone()),
                ]),
                p6("rtm", &q),
            ]),
            MoveKind::Squeeze => and(vec![
                rook_move.clone(),
                lt(room(&q.wr, &q.bk), room(&p.wr, &p.bk)),
                if m.squeeze_ignores_exposure {
                    sym("true")
                } else {
                    not(exposed_q.clone())
                },
                p6("divides", &q),
                nstale_q.clone(),
            ]),
            MoveKind::ApproachDiag | MoveKind::ApproachNonDiag => {
                let c = cs(&p.wr, &p.bk);
                and(vec![
                    king_move.clone(),
                    if kind == MoveKind::ApproachDiag {
                        diagonal.clone()
                    } else {
                        not(diagonal.clone())
                    },
                    lt(manh(&q.wk, &c), manh(&p.wk, &c)),
                    not(exposed_q.clone()),
                    or(vec![p6("divides", &q), p6("lpat", &q)]),
                    eclause(&q),
                    nstale_q.clone(),
                ])
            }
            MoveKind::KeepRoomDiag | MoveKind::KeepRoomNonDiag => and(vec![
                king_move.clone(),
                if kind == MoveKind::KeepRoomDiag {
                    diagonal.clone()
                } else {
                    not(diagonal.clone())
                },
                le(cheb(&q.wk, &p.wr), cheb(&p.wk, &p.wr)),
                not(exposed_q.clone()),
                p6("divides", &q),
                eclause(&q),
                nstale_q.clone(),
            ]),
            MoveKind::RookHome => {
                // the rook lands next to the white king's file (rank), on the
                // black king's side or, when the kings share it, unexposed
                let along = |f: &Sexp, t: &Sexp, k: &Sexp, b: &Sexp| {
                    and(vec![
                        not(eq(t.clone(), f.clone())),
                        eq(absd(t, k), num(1)),
                        ite(
                            eq(b.clone(), k.clone()),
                            not(exposed_q.clone()),
                            eq(
                                sub(t.clone(), k.clone()),
                                call("sgn", vec![sub(b.clone(), k.clone())]),
                            ),
                        ),
                    ])
                };
                and(vec![
                    rook_move.clone(),
                    or(vec![
                        along(&p.wr.0, &q.wr.0, &q.wk.0, &q.bk.0),
                        along(&p.wr.1, &q.wr.1, &q.wk.1, &q.bk.1),
                    ]),
                    or(vec![
                        not(eq(cheb(&q.bk, &q.wr), num(1))),
                        eq(cheb(&q.wk, &q.wr), num(1)),
                    ]),
                    if m.rook_home_ignores_stalemate {
                        sym("true")
                    } else {
                        nstale_q.clone()
                    },
                ])
            }
            MoveKind::RookSafe => and(vec![
                rook_move.clone(),
                sq_args("new_edge", &p.wr, &q.wr),
                or(vec![
                    and(vec![
                        eq(cheb(&q.wk, &q.wr), num(1)),
                        eq(cheb(&q.bk, &q.wr), num(1)),
                    ]),
                    lt(num(2), cheb(&q.wr, &q.bk)),
                ]),
                nstale_q.clone(),
            ]),
            MoveKind::RookSafeSmallBoards => and(vec![
                rook_move.clone(),
                // never the classified kind from n = 6 on
                le(sym("n"), num(5)),
                sq_args("new_edge", &p.wr, &q.wr),
                edge_line(&q.wr, &q.wk),
                eq(cheb(&q.wr, &q.bk), num(2)),
                nstale_q.clone(),
            ]),
        };
        lib.push(define(
            &format!("cond_{}", kind_tag(kind)),
            &cond_params,
            "Bool",
            body,
        ));
    }
    let half = (sym("hx"), sym("hy"));
    let ex_params: Vec<&str> = P6.iter().chain(["hx", "hy"].iter()).copied().collect();
    for &kind in MoveKind::cascade(spec.variant()) {
        let body = or(candidates(kind, &p, &half)
            .into_iter()
            .map(|(is_king, s)| {
                let (q, legal) = if is_king {
                    (p.with_wk(s.clone()), with_target("kstep", &p, &s))
                } else {
                    (p.with_wr(s.clone()), with_target("rmove", &p, &s))
                };
                let mut parts = Vec::new();
                if kind == MoveKind::ImmediateMate {
                    parts.push(edge_line(&s, &p.bk));
                }
                parts.push(legal);
                parts.push(cond_call(kind, &p, &q));
                and(parts)
            })
            .collect());
        lib.push(define(
            &format!("ex_{}", kind_tag(kind)),
            &ex_params,
            "Bool",
            body,
        ));
    }
    lib
}

fn var_prefix(j: usize) -> String {
    if j.is_multiple_of(2) {
        format!("w{}_", j / 2)
    } else {
        format!("b{}_", j / 2)
    }
}

fn cap_var(j: usize) -> Sexp {
    sym(&format!("{}cap", var_prefix(j)))
}

/// Boolean selector: the i-th white move has kind `kind`.
fn kind_var(i: usize, kind: MoveKind) -> Sexp {
    sym(&format!("m{i}_{}", kind_tag(kind)))
}

fn half_vars(i: usize) -> Sq {
    (sym(&format!("h{i}_x")), sym(&format!("h{i}_y")))
}

fn point_pos(j: usize) -> Pos {
    Pos::named(&var_prefix(j))
}

/// A lemma as a self-contained SMT-LIB script.
#[derive(Clone, Debug)]
pub struct LiaProblem {
    pub lemma: String,
    pub description: String,
    pub variant: Variant,
    pub commands: Vec<Sexp>,
}

struct Encoder<'a> {
    lemma: &'a LemmaSpec,
    variant: Variant,
}

impl Encoder<'_> {
    fn term(&self, t: &Term, guards: &mut Vec<Sexp>) -> Sexp {
        match t {
            Term::Int(v) => num(*v as i64),
            Term::N => sym("n"),
            Term::Coord(pt, c) => {
                let j = pt.index();
                let p = point_pos(j);

                match c {
                    Coord::WkX => p.wk.0,
                    Coord::WkY => p.wk.1,
                    Coord::BkX => p.bk.0,
                    Coord::BkY => p.bk.1,
                    Coord::WrX | Coord::WrY => {
                        guards.push(not(cap_var(j)));
                        if *c == Coord::WrX {
                            p.wr.0
                        } else {
                            p.wr.1
                        }
                    }
                }
            }
            Term::Room(pt) => {
                let j = pt.index();
                guards.push(not(cap_var(j)));
                let p = point_pos(j);
                sq_args("room", &p.wr, &p.bk)
            }
            Term::CriticalDistance(pt) => {
                let j = pt.index();
                let p = point_pos(j);
                guards.push(not(cap_var(j)));
                guards.push(not(sq_eq(&p.wr, &p.bk)));
                p6("csd", &p)
            }
        }
    }

    fn cmp(&self, op: &str, a: &Term, b: &Term) -> Sexp {
        let mut guards = Vec::new();
        let (x, y) = (self.term(a, &mut guards), self.term(b, &mut guards));
        guards.push(bin(op, x, y));
        and(guards)
    }

    fn formula(&self, f: &Formula) -> Sexp {
        let with_rook = |pt: &Point, body: Sexp| and(vec![not(cap_var(pt.index())), body]);
        match f {
            Formula::True => sym("true"),
            Formula::Not(x) => not(self.formula(x)),
            Formula::And(fs) => and(fs.iter().map(|x| self.formula(x)).collect()),
            Formula::Or(fs) => or(fs.iter().map(|x| self.formula(x)).collect()),
            Formula::Implies(a, b) => Sexp::app("=>", [self.formula(a), self.formula(b)]),
            Formula::Lt(a, b) => self.cmp("<", a, b),
            Formula::Le(a, b) => self.cmp("<=", a, b),
            Formula::Eq(a, b) => self.cmp("=", a, b),
            Formula::KindIn(i, set) => self.kind_in(*i, *set),
            Formula::RookPresent(pt) => not(cap_var(pt.index())),
            Formula::Checkmate(pt) => match pt {
                Point::White(_) => sym("false"),
                Point::Black(_) => {
                    let p = point_pos(pt.index());
                    with_rook(pt, and(vec![p6("legal_b", &p), p6("mate", &p)]))
                }
            },
            Formula::Exposed(pt) => {
                let f = if matches!(pt, Point::White(_)) {
                    "exp_w"
                } else {
                    "exp_b"
                };
                with_rook(pt, p6(f, &point_pos(pt.index())))
            }
            Formula::Divides(pt) => with_rook(pt, p6("divides", &point_pos(pt.index()))),
            Formula::LPattern(pt) => with_rook(pt, p6("lpat", &point_pos(pt.index()))),
            Formula::InCheck(pt) => {
                let p = point_pos(pt.index());
                with_rook(
                    pt,
                    call(
                        "ratt",
                        vec![
                            p.wr.0.clone(),
                            p.wr.1.clone(),
                            p.bk.0.clone(),
                            p.bk.1.clone(),
                            p.wk.0,
                            p.wk.1,
                        ],
                    ),
                )
            }
        }
    }

    fn kind_in(&self, i: usize, set: KindSet) -> Sexp {
        let cascade = MoveKind::cascade(self.variant);
        or(set
            .kinds()
            .filter(|k| cascade.contains(k))
            .map(|k| kind_var(i, k))
            .collect())
    }

    fn ex_call(&self, kind: MoveKind, p: &Pos, half: &Sq) -> Sexp {
        let mut args = p.args();
        args.extend([half.0.clone(), half.1.clone()]);
        call(&format!("ex_{}", kind_tag(kind)), args)
    }

    /// `p_i -> p_i'` is a strategy move of kind `m_i` allowed by the step
    /// constraint.
    fn white_step(&self, i: usize) -> Sexp {
        let (j, p, q) = (2 * i, point_pos(2 * i), point_pos(2 * i + 1));
        let half = half_vars(i);
        let cascade = MoveKind::cascade(self.variant);
        let allowed = match self.lemma.steps[i] {
            Some(set) => self.kind_in(i, set),
            None => sym("true"),
        };
        let mut options = Vec::new();
        for (pos, &kind) in cascade.iter().enumerate() {
            let mut parts = vec![kind_var(i, kind), cond_call(kind, &p, &q)];
            parts.extend(
                cascade[..pos]
                    .iter()
                    .map(|&k| not(self.ex_call(k, &p, &half))),
            );
            options.push(and(parts));
        }
        let kmove = {
            let mut args = p.args();
            args.extend([q.wk.0.clone(), q.wk.1.clone()]);
            and(vec![sq_eq(&q.wr, &p.wr), call("kstep", args)])
        };
        let rmove = {
            let mut args = p.args();
            args.extend([q.wr.0.clone(), q.wr.1.clone()]);
            and(vec![sq_eq(&q.wk, &p.wk), call("rmove", args)])
        };
        and(vec![
            not(cap_var(j)),
            not(cap_var(j + 1)),
            p6("legal_w", &p),
            sq_eq(&q.bk, &p.bk),
            or(vec![kmove, rmove]),
            allowed,
            or(options),
        ])
    }

    /// `p_i' -> p_{i+1}` is a legal black king move; capturing the rook
    /// zeroes its coordinates.
    fn black_step(&self, i: usize) -> Sexp {
        let (j, q, r) = (2 * i + 1, point_pos(2 * i + 1), point_pos(2 * i + 2));
        let mut args = q.args();
        args.extend([r.bk.0.clone(), r.bk.1.clone()]);
        and(vec![
            not(cap_var(j)),
            p6("legal_b", &q),
            sq_eq(&r.wk, &q.wk),
            eq(cheb(&r.bk, &q.bk), num(1)),
            call("bstep", args),
            ite(
                sq_eq(&r.bk, &q.wr),
                and(vec![
                    cap_var(j + 1),
                    eq(r.wr.0.clone(), num(0)),
                    eq(r.wr.1.clone(), num(0)),
                ]),
                and(vec![not(cap_var(j + 1)), sq_eq(&r.wr, &q.wr)]),
            ),
        ])
    }
}

/// Encodes the negation of `lemma` under relation semantics: the script is
/// satisfiable iff some board size admits a violating trace.
pub fn encode_lemma_lia(lemma: &LemmaSpec, strategy: &Strategy) -> Result<LiaProblem> {
    if lemma.k == 0 || lemma.steps.len() != lemma.k {
        return Err(KrkError::InvalidLemma(lemma.name.clone()));
    }
    let variant = strategy.spec().variant();
    let enc = Encoder { lemma, variant };
    let len = lemma.trace_len();
    let mut cmds = vec![
        Sexp::app("set-info", [sym(":smt-lib-version"), sym("2.6")]),
        Sexp::app("set-option", [sym(":produce-models"), sym("true")]),
        Sexp::app("set-logic", [sym("QF_LIA")]),
        Sexp::app("declare-const", [sym("n"), sym("Int")]),
    ];
    cmds.extend(library(strategy));
    for j in 0..len {
        for c in P6 {
            cmds.push(Sexp::app(
                "declare-const",
                [sym(&format!("{}{c}", var_prefix(j))), sym("Int")],
            ));
        }
        cmds.push(Sexp::app("declare-const", [cap_var(j), sym("Bool")]));
    }
    for i in 0..lemma.k {
        for &kind in MoveKind::cascade(variant) {
            cmds.push(Sexp::app("declare-const", [kind_var(i, kind), sym("Bool")]));
        }
        let (hx, hy) = half_vars(i);
        cmds.push(Sexp::app("declare-const", [hx, sym("Int")]));
        cmds.push(Sexp::app("declare-const", [hy, sym("Int")]));
    }
    let assert = |body: Sexp| Sexp::app("assert", [body]);
    cmds.push(assert(match variant {
        Variant::Classic8 => eq(sym("n"), num(8)),
        Variant::Generalized => bin(">=", sym("n"), num(4)),
    }));
    for i in 0..lemma.k {
        // exactly one kind selector per white move
        let sels: Vec<Sexp> = MoveKind::cascade(variant)
            .iter()
            .map(|&k| kind_var(i, k))
            .collect();
        let mut one = vec![or(sels.clone())];
        for (a, x) in sels.iter().enumerate() {
            for y in &sels[a + 1..] {
                one.push(not(and(vec![x.clone(), y.clone()])));
            }
        }
        cmds.push(assert(and(one)));
    }
    for i in 0..lemma.k {
        // h = floor((wk + bk) / 2) for the Squeeze candidates
        let p = point_pos(2 * i);
        let (hx, hy) = half_vars(i);
        for (h, s) in [
            (hx, add(p.wk.0.clone(), p.bk.0.clone())),
            (hy, add(p.wk.1.clone(), p.bk.1.clone())),
        ] {
            let twice = bin("*", num(2), h);
            cmds.push(assert(and(vec![
                le(twice.clone(), s.clone()),
                lt(s, add(twice, num(2))),
            ])));
        }
    }
    let p0 = point_pos(0);
    cmds.push(assert(and(vec![
        not(cap_var(0)),
        p6("legal_w", &p0),
        enc.formula(&lemma.pre),
    ])));
    let mut seq = Vec::new();
    for i in 0..lemma.k {
        seq.push(enc.white_step(i));
        if 2 * i + 2 < len {
            seq.push(enc.black_step(i));
        }
    }
    cmds.push(assert(and(seq)));
    cmds.push(assert(not(enc.formula(&lemma.post))));
    cmds.push(Sexp::app("check-sat", []));
    Ok(LiaProblem {
        lemma: lemma.name.clone(),
        description: lemma.description.clone(),
        variant,
        commands: cmds,
    })
}

/// Deterministic SMT-LIB 2 text, one command per line.
pub fn emit_smtlib(problem: &LiaProblem) -> String {
    let mut out = format!("; {}: {}\n", problem.lemma, problem.description);
    out.push_str("; negated lemma over every board size n; unsat means the lemma holds\n");
    for c in &problem.commands {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}

/// Values for the declared constants of a lemma script taken from a
/// concrete trace. A captured rook has coordinates (0, 0).
pub fn trace_assignment(lemma: &LemmaSpec, trace: &Trace, spec: &BoardSpec) -> Vec<(String, i64)> {
    let mut out = vec![("n".to_string(), spec.n() as i64)];
    let coords = |p: &Position| {
        let wr = p.wr.unwrap_or(Square::new(0, 0));
        [p.wk.x, p.wk.y, p.bk.x, p.bk.y, wr.x, wr.y]
    };
    for (j, p) in trace.positions.iter().enumerate().take(lemma.trace_len()) {
        let prefix = var_prefix(j);
        for (c, v) in P6.iter().zip(coords(p)) {
            out.push((format!("{prefix}{c}"), v as i64));
        }
        out.push((format!("{prefix}cap"), p.wr.is_none() as i64));
    }
    for i in 0..lemma.k {
        for kind in MoveKind::ALL {
            out.push((
                format!("m{i}_{}", kind_tag(kind)),
                (trace.kinds.get(i) == Some(&kind)) as i64,
            ));
        }
        if let Some(p) = trace.positions.get(2 * i) {
            out.push((format!("h{i}_x"), ((p.wk.x + p.bk.x) as i64).div_euclid(2)));
            out.push((format!("h{i}_y"), ((p.wk.y + p.bk.y) as i64).div_euclid(2)));
        }
    }
    out
}

/// Reads a solver model (the answer to `get-model`) back into a board size
/// and a trace. Constants the model leaves out default to 0 / false.
pub fn decode_model(lemma: &LemmaSpec, model: &[Sexp]) -> Result<(i32, Trace)> {
    fn collect(s: &Sexp, out: &mut HashMap<String, i64>) {
        let Some(items) = s.as_list() else { return };
        if s.head() == Some("define-fun") && items.len() == 5 {
            let value = match &items[4] {
                Sexp::Atom(a) if a == "true" => Some(1),
                Sexp::Atom(a) if a == "false" => Some(0),
                Sexp::Atom(a) => a.parse().ok(),
                Sexp::List(v) if v.len() == 2 && v[0].as_atom() == Some("-") => v[1]
                    .as_atom()
                    .and_then(|a| a.parse::<i64>().ok())
                    .map(|x| -x),
                _ => None,
            };
            if let (Some(name), Some(v)) = (items[1].as_atom(), value) {
                out.insert(name.to_string(), v);
            }
            return;
        }
        items.iter().for_each(|x| collect(x, out));
    }
    let mut values = HashMap::new();
    model.iter().for_each(|s| collect(s, &mut values));
    let n = *values
        .get("n")
        .ok_or_else(|| KrkError::Smt("model does not assign n".into()))?;
    let get = |name: String| values.get(&name).copied().unwrap_or(0) as i32;
    let mut trace = Trace {
        positions: Vec::new(),
        kinds: Vec::new(),
    };
    for j in 0..lemma.trace_len() {
        let pre = var_prefix(j);
        let sq = |a: &str, b: &str| Square::new(get(format!("{pre}{a}")), get(format!("{pre}{b}")));
        let wr = (get(format!("{pre}cap")) == 0).then(|| sq("wrx", "wry"));
        trace.positions.push(Position::new(
            sq("wkx", "wky"),
            sq("bkx", "bky"),
            wr,
            j % 2 == 0,
        ));
    }
    for i in 0..lemma.k {
        let kind = MoveKind::ALL
            .into_iter()
            .find(|&k| get(format!("m{i}_{}", kind_tag(k))) == 1)
            .ok_or_else(|| KrkError::Smt(format!("model selects no kind for move {i}")))?;
        trace.kinds.push(kind);
    }
    Ok((n as i32, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lemma::builtin_lemma;
    use crate::smt::sexp::check_script;

    #[test]
    fn progress_unfolds_three_moves_each_way() {
        let st = Strategy::new(BoardSpec::generalized(8).unwrap());
        let l = builtin_lemma("progress").unwrap();
        let p = encode_lemma_lia(&l, &st).unwrap();
        let decl = |prefix: &str| {
            p.commands
                .iter()
                .filter(|c| c.head() == Some("declare-const"))
                .filter(|c| {
                    c.as_list().unwrap()[1]
                        .as_atom()
                        .unwrap()
                        .starts_with(prefix)
                })
                .count()
        };
        assert_eq!(decl("m"), 3 * 10);
        assert_eq!(decl("w"), 4 * 7);
        assert_eq!(decl("b"), 3 * 7);
        assert!(check_script(&p.commands).is_ok());
    }

    #[test]
    fn emission_is_deterministic() {
        let st = Strategy::new(BoardSpec::generalized(8).unwrap());
        let l = builtin_lemma("ready_to_mate").unwrap();
        let a = emit_smtlib(&encode_lemma_lia(&l, &st).unwrap());
        let b = emit_smtlib(&encode_lemma_lia(&l, &st).unwrap());
        assert_eq!(a, b);
        assert!(a.contains("(set-logic QF_LIA)"));
        assert!(a.contains("(>= n 4)"));
        assert!(a.contains("(<= n 5)"));
    }
}
