//! JSON shapes shared by the HTTP service and `--json` output, and the
//! stateless analyze/play logic behind the endpoints.

use krk_core::board::for_each_black_move;
use krk_core::geometry::{
    critical_square_sq, kings_same_edge_sq, l_pattern_sq, room_sq, wr_divides_sq, wr_exposed_sq,
};
use krk_core::{BoardSpec, KrkError, MoveKind, Position, Square, Strategy, Variant};
use serde::{Deserialize, Serialize};

/// `{"n":8,"wk":[3,2],"bk":[2,6],"wr":[5,4],"whiteToMove":true}`; a null
/// `wr` means the rook has been captured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WirePosition {
    pub n: i32,
    pub wk: Square,
    pub bk: Square,
    pub wr: Option<Square>,
    pub white_to_move: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
}

impl WirePosition {
    pub fn new(spec: &BoardSpec, p: &Position) -> Self {
        WirePosition {
            n: spec.n(),
            wk: p.wk,
            bk: p.bk,
            wr: p.wr,
            white_to_move: p.white_to_move,
            variant: (spec.variant() != Variant::Generalized).then_some(spec.variant()),
        }
    }

    pub fn position(&self) -> Position {
        Position::new(self.wk, self.bk, self.wr, self.white_to_move)
    }

    /// Board and position, rejecting bad sizes and malformed placements.
    pub fn resolve(&self) -> Result<(BoardSpec, Position), ApiError> {
        let spec = BoardSpec::new(self.n, self.variant.unwrap_or(Variant::Generalized))
            .map_err(ApiError::bad_request)?;
        let p = self.position();
        if !p.is_well_formed(&spec) {
            return Err(ApiError::new(
                Reason::Malformed,
                KrkError::MalformedPosition(p).to_string(),
            ));
        }
        Ok((spec, p))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    BadRequest,
    Malformed,
    Illegal,
    IllegalMove,
    RookCaptured,
    TooLarge,
}

/// Machine-readable error body: `{"reason":"illegal_move","message":...}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub reason: Reason,
    pub message: String,
}

impl ApiError {
    pub fn new(reason: Reason, message: impl Into<String>) -> Self {
        ApiError {
            reason,
            message: message.into(),
        }
    }

    fn bad_request(e: impl ToString) -> Self {
        ApiError::new(Reason::BadRequest, e.to_string())
    }

    /// 422 when the strategy is undefined, 400 for everything else.
    pub fn status(&self) -> u16 {
        match self.reason {
            Reason::RookCaptured => 422,
            _ => 400,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Annotations {
    pub room: i32,
    pub critical_square: Square,
    pub wr_exposed: bool,
    pub wr_divides: bool,
    pub l_pattern: bool,
    pub kings_same_edge: bool,
}

impl Annotations {
    /// `None` once the rook is gone.
    pub fn of(spec: &BoardSpec, p: &Position) -> Option<Self> {
        let wr = p.wr?;
        Some(Annotations {
            room: room_sq(wr, p.bk, spec.n()),
            critical_square: critical_square_sq(wr, p.bk),
            wr_exposed: wr_exposed_sq(p.wk, p.bk, wr, p.white_to_move),
            wr_divides: wr_divides_sq(p.wk, p.bk, wr),
            l_pattern: l_pattern_sq(p.wk, p.bk, wr),
            kings_same_edge: kings_same_edge_sq(p.wk, p.bk, spec.n()),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WireMove {
    pub to: WirePosition,
    pub kind: MoveKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalyzeReport {
    pub position: WirePosition,
    pub legal: bool,
    pub annotations: Option<Annotations>,
    /// The classified kind, or "none" when the strategy is not defined here.
    pub classification: String,
    pub strategy_move: Option<WireMove>,
    /// Black king targets in the next black turn: from the position itself
    /// when black is to move, otherwise after the strategy move.
    pub legal_black_moves: Vec<Square>,
}

fn black_targets(p: &Position, spec: &BoardSpec) -> Vec<Square> {
    let mut out = Vec::new();
    for_each_black_move(p, spec, |q| out.push(q.bk));
    out
}

pub fn analyze(req: &WirePosition) -> Result<AnalyzeReport, ApiError> {
    let (spec, p) = req.resolve()?;
    let st = Strategy::new(spec);
    let legal = p.is_legal(&spec);
    let classification = st
        .classify(&p)
        .map_or_else(|_| "none".to_string(), |k| k.name().to_string());
    let strategy_move = st.strategy_function(&p);
    let black_turn = if p.white_to_move {
        strategy_move.map(|m| m.to)
    } else {
        legal.then_some(p)
    };
    Ok(AnalyzeReport {
        position: WirePosition::new(&spec, &p),
        legal,
        annotations: Annotations::of(&spec, &p),
        classification,
        strategy_move: strategy_move.map(|m| WireMove {
            to: WirePosition::new(&spec, &m.to),
            kind: m.kind,
        }),
        legal_black_moves: black_turn
            .map(|q| black_targets(&q, &spec))
            .unwrap_or_default(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlayRequest {
    #[serde(flatten)]
    pub position: WirePosition,
    /// Target square of the black king; omit it to ask for white's move in a
    /// white-to-move position.
    #[serde(default)]
    pub black_move: Option<Square>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameStatus {
    Ongoing,
    Checkmate,
    Stalemate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlayResponse {
    /// The position after black's move (white to move).
    pub new_position: WirePosition,
    pub strategy_reply: Option<WireMove>,
    pub kind: Option<MoveKind>,
    pub game_status: GameStatus,
}

/// One round: validate and apply black's move, then answer with the
/// strategy function.
pub fn play(req: &PlayRequest) -> Result<PlayResponse, ApiError> {
    let (spec, p) = req.position.resolve()?;
    if !p.is_legal(&spec) {
        return Err(ApiError::new(
            Reason::Illegal,
            KrkError::IllegalPosition(p).to_string(),
        ));
    }
    let after_black = match (p.white_to_move, req.black_move) {
        (true, None) => p,
        (true, Some(_)) => return Err(ApiError::new(Reason::IllegalMove, "white is to move")),
        (false, None) => {
            return Err(ApiError::new(
                Reason::BadRequest,
                "blackMove is required when black is to move",
            ))
        }
        (false, Some(to)) => {
            let succ = p.legal_successors(&spec).map_err(ApiError::bad_request)?;
            *succ.iter().find(|q| q.bk == to).ok_or_else(|| {
                ApiError::new(
                    Reason::IllegalMove,
                    format!("black king cannot move from {} to {to}", p.bk),
                )
            })?
        }
    };
    if after_black.wr.is_none() {
        return Err(ApiError::new(
            Reason::RookCaptured,
            KrkError::RookCaptured.to_string(),
        ));
    }
    let st = Strategy::new(spec);
    let reply = st.strategy_function(&after_black);
    let game_status = match reply {
        Some(m) if m.to.is_checkmate(&spec) => GameStatus::Checkmate,
        Some(m) if m.to.is_stalemate(&spec) => GameStatus::Stalemate,
        Some(_) => GameStatus::Ongoing,
        None => {
            return Err(ApiError::new(
                Reason::RookCaptured,
                "the strategy has no move in this position",
            ))
        }
    };
    Ok(PlayResponse {
        new_position: WirePosition::new(&spec, &after_black),
        strategy_reply: reply.map(|m| WireMove {
            to: WirePosition::new(&spec, &m.to),
            kind: m.kind,
        }),
        kind: reply.map(|m| m.kind),
        game_status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wire(
        wk: (i32, i32),
        bk: (i32, i32),
        wr: Option<(i32, i32)>,
        white_to_move: bool,
    ) -> WirePosition {
        WirePosition {
            n: 8,
            wk: wk.into(),
            bk: bk.into(),
            wr: wr.map(Into::into),
            white_to_move,
            variant: None,
        }
    }

    #[test]
    fn wire_format_round_trips() {
        let w = wire((3, 2), (2, 6), Some((5, 4)), true);
        let text = serde_json::to_string(&w).unwrap();
        assert_eq!(
            text,
            r#"{"n":8,"wk":[3,2],"bk":[2,6],"wr":[5,4],"whiteToMove":true}"#
        );
        assert_eq!(serde_json::from_str::<WirePosition>(&text).unwrap(), w);
        let captured: WirePosition =
            serde_json::from_str(r#"{"n":8,"wk":[3,2],"bk":[2,6],"wr":null,"whiteToMove":false}"#)
                .unwrap();
        assert_eq!(captured.wr, None);
    }

    #[test]
    fn analyze_reports_mate_in_one() {
        let r = analyze(&wire((2, 3), (0, 3), Some((5, 6)), true)).unwrap();
        assert!(r.legal);
        assert_eq!(r.classification, "ImmediateMate");
        let m = r.strategy_move.unwrap();
        assert_eq!(m.to.wr, Some(Square::new(0, 6)));
        assert!(r.legal_black_moves.is_empty());
        let a = r.annotations.unwrap();
        assert_eq!(a.room, room_sq(Square::new(5, 6), Square::new(0, 3), 8));
        assert_eq!(a.critical_square, Square::new(4, 5));
    }

    #[test]
    fn analyze_rejects_malformed_positions() {
        let e = analyze(&wire((3, 3), (3, 3), Some((5, 4)), true)).unwrap_err();
        assert_eq!((e.reason, e.status()), (Reason::Malformed, 400));
        let mut big = wire((3, 3), (5, 5), None, true);
        big.n = 3;
        assert_eq!(analyze(&big).unwrap_err().reason, Reason::BadRequest);
    }

    #[test]
    fn play_validates_black_moves() {
        let p = wire((3, 2), (2, 6), Some((5, 4)), false);
        let bad = play(&PlayRequest {
            position: p,
            black_move: Some(Square::new(5, 5)),
        })
        .unwrap_err();
        assert_eq!((bad.reason, bad.status()), (Reason::IllegalMove, 400));
        let ok = play(&PlayRequest {
            position: p,
            black_move: Some(Square::new(2, 7)),
        })
        .unwrap();
        assert_eq!(ok.new_position.bk, Square::new(2, 7));
        assert!(ok.new_position.white_to_move);
        assert_eq!(ok.game_status, GameStatus::Ongoing);
        assert!(ok.strategy_reply.unwrap().to.wr.is_some());
    }

    #[test]
    fn play_refuses_captured_rook() {
        // the black king takes the unprotected rook next to it
        let p = wire((0, 0), (4, 4), Some((5, 5)), false);
        let e = play(&PlayRequest {
            position: p,
            black_move: Some(Square::new(5, 5)),
        })
        .unwrap_err();
        assert_eq!((e.reason, e.status()), (Reason::RookCaptured, 422));
    }
}
