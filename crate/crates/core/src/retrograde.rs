//! Retrograde verification: starting from the positions where the strategy
//! mates at once, repeatedly add every position whose strategy move leaves
//! black only replies into already-winning positions.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::board::{
    enumerate_legal, for_each_black_move, BoardSpec, PackedPosition, Position, Variant,
};
pub use crate::strategy::Mode;
use crate::strategy::Strategy;

/// Marks "not winning" and "not a position" in depth tables.
pub const NO_DEPTH: u16 = u16::MAX;

/// Why a position is not winning.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum StuckReason {
    NoStrategyMove,
    RookCapturable,
    Stalemate,
    NoProgress,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StuckPosition {
    pub position: Position,
    pub reason: StuckReason,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RetrogradeResult {
    pub n: i32,
    pub variant: Variant,
    pub mode: Mode,
    pub all_winning: bool,
    pub total_positions: u64,
    /// Plies until mate in the longest game: white and black moves together.
    pub max_plies: u32,
    /// `per_depth[k]` positions are mated after exactly `k` black replies.
    pub per_depth: Vec<u64>,
    pub stuck: Vec<StuckPosition>,
    pub elapsed_ms: u64,
}

impl RetrogradeResult {
    pub fn winning_positions(&self) -> u64 {
        self.per_depth.iter().sum()
    }
}

/// Depths for every white-to-move position, indexed by the coordinate part
/// of the packed encoding.
pub struct DepthTable {
    spec: BoardSpec,
    depth: Vec<u16>,
}

impl DepthTable {
    pub fn spec(&self) -> &BoardSpec {
        &self.spec
    }

    /// Black replies until mate from a white-to-move position.
    pub fn depth(&self, p: &Position) -> Option<u16> {
        if !p.white_to_move || p.wr.is_none() || !p.is_well_formed(&self.spec) {
            return None;
        }
        let d = self.depth[key(p, &self.spec)];
        (d != NO_DEPTH).then_some(d)
    }

    /// Binary dump: `KRKD`, then `n` and the packed width as little-endian
    /// `u32`, then one little-endian `u16` per full packed index (both side
    /// flags and the capture flag included); `0xFFFF` marks entries that are
    /// not winning white-to-move positions.
    pub fn write_dump(&self, mut w: impl Write) -> io::Result<()> {
        let width = self.spec.packed_width();
        w.write_all(b"KRKD")?;
        w.write_all(&(self.spec.n() as u32).to_le_bytes())?;
        w.write_all(&width.to_le_bytes())?;
        let mut buf = Vec::with_capacity(1 << 16);
        for coords in 0..self.depth.len() {
            // flags: (white_to_move, captured) in the two low bits
            for flags in 0..4u8 {
                let d = if flags == 0b10 {
                    self.depth[coords]
                } else {
                    NO_DEPTH
                };
                buf.extend_from_slice(&d.to_le_bytes());
            }
            if buf.len() >= 1 << 16 {
                w.write_all(&buf)?;
                buf.clear();
            }
        }
        w.write_all(&buf)
    }
}

#[inline]
fn key(p: &Position, spec: &BoardSpec) -> usize {
    PackedPosition::pack_unchecked(p, spec).coords() as usize
}

fn table_len(spec: &BoardSpec) -> usize {
    1usize << (6 * spec.coord_bits())
}

/// One strategy move as seen by the retrograde loop.
#[derive(Clone, Copy)]
struct Edge {
    /// Coordinates of the position after the white move (black to move).
    target: u32,
}

/// Strategy moves per white-to-move position, in CSR layout.
struct MoveGraph {
    /// `offsets[i]..offsets[i + 1]` indexes `edges` for the i-th position of `positions`.
    offsets: Vec<u32>,
    edges: Vec<Edge>,
    positions: Vec<u32>,
}

fn unpack_coords(coords: u32, white_to_move: bool, spec: &BoardSpec) -> Position {
    let packed = PackedPosition(((coords as u64) << 2) | ((white_to_move as u64) << 1));
    packed
        .unpack(spec)
        .expect("table keys come from packed positions")
}

fn build_graph(strategy: &Strategy, mode: Mode, stuck: &mut Vec<StuckPosition>) -> MoveGraph {
    let spec = *strategy.spec();
    let mut graph = MoveGraph {
        offsets: vec![0],
        edges: Vec::new(),
        positions: Vec::new(),
    };
    for p in enumerate_legal(spec, Some(true), true) {
        let start = graph.edges.len();
        match mode {
            Mode::Function => {
                if let Some(m) = strategy.strategy_function(&p) {
                    graph.edges.push(Edge {
                        target: key(&m.to, &spec) as u32,
                    });
                }
            }
            Mode::Relation => {
                if let Ok(moves) = strategy.strategy_successors(&p) {
                    graph.edges.extend(moves.iter().map(|m| Edge {
                        target: key(&m.to, &spec) as u32,
                    }));
                }
            }
        }
        if graph.edges.len() == start {
            stuck.push(StuckPosition {
                position: p,
                reason: StuckReason::NoStrategyMove,
            });
        }
        graph.positions.push(key(&p, &spec) as u32);
        graph.offsets.push(graph.edges.len() as u32);
    }
    graph
}

enum Reply {
    /// Mate: black has no reply and is in check.
    Mate,
    /// The largest depth among black's replies.
    Known(u16),
    Pending,
    Lost(StuckReason),
}

/// Evaluates the position after a white move against the current table.
fn evaluate_target(target: u32, depth: &[u16], spec: &BoardSpec) -> Reply {
    let q = unpack_coords(target, false, spec);
    let mut any = false;
    let mut worst = 0u16;
    let mut pending = false;
    let mut lost = None;
    for_each_black_move(&q, spec, |r| {
        any = true;
        if lost.is_some() {
            return;
        }
        if r.wr.is_none() {
            lost = Some(StuckReason::RookCapturable);
            return;
        }
        match depth[key(&r, spec)] {
            NO_DEPTH => pending = true,
            d => worst = worst.max(d),
        }
    });
    if let Some(reason) = lost {
        return Reply::Lost(reason);
    }
    if !any {
        return if q.wr_attacks_bk() {
            Reply::Mate
        } else {
            Reply::Lost(StuckReason::Stalemate)
        };
    }
    if pending {
        Reply::Pending
    } else {
        Reply::Known(worst)
    }
}

/// Checks that every strategy move followed by any black reply stays among
/// legal white-to-move positions with the rook on the board.
pub fn closure_check(strategy: &Strategy) -> bool {
    let spec = *strategy.spec();
    enumerate_legal(spec, Some(true), true).all(|p| {
        let Some(m) = strategy.strategy_function(&p) else {
            return false;
        };
        let mut ok = true;
        for_each_black_move(&m.to, &spec, |r| ok &= r.wr.is_some() && r.is_legal(&spec));
        ok
    })
}

/// Runs the retrograde loop and returns the report along with the depth
/// table. At most `stuck_sample` non-winning positions are reported.
pub fn retrograde_table(
    strategy: &Strategy,
    mode: Mode,
    stuck_sample: usize,
) -> (RetrogradeResult, DepthTable) {
    let started = Instant::now();
    let spec = *strategy.spec();
    let mut stuck = Vec::new();
    let graph = build_graph(strategy, mode, &mut stuck);
    log::info!(
        "n={} {:?}: {} positions, {} strategy moves",
        spec.n(),
        mode,
        graph.positions.len(),
        graph.edges.len()
    );

    let mut depth = vec![NO_DEPTH; table_len(&spec)];
    let mut open: Vec<usize> = (0..graph.positions.len())
        .filter(|&i| graph.offsets[i] < graph.offsets[i + 1])
        .collect();
    let mut lost_reason = vec![None; graph.positions.len()];
    let mut updates: Vec<(u32, u16)> = Vec::new();
    loop {
        updates.clear();
        open.retain(|&i| {
            let mut result = Some(0u16);
            for e in &graph.edges[graph.offsets[i] as usize..graph.offsets[i + 1] as usize] {
                match evaluate_target(e.target, &depth, &spec) {
                    Reply::Mate => {}
                    Reply::Known(d) => result = result.map(|r| r.max(d + 1)),
                    Reply::Pending => result = None,
                    Reply::Lost(reason) => {
                        lost_reason[i] = Some(reason);
                        return false;
                    }
                }
            }
            match result {
                Some(d) => {
                    updates.push((graph.positions[i], d));
                    false
                }
                None => true,
            }
        });
        if updates.is_empty() {
            break;
        }
        // barrier: positions found in this round only become visible to the next
        for &(k, d) in &updates {
            depth[k as usize] = d;
        }
    }

    for (i, reason) in lost_reason.iter().enumerate() {
        if let Some(reason) = reason {
            stuck.push(StuckPosition {
                position: unpack_coords(graph.positions[i], true, &spec),
                reason: *reason,
            });
        }
    }
    for &i in &open {
        stuck.push(StuckPosition {
            position: unpack_coords(graph.positions[i], true, &spec),
            reason: StuckReason::NoProgress,
        });
    }
    let stuck_total = stuck.len();
    stuck.truncate(stuck_sample);

    let mut hist: BTreeMap<u16, u64> = BTreeMap::new();
    for &k in &graph.positions {
        let d = depth[k as usize];
        if d != NO_DEPTH {
            *hist.entry(d).or_default() += 1;
        }
    }
    let max_depth = hist.keys().next_back().copied();
    let mut per_depth = vec![0u64; max_depth.map_or(0, |d| d as usize + 1)];
    for (d, c) in hist {
        per_depth[d as usize] = c;
    }
    let result = RetrogradeResult {
        n: spec.n(),
        variant: spec.variant(),
        mode,
        all_winning: stuck_total == 0,
        total_positions: graph.positions.len() as u64,
        max_plies: max_depth.map_or(0, |d| 2 * d as u32 + 1),
        per_depth,
        stuck,
        elapsed_ms: started.elapsed().as_millis() as u64,
    };
    (result, DepthTable { spec, depth })
}

pub fn retrograde_verify(strategy: &Strategy, mode: Mode) -> RetrogradeResult {
    retrograde_table(strategy, mode, 16).0
}
