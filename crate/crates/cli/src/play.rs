//! Terminal play: a human moves the black king, the strategy answers.
//!
//! Squares are written the chess way (files `a`, `b`, ..., `z`, `aa`, ...,
//! ranks from 1) and converted to 0-based coordinates right here.

use std::io::{BufRead, Write};

use anyhow::{anyhow, bail, Result};
use krk_core::{BoardSpec, Position, Square, Strategy};

pub fn file_name(mut x: i32) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'a' + (x % 26) as u8);
        x = x / 26 - 1;
        if x < 0 {
            break;
        }
    }
    out.reverse();
    String::from_utf8(out).unwrap()
}

pub fn square_name(sq: Square) -> String {
    format!("{}{}", file_name(sq.x), sq.y + 1)
}

pub fn parse_square(text: &str, spec: &BoardSpec) -> Result<Square> {
    let text = text
        .trim()
        .trim_start_matches(['K', 'k'])
        .to_ascii_lowercase();
    let split = text
        .find(|c: char| c.is_ascii_digit())
        .ok_or_else(|| anyhow!("`{text}` has no rank"))?;
    let (file, rank) = text.split_at(split);
    if file.is_empty() || !file.bytes().all(|b| b.is_ascii_lowercase()) {
        bail!("`{text}` has no file");
    }
    let x = file
        .bytes()
        .fold(0i64, |acc, b| acc * 26 + (b - b'a') as i64 + 1)
        - 1;
    let y = rank
        .parse::<i64>()
        .map_err(|_| anyhow!("bad rank in `{text}`"))?
        - 1;
    let sq = Square::new(
        x.clamp(-1, i32::MAX as i64) as i32,
        y.clamp(-1, i32::MAX as i64) as i32,
    );
    if !spec.on_board(sq) {
        bail!("{text} is off the {0}x{0} board", spec.n());
    }
    Ok(sq)
}

/// `wk=e1,bk=e8,wr=a1`, white to move.
pub fn parse_start(text: &str, spec: &BoardSpec) -> Result<Position> {
    let (mut wk, mut bk, mut wr) = (None, None, None);
    for part in text.split(',') {
        let (piece, sq) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("expected piece=square, got `{part}`"))?;
        let sq = parse_square(sq, spec)?;
        match piece.trim() {
            "wk" => wk = Some(sq),
            "bk" => bk = Some(sq),
            "wr" => wr = Some(sq),
            other => bail!("unknown piece `{other}` (use wk, bk, wr)"),
        }
    }
    let p = Position::new(
        wk.ok_or_else(|| anyhow!("missing wk"))?,
        bk.ok_or_else(|| anyhow!("missing bk"))?,
        Some(wr.ok_or_else(|| anyhow!("missing wr"))?),
        true,
    );
    if !p.is_legal(spec) {
        bail!("{p} is not a legal white-to-move position");
    }
    Ok(p)
}

pub fn render(p: &Position, spec: &BoardSpec) -> String {
    let n = spec.n();
    if n > 26 {
        return format!(
            "wk {}  bk {}  wr {}\n",
            square_name(p.wk),
            square_name(p.bk),
            p.wr.map_or("x".into(), square_name)
        );
    }
    let mut out = String::new();
    for y in (0..n).rev() {
        out.push_str(&format!("{:>2} ", y + 1));
        for x in 0..n {
            let sq = Square::new(x, y);
            let c = if sq == p.wk {
                'K'
            } else if sq == p.bk {
                'k'
            } else if Some(sq) == p.wr {
                'R'
            } else {
                '.'
            };
            out.push(c);
            out.push(' ');
        }
        out.push('\n');
    }
    out.push_str("   ");
    for x in 0..n {
        out.push_str(&file_name(x));
        out.push(' ');
    }
    out.push('\n');
    out
}

fn describe_white(from: &Position, to: &Position) -> String {
    if from.wk != to.wk {
        format!("K{}-{}", square_name(from.wk), square_name(to.wk))
    } else {
        format!(
            "R{}-{}",
            square_name(from.wr.unwrap()),
            square_name(to.wr.unwrap())
        )
    }
}

/// Plays one game from `start` (white to move). Returns the number of
/// plies played, or `None` when the player quit.
pub fn run(
    spec: BoardSpec,
    start: Position,
    input: &mut impl BufRead,
    out: &mut impl Write,
) -> Result<Option<u32>> {
    let st = Strategy::new(spec);
    let mut p = start;
    let mut plies = 0;
    writeln!(
        out,
        "You play the black king. Enter target squares like d5; `quit` to stop."
    )?;
    loop {
        let Some(m) = st.strategy_function(&p) else {
            bail!("the strategy has no move in {p}");
        };
        plies += 1;
        writeln!(out, "white: {} ({})", describe_white(&p, &m.to), m.kind)?;
        let q = m.to;
        write!(out, "{}", render(&q, &spec))?;
        if q.is_checkmate(&spec) {
            writeln!(out, "checkmate after {plies} plies")?;
            return Ok(Some(plies));
        }
        if q.is_stalemate(&spec) {
            bail!("stalemate reached, which the strategy should never allow");
        }
        p = loop {
            write!(out, "black> ")?;
            out.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                return Ok(None);
            }
            let line = line.trim();
            match line {
                "" => continue,
                "quit" | "q" | "exit" => return Ok(None),
                "help" | "?" => {
                    let moves: Vec<String> = q
                        .legal_successors(&spec)?
                        .iter()
                        .map(|r| square_name(r.bk))
                        .collect();
                    writeln!(out, "legal: {}", moves.join(" "))?;
                    continue;
                }
                _ => {}
            }
            let target = match parse_square(line, &spec) {
                Ok(t) => t,
                Err(e) => {
                    writeln!(out, "{e}")?;
                    continue;
                }
            };
            match q
                .legal_successors(&spec)?
                .into_iter()
                .find(|r| r.bk == target)
            {
                Some(r) if r.wr.is_none() => {
                    writeln!(out, "black captures the rook: draw")?;
                    return Ok(Some(plies + 1));
                }
                Some(r) => break r,
                None => writeln!(out, "illegal move: the black king cannot go to {line}")?,
            }
        };
        plies += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_names_round_trip() {
        let spec = BoardSpec::generalized(60).unwrap();
        for x in [0, 7, 25, 26, 27, 51, 52, 59] {
            for y in [0, 9, 59] {
                let sq = Square::new(x, y);
                assert_eq!(parse_square(&square_name(sq), &spec).unwrap(), sq);
            }
        }
        assert_eq!(square_name(Square::new(26, 0)), "aa1");
        assert!(parse_square("i1", &BoardSpec::classic8()).is_err());
        assert!(parse_square("a0", &BoardSpec::classic8()).is_err());
        assert!(parse_square("5", &BoardSpec::classic8()).is_err());
    }

    #[test]
    fn scripted_game_reaches_mate() {
        let spec = BoardSpec::generalized(8).unwrap();
        let start = parse_start("wk=d3,bk=c7,wr=f5", &spec).unwrap();
        // a black player that always answers with its first legal move
        let st = Strategy::new(spec);
        let mut p = start;
        let mut script = String::new();
        loop {
            let q = st.strategy_function(&p).unwrap().to;
            if q.is_checkmate(&spec) {
                break;
            }
            let r = q.legal_successors(&spec).unwrap()[0];
            script.push_str("nonsense\nz9\n");
            script.push_str(&format!("{}\n", square_name(r.bk)));
            p = r;
        }
        let mut out = Vec::new();
        let plies = run(spec, start, &mut script.as_bytes(), &mut out)
            .unwrap()
            .unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("checkmate"), "{text}");
        assert!(text.contains("illegal") || text.contains("off the"));
        assert!(plies % 2 == 1 && plies <= 65);
    }

    #[test]
    fn quitting_stops_the_game() {
        let spec = BoardSpec::generalized(8).unwrap();
        let start = parse_start("wk=d3,bk=c7,wr=f5", &spec).unwrap();
        let mut out = Vec::new();
        assert_eq!(
            run(spec, start, &mut "quit\n".as_bytes(), &mut out).unwrap(),
            None
        );
        assert!(parse_start("wk=d3,bk=d4,wr=f5", &spec).is_err());
    }
}
