//! Text form of a state: per double row (bottom-up) a turn marker line
//! (`+`, `-`, `*`), then for `m > 0` the lower and upper rows as vertex
//! letters (`A a B b C c`, upper case for the plus kinds). Every line ends
//! with a newline.

use super::{
    classify_vertex, turn_kind, ArrowDir, Half, LatticeSize, LatticeState, TurnKind, VertexKind,
};
use crate::error::{Error, Result};

/// Serializes a state; fails if some vertex or turn is not admissible.
pub fn serialize_state(state: &LatticeState) -> Result<String> {
    let size = state.size();
    let mut out = String::with_capacity(size.n() * (2 * size.m() + 4));
    for i in 1..=size.n() {
        out.push(turn_kind(state, i)?.symbol());
        out.push('\n');
        if size.m() == 0 {
            continue;
        }
        for row in [2 * i - 1, 2 * i] {
            for col in 1..=size.m() {
                out.push(classify_vertex(state, row, col)?.letter());
            }
            out.push('\n');
        }
    }
    Ok(out)
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

struct Block {
    turn: TurnKind,
    turn_line: usize,
    rows: Option<[(usize, Vec<VertexKind>); 2]>,
}

fn parse_letters(line_no: usize, line: &str) -> Result<Vec<VertexKind>> {
    line.chars()
        .enumerate()
        .map(|(i, ch)| {
            VertexKind::from_letter(ch)
                .ok_or_else(|| perr(line_no, i + 1, format!("unknown vertex letter {ch:?}")))
        })
        .collect()
}

fn is_turn_line(line: &str) -> bool {
    line.chars()
        .next()
        .is_some_and(|c| TurnKind::from_symbol(c).is_some())
}

/// Parses the text form back into a state. Boundary conditions are not
/// checked here; run [`super::validate_state`] on the result.
pub fn parse_state(text: &str) -> Result<LatticeState> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    if body.is_empty() {
        return Err(perr(1, 1, "empty input"));
    }
    let lines: Vec<&str> = body.split('\n').collect();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let line_no = i + 1;
        let line = lines[i];
        let mut chars = line.chars();
        let turn = match (chars.next(), chars.next()) {
            (Some(c), None) => TurnKind::from_symbol(c)
                .ok_or_else(|| perr(line_no, 1, format!("expected a turn marker, found {c:?}")))?,
            (None, _) => {
                return Err(perr(
                    line_no,
                    1,
                    "expected a turn marker, found an empty line",
                ))
            }
            (Some(_), Some(_)) => {
                return Err(perr(line_no, 2, "turn marker line must hold one character"))
            }
        };
        i += 1;
        let rows = if i < lines.len() && !is_turn_line(lines[i]) {
            let lower = parse_letters(i + 1, lines[i])?;
            if i + 1 >= lines.len() || is_turn_line(lines[i + 1]) {
                return Err(perr(i + 2, 1, "missing upper row"));
            }
            let upper = parse_letters(i + 2, lines[i + 1])?;
            i += 2;
            Some([(i - 1, lower), (i, upper)])
        } else {
            None
        };
        blocks.push(Block {
            turn,
            turn_line: line_no,
            rows,
        });
    }

    let m = blocks[0].rows.as_ref().map_or(0, |r| r[0].1.len());
    for b in &blocks {
        match &b.rows {
            None if m > 0 => {
                return Err(perr(
                    b.turn_line + 1,
                    1,
                    format!("expected {m} vertex letters"),
                ))
            }
            Some(r) => {
                for (ln, row) in r {
                    if row.len() != m || m == 0 {
                        return Err(perr(
                            *ln,
                            row.len().min(m) + 1,
                            format!("expected {m} vertex letters"),
                        ));
                    }
                }
            }
            None => {}
        }
    }
    let n = blocks.len();
    let size = LatticeSize::new(n, m).map_err(|e| perr(1, 1, e.to_string()))?;

    let mut h: Vec<Vec<Option<ArrowDir>>> = vec![vec![None; m + 1]; 2 * n];
    let mut v: Vec<Vec<Option<ArrowDir>>> = vec![vec![None; 2 * n + 1]; m];
    fn put(slot: &mut Option<ArrowDir>, a: ArrowDir, line: usize, col: usize) -> Result<()> {
        match *slot {
            Some(old) if old != a => Err(perr(
                line,
                col,
                "arrow conflicts with a neighbouring vertex",
            )),
            _ => {
                *slot = Some(a);
                Ok(())
            }
        }
    }
    for (bi, b) in blocks.iter().enumerate() {
        let (lo, up) = b.turn.arrows();
        put(&mut h[2 * bi][0], lo, b.turn_line, 1)?;
        put(&mut h[2 * bi + 1][0], up, b.turn_line, 1)?;
        let Some(rows) = &b.rows else { continue };
        for (half_i, (ln, row)) in rows.iter().enumerate() {
            let r = 2 * bi + half_i; // 0-based row
            let half = if half_i == 0 {
                Half::Lower
            } else {
                Half::Upper
            };
            let hp = half.positive_horizontal();
            let hor = |s: i8| if s > 0 { hp } else { hp.reversed() };
            let ver = |s: i8| if s > 0 { ArrowDir::Up } else { ArrowDir::Down };
            for (c, kind) in row.iter().enumerate() {
                let [l, bo, ri, t] = kind.relative_spins(half);
                put(&mut h[r][c], hor(l), *ln, c + 1)?;
                put(&mut h[r][c + 1], hor(ri), *ln, c + 1)?;
                put(&mut v[c][r], ver(bo), *ln, c + 1)?;
                put(&mut v[c][r + 1], ver(t), *ln, c + 1)?;
            }
        }
    }
    let unwrap = |g: Vec<Vec<Option<ArrowDir>>>| -> Vec<Vec<ArrowDir>> {
        g.into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|a| a.expect("every edge touches a vertex or a turn"))
                    .collect()
            })
            .collect()
    };
    LatticeState::from_arrows(size, unwrap(h), unwrap(v))
}
