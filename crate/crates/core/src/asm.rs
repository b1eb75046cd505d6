//! Alternating-sign-like matrices of size `2n x m` and their bijection with
//! lattice states.
//!
//! Matrix rows are numbered top-down, so matrix row `t` (1-based) is lattice
//! row `2n + 1 - t`; rows `2i-1, 2i` form double row `i` counted from the top.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    classify_vertex, turn_kind, validate_state, ArrowDir, Half, LatticeSize, LatticeState,
    TurnKind, VertexKind,
};

/// A `2n x m` matrix over `{-1, 0, 1}`, top row first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AsmMatrix {
    size: LatticeSize,
    entries: Vec<Vec<i8>>,
}

impl AsmMatrix {
    pub fn new(size: LatticeSize, entries: Vec<Vec<i8>>) -> Result<Self> {
        if entries.len() != size.rows() || entries.iter().any(|r| r.len() != size.m()) {
            return Err(Error::Domain(format!(
                "matrix must be {}x{}",
                size.rows(),
                size.m()
            )));
        }
        if entries.iter().flatten().any(|&e| !(-1..=1).contains(&e)) {
            return Err(Error::Domain("entries must lie in {-1, 0, 1}".into()));
        }
        Ok(Self { size, entries })
    }

    pub fn size(&self) -> LatticeSize {
        self.size
    }

    /// Entry at matrix row `row` (1-based, top-down) and column `col` (1-based).
    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.entries[row - 1][col - 1]
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.entries
    }

    /// Parses `2n` lines of `m` space-separated entries (top row first).
    /// With `m = 0` every line is empty, so `n` must be given.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let body = text.strip_suffix('\n').unwrap_or(text);
        let lines: Vec<&str> = body.split('\n').collect();
        if lines.len() != 2 * n {
            return Err(Error::Parse {
                line: lines.len().min(2 * n) + 1,
                col: 1,
                msg: format!("expected {} rows", 2 * n),
            });
        }
        let mut entries = Vec::with_capacity(2 * n);
        for (i, line) in lines.iter().enumerate() {
            let row = line
                .split_whitespace()
                .enumerate()
                .map(|(j, tok)| match tok {
                    "-1" => Ok(-1),
                    "0" => Ok(0),
                    "1" => Ok(1),
                    _ => Err(Error::Parse {
                        line: i + 1,
                        col: j + 1,
                        msg: format!("entry {tok:?} is not -1, 0 or 1"),
                    }),
                })
                .collect::<Result<Vec<i8>>>()?;
            entries.push(row);
        }
        let m = entries[0].len();
        if let Some(i) = entries.iter().position(|r| r.len() != m) {
            return Err(Error::Parse {
                line: i + 1,
                col: 1,
                msg: format!("expected {m} entries"),
            });
        }
        let size = LatticeSize::new(n, m).map_err(|e| Error::Parse {
            line: 1,
            col: 1,
            msg: e.to_string(),
        })?;
        Self::new(size, entries)
    }
}

impl fmt::Display for AsmMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// A broken matrix constraint (rows and columns 1-based, rows top-down).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixViolation {
    ColumnNotAlternating { col: usize },
    ColumnSum { col: usize, sum: i64 },
    RowNotAlternating { row: usize },
    RightmostNotOne { row: usize },
    DoubleRowSum { double_row: usize, sum: i64 },
    DoubleRowBothPositive { double_row: usize },
}

impl fmt::Display for MatrixViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixViolation::ColumnNotAlternating { col } => {
                write!(
                    f,
                    "column {col}: nonzero entries do not alternate starting and ending with 1"
                )
            }
            MatrixViolation::ColumnSum { col, sum } => {
                write!(f, "column {col} sums to {sum}, not 1")
            }
            MatrixViolation::RowNotAlternating { row } => {
                write!(f, "row {row}: nonzero entries do not alternate")
            }
            MatrixViolation::RightmostNotOne { row } => {
                write!(f, "row {row}: rightmost nonzero entry is -1")
            }
            MatrixViolation::DoubleRowSum { double_row, sum } => {
                write!(f, "double row {double_row} sums to {sum}, not 0 or 1")
            }
            MatrixViolation::DoubleRowBothPositive { double_row } => {
                write!(f, "both rows of double row {double_row} start with 1")
            }
        }
    }
}

fn nonzeros(it: impl Iterator<Item = i8>) -> Vec<i8> {
    it.filter(|&e| e != 0).collect()
}

fn alternates(v: &[i8]) -> bool {
    v.windows(2).all(|w| w[0] != w[1])
}

/// Lists every broken constraint; empty means the matrix is valid.
pub fn validate_matrix(mat: &AsmMatrix) -> Vec<MatrixViolation> {
    let (n, m) = (mat.size.n(), mat.size.m());
    let mut out = Vec::new();
    for c in 0..m {
        let nz = nonzeros(mat.entries.iter().map(|r| r[c]));
        let sum: i64 = nz.iter().map(|&e| i64::from(e)).sum();
        if !alternates(&nz) || nz.first() != Some(&1) || nz.last() != Some(&1) {
            out.push(MatrixViolation::ColumnNotAlternating { col: c + 1 });
        }
        if sum != 1 {
            out.push(MatrixViolation::ColumnSum { col: c + 1, sum });
        }
    }
    for (r, row) in mat.entries.iter().enumerate() {
        let nz = nonzeros(row.iter().copied());
        if !alternates(&nz) {
            out.push(MatrixViolation::RowNotAlternating { row: r + 1 });
        }
        if nz.last() == Some(&-1) {
            out.push(MatrixViolation::RightmostNotOne { row: r + 1 });
        }
    }
    for i in 0..n {
        let (a, b) = (&mat.entries[2 * i], &mat.entries[2 * i + 1]);
        let sum: i64 = a.iter().chain(b.iter()).map(|&e| i64::from(e)).sum();
        if !(0..=1).contains(&sum) {
            out.push(MatrixViolation::DoubleRowSum {
                double_row: i + 1,
                sum,
            });
        }
        let lead = |r: &[i8]| r.iter().copied().find(|&e| e != 0);
        if lead(a) == Some(1) && lead(b) == Some(1) {
            out.push(MatrixViolation::DoubleRowBothPositive { double_row: i + 1 });
        }
    }
    out
}

/// Matrix entry of a vertex: upper rows map `c-` to 1 and `c+` to -1, lower
/// rows map `c+` to 1 and `c-` to -1; every other kind maps to 0.
pub fn entry_for(kind: VertexKind, half: Half) -> i8 {
    match (kind, half) {
        (VertexKind::CMinus, Half::Upper) | (VertexKind::CPlus, Half::Lower) => 1,
        (VertexKind::CPlus, Half::Upper) | (VertexKind::CMinus, Half::Lower) => -1,
        _ => 0,
    }
}

/// Image of a valid state under the bijection.
pub fn state_to_matrix(state: &LatticeState) -> Result<AsmMatrix> {
    let size = state.size();
    let n2 = size.rows();
    let mut entries = vec![vec![0i8; size.m()]; n2];
    for row in 1..=n2 {
        for col in 1..=size.m() {
            let k = classify_vertex(state, row, col)?;
            entries[n2 - row][col - 1] = entry_for(k, Half::of_row(row));
        }
    }
    AsmMatrix::new(size, entries)
}

/// Rebuilds the unique state of a matrix. A vertical edge points up iff an
/// even number of c vertices lie below it in its column; a horizontal edge
/// points right iff an even number of c vertices lie to its right.
pub fn matrix_to_state(mat: &AsmMatrix) -> Result<LatticeState> {
    let size = mat.size;
    let (n2, m) = (size.rows(), size.m());
    // nonzero[row][col] with lattice rows, 0-based bottom-up
    let nonzero = |r: usize, c: usize| mat.entries[n2 - 1 - r][c] != 0;
    let v: Vec<Vec<ArrowDir>> = (0..m)
        .map(|c| {
            let mut col = Vec::with_capacity(n2 + 1);
            let mut parity = 0;
            col.push(ArrowDir::Up);
            for r in 0..n2 {
                parity ^= usize::from(nonzero(r, c));
                col.push(if parity == 0 {
                    ArrowDir::Up
                } else {
                    ArrowDir::Down
                });
            }
            col
        })
        .collect();
    let h: Vec<Vec<ArrowDir>> = (0..n2)
        .map(|r| {
            let mut row = vec![ArrowDir::Right; m + 1];
            let mut parity = 0;
            for g in (0..m).rev() {
                parity ^= usize::from(nonzero(r, g));
                row[g] = if parity == 0 {
                    ArrowDir::Right
                } else {
                    ArrowDir::Left
                };
            }
            row
        })
        .collect();
    let state = LatticeState::from_arrows(size, h, v)?;
    if let Some(v) = validate_state(&state).first() {
        return Err(Error::InconsistentMatrix(format!(
            "reconstructed state is invalid: {v}"
        )));
    }
    for row in 1..=n2 {
        for col in 1..=m {
            let k = classify_vertex(&state, row, col)?;
            let want = mat.entries[n2 - row][col - 1];
            if entry_for(k, Half::of_row(row)) != want {
                return Err(Error::InconsistentMatrix(format!(
                    "entry {want} at matrix row {}, column {col} cannot be realized",
                    n2 + 1 - row
                )));
            }
        }
    }
    Ok(state)
}

/// Turn kind read off the matrix side: a double row whose lower lattice row
/// (the second row of the pair, top-down) starts with 1 is `KPlus`.
pub fn matrix_k_plus_count(mat: &AsmMatrix) -> usize {
    (0..mat.size.n())
        .filter(|&i| mat.entries[2 * i + 1].iter().copied().find(|&e| e != 0) == Some(1))
        .count()
}

/// Turn kinds of the state behind a matrix, bottom double row first.
pub fn matrix_turns(mat: &AsmMatrix) -> Result<Vec<TurnKind>> {
    let st = matrix_to_state(mat)?;
    (1..=mat.size.n()).map(|i| turn_kind(&st, i)).collect()
}

/// All rows of length `m` compatible with the column prefix sums in `open`
/// (bit set when the column has seen an unmatched 1): nonzeros alternate, the
/// rightmost is 1, a 1 only goes into a closed column and a -1 into an open
/// one. Sorted lexicographically by entries with -1 < 0 < 1.
fn admissible_rows(open: u32, m: usize) -> Vec<(Vec<i8>, u32)> {
    let mut out = Vec::new();
    let mut row = Vec::with_capacity(m);
    fn rec(open: u32, m: usize, row: &mut Vec<i8>, last: i8, out: &mut Vec<(Vec<i8>, u32)>) {
        let c = row.len();
        if c == m {
            if last != -1 {
                let mut o = open;
                for (j, &e) in row.iter().enumerate() {
                    if e != 0 {
                        o ^= 1 << j;
                    }
                }
                out.push((row.clone(), o));
            }
            return;
        }
        let is_open = open >> c & 1 == 1;
        for e in [-1i8, 0, 1] {
            let ok = match e {
                0 => true,
                1 => !is_open && last != 1,
                _ => is_open && last != -1,
            };
            if ok {
                row.push(e);
                rec(open, m, row, if e == 0 { last } else { e }, out);
                row.pop();
            }
        }
    }
    rec(open, m, &mut row, 0, &mut out);
    out
}

/// Every valid matrix of the given size, found by a row-by-row search that
/// never consults the lattice side.
pub fn enumerate_matrices(size: LatticeSize) -> Vec<AsmMatrix> {
    let (n, m) = (size.n(), size.m());
    let rows_by_open: Vec<Vec<(Vec<i8>, u32)>> =
        (0..1u32 << m).map(|o| admissible_rows(o, m)).collect();
    let mut out = Vec::new();
    let mut current: Vec<Vec<i8>> = Vec::with_capacity(2 * n);
    fn lead(r: &[i8]) -> Option<i8> {
        r.iter().copied().find(|&e| e != 0)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        size: LatticeSize,
        rows_by_open: &[Vec<(Vec<i8>, u32)>],
        open: u32,
        current: &mut Vec<Vec<i8>>,
        out: &mut Vec<AsmMatrix>,
    ) {
        let (n, m) = (size.n(), size.m());
        let t = current.len();
        if t == 2 * n {
            if open == (1u32 << m) - 1 {
                out.push(AsmMatrix {
                    size,
                    entries: current.clone(),
                });
            }
            return;
        }
        for (row, next) in &rows_by_open[open as usize] {
            if t % 2 == 1 {
                let first = &current[t - 1];
                let sum: i32 = first.iter().chain(row.iter()).map(|&e| i32::from(e)).sum();
                if !(0..=1).contains(&sum) || (lead(first) == Some(1) && lead(row) == Some(1)) {
                    continue;
                }
                // each remaining double row adds at most one to the total
                let remaining = (n - t.div_ceil(2)) as u32;
                if m as u32 - next.count_ones() > remaining {
                    continue;
                }
            }
            current.push(row.clone());
            rec(size, rows_by_open, *next, current, out);
            current.pop();
        }
    }
    rec(size, &rows_by_open, 0, &mut current, &mut out);
    out
}
