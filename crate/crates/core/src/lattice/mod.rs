//! Lattice geometry, states, classification and validation.
//!
//! Rows are counted bottom-up from 1 to `2n`; double row `i` consists of the
//! lower row `2i-1` and the upper row `2i`. Columns are counted left to right
//! from 1 to `m`. Horizontal edge gaps run from 0 (the edge touching the turn)
//! to `m` (the right boundary); vertical gaps from 0 (bottom) to `2n` (top).

mod enumerate;
mod text;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use enumerate::{
    count_states, count_states_by_k, enumerate_states, shards, Shard, StateStream,
};
pub use text::{parse_state, serialize_state};

/// Lattice dimensions: `n` double rows and `m` vertical lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSize {
    n: usize,
    m: usize,
}

impl LatticeSize {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m > n {
            return Err(Error::Size { n, m });
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of single lattice rows, `2n`.
    pub fn rows(&self) -> usize {
        2 * self.n
    }
}

/// Physical arrow direction on an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArrowDir {
    Up,
    Down,
    Left,
    Right,
}

impl ArrowDir {
    fn is_vertical(self) -> bool {
        matches!(self, ArrowDir::Up | ArrowDir::Down)
    }

    pub fn reversed(self) -> Self {
        match self {
            ArrowDir::Up => ArrowDir::Down,
            ArrowDir::Down => ArrowDir::Up,
            ArrowDir::Left => ArrowDir::Right,
            ArrowDir::Right => ArrowDir::Left,
        }
    }
}

/// Which row of a double row a vertex sits in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Half {
    /// Odd rows; horizontal lines are oriented to the left.
    Lower,
    /// Even rows; horizontal lines are oriented to the right.
    Upper,
}

impl Half {
    pub fn of_row(row: usize) -> Self {
        if row % 2 == 1 {
            Half::Lower
        } else {
            Half::Upper
        }
    }

    /// Direction counted as spin +1 on a horizontal edge of this half.
    pub fn positive_horizontal(self) -> ArrowDir {
        match self {
            Half::Lower => ArrowDir::Left,
            Half::Upper => ArrowDir::Right,
        }
    }
}

/// The six admissible vertex configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexKind {
    APlus,
    AMinus,
    BPlus,
    BMinus,
    CPlus,
    CMinus,
}

impl VertexKind {
    pub const ALL: [VertexKind; 6] = [
        VertexKind::APlus,
        VertexKind::AMinus,
        VertexKind::BPlus,
        VertexKind::BMinus,
        VertexKind::CPlus,
        VertexKind::CMinus,
    ];

    /// Kinds sorted by their serialized letter.
    pub(crate) const BY_LETTER: [VertexKind; 6] = [
        VertexKind::APlus,
        VertexKind::BPlus,
        VertexKind::CPlus,
        VertexKind::AMinus,
        VertexKind::BMinus,
        VertexKind::CMinus,
    ];

    pub fn letter(self) -> char {
        match self {
            VertexKind::APlus => 'A',
            VertexKind::AMinus => 'a',
            VertexKind::BPlus => 'B',
            VertexKind::BMinus => 'b',
            VertexKind::CPlus => 'C',
            VertexKind::CMinus => 'c',
        }
    }

    pub fn from_letter(ch: char) -> Option<Self> {
        Some(match ch {
            'A' => VertexKind::APlus,
            'a' => VertexKind::AMinus,
            'B' => VertexKind::BPlus,
            'b' => VertexKind::BMinus,
            'C' => VertexKind::CPlus,
            'c' => VertexKind::CMinus,
            _ => return None,
        })
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_c(self) -> bool {
        matches!(self, VertexKind::CPlus | VertexKind::CMinus)
    }

    /// Spins (left, bottom, right, top) in the upright orientation.
    fn table(self) -> [i8; 4] {
        match self {
            VertexKind::APlus => [1, 1, 1, 1],
            VertexKind::AMinus => [-1, -1, -1, -1],
            VertexKind::BPlus => [1, -1, 1, -1],
            VertexKind::BMinus => [-1, 1, -1, 1],
            VertexKind::CPlus => [1, -1, -1, 1],
            VertexKind::CMinus => [-1, 1, 1, -1],
        }
    }

    /// Orientation-relative spins (left, bottom, right, top) of this kind in
    /// the given half. Lower rows use the table rotated counterclockwise.
    pub fn relative_spins(self, half: Half) -> [i8; 4] {
        let t = self.table();
        match half {
            Half::Upper => t,
            Half::Lower => [t[3], t[0], t[1], t[2]],
        }
    }

    /// Inverse of [`VertexKind::relative_spins`].
    pub fn from_relative_spins(half: Half, spins: [i8; 4]) -> Option<Self> {
        VertexKind::ALL
            .into_iter()
            .find(|k| k.relative_spins(half) == spins)
    }
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VertexKind::APlus => "a+",
            VertexKind::AMinus => "a-",
            VertexKind::BPlus => "b+",
            VertexKind::BMinus => "b-",
            VertexKind::CPlus => "c+",
            VertexKind::CMinus => "c-",
        };
        f.write_str(s)
    }
}

/// The three admissible turn configurations at the reflecting end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TurnKind {
    KPlus,
    KMinus,
    KCreate,
}

impl TurnKind {
    pub const ALL: [TurnKind; 3] = [TurnKind::KPlus, TurnKind::KMinus, TurnKind::KCreate];

    /// Turns sorted by their serialized marker.
    pub(crate) const BY_SYMBOL: [TurnKind; 3] =
        [TurnKind::KCreate, TurnKind::KPlus, TurnKind::KMinus];

    pub fn symbol(self) -> char {
        match self {
            TurnKind::KPlus => '+',
            TurnKind::KMinus => '-',
            TurnKind::KCreate => '*',
        }
    }

    pub fn from_symbol(ch: char) -> Option<Self> {
        Some(match ch {
            '+' => TurnKind::KPlus,
            '-' => TurnKind::KMinus,
            '*' => TurnKind::KCreate,
            _ => return None,
        })
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Arrows on the (lower, upper) edges touching the turn.
    pub fn arrows(self) -> (ArrowDir, ArrowDir) {
        match self {
            TurnKind::KPlus => (ArrowDir::Left, ArrowDir::Right),
            TurnKind::KMinus => (ArrowDir::Right, ArrowDir::Left),
            TurnKind::KCreate => (ArrowDir::Right, ArrowDir::Right),
        }
    }

    pub fn from_arrows(lower: ArrowDir, upper: ArrowDir) -> Option<Self> {
        TurnKind::ALL
            .into_iter()
            .find(|t| t.arrows() == (lower, upper))
    }
}

impl fmt::Display for TurnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TurnKind::KPlus => "k+",
            TurnKind::KMinus => "k-",
            TurnKind::KCreate => "kc",
        };
        f.write_str(s)
    }
}

/// Arrow assignment on every edge of the U-turn lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeState {
    size: LatticeSize,
    /// `2n` rows of `m+1` horizontal arrows, bottom row first.
    h: Vec<ArrowDir>,
    /// `m` columns of `2n+1` vertical arrows, left column first.
    v: Vec<ArrowDir>,
}

impl LatticeState {
    /// Builds a state from arrow grids without checking the state invariants
    /// (use [`validate_state`] for that). Only the grid shapes and the axis of
    /// each arrow are checked.
    pub fn from_arrows(
        size: LatticeSize,
        h: Vec<Vec<ArrowDir>>,
        v: Vec<Vec<ArrowDir>>,
    ) -> Result<Self> {
        let (n2, m) = (size.rows(), size.m());
        if h.len() != n2 || h.iter().any(|r| r.len() != m + 1) {
            return Err(Error::Domain(format!(
                "horizontal grid must be {n2}x{}",
                m + 1
            )));
        }
        if v.len() != m || v.iter().any(|c| c.len() != n2 + 1) {
            return Err(Error::Domain(format!(
                "vertical grid must be {m}x{}",
                n2 + 1
            )));
        }
        if h.iter().flatten().any(|a| a.is_vertical()) {
            return Err(Error::Domain("vertical arrow on a horizontal edge".into()));
        }
        if v.iter().flatten().any(|a| !a.is_vertical()) {
            return Err(Error::Domain("horizontal arrow on a vertical edge".into()));
        }
        Ok(Self {
            size,
            h: h.into_iter().flatten().collect(),
            v: v.into_iter().flatten().collect(),
        })
    }

    pub(crate) fn from_flat(size: LatticeSize, h: Vec<ArrowDir>, v: Vec<ArrowDir>) -> Self {
        debug_assert_eq!(h.len(), size.rows() * (size.m() + 1));
        debug_assert_eq!(v.len(), size.m() * (size.rows() + 1));
        Self { size, h, v }
    }

    pub fn size(&self) -> LatticeSize {
        self.size
    }

    fn h_index(&self, row: usize, gap: usize) -> usize {
        assert!(
            (1..=self.size.rows()).contains(&row) && gap <= self.size.m(),
            "edge index out of range"
        );
        (row - 1) * (self.size.m() + 1) + gap
    }

    fn v_index(&self, col: usize, gap: usize) -> usize {
        assert!(
            (1..=self.size.m()).contains(&col) && gap <= self.size.rows(),
            "edge index out of range"
        );
        (col - 1) * (self.size.rows() + 1) + gap
    }

    /// Horizontal arrow in `row` (1-based, bottom-up) at `gap` (0 = turn side).
    pub fn h_arrow(&self, row: usize, gap: usize) -> ArrowDir {
        self.h[self.h_index(row, gap)]
    }

    /// Vertical arrow in `col` (1-based, left to right) at `gap` (0 = bottom).
    pub fn v_arrow(&self, col: usize, gap: usize) -> ArrowDir {
        self.v[self.v_index(col, gap)]
    }

    /// Copy of this state with one horizontal arrow replaced.
    pub fn with_h_arrow(&self, row: usize, gap: usize, arrow: ArrowDir) -> Result<Self> {
        if arrow.is_vertical() {
            return Err(Error::Domain("vertical arrow on a horizontal edge".into()));
        }
        let mut s = self.clone();
        let i = s.h_index(row, gap);
        s.h[i] = arrow;
        Ok(s)
    }

    /// Copy of this state with one vertical arrow replaced.
    pub fn with_v_arrow(&self, col: usize, gap: usize, arrow: ArrowDir) -> Result<Self> {
        if !arrow.is_vertical() {
            return Err(Error::Domain("horizontal arrow on a vertical edge".into()));
        }
        let mut s = self.clone();
        let i = s.v_index(col, gap);
        s.v[i] = arrow;
        Ok(s)
    }

    /// Number of turns of kind `KPlus`; errors on a forbidden turn.
    pub fn k_plus_count(&self) -> Result<usize> {
        let mut k = 0;
        for i in 1..=self.size.n() {
            if turn_kind(self, i)? == TurnKind::KPlus {
                k += 1;
            }
        }
        Ok(k)
    }
}

fn spin(arrow: ArrowDir, positive: ArrowDir) -> i8 {
    if arrow == positive {
        1
    } else {
        -1
    }
}

/// Orientation-relative spins (left, bottom, right, top) around a vertex.
pub fn vertex_spins(state: &LatticeState, row: usize, col: usize) -> [i8; 4] {
    let half = Half::of_row(row);
    let hp = half.positive_horizontal();
    [
        spin(state.h_arrow(row, col - 1), hp),
        spin(state.v_arrow(col, row - 1), ArrowDir::Up),
        spin(state.h_arrow(row, col), hp),
        spin(state.v_arrow(col, row), ArrowDir::Up),
    ]
}

fn ice_rule_holds(state: &LatticeState, row: usize, col: usize) -> bool {
    let inward = [
        state.h_arrow(row, col - 1) == ArrowDir::Right,
        state.v_arrow(col, row - 1) == ArrowDir::Up,
        state.h_arrow(row, col) == ArrowDir::Left,
        state.v_arrow(col, row) == ArrowDir::Down,
    ];
    inward.iter().filter(|&&b| b).count() == 2
}

/// Classifies the vertex at (`row`, `col`), both 1-based.
pub fn classify_vertex(state: &LatticeState, row: usize, col: usize) -> Result<VertexKind> {
    let size = state.size();
    if !(1..=size.rows()).contains(&row) || !(1..=size.m()).contains(&col) {
        return Err(Error::Domain(format!(
            "vertex ({row}, {col}) outside the lattice"
        )));
    }
    if !ice_rule_holds(state, row, col) {
        return Err(Error::IceRuleViolation { row, col });
    }
    VertexKind::from_relative_spins(Half::of_row(row), vertex_spins(state, row, col))
        .ok_or(Error::IceRuleViolation { row, col })
}

/// Turn configuration of double row `double_row` (1-based, bottom-up).
pub fn turn_kind(state: &LatticeState, double_row: usize) -> Result<TurnKind> {
    if !(1..=state.size().n()).contains(&double_row) {
        return Err(Error::Domain(format!(
            "double row {double_row} outside the lattice"
        )));
    }
    let lower = state.h_arrow(2 * double_row - 1, 0);
    let upper = state.h_arrow(2 * double_row, 0);
    TurnKind::from_arrows(lower, upper).ok_or(Error::ForbiddenTurn { double_row })
}

/// A broken state invariant, tied to the site where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    IceRule { row: usize, col: usize },
    BottomBoundary { col: usize },
    TopBoundary { col: usize },
    RightBoundary { row: usize },
    ForbiddenTurn { double_row: usize },
    CreationCount { expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IceRule { row, col } => {
                write!(f, "ice rule broken at vertex ({row}, {col})")
            }
            Violation::BottomBoundary { col } => {
                write!(f, "bottom boundary arrow of column {col} is not Up")
            }
            Violation::TopBoundary { col } => {
                write!(f, "top boundary arrow of column {col} is not Down")
            }
            Violation::RightBoundary { row } => {
                write!(f, "right boundary arrow of row {row} is not Right")
            }
            Violation::ForbiddenTurn { double_row } => {
                write!(
                    f,
                    "double row {double_row} has the forbidden (Left, Left) turn"
                )
            }
            Violation::CreationCount { expected, found } => {
                write!(f, "expected {expected} creation turns, found {found}")
            }
        }
    }
}

/// Lists every broken invariant; an empty list means the state is valid.
pub fn validate_state(state: &LatticeState) -> Vec<Violation> {
    let size = state.size();
    let (n, m) = (size.n(), size.m());
    let mut out = Vec::new();
    for col in 1..=m {
        if state.v_arrow(col, 0) != ArrowDir::Up {
            out.push(Violation::BottomBoundary { col });
        }
        if state.v_arrow(col, 2 * n) != ArrowDir::Down {
            out.push(Violation::TopBoundary { col });
        }
    }
    for row in 1..=2 * n {
        if state.h_arrow(row, m) != ArrowDir::Right {
            out.push(Violation::RightBoundary { row });
        }
        for col in 1..=m {
            if classify_vertex(state, row, col).is_err() {
                out.push(Violation::IceRule { row, col });
            }
        }
    }
    let mut created = 0;
    for i in 1..=n {
        match turn_kind(state, i) {
            Ok(TurnKind::KCreate) => created += 1,
            Ok(_) => {}
            Err(_) => out.push(Violation::ForbiddenTurn { double_row: i }),
        }
    }
    if created != n - m {
        out.push(Violation::CreationCount {
            expected: n - m,
            found: created,
        });
    }
    out
}

/// Occurrence counts of vertex kinds (per half) and turn kinds in one state.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateStats {
    /// Vertex counts in upper rows, indexed by [`VertexKind::index`].
    pub north: [usize; 6],
    /// Vertex counts in lower rows.
    pub south: [usize; 6],
    /// Turn counts, indexed by [`TurnKind::index`].
    pub turns: [usize; 3],
}

impl StateStats {
    pub fn nu(&self, kind: VertexKind) -> usize {
        self.north[kind.index()] + self.south[kind.index()]
    }

    pub fn nu_turn(&self, kind: TurnKind) -> usize {
        self.turns[kind.index()]
    }

    pub fn vertex_total(&self) -> usize {
        self.north.iter().chain(self.south.iter()).sum()
    }

    pub fn turn_total(&self) -> usize {
        self.turns.iter().sum()
    }
}

/// Counts every vertex and turn kind of a valid state.
pub fn state_stats(state: &LatticeState) -> Result<StateStats> {
    let size = state.size();
    let mut st = StateStats::default();
    for row in 1..=size.rows() {
        for col in 1..=size.m() {
            let k = classify_vertex(state, row, col)?;
            match Half::of_row(row) {
                Half::Upper => st.north[k.index()] += 1,
                Half::Lower => st.south[k.index()] += 1,
            }
        }
    }
    for i in 1..=size.n() {
        st.turns[turn_kind(state, i)?.index()] += 1;
    }
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_rejects_m_above_n() {
        assert!(LatticeSize::new(1, 2).is_err());
        assert!(LatticeSize::new(0, 0).is_err());
        assert!(LatticeSize::new(3, 3).is_ok());
    }

    #[test]
    fn all_positive_spins_are_a_plus_and_negative_a_minus() {
        for half in [Half::Lower, Half::Upper] {
            assert_eq!(
                VertexKind::from_relative_spins(half, [1, 1, 1, 1]),
                Some(VertexKind::APlus)
            );
            assert_eq!(
                VertexKind::from_relative_spins(half, [-1, -1, -1, -1]),
                Some(VertexKind::AMinus)
            );
        }
    }

    #[test]
    fn relative_spin_tables_are_bijective() {
        for half in [Half::Lower, Half::Upper] {
            for k in VertexKind::ALL {
                assert_eq!(
                    VertexKind::from_relative_spins(half, k.relative_spins(half)),
                    Some(k)
                );
            }
        }
    }

    #[test]
    fn turn_table() {
        use ArrowDir::*;
        assert_eq!(TurnKind::from_arrows(Left, Right), Some(TurnKind::KPlus));
        assert_eq!(TurnKind::from_arrows(Right, Left), Some(TurnKind::KMinus));
        assert_eq!(TurnKind::from_arrows(Right, Right), Some(TurnKind::KCreate));
        assert_eq!(TurnKind::from_arrows(Left, Left), None);
    }

    #[test]
    fn letters_round_trip() {
        for k in VertexKind::ALL {
            assert_eq!(VertexKind::from_letter(k.letter()), Some(k));
        }
        let sorted: Vec<char> = VertexKind::BY_LETTER.iter().map(|k| k.letter()).collect();
        let mut check = sorted.clone();
        check.sort();
        assert_eq!(sorted, check);
        let turns: Vec<char> = TurnKind::BY_SYMBOL.iter().map(|t| t.symbol()).collect();
        let mut check = turns.clone();
        check.sort();
        assert_eq!(turns, check);
    }

    #[test]
    fn forbidden_turn_is_an_error() {
        use ArrowDir::*;
        let size = LatticeSize::new(1, 0).unwrap();
        let s = LatticeState::from_arrows(size, vec![vec![Left], vec![Left]], vec![]).unwrap();
        assert_eq!(
            turn_kind(&s, 1),
            Err(Error::ForbiddenTurn { double_row: 1 })
        );
    }

    #[test]
    fn axis_mismatch_is_rejected() {
        use ArrowDir::*;
        let size = LatticeSize::new(1, 0).unwrap();
        assert!(LatticeState::from_arrows(size, vec![vec![Up], vec![Right]], vec![]).is_err());
    }
}
