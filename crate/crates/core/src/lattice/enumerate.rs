//! Exhaustive state enumeration.
//!
//! The search walks double rows bottom-up. Each double row is a transition
//! from the vertical arrows below it (an `m`-bit mask, bit `c-1` set when
//! column `c` points up) to the arrows above it. Transitions are generated
//! once per mask in serialized-lexicographic order (turn marker, lower row
//! letters, upper row letters), so a depth-first walk emits states in the
//! lexicographic order of their text form.

use std::sync::Arc;

use super::{ArrowDir, Half, LatticeSize, LatticeState, TurnKind, VertexKind};

#[derive(Debug, Clone)]
struct Transition {
    turn: TurnKind,
    lower_h: Vec<ArrowDir>,
    upper_h: Vec<ArrowDir>,
    mid: u32,
    out: u32,
}

fn arrow_from_spin(s: i8, positive: ArrowDir) -> ArrowDir {
    if s > 0 {
        positive
    } else {
        positive.reversed()
    }
}

/// All ways to fill one row given its left arrow and the vertical arrows
/// below it. Each result is (horizontal arrows, vertical mask above).
fn fill_row(half: Half, left: ArrowDir, below: u32, m: usize) -> Vec<(Vec<ArrowDir>, u32)> {
    let hp = half.positive_horizontal();
    let mut out = Vec::new();
    let mut h = vec![left];
    fn rec(
        half: Half,
        hp: ArrowDir,
        below: u32,
        m: usize,
        col: usize,
        above: u32,
        h: &mut Vec<ArrowDir>,
        out: &mut Vec<(Vec<ArrowDir>, u32)>,
    ) {
        if col == m {
            if h[m] == ArrowDir::Right {
                out.push((h.clone(), above));
            }
            return;
        }
        let l = if h[col] == hp { 1 } else { -1 };
        let b = if below >> col & 1 == 1 { 1 } else { -1 };
        for kind in VertexKind::BY_LETTER {
            let s = kind.relative_spins(half);
            if s[0] != l || s[1] != b {
                continue;
            }
            h.push(arrow_from_spin(s[2], hp));
            let top = if s[3] > 0 { 1 << col } else { 0 };
            rec(half, hp, below, m, col + 1, above | top, h, out);
            h.pop();
        }
    }
    rec(half, hp, below, m, 0, 0, &mut h, &mut out);
    out
}

fn transitions_from(below: u32, m: usize) -> Vec<Transition> {
    let mut out = Vec::new();
    for turn in TurnKind::BY_SYMBOL {
        let (l_arrow, u_arrow) = turn.arrows();
        for (lower_h, mid) in fill_row(Half::Lower, l_arrow, below, m) {
            for (upper_h, top) in fill_row(Half::Upper, u_arrow, mid, m) {
                out.push(Transition {
                    turn,
                    lower_h: lower_h.clone(),
                    upper_h,
                    mid,
                    out: top,
                });
            }
        }
    }
    out
}

#[derive(Debug)]
struct Table {
    size: LatticeSize,
    by_mask: Vec<Vec<Transition>>,
}

impl Table {
    fn new(size: LatticeSize) -> Self {
        let m = size.m();
        let by_mask = (0..1u32 << m)
            .map(|mask| transitions_from(mask, m))
            .collect();
        Self { size, by_mask }
    }

    fn start_mask(&self) -> u32 {
        (1u32 << self.size.m()) - 1
    }

    fn materialize(&self, choices: &[usize]) -> LatticeState {
        let (n, m) = (self.size.n(), self.size.m());
        let mut h = Vec::with_capacity(2 * n * (m + 1));
        let mut v = vec![ArrowDir::Up; m * (2 * n + 1)];
        let mut mask = self.start_mask();
        for (i, &c) in choices.iter().enumerate() {
            let t = &self.by_mask[mask as usize][c];
            h.extend_from_slice(&t.lower_h);
            h.extend_from_slice(&t.upper_h);
            for col in 0..m {
                let base = col * (2 * n + 1);
                v[base + 2 * i + 1] = if t.mid >> col & 1 == 1 {
                    ArrowDir::Up
                } else {
                    ArrowDir::Down
                };
                v[base + 2 * i + 2] = if t.out >> col & 1 == 1 {
                    ArrowDir::Up
                } else {
                    ArrowDir::Down
                };
            }
            mask = t.out;
        }
        LatticeState::from_flat(self.size, h, v)
    }
}

/// Deterministic stream of lattice states in serialized-lexicographic order.
#[derive(Debug)]
pub struct StateStream {
    table: Arc<Table>,
    masks: Vec<u32>,
    next: Vec<usize>,
    choice: Vec<usize>,
    depth: usize,
    floor: usize,
    done: bool,
}

impl StateStream {
    fn new(table: Arc<Table>, prefix: Option<usize>) -> Self {
        let n = table.size.n();
        let mut masks = vec![0; n + 1];
        masks[0] = table.start_mask();
        let mut choice = vec![0; n];
        let (depth, floor) = match prefix {
            Some(c) => {
                choice[0] = c;
                masks[1] = table.by_mask[masks[0] as usize][c].out;
                (1, 1)
            }
            None => (0, 0),
        };
        Self {
            table,
            masks,
            next: vec![0; n],
            choice,
            depth,
            floor,
            done: false,
        }
    }
}

impl Iterator for StateStream {
    type Item = LatticeState;

    fn next(&mut self) -> Option<LatticeState> {
        let n = self.table.size.n();
        if self.done {
            return None;
        }
        loop {
            if self.depth == n {
                let st = self.table.materialize(&self.choice);
                if n == self.floor {
                    self.done = true;
                } else {
                    self.depth -= 1;
                }
                return Some(st);
            }
            let d = self.depth;
            let list = &self.table.by_mask[self.masks[d] as usize];
            let remaining_after = (n - d - 1) as u32;
            let found =
                (self.next[d]..list.len()).find(|&i| list[i].out.count_ones() <= remaining_after);
            match found {
                Some(i) => {
                    self.next[d] = i + 1;
                    self.choice[d] = i;
                    self.masks[d + 1] = list[i].out;
                    self.depth += 1;
                    if self.depth < n {
                        self.next[self.depth] = 0;
                    }
                }
                None => {
                    if d == self.floor {
                        self.done = true;
                        return None;
                    }
                    self.depth -= 1;
                }
            }
        }
    }
}

/// Streams every valid state of the given size exactly once.
pub fn enumerate_states(size: LatticeSize) -> StateStream {
    StateStream::new(Arc::new(Table::new(size)), None)
}

/// A slice of the search space fixed by the bottom double row's transition.
/// Concatenating the shards in order reproduces [`enumerate_states`].
#[derive(Debug, Clone)]
pub struct Shard {
    table: Arc<Table>,
    first: usize,
}

impl Shard {
    pub fn states(&self) -> StateStream {
        StateStream::new(self.table.clone(), Some(self.first))
    }

    /// Position of this shard's bottom double row among all admissible ones.
    pub fn index(&self) -> usize {
        self.first
    }

    pub fn turn(&self) -> TurnKind {
        self.table.by_mask[self.table.start_mask() as usize][self.first].turn
    }
}

/// Splits the enumeration into independently walkable shards.
pub fn shards(size: LatticeSize) -> Vec<Shard> {
    let table = Arc::new(Table::new(size));
    let n = size.n() as u32;
    let start = table.start_mask() as usize;
    (0..table.by_mask[start].len())
        .filter(|&i| table.by_mask[start][i].out.count_ones() < n)
        .map(|first| Shard {
            table: table.clone(),
            first,
        })
        .collect()
}

/// Number of valid states, by dynamic programming over the transition table.
pub fn count_states(size: LatticeSize) -> u128 {
    count_states_by_k(size).iter().sum()
}

/// Number of valid states with exactly `k` turns of kind `KPlus`, `k = 0..=m`.
pub fn count_states_by_k(size: LatticeSize) -> Vec<u128> {
    let table = Table::new(size);
    let m = size.m();
    let masks = 1usize << m;
    // ways[mask][k]
    let mut ways = vec![vec![0u128; m + 1]; masks];
    ways[table.start_mask() as usize][0] = 1;
    for _ in 0..size.n() {
        let mut nxt = vec![vec![0u128; m + 1]; masks];
        for (mask, row) in ways.iter().enumerate() {
            if row.iter().all(|&w| w == 0) {
                continue;
            }
            for t in &table.by_mask[mask] {
                let plus = usize::from(t.turn == TurnKind::KPlus);
                for k in 0..=m - plus {
                    nxt[t.out as usize][k + plus] += row[k];
                }
            }
        }
        ways = nxt;
    }
    ways[0].clone()
}
