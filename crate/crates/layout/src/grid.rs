use crate::{LayoutError, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Coord {
    pub row: usize,
    pub col: usize,
}

impl Coord {
    pub fn new(row: usize, col: usize) -> Self {
        Coord { row, col }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// Lattice directions in clockwise order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dir {
    Up,
    Right,
    Down,
    Left,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::Up, Dir::Right, Dir::Down, Dir::Left];

    pub fn index(self) -> usize {
        self as usize
    }

    /// `k` quarter turns clockwise.
    pub fn turn(self, k: usize) -> Dir {
        Dir::ALL[(self.index() + k) % 4]
    }

    pub fn opposite(self) -> Dir {
        self.turn(2)
    }
}

/// Square lattice with nearest-neighbour couplers and an optional defect
/// mask. A 12×6 grid has 72 qubits and 126 couplers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    #[serde(default)]
    pub dead_qubits: BTreeSet<Coord>,
    /// Unordered pairs; stored with the smaller coordinate first.
    #[serde(default)]
    pub dead_couplers: BTreeSet<(Coord, Coord)>,
}

impl GridSpec {
    pub fn new(rows: usize, cols: usize) -> Self {
        GridSpec { rows, cols, dead_qubits: BTreeSet::new(), dead_couplers: BTreeSet::new() }
    }

    pub fn with_dead_qubits(mut self, qs: impl IntoIterator<Item = Coord>) -> Self {
        self.dead_qubits.extend(qs);
        self
    }

    pub fn with_dead_couplers(mut self, cs: impl IntoIterator<Item = (Coord, Coord)>) -> Self {
        self.dead_couplers.extend(cs.into_iter().map(|(a, b)| if a <= b { (a, b) } else { (b, a) }));
        self
    }

    /// One text row per lattice row: `.` working qubit, `x` dead qubit.
    /// Blank lines and `#` comments are skipped.
    pub fn from_mask(text: &str) -> Result<Self> {
        let lines: Vec<&str> =
            text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
        let cols = lines.first().map_or(0, |l| l.chars().count());
        let mut g = GridSpec::new(lines.len(), cols);
        for (r, line) in lines.iter().enumerate() {
            if line.chars().count() != cols {
                return Err(LayoutError::Grid(format!("mask row {r} has {} columns, want {cols}", line.chars().count())));
            }
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '.' => {}
                    'x' | 'X' => {
                        g.dead_qubits.insert(Coord::new(r, c));
                    }
                    _ => return Err(LayoutError::Grid(format!("unexpected {ch:?} in mask at ({r}, {c})"))),
                }
            }
        }
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(LayoutError::Grid(format!("{}×{} grid is empty", self.rows, self.cols)));
        }
        if let Some(q) = self.dead_qubits.iter().find(|q| !self.contains(**q)) {
            return Err(LayoutError::Grid(format!("dead qubit {q} outside the {}×{} grid", self.rows, self.cols)));
        }
        for &(a, b) in &self.dead_couplers {
            if !self.contains(a) || !self.contains(b) {
                return Err(LayoutError::Grid(format!("dead coupler {a}–{b} outside the grid")));
            }
            if a.row.abs_diff(b.row) + a.col.abs_diff(b.col) != 1 {
                return Err(LayoutError::Grid(format!("{a}–{b} is not a lattice coupler")));
            }
        }
        Ok(())
    }

    pub fn contains(&self, q: Coord) -> bool {
        q.row < self.rows && q.col < self.cols
    }

    pub fn n_qubits(&self) -> usize {
        self.rows * self.cols
    }

    pub fn n_couplers(&self) -> usize {
        self.rows * self.cols.saturating_sub(1) + self.cols * self.rows.saturating_sub(1)
    }

    pub fn working_qubits(&self) -> usize {
        self.n_qubits() - self.dead_qubits.len()
    }

    pub fn qubit_ok(&self, q: Coord) -> bool {
        self.contains(q) && !self.dead_qubits.contains(&q)
    }

    pub fn coupler_ok(&self, a: Coord, b: Coord) -> bool {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.qubit_ok(a) && self.qubit_ok(b) && !self.dead_couplers.contains(&key)
    }

    pub fn step(&self, q: Coord, d: Dir) -> Option<Coord> {
        let (r, c) = match d {
            Dir::Up => (q.row.checked_sub(1)?, q.col),
            Dir::Right => (q.row, q.col + 1),
            Dir::Down => (q.row + 1, q.col),
            Dir::Left => (q.row, q.col.checked_sub(1)?),
        };
        let n = Coord::new(r, c);
        self.contains(n).then_some(n)
    }

    /// Row-major index.
    pub fn index(&self, q: Coord) -> usize {
        q.row * self.cols + q.col
    }

    pub fn centre(&self) -> (f64, f64) {
        ((self.rows as f64 - 1.0) / 2.0, (self.cols as f64 - 1.0) / 2.0)
    }
}
