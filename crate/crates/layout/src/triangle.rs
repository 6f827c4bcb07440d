use crate::{Coord, GridSpec};
use serde::{Deserialize, Serialize};
use crate::region::region_check;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// One router: the address qubit and its input, left and right neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangle {
    pub address: Coord,
    pub input: Coord,
    pub left: Coord,
    pub right: Coord,
    /// Index of the parent triangle and the parent vertex this one hangs off.
    pub parent: Option<(usize, Side)>,
}

impl Triangle {
    pub fn qubits(&self) -> [Coord; 4] {
        [self.input, self.address, self.left, self.right]
    }

    pub fn vertex(&self, side: Side) -> Coord {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    pub fn couplers(&self) -> [(Coord, Coord); 3] {
        [(self.address, self.input), (self.address, self.left), (self.address, self.right)]
    }
}

/// Router tree; in layouts produced by the search, triangle `n` has children
/// `2n + 1` (left) and `2n + 2` (right).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleLayout {
    pub triangles: Vec<Triangle>,
}

impl TriangleLayout {
    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Longest root-to-leaf chain, counted in routers.
    pub fn layers(&self) -> usize {
        let mut depth = vec![0usize; self.triangles.len()];
        let mut best = 0;
        for (i, t) in self.triangles.iter().enumerate() {
            depth[i] = match t.parent {
                Some((p, _)) if p < i => depth[p] + 1,
                _ => 1,
            };
            best = best.max(depth[i]);
        }
        best
    }

    pub fn qubits(&self) -> BTreeSet<Coord> {
        self.triangles.iter().flat_map(|t| t.qubits()).collect()
    }

    /// Vertices no child hangs off: the data qubits of the tree.
    pub fn data_qubits(&self) -> Vec<Coord> {
        let used: BTreeSet<(usize, Side)> = self.triangles.iter().filter_map(|t| t.parent).collect();
        let mut out = Vec::new();
        for (i, t) in self.triangles.iter().enumerate() {
            for side in [Side::Left, Side::Right] {
                if !used.contains(&(i, side)) {
                    out.push(t.vertex(side));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    Empty,
    OutOfGrid { triangle: usize, site: Coord },
    DeadQubit { triangle: usize, site: Coord },
    DeadCoupler { triangle: usize, a: Coord, b: Coord },
    /// Input, left and right are not three distinct lattice neighbours of the address.
    Malformed { triangle: usize },
    /// Parent index missing, forward, or already holding a child on that side.
    BadParent { triangle: usize },
    RootCount { roots: usize },
    /// The child's input is not the parent vertex it claims to hang off.
    Detached { triangle: usize, parent: usize },
    /// Two triangles share qubits beyond the one declared vertex.
    SharedQubits { a: usize, b: usize, sites: Vec<Coord> },
    /// Footprints of two triangles share area.
    Overlap { a: usize, b: usize },
    /// Area cut off from outside the grid by the layout, listed by the
    /// top-left corner of each unit square it touches.
    Enclosed { squares: Vec<Coord> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: &[Coord]| s.iter().map(Coord::to_string).collect::<Vec<_>>().join(" ");
        match self {
            Violation::Empty => write!(f, "layout has no triangles"),
            Violation::OutOfGrid { triangle, site } => write!(f, "triangle {triangle}: {site} is off the grid"),
            Violation::DeadQubit { triangle, site } => write!(f, "triangle {triangle}: qubit {site} is defective"),
            Violation::DeadCoupler { triangle, a, b } => write!(f, "triangle {triangle}: coupler {a}–{b} is defective"),
            Violation::Malformed { triangle } => write!(f, "triangle {triangle}: vertices are not three neighbours of the address"),
            Violation::BadParent { triangle } => write!(f, "triangle {triangle}: invalid parent link"),
            Violation::RootCount { roots } => write!(f, "{roots} root triangles, want 1"),
            Violation::Detached { triangle, parent } => {
                write!(f, "triangle {triangle}: input is not a vertex of parent {parent}")
            }
            Violation::SharedQubits { a, b, sites } => write!(f, "triangles {a} and {b} share {}", list(sites)),
            Violation::Overlap { a, b } => write!(f, "triangles {a} and {b} overlap"),
            Violation::Enclosed { squares } => write!(f, "layout encloses area in squares {}", list(squares)),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutReport {
    pub violations: Vec<Violation>,
}

impl LayoutReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn is_neighbour(a: Coord, b: Coord) -> bool {
    a.row.abs_diff(b.row) + a.col.abs_diff(b.col) == 1
}

/// Every violated placement rule, with coordinates. Rules: each triangle is
/// an address plus three of its neighbours on working qubits and couplers;
/// the triangles form one tree in which a child's input is its parent's left
/// or right vertex and no other qubit is shared; the triangle footprints
/// neither overlap nor enclose any area.
pub fn check_layout(grid: &GridSpec, layout: &TriangleLayout) -> LayoutReport {
    let mut v = Vec::new();
    let ts = &layout.triangles;
    if ts.is_empty() {
        return LayoutReport { violations: vec![Violation::Empty] };
    }
    for (i, t) in ts.iter().enumerate() {
        let mut on_grid = true;
        for q in t.qubits() {
            if !grid.contains(q) {
                v.push(Violation::OutOfGrid { triangle: i, site: q });
                on_grid = false;
            } else if !grid.qubit_ok(q) {
                v.push(Violation::DeadQubit { triangle: i, site: q });
            }
        }
        let distinct: BTreeSet<Coord> = t.qubits().into_iter().collect();
        if distinct.len() != 4 || ![t.input, t.left, t.right].iter().all(|&q| is_neighbour(t.address, q)) {
            v.push(Violation::Malformed { triangle: i });
        } else if on_grid {
            for (a, b) in t.couplers() {
                if grid.qubit_ok(a) && grid.qubit_ok(b) && !grid.coupler_ok(a, b) {
                    v.push(Violation::DeadCoupler { triangle: i, a, b });
                }
            }
        }
    }

    let roots = ts.iter().filter(|t| t.parent.is_none()).count();
    if roots != 1 {
        v.push(Violation::RootCount { roots });
    }
    let mut taken = BTreeSet::new();
    for (i, t) in ts.iter().enumerate() {
        if let Some((p, side)) = t.parent {
            // parents precede children, so the link structure is acyclic
            if p >= i || !taken.insert((p, side)) {
                v.push(Violation::BadParent { triangle: i });
            } else if ts[p].vertex(side) != t.input {
                v.push(Violation::Detached { triangle: i, parent: p });
            }
        }
    }

    for i in 0..ts.len() {
        let qi: BTreeSet<Coord> = ts[i].qubits().into_iter().collect();
        for j in i + 1..ts.len() {
            let mut shared: BTreeSet<Coord> = ts[j].qubits().into_iter().filter(|q| qi.contains(q)).collect();
            if matches!(ts[j].parent, Some((p, _)) if p == i) {
                shared.remove(&ts[j].input);
            }
            if !shared.is_empty() {
                v.push(Violation::SharedQubits { a: i, b: j, sites: shared.into_iter().collect() });
            }
        }
    }

    let region = region_check(grid, layout);
    v.extend(region.overlaps.into_iter().map(|(a, b)| Violation::Overlap { a, b }));
    if !region.enclosed.is_empty() {
        v.push(Violation::Enclosed { squares: region.enclosed });
    }
    LayoutReport { violations: v }
}
