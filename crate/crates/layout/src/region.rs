//! Planar footprint of triangles. Every unit lattice square is cut by its two
//! diagonals into four quarters (N, E, S, W); a router triangle covers
//! exactly four quarters, half of each of the two squares on its apex side.

use crate::{Coord, Dir, GridSpec, Triangle, TriangleLayout};
use std::collections::{HashMap, VecDeque};

fn offset(d: Dir) -> (isize, isize) {
    match d {
        Dir::Up => (-1, 0),
        Dir::Right => (0, 1),
        Dir::Down => (1, 0),
        Dir::Left => (0, -1),
    }
}

fn dir_between(from: Coord, to: Coord) -> Option<Dir> {
    let d = (to.row as isize - from.row as isize, to.col as isize - from.col as isize);
    Dir::ALL.into_iter().find(|&x| offset(x) == d)
}

/// (square row, square col, quarter) with squares indexed by their top-left
/// corner and quarters by the `Dir` of the square edge they sit on.
pub(crate) type Quarter = (isize, isize, usize);

pub(crate) fn footprint(t: &Triangle) -> Option<[Quarter; 4]> {
    let dirs = [t.input, t.left, t.right].map(|q| dir_between(t.address, q));
    let dirs: Vec<Dir> = dirs.into_iter().collect::<Option<_>>()?;
    if dirs[0] == dirs[1] || dirs[0] == dirs[2] || dirs[1] == dirs[2] {
        return None;
    }
    let missing = Dir::ALL.into_iter().find(|d| !dirs.contains(d))?;
    let apex = missing.opposite();
    let (ar, ac) = offset(apex);
    let mut out = [(0, 0, 0); 4];
    for (k, side) in [missing.turn(1), missing.turn(3)].into_iter().enumerate() {
        let (sr, sc) = offset(side);
        let (r, c) = (t.address.row as isize, t.address.col as isize);
        let top = r + ar.min(0) + sr.min(0);
        let left = c + ac.min(0) + sc.min(0);
        // the quarters on the two square edges that meet at the address
        out[2 * k] = (top, left, side.opposite().index());
        out[2 * k + 1] = (top, left, apex.opposite().index());
    }
    Some(out)
}

fn neighbours((r, c, q): Quarter) -> [Quarter; 3] {
    let across = match q {
        0 => (r - 1, c, 2),
        1 => (r, c + 1, 3),
        2 => (r + 1, c, 0),
        _ => (r, c - 1, 1),
    };
    [(r, c, (q + 1) % 4), (r, c, (q + 3) % 4), across]
}

pub(crate) struct RegionReport {
    /// Pairs of triangles whose footprints share area.
    pub overlaps: Vec<(usize, usize)>,
    /// Top-left corners of squares holding area enclosed by the layout.
    pub enclosed: Vec<Coord>,
}

/// Overlapping footprints and enclosed area, by flood fill of the uncovered
/// quarters from outside the grid. Malformed triangles are skipped.
pub(crate) fn region_check(grid: &GridSpec, layout: &TriangleLayout) -> RegionReport {
    let mut owner: HashMap<Quarter, usize> = HashMap::new();
    let mut overlaps = Vec::new();
    for (i, t) in layout.triangles.iter().enumerate() {
        for q in footprint(t).into_iter().flatten() {
            if let Some(&j) = owner.get(&q) {
                if !overlaps.contains(&(j, i)) {
                    overlaps.push((j, i));
                }
            } else {
                owner.insert(q, i);
            }
        }
    }
    // squares −1..=rows−1 × −1..=cols−1 include a ring outside the lattice
    let (rmin, rmax, cmin, cmax) = (-1, grid.rows as isize - 1, -1, grid.cols as isize - 1);
    let inside = |(r, c, _): Quarter| r >= rmin && r <= rmax && c >= cmin && c <= cmax;
    let mut seen = std::collections::HashSet::new();
    let start = (rmin, cmin, 0);
    let mut queue = VecDeque::from([start]);
    seen.insert(start);
    while let Some(q) = queue.pop_front() {
        for n in neighbours(q) {
            if inside(n) && !owner.contains_key(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    let mut enclosed = Vec::new();
    for r in 0..rmax {
        for c in 0..cmax {
            let hole = (0..4).any(|q| {
                let x = (r, c, q);
                !owner.contains_key(&x) && !seen.contains(&x)
            });
            if hole {
                enclosed.push(Coord::new(r as usize, c as usize));
            }
        }
    }
    RegionReport { overlaps, enclosed }
}
