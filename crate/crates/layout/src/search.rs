use crate::region::region_check;
use crate::{check_layout, Coord, Dir, GridSpec, LayoutError, Result, Side, Triangle, TriangleLayout};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Root placement: the address site, the direction of its input, and the
/// unused fourth neighbour. Left is the first remaining direction clockwise
/// from the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub address: Coord,
    pub input: Dir,
    pub missing: Dir,
}

impl Seed {
    pub fn triangle(&self, grid: &GridSpec) -> Option<Triangle> {
        shape(grid, self.address, self.input, self.missing, None)
    }

    /// All seeds in lexicographic order.
    pub fn all(grid: &GridSpec) -> Vec<Seed> {
        let mut out = Vec::new();
        for row in 0..grid.rows {
            for col in 0..grid.cols {
                for input in Dir::ALL {
                    for missing in Dir::ALL {
                        if missing != input {
                            out.push(Seed { address: Coord::new(row, col), input, missing });
                        }
                    }
                }
            }
        }
        out
    }
}

fn shape(grid: &GridSpec, address: Coord, input: Dir, missing: Dir, parent: Option<(usize, Side)>) -> Option<Triangle> {
    if input == missing {
        return None;
    }
    let mut rest = (1..4).map(|k| input.turn(k)).filter(|&d| d != missing);
    let (l, r) = (rest.next()?, rest.next()?);
    Some(Triangle {
        address,
        input: grid.step(address, input)?,
        left: grid.step(address, l)?,
        right: grid.step(address, r)?,
        parent,
    })
}

/// Why a growth attempt stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowFailure {
    /// Most complete layers that do fit (0 if not even the seed does).
    pub deepest: usize,
    /// Qubits a full tree of the requested depth needs: 3·(2^L − 1) + 1.
    pub qubits_needed: usize,
    pub qubits_available: usize,
    /// False when some search hit its expansion budget, so the failure is
    /// not a proof of infeasibility.
    pub exhaustive: bool,
}

pub fn qubits_needed(layers: usize) -> usize {
    3 * ((1usize << layers) - 1) + 1
}

/// Expansions allowed per seed before the search gives up on it.
pub const DEFAULT_BUDGET: u64 = 20_000;

type Key = (Vec<u64>, Vec<u32>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outcome {
    Found,
    Infeasible,
    OutOfBudget,
}

struct Search<'a> {
    grid: &'a GridSpec,
    target: usize,
    occupied: Vec<bool>,
    placed: Vec<Triangle>,
    dead: HashSet<Key>,
    budget: u64,
    exhausted: bool,
}

impl<'a> Search<'a> {
    fn new(grid: &'a GridSpec, layers: usize, budget: u64) -> Self {
        Search {
            grid,
            target: (1usize << layers) - 1,
            occupied: vec![false; grid.n_qubits()],
            placed: Vec::new(),
            dead: HashSet::new(),
            budget,
            exhausted: false,
        }
    }

    fn free(&self, q: Coord) -> bool {
        self.grid.qubit_ok(q) && !self.occupied[self.grid.index(q)]
    }

    fn fits(&self, t: &Triangle) -> bool {
        let new = [t.address, t.left, t.right];
        new.iter().all(|&q| self.free(q)) && t.couplers().iter().all(|&(a, b)| self.grid.coupler_ok(a, b))
    }

    fn set(&mut self, t: &Triangle, on: bool) {
        for q in [t.address, t.left, t.right] {
            let i = self.grid.index(q);
            self.occupied[i] = on;
        }
    }

    fn attach(&self, node: usize) -> (Coord, (usize, Side)) {
        let p = (node - 1) / 2;
        let side = if node % 2 == 1 { Side::Left } else { Side::Right };
        (self.placed[p].vertex(side), (p, side))
    }

    /// Placements for `node`, those nearest the grid centre first.
    fn candidates(&self, node: usize) -> Vec<Triangle> {
        let (v, link) = self.attach(node);
        let mut out = Vec::new();
        for d in Dir::ALL {
            let Some(addr) = self.grid.step(v, d) else { continue };
            if !self.free(addr) {
                continue;
            }
            let input = d.opposite();
            for missing in Dir::ALL {
                if let Some(t) = shape(self.grid, addr, input, missing, Some(link)) {
                    if self.fits(&t) {
                        out.push(t);
                    }
                }
            }
        }
        let (cr, cc) = self.grid.centre();
        let dist = |t: &Triangle| {
            [t.address, t.left, t.right].iter().map(|q| (q.row as f64 - cr).powi(2) + (q.col as f64 - cc).powi(2)).sum::<f64>()
        };
        out.sort_by(|a, b| dist(a).total_cmp(&dist(b)));
        out
    }

    fn pending(&self) -> std::ops::Range<usize> {
        let n = self.placed.len();
        n..self.target.min(2 * n + 1)
    }

    fn key(&self) -> Key {
        let mut bits = vec![0u64; self.occupied.len().div_ceil(64)];
        for (i, &o) in self.occupied.iter().enumerate() {
            if o {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        let pending = self.pending().map(|k| self.grid.index(self.attach(k).0) as u32).collect();
        (bits, pending)
    }

    /// Nodes in the subtree of `k` within a complete tree of `target` nodes.
    fn subtree(&self, k: usize) -> usize {
        let (mut lo, mut hi, mut count) = (k, k, 0);
        while lo < self.target {
            count += hi.min(self.target - 1) - lo + 1;
            lo = 2 * lo + 1;
            hi = 2 * hi + 2;
        }
        count
    }

    /// Each pending subtree grows into one connected region of free qubits
    /// next to its attach vertex and needs three new qubits per router.
    fn capacity_ok(&self) -> bool {
        let g = self.grid;
        let mut comp = vec![usize::MAX; g.n_qubits()];
        let mut sizes = Vec::new();
        for r in 0..g.rows {
            for c in 0..g.cols {
                let q = Coord::new(r, c);
                if !self.free(q) || comp[g.index(q)] != usize::MAX {
                    continue;
                }
                let id = sizes.len();
                let mut stack = vec![q];
                comp[g.index(q)] = id;
                let mut size = 0;
                while let Some(x) = stack.pop() {
                    size += 1;
                    for d in Dir::ALL {
                        if let Some(y) = g.step(x, d) {
                            if self.free(y) && comp[g.index(y)] == usize::MAX {
                                comp[g.index(y)] = id;
                                stack.push(y);
                            }
                        }
                    }
                }
                sizes.push(size);
            }
        }
        let mut demand = vec![0usize; sizes.len()];
        let mut total = 0;
        for k in self.pending() {
            let need = 3 * self.subtree(k);
            total += need;
            let v = self.attach(k).0;
            let mut near: Vec<usize> = Dir::ALL.iter().filter_map(|&d| g.step(v, d)).filter(|&y| self.free(y)).map(|y| comp[g.index(y)]).collect();
            near.sort_unstable();
            near.dedup();
            if near.iter().map(|&i| sizes[i]).max().unwrap_or(0) < need {
                return false;
            }
            if let [only] = near[..] {
                demand[only] += need;
            }
        }
        total <= sizes.iter().sum() && demand.iter().zip(&sizes).all(|(d, s)| d <= s)
    }

    fn run(&mut self) -> Outcome {
        let n = self.placed.len();
        if n == self.target {
            let r = region_check(self.grid, &TriangleLayout { triangles: self.placed.clone() });
            return if r.overlaps.is_empty() && r.enclosed.is_empty() { Outcome::Found } else { Outcome::Infeasible };
        }
        if self.budget == 0 {
            self.exhausted = true;
            return Outcome::OutOfBudget;
        }
        self.budget -= 1;
        let key = self.key();
        if self.dead.contains(&key) {
            return Outcome::Infeasible;
        }
        let mut result = Outcome::Infeasible;
        if self.capacity_ok() && (n + 1..self.pending().end).all(|k| !self.candidates(k).is_empty()) {
            for t in self.candidates(n) {
                self.set(&t, true);
                self.placed.push(t);
                match self.run() {
                    Outcome::Found => return Outcome::Found,
                    Outcome::OutOfBudget => result = Outcome::OutOfBudget,
                    Outcome::Infeasible => {}
                }
                self.placed.pop();
                self.set(&t, false);
                if result == Outcome::OutOfBudget {
                    return result;
                }
            }
        }
        self.dead.insert(key);
        result
    }
}

/// `Ok(layout)`, or `Err(exhaustive)`.
fn grow_exact(grid: &GridSpec, seed: Seed, layers: usize, budget: u64) -> std::result::Result<TriangleLayout, bool> {
    let Some(root) = seed.triangle(grid) else { return Err(true) };
    if layers == 0 || qubits_needed(layers) > grid.working_qubits() {
        return Err(true);
    }
    let mut s = Search::new(grid, layers, budget);
    if !(root.qubits().iter().all(|&q| s.free(q)) && root.couplers().iter().all(|&(a, b)| grid.coupler_ok(a, b))) {
        return Err(true);
    }
    s.set(&root, true);
    let i = grid.index(root.input);
    s.occupied[i] = true;
    s.placed.push(root);
    match s.run() {
        Outcome::Found => Ok(TriangleLayout { triangles: s.placed }),
        Outcome::Infeasible => Err(true),
        Outcome::OutOfBudget => Err(false),
    }
}

fn failure(grid: &GridSpec, layers: usize, exhaustive: bool, fits: impl Fn(usize) -> bool) -> GrowFailure {
    let deepest = (1..layers).rev().find(|&k| fits(k)).unwrap_or(0);
    GrowFailure { deepest, qubits_needed: qubits_needed(layers), qubits_available: grid.working_qubits(), exhaustive }
}

fn check_depth(layers: usize) -> Result<()> {
    if layers == 0 {
        return Err(LayoutError::Grid("a router tree needs at least one layer".into()));
    }
    if layers >= 16 {
        return Err(LayoutError::Grid(format!("{layers} layers is beyond any grid this search handles")));
    }
    Ok(())
}

/// Grows a complete `layers`-deep router tree from `seed` by depth-first
/// placement in breadth-first node order, with backtracking, memoised dead
/// states and region-capacity pruning. Within the expansion budget the
/// search is exhaustive.
pub fn grow_layout(
    grid: &GridSpec,
    seed: Seed,
    layers: usize,
    budget: u64,
) -> Result<std::result::Result<TriangleLayout, GrowFailure>> {
    grid.validate()?;
    check_depth(layers)?;
    Ok(match grow_exact(grid, seed, layers, budget) {
        Ok(l) => Ok(l),
        Err(exhaustive) => Err(failure(grid, layers, exhaustive, |k| grow_exact(grid, seed, k, budget).is_ok())),
    })
}

/// Mean squared distance of the layout's qubits from their centroid; lower
/// is more compact.
pub fn compactness(layout: &TriangleLayout) -> f64 {
    let qs = layout.qubits();
    let n = qs.len().max(1) as f64;
    let (mr, mc) = qs.iter().fold((0.0, 0.0), |(r, c), q| (r + q.row as f64 / n, c + q.col as f64 / n));
    qs.iter().map(|q| (q.row as f64 - mr).powi(2) + (q.col as f64 - mc).powi(2)).sum::<f64>() / n
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestLayout {
    pub seed: Seed,
    pub layout: TriangleLayout,
    pub score: f64,
    /// Distance of the seed address from the grid centre (diagnostic).
    pub seed_offset: f64,
    pub seeds_tried: usize,
    pub seeds_ok: usize,
}

/// Seed scan with the default compactness score and budget.
pub fn best_layout(grid: &GridSpec, layers: usize) -> Result<std::result::Result<BestLayout, GrowFailure>> {
    best_layout_by(grid, layers, DEFAULT_BUDGET, compactness)
}

/// Tries every seed (in parallel) and keeps the lowest-scoring layout; ties
/// go to the lexicographically first seed.
pub fn best_layout_by<S>(
    grid: &GridSpec,
    layers: usize,
    budget: u64,
    score: S,
) -> Result<std::result::Result<BestLayout, GrowFailure>>
where
    S: Fn(&TriangleLayout) -> f64 + Sync,
{
    grid.validate()?;
    check_depth(layers)?;
    let seeds = Seed::all(grid);
    let scan = |k: usize| -> Vec<(Seed, std::result::Result<TriangleLayout, bool>)> {
        if k == 0 || qubits_needed(k) > grid.working_qubits() {
            return Vec::new();
        }
        seeds.par_iter().map(|&s| (s, grow_exact(grid, s, k, budget))).collect()
    };
    let runs = scan(layers);
    let exhaustive = runs.iter().all(|(_, r)| !matches!(r, Err(false)));
    let found: Vec<(Seed, TriangleLayout)> = runs.into_iter().filter_map(|(s, r)| r.ok().map(|l| (s, l))).collect();
    let seeds_ok = found.len();
    let best = found
        .into_iter()
        .map(|(s, l)| (score(&l), s, l))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(match best {
        Some((sc, seed, layout)) => {
            debug_assert!(check_layout(grid, &layout).is_valid());
            let (cr, cc) = grid.centre();
            let seed_offset = ((seed.address.row as f64 - cr).powi(2) + (seed.address.col as f64 - cc).powi(2)).sqrt();
            Ok(BestLayout { seed, layout, score: sc, seed_offset, seeds_tried: seeds.len(), seeds_ok })
        }
        None => Err(failure(grid, layers, exhaustive, |k| scan(k).iter().any(|(_, r)| r.is_ok()))),
    })
}
