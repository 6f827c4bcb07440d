//! Local-operator kernels shared by the full and support-restricted registers.
//!
//! A basis (list of flat indices, possibly a strict subset of the register) is
//! grouped into orbits: indices that differ only on the target sites. A local
//! operator mixes amplitudes within an orbit and nowhere else, so applying it
//! costs O(|basis| · m) per column instead of a full matrix product.

use crate::{ChannelMap, QuditError, Radix, Result, C64};
use nalgebra::DMatrix;
use std::collections::HashMap;

const NONE: u32 = u32::MAX;

pub(crate) struct Orbits {
    m: usize,
    slots: Vec<u32>,
}

impl Orbits {
    pub(crate) fn new(radix: &Radix, basis: &[usize], pos: impl Fn(usize) -> Option<usize>, sites: &[usize]) -> Self {
        let m: usize = sites.iter().map(|&s| radix.dims()[s]).product();
        let mut ids: HashMap<usize, usize> = HashMap::new();
        let mut slots: Vec<u32> = Vec::new();
        for &x in basis {
            let (rest, local) = radix.split(x, sites);
            let id = *ids.entry(rest).or_insert_with(|| {
                slots.extend(std::iter::repeat_n(NONE, m));
                slots.len() / m - 1
            });
            let p = pos(x).expect("basis index missing from position map");
            slots[id * m + local] = p as u32;
        }
        Orbits { m, slots }
    }
}

pub(crate) fn check_local(radix: &Radix, op: &DMatrix<C64>, sites: &[usize]) -> Result<()> {
    if sites.is_empty() {
        return Err(QuditError::ShapeError("gate needs at least one site".into()));
    }
    for (i, &s) in sites.iter().enumerate() {
        if s >= radix.n_sites() {
            return Err(QuditError::ShapeError(format!("site {s} out of range for {} sites", radix.n_sites())));
        }
        if sites[..i].contains(&s) {
            return Err(QuditError::ShapeError(format!("site {s} repeated")));
        }
    }
    let m: usize = sites.iter().map(|&s| radix.dims()[s]).product();
    if op.nrows() != m || op.ncols() != m {
        return Err(QuditError::ShapeError(format!(
            "operator is {}x{} but target sites span dimension {m}",
            op.nrows(),
            op.ncols()
        )));
    }
    Ok(())
}

/// `op` (local) times `mat` (rows indexed by the orbit basis).
pub(crate) fn apply_left(mat: &DMatrix<C64>, orbits: &Orbits, op: &DMatrix<C64>) -> DMatrix<C64> {
    let (n, ncols) = mat.shape();
    let m = orbits.m;
    let rows: Vec<Vec<(usize, C64)>> = (0..m)
        .map(|i| (0..m).filter(|&k| op[(i, k)] != C64::new(0.0, 0.0)).map(|k| (k, op[(i, k)])).collect())
        .collect();
    let src = mat.as_slice();
    let mut out = DMatrix::<C64>::zeros(n, ncols);
    let dst = out.as_mut_slice();
    for j in 0..ncols {
        let col = &src[j * n..(j + 1) * n];
        let ocol = &mut dst[j * n..(j + 1) * n];
        for orbit in orbits.slots.chunks_exact(m) {
            for (i, row) in rows.iter().enumerate() {
                let pi = orbit[i];
                if pi == NONE {
                    continue;
                }
                let mut acc = C64::new(0.0, 0.0);
                for &(k, u) in row {
                    let pk = orbit[k];
                    if pk != NONE {
                        acc += u * col[pk as usize];
                    }
                }
                ocol[pi as usize] = acc;
            }
        }
    }
    out
}

/// U ρ U† for Hermitian ρ on the orbit basis.
pub(crate) fn conjugate(rho: &DMatrix<C64>, orbits: &Orbits, op: &DMatrix<C64>) -> DMatrix<C64> {
    let a = apply_left(rho, orbits, op);
    apply_left(&a.adjoint(), orbits, op)
}

/// Applies a single-site transfer matrix to ρ over `basis`. Every index the
/// channel can move weight into must be present in `pos`.
pub(crate) fn apply_channel(
    radix: &Radix,
    basis: &[usize],
    pos: impl Fn(usize) -> Option<usize>,
    rho: &DMatrix<C64>,
    site: usize,
    ch: &ChannelMap,
) -> DMatrix<C64> {
    let d = ch.dim();
    let stride = radix.stride(site) as isize;
    let nz = ch.nonzero_columns();
    let n = basis.len();
    let mut out = DMatrix::<C64>::zeros(n, n);
    let digits: Vec<usize> = basis.iter().map(|&x| radix.digit(x, site)).collect();
    for q in 0..n {
        let b = digits[q];
        let y = basis[q] as isize;
        for p in 0..n {
            let v = rho[(p, q)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let a = digits[p];
            let x = basis[p] as isize;
            for &(a2, b2, t) in &nz[a * d + b] {
                let x2 = (x + (a2 as isize - a as isize) * stride) as usize;
                let y2 = (y + (b2 as isize - b as isize) * stride) as usize;
                let p2 = pos(x2).expect("channel target outside support");
                let q2 = pos(y2).expect("channel target outside support");
                out[(p2, q2)] += t * v;
            }
        }
    }
    out
}
