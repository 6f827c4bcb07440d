//! Density matrix stored only on the basis states that can carry weight.
//!
//! Routing circuits keep most of a 10-site register empty. The support grows
//! when a gate or channel can move weight to a new basis state and shrinks when
//! [`SupportState::prune`] drops states whose population is negligible. Inside
//! the support everything is dense and exact; it is an exact representation of
//! ρ as long as nothing is pruned above round-off.

use crate::kernel::{self, Orbits};
use crate::{ChannelMap, QuditError, QuditRegister, Radix, Repr, Result, C64};
use nalgebra::DMatrix;
use std::collections::HashMap;

#[derive(Clone, Debug)]
pub struct SupportState {
    radix: Radix,
    basis: Vec<usize>,
    pos: HashMap<usize, usize>,
    rho: DMatrix<C64>,
}

impl SupportState {
    pub fn from_register(reg: &QuditRegister) -> Self {
        if let Repr::Pure(v) = reg.repr() {
            // never materialise the full outer product
            let basis: Vec<usize> = (0..v.len()).filter(|&i| v[i].norm_sqr() > 0.0).collect();
            let n = basis.len();
            let rho = DMatrix::from_fn(n, n, |i, j| v[basis[i]] * v[basis[j]].conj());
            return Self::assemble(reg.radix().clone(), basis, rho);
        }
        let pops = reg.populations();
        let basis: Vec<usize> = (0..pops.len()).filter(|&i| pops[i] > 0.0).collect();
        let full = reg.density();
        let n = basis.len();
        let rho = DMatrix::from_fn(n, n, |i, j| full[(basis[i], basis[j])]);
        Self::assemble(reg.radix().clone(), basis, rho)
    }

    pub fn basis_state(dims: &[usize], label: &str) -> Result<Self> {
        Ok(Self::from_register(&QuditRegister::new_basis_state(dims, label)?))
    }

    fn assemble(radix: Radix, basis: Vec<usize>, rho: DMatrix<C64>) -> Self {
        let pos = basis.iter().enumerate().map(|(p, &x)| (x, p)).collect();
        SupportState { radix, basis, pos, rho }
    }

    pub fn radix(&self) -> &Radix {
        &self.radix
    }

    pub fn support_size(&self) -> usize {
        self.basis.len()
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// Adds `extra` indices to the support (zero rows/columns).
    fn grow(&mut self, mut extra: Vec<usize>) {
        extra.retain(|x| !self.pos.contains_key(x));
        extra.sort_unstable();
        extra.dedup();
        if extra.is_empty() {
            return;
        }
        let mut basis = self.basis.clone();
        basis.extend(extra);
        basis.sort_unstable();
        let n = basis.len();
        let mut rho = DMatrix::zeros(n, n);
        let newpos: Vec<usize> = self.basis.iter().map(|x| basis.binary_search(x).unwrap()).collect();
        for (i, &ni) in newpos.iter().enumerate() {
            for (j, &nj) in newpos.iter().enumerate() {
                rho[(ni, nj)] = self.rho[(i, j)];
            }
        }
        *self = Self::assemble(self.radix.clone(), basis, rho);
    }

    pub fn apply_gate(&mut self, gate: &DMatrix<C64>, sites: &[usize]) -> Result<()> {
        kernel::check_local(&self.radix, gate, sites)?;
        let m = gate.nrows();
        let mut extra = Vec::new();
        for &x in &self.basis {
            let (rest, local) = self.radix.split(x, sites);
            for i in 0..m {
                if gate[(i, local)] != C64::new(0.0, 0.0) {
                    extra.push(self.radix.join(rest, i, sites));
                }
            }
        }
        self.grow(extra);
        let pos = &self.pos;
        let orbits = Orbits::new(&self.radix, &self.basis, |x| pos.get(&x).copied(), sites);
        self.rho = kernel::conjugate(&self.rho, &orbits, gate);
        Ok(())
    }

    pub fn apply_channel(&mut self, site: usize, ch: &ChannelMap) -> Result<()> {
        if site >= self.radix.n_sites() || self.radix.dims()[site] != ch.dim() {
            return Err(QuditError::ShapeError(format!("channel of dimension {} on site {site}", ch.dim())));
        }
        let stride = self.radix.stride(site);
        let reach: Vec<Vec<usize>> = (0..ch.dim()).map(|a| ch.reachable_levels(a)).collect();
        let mut extra = Vec::new();
        for &x in &self.basis {
            let a = self.radix.digit(x, site);
            for &a2 in &reach[a] {
                extra.push(x - a * stride + a2 * stride);
            }
        }
        self.grow(extra);
        let pos = &self.pos;
        self.rho = kernel::apply_channel(&self.radix, &self.basis, |x| pos.get(&x).copied(), &self.rho, site, ch);
        Ok(())
    }

    /// Drops basis states with population ≤ `threshold`. Returns the weight removed.
    pub fn prune(&mut self, threshold: f64) -> f64 {
        let (keep, drop): (Vec<usize>, Vec<usize>) =
            (0..self.basis.len()).partition(|&i| self.rho[(i, i)].re > threshold);
        if drop.is_empty() {
            return 0.0;
        }
        let dropped: f64 = drop.iter().map(|&i| self.rho[(i, i)].re).sum();
        let basis: Vec<usize> = keep.iter().map(|&i| self.basis[i]).collect();
        let rho = DMatrix::from_fn(keep.len(), keep.len(), |i, j| self.rho[(keep[i], keep[j])]);
        *self = Self::assemble(self.radix.clone(), basis, rho);
        dropped
    }

    /// Sparse population list (flat index, probability).
    pub fn populations(&self) -> Vec<(usize, f64)> {
        self.basis.iter().enumerate().map(|(p, &x)| (x, self.rho[(p, p)].re.max(0.0))).collect()
    }

    pub fn marginal(&self, sites: &[usize]) -> Vec<f64> {
        let m: usize = sites.iter().map(|&s| self.radix.dims()[s]).product();
        let mut out = vec![0.0; m];
        for (x, p) in self.populations() {
            out[self.radix.split(x, sites).1] += p;
        }
        out
    }

    /// Projects out `forbidden` on `site`, renormalising; returns the kept weight.
    pub fn postselect(&mut self, site: usize, forbidden: usize, discard: f64) -> Result<f64> {
        let before = self.trace();
        let keep: Vec<usize> = (0..self.basis.len()).filter(|&i| self.radix.digit(self.basis[i], site) != forbidden).collect();
        let basis: Vec<usize> = keep.iter().map(|&i| self.basis[i]).collect();
        let rho = DMatrix::from_fn(keep.len(), keep.len(), |i, j| self.rho[(keep[i], keep[j])]);
        let kept_tr = rho.trace().re;
        let kept = kept_tr / before;
        if kept < discard {
            return Err(QuditError::AllDiscarded(kept));
        }
        *self = Self::assemble(self.radix.clone(), basis, rho / C64::new(kept_tr, 0.0));
        Ok(kept)
    }

    pub fn to_register(&self) -> QuditRegister {
        let n = self.radix.total();
        let mut full = DMatrix::zeros(n, n);
        for (i, &x) in self.basis.iter().enumerate() {
            for (j, &y) in self.basis.iter().enumerate() {
                full[(x, y)] = self.rho[(i, j)];
            }
        }
        QuditRegister::from_parts(self.radix.clone(), Repr::Mixed(full))
    }
}
