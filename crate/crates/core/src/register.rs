use crate::kernel::{self, Orbits};
use crate::{ChannelMap, NumericPolicy, QuditError, Radix, Result, C64};
use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug, PartialEq)]
pub enum Repr {
    Pure(DVector<C64>),
    Mixed(DMatrix<C64>),
}

/// Immutable register value; every operation returns a new register.
#[derive(Clone, Debug, PartialEq)]
pub struct QuditRegister {
    radix: Radix,
    repr: Repr,
}

impl QuditRegister {
    pub fn new_basis_state(dims: &[usize], label: &str) -> Result<Self> {
        let radix = Radix::new(dims)?;
        let idx = radix.parse_label(label)?;
        let mut amps = DVector::zeros(radix.total());
        amps[idx] = C64::new(1.0, 0.0);
        Ok(QuditRegister { radix, repr: Repr::Pure(amps) })
    }

    /// Pure register from amplitudes; checks the norm against `tol`.
    pub fn from_amplitudes(dims: &[usize], amps: DVector<C64>, tol: f64) -> Result<Self> {
        let radix = Radix::new(dims)?;
        if amps.len() != radix.total() {
            return Err(QuditError::ShapeError(format!("{} amplitudes for dimension {}", amps.len(), radix.total())));
        }
        let norm = amps.norm_squared();
        if (norm - 1.0).abs() > tol {
            return Err(QuditError::InvalidState(format!("norm² = {norm}")));
        }
        Ok(QuditRegister { radix, repr: Repr::Pure(amps) })
    }

    pub fn from_density(dims: &[usize], rho: DMatrix<C64>, policy: &NumericPolicy) -> Result<Self> {
        let radix = Radix::new(dims)?;
        if rho.shape() != (radix.total(), radix.total()) {
            return Err(QuditError::ShapeError(format!("density matrix is {:?}", rho.shape())));
        }
        let reg = QuditRegister { radix, repr: Repr::Mixed(rho) };
        reg.validate(policy)?;
        Ok(reg)
    }

    /// Product of single-site pure states, site 0 first.
    pub fn product(factors: &[DVector<C64>]) -> Result<Self> {
        let dims: Vec<usize> = factors.iter().map(|f| f.len()).collect();
        let radix = Radix::new(&dims)?;
        let mut amps = DVector::from_element(1, C64::new(1.0, 0.0));
        for f in factors {
            amps = amps.kronecker(f);
        }
        Ok(QuditRegister { radix, repr: Repr::Pure(amps) })
    }

    pub(crate) fn from_parts(radix: Radix, repr: Repr) -> Self {
        QuditRegister { radix, repr }
    }

    pub fn radix(&self) -> &Radix {
        &self.radix
    }

    pub fn dims(&self) -> &[usize] {
        self.radix.dims()
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&DVector<C64>> {
        match &self.repr {
            Repr::Pure(v) => Some(v),
            Repr::Mixed(_) => None,
        }
    }

    pub fn amplitude(&self, label: &str) -> Result<C64> {
        let idx = self.radix.parse_label(label)?;
        match &self.repr {
            Repr::Pure(v) => Ok(v[idx]),
            Repr::Mixed(_) => Err(QuditError::InvalidState("amplitudes of a mixed register are undefined".into())),
        }
    }

    pub fn density(&self) -> DMatrix<C64> {
        match &self.repr {
            Repr::Pure(v) => v * v.adjoint(),
            Repr::Mixed(m) => m.clone(),
        }
    }

    pub fn to_mixed(&self) -> Self {
        QuditRegister { radix: self.radix.clone(), repr: Repr::Mixed(self.density()) }
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            Repr::Pure(v) => v.norm_squared(),
            Repr::Mixed(m) => m.trace().re,
        }
    }

    fn orbits(&self, sites: &[usize]) -> Orbits {
        let basis: Vec<usize> = (0..self.radix.total()).collect();
        Orbits::new(&self.radix, &basis, Some, sites)
    }

    /// Applies the local operator `gate` to `sites` (listed most significant first).
    /// Unitarity is the caller's business: effective non-unitary maps are allowed.
    pub fn apply_gate(&self, gate: &DMatrix<C64>, sites: &[usize]) -> Result<Self> {
        kernel::check_local(&self.radix, gate, sites)?;
        let orbits = self.orbits(sites);
        let repr = match &self.repr {
            Repr::Pure(v) => {
                let m = DMatrix::from_column_slice(v.len(), 1, v.as_slice());
                let out = kernel::apply_left(&m, &orbits, gate);
                Repr::Pure(DVector::from_column_slice(out.as_slice()))
            }
            Repr::Mixed(rho) => Repr::Mixed(kernel::conjugate(rho, &orbits, gate)),
        };
        Ok(QuditRegister { radix: self.radix.clone(), repr })
    }

    pub fn apply_channel(&self, site: usize, ch: &ChannelMap) -> Result<Self> {
        let rho = match &self.repr {
            Repr::Pure(_) => return Err(QuditError::RequiresMixed),
            Repr::Mixed(m) => m,
        };
        if site >= self.radix.n_sites() || self.radix.dims()[site] != ch.dim() {
            return Err(QuditError::ShapeError(format!("channel of dimension {} on site {site}", ch.dim())));
        }
        let basis: Vec<usize> = (0..self.radix.total()).collect();
        let out = kernel::apply_channel(&self.radix, &basis, Some, rho, site, ch);
        Ok(QuditRegister { radix: self.radix.clone(), repr: Repr::Mixed(out) })
    }

    pub fn populations(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Pure(v) => v.iter().map(|z| z.norm_sqr()).collect(),
            Repr::Mixed(m) => m.diagonal().iter().map(|z| z.re.max(0.0)).collect(),
        }
    }

    pub fn population(&self, label: &str) -> Result<f64> {
        Ok(self.populations()[self.radix.parse_label(label)?])
    }

    /// Marginal distribution over `sites` (in the given order).
    pub fn marginal(&self, sites: &[usize]) -> Vec<f64> {
        let m: usize = sites.iter().map(|&s| self.radix.dims()[s]).product();
        let mut out = vec![0.0; m];
        for (idx, p) in self.populations().into_iter().enumerate() {
            out[self.radix.split(idx, sites).1] += p;
        }
        out
    }

    /// Removes every component with `forbidden` on `site` and renormalises.
    pub fn postselect(&self, site: usize, forbidden: usize) -> Result<(Self, f64)> {
        self.postselect_with(site, forbidden, NumericPolicy::default().discard)
    }

    pub fn postselect_with(&self, site: usize, forbidden: usize, discard: f64) -> Result<(Self, f64)> {
        if site >= self.radix.n_sites() {
            return Err(QuditError::ShapeError(format!("site {site} out of range")));
        }
        let keep: Vec<bool> = (0..self.radix.total()).map(|i| self.radix.digit(i, site) != forbidden).collect();
        let total = self.trace();
        let repr = match &self.repr {
            Repr::Pure(v) => {
                Repr::Pure(DVector::from_iterator(v.len(), v.iter().zip(&keep).map(|(z, &k)| if k { *z } else { C64::new(0.0, 0.0) })))
            }
            Repr::Mixed(m) => {
                let mut out = m.clone();
                for i in 0..keep.len() {
                    for j in 0..keep.len() {
                        if !(keep[i] && keep[j]) {
                            out[(i, j)] = C64::new(0.0, 0.0);
                        }
                    }
                }
                Repr::Mixed(out)
            }
        };
        let reg = QuditRegister { radix: self.radix.clone(), repr };
        let kept = reg.trace() / total;
        if kept < discard {
            return Err(QuditError::AllDiscarded(kept));
        }
        Ok((reg.scaled(1.0 / reg.trace()), kept))
    }

    fn scaled(&self, weight: f64) -> Self {
        let repr = match &self.repr {
            Repr::Pure(v) => Repr::Pure(v * C64::new(weight.sqrt(), 0.0)),
            Repr::Mixed(m) => Repr::Mixed(m * C64::new(weight, 0.0)),
        };
        QuditRegister { radix: self.radix.clone(), repr }
    }

    /// Reduced density matrix on `keep`, whose order fixes the new site order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(QuditError::ShapeError("partial trace must keep at least one site".into()));
        }
        for (i, &s) in keep.iter().enumerate() {
            if s >= self.radix.n_sites() || keep[..i].contains(&s) {
                return Err(QuditError::ShapeError(format!("bad keep list {keep:?}")));
            }
        }
        let kdims: Vec<usize> = keep.iter().map(|&s| self.radix.dims()[s]).collect();
        let kradix = Radix::new(&kdims)?;
        let m = kradix.total();
        // group full indices by their traced-out part
        let mut groups: std::collections::BTreeMap<usize, Vec<(usize, usize)>> = Default::default();
        for idx in 0..self.radix.total() {
            let (rest, local) = self.radix.split(idx, keep);
            groups.entry(rest).or_default().push((local, idx));
        }
        let mut out = DMatrix::<C64>::zeros(m, m);
        for members in groups.values() {
            for &(la, ia) in members {
                for &(lb, ib) in members {
                    out[(la, lb)] += match &self.repr {
                        Repr::Pure(v) => v[ia] * v[ib].conj(),
                        Repr::Mixed(r) => r[(ia, ib)],
                    };
                }
            }
        }
        Ok(QuditRegister { radix: kradix, repr: Repr::Mixed(out) })
    }

    /// Reorders sites: new site `k` is old site `perm[k]`.
    pub fn permute_sites(&self, perm: &[usize]) -> Result<Self> {
        let n = self.radix.n_sites();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(QuditError::ShapeError(format!("{perm:?} is not a permutation of {n} sites")));
        }
        let ndims: Vec<usize> = perm.iter().map(|&p| self.radix.dims()[p]).collect();
        let nradix = Radix::new(&ndims)?;
        let map: Vec<usize> = (0..self.radix.total())
            .map(|idx| {
                let d = self.radix.digits_of(idx);
                nradix.index_of(&perm.iter().map(|&p| d[p]).collect::<Vec<_>>())
            })
            .collect();
        let repr = match &self.repr {
            Repr::Pure(v) => {
                let mut out = DVector::zeros(v.len());
                for (old, &new) in map.iter().enumerate() {
                    out[new] = v[old];
                }
                Repr::Pure(out)
            }
            Repr::Mixed(r) => {
                let mut out = DMatrix::zeros(r.nrows(), r.ncols());
                for (i, &ni) in map.iter().enumerate() {
                    for (j, &nj) in map.iter().enumerate() {
                        out[(ni, nj)] = r[(i, j)];
                    }
                }
                Repr::Mixed(out)
            }
        };
        Ok(QuditRegister { radix: nradix, repr })
    }

    /// ⟨ψ|ρ|ψ⟩ against a pure target over the same register.
    pub fn fidelity_to(&self, target: &DVector<C64>) -> Result<f64> {
        if target.len() != self.radix.total() {
            return Err(QuditError::ShapeError("target has the wrong dimension".into()));
        }
        Ok(match &self.repr {
            Repr::Pure(v) => target.dotc(v).norm_sqr(),
            Repr::Mixed(r) => (target.adjoint() * r * target)[(0, 0)].re,
        })
    }

    pub fn validate(&self, policy: &NumericPolicy) -> Result<()> {
        match &self.repr {
            Repr::Pure(v) => {
                let n = v.norm_squared();
                if (n - 1.0).abs() > policy.algebraic {
                    return Err(QuditError::InvalidState(format!("norm² = {n}")));
                }
            }
            Repr::Mixed(r) => {
                let herm = crate::max_abs_diff(r, &r.adjoint());
                if herm > policy.algebraic {
                    return Err(QuditError::InvalidState(format!("not Hermitian (defect {herm:e})")));
                }
                let tr = r.trace();
                if (tr - C64::new(1.0, 0.0)).norm() > policy.algebraic {
                    return Err(QuditError::InvalidState(format!("trace = {tr}")));
                }
                let h = (r + r.adjoint()) * C64::new(0.5, 0.0);
                let min = h.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
                if min < -policy.eigen_floor {
                    return Err(QuditError::InvalidState(format!("negative eigenvalue {min:e}")));
                }
            }
        }
        Ok(())
    }
}
