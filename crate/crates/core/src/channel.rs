use crate::{QuditError, Result, C64};
use nalgebra::DMatrix;

/// Single-site channel as a d²×d² transfer matrix acting on the row-major
/// vectorisation (ρ00, ρ01, …, ρ(d−1)(d−1)).
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelMap {
    dim: usize,
    transfer: DMatrix<C64>,
    nonzero: Vec<Vec<(usize, usize, C64)>>,
}

impl ChannelMap {
    pub fn new(dim: usize, transfer: DMatrix<C64>) -> Result<Self> {
        if transfer.nrows() != dim * dim || transfer.ncols() != dim * dim {
            return Err(QuditError::ShapeError(format!(
                "transfer matrix for a {dim}-level site must be {0}x{0}",
                dim * dim
            )));
        }
        let nonzero = (0..dim * dim)
            .map(|col| {
                (0..dim * dim)
                    .filter(|&row| transfer[(row, col)] != C64::new(0.0, 0.0))
                    .map(|row| (row / dim, row % dim, transfer[(row, col)]))
                    .collect()
            })
            .collect();
        Ok(ChannelMap { dim, transfer, nonzero })
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, DMatrix::identity(dim * dim, dim * dim)).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn transfer(&self) -> &DMatrix<C64> {
        &self.transfer
    }

    /// For each input element (a, b): the output elements (a′, b′) it feeds.
    pub(crate) fn nonzero_columns(&self) -> &[Vec<(usize, usize, C64)>] {
        &self.nonzero
    }

    /// Levels that weight can move into from level `a` (including `a`).
    pub(crate) fn reachable_levels(&self, a: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.dim)
            .flat_map(|b| self.nonzero[a * self.dim + b].iter().map(|&(a2, _, _)| a2))
            .chain(std::iter::once(a))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Channel applied after `self`.
    pub fn then(&self, next: &ChannelMap) -> Result<ChannelMap> {
        if self.dim != next.dim {
            return Err(QuditError::ShapeError("cannot compose channels of different dimension".into()));
        }
        ChannelMap::new(self.dim, &next.transfer * &self.transfer)
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let d = self.dim;
        if rho.shape() != (d, d) {
            return Err(QuditError::ShapeError(format!("expected a {d}x{d} density matrix")));
        }
        let mut out = DMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                for &(a2, b2, t) in &self.nonzero[a * d + b] {
                    out[(a2, b2)] += t * rho[(a, b)];
                }
            }
        }
        Ok(out)
    }

    /// Choi matrix J[(a,a′),(b,b′)] = ⟨a′|E(|a⟩⟨b|)|b′⟩.
    pub fn choi(&self) -> DMatrix<C64> {
        let d = self.dim;
        let mut j = DMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                for &(a2, b2, t) in &self.nonzero[a * d + b] {
                    j[(a * d + a2, b * d + b2)] += t;
                }
            }
        }
        j
    }

    pub fn choi_eigenvalues(&self) -> Vec<f64> {
        let j = self.choi();
        let herm = (&j + j.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// max_b,b′ |Σ_a E(|b⟩⟨b′|)_aa − δ_bb′|.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for b in 0..d {
            for b2 in 0..d {
                let tr: C64 = (0..d).map(|a| self.transfer[(a * d + a, b * d + b2)]).sum();
                let want = if b == b2 { 1.0 } else { 0.0 };
                worst = worst.max((tr - want).norm());
            }
        }
        worst
    }

    pub fn is_cptp(&self, tol: f64) -> bool {
        let j = self.choi();
        let herm_defect = crate::max_abs_diff(&j, &j.adjoint());
        herm_defect <= tol && self.trace_defect() <= tol && self.choi_eigenvalues()[0] >= -tol
    }
}
