use crate::{QuditError, Result};

/// Mixed-radix index arithmetic for a register, most-significant site first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radix {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl Radix {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(QuditError::ShapeError("register needs at least one site".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d != 2 && d != 3) {
            return Err(QuditError::InvalidDim(d));
        }
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len() - 1).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let total = strides[0] * dims[0];
        Ok(Radix { dims: dims.to_vec(), strides, total })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn stride(&self, site: usize) -> usize {
        self.strides[site]
    }

    #[inline]
    pub fn digit(&self, index: usize, site: usize) -> usize {
        (index / self.strides[site]) % self.dims[site]
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.dims.len());
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    pub fn digits_of(&self, index: usize) -> Vec<usize> {
        (0..self.dims.len()).map(|k| self.digit(index, k)).collect()
    }

    /// Parses a ket label such as `"1020"` into a flat index.
    pub fn parse_label(&self, label: &str) -> Result<usize> {
        let bad = |reason: String| QuditError::InvalidLabel { label: label.to_string(), reason };
        let digits: Vec<usize> = label
            .chars()
            .map(|ch| ch.to_digit(10).map(|d| d as usize).ok_or_else(|| bad(format!("{ch:?} is not a digit"))))
            .collect::<Result<_>>()?;
        if digits.len() != self.dims.len() {
            return Err(bad(format!("expected {} digits, got {}", self.dims.len(), digits.len())));
        }
        for (k, (&d, &dim)) in digits.iter().zip(&self.dims).enumerate() {
            if d >= dim {
                return Err(bad(format!("digit {d} at site {k} exceeds dimension {dim}")));
            }
        }
        Ok(self.index_of(&digits))
    }

    pub fn label(&self, index: usize) -> String {
        self.digits_of(index).iter().map(|d| char::from(b'0' + *d as u8)).collect()
    }

    /// Splits `index` into (index with `sites` zeroed, local index over `sites`).
    #[inline]
    pub(crate) fn split(&self, index: usize, sites: &[usize]) -> (usize, usize) {
        let mut rest = index;
        let mut local = 0;
        for &s in sites {
            let d = self.digit(index, s);
            rest -= d * self.strides[s];
            local = local * self.dims[s] + d;
        }
        (rest, local)
    }

    /// Inverse of [`split`](Self::split): rebuilds a flat index from a rest index.
    #[inline]
    pub(crate) fn join(&self, rest: usize, mut local: usize, sites: &[usize]) -> usize {
        let mut idx = rest;
        for &s in sites.iter().rev() {
            let d = local % self.dims[s];
            local /= self.dims[s];
            idx += d * self.strides[s];
        }
        idx
    }
}
