//! Dense linear-algebra substrate for small mixed qubit/qutrit registers.
//!
//! Basis ordering: site 0 is the most significant digit of a basis label, so
//! `"1100"` on dims `[2, 3, 2, 2]` means site0=1, site1=1, site2=0, site3=0.
//! Every index computation in the workspace goes through [`Radix`].

mod channel;
mod error;
mod kernel;
mod radix;
mod register;
mod support;

pub use channel::ChannelMap;
pub use error::QuditError;
pub use radix::Radix;
pub use register::{QuditRegister, Repr};
pub use support::SupportState;

pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

/// Tolerances used for validity checks. One record so callers can tighten or
/// relax everything consistently.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericPolicy {
    /// Algebraic identities (norms, hermiticity, traces).
    pub algebraic: f64,
    /// Channel identities (trace preservation, composition).
    pub channel: f64,
    /// Smallest eigenvalue accepted as "non-negative".
    pub eigen_floor: f64,
    /// Below this kept weight a post-selection counts as having discarded everything.
    pub discard: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        NumericPolicy { algebraic: 1e-10, channel: 1e-9, eigen_floor: 1e-9, discard: 1e-12 }
    }
}

pub type Result<T> = std::result::Result<T, QuditError>;

/// Complex constructor shorthand.
#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Embeds a local operator on `sites` into the full space of `dims`.
pub fn embed(dims: &[usize], op: &DMatrix<C64>, sites: &[usize]) -> Result<DMatrix<C64>> {
    let radix = Radix::new(dims)?;
    kernel::check_local(&radix, op, sites)?;
    let n = radix.total();
    let basis: Vec<usize> = (0..n).collect();
    let orbits = kernel::Orbits::new(&radix, &basis, |x| Some(x), sites);
    let id = DMatrix::<C64>::identity(n, n);
    Ok(kernel::apply_left(&id, &orbits, op))
}

/// Kronecker product helper (left factor is more significant).
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// Max-abs distance between two matrices of equal shape.
pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Max-abs distance between `a` and `b` after removing the best single global
/// phase (taken from the largest entry of `b`).
pub fn max_abs_diff_up_to_phase(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let (k, _) = b
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, z)| if z.norm() > acc.1 { (i, z.norm()) } else { acc });
    let (bk, ak) = (b.as_slice()[k], a.as_slice()[k]);
    if ak.norm() < 1e-300 {
        return max_abs_diff(a, b).max(bk.norm());
    }
    let phase = bk / ak;
    let phase = phase / phase.norm();
    max_abs_diff(&a.map(|z| z * phase), b)
}

/// ‖U†U − I‖_max.
pub fn unitarity_defect(u: &DMatrix<C64>) -> f64 {
    let n = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &DMatrix::identity(n, n))
}
