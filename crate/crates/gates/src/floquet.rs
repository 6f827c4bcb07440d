//! Repeated √CZ pulses separated by a Z_qq frame kick.
//!
//! On the pair (|11⟩, |02⟩), Z_qq = diag(1, e^{iζ/2}) and one period is
//! M = Z_qq·√CZ(ϑ, η)·Z_qq = e^{iζ/2}·exp(−iΩ n̂·σ) with
//! cos Ω = cos(ϑ/2)·cos(ζ/2 − η) and n̂ = (sin α, 0, cos α) up to the sign of
//! n_z. Hence P_02(N) = sin²α·sin²(NΩ) after N periods.

use crate::{sqrt_cz_block, Circuit, GateKind, GateSpec, SqrtCzParams};
use qroutesim_core::{c, DMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloquetParams {
    pub theta: f64,
    pub eta: f64,
    pub zeta: f64,
}

impl FloquetParams {
    pub fn new(theta: f64, eta: f64, zeta: f64) -> Self {
        FloquetParams { theta, eta, zeta }
    }

    /// Ω ∈ [0, π].
    pub fn omega(&self) -> f64 {
        ((self.theta / 2.0).cos() * (self.zeta / 2.0 - self.eta).cos()).clamp(-1.0, 1.0).acos()
    }

    /// Tilt of the rotation axis from z; tan α = tan(ϑ/2)/sin(ζ/2 − η) for the
    /// component signs used here. π/2 whenever ϑ = π.
    pub fn alpha(&self) -> f64 {
        let (ch, sh) = ((self.theta / 2.0).cos(), (self.theta / 2.0).sin());
        let nz = -ch * (self.eta - self.zeta / 2.0).sin();
        if sh.abs() < 1e-300 && nz.abs() < 1e-300 {
            return 0.0;
        }
        sh.atan2(nz)
    }

    /// Z_qq on (|11⟩, |02⟩).
    pub fn zqq_block(&self) -> DMatrix<C64> {
        DMatrix::from_diagonal(&vec![c(1.0, 0.0), C64::from_polar(1.0, self.zeta / 2.0)].into())
    }

    pub fn period_block(&self) -> DMatrix<C64> {
        let z = self.zqq_block();
        &z * sqrt_cz_block(self.theta, self.eta) * &z
    }

    /// M^N on (|11⟩, |02⟩).
    pub fn block_power(&self, n: usize) -> DMatrix<C64> {
        let m = self.period_block();
        let mut acc = DMatrix::identity(2, 2);
        for _ in 0..n {
            acc = &m * acc;
        }
        acc
    }

    /// |⟨02|M^N|11⟩|² in closed form.
    pub fn p02(&self, n: usize) -> f64 {
        let om = self.omega();
        let sh = (self.theta / 2.0).sin();
        let so = om.sin();
        if so.abs() < 1e-12 {
            // Ω = 0 or π: M is ± a phase unless sin(ϑ/2) = 0, which is the same case
            return 0.0;
        }
        (sh * (n as f64 * om).sin() / so).powi(2).min(1.0)
    }

    /// N periods as a two-qutrit circuit on [data, control]; Z_qq is a
    /// virtual phase on the control's |2⟩ level.
    pub fn circuit(&self, n: usize, duration_ns: f64) -> Circuit {
        let mut circ = Circuit::new(&[3, 3]);
        let z = GateSpec::new(GateKind::Phase { p1: 0.0, p2: self.zeta / 2.0 }, &[1], 0.0);
        let p = SqrtCzParams { theta: self.theta, eta: self.eta, duration_ns };
        for _ in 0..n {
            for g in [z.clone(), GateSpec::sqrt_cz(0, 1, &p), z.clone()] {
                circ.push(crate::Op::Gate(g)).expect("two qutrits");
            }
        }
        circ
    }
}
