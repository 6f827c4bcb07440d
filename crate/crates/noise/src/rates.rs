use crate::{NoiseError, Result};
use std::f64::consts::PI;

/// Rates in 1/μs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayRates {
    /// |1⟩ → |0⟩.
    pub g10: f64,
    /// |2⟩ → |1⟩.
    pub g21: f64,
    /// Decay of ρ01 / ρ10.
    pub g2: f64,
    /// Decay of ρ02 / ρ20.
    pub g3: f64,
    /// Decay of ρ12 / ρ21.
    pub g4: f64,
    /// Optional upward rate for |0⟩ → |1⟩ and |1⟩ → |2⟩; zero keeps the pure
    /// relaxation channel.
    pub excitation: f64,
}

impl Default for DecayRates {
    /// Typical device values: T1 = 15 μs (10), 12 μs (21), T2 = 2.5 μs.
    fn default() -> Self {
        DecayRates { g10: 1.0 / 15.0, g21: 1.0 / 12.0, g2: 1.0 / 2.5, g3: 1.0 / 2.5, g4: 1.0 / 2.5, excitation: 0.0 }
    }
}

impl DecayRates {
    pub fn zero() -> Self {
        DecayRates { g10: 0.0, g21: 0.0, g2: 0.0, g3: 0.0, g4: 0.0, excitation: 0.0 }
    }

    /// Relaxation only, with dephasing fixed at the T1 limit of each coherence.
    pub fn t1_only(g10: f64, g21: f64) -> Self {
        DecayRates { g10, g21, g2: g10 / 2.0, g3: g21 / 2.0, g4: (g10 + g21) / 2.0, excitation: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.g10, self.g21, self.g2, self.g3, self.g4, self.excitation];
        if all.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(NoiseError::InvalidRates(format!("rates must be finite and ≥ 0: {self:?}")));
        }
        Ok(())
    }

    /// |Γ10 − Γ21| below 1e-9 of the larger rate (or both zero).
    pub fn is_degenerate(&self) -> bool {
        (self.g10 - self.g21).abs() <= 1e-9 * self.g10.max(self.g21)
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct LeakageSpec {
    /// Each √CZ uses ϑ = π − δϑ.
    pub delta_theta: f64,
    /// Leakage rate per CSWAP in the rate-equation model (1/μs).
    pub epsilon: f64,
}

impl LeakageSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..PI).contains(&self.delta_theta) {
            return Err(NoiseError::InvalidRates(format!("δϑ = {} outside [0, π)", self.delta_theta)));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(NoiseError::InvalidRates(format!("ε = {} must be ≥ 0", self.epsilon)));
        }
        Ok(())
    }

    pub fn theta(&self) -> f64 {
        PI - self.delta_theta
    }
}
