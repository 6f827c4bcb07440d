//! Decay of a routed excitation held in |120⟩ (eraser address) or |110⟩
//! (non-eraser address) while the CSWAP chain runs for time t.

use crate::{check_time, phi1, DecayRates, NoiseError, Result};

/// (raw, post-selected) weight of |120⟩. Post-selection drops every branch
/// where the address has fallen to |1⟩, renormalising the rest.
pub fn amplitude_a120(r: &DecayRates, t: f64) -> Result<(f64, f64)> {
    check_time(t)?;
    if r.is_degenerate() {
        return Err(NoiseError::DegenerateRates);
    }
    let raw = (-(r.g10 + r.g21) * t).exp();
    // 1/(e^{(Γ10+Γ21)t} + λ), λ = Γ21 (e^{Γ10 t} − e^{Γ21 t})/(Γ21 − Γ10), scaled by raw to stay finite
    let scaled_lambda = r.g21 * ((-r.g21 * t).exp() - (-r.g10 * t).exp()) / (r.g21 - r.g10);
    Ok((raw, raw / (1.0 + scaled_lambda)))
}

/// Same quantity valid for any rates, including Γ10 = Γ21.
pub fn amplitude_a120_limit(r: &DecayRates, t: f64) -> Result<(f64, f64)> {
    check_time(t)?;
    let raw = (-(r.g10 + r.g21) * t).exp();
    // Γ21 (e^{Γ10 t} − e^{Γ21 t})/(Γ21 − Γ10) = −Γ21 t e^{Γ10 t} φ((Γ21 − Γ10) t)
    // λ·e^{−(Γ10+Γ21)t} = −Γ21 t e^{−Γ10 t} φ(−(Γ21 − Γ10) t), φ(x) = (e^x − 1)/x
    let scaled_lambda = -r.g21 * t * (-r.g10 * t).exp() * phi1(-(r.g21 - r.g10) * t);
    Ok((raw, raw / (1.0 + scaled_lambda)))
}

/// Weight of |110⟩: both data excitations relax independently.
pub fn amplitude_a110(r: &DecayRates, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok((-2.0 * r.g10 * t).exp())
}

/// Time at which post-selected |120⟩ and |110⟩ weights cross again; exists
/// only when Γ10 < Γ21.
pub fn balance_point(r: &DecayRates) -> Option<f64> {
    if r.g10 > 0.0 && r.g10 < r.g21 && !r.is_degenerate() {
        Some(-(1.0 - r.g10 / r.g21).ln() / r.g10)
    } else {
        None
    }
}

/// |110⟩ weight with an extra leakage rate ε out of the target.
pub fn leaky_a110(r: &DecayRates, eps: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok((-(2.0 * r.g10 + eps) * t).exp())
}

/// Post-selected |120⟩ weight with leakage rate ε. Reduces to the
/// post-selected [`amplitude_a120`] at ε = 0.
pub fn leaky_a120(r: &DecayRates, eps: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    if r.is_degenerate() {
        return Err(NoiseError::DegenerateRates);
    }
    if !(eps >= 0.0) {
        return Err(NoiseError::InvalidRates(format!("ε = {eps}")));
    }
    let (a, b, e) = (r.g10, r.g21, eps);
    let (a2, a3, b2, b3, e2, e3) = (a * a, a * a * a, b * b, b * b * b, e * e, e * e * e);
    let m1 = (a3 * b - a * b3 + a3 * e + a2 * b * e - a * b2 * e + a2 * e2 - b3 * e - b2 * e2) * ((a + b + e) * t).exp();
    let m2 = (-a2 * b2 - a * b3 - a2 * b * e - 2.0 * a * b2 * e - a * b * e2) * ((a + e) * t).exp();
    let m3 = (a2 * b2 + a * b3 + 2.0 * a * b2 * e + b3 * e + b2 * e2) * ((b + e) * t).exp();
    let m4 = 2.0 * a2 * b * e - a * b2 * e - b3 * e + a2 * e2 + a * b * e2 - 2.0 * b2 * e2 + a * e3 - b * e3;
    Ok((a - b) * (a + e) * (b + e) * (a + b + e) / (m1 + m2 + m3 + m4))
}
