use crate::{check_time, phi1, DecayRates, Result};
use qroutesim_core::{c, ChannelMap, DMatrix, QuditRegister, C64};

/// Weight fed from ρ22 into (ρ00, ρ11) over time t, in a form that is
/// continuous through Γ10 = Γ21.
fn cascade_weights(r: &DecayRates, t: f64) -> (f64, f64) {
    let v2 = if r.is_degenerate() {
        r.g21 * t * (-r.g10 * t).exp()
    } else {
        // Γ21 (e^{−Γ21 t} − e^{−Γ10 t}) / (Γ10 − Γ21)
        r.g21 * t * (-r.g10 * t).exp() * phi1(-(r.g21 - r.g10) * t)
    };
    let v1 = 1.0 - (-r.g21 * t).exp() - v2;
    (v1.max(0.0), v2)
}

/// Relaxation and dephasing of one qutrit over `t` μs as a transfer matrix on
/// row-major vec(ρ). With `excitation > 0` the channel is built from the
/// Lindblad generator instead (see [`lindblad_channel`]).
pub fn qutrit_channel(r: &DecayRates, t: f64) -> Result<ChannelMap> {
    check_time(t)?;
    r.validate()?;
    if r.excitation > 0.0 {
        return lindblad_channel(r, 3, t);
    }
    let e = |g: f64| c((-g * t).exp(), 0.0);
    let (v1, v2) = cascade_weights(r, t);
    let mut m = DMatrix::<C64>::zeros(9, 9);
    m[(0, 0)] = c(1.0, 0.0);
    m[(0, 4)] = c(-(-r.g10 * t).exp_m1(), 0.0);
    m[(0, 8)] = c(v1, 0.0);
    m[(1, 1)] = e(r.g2);
    m[(2, 2)] = e(r.g3);
    m[(3, 3)] = e(r.g2);
    m[(4, 4)] = e(r.g10);
    m[(4, 8)] = c(v2, 0.0);
    m[(5, 5)] = e(r.g4);
    m[(6, 6)] = e(r.g3);
    m[(7, 7)] = e(r.g4);
    m[(8, 8)] = e(r.g21);
    Ok(ChannelMap::new(3, m)?)
}

/// Qubit restriction: Γ10 relaxation and Γ2 dephasing.
pub fn qubit_channel(r: &DecayRates, t: f64) -> Result<ChannelMap> {
    check_time(t)?;
    r.validate()?;
    if r.excitation > 0.0 {
        return lindblad_channel(r, 2, t);
    }
    let mut m = DMatrix::<C64>::zeros(4, 4);
    m[(0, 0)] = c(1.0, 0.0);
    m[(0, 3)] = c(-(-r.g10 * t).exp_m1(), 0.0);
    m[(1, 1)] = c((-r.g2 * t).exp(), 0.0);
    m[(2, 2)] = c((-r.g2 * t).exp(), 0.0);
    m[(3, 3)] = c((-r.g10 * t).exp(), 0.0);
    Ok(ChannelMap::new(2, m)?)
}

pub fn site_channel(r: &DecayRates, dim: usize, t: f64) -> Result<ChannelMap> {
    match dim {
        2 => qubit_channel(r, t),
        3 => qutrit_channel(r, t),
        d => Err(qroutesim_core::QuditError::InvalidDim(d).into()),
    }
}

/// Lindblad generator on row-major vec(ρ): jumps |0⟩←|1⟩ (Γ10), |1⟩←|2⟩
/// (Γ21) and, if set, upward jumps at `excitation`; extra pure dephasing
/// brings each coherence to its target rate (never below the jump-induced
/// rate). Without excitation this reproduces the closed-form channel.
pub fn lindblad_generator(r: &DecayRates, dim: usize) -> DMatrix<C64> {
    let d = dim;
    let mut jumps: Vec<(usize, usize, f64)> = vec![(0, 1, r.g10)];
    if d == 3 {
        jumps.push((1, 2, r.g21));
    }
    if r.excitation > 0.0 {
        jumps.push((1, 0, r.excitation));
        if d == 3 {
            jumps.push((2, 1, r.excitation));
        }
    }
    let idx = |i: usize, j: usize| i * d + j;
    let mut g = DMatrix::<C64>::zeros(d * d, d * d);
    let mut out_rate = vec![0.0; d];
    for &(to, from, rate) in &jumps {
        // L = √rate |to⟩⟨from|
        g[(idx(to, to), idx(from, from))] += c(rate, 0.0);
        out_rate[from] += rate;
    }
    for i in 0..d {
        for j in 0..d {
            g[(idx(i, j), idx(i, j))] -= c(0.5 * (out_rate[i] + out_rate[j]), 0.0);
        }
    }
    let target = |i: usize, j: usize| match (i.min(j), i.max(j)) {
        (0, 1) => r.g2,
        (0, 2) => r.g3,
        _ => r.g4,
    };
    for i in 0..d {
        for j in 0..d {
            if i != j {
                let extra = (target(i, j) - 0.5 * (out_rate[i] + out_rate[j])).max(0.0);
                g[(idx(i, j), idx(i, j))] -= c(extra, 0.0);
            }
        }
    }
    g
}

/// exp(G t) of [`lindblad_generator`].
pub fn lindblad_channel(r: &DecayRates, dim: usize, t: f64) -> Result<ChannelMap> {
    check_time(t)?;
    r.validate()?;
    let g = lindblad_generator(r, dim) * c(t, 0.0);
    Ok(ChannelMap::new(dim, g.exp())?)
}

/// One noise interval of `dt` μs on every site, each with its own rates.
pub fn apply_noise_step(state: &QuditRegister, rates: &[DecayRates], dt: f64) -> Result<QuditRegister> {
    check_time(dt)?;
    if !state.is_pure() && dt == 0.0 {
        return Ok(state.clone());
    }
    if rates.len() != state.dims().len() {
        return Err(crate::NoiseError::InvalidRates(format!(
            "{} rate records for {} sites",
            rates.len(),
            state.dims().len()
        )));
    }
    let mut s = state.clone();
    for (site, r) in rates.iter().enumerate() {
        let ch = site_channel(r, state.dims()[site], dt)?;
        s = s.apply_channel(site, &ch)?;
    }
    Ok(s)
}
