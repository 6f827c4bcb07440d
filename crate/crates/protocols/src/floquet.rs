use crate::{ProtocolError, Result};
use qroutesim_core::QuditRegister;
use qroutesim_gates::FloquetParams;
use qroutesim_noise::{DecayRates, NoiseModel};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloquetCost {
    pub m: usize,
    pub value: f64,
}

/// (P11, P02) after N periods from |11⟩, closed form.
pub fn floquet_populations(theta: f64, eta: f64, zeta: f64, n: usize) -> (f64, f64) {
    let p02 = FloquetParams::new(theta, eta, zeta).p02(n);
    (1.0 - p02, p02)
}

/// Mean over i < m of P02 after 2i+1 periods and P11 after 2i periods,
/// simulated from |11⟩ with `duration_ns` per √CZ.
pub fn floquet_cost(params: &FloquetParams, m: usize, rates: Option<DecayRates>, duration_ns: f64) -> Result<FloquetCost> {
    if m == 0 {
        return Err(ProtocolError::BadInput("cost needs m ≥ 1".into()));
    }
    let period = params.circuit(1, duration_ns);
    let model = match rates {
        Some(r) => NoiseModel::uniform(2, r),
        None => NoiseModel::noiseless(2),
    };
    let mut state = QuditRegister::new_basis_state(&[3, 3], "11")?;
    let mut sum = 0.0;
    for n in 0..2 * m {
        sum += if n % 2 == 0 { state.population("11")? } else { state.population("02")? };
        state = model.run(&period, &state)?.state;
    }
    Ok(FloquetCost { m, value: sum / (2 * m) as f64 })
}
