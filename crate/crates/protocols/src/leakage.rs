use crate::Result;
use qroutesim_core::{c, DVector, C64};
use qroutesim_gates::{qrouter_circuit_with, RouterParams, Scheme, SqrtCzParams};

/// Population left in |1 L 0 0⟩ (address on the left level, excitation on
/// I) after each of `reps` repetitions of two back-to-back routers whose
/// √CZ pulses under-rotate to `theta`. `phase` is used for both φ′ and φ″.
/// Ideal gates return every population to 1.
pub fn leakage_revival(scheme: Scheme, theta: f64, phase: f64, reps: usize) -> Result<Vec<f64>> {
    let p = RouterParams {
        sqrt_cz: SqrtCzParams { theta, ..SqrtCzParams::default() },
        phi01: phase,
        phi12: phase,
        ..RouterParams::default()
    };
    let u = qrouter_circuit_with(scheme, &p).unitary()?;
    let twice = &u * &u;
    // dims [2, 3, 2, 2]: index = 12·i + 4·c + 2·l + r
    let start = 12 + 4 * scheme.left_level();
    let mut psi = DVector::from_element(u.nrows(), c(0.0, 0.0));
    psi[start] = C64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(reps);
    for _ in 0..reps {
        psi = &twice * &psi;
        out.push(psi[start].norm_sqr());
    }
    Ok(out)
}
