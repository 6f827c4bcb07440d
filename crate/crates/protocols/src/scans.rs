use crate::{AddressBasis, AddressState, ProtocolError, Result};
use qroutesim_core::QuditRegister;
use qroutesim_gates::{qrouter_gates, Circuit, GateKind, Levels, Op, RouterParams, RouterSites, Scheme};
use qroutesim_noise::{DecayRates, NoiseModel};
use std::f64::consts::FRAC_PI_4;

const DIMS: [usize; 4] = [2, 3, 2, 2];
const SITES: RouterSites = RouterSites { input: 0, control: 1, left: 2, right: 3 };

/// (C excited, L, R) patterns with an odd / even number of excitations.
pub const ODD_STATES: [[bool; 3]; 4] = [[false, false, true], [false, true, false], [true, false, false], [true, true, true]];
pub const EVEN_STATES: [[bool; 3]; 4] = [[false, false, false], [false, true, true], [true, false, true], [true, true, false]];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaPoint {
    pub theta: f64,
    pub p_l: f64,
    pub p_r: f64,
    /// Excitation left behind on the input.
    pub p_i: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiPoint {
    pub phi: f64,
    pub p_odd: f64,
    pub p_even: f64,
    /// Populations of the eight (C, L, R) patterns with I = |0⟩, indexed by
    /// 4·c + 2·l + r.
    pub states: [f64; 8],
}

fn model(rates: Option<DecayRates>) -> NoiseModel {
    match rates {
        Some(r) => NoiseModel::uniform(DIMS.len(), r),
        None => NoiseModel::noiseless(DIMS.len()),
    }
}

/// X on I, address pulse on C, one router.
pub(crate) fn routed(scheme: Scheme, addr: AddressState, p: &RouterParams) -> Result<Circuit> {
    let mut c = Circuit::new(&DIMS);
    c.gate(GateKind::X, &[0], p.single_ns)?;
    c.gate(addr.prep_gate(), &[1], p.single_ns)?;
    for g in qrouter_gates(scheme, SITES, p) {
        c.push(Op::Gate(g))?;
    }
    Ok(c)
}

fn run(c: &Circuit, rates: Option<DecayRates>) -> Result<QuditRegister> {
    let init = QuditRegister::new_basis_state(&DIMS, "0000")?;
    Ok(model(rates).run(c, &init)?.state)
}

/// Routing populations for address cos θ|0⟩ + sin θ|L⟩.
pub fn theta_scan(thetas: &[f64], scheme: Scheme, rates: Option<DecayRates>, p: &RouterParams) -> Result<Vec<ThetaPoint>> {
    let basis = AddressBasis::for_scheme(scheme);
    thetas
        .iter()
        .map(|&theta| {
            let st = run(&routed(scheme, AddressState::new(theta, 0.0, basis), p)?, rates)?;
            Ok(ThetaPoint { theta, p_l: st.marginal(&[2])[1], p_r: st.marginal(&[3])[1], p_i: st.marginal(&[0])[1] })
        })
        .collect()
}

/// θ = π/4 address with relative phase φ, one router, then X_{π/2} on C (in
/// the address pair), L and R.
pub fn phi_scan(phis: &[f64], scheme: Scheme, rates: Option<DecayRates>, p: &RouterParams) -> Result<Vec<PhiPoint>> {
    let basis = AddressBasis::for_scheme(scheme);
    let up = basis.upper();
    phis.iter()
        .map(|&phi| {
            let mut c = routed(scheme, AddressState::new(FRAC_PI_4, phi, basis), p)?;
            c.gate(GateKind::half_pi(basis.levels()), &[1], p.single_ns)?;
            c.gate(GateKind::half_pi(Levels::L01), &[2], p.single_ns)?;
            c.gate(GateKind::half_pi(Levels::L01), &[3], p.single_ns)?;
            let st = run(&c, rates)?;
            let mut states = [0.0; 8];
            for (k, s) in states.iter_mut().enumerate() {
                let label = format!("0{}{}{}", if k & 4 != 0 { up } else { 0 }, (k >> 1) & 1, k & 1);
                *s = st.population(&label)?;
            }
            let idx = |b: &[bool; 3]| 4 * usize::from(b[0]) + 2 * usize::from(b[1]) + usize::from(b[2]);
            Ok(PhiPoint {
                phi,
                p_odd: ODD_STATES.iter().map(|b| states[idx(b)]).sum(),
                p_even: EVEN_STATES.iter().map(|b| states[idx(b)]).sum(),
                states,
            })
        })
        .collect()
}

/// Fits P_O = (1 − sin(φ + φ0))/2: returns (φ0, rms residual, fitted
/// contrast). Linear in (cos φ0, sin φ0).
pub fn fit_phi_offset(points: &[PhiPoint]) -> Result<(f64, f64, f64)> {
    if points.len() < 3 {
        return Err(ProtocolError::BadInput("phase fit needs at least 3 points".into()));
    }
    // y = 1 − 2 P_O = a sin φ + b cos φ with a = A cos φ0, b = A sin φ0
    let (mut ss, mut sc, mut cc, mut ys, mut yc) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for pt in points {
        let (s, c) = pt.phi.sin_cos();
        let y = 1.0 - 2.0 * pt.p_odd;
        ss += s * s;
        sc += s * c;
        cc += c * c;
        ys += y * s;
        yc += y * c;
    }
    let det = ss * cc - sc * sc;
    if det.abs() < 1e-12 {
        return Err(ProtocolError::BadInput("φ grid does not separate sin and cos".into()));
    }
    let a = (ys * cc - yc * sc) / det;
    let b = (yc * ss - ys * sc) / det;
    let phi0 = b.atan2(a);
    let rms = (points.iter().map(|pt| (pt.p_odd - (1.0 - (pt.phi + phi0).sin()) / 2.0).powi(2)).sum::<f64>()
        / points.len() as f64)
        .sqrt();
    Ok((phi0, rms, a.hypot(b)))
}
