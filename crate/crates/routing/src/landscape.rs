use crate::{build_tree, Result};
use qroutesim_core::SupportState;
use qroutesim_gates::{qrouter_gates, Circuit, GateKind, Levels, Op, RouterParams, RouterSites, Scheme};
use qroutesim_noise::{DecayRates, NoiseModel};
use rayon::prelude::*;

/// I, C1, L, R, C2, C3, D1, D2, D3, D4.
pub const TWO_LAYER_DIMS: [usize; 10] = [2, 3, 2, 2, 3, 3, 2, 2, 2, 2];

const LEAVES: [usize; 4] = [6, 7, 8, 9];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LandscapePoint {
    pub theta1: f64,
    pub theta2: f64,
    /// P(D1..D4 = 1).
    pub pops: [f64; 4],
    /// Post-selection acceptance (1 without erasure checks).
    pub kept: f64,
}

/// Preparation (X on I, address rotations on C1 at θ1 and on C2, C3 at θ2),
/// then the root router and both second-layer routers; eraser runs end with a
/// C ≠ |1⟩ check on every control. Starts from the all-|0⟩ register.
pub fn two_layer_network(scheme: Scheme, theta1: f64, theta2: f64, p: &RouterParams) -> Result<Circuit> {
    let tree = build_tree(2)?;
    let mut circ = Circuit::new(&TWO_LAYER_DIMS);
    let levels = match scheme {
        Scheme::NonEraser => Levels::L01,
        Scheme::Eraser => Levels::L02,
    };
    circ.gate(GateKind::X, &[tree.input()], p.single_ns)?;
    for (ctl, theta) in tree.controls().into_iter().zip([theta1, theta2, theta2]) {
        circ.gate(GateKind::Rot { levels, theta, phi: 0.0 }, &[ctl], p.single_ns)?;
    }
    for n in 1..=3 {
        let b = tree.node(n);
        let sites = RouterSites { input: b.input, control: b.control, left: b.left, right: b.right };
        for g in qrouter_gates(scheme, sites, p) {
            circ.push(Op::Gate(g))?;
        }
    }
    if scheme == Scheme::Eraser {
        for ctl in tree.controls() {
            circ.postselect(ctl, 1)?;
        }
    }
    Ok(circ)
}

/// Ideal populations: each router sends sin²θ to the left.
pub fn product_form(theta1: f64, theta2: f64) -> [f64; 4] {
    let (l1, r1) = (theta1.sin().powi(2), theta1.cos().powi(2));
    let (l2, r2) = (theta2.sin().powi(2), theta2.cos().powi(2));
    [l1 * l2, l1 * r2, r1 * l2, r1 * r2]
}

/// Data populations on the θ1 × θ2 grid (C1 prepared at θ1, C2 and C3 at θ2).
/// `rates = None` is the noiseless case. Grid points run in parallel.
pub fn two_layer_landscape(
    theta1: &[f64],
    theta2: &[f64],
    scheme: Scheme,
    rates: Option<DecayRates>,
    p: &RouterParams,
) -> Result<Vec<LandscapePoint>> {
    let model = match rates {
        Some(r) => NoiseModel::uniform(TWO_LAYER_DIMS.len(), r),
        None => NoiseModel::noiseless(TWO_LAYER_DIMS.len()),
    };
    let grid: Vec<(f64, f64)> = theta1.iter().flat_map(|&a| theta2.iter().map(move |&b| (a, b))).collect();
    grid.into_par_iter()
        .map(|(t1, t2)| {
            let circ = two_layer_network(scheme, t1, t2, p)?;
            let mut state = SupportState::basis_state(&TWO_LAYER_DIMS, "0000000000")?;
            let kept = model.run_support(&circ, &mut state)?;
            let mut pops = [0.0; 4];
            for (k, &leaf) in LEAVES.iter().enumerate() {
                pops[k] = state.marginal(&[leaf])[1] / state.trace();
            }
            Ok(LandscapePoint { theta1: t1, theta2: t2, pops, kept })
        })
        .collect()
}
