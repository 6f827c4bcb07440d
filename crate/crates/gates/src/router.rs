use crate::{cswap_gates, Circuit, CswapOrder, GateKind, GateSpec, Op, SqrtCzParams, DEFAULT_SINGLE_NS};
use qroutesim_core::{c, DMatrix, DVector, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Address on {|0⟩, |1⟩}; flips are X01.
    NonEraser,
    /// Address on {|0⟩, |2⟩}; flips exchange |0⟩ ↔ |2⟩ and leave |1⟩ alone.
    Eraser,
}

impl Scheme {
    /// Address level that selects the left branch.
    pub fn left_level(self) -> usize {
        match self {
            Scheme::NonEraser => 1,
            Scheme::Eraser => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RouterSites {
    pub input: usize,
    pub control: usize,
    pub left: usize,
    pub right: usize,
}

impl Default for RouterSites {
    fn default() -> Self {
        RouterSites { input: 0, control: 1, left: 2, right: 3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RouterParams {
    pub sqrt_cz: SqrtCzParams,
    /// φ′, the |2⟩ phase picked up by X01.
    pub phi01: f64,
    /// φ″, the |0⟩ phase picked up by X12.
    pub phi12: f64,
    pub single_ns: f64,
    pub order: CswapOrder,
}

impl Default for RouterParams {
    fn default() -> Self {
        RouterParams {
            sqrt_cz: SqrtCzParams::default(),
            phi01: 0.0,
            phi12: 0.0,
            single_ns: DEFAULT_SINGLE_NS,
            order: CswapOrder::Q1First,
        }
    }
}

/// Address flip on `site`. The eraser flip is X12·X01·X12, i.e. a |0⟩ ↔ |2⟩
/// exchange that fixes |1⟩ (so a relaxed address no longer routes).
pub fn flip_gates(scheme: Scheme, site: usize, p: &RouterParams) -> Vec<GateSpec> {
    let x01 = GateSpec::new(GateKind::X01 { phase: p.phi01 }, &[site], p.single_ns);
    let x12 = GateSpec::new(GateKind::X12 { phase: p.phi12 }, &[site], p.single_ns);
    match scheme {
        Scheme::NonEraser => vec![x01],
        Scheme::Eraser => vec![x12.clone(), x01, x12],
    }
}

/// flip(C), CSWAP(I, C, R), flip(C), CSWAP(I, C, L).
pub fn qrouter_gates(scheme: Scheme, s: RouterSites, p: &RouterParams) -> Vec<GateSpec> {
    let mut out = flip_gates(scheme, s.control, p);
    out.extend(cswap_gates(p.order, s.input, s.control, s.right, &p.sqrt_cz));
    out.extend(flip_gates(scheme, s.control, p));
    out.extend(cswap_gates(p.order, s.input, s.control, s.left, &p.sqrt_cz));
    out
}

/// Router on dims [2, 3, 2, 2] = (Q_I, Q_C, Q_L, Q_R) with default pulses.
pub fn qrouter_circuit(scheme: Scheme, phi01: f64, phi12: f64) -> Circuit {
    qrouter_circuit_with(scheme, &RouterParams { phi01, phi12, ..Default::default() })
}

pub fn qrouter_circuit_with(scheme: Scheme, p: &RouterParams) -> Circuit {
    let mut circ = Circuit::new(&[2, 3, 2, 2]);
    for g in qrouter_gates(scheme, RouterSites::default(), p) {
        circ.push(Op::Gate(g)).expect("router sites are valid");
    }
    circ
}

/// Basis (labels I C L R) on which the router acts as [`printed_router_block`].
pub fn router_subspace(scheme: Scheme) -> [&'static str; 4] {
    match scheme {
        Scheme::NonEraser => ["0001", "1000", "0110", "1100"],
        Scheme::Eraser => ["0001", "1000", "0210", "1200"],
    }
}

/// Pairwise exchange with a −1 on each transfer.
pub fn printed_router_block() -> DMatrix<C64> {
    let (o, m) = (c(0.0, 0.0), c(-1.0, 0.0));
    #[rustfmt::skip]
    let rows = [
        o, m, o, o,
        m, o, o, o,
        o, o, o, m,
        o, o, m, o,
    ];
    DMatrix::from_row_slice(4, 4, &rows)
}

/// cos θ|0⟩ + e^{iφ} sin θ|L⟩ on a qutrit.
pub fn address_state(scheme: Scheme, theta: f64, phi: f64) -> DVector<C64> {
    let mut v = DVector::zeros(3);
    v[0] = c(theta.cos(), 0.0);
    v[scheme.left_level()] = C64::from_polar(theta.sin(), phi);
    v
}
