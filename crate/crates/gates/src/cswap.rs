use crate::{Circuit, GateSpec, Op, Result, SqrtCzParams};
use qroutesim_core::{c, DMatrix, Radix, C64};

/// Routing subspace of a (Q1, QC, Q2) CSWAP; labels are Q1 QC Q2.
pub const CSWAP_SUBSPACE: [&str; 6] = ["011", "020", "110", "111", "021", "120"];

/// States on which SP-CSWAP(02)·SP-CSWAP(01) is exactly the identity: the
/// empty-target, read-only transfers of the SP-TCG scheme.
pub const SP_TRANSFER_SUBSPACE: [&str; 7] = ["000", "100", "001", "101", "010", "110", "021"];

/// Which outer partner the first and last √CZ pulse acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum CswapOrder {
    #[default]
    Q1First,
    QcFirst,
}

/// Control basis an SP-CSWAP transfers out of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpBasis {
    /// Out of control |1⟩ Q1 → Q2, out of control |2⟩ Q2 → Q1.
    B01,
    /// Reverse direction; undoes `B01` on the transfer subspace.
    B02,
}

/// Three √CZ pulses on `[q1, c, q2]` in time order.
pub fn cswap_gates(order: CswapOrder, q1: usize, ctl: usize, q2: usize, p: &SqrtCzParams) -> Vec<GateSpec> {
    let (outer, inner) = match order {
        CswapOrder::Q1First => (q1, q2),
        CswapOrder::QcFirst => (q2, q1),
    };
    vec![GateSpec::sqrt_cz(outer, ctl, p), GateSpec::sqrt_cz(inner, ctl, p), GateSpec::sqrt_cz(outer, ctl, p)]
}

/// CSWAP on three qutrits (Q1=0, QC=1, Q2=2).
pub fn cswap_sequence(order: CswapOrder, p: &SqrtCzParams) -> Circuit {
    let mut circ = Circuit::new(&[3, 3, 3]);
    for g in cswap_gates(order, 0, 1, 2, p) {
        circ.push(Op::Gate(g)).expect("qutrit sites");
    }
    circ
}

/// Two √CZ pulses. `B01` sends |110⟩ → −|011⟩ (control |1⟩) and |021⟩ → −|120⟩
/// (control |2⟩); `B02` does the opposite moves.
pub fn sp_cswap_gates(basis: SpBasis, q1: usize, ctl: usize, q2: usize, p: &SqrtCzParams) -> Vec<GateSpec> {
    match basis {
        SpBasis::B01 => vec![GateSpec::sqrt_cz(q1, ctl, p), GateSpec::sqrt_cz(q2, ctl, p)],
        SpBasis::B02 => vec![GateSpec::sqrt_cz(q2, ctl, p), GateSpec::sqrt_cz(q1, ctl, p)],
    }
}

pub fn sp_cswap_sequence(basis: SpBasis, p: &SqrtCzParams) -> Circuit {
    let mut circ = Circuit::new(&[3, 3, 3]);
    for g in sp_cswap_gates(basis, 0, 1, 2, p) {
        circ.push(Op::Gate(g)).expect("qutrit sites");
    }
    circ
}

/// Sub-block ⟨labels|U|labels⟩ in the given order.
pub fn restrict_to(u: &DMatrix<C64>, dims: &[usize], labels: &[&str]) -> Result<DMatrix<C64>> {
    let radix = Radix::new(dims)?;
    let idx = labels.iter().map(|l| radix.parse_label(l)).collect::<qroutesim_core::Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(idx.len(), idx.len(), |i, j| u[(idx[i], idx[j])]))
}

/// −1 × the swap permutation on [`CSWAP_SUBSPACE`].
pub fn ideal_cswap_block() -> DMatrix<C64> {
    // 011↔110, 020 fixed, 111 fixed, 021↔120
    let perm = [2, 1, 0, 3, 5, 4];
    DMatrix::from_fn(6, 6, |i, j| if perm[j] == i { c(-1.0, 0.0) } else { c(0.0, 0.0) })
}

/// CSWAP with under-rotated pulses (η = 0) on [`CSWAP_SUBSPACE`], obtained by
/// composing the three pulses. The subspace splits into the invariant blocks
/// {011, 020, 110} and {111, 021, 120}, so the result is exactly unitary.
pub fn leaky_cswap_matrix(theta: f64) -> DMatrix<C64> {
    let u = cswap_sequence(CswapOrder::Q1First, &SqrtCzParams::with_theta(theta))
        .unitary()
        .expect("pure-gate circuit");
    restrict_to(&u, &[3, 3, 3], &CSWAP_SUBSPACE).expect("valid labels")
}

/// The closed form as it is usually quoted, entry for entry. Kept for
/// comparison only: it is not unitary away from ϑ = π and its second block
/// does not reduce to the ideal swap. Use [`leaky_cswap_matrix`] for physics.
pub fn printed_leaky_cswap_matrix(theta: f64) -> DMatrix<C64> {
    let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let st = theta.sin();
    let k1 = c(ch.powi(3) - sh * sh, 0.0);
    let k2 = c(0.0, -st - ch * st);
    let k3 = c(ch * ch - ch * st * st, 0.0);
    let a = c(ch, 0.0);
    let b = c(0.0, -st / 2.0);
    let d = c(-sh * sh, 0.0);
    let z = c(0.0, 0.0);
    #[rustfmt::skip]
    let rows = [
        a,  b,  d,  z,  z,  z,
        b,  k1, k2, z,  z,  z,
        d,  k2, k3, z,  z,  z,
        z,  z,  z,  k1, k2, b,
        z,  z,  z,  k2, k3, b,
        z,  z,  z,  b,  d,  a,
    ];
    DMatrix::from_row_slice(6, 6, &rows)
}
