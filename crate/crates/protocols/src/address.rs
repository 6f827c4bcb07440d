use qroutesim_core::{DVector, C64};
use qroutesim_gates::{address_state, GateKind, Levels, Scheme};
use std::fmt;

/// Level pair carrying the address: {|0⟩, |1⟩} or {|0⟩, |2⟩}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AddressBasis {
    B01,
    B02,
}

impl AddressBasis {
    pub fn for_scheme(s: Scheme) -> Self {
        match s {
            Scheme::NonEraser => AddressBasis::B01,
            Scheme::Eraser => AddressBasis::B02,
        }
    }

    pub fn scheme(self) -> Scheme {
        match self {
            AddressBasis::B01 => Scheme::NonEraser,
            AddressBasis::B02 => Scheme::Eraser,
        }
    }

    pub fn levels(self) -> Levels {
        match self {
            AddressBasis::B01 => Levels::L01,
            AddressBasis::B02 => Levels::L02,
        }
    }

    pub fn upper(self) -> usize {
        self.scheme().left_level()
    }
}

/// cos θ|0⟩ + e^{iφ} sin θ|L⟩.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AddressState {
    pub theta: f64,
    pub phi: f64,
    pub basis: AddressBasis,
}

impl AddressState {
    pub fn new(theta: f64, phi: f64, basis: AddressBasis) -> Self {
        AddressState { theta, phi, basis }
    }

    pub fn vector(&self) -> DVector<C64> {
        address_state(self.basis.scheme(), self.theta, self.phi)
    }

    /// Single pulse preparing the state from |0⟩.
    pub fn prep_gate(&self) -> GateKind {
        GateKind::Rot { levels: self.basis.levels(), theta: self.theta, phi: self.phi }
    }
}

impl fmt::Display for AddressState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "θ={:.4} φ={:.4} ({:?})", self.theta, self.phi, self.basis)
    }
}
