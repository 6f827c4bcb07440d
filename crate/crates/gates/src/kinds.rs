use crate::{GateError, Result};
use qroutesim_core::{c, DMatrix, C64};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

pub const DEFAULT_SQRT_CZ_NS: f64 = 25.0;
/// Single-qutrit pulse length; not pinned down by the hardware description, so configurable.
pub const DEFAULT_SINGLE_NS: f64 = 30.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqrtCzParams {
    /// Rabi angle; π is the full |11⟩ ↔ |02⟩ exchange.
    pub theta: f64,
    /// Controlled phase.
    pub eta: f64,
    pub duration_ns: f64,
}

impl Default for SqrtCzParams {
    fn default() -> Self {
        SqrtCzParams { theta: PI, eta: 0.0, duration_ns: DEFAULT_SQRT_CZ_NS }
    }
}

impl SqrtCzParams {
    pub fn with_theta(theta: f64) -> Self {
        SqrtCzParams { theta, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..2.0 * PI).contains(&self.theta) {
            return Err(GateError::InvalidParam(format!("ϑ = {} outside [0, 2π)", self.theta)));
        }
        if !(self.duration_ns > 0.0) {
            return Err(GateError::InvalidParam(format!("duration {} ns must be positive", self.duration_ns)));
        }
        Ok(())
    }
}

/// 2×2 block on (|11⟩, |02⟩).
pub fn sqrt_cz_block(theta: f64, eta: f64) -> DMatrix<C64> {
    let (cth, sth) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    DMatrix::from_row_slice(
        2,
        2,
        &[C64::from_polar(cth, eta), c(0.0, -sth), c(0.0, -sth), C64::from_polar(cth, -eta)],
    )
}

/// 9×9 unitary on (data, control) qutrits, index = 3·data + control.
pub fn sqrt_cz_matrix(p: &SqrtCzParams) -> DMatrix<C64> {
    let b = sqrt_cz_block(p.theta, p.eta);
    let mut u = DMatrix::identity(9, 9);
    let (i11, i02) = (4, 2);
    u[(i11, i11)] = b[(0, 0)];
    u[(i11, i02)] = b[(0, 1)];
    u[(i02, i11)] = b[(1, 0)];
    u[(i02, i02)] = b[(1, 1)];
    u
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Levels {
    L01,
    L12,
    L02,
}

impl Levels {
    fn pair(self) -> (usize, usize) {
        match self {
            Levels::L01 => (0, 1),
            Levels::L12 => (1, 2),
            Levels::L02 => (0, 2),
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Levels::L01 => "01",
            Levels::L12 => "12",
            Levels::L02 => "02",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingleKind {
    X01,
    X12,
    X01Half,
    ZVirtual,
}

/// Single-qutrit gate with its parasitic phase (φ′ for X01, φ″ for X12, the
/// |2⟩ phase for a virtual Z; ignored by the half-π pulse).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleQutritGate {
    pub kind: SingleKind,
    pub parasitic_phase: f64,
    pub duration_ns: f64,
}

pub fn single_qutrit_matrix(g: &SingleQutritGate) -> DMatrix<C64> {
    let kind = match g.kind {
        SingleKind::X01 => GateKind::X01 { phase: g.parasitic_phase },
        SingleKind::X12 => GateKind::X12 { phase: g.parasitic_phase },
        SingleKind::X01Half => GateKind::half_pi(Levels::L01),
        SingleKind::ZVirtual => GateKind::Phase { p1: 0.0, p2: g.parasitic_phase },
    };
    kind.native_matrix()
}

/// Every gate the circuits in this workspace use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    /// iSWAP_{02↔11}(ϑ, η) on [data, control].
    SqrtCz { theta: f64, eta: f64 },
    /// Adjoint of `SqrtCz`.
    SqrtCzDg { theta: f64, eta: f64 },
    /// |0⟩↔|1⟩ with e^{iφ′} on |2⟩.
    X01 { phase: f64 },
    /// |1⟩↔|2⟩ with e^{iφ″} on |0⟩.
    X12 { phase: f64 },
    /// cos θ|a⟩ + e^{iφ} sin θ|b⟩ from |a⟩ on the level pair (a, b).
    Rot { levels: Levels, theta: f64, phi: f64 },
    /// Virtual frame change diag(1, e^{ip1}, e^{ip2}); zero duration, not counted.
    Phase { p1: f64, p2: f64 },
    H,
    T,
    Tdg,
    X,
    Cx,
    Swap,
    /// X applied when the classical memory bit is set.
    ClassicalX { bit: bool },
}

impl GateKind {
    /// X_{π/2} restricted to a level pair.
    pub fn half_pi(levels: Levels) -> Self {
        GateKind::Rot { levels, theta: FRAC_PI_4, phi: -FRAC_PI_2 }
    }

    pub fn arity(&self) -> usize {
        match self {
            GateKind::SqrtCz { .. } | GateKind::SqrtCzDg { .. } | GateKind::Cx | GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn is_virtual(&self) -> bool {
        matches!(self, GateKind::Phase { .. })
    }

    pub fn name(&self) -> String {
        match self {
            GateKind::SqrtCz { .. } => "SQCZ".into(),
            GateKind::SqrtCzDg { .. } => "SQCZDG".into(),
            GateKind::X01 { .. } => "X01".into(),
            GateKind::X12 { .. } => "X12".into(),
            GateKind::Rot { levels, .. } => format!("R{}", levels.tag()),
            GateKind::Phase { .. } => "Z".into(),
            GateKind::H => "H".into(),
            GateKind::T => "T".into(),
            GateKind::Tdg => "TDG".into(),
            GateKind::X => "X".into(),
            GateKind::Cx => "CX".into(),
            GateKind::Swap => "SWAP".into(),
            GateKind::ClassicalX { .. } => "XC".into(),
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            GateKind::SqrtCz { theta, eta } | GateKind::SqrtCzDg { theta, eta } => vec![theta, eta],
            GateKind::X01 { phase } | GateKind::X12 { phase } => vec![phase],
            GateKind::Rot { theta, phi, .. } => vec![theta, phi],
            GateKind::Phase { p1, p2 } => vec![p1, p2],
            GateKind::ClassicalX { bit } => vec![if bit { 1.0 } else { 0.0 }],
            _ => vec![],
        }
    }

    pub fn from_name(name: &str, params: &[f64]) -> Result<Self> {
        let want = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(GateError::InvalidParam(format!("{name} takes {n} parameters, got {}", params.len())))
            }
        };
        let rot = |levels| -> Result<GateKind> {
            want(2)?;
            Ok(GateKind::Rot { levels, theta: params[0], phi: params[1] })
        };
        Ok(match name {
            "SQCZ" => {
                want(2)?;
                GateKind::SqrtCz { theta: params[0], eta: params[1] }
            }
            "SQCZDG" => {
                want(2)?;
                GateKind::SqrtCzDg { theta: params[0], eta: params[1] }
            }
            "X01" => {
                want(1)?;
                GateKind::X01 { phase: params[0] }
            }
            "X12" => {
                want(1)?;
                GateKind::X12 { phase: params[0] }
            }
            "R01" => rot(Levels::L01)?,
            "R12" => rot(Levels::L12)?,
            "R02" => rot(Levels::L02)?,
            "Z" => {
                want(2)?;
                GateKind::Phase { p1: params[0], p2: params[1] }
            }
            "XC" => {
                want(1)?;
                GateKind::ClassicalX { bit: params[0] != 0.0 }
            }
            other => {
                want(0)?;
                match other {
                    "H" => GateKind::H,
                    "T" => GateKind::T,
                    "TDG" => GateKind::Tdg,
                    "X" => GateKind::X,
                    "CX" => GateKind::Cx,
                    "SWAP" => GateKind::Swap,
                    _ => return Err(GateError::InvalidParam(format!("unknown gate {other:?}"))),
                }
            }
        })
    }

    pub fn inverse(&self) -> Self {
        match *self {
            GateKind::SqrtCz { theta, eta } => GateKind::SqrtCzDg { theta, eta },
            GateKind::SqrtCzDg { theta, eta } => GateKind::SqrtCz { theta, eta },
            GateKind::X01 { phase } => GateKind::X01 { phase: -phase },
            GateKind::X12 { phase } => GateKind::X12 { phase: -phase },
            GateKind::Rot { levels, theta, phi } => GateKind::Rot { levels, theta: -theta, phi },
            GateKind::Phase { p1, p2 } => GateKind::Phase { p1: -p1, p2: -p2 },
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            k => k,
        }
    }

    /// Per-site dimension of the matrix returned by [`native_matrix`](Self::native_matrix).
    fn native_dims(&self) -> Vec<usize> {
        match self {
            GateKind::SqrtCz { .. } | GateKind::SqrtCzDg { .. } => vec![3, 3],
            GateKind::X01 { .. } | GateKind::X12 { .. } | GateKind::Rot { .. } | GateKind::Phase { .. } => vec![3],
            GateKind::Cx | GateKind::Swap => vec![2, 2],
            _ => vec![2],
        }
    }

    pub fn native_matrix(&self) -> DMatrix<C64> {
        let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
        match *self {
            GateKind::SqrtCz { theta, eta } => sqrt_cz_matrix(&SqrtCzParams { theta, eta, duration_ns: 1.0 }),
            GateKind::SqrtCzDg { theta, eta } => {
                sqrt_cz_matrix(&SqrtCzParams { theta, eta, duration_ns: 1.0 }).adjoint()
            }
            GateKind::X01 { phase } => {
                DMatrix::from_row_slice(3, 3, &[o, l, o, l, o, o, o, o, C64::from_polar(1.0, phase)])
            }
            GateKind::X12 { phase } => {
                DMatrix::from_row_slice(3, 3, &[C64::from_polar(1.0, phase), o, o, o, o, l, o, l, o])
            }
            GateKind::Rot { levels, theta, phi } => {
                let (a, b) = levels.pair();
                let mut u = DMatrix::identity(3, 3);
                let (ct, st) = (theta.cos(), theta.sin());
                u[(a, a)] = c(ct, 0.0);
                u[(b, b)] = c(ct, 0.0);
                u[(b, a)] = C64::from_polar(st, phi);
                u[(a, b)] = -C64::from_polar(st, -phi);
                u
            }
            GateKind::Phase { p1, p2 } => {
                DMatrix::from_diagonal(&qroutesim_core::DVector::from_vec(vec![l, C64::from_polar(1.0, p1), C64::from_polar(1.0, p2)]))
            }
            GateKind::H => {
                let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                DMatrix::from_row_slice(2, 2, &[h, h, h, -h])
            }
            GateKind::T => DMatrix::from_row_slice(2, 2, &[l, o, o, C64::from_polar(1.0, FRAC_PI_4)]),
            GateKind::Tdg => DMatrix::from_row_slice(2, 2, &[l, o, o, C64::from_polar(1.0, -FRAC_PI_4)]),
            GateKind::X => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
            GateKind::ClassicalX { bit } => {
                if bit {
                    DMatrix::from_row_slice(2, 2, &[o, l, l, o])
                } else {
                    DMatrix::identity(2, 2)
                }
            }
            GateKind::Cx => {
                let mut u = DMatrix::identity(4, 4);
                u[(2, 2)] = o;
                u[(3, 3)] = o;
                u[(2, 3)] = l;
                u[(3, 2)] = l;
                u
            }
            GateKind::Swap => {
                let mut u = DMatrix::zeros(4, 4);
                u[(0, 0)] = l;
                u[(1, 2)] = l;
                u[(2, 1)] = l;
                u[(3, 3)] = l;
                u
            }
        }
    }

    /// Matrix on sites of the given dimensions. Qutrit gates restricted to a
    /// qubit must not couple the dropped level; qubit gates act as the
    /// identity on any product state that involves a |2⟩.
    pub fn matrix(&self, dims: &[usize]) -> Result<DMatrix<C64>> {
        let native_dims = self.native_dims();
        if dims.len() != native_dims.len() {
            return Err(GateError::Arity { gate: self.name(), want: native_dims.len(), got: dims.len() });
        }
        let native = self.native_matrix();
        if dims == native_dims.as_slice() {
            return Ok(native);
        }
        if let Some(&d) = dims.iter().find(|&&d| d != 2 && d != 3) {
            return Err(GateError::Unsupported { gate: self.name(), dim: d });
        }
        let m: usize = dims.iter().product();
        let digits = |mut i: usize, ds: &[usize]| -> Vec<usize> {
            let mut out = vec![0; ds.len()];
            for k in (0..ds.len()).rev() {
                out[k] = i % ds[k];
                i /= ds[k];
            }
            out
        };
        let native_index = |ds: &[usize]| -> Option<usize> {
            ds.iter().zip(&native_dims).try_fold(0, |acc, (&d, &nd)| if d < nd { Some(acc * nd + d) } else { None })
        };
        // restriction must not drop population
        let nm: usize = native_dims.iter().product();
        for col in 0..nm {
            let cd = digits(col, &native_dims);
            let ckept = cd.iter().zip(dims).all(|(&d, &dim)| d < dim);
            for row in 0..nm {
                let rd = digits(row, &native_dims);
                let rkept = rd.iter().zip(dims).all(|(&d, &dim)| d < dim);
                if ckept != rkept && native[(row, col)].norm() > 0.0 {
                    return Err(GateError::Unsupported { gate: self.name(), dim: *dims.iter().min().unwrap() });
                }
            }
        }
        Ok(DMatrix::from_fn(m, m, |i, j| {
            let (di, dj) = (digits(i, dims), digits(j, dims));
            match (native_index(&di), native_index(&dj)) {
                (Some(a), Some(b)) => native[(a, b)],
                _ => {
                    if i == j {
                        c(1.0, 0.0)
                    } else {
                        c(0.0, 0.0)
                    }
                }
            }
        }))
    }
}

/// A gate placed on concrete sites with a duration.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub sites: Vec<usize>,
    pub duration_ns: f64,
}

impl GateSpec {
    pub fn new(kind: GateKind, sites: &[usize], duration_ns: f64) -> Self {
        GateSpec { kind, sites: sites.to_vec(), duration_ns }
    }

    pub fn sqrt_cz(data: usize, control: usize, p: &SqrtCzParams) -> Self {
        Self::new(GateKind::SqrtCz { theta: p.theta, eta: p.eta }, &[data, control], p.duration_ns)
    }

    pub fn inverse(&self) -> Self {
        GateSpec { kind: self.kind.inverse(), sites: self.sites.clone(), duration_ns: self.duration_ns }
    }

    pub fn matrix(&self, circuit_dims: &[usize]) -> Result<DMatrix<C64>> {
        let dims: Vec<usize> = self.sites.iter().map(|&s| circuit_dims[s]).collect();
        self.kind.matrix(&dims)
    }
}
