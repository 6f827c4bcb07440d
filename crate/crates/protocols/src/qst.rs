use crate::scans::routed;
use crate::{trial_rng, sample_counts, AddressBasis, AddressState, ProtocolError, Result};
use qroutesim_core::{c, kron, DMatrix, DVector, QuditRegister, Radix, C64};
use qroutesim_fitting::FitError;
use qroutesim_gates::{RouterParams, Scheme};
use qroutesim_noise::{DecayRates, NoiseModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QstMethod {
    /// The simulated reduced state itself.
    Exact,
    LinearInversion,
    /// Iterative RρR maximum likelihood.
    Mle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QstResult {
    pub rho: DMatrix<C64>,
    pub fidelity: f64,
    /// Population outside the measured two-level subspaces.
    pub leaked: f64,
    /// Reduced state the estimate is built from.
    pub exact: DMatrix<C64>,
}

const MAX_SITES: usize = 3;
const MLE_MAX_ITER: usize = 20_000;
const MLE_TOL: f64 = 1e-11;
const MLE_LL_TOL: f64 = 1e-9;

/// Pre-rotation for measuring Z, X or Y.
fn basis_rotation(setting: usize) -> DMatrix<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match setting {
        0 => DMatrix::identity(2, 2),
        1 => DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
        // H·S†
        _ => DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(0.0, -h), c(h, 0.0), c(0.0, h)]),
    }
}

fn pauli(k: usize) -> DMatrix<C64> {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match k {
        0 => DMatrix::identity(2, 2),
        1 => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        2 => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        _ => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    }
}

fn digits(mut x: usize, base: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for k in (0..n).rev() {
        d[k] = x % base;
        x /= base;
    }
    d
}

fn kron_all(ms: impl IntoIterator<Item = DMatrix<C64>>) -> DMatrix<C64> {
    ms.into_iter().fold(DMatrix::identity(1, 1), |acc, m| kron(&acc, &m))
}

/// ½‖a − b‖₁ for Hermitian matrices.
pub fn trace_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let d = a - b;
    let d = (&d + d.adjoint()) * c(0.5, 0.0);
    0.5 * d.symmetric_eigen().eigenvalues.iter().map(|e| e.abs()).sum::<f64>()
}

/// Restricts the reduced state on `sites` to the level pairs `levels`.
/// Returns (normalised qubit ρ, leaked population).
fn restrict(state: &QuditRegister, sites: &[usize], levels: &[(usize, usize)]) -> Result<(DMatrix<C64>, f64)> {
    let red = state.partial_trace(sites)?;
    let full = red.density();
    let radix = Radix::new(red.dims())?;
    let n = sites.len();
    let idx: Vec<usize> = (0..1usize << n)
        .map(|k| {
            let d: Vec<usize> = digits(k, 2, n).iter().zip(levels).map(|(&b, &(lo, hi))| if b == 1 { hi } else { lo }).collect();
            radix.index_of(&d)
        })
        .collect();
    let m = idx.len();
    let rho = DMatrix::from_fn(m, m, |i, j| full[(idx[i], idx[j])]);
    let tr = rho.trace().re;
    if tr <= 0.0 {
        return Err(ProtocolError::BadInput("no population in the measured subspace".into()));
    }
    Ok((rho / c(tr, 0.0), 1.0 - tr / full.trace().re))
}

/// Outcome frequencies for every Z/X/Y setting (3^n of them, 2^n outcomes
/// each). `shots = 0` gives exact probabilities.
fn frequencies(rho: &DMatrix<C64>, n: usize, shots: u64, seed: u64) -> (Vec<DMatrix<C64>>, Vec<Vec<f64>>) {
    let mut rotations = vec![];
    let mut freqs = vec![];
    for s in 0..3usize.pow(n as u32) {
        let u = kron_all(digits(s, 3, n).into_iter().map(basis_rotation));
        let r = &u * rho * u.adjoint();
        let probs: Vec<f64> = (0..1usize << n).map(|k| r[(k, k)].re.max(0.0)).collect();
        let f = if shots == 0 {
            probs
        } else {
            let mut rng = trial_rng(seed, s as u64);
            sample_counts(&probs, shots, &mut rng).into_iter().map(|x| x as f64 / shots as f64).collect()
        };
        rotations.push(u);
        freqs.push(f);
    }
    (rotations, freqs)
}

fn linear_inversion(freqs: &[Vec<f64>], n: usize) -> DMatrix<C64> {
    let dim = 1usize << n;
    let mut rho = DMatrix::zeros(dim, dim);
    // Pauli index 1=X 2=Y 3=Z; setting index 0=Z 1=X 2=Y
    let setting_of = |p: usize| [0, 1, 2, 0][p];
    for ps in 0..4usize.pow(n as u32) {
        let pd = digits(ps, 4, n);
        let (mut sum, mut count) = (0.0, 0);
        for (s, f) in freqs.iter().enumerate() {
            let sd = digits(s, 3, n);
            if pd.iter().zip(&sd).any(|(&p, &q)| p != 0 && setting_of(p) != q) {
                continue;
            }
            let e: f64 = f
                .iter()
                .enumerate()
                .map(|(k, &fk)| {
                    let bits = digits(k, 2, n);
                    let odd = pd.iter().zip(&bits).filter(|(&p, &b)| p != 0 && b == 1).count() % 2;
                    if odd == 1 {
                        -fk
                    } else {
                        fk
                    }
                })
                .sum();
            sum += e;
            count += 1;
        }
        let p = kron_all(pd.into_iter().map(pauli));
        rho += p * c(sum / count as f64 / dim as f64, 0.0);
    }
    rho
}

fn mle(rotations: &[DMatrix<C64>], freqs: &[Vec<f64>], n: usize) -> Result<DMatrix<C64>> {
    let dim = 1usize << n;
    let projectors: Vec<Vec<DMatrix<C64>>> = rotations
        .iter()
        .map(|u| {
            (0..dim)
                .map(|k| {
                    let col = u.adjoint().column(k).into_owned();
                    &col * col.adjoint()
                })
                .collect()
        })
        .collect();
    let mut rho = DMatrix::<C64>::identity(dim, dim) / c(dim as f64, 0.0);
    let mut last_ll = f64::NEG_INFINITY;
    for _ in 0..MLE_MAX_ITER {
        let mut r = DMatrix::<C64>::zeros(dim, dim);
        let mut ll = 0.0;
        for (ps, fs) in projectors.iter().zip(freqs) {
            for (pk, &fk) in ps.iter().zip(fs) {
                let p = (pk * &rho).trace().re;
                if fk > 0.0 && p > 1e-300 {
                    r += pk * c(fk / p, 0.0);
                    ll += fk * p.ln();
                }
            }
        }
        let next = &r * &rho * &r;
        let next = &next / c(next.trace().re, 0.0);
        let change = (&next - &rho).norm();
        rho = next;
        // near a rank-deficient optimum the step shrinks only slowly, while
        // the likelihood has long stopped moving
        if change < MLE_TOL || (ll - last_ll).abs() < MLE_LL_TOL {
            return Ok(rho);
        }
        last_ll = ll;
    }
    Err(FitError::NotConverged(MLE_MAX_ITER).into())
}

/// Tomography of `sites` (at most three) on the two-level subspaces
/// `levels`; state populations outside them are discarded, as a
/// three-outcome readout would. `target` lives on the 2^n qubit space.
pub fn qst(
    state: &QuditRegister,
    sites: &[usize],
    levels: &[(usize, usize)],
    target: &DVector<C64>,
    method: QstMethod,
    shots: u64,
    seed: u64,
) -> Result<QstResult> {
    let n = sites.len();
    if n == 0 || n > MAX_SITES || levels.len() != n {
        return Err(ProtocolError::BadInput(format!("tomography takes 1..={MAX_SITES} sites with one level pair each")));
    }
    if target.len() != 1 << n {
        return Err(ProtocolError::BadInput(format!("target has {} amplitudes, want {}", target.len(), 1 << n)));
    }
    let (exact, leaked) = restrict(state, sites, levels)?;
    let rho = match method {
        QstMethod::Exact => exact.clone(),
        QstMethod::LinearInversion => linear_inversion(&frequencies(&exact, n, shots, seed).1, n),
        QstMethod::Mle => {
            let (rot, f) = frequencies(&exact, n, shots, seed);
            mle(&rot, &f, n)?
        }
    };
    let norm = target.norm();
    let t = target / c(norm, 0.0);
    let fidelity = (t.adjoint() * &rho * &t)[(0, 0)].re;
    Ok(QstResult { rho, fidelity, leaked, exact })
}

/// Routes |1⟩ from I under `addr` and reconstructs (C, L, R). The target is
/// the noiseless output.
pub fn qst_router(
    addr: AddressState,
    rates: Option<DecayRates>,
    method: QstMethod,
    shots: u64,
    seed: u64,
    p: &RouterParams,
) -> Result<QstResult> {
    let scheme: Scheme = addr.basis.scheme();
    let circ = routed(scheme, addr, p)?;
    let init = QuditRegister::new_basis_state(circ.dims(), "0000")?;
    let levels = [(0, AddressBasis::upper(addr.basis)), (0, 1), (0, 1)];
    let ideal = NoiseModel::noiseless(4).run(&circ, &init)?.state;
    let (ideal_rho, _) = restrict(&ideal, &[1, 2, 3], &levels)?;
    let j = (0..ideal_rho.nrows()).max_by(|&a, &b| ideal_rho[(a, a)].re.total_cmp(&ideal_rho[(b, b)].re)).unwrap_or(0);
    let target = ideal_rho.column(j) / c(ideal_rho[(j, j)].re.sqrt(), 0.0);
    let model = match rates {
        Some(r) => NoiseModel::uniform(4, r),
        None => NoiseModel::noiseless(4),
    };
    let state = model.run(&circ, &init)?.state;
    qst(&state, &[1, 2, 3], &levels, &target, method, shots, seed)
}
