use crate::{sample_counts, trial_rng, AddressBasis, AddressState, ProtocolError, Result};
use qroutesim_core::{QuditRegister, SupportState};
use qroutesim_fitting::{least_squares, LsqOptions};
use qroutesim_gates::{qrouter_gates, Circuit, GateKind, GateSpec, Op, RouterParams, RouterSites, Scheme, SqrtCzParams};
use qroutesim_noise::{DecayRates, NoiseModel};
use qroutesim_routing::{build_tree, TWO_LAYER_DIMS};
use rand::Rng;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

const SINGLE_DIMS: [usize; 4] = [2, 3, 2, 2];
/// I, L, R.
const SINGLE_READ: [usize; 3] = [0, 2, 3];
/// I, D1..D4.
const TWO_LAYER_READ: [usize; 5] = [0, 6, 7, 8, 9];

#[derive(Clone, Debug, PartialEq)]
pub struct RatConfig {
    pub n_max: usize,
    pub scheme: Scheme,
    /// `None` runs noiseless.
    pub rates: Option<DecayRates>,
    /// Under-rotation of every √CZ pulse (ϑ = π − δϑ) in the noisy run.
    pub delta_theta: f64,
    pub trials: usize,
    /// 0 = exact expectation values.
    pub shots: u64,
    pub seed: u64,
    pub router: RouterParams,
    /// Discard runs with a control in |1⟩ (only meaningful for the eraser).
    pub postselect: bool,
}

impl RatConfig {
    pub fn new(scheme: Scheme) -> Self {
        RatConfig {
            n_max: 10,
            scheme,
            rates: Some(DecayRates::default()),
            delta_theta: 0.0,
            trials: 30,
            shots: 0,
            seed: 1,
            router: RouterParams::default(),
            postselect: scheme == Scheme::Eraser,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(ProtocolError::BadInput("need at least one trial".into()));
        }
        if !(0.0..PI).contains(&self.delta_theta) {
            return Err(ProtocolError::BadInput(format!("δϑ = {} outside [0, π)", self.delta_theta)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatFit {
    pub l1: f64,
    pub l2: f64,
    pub f: f64,
    pub rms: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatResult {
    pub scheme: Scheme,
    pub depths: Vec<usize>,
    /// Trial mean of M_RAT per depth.
    pub m_values: Vec<f64>,
    /// Standard error of the mean per depth.
    pub m_sem: Vec<f64>,
    /// Mean post-selection acceptance per depth.
    pub kept: Vec<f64>,
    pub fit: Option<RatFit>,
    pub seed: u64,
    pub trials: usize,
}

/// {0, L, +, −} in the scheme's address pair.
pub fn rat_addresses(scheme: Scheme) -> [AddressState; 4] {
    let b = AddressBasis::for_scheme(scheme);
    [
        AddressState::new(0.0, 0.0, b),
        AddressState::new(FRAC_PI_2, 0.0, b),
        AddressState::new(FRAC_PI_4, 0.0, b),
        AddressState::new(FRAC_PI_4, PI, b),
    ]
}

/// Under-rotation δϑ that leaves a fraction `p` of the population behind in
/// one √CZ exchange: cos²((π − δϑ)/2) = p.
pub fn delta_theta_for_leakage(p: f64) -> f64 {
    2.0 * p.clamp(0.0, 1.0).sqrt().asin()
}

/// 1 − Σ_t |P⁰_t − P^e_t|, floored at 0.
pub fn m_rat(ideal: &[f64], measured: &[f64]) -> f64 {
    (1.0 - ideal.iter().zip(measured).map(|(a, b)| (a - b).abs()).sum::<f64>()).max(0.0)
}

fn push_router(c: &mut Circuit, scheme: Scheme, s: RouterSites, p: &RouterParams) -> Result<()> {
    for g in qrouter_gates(scheme, s, p) {
        c.push(Op::Gate(g))?;
    }
    Ok(())
}

fn prep(c: &mut Circuit, a: &AddressState, site: usize, p: &RouterParams, undo: bool) -> Result<()> {
    let g = GateSpec::new(a.prep_gate(), &[site], p.single_ns);
    c.push(Op::Gate(if undo { g.inverse() } else { g }))?;
    Ok(())
}

/// Which network a random access test runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Net {
    Single,
    TwoLayer,
}

impl Net {
    fn dims(self) -> &'static [usize] {
        match self {
            Net::Single => &SINGLE_DIMS,
            Net::TwoLayer => &TWO_LAYER_DIMS,
        }
    }

    fn read(self) -> &'static [usize] {
        match self {
            Net::Single => &SINGLE_READ,
            Net::TwoLayer => &TWO_LAYER_READ,
        }
    }

    fn width(self) -> usize {
        match self {
            Net::Single => 1,
            Net::TwoLayer => 3,
        }
    }

    /// (router sites, address site) per router in "down" order.
    fn routers(self) -> Result<Vec<RouterSites>> {
        match self {
            Net::Single => Ok(vec![RouterSites::default()]),
            Net::TwoLayer => {
                let tree = build_tree(2)?;
                Ok((1..=3)
                    .map(|n| {
                        let b = tree.node(n);
                        RouterSites { input: b.input, control: b.control, left: b.left, right: b.right }
                    })
                    .collect())
            }
        }
    }

    fn controls(self) -> Result<Vec<usize>> {
        Ok(self.routers()?.iter().map(|s| s.control).collect())
    }

    fn start(self, p: &RouterParams) -> Result<Circuit> {
        let mut c = Circuit::new(self.dims());
        c.gate(GateKind::X, &[0], p.single_ns)?;
        Ok(c)
    }

    fn load(self, c: &mut Circuit, scheme: Scheme, a: &[usize], p: &RouterParams, undo: bool) -> Result<()> {
        let addrs = rat_addresses(scheme);
        for (ctl, &k) in self.controls()?.into_iter().zip(a) {
            prep(c, &addrs[k], ctl, p, undo)?;
        }
        Ok(())
    }

    /// load · down · up · unload; up replays the routers deepest layer first.
    fn block(self, scheme: Scheme, a: &[usize], p: &RouterParams) -> Result<Circuit> {
        let mut c = Circuit::new(self.dims());
        let r = self.routers()?;
        self.load(&mut c, scheme, a, p, false)?;
        let order: &[usize] = match self {
            Net::Single => &[0, 0],
            Net::TwoLayer => &[0, 1, 2, 1, 2, 0],
        };
        for &k in order {
            push_router(&mut c, scheme, r[k], p)?;
        }
        self.load(&mut c, scheme, a, p, true)?;
        Ok(c)
    }

    /// load · down, then the erasure check.
    fn finish(self, scheme: Scheme, a: &[usize], p: &RouterParams, postselect: bool) -> Result<Circuit> {
        let mut c = Circuit::new(self.dims());
        self.load(&mut c, scheme, a, p, false)?;
        for r in self.routers()? {
            push_router(&mut c, scheme, r, p)?;
        }
        if postselect {
            for ctl in self.controls()? {
                c.postselect(ctl, 1)?;
            }
        }
        Ok(c)
    }

    fn circuit(self, scheme: Scheme, pairs: &[Vec<usize>], last: &[usize], p: &RouterParams, postselect: bool) -> Result<Circuit> {
        let id: Vec<usize> = (0..self.dims().len()).collect();
        let mut c = self.start(p)?;
        for a in pairs {
            c.barrier();
            c.append(&self.block(scheme, a, p)?, &id)?;
        }
        c.barrier();
        c.append(&self.finish(scheme, last, p, postselect)?, &id)?;
        Ok(c)
    }
}

/// X on I; blocks of prep(a)·router·router·unprep(a) for `pairs`, then
/// prep(last)·router, with barriers between blocks. Indices point into
/// [`rat_addresses`].
pub fn rat_single_circuit(scheme: Scheme, pairs: &[usize], last: usize, p: &RouterParams, postselect: bool) -> Result<Circuit> {
    let pairs: Vec<Vec<usize>> = pairs.iter().map(|&a| vec![a]).collect();
    Net::Single.circuit(scheme, &pairs, &[last], p, postselect)
}

/// Two-layer version: each block loads three addresses (C1, C2, C3), routes
/// down through both layers and back up, and unloads; the final block routes
/// down once.
pub fn rat_two_layer_circuit(scheme: Scheme, pairs: &[[usize; 3]], last: [usize; 3], p: &RouterParams, postselect: bool) -> Result<Circuit> {
    let pairs: Vec<Vec<usize>> = pairs.iter().map(|a| a.to_vec()).collect();
    Net::TwoLayer.circuit(scheme, &pairs, &last, p, postselect)
}

/// Dense register for the single router, sparse support for the network.
#[derive(Clone)]
enum State {
    Dense(QuditRegister),
    Sparse(SupportState),
}

impl State {
    fn new(net: Net) -> Result<Self> {
        let init = QuditRegister::new_basis_state(net.dims(), &"0".repeat(net.dims().len()))?;
        Ok(match net {
            Net::Single => State::Dense(init.to_mixed()),
            Net::TwoLayer => State::Sparse(SupportState::from_register(&init)),
        })
    }

    fn run(&mut self, c: &Circuit, m: &NoiseModel) -> Result<f64> {
        match self {
            State::Dense(r) => {
                let out = m.run(c, r)?;
                *r = out.state;
                Ok(out.kept)
            }
            State::Sparse(s) => Ok(m.run_support(c, s)?),
        }
    }

    /// Normalised populations of `read`.
    fn read(&self, read: &[usize]) -> Vec<f64> {
        let (pops, tr) = match self {
            State::Dense(r) => (r.marginal(read), r.trace()),
            State::Sparse(s) => (s.marginal(read), s.trace()),
        };
        pops.into_iter().map(|x| x / tr).collect()
    }
}

fn noisy_params(cfg: &RatConfig) -> RouterParams {
    let mut p = cfg.router;
    p.sqrt_cz.theta = PI - cfg.delta_theta;
    p
}

fn model(n: usize, rates: Option<DecayRates>) -> NoiseModel {
    match rates {
        Some(r) => NoiseModel::uniform(n, r),
        None => NoiseModel::noiseless(n),
    }
}

fn measured<R: Rng>(probs: Vec<f64>, shots: u64, rng: &mut R) -> Vec<f64> {
    if shots == 0 {
        return probs;
    }
    sample_counts(&probs, shots, rng).into_iter().map(|k| k as f64 / shots as f64).collect()
}

/// Ideal and noisy populations after depth n for every n ≤ n_max, carrying
/// the state forward block by block.
fn depth_sweep(
    net: Net,
    scheme: Scheme,
    seq: &[Vec<usize>],
    p: &RouterParams,
    m: &NoiseModel,
    postselect: bool,
) -> Result<Vec<(Vec<f64>, f64)>> {
    let mut state = State::new(net)?;
    state.run(&net.start(p)?, m)?;
    let mut out = Vec::with_capacity(seq.len());
    for (n, a) in seq.iter().enumerate() {
        let mut last = state.clone();
        let kept = last.run(&net.finish(scheme, a, p, postselect)?, m)?;
        out.push((last.read(net.read()), kept));
        if n + 1 < seq.len() {
            state.run(&net.block(scheme, a, p)?, m)?;
        }
    }
    Ok(out)
}

fn run_trials(cfg: &RatConfig, net: Net) -> Result<RatResult> {
    cfg.validate()?;
    let ideal_p = RouterParams { sqrt_cz: SqrtCzParams { theta: PI, ..cfg.router.sqrt_cz }, ..cfg.router };
    let noisy_p = noisy_params(cfg);
    let n_sites = net.dims().len();
    let noiseless = model(n_sites, None);
    let noisy = model(n_sites, cfg.rates);
    let per_trial: Vec<Vec<(f64, f64)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<(f64, f64)>> {
            let mut rng = trial_rng(cfg.seed, t as u64);
            let seq: Vec<Vec<usize>> =
                (0..=cfg.n_max).map(|_| (0..net.width()).map(|_| rng.random_range(0..4)).collect()).collect();
            let ideal = depth_sweep(net, cfg.scheme, &seq, &ideal_p, &noiseless, false)?;
            let noisy = depth_sweep(net, cfg.scheme, &seq, &noisy_p, &noisy, cfg.postselect)?;
            Ok(ideal
                .into_iter()
                .zip(noisy)
                .map(|((p0, _), (pe, kept))| (m_rat(&p0, &measured(pe, cfg.shots, &mut rng)), kept))
                .collect())
        })
        .collect::<Result<_>>()?;
    let depths: Vec<usize> = (0..=cfg.n_max).collect();
    let nt = cfg.trials as f64;
    let mut m_values = vec![];
    let mut m_sem = vec![];
    let mut kept = vec![];
    for n in 0..=cfg.n_max {
        let xs: Vec<f64> = per_trial.iter().map(|v| v[n].0).collect();
        let mean = xs.iter().sum::<f64>() / nt;
        let var = if cfg.trials > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nt - 1.0) } else { 0.0 };
        m_values.push(mean);
        m_sem.push((var / nt).sqrt());
        kept.push(per_trial.iter().map(|v| v[n].1).sum::<f64>() / nt);
    }
    let fit = if depths.len() >= 3 { fit_rat(&depths, &m_values).ok() } else { None };
    Ok(RatResult { scheme: cfg.scheme, depths, m_values, m_sem, kept, fit, seed: cfg.seed, trials: cfg.trials })
}

/// Random access test on one router: depth N has N round-trip blocks and a
/// final one-way block, read out on (I, L, R). Addresses are redrawn per
/// trial; depth N uses the first N + 1 of them.
pub fn rat_single(cfg: &RatConfig) -> Result<RatResult> {
    run_trials(cfg, Net::Single)
}

/// Random access test on the two-layer network (three addresses per block),
/// read out on I and D1..D4.
pub fn rat_two_layer(cfg: &RatConfig) -> Result<RatResult> {
    run_trials(cfg, Net::TwoLayer)
}

/// Least-squares fit of M(N) = l1 + l2·F^(2N+1) with F, l1 ∈ [0, 1].
pub fn fit_rat(depths: &[usize], m_values: &[f64]) -> Result<RatFit> {
    if depths.len() != m_values.len() || depths.len() < 3 {
        return Err(ProtocolError::BadInput("fit needs at least 3 (depth, M) pairs".into()));
    }
    let data: Vec<(f64, f64)> = depths.iter().zip(m_values).map(|(&n, &m)| (n as f64, m)).collect();
    let first = data.iter().min_by(|a, b| a.0.total_cmp(&b.0)).expect("non-empty").1;
    let last = data.iter().max_by(|a, b| a.0.total_cmp(&b.0)).expect("non-empty").1;
    let model = |q: &[f64], n: f64| q[0] + q[1] * q[2].powf(2.0 * n + 1.0);
    let init = [last.clamp(0.0, 1.0), first - last, 0.9];
    let bounds = [(0.0, 1.0), (-2.0, 2.0), (0.0, 1.0)];
    let r = least_squares(model, &data, &bounds, &init, &LsqOptions::default())?;
    Ok(RatFit { l1: r.params[0], l2: r.params[1], f: r.params[2], rms: r.residual_rms, converged: r.converged })
}
