//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

use clap::Parser;
use qroutesim_core::{c, max_abs_diff, DMatrix};
use qroutesim_fitting::{find_root, ode_integrate_linear, OdeOptions};
use qroutesim_gates::{cswap_sequence, restrict_to, CswapOrder, FloquetParams, RouterParams, Scheme, SqrtCzParams, CSWAP_SUBSPACE};
use qroutesim_layout::{best_layout, check_layout, GridSpec};
use qroutesim_noise::{amplitude_a110, amplitude_a120, amplitude_a120_limit, balance_point, qutrit_channel, DecayRates};
use qroutesim_protocols::{
    delta_theta_for_leakage, fit_phi_offset, floquet_cost, floquet_populations, leakage_revival, nelder_mead, phi_scan,
    qst_router, rat_single, theta_scan, trace_distance, AddressBasis, AddressState, NmOptions, QstMethod, RatConfig,
    RatResult, EVEN_STATES, ODD_STATES,
};
use qroutesim_validation::{Outcome, Report};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::Duration;

const SCHEMES: [Scheme; 2] = [Scheme::NonEraser, Scheme::Eraser];

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn counts() -> Outcome {
    let mut ok = true;
    let mut got = Vec::new();
    for (scheme, want) in [("clifford", "20 16 30"), ("tcg-non-eraser", "2 6 8"), ("tcg-eraser", "6 6 12")] {
        let cli = qroutesim_cli::Cli::parse_from(["qroutesim", "counts", "--scheme", scheme]);
        let out = qroutesim_cli::run(cli).map(|s| s.trim().to_string()).unwrap_or_else(|e| e.to_string());
        ok &= out == want;
        got.push(format!("{scheme} ({out})"));
    }
    Outcome::new(ok, got.join(", "))
}

fn cswap_algebra() -> Outcome {
    // −1 × the swap of the two outer sites, built from the labels alone
    let ideal = DMatrix::from_fn(6, 6, |i, j| {
        let l = CSWAP_SUBSPACE[j].as_bytes();
        let swapped = [l[2], l[1], l[0]];
        if CSWAP_SUBSPACE[i].as_bytes() == swapped {
            c(-1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let mut worst: f64 = 0.0;
    for order in [CswapOrder::Q1First, CswapOrder::QcFirst] {
        let circ = cswap_sequence(order, &SqrtCzParams::default());
        let block = restrict_to(&circ.unitary().unwrap(), &[3, 3, 3], &CSWAP_SUBSPACE).unwrap();
        worst = worst.max(max_abs_diff(&block, &ideal));
        if circ.gate_counts() != (0, 3) {
            return Outcome::new(false, format!("{order:?} uses {:?} gates", circ.gate_counts()));
        }
    }
    Outcome::new(worst < 1e-10, format!("max deviation {worst:.2e} over both orders (tol 1e-10)"))
}

fn routing_law() -> Outcome {
    let p = RouterParams::default();
    let (mut dl, mut pi, mut dodd, mut dstate): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for s in SCHEMES {
        for pt in theta_scan(&grid(101, 0.0, PI), s, None, &p).unwrap() {
            dl = dl.max((pt.p_l - pt.theta.sin().powi(2)).abs());
            pi = pi.max(pt.p_i);
        }
        let pts = phi_scan(&grid(41, 0.0, 2.0 * PI), s, None, &p).unwrap();
        let (phi0, _, _) = fit_phi_offset(&pts).unwrap();
        for pt in &pts {
            let sn = (pt.phi + phi0).sin();
            dodd = dodd.max((pt.p_odd - (1.0 - sn) / 2.0).abs());
            for (set, sign) in [(ODD_STATES, -1.0), (EVEN_STATES, 1.0)] {
                for b in set {
                    let k = 4 * usize::from(b[0]) + 2 * usize::from(b[1]) + usize::from(b[2]);
                    dstate = dstate.max((pt.states[k] - (1.0 + sign * sn) / 8.0).abs());
                }
            }
        }
    }
    let ok = dl < 1e-9 && pi < 1e-9 && dodd < 1e-9 && dstate < 1e-9;
    Outcome::new(
        ok,
        format!("|P_L − sin²θ| {dl:.1e}, P_I {pi:.1e}, |P_O − fit| {dodd:.1e}, per-state {dstate:.1e} (tol 1e-9)"),
    )
}

/// Rate-equation generator over 120, 020, 110, 010, 100, 000 (data, address, data).
fn eraser_cascade(r: &DecayRates) -> DMatrix<f64> {
    let (a, b) = (r.g10, r.g21);
    #[rustfmt::skip]
    let m = [
        -(a + b), 0.0, 0.0,      0.0, 0.0, 0.0,
        a,        -b,  0.0,      0.0, 0.0, 0.0,
        b,        0.0, -2.0 * a, 0.0, 0.0, 0.0,
        0.0,      b,   a,        -a,  0.0, 0.0,
        0.0,      0.0, a,        0.0, -a,  0.0,
        0.0,      0.0, 0.0,      a,   a,   0.0,
    ];
    DMatrix::from_row_slice(6, 6, &m)
}

/// Two relaxing qubits over 11, 10, 01, 00.
fn pair_cascade(r: &DecayRates) -> DMatrix<f64> {
    let a = r.g10;
    #[rustfmt::skip]
    let m = [
        -2.0 * a, 0.0, 0.0, 0.0,
        a,        -a,  0.0, 0.0,
        a,        0.0, -a,  0.0,
        0.0,      a,   a,   0.0,
    ];
    DMatrix::from_row_slice(4, 4, &m)
}

fn noise_closed_forms() -> Outcome {
    let r = DecayRates::default();
    let opts = OdeOptions::default();
    let mut worst: f64 = 0.0;
    for t in grid(41, 0.0, 20.0) {
        let y = ode_integrate_linear(&eraser_cascade(&r), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], t, &opts).unwrap();
        let post = y[0] / (y[0] + y[1] + y[4] + y[5]);
        let (raw, ps) = amplitude_a120(&r, t).unwrap();
        let (raw_l, ps_l) = amplitude_a120_limit(&r, t).unwrap();
        let q = ode_integrate_linear(&pair_cascade(&r), &[1.0, 0.0, 0.0, 0.0], t, &opts).unwrap();
        let a110 = amplitude_a110(&r, t).unwrap();
        for d in [raw - y[0], ps - post, raw_l - y[0], ps_l - post, a110 - q[0]] {
            worst = worst.max(d.abs());
        }
    }
    let bp = balance_point(&r).unwrap_or(f64::NAN);
    let diff = |t: f64| amplitude_a120(&r, t).unwrap().1 - amplitude_a110(&r, t).unwrap();
    let crossing = find_root(diff, (1.0, 100.0), 1e-12).unwrap_or(f64::NAN);
    let closed = 15.0 * 5f64.ln();
    let ok = worst < 1e-8 && (bp - crossing).abs() < 1e-6 && (bp - closed).abs() < 1e-6;
    Outcome::new(
        ok,
        format!(
            "max |closed − ODE| {worst:.1e} (tol 1e-8); BP {bp:.9} μs, crossing {crossing:.9}, 15·ln5 = {closed:.9} (tol 1e-6)"
        ),
    )
}

fn channel_validity() -> Outcome {
    let r = DecayRates::default();
    let times = [0.0, 0.025, 0.3, 1.0, 7.5];
    let (mut min_ev, mut worst): (f64, f64) = (f64::INFINITY, 0.0);
    for &t1 in &times {
        let a = qutrit_channel(&r, t1).unwrap();
        min_ev = min_ev.min(a.choi_eigenvalues().into_iter().fold(f64::INFINITY, f64::min));
        for &t2 in &times {
            let b = qutrit_channel(&r, t2).unwrap();
            let direct = qutrit_channel(&r, t1 + t2).unwrap();
            min_ev = min_ev.min(direct.choi_eigenvalues().into_iter().fold(f64::INFINITY, f64::min));
            worst = worst.max(max_abs_diff(a.then(&b).unwrap().transfer(), direct.transfer()));
        }
    }
    Outcome::new(
        min_ev >= -1e-9 && worst < 1e-9,
        format!("min Choi eigenvalue {min_ev:.2e} (≥ −1e-9), semigroup defect {worst:.1e} (tol 1e-9)"),
    )
}

fn rat_run(scheme: Scheme, leakage: f64) -> RatResult {
    let cfg = RatConfig {
        n_max: 30,
        trials: 100,
        shots: 0,
        seed: 1,
        rates: Some(DecayRates::default()),
        delta_theta: delta_theta_for_leakage(leakage),
        ..RatConfig::new(scheme)
    };
    rat_single(&cfg).unwrap()
}

struct RatRuns {
    /// (leakage, non-eraser, eraser)
    runs: Vec<(f64, RatResult, RatResult)>,
}

fn rat_runs() -> RatRuns {
    RatRuns { runs: [0.0, 0.05].into_iter().map(|l| (l, rat_run(Scheme::NonEraser, l), rat_run(Scheme::Eraser, l))).collect() }
}

fn rat_regression(runs: &RatRuns) -> Outcome {
    // (leakage, target non-eraser, target eraser, tolerance) in percent
    let targets = [(0.0, 93.42, 94.81, 1.0), (0.05, 86.18, 93.07, 1.5)];
    let mut ok = true;
    let mut parts = Vec::new();
    for ((leak, ne, er), (_, tne, ter, tol)) in runs.runs.iter().zip(targets) {
        for (name, r, target) in [("non-eraser", ne, tne), ("eraser", er, ter)] {
            let f = r.fit.map_or(f64::NAN, |f| 100.0 * f.f);
            let pass = (f - target).abs() <= tol;
            ok &= pass;
            parts.push(format!("{name} ε={leak}: {f:.2}% vs {target}±{tol}{}", if pass { "" } else { " ✗" }));
        }
    }
    Outcome::new(ok, parts.join("; "))
}

fn eraser_dominance(runs: &RatRuns) -> Outcome {
    let mut worst = f64::INFINITY;
    let mut at = (0.0, 0);
    for (leak, ne, er) in &runs.runs {
        for (i, (&m_ne, &m_er)) in ne.m_values.iter().zip(&er.m_values).enumerate() {
            if m_er - m_ne < worst {
                worst = m_er - m_ne;
                at = (*leak, ne.depths[i]);
            }
        }
    }
    Outcome::new(
        worst >= 0.0,
        format!("min over depths/settings of M_eraser − M_non-eraser = {worst:.4} (at ε={}, N={})", at.0, at.1),
    )
}

fn leakage_interference() -> Outcome {
    let theta = 0.99 * PI;
    let mut ok = true;
    let mut parts = Vec::new();
    for s in SCHEMES {
        let zero = leakage_revival(s, theta, 0.0, 20).unwrap();
        let quarter = leakage_revival(s, theta, FRAC_PI_2, 20).unwrap();
        let bad = zero.iter().zip(&quarter).filter(|(z, q)| **q > **z + 1e-12).count();
        ok &= bad == 0;
        parts.push(format!("{s:?}: rep 20 P(φ=π/2) {:.4} vs P(0) {:.4}, {bad} violations", quarter[19], zero[19]));
    }
    Outcome::new(ok, parts.join("; "))
}

fn floquet() -> Outcome {
    let phases = grid(5, -PI, PI);
    let mut worst: f64 = 0.0;
    for &eta in &phases {
        for &zeta in &phases {
            for n in 0..=20 {
                let (p11, p02) = floquet_populations(PI, eta, zeta, n);
                let d = if n % 2 == 1 { 1.0 - p02 } else { 1.0 - p11 };
                worst = worst.max(d.abs());
            }
        }
    }
    let ns = qroutesim_gates::DEFAULT_SQRT_CZ_NS;
    let cost = floquet_cost(&FloquetParams::new(PI, 0.0, 0.0), 10, None, ns).unwrap().value;
    let opts = NmOptions { step: 0.02 * PI, max_iter: 500, tol: 1e-7 };
    let r = nelder_mead(|x| 1.0 - floquet_cost(&FloquetParams::new(x[0], 0.0, 0.0), 10, None, ns).unwrap().value, &[0.95 * PI], &opts)
        .unwrap();
    let theta = r.x[0].rem_euclid(2.0 * PI);
    let ok = worst < 1e-10 && (cost - 1.0).abs() < 1e-10 && (theta - PI).abs() < 1e-3;
    Outcome::new(
        ok,
        format!("identity defect {worst:.1e} (tol 1e-10), C = {cost:.12}, calibrated ϑ − π = {:.1e} (tol 1e-3)", theta - PI),
    )
}

fn layout() -> Outcome {
    let g = GridSpec::new(12, 6);
    let mut ok = true;
    let mut parts = Vec::new();
    for layers in 1..=6 {
        let want_fit = layers <= 5;
        match best_layout(&g, layers).unwrap() {
            Ok(b) => {
                let valid = check_layout(&g, &b.layout).is_valid();
                ok &= valid && want_fit;
                parts.push(format!("{layers}: fits ({} qubits{})", b.layout.qubits().len(), if valid { "" } else { ", INVALID" }));
            }
            Err(f) => {
                ok &= !want_fit;
                let mark = if want_fit { " ✗" } else { "" };
                parts.push(format!("{layers}: no fit (needs {}, has {}){mark}", f.qubits_needed, f.qubits_available));
            }
        }
    }
    Outcome::new(ok, parts.join(", "))
}

fn qst() -> Outcome {
    let p = RouterParams::default();
    let (mut fid_dev, mut td_max): (f64, f64) = (0.0, 0.0);
    for s in SCHEMES {
        let addr = AddressState::new(FRAC_PI_4, 0.3, AddressBasis::for_scheme(s));
        let exact = qst_router(addr, None, QstMethod::Exact, 0, 1, &p).unwrap();
        fid_dev = fid_dev.max((exact.fidelity - 1.0).abs());
        let li = qst_router(addr, None, QstMethod::LinearInversion, 1_000_000, 7, &p).unwrap();
        td_max = td_max.max(trace_distance(&li.rho, &exact.rho));
    }
    Outcome::new(
        fid_dev < 1e-9 && td_max < 5e-3,
        format!("|F_exact − 1| {fid_dev:.1e} (tol 1e-9), linear-inversion trace distance {td_max:.2e} at 1e6 shots (tol 5e-3)"),
    )
}

fn main() {
    // keep panic messages out of the result lines
    std::panic::set_hook(Box::new(|_| {}));
    let mut rep = Report::default();
    rep.check(1, "gate accounting", secs(1), counts);
    rep.check(2, "CSWAP algebra", secs(1), cswap_algebra);
    rep.check(3, "routing law", secs(10), routing_law);
    rep.check(4, "noise closed forms", secs(5), noise_closed_forms);
    rep.check(5, "channel validity", secs(5), channel_validity);
    let start = std::time::Instant::now();
    let runs = rat_runs();
    let rat_time = start.elapsed();
    rep.check(6, "RAT regression", secs(600).saturating_sub(rat_time), || rat_regression(&runs));
    rep.check(7, "eraser dominance", secs(600).saturating_sub(rat_time), || eraser_dominance(&runs));
    println!("     (RAT simulations for 6 and 7 took {rat_time:.2?})");
    rep.check(8, "leakage interference", secs(60), leakage_interference);
    rep.check(9, "Floquet identity", secs(30), floquet);
    rep.check(10, "layout", secs(300), layout);
    rep.check(11, "QST", secs(60), qst);
    println!("acceptance: {} of {} criteria passed", rep.total() - rep.failed(), rep.total());
    if rep.failed() > 0 {
        std::process::exit(1);
    }
}
