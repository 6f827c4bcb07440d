use proptest::prelude::*;
use qroutesim_core::{c, DVector, QuditRegister, C64};
use qroutesim_gates::{qrouter_gates, Circuit, FloquetParams, GateKind, Op, RouterParams, RouterSites, Scheme};
use qroutesim_noise::{DecayRates, NoiseModel};
use qroutesim_protocols::*;
use rand_distr::{Distribution, Normal};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

const SCHEMES: [Scheme; 2] = [Scheme::NonEraser, Scheme::Eraser];

fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

#[test]
fn theta_scan_basis_addresses() {
    let p = RouterParams::default();
    for s in SCHEMES {
        let pts = theta_scan(&[0.0, FRAC_PI_2, FRAC_PI_3], s, None, &p).unwrap();
        assert!((pts[0].p_r - 1.0).abs() < 1e-12 && pts[0].p_l.abs() < 1e-12);
        assert!((pts[1].p_l - 1.0).abs() < 1e-12 && pts[1].p_r.abs() < 1e-12);
        assert!((pts[2].p_l - 0.75).abs() < 1e-12);
    }
}

#[test]
fn theta_scan_follows_sin_squared() {
    let p = RouterParams::default();
    for s in SCHEMES {
        let pts = theta_scan(&grid(101, 0.0, PI), s, None, &p).unwrap();
        for pt in &pts {
            assert!((pt.p_l - pt.theta.sin().powi(2)).abs() < 1e-9);
            assert!((pt.p_r - pt.theta.cos().powi(2)).abs() < 1e-9);
            assert!(pt.p_i < 1e-9);
        }
    }
}

#[test]
fn noisy_theta_scan_leaves_residue_on_input() {
    let pts = theta_scan(&[FRAC_PI_4], Scheme::NonEraser, Some(DecayRates::default()), &RouterParams::default()).unwrap();
    let pt = pts[0];
    assert!(pt.p_l + pt.p_r < 1.0);
    assert!((0.0..1.0).contains(&pt.p_i));
}

#[test]
fn phi_scan_parity_oscillation() {
    let p = RouterParams::default();
    for s in SCHEMES {
        let pts = phi_scan(&grid(41, 0.0, 2.0 * PI), s, None, &p).unwrap();
        for pt in &pts {
            assert!((pt.p_odd + pt.p_even - 1.0).abs() < 1e-12);
        }
        let (phi0, rms, contrast) = fit_phi_offset(&pts).unwrap();
        assert!(rms < 1e-9, "{s:?}: rms {rms}");
        assert!((contrast - 1.0).abs() < 1e-9);
        for pt in &pts {
            let sn = (pt.phi + phi0).sin();
            assert!((pt.p_odd - (1.0 - sn) / 2.0).abs() < 1e-9);
            for b in ODD_STATES {
                let k = 4 * usize::from(b[0]) + 2 * usize::from(b[1]) + usize::from(b[2]);
                assert!((pt.states[k] - (1.0 - sn) / 8.0).abs() < 1e-9);
            }
            for b in EVEN_STATES {
                let k = 4 * usize::from(b[0]) + 2 * usize::from(b[1]) + usize::from(b[2]);
                assert!((pt.states[k] - (1.0 + sn) / 8.0).abs() < 1e-9);
            }
        }
    }
}

/// (−i − e^{iφ}, −1 − i e^{iφ}, …)/4 over (C, L, R) with I = |0⟩.
fn printed_interference(phi: f64) -> DVector<C64> {
    let e = C64::from_polar(1.0, phi);
    let i = c(0.0, 1.0);
    let a = -i - e;
    let b = -1.0 - i * e;
    DVector::from_vec(vec![a, b, -b, a, b, -a, a, b]) / c(4.0, 0.0)
}

#[test]
fn interference_amplitudes_match_printed_vector() {
    let p = RouterParams::default();
    for s in SCHEMES {
        let basis = AddressBasis::for_scheme(s);
        let pts = phi_scan(&grid(13, 0.0, 2.0 * PI), s, None, &p).unwrap();
        let (phi0, _, _) = fit_phi_offset(&pts).unwrap();
        // pick φ so the effective phase φ + φ0 is π/2
        let phi = FRAC_PI_2 - phi0;
        let mut circ = Circuit::new(&[2, 3, 2, 2]);
        circ.gate(GateKind::X, &[0], p.single_ns).unwrap();
        circ.gate(AddressState::new(FRAC_PI_4, phi, basis).prep_gate(), &[1], p.single_ns).unwrap();
        for g in qrouter_gates(s, RouterSites::default(), &p) {
            circ.push(Op::Gate(g)).unwrap();
        }
        circ.gate(GateKind::half_pi(basis.levels()), &[1], p.single_ns).unwrap();
        circ.gate(GateKind::half_pi(qroutesim_gates::Levels::L01), &[2], p.single_ns).unwrap();
        circ.gate(GateKind::half_pi(qroutesim_gates::Levels::L01), &[3], p.single_ns).unwrap();
        let init = QuditRegister::new_basis_state(&[2, 3, 2, 2], "0000").unwrap();
        let st = NoiseModel::noiseless(4).run(&circ, &init).unwrap().state;
        let got: Vec<C64> = (0..8)
            .map(|k| {
                let label = format!("0{}{}{}", if k & 4 != 0 { basis.upper() } else { 0 }, (k >> 1) & 1, k & 1);
                st.amplitude(&label).unwrap()
            })
            .collect();
        let got = DVector::from_vec(got);
        // the printed vector routes address |0⟩ to L; here |0⟩ goes to R, so swap the L and R bits
        let printed = printed_interference(FRAC_PI_2);
        let want = DVector::from_fn(8, |k, _| printed[(k & 4) | ((k & 1) << 1) | ((k >> 1) & 1)]);
        assert!((got.norm() - 1.0).abs() < 1e-9);
        assert!((want.dotc(&got).norm() - 1.0).abs() < 1e-9, "{s:?}");
    }
}

#[test]
fn qst_exact_is_perfect_noiseless() {
    let p = RouterParams::default();
    for s in SCHEMES {
        for addr in rat_addresses(s) {
            let r = qst_router(addr, None, QstMethod::Exact, 0, 1, &p).unwrap();
            assert!((r.fidelity - 1.0).abs() < 1e-9);
            assert!(r.leaked < 1e-12);
        }
    }
}

#[test]
fn qst_linear_inversion_converges_with_shots() {
    let addr = AddressState::new(FRAC_PI_4, 0.0, AddressBasis::B02);
    let r = qst_router(addr, Some(DecayRates::default()), QstMethod::LinearInversion, 1_000_000, 7, &RouterParams::default())
        .unwrap();
    let d = trace_distance(&r.rho, &r.exact);
    assert!(d < 5e-3, "trace distance {d}");
    assert!(r.fidelity < 1.0 && r.fidelity > 0.8);
}

#[test]
fn qst_mle_is_physical_and_close() {
    let addr = AddressState::new(0.0, 0.0, AddressBasis::B01);
    let r = qst_router(addr, Some(DecayRates::default()), QstMethod::Mle, 20_000, 3, &RouterParams::default()).unwrap();
    let eig = r.rho.clone().symmetric_eigen();
    assert!(eig.eigenvalues.iter().all(|&l| l > -1e-9));
    assert!((r.rho.trace().re - 1.0).abs() < 1e-9);
    assert!(trace_distance(&r.rho, &r.exact) < 0.05);
}

#[test]
fn qst_rejects_bad_input() {
    let st = QuditRegister::new_basis_state(&[2, 2], "00").unwrap();
    let t = DVector::from_element(2, c(1.0, 0.0));
    assert!(qst(&st, &[], &[], &t, QstMethod::Exact, 0, 1).is_err());
    assert!(qst(&st, &[0, 1], &[(0, 1), (0, 1)], &t, QstMethod::Exact, 0, 1).is_err());
}

#[test]
fn noiseless_rat_is_perfect() {
    for s in SCHEMES {
        let mut cfg = RatConfig::new(s);
        cfg.rates = None;
        cfg.n_max = 6;
        cfg.trials = 8;
        let r = rat_single(&cfg).unwrap();
        assert_eq!(r.depths, (0..=6).collect::<Vec<_>>());
        assert!(r.m_values.iter().all(|m| (m - 1.0).abs() < 1e-9), "{:?}", r.m_values);
        let r2 = rat_two_layer(&RatConfig { n_max: 3, trials: 3, ..cfg }).unwrap();
        assert!(r2.m_values.iter().all(|m| (m - 1.0).abs() < 1e-9), "{:?}", r2.m_values);
    }
}

#[test]
fn rat_is_reproducible_from_seed() {
    let mut cfg = RatConfig::new(Scheme::Eraser);
    cfg.n_max = 4;
    cfg.trials = 6;
    cfg.shots = 2000;
    let a = rat_single(&cfg).unwrap();
    let b = rat_single(&cfg).unwrap();
    assert_eq!(a, b);
    cfg.seed = 2;
    assert_ne!(rat_single(&cfg).unwrap().m_values, a.m_values);
}

#[test]
fn noisy_rat_decays_with_depth() {
    for s in SCHEMES {
        let mut cfg = RatConfig::new(s);
        cfg.n_max = 12;
        let r = rat_single(&cfg).unwrap();
        for k in 1..r.depths.len() {
            let slack = r.m_sem[k] + r.m_sem[k - 1];
            assert!(r.m_values[k] <= r.m_values[k - 1] + slack, "{s:?} N={k}: {:?}", r.m_values);
        }
        assert!(r.m_values.iter().all(|m| (0.0..=1.0).contains(m)));
        assert!(r.m_values[12] < r.m_values[0]);
        let fit = r.fit.unwrap();
        assert!((0.0..=1.0).contains(&fit.f) && fit.f > 0.5);
    }
}

#[test]
fn eraser_postselection_discards_runs() {
    let r = rat_single(&RatConfig { n_max: 5, ..RatConfig::new(Scheme::Eraser) }).unwrap();
    assert!(r.kept.iter().all(|&k| k < 1.0 && k > 0.5));
    let r = rat_single(&RatConfig { n_max: 5, ..RatConfig::new(Scheme::NonEraser) }).unwrap();
    assert!(r.kept.iter().all(|&k| k == 1.0));
}

#[test]
fn m_rat_measure() {
    assert_eq!(m_rat(&[0.5, 0.5], &[0.5, 0.5]), 1.0);
    assert!((m_rat(&[1.0, 0.0], &[0.9, 0.1]) - 0.8).abs() < 1e-12);
    assert_eq!(m_rat(&[1.0, 0.0], &[0.0, 1.0]), 0.0);
}

#[test]
fn leakage_target() {
    let d = delta_theta_for_leakage(0.05);
    assert!(((PI - d) / 2.0).cos().powi(2) - 0.05 < 1e-12);
    assert_eq!(delta_theta_for_leakage(0.0), 0.0);
}

fn model(l1: f64, l2: f64, f: f64, n: usize) -> f64 {
    l1 + l2 * f.powi(2 * n as i32 + 1)
}

#[test]
fn fit_rat_round_trip() {
    let depths: Vec<usize> = (0..=30).collect();
    let m: Vec<f64> = depths.iter().map(|&n| model(0.1, 0.9, 0.95, n)).collect();
    let fit = fit_rat(&depths, &m).unwrap();
    assert!((fit.l1 - 0.1).abs() < 1e-6 && (fit.l2 - 0.9).abs() < 1e-6 && (fit.f - 0.95).abs() < 1e-6, "{fit:?}");
    assert!(fit.rms < 1e-8);
}

#[test]
fn fit_rat_survives_gaussian_noise() {
    let depths: Vec<usize> = (0..=30).collect();
    let normal = Normal::new(0.0, 0.01).unwrap();
    for seed in 0..100 {
        let mut rng = trial_rng(seed, 0);
        let m: Vec<f64> = depths.iter().map(|&n| model(0.1, 0.9, 0.95, n) + normal.sample(&mut rng)).collect();
        let fit = fit_rat(&depths, &m).unwrap();
        assert!((fit.f - 0.95).abs() < 0.005, "seed {seed}: {fit:?}");
    }
}

#[test]
fn fit_rat_needs_three_points() {
    assert!(fit_rat(&[0, 1], &[1.0, 0.9]).is_err());
    assert!(fit_rat(&[0, 1, 2], &[1.0, 0.9]).is_err());
}

#[test]
fn floquet_closed_form() {
    let ideal = FloquetParams::new(PI, 0.3, 1.1);
    assert!((floquet_populations(PI, 0.3, 1.1, 3).1 - 1.0).abs() < 1e-12);
    assert!((floquet_populations(PI, 0.3, 1.1, 0).0 - 1.0).abs() < 1e-12);
    assert!((ideal.p02(4)).abs() < 1e-12);
    let fp = FloquetParams::new(0.98 * PI, 0.0, 0.0);
    let m = fp.block_power(2);
    assert!((floquet_populations(0.98 * PI, 0.0, 0.0, 2).1 - m[(1, 0)].norm_sqr()).abs() < 1e-10);
}

#[test]
fn floquet_cost_ideal_and_imperfect() {
    let ideal = floquet_cost(&FloquetParams::new(PI, 0.0, 0.0), 15, None, 25.0).unwrap();
    assert!((ideal.value - 1.0).abs() < 1e-12);
    let off = floquet_cost(&FloquetParams::new(0.97 * PI, 0.0, 0.0), 15, None, 25.0).unwrap();
    assert!(off.value < 1.0);
    let r = Some(DecayRates::default());
    let v: Vec<f64> = [5, 10, 15]
        .iter()
        .map(|&m| floquet_cost(&FloquetParams::new(PI, 0.0, 0.0), m, r, 25.0).unwrap().value)
        .collect();
    assert!(v[0] > v[1] && v[1] > v[2], "{v:?}");
    assert!(floquet_cost(&FloquetParams::new(PI, 0.0, 0.0), 0, None, 25.0).is_err());
}

#[test]
fn nelder_mead_quadratic_and_rosenbrock() {
    let r = nelder_mead(|x| (x[0] - 3.0).powi(2), &[0.0], &NmOptions::default()).unwrap();
    assert!(r.converged && (r.x[0] - 3.0).abs() < 1e-6);
    let opts = NmOptions { max_iter: 10_000, tol: 1e-10, ..NmOptions::default() };
    let r = nelder_mead(|x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2), &[-1.2, 1.0], &opts).unwrap();
    assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4, "{r:?}");
    let r = nelder_mead(|x| x[0] * x[0], &[1.0], &NmOptions { max_iter: 3, ..NmOptions::default() }).unwrap();
    assert!(!r.converged);
    assert!(nelder_mead(|_| 0.0, &[], &NmOptions::default()).is_err());
    assert!(nelder_mead(|_| 0.0, &[0.0; 9], &NmOptions::default()).is_err());
}

#[test]
fn nelder_mead_calibrates_floquet_angle() {
    let cost = |x: &[f64]| -floquet_cost(&FloquetParams::new(x[0], 0.0, 0.0), 15, None, 25.0).unwrap().value;
    let opts = NmOptions { step: 0.02 * PI, tol: 1e-7, ..NmOptions::default() };
    let r = nelder_mead(cost, &[0.95 * PI], &opts).unwrap();
    // the cost is even about π, so either side of 2π − ϑ is the same gate
    let theta = r.x[0].rem_euclid(2.0 * PI);
    assert!((theta - PI).abs() < 1e-3, "ϑ = {theta}");
}

#[test]
fn leakage_phase_interference() {
    let worst = leakage_revival(Scheme::NonEraser, 0.99 * PI, FRAC_PI_2, 20).unwrap();
    let best = leakage_revival(Scheme::NonEraser, 0.99 * PI, 0.0, 20).unwrap();
    assert!(worst.iter().zip(&best).all(|(w, b)| w <= b));
    assert!(worst[19] < 0.8 && best[19] > 0.999);
    let ideal = leakage_revival(Scheme::Eraser, PI, FRAC_PI_2, 5).unwrap();
    assert!(ideal.iter().all(|p| (p - 1.0).abs() < 1e-12));
}

#[test]
fn sampled_counts_are_reproducible() {
    let probs = [0.2, 0.3, 0.5];
    let a = sample_counts(&probs, 10_000, &mut trial_rng(5, 1));
    assert_eq!(a, sample_counts(&probs, 10_000, &mut trial_rng(5, 1)));
    assert_eq!(a.iter().sum::<u64>(), 10_000);
    assert_ne!(a, sample_counts(&probs, 10_000, &mut trial_rng(5, 2)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn theta_scan_probabilities_are_bounded(theta in 0.0..PI, noisy in any::<bool>()) {
        let rates = noisy.then(DecayRates::default);
        for s in SCHEMES {
            let pt = theta_scan(&[theta], s, rates, &RouterParams::default()).unwrap()[0];
            for v in [pt.p_l, pt.p_r, pt.p_i] {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
            }
            prop_assert!(pt.p_l + pt.p_r + pt.p_i <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn phi_scan_populations_sum_to_one(phi in -PI..PI, noisy in any::<bool>()) {
        let rates = noisy.then(DecayRates::default);
        let pt = phi_scan(&[phi], Scheme::NonEraser, rates, &RouterParams::default()).unwrap()[0];
        prop_assert!((pt.p_odd + pt.p_even - pt.states.iter().sum::<f64>()).abs() < 1e-12);
        prop_assert!(pt.p_odd + pt.p_even <= 1.0 + 1e-9);
    }

    #[test]
    fn sample_counts_total(shots in 0u64..5000, w in prop::collection::vec(0.0..1.0f64, 1..10), seed in any::<u64>()) {
        let counts = sample_counts(&w, shots, &mut trial_rng(seed, 0));
        let total: f64 = w.iter().sum();
        prop_assert_eq!(counts.iter().sum::<u64>(), if total > 0.0 { shots } else { 0 });
    }

    #[test]
    fn floquet_populations_sum_to_one(theta in 0.0..2.0 * PI, eta in -PI..PI, zeta in -PI..PI, n in 0usize..40) {
        let (p11, p02) = floquet_populations(theta, eta, zeta, n);
        prop_assert!((p11 + p02 - 1.0).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p02));
        let m = FloquetParams::new(theta, eta, zeta).block_power(n);
        prop_assert!((p02 - m[(1, 0)].norm_sqr()).abs() < 1e-9);
    }

    #[test]
    fn m_rat_in_unit_interval(a in prop::collection::vec(0.0..1.0f64, 8), b in prop::collection::vec(0.0..1.0f64, 8)) {
        let m = m_rat(&a, &b);
        prop_assert!((0.0..=1.0).contains(&m));
        prop_assert_eq!(m_rat(&a, &a), 1.0);
    }
}
