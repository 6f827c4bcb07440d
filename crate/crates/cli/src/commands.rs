use crate::config::{parse_grid, RatSection, RunConfig};
use crate::emit::{emit, emit_extra, output_dir, Table};
use crate::{CliError, Command, RatArgs};
use qroutesim_gates::{qrouter_circuit_with, write_circuit, Circuit, FloquetParams, RouterParams, Scheme};
use qroutesim_layout::{best_layout_by, compactness, layout_csv, layout_json, Coord, GridSpec};
use qroutesim_noise::{amplitude_a110, amplitude_a120_limit, balance_point, leaky_a110, leaky_a120};
use qroutesim_protocols::{
    fit_phi_offset, floquet_cost, floquet_populations, nelder_mead, phi_scan, qst_router, rat_single, rat_two_layer,
    theta_scan, trace_distance, AddressBasis, AddressState, NmOptions, ProtocolError, QstMethod, RatConfig,
};
use qroutesim_routing::{
    build_tree, clifford_router, compile_query, gate_counts, router_stage, CompileOptions, CompileScheme, Mode,
    NodeBinding, RoutingError,
};
use serde_json::json;
use std::f64::consts::PI;
use std::path::Path;

/// Largest tree `compile` builds; the circuit grows as 2^layers.
pub const MAX_COMPILE_LAYERS: usize = 10;

fn run_err(e: impl std::fmt::Display) -> CliError {
    CliError::Run(e.to_string())
}

fn protocol_err(e: ProtocolError) -> CliError {
    match e {
        ProtocolError::Routing(RoutingError::Capacity { .. }) => CliError::Capacity(e.to_string()),
        ProtocolError::BadInput(m) => CliError::Config(m),
        e => run_err(e),
    }
}

fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

pub fn dispatch(cmd: Command, mut cfg: RunConfig, out: Option<&Path>) -> Result<String, CliError> {
    // fold command-line overrides into the config first, so the echoed
    // config reproduces the run
    match &cmd {
        Command::ThetaScan { scheme, points } => {
            cfg.theta_scan.scheme = scheme.unwrap_or(cfg.theta_scan.scheme);
            cfg.theta_scan.points = points.unwrap_or(cfg.theta_scan.points);
        }
        Command::PhiScan { scheme, points } => {
            cfg.phi_scan.scheme = scheme.unwrap_or(cfg.phi_scan.scheme);
            cfg.phi_scan.points = points.unwrap_or(cfg.phi_scan.points);
        }
        Command::Qst { scheme, shots } => {
            cfg.qst.scheme = scheme.unwrap_or(cfg.qst.scheme);
            cfg.qst.shots = shots.unwrap_or(cfg.qst.shots);
        }
        Command::Rat(a) => apply_rat(&mut cfg.rat, a),
        Command::Rat2(a) => apply_rat(&mut cfg.rat2, a),
        Command::Floquet { calibrate_from } => {
            if calibrate_from.is_some() {
                cfg.floquet.calibrate_from = *calibrate_from;
            }
        }
        Command::Compile { layers, mode, scheme } => {
            cfg.compile.layers = layers.unwrap_or(cfg.compile.layers);
            if let Some(m) = mode {
                cfg.compile.mode = m.clone();
            }
            if let Some(s) = scheme {
                cfg.compile.scheme = s.clone();
            }
        }
        Command::Layout { grid, layers, mask, budget } => {
            if let Some(g) = grid {
                let (r, c) = parse_grid(g).map_err(CliError::Config)?;
                cfg.layout.rows = r;
                cfg.layout.cols = c;
            }
            if let Some(path) = mask {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let g = GridSpec::from_mask(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                cfg.layout.rows = g.rows;
                cfg.layout.cols = g.cols;
                cfg.layout.dead_qubits = g.dead_qubits.iter().map(|q| [q.row, q.col]).collect();
            }
            cfg.layout.layers = layers.unwrap_or(cfg.layout.layers);
            cfg.layout.budget = budget.unwrap_or(cfg.layout.budget);
        }
        Command::NoiseCurves { t_max_us, points } => {
            cfg.noise_curves.t_max_us = t_max_us.unwrap_or(cfg.noise_curves.t_max_us);
            cfg.noise_curves.points = points.unwrap_or(cfg.noise_curves.points);
        }
        Command::Counts { .. } => {}
    }
    cfg.validate()?;
    let dir = output_dir(out, &cfg);
    match cmd {
        Command::ThetaScan { .. } => cmd_theta_scan(&cfg, &dir),
        Command::PhiScan { .. } => cmd_phi_scan(&cfg, &dir),
        Command::Qst { .. } => cmd_qst(&cfg, &dir),
        Command::Rat(_) => cmd_rat(&cfg, &cfg.rat, false, &dir),
        Command::Rat2(_) => cmd_rat(&cfg, &cfg.rat2, true, &dir),
        Command::Floquet { .. } => cmd_floquet(&cfg, &dir),
        Command::Compile { .. } => cmd_compile(&cfg, &dir),
        Command::Counts { scheme, layers, mode } => cmd_counts(&cfg, &scheme, layers, &mode, out),
        Command::Layout { .. } => cmd_layout(&cfg, &dir),
        Command::NoiseCurves { .. } => cmd_noise_curves(&cfg, &dir),
    }
}

fn apply_rat(s: &mut RatSection, a: &RatArgs) {
    s.scheme = a.scheme.unwrap_or(s.scheme);
    s.n_max = a.n_max.unwrap_or(s.n_max);
    s.trials = a.trials.unwrap_or(s.trials);
    s.shots = a.shots.unwrap_or(s.shots);
}

fn done(csv: &Path) -> String {
    format!("wrote {}\n", csv.display())
}

fn cmd_theta_scan(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let s = &cfg.theta_scan;
    let thetas = grid(s.points, 0.0, PI);
    let pts = theta_scan(&thetas, s.scheme.scheme(), cfg.noise.rates(), &cfg.noise.leaky_router()).map_err(protocol_err)?;
    let mut t = Table::new(&["theta", "p_l", "p_r", "p_i", "sin2_theta"]);
    let mut dev: f64 = 0.0;
    for p in &pts {
        let ideal = p.theta.sin().powi(2);
        dev = dev.max((p.p_l - ideal).abs());
        t.row(&[&p.theta, &p.p_l, &p.p_r, &p.p_i, &ideal]);
    }
    let csv = emit(dir, "theta-scan", cfg, &t, json!({ "points": pts.len(), "max_abs_p_l_minus_sin2": dev }))?;
    Ok(done(&csv))
}

fn cmd_phi_scan(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let s = &cfg.phi_scan;
    let phis = grid(s.points, 0.0, 2.0 * PI);
    let pts = phi_scan(&phis, s.scheme.scheme(), cfg.noise.rates(), &cfg.noise.leaky_router()).map_err(protocol_err)?;
    let (phi0, rms, contrast) = fit_phi_offset(&pts).map_err(protocol_err)?;
    let mut t = Table::new(&["phi", "p_odd", "p_even", "s000", "s001", "s010", "s011", "s100", "s101", "s110", "s111"]);
    t.note("states", "(C, L, R) with I = |0>, C counted excited on its upper address level");
    for p in &pts {
        let st = p.states;
        t.row(&[&p.phi, &p.p_odd, &p.p_even, &st[0], &st[1], &st[2], &st[3], &st[4], &st[5], &st[6], &st[7]]);
    }
    let summary = json!({ "phi0": phi0, "fit_rms": rms, "contrast": contrast });
    Ok(done(&emit(dir, "phi-scan", cfg, &t, summary)?))
}

fn cmd_qst(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let s = &cfg.qst;
    let addr = AddressState::new(s.theta, s.phi, AddressBasis::for_scheme(s.scheme.scheme()));
    let p = cfg.noise.leaky_router();
    let mut t = Table::new(&["method", "shots", "fidelity", "leaked", "trace_distance_to_exact"]);
    let mut summary = serde_json::Map::new();
    for (name, method, shots) in
        [("exact", QstMethod::Exact, 0), ("linear-inversion", QstMethod::LinearInversion, s.shots), ("mle", QstMethod::Mle, s.shots)]
    {
        let r = qst_router(addr, cfg.noise.rates(), method, shots, cfg.seed, &p).map_err(protocol_err)?;
        let td = trace_distance(&r.rho, &r.exact);
        t.row(&[&name, &shots, &r.fidelity, &r.leaked, &td]);
        summary.insert(name.into(), json!({ "fidelity": r.fidelity, "leaked": r.leaked, "trace_distance": td }));
    }
    Ok(done(&emit(dir, "qst", cfg, &t, summary.into())?))
}

fn cmd_rat(cfg: &RunConfig, s: &RatSection, two_layer: bool, dir: &Path) -> Result<String, CliError> {
    let scheme = s.scheme.scheme();
    let rc = RatConfig {
        n_max: s.n_max,
        scheme,
        rates: cfg.noise.rates(),
        delta_theta: if cfg.noise.enabled { cfg.noise.delta_theta() } else { 0.0 },
        trials: s.trials,
        shots: s.shots,
        seed: cfg.seed,
        router: cfg.noise.router(),
        postselect: s.postselect.unwrap_or(scheme == Scheme::Eraser),
    };
    let r = if two_layer { rat_two_layer(&rc) } else { rat_single(&rc) }.map_err(protocol_err)?;
    let mut t = Table::new(&["depth", "m_rat", "sem", "kept"]);
    for i in 0..r.depths.len() {
        t.row(&[&r.depths[i], &r.m_values[i], &r.m_sem[i], &r.kept[i]]);
    }
    // measured on hardware, for comparison only
    let reference = match (two_layer, scheme) {
        (false, Scheme::Eraser) => 0.9574,
        (false, Scheme::NonEraser) => 0.8748,
        (true, Scheme::Eraser) => 0.8240,
        (true, Scheme::NonEraser) => 0.8190,
    };
    let fit = r.fit.map(|f| json!({ "l1": f.l1, "l2": f.l2, "f_rat": f.f, "rms": f.rms, "converged": f.converged }));
    let name = if two_layer { "rat2" } else { "rat" };
    let summary = json!({ "fit": fit, "trials": r.trials, "seed": r.seed, "hardware_reference_f_rat": reference });
    Ok(done(&emit(dir, name, cfg, &t, summary)?))
}

fn cmd_floquet(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let f = &cfg.floquet;
    let mut t = Table::new(&["n", "p11", "p02"]);
    for n in 0..=f.n_max {
        let (p11, p02) = floquet_populations(f.theta, f.eta, f.zeta, n);
        t.row(&[&n, &p11, &p02]);
    }
    let ns = cfg.noise.sqrt_cz_ns;
    let rates = cfg.noise.rates();
    let cost = floquet_cost(&FloquetParams::new(f.theta, f.eta, f.zeta), f.m, rates, ns).map_err(protocol_err)?;
    let mut summary = json!({ "cost": cost.value, "m": cost.m });
    if let Some(start) = f.calibrate_from {
        let opts = NmOptions { step: 0.02 * PI, max_iter: 500, tol: 1e-7 };
        let mut failure = None;
        let r = nelder_mead(
            |x| match floquet_cost(&FloquetParams::new(x[0], f.eta, f.zeta), f.m, rates, ns) {
                Ok(c) => 1.0 - c.value,
                Err(e) => {
                    failure.get_or_insert(e.to_string());
                    f64::INFINITY
                }
            },
            &[start],
            &opts,
        )
        .map_err(protocol_err)?;
        if let Some(e) = failure {
            return Err(CliError::Run(e));
        }
        let theta = r.x[0].rem_euclid(2.0 * PI);
        t.note("calibrated_theta", theta);
        summary["calibration"] =
            json!({ "start": start, "theta": theta, "cost": 1.0 - r.value, "iterations": r.iterations, "converged": r.converged });
    }
    Ok(done(&emit(dir, "floquet", cfg, &t, summary)?))
}

fn compile_scheme(s: &str) -> Result<CompileScheme, CliError> {
    s.parse().map_err(|e: String| CliError::Config(format!("scheme: {e}")))
}

fn compile_mode(s: &str) -> Result<Mode, CliError> {
    s.parse().map_err(|e: String| CliError::Config(format!("mode: {e}")))
}

fn routing_err(e: RoutingError) -> CliError {
    match e {
        RoutingError::Capacity { .. } => CliError::Capacity(e.to_string()),
        RoutingError::IncompatibleMode { .. } | RoutingError::MemorySize { .. } | RoutingError::NoLayers => {
            CliError::Config(e.to_string())
        }
        e => run_err(e),
    }
}

fn compiled(layers: usize, mode: Mode, scheme: CompileScheme, opts: &CompileOptions) -> Result<qroutesim_routing::CompiledQuery, CliError> {
    if layers > MAX_COMPILE_LAYERS {
        return Err(CliError::Capacity(format!("{layers} layers exceed the compiler limit of {MAX_COMPILE_LAYERS}")));
    }
    let tree = build_tree(layers).map_err(routing_err)?;
    compile_query(&tree, mode, scheme, opts).map_err(routing_err)
}

fn cmd_compile(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let c = &cfg.compile;
    let (mode, scheme) = (compile_mode(&c.mode)?, compile_scheme(&c.scheme)?);
    let opts = CompileOptions { router: cfg.noise.router(), memory: c.memory.clone() };
    let q = compiled(c.layers, mode, scheme, &opts)?;
    let mut t = Table::new(&["stage", "start", "end", "n1q", "n2q", "depth"]);
    for s in &q.stages {
        let sub = q.stage_circuit(s.name).expect("stage listed by the compiler");
        let (a, b, d) = gate_counts(&sub);
        t.row(&[&s.name, &s.start, &s.end, &a, &b, &d]);
    }
    let (a, b, d) = q.counts;
    t.row(&[&"total", &0, &q.circuit.ops().len(), &a, &b, &d]);
    emit_extra(dir, "compile.circ", &write_circuit(&q.circuit))?;
    let summary = json!({
        "counts": [a, b, d],
        "groups": q.groups.len(),
        "sites": q.circuit.n_sites(),
        "bus_site": q.bus_site,
        "address_sites": q.address_sites,
        "duration_ns": q.circuit.duration_ns(),
    });
    Ok(done(&emit(dir, "compile", cfg, &t, summary)?))
}

/// One router in isolation.
fn single_router(scheme: CompileScheme, p: &RouterParams) -> Result<Circuit, CliError> {
    let b = NodeBinding { input: 0, control: 1, left: 2, right: 3 };
    let (dims, ops) = match scheme {
        CompileScheme::Clifford => ([2; 4], clifford_router(b, p)),
        CompileScheme::TcgNonEraser => return Ok(qrouter_circuit_with(Scheme::NonEraser, p)),
        CompileScheme::TcgEraser => return Ok(qrouter_circuit_with(Scheme::Eraser, p)),
        CompileScheme::SpTcg => ([3; 4], router_stage(b, scheme, p, false)),
    };
    let mut c = Circuit::new(&dims);
    for op in ops {
        c.push(op).map_err(run_err)?;
    }
    Ok(c)
}

fn cmd_counts(cfg: &RunConfig, scheme: &str, layers: Option<usize>, mode: &str, out: Option<&Path>) -> Result<String, CliError> {
    let scheme = compile_scheme(scheme)?;
    let (a, b, d) = match layers {
        None => gate_counts(&single_router(scheme, &cfg.noise.router())?),
        Some(l) => {
            let opts = CompileOptions { router: cfg.noise.router(), memory: Vec::new() };
            compiled(l, compile_mode(mode)?, scheme, &opts)?.counts
        }
    };
    // files only when asked for, so the plain query stays side-effect free
    if let Some(dir) = out {
        let mut t = Table::new(&["scheme", "layers", "n1q", "n2q", "depth"]);
        let l = layers.map_or("router".to_string(), |l| l.to_string());
        t.row(&[&scheme, &l, &a, &b, &d]);
        emit(dir, "counts", cfg, &t, json!({ "scheme": scheme.to_string(), "counts": [a, b, d] }))?;
    }
    Ok(format!("{a} {b} {d}\n"))
}

fn cmd_layout(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let l = &cfg.layout;
    let coord = |[r, c]: [usize; 2]| Coord::new(r, c);
    let g = GridSpec::new(l.rows, l.cols)
        .with_dead_qubits(l.dead_qubits.iter().copied().map(coord))
        .with_dead_couplers(l.dead_couplers.iter().map(|&[a, b]| (coord(a), coord(b))));
    g.validate().map_err(|e| CliError::Config(format!("layout: {e}")))?;
    let best = best_layout_by(&g, l.layers, l.budget, compactness).map_err(|e| CliError::Config(format!("layout: {e}")))?;
    match best {
        Ok(b) => {
            emit_extra(dir, "layout-tree.json", &(layout_json(&b.layout) + "\n"))?;
            let mut t = Table::from_csv(&layout_csv(&b.layout));
            t.note("grid", format!("{}x{}", g.rows, g.cols));
            let summary = json!({
                "layers": l.layers,
                "routers": b.layout.len(),
                "qubits": b.layout.qubits().len(),
                "seed_triangle": b.seed,
                "score": b.score,
                "seed_offset": b.seed_offset,
                "seeds_tried": b.seeds_tried,
                "seeds_ok": b.seeds_ok,
                "layout": b.layout,
            });
            Ok(done(&emit(dir, "layout", cfg, &t, summary)?))
        }
        Err(f) => {
            let proof = if f.exhaustive { "exhaustive search" } else { "search budget exhausted" };
            Err(CliError::Capacity(format!(
                "{} layers do not fit on the {}x{} grid ({} qubits needed, {} working; deepest that fits: {}; {proof})",
                l.layers, g.rows, g.cols, f.qubits_needed, f.qubits_available, f.deepest
            )))
        }
    }
}

fn cmd_noise_curves(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let r = cfg.noise.decay();
    let eps = cfg.noise.epsilon;
    let nc = &cfg.noise_curves;
    let bp = balance_point(&r);
    let leaky = !r.is_degenerate();
    let mut t = Table::new(&["t_us", "a120_raw", "a120_post", "a110", "a120_leaky", "a110_leaky"]);
    match bp {
        Some(b) => t.note("balance_point_us", b),
        None => t.note("balance_point_us", "none (needs g10 < g21)"),
    }
    t.note("epsilon", eps);
    for time in grid(nc.points, 0.0, nc.t_max_us) {
        let (raw, post) = amplitude_a120_limit(&r, time).map_err(run_err)?;
        let a110 = amplitude_a110(&r, time).map_err(run_err)?;
        let l110 = leaky_a110(&r, eps, time).map_err(run_err)?;
        // leaky |120⟩ form has no degenerate-rate limit; leave the column empty there
        let l120 = if leaky { leaky_a120(&r, eps, time).map_err(run_err)?.to_string() } else { String::new() };
        t.row(&[&time, &raw, &post, &a110, &l120, &l110]);
    }
    let summary = json!({ "balance_point_us": bp, "epsilon": eps, "points": t.len() });
    Ok(done(&emit(dir, "noise-curves", cfg, &t, summary)?))
}
