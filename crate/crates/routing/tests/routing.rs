use proptest::prelude::*;
use qroutesim_core::{QuditRegister, SupportState};
use qroutesim_gates::{qrouter_circuit, Circuit, Op, RouterParams, Scheme};
use qroutesim_noise::{DecayRates, NoiseModel};
use qroutesim_routing::*;
use std::collections::HashSet;

fn router_binding() -> NodeBinding {
    NodeBinding { input: 0, control: 1, left: 2, right: 3 }
}

#[test]
fn single_router_counts() {
    let mut c = Circuit::new(&[2, 2, 2, 2]);
    for op in clifford_router(router_binding(), &RouterParams::default()) {
        c.push(op).unwrap();
    }
    assert_eq!(gate_counts(&c), (20, 16, 30));
    assert_eq!(gate_counts(&qrouter_circuit(Scheme::NonEraser, 0.0, 0.0)), (2, 6, 8));
    assert_eq!(gate_counts(&qrouter_circuit(Scheme::Eraser, 0.0, 0.0)), (6, 6, 12));
    assert_eq!(gate_counts(&Circuit::new(&[2])), (0, 0, 0));
}

#[test]
fn clifford_fredkin_depth_without_barriers() {
    // one Fredkin is 14 deep; the router's 30 is X + Fredkin + X + Fredkin
    let ops = clifford_router(router_binding(), &RouterParams::default());
    let mut c = Circuit::new(&[2, 2, 2, 2]);
    for op in ops.into_iter().filter(|o| !matches!(o, Op::Barrier)) {
        c.push(op).unwrap();
    }
    let (_, _, d) = gate_counts(&c);
    assert!(d < 30, "barrier-free depth {d}");
}

#[test]
fn clifford_router_is_exact_fredkin_pair() {
    let mut c = Circuit::new(&[2, 2, 2, 2]);
    for op in clifford_router(router_binding(), &RouterParams::default()) {
        c.push(op).unwrap();
    }
    let model = NoiseModel::noiseless(4);
    for (inp, out) in [("1000", "0001"), ("1100", "0110"), ("0000", "0000"), ("0100", "0100")] {
        let r = model.run(&c, &QuditRegister::new_basis_state(&[2; 4], inp).unwrap()).unwrap();
        assert!((r.state.population(out).unwrap() - 1.0).abs() < 1e-12, "{inp} -> {out}");
    }
}

#[test]
fn tree_shapes() {
    let t1 = build_tree(1).unwrap();
    assert_eq!((t1.n_routers(), t1.n_leaves()), (1, 2));
    let t2 = build_tree(2).unwrap();
    assert_eq!((t2.n_routers(), t2.n_leaves()), (3, 4));
    assert_eq!(t2.node(1), NodeBinding { input: 0, control: 1, left: 2, right: 3 });
    assert_eq!(t2.node(2), NodeBinding { input: 2, control: 4, left: 6, right: 7 });
    assert_eq!(t2.node(3), NodeBinding { input: 3, control: 5, left: 8, right: 9 });
    assert_eq!(t2.leaves(), vec![6, 7, 8, 9]);
    let t5 = build_tree(5).unwrap();
    assert_eq!((t5.n_routers(), t5.n_leaves()), (31, 32));
    assert!(matches!(t5.check_simulable(), Err(RoutingError::Capacity { layers: 5, .. })));
    assert!(t2.check_simulable().is_ok());
    assert!(matches!(build_tree(0), Err(RoutingError::NoLayers)));
    // five layers still compile
    let q = compile_query(&t5, Mode::Full, CompileScheme::TcgEraser, &CompileOptions::default()).unwrap();
    assert!(q.counts.1 > 31 * 12);
}

#[test]
fn every_site_bound_once_per_role() {
    for layers in 1..=6 {
        let t = build_tree(layers).unwrap();
        let ctl: HashSet<_> = t.controls().into_iter().collect();
        assert_eq!(ctl.len(), t.n_routers());
        let outs: HashSet<_> = (1..=t.n_routers()).flat_map(|n| [t.node(n).left, t.node(n).right]).collect();
        assert_eq!(outs.len(), 2 * t.n_routers());
        assert!(ctl.is_disjoint(&outs) && !ctl.contains(&0) && !outs.contains(&0));
        assert_eq!(ctl.len() + outs.len() + 1, t.n_sites());
        for layer in 1..=layers {
            assert_eq!(t.layer_nodes(layer).len(), 1 << (layer - 1));
        }
    }
}

fn address_bits(tree: &RoutingTree, leaf: usize) -> Vec<bool> {
    tree.path(leaf).into_iter().map(|(_, left)| left).collect()
}

/// Basis label for the compiled register with the given nonzero sites.
fn label(dims: &[usize], set: &[(usize, usize)]) -> String {
    let mut v = vec![0usize; dims.len()];
    for &(s, x) in set {
        v[s] = x;
    }
    v.iter().map(|d| char::from_digit(*d as u32, 10).unwrap()).collect()
}

/// Noiseless run from a basis state on the sparse support.
fn run_query(q: &CompiledQuery, init: &[(usize, usize)]) -> SupportState {
    let dims = q.circuit.dims().to_vec();
    let mut st = SupportState::basis_state(&dims, &label(&dims, init)).unwrap();
    NoiseModel::noiseless(dims.len()).run_support(&q.circuit, &mut st).unwrap();
    st
}

fn population(st: &SupportState, label: &str) -> f64 {
    let i = st.radix().parse_label(label).unwrap();
    st.populations().into_iter().find(|&(j, _)| j == i).map_or(0.0, |(_, p)| p)
}

fn addr_init(q: &CompiledQuery, bits: &[bool]) -> Vec<(usize, usize)> {
    q.address_sites.iter().zip(bits).filter(|(_, &b)| b).map(|(&s, _)| (s, 1)).collect()
}

const FULL_SCHEMES: [CompileScheme; 3] = [CompileScheme::Clifford, CompileScheme::TcgNonEraser, CompileScheme::TcgEraser];

#[test]
fn full_query_retrieves_and_restores() {
    for layers in 1..=2 {
        let tree = build_tree(layers).unwrap();
        for scheme in FULL_SCHEMES {
            for mem_word in 0..(1u32 << tree.n_leaves()) {
                let memory: Vec<bool> = (0..tree.n_leaves()).map(|j| (mem_word >> j) & 1 == 1).collect();
                let opts = CompileOptions { memory: memory.clone(), ..Default::default() };
                let q = compile_query(&tree, Mode::Full, scheme, &opts).unwrap();
                let dims = q.circuit.dims().to_vec();
                for leaf in 0..tree.n_leaves() {
                    let bits = address_bits(&tree, leaf);
                    let init = addr_init(&q, &bits);
                    let out = run_query(&q, &init);
                    let mut want = init.clone();
                    if memory[leaf] {
                        want.push((q.bus_site, 1));
                    }
                    let p = population(&out, &label(&dims, &want));
                    assert!((p - 1.0).abs() < 1e-9, "{scheme} L={layers} mem={mem_word:b} leaf={leaf}: {p}");
                }
            }
        }
    }
}

#[test]
fn full_query_superposed_address_is_coherent() {
    // Σ_a |a⟩|0⟩ → Σ_a |a⟩|m_a⟩ with no garbage left behind
    let tree = build_tree(2).unwrap();
    let memory = vec![true, false, false, true];
    let q = compile_query(&tree, Mode::Full, CompileScheme::TcgEraser, &CompileOptions { memory: memory.clone(), ..Default::default() })
        .unwrap();
    let dims = q.circuit.dims().to_vec();
    let radix = qroutesim_core::Radix::new(&dims).unwrap();
    let mut amps = qroutesim_core::DVector::zeros(radix.total());
    let mut target = amps.clone();
    for leaf in 0..4 {
        let init = addr_init(&q, &address_bits(&tree, leaf));
        amps[radix.parse_label(&label(&dims, &init)).unwrap()] = qroutesim_core::c(0.5, 0.0);
        let mut want = init;
        if memory[leaf] {
            want.push((q.bus_site, 1));
        }
        target[radix.parse_label(&label(&dims, &want)).unwrap()] = qroutesim_core::c(0.5, 0.0);
    }
    let reg = QuditRegister::from_amplitudes(&dims, amps, 1e-12).unwrap();
    let out = NoiseModel::noiseless(dims.len()).run(&q.circuit, &reg).unwrap().state;
    let f = out.fidelity_to(&target).unwrap();
    assert!(f > 1.0 - 1e-9, "fidelity {f}");
}

#[test]
fn read_only_query_delivers_the_bit() {
    for layers in 1..=2 {
        let tree = build_tree(layers).unwrap();
        for scheme in [CompileScheme::SpTcg, CompileScheme::TcgEraser, CompileScheme::TcgNonEraser, CompileScheme::Clifford] {
            for mem_word in 0..(1u32 << tree.n_leaves()) {
                let memory: Vec<bool> = (0..tree.n_leaves()).map(|j| (mem_word >> j) & 1 == 1).collect();
                let opts = CompileOptions { memory: memory.clone(), ..Default::default() };
                let q = compile_query(&tree, Mode::ReadOnly, scheme, &opts).unwrap();
                for leaf in 0..tree.n_leaves() {
                    let bits = address_bits(&tree, leaf);
                    let out = run_query(&q, &addr_init(&q, &bits));
                    let bus = out.marginal(&[q.bus_site]);
                    let want = usize::from(memory[leaf]);
                    assert!((bus[want] - 1.0).abs() < 1e-9, "{scheme} L={layers} leaf={leaf} bus={bus:?}");
                    for (k, &s) in q.address_sites.iter().enumerate() {
                        let m = out.marginal(&[s]);
                        assert!((m[usize::from(bits[k])] - 1.0).abs() < 1e-9, "address {k} not restored");
                    }
                }
            }
        }
    }
}

#[test]
fn write_only_query_lands_on_the_leaf() {
    for layers in 1..=2 {
        let tree = build_tree(layers).unwrap();
        for scheme in [CompileScheme::SpTcg, CompileScheme::TcgEraser, CompileScheme::Clifford] {
            let q = compile_query(&tree, Mode::WriteOnly, scheme, &CompileOptions::default()).unwrap();
            let dims = q.circuit.dims().to_vec();
            let leaves = tree.leaves();
            for leaf in 0..tree.n_leaves() {
                for v in [false, true] {
                    let mut init = addr_init(&q, &address_bits(&tree, leaf));
                    let mut want = init.clone();
                    if v {
                        init.push((q.bus_site, 1));
                        want.push((leaves[leaf], 1));
                    }
                    let p = population(&run_query(&q, &init), &label(&dims, &want));
                    assert!((p - 1.0).abs() < 1e-9, "{scheme} L={layers} leaf={leaf} v={v}: {p}");
                }
            }
        }
    }
}

#[test]
fn sp_tcg_rejects_full_mode() {
    let tree = build_tree(1).unwrap();
    let e = compile_query(&tree, Mode::Full, CompileScheme::SpTcg, &CompileOptions::default()).unwrap_err();
    assert!(matches!(e, RoutingError::IncompatibleMode { .. }));
    let e = compile_query(&tree, Mode::ReadOnly, CompileScheme::SpTcg, &CompileOptions { memory: vec![true], ..Default::default() });
    assert!(matches!(e, Err(RoutingError::MemorySize { want: 2, got: 1 })));
}

#[test]
fn one_way_route_stage_is_two_thirds_shorter() {
    let tree = build_tree(1).unwrap();
    let opts = CompileOptions::default();
    let full = compile_query(&tree, Mode::Full, CompileScheme::TcgEraser, &opts).unwrap();
    let ro = compile_query(&tree, Mode::ReadOnly, CompileScheme::SpTcg, &opts).unwrap();
    let two_q = |q: &CompiledQuery, stages: &[&str]| -> usize {
        stages.iter().map(|s| q.stage_circuit(s).unwrap().gate_counts().1).sum()
    };
    let n_full = two_q(&full, &["route-down", "route-up"]);
    let n_ro = two_q(&ro, &["route-up"]);
    assert_eq!((n_full, n_ro), (12, 4));
    let reduction = 1.0 - n_ro as f64 / n_full as f64;
    assert!((reduction - 0.66).abs() < 0.01, "{reduction}");
}

/// Longest chain in the gate dependency DAG, by Kahn's algorithm.
fn topo_depth(c: &Circuit) -> usize {
    let mut nodes: Vec<Vec<usize>> = vec![]; // predecessors
    let mut last_on_site: Vec<Option<usize>> = vec![None; c.n_sites()];
    let mut fence: Vec<usize> = vec![];
    let mut since_fence: Vec<usize> = vec![];
    for op in c.ops() {
        match op {
            Op::Gate(g) if !g.kind.is_virtual() => {
                let id = nodes.len();
                let mut pred: Vec<usize> = g.sites.iter().filter_map(|&s| last_on_site[s]).collect();
                pred.extend(&fence);
                nodes.push(pred);
                for &s in &g.sites {
                    last_on_site[s] = Some(id);
                }
                since_fence.push(id);
            }
            Op::Gate(_) => {}
            _ => {
                fence = std::mem::take(&mut since_fence);
                if fence.is_empty() {
                    fence = (0..nodes.len()).collect();
                }
                last_on_site.iter_mut().for_each(|x| *x = None);
            }
        }
    }
    let n = nodes.len();
    let mut succ = vec![vec![]; n];
    let mut indeg = vec![0; n];
    for (v, pred) in nodes.iter().enumerate() {
        let pred: HashSet<_> = pred.iter().copied().collect();
        indeg[v] = pred.len();
        for u in pred {
            succ[u].push(v);
        }
    }
    let mut level = vec![1; n];
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    while let Some(u) = queue.pop() {
        for &v in &succ[u] {
            level[v] = level[v].max(level[u] + 1);
            indeg[v] -= 1;
            if indeg[v] == 0 {
                queue.push(v);
            }
        }
    }
    level.into_iter().max().unwrap_or(0)
}

#[test]
fn two_layer_depth_matches_topological_oracle() {
    let tree = build_tree(2).unwrap();
    for scheme in FULL_SCHEMES {
        let q = compile_query(&tree, Mode::Full, scheme, &CompileOptions::default()).unwrap();
        assert_eq!(q.counts.2, topo_depth(&q.circuit), "{scheme}");
        assert_eq!(q.groups.len(), q.counts.2);
    }
    let q = compile_query(&tree, Mode::ReadOnly, CompileScheme::SpTcg, &CompileOptions::default()).unwrap();
    assert_eq!(q.counts.2, topo_depth(&q.circuit));
}

#[test]
fn groups_are_site_disjoint_and_cover_the_circuit() {
    let tree = build_tree(2).unwrap();
    for scheme in FULL_SCHEMES {
        let q = compile_query(&tree, Mode::Full, scheme, &CompileOptions::default()).unwrap();
        let mut total = 0;
        for g in &q.groups {
            let mut seen = HashSet::new();
            for spec in g {
                for &s in &spec.sites {
                    assert!(seen.insert(s), "site {s} twice in a group");
                }
            }
            total += g.iter().filter(|s| !s.kind.is_virtual()).count();
        }
        assert_eq!(total, q.counts.0 + q.counts.1);
    }
}

#[test]
fn query_latency_is_uniform_over_addresses() {
    // the schedule never branches on the address or the memory word, and the
    // way back up is as deep as the way down
    let tree = build_tree(2).unwrap();
    for scheme in FULL_SCHEMES {
        let depths: HashSet<(usize, Vec<usize>)> = (0..16u32)
            .map(|w| {
                let memory = (0..4).map(|j| (w >> j) & 1 == 1).collect();
                let q = compile_query(&tree, Mode::Full, scheme, &CompileOptions { memory, ..Default::default() }).unwrap();
                (q.counts.2, q.groups.iter().map(Vec::len).collect())
            })
            .collect();
        assert_eq!(depths.len(), 1, "{scheme}");
        let q = compile_query(&tree, Mode::Full, scheme, &CompileOptions::default()).unwrap();
        let d = |s: &str| q.stage_circuit(s).unwrap().depth();
        assert_eq!(d("route-down"), d("route-up"), "{scheme}");
    }
}

#[test]
fn landscape_noiseless_follows_product_form() {
    let grid: Vec<f64> = (0..7).map(|k| k as f64 * std::f64::consts::PI / 12.0).collect();
    for scheme in [Scheme::NonEraser, Scheme::Eraser] {
        let pts = two_layer_landscape(&grid, &grid, scheme, None, &RouterParams::default()).unwrap();
        assert_eq!(pts.len(), 49);
        for p in pts {
            let want = product_form(p.theta1, p.theta2);
            for k in 0..4 {
                assert!((p.pops[k] - want[k]).abs() < 1e-10, "{scheme:?} {p:?}");
            }
        }
    }
    let half = std::f64::consts::FRAC_PI_2;
    let d1 = two_layer_landscape(&[half], &[half], Scheme::NonEraser, None, &RouterParams::default()).unwrap();
    assert!((d1[0].pops[0] - 1.0).abs() < 1e-12);
}

#[test]
fn landscape_noisy_maxima_in_band() {
    let corners = [0.0, std::f64::consts::FRAC_PI_2];
    let pts = two_layer_landscape(&corners, &corners, Scheme::NonEraser, Some(DecayRates::default()), &RouterParams::default())
        .unwrap();
    for k in 0..4 {
        let max = pts.iter().map(|p| p.pops[k]).fold(0.0, f64::max);
        assert!((0.85..=0.97).contains(&max), "D{} max {max}", k + 1);
    }
}

proptest! {
    #[test]
    fn counts_are_additive(layers in 1usize..4) {
        let tree = build_tree(layers).unwrap();
        let q = compile_query(&tree, Mode::Full, CompileScheme::TcgEraser, &CompileOptions::default()).unwrap();
        let (mut a, mut b) = (0, 0);
        for s in &q.stages {
            let (x, y) = q.stage_circuit(s.name).unwrap().gate_counts();
            a += x;
            b += y;
        }
        prop_assert_eq!((a, b), (q.counts.0, q.counts.1));
        // stages tile the op list
        prop_assert_eq!(q.stages.first().unwrap().start, 0);
        prop_assert_eq!(q.stages.last().unwrap().end, q.circuit.ops().len());
        for w in q.stages.windows(2) {
            prop_assert_eq!(w[0].end, w[1].start);
        }
    }
}
