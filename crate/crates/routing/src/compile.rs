use crate::{NodeBinding, Result, RoutingError, RoutingTree};
use qroutesim_gates::{
    flip_gates, qrouter_gates, sp_cswap_gates, Circuit, GateKind, GateSpec, Op, RouterParams,
    RouterSites, Scheme, SpBasis,
};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Load, route the bus down, flip it on the leaf, route it back up, unload.
    Full,
    /// Leaves write their bit, one-way transfer up to the root.
    ReadOnly,
    /// One-way transfer of the bus value down to the addressed leaf.
    WriteOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompileScheme {
    /// Qubit-only baseline: X flips and Toffoli-based Fredkin gates.
    Clifford,
    TcgNonEraser,
    TcgEraser,
    /// Two-pulse one-way CSWAPs; read-only and write-only modes only.
    SpTcg,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::ReadOnly => "read-only",
            Mode::WriteOnly => "write-only",
        })
    }
}

impl fmt::Display for CompileScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompileScheme::Clifford => "clifford",
            CompileScheme::TcgNonEraser => "tcg-non-eraser",
            CompileScheme::TcgEraser => "tcg-eraser",
            CompileScheme::SpTcg => "sp-tcg",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "full" => Ok(Mode::Full),
            "read-only" | "read" | "qrom" => Ok(Mode::ReadOnly),
            "write-only" | "write" | "qwom" => Ok(Mode::WriteOnly),
            _ => Err(format!("unknown mode {s:?} (full | read-only | write-only)")),
        }
    }
}

impl std::str::FromStr for CompileScheme {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "clifford" => Ok(CompileScheme::Clifford),
            "tcg-non-eraser" => Ok(CompileScheme::TcgNonEraser),
            "tcg-eraser" => Ok(CompileScheme::TcgEraser),
            "sp-tcg" => Ok(CompileScheme::SpTcg),
            _ => Err(format!("unknown scheme {s:?} (clifford | tcg-non-eraser | tcg-eraser | sp-tcg)")),
        }
    }
}

impl CompileScheme {
    fn router_scheme(self) -> Scheme {
        match self {
            CompileScheme::TcgEraser => Scheme::Eraser,
            // a one-way transfer is only clean out of control |1⟩
            _ => Scheme::NonEraser,
        }
    }

    fn is_qubit_only(self) -> bool {
        self == CompileScheme::Clifford
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompileOptions {
    pub router: RouterParams,
    /// Classical memory, one bit per leaf (left to right). Empty = all zero.
    pub memory: Vec<bool>,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { router: RouterParams::default(), memory: Vec::new() }
    }
}

/// Half-open op-index range of a named stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRange {
    pub name: &'static str,
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompiledQuery {
    pub mode: Mode,
    pub scheme: CompileScheme,
    pub circuit: Circuit,
    /// (N1q, N2q, depth).
    pub counts: (usize, usize, usize),
    /// ASAP parallel groups G_0, G_1, …
    pub groups: Vec<Vec<GateSpec>>,
    pub stages: Vec<StageRange>,
    /// Bus qubit the query result is read from / the written value comes from.
    pub bus_site: usize,
    /// Address input qubits, root layer first.
    pub address_sites: Vec<usize>,
}

impl CompiledQuery {
    pub fn stage(&self, name: &str) -> Option<&StageRange> {
        self.stages.iter().find(|s| s.name == name)
    }

    /// Sub-circuit of one stage.
    pub fn stage_circuit(&self, name: &str) -> Option<Circuit> {
        let r = self.stage(name)?;
        let mut c = Circuit::new(self.circuit.dims());
        for op in &self.circuit.ops()[r.start..r.end] {
            c.push(op.clone()).expect("ops came from a circuit on these dims");
        }
        Some(c)
    }
}

/// (N1q, N2q, depth) with every gate one depth unit; virtual phases are free.
pub fn gate_counts(c: &Circuit) -> (usize, usize, usize) {
    let (a, b) = c.gate_counts();
    (a, b, c.depth())
}

fn cx(control: usize, target: usize, ns: f64) -> Op {
    Op::Gate(GateSpec::new(GateKind::Cx, &[control, target], ns))
}

fn single(kind: GateKind, site: usize, ns: f64) -> Op {
    Op::Gate(GateSpec::new(kind, &[site], ns))
}

/// Toffoli(a, b → c) in the 6-CX, 7-T form (exact, no relative phase).
fn toffoli_ops(a: usize, b: usize, t: usize, p: &RouterParams) -> Vec<Op> {
    let (s, d) = (p.single_ns, p.sqrt_cz.duration_ns);
    vec![
        single(GateKind::H, t, s),
        cx(b, t, d),
        single(GateKind::Tdg, t, s),
        cx(a, t, d),
        single(GateKind::T, t, s),
        cx(b, t, d),
        single(GateKind::Tdg, t, s),
        cx(a, t, d),
        single(GateKind::T, t, s),
        single(GateKind::H, t, s),
        cx(a, b, d),
        single(GateKind::Tdg, b, s),
        cx(a, b, d),
        single(GateKind::T, a, s),
        single(GateKind::T, b, s),
    ]
}

/// Fredkin(ctl; x ↔ y) = CX(y→x) · Toffoli(ctl, x → y) · CX(y→x).
fn fredkin_ops(ctl: usize, x: usize, y: usize, p: &RouterParams) -> Vec<Op> {
    let mut ops = vec![cx(y, x, p.sqrt_cz.duration_ns)];
    ops.extend(toffoli_ops(ctl, x, y, p));
    ops.push(cx(y, x, p.sqrt_cz.duration_ns));
    ops
}

/// Qubit-only router: X(C), Fredkin(C; I, R), X(C), Fredkin(C; I, L) with a
/// barrier between the four stages.
pub fn clifford_router(b: NodeBinding, p: &RouterParams) -> Vec<Op> {
    let mut ops = vec![single(GateKind::X, b.control, p.single_ns), Op::Barrier];
    ops.extend(fredkin_ops(b.control, b.input, b.right, p));
    ops.push(Op::Barrier);
    ops.push(single(GateKind::X, b.control, p.single_ns));
    ops.push(Op::Barrier);
    ops.extend(fredkin_ops(b.control, b.input, b.left, p));
    ops
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Direction {
    /// Two-way router (full CSWAPs).
    Both,
    /// One-way parent → child.
    Down,
    /// One-way child → parent.
    Up,
}

/// One router's ops. One-way directions are SP-CSWAPs under SP-TCG and
/// ordinary routers otherwise.
pub fn router_stage(b: NodeBinding, scheme: CompileScheme, p: &RouterParams, up: bool) -> Vec<Op> {
    router_ops(b, scheme, p, if up { Direction::Up } else { Direction::Down })
}

fn router_ops(b: NodeBinding, scheme: CompileScheme, p: &RouterParams, dir: Direction) -> Vec<Op> {
    if scheme == CompileScheme::Clifford {
        return clifford_router(b, p);
    }
    let rs = scheme.router_scheme();
    if scheme != CompileScheme::SpTcg || dir == Direction::Both {
        let sites = RouterSites { input: b.input, control: b.control, left: b.left, right: b.right };
        return qrouter_gates(rs, sites, p).into_iter().map(Op::Gate).collect();
    }
    // Q1 = child, Q2 = parent; out of control |1⟩, B01 moves Q1 → Q2 and B02
    // moves Q2 → Q1, each exact when the target is empty
    let basis = if dir == Direction::Down { SpBasis::B02 } else { SpBasis::B01 };
    let mut out = flip_gates(rs, b.control, p);
    out.extend(sp_cswap_gates(basis, b.right, b.control, b.input, &p.sqrt_cz));
    out.extend(flip_gates(rs, b.control, p));
    out.extend(sp_cswap_gates(basis, b.left, b.control, b.input, &p.sqrt_cz));
    out.into_iter().map(Op::Gate).collect()
}

/// Moves a {0,1} value from `src` onto an empty `tgt`. Clifford: SWAP as
/// three CX. TCG: one √CZ between flips on the target; `to_level2` leaves the
/// value encoded as |0⟩/|2⟩ on the target (eraser address), otherwise as |0⟩/|1⟩.
pub fn transfer_gates(scheme: CompileScheme, src: usize, tgt: usize, to_level2: bool, p: &RouterParams) -> Vec<Op> {
    if scheme.is_qubit_only() {
        let d = p.sqrt_cz.duration_ns;
        return vec![cx(src, tgt, d), cx(tgt, src, d), cx(src, tgt, d)];
    }
    let x01 = || single(GateKind::X01 { phase: p.phi01 }, tgt, p.single_ns);
    let mut ops = vec![x01(), Op::Gate(GateSpec::sqrt_cz(src, tgt, &p.sqrt_cz)), x01()];
    if !to_level2 {
        ops.push(single(GateKind::X12 { phase: p.phi12 }, tgt, p.single_ns));
    }
    ops
}

struct Builder<'a> {
    tree: &'a RoutingTree,
    scheme: CompileScheme,
    p: &'a RouterParams,
    circ: Circuit,
    stages: Vec<StageRange>,
}

impl Builder<'_> {
    fn push_all(&mut self, ops: Vec<Op>) -> Result<()> {
        for op in ops {
            self.circ.push(op)?;
        }
        Ok(())
    }

    fn stage<F: FnOnce(&mut Self) -> Result<()>>(&mut self, name: &'static str, f: F) -> Result<()> {
        let start = self.circ.ops().len();
        f(self)?;
        self.stages.push(StageRange { name, start, end: self.circ.ops().len() });
        Ok(())
    }

    fn layer(&mut self, layer: usize, dir: Direction) -> Result<()> {
        for n in self.tree.layer_nodes(layer) {
            let ops = router_ops(self.tree.node(n), self.scheme, self.p, dir);
            self.push_all(ops)?;
        }
        Ok(())
    }

    fn ops_since(&self, start: usize) -> Vec<Op> {
        self.circ.ops()[start..].to_vec()
    }
}

fn invert_ops(dims: &[usize], ops: &[Op]) -> Result<Vec<Op>> {
    let mut c = Circuit::new(dims);
    for op in ops {
        c.push(op.clone())?;
    }
    Ok(c.inverse()?.ops().to_vec())
}

/// Compiles one query on `tree`. Sites beyond the tree: the bus qubit, then
/// one address input qubit per layer. Address bit k (1 = left branch) enters
/// through the root input, is routed through layers 1..k−1 and transferred
/// into every layer-k control.
pub fn compile_query(tree: &RoutingTree, mode: Mode, scheme: CompileScheme, opts: &CompileOptions) -> Result<CompiledQuery> {
    if scheme == CompileScheme::SpTcg && mode == Mode::Full {
        return Err(RoutingError::IncompatibleMode { mode: mode.to_string(), scheme: scheme.to_string() });
    }
    let n_leaves = tree.n_leaves();
    if !opts.memory.is_empty() && opts.memory.len() != n_leaves {
        return Err(RoutingError::MemorySize { want: n_leaves, got: opts.memory.len() });
    }
    let bus = tree.n_sites();
    let address_sites: Vec<usize> = (0..tree.layers()).map(|k| bus + 1 + k).collect();
    let mut dims = vec![2; bus + 1 + tree.layers()];
    if !scheme.is_qubit_only() {
        for c in tree.controls() {
            dims[c] = 3;
        }
        // transfer targets hold the intermediate |2⟩
        dims[tree.input()] = 3;
        dims[bus] = 3;
    }
    let p = &opts.router;
    let eraser = scheme.router_scheme() == Scheme::Eraser;
    let one_way = if scheme == CompileScheme::SpTcg { (Direction::Down, Direction::Up) } else { (Direction::Both, Direction::Both) };
    let mut b = Builder { tree, scheme, p, circ: Circuit::new(&dims), stages: vec![] };

    b.stage("load", |b| {
        for k in 1..=tree.layers() {
            b.push_all(transfer_gates(scheme, address_sites[k - 1], tree.input(), false, p))?;
            for l in 1..k {
                b.layer(l, one_way.0)?;
            }
            for n in tree.layer_nodes(k) {
                let node = tree.node(n);
                b.push_all(transfer_gates(scheme, node.input, node.control, eraser, p))?;
            }
        }
        Ok(())
    })?;
    let load_ops = b.ops_since(0);

    let write_leaves = |b: &mut Builder| -> Result<()> {
        for (j, leaf) in tree.leaves().into_iter().enumerate() {
            let bit = opts.memory.get(j).copied().unwrap_or(false);
            b.circ.push(Op::Gate(GateSpec::new(GateKind::ClassicalX { bit }, &[leaf], p.single_ns)))?;
        }
        Ok(())
    };

    match mode {
        Mode::Full => {
            // phase query: the bus enters in |+⟩, only the routed excitation
            // sees Z^m at its leaf, so the off-path leaves stay empty
            let start = b.circ.ops().len();
            b.stage("inject", |b| {
                b.circ.push(single(GateKind::H, bus, p.single_ns))?;
                b.push_all(transfer_gates(scheme, bus, tree.input(), false, p))
            })?;
            let inject = b.ops_since(start);
            let start = b.circ.ops().len();
            b.stage("route-down", |b| (1..=tree.layers()).try_for_each(|l| b.layer(l, Direction::Both)))?;
            let down = b.ops_since(start);
            b.stage("data", |b| {
                for (j, leaf) in tree.leaves().into_iter().enumerate() {
                    let bit = opts.memory.get(j).copied().unwrap_or(false);
                    b.circ.push(single(GateKind::H, leaf, p.single_ns))?;
                    b.circ.push(single(GateKind::ClassicalX { bit }, leaf, p.single_ns))?;
                    b.circ.push(single(GateKind::H, leaf, p.single_ns))?;
                }
                Ok(())
            })?;
            b.stage("route-up", |b| b.push_all(invert_ops(&dims, &down)?))?;
            // exact inverse of the injection, so transfer phases cancel
            b.stage("readout", |b| b.push_all(invert_ops(&dims, &inject)?))?;
        }
        Mode::ReadOnly => {
            b.stage("data", write_leaves)?;
            b.stage("route-up", |b| (1..=tree.layers()).rev().try_for_each(|l| b.layer(l, one_way.1)))?;
            b.stage("readout", |b| b.push_all(transfer_gates(scheme, tree.input(), bus, false, p)))?;
        }
        Mode::WriteOnly => {
            b.stage("inject", |b| b.push_all(transfer_gates(scheme, bus, tree.input(), false, p)))?;
            b.stage("route-down", |b| (1..=tree.layers()).try_for_each(|l| b.layer(l, one_way.0)))?;
        }
    }
    b.stage("unload", |b| b.push_all(invert_ops(&dims, &load_ops)?))?;

    let circuit = b.circ;
    let groups = circuit
        .steps()
        .into_iter()
        .filter_map(|s| match s {
            qroutesim_gates::Step::Layer(l) if !l.gates.is_empty() => Some(l.gates),
            _ => None,
        })
        .collect();
    Ok(CompiledQuery {
        mode,
        scheme,
        counts: gate_counts(&circuit),
        circuit,
        groups,
        stages: b.stages,
        bus_site: bus,
        address_sites,
    })
}
