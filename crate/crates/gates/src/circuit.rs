use crate::{GateError, GateKind, GateSpec, Result};
use qroutesim_core::{embed, DMatrix, C64};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    Gate(GateSpec),
    /// Scheduling fence: nothing after it starts before everything before it ends.
    Barrier,
    /// Discard the branch where `site` is in level `forbidden`, renormalise.
    PostSelect { site: usize, forbidden: usize },
}

/// One time slice of a scheduled circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    /// Virtual (zero-duration) gates applied at the start of the layer.
    pub virtual_gates: Vec<GateSpec>,
    /// Physical gates on disjoint sites.
    pub gates: Vec<GateSpec>,
    /// Longest gate in the layer.
    pub duration_ns: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Layer(Layer),
    PostSelect { site: usize, forbidden: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    dims: Vec<usize>,
    ops: Vec<Op>,
}

impl Circuit {
    pub fn new(dims: &[usize]) -> Self {
        Circuit { dims: dims.to_vec(), ops: Vec::new() }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn gates(&self) -> impl Iterator<Item = &GateSpec> {
        self.ops.iter().filter_map(|op| match op {
            Op::Gate(g) => Some(g),
            _ => None,
        })
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.dims.len() {
            return Err(GateError::SiteOutOfRange { site, n: self.dims.len() });
        }
        Ok(())
    }

    pub fn push(&mut self, op: Op) -> Result<&mut Self> {
        match &op {
            Op::Gate(g) => {
                if g.sites.len() != g.kind.arity() {
                    return Err(GateError::Arity { gate: g.kind.name(), want: g.kind.arity(), got: g.sites.len() });
                }
                for &s in &g.sites {
                    self.check_site(s)?;
                }
                if g.sites.len() == 2 && g.sites[0] == g.sites[1] {
                    return Err(GateError::InvalidParam(format!("{} on repeated site {}", g.kind.name(), g.sites[0])));
                }
                if !(g.duration_ns >= 0.0) {
                    return Err(GateError::InvalidParam(format!("negative duration {}", g.duration_ns)));
                }
                // fail early on gates that cannot act on these dimensions
                g.matrix(&self.dims)?;
            }
            Op::PostSelect { site, forbidden } => {
                self.check_site(*site)?;
                if *forbidden >= self.dims[*site] {
                    return Err(GateError::InvalidParam(format!("level {forbidden} absent on site {site}")));
                }
            }
            Op::Barrier => {}
        }
        self.ops.push(op);
        Ok(self)
    }

    pub fn gate(&mut self, kind: GateKind, sites: &[usize], duration_ns: f64) -> Result<&mut Self> {
        self.push(Op::Gate(GateSpec::new(kind, sites, duration_ns)))
    }

    pub fn barrier(&mut self) -> &mut Self {
        self.ops.push(Op::Barrier);
        self
    }

    pub fn postselect(&mut self, site: usize, forbidden: usize) -> Result<&mut Self> {
        self.push(Op::PostSelect { site, forbidden })
    }

    /// Appends `other`, sending its site k to `map[k]` of this circuit.
    pub fn append(&mut self, other: &Circuit, map: &[usize]) -> Result<&mut Self> {
        if map.len() != other.n_sites() {
            return Err(GateError::InvalidParam(format!(
                "site map has {} entries for a {}-site circuit",
                map.len(),
                other.n_sites()
            )));
        }
        for (k, &m) in map.iter().enumerate() {
            self.check_site(m)?;
            if self.dims[m] < other.dims[k] {
                return Err(GateError::InvalidParam(format!(
                    "site {k} (dim {}) mapped onto site {m} (dim {})",
                    other.dims[k], self.dims[m]
                )));
            }
        }
        for op in &other.ops {
            let op = match op {
                Op::Gate(g) => Op::Gate(GateSpec {
                    kind: g.kind,
                    sites: g.sites.iter().map(|&s| map[s]).collect(),
                    duration_ns: g.duration_ns,
                }),
                Op::Barrier => Op::Barrier,
                Op::PostSelect { site, forbidden } => Op::PostSelect { site: map[*site], forbidden: *forbidden },
            };
            self.push(op)?;
        }
        Ok(self)
    }

    /// Reverse-order adjoint. Post-selection has no inverse.
    pub fn inverse(&self) -> Result<Circuit> {
        let mut ops = Vec::with_capacity(self.ops.len());
        for op in self.ops.iter().rev() {
            ops.push(match op {
                Op::Gate(g) => Op::Gate(g.inverse()),
                Op::Barrier => Op::Barrier,
                Op::PostSelect { .. } => return Err(GateError::NotUnitary),
            });
        }
        Ok(Circuit { dims: self.dims.clone(), ops })
    }

    /// (single-site, two-site) physical gate counts; virtual Z is free.
    pub fn gate_counts(&self) -> (usize, usize) {
        self.gates().filter(|g| !g.kind.is_virtual()).fold((0, 0), |(a, b), g| {
            if g.kind.arity() == 1 {
                (a + 1, b)
            } else {
                (a, b + 1)
            }
        })
    }

    /// Histogram by gate name.
    pub fn gate_histogram(&self) -> BTreeMap<String, usize> {
        let mut h = BTreeMap::new();
        for g in self.gates().filter(|g| !g.kind.is_virtual()) {
            *h.entry(g.kind.name()).or_insert(0) += 1;
        }
        h
    }

    /// Layer index of every physical gate under as-soon-as-possible
    /// scheduling with barriers as fences.
    fn asap(&self) -> Vec<Option<usize>> {
        let mut front = vec![0usize; self.dims.len()];
        let mut fence = 0usize;
        let mut out = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            match op {
                Op::Gate(g) if !g.kind.is_virtual() => {
                    let start = g.sites.iter().map(|&s| front[s]).max().unwrap_or(0).max(fence);
                    for &s in &g.sites {
                        front[s] = start + 1;
                    }
                    out.push(Some(start));
                }
                Op::Gate(_) => out.push(None),
                Op::Barrier | Op::PostSelect { .. } => {
                    fence = front.iter().copied().max().unwrap_or(0).max(fence);
                    out.push(None);
                }
            }
        }
        out
    }

    /// Number of layers in the ASAP schedule.
    pub fn depth(&self) -> usize {
        self.asap().into_iter().flatten().map(|l| l + 1).max().unwrap_or(0)
    }

    /// ASAP schedule as a list of layers; a post-selection is its own step.
    /// Virtual gates ride at the start of the next layer touching their site.
    pub fn steps(&self) -> Vec<Step> {
        let slots = self.asap();
        let mut steps = Vec::new();
        let mut layers: BTreeMap<usize, Layer> = BTreeMap::new();
        let mut pending_virtual: Vec<GateSpec> = Vec::new();
        let flush = |layers: &mut BTreeMap<usize, Layer>, pending: &mut Vec<GateSpec>, steps: &mut Vec<Step>| {
            if !pending.is_empty() {
                layers
                    .entry(usize::MAX)
                    .or_insert_with(|| Layer { virtual_gates: vec![], gates: vec![], duration_ns: 0.0 })
                    .virtual_gates
                    .append(pending);
            }
            for (_, l) in std::mem::take(layers) {
                steps.push(Step::Layer(l));
            }
        };
        for (op, slot) in self.ops.iter().zip(slots) {
            match (op, slot) {
                (Op::Gate(g), Some(l)) => {
                    let layer = layers
                        .entry(l)
                        .or_insert_with(|| Layer { virtual_gates: vec![], gates: vec![], duration_ns: 0.0 });
                    let (mine, rest): (Vec<_>, Vec<_>) =
                        pending_virtual.drain(..).partition(|v| v.sites.iter().any(|s| g.sites.contains(s)));
                    pending_virtual = rest;
                    layer.virtual_gates.extend(mine);
                    layer.duration_ns = layer.duration_ns.max(g.duration_ns);
                    layer.gates.push(g.clone());
                }
                (Op::Gate(g), None) => pending_virtual.push(g.clone()),
                (Op::PostSelect { site, forbidden }, _) => {
                    flush(&mut layers, &mut pending_virtual, &mut steps);
                    steps.push(Step::PostSelect { site: *site, forbidden: *forbidden });
                }
                (Op::Barrier, _) => {}
            }
        }
        flush(&mut layers, &mut pending_virtual, &mut steps);
        steps
    }

    /// Total scheduled duration.
    pub fn duration_ns(&self) -> f64 {
        self.steps()
            .iter()
            .map(|s| match s {
                Step::Layer(l) => l.duration_ns,
                _ => 0.0,
            })
            .sum()
    }

    /// Full unitary in gate order (later gates multiply on the left).
    pub fn unitary(&self) -> Result<DMatrix<C64>> {
        let n: usize = self.dims.iter().product();
        let mut u = DMatrix::<C64>::identity(n, n);
        for op in &self.ops {
            match op {
                Op::Gate(g) => u = embed(&self.dims, &g.matrix(&self.dims)?, &g.sites)? * u,
                Op::Barrier => {}
                Op::PostSelect { .. } => return Err(GateError::NotUnitary),
            }
        }
        Ok(u)
    }
}
