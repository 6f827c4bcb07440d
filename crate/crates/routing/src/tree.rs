use crate::{Result, RoutingError};

/// Largest tree the density-matrix simulator handles.
pub const MAX_SIM_LAYERS: usize = 2;

/// Sites of one router.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeBinding {
    pub input: usize,
    pub control: usize,
    pub left: usize,
    pub right: usize,
}

/// Routers in heap order (node 1 is the root, node n has children 2n and
/// 2n+1). Sites: the root input first, then for each layer its controls
/// followed by its outputs, so a two-layer tree reads
/// I, C1, L, R, C2, C3, D1, D2, D3, D4.
#[derive(Clone, Debug, PartialEq)]
pub struct RoutingTree {
    layers: usize,
    nodes: Vec<NodeBinding>,
    n_sites: usize,
}

pub fn build_tree(layers: usize) -> Result<RoutingTree> {
    if layers == 0 {
        return Err(RoutingError::NoLayers);
    }
    let n_nodes = (1usize << layers) - 1;
    let mut nodes = vec![NodeBinding { input: 0, control: 0, left: 0, right: 0 }; n_nodes];
    let mut next = 1;
    for layer in 1..=layers {
        let first = 1usize << (layer - 1);
        let count = first;
        for k in 0..count {
            nodes[first + k - 1].control = next + k;
        }
        next += count;
        for k in 0..count {
            let n = first + k;
            nodes[n - 1].left = next + 2 * k;
            nodes[n - 1].right = next + 2 * k + 1;
        }
        next += 2 * count;
    }
    for n in 1..=n_nodes {
        nodes[n - 1].input = if n == 1 {
            0
        } else {
            let p = nodes[n / 2 - 1];
            if n % 2 == 0 {
                p.left
            } else {
                p.right
            }
        };
    }
    Ok(RoutingTree { layers, nodes, n_sites: next })
}

impl RoutingTree {
    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn n_routers(&self) -> usize {
        self.nodes.len()
    }

    /// Input, controls, bus and leaf sites.
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn input(&self) -> usize {
        0
    }

    /// Binding of heap node `n` (1-based).
    pub fn node(&self, n: usize) -> NodeBinding {
        self.nodes[n - 1]
    }

    /// Heap indices of the routers in `layer` (1-based).
    pub fn layer_nodes(&self, layer: usize) -> std::ops::Range<usize> {
        (1 << (layer - 1))..(1 << layer)
    }

    pub fn controls(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.control).collect()
    }

    /// Leaf (data) sites, left to right.
    pub fn leaves(&self) -> Vec<usize> {
        self.layer_nodes(self.layers).flat_map(|n| [self.node(n).left, self.node(n).right]).collect()
    }

    pub fn n_leaves(&self) -> usize {
        1 << self.layers
    }

    /// Heap nodes visited on the way to leaf `leaf` (0-based, left to right),
    /// root first, with the branch taken at each (true = left).
    pub fn path(&self, leaf: usize) -> Vec<(usize, bool)> {
        let mut out = Vec::with_capacity(self.layers);
        let mut n = 1;
        for depth in (0..self.layers).rev() {
            // most significant bit picks the branch at the root; 0 = left
            let left = (leaf >> depth) & 1 == 0;
            out.push((n, left));
            n = 2 * n + if left { 0 } else { 1 };
        }
        out
    }

    /// Fails if the tree is too large to simulate densely.
    pub fn check_simulable(&self) -> Result<()> {
        if self.layers > MAX_SIM_LAYERS {
            return Err(RoutingError::Capacity { layers: self.layers, max: MAX_SIM_LAYERS });
        }
        Ok(())
    }
}
