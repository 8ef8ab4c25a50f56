//! Small dense graphs with bitmask adjacency.
//!
//! Vertex ids are `0..n` with `n <= 32`, so every vertex set fits in a `u64`
//! and the exhaustive subset enumerations used by the oracles stay cheap.

/// Hard cap on the vertex count so vertex sets fit in a `u64` mask.
pub const MAX_VERTS: usize = 32;

/// Iterate over the set bits of a mask as vertex ids.
pub fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(v)
        }
    })
}

/// Undirected simple graph on `0..n` stored as one adjacency mask per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactGraph {
    n: usize,
    adj: Vec<u64>,
}

impl CompactGraph {
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_VERTS, "oracle graphs are capped at {MAX_VERTS} vertices");
        CompactGraph { n, adj: vec![0; n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = CompactGraph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n);
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u] &= !(1 << v);
        self.adj[v] &= !(1 << u);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u] & (1 << v) != 0
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    /// Adjacency mask of `v`.
    pub fn adj(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    /// All edges as (u, v) with u < v, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in bits(self.adj[u]) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Mask of all n vertices.
    pub fn full_mask(&self) -> u64 {
        if self.n == 64 {
            !0
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// Is the subgraph induced by `mask` connected? Empty and singleton
    /// masks count as connected.
    pub fn is_connected_within(&self, mask: u64) -> bool {
        if mask == 0 {
            return true;
        }
        let start = mask.trailing_zeros() as usize;
        let mut seen = 1u64 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0;
            for v in bits(frontier) {
                next |= self.adj[v] & mask & !seen;
            }
            seen |= next;
            frontier = next;
        }
        seen == mask
    }

    /// Connected components of the subgraph induced by `mask`, as masks.
    pub fn components_within(&self, mask: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut rest = mask;
        while rest != 0 {
            let start = rest.trailing_zeros() as usize;
            let mut comp = 1u64 << start;
            let mut frontier = comp;
            while frontier != 0 {
                let mut next = 0;
                for v in bits(frontier) {
                    next |= self.adj[v] & mask & !comp;
                }
                comp |= next;
                frontier = next;
            }
            out.push(comp);
            rest &= !comp;
        }
        out
    }

    /// Connected components of the whole graph.
    pub fn components(&self) -> Vec<u64> {
        self.components_within(self.full_mask())
    }

    /// Component mask containing `v`.
    pub fn component_of(&self, v: usize) -> u64 {
        self.components_within(self.full_mask())
            .into_iter()
            .find(|c| c & (1 << v) != 0)
            .unwrap()
    }

    /// Induced subgraph on `mask`, relabelled to 0..k. Returns the subgraph
    /// together with the original id of each new vertex.
    pub fn induced(&self, mask: u64) -> (CompactGraph, Vec<usize>) {
        let verts: Vec<usize> = bits(mask).collect();
        let mut g = CompactGraph::new(verts.len());
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate() {
                if i < j && self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        (g, verts)
    }
}
