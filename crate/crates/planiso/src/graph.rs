//! The dynamic host graph.
//!
//! A fixed vertex universe `0..n` with an undirected simple edge set that
//! changes one edge at a time. Everything downstream (decomposition trees,
//! Tutte bundles) observes the graph through this type, so it stays
//! deliberately small: adjacency sets, change events, and the co-k-connectivity
//! change taxonomy. Deterministic iteration order everywhere (BTree backed);
//! the engine's answers must be reproducible run to run.

use crate::EngineError;
use std::collections::BTreeSet;

pub type VertexId = usize;

/// Undirected simple graph on the fixed universe `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicGraph {
    adj: Vec<BTreeSet<VertexId>>,
    m: usize,
}

impl DynamicGraph {
    pub fn new(n: usize) -> Self {
        DynamicGraph { adj: vec![BTreeSet::new(); n], m: 0 }
    }

    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Self {
        let mut g = DynamicGraph::new(n);
        for &(u, v) in edges {
            g.toggle(ChangeEvent::insert(u, v)).expect("edge list must be simple and in range");
        }
        g
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.n() && self.adj[u].contains(&v)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj[v].iter().copied()
    }

    /// All edges as (min, max) pairs in lexicographic order.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n() {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Applies the event to a copy, leaving `self` untouched.
    pub fn apply_change(&self, e: ChangeEvent) -> Result<DynamicGraph, EngineError> {
        let mut g = self.clone();
        g.toggle(e)?;
        Ok(g)
    }

    /// In-place variant used by the session once an event is validated.
    pub(crate) fn toggle(&mut self, e: ChangeEvent) -> Result<(), EngineError> {
        let (u, v) = (e.u, e.v);
        if u == v || u >= self.n() || v >= self.n() {
            return Err(EngineError::IllegalChange);
        }
        match e.kind {
            ChangeKind::Insert => {
                if self.has_edge(u, v) {
                    return Err(EngineError::IllegalChange);
                }
                self.adj[u].insert(v);
                self.adj[v].insert(u);
                self.m += 1;
            }
            ChangeKind::Delete => {
                if !self.has_edge(u, v) {
                    return Err(EngineError::IllegalChange);
                }
                self.adj[u].remove(&v);
                self.adj[v].remove(&u);
                self.m -= 1;
            }
        }
        Ok(())
    }

    pub fn connected(&self, u: VertexId, v: VertexId) -> bool {
        self.component_of(u).contains(&v)
    }

    /// Vertices reachable from `v`, including `v` itself.
    pub fn component_of(&self, v: VertexId) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![v];
        seen.insert(v);
        while let Some(x) = stack.pop() {
            for &y in &self.adj[x] {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Connected components as sorted vertex sets, in order of their minima.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut out = Vec::new();
        let mut seen = vec![false; self.n()];
        for v in 0..self.n() {
            if !seen[v] {
                let comp = self.component_of(v);
                for &x in &comp {
                    seen[x] = true;
                }
                out.push(comp);
            }
        }
        out
    }

    /// Biconnected components (blocks) of the whole graph, each given as its
    /// edge list. Classic one-pass lowpoint computation with an explicit
    /// stack of edges. Isolated vertices contribute nothing.
    pub fn blocks(&self) -> Vec<Vec<(VertexId, VertexId)>> {
        struct Frame {
            v: VertexId,
            parent: Option<VertexId>,
            nbrs: Vec<VertexId>,
            idx: usize,
        }

        let n = self.n();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut timer = 0usize;
        let mut edge_stack: Vec<(VertexId, VertexId)> = Vec::new();
        let mut blocks = Vec::new();

        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            let mut frames = vec![Frame {
                v: root,
                parent: None,
                nbrs: self.adj[root].iter().copied().collect(),
                idx: 0,
            }];
            while !frames.is_empty() {
                let (v, step) = {
                    let f = frames.last_mut().expect("frames checked non-empty");
                    if f.idx < f.nbrs.len() {
                        let w = f.nbrs[f.idx];
                        f.idx += 1;
                        (f.v, Some((w, f.parent)))
                    } else {
                        (f.v, None)
                    }
                };
                match step {
                    Some((w, parent)) => {
                        if disc[w] == usize::MAX {
                            edge_stack.push((v, w));
                            disc[w] = timer;
                            low[w] = timer;
                            timer += 1;
                            frames.push(Frame {
                                v: w,
                                parent: Some(v),
                                nbrs: self.adj[w].iter().copied().collect(),
                                idx: 0,
                            });
                        } else if Some(w) != parent && disc[w] < disc[v] {
                            edge_stack.push((v, w));
                            low[v] = low[v].min(disc[w]);
                        }
                    }
                    None => {
                        frames.pop();
                        if let Some(pf) = frames.last_mut() {
                            let p = pf.v;
                            low[p] = low[p].min(low[v]);
                            if low[v] >= disc[p] {
                                // p cuts off the subtree at v: everything above
                                // the tree edge (p, v) on the stack is one block.
                                let mut block = Vec::new();
                                while let Some(e) = edge_stack.pop() {
                                    block.push(e);
                                    if e == (p, v) {
                                        break;
                                    }
                                }
                                blocks.push(block);
                            }
                        }
                    }
                }
            }
        }
        for b in &mut blocks {
            for e in b.iter_mut() {
                if e.0 > e.1 {
                    *e = (e.1, e.0);
                }
            }
            b.sort_unstable();
        }
        blocks.sort_unstable();
        blocks
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChangeKind {
    Insert,
    Delete,
}

/// One edge insertion or deletion. Endpoints are kept sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChangeEvent {
    pub kind: ChangeKind,
    pub u: VertexId,
    pub v: VertexId,
}

impl ChangeEvent {
    pub fn insert(u: VertexId, v: VertexId) -> Self {
        ChangeEvent { kind: ChangeKind::Insert, u: u.min(v), v: u.max(v) }
    }

    pub fn delete(u: VertexId, v: VertexId) -> Self {
        ChangeEvent { kind: ChangeKind::Delete, u: u.min(v), v: u.max(v) }
    }
}

/// Classification of a change by the co-connectivity of its endpoints
/// before and after: 0 = different connected components, 1 = same connected
/// component, 2 = same biconnected component, 3 = same rigid (3-connected)
/// triconnected component. Cycle components never count as co-3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChangeType {
    pub kind: ChangeKind,
    pub before: u8,
    pub after: u8,
}

impl ChangeType {
    pub fn new(kind: ChangeKind, before: u8, after: u8) -> Self {
        ChangeType { kind, before, after }
    }
}

impl std::fmt::Display for ChangeType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sign = match self.kind {
            ChangeKind::Insert => '+',
            ChangeKind::Delete => '-',
        };
        write!(f, "{}({},{})", sign, self.before, self.after)
    }
}
