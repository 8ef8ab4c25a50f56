//! Decomposition trees and their incremental maintenance.
//!
//! A connected graph factors into biconnected blocks glued at cut vertices;
//! a block factors into triconnected components glued at separating pairs
//! (pairs of vertices that disconnect the block and admit three internally
//! disjoint connecting paths). Both factorizations are trees, and a single
//! edge change moves them only locally: a chord splits a cycle component in
//! two, a deletion can splice two cycles back together, unfurl a rigid
//! component into a path of smaller ones, or dissolve a cycle into a chain
//! of blocks. This module holds the tree types, the from-scratch builders
//! that the incremental path is checked against, the change classifier, and
//! the per-case surgery.
//!
//! Components store only their vertex sets. Which edges a component's
//! skeleton carries (induced real edges plus one virtual edge per contained
//! separating pair, a real edge doubling as the virtual one when both exist)
//! is derived on demand from the live graph and the pair set. Keeping edges
//! derived rather than stored means there is no edge list to desynchronize
//! during surgery.

pub mod disk;
mod query;

pub use query::{
    build_bc_tree, common_face_after_insert, coherent_path, cycle_distance, fix_pair_orientation,
    merged_component_graph, predict_unfurl_bc, BCTree, BcNode, CoherentPath,
};

use crate::embedding::{is_planar, is_triconnected};
use crate::graph::{ChangeEvent, ChangeKind, ChangeType, DynamicGraph, VertexId};
use crate::EngineError;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Identifier of a triconnected component within one tri-tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompId(pub u32);

/// Identifier of a biconnected component within a decomposition state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BicompId(pub u32);

/// What a component's skeleton looks like: a chordless cycle, or a
/// 3-connected ("rigid") graph. Nothing else can occur.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TriKind {
    Cycle,
    Rigid,
}

/// A node of a tri-tree: component nodes alternate with separating-pair
/// nodes along every tree path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TriNode {
    Comp(CompId),
    Pair(VertexId, VertexId),
}

pub(crate) fn norm(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    (u.min(v), u.max(v))
}

/// Canonical image of a tri-tree: component vertex sets with kinds, plus the
/// separating pairs. Two trees are label-isomorphic exactly when these agree.
pub type CanonicalTri = (BTreeSet<(Vec<VertexId>, TriKind)>, BTreeSet<(VertexId, VertexId)>);

/// Canonical image of a whole decomposition: per block, its sorted vertex
/// set and the canonical tri-tree (None for trivial single-edge blocks).
pub type CanonicalDecomp = BTreeSet<(Vec<VertexId>, Option<CanonicalTri>)>;

/// Triconnected decomposition tree of one biconnected block.
///
/// `comps` maps component ids to vertex sets; `pairs` is the set of
/// 3-connected separating pairs, kept normalized. A pair node is adjacent to
/// exactly the components containing both its vertices, and conversely any
/// two components overlap in at most a pair. All structure beyond the two
/// fields is derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriTree {
    pub(crate) comps: BTreeMap<CompId, BTreeSet<VertexId>>,
    pub(crate) pairs: BTreeSet<(VertexId, VertexId)>,
    next: u32,
}

impl Default for TriTree {
    fn default() -> Self {
        TriTree::new()
    }
}

impl TriTree {
    pub fn new() -> Self {
        TriTree { comps: BTreeMap::new(), pairs: BTreeSet::new(), next: 0 }
    }

    fn fresh(&mut self) -> CompId {
        let id = CompId(self.next);
        self.next += 1;
        id
    }

    pub(crate) fn insert_comp(&mut self, verts: BTreeSet<VertexId>) -> CompId {
        let id = self.fresh();
        self.comps.insert(id, verts);
        id
    }

    pub fn comps(&self) -> &BTreeMap<CompId, BTreeSet<VertexId>> {
        &self.comps
    }

    pub fn pairs(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.pairs
    }

    pub fn comp_verts(&self, c: CompId) -> &BTreeSet<VertexId> {
        self.comps.get(&c).expect("component id belongs to this tree")
    }

    pub fn is_pair(&self, u: VertexId, v: VertexId) -> bool {
        self.pairs.contains(&norm(u, v))
    }

    pub fn comps_containing(&self, v: VertexId) -> Vec<CompId> {
        self.comps.iter().filter(|(_, vs)| vs.contains(&v)).map(|(&id, _)| id).collect()
    }

    pub fn comps_containing_both(&self, u: VertexId, v: VertexId) -> Vec<CompId> {
        self.comps
            .iter()
            .filter(|(_, vs)| vs.contains(&u) && vs.contains(&v))
            .map(|(&id, _)| id)
            .collect()
    }

    /// Resolves a component by its exact vertex set.
    pub fn comp_by_verts(&self, verts: &BTreeSet<VertexId>) -> Option<CompId> {
        self.comps.iter().find(|(_, vs)| *vs == verts).map(|(&id, _)| id)
    }

    /// Skeleton edges of a component under the live graph: induced real
    /// edges plus contained separating pairs.
    pub fn skeleton(&self, g: &DynamicGraph, c: CompId) -> BTreeSet<(VertexId, VertexId)> {
        self.skeleton_masked(g, c, None)
    }

    fn skeleton_masked(
        &self,
        g: &DynamicGraph,
        c: CompId,
        mask: Option<(VertexId, VertexId)>,
    ) -> BTreeSet<(VertexId, VertexId)> {
        let verts = self.comp_verts(c);
        let mut out = BTreeSet::new();
        for &x in verts {
            for &y in verts.range(x + 1..) {
                if mask == Some((x, y)) {
                    continue;
                }
                if g.has_edge(x, y) || self.pairs.contains(&(x, y)) {
                    out.insert((x, y));
                }
            }
        }
        out
    }

    /// The skeleton as a standalone graph on the host universe.
    pub fn skeleton_graph(&self, g: &DynamicGraph, c: CompId) -> DynamicGraph {
        let edges = self.skeleton(g, c).into_iter().collect::<Vec<_>>();
        DynamicGraph::from_edges(g.n(), &edges)
    }

    pub fn kind(&self, g: &DynamicGraph, c: CompId) -> TriKind {
        self.kind_masked(g, c, None)
    }

    fn kind_masked(&self, g: &DynamicGraph, c: CompId, mask: Option<(VertexId, VertexId)>) -> TriKind {
        let verts = self.comp_verts(c);
        let skel = self.skeleton_masked(g, c, mask);
        let mut deg: BTreeMap<VertexId, usize> = verts.iter().map(|&v| (v, 0)).collect();
        for &(x, y) in &skel {
            *deg.get_mut(&x).expect("skeleton vertex in component") += 1;
            *deg.get_mut(&y).expect("skeleton vertex in component") += 1;
        }
        if verts.len() >= 3 && deg.values().all(|&d| d == 2) {
            TriKind::Cycle
        } else {
            TriKind::Rigid
        }
    }

    /// The vertices of a cycle component in cyclic order, starting at the
    /// smallest vertex and moving toward its smaller skeleton neighbor.
    pub fn cycle_order(&self, g: &DynamicGraph, c: CompId) -> Vec<VertexId> {
        self.cycle_order_masked(g, c, None)
    }

    fn cycle_order_masked(
        &self,
        g: &DynamicGraph,
        c: CompId,
        mask: Option<(VertexId, VertexId)>,
    ) -> Vec<VertexId> {
        let verts = self.comp_verts(c);
        let skel = self.skeleton_masked(g, c, mask);
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> = verts.iter().map(|&v| (v, vec![])).collect();
        for &(x, y) in &skel {
            adj.get_mut(&x).expect("in component").push(y);
            adj.get_mut(&y).expect("in component").push(x);
        }
        let start = *verts.iter().next().expect("component is non-empty");
        debug_assert!(adj.values().all(|ns| ns.len() == 2), "cycle order requires a cycle skeleton");
        let mut order = vec![start];
        let mut prev = start;
        let mut cur = *adj[&start].iter().min().expect("cycle vertex has neighbors");
        while cur != start {
            order.push(cur);
            let ns = &adj[&cur];
            let nxt = if ns[0] == prev { ns[1] } else { ns[0] };
            prev = cur;
            cur = nxt;
        }
        order
    }

    pub fn node_count(&self) -> usize {
        self.comps.len() + self.pairs.len()
    }

    pub fn canonical(&self, g: &DynamicGraph) -> CanonicalTri {
        let comps = self
            .comps
            .keys()
            .map(|&c| (self.comp_verts(c).iter().copied().collect(), self.kind(g, c)))
            .collect();
        (comps, self.pairs.clone())
    }

    /// Adjacent comp count and connectivity weight of a pair: each cycle
    /// component contributes one internally disjoint connecting path, each
    /// rigid one two, a real edge one more. The pair is genuine while the
    /// count is at least 2 and the weight at least 3.
    pub(crate) fn pair_weight(&self, g: &DynamicGraph, q: (VertexId, VertexId)) -> (usize, usize) {
        let holders = self.comps_containing_both(q.0, q.1);
        let mut w = if g.has_edge(q.0, q.1) { 1 } else { 0 };
        for &c in &holders {
            w += match self.kind(g, c) {
                TriKind::Cycle => 1,
                TriKind::Rigid => 2,
            };
        }
        (holders.len(), w)
    }

    pub(crate) fn node_neighbors(&self, n: &TriNode) -> Vec<TriNode> {
        match *n {
            TriNode::Comp(c) => {
                let verts = self.comp_verts(c);
                self.pairs
                    .iter()
                    .filter(|&&(a, b)| verts.contains(&a) && verts.contains(&b))
                    .map(|&(a, b)| TriNode::Pair(a, b))
                    .collect()
            }
            TriNode::Pair(a, b) => {
                self.comps_containing_both(a, b).into_iter().map(TriNode::Comp).collect()
            }
        }
    }

    /// Shortest tree path from any source component to any target component,
    /// as the full alternating node sequence. None when disconnected (which
    /// cannot happen inside one block).
    pub(crate) fn node_path_sets(
        &self,
        sources: &[CompId],
        targets: &BTreeSet<CompId>,
    ) -> Option<Vec<TriNode>> {
        let mut prev: BTreeMap<TriNode, Option<TriNode>> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for &s in sources {
            prev.insert(TriNode::Comp(s), None);
            queue.push_back(TriNode::Comp(s));
        }
        while let Some(node) = queue.pop_front() {
            if let TriNode::Comp(c) = node {
                if targets.contains(&c) {
                    let mut path = vec![node];
                    let mut cur = node;
                    while let Some(Some(p)) = prev.get(&cur) {
                        path.push(*p);
                        cur = *p;
                    }
                    path.reverse();
                    return Some(path);
                }
            }
            for nb in self.node_neighbors(&node) {
                if let std::collections::btree_map::Entry::Vacant(e) = prev.entry(nb) {
                    e.insert(Some(node));
                    queue.push_back(nb);
                }
            }
        }
        None
    }

    /// Component nodes strictly beyond `q` when looking away from `from`.
    fn subtree_beyond(&self, q: (VertexId, VertexId), from: CompId) -> Vec<CompId> {
        let mut seen: BTreeSet<TriNode> = BTreeSet::new();
        seen.insert(TriNode::Pair(q.0, q.1));
        seen.insert(TriNode::Comp(from));
        let mut queue = VecDeque::from([TriNode::Pair(q.0, q.1)]);
        let mut out = Vec::new();
        while let Some(node) = queue.pop_front() {
            for nb in self.node_neighbors(&node) {
                if seen.insert(nb) {
                    if let TriNode::Comp(c) = nb {
                        out.push(c);
                    }
                    queue.push_back(nb);
                }
            }
        }
        out
    }

    fn absorb(&mut self, other: TriTree) {
        for (_, verts) in other.comps {
            self.insert_comp(verts);
        }
        self.pairs.extend(other.pairs);
    }

    /// Inserts the edge (x, y) into this block's tree. `g` must carry the
    /// post-change adjacency; for a real insertion the brand-new edge is
    /// masked out of the cycle walks so they see the pre-insertion skeleton.
    pub(crate) fn insert_edge(&mut self, g: &DynamicGraph, x: VertexId, y: VertexId, real: bool) {
        let key = norm(x, y);
        let mask = if real { Some(key) } else { None };
        if self.pairs.contains(&key) {
            // Already a separating pair; realness is derived from the graph.
            return;
        }
        let holders = self.comps_containing_both(x, y);
        if let Some(&c) = holders.first() {
            debug_assert_eq!(holders.len(), 1, "two holders would make {key:?} a pair already");
            match self.kind_masked(g, c, mask) {
                TriKind::Rigid => {
                    // A rigid skeleton stays rigid under one more edge; only
                    // a virtual edge needs recording.
                    if !real {
                        self.pairs.insert(key);
                    }
                }
                TriKind::Cycle => {
                    let order = self.cycle_order_masked(g, c, mask);
                    let l = order.len();
                    let px = order.iter().position(|&w| w == x).expect("x on the cycle");
                    let py = order.iter().position(|&w| w == y).expect("y on the cycle");
                    let (i, j) = (px.min(py), px.max(py));
                    if j - i == 1 || (i == 0 && j == l - 1) {
                        debug_assert!(!real, "a real insertion cannot duplicate a skeleton edge");
                        self.pairs.insert(key);
                    } else {
                        let arc1: BTreeSet<VertexId> = order[i..=j].iter().copied().collect();
                        let mut arc2: BTreeSet<VertexId> = order[j..].iter().copied().collect();
                        arc2.extend(order[..=i].iter().copied());
                        self.comps.remove(&c);
                        self.insert_comp(arc1);
                        self.insert_comp(arc2);
                        self.pairs.insert(key);
                    }
                }
            }
        } else {
            self.path_merge(g, x, y, real);
        }
    }

    /// The chord (x, y) lands between two components: everything on the tree
    /// path between them fuses into one rigid component. Rigid path
    /// components are swallowed whole; of a cycle path component only the
    /// terminals (marked pair vertices and the chord endpoint) join the
    /// fusion, while each cycle arc with interior vertices survives as a new
    /// cycle component hanging off a new separating pair.
    fn path_merge(&mut self, g: &DynamicGraph, x: VertexId, y: VertexId, real: bool) {
        let sources = self.comps_containing(x);
        let targets: BTreeSet<CompId> = self.comps_containing(y).into_iter().collect();
        let path = self
            .node_path_sets(&sources, &targets)
            .expect("endpoints share a block, so the tri-tree connects them");
        let mut comp_seq: Vec<CompId> = Vec::new();
        let mut pair_seq: Vec<(VertexId, VertexId)> = Vec::new();
        for node in &path {
            match *node {
                TriNode::Comp(c) => comp_seq.push(c),
                TriNode::Pair(a, b) => pair_seq.push((a, b)),
            }
        }
        let on_path: BTreeSet<CompId> = comp_seq.iter().copied().collect();

        let mut fused: BTreeSet<VertexId> = BTreeSet::from([x, y]);
        let mut new_cycles: Vec<BTreeSet<VertexId>> = Vec::new();
        let mut new_pairs: Vec<(VertexId, VertexId)> = Vec::new();

        for (i, &c) in comp_seq.iter().enumerate() {
            let mut terminals: BTreeSet<VertexId> = BTreeSet::new();
            if i == 0 {
                terminals.insert(x);
            }
            if i == comp_seq.len() - 1 {
                terminals.insert(y);
            }
            if i > 0 {
                terminals.insert(pair_seq[i - 1].0);
                terminals.insert(pair_seq[i - 1].1);
            }
            if i < pair_seq.len() {
                terminals.insert(pair_seq[i].0);
                terminals.insert(pair_seq[i].1);
            }
            match self.kind(g, c) {
                TriKind::Rigid => {
                    fused.extend(self.comp_verts(c).iter().copied());
                }
                TriKind::Cycle => {
                    fused.extend(terminals.iter().copied());
                    let order = self.cycle_order(g, c);
                    let l = order.len();
                    let mut tpos: Vec<usize> = terminals
                        .iter()
                        .map(|&t| order.iter().position(|&w| w == t).expect("terminal on cycle"))
                        .collect();
                    tpos.sort_unstable();
                    debug_assert!(tpos.len() >= 2);
                    for w in 0..tpos.len() {
                        let a = tpos[w];
                        let b = tpos[(w + 1) % tpos.len()];
                        let mut interior = Vec::new();
                        let mut k = (a + 1) % l;
                        while k != b {
                            interior.push(order[k]);
                            k = (k + 1) % l;
                        }
                        if !interior.is_empty() {
                            let mut arc: BTreeSet<VertexId> = interior.into_iter().collect();
                            arc.insert(order[a]);
                            arc.insert(order[b]);
                            new_pairs.push(norm(order[a], order[b]));
                            new_cycles.push(arc);
                        }
                    }
                }
            }
        }

        // A marked pair keeps its node only if components off the path still
        // hang from it; otherwise its virtual edge vanishes inside the fusion.
        for &p in &pair_seq {
            let off_path = self
                .comps
                .iter()
                .any(|(id, vs)| !on_path.contains(id) && vs.contains(&p.0) && vs.contains(&p.1));
            if !off_path {
                self.pairs.remove(&p);
            }
        }
        for c in &comp_seq {
            self.comps.remove(c);
        }
        for arc in new_cycles {
            self.insert_comp(arc);
        }
        for p in new_pairs {
            self.pairs.insert(p);
        }
        let fused_id = self.insert_comp(fused);
        if !real {
            self.pairs.insert(norm(x, y));
        }
        debug_assert_eq!(self.kind(g, fused_id), TriKind::Rigid, "a path merge fuses into a rigid component");
    }

    /// Removes a dead pair by merging its two cycle components into one.
    pub(crate) fn splice(&mut self, q: (VertexId, VertexId)) {
        let holders = self.comps_containing_both(q.0, q.1);
        debug_assert_eq!(holders.len(), 2, "splice needs exactly two components at the pair");
        let mut merged = BTreeSet::new();
        for c in holders {
            merged.extend(self.comps.remove(&c).expect("holder exists"));
        }
        self.insert_comp(merged);
        self.pairs.remove(&q);
    }

    /// Replaces a component that stopped being 3-connected by its proper
    /// decomposition, then revisits every pre-existing pair inside it: a
    /// pair flanked by exactly two cycle components and no real edge has
    /// died and gets spliced away.
    pub(crate) fn unfurl_comp(&mut self, g: &DynamicGraph, c: CompId) {
        let cverts = self.comp_verts(c).clone();
        let h = self.skeleton_graph(g, c);
        let local = build_tri_tree(&h, &cverts);
        self.comps.remove(&c);
        for (_, verts) in local.comps {
            self.insert_comp(verts);
        }
        let old_pairs: Vec<(VertexId, VertexId)> = self
            .pairs
            .iter()
            .filter(|&&(a, b)| cverts.contains(&a) && cverts.contains(&b))
            .copied()
            .collect();
        self.pairs.extend(local.pairs);
        for q in old_pairs {
            self.revisit_pair(g, q);
        }
    }

    /// Re-evaluates a pair after nearby surgery. Genuine pairs stay; a pair
    /// reduced to two cycle sides with no real edge is spliced away. Other
    /// death shapes cannot arise here because an outside component always
    /// remains attached.
    fn revisit_pair(&mut self, g: &DynamicGraph, q: (VertexId, VertexId)) {
        if !self.pairs.contains(&q) {
            return;
        }
        let (holders, w) = self.pair_weight(g, q);
        if holders >= 2 && w >= 3 {
            return;
        }
        debug_assert!(holders == 2 && w == 2, "only the two-cycle shape can die around an unfurl");
        self.splice(q);
    }
}

/// One biconnected block: its vertex set and, unless the block is a single
/// edge, its triconnected decomposition tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bicomp {
    pub verts: BTreeSet<VertexId>,
    pub tri: Option<TriTree>,
}

/// The maintained forest: every biconnected block of the current graph,
/// keyed by a stable id. Cut vertices are exactly the vertices shared by two
/// or more blocks, so they need no storage of their own.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DecompositionState {
    bicomps: BTreeMap<BicompId, Bicomp>,
    next: u32,
}

impl DecompositionState {
    pub fn new() -> Self {
        DecompositionState::default()
    }

    /// Builds the whole forest from scratch.
    pub fn from_graph(g: &DynamicGraph) -> Self {
        let mut state = DecompositionState::new();
        for block in g.blocks() {
            let mut verts = BTreeSet::new();
            for &(a, b) in &block {
                verts.insert(a);
                verts.insert(b);
            }
            let tri = if verts.len() == 2 { None } else { Some(build_tri_tree(g, &verts)) };
            state.insert_block(verts, tri);
        }
        state
    }

    fn fresh(&mut self) -> BicompId {
        let id = BicompId(self.next);
        self.next += 1;
        id
    }

    pub(crate) fn insert_block(&mut self, verts: BTreeSet<VertexId>, tri: Option<TriTree>) -> BicompId {
        let id = self.fresh();
        self.bicomps.insert(id, Bicomp { verts, tri });
        id
    }

    pub fn bicomps(&self) -> &BTreeMap<BicompId, Bicomp> {
        &self.bicomps
    }

    pub fn bicomp(&self, id: BicompId) -> &Bicomp {
        self.bicomps.get(&id).expect("block id belongs to this state")
    }

    pub fn bicomps_containing(&self, v: VertexId) -> Vec<BicompId> {
        self.bicomps.iter().filter(|(_, b)| b.verts.contains(&v)).map(|(&id, _)| id).collect()
    }

    /// The block containing both vertices. Unique when it exists, since two
    /// blocks overlap in at most one vertex.
    pub fn bicomp_with_both(&self, u: VertexId, v: VertexId) -> Option<BicompId> {
        debug_assert_ne!(u, v);
        self.bicomps
            .iter()
            .find(|(_, b)| b.verts.contains(&u) && b.verts.contains(&v))
            .map(|(&id, _)| id)
    }

    pub fn cut_vertices(&self) -> BTreeSet<VertexId> {
        let mut count: BTreeMap<VertexId, usize> = BTreeMap::new();
        for b in self.bicomps.values() {
            for &v in &b.verts {
                *count.entry(v).or_insert(0) += 1;
            }
        }
        count.into_iter().filter(|&(_, c)| c >= 2).map(|(v, _)| v).collect()
    }

    pub fn canonical_form(&self, g: &DynamicGraph) -> CanonicalDecomp {
        self.bicomps
            .values()
            .map(|b| {
                let verts: Vec<VertexId> = b.verts.iter().copied().collect();
                (verts, b.tri.as_ref().map(|t| t.canonical(g)))
            })
            .collect()
    }

    /// Shortest block path between the blocks holding u and those holding v,
    /// where consecutive blocks share a cut vertex.
    fn block_path(&self, u: VertexId, v: VertexId) -> Option<Vec<BicompId>> {
        let sources = self.bicomps_containing(u);
        let targets: BTreeSet<BicompId> = self.bicomps_containing(v).into_iter().collect();
        let mut prev: BTreeMap<BicompId, Option<BicompId>> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for s in sources {
            prev.insert(s, None);
            queue.push_back(s);
        }
        while let Some(b) = queue.pop_front() {
            if targets.contains(&b) {
                let mut path = vec![b];
                let mut cur = b;
                while let Some(Some(p)) = prev.get(&cur) {
                    path.push(*p);
                    cur = *p;
                }
                path.reverse();
                return Some(path);
            }
            let bverts = &self.bicomp(b).verts;
            let nbrs: Vec<BicompId> = self
                .bicomps
                .iter()
                .filter(|(&id, ob)| id != b && ob.verts.intersection(bverts).next().is_some())
                .map(|(&id, _)| id)
                .collect();
            for nb in nbrs {
                if let std::collections::btree_map::Entry::Vacant(e) = prev.entry(nb) {
                    e.insert(Some(b));
                    queue.push_back(nb);
                }
            }
        }
        None
    }

    /// Insertion between different blocks of one connected component: the
    /// blocks along the path fuse into one. Each nontrivial block first
    /// learns the virtual edge between its two cut vertices on the path, and
    /// the cut-vertex corridor itself becomes a new cycle component closed
    /// by the inserted edge.
    fn merge_blocks(&mut self, g_after: &DynamicGraph, u: VertexId, v: VertexId) {
        let path = self.block_path(u, v).expect("endpoints share a connected component");
        debug_assert!(path.len() >= 2);
        let mut cuts = vec![u];
        for win in path.windows(2) {
            let shared: Vec<VertexId> = self
                .bicomp(win[0])
                .verts
                .intersection(&self.bicomp(win[1]).verts)
                .copied()
                .collect();
            debug_assert_eq!(shared.len(), 1, "consecutive blocks meet in one cut vertex");
            cuts.push(shared[0]);
        }
        cuts.push(v);
        let mut tree = TriTree::new();
        let mut verts: BTreeSet<VertexId> = BTreeSet::new();
        for (i, bid) in path.iter().enumerate() {
            let bic = self.bicomps.remove(bid).expect("path block exists");
            verts.extend(bic.verts.iter().copied());
            if let Some(mut sub) = bic.tri {
                sub.insert_edge(g_after, cuts[i], cuts[i + 1], false);
                tree.absorb(sub);
            }
        }
        let corridor: BTreeSet<VertexId> = cuts.iter().copied().collect();
        debug_assert_eq!(corridor.len(), cuts.len(), "cut vertices along a block path are distinct");
        tree.insert_comp(corridor);
        self.insert_block(verts, Some(tree));
    }

    /// Deletion of a cycle-component edge dissolves the whole block into a
    /// chain: every skeleton edge on the remaining path becomes either a
    /// trivial block (real edge) or a block of its own carrying the subtree
    /// that hung off the pair.
    fn dissolve_cycle(
        &mut self,
        g_after: &DynamicGraph,
        b: BicompId,
        s: CompId,
        u: VertexId,
        v: VertexId,
    ) {
        let bic = self.bicomps.remove(&b).expect("block exists");
        let mut tree = bic.tri.expect("a cycle component lives in a nontrivial block");
        // Post-deletion the skeleton of s is a path from u to v.
        let sverts = tree.comp_verts(s).clone();
        let skel = tree.skeleton(g_after, s);
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> = sverts.iter().map(|&w| (w, vec![])).collect();
        for &(x, y) in &skel {
            adj.get_mut(&x).expect("on path").push(y);
            adj.get_mut(&y).expect("on path").push(x);
        }
        let mut order = vec![u];
        let mut prev = None;
        let mut cur = u;
        while cur != v {
            let ns = &adj[&cur];
            let nxt = *ns.iter().find(|&&w| Some(w) != prev).expect("path continues to v");
            prev = Some(cur);
            order.push(nxt);
            cur = nxt;
        }
        debug_assert_eq!(order.len(), sverts.len());

        for win in order.windows(2) {
            let key = norm(win[0], win[1]);
            if !tree.pairs.contains(&key) {
                self.insert_block(BTreeSet::from([key.0, key.1]), None);
                continue;
            }
            // Move the subtree hanging beyond this pair into a block of its
            // own, then re-evaluate the pair without the vanished cycle.
            let sub_ids = tree.subtree_beyond(key, s);
            let mut sub = TriTree::new();
            let mut sub_verts: BTreeSet<VertexId> = BTreeSet::new();
            let mut moved: BTreeMap<BTreeSet<VertexId>, CompId> = BTreeMap::new();
            for id in sub_ids {
                let verts = tree.comps.remove(&id).expect("subtree component exists");
                sub_verts.extend(verts.iter().copied());
                let nid = sub.insert_comp(verts.clone());
                moved.insert(verts, nid);
            }
            let sub_pairs: Vec<(VertexId, VertexId)> = tree
                .pairs
                .iter()
                .filter(|&&(a, b2)| {
                    sub.comps.values().any(|vs| vs.contains(&a) && vs.contains(&b2))
                })
                .copied()
                .collect();
            for &q in &sub_pairs {
                tree.pairs.remove(&q);
                sub.pairs.insert(q);
            }
            let (holders, w) = sub.pair_weight(g_after, key);
            let real = g_after.has_edge(key.0, key.1);
            if holders >= 2 && w >= 3 {
                // Still genuine inside the new block.
            } else if holders == 2 && w == 2 {
                sub.splice(key);
            } else if holders == 1 && real {
                sub.pairs.remove(&key);
            } else if holders == 1 {
                let c = sub.comps_containing_both(key.0, key.1)[0];
                debug_assert_eq!(sub.kind(g_after, c), TriKind::Rigid, "a lone cycle side would have left the pair dead before the deletion");
                sub.pairs.remove(&key);
                let cv = sub.comp_verts(c).clone();
                let h = sub.skeleton_graph(g_after, c);
                if !is_triconnected(&h, &cv) {
                    sub.unfurl_comp(g_after, c);
                }
            } else {
                unreachable!("pair with no component on either side");
            }
            self.insert_block(sub_verts, Some(sub));
        }
    }
}

type Adj = BTreeMap<VertexId, BTreeSet<VertexId>>;

fn induced_adj(g: &DynamicGraph, verts: &BTreeSet<VertexId>) -> Adj {
    let mut adj: Adj = verts.iter().map(|&v| (v, BTreeSet::new())).collect();
    for &v in verts {
        for w in g.neighbors(v) {
            if verts.contains(&w) {
                adj.get_mut(&v).expect("present").insert(w);
            }
        }
    }
    adj
}

fn adj_components(adj: &Adj, skip: &BTreeSet<VertexId>) -> Vec<BTreeSet<VertexId>> {
    let mut seen: BTreeSet<VertexId> = skip.clone();
    let mut out = Vec::new();
    for &v in adj.keys() {
        if seen.contains(&v) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut stack = vec![v];
        seen.insert(v);
        while let Some(x) = stack.pop() {
            comp.insert(x);
            for &y in &adj[&x] {
                if !seen.contains(&y) {
                    seen.insert(y);
                    stack.push(y);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// At least three pairwise internally disjoint a-b paths? Unit-capacity flow
/// in the vertex-split graph; a direct edge counts as one path.
fn three_disjoint_paths(adj: &Adj, a: VertexId, b: VertexId) -> bool {
    let ids: Vec<VertexId> = adj.keys().copied().collect();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = ids.len();
    // Vertex w splits into in-node 2i and out-node 2i+1.
    let mut cap = vec![vec![0i32; 2 * n]; 2 * n];
    for (&v, &i) in &index {
        cap[2 * i][2 * i + 1] = if v == a || v == b { 4 } else { 1 };
        for &w in &adj[&v] {
            cap[2 * i + 1][2 * index[&w]] = 1;
        }
    }
    let (s, t) = (2 * index[&a] + 1, 2 * index[&b]);
    let mut flow = 0;
    while flow < 3 {
        let mut prev = vec![usize::MAX; 2 * n];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        'bfs: while let Some(x) = queue.pop_front() {
            for y in 0..2 * n {
                if cap[x][y] > 0 && prev[y] == usize::MAX {
                    prev[y] = x;
                    if y == t {
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
        }
        if prev[t] == usize::MAX {
            return false;
        }
        let mut y = t;
        while y != s {
            let x = prev[y];
            cap[x][y] -= 1;
            cap[y][x] += 1;
            y = x;
        }
        flow += 1;
    }
    true
}

/// Lexicographically first 3-connected separating pair of the piece, if any.
fn find_genuine_pair(adj: &Adj) -> Option<(VertexId, VertexId)> {
    let verts: Vec<VertexId> = adj.keys().copied().collect();
    for (i, &a) in verts.iter().enumerate() {
        for &b in &verts[i + 1..] {
            let skip = BTreeSet::from([a, b]);
            if adj_components(adj, &skip).len() >= 2 && three_disjoint_paths(adj, a, b) {
                return Some((a, b));
            }
        }
    }
    None
}

/// From-scratch triconnected decomposition of one biconnected block, by
/// repeated splitting at 3-connected separating pairs. Each split side
/// keeps the pair as a virtual edge; a piece with no genuine pair left is a
/// finished component (a chordless cycle or a 3-connected graph).
pub fn build_tri_tree(g: &DynamicGraph, verts: &BTreeSet<VertexId>) -> TriTree {
    let mut tree = TriTree::new();
    let mut work: Vec<(BTreeSet<VertexId>, BTreeSet<(VertexId, VertexId)>)> =
        vec![(verts.clone(), BTreeSet::new())];
    while let Some((piece, virt)) = work.pop() {
        let mut adj = induced_adj(g, &piece);
        for &(x, y) in &virt {
            adj.get_mut(&x).expect("virtual endpoint in piece").insert(y);
            adj.get_mut(&y).expect("virtual endpoint in piece").insert(x);
        }
        if let Some((a, b)) = find_genuine_pair(&adj) {
            tree.pairs.insert((a, b));
            let skip = BTreeSet::from([a, b]);
            for comp in adj_components(&adj, &skip) {
                let mut side: BTreeSet<VertexId> = comp;
                side.insert(a);
                side.insert(b);
                let mut side_virt: BTreeSet<(VertexId, VertexId)> = virt
                    .iter()
                    .filter(|&&(x, y)| side.contains(&x) && side.contains(&y))
                    .copied()
                    .collect();
                side_virt.insert((a, b));
                work.push((side, side_virt));
            }
        } else {
            tree.insert_comp(piece);
        }
    }
    tree
}

/// How the update will act on the trees; computed together with the change
/// type so classification and surgery cannot drift apart.
enum Plan {
    InsSameBlock(BicompId),
    InsBlockMerge,
    InsBridge,
    DelBridge(BicompId),
    DelPairKeep,
    DelPairSplice(BicompId),
    DelRigidKeep,
    DelUnfurl(BicompId, CompId),
    DelDissolve(BicompId, CompId),
}

fn classify_plan(
    state: &DecompositionState,
    g: &DynamicGraph,
    e: ChangeEvent,
) -> (ChangeType, Plan) {
    let (u, v) = (e.u, e.v);
    match e.kind {
        ChangeKind::Insert => match state.bicomp_with_both(u, v) {
            Some(b) => {
                let tree = state
                    .bicomp(b)
                    .tri
                    .as_ref()
                    .expect("a trivial block would mean the edge already exists");
                let holders = tree.comps_containing_both(u, v);
                let rigid = holders.iter().any(|&c| tree.kind(g, c) == TriKind::Rigid);
                let (before, after) = if rigid {
                    (3, 3)
                } else if tree.is_pair(u, v) || holders.len() == 1 {
                    (2, 2)
                } else {
                    debug_assert!(holders.is_empty());
                    (2, 3)
                };
                (ChangeType::new(e.kind, before, after), Plan::InsSameBlock(b))
            }
            None if g.connected(u, v) => (ChangeType::new(e.kind, 1, 2), Plan::InsBlockMerge),
            None => (ChangeType::new(e.kind, 0, 2), Plan::InsBridge),
        },
        ChangeKind::Delete => {
            let b = state.bicomp_with_both(u, v).expect("a present edge lies in some block");
            let bic = state.bicomp(b);
            match &bic.tri {
                None => (ChangeType::new(e.kind, 2, 0), Plan::DelBridge(b)),
                Some(tree) => {
                    if tree.is_pair(u, v) {
                        let holders = tree.comps_containing_both(u, v);
                        let rigid =
                            holders.iter().filter(|&&c| tree.kind(g, c) == TriKind::Rigid).count();
                        let cyc = holders.len() - rigid;
                        let before = if rigid > 0 { 3 } else { 2 };
                        if cyc + 2 * rigid >= 3 {
                            (ChangeType::new(e.kind, before, before), Plan::DelPairKeep)
                        } else {
                            debug_assert!(rigid == 0 && cyc == 2);
                            (ChangeType::new(e.kind, 2, 2), Plan::DelPairSplice(b))
                        }
                    } else {
                        let holders = tree.comps_containing_both(u, v);
                        debug_assert_eq!(holders.len(), 1, "a real non-pair edge lives in one component");
                        let c = holders[0];
                        match tree.kind(g, c) {
                            TriKind::Rigid => {
                                let verts = tree.comp_verts(c);
                                let mut h = tree.skeleton_graph(g, c);
                                h.toggle(ChangeEvent::delete(u, v)).expect("skeleton carries the real edge");
                                if is_triconnected(&h, verts) {
                                    (ChangeType::new(e.kind, 3, 3), Plan::DelRigidKeep)
                                } else {
                                    (ChangeType::new(e.kind, 3, 2), Plan::DelUnfurl(b, c))
                                }
                            }
                            TriKind::Cycle => {
                                (ChangeType::new(e.kind, 2, 1), Plan::DelDissolve(b, c))
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Classifies a change by the co-connectivity of its endpoints before and
/// after: 0 = different connected components, 1 = same connected component,
/// 2 = same block, 3 = same rigid triconnected component. Insertions that
/// would break planarity are rejected.
pub fn classify_change(g: &DynamicGraph, e: ChangeEvent) -> Result<ChangeType, EngineError> {
    let g_after = g.apply_change(e)?;
    if e.kind == ChangeKind::Insert && !is_planar(&g_after) {
        return Err(EngineError::NonPlanarResult);
    }
    let state = DecompositionState::from_graph(g);
    Ok(classify_plan(&state, g, e).0)
}

/// Applies one edge change to the maintained forest. `g` must be the graph
/// before the change; `t` the caller's claimed classification, re-derived
/// here and rejected on mismatch. The state is untouched on error.
pub fn update_decomposition(
    state: &mut DecompositionState,
    g: &DynamicGraph,
    e: ChangeEvent,
    t: ChangeType,
) -> Result<(), EngineError> {
    let g_after = g.apply_change(e)?;
    let (computed, plan) = classify_plan(state, g, e);
    if computed != t {
        return Err(EngineError::TypeMismatch);
    }
    let (u, v) = (e.u, e.v);
    match plan {
        Plan::InsSameBlock(b) => {
            let tree = state
                .bicomps
                .get_mut(&b)
                .expect("block exists")
                .tri
                .as_mut()
                .expect("nontrivial block");
            tree.insert_edge(&g_after, u, v, true);
        }
        Plan::InsBlockMerge => state.merge_blocks(&g_after, u, v),
        Plan::InsBridge => {
            state.insert_block(BTreeSet::from([u, v]), None);
        }
        Plan::DelBridge(b) => {
            state.bicomps.remove(&b);
        }
        Plan::DelPairKeep | Plan::DelRigidKeep => {}
        Plan::DelPairSplice(b) => {
            let tree = state
                .bicomps
                .get_mut(&b)
                .expect("block exists")
                .tri
                .as_mut()
                .expect("nontrivial block");
            tree.splice(norm(u, v));
        }
        Plan::DelUnfurl(b, c) => {
            let tree = state
                .bicomps
                .get_mut(&b)
                .expect("block exists")
                .tri
                .as_mut()
                .expect("nontrivial block");
            tree.unfurl_comp(&g_after, c);
        }
        Plan::DelDissolve(b, c) => state.dissolve_cycle(&g_after, b, c, u, v),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verts_of(g: &DynamicGraph) -> BTreeSet<VertexId> {
        (0..g.n()).filter(|&v| g.degree(v) > 0).collect()
    }

    fn k4() -> DynamicGraph {
        DynamicGraph::from_edges(5, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])
    }

    /// Triangles 1-2-3 and 4-5-6 with rungs (1,4), (2,5), (3,6).
    fn prism() -> DynamicGraph {
        DynamicGraph::from_edges(
            7,
            &[(1, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 6), (1, 4), (2, 5), (3, 6)],
        )
    }

    fn canon(g: &DynamicGraph) -> CanonicalDecomp {
        DecompositionState::from_graph(g).canonical_form(g)
    }

    #[test]
    fn k4_is_a_single_rigid_component() {
        let g = k4();
        let tree = build_tri_tree(&g, &verts_of(&g));
        assert_eq!(tree.comps.len(), 1);
        assert!(tree.pairs.is_empty());
        let c = *tree.comps.keys().next().unwrap();
        assert_eq!(tree.kind(&g, c), TriKind::Rigid);
    }

    #[test]
    fn c6_is_a_single_cycle_component() {
        let g = DynamicGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        let tree = build_tri_tree(&g, &verts_of(&g));
        assert_eq!(tree.comps.len(), 1);
        assert!(tree.pairs.is_empty());
        let c = *tree.comps.keys().next().unwrap();
        assert_eq!(tree.kind(&g, c), TriKind::Cycle);
        assert_eq!(tree.cycle_order(&g, c), vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn chorded_square_splits_into_two_triangles() {
        let g = DynamicGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let tree = build_tri_tree(&g, &verts_of(&g));
        assert_eq!(tree.pairs, BTreeSet::from([(0, 2)]));
        let sets: BTreeSet<Vec<VertexId>> =
            tree.comps.values().map(|s| s.iter().copied().collect()).collect();
        assert_eq!(sets, BTreeSet::from([vec![0, 1, 2], vec![0, 2, 3]]));
        for &c in tree.comps.keys() {
            assert_eq!(tree.kind(&g, c), TriKind::Cycle);
        }
    }

    #[test]
    fn prism_minus_rung_is_a_five_node_path() {
        let mut g = prism();
        g.toggle(ChangeEvent::delete(1, 4)).unwrap();
        let tree = build_tri_tree(&g, &verts_of(&g));
        assert_eq!(tree.pairs, BTreeSet::from([(2, 3), (5, 6)]));
        let sets: BTreeSet<Vec<VertexId>> =
            tree.comps.values().map(|s| s.iter().copied().collect()).collect();
        assert_eq!(sets, BTreeSet::from([vec![1, 2, 3], vec![2, 3, 5, 6], vec![4, 5, 6]]));
        assert_eq!(tree.node_count(), 5);
        let mid = tree.comp_by_verts(&BTreeSet::from([2, 3, 5, 6])).unwrap();
        assert_eq!(tree.kind(&g, mid), TriKind::Cycle);
    }

    #[test]
    fn classification_of_the_stock_examples() {
        // Two isolated vertices.
        let g = DynamicGraph::new(3);
        assert_eq!(
            classify_change(&g, ChangeEvent::insert(0, 1)).unwrap(),
            ChangeType::new(ChangeKind::Insert, 0, 2)
        );
        // C4 plus a chord.
        let g = DynamicGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(
            classify_change(&g, ChangeEvent::insert(0, 2)).unwrap(),
            ChangeType::new(ChangeKind::Insert, 2, 2)
        );
        // K4 minus (1,2), reinserted.
        let mut g = k4();
        g.toggle(ChangeEvent::delete(1, 2)).unwrap();
        assert_eq!(
            classify_change(&g, ChangeEvent::insert(1, 2)).unwrap(),
            ChangeType::new(ChangeKind::Insert, 2, 3)
        );
        // Bridge between two triangles sharing a vertex.
        let g = DynamicGraph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]);
        assert_eq!(
            classify_change(&g, ChangeEvent::insert(0, 3)).unwrap(),
            ChangeType::new(ChangeKind::Insert, 1, 2)
        );
    }

    #[test]
    fn nonplanar_insertions_are_rejected() {
        // K5 minus an edge, completing it.
        let g = DynamicGraph::from_edges(
            5,
            &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)],
        );
        assert_eq!(classify_change(&g, ChangeEvent::insert(0, 1)), Err(EngineError::NonPlanarResult));
        assert_eq!(classify_change(&g, ChangeEvent::insert(2, 3)), Err(EngineError::IllegalChange));
    }

    fn apply_and_check(g: &mut DynamicGraph, state: &mut DecompositionState, e: ChangeEvent) {
        let t = classify_change(g, e).unwrap();
        update_decomposition(state, g, e, t).unwrap();
        g.toggle(e).unwrap();
        assert_eq!(
            state.canonical_form(g),
            canon(g),
            "incremental and from-scratch trees disagree after {e:?}"
        );
    }

    #[test]
    fn incremental_insert_matches_from_scratch() {
        // Build K4 edge by edge, then extend to the prism, exercising
        // bridge, block-merge, cycle-split and path-merge cases.
        let mut g = DynamicGraph::new(7);
        let mut state = DecompositionState::from_graph(&g);
        let prism_edges =
            [(1, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 6), (1, 4), (2, 5), (3, 6)];
        for &(a, b) in &prism_edges {
            apply_and_check(&mut g, &mut state, ChangeEvent::insert(a, b));
        }
        assert_eq!(g.edge_count(), 9);
    }

    #[test]
    fn reinserting_the_rung_fuses_the_path() {
        let mut g = prism();
        g.toggle(ChangeEvent::delete(1, 4)).unwrap();
        let mut state = DecompositionState::from_graph(&g);
        apply_and_check(&mut g, &mut state, ChangeEvent::insert(1, 4));
        let (_, bic) = state.bicomps().iter().next().unwrap();
        let tree = bic.tri.as_ref().unwrap();
        assert_eq!(tree.comps.len(), 1);
        assert!(tree.pairs.is_empty());
    }

    #[test]
    fn deleting_the_rung_unfurls_the_prism() {
        let mut g = prism();
        let mut state = DecompositionState::from_graph(&g);
        let e = ChangeEvent::delete(1, 4);
        let t = classify_change(&g, e).unwrap();
        assert_eq!(t, ChangeType::new(ChangeKind::Delete, 3, 2));
        apply_and_check(&mut g, &mut state, e);
        let (_, bic) = state.bicomps().iter().next().unwrap();
        assert_eq!(bic.tri.as_ref().unwrap().node_count(), 5);
    }

    #[test]
    fn deleting_a_chord_splices_the_square() {
        let mut g = DynamicGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let mut state = DecompositionState::from_graph(&g);
        let e = ChangeEvent::delete(0, 2);
        let t = classify_change(&g, e).unwrap();
        assert_eq!(t, ChangeType::new(ChangeKind::Delete, 2, 2));
        apply_and_check(&mut g, &mut state, e);
    }

    #[test]
    fn deleting_a_cycle_edge_dissolves_the_block() {
        let mut g = DynamicGraph::from_edges(4, &[(1, 2), (2, 3), (3, 0), (0, 1)]);
        let mut state = DecompositionState::from_graph(&g);
        let e = ChangeEvent::delete(1, 2);
        let t = classify_change(&g, e).unwrap();
        assert_eq!(t, ChangeType::new(ChangeKind::Delete, 2, 1));
        apply_and_check(&mut g, &mut state, e);
        assert_eq!(state.bicomps().len(), 3);
        assert_eq!(state.cut_vertices(), BTreeSet::from([0, 3]));
    }

    #[test]
    fn deleting_a_bridge_disconnects() {
        let mut g = DynamicGraph::from_edges(2, &[(0, 1)]);
        let mut state = DecompositionState::from_graph(&g);
        let e = ChangeEvent::delete(0, 1);
        let t = classify_change(&g, e).unwrap();
        assert_eq!(t, ChangeType::new(ChangeKind::Delete, 2, 0));
        apply_and_check(&mut g, &mut state, e);
        assert!(state.bicomps().is_empty());
    }

    #[test]
    fn mismatched_change_type_is_rejected() {
        let g = DynamicGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let mut state = DecompositionState::from_graph(&g);
        let wrong = ChangeType::new(ChangeKind::Insert, 2, 3);
        assert_eq!(
            update_decomposition(&mut state, &g, ChangeEvent::insert(0, 2), wrong),
            Err(EngineError::TypeMismatch)
        );
        // And the state is still the pristine one.
        assert_eq!(state.canonical_form(&g), canon(&g));
    }

    #[test]
    fn random_walk_agrees_with_from_scratch() {
        // Deterministic pseudo-random edge toggles on 8 vertices, keeping
        // the graph planar; after every applied change the maintained forest
        // must equal the rebuilt one.
        let n = 8;
        let mut g = DynamicGraph::new(n);
        let mut state = DecompositionState::from_graph(&g);
        let mut seed = 0x243f6a8885a308d3u64;
        let mut rand = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        let mut applied = 0;
        for _ in 0..400 {
            let a = (rand() % n as u64) as usize;
            let b = (rand() % n as u64) as usize;
            if a == b {
                continue;
            }
            let e = if g.has_edge(a, b) {
                ChangeEvent::delete(a, b)
            } else {
                ChangeEvent::insert(a, b)
            };
            match classify_change(&g, e) {
                Ok(t) => {
                    update_decomposition(&mut state, &g, e, t).unwrap();
                    g.toggle(e).unwrap();
                    applied += 1;
                    assert_eq!(state.canonical_form(&g), canon(&g), "diverged after {e:?}");
                }
                Err(EngineError::NonPlanarResult) => continue,
                Err(err) => panic!("unexpected error {err:?}"),
            }
        }
        assert!(applied > 100, "walk exercised too few changes");
    }
}
