//! Distance and path queries over the decomposition trees.
//!
//! Isomorphism queries never walk the trees ad hoc; everything they need is
//! phrased through the operations here: node distances, oriented distances
//! along a cycle component, the tree path an insertion would fuse (and
//! whether that insertion keeps the graph planar), and the face predicates
//! that pin down how pair vertices sort themselves around the fused
//! component.

use super::{build_tri_tree, norm, BicompId, CompId, DecompositionState, TriNode, TriTree};
use crate::embedding::{embed_block, is_planar};
use crate::graph::{ChangeEvent, DynamicGraph, VertexId};
use crate::EngineError;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

impl TriNode {
    pub(crate) fn normalized(self) -> TriNode {
        match self {
            TriNode::Pair(a, b) => {
                let (a, b) = norm(a, b);
                TriNode::Pair(a, b)
            }
            c => c,
        }
    }
}

impl TriTree {
    fn contains_node(&self, n: &TriNode) -> bool {
        match *n {
            TriNode::Comp(c) => self.comps.contains_key(&c),
            TriNode::Pair(a, b) => self.pairs.contains(&(a, b)),
        }
    }

    /// Hop count between two nodes of this tree.
    pub fn tree_distance(&self, x: &TriNode, y: &TriNode) -> Result<usize, EngineError> {
        let x = x.normalized();
        let y = y.normalized();
        if !self.contains_node(&x) || !self.contains_node(&y) {
            return Err(EngineError::DifferentTrees);
        }
        if x == y {
            return Ok(0);
        }
        let mut dist: BTreeMap<TriNode, usize> = BTreeMap::from([(x, 0)]);
        let mut queue = VecDeque::from([x]);
        while let Some(node) = queue.pop_front() {
            let d = dist[&node];
            for nb in self.node_neighbors(&node) {
                if nb == y {
                    return Ok(d + 1);
                }
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(nb) {
                    e.insert(d + 1);
                    queue.push_back(nb);
                }
            }
        }
        Err(EngineError::DifferentTrees)
    }
}

/// Node of a block-cut tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BcNode {
    Block(usize),
    Cut(VertexId),
}

/// Block-cut tree of a graph: one node per biconnected block, one per cut
/// vertex, an edge where the cut vertex lies in the block. For a connected
/// graph this is a tree; for a forest, one tree per component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BCTree {
    pub blocks: Vec<BTreeSet<VertexId>>,
    pub cuts: BTreeSet<VertexId>,
}

pub fn build_bc_tree(g: &DynamicGraph) -> BCTree {
    let mut blocks: Vec<BTreeSet<VertexId>> = g
        .blocks()
        .into_iter()
        .map(|edges| edges.into_iter().flat_map(|(a, b)| [a, b]).collect())
        .collect();
    blocks.sort();
    let mut count: BTreeMap<VertexId, usize> = BTreeMap::new();
    for b in &blocks {
        for &v in b {
            *count.entry(v).or_insert(0) += 1;
        }
    }
    let cuts = count.into_iter().filter(|&(_, c)| c >= 2).map(|(v, _)| v).collect();
    BCTree { blocks, cuts }
}

impl BCTree {
    fn contains_node(&self, n: &BcNode) -> bool {
        match *n {
            BcNode::Block(i) => i < self.blocks.len(),
            BcNode::Cut(v) => self.cuts.contains(&v),
        }
    }

    fn node_neighbors(&self, n: &BcNode) -> Vec<BcNode> {
        match *n {
            BcNode::Block(i) => {
                self.cuts.iter().filter(|c| self.blocks[i].contains(c)).map(|&c| BcNode::Cut(c)).collect()
            }
            BcNode::Cut(v) => (0..self.blocks.len())
                .filter(|&i| self.blocks[i].contains(&v))
                .map(BcNode::Block)
                .collect(),
        }
    }

    /// Hop count between two nodes; nodes in different components of the
    /// underlying graph live in different trees.
    pub fn tree_distance(&self, x: &BcNode, y: &BcNode) -> Result<usize, EngineError> {
        if !self.contains_node(x) || !self.contains_node(y) {
            return Err(EngineError::DifferentTrees);
        }
        if x == y {
            return Ok(0);
        }
        let mut dist: BTreeMap<BcNode, usize> = BTreeMap::from([(*x, 0)]);
        let mut queue = VecDeque::from([*x]);
        while let Some(node) = queue.pop_front() {
            let d = dist[&node];
            for nb in self.node_neighbors(&node) {
                if nb == *y {
                    return Ok(d + 1);
                }
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(nb) {
                    e.insert(d + 1);
                    queue.push_back(nb);
                }
            }
        }
        Err(EngineError::DifferentTrees)
    }
}

impl DecompositionState {
    /// The block-cut view of the maintained forest.
    pub fn bc_tree(&self) -> BCTree {
        let mut blocks: Vec<BTreeSet<VertexId>> =
            self.bicomps().values().map(|b| b.verts.clone()).collect();
        blocks.sort();
        let mut count: BTreeMap<VertexId, usize> = BTreeMap::new();
        for b in &blocks {
            for &v in b {
                *count.entry(v).or_insert(0) += 1;
            }
        }
        let cuts = count.into_iter().filter(|&(_, c)| c >= 2).map(|(v, _)| v).collect();
        BCTree { blocks, cuts }
    }
}

/// Oriented distance from u to v along a cycle, where the direction is the
/// one in which the sentinel s2 comes before s3 when starting from s1.
pub fn cycle_distance(
    order: &[VertexId],
    orientation: (VertexId, VertexId, VertexId),
    u: VertexId,
    v: VertexId,
) -> Result<usize, EngineError> {
    let l = order.len();
    let pos = |w: VertexId| order.iter().position(|&x| x == w).ok_or(EngineError::NotOnCycle);
    let (s1, s2, s3) = orientation;
    if s1 == s2 || s1 == s3 || s2 == s3 {
        return Err(EngineError::AmbiguousOrientation);
    }
    let (p1, p2, p3) = (pos(s1)?, pos(s2)?, pos(s3)?);
    let (pu, pv) = (pos(u)?, pos(v)?);
    let forward = (p2 + l - p1) % l < (p3 + l - p1) % l;
    Ok(if forward { (pv + l - pu) % l } else { (pu + l - pv) % l })
}

/// The tree path an insertion between a1 (in component c1) and a2 (in c2)
/// would fuse into one rigid component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherentPath {
    pub bicomp: BicompId,
    pub anchors: (VertexId, VertexId),
    pub nodes: Vec<TriNode>,
}

impl CoherentPath {
    pub fn comp_nodes(&self) -> Vec<CompId> {
        self.nodes
            .iter()
            .filter_map(|n| if let TriNode::Comp(c) = n { Some(*c) } else { None })
            .collect()
    }

    pub fn pair_nodes(&self) -> Vec<(VertexId, VertexId)> {
        self.nodes
            .iter()
            .filter_map(|n| if let TriNode::Pair(a, b) = n { Some((*a, *b)) } else { None })
            .collect()
    }
}

/// Finds the tree path between c1 and c2 inside one block, provided the
/// insertion (a1, a2) keeps the graph planar. None means the insertion is
/// planarity-breaking, so no merged embedding exists.
pub fn coherent_path(
    state: &DecompositionState,
    g: &DynamicGraph,
    bicomp: BicompId,
    c1: CompId,
    c2: CompId,
    a1: VertexId,
    a2: VertexId,
) -> Result<Option<CoherentPath>, EngineError> {
    let bic = state
        .bicomps()
        .get(&bicomp)
        .ok_or(EngineError::Precondition("unknown block id"))?;
    let tree = bic
        .tri
        .as_ref()
        .ok_or(EngineError::Precondition("trivial blocks have no tri-tree"))?;
    let (cv1, cv2) = match (tree.comps().get(&c1), tree.comps().get(&c2)) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(EngineError::Precondition("unknown component id")),
    };
    if a1 == a2 || !cv1.contains(&a1) || !cv2.contains(&a2) {
        return Err(EngineError::Precondition("anchors must lie in their components"));
    }
    let planar = if g.has_edge(a1, a2) {
        true
    } else {
        is_planar(&g.apply_change(ChangeEvent::insert(a1, a2)).expect("absent edge inserts cleanly"))
    };
    if !planar {
        return Ok(None);
    }
    let path = tree
        .node_path_sets(&[c1], &BTreeSet::from([c2]))
        .expect("components of one block are tree-connected");
    Ok(Some(CoherentPath { bicomp, anchors: (a1, a2), nodes: path }))
}

/// The rigid component the insertion along `path` would create, as a graph:
/// the union of the path components' skeletons plus the anchor edge, redone
/// as a decomposition, keeps exactly one component containing both anchors;
/// that component's skeleton is returned.
pub fn merged_component_graph(
    state: &DecompositionState,
    g: &DynamicGraph,
    path: &CoherentPath,
) -> Result<DynamicGraph, EngineError> {
    let bic = state
        .bicomps()
        .get(&path.bicomp)
        .ok_or(EngineError::Precondition("unknown block id"))?;
    let tree = bic
        .tri
        .as_ref()
        .ok_or(EngineError::Precondition("trivial blocks have no tri-tree"))?;
    let mut edges: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    let mut verts: BTreeSet<VertexId> = BTreeSet::new();
    for c in path.comp_nodes() {
        if !tree.comps().contains_key(&c) {
            return Err(EngineError::Precondition("path references unknown components"));
        }
        edges.extend(tree.skeleton(g, c));
        verts.extend(tree.comp_verts(c).iter().copied());
    }
    let (a1, a2) = path.anchors;
    if !verts.contains(&a1) || !verts.contains(&a2) {
        return Err(EngineError::Precondition("anchors must lie on the path"));
    }
    edges.insert(norm(a1, a2));
    let edge_list: Vec<(VertexId, VertexId)> = edges.into_iter().collect();
    let h = DynamicGraph::from_edges(g.n(), &edge_list);
    let local = build_tri_tree(&h, &verts);
    let holders = local.comps_containing_both(a1, a2);
    debug_assert_eq!(holders.len(), 1, "the anchor edge fuses the path into one component");
    let skel: Vec<(VertexId, VertexId)> = local.skeleton(&h, holders[0]).into_iter().collect();
    Ok(DynamicGraph::from_edges(g.n(), &skel))
}

/// Would the vertices of `s` share a face of the component the insertion
/// along `path` creates? The merged component is 3-connected, so its
/// embedding and hence its face set is unique up to reflection and the
/// answer is well defined. Fails with NotCoherent when the anchor insertion
/// no longer keeps the graph planar.
pub fn common_face_after_insert(
    state: &DecompositionState,
    g: &DynamicGraph,
    path: &CoherentPath,
    s: &BTreeSet<VertexId>,
) -> Result<bool, EngineError> {
    let (a1, a2) = path.anchors;
    let planar = g.has_edge(a1, a2)
        || is_planar(&g.apply_change(ChangeEvent::insert(a1, a2)).map_err(|_| {
            EngineError::Precondition("anchors must name a legal insertion")
        })?);
    if !planar {
        return Err(EngineError::NotCoherent);
    }
    let m = merged_component_graph(state, g, path)?;
    let verts: BTreeSet<VertexId> = (0..m.n()).filter(|&v| m.degree(v) > 0).collect();
    if !s.iter().all(|v| verts.contains(v)) {
        return Err(EngineError::Precondition("set outside the merged component"));
    }
    if s.len() <= 1 {
        return Ok(true);
    }
    let faces = embed_block(&m, &verts).ok_or(EngineError::NotCoherent)?;
    Ok(faces.iter().any(|f| s.iter().all(|&v| f.contains(v))))
}

/// Resolves, pair by pair, which endpoint of each separating pair along an
/// insertion path lies on the same side as the chosen endpoint of the first
/// pair. The side of pair i is the vertex that shares a face with both
/// anchors and the resolved vertex of pair i-1 in the merged component.
pub fn fix_pair_orientation(
    state: &DecompositionState,
    g: &DynamicGraph,
    pairs: &[(VertexId, VertexId)],
    anchors: (VertexId, VertexId),
    first_choice: VertexId,
) -> Result<Vec<(VertexId, VertexId)>, EngineError> {
    let (a1, a2) = anchors;
    if pairs.is_empty() {
        return Err(EngineError::Precondition("empty pair sequence"));
    }
    let bicomp = state
        .bicomp_with_both(a1, a2)
        .ok_or(EngineError::Precondition("anchors must share a block"))?;
    let tree = state
        .bicomp(bicomp)
        .tri
        .as_ref()
        .ok_or(EngineError::Precondition("trivial blocks have no pairs"))?;
    let sources = tree.comps_containing(a1);
    let targets: BTreeSet<CompId> = tree.comps_containing(a2).into_iter().collect();
    let nodes = tree
        .node_path_sets(&sources, &targets)
        .expect("components of one block are tree-connected");
    let path = CoherentPath { bicomp, anchors, nodes };
    let path_pairs = path.pair_nodes();
    let claimed: Vec<(VertexId, VertexId)> = pairs.iter().map(|&(a, b)| norm(a, b)).collect();
    if path_pairs != claimed {
        return Err(EngineError::Precondition("pair sequence does not match the tree path"));
    }
    let (f0, f1) = pairs[0];
    if first_choice != f0 && first_choice != f1 {
        return Err(EngineError::Precondition("first choice must belong to the first pair"));
    }
    let mut out = Vec::with_capacity(pairs.len());
    let mut prev = first_choice;
    out.push((prev, if prev == f0 { f1 } else { f0 }));
    for &(x0, x1) in &pairs[1..] {
        let mut qualify = Vec::new();
        for (cand, other) in [(x0, x1), (x1, x0)] {
            let s: BTreeSet<VertexId> = BTreeSet::from([a1, prev, cand, a2]);
            if common_face_after_insert(state, g, &path, &s)? {
                qualify.push((cand, other));
            }
        }
        match qualify.as_slice() {
            [one] => {
                prev = one.0;
                out.push(*one);
            }
            _ => return Err(EngineError::AmbiguousFace),
        }
    }
    Ok(out)
}

/// Predicts what deleting a cycle-component edge does to a biconnected
/// graph: the interior of the remaining path becomes the new cut vertices,
/// and the two endpoints end up at block-cut-tree distance 2|V(S)| - 4.
/// The cut list is reported walking the cycle from the smaller endpoint of
/// `e` in the direction away from the larger one.
pub fn predict_unfurl_bc(
    b: &DynamicGraph,
    e: (VertexId, VertexId),
) -> Result<(Vec<VertexId>, usize), EngineError> {
    let verts: BTreeSet<VertexId> = (0..b.n()).filter(|&v| b.degree(v) > 0).collect();
    if verts.len() < 3 {
        return Err(EngineError::Precondition("graph too small to unfurl"));
    }
    let blocks = b.blocks();
    if blocks.len() != 1 {
        return Err(EngineError::Precondition("input graph is not biconnected"));
    }
    let (u, v) = norm(e.0, e.1);
    if !b.has_edge(u, v) {
        return Err(EngineError::IllegalChange);
    }
    let after = b.apply_change(ChangeEvent::delete(u, v)).expect("edge present");
    let after_blocks = after.blocks();
    if after_blocks.len() == 1 && {
        let bv: BTreeSet<VertexId> = after_blocks[0].iter().flat_map(|&(a, c)| [a, c]).collect();
        bv == verts
    } {
        return Err(EngineError::StillBiconnected);
    }
    let tree = build_tri_tree(b, &verts);
    let holders = tree.comps_containing_both(u, v);
    debug_assert_eq!(holders.len(), 1, "a biconnectivity-breaking edge sits in a lone cycle component");
    let s = holders[0];
    debug_assert_eq!(tree.kind(b, s), super::TriKind::Cycle);
    let order = tree.cycle_order(b, s);
    let l = order.len();
    let pu = order.iter().position(|&w| w == u).expect("endpoint on cycle");
    let step: i64 = if order[(pu + 1) % l] == v { -1 } else { 1 };
    let mut cuts = Vec::new();
    let mut k = (pu as i64 + step).rem_euclid(l as i64) as usize;
    while order[k] != v {
        cuts.push(order[k]);
        k = (k as i64 + step).rem_euclid(l as i64) as usize;
    }
    Ok((cuts, 2 * l - 4))
}
