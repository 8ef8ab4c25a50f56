//! Coloured isomorphism of biconnected components over their tri-trees.
//!
//! Two biconnected graphs are isomorphic exactly when their tri-trees match
//! node for node: skeleton isomorphisms at component nodes, multiset
//! matchings of rooted subtrees at separating-pair nodes. Skeleton
//! isomorphisms are enumerated by walking both embeddings in lockstep from a
//! seeded arc pair, which pins down the whole map after one choice of image
//! arc and reflection, so the search stays polynomial.
//!
//! Vertex constraints ride on colours: pinning a vertex means giving it a
//! fresh colour on both sides, the same trick the colour layer itself uses
//! when it recolours separating vertices. Everything here is exact; no
//! modular arithmetic is involved.

use std::collections::BTreeMap;

use crate::decomp::{CompId, DecompositionState, TriNode, TriTree};
pub use crate::decomp::fix_pair_orientation;
use crate::embedding::{embed_block, CombFace};
use crate::graph::{DynamicGraph, VertexId};
use crate::EngineError;

/// Session-scoped colour id. Only equality is ever observed.
pub type Colour = u64;

/// The colour every vertex starts with.
pub const UNCOLOURED: Colour = 0;

type Arc = (VertexId, VertexId);

fn norm(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    (u.min(v), u.max(v))
}

/// A tri-tree subtree with the branch behind `hole` cut away: the root node,
/// an ordered anchor pair inside it, and colour overrides on root and hole
/// vertices.
#[derive(Debug, Clone)]
pub struct RecolouredContext<'a> {
    pub g: &'a DynamicGraph,
    pub tri: &'a TriTree,
    pub colours: &'a [Colour],
    pub root: TriNode,
    pub anchors: (VertexId, VertexId),
    pub hole: Option<TriNode>,
    pub recolouring: BTreeMap<VertexId, Colour>,
}

fn node_exists(tri: &TriTree, n: TriNode) -> bool {
    match n {
        TriNode::Comp(c) => tri.comps().contains_key(&c),
        TriNode::Pair(u, v) => u < v && tri.pairs().contains(&(u, v)),
    }
}

fn node_verts(tri: &TriTree, n: TriNode) -> Vec<VertexId> {
    match n {
        TriNode::Comp(c) => tri.comp_verts(c).iter().copied().collect(),
        TriNode::Pair(u, v) => vec![u, v],
    }
}

impl<'a> RecolouredContext<'a> {
    fn validate(&self) -> Result<(), EngineError> {
        if self.colours.len() != self.g.n() {
            return Err(EngineError::InvalidContext);
        }
        if !node_exists(self.tri, self.root) {
            return Err(EngineError::InvalidContext);
        }
        let (x, y) = self.anchors;
        if x == y {
            return Err(EngineError::InvalidContext);
        }
        match self.root {
            TriNode::Pair(u, v) => {
                if norm(x, y) != (u, v) {
                    return Err(EngineError::InvalidContext);
                }
            }
            TriNode::Comp(c) => {
                let vs = self.tri.comp_verts(c);
                if !vs.contains(&x) || !vs.contains(&y) {
                    return Err(EngineError::InvalidContext);
                }
            }
        }
        if let Some(h) = self.hole {
            if !node_exists(self.tri, h) || h == self.root {
                return Err(EngineError::InvalidContext);
            }
        }
        let mut allowed: Vec<VertexId> = node_verts(self.tri, self.root);
        if let Some(h) = self.hole {
            allowed.extend(node_verts(self.tri, h));
        }
        if self.recolouring.keys().any(|v| !allowed.contains(v)) {
            return Err(EngineError::InvalidContext);
        }
        Ok(())
    }

    fn effective_colours(&self) -> Vec<Colour> {
        let mut out = self.colours.to_vec();
        for (&v, &c) in &self.recolouring {
            out[v] = c;
        }
        out
    }
}

/// Rotation system of an embedded skeleton: for the arc (v, u), `succ` holds
/// the neighbor following u around v in face order and `pred` the one before.
struct Rot {
    succ: BTreeMap<Arc, VertexId>,
    pred: BTreeMap<Arc, VertexId>,
}

fn rotation_of(skel: &DynamicGraph) -> Result<Rot, EngineError> {
    let verts: std::collections::BTreeSet<VertexId> =
        (0..skel.n()).filter(|&v| skel.degree(v) > 0).collect();
    let faces: Vec<CombFace> = embed_block(skel, &verts)
        .ok_or(EngineError::Precondition("component skeletons embed in the plane"))?;
    let mut succ = BTreeMap::new();
    let mut pred = BTreeMap::new();
    for f in &faces {
        let w = f.vertices();
        let l = w.len();
        for i in 0..l {
            let (u, v, t) = (w[i], w[(i + 1) % l], w[(i + 2) % l]);
            succ.insert((v, u), t);
            pred.insert((v, t), u);
        }
    }
    Ok(Rot { succ, pred })
}

/// Propagates the arc identification `seed_a -> seed_b` across both rotation
/// systems. `flip` mirrors the second embedding. Returns the vertex map when
/// the propagation closes without conflict, covering all of `skel_a`.
fn lockstep(
    skel_a: &DynamicGraph,
    skel_b: &DynamicGraph,
    rot_a: &Rot,
    rot_b: &Rot,
    seed_a: Arc,
    seed_b: Arc,
    flip: bool,
) -> Option<BTreeMap<VertexId, VertexId>> {
    let mut amap: BTreeMap<Arc, Arc> = BTreeMap::new();
    let mut vmap: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut stack = vec![(seed_a, seed_b)];
    amap.insert(seed_a, seed_b);
    while let Some(((u, v), (p, q))) = stack.pop() {
        for (s, t) in [(u, p), (v, q)] {
            match vmap.get(&s) {
                Some(&old) if old != t => return None,
                Some(_) => {}
                None => {
                    vmap.insert(s, t);
                }
            }
        }
        let nexts = [
            ((v, u), (q, p)),
            (
                (v, *rot_a.succ.get(&(v, u))?),
                (q, *if flip { rot_b.pred.get(&(q, p))? } else { rot_b.succ.get(&(q, p))? }),
            ),
        ];
        for (na, nb) in nexts {
            match amap.get(&na) {
                Some(&old) if old != nb => return None,
                Some(_) => {}
                None => {
                    amap.insert(na, nb);
                    stack.push((na, nb));
                }
            }
        }
    }
    let img: std::collections::BTreeSet<VertexId> = vmap.values().copied().collect();
    let n_a = (0..skel_a.n()).filter(|&v| skel_a.degree(v) > 0).count();
    if vmap.len() != n_a || img.len() != n_a {
        return None;
    }
    for (x, y) in skel_a.edges() {
        if !skel_b.has_edge(vmap[&x], vmap[&y]) {
            return None;
        }
    }
    Some(vmap)
}

fn min_arc(skel: &DynamicGraph) -> Arc {
    skel.edges().first().copied().expect("skeletons have edges")
}

fn all_arcs(skel: &DynamicGraph) -> Vec<Arc> {
    let mut out = Vec::new();
    for (u, v) in skel.edges() {
        out.push((u, v));
        out.push((v, u));
    }
    out
}

/// Per-side data of one comparison.
struct Side<'a> {
    g: &'a DynamicGraph,
    tri: &'a TriTree,
    colours: Vec<Colour>,
    hole: Option<TriNode>,
    skels: BTreeMap<CompId, DynamicGraph>,
    rots: BTreeMap<CompId, Rot>,
}

impl<'a> Side<'a> {
    fn new(g: &'a DynamicGraph, tri: &'a TriTree, colours: Vec<Colour>, hole: Option<TriNode>) -> Self {
        Side { g, tri, colours, hole, skels: BTreeMap::new(), rots: BTreeMap::new() }
    }

    fn prepare(&mut self, c: CompId) -> Result<(), EngineError> {
        if !self.skels.contains_key(&c) {
            let skel = self.tri.skeleton_graph(self.g, c);
            self.rots.insert(c, rotation_of(&skel)?);
            self.skels.insert(c, skel);
        }
        Ok(())
    }

    fn child_pairs(&self, c: CompId, excl: Option<(VertexId, VertexId)>) -> Vec<(VertexId, VertexId)> {
        let vs = self.tri.comp_verts(c);
        self.tri
            .pairs()
            .iter()
            .filter(|&&(x, y)| vs.contains(&x) && vs.contains(&y) && Some((x, y)) != excl)
            .copied()
            .collect()
    }

    fn child_comps(&self, q: (VertexId, VertexId), excl: Option<CompId>) -> Vec<CompId> {
        self.tri
            .comps_containing_both(q.0, q.1)
            .into_iter()
            .filter(|&c| Some(c) != excl)
            .collect()
    }
}

type OrderedPair = (VertexId, VertexId);

struct Cmp<'a> {
    a: Side<'a>,
    b: Side<'a>,
    memo: BTreeMap<(u32, u32, Option<(OrderedPair, OrderedPair)>, bool), bool>,
}

impl<'a> Cmp<'a> {
    fn new(a: Side<'a>, b: Side<'a>) -> Self {
        Cmp { a, b, memo: BTreeMap::new() }
    }

    /// Rooted comparison of two component nodes. `anc` pins an ordered vertex
    /// pair on each side; `excl_parent` drops the (normalized) anchor pair
    /// from the child lists, which is how a component looks away from the
    /// separating pair it hangs on.
    fn comp_iso(
        &mut self,
        ca: CompId,
        cb: CompId,
        anc: Option<(OrderedPair, OrderedPair)>,
        excl_parent: bool,
    ) -> Result<bool, EngineError> {
        let key = (ca.0, cb.0, anc, excl_parent);
        if let Some(&hit) = self.memo.get(&key) {
            return Ok(hit);
        }
        let ans = self.comp_iso_uncached(ca, cb, anc, excl_parent)?;
        self.memo.insert(key, ans);
        Ok(ans)
    }

    fn comp_iso_uncached(
        &mut self,
        ca: CompId,
        cb: CompId,
        anc: Option<(OrderedPair, OrderedPair)>,
        excl_parent: bool,
    ) -> Result<bool, EngineError> {
        if self.a.tri.comp_verts(ca).len() != self.b.tri.comp_verts(cb).len() {
            return Ok(false);
        }
        self.a.prepare(ca)?;
        self.b.prepare(cb)?;
        let candidates = {
            let (skel_a, skel_b) = (&self.a.skels[&ca], &self.b.skels[&cb]);
            if skel_a.edge_count() != skel_b.edge_count() {
                return Ok(false);
            }
            let (rot_a, rot_b) = (&self.a.rots[&ca], &self.b.rots[&cb]);

            let mut seeds: Vec<(Arc, Arc, bool)> = Vec::new();
            let mut check_anchors = false;
            match anc {
                Some(((x, y), (p, q))) if skel_a.has_edge(x, y) && skel_b.has_edge(p, q) => {
                    seeds.push(((x, y), (p, q), false));
                    seeds.push(((x, y), (p, q), true));
                }
                _ => {
                    check_anchors = anc.is_some();
                    let sa = min_arc(skel_a);
                    for sb in all_arcs(skel_b) {
                        seeds.push((sa, sb, false));
                        seeds.push((sa, sb, true));
                    }
                }
            }

            let mut maps = Vec::new();
            for (sa, sb, flip) in seeds {
                let Some(vmap) = lockstep(skel_a, skel_b, rot_a, rot_b, sa, sb, flip) else {
                    continue;
                };
                if check_anchors {
                    let ((x, y), (p, q)) = anc.expect("anchors drive the filter");
                    if vmap.get(&x) != Some(&p) || vmap.get(&y) != Some(&q) {
                        continue;
                    }
                }
                if vmap.iter().any(|(&v, &w)| self.a.colours[v] != self.b.colours[w]) {
                    continue;
                }
                maps.push(vmap);
            }
            maps
        };

        'cand: for vmap in candidates {

            let excl_a = if excl_parent { anc.map(|(pa, _)| norm(pa.0, pa.1)) } else { None };
            let excl_b = if excl_parent { anc.map(|(_, pb)| norm(pb.0, pb.1)) } else { None };
            let kids_a = self.a.child_pairs(ca, excl_a);
            let kids_b = self.b.child_pairs(cb, excl_b);
            if kids_a.len() != kids_b.len() {
                continue;
            }
            for &(x, y) in &kids_a {
                let (p, q) = (vmap[&x], vmap[&y]);
                if !kids_b.contains(&norm(p, q)) {
                    continue 'cand;
                }
                if self.a.g.has_edge(x, y) != self.b.g.has_edge(p, q) {
                    continue 'cand;
                }
                let hole_here_a = self.a.hole == Some(TriNode::Pair(x, y));
                let hole_here_b = self.b.hole == Some(TriNode::Pair(norm(p, q).0, norm(p, q).1));
                match (hole_here_a, hole_here_b) {
                    (true, true) => continue,
                    (true, false) | (false, true) => continue 'cand,
                    (false, false) => {}
                }
                if !self.pair_iso((x, y), (p, q), Some((ca, cb)))? {
                    continue 'cand;
                }
            }
            return Ok(true);
        }
        Ok(false)
    }

    /// Rooted comparison of two separating-pair nodes under an orientation:
    /// the first vertex of `qa` must map to the first of `qb`. Children are
    /// matched as a multiset via bipartite matching.
    fn pair_iso(
        &mut self,
        qa: OrderedPair,
        qb: OrderedPair,
        parent: Option<(CompId, CompId)>,
    ) -> Result<bool, EngineError> {
        if self.a.colours[qa.0] != self.b.colours[qb.0]
            || self.a.colours[qa.1] != self.b.colours[qb.1]
        {
            return Ok(false);
        }
        if self.a.g.has_edge(qa.0, qa.1) != self.b.g.has_edge(qb.0, qb.1) {
            return Ok(false);
        }
        let mut kids_a = self.a.child_comps(norm(qa.0, qa.1), parent.map(|(x, _)| x));
        let mut kids_b = self.b.child_comps(norm(qb.0, qb.1), parent.map(|(_, y)| y));
        let hole_a = match self.a.hole {
            Some(TriNode::Comp(h)) => {
                let had = kids_a.contains(&h);
                kids_a.retain(|&c| c != h);
                had
            }
            _ => false,
        };
        let hole_b = match self.b.hole {
            Some(TriNode::Comp(h)) => {
                let had = kids_b.contains(&h);
                kids_b.retain(|&c| c != h);
                had
            }
            _ => false,
        };
        if hole_a != hole_b || kids_a.len() != kids_b.len() {
            return Ok(false);
        }
        let mut edges = vec![vec![false; kids_b.len()]; kids_a.len()];
        for (i, &cia) in kids_a.iter().enumerate() {
            for (j, &cjb) in kids_b.iter().enumerate() {
                edges[i][j] = self.comp_iso(cia, cjb, Some((qa, qb)), true)?;
            }
        }
        Ok(perfect_matching(&edges))
    }
}

/// Kuhn's augmenting-path matching on a small boolean bipartite graph.
pub(crate) fn perfect_matching(edges: &[Vec<bool>]) -> bool {
    let n = edges.len();
    if n == 0 {
        return true;
    }
    let m = edges[0].len();
    let mut owner = vec![usize::MAX; m];
    fn augment(edges: &[Vec<bool>], i: usize, seen: &mut [bool], owner: &mut [usize]) -> bool {
        for j in 0..owner.len() {
            if edges[i][j] && !seen[j] {
                seen[j] = true;
                if owner[j] == usize::MAX || augment(edges, owner[j], seen, owner) {
                    owner[j] = i;
                    return true;
                }
            }
        }
        false
    }
    (0..n).all(|i| augment(edges, i, &mut vec![false; m], &mut owner))
}

/// Decides whether two recoloured contexts have colour-isomorphic graphs
/// under an isomorphism aligning both anchor tuples and both holes.
pub fn x_iso2(x: &RecolouredContext, x_star: &RecolouredContext) -> Result<bool, EngineError> {
    x.validate()?;
    x_star.validate()?;
    let side_a = Side::new(x.g, x.tri, x.effective_colours(), x.hole);
    let side_b = Side::new(x_star.g, x_star.tri, x_star.effective_colours(), x_star.hole);
    let mut cmp = Cmp::new(side_a, side_b);
    match (x.root, x_star.root) {
        (TriNode::Comp(ca), TriNode::Comp(cb)) => {
            cmp.comp_iso(ca, cb, Some((x.anchors, x_star.anchors)), false)
        }
        (TriNode::Pair(..), TriNode::Pair(..)) => cmp.pair_iso(x.anchors, x_star.anchors, None),
        _ => Ok(false),
    }
}

/// How many children of the pair node other than `child` carry a subtree
/// fully isomorphic to `child`'s, with the pair held fixed pointwise.
pub fn sibling_iso_count(
    g: &DynamicGraph,
    tri: &TriTree,
    colours: &[Colour],
    pair: (VertexId, VertexId),
    child: CompId,
) -> usize {
    let pair = norm(pair.0, pair.1);
    let siblings: Vec<CompId> =
        tri.comps_containing_both(pair.0, pair.1).into_iter().filter(|&c| c != child).collect();
    let mut cmp = Cmp::new(
        Side::new(g, tri, colours.to_vec(), None),
        Side::new(g, tri, colours.to_vec(), None),
    );
    siblings
        .into_iter()
        .filter(|&s| {
            cmp.comp_iso(child, s, Some((pair, pair)), true)
                .expect("a maintained tri-tree has embeddable skeletons")
        })
        .count()
}

/// All nodes at the middle of the tri-tree's longest paths: one or two, found
/// by peeling leaves.
fn tri_centers(tri: &TriTree) -> Vec<TriNode> {
    let mut nodes: Vec<TriNode> = tri.comps().keys().map(|&c| TriNode::Comp(c)).collect();
    nodes.extend(tri.pairs().iter().map(|&(u, v)| TriNode::Pair(u, v)));
    let adjacent = |x: TriNode, y: TriNode| -> bool {
        match (x, y) {
            (TriNode::Comp(c), TriNode::Pair(u, v)) | (TriNode::Pair(u, v), TriNode::Comp(c)) => {
                let vs = tri.comp_verts(c);
                vs.contains(&u) && vs.contains(&v)
            }
            _ => false,
        }
    };
    let mut alive: Vec<TriNode> = nodes.clone();
    while alive.len() > 2 {
        let degrees: Vec<usize> = alive
            .iter()
            .map(|&x| alive.iter().filter(|&&y| adjacent(x, y)).count())
            .collect();
        let keep: Vec<TriNode> = alive
            .iter()
            .zip(&degrees)
            .filter(|&(_, &d)| d >= 2)
            .map(|(&x, _)| x)
            .collect();
        if keep.len() == alive.len() {
            break;
        }
        alive = keep;
    }
    alive.sort();
    alive
}

/// Decides whether the coloured biconnected component of (a, b) maps onto the
/// component of (a*, b*) by a colour-preserving isomorphism with a -> a* and
/// b -> b*. The constraints are enforced by painting the four vertices with
/// two fresh colours and comparing the blocks centre to centre.
pub fn iso2_query(
    g: &DynamicGraph,
    state: &DecompositionState,
    colours: &[Colour],
    a: VertexId,
    b: VertexId,
    a_star: VertexId,
    b_star: VertexId,
) -> Result<bool, EngineError> {
    if colours.len() != g.n() {
        return Err(EngineError::Precondition("one colour per universe vertex"));
    }
    if a == b || a_star == b_star {
        return Err(EngineError::NotBiconnectedPair);
    }
    let ba = state.bicomp_with_both(a, b).ok_or(EngineError::NotBiconnectedPair)?;
    let bb = state.bicomp_with_both(a_star, b_star).ok_or(EngineError::NotBiconnectedPair)?;
    if colours[a] != colours[a_star] || colours[b] != colours[b_star] {
        return Ok(false);
    }
    let block_a = state.bicomp(ba);
    let block_b = state.bicomp(bb);
    if block_a.verts.len() != block_b.verts.len() {
        return Ok(false);
    }

    let fresh = colours.iter().max().copied().unwrap_or(UNCOLOURED);
    let mut cols_a = colours.to_vec();
    let mut cols_b = colours.to_vec();
    cols_a[a] = fresh + 1;
    cols_a[b] = fresh + 2;
    cols_b[a_star] = fresh + 1;
    cols_b[b_star] = fresh + 2;

    match (&block_a.tri, &block_b.tri) {
        (None, None) => Ok(true),
        (None, Some(_)) | (Some(_), None) => Ok(false),
        (Some(ta), Some(tb)) => coloured_blocks_isomorphic(g, ta, cols_a, g, tb, cols_b),
    }
}

/// Unpinned coloured comparison of two nontrivial blocks, centre to centre.
/// Constraints are expected to arrive as colours.
pub(crate) fn coloured_blocks_isomorphic(
    ga: &DynamicGraph,
    ta: &TriTree,
    cols_a: Vec<Colour>,
    gb: &DynamicGraph,
    tb: &TriTree,
    cols_b: Vec<Colour>,
) -> Result<bool, EngineError> {
    let mut cmp = Cmp::new(Side::new(ga, ta, cols_a, None), Side::new(gb, tb, cols_b, None));
    for na in tri_centers(ta) {
        for nb in tri_centers(tb) {
            let hit = match (na, nb) {
                (TriNode::Comp(ca), TriNode::Comp(cb)) => cmp.comp_iso(ca, cb, None, false)?,
                (TriNode::Pair(u, v), TriNode::Pair(p, q)) => {
                    cmp.pair_iso((u, v), (p, q), None)? || cmp.pair_iso((u, v), (q, p), None)?
                }
                _ => false,
            };
            if hit {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond(base: VertexId) -> Vec<(VertexId, VertexId)> {
        let v = |i: VertexId| base + i;
        vec![(v(0), v(1)), (v(0), v(2)), (v(0), v(3)), (v(1), v(2)), (v(1), v(3))]
    }

    fn state_of(g: &DynamicGraph) -> DecompositionState {
        DecompositionState::from_graph(g)
    }

    #[test]
    fn identical_blocks_answer_identity() {
        let g = DynamicGraph::from_edges(5, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        let state = state_of(&g);
        let cols = vec![UNCOLOURED; 5];
        assert_eq!(iso2_query(&g, &state, &cols, 1, 2, 1, 2), Ok(true));
        assert_eq!(iso2_query(&g, &state, &cols, 1, 2, 3, 4), Ok(true));
    }

    #[test]
    fn recoloured_triangles_must_match() {
        let g = DynamicGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let state = state_of(&g);
        let mut cols = vec![UNCOLOURED; 6];
        cols[2] = 9;
        cols[5] = 9;
        assert_eq!(iso2_query(&g, &state, &cols, 0, 1, 3, 4), Ok(true));
        assert_eq!(iso2_query(&g, &state, &cols, 0, 1, 4, 3), Ok(true));
        cols[5] = 8;
        assert_eq!(iso2_query(&g, &state, &cols, 0, 1, 3, 4), Ok(false));
        assert_eq!(iso2_query(&g, &state, &cols, 0, 2, 3, 5), Ok(false));
    }

    #[test]
    fn hexagons_compare_by_cycle_distance() {
        let hex = |b: VertexId| {
            (0..6).map(|i| (b + i, b + (i + 1) % 6)).collect::<Vec<_>>()
        };
        let mut edges = hex(0);
        edges.extend(hex(6));
        let g = DynamicGraph::from_edges(12, &edges);
        let state = state_of(&g);
        let cols = vec![UNCOLOURED; 12];
        assert_eq!(iso2_query(&g, &state, &cols, 0, 2, 7, 9), Ok(true));
        assert_eq!(iso2_query(&g, &state, &cols, 0, 2, 7, 11), Ok(true));
        assert_eq!(iso2_query(&g, &state, &cols, 0, 2, 7, 10), Ok(false));
        assert_eq!(iso2_query(&g, &state, &cols, 0, 3, 6, 9), Ok(true));
        assert_eq!(iso2_query(&g, &state, &cols, 0, 1, 6, 8), Ok(false));
    }

    #[test]
    fn a_chorded_square_knows_its_chord() {
        let mut edges = diamond(0);
        edges.extend(diamond(4));
        let g = DynamicGraph::from_edges(8, &edges);
        let state = state_of(&g);
        let cols = vec![UNCOLOURED; 8];
        assert_eq!(iso2_query(&g, &state, &cols, 0, 1, 4, 5), Ok(true));
        assert_eq!(iso2_query(&g, &state, &cols, 2, 3, 6, 7), Ok(true));
        assert_eq!(iso2_query(&g, &state, &cols, 0, 1, 6, 7), Ok(false));
        assert_eq!(iso2_query(&g, &state, &cols, 0, 2, 4, 6), Ok(true));
        assert_eq!(iso2_query(&g, &state, &cols, 0, 2, 5, 6), Ok(true));
    }

    #[test]
    fn pairs_outside_blocks_are_rejected() {
        let g = DynamicGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let state = state_of(&g);
        let cols = vec![UNCOLOURED; 6];
        assert_eq!(
            iso2_query(&g, &state, &cols, 0, 3, 0, 1),
            Err(EngineError::NotBiconnectedPair)
        );
        assert_eq!(
            iso2_query(&g, &state, &cols, 0, 0, 3, 4),
            Err(EngineError::NotBiconnectedPair)
        );
    }

    #[test]
    fn sibling_triangles_count_each_other() {
        let g = DynamicGraph::from_edges(
            5,
            &[(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (0, 4), (1, 4)],
        );
        let state = state_of(&g);
        let block = state.bicomps().values().next().expect("one block");
        let tri = block.tri.as_ref().expect("nontrivial block");
        let kids = tri.comps_containing_both(0, 1);
        assert_eq!(kids.len(), 3);

        let plain = vec![UNCOLOURED; 5];
        for &c in &kids {
            assert_eq!(sibling_iso_count(&g, tri, &plain, (0, 1), c), 2);
        }

        let mut cols = plain.clone();
        cols[4] = 3;
        let count_of = |c: CompId| sibling_iso_count(&g, tri, &cols, (0, 1), c);
        let mut counts: Vec<usize> = kids.iter().map(|&c| count_of(c)).collect();
        counts.sort();
        assert_eq!(counts, vec![0, 1, 1]);
    }

    #[test]
    fn contexts_with_holes_align() {
        let mut edges = diamond(0);
        edges.extend(diamond(4));
        let g = DynamicGraph::from_edges(8, &edges);
        let state = state_of(&g);
        let cols = vec![UNCOLOURED; 8];
        let tri_a = state
            .bicomp(state.bicomp_with_both(0, 1).unwrap())
            .tri
            .as_ref()
            .unwrap();
        let tri_b = state
            .bicomp(state.bicomp_with_both(4, 5).unwrap())
            .tri
            .as_ref()
            .unwrap();
        let kid_a = tri_a.comps_containing(2)[0];
        let kid_b = tri_b.comps_containing(6)[0];

        let ctx_a = RecolouredContext {
            g: &g,
            tri: tri_a,
            colours: &cols,
            root: TriNode::Pair(0, 1),
            anchors: (0, 1),
            hole: Some(TriNode::Comp(kid_a)),
            recolouring: BTreeMap::new(),
        };
        let ctx_b = RecolouredContext {
            g: &g,
            tri: tri_b,
            colours: &cols,
            root: TriNode::Pair(4, 5),
            anchors: (4, 5),
            hole: Some(TriNode::Comp(kid_b)),
            recolouring: BTreeMap::new(),
        };
        assert_eq!(x_iso2(&ctx_a, &ctx_a), Ok(true));
        assert_eq!(x_iso2(&ctx_a, &ctx_b), Ok(true));

        let solid_b = RecolouredContext { hole: None, ..ctx_b.clone() };
        assert_eq!(x_iso2(&ctx_a, &solid_b), Ok(false));

        let recoloured = RecolouredContext {
            recolouring: BTreeMap::from([(4, 5)]),
            ..ctx_b.clone()
        };
        assert_eq!(x_iso2(&ctx_a, &recoloured), Ok(false));

        let bad = RecolouredContext { root: TriNode::Pair(0, 2), ..ctx_a.clone() };
        assert_eq!(x_iso2(&bad, &ctx_b), Err(EngineError::InvalidContext));
    }

    #[test]
    fn renaming_colours_changes_nothing() {
        let mut edges = diamond(0);
        edges.extend(diamond(4));
        let g = DynamicGraph::from_edges(8, &edges);
        let state = state_of(&g);
        let mut cols = vec![UNCOLOURED; 8];
        cols[2] = 1;
        cols[6] = 1;
        cols[3] = 2;
        cols[7] = 2;
        let renamed: Vec<Colour> = cols.iter().map(|&c| if c == 0 { 0 } else { c + 40 }).collect();
        for (x, y, p, q) in [(0, 1, 4, 5), (2, 3, 6, 7), (0, 2, 4, 7), (0, 1, 5, 4)] {
            assert_eq!(
                iso2_query(&g, &state, &cols, x, y, p, q),
                iso2_query(&g, &state, &renamed, x, y, p, q),
            );
        }
    }
}
