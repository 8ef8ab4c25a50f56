//! Connected-component isomorphism over block-cut trees.
//!
//! The classic reduction: a rooted connected graph is a block-cut tree whose
//! block nodes carry biconnected graphs. Instead of recursing into a block
//! while matching it, every cut vertex is painted with a colour that encodes
//! the isomorphism class of the whole subtree hanging below it. Block
//! comparisons then become coloured biconnected-graph comparisons, which the
//! tri-tree layer already answers exactly, and subtree classes are decided by
//! the same machinery one level down. Class ids are interned in a palette
//! shared by every comparison of an epoch, so equal colours mean isomorphic
//! subtrees across all of them, with the first-registered subtree of each
//! class serving as its representative.
//!
//! Colour values are partitioned by tag bits: base palette, subtree class,
//! root pin, and hole recolouring can never collide as long as session
//! palettes stay below 2^56, which they do by construction.

use std::collections::{BTreeMap, BTreeSet};

use crate::decomp::{BicompId, DecompositionState};
use crate::graph::{DynamicGraph, VertexId};
use crate::iso2::{coloured_blocks_isomorphic, perfect_matching, Colour};
use crate::EngineError;

/// A node of the block-cut structure: a block id or a plain vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BcContextNode {
    Block(BicompId),
    Cut(VertexId),
}

/// A block-cut tree rooted at `root` with the branch behind `hole` cut away.
/// Hole vertices may be recoloured by the f-map passed alongside.
#[derive(Debug, Clone)]
pub struct BcContext<'a> {
    pub g: &'a DynamicGraph,
    pub state: &'a DecompositionState,
    pub colours: &'a [Colour],
    pub root: BcContextNode,
    pub hole: Option<BcContextNode>,
}

/// The cut-vertex colouring of one context: class colours for cut vertices,
/// recolour values for hole vertices. Vertices absent from the map wear their
/// base colour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColGraph {
    pub colours: BTreeMap<VertexId, Colour>,
}

const TAG_BASE: u64 = 0;
const TAG_CLASS: u64 = 1;
const TAG_PIN: u64 = 2;
const TAG_HOLE: u64 = 3;

fn encode(tag: u64, v: Colour) -> Colour {
    (tag << 56) | (v & ((1 << 56) - 1))
}

struct CtxSide<'a> {
    g: &'a DynamicGraph,
    state: &'a DecompositionState,
    base: &'a [Colour],
    hole: Option<BcContextNode>,
    f: BTreeMap<VertexId, Colour>,
}

impl<'a> CtxSide<'a> {
    fn effective(&self, v: VertexId) -> Colour {
        self.f.get(&v).copied().unwrap_or(self.base[v])
    }

    fn blocks_at(&self, v: VertexId, excl: Option<BicompId>) -> Vec<BicompId> {
        self.state
            .bicomps_containing(v)
            .into_iter()
            .filter(|&b| Some(b) != excl)
            .collect()
    }
}

/// Epoch-wide comparison engine and class intern table. Every context
/// registered here shares one palette, so colour equality means subtree
/// isomorphism across all of them.
pub struct Palette<'a> {
    sides: Vec<CtxSide<'a>>,
    reps: Vec<(usize, VertexId, Option<BicompId>)>,
    class_memo: BTreeMap<(usize, VertexId, Option<u32>), u64>,
    pair_memo: BTreeMap<(usize, VertexId, Option<u32>, usize, VertexId, Option<u32>), bool>,
    height_memo: BTreeMap<(usize, VertexId, Option<u32>), u32>,
}

impl<'a> Palette<'a> {
    pub fn new() -> Self {
        Palette {
            sides: Vec::new(),
            reps: Vec::new(),
            class_memo: BTreeMap::new(),
            pair_memo: BTreeMap::new(),
            height_memo: BTreeMap::new(),
        }
    }

    /// Height of the context subtree below `v` away from `parent`, with the
    /// hole pruned exactly as comparisons prune it. Heights gate every deep
    /// comparison: equal-height subtrees recurse only into strictly shorter
    /// ones, so classifying a subtree can never wander back into itself
    /// through an ancestor representative.
    fn height(&mut self, side: usize, v: VertexId, parent: Option<BicompId>) -> u32 {
        let key = (side, v, parent.map(|b| b.0));
        if let Some(&h) = self.height_memo.get(&key) {
            return h;
        }
        let mut kids = self.sides[side].blocks_at(v, parent);
        if let Some(BcContextNode::Block(hb)) = self.sides[side].hole {
            kids.retain(|&b| b != hb);
        }
        let mut h = 0;
        for b in kids {
            let verts: Vec<VertexId> =
                self.sides[side].state.bicomp(b).verts.iter().copied().collect();
            let mut bh = 1;
            for w in verts {
                if w == v || self.sides[side].hole == Some(BcContextNode::Cut(w)) {
                    continue;
                }
                if !self.sides[side].blocks_at(w, Some(b)).is_empty() {
                    bh = bh.max(2 + self.height(side, w, Some(b)));
                }
            }
            h = h.max(bh);
        }
        self.height_memo.insert(key, h);
        h
    }

    fn register(&mut self, ctx: &BcContext<'a>, f: &BTreeMap<VertexId, Colour>) -> usize {
        self.sides.push(CtxSide {
            g: ctx.g,
            state: ctx.state,
            base: ctx.colours,
            hole: ctx.hole,
            f: f.clone(),
        });
        self.sides.len() - 1
    }

    /// Isomorphism class of the subtree hanging below `v` away from `parent`,
    /// as an interned id. The first subtree of each class ever seen by this
    /// palette is kept as the class representative, so ids are stable within
    /// an epoch and lexicographically early subtrees win ties.
    fn class_of(
        &mut self,
        side: usize,
        v: VertexId,
        parent: Option<BicompId>,
    ) -> Result<u64, EngineError> {
        let key = (side, v, parent.map(|b| b.0));
        if let Some(&id) = self.class_memo.get(&key) {
            return Ok(id);
        }
        // Comparisons may intern deeper classes as they run, so the scan
        // re-checks the registry length. A subtree must be matched against
        // every representative present at decision time or two ids could end
        // up naming one class.
        let mut found = None;
        let mut i = 0;
        while i < self.reps.len() {
            let (rs, rv, rp) = self.reps[i];
            if self.vert_iso(side, v, parent, rs, rv, rp)? {
                found = Some(i as u64);
                break;
            }
            i += 1;
        }
        let id = found.unwrap_or_else(|| {
            self.reps.push((side, v, parent));
            (self.reps.len() - 1) as u64
        });
        self.class_memo.insert(key, id);
        Ok(id)
    }

    /// Rooted comparison of two vertex subtrees: own colours equal, then the
    /// child blocks match as a multiset, with holes aligned.
    fn vert_iso(
        &mut self,
        sa: usize,
        va: VertexId,
        pa: Option<BicompId>,
        sb: usize,
        vb: VertexId,
        pb: Option<BicompId>,
    ) -> Result<bool, EngineError> {
        let key = (sa, va, pa.map(|b| b.0), sb, vb, pb.map(|b| b.0));
        if let Some(&hit) = self.pair_memo.get(&key) {
            return Ok(hit);
        }
        let ans = self.vert_iso_uncached(sa, va, pa, sb, vb, pb)?;
        self.pair_memo.insert(key, ans);
        Ok(ans)
    }

    fn vert_iso_uncached(
        &mut self,
        sa: usize,
        va: VertexId,
        pa: Option<BicompId>,
        sb: usize,
        vb: VertexId,
        pb: Option<BicompId>,
    ) -> Result<bool, EngineError> {
        if self.sides[sa].effective(va) != self.sides[sb].effective(vb) {
            return Ok(false);
        }
        if self.height(sa, va, pa) != self.height(sb, vb, pb) {
            return Ok(false);
        }
        let mut kids_a = self.sides[sa].blocks_at(va, pa);
        let mut kids_b = self.sides[sb].blocks_at(vb, pb);
        let hole_a = match self.sides[sa].hole {
            Some(BcContextNode::Block(h)) if kids_a.contains(&h) => {
                kids_a.retain(|&b| b != h);
                true
            }
            _ => false,
        };
        let hole_b = match self.sides[sb].hole {
            Some(BcContextNode::Block(h)) if kids_b.contains(&h) => {
                kids_b.retain(|&b| b != h);
                true
            }
            _ => false,
        };
        if hole_a != hole_b || kids_a.len() != kids_b.len() {
            return Ok(false);
        }
        let mut edges = vec![vec![false; kids_b.len()]; kids_a.len()];
        for (i, &ba) in kids_a.iter().enumerate() {
            for (j, &bb) in kids_b.iter().enumerate() {
                edges[i][j] = self.block_iso(sa, ba, Some(va), sb, bb, Some(vb))?;
            }
        }
        Ok(perfect_matching(&edges))
    }

    /// Rooted comparison of two blocks, pinned at the parent cut vertices
    /// when given. Cut vertices inside the blocks are painted with their
    /// subtree class colours first, hole vertices with their recolouring, and
    /// the coloured blocks are then compared exactly.
    fn block_iso(
        &mut self,
        sa: usize,
        ba: BicompId,
        va: Option<VertexId>,
        sb: usize,
        bb: BicompId,
        vb: Option<VertexId>,
    ) -> Result<bool, EngineError> {
        let verts_a: Vec<VertexId> =
            self.sides[sa].state.bicomp(ba).verts.iter().copied().collect();
        let verts_b: Vec<VertexId> =
            self.sides[sb].state.bicomp(bb).verts.iter().copied().collect();
        if verts_a.len() != verts_b.len() {
            return Ok(false);
        }
        let cols_a = self.paint_block(sa, ba, va)?;
        let cols_b = self.paint_block(sb, bb, vb)?;

        let trivial_a = self.sides[sa].state.bicomp(ba).tri.is_none();
        let trivial_b = self.sides[sb].state.bicomp(bb).tri.is_none();
        match (trivial_a, trivial_b) {
            (true, true) => {
                let mut pal_a: Vec<Colour> = verts_a.iter().map(|&w| cols_a[w]).collect();
                let mut pal_b: Vec<Colour> = verts_b.iter().map(|&w| cols_b[w]).collect();
                pal_a.sort();
                pal_b.sort();
                Ok(pal_a == pal_b)
            }
            (false, false) => {
                let ta = self.sides[sa].state.bicomp(ba).tri.as_ref().expect("nontrivial");
                let tb = self.sides[sb].state.bicomp(bb).tri.as_ref().expect("nontrivial");
                coloured_blocks_isomorphic(
                    self.sides[sa].g,
                    ta,
                    cols_a,
                    self.sides[sb].g,
                    tb,
                    cols_b,
                )
            }
            _ => Ok(false),
        }
    }

    fn paint_block(
        &mut self,
        side: usize,
        b: BicompId,
        pin: Option<VertexId>,
    ) -> Result<Vec<Colour>, EngineError> {
        let verts: Vec<VertexId> = self.sides[side].state.bicomp(b).verts.iter().copied().collect();
        let mut cols: Vec<Colour> = (0..self.sides[side].g.n())
            .map(|v| encode(TAG_BASE, self.sides[side].effective(v)))
            .collect();
        for &w in &verts {
            if Some(w) == pin {
                continue;
            }
            if self.sides[side].hole == Some(BcContextNode::Cut(w)) {
                cols[w] = encode(TAG_HOLE, self.sides[side].effective(w));
                continue;
            }
            if !self.sides[side].blocks_at(w, Some(b)).is_empty() {
                let class = self.class_of(side, w, Some(b))?;
                cols[w] = encode(TAG_CLASS, class);
            }
        }
        if let Some(v) = pin {
            cols[v] = encode(TAG_PIN, 0);
        }
        Ok(cols)
    }
}

impl<'a> Default for Palette<'a> {
    fn default() -> Self {
        Palette::new()
    }
}

fn validate_context(ctx: &BcContext) -> Result<(), EngineError> {
    if ctx.colours.len() != ctx.g.n() {
        return Err(EngineError::InvalidContext);
    }
    let node_ok = |n: BcContextNode| match n {
        BcContextNode::Block(b) => ctx.state.bicomps().contains_key(&b),
        BcContextNode::Cut(v) => v < ctx.g.n(),
    };
    if !node_ok(ctx.root) {
        return Err(EngineError::InvalidContext);
    }
    if let Some(h) = ctx.hole {
        if !node_ok(h) || h == ctx.root {
            return Err(EngineError::InvalidContext);
        }
    }
    Ok(())
}

fn hole_verts(ctx: &BcContext) -> BTreeSet<VertexId> {
    match ctx.hole {
        None => BTreeSet::new(),
        Some(BcContextNode::Cut(v)) => BTreeSet::from([v]),
        Some(BcContextNode::Block(b)) => ctx.state.bicomp(b).verts.clone(),
    }
}

fn check_recolouring(
    ctx: &BcContext,
    f: &BTreeMap<VertexId, Colour>,
) -> Result<(), EngineError> {
    let allowed = hole_verts(ctx);
    if f.keys().any(|v| !allowed.contains(v)) {
        return Err(EngineError::InvalidContext);
    }
    Ok(())
}

/// Decides whether two recoloured block-cut contexts are isomorphic by an
/// isomorphism mapping root to root and hole to hole.
pub fn x_iso1(
    x: &BcContext,
    f: &BTreeMap<VertexId, Colour>,
    x_star: &BcContext,
    f_star: &BTreeMap<VertexId, Colour>,
) -> Result<bool, EngineError> {
    validate_context(x)?;
    validate_context(x_star)?;
    check_recolouring(x, f)?;
    check_recolouring(x_star, f_star)?;
    let mut pal = Palette::new();
    let sa = pal.register(x, f);
    let sb = pal.register(x_star, f_star);
    match (x.root, x_star.root) {
        (BcContextNode::Cut(va), BcContextNode::Cut(vb)) => pal.vert_iso(sa, va, None, sb, vb, None),
        (BcContextNode::Block(ba), BcContextNode::Block(bb)) => {
            pal.block_iso(sa, ba, None, sb, bb, None)
        }
        _ => Ok(false),
    }
}

/// Walks the context from its root and returns, for every cut vertex, its
/// subtree class colour, and for every hole vertex its recolour value. The
/// palette is shared, so colours agree across every context registered in it
/// this epoch.
pub fn colour_cut_vertices<'a>(
    pal: &mut Palette<'a>,
    ctx: &BcContext<'a>,
    f: &BTreeMap<VertexId, Colour>,
) -> Result<ColGraph, EngineError> {
    validate_context(ctx)?;
    check_recolouring(ctx, f)?;
    let side = pal.register(ctx, f);
    let mut out = BTreeMap::new();

    let holes = hole_verts(ctx);
    for &v in &holes {
        out.insert(v, encode(TAG_HOLE, f.get(&v).copied().unwrap_or(ctx.colours[v])));
    }

    // Orient the structure away from the root and colour each cut vertex by
    // the class of the subtree it roots. A block hole's attachment vertex is
    // still a context vertex, so its class colour wins over the hole mark; a
    // vertex hole stays marked, matching what block painting does.
    let mut frontier: Vec<(BcContextNode, Option<BcContextNode>)> = vec![(ctx.root, None)];
    let mut seen: BTreeSet<BcContextNode> = BTreeSet::from([ctx.root]);
    while let Some((node, parent)) = frontier.pop() {
        if Some(node) == ctx.hole {
            continue;
        }
        match node {
            BcContextNode::Cut(v) => {
                let parent_block = match parent {
                    Some(BcContextNode::Block(b)) => Some(b),
                    _ => None,
                };
                let multi = ctx.state.bicomps_containing(v).len();
                if multi >= 2 || parent_block.is_none() {
                    let class = pal.class_of(side, v, parent_block)?;
                    out.insert(v, encode(TAG_CLASS, class));
                }
                for b in ctx.state.bicomps_containing(v) {
                    let n = BcContextNode::Block(b);
                    if seen.insert(n) {
                        frontier.push((n, Some(node)));
                    }
                }
            }
            BcContextNode::Block(b) => {
                for &w in &ctx.state.bicomp(b).verts {
                    let n = BcContextNode::Cut(w);
                    if seen.insert(n) {
                        frontier.push((n, Some(node)));
                    }
                }
            }
        }
    }
    Ok(ColGraph { colours: out })
}

/// True when the connected components of `a` and `a_star` are isomorphic by
/// an isomorphism with a -> a*.
pub fn iso1_query(
    g: &DynamicGraph,
    state: &DecompositionState,
    colours: &[Colour],
    a: VertexId,
    a_star: VertexId,
) -> Result<bool, EngineError> {
    if a >= g.n() || a_star >= g.n() || colours.len() != g.n() {
        return Err(EngineError::Precondition("query vertices must lie in the universe"));
    }
    let ctx = BcContext { g, state, colours, root: BcContextNode::Cut(a), hole: None };
    let ctx_star = BcContext { g, state, colours, root: BcContextNode::Cut(a_star), hole: None };
    let empty = BTreeMap::new();
    x_iso1(&ctx, &empty, &ctx_star, &empty)
}

/// True when some vertex of v's component answers `iso1_query(u, ·)` with
/// yes, i.e. the two components are isomorphic outright.
pub fn components_isomorphic(
    g: &DynamicGraph,
    state: &DecompositionState,
    colours: &[Colour],
    u: VertexId,
    v: VertexId,
) -> Result<bool, EngineError> {
    if u >= g.n() || v >= g.n() {
        return Err(EngineError::Precondition("query vertices must lie in the universe"));
    }
    for &cand in &g.component_of(v) {
        if iso1_query(g, state, colours, u, cand)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso2::UNCOLOURED;

    fn state_of(g: &DynamicGraph) -> DecompositionState {
        DecompositionState::from_graph(g)
    }

    #[test]
    fn identity_and_twin_components() {
        let g = DynamicGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let state = state_of(&g);
        let cols = vec![UNCOLOURED; 6];
        assert_eq!(iso1_query(&g, &state, &cols, 0, 0), Ok(true));
        assert_eq!(iso1_query(&g, &state, &cols, 0, 4), Ok(true));
        for u in 0..3 {
            for v in 3..6 {
                assert_eq!(components_isomorphic(&g, &state, &cols, u, v), Ok(true));
            }
        }
    }

    #[test]
    fn path_centers_do_not_match_endpoints() {
        let g = DynamicGraph::from_edges(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]);
        let state = state_of(&g);
        let cols = vec![UNCOLOURED; 6];
        assert_eq!(iso1_query(&g, &state, &cols, 1, 4), Ok(true));
        assert_eq!(iso1_query(&g, &state, &cols, 0, 5), Ok(true));
        assert_eq!(iso1_query(&g, &state, &cols, 1, 3), Ok(false));
        assert_eq!(iso1_query(&g, &state, &cols, 0, 4), Ok(false));
    }

    #[test]
    fn triangles_are_not_paths() {
        let g = DynamicGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5)]);
        let state = state_of(&g);
        let cols = vec![UNCOLOURED; 6];
        for u in 0..3 {
            for v in 3..6 {
                assert_eq!(components_isomorphic(&g, &state, &cols, u, v), Ok(false));
            }
        }
    }

    #[test]
    fn isolated_vertices_match_each_other() {
        let g = DynamicGraph::from_edges(4, &[(0, 1)]);
        let state = state_of(&g);
        let cols = vec![UNCOLOURED; 4];
        assert_eq!(iso1_query(&g, &state, &cols, 2, 3), Ok(true));
        assert_eq!(iso1_query(&g, &state, &cols, 2, 0), Ok(false));
        assert_eq!(components_isomorphic(&g, &state, &cols, 2, 3), Ok(true));
        assert_eq!(components_isomorphic(&g, &state, &cols, 0, 2), Ok(false));
    }

    #[test]
    fn star_centers_carry_the_only_class_colour() {
        let g = DynamicGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        let state = state_of(&g);
        let cols = vec![UNCOLOURED; 4];
        let ctx = BcContext {
            g: &g,
            state: &state,
            colours: &cols,
            root: BcContextNode::Cut(0),
            hole: None,
        };
        let mut pal = Palette::new();
        let painted = colour_cut_vertices(&mut pal, &ctx, &BTreeMap::new()).unwrap();
        let keys: Vec<VertexId> = painted.colours.keys().copied().collect();
        assert_eq!(keys, vec![0]);
    }

    #[test]
    fn twin_limbs_share_a_colour() {
        let g = DynamicGraph::from_edges(5, &[(0, 1), (1, 2), (0, 3), (2, 4)]);
        let state = state_of(&g);
        let cols = vec![UNCOLOURED; 5];
        let ctx = BcContext {
            g: &g,
            state: &state,
            colours: &cols,
            root: BcContextNode::Cut(1),
            hole: None,
        };
        let mut pal = Palette::new();
        let painted = colour_cut_vertices(&mut pal, &ctx, &BTreeMap::new()).unwrap();
        assert_eq!(painted.colours[&0], painted.colours[&2]);

        let lopsided = DynamicGraph::from_edges(6, &[(0, 1), (1, 2), (0, 3), (2, 4), (4, 5)]);
        let state2 = state_of(&lopsided);
        let cols2 = vec![UNCOLOURED; 6];
        let ctx2 = BcContext {
            g: &lopsided,
            state: &state2,
            colours: &cols2,
            root: BcContextNode::Cut(1),
            hole: None,
        };
        let mut pal2 = Palette::new();
        let painted2 = colour_cut_vertices(&mut pal2, &ctx2, &BTreeMap::new()).unwrap();
        assert_ne!(painted2.colours[&0], painted2.colours[&2]);
    }

    #[test]
    fn contexts_obey_roots_and_holes() {
        let g = DynamicGraph::from_edges(3, &[(0, 1), (1, 2)]);
        let state = state_of(&g);
        let cols = vec![UNCOLOURED; 3];
        let at = |v: VertexId| BcContext {
            g: &g,
            state: &state,
            colours: &cols,
            root: BcContextNode::Cut(v),
            hole: None,
        };
        let empty = BTreeMap::new();
        assert_eq!(x_iso1(&at(0), &empty, &at(0), &empty), Ok(true));
        assert_eq!(x_iso1(&at(0), &empty, &at(2), &empty), Ok(true));
        assert_eq!(x_iso1(&at(0), &empty, &at(1), &empty), Ok(false));

        let b0 = state.bicomp_with_both(0, 1).unwrap();
        let b1 = state.bicomp_with_both(1, 2).unwrap();
        let holed = BcContext { hole: Some(BcContextNode::Block(b1)), ..at(1) };
        let holed_other = BcContext { hole: Some(BcContextNode::Block(b0)), ..at(1) };
        assert_eq!(x_iso1(&holed, &empty, &holed_other, &empty), Ok(true));
        assert_eq!(x_iso1(&holed, &empty, &at(1), &empty), Ok(false));

        let bad = BcContext { root: BcContextNode::Block(b0), hole: Some(BcContextNode::Block(b0)), ..at(0) };
        assert_eq!(x_iso1(&bad, &empty, &at(0), &empty), Err(EngineError::InvalidContext));

        let f_bad = BTreeMap::from([(0, 7)]);
        assert_eq!(x_iso1(&holed, &f_bad, &holed_other, &empty), Err(EngineError::InvalidContext));
    }

    #[test]
    fn hole_recolourings_must_correspond() {
        let g = DynamicGraph::from_edges(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]);
        let state = state_of(&g);
        let cols = vec![UNCOLOURED; 6];
        let ba = state.bicomp_with_both(1, 2).unwrap();
        let bb = state.bicomp_with_both(4, 5).unwrap();
        let ctx_a = BcContext {
            g: &g,
            state: &state,
            colours: &cols,
            root: BcContextNode::Cut(1),
            hole: Some(BcContextNode::Block(ba)),
        };
        let ctx_b = BcContext {
            g: &g,
            state: &state,
            colours: &cols,
            root: BcContextNode::Cut(4),
            hole: Some(BcContextNode::Block(bb)),
        };
        let empty = BTreeMap::new();
        assert_eq!(x_iso1(&ctx_a, &empty, &ctx_b, &empty), Ok(true));

        // The attachment vertex stays visible, so recolouring it must
        // correspond across the two sides.
        let f_a = BTreeMap::from([(1, 9)]);
        let f_b = BTreeMap::from([(4, 9)]);
        assert_eq!(x_iso1(&ctx_a, &f_a, &ctx_b, &f_b), Ok(true));
        let f_b2 = BTreeMap::from([(4, 8)]);
        assert_eq!(x_iso1(&ctx_a, &f_a, &ctx_b, &f_b2), Ok(false));

        // Interior hole vertices are cut away; recolouring them is inert.
        let f_deep = BTreeMap::from([(2, 9)]);
        assert_eq!(x_iso1(&ctx_a, &f_deep, &ctx_b, &empty), Ok(true));
    }

    #[test]
    fn vertex_holes_mark_the_spot() {
        // Two triangles with a pendant tail; the hole cuts the tail off at
        // its base, leaving the base vertex marked inside the triangle.
        let g = DynamicGraph::from_edges(
            8,
            &[(0, 1), (1, 2), (2, 0), (2, 3), (4, 5), (5, 6), (6, 4), (6, 7)],
        );
        let state = state_of(&g);
        let cols = vec![UNCOLOURED; 8];
        let ctx_a = BcContext {
            g: &g,
            state: &state,
            colours: &cols,
            root: BcContextNode::Cut(0),
            hole: Some(BcContextNode::Cut(2)),
        };
        let ctx_b = BcContext {
            g: &g,
            state: &state,
            colours: &cols,
            root: BcContextNode::Cut(4),
            hole: Some(BcContextNode::Cut(6)),
        };
        let empty = BTreeMap::new();
        assert_eq!(x_iso1(&ctx_a, &empty, &ctx_b, &empty), Ok(true));

        let f_a = BTreeMap::from([(2, 3)]);
        let f_b = BTreeMap::from([(6, 3)]);
        assert_eq!(x_iso1(&ctx_a, &f_a, &ctx_b, &f_b), Ok(true));
        let f_b2 = BTreeMap::from([(6, 4)]);
        assert_eq!(x_iso1(&ctx_a, &f_a, &ctx_b, &f_b2), Ok(false));

        // A marked vertex never matches an unmarked one, even when the
        // underlying graphs agree.
        let solid = BcContext { hole: None, ..ctx_b.clone() };
        assert_eq!(x_iso1(&ctx_a, &empty, &solid, &empty), Ok(false));
    }

    #[test]
    fn block_cut_recursion_reaches_depth() {
        // Two caterpillar-ish components: triangle with a tail of length 2,
        // mirrored. Tail roots must map to tail roots.
        let edges_a = [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4)];
        let edges_b = [(5, 6), (6, 7), (7, 5), (6, 8), (8, 9)];
        let mut edges = edges_a.to_vec();
        edges.extend(edges_b);
        let g = DynamicGraph::from_edges(10, &edges);
        let state = state_of(&g);
        let cols = vec![UNCOLOURED; 10];
        assert_eq!(iso1_query(&g, &state, &cols, 0, 6), Ok(true));
        assert_eq!(iso1_query(&g, &state, &cols, 0, 5), Ok(false));
        assert_eq!(iso1_query(&g, &state, &cols, 4, 9), Ok(true));
        assert_eq!(iso1_query(&g, &state, &cols, 3, 8), Ok(true));
        assert_eq!(iso1_query(&g, &state, &cols, 1, 5), Ok(true));
        assert_eq!(components_isomorphic(&g, &state, &cols, 0, 9), Ok(true));
    }
}
