//! Tutte embedding systems modulo primes, maintained by low-rank updates.
//!
//! Pin three vertices of a 3-connected planar host and place every other
//! vertex at the average of its neighbours: the resulting linear system
//! `T x = b` has a unique solution (Tutte), and its inverse determines a
//! planar straight-line drawing. Working modulo a prime keeps every entry
//! in one machine word, at the price that an update can make `T` singular
//! mod p even though it stays invertible over the rationals. The engine
//! therefore keeps a pool of primes, maintains one bundle per live prime
//! per rigid component, drops a prime the moment any update fails on it,
//! and tops the pool back up from a deterministic generator.
//!
//! All structural updates go through the Sherman-Morrison-Woodbury
//! identity: for a rank-k change `T' = T + U V^T`,
//!
//! ```text
//! T'^-1 = T^-1 - T^-1 U (I_k + V^T T^-1 U)^-1 V^T T^-1
//! ```
//!
//! so a single edge flip, a pin exchange, or a merge of two hosts along a
//! separation pair costs a handful of thin matrix products instead of a
//! fresh Gaussian elimination. The capacitance `I_k + V^T T^-1 U` being
//! singular mod p is exactly the event "T' is not invertible mod p"; it is
//! reported as [`EngineError::NotInvertible`] and handled by the prime
//! pool, never by panicking.

use std::collections::{BTreeMap, BTreeSet};

use crate::decomp::{DecompositionState, TriKind};
use crate::embedding::embed_block;
use crate::graph::{ChangeEvent, ChangeKind, ChangeType, DynamicGraph, VertexId};
use crate::modp::{self, ZpMat};
use crate::EngineError;

/// An ordered pin triple. The set determines the matrix; the order fixes
/// which pin sits at (0,0), (1,0) and (0,1) in [`embed_coords`].
pub type Pins = (VertexId, VertexId, VertexId);

fn pin_array(pins: Pins) -> [VertexId; 3] {
    [pins.0, pins.1, pins.2]
}

fn pinned(pins: Pins, v: VertexId) -> bool {
    pins.0 == v || pins.1 == v || pins.2 == v
}

fn support(h: &DynamicGraph) -> Vec<VertexId> {
    (0..h.n()).filter(|&v| h.degree(v) > 0).collect()
}

fn norm(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    (u.min(v), u.max(v))
}

fn idx(verts: &[VertexId], v: VertexId) -> usize {
    verts.binary_search(&v).expect("vertex indexed by the host support")
}

fn sorted_edges(h: &DynamicGraph) -> Vec<(VertexId, VertexId)> {
    let mut es: Vec<_> = h.edges().iter().map(|&(u, v)| norm(u, v)).collect();
    es.sort_unstable();
    es
}

/// The pinned Tutte matrix of `host` over Z/p, indexed by `verts` in order:
/// a unit row for each pin, the Laplacian row (degree on the diagonal, -1
/// per neighbour) for everything else. An edge between two pins leaves the
/// matrix untouched, since neither of its rows is a Laplacian row.
pub fn tutte_matrix(host: &DynamicGraph, verts: &[VertexId], pins: Pins, p: u64) -> ZpMat {
    let n = verts.len();
    let mut t = ZpMat::zero(n, n, p);
    for (i, &w) in verts.iter().enumerate() {
        if pinned(pins, w) {
            t.set(i, i, 1);
        } else {
            t.set(i, i, host.degree(w) as u64 % p);
            for x in host.neighbors(w) {
                t.set(i, idx(verts, x), p - 1);
            }
        }
    }
    t
}

/// The plain graph Laplacian of `host` on `verts`, no pinning.
fn laplacian(host: &DynamicGraph, verts: &[VertexId], p: u64) -> ZpMat {
    let n = verts.len();
    let mut l = ZpMat::zero(n, n, p);
    for (i, &w) in verts.iter().enumerate() {
        l.set(i, i, host.degree(w) as u64 % p);
        for x in host.neighbors(w) {
            l.set(i, idx(verts, x), p - 1);
        }
    }
    l
}

/// One maintained linear-algebra bundle: the inverse of the pinned Tutte
/// matrix of a host graph mod p, together with its products against the
/// host Laplacian. The products are what the update formulas and the
/// query layer read; they are recomputed from the fresh inverse after
/// every operation, which keeps every op a short chain of dense products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TutteBundle {
    host: DynamicGraph,
    verts: Vec<VertexId>,
    pins: Pins,
    p: u64,
    tinv: ZpMat,
    tinv_lap: ZpMat,
    lap_tinv: ZpMat,
    lap_tinv_lap: ZpMat,
}

impl TutteBundle {
    pub fn host(&self) -> &DynamicGraph {
        &self.host
    }

    pub fn verts(&self) -> &[VertexId] {
        &self.verts
    }

    pub fn pins(&self) -> Pins {
        self.pins
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// The maintained inverse, indexed by [`Self::verts`].
    pub fn tinv(&self) -> &ZpMat {
        &self.tinv
    }

    /// Column products `T^-1 l_j` for every Laplacian column.
    pub fn tinv_lap(&self) -> &ZpMat {
        &self.tinv_lap
    }

    /// Row products `l_i^T T^-1` for every Laplacian column.
    pub fn lap_tinv(&self) -> &ZpMat {
        &self.lap_tinv
    }

    /// Bilinear products `l_i^T T^-1 l_j`.
    pub fn lap_tinv_lap(&self) -> &ZpMat {
        &self.lap_tinv_lap
    }

    /// Rebuilds the bundle around a fresh inverse. The caller vouches that
    /// `tinv` really is the inverse of `tutte_matrix(&host, &verts, pins, p)`.
    fn finish(host: DynamicGraph, verts: Vec<VertexId>, pins: Pins, p: u64, tinv: ZpMat) -> Self {
        let l = laplacian(&host, &verts, p);
        let tinv_lap = tinv.matmul(&l);
        let lap_tinv = l.matmul(&tinv);
        let lap_tinv_lap = l.matmul(&tinv_lap);
        TutteBundle { host, verts, pins, p, tinv, tinv_lap, lap_tinv, lap_tinv_lap }
    }

    /// Same bundle with the pin tuple reordered. Only legal when the set of
    /// pins is unchanged, so the matrix and all products stay valid.
    fn with_pin_order(mut self, pins: Pins) -> Self {
        let old: BTreeSet<_> = pin_array(self.pins).into_iter().collect();
        let new: BTreeSet<_> = pin_array(pins).into_iter().collect();
        assert_eq!(old, new, "pin reordering must preserve the pin set");
        self.pins = pins;
        self
    }
}

fn check_pins(verts: &[VertexId], pins: Pins) -> Result<(), EngineError> {
    let [a, b, c] = pin_array(pins);
    if a == b || b == c || a == c {
        return Err(EngineError::Precondition("pins must be three distinct vertices"));
    }
    for v in [a, b, c] {
        if verts.binary_search(&v).is_err() {
            return Err(EngineError::Precondition("pins must be host vertices"));
        }
    }
    Ok(())
}

/// Builds a bundle from scratch by Gaussian elimination.
pub fn bundle_init(host: &DynamicGraph, pins: Pins, p: u64) -> Result<TutteBundle, EngineError> {
    let verts = support(host);
    check_pins(&verts, pins)?;
    let t = tutte_matrix(host, &verts, pins, p);
    let tinv = t.inverse()?;
    Ok(TutteBundle::finish(host.clone(), verts, pins, p, tinv))
}

/// The shared Woodbury kernel: the inverse of `T + U V^T` given `T^-1`.
/// Fails with `NotInvertible` exactly when the updated matrix is singular
/// mod p, via the k-by-k capacitance matrix.
fn smw_apply(tinv: &ZpMat, u: &ZpMat, v: &ZpMat) -> Result<ZpMat, EngineError> {
    let p = tinv.p;
    let k = u.cols;
    let tiu = tinv.matmul(u);
    let vt = v.transpose();
    let vtti = vt.matmul(tinv);
    let cap = ZpMat::identity(k, p).add_mat(&vt.matmul(&tiu));
    let capinv = cap.inverse()?;
    #[allow(unused_mut)]
    let mut out = tinv.sub_mat(&tiu.matmul(&capinv).matmul(&vtti));
    #[cfg(feature = "fault-injection")]
    {
        if crate::fault::consume() {
            out.add_at(0, 0, 1);
        }
    }
    Ok(out)
}

/// Applies one edge flip to the host, updating the inverse at rank one.
/// Both endpoints must already be host vertices; growing or shrinking the
/// vertex set goes through [`smw_vertex`] and [`smw_pair`] instead. An edge
/// between two pins changes no matrix entry, but the Laplacian products
/// still shift, so the bundle is refinished either way.
pub fn smw_edge(
    b: &TutteBundle,
    e: (VertexId, VertexId),
    dir: ChangeKind,
) -> Result<TutteBundle, EngineError> {
    let (u, v) = norm(e.0, e.1);
    if u == v {
        return Err(EngineError::Precondition("loop edges are not allowed"));
    }
    if b.verts.binary_search(&u).is_err() || b.verts.binary_search(&v).is_err() {
        return Err(EngineError::Precondition("edge endpoints must be host vertices"));
    }
    let ev = match dir {
        ChangeKind::Insert => ChangeEvent::insert(u, v),
        ChangeKind::Delete => ChangeEvent::delete(u, v),
    };
    let host = b.host.apply_change(ev)?;
    let p = b.p;
    let n = b.verts.len();
    let up = pinned(b.pins, u);
    let vp = pinned(b.pins, v);
    let tinv = if up && vp {
        b.tinv.clone()
    } else {
        let mut um = ZpMat::zero(n, 1, p);
        let mut vm = ZpMat::zero(n, 1, p);
        if !up && !vp {
            // Delta is the outer product a a^T with a = e_u - e_v.
            let (iu, iv) = (idx(&b.verts, u), idx(&b.verts, v));
            um.set(iu, 0, 1);
            um.set(iv, 0, p - 1);
            vm.set(iu, 0, 1);
            vm.set(iv, 0, p - 1);
        } else {
            // Only the free endpoint's row moves: e_f (e_f - e_g)^T.
            let (f, g) = if up { (v, u) } else { (u, v) };
            let (fi, gi) = (idx(&b.verts, f), idx(&b.verts, g));
            um.set(fi, 0, 1);
            vm.set(fi, 0, 1);
            vm.set(gi, 0, p - 1);
        }
        if dir == ChangeKind::Delete {
            vm = vm.neg();
        }
        smw_apply(&b.tinv, &um, &vm)?
    };
    Ok(TutteBundle::finish(host, b.verts.clone(), b.pins, p, tinv))
}

/// Moves the bundle to a different pin triple on the same host. Each pin
/// that leaves swaps its unit row back for a Laplacian row and each pin
/// that joins does the reverse, so the whole exchange is a single update
/// of rank at most six.
pub fn smw_pins(b: &TutteBundle, new: Pins) -> Result<TutteBundle, EngineError> {
    check_pins(&b.verts, new)?;
    let old_set: BTreeSet<_> = pin_array(b.pins).into_iter().collect();
    let new_set: BTreeSet<_> = pin_array(new).into_iter().collect();
    if old_set == new_set {
        return Ok(b.clone().with_pin_order(new));
    }
    let p = b.p;
    let n = b.verts.len();
    let leaving: Vec<_> = old_set.difference(&new_set).copied().collect();
    let joining: Vec<_> = new_set.difference(&old_set).copied().collect();
    let k = leaving.len() + joining.len();
    let mut um = ZpMat::zero(n, k, p);
    let mut vm = ZpMat::zero(n, k, p);
    for (c, &w) in leaving.iter().chain(joining.iter()).enumerate() {
        let leaves = c < leaving.len();
        let wi = idx(&b.verts, w);
        um.set(wi, c, 1);
        // Row delta l_w - e_w for a leaver, e_w - l_w for a joiner.
        let deg = b.host.degree(w) as u64 % p;
        if leaves {
            vm.set(wi, c, modp::sub(deg, 1, p));
        } else {
            vm.set(wi, c, modp::sub(1, deg, p));
        }
        for x in b.host.neighbors(w) {
            vm.set(idx(&b.verts, x), c, if leaves { p - 1 } else { 1 });
        }
    }
    let tinv = smw_apply(&b.tinv, &um, &vm)?;
    Ok(TutteBundle::finish(b.host.clone(), b.verts.clone(), new, p, tinv))
}

/// The rank-3 factors `U V^T` that turn the block-diagonal matrix `R` of a
/// merge into the pinned Tutte matrix of the union. `g` is the merged
/// host, `(v1, v2)` the shared pair and `respins` the result's pins. Row
/// deltas only touch the Laplacian rows of the result, so every pinned row
/// of the result is skipped; that is what keeps the factors valid even
/// when the pair vertex v2 is adjacent to a pin.
fn merge_factors(
    g: &DynamicGraph,
    verts: &[VertexId],
    (v1, v2): (VertexId, VertexId),
    respins: Pins,
    p: u64,
) -> (ZpMat, ZpMat) {
    let n = verts.len();
    let mut um = ZpMat::zero(n, 3, p);
    let mut vm = ZpMat::zero(n, 3, p);
    let i2 = idx(verts, v2);
    for (i, &w) in verts.iter().enumerate() {
        let free = !pinned(respins, w);
        if free && g.has_edge(w, v1) {
            um.set(i, 0, p - 1);
        }
        if free && w != v2 && g.has_edge(w, v2) {
            um.set(i, 1, p - 1);
        }
        if w != v1 && w != v2 && g.has_edge(w, v2) {
            vm.set(i, 2, p - 1);
        }
    }
    um.set(i2, 1, modp::sub(g.degree(v2) as u64 % p, 1, p));
    um.set(i2, 2, 1);
    vm.set(idx(verts, v1), 0, 1);
    vm.set(i2, 1, 1);
    (um, vm)
}

/// Glues two bundles along a shared separation pair and a bridge edge.
///
/// The hosts must intersect in exactly `pair = (v1, v2)`; `b1` must be
/// pinned at v1, v2 and the bridge tail v3, and `b2` at v1, v2 and the
/// bridge head v4. The result is the union plus the bridge, pinned at
/// (v1, v3, v4): v2 comes unpinned and both bridge ends take its place.
/// Block-diagonal assembly of the two inverses differs from the target
/// matrix by rank 3, so one Woodbury application finishes the job.
pub fn smw_merge(
    b1: &TutteBundle,
    b2: &TutteBundle,
    pair: (VertexId, VertexId),
    bridge: (VertexId, VertexId),
) -> Result<TutteBundle, EngineError> {
    let (v1, v2) = pair;
    let (v3, v4) = bridge;
    if b1.p != b2.p {
        return Err(EngineError::Precondition("bundles must share a prime"));
    }
    if b1.host.n() != b2.host.n() {
        return Err(EngineError::Precondition("bundles must share a vertex universe"));
    }
    let s1: BTreeSet<_> = b1.verts.iter().copied().collect();
    let s2: BTreeSet<_> = b2.verts.iter().copied().collect();
    let shared: BTreeSet<_> = s1.intersection(&s2).copied().collect();
    if shared != BTreeSet::from([v1, v2]) || v1 == v2 {
        return Err(EngineError::Precondition("hosts must share exactly the merge pair"));
    }
    let pins1: BTreeSet<_> = pin_array(b1.pins).into_iter().collect();
    let pins2: BTreeSet<_> = pin_array(b2.pins).into_iter().collect();
    if pins1 != BTreeSet::from([v1, v2, v3]) || pins2 != BTreeSet::from([v1, v2, v4]) {
        return Err(EngineError::Precondition(
            "each bundle must be pinned at the pair and its bridge end",
        ));
    }
    let p = b1.p;
    let mut edges: BTreeSet<_> = sorted_edges(&b1.host).into_iter().collect();
    edges.extend(sorted_edges(&b2.host));
    edges.insert(norm(v3, v4));
    let g = DynamicGraph::from_edges(b1.host.n(), &edges.iter().copied().collect::<Vec<_>>());
    let verts: Vec<_> = s1.union(&s2).copied().collect();
    let n = verts.len();

    // R^-1 is block diagonal: unit rows at the pair, and each side's
    // inverse restricted to its non-pair vertices. The restriction really
    // is the inverse of the restricted matrix because the pair rows of
    // both T_i are unit rows.
    let mut rinv = ZpMat::zero(n, n, p);
    rinv.set(idx(&verts, v1), idx(&verts, v1), 1);
    rinv.set(idx(&verts, v2), idx(&verts, v2), 1);
    for (side, vs) in [(b1, &s1), (b2, &s2)] {
        for &w in vs.iter().filter(|&&w| w != v1 && w != v2) {
            for &x in vs.iter().filter(|&&x| x != v1 && x != v2) {
                let val = side.tinv.get(idx(&side.verts, w), idx(&side.verts, x));
                rinv.set(idx(&verts, w), idx(&verts, x), val);
            }
        }
    }
    let respins = (v1, v3, v4);
    let (um, vm) = merge_factors(&g, &verts, (v1, v2), respins, p);
    debug_assert!({
        let r = tutte_matrix(&g, &verts, respins, p)
            .sub_mat(&um.matmul(&vm.transpose()))
            .matmul(&rinv);
        r.is_identity()
    });
    let tinv = smw_apply(&rinv, &um, &vm)?;
    Ok(TutteBundle::finish(g, verts, respins, p, tinv))
}

/// Cuts a bundle back into the two sides of a separation pair, undoing a
/// merge. The parts must cover the host, overlap in exactly the pair, and
/// be joined by exactly one crossing edge, the bridge; the bundle must be
/// pinned at one pair vertex and both bridge ends. Each side keeps the
/// full pair pinned plus its own bridge end.
pub fn smw_split(
    b: &TutteBundle,
    part1: &BTreeSet<VertexId>,
    part2: &BTreeSet<VertexId>,
) -> Result<(TutteBundle, TutteBundle), EngineError> {
    let all: BTreeSet<_> = b.verts.iter().copied().collect();
    if &all != &part1.union(part2).copied().collect::<BTreeSet<_>>() {
        return Err(EngineError::Precondition("split parts must cover the host"));
    }
    let pair: Vec<_> = part1.intersection(part2).copied().collect();
    if pair.len() != 2 {
        return Err(EngineError::Precondition("split parts must overlap in exactly a pair"));
    }
    let pins = pin_array(b.pins);
    let (v1, v2) = match (pins.contains(&pair[0]), pins.contains(&pair[1])) {
        (true, false) => (pair[0], pair[1]),
        (false, true) => (pair[1], pair[0]),
        _ => {
            return Err(EngineError::Precondition(
                "exactly one pair vertex must be pinned for a split",
            ))
        }
    };
    let rest: Vec<_> = pins.iter().copied().filter(|&w| w != v1).collect();
    let (v3, v4) = match (
        rest.iter().find(|&&w| part1.contains(&w) && w != v2),
        rest.iter().find(|&&w| part2.contains(&w) && w != v2),
    ) {
        (Some(&a), Some(&c)) if a != c => (a, c),
        _ => {
            return Err(EngineError::Precondition(
                "the unpaired pins must be a bridge end in each part",
            ))
        }
    };
    if !b.host.has_edge(v3, v4) {
        return Err(EngineError::Precondition("the bridge edge must be present"));
    }
    let only1 = |w: VertexId| part1.contains(&w) && !part2.contains(&w);
    let only2 = |w: VertexId| part2.contains(&w) && !part1.contains(&w);
    for &(x, y) in &b.host.edges() {
        let cross = (only1(x) && only2(y)) || (only2(x) && only1(y));
        if cross && norm(x, y) != norm(v3, v4) {
            return Err(EngineError::Precondition(
                "the bridge must be the only edge across the split",
            ));
        }
    }
    let p = b.p;

    // Peel the rank-3 merge factors off: R = T - U V^T, so R^-1 comes from
    // Woodbury with the sign of U flipped. This is the one step that can
    // fail mod p.
    let (um, vm) = merge_factors(&b.host, &b.verts, (v1, v2), b.pins, p);
    let rinv = smw_apply(&b.tinv, &um.neg(), &vm)?;

    let side = |part: &BTreeSet<VertexId>, own_pin: VertexId| -> TutteBundle {
        let verts: Vec<_> = part.iter().copied().collect();
        let edges: Vec<_> = b
            .host
            .edges()
            .into_iter()
            .filter(|&(x, y)| part.contains(&x) && part.contains(&y))
            .collect();
        let g = DynamicGraph::from_edges(b.host.n(), &edges);
        let spins = (v1, v2, own_pin);
        let n = verts.len();
        let restrict: Vec<_> = verts.iter().copied().filter(|&w| w != v1 && w != v2).collect();
        // S^-1 is read straight out of R^-1, then the inverse of the
        // block-triangular side matrix [[I, 0], [A, S]] is reassembled as
        // [[I, 0], [-S^-1 A, S^-1]].
        let m = restrict.len();
        let mut sinv = ZpMat::zero(m, m, p);
        for (i, &w) in restrict.iter().enumerate() {
            for (j, &x) in restrict.iter().enumerate() {
                sinv.set(i, j, rinv.get(idx(&b.verts, w), idx(&b.verts, x)));
            }
        }
        let mut a = ZpMat::zero(m, 2, p);
        for (i, &w) in restrict.iter().enumerate() {
            if !pinned(spins, w) {
                if g.has_edge(w, v1) {
                    a.set(i, 0, p - 1);
                }
                if g.has_edge(w, v2) {
                    a.set(i, 1, p - 1);
                }
            }
        }
        let x = sinv.matmul(&a).neg();
        let mut tinv = ZpMat::zero(n, n, p);
        tinv.set(idx(&verts, v1), idx(&verts, v1), 1);
        tinv.set(idx(&verts, v2), idx(&verts, v2), 1);
        for (i, &w) in restrict.iter().enumerate() {
            tinv.set(idx(&verts, w), idx(&verts, v1), x.get(i, 0));
            tinv.set(idx(&verts, w), idx(&verts, v2), x.get(i, 1));
            for (j, &y) in restrict.iter().enumerate() {
                tinv.set(idx(&verts, w), idx(&verts, y), sinv.get(i, j));
            }
        }
        TutteBundle::finish(g, verts, spins, p, tinv)
    };
    Ok((side(part1, v3), side(part2, v4)))
}

/// Joins two vertex-disjoint bundles with three cross edges between their
/// pin triples, `(pins1.k, pins2.k)` for each k. Internally this is a
/// chain of two scaffold triangles and three merges, after which the
/// scaffold edges that are not part of the target are flipped away one at
/// a time. The result is pinned at `(v1, v4, v6)` in the naming below:
/// first pin of `b1`, then the first and third pins of `b2`.
pub fn smw_union(
    b1: &TutteBundle,
    b2: &TutteBundle,
    cross: &[(VertexId, VertexId); 3],
) -> Result<TutteBundle, EngineError> {
    if b1.p != b2.p {
        return Err(EngineError::Precondition("bundles must share a prime"));
    }
    if b1.host.n() != b2.host.n() {
        return Err(EngineError::Precondition("bundles must share a vertex universe"));
    }
    let s1: BTreeSet<_> = b1.verts.iter().copied().collect();
    let s2: BTreeSet<_> = b2.verts.iter().copied().collect();
    if s1.intersection(&s2).next().is_some() {
        return Err(EngineError::Precondition("union hosts must be vertex disjoint"));
    }
    let (v1, v2, v3) = b1.pins;
    let (v4, v5, v6) = b2.pins;
    for (k, want) in [(v1, v4), (v2, v5), (v3, v6)].iter().enumerate() {
        let (a, b) = cross[k];
        let ok = (a, b) == *want || (b, a) == *want;
        if !ok {
            return Err(EngineError::Precondition(
                "cross edges must join the pin triples in order",
            ));
        }
    }
    let p = b1.p;
    let nuniv = b1.host.n();
    let tri = |a: VertexId, b: VertexId, c: VertexId| {
        DynamicGraph::from_edges(nuniv, &[(a, b), (a, c), (b, c)])
    };
    let t1 = bundle_init(&tri(v2, v3, v6), (v2, v3, v6), p)?;
    let h3 = smw_merge(b1, &t1, (v3, v2), (v1, v6))?;
    let t2 = bundle_init(&tri(v3, v5, v6), (v3, v5, v6), p)?;
    let h4 = smw_merge(&t2, b2, (v6, v5), (v3, v4))?;
    let mut h = smw_merge(&h3, &h4, (v6, v3), (v1, v4))?;

    let mut target: BTreeSet<_> = sorted_edges(&b1.host).into_iter().collect();
    target.extend(sorted_edges(&b2.host));
    target.extend([norm(v1, v4), norm(v2, v5), norm(v3, v6)]);
    let current: BTreeSet<_> = sorted_edges(&h.host).into_iter().collect();
    for &e in current.difference(&target) {
        h = smw_edge(&h, e, ChangeKind::Delete)?;
    }
    let missing: Vec<_> = target.difference(&current).copied().collect();
    for e in missing {
        h = smw_edge(&h, e, ChangeKind::Insert)?;
    }
    Ok(h.with_pin_order((v1, v4, v6)))
}

fn attachments_of(
    v: VertexId,
    edges: &[(VertexId, VertexId)],
) -> Result<Vec<VertexId>, EngineError> {
    let mut out = Vec::new();
    for &(a, b) in edges {
        if a == v {
            out.push(b);
        } else if b == v {
            out.push(a);
        } else {
            return Err(EngineError::Precondition("every edge must touch the new vertex"));
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.len() != edges.len() {
        return Err(EngineError::Precondition("attachment edges must be distinct non-loops"));
    }
    Ok(out)
}

/// Adds or removes a degree-3 vertex. On insertion the three attachment
/// edges must end at the current pins; the addition is a scaffold triangle
/// merged over two of them, with the scaffold base flipped away if the
/// host lacks it. On removal the bundle must be pinned at the vertex and
/// two of its neighbours, and the same construction runs backwards through
/// [`smw_split`]. The result is pinned at the three attachments.
pub fn smw_vertex(
    b: &TutteBundle,
    v: VertexId,
    edges: &[(VertexId, VertexId)],
    dir: ChangeKind,
) -> Result<TutteBundle, EngineError> {
    if edges.len() != 3 {
        return Err(EngineError::Precondition("a vertex update carries exactly three edges"));
    }
    let attach = attachments_of(v, edges)?;
    let p = b.p;
    match dir {
        ChangeKind::Insert => {
            if v >= b.host.n() || b.verts.binary_search(&v).is_ok() {
                return Err(EngineError::Precondition("the new vertex must be fresh"));
            }
            let pins: BTreeSet<_> = pin_array(b.pins).into_iter().collect();
            if attach.iter().copied().collect::<BTreeSet<_>>() != pins {
                return Err(EngineError::Precondition(
                    "a new vertex must attach to the pinned triple",
                ));
            }
            let (x1, x2, x3) = b.pins;
            let had_base = b.host.has_edge(x2, x3);
            let tri =
                DynamicGraph::from_edges(b.host.n(), &[(x2, x3), (x2, v), (x3, v)]);
            let tb = bundle_init(&tri, (x2, x3, v), p)?;
            let mut m = smw_merge(b, &tb, (x3, x2), (x1, v))?;
            if !had_base {
                m = smw_edge(&m, (x2, x3), ChangeKind::Delete)?;
            }
            Ok(m.with_pin_order((x1, x3, v)))
        }
        ChangeKind::Delete => {
            if b.host.degree(v) != 3 {
                return Err(EngineError::Precondition("only degree-3 vertices can be removed"));
            }
            let nbrs: BTreeSet<_> = b.host.neighbors(v).collect();
            if attach.iter().copied().collect::<BTreeSet<_>>() != nbrs {
                return Err(EngineError::Precondition(
                    "the edge list must match the vertex's attachments",
                ));
            }
            let pins: BTreeSet<_> = pin_array(b.pins).into_iter().collect();
            if !pins.contains(&v) {
                return Err(EngineError::Precondition(
                    "the bundle must be pinned at the vertex being removed",
                ));
            }
            let others: Vec<_> = pins.iter().copied().filter(|&w| w != v).collect();
            if !others.iter().all(|w| nbrs.contains(w)) {
                return Err(EngineError::Precondition(
                    "the remaining pins must be attachments of the vertex",
                ));
            }
            let x2 = *nbrs.iter().find(|w| !pins.contains(w)).expect("three attachments");
            let x3 = others[0].max(others[1]);
            let had_base = b.host.has_edge(x2, x3);
            let mut cur = b.clone();
            if !had_base {
                cur = smw_edge(&cur, (x2, x3), ChangeKind::Insert)?;
            }
            let part1: BTreeSet<_> = cur.verts.iter().copied().filter(|&w| w != v).collect();
            let part2 = BTreeSet::from([x2, x3, v]);
            let (mut keep, _tri) = smw_split(&cur, &part1, &part2)?;
            if !had_base {
                keep = smw_edge(&keep, (x2, x3), ChangeKind::Delete)?;
            }
            let mut sorted = attach.clone();
            sorted.sort_unstable();
            Ok(keep.with_pin_order((sorted[0], sorted[1], sorted[2])))
        }
    }
}

/// Orients an attachment square for a pair update: given v's attachments
/// `{a, b}` and v2's `{c, d}` with `x3` fixed in `{c, d}`, returns the
/// labelling (x1, x2, x3, x4) of the induced 4-cycle x1-x2-x3-x4, where v
/// straddles (x1, x2) and v2 straddles (x3, x4).
fn square_labelling(
    g: &DynamicGraph,
    ab: (VertexId, VertexId),
    cd: (VertexId, VertexId),
    x3: VertexId,
) -> Result<(VertexId, VertexId, VertexId, VertexId), EngineError> {
    let bad = EngineError::Precondition("the attachments must form an induced four-cycle");
    let x4 = if cd.0 == x3 { cd.1 } else { cd.0 };
    let (x1, x2) = match (g.has_edge(ab.0, x3), g.has_edge(ab.1, x3)) {
        (true, false) => (ab.1, ab.0),
        (false, true) => (ab.0, ab.1),
        _ => return Err(bad),
    };
    let cycle = g.has_edge(x1, x2) && g.has_edge(x2, x3) && g.has_edge(x3, x4) && g.has_edge(x4, x1);
    let chordless = !g.has_edge(x1, x3) && !g.has_edge(x2, x4);
    if !cycle || !chordless {
        return Err(bad);
    }
    Ok((x1, x2, x3, x4))
}

fn pair_attachments(
    v: VertexId,
    v2: VertexId,
    edges: &[(VertexId, VertexId)],
) -> Result<((VertexId, VertexId), (VertexId, VertexId)), EngineError> {
    let bad = EngineError::Precondition(
        "a pair update carries the bond edge and two attachments per vertex",
    );
    if edges.len() != 5 || v == v2 {
        return Err(bad);
    }
    let mut av = Vec::new();
    let mut a2 = Vec::new();
    let mut bond = false;
    for &(x, y) in edges {
        let e = (x.min(y), x.max(y));
        if e == norm(v, v2) {
            bond = true;
        } else if e.0 == v || e.1 == v {
            av.push(if e.0 == v { e.1 } else { e.0 });
        } else if e.0 == v2 || e.1 == v2 {
            a2.push(if e.0 == v2 { e.1 } else { e.0 });
        } else {
            return Err(bad);
        }
    }
    av.sort_unstable();
    a2.sort_unstable();
    let mut all = av.clone();
    all.extend(&a2);
    all.sort_unstable();
    all.dedup();
    if !bond || av.len() != 2 || a2.len() != 2 || all.len() != 4 || all.contains(&v) || all.contains(&v2)
    {
        return Err(bad);
    }
    Ok(((av[0], av[1]), (a2[0], a2[1])))
}

/// Adds or removes an adjacent vertex pair straddling an induced square.
/// `v` picks up two corners of the square, `v2` the other two, and the
/// bond edge joins them; this is the composite move that grows a planar
/// host across a quadrilateral face. Insertion runs triangle-merge,
/// pin-exchange, triangle-merge, then drops the one scaffold edge;
/// removal runs the same pipeline backwards. The result is pinned at
/// `(x3, v, v2)` after insertion and at the square `(x1, x2, x3)` after
/// removal, in the labelling of the square's induced cycle.
pub fn smw_pair(
    b: &TutteBundle,
    v: VertexId,
    v2: VertexId,
    edges: &[(VertexId, VertexId)],
    dir: ChangeKind,
) -> Result<TutteBundle, EngineError> {
    let (ab, cd) = pair_attachments(v, v2, edges)?;
    let p = b.p;
    match dir {
        ChangeKind::Insert => {
            for w in [v, v2] {
                if w >= b.host.n() || b.verts.binary_search(&w).is_ok() {
                    return Err(EngineError::Precondition("the new pair must be fresh"));
                }
            }
            let pins: BTreeSet<_> = pin_array(b.pins).into_iter().collect();
            let x3 = if pins.contains(&cd.0) && !pins.contains(&cd.1) {
                cd.0
            } else if pins.contains(&cd.1) && !pins.contains(&cd.0) {
                cd.1
            } else {
                return Err(EngineError::Precondition(
                    "pins must be the first attachment pair plus one second attachment",
                ));
            };
            if pins != BTreeSet::from([ab.0, ab.1, x3]) {
                return Err(EngineError::Precondition(
                    "pins must be the first attachment pair plus one second attachment",
                ));
            }
            let (x1, x2, x3, x4) = square_labelling(&b.host, ab, cd, x3)?;
            let nuniv = b.host.n();
            let t1 = DynamicGraph::from_edges(nuniv, &[(x1, x2), (x1, v), (x2, v)]);
            let tb1 = bundle_init(&t1, (x1, x2, v), p)?;
            let h3 = smw_merge(b, &tb1, (x1, x2), (x3, v))?;
            let h3 = smw_pins(&h3, (x3, x4, v))?;
            let t2 = DynamicGraph::from_edges(nuniv, &[(x3, x4), (x3, v2), (x4, v2)]);
            let tb2 = bundle_init(&t2, (x3, x4, v2), p)?;
            let h4 = smw_merge(&h3, &tb2, (x3, x4), (v, v2))?;
            let out = smw_edge(&h4, (x3, v), ChangeKind::Delete)?;
            Ok(out.with_pin_order((x3, v, v2)))
        }
        ChangeKind::Delete => {
            let nv: BTreeSet<_> = b.host.neighbors(v).collect();
            let n2: BTreeSet<_> = b.host.neighbors(v2).collect();
            if nv != BTreeSet::from([v2, ab.0, ab.1]) || n2 != BTreeSet::from([v, cd.0, cd.1]) {
                return Err(EngineError::Precondition(
                    "the edge list must match the pair's attachments",
                ));
            }
            let pins: BTreeSet<_> = pin_array(b.pins).into_iter().collect();
            if !pins.contains(&v) || !pins.contains(&v2) {
                return Err(EngineError::Precondition(
                    "the bundle must be pinned at the pair being removed",
                ));
            }
            let w = *pins.iter().find(|&&x| x != v && x != v2).expect("three pins");
            let x3 = if w == cd.0 || w == cd.1 { w } else { cd.0.min(cd.1) };
            let (x1, x2, x3, x4) = square_labelling(&b.host, ab, cd, x3)?;
            let mut cur = b.clone();
            if w != x3 {
                cur = smw_pins(&cur, (x3, v, v2))?;
            }
            cur = smw_edge(&cur, (x3, v), ChangeKind::Insert)?;
            let part1: BTreeSet<_> = cur.verts.iter().copied().filter(|&x| x != v2).collect();
            let part2 = BTreeSet::from([x3, x4, v2]);
            let (h3, _tri) = smw_split(&cur, &part1, &part2)?;
            let h3 = smw_pins(&h3, (x1, x3, v))?;
            let part1: BTreeSet<_> =
                h3.verts.iter().copied().filter(|&x| x != v && x != v2).collect();
            let part2 = BTreeSet::from([x1, x2, v]);
            let (out, _tri) = smw_split(&h3, &part1, &part2)?;
            Ok(out.with_pin_order((x1, x2, x3)))
        }
    }
}

/// The drawing the bundle encodes: per-vertex x and y coordinates mod p,
/// indexed by [`TutteBundle::verts`]. The pins sit at (0,0), (1,0) and
/// (0,1), so the coordinate vectors are just two columns of the inverse.
pub fn embed_coords(b: &TutteBundle) -> (Vec<u64>, Vec<u64>) {
    let cx = idx(&b.verts, b.pins.1);
    let cy = idx(&b.verts, b.pins.2);
    (b.tinv.col(cx), b.tinv.col(cy))
}

/// Coordinate families for two hosts, compared under a vertex pairing:
/// vertex i of the first host corresponds to vertex `pairing[i]` of the
/// second, as indices into the respective coordinate vectors. Both
/// families must cover the same primes, and at least `min_primes` of them;
/// agreement modulo every surviving prime is the engine's stand-in for
/// agreement of the exact rational drawings.
pub fn crt_compare(
    a: &BTreeMap<u64, (Vec<u64>, Vec<u64>)>,
    b: &BTreeMap<u64, (Vec<u64>, Vec<u64>)>,
    pairing: &[usize],
    min_primes: usize,
) -> Result<bool, EngineError> {
    if a.len() < min_primes {
        return Err(EngineError::PoolTooSmall);
    }
    if a.keys().ne(b.keys()) {
        return Err(EngineError::Precondition("coordinate families must share a prime set"));
    }
    for (p, (ax, ay)) in a {
        let (bx, by) = &b[p];
        if ax.len() != pairing.len() || bx.len() != pairing.len() {
            return Err(EngineError::Precondition("pairing must cover both hosts"));
        }
        for (i, &j) in pairing.iter().enumerate() {
            if ax[i] != bx[j] || ay[i] != by[j] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A deterministic pool of primes drawn from a fixed window. The seed
/// only picks the starting point of the scan; after that, primes come in
/// increasing order, wrapping once at the window's end. A prime that is
/// dropped (an update went singular on it) is burned and never returns,
/// so retries after a refresh run on genuinely fresh moduli.
#[derive(Debug, Clone)]
pub struct PrimePool {
    window: (u64, u64),
    target: usize,
    low_water: usize,
    cursor: u64,
    live: BTreeSet<u64>,
    burned: BTreeSet<u64>,
    refreshes: u64,
}

impl PrimePool {
    pub fn new(seed: u64, target: usize, low_water: usize, window: (u64, u64)) -> Self {
        assert!(window.0 < window.1, "empty prime window");
        assert!(low_water <= target, "low water above target");
        let span = window.1 - window.0;
        PrimePool {
            window,
            target,
            low_water,
            cursor: window.0 + seed % span,
            live: BTreeSet::new(),
            burned: BTreeSet::new(),
            refreshes: 0,
        }
    }

    pub fn live(&self) -> &BTreeSet<u64> {
        &self.live
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn low_water(&self) -> usize {
        self.low_water
    }

    pub fn is_low(&self) -> bool {
        self.live.len() < self.low_water
    }

    /// How many times the pool has been topped up.
    pub fn refreshes(&self) -> u64 {
        self.refreshes
    }

    pub fn burned(&self) -> &BTreeSet<u64> {
        &self.burned
    }

    /// Removes a prime from service permanently.
    pub fn drop_prime(&mut self, p: u64) {
        self.live.remove(&p);
        self.burned.insert(p);
    }

    /// The next unused prime in the window, scanning upward from the
    /// cursor and wrapping once. None when the window is exhausted.
    fn next_fresh_prime(&mut self) -> Option<u64> {
        let (lo, hi) = self.window;
        let start = self.cursor.clamp(lo, hi);
        for (from, to) in [(start, hi), (lo, start)] {
            let mut cur = from;
            while cur < to {
                let q = modp::next_prime_at_least(cur);
                if q >= to {
                    break;
                }
                cur = q + 1;
                if !self.live.contains(&q) && !self.burned.contains(&q) {
                    self.cursor = cur;
                    return Some(q);
                }
            }
        }
        None
    }
}

/// A host graph identity: its support and sorted edge set. Two rigid
/// components carry the same key exactly when their skeletons are the
/// same labelled graph, which is when they may share bundles.
pub type HostKey = (Vec<VertexId>, Vec<(VertexId, VertexId)>);

pub fn host_key(h: &DynamicGraph) -> HostKey {
    (support(h), sorted_edges(h))
}

/// Everything the engine maintains for one live host: its graph, the
/// canonical pin triple, and one bundle per live prime.
#[derive(Debug, Clone)]
pub struct HostEntry {
    pub host: DynamicGraph,
    pub pins: Pins,
    pub per_prime: BTreeMap<u64, TutteBundle>,
}

/// All maintained bundles, keyed by host identity. Hosts are exactly the
/// skeletons of the rigid components of the current decomposition.
#[derive(Debug, Clone, Default)]
pub struct BundleStore {
    hosts: BTreeMap<HostKey, HostEntry>,
}

impl BundleStore {
    pub fn new() -> Self {
        BundleStore::default()
    }

    pub fn len(&self) -> usize {
        self.hosts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hosts.is_empty()
    }

    pub fn get(&self, k: &HostKey) -> Option<&HostEntry> {
        self.hosts.get(k)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&HostKey, &HostEntry)> {
        self.hosts.iter()
    }
}

/// Deterministic pin triple for a host: the first three vertices of its
/// lexicographically smallest face boundary. Rigid skeletons are
/// 3-connected and planar, so the face list is canonical for the graph
/// and the pins always lie on a common face, which is what keeps the
/// pinned system invertible over the rationals.
pub fn canonical_pins(h: &DynamicGraph) -> Pins {
    let verts: BTreeSet<_> = support(h).into_iter().collect();
    let faces = embed_block(h, &verts).expect("rigid skeletons are planar");
    let best = faces.iter().min().expect("a planar embedding has faces");
    let w = best.vertices();
    (w[0], w[1], w[2])
}

fn rigid_hosts(g: &DynamicGraph, state: &DecompositionState) -> BTreeMap<HostKey, DynamicGraph> {
    let mut out = BTreeMap::new();
    for bc in state.bicomps().values() {
        if let Some(tri) = &bc.tri {
            for (&c, _) in tri.comps() {
                if tri.kind(g, c) == TriKind::Rigid {
                    let skel = tri.skeleton_graph(g, c);
                    out.insert(host_key(&skel), skel);
                }
            }
        }
    }
    out
}

pub(crate) fn purge_prime(store: &mut BundleStore, pool: &mut PrimePool, p: u64) {
    pool.drop_prime(p);
    for entry in store.hosts.values_mut() {
        entry.per_prime.remove(&p);
    }
}

/// Brings the store in line with the rigid components of `(g, state)` the
/// blunt way: vanished hosts are dropped and new hosts get fresh bundles
/// by Gaussian elimination for every live prime. Any prime whose
/// initialisation fails anywhere is dropped globally. Returns the primes
/// dropped.
pub fn sync_hosts(
    store: &mut BundleStore,
    pool: &mut PrimePool,
    g: &DynamicGraph,
    state: &DecompositionState,
) -> Vec<u64> {
    let want = rigid_hosts(g, state);
    store.hosts.retain(|k, _| want.contains_key(k));
    let mut failed = BTreeSet::new();
    for (k, h) in &want {
        if store.hosts.contains_key(k) {
            continue;
        }
        let pins = canonical_pins(h);
        let mut per_prime = BTreeMap::new();
        for &p in pool.live().iter() {
            match bundle_init(h, pins, p) {
                Ok(b) => {
                    per_prime.insert(p, b);
                }
                Err(_) => {
                    failed.insert(p);
                }
            }
        }
        store.hosts.insert(k.clone(), HostEntry { host: h.clone(), pins, per_prime });
    }
    for &p in &failed {
        purge_prime(store, pool, p);
    }
    failed.into_iter().collect()
}

/// Tops the pool back up to its target, building bundles for every stored
/// host under each incoming prime. A candidate that fails initialisation
/// on any host is burned and the scan moves on. Does nothing when the
/// pool is already at target.
pub fn pool_refresh(store: &mut BundleStore, pool: &mut PrimePool) {
    if pool.live().len() >= pool.target() {
        return;
    }
    pool.refreshes += 1;
    while pool.live().len() < pool.target() {
        let Some(q) = pool.next_fresh_prime() else {
            break;
        };
        let mut fresh = Vec::new();
        let mut ok = true;
        for (k, entry) in &store.hosts {
            match bundle_init(&entry.host, entry.pins, q) {
                Ok(b) => fresh.push((k.clone(), b)),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            pool.live.insert(q);
            for (k, b) in fresh {
                store.hosts.get_mut(&k).expect("listed host").per_prime.insert(q, b);
            }
        } else {
            pool.burned.insert(q);
        }
    }
}

/// What one coherence pass did: primes dropped along the way, whether the
/// pool was refreshed afterwards, and whether a structured fast path
/// (rather than fresh elimination) carried the bundles across.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoherentReport {
    pub dropped: Vec<u64>,
    pub refreshed: bool,
    pub fast_path: bool,
}

struct HostDiff {
    added: Vec<HostKey>,
    removed: Vec<HostKey>,
}

fn diff_hosts(store: &BundleStore, want: &BTreeMap<HostKey, DynamicGraph>) -> HostDiff {
    let added = want.keys().filter(|k| !store.hosts.contains_key(k)).cloned().collect();
    let removed = store.hosts.keys().filter(|k| !want.contains_key(k)).cloned().collect();
    HostDiff { added, removed }
}

fn edge_set(k: &HostKey) -> BTreeSet<(VertexId, VertexId)> {
    k.1.iter().copied().collect()
}

fn vert_set(k: &HostKey) -> BTreeSet<VertexId> {
    k.0.iter().copied().collect()
}

/// Carries every affected bundle across one committed edge change, using
/// the cheapest structured update the change type admits:
///
/// * co-3 flips rewrite one host in place at rank one;
/// * an insertion that fuses exactly two rigid components across a
///   separation pair goes through pin exchanges and one merge;
/// * a deletion that cleaves one rigid component into two goes through a
///   pin exchange and one split;
/// * every other shape falls back to dropping vanished hosts and fresh
///   elimination for new ones.
///
/// `g` and `state` are the graph and decomposition after the change. Any
/// prime that goes singular along the way is dropped globally, and the
/// pool is topped up when it falls below its low-water mark.
pub fn coherent_update(
    store: &mut BundleStore,
    pool: &mut PrimePool,
    g: &DynamicGraph,
    state: &DecompositionState,
    e: ChangeEvent,
    t: ChangeType,
) -> CoherentReport {
    let want = rigid_hosts(g, state);
    let diff = diff_hosts(store, &want);
    let mut report = CoherentReport::default();

    let fast = match (t.kind, t.before, t.after) {
        _ if diff.added.is_empty() && diff.removed.is_empty() => {
            // No rigid component changed identity; nothing to carry.
            true
        }
        (_, 3, 3) => fast_rewrite(store, pool, &diff, e, &mut report),
        (ChangeKind::Insert, 2, 3) => fast_fuse(store, pool, &want, &diff, e, &mut report),
        (ChangeKind::Delete, 3, 2) => fast_cleave(store, pool, &want, &diff, e, &mut report),
        _ => false,
    };
    report.fast_path = fast;
    if !fast {
        report.dropped.extend(sync_hosts(store, pool, g, state));
    }
    if pool.is_low() {
        pool_refresh(store, pool);
        report.refreshed = true;
    }
    report.dropped.sort_unstable();
    report.dropped.dedup();
    report
}

/// Co-3 fast path: one rigid component gained or lost exactly the flipped
/// edge. Rewrite its bundles in place and re-canonicalise the pins.
fn fast_rewrite(
    store: &mut BundleStore,
    pool: &mut PrimePool,
    diff: &HostDiff,
    e: ChangeEvent,
    report: &mut CoherentReport,
) -> bool {
    let ([new_key], [old_key]) = (&diff.added[..], &diff.removed[..]) else {
        return false;
    };
    if new_key.0 != old_key.0 {
        return false;
    }
    let (olde, newe) = (edge_set(old_key), edge_set(new_key));
    let flipped = norm(e.u, e.v);
    let sym: Vec<_> = olde.symmetric_difference(&newe).copied().collect();
    if sym != [flipped] {
        return false;
    }
    let entry = store.hosts.remove(old_key).expect("diffed key is stored");
    let host = match entry.host.apply_change(e) {
        Ok(h) => h,
        Err(_) => {
            store.hosts.insert(old_key.clone(), entry);
            return false;
        }
    };
    let pins = canonical_pins(&host);
    let mut per_prime = BTreeMap::new();
    for (p, b) in entry.per_prime {
        match smw_edge(&b, (e.u, e.v), e.kind).and_then(|b| smw_pins(&b, pins)) {
            Ok(nb) => {
                per_prime.insert(p, nb);
            }
            Err(_) => report.dropped.push(p),
        }
    }
    store.hosts.insert(new_key.clone(), HostEntry { host, pins, per_prime });
    for &p in &report.dropped {
        purge_prime(store, pool, p);
    }
    true
}

/// Fuse fast path: the insertion welded exactly two rigid components that
/// meet in a separation pair into one. Pin both sides onto the pair and
/// an endpoint of the new edge, merge with the new edge as the bridge,
/// flip the pair's virtual edge away if the fused skeleton lost it, and
/// re-canonicalise.
fn fast_fuse(
    store: &mut BundleStore,
    pool: &mut PrimePool,
    want: &BTreeMap<HostKey, DynamicGraph>,
    diff: &HostDiff,
    e: ChangeEvent,
    report: &mut CoherentReport,
) -> bool {
    let [fused_key] = &diff.added[..] else {
        return false;
    };
    let [ka, kb] = &diff.removed[..] else {
        return false;
    };
    let (va, vb) = (vert_set(ka), vert_set(kb));
    let pair: Vec<_> = va.intersection(&vb).copied().collect();
    let [s, t] = pair[..] else {
        return false;
    };
    let (u, v) = (e.u, e.v);
    let (k1, k2) = if va.contains(&u) && vb.contains(&v) {
        (ka, kb)
    } else if va.contains(&v) && vb.contains(&u) {
        (kb, ka)
    } else {
        return false;
    };
    let (u, v) = if vert_set(k1).contains(&u) { (u, v) } else { (v, u) };
    for w in [u, v] {
        if w == s || w == t {
            return false;
        }
    }
    if vert_set(fused_key) != vert_set(k1).union(&vert_set(k2)).copied().collect() {
        return false;
    }
    let mut welded: BTreeSet<_> = edge_set(k1).union(&edge_set(k2)).copied().collect();
    welded.insert(norm(u, v));
    let fused_edges = edge_set(fused_key);
    let pair_edge = norm(s, t);
    let drop_pair_edge = if fused_edges == welded {
        false
    } else if welded.contains(&pair_edge)
        && fused_edges == welded.iter().copied().filter(|&x| x != pair_edge).collect()
    {
        true
    } else {
        return false;
    };

    let e1 = store.hosts.remove(k1).expect("diffed key is stored");
    let e2 = store.hosts.remove(k2).expect("diffed key is stored");
    let host = want[fused_key].clone();
    let pins = canonical_pins(&host);
    let mut per_prime = BTreeMap::new();
    for (p, b1) in e1.per_prime {
        let Some(b2) = e2.per_prime.get(&p) else {
            report.dropped.push(p);
            continue;
        };
        let carried = (|| {
            let b1 = smw_pins(&b1, (s, t, u))?;
            let b2 = smw_pins(b2, (s, t, v))?;
            let mut m = smw_merge(&b1, &b2, (s, t), (u, v))?;
            if drop_pair_edge {
                m = smw_edge(&m, pair_edge, ChangeKind::Delete)?;
            }
            smw_pins(&m, pins)
        })();
        match carried {
            Ok(m) => {
                debug_assert_eq!(host_key(m.host()), *fused_key);
                per_prime.insert(p, m);
            }
            Err(_) => report.dropped.push(p),
        }
    }
    store.hosts.insert(fused_key.clone(), HostEntry { host, pins, per_prime });
    for &p in &report.dropped {
        purge_prime(store, pool, p);
    }
    true
}

/// Cleave fast path: the deletion cut one rigid component into two pieces
/// joined by a fresh separation pair. Pin the fused bundle at one pair
/// vertex and the deleted edge's endpoints, split with the deleted edge
/// as the bridge, give each side the pair's virtual edge if it is not a
/// real one, and re-canonicalise.
fn fast_cleave(
    store: &mut BundleStore,
    pool: &mut PrimePool,
    want: &BTreeMap<HostKey, DynamicGraph>,
    diff: &HostDiff,
    e: ChangeEvent,
    report: &mut CoherentReport,
) -> bool {
    let [fused_key] = &diff.removed[..] else {
        return false;
    };
    let [ka, kb] = &diff.added[..] else {
        return false;
    };
    let (va, vb) = (vert_set(ka), vert_set(kb));
    let pair: Vec<_> = va.intersection(&vb).copied().collect();
    let [s, t] = pair[..] else {
        return false;
    };
    let (k1, k2) = if va.contains(&e.u) && vb.contains(&e.v) {
        (ka, kb)
    } else if va.contains(&e.v) && vb.contains(&e.u) {
        (kb, ka)
    } else {
        return false;
    };
    let (part1, part2) = (vert_set(k1), vert_set(k2));
    let (u, v) = if part1.contains(&e.u) { (e.u, e.v) } else { (e.v, e.u) };
    for w in [u, v] {
        if w == s || w == t {
            return false;
        }
    }
    let fused_verts = vert_set(fused_key);
    if fused_verts != part1.union(&part2).copied().collect() {
        return false;
    }
    // The stored skeleton must cut cleanly: each side's new skeleton is
    // its induced slice of the fused one plus the pair's virtual edge.
    let fused_edges = edge_set(fused_key);
    let pair_edge = norm(s, t);
    for (k, part) in [(k1, &part1), (k2, &part2)] {
        let mut induced: BTreeSet<_> = fused_edges
            .iter()
            .copied()
            .filter(|&(x, y)| part.contains(&x) && part.contains(&y))
            .collect();
        induced.insert(pair_edge);
        if edge_set(k) != induced {
            return false;
        }
    }
    let entry = store.hosts.remove(fused_key).expect("diffed key is stored");
    let h1 = want[k1].clone();
    let h2 = want[k2].clone();
    let pins1 = canonical_pins(&h1);
    let pins2 = canonical_pins(&h2);
    let (mut per1, mut per2) = (BTreeMap::new(), BTreeMap::new());
    for (p, b) in entry.per_prime {
        let carried = (|| {
            let b = smw_pins(&b, (s, u, v))?;
            let (mut r1, mut r2) = smw_split(&b, &part1, &part2)?;
            if !r1.host.has_edge(s, t) {
                r1 = smw_edge(&r1, pair_edge, ChangeKind::Insert)?;
            }
            if !r2.host.has_edge(s, t) {
                r2 = smw_edge(&r2, pair_edge, ChangeKind::Insert)?;
            }
            Ok::<_, EngineError>((smw_pins(&r1, pins1)?, smw_pins(&r2, pins2)?))
        })();
        match carried {
            Ok((r1, r2)) => {
                debug_assert_eq!(host_key(r1.host()), *k1);
                debug_assert_eq!(host_key(r2.host()), *k2);
                per1.insert(p, r1);
                per2.insert(p, r2);
            }
            Err(_) => report.dropped.push(p),
        }
    }
    store.hosts.insert(k1.clone(), HostEntry { host: h1, pins: pins1, per_prime: per1 });
    store.hosts.insert(k2.clone(), HostEntry { host: h2, pins: pins2, per_prime: per2 });
    for &p in &report.dropped {
        purge_prime(store, pool, p);
    }
    true
}
