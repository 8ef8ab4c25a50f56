//! Combinatorial planar embeddings.
//!
//! Faces are directed vertex cycles; a valid embedding of a biconnected
//! graph lists every directed edge on exactly one face boundary, so each
//! undirected edge lies on exactly two faces. Embeddings are produced by
//! the incremental face-splitting method of Demoucron, Malgrange and
//! Pertuiset: grow an embedded subgraph from a cycle, placing one path of a
//! bridge (fragment) at a time into a face that contains all of the
//! fragment's attachment vertices. For 3-connected graphs the result is
//! unique up to reflection (Whitney), which is what makes the face set a
//! canonical object the rest of the engine can lean on.
//!
//! All choices are made in deterministic (sorted) order, so the same graph
//! always receives the same embedding.

use crate::graph::{DynamicGraph, VertexId};
use crate::EngineError;
use std::collections::BTreeSet;

/// A face boundary: a directed cycle of vertices, stored rotated so the
/// smallest vertex comes first. A face and its reverse are distinct.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CombFace(Vec<VertexId>);

impl CombFace {
    pub fn new(mut cycle: Vec<VertexId>) -> Self {
        assert!(cycle.len() >= 3, "a face boundary needs at least 3 vertices");
        let min_pos = cycle
            .iter()
            .enumerate()
            .min_by_key(|&(_, v)| v)
            .map(|(i, _)| i)
            .expect("non-empty cycle");
        cycle.rotate_left(min_pos);
        CombFace(cycle)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.contains(&v)
    }

    pub fn reversed(&self) -> CombFace {
        let mut c = self.0.clone();
        c.reverse();
        CombFace::new(c)
    }

    /// Position of `v` on the boundary, if present.
    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.0.iter().position(|&x| x == v)
    }

    /// True when walking the boundary forward from `x` meets `y` strictly
    /// before `z`. All three must be distinct boundary vertices.
    pub fn in_cyclic_order(&self, x: VertexId, y: VertexId, z: VertexId) -> bool {
        if x == y || y == z || x == z {
            return false;
        }
        match (self.position(x), self.position(y), self.position(z)) {
            (Some(px), Some(py), Some(pz)) => {
                let l = self.len();
                (py + l - px) % l < (pz + l - px) % l
            }
            _ => false,
        }
    }

    /// True when the four distinct vertices appear in this cyclic order,
    /// reading the boundary forward.
    pub fn in_cyclic_order4(&self, a: VertexId, b: VertexId, c: VertexId, d: VertexId) -> bool {
        self.in_cyclic_order(a, b, c) && self.in_cyclic_order(a, c, d)
    }
}

/// A planar embedding with a designated outer face. The outer face also
/// appears in `faces`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub faces: Vec<CombFace>,
    pub outer: CombFace,
}

impl Embedding {
    pub fn mirror(&self) -> Embedding {
        Embedding {
            faces: self.faces.iter().map(CombFace::reversed).collect(),
            outer: self.outer.reversed(),
        }
    }

    /// The two faces bounded by the undirected edge (u, v): first the one
    /// traversing u then v, then the one traversing v then u.
    pub fn faces_at_edge(&self, u: VertexId, v: VertexId) -> Option<(&CombFace, &CombFace)> {
        let mut forward = None;
        let mut backward = None;
        for f in &self.faces {
            let b = f.vertices();
            let l = b.len();
            for i in 0..l {
                if b[i] == u && b[(i + 1) % l] == v {
                    forward = Some(f);
                } else if b[i] == v && b[(i + 1) % l] == u {
                    backward = Some(f);
                }
            }
        }
        match (forward, backward) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        }
    }
}

/// One unembedded fragment relative to the embedded subgraph: either a lone
/// edge between embedded vertices, or a component of unembedded vertices
/// together with its edges into the embedded part.
struct Fragment {
    attachments: Vec<VertexId>,
    inner: BTreeSet<VertexId>,
}

/// Embeds a biconnected graph, returning its faces, or None when the graph
/// is not planar. The input must be biconnected with at least 3 vertices.
fn embed_biconnected(g: &DynamicGraph, verts: &BTreeSet<VertexId>) -> Option<Vec<CombFace>> {
    let m: usize = verts.iter().map(|&v| g.neighbors(v).filter(|w| verts.contains(w)).count()).sum::<usize>() / 2;
    if verts.len() >= 3 && m > 3 * verts.len() - 6 {
        return None;
    }

    let start = find_cycle(g, verts);
    let mut faces: Vec<CombFace> = vec![
        CombFace::new(start.clone()),
        CombFace::new(start.iter().rev().copied().collect()),
    ];
    let mut embedded_verts: BTreeSet<VertexId> = start.iter().copied().collect();
    let mut embedded_edges: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    for i in 0..start.len() {
        let (a, b) = (start[i], start[(i + 1) % start.len()]);
        embedded_edges.insert((a.min(b), a.max(b)));
    }
    let total_edges = m;

    while embedded_edges.len() < total_edges {
        let fragments = find_fragments(g, verts, &embedded_verts, &embedded_edges);
        debug_assert!(!fragments.is_empty());

        // Admissible faces contain every attachment of the fragment.
        let admissible: Vec<Vec<usize>> = fragments
            .iter()
            .map(|fr| {
                (0..faces.len())
                    .filter(|&fi| fr.attachments.iter().all(|&a| faces[fi].contains(a)))
                    .collect()
            })
            .collect();
        if admissible.iter().any(|a| a.is_empty()) {
            return None;
        }
        let pick = admissible
            .iter()
            .position(|a| a.len() == 1)
            .unwrap_or(0);
        let fragment = &fragments[pick];
        let face_idx = admissible[pick][0];

        let path = fragment_path(g, fragment);
        for w in path.windows(2) {
            let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
            embedded_edges.insert((a, b));
        }
        for &p in &path[1..path.len() - 1] {
            embedded_verts.insert(p);
        }

        let face = faces.swap_remove(face_idx);
        let (f1, f2) = split_face(&face, &path);
        faces.push(f1);
        faces.push(f2);
    }

    debug_assert_eq!(
        faces.iter().map(CombFace::len).sum::<usize>(),
        2 * total_edges,
        "face boundaries must cover each directed edge once"
    );
    debug_assert_eq!(
        verts.len() + faces.len(),
        total_edges + 2,
        "Euler's formula must hold"
    );
    Some(faces)
}

/// A deterministic cycle in the biconnected subgraph: DFS from the smallest
/// vertex until the first back edge closes a cycle.
fn find_cycle(g: &DynamicGraph, verts: &BTreeSet<VertexId>) -> Vec<VertexId> {
    let start = *verts.iter().next().expect("non-empty vertex set");
    let mut parent: std::collections::BTreeMap<VertexId, VertexId> = Default::default();
    let mut order = vec![start];
    let mut pos: std::collections::BTreeMap<VertexId, usize> = Default::default();
    pos.insert(start, 0);
    let mut stack = vec![(start, g.neighbors(start).filter(|w| verts.contains(w)).collect::<Vec<_>>(), 0usize)];
    while let Some((v, nbrs, idx)) = stack.last().cloned() {
        if idx >= nbrs.len() {
            stack.pop();
            continue;
        }
        stack.last_mut().expect("stack non-empty").2 += 1;
        let w = nbrs[idx];
        if Some(&w) == parent.get(&v) {
            continue;
        }
        if let Some(&pw) = pos.get(&w) {
            // Back edge (v, w): the cycle is w ... v along the DFS path.
            let pv = pos[&v];
            if pw < pv {
                return order[pw..=pv].to_vec();
            }
            continue;
        }
        parent.insert(w, v);
        pos.insert(w, order.len());
        order.push(w);
        stack.push((w, g.neighbors(w).filter(|x| verts.contains(x)).collect(), 0));
    }
    unreachable!("biconnected graphs with >= 3 vertices contain a cycle")
}

fn find_fragments(
    g: &DynamicGraph,
    verts: &BTreeSet<VertexId>,
    embedded_verts: &BTreeSet<VertexId>,
    embedded_edges: &BTreeSet<(VertexId, VertexId)>,
) -> Vec<Fragment> {
    let mut fragments = Vec::new();
    // Lone edges between embedded vertices.
    for &u in embedded_verts {
        for v in g.neighbors(u) {
            if u < v
                && embedded_verts.contains(&v)
                && verts.contains(&v)
                && !embedded_edges.contains(&(u, v))
            {
                fragments.push(Fragment { attachments: vec![u, v], inner: BTreeSet::new() });
            }
        }
    }
    // Components of the unembedded vertices, with their attachments.
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    for &s in verts {
        if embedded_verts.contains(&s) || seen.contains(&s) {
            continue;
        }
        let mut inner = BTreeSet::new();
        let mut attach = BTreeSet::new();
        let mut stack = vec![s];
        inner.insert(s);
        while let Some(x) = stack.pop() {
            for y in g.neighbors(x) {
                if !verts.contains(&y) {
                    continue;
                }
                if embedded_verts.contains(&y) {
                    attach.insert(y);
                } else if inner.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen.extend(inner.iter().copied());
        fragments.push(Fragment {
            attachments: attach.into_iter().collect(),
            inner,
        });
    }
    fragments
}

/// A path through the fragment between two of its attachments, with all
/// interior vertices unembedded.
fn fragment_path(g: &DynamicGraph, fr: &Fragment) -> Vec<VertexId> {
    if fr.inner.is_empty() {
        return fr.attachments.clone();
    }
    let a = fr.attachments[0];
    let others: BTreeSet<VertexId> = fr.attachments[1..].iter().copied().collect();
    // BFS from a through inner vertices only.
    let mut prev: std::collections::BTreeMap<VertexId, VertexId> = Default::default();
    let mut queue = std::collections::VecDeque::new();
    for x in g.neighbors(a) {
        if fr.inner.contains(&x) && !prev.contains_key(&x) {
            prev.insert(x, a);
            queue.push_back(x);
        }
    }
    while let Some(x) = queue.pop_front() {
        for y in g.neighbors(x) {
            if others.contains(&y) {
                let mut path = vec![y, x];
                let mut c = x;
                while let Some(&p) = prev.get(&c) {
                    path.push(p);
                    if p == a {
                        break;
                    }
                    c = p;
                }
                path.reverse();
                return path;
            }
            if fr.inner.contains(&y) && !prev.contains_key(&y) {
                prev.insert(y, x);
                queue.push_back(y);
            }
        }
    }
    unreachable!("a fragment of a biconnected graph joins two attachments")
}

/// Splits `face` along `path` (whose endpoints lie on the face) into the
/// two faces that replace it.
fn split_face(face: &CombFace, path: &[VertexId]) -> (CombFace, CombFace) {
    let a = path[0];
    let b = *path.last().expect("path has endpoints");
    let boundary = face.vertices();
    let l = boundary.len();
    let pa = face.position(a).expect("path start on face");
    let pb = face.position(b).expect("path end on face");

    // boundary = a, segA..., b, segB... (cyclically).
    let mut seg_a = Vec::new();
    let mut i = (pa + 1) % l;
    while i != pb {
        seg_a.push(boundary[i]);
        i = (i + 1) % l;
    }
    let mut seg_b = Vec::new();
    let mut i = (pb + 1) % l;
    while i != pa {
        seg_b.push(boundary[i]);
        i = (i + 1) % l;
    }

    let interior = &path[1..path.len() - 1];
    // Keep the old boundary direction on each side and close with the path.
    let mut f1 = vec![a];
    f1.extend_from_slice(&seg_a);
    f1.push(b);
    f1.extend(interior.iter().rev().copied());
    let mut f2 = vec![a];
    f2.extend(interior.iter().copied());
    f2.push(b);
    f2.extend_from_slice(&seg_b);
    (CombFace::new(f1), CombFace::new(f2))
}

/// Planarity of the whole dynamic graph: every block must embed.
pub fn is_planar(g: &DynamicGraph) -> bool {
    for block in g.blocks() {
        if block.len() < 3 {
            continue;
        }
        let verts: BTreeSet<VertexId> =
            block.iter().flat_map(|&(u, v)| [u, v]).collect();
        if embed_biconnected(g, &verts).is_none() {
            return false;
        }
    }
    true
}

/// Canonical embedding of a biconnected subgraph given by its vertex set.
/// Deterministic; None when non-planar.
pub fn embed_block(g: &DynamicGraph, verts: &BTreeSet<VertexId>) -> Option<Vec<CombFace>> {
    embed_biconnected(g, verts)
}

/// Simple 3-connectivity test: connected, at least 4 vertices, and no
/// vertex pair disconnects the graph (restricted to `verts`).
pub fn is_triconnected(g: &DynamicGraph, verts: &BTreeSet<VertexId>) -> bool {
    if verts.len() < 4 {
        return false;
    }
    if !connected_within(g, verts, &BTreeSet::new()) {
        return false;
    }
    let vs: Vec<VertexId> = verts.iter().copied().collect();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            let removed: BTreeSet<VertexId> = [vs[i], vs[j]].into_iter().collect();
            if !connected_within(g, verts, &removed) {
                return false;
            }
        }
    }
    true
}

fn connected_within(g: &DynamicGraph, verts: &BTreeSet<VertexId>, removed: &BTreeSet<VertexId>) -> bool {
    let mut it = verts.iter().filter(|v| !removed.contains(v));
    let start = match it.next() {
        Some(&v) => v,
        None => return true,
    };
    let mut seen = BTreeSet::new();
    seen.insert(start);
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for y in g.neighbors(x) {
            if verts.contains(&y) && !removed.contains(&y) && seen.insert(y) {
                stack.push(y);
            }
        }
    }
    verts.iter().filter(|v| !removed.contains(v)).all(|v| seen.contains(v))
}

/// Embeds a 3-connected graph with the given outer face. The face (one of
/// the two boundary orders) selects between the embedding and its mirror.
pub fn embed_3connected(g: &DynamicGraph, verts: &BTreeSet<VertexId>, f: &CombFace) -> Result<Embedding, EngineError> {
    if !is_triconnected(g, verts) {
        return Err(EngineError::Not3Connected);
    }
    let faces = embed_biconnected(g, verts).ok_or(EngineError::NotAFace)?;
    if faces.iter().any(|x| x == f) {
        return Ok(Embedding { faces, outer: f.clone() });
    }
    let mirrored: Vec<CombFace> = faces.iter().map(CombFace::reversed).collect();
    if mirrored.iter().any(|x| x == f) {
        return Ok(Embedding { faces: mirrored, outer: f.clone() });
    }
    Err(EngineError::NotAFace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verts_of(g: &DynamicGraph) -> BTreeSet<VertexId> {
        (0..g.n()).collect()
    }

    fn k4() -> DynamicGraph {
        DynamicGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    /// Triangles (0,1,2) and (3,4,5), rungs (0,3), (1,4), (2,5).
    fn prism() -> DynamicGraph {
        DynamicGraph::from_edges(
            6,
            &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)],
        )
    }

    fn cube() -> DynamicGraph {
        DynamicGraph::from_edges(
            8,
            &[
                (0, 1), (1, 2), (2, 3), (3, 0),
                (4, 5), (5, 6), (6, 7), (7, 4),
                (0, 4), (1, 5), (2, 6), (3, 7),
            ],
        )
    }

    #[test]
    fn k4_embeds_with_four_triangles() {
        let g = k4();
        let f = CombFace::new(vec![0, 1, 2]);
        let e = embed_3connected(&g, &verts_of(&g), &f).unwrap();
        assert_eq!(e.faces.len(), 4);
        assert!(e.faces.iter().all(|f| f.len() == 3));
        assert!(e.faces.contains(&f));
    }

    #[test]
    fn prism_outer_square_gives_five_faces() {
        let g = prism();
        // Outer square through both triangles: 0-1-4-3.
        let f = CombFace::new(vec![0, 1, 4, 3]);
        let e = embed_3connected(&g, &verts_of(&g), &f).unwrap();
        assert_eq!(e.faces.len(), 5);
        let mut lens: Vec<usize> = e.faces.iter().map(CombFace::len).collect();
        lens.sort_unstable();
        assert_eq!(lens, vec![3, 3, 4, 4, 4]);
    }

    #[test]
    fn cube_has_six_square_faces() {
        let g = cube();
        let f = CombFace::new(vec![0, 1, 2, 3]);
        let e = embed_3connected(&g, &verts_of(&g), &f).unwrap();
        assert_eq!(e.faces.len(), 6);
        assert!(e.faces.iter().all(|f| f.len() == 4));
    }

    #[test]
    fn non_face_cycle_is_rejected() {
        let g = prism();
        // 0-1-4-5 is not a face boundary of the prism.
        let f = CombFace::new(vec![0, 1, 4, 5]);
        assert_eq!(
            embed_3connected(&g, &verts_of(&g), &f),
            Err(EngineError::NotAFace)
        );
    }

    #[test]
    fn both_orientations_are_faces_of_opposite_mirrors() {
        let g = k4();
        let f = CombFace::new(vec![0, 1, 2]);
        let e1 = embed_3connected(&g, &verts_of(&g), &f).unwrap();
        let e2 = embed_3connected(&g, &verts_of(&g), &f.reversed()).unwrap();
        let mut s1: Vec<CombFace> = e1.faces.clone();
        let mut s2: Vec<CombFace> = e2.faces.iter().map(CombFace::reversed).collect();
        s1.sort();
        s2.sort();
        assert_eq!(s1, s2);
    }

    #[test]
    fn reembedding_with_any_face_reproduces_the_face_set() {
        let g = prism();
        let f = CombFace::new(vec![0, 1, 4, 3]);
        let e = embed_3connected(&g, &verts_of(&g), &f).unwrap();
        for other in &e.faces {
            let e2 = embed_3connected(&g, &verts_of(&g), other).unwrap();
            let mut s1 = e.faces.clone();
            let mut s2 = e2.faces.clone();
            s1.sort();
            s2.sort();
            assert_eq!(s1, s2, "face set must not depend on the chosen outer face");
        }
    }

    #[test]
    fn k5_and_k33_are_not_planar() {
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                edges.push((i, j));
            }
        }
        let k5 = DynamicGraph::from_edges(5, &edges);
        assert!(!is_planar(&k5));

        let mut edges = Vec::new();
        for i in 0..3 {
            for j in 3..6 {
                edges.push((i, j));
            }
        }
        let k33 = DynamicGraph::from_edges(6, &edges);
        assert!(!is_planar(&k33));
    }

    #[test]
    fn planar_graphs_pass() {
        assert!(is_planar(&k4()));
        assert!(is_planar(&prism()));
        assert!(is_planar(&cube()));
        let path = DynamicGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert!(is_planar(&path));
        assert!(is_planar(&DynamicGraph::new(3)));
    }

    #[test]
    fn k5_minus_edge_is_planar() {
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                if (i, j) != (0, 1) {
                    edges.push((i, j));
                }
            }
        }
        let g = DynamicGraph::from_edges(5, &edges);
        assert!(is_planar(&g));
    }

    #[test]
    fn edges_lie_on_exactly_two_faces() {
        let g = prism();
        let f = CombFace::new(vec![0, 1, 4, 3]);
        let e = embed_3connected(&g, &verts_of(&g), &f).unwrap();
        for (u, v) in g.edges() {
            let count = e
                .faces
                .iter()
                .filter(|f| {
                    let b = f.vertices();
                    (0..b.len()).any(|i| {
                        let (a, bb) = (b[i], b[(i + 1) % b.len()]);
                        (a, bb) == (u, v) || (a, bb) == (v, u)
                    })
                })
                .count();
            assert_eq!(count, 2, "edge ({u},{v}) must bound exactly two faces");
        }
    }

    #[test]
    fn triconnectivity_check() {
        assert!(is_triconnected(&k4(), &(0..4).collect()));
        assert!(is_triconnected(&prism(), &(0..6).collect()));
        let c4 = DynamicGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!(!is_triconnected(&c4, &(0..4).collect()));
    }
}
