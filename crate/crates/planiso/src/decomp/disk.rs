//! Disk graphs: predicting an unfurl without performing it.
//!
//! Deleting an edge of a 3-connected component can shatter it into a whole
//! path of smaller components, and the separating pairs of that path can be
//! read off the intact component: they straddle the two faces flanking the
//! doomed edge, one endpoint on each, witnessed by a third face, with
//! crossing pairs excluded. Arranged around the disk the two faces bound,
//! those pairs form a directed cycle whose order is exactly the order of
//! the pairs along the unfurled path, which is what makes the prediction
//! useful: path distances after the deletion are disk distances before it.

use super::norm;
use crate::embedding::{embed_block, embed_3connected, CombFace, Embedding};
use crate::embedding::is_triconnected;
use crate::graph::{ChangeEvent, DynamicGraph, VertexId};
use crate::EngineError;
use std::collections::BTreeSet;

/// A directed cycle over vertex pairs straddling two faces. `nodes` is in
/// cycle order starting from the smallest pair; `arcs` lists (i, successor).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiskGraph {
    pub nodes: Vec<(VertexId, VertexId)>,
    pub arcs: Vec<(usize, usize)>,
}

impl DiskGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Cyclic-order test that places no constraint on coinciding vertices;
/// straddling pairs may share an endpoint on one of the faces.
fn cyc3(f: &CombFace, x: VertexId, y: VertexId, z: VertexId) -> bool {
    if x == y || y == z || x == z {
        return true;
    }
    f.in_cyclic_order(x, y, z)
}

/// Builds the disk graph of two faces of a 3-connected planar graph.
///
/// Nodes are pairs (a, b) with a only on f1 and b only on f2 that share some
/// third face, minus any pair crossed by another such pair on a common face.
/// The arc from one node to the next requires every remaining node to come
/// later in the walk around both face boundaries; the two boundaries wind
/// oppositely around the disk between them, so one of them is read reversed.
pub fn disk_graph(
    c: &DynamicGraph,
    f1: &CombFace,
    f2: &CombFace,
) -> Result<DiskGraph, EngineError> {
    let verts: BTreeSet<VertexId> = (0..c.n()).filter(|&v| c.degree(v) > 0).collect();
    let emb = embed_3connected(c, &verts, f1)?;
    if f1 == f2 || !emb.faces.iter().any(|f| f == f2) {
        return Err(EngineError::NotAFacePair);
    }
    let s1: BTreeSet<VertexId> = f1.vertices().iter().copied().collect();
    let s2: BTreeSet<VertexId> = f2.vertices().iter().copied().collect();
    let aside: Vec<VertexId> = f1.vertices().iter().copied().filter(|v| !s2.contains(v)).collect();
    let bside: Vec<VertexId> = f2.vertices().iter().copied().filter(|v| !s1.contains(v)).collect();
    let witnesses: Vec<&CombFace> = emb.faces.iter().filter(|f| *f != f1 && *f != f2).collect();

    let mut cand: Vec<(VertexId, VertexId)> = Vec::new();
    for &a in &aside {
        for &b in &bside {
            if witnesses.iter().any(|f| f.contains(a) && f.contains(b)) {
                cand.push((a, b));
            }
        }
    }
    let nodes: Vec<(VertexId, VertexId)> = cand
        .iter()
        .copied()
        .filter(|&(a, b)| {
            !cand.iter().any(|&(a2, b2)| {
                a2 != a
                    && b2 != b
                    && witnesses
                        .iter()
                        .any(|f| f.in_cyclic_order4(a, a2, b, b2) || f.in_cyclic_order4(a, b2, b, a2))
            })
        })
        .collect();

    let d = nodes.len();
    if d == 0 {
        return Ok(DiskGraph { nodes, arcs: vec![] });
    }
    if d == 1 {
        return Ok(DiskGraph { nodes, arcs: vec![(0, 0)] });
    }
    let f2r = f2.reversed();
    let mut succ = vec![usize::MAX; d];
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            let ok = (0..d).filter(|&k| k != i && k != j).all(|k| {
                cyc3(f1, nodes[i].0, nodes[j].0, nodes[k].0)
                    && cyc3(&f2r, nodes[i].1, nodes[j].1, nodes[k].1)
            });
            if ok {
                debug_assert_eq!(succ[i], usize::MAX, "two successors for one disk node");
                succ[i] = j;
            }
        }
        debug_assert_ne!(succ[i], usize::MAX, "disk node without successor");
    }
    // Reorder into cycle order starting from the smallest pair.
    let start = (0..d).min_by_key(|&i| nodes[i]).expect("nonempty");
    let mut ordered = Vec::with_capacity(d);
    let mut cur = start;
    for _ in 0..d {
        ordered.push(nodes[cur]);
        cur = succ[cur];
    }
    debug_assert_eq!(cur, start, "disk arcs do not close into a single cycle");
    let arcs = (0..d).map(|i| (i, (i + 1) % d)).collect();
    Ok(DiskGraph { nodes: ordered, arcs })
}

/// Predicts the separating pairs (in disk order) and the tri-tree path
/// length that deleting `e` from the 3-connected graph `c` would produce,
/// without touching `c`.
pub fn predict_unfurl_tri(
    c: &DynamicGraph,
    e: (VertexId, VertexId),
) -> Result<(Vec<(VertexId, VertexId)>, usize), EngineError> {
    let verts: BTreeSet<VertexId> = (0..c.n()).filter(|&v| c.degree(v) > 0).collect();
    let (u, v) = norm(e.0, e.1);
    if !c.has_edge(u, v) {
        return Err(EngineError::IllegalChange);
    }
    if !is_triconnected(c, &verts) {
        return Err(EngineError::Not3Connected);
    }
    let after = c.apply_change(ChangeEvent::delete(u, v)).expect("edge present");
    if is_triconnected(&after, &verts) {
        return Err(EngineError::Still3Connected);
    }
    let faces = embed_block(c, &verts)
        .ok_or(EngineError::Precondition("input graph is not planar"))?;
    let emb = Embedding { outer: faces[0].clone(), faces };
    let (ff, fb) = emb.faces_at_edge(u, v).expect("an embedded edge bounds two faces");
    let (ff, fb) = (ff.clone(), fb.clone());
    let disk = disk_graph(c, &ff, &fb)?;
    debug_assert!(!disk.is_empty(), "a broken component leaves at least one pair");
    let pairs: Vec<(VertexId, VertexId)> = disk.nodes.iter().map(|&(a, b)| norm(a, b)).collect();
    let len = 2 * disk.len();
    Ok((pairs, len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{build_tri_tree, TriNode};

    fn verts_of(g: &DynamicGraph) -> BTreeSet<VertexId> {
        (0..g.n()).filter(|&v| g.degree(v) > 0).collect()
    }

    fn prism() -> DynamicGraph {
        DynamicGraph::from_edges(
            7,
            &[(1, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 6), (1, 4), (2, 5), (3, 6)],
        )
    }

    fn k4() -> DynamicGraph {
        DynamicGraph::from_edges(5, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])
    }

    fn stored_face(g: &DynamicGraph, want: &[VertexId]) -> CombFace {
        let set: BTreeSet<VertexId> = want.iter().copied().collect();
        embed_block(g, &verts_of(g))
            .unwrap()
            .into_iter()
            .find(|f| f.vertices().iter().copied().collect::<BTreeSet<_>>() == set)
            .expect("face present in the embedding")
    }

    /// Equality of cyclic sequences up to rotation and reflection.
    fn cyclically_equal(xs: &[(VertexId, VertexId)], ys: &[(VertexId, VertexId)]) -> bool {
        let n = xs.len();
        if n != ys.len() {
            return false;
        }
        if n == 0 {
            return true;
        }
        (0..n).any(|r| {
            (0..n).all(|i| xs[(i + r) % n] == ys[i])
                || (0..n).all(|i| xs[(n + r - i) % n] == ys[i])
        })
    }

    #[test]
    fn prism_disk_is_a_two_cycle() {
        let g = prism();
        let f1 = stored_face(&g, &[1, 2, 5, 4]);
        let f2 = stored_face(&g, &[1, 3, 6, 4]);
        let disk = disk_graph(&g, &f1, &f2).unwrap();
        let set: BTreeSet<(VertexId, VertexId)> =
            disk.nodes.iter().map(|&(a, b)| norm(a, b)).collect();
        assert_eq!(set, BTreeSet::from([(2, 3), (5, 6)]));
        assert_eq!(disk.arcs, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn prism_unfurl_prediction() {
        let (pairs, len) = predict_unfurl_tri(&prism(), (1, 4)).unwrap();
        let set: BTreeSet<(VertexId, VertexId)> = pairs.into_iter().collect();
        assert_eq!(set, BTreeSet::from([(2, 3), (5, 6)]));
        assert_eq!(len, 4);
    }

    #[test]
    fn k4_unfurl_prediction_is_a_single_pair() {
        assert_eq!(predict_unfurl_tri(&k4(), (1, 2)), Ok((vec![(3, 4)], 2)));
    }

    #[test]
    fn every_k4_face_pair_has_one_disk_node() {
        let g = k4();
        let faces = embed_block(&g, &verts_of(&g)).unwrap();
        for f1 in &faces {
            for f2 in &faces {
                if f1 == f2 {
                    assert_eq!(disk_graph(&g, f1, f2), Err(EngineError::NotAFacePair));
                    continue;
                }
                let disk = disk_graph(&g, f1, f2).unwrap();
                assert_eq!(disk.len(), 1);
                // The lone node joins the two vertices not shared by the faces.
                let (a, b) = disk.nodes[0];
                assert!(f1.contains(a) && !f2.contains(a));
                assert!(f2.contains(b) && !f1.contains(b));
            }
        }
    }

    #[test]
    fn octahedron_stays_triconnected() {
        let g = DynamicGraph::from_edges(
            6,
            &[
                (0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 5), (2, 4), (2, 5),
                (3, 4), (3, 5), (4, 5),
            ],
        );
        assert_eq!(predict_unfurl_tri(&g, (0, 1)), Err(EngineError::Still3Connected));
    }

    #[test]
    fn misuse_is_rejected() {
        let chorded = DynamicGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        assert_eq!(predict_unfurl_tri(&chorded, (0, 2)), Err(EngineError::Not3Connected));
        assert_eq!(predict_unfurl_tri(&k4(), (1, 5)), Err(EngineError::IllegalChange));
    }

    /// A strip of rigid regions and one triangle between two boundary
    /// paths, closed by an edge from end to end. Deleting that edge unfurls
    /// the lot into a path with eight separating pairs.
    fn strip() -> DynamicGraph {
        let mut edges = vec![(0, 18)];
        // Top path 0,1,..,10,18 and bottom path 0,11,..,17,18.
        for i in 0..10 {
            edges.push((i, i + 1));
        }
        edges.push((10, 18));
        edges.push((0, 11));
        for i in 11..17 {
            edges.push((i, i + 1));
        }
        edges.push((17, 18));
        // The separating chords.
        for &p in &[(3, 11), (4, 12), (5, 13), (6, 14), (7, 14), (8, 15), (9, 16), (10, 17)] {
            edges.push(p);
        }
        // Hub vertices making the regions between chords rigid.
        let hubs: [(VertexId, &[VertexId]); 7] = [
            (19, &[0, 1, 2, 3, 11]),
            (20, &[3, 4, 12, 11]),
            (21, &[4, 5, 13, 12]),
            (22, &[5, 6, 14, 13]),
            (23, &[7, 8, 15, 14]),
            (24, &[8, 9, 16, 15]),
            (25, &[9, 10, 17, 16]),
        ];
        for (h, rim) in hubs {
            for &r in rim {
                edges.push((h, r));
            }
        }
        DynamicGraph::from_edges(26, &edges)
    }

    #[test]
    fn strip_unfurls_into_eight_pairs() {
        let g = strip();
        let expect = [(3, 11), (4, 12), (5, 13), (6, 14), (7, 14), (8, 15), (9, 16), (10, 17)];
        let (pairs, len) = predict_unfurl_tri(&g, (0, 18)).unwrap();
        assert_eq!(len, 16);
        assert!(
            cyclically_equal(&pairs, &expect),
            "disk order {pairs:?} does not match the strip order"
        );

        // The prediction matches the decomposition actually produced.
        let after = g.apply_change(ChangeEvent::delete(0, 18)).unwrap();
        let tree = build_tri_tree(&after, &verts_of(&after));
        assert_eq!(tree.pairs(), &expect.iter().copied().collect());
        let cu = tree.comps_containing(0);
        let cv = tree.comps_containing(18);
        assert_eq!((cu.len(), cv.len()), (1, 1));
        assert_eq!(tree.tree_distance(&TriNode::Comp(cu[0]), &TriNode::Comp(cv[0])), Ok(16));
    }
}
