//! Triconnected components by exhaustive enumeration.
//!
//! A 3-connected separating pair of a biconnected graph is a separating pair
//! {u, v} joined by three internally vertex-disjoint paths. A triconnected
//! component is an inclusion-maximal vertex set U that no such pair splits,
//! i.e. for every pair the set U minus the pair lies within one connected
//! component of the graph minus the pair. Its skeleton consists of the
//! induced real edges plus a virtual edge for every pair lying inside U.
//! Each component is either 3-connected ("rigid") or a chordless cycle.
//!
//! Everything below follows those definitions literally: pairs are found by
//! testing all vertex pairs, components by testing all vertex subsets. This
//! is exponential and intended purely as a reference for small instances.

use crate::graph::{bits, CompactGraph};
use crate::kconn::disjoint_paths_at_least;
use crate::{OracleError, SIZE_LIMIT_ISO};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleCompKind {
    Cycle,
    Rigid,
}

#[derive(Clone, Debug)]
pub struct OracleTriComp {
    /// Vertex ids, sorted.
    pub verts: Vec<usize>,
    pub kind: OracleCompKind,
    /// Skeleton edges (u, v, is_virtual) with u < v, sorted. An edge is
    /// virtual when it stands for a separating pair with no real edge.
    pub edges: Vec<(usize, usize, bool)>,
}

#[derive(Clone, Debug)]
pub struct OracleTriDecomp {
    /// 3-connected separating pairs (u, v) with u < v, sorted.
    pub pairs: Vec<(usize, usize)>,
    /// Components sorted by vertex list.
    pub comps: Vec<OracleTriComp>,
    /// Tree edges (component index, pair index): the pair's vertices both
    /// occur in the component.
    pub tree_edges: Vec<(usize, usize)>,
}

/// All 3-connected separating pairs of a biconnected graph.
pub fn separating_pairs(g: &CompactGraph) -> Vec<(usize, usize)> {
    let full = g.full_mask();
    let mut out = Vec::new();
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            let rest = full & !(1 << u) & !(1 << v);
            if rest == 0 || g.is_connected_within(rest) {
                continue;
            }
            if disjoint_paths_at_least(g, u, v, 3) {
                out.push((u, v));
            }
        }
    }
    out
}

/// Decompose a biconnected graph on at least 3 vertices into its
/// triconnected components.
pub fn oracle_spqr(g: &CompactGraph) -> Result<OracleTriDecomp, OracleError> {
    let n = g.n();
    if n > SIZE_LIMIT_ISO {
        return Err(OracleError::SizeLimit);
    }
    if n < 3 || !is_biconnected(g) {
        return Err(OracleError::NotBiconnected);
    }
    let pairs = separating_pairs(g);

    // Inclusion-maximal sets not split by any pair. "Not split" is judged in
    // the ambient graph: U minus the pair must lie inside one connected
    // component of g minus the pair. Connecting paths may leave U; inside the
    // component they are represented by virtual edges, so U itself need not
    // induce a connected subgraph.
    let full = g.full_mask();
    let pair_comps: Vec<Vec<u64>> = pairs
        .iter()
        .map(|&(u, v)| g.components_within(full & !(1 << u) & !(1 << v)))
        .collect();
    let coherent = |mask: u64| {
        pairs.iter().zip(&pair_comps).all(|(&(u, v), comps)| {
            let rest = mask & !(1 << u) & !(1 << v);
            rest == 0 || comps.iter().any(|&c| rest & !c == 0)
        })
    };
    let mut cands: Vec<u64> = (1u64..(1 << n))
        .filter(|m| m.count_ones() >= 3 && coherent(*m))
        .collect();
    cands.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
    let mut maximal: Vec<u64> = Vec::new();
    for m in cands {
        if !maximal.iter().any(|&big| big & m == m) {
            maximal.push(m);
        }
    }

    let mut comps: Vec<OracleTriComp> = maximal
        .iter()
        .map(|&mask| {
            let verts: Vec<usize> = bits(mask).collect();
            let mut edges = Vec::new();
            for (i, &u) in verts.iter().enumerate() {
                for &v in &verts[i + 1..] {
                    if g.has_edge(u, v) {
                        edges.push((u, v, false));
                    } else if pairs.binary_search(&(u, v)).is_ok() {
                        edges.push((u, v, true));
                    }
                }
            }
            edges.sort();
            let kind = if verts
                .iter()
                .all(|&v| edges.iter().filter(|&&(a, b, _)| a == v || b == v).count() == 2)
            {
                OracleCompKind::Cycle
            } else {
                OracleCompKind::Rigid
            };
            OracleTriComp { verts, kind, edges }
        })
        .collect();
    comps.sort_by(|a, b| a.verts.cmp(&b.verts));

    let mut tree_edges = Vec::new();
    for (ci, c) in comps.iter().enumerate() {
        for (pi, &(u, v)) in pairs.iter().enumerate() {
            if c.verts.contains(&u) && c.verts.contains(&v) {
                tree_edges.push((ci, pi));
            }
        }
    }
    Ok(OracleTriDecomp { pairs, comps, tree_edges })
}

pub fn is_biconnected(g: &CompactGraph) -> bool {
    let full = g.full_mask();
    let n = g.n();
    if n < 2 || !g.is_connected_within(full) {
        return false;
    }
    if n == 2 {
        return g.has_edge(0, 1);
    }
    (0..n).all(|v| g.is_connected_within(full & !(1 << v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prism() -> CompactGraph {
        // triangles 0-1-2 and 3-4-5, rungs (0,3), (1,4), (2,5)
        CompactGraph::from_edges(
            6,
            &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)],
        )
    }

    #[test]
    fn k4_is_a_single_rigid_node() {
        let g = CompactGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let d = oracle_spqr(&g).unwrap();
        assert!(d.pairs.is_empty());
        assert_eq!(d.comps.len(), 1);
        assert_eq!(d.comps[0].kind, OracleCompKind::Rigid);
        assert_eq!(d.comps[0].verts, vec![0, 1, 2, 3]);
    }

    #[test]
    fn c6_is_a_single_cycle_node() {
        let g = CompactGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        let d = oracle_spqr(&g).unwrap();
        assert!(d.pairs.is_empty());
        assert_eq!(d.comps.len(), 1);
        assert_eq!(d.comps[0].kind, OracleCompKind::Cycle);
    }

    #[test]
    fn c4_plus_chord_splits_into_two_triangles() {
        let g = CompactGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let d = oracle_spqr(&g).unwrap();
        assert_eq!(d.pairs, vec![(0, 2)]);
        assert_eq!(d.comps.len(), 2);
        assert_eq!(d.comps[0].verts, vec![0, 1, 2]);
        assert_eq!(d.comps[1].verts, vec![0, 2, 3]);
        // the chord is a real edge in both skeletons
        for c in &d.comps {
            assert!(c.edges.contains(&(0, 2, false)));
            assert_eq!(c.kind, OracleCompKind::Cycle);
        }
        assert_eq!(d.tree_edges, vec![(0, 0), (1, 0)]);
    }

    #[test]
    fn theta_graph_three_cycles_around_one_pair() {
        // three internally disjoint 0-1 paths: via 2, via 3-4, via 5
        let g = CompactGraph::from_edges(
            6,
            &[(0, 2), (2, 1), (0, 3), (3, 4), (4, 1), (0, 5), (5, 1)],
        );
        let d = oracle_spqr(&g).unwrap();
        assert_eq!(d.pairs, vec![(0, 1)]);
        assert_eq!(d.comps.len(), 3);
        for c in &d.comps {
            assert_eq!(c.kind, OracleCompKind::Cycle);
            assert!(c.edges.contains(&(0, 1, true)));
        }
    }

    #[test]
    fn prism_minus_rung_unfurls_into_a_path() {
        let mut g = prism();
        g.remove_edge(0, 3);
        let d = oracle_spqr(&g).unwrap();
        assert_eq!(d.pairs, vec![(1, 2), (4, 5)]);
        let vert_sets: Vec<Vec<usize>> = d.comps.iter().map(|c| c.verts.clone()).collect();
        assert_eq!(vert_sets, vec![vec![0, 1, 2], vec![1, 2, 4, 5], vec![3, 4, 5]]);
        assert_eq!(d.comps[1].kind, OracleCompKind::Cycle);
        // 5 tree nodes, path shape: 2 pairs each adjacent to 2 comps
        assert_eq!(d.tree_edges.len(), 4);
    }

    #[test]
    fn whole_prism_is_rigid() {
        let d = oracle_spqr(&prism()).unwrap();
        assert!(d.pairs.is_empty());
        assert_eq!(d.comps.len(), 1);
        assert_eq!(d.comps[0].kind, OracleCompKind::Rigid);
    }

    #[test]
    fn k4_with_subdivided_edge() {
        // K4 on {0,1,2,3} with edge (0,1) replaced by path 0-4-1
        let g = CompactGraph::from_edges(
            5,
            &[(0, 4), (4, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        );
        let d = oracle_spqr(&g).unwrap();
        assert_eq!(d.pairs, vec![(0, 1)]);
        assert_eq!(d.comps.len(), 2);
        assert_eq!(d.comps[0].verts, vec![0, 1, 2, 3]);
        assert_eq!(d.comps[0].kind, OracleCompKind::Rigid);
        assert!(d.comps[0].edges.contains(&(0, 1, true)));
        assert_eq!(d.comps[1].verts, vec![0, 1, 4]);
        assert_eq!(d.comps[1].kind, OracleCompKind::Cycle);
    }

    #[test]
    fn rejects_non_biconnected_input() {
        let g = CompactGraph::from_edges(3, &[(0, 1), (1, 2)]);
        assert_eq!(oracle_spqr(&g).unwrap_err(), OracleError::NotBiconnected);
    }
}
