//! Constrained, colour-respecting graph isomorphism by backtracking.

use crate::graph::{bits, CompactGraph};
use crate::{OracleError, SIZE_LIMIT_ISO};

/// `m[v]` is the image of vertex v.
pub type Matching = Vec<usize>;

/// Find an isomorphism g1 -> g2 extending `constraints` and preserving
/// `colours` (when given), or report that none exists.
pub fn oracle_iso(
    g1: &CompactGraph,
    g2: &CompactGraph,
    constraints: &[(usize, usize)],
    colours: Option<(&[u64], &[u64])>,
) -> Result<Option<Matching>, OracleError> {
    let n = g1.n();
    if n > SIZE_LIMIT_ISO || g2.n() > SIZE_LIMIT_ISO {
        return Err(OracleError::SizeLimit);
    }
    if n != g2.n() || g1.edge_count() != g2.edge_count() {
        return Ok(None);
    }
    if let Some((c1, c2)) = colours {
        assert!(c1.len() == n && c2.len() == n, "colour slices must cover all vertices");
    }

    let mut map = vec![usize::MAX; n];
    let mut rmap = vec![usize::MAX; n];
    for &(u, v) in constraints {
        if u >= n || v >= n {
            return Ok(None);
        }
        if map[u] != usize::MAX && map[u] != v {
            return Ok(None);
        }
        if rmap[v] != usize::MAX && rmap[v] != u {
            return Ok(None);
        }
        map[u] = v;
        rmap[v] = u;
    }

    // constrained vertices first, then decreasing degree
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (map[v] == usize::MAX, std::cmp::Reverse(g1.degree(v)), v));

    fn compatible(
        g1: &CompactGraph,
        g2: &CompactGraph,
        colours: &Option<(&[u64], &[u64])>,
        map: &[usize],
        u: usize,
        v: usize,
    ) -> bool {
        if g1.degree(u) != g2.degree(v) {
            return false;
        }
        if let Some((c1, c2)) = colours {
            if c1[u] != c2[v] {
                return false;
            }
        }
        // adjacency with the already-mapped part must agree both ways
        for w in bits(g1.adj(u)) {
            if map[w] != usize::MAX && !g2.has_edge(v, map[w]) {
                return false;
            }
        }
        for w in (0..g1.n()).filter(|&w| map[w] != usize::MAX) {
            if !g1.has_edge(u, w) && g2.has_edge(v, map[w]) {
                return false;
            }
        }
        true
    }

    fn backtrack(
        g1: &CompactGraph,
        g2: &CompactGraph,
        colours: &Option<(&[u64], &[u64])>,
        order: &[usize],
        idx: usize,
        map: &mut Vec<usize>,
        rmap: &mut Vec<usize>,
    ) -> bool {
        let Some(&u) = order.get(idx) else {
            return true;
        };
        if map[u] != usize::MAX {
            // pre-constrained; still needs a consistency check against the prefix
            let v = map[u];
            map[u] = usize::MAX;
            let ok = compatible(g1, g2, colours, map, u, v);
            map[u] = v;
            return ok && backtrack(g1, g2, colours, order, idx + 1, map, rmap);
        }
        for v in 0..g2.n() {
            if rmap[v] != usize::MAX || !compatible(g1, g2, colours, map, u, v) {
                continue;
            }
            map[u] = v;
            rmap[v] = u;
            if backtrack(g1, g2, colours, order, idx + 1, map, rmap) {
                return true;
            }
            map[u] = usize::MAX;
            rmap[v] = usize::MAX;
        }
        false
    }

    if backtrack(g1, g2, &colours, &order, 0, &mut map, &mut rmap) {
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

/// Plain unconstrained, uncoloured isomorphism test.
pub fn oracle_iso_plain(g1: &CompactGraph, g2: &CompactGraph) -> Result<bool, OracleError> {
    Ok(oracle_iso(g1, g2, &[], None)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> CompactGraph {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        CompactGraph::from_edges(n, &edges)
    }

    #[test]
    fn triangles_and_paths() {
        let k3 = cycle(3);
        let p3 = CompactGraph::from_edges(3, &[(0, 1), (1, 2)]);
        assert!(oracle_iso(&k3, &k3, &[], None).unwrap().is_some());
        assert!(oracle_iso(&k3, &p3, &[], None).unwrap().is_none());
    }

    #[test]
    fn constraints_respect_adjacency() {
        let c6 = cycle(6);
        // rotation by two is an automorphism
        assert!(oracle_iso(&c6, &c6, &[(0, 2), (1, 3)], None).unwrap().is_some());
        // mapping adjacent to non-adjacent is not
        assert!(oracle_iso(&c6, &c6, &[(0, 0), (1, 2)], None).unwrap().is_none());
    }

    #[test]
    fn colours_break_symmetry() {
        let p3 = CompactGraph::from_edges(3, &[(0, 1), (1, 2)]);
        let iso = oracle_iso(&p3, &p3, &[], Some((&[7, 1, 9], &[9, 1, 7]))).unwrap();
        assert_eq!(iso, Some(vec![2, 1, 0]));
        assert!(oracle_iso(&p3, &p3, &[(0, 0)], Some((&[7, 1, 9], &[9, 1, 7])))
            .unwrap()
            .is_none());
    }

    #[test]
    fn returned_matching_preserves_edges() {
        let g1 = CompactGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]);
        // relabel by the permutation 0->3, 1->4, 2->0, 3->1, 4->2
        let perm = [3usize, 4, 0, 1, 2];
        let mut g2 = CompactGraph::new(5);
        for (u, v) in g1.edges() {
            g2.add_edge(perm[u], perm[v]);
        }
        let m = oracle_iso(&g1, &g2, &[], None).unwrap().unwrap();
        for u in 0..5 {
            for v in u + 1..5 {
                assert_eq!(g1.has_edge(u, v), g2.has_edge(m[u], m[v]));
            }
        }
    }

    #[test]
    fn size_limit_enforced() {
        let g = CompactGraph::new(20);
        assert_eq!(oracle_iso(&g, &g, &[], None).unwrap_err(), OracleError::SizeLimit);
    }
}
