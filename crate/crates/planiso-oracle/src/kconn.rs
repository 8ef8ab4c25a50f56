//! Co-k-connectivity checks by definition.
//!
//! Two vertices are co-k-connected when some k-connected component contains
//! both. For k = 2 the components are the blocks (maximal biconnected vertex
//! sets), found here by exhaustive subset enumeration; for k = 3 they are the
//! rigid triconnected components delivered by the SPQR oracle. Internally
//! vertex-disjoint paths are counted with a unit-capacity flow in the split
//! graph (Menger).

use crate::graph::{bits, CompactGraph};
use crate::spqr::{oracle_spqr, OracleCompKind};
use crate::OracleError;

/// Are there at least `k` pairwise internally vertex-disjoint u-v paths?
/// A direct edge counts as one path.
pub fn disjoint_paths_at_least(g: &CompactGraph, u: usize, v: usize, k: usize) -> bool {
    assert!(u != v);
    if k == 0 {
        return true;
    }
    // Split each vertex w into w_in = 2w and w_out = 2w+1 with capacity 1,
    // infinite for the terminals. Edges get capacity 1 in both directions.
    let n = g.n();
    let size = 2 * n;
    let mut cap = vec![vec![0i32; size]; size];
    let big = k as i32 + 1;
    for w in 0..n {
        cap[2 * w][2 * w + 1] = if w == u || w == v { big } else { 1 };
        for x in bits(g.adj(w)) {
            cap[2 * w + 1][2 * x] = 1;
        }
    }
    let (s, t) = (2 * u + 1, 2 * v);
    let mut flow = 0;
    while flow < k as i32 {
        // BFS augmenting path
        let mut prev = vec![usize::MAX; size];
        prev[s] = s;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            if x == t {
                break;
            }
            for y in 0..size {
                if cap[x][y] > 0 && prev[y] == usize::MAX {
                    prev[y] = x;
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

/// Maximal biconnected vertex sets (blocks), as masks, by subset enumeration.
/// A set qualifies when it induces a connected graph with no cut vertex;
/// two-vertex sets qualify exactly when the edge is present.
pub fn oracle_bicomps(g: &CompactGraph) -> Vec<u64> {
    let n = g.n();
    let mut cands: Vec<u64> = Vec::new();
    for mask in 1u64..(1 << n) {
        if !is_biconnected_set(g, mask) {
            continue;
        }
        cands.push(mask);
    }
    cands
        .iter()
        .copied()
        .filter(|&m| !cands.iter().any(|&m2| m2 != m && m2 & m == m))
        .collect()
}

fn is_biconnected_set(g: &CompactGraph, mask: u64) -> bool {
    let size = mask.count_ones();
    if size < 2 || !g.is_connected_within(mask) {
        return false;
    }
    if size == 2 {
        let mut it = bits(mask);
        let (a, b) = (it.next().unwrap(), it.next().unwrap());
        return g.has_edge(a, b);
    }
    bits(mask).all(|v| g.is_connected_within(mask & !(1 << v)))
}

/// Cut vertices: vertices lying in two or more blocks.
pub fn oracle_cut_vertices(g: &CompactGraph) -> Vec<usize> {
    let blocks = oracle_bicomps(g);
    (0..g.n())
        .filter(|&v| blocks.iter().filter(|&&b| b & (1 << v) != 0).count() >= 2)
        .collect()
}

/// Is some k-connected component home to both u and v?
///
/// k = 0 is trivially true, k = 1 means same connected component, k = 2 means
/// same block (a lone edge counts), and k = 3 means same rigid triconnected
/// component. Cycle components do not count for k = 3.
pub fn oracle_kconn(g: &CompactGraph, u: usize, v: usize, k: usize) -> Result<bool, OracleError> {
    assert!(k <= 3 && u < g.n() && v < g.n());
    if k == 0 || u == v {
        return Ok(k == 0 || k >= 1);
    }
    let same_component = g.component_of(u) & (1 << v) != 0;
    if k == 1 {
        return Ok(same_component);
    }
    if !same_component {
        return Ok(false);
    }
    let same_block = g.has_edge(u, v) || disjoint_paths_at_least(g, u, v, 2);
    if k == 2 {
        return Ok(same_block);
    }
    if !same_block {
        return Ok(false);
    }
    let block = oracle_bicomps(g)
        .into_iter()
        .find(|&b| b & (1 << u) != 0 && b & (1 << v) != 0)
        .expect("u and v share a block");
    if block.count_ones() < 4 {
        // a triangle or a lone edge has no rigid component
        return Ok(false);
    }
    let (b, ids) = g.induced(block);
    let iu = ids.iter().position(|&x| x == u).unwrap();
    let iv = ids.iter().position(|&x| x == v).unwrap();
    let decomp = oracle_spqr(&b)?;
    Ok(decomp.comps.iter().any(|c| {
        c.kind == OracleCompKind::Rigid && c.verts.contains(&iu) && c.verts.contains(&iv)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> CompactGraph {
        CompactGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])
    }

    fn k4() -> CompactGraph {
        CompactGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    #[test]
    fn menger_counts() {
        assert!(disjoint_paths_at_least(&c4(), 0, 2, 2));
        assert!(!disjoint_paths_at_least(&c4(), 0, 2, 3));
        assert!(disjoint_paths_at_least(&k4(), 0, 2, 3));
        assert!(!disjoint_paths_at_least(&k4(), 0, 2, 4));
    }

    #[test]
    fn blocks_of_two_triangles_sharing_a_vertex() {
        let g = CompactGraph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]);
        let mut blocks = oracle_bicomps(&g);
        blocks.sort();
        assert_eq!(blocks, vec![0b00111, 0b11100]);
        assert_eq!(oracle_cut_vertices(&g), vec![2]);
    }

    #[test]
    fn blocks_of_a_path() {
        let g = CompactGraph::from_edges(3, &[(0, 1), (1, 2)]);
        let mut blocks = oracle_bicomps(&g);
        blocks.sort();
        assert_eq!(blocks, vec![0b011, 0b110]);
    }

    #[test]
    fn kconn_spec_cases() {
        // opposite vertices of C4: co-2 but not co-3
        assert!(oracle_kconn(&c4(), 0, 2, 2).unwrap());
        assert!(!oracle_kconn(&c4(), 0, 2, 3).unwrap());
        // K4: every pair co-3
        assert!(oracle_kconn(&k4(), 0, 2, 3).unwrap());
        // disconnected pair: not even co-1
        let g = CompactGraph::new(2);
        assert!(!oracle_kconn(&g, 0, 1, 1).unwrap());
        assert!(oracle_kconn(&g, 0, 1, 0).unwrap());
    }

    #[test]
    fn triangle_is_not_co3() {
        let g = CompactGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]);
        assert!(oracle_kconn(&g, 0, 1, 2).unwrap());
        assert!(!oracle_kconn(&g, 0, 1, 3).unwrap());
    }
}
