//! Planarity by Kuratowski's theorem.
//!
//! A graph is planar iff it contains no subdivision of K5 and no subdivision
//! of K3,3. This module searches for such subdivisions directly: choose
//! branch vertices, then try to realize the required connections as
//! internally vertex-disjoint paths by exhaustive search. Deliberately naive;
//! the engine's face-tracing planarity test is checked against this.

use crate::graph::{bits, CompactGraph};

pub fn oracle_is_planar(g: &CompactGraph) -> bool {
    g.components().into_iter().all(|comp| {
        let (c, _) = g.induced(comp);
        component_planar(&c)
    })
}

fn component_planar(g: &CompactGraph) -> bool {
    let n = g.n();
    if n <= 4 {
        return true;
    }
    if g.edge_count() > 3 * n - 6 {
        return false;
    }
    !has_k5_subdivision(g) && !has_k33_subdivision(g)
}

fn has_k5_subdivision(g: &CompactGraph) -> bool {
    let cands: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) >= 4).collect();
    if cands.len() < 5 {
        return false;
    }
    let mut pick = Vec::new();
    choose(&cands, 5, 0, &mut pick, &mut |branch: &[usize]| {
        let pairs: Vec<(usize, usize)> = (0..5)
            .flat_map(|i| (i + 1..5).map(move |j| (i, j)))
            .map(|(i, j)| (branch[i], branch[j]))
            .collect();
        let bmask = branch.iter().fold(0u64, |m, &v| m | 1 << v);
        connect_pairs(g, bmask, &pairs, 0)
    })
}

fn has_k33_subdivision(g: &CompactGraph) -> bool {
    let cands: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) >= 3).collect();
    if cands.len() < 6 {
        return false;
    }
    let mut pick = Vec::new();
    choose(&cands, 6, 0, &mut pick, &mut |branch: &[usize]| {
        // split the six into 3+3; fixing branch[0] on the left halves the work
        let rest = &branch[1..];
        for i in 0..5 {
            for j in i + 1..5 {
                let left = [branch[0], rest[i], rest[j]];
                let right: Vec<usize> =
                    (0..5).filter(|&k| k != i && k != j).map(|k| rest[k]).collect();
                let pairs: Vec<(usize, usize)> = left
                    .iter()
                    .flat_map(|&a| right.iter().map(move |&b| (a, b)))
                    .collect();
                let bmask = branch.iter().fold(0u64, |m, &v| m | 1 << v);
                if connect_pairs(g, bmask, &pairs, 0) {
                    return true;
                }
            }
        }
        false
    })
}

fn choose(
    cands: &[usize],
    k: usize,
    from: usize,
    pick: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if pick.len() == k {
        return f(pick);
    }
    for i in from..cands.len() {
        if cands.len() - i < k - pick.len() {
            break;
        }
        pick.push(cands[i]);
        if choose(cands, k, i + 1, pick, f) {
            pick.pop();
            return true;
        }
        pick.pop();
    }
    false
}

/// Try to connect every pair by paths whose interiors are pairwise disjoint,
/// avoid all branch vertices, and avoid `used`.
fn connect_pairs(g: &CompactGraph, branch: u64, pairs: &[(usize, usize)], used: u64) -> bool {
    let Some(&(s, t)) = pairs.first() else {
        return true;
    };
    let avail = g.full_mask() & !branch & !used;
    // quick reachability prune in the graph restricted to avail + endpoints
    if !reachable(g, s, t, avail) {
        return false;
    }
    extend_path(g, branch, used, pairs, t, s, 0)
}

fn extend_path(
    g: &CompactGraph,
    branch: u64,
    used: u64,
    pairs: &[(usize, usize)],
    t: usize,
    v: usize,
    interior: u64,
) -> bool {
    let avail = g.full_mask() & !branch & !used & !interior;
    for w in bits(g.adj(v)) {
        if w == t {
            if connect_pairs(g, branch, &pairs[1..], used | interior) {
                return true;
            }
        } else if avail & (1 << w) != 0
            && extend_path(g, branch, used, pairs, t, w, interior | 1 << w)
        {
            return true;
        }
    }
    false
}

fn reachable(g: &CompactGraph, s: usize, t: usize, interior_avail: u64) -> bool {
    let allowed = interior_avail | 1 << t;
    let mut seen = 1u64 << s;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0;
        for v in bits(frontier) {
            next |= g.adj(v) & allowed & !seen;
        }
        if next & (1 << t) != 0 {
            return true;
        }
        seen |= next;
        frontier = next;
    }
    false
}
