//! Graphviz DOT rendering of graphs and decomposition trees, for debugging
//! and for eyeballing what an update did to the structure.

use crate::decomp::{DecompositionState, TriKind, TriNode, TriTree};
use crate::graph::DynamicGraph;
use std::fmt::Write as _;

/// Renders the plain graph.
pub fn graph_dot(g: &DynamicGraph) -> String {
    let mut out = String::from("graph g {\n");
    for v in 0..g.n() {
        if g.degree(v) > 0 {
            let _ = writeln!(out, "  {v};");
        }
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}

fn tri_label(g: &DynamicGraph, tree: &TriTree, node: &TriNode) -> String {
    match *node {
        TriNode::Comp(c) => {
            let verts: Vec<String> =
                tree.comp_verts(c).iter().map(|v| v.to_string()).collect();
            let kind = match tree.kind(g, c) {
                TriKind::Cycle => "cycle",
                TriKind::Rigid => "rigid",
            };
            format!("\"{} {}\"", kind, verts.join(" "))
        }
        TriNode::Pair(a, b) => format!("\"pair {a},{b}\""),
    }
}

/// Renders one triconnected decomposition tree.
pub fn tri_tree_dot(g: &DynamicGraph, tree: &TriTree) -> String {
    let mut out = String::from("graph tri {\n");
    for (&c, _) in tree.comps() {
        let _ = writeln!(out, "  {};", tri_label(g, tree, &TriNode::Comp(c)));
    }
    for &(a, b) in tree.pairs() {
        let pair = TriNode::Pair(a, b);
        let _ = writeln!(out, "  {} [shape=box];", tri_label(g, tree, &pair));
        for c in tree.comps_containing_both(a, b) {
            let _ = writeln!(
                out,
                "  {} -- {};",
                tri_label(g, tree, &pair),
                tri_label(g, tree, &TriNode::Comp(c))
            );
        }
    }
    out.push_str("}\n");
    out
}

/// Renders the block forest with one cluster per block's tri-tree.
pub fn decomposition_dot(state: &DecompositionState) -> String {
    let mut out = String::from("graph decomp {\n");
    for (id, b) in state.bicomps() {
        let verts: Vec<String> = b.verts.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "  block{} [label=\"block {}\"];", id.0, verts.join(" "));
        if let Some(tree) = &b.tri {
            for (&c, vs) in tree.comps() {
                let cv: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(
                    out,
                    "  block{}_c{} [label=\"{}\"];",
                    id.0,
                    c.0,
                    cv.join(" ")
                );
                let _ = writeln!(out, "  block{} -- block{}_c{};", id.0, id.0, c.0);
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::build_tri_tree;
    use std::collections::BTreeSet;

    #[test]
    fn renders_contain_the_expected_nodes() {
        let g = DynamicGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let dot = graph_dot(&g);
        assert!(dot.contains("0 -- 1;") && dot.contains("0 -- 2;"));

        let verts: BTreeSet<_> = (0..4).collect();
        let tree = build_tri_tree(&g, &verts);
        let dot = tri_tree_dot(&g, &tree);
        assert!(dot.contains("pair 0,2"));
        assert!(dot.contains("cycle"));

        let state = DecompositionState::from_graph(&g);
        assert!(decomposition_dot(&state).contains("block 0 1 2 3"));
    }
}
