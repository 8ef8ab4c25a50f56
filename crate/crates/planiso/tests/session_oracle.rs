//! Random-walk cross-checks of the whole session against brute force.
//!
//! Every walk toggles random edges under the planarity gate, and after each
//! applied change the maintained decomposition must equal a from-scratch
//! build while queries at all three levels must agree with the independent
//! backtracking oracle.

use std::collections::{BTreeMap, BTreeSet};

use planiso::decomp::{DecompositionState, TriKind};
use planiso::graph::{DynamicGraph, VertexId};
use planiso::iso2::Colour;
use planiso::iso3::verify_iso;
use planiso::{EngineError, Session, SessionConfig};
use planiso_oracle::iso::oracle_iso;
use planiso_oracle::CompactGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn induced(
    g: &DynamicGraph,
    verts: &BTreeSet<VertexId>,
) -> (CompactGraph, BTreeMap<VertexId, usize>) {
    let order: Vec<VertexId> = verts.iter().copied().collect();
    let pos: BTreeMap<VertexId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut c = CompactGraph::new(order.len());
    for (i, &u) in order.iter().enumerate() {
        for (j, &v) in order.iter().enumerate().skip(i + 1) {
            if g.has_edge(u, v) {
                c.add_edge(i, j);
            }
        }
    }
    (c, pos)
}

fn picked_colours(colours: &[Colour], verts: &BTreeSet<VertexId>) -> Vec<u64> {
    verts.iter().map(|&v| colours[v]).collect()
}

fn oracle_matches(
    g: &DynamicGraph,
    colours: &[Colour],
    verts_a: &BTreeSet<VertexId>,
    verts_b: &BTreeSet<VertexId>,
    constraints: &[(VertexId, VertexId)],
) -> bool {
    if verts_a.len() != verts_b.len() {
        return false;
    }
    let (ga, pa) = induced(g, verts_a);
    let (gb, pb) = induced(g, verts_b);
    let cons: Vec<(usize, usize)> =
        constraints.iter().map(|&(x, y)| (pa[&x], pb[&y])).collect();
    let cols_a = picked_colours(colours, verts_a);
    let cols_b = picked_colours(colours, verts_b);
    oracle_iso(&ga, &gb, &cons, Some((&cols_a, &cols_b)))
        .expect("instances stay within oracle limits")
        .is_some()
}

/// Every rigid or cycle component of every block, as (skeleton, kind, verts).
fn all_comps(s: &Session) -> Vec<(DynamicGraph, TriKind, Vec<VertexId>)> {
    let mut out = Vec::new();
    let state = s.decomposition();
    for block in state.bicomps().values() {
        let Some(tri) = &block.tri else { continue };
        for (&c, verts) in tri.comps() {
            out.push((
                tri.skeleton_graph(s.graph(), c),
                tri.kind(s.graph(), c),
                verts.iter().copied().collect(),
            ));
        }
    }
    out
}

fn random_step(rng: &mut ChaCha8Rng, s: &mut Session, n: usize) -> bool {
    for _ in 0..30 {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let res = if s.graph().has_edge(u, v) { s.delete(u, v) } else { s.insert(u, v) };
        match res {
            Ok(_) => return true,
            Err(EngineError::NonPlanarResult) => continue,
            Err(other) => panic!("unexpected error on random step: {other}"),
        }
    }
    false
}

#[test]
fn random_walks_agree_with_the_oracle_everywhere() {
    let n = 10;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let mut s = Session::new(n, SessionConfig { seed, ..SessionConfig::default() });
        for _ in 0..40 {
            if !random_step(&mut rng, &mut s, n) {
                break;
            }

            let scratch = DecompositionState::from_graph(s.graph());
            assert_eq!(
                s.decomposition().canonical_form(s.graph()),
                scratch.canonical_form(s.graph()),
                "incremental trees diverged from scratch (seed {seed})"
            );

            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            let engine = s.query_components(u, v).unwrap();
            let oracle = oracle_matches(
                s.graph(),
                s.colours(),
                &s.graph().component_of(u),
                &s.graph().component_of(v),
                &[],
            );
            assert_eq!(engine, oracle, "component query ({u},{v}) diverged (seed {seed})");

            let a = rng.gen_range(0..n);
            let a_star = rng.gen_range(0..n);
            let engine = s.query_connected(a, a_star).unwrap();
            let oracle = oracle_matches(
                s.graph(),
                s.colours(),
                &s.graph().component_of(a),
                &s.graph().component_of(a_star),
                &[(a, a_star)],
            );
            assert_eq!(engine, oracle, "rooted query ({a},{a_star}) diverged (seed {seed})");
        }
    }
}

#[test]
fn block_level_queries_agree_with_the_coloured_oracle() {
    let n = 10;
    for seed in 0..15u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
        let mut s = Session::new(n, SessionConfig { seed, ..SessionConfig::default() });
        for v in 0..n {
            s.set_colour(v, rng.gen_range(0..3)).unwrap();
        }
        for _ in 0..35 {
            if !random_step(&mut rng, &mut s, n) {
                break;
            }
            let blocks: Vec<BTreeSet<VertexId>> = s
                .decomposition()
                .bicomps()
                .values()
                .map(|b| b.verts.clone())
                .collect();
            if blocks.is_empty() {
                continue;
            }
            for _ in 0..4 {
                let ba = &blocks[rng.gen_range(0..blocks.len())];
                let bb = &blocks[rng.gen_range(0..blocks.len())];
                let pick2 = |rng: &mut ChaCha8Rng, set: &BTreeSet<VertexId>| {
                    let vs: Vec<VertexId> = set.iter().copied().collect();
                    let i = rng.gen_range(0..vs.len());
                    let mut j = rng.gen_range(0..vs.len());
                    while j == i {
                        j = rng.gen_range(0..vs.len());
                    }
                    (vs[i], vs[j])
                };
                if ba.len() < 2 || bb.len() < 2 {
                    continue;
                }
                let (a, b) = pick2(&mut rng, ba);
                let (a2, b2) = pick2(&mut rng, bb);
                let engine = s.query_biconnected(a, b, a2, b2).unwrap();
                let oracle =
                    oracle_matches(s.graph(), s.colours(), ba, bb, &[(a, a2), (b, b2)]);
                assert_eq!(
                    engine, oracle,
                    "block query ({a},{b})->({a2},{b2}) diverged (seed {seed})"
                );
            }
        }
    }
}

#[test]
fn triconnected_queries_agree_and_verify() {
    let n = 12;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + seed);
        let mut s = Session::new(n, SessionConfig { seed, ..SessionConfig::default() });
        for _ in 0..45 {
            if !random_step(&mut rng, &mut s, n) {
                break;
            }
            let comps = all_comps(&s);
            if comps.is_empty() {
                continue;
            }
            for _ in 0..3 {
                let (skel_a, _, verts_a) = &comps[rng.gen_range(0..comps.len())];
                let (skel_b, _, verts_b) = &comps[rng.gen_range(0..comps.len())];
                let pick_tuple = |rng: &mut ChaCha8Rng, vs: &[VertexId]| {
                    let mut idx: Vec<usize> = (0..vs.len()).collect();
                    for i in 0..idx.len() {
                        let j = rng.gen_range(i..idx.len());
                        idx.swap(i, j);
                    }
                    [vs[idx[0]], vs[idx[1]], vs[idx[2]], vs[rng.gen_range(0..vs.len())]]
                };
                if verts_a.len() < 3 || verts_b.len() < 3 {
                    continue;
                }
                let tuple = pick_tuple(&mut rng, verts_a);
                let tuple_star = pick_tuple(&mut rng, verts_b);

                let (engine, matching) = s.query_triconnected(tuple, tuple_star).unwrap();

                let sup_a: BTreeSet<VertexId> = verts_a.iter().copied().collect();
                let sup_b: BTreeSet<VertexId> = verts_b.iter().copied().collect();
                let (ga, pa) = induced(skel_a, &sup_a);
                let (gb, pb) = induced(skel_b, &sup_b);
                let cons: Vec<(usize, usize)> = tuple
                    .iter()
                    .zip(tuple_star.iter())
                    .map(|(&x, &y)| (pa[&x], pb[&y]))
                    .collect();
                let oracle = oracle_iso(&ga, &gb, &cons, None)
                    .expect("within limits")
                    .is_some();
                assert_eq!(
                    engine, oracle,
                    "triconnected query {tuple:?}->{tuple_star:?} diverged (seed {seed})"
                );
                if engine {
                    let m = matching.expect("positive answers carry a matching");
                    assert!(verify_iso(skel_a, skel_b, &m), "matching failed verification");
                    for (x, y) in tuple.iter().zip(tuple_star.iter()) {
                        assert_eq!(m.image_of(*x), Some(*y));
                    }
                } else {
                    assert!(matching.is_none());
                }
            }
        }
    }
}
