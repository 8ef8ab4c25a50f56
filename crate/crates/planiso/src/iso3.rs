//! Triconnected-component isomorphism via coordinate fingerprints.
//!
//! Cycle components are compared with modular arithmetic on boundary
//! positions. Rigid components get the full treatment: both skeletons are
//! drawn barycentrically modulo every live prime, each vertex is
//! fingerprinted by its coordinate vector across the prime family, and the
//! two drawings coincide as labelled point sets exactly when the components
//! are isomorphic under the chosen pin triples. The coincidence itself reads
//! off the vertex matching, which is then checked edge by edge, so a wrong
//! answer would have to survive an exact verification step.
//!
//! By Whitney's theorem a 3-connected planar graph has a unique combinatorial
//! embedding up to reflection. Any isomorphism therefore carries face walks
//! to face walks, so fixing one pin triple on the first skeleton and trying
//! every consecutive boundary triple of the second, in both walk directions,
//! covers every isomorphism that can exist.

use std::collections::{BTreeMap, BTreeSet};

use crate::decomp::{cycle_distance, TriKind};
use crate::embedding::embed_block;
use crate::graph::{DynamicGraph, VertexId};
use crate::tutte::{
    canonical_pins, crt_compare, embed_coords, host_key, pool_refresh, purge_prime, smw_pins,
    BundleStore, Pins, PrimePool,
};
use crate::EngineError;

/// A vertex bijection between two component skeletons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    map: BTreeMap<VertexId, VertexId>,
}

impl Matching {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (VertexId, VertexId)>) -> Self {
        Matching { map: pairs.into_iter().collect() }
    }

    pub fn image_of(&self, v: VertexId) -> Option<VertexId> {
        self.map.get(&v).copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.map.iter().map(|(&u, &v)| (u, v))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

fn support_of(g: &DynamicGraph) -> Vec<VertexId> {
    (0..g.n()).filter(|&v| g.degree(v) > 0).collect()
}

/// Checks that `m` is a bijection from the support of `g1` onto the support
/// of `g2` carrying edges to edges and non-edges to non-edges.
pub fn verify_iso(g1: &DynamicGraph, g2: &DynamicGraph, m: &Matching) -> bool {
    let sup1 = support_of(g1);
    let sup2: BTreeSet<VertexId> = support_of(g2).into_iter().collect();
    if m.len() != sup1.len() || sup1.iter().any(|&v| m.image_of(v).is_none()) {
        return false;
    }
    let image: BTreeSet<VertexId> = m.pairs().map(|(_, w)| w).collect();
    if image.len() != m.len() || image != sup2 {
        return false;
    }
    for (i, &u) in sup1.iter().enumerate() {
        for &v in &sup1[i + 1..] {
            let (mu, mv) = (m.image_of(u).unwrap(), m.image_of(v).unwrap());
            if g1.has_edge(u, v) != g2.has_edge(mu, mv) {
                return false;
            }
        }
    }
    true
}

/// One triconnected-level question: does some isomorphism of the component
/// skeletons send the tuple to the starred tuple, member by member?
#[derive(Debug, Clone)]
pub struct Iso3Query<'a> {
    pub comp: &'a DynamicGraph,
    pub kind: TriKind,
    pub tuple: [VertexId; 4],
    pub comp_star: &'a DynamicGraph,
    pub kind_star: TriKind,
    pub tuple_star: [VertexId; 4],
}

/// Walks a skeleton that is promised to be a plain cycle and returns its
/// boundary order, starting at the smallest vertex.
fn cycle_order_of(g: &DynamicGraph) -> Result<Vec<VertexId>, EngineError> {
    let sup = support_of(g);
    if sup.is_empty()
        || sup.iter().any(|&v| g.degree(v) != 2)
        || g.edge_count() != sup.len()
    {
        return Err(EngineError::Precondition("a cycle component must be a plain cycle"));
    }
    let start = sup[0];
    let mut order = vec![start];
    let mut prev = start;
    let mut cur = g.neighbors(start).min().expect("cycle vertex has two neighbors");
    while cur != start {
        order.push(cur);
        let ns: Vec<VertexId> = g.neighbors(cur).collect();
        let nxt = if ns[0] == prev { ns[1] } else { ns[0] };
        prev = cur;
        cur = nxt;
    }
    if order.len() != sup.len() {
        return Err(EngineError::Precondition("a cycle component must be connected"));
    }
    Ok(order)
}

/// The boundary rewritten to start at `s.0` and run in the direction where
/// `s.1` comes before `s.2`.
fn oriented(order: &[VertexId], s: (VertexId, VertexId, VertexId)) -> Vec<VertexId> {
    let l = order.len();
    let pos = |w: VertexId| order.iter().position(|&x| x == w).expect("sentinel on cycle");
    let (p1, p2, p3) = (pos(s.0), pos(s.1), pos(s.2));
    let forward = (p2 + l - p1) % l < (p3 + l - p1) % l;
    (0..l)
        .map(|i| order[if forward { (p1 + i) % l } else { (p1 + l - i) % l }])
        .collect()
}

fn cycle_case(q: &Iso3Query) -> Result<(bool, Option<Matching>), EngineError> {
    let [a, b, c, d] = q.tuple;
    let [a2, b2, c2, d2] = q.tuple_star;
    let order1 = cycle_order_of(q.comp)?;
    let order2 = cycle_order_of(q.comp_star)?;
    if order1.len() != order2.len() {
        return Ok((false, None));
    }
    for (x, x2) in [(b, b2), (c, c2), (d, d2)] {
        let d1 = cycle_distance(&order1, (a, b, c), a, x)?;
        let d2 = cycle_distance(&order2, (a2, b2, c2), a2, x2)?;
        if d1 != d2 {
            return Ok((false, None));
        }
    }
    let o1 = oriented(&order1, (a, b, c));
    let o2 = oriented(&order2, (a2, b2, c2));
    let m = Matching::from_pairs(o1.into_iter().zip(o2));
    debug_assert!(verify_iso(q.comp, q.comp_star, &m));
    Ok((true, Some(m)))
}

/// Every ordered triple of consecutive boundary vertices on some face of
/// `h`, in both walk directions, deduplicated, in first-encounter order over
/// sorted faces. Deterministic for a given skeleton.
fn candidate_triples(h: &DynamicGraph) -> Result<Vec<Pins>, EngineError> {
    let sup: BTreeSet<VertexId> = support_of(h).into_iter().collect();
    let mut faces = embed_block(h, &sup)
        .ok_or(EngineError::Precondition("a rigid component skeleton must be planar"))?;
    faces.sort();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for f in &faces {
        let fwd = f.vertices().to_vec();
        let mut rev = fwd.clone();
        rev.reverse();
        for walk in [fwd, rev] {
            let l = walk.len();
            for i in 0..l {
                let t = (walk[i], walk[(i + 1) % l], walk[(i + 2) % l]);
                if seen.insert(t) {
                    out.push(t);
                }
            }
        }
    }
    Ok(out)
}

enum Pairing {
    Matched(Matching),
    Distinct,
    Collision,
}

/// Draws both skeletons under the given pins for every live prime and pairs
/// up vertices with identical coordinate fingerprints. Primes where either
/// repin goes singular are dropped from the pool on the spot.
fn fingerprint_pairing(
    store: &mut BundleStore,
    pool: &mut PrimePool,
    pins: Pins,
    pins_star: Pins,
    sup1: &[VertexId],
    sup2: &[VertexId],
    key1: &crate::tutte::HostKey,
    key2: &crate::tutte::HostKey,
) -> Result<Pairing, EngineError> {
    let primes: Vec<u64> = pool.live().iter().copied().collect();
    if primes.is_empty() {
        return Err(EngineError::PoolTooSmall);
    }
    let mut fam1: BTreeMap<u64, (Vec<u64>, Vec<u64>)> = BTreeMap::new();
    let mut fam2: BTreeMap<u64, (Vec<u64>, Vec<u64>)> = BTreeMap::new();
    for p in primes {
        let bundles = {
            let e1 = store
                .get(key1)
                .ok_or(EngineError::Precondition("the first component has no stored bundles"))?;
            let e2 = store
                .get(key2)
                .ok_or(EngineError::Precondition("the second component has no stored bundles"))?;
            match (e1.per_prime.get(&p), e2.per_prime.get(&p)) {
                (Some(b1), Some(b2)) => Some((b1.clone(), b2.clone())),
                _ => None,
            }
        };
        let Some((b1, b2)) = bundles else {
            purge_prime(store, pool, p);
            continue;
        };
        match (smw_pins(&b1, pins), smw_pins(&b2, pins_star)) {
            (Ok(r1), Ok(r2)) => {
                fam1.insert(p, embed_coords(&r1));
                fam2.insert(p, embed_coords(&r2));
            }
            (Err(EngineError::NotInvertible), _) | (_, Err(EngineError::NotInvertible)) => {
                purge_prime(store, pool, p);
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    if fam1.is_empty() {
        return Ok(Pairing::Collision);
    }

    let fp = |fam: &BTreeMap<u64, (Vec<u64>, Vec<u64>)>, i: usize| -> Vec<(u64, u64)> {
        fam.values().map(|(x, y)| (x[i], y[i])).collect()
    };
    let n = sup1.len();
    let mut by_fp1: BTreeMap<Vec<(u64, u64)>, usize> = BTreeMap::new();
    let mut by_fp2: BTreeMap<Vec<(u64, u64)>, usize> = BTreeMap::new();
    for i in 0..n {
        if by_fp1.insert(fp(&fam1, i), i).is_some() || by_fp2.insert(fp(&fam2, i), i).is_some() {
            return Ok(Pairing::Collision);
        }
    }
    let mut pairing = vec![0usize; n];
    let mut pairs = Vec::with_capacity(n);
    for (print, &i) in &by_fp1 {
        match by_fp2.get(print) {
            Some(&j) => {
                pairing[i] = j;
                pairs.push((sup1[i], sup2[j]));
            }
            None => return Ok(Pairing::Distinct),
        }
    }
    if !crt_compare(&fam1, &fam2, &pairing, 1)? {
        return Ok(Pairing::Distinct);
    }
    Ok(Pairing::Matched(Matching::from_pairs(pairs)))
}

/// Retires the entire live prime family and refills the pool, rebuilding
/// every stored bundle over fresh primes.
fn reseat_pool(store: &mut BundleStore, pool: &mut PrimePool) {
    let live: Vec<u64> = pool.live().iter().copied().collect();
    for p in live {
        purge_prime(store, pool, p);
    }
    pool_refresh(store, pool);
}

/// Matches up the vertices of two rigid skeletons drawn under the given pin
/// triples, or reports that the drawings differ. A fingerprint collision
/// (distinct vertices agreeing modulo every live prime at once) retires the
/// prime family and retries once before giving up.
pub fn extract_matching(
    store: &mut BundleStore,
    pool: &mut PrimePool,
    comp: &DynamicGraph,
    comp_star: &DynamicGraph,
    pins: Pins,
    pins_star: Pins,
) -> Result<Option<Matching>, EngineError> {
    let sup1 = support_of(comp);
    let sup2 = support_of(comp_star);
    if sup1.len() != sup2.len() {
        return Ok(None);
    }
    let key1 = host_key(comp);
    let key2 = host_key(comp_star);
    for attempt in 0..2 {
        match fingerprint_pairing(store, pool, pins, pins_star, &sup1, &sup2, &key1, &key2)? {
            Pairing::Matched(m) => return Ok(Some(m)),
            Pairing::Distinct => return Ok(None),
            Pairing::Collision => {
                if attempt == 0 {
                    reseat_pool(store, pool);
                }
            }
        }
    }
    Ok(None)
}

fn rigid_case(
    store: &mut BundleStore,
    pool: &mut PrimePool,
    q: &Iso3Query,
) -> Result<(bool, Option<Matching>), EngineError> {
    let sup1 = support_of(q.comp);
    let sup2 = support_of(q.comp_star);
    let in1 = |v: VertexId| sup1.binary_search(&v).is_ok();
    let in2 = |v: VertexId| sup2.binary_search(&v).is_ok();
    if !q.tuple.iter().all(|&v| in1(v)) || !q.tuple_star.iter().all(|&v| in2(v)) {
        return Err(EngineError::Precondition("tuple vertices must belong to their component"));
    }
    if sup1.len() != sup2.len() || q.comp.edge_count() != q.comp_star.edge_count() {
        return Ok((false, None));
    }
    if pool.live().is_empty() {
        return Err(EngineError::PoolTooSmall);
    }
    let pins = canonical_pins(q.comp);
    let [a, b, c, d] = q.tuple;
    let [a2, b2, c2, d2] = q.tuple_star;
    for cand in candidate_triples(q.comp_star)? {
        let Some(m) = extract_matching(store, pool, q.comp, q.comp_star, pins, cand)? else {
            continue;
        };
        let wanted = [(a, a2), (b, b2), (c, c2), (d, d2)];
        if wanted.iter().all(|&(x, y)| m.image_of(x) == Some(y))
            && verify_iso(q.comp, q.comp_star, &m)
        {
            return Ok((true, Some(m)));
        }
    }
    Ok((false, None))
}

/// Answers one triconnected-level query. A `true` answer always comes with a
/// matching that has passed [`verify_iso`], so the modular fingerprinting can
/// only ever cost completeness, never soundness. Components of different
/// kinds are simply not isomorphic.
pub fn iso3_query(
    store: &mut BundleStore,
    pool: &mut PrimePool,
    q: &Iso3Query,
) -> Result<(bool, Option<Matching>), EngineError> {
    let [a, b, c, _] = q.tuple;
    let [a2, b2, c2, _] = q.tuple_star;
    if a == b || a == c || b == c || a2 == b2 || a2 == c2 || b2 == c2 {
        return Err(EngineError::Precondition("the first three tuple vertices must be distinct"));
    }
    if q.kind != q.kind_star {
        return Ok((false, None));
    }
    match q.kind {
        TriKind::Cycle => cycle_case(q),
        TriKind::Rigid => rigid_case(store, pool, q),
    }
}
