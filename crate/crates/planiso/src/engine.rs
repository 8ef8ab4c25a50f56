//! The session facade: one graph, one decomposition, one bundle store.
//!
//! A session owns the dynamic graph together with everything derived from
//! it. `apply` pushes one edge change through the full pipeline: the event
//! is validated and classified (insertions that would break planarity are
//! refused outright), the block and tri-trees are updated in place, the
//! graph commits, and the coordinate bundles are reconciled with the new
//! set of rigid skeletons. Queries at the three connectivity levels then
//! read the maintained structures; nothing is recomputed from scratch on
//! the query path except the bundles a query itself demands.

use crate::decomp::{classify_change, update_decomposition, DecompositionState, TriKind};
use crate::graph::{ChangeEvent, ChangeType, DynamicGraph, VertexId};
use crate::iso1;
use crate::iso2::{self, Colour, UNCOLOURED};
use crate::iso3::{self, Iso3Query, Matching};
use crate::tutte::{coherent_update, pool_refresh, BundleStore, CoherentReport, PrimePool};
use crate::EngineError;

/// Tuning knobs for a session.
#[derive(Debug, Clone)]
pub struct SessionConfig {
    /// Seed for the deterministic prime pool.
    pub seed: u64,
    /// Number of primes the pool aims to keep alive.
    pub pool_target: usize,
    /// Refresh threshold: a refresh runs when live primes drop below this.
    pub low_water: usize,
    /// Half-open window the pool draws primes from.
    pub prime_window: (u64, u64),
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            seed: 0,
            pool_target: 8,
            low_water: 4,
            prime_window: (1 << 20, 1 << 21),
        }
    }
}

/// What one applied change did to the session.
#[derive(Debug, Clone)]
pub struct AppliedChange {
    /// Connectivity transition of the endpoints, as classified before the
    /// trees were touched.
    pub change_type: ChangeType,
    /// Bundle-maintenance outcome: primes dropped, refresh, fast path.
    pub report: CoherentReport,
}

/// A live engine instance over one dynamic graph.
pub struct Session {
    g: DynamicGraph,
    decomp: DecompositionState,
    store: BundleStore,
    pool: PrimePool,
    colours: Vec<Colour>,
    epoch: u64,
    drops: u64,
    config: SessionConfig,
}

impl Session {
    pub fn new(n: usize, config: SessionConfig) -> Self {
        let g = DynamicGraph::new(n);
        let decomp = DecompositionState::from_graph(&g);
        let mut store = BundleStore::new();
        let mut pool = PrimePool::new(
            config.seed,
            config.pool_target,
            config.low_water,
            config.prime_window,
        );
        pool_refresh(&mut store, &mut pool);
        Session {
            g,
            decomp,
            store,
            pool,
            colours: vec![UNCOLOURED; n],
            epoch: 0,
            drops: 0,
            config,
        }
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.g
    }

    pub fn decomposition(&self) -> &DecompositionState {
        &self.decomp
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    /// Cumulative count of primes dropped over the session's lifetime.
    pub fn drops(&self) -> u64 {
        self.drops
    }

    /// Number of pool refreshes that have run.
    pub fn refreshes(&self) -> u64 {
        self.pool.refreshes()
    }

    /// Primes currently backing the coordinate bundles.
    pub fn live_primes(&self) -> Vec<u64> {
        self.pool.live().iter().copied().collect()
    }

    pub fn colours(&self) -> &[Colour] {
        &self.colours
    }

    /// Paints one vertex. Colours participate in connected- and
    /// biconnected-level queries; zero means uncoloured.
    pub fn set_colour(&mut self, v: VertexId, c: Colour) -> Result<(), EngineError> {
        if v >= self.g.n() {
            return Err(EngineError::Precondition("vertex outside the universe"));
        }
        self.colours[v] = c;
        Ok(())
    }

    /// Applies one edge change end to end. On any error the session is
    /// untouched; in particular an insertion that would make the graph
    /// non-planar is refused before anything is modified.
    pub fn apply(&mut self, e: ChangeEvent) -> Result<AppliedChange, EngineError> {
        let t = classify_change(&self.g, e)?;
        update_decomposition(&mut self.decomp, &self.g, e, t)?;
        self.g.toggle(e)?;
        let report = coherent_update(&mut self.store, &mut self.pool, &self.g, &self.decomp, e, t);
        self.drops += report.dropped.len() as u64;
        self.epoch += 1;
        Ok(AppliedChange { change_type: t, report })
    }

    pub fn insert(&mut self, u: VertexId, v: VertexId) -> Result<AppliedChange, EngineError> {
        self.apply(ChangeEvent::insert(u, v))
    }

    pub fn delete(&mut self, u: VertexId, v: VertexId) -> Result<AppliedChange, EngineError> {
        self.apply(ChangeEvent::delete(u, v))
    }

    /// Are the components of `u` and `v` isomorphic as coloured graphs?
    pub fn query_components(&self, u: VertexId, v: VertexId) -> Result<bool, EngineError> {
        iso1::components_isomorphic(&self.g, &self.decomp, &self.colours, u, v)
    }

    /// Is there a component isomorphism with a -> a*?
    pub fn query_connected(&self, a: VertexId, a_star: VertexId) -> Result<bool, EngineError> {
        iso1::iso1_query(&self.g, &self.decomp, &self.colours, a, a_star)
    }

    /// Is there an isomorphism of blocks taking the ordered pair (a,b) to
    /// (a*,b*)? Both pairs must each lie inside one block.
    pub fn query_biconnected(
        &self,
        a: VertexId,
        b: VertexId,
        a_star: VertexId,
        b_star: VertexId,
    ) -> Result<bool, EngineError> {
        iso2::iso2_query(&self.g, &self.decomp, &self.colours, a, b, a_star, b_star)
    }

    /// Is there an isomorphism of triconnected components taking
    /// (a,b,c,d) to (a*,b*,c*,d*)? Answers come with a fully verified
    /// vertex matching when positive.
    pub fn query_triconnected(
        &mut self,
        tuple: [VertexId; 4],
        tuple_star: [VertexId; 4],
    ) -> Result<(bool, Option<Matching>), EngineError> {
        let (comp, kind) = self.resolve_comp(tuple)?;
        let (comp_star, kind_star) = self.resolve_comp(tuple_star)?;
        let q = Iso3Query {
            comp: &comp,
            kind,
            tuple,
            comp_star: &comp_star,
            kind_star,
            tuple_star,
        };
        iso3::iso3_query(&mut self.store, &mut self.pool, &q)
    }

    /// Finds the unique triconnected component containing all four tuple
    /// vertices and returns its skeleton with virtual pair edges included.
    fn resolve_comp(&self, tuple: [VertexId; 4]) -> Result<(DynamicGraph, TriKind), EngineError> {
        if tuple.iter().any(|&v| v >= self.g.n()) {
            return Err(EngineError::Precondition("vertex outside the universe"));
        }
        let bic = self
            .decomp
            .bicomps_containing(tuple[0])
            .into_iter()
            .find(|&b| {
                let verts = &self.decomp.bicomp(b).verts;
                tuple.iter().all(|v| verts.contains(v))
            })
            .ok_or(EngineError::Precondition(
                "tuple vertices do not share a biconnected component",
            ))?;
        let tri = self
            .decomp
            .bicomp(bic)
            .tri
            .as_ref()
            .ok_or(EngineError::Precondition("tuple names a trivial block"))?;
        let comp = tri
            .comps()
            .keys()
            .copied()
            .find(|&c| {
                let verts = tri.comp_verts(c);
                tuple.iter().all(|v| verts.contains(v))
            })
            .ok_or(EngineError::Precondition(
                "tuple vertices do not share a triconnected component",
            ))?;
        Ok((tri.skeleton_graph(&self.g, comp), tri.kind(&self.g, comp)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ChangeKind;

    fn session(n: usize) -> Session {
        Session::new(n, SessionConfig::default())
    }

    #[test]
    fn a_session_applies_and_answers() {
        let mut s = session(6);
        for (u, v) in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)] {
            let applied = s.insert(u, v).unwrap();
            assert_eq!(applied.change_type.kind, ChangeKind::Insert);
        }
        assert_eq!(s.epoch(), 6);
        assert_eq!(s.query_components(0, 3), Ok(true));
        assert_eq!(s.query_connected(0, 4), Ok(true));

        s.delete(3, 4).unwrap();
        assert_eq!(s.query_components(0, 3), Ok(false));
        s.insert(3, 4).unwrap();
        assert_eq!(s.query_components(0, 3), Ok(true));
        assert_eq!(s.epoch(), 8);
    }

    #[test]
    fn nonplanar_insertions_are_refused_atomically() {
        let mut s = session(5);
        let mut refused = 0;
        for u in 0..5 {
            for v in (u + 1)..5 {
                match s.insert(u, v) {
                    Ok(_) => {}
                    Err(EngineError::NonPlanarResult) => refused += 1,
                    Err(other) => panic!("unexpected error: {other}"),
                }
            }
        }
        assert_eq!(refused, 1);
        assert_eq!(s.graph().edge_count(), 9);
        assert_eq!(s.epoch(), 9);
        assert!(crate::is_planar(s.graph()));
    }

    #[test]
    fn three_levels_answer_on_one_graph() {
        let mut s = session(6);
        for (u, v) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5)] {
            s.insert(u, v).unwrap();
        }
        let (yes, m) = s.query_triconnected([0, 1, 2, 3], [0, 1, 2, 3]).unwrap();
        assert!(yes);
        assert_eq!(m.unwrap().image_of(3), Some(3));

        let (yes, m) = s.query_triconnected([0, 1, 2, 3], [1, 2, 3, 0]).unwrap();
        assert!(yes);
        let m = m.unwrap();
        assert_eq!(m.image_of(0), Some(1));
        assert_eq!(m.image_of(3), Some(0));

        assert_eq!(s.query_biconnected(0, 1, 2, 3), Ok(true));
        assert_eq!(s.query_connected(4, 4), Ok(true));
        assert_eq!(s.query_components(5, 5), Ok(true));
    }

    #[test]
    fn tuple_resolution_rejects_scattered_tuples() {
        let mut s = session(8);
        for (u, v) in [(0, 1), (1, 2), (2, 0), (4, 5), (5, 6), (6, 4)] {
            s.insert(u, v).unwrap();
        }
        assert!(matches!(
            s.query_triconnected([0, 1, 2, 4], [0, 1, 2, 4]),
            Err(EngineError::Precondition(_))
        ));
        assert!(matches!(
            s.query_triconnected([0, 1, 2, 99], [0, 1, 2, 0]),
            Err(EngineError::Precondition(_))
        ));
        let (yes, _) = s.query_triconnected([0, 1, 2, 0], [4, 5, 6, 4]).unwrap();
        assert!(yes);
    }

    #[test]
    fn colours_bias_the_component_answer() {
        let mut s = session(6);
        for (u, v) in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)] {
            s.insert(u, v).unwrap();
        }
        assert_eq!(s.query_components(0, 3), Ok(true));
        s.set_colour(3, 7).unwrap();
        assert_eq!(s.query_components(0, 3), Ok(false));
        s.set_colour(0, 7).unwrap();
        assert_eq!(s.query_components(0, 3), Ok(true));
        assert!(s.set_colour(6, 1).is_err());
    }

    #[test]
    fn failed_changes_leave_the_session_intact() {
        let mut s = session(4);
        s.insert(0, 1).unwrap();
        assert!(s.insert(0, 1).is_err());
        assert!(s.delete(2, 3).is_err());
        assert!(s.insert(0, 0).is_err());
        assert_eq!(s.epoch(), 1);
        assert_eq!(s.graph().edge_count(), 1);
        assert_eq!(s.query_components(2, 3), Ok(true));
    }
}
