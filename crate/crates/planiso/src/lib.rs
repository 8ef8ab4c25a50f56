//! Dynamic planar graph isomorphism engine.
//!
//! Maintains, under single edge insertions and deletions, the full
//! connectivity hierarchy of a planar graph: connected components, the
//! block-cut forest, and per-block triconnected decomposition trees
//! (components joined at separating pairs, in the style of SPQR trees).
//! On top of the structural layer sits an algebraic one: mod-p inverses of
//! Tutte embedding systems, updated by Sherman-Morrison-Woodbury identities
//! and used as coordinate fingerprints for isomorphism queries at three
//! levels (triconnected components, biconnected components, connected
//! components).
//!
//! Every update is surgical: the engine never rebuilds a tree it can patch,
//! and never re-inverts a matrix it can correct by a low-rank update. The
//! from-scratch builders exist as well and double as cross-checks.

pub mod decomp;
pub mod dot;
pub mod embedding;
pub mod engine;
pub mod graph;
pub mod iso1;
pub mod iso2;
pub mod iso3;
pub mod modp;
pub mod tutte;

#[cfg(feature = "fault-injection")]
pub mod fault;

pub use decomp::{classify_change, update_decomposition, DecompositionState};
pub use embedding::is_planar;
pub use engine::{AppliedChange, Session, SessionConfig};
pub use graph::{ChangeEvent, ChangeKind, ChangeType, DynamicGraph, VertexId};

use thiserror::Error;

/// Unified error type for the whole engine.
///
/// Structural preconditions that callers are expected to establish (rather
/// than states that legitimately arise) are reported as `Precondition`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    /// Inserting an edge that exists, deleting one that does not, a loop,
    /// or an endpoint outside the vertex universe.
    #[error("illegal change event")]
    IllegalChange,
    /// The requested insertion would make the graph non-planar.
    #[error("change would produce a non-planar graph")]
    NonPlanarResult,
    /// The given vertex cycle is not a face of the embedding.
    #[error("not a face of the embedding")]
    NotAFace,
    /// The host graph is not 3-connected where it must be.
    #[error("graph is not 3-connected")]
    Not3Connected,
    /// The requested tree path does not admit a planarity-preserving merge.
    #[error("path is not coherent")]
    NotCoherent,
    /// A declared change type disagrees with the actual classification.
    #[error("change type does not match the graph state")]
    TypeMismatch,
    /// The two tree nodes live in different trees.
    #[error("nodes belong to different trees")]
    DifferentTrees,
    /// A vertex expected on a cycle component is not on it.
    #[error("vertex not on the cycle")]
    NotOnCycle,
    /// An orientation triple fails to pick a direction on the cycle.
    #[error("orientation triple is ambiguous")]
    AmbiguousOrientation,
    /// The two faces do not bound a common edge region of the embedding.
    #[error("faces are not an admissible face pair")]
    NotAFacePair,
    /// Deleting this edge keeps the component 3-connected; nothing unfurls.
    #[error("component stays 3-connected")]
    Still3Connected,
    /// Deleting this edge keeps the block biconnected; nothing dissolves.
    #[error("block stays biconnected")]
    StillBiconnected,
    /// A matrix (or SMW capacitance) is singular modulo the current prime.
    #[error("matrix not invertible modulo the prime")]
    NotInvertible,
    /// Too few live primes remain to answer soundly.
    #[error("prime pool is below the configured minimum")]
    PoolTooSmall,
    /// Distinct vertices collided on all surviving prime fingerprints.
    #[error("coordinate fingerprints collide across the pool")]
    FingerprintCollision,
    /// A context handle does not describe a subtree of the current tree.
    #[error("invalid recoloured context")]
    InvalidContext,
    /// The two query vertices do not lie inside one biconnected component.
    #[error("vertices are not within one biconnected component")]
    NotBiconnectedPair,
    /// More than one vertex of a separating pair qualifies as the oriented
    /// representative, so the orientation cannot be fixed.
    #[error("face constraint does not single out a pair vertex")]
    AmbiguousFace,
    /// A documented precondition of the operation was violated.
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}
