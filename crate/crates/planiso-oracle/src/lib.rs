//! Brute-force reference implementations ("oracles") for the `planiso` engine.
//!
//! Every algorithm in this crate favours being *obviously correct* over being
//! fast: subsets are enumerated exhaustively, isomorphisms are found by
//! backtracking, linear systems are solved in exact rational arithmetic, and
//! planarity is decided by searching for Kuratowski subdivisions directly.
//! Nothing here shares code with the engine crate; that independence is what
//! makes the cross-checks in the test suites meaningful.
//!
//! Sizes are deliberately capped (see [`SIZE_LIMIT_ISO`], [`SIZE_LIMIT_EXACT`]):
//! these are test-only components and are never on a hot path.

pub mod graph;
pub mod iso;
pub mod kconn;
pub mod planarity;
pub mod spqr;
pub mod tutte;

pub use graph::CompactGraph;

/// Vertex-count cap for the isomorphism and SPQR oracles.
pub const SIZE_LIMIT_ISO: usize = 14;
/// Vertex-count cap for the exact rational Tutte solver.
pub const SIZE_LIMIT_EXACT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance exceeds the configured oracle size limit")]
    SizeLimit,
    #[error("matrix is singular")]
    Singular,
    #[error("graph is not biconnected")]
    NotBiconnected,
}
