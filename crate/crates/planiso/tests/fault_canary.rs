//! Proof that the cross-check net actually catches a wrong low-rank update.
//! With the fault armed, one Woodbury application is silently corrupted;
//! the entrywise comparison against a from-scratch elimination must flag
//! it, and the very next update must be clean again.

#![cfg(feature = "fault-injection")]

use planiso::fault;
use planiso::graph::{ChangeKind, DynamicGraph};
use planiso::tutte::{bundle_init, smw_edge};

const P: u64 = 1_048_583;

fn prism() -> DynamicGraph {
    DynamicGraph::from_edges(
        6,
        &[(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (0, 3), (1, 4), (2, 5)],
    )
}

#[test]
fn an_armed_update_no_longer_matches_scratch() {
    let g = prism();
    let pins = (0, 1, 2);
    let base = bundle_init(&g, pins, P).unwrap();
    let target = g.apply_change(planiso::ChangeEvent::insert(0, 4)).unwrap();
    let scratch = bundle_init(&target, pins, P).unwrap();

    let clean = smw_edge(&base, (0, 4), ChangeKind::Insert).unwrap();
    assert_eq!(clean.tinv(), scratch.tinv(), "clean updates must match scratch");

    fault::arm();
    let corrupted = smw_edge(&base, (0, 4), ChangeKind::Insert).unwrap();
    assert!(!fault::is_armed(), "the fault consumes itself");
    assert_ne!(
        corrupted.tinv(),
        scratch.tinv(),
        "the canary fault must be visible to the entrywise cross-check"
    );
}

#[test]
fn the_fault_fires_exactly_once() {
    let g = prism();
    let pins = (0, 1, 2);
    let base = bundle_init(&g, pins, P).unwrap();
    let target = g.apply_change(planiso::ChangeEvent::insert(1, 5)).unwrap();
    let scratch = bundle_init(&target, pins, P).unwrap();

    fault::arm();
    let first = smw_edge(&base, (1, 5), ChangeKind::Insert).unwrap();
    let second = smw_edge(&base, (1, 5), ChangeKind::Insert).unwrap();
    assert_ne!(first.tinv(), scratch.tinv());
    assert_eq!(second.tinv(), scratch.tinv());
}
