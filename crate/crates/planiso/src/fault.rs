//! Deliberate corruption of one low-rank update, for harnesses that want to
//! prove they would notice a real defect. Arm the fault, run the operation
//! under test, and the next Woodbury application silently perturbs a single
//! matrix entry. The flag is thread local and clears itself once consumed.

use std::cell::Cell;

thread_local! {
    static ARMED: Cell<bool> = const { Cell::new(false) };
}

/// Arms the fault for the current thread. The next call into the shared
/// Woodbury kernel corrupts its result and disarms.
pub fn arm() {
    ARMED.with(|a| a.set(true));
}

/// True while a fault is armed and not yet consumed.
pub fn is_armed() -> bool {
    ARMED.with(Cell::get)
}

/// Consumes the armed flag, returning whether a fault should fire now.
pub fn consume() -> bool {
    ARMED.with(|a| a.replace(false))
}
