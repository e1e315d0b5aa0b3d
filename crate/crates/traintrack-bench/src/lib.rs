//! Fixtures shared by the benchmarks.

use traintrack::{catalog, TrainTrack, Q};

/// A catalog track with its guide; panics on a missing entry.
pub fn fixture(name: &str) -> (TrainTrack, Vec<Q>) {
    catalog::load(name).unwrap_or_else(|e| panic!("catalog entry {name}: {e}"))
}
