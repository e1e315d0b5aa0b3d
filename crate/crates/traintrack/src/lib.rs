//! Exact combinatorial train-track calculus on punctured surfaces.
//!
//! Tracks are stored as ribbon structures: every switch has two ordered
//! sides of half-branches and all moves rewrite those lists locally. Weights
//! are arbitrary-precision rationals throughout.

pub mod bicombing;
pub mod canonical;
pub mod cubical;
pub mod dual_bigon;
pub mod catalog;
pub mod error;
pub mod io;
pub mod lp;
pub mod measures;
pub mod moves;
pub mod rational;
pub mod strips;
pub mod track;

pub use canonical::{canonical_label, canonical_track, isomorphic, isomorphisms, CanonicalForm};
pub use error::{Result, TrackError};
pub use moves::{Direction, SlotBijection, SplitRecord};
pub use rational::Q;
pub use track::{
    BranchId, BranchKind, Dart, HalfBranch, Region, Side, Surface, SwitchId, TrainTrack, ValidationReport, Violation,
};
