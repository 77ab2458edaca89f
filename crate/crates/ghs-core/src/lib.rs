//! Symbolic engine for generalized Heegaard splittings (GHSs) of 3-manifolds
//! decomposed along incompressible gluing surfaces.
//!
//! Surfaces are tracked only through genus, component count, transverse
//! orientation and location. On top of that the crate provides:
//!
//! * [`manifold`]: decomposition graphs with declared barrier grades,
//! * [`ghs`]: thick/thin level data, validation and the genus calculus,
//! * [`rewrite`]: weak reduction with cleanup, destabilization detection,
//! * [`sog`]: sequences of GHSs and the reduction contract,
//! * [`bounds`]: the stabilization lower bound, the three counter-example
//!   families and an exhaustive bounded search over symbolic states.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod ghs;
pub mod manifold;
pub mod rewrite;
pub mod sog;
pub mod surface;

pub use bounds::{BoundConfig, Family, Scenario, SearchOutcome};
pub use ghs::{Fragment, Ghs, GhsError, ThickLevel, ThinLevel};
pub use manifold::{DecompositionGraph, EdgeId, GluingEdge, Piece, PieceId, SlotId};
pub use rewrite::WeakReductionMove;
pub use sog::Sog;
pub use surface::{CompressionSpec, Location, Sign, SurfaceComponent, SymbolicSurface};
