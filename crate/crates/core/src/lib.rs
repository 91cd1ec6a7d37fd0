//! Simulation and verification engine for STIT (STable under ITeration)
//! tessellations of convex windows.
//!
//! The crate is organized around the lifecycle of an experiment:
//!
//! * [`geometry`] — convex polytopes, hyperplanes, splitting.
//! * [`measure`] — translation-invariant hyperplane measures Λ = γ·λ⊗θ,
//!   hitting and separating measures, conditional hyperplane sampling.
//! * [`stit`] — the cell-division Markov process itself (global exponential
//!   clock, categorical cell choice, observers, encapsulation detection).
//! * [`nesting`] — tessellation numbering, iteration/nesting, rescaling, and
//!   the distributional self-similarity checks built on them.
//! * [`mixing`] — β-mixing lower estimates from probe partitions, the
//!   analytic upper bounds, birth-chain tails, and the decay experiment.
//! * [`stats`] — the small statistical toolbox (KS, χ², Spearman, bootstrap)
//!   the verification layer uses.
//! * [`verify`] — the invariant battery behind `stit verify`.

// Numeric guards are written `if !(x > 0.0)` on purpose: the negated form
// rejects NaN, which `x <= 0.0` would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod measure;
pub mod mixing;
pub mod nesting;
pub mod rng;
pub mod snapshot;
pub mod stats;
pub mod stit;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{ConvexPolytope, Direction, FacetTag, Hyperplane, Window};
pub use measure::{DirectionalDistribution, HyperplaneMeasure, SeparatingFamily};
pub use mixing::{BetaBoundInputs, BetaEstimate, ProbePartition};
pub use nesting::Tessellation;
pub use stit::{EncapsulationRecord, JumpRecord, TessellationState};

/// Geometric predicate tolerance shared across the crate: incidences closer
/// than this are treated as degenerate and resolved by resampling.
pub const EPS: f64 = 1e-9;
