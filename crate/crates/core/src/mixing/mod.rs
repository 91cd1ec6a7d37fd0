//! Dependence between the inside and the outside of nested windows.
//!
//! For nested windows W' = [-a, a]^ℓ ⊂ W = [-b, b]^ℓ and the tessellation at
//! time t, the β-coefficient measures dependence between what the process
//! shows inside W' and what it shows beyond W. This module provides the two
//! halves of its empirical study:
//!
//! * lower estimates from finite probe partitions ([`estimator`]) — any pair
//!   of finite partitions bounds the supremum defining β from below;
//! * analytic upper bounds ([`bounds`]) driven by the encapsulation product
//!   and a rate-tail cap, with the birth-chain moment machinery ([`tail`])
//!   controlling that cap;
//! * the decay experiment ([`decay`]) sweeping the window ratio b/a and
//!   fitting log-log slopes to both curves.

pub mod bounds;
pub mod decay;
pub mod estimator;
pub mod tail;

pub use bounds::{
    beta_upper_bound, beta_upper_bound_raw, beta_upper_bound_simplified,
    beta_upper_bound_simplified_raw, no_jump_chain, BetaBoundInputs,
};
pub use decay::{decay_experiment, summarize, DecayConfig, DecayPoint, DecaySummary};
pub use estimator::{
    beta_from_pairs, beta_hat, beta_with_bootstrap, BetaEstimate, ProbeBox, ProbeObserver,
    ProbePartition,
};
pub use tail::{
    birth_chain_moment, birth_chain_tail, markov_tail_bound, tail_fraction, threshold_for,
    zeta_samples,
};
