//! Capacity regions, finite-energy rates and broadcast CVQKD key rates of
//! pure-loss bosonic broadcast channels.
//!
//! - [`gaussian`]: covariance-matrix calculus for zero-mean Gaussian states.
//! - [`channel`]: linear-optical networks, their Reck decomposition and the
//!   equivalent beam-splitter cascade.
//! - [`capacity`]: per-subset capacity constraints, achievable rates,
//!   converse bounds and time-sharing baselines.
//! - [`qkd`]: key-rate pairs of the broadcast squeezed-state CVQKD protocol.
//! - [`fock`]: truncated Fock-space oracle for the Gaussian entropy formulas.
//! - [`verify`]: the cross-check suite behind `qbc verify`.

#![forbid(unsafe_code)]

pub mod capacity;
pub mod channel;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod qkd;
pub mod verify;

pub use error::{Error, Result};
