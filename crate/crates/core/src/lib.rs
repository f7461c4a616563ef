//! Dissipative preparation of pure many-body states.
//!
//! Builds Lindblad processes whose unique stationary state is a chosen pure
//! state, and checks the claim numerically: Liouvillian spectra and kernels,
//! dark-state conditions, Krylov reachability, and time evolution.

pub mod constructors;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod liouvillian;
pub mod models;
pub mod operator;
pub mod random;
pub mod verification;

pub use error::{Error, Result};
