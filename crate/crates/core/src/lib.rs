//! Alternating-difference (AD-k) calculus for set functions, exact oracles for
//! the general threshold and triggering diffusion models, the constructive
//! graph transforms between them, and a search harness for local-to-global
//! AD-k questions.

#![allow(clippy::result_large_err)]

pub mod cli;
pub mod conjecture;
pub mod diffusion;
pub mod error;
pub mod rational;
pub mod setfn;
pub mod transforms;

pub use error::{Error, Result};
pub use rational::Rational;
pub use setfn::{GroundSet, Order, SetFunction};
