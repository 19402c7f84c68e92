//! Exact computations with lattices over `F_q[Y]`, divergent diagonal orbits,
//! continued fractions and dynamical balls, for `K = F_q(Y)` with the
//! valuation at infinity.

#![no_std]

extern crate alloc;

pub mod cf2;
pub mod dynball;
pub mod error;
pub mod ffarith;
pub mod latcore;
pub mod orbit;

pub use error::{Error, Result};
