//! Arithmetic in F_q, F_q[Y] and K = F_q(Y).

pub mod arith;
pub mod field;
pub mod poly;
pub mod ratfunc;

pub use arith::*;
pub use field::{prime_power, Elt, Fq};
pub use poly::{Degree, Poly};
pub use ratfunc::{val_abs, AbsQ, RatFunc, Val};
