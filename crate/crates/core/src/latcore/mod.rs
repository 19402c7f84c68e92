//! R_v-lattices in K^n.

pub mod lattice;
pub mod linalg;
pub mod matrix;

pub use lattice::{
    column_reduce, hermite, lattice_equal, local_divisors, tree_distance, unit_vector, vec_norm, Lattice,
    ReducedBasis, SmithType, SysValue,
};
pub use matrix::{subsets, MatK, PMat};
