//! Exact scalar and 2×2 matrix arithmetic, finite matrix groups, and
//! commutator subgroups.

mod group;
mod matrix;
mod scalar;

pub use group::{
    borel_group, commutator_subgroup, enumerate_gl2, gl2_order, subgroup_closure, FiniteGroup, DEFAULT_PRIME_CAP,
};
pub use matrix::{commutator, mat_inv, mat_mul, Mat2};
pub use scalar::{is_prime, Domain, RawScalar, Scalar, MAX_FIELD_PRIME};
