//! Laboratory for the three-pass group-action protocol.
//!
//! Alice masks a point `v = (s, t)` with a group element `A`, Bob masks with
//! `B`, Alice unmasks with `A⁻¹` and Bob with `B⁻¹`. The round trip is exact
//! only when the masks' commutator fixes `v`. This crate runs the protocol
//! over finite matrix groups (and bounded rationals for demonstration),
//! checks the conditions under which an eavesdropper learns nothing, and
//! computes exactly what a passive eavesdropper does learn.

pub mod actions;
pub mod algebra;
pub mod analysis;
pub mod error;
pub mod protocol;

pub use error::{Error, Result};
