use serde::Serialize;

use crate::algebra::Scalar;
use crate::error::{Error, Result};
use crate::protocol::Transcript;

/// Output of the componentwise quotient attack.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientEstimate {
    /// `v2 ⊘ v1`; the second entry is absent when `v1[1] = 0`.
    pub b_hat: [Option<Scalar>; 2],
    pub s_hat: Scalar,
}

/// Recover Bob's mask as `B̂ = v2 ⊘ v1` and the secret as `v3[0] ÷ B̂[0]`.
///
/// Exact when both masks are diagonal, since then `v3 = v·B`. On other
/// instances the estimate is just a number with no guarantee.
pub fn quotient_attack(transcript: &Transcript) -> Result<QuotientEstimate> {
    let (v1, v2, v3) = (&transcript.v1, &transcript.v2, &transcript.v3);
    if v1.x().is_zero() || v2.x().is_zero() {
        return Err(Error::AttackInapplicable(format!(
            "first components of v1 = {v1} and v2 = {v2} must be nonzero"
        )));
    }
    let b0 = v2.x().div(v1.x())?;
    let b1 = if v1.y().is_zero() {
        None
    } else {
        Some(v2.y().div(v1.y())?)
    };
    let s_hat = v3.x().div(&b0)?;
    Ok(QuotientEstimate {
        b_hat: [Some(b0), b1],
        s_hat,
    })
}
