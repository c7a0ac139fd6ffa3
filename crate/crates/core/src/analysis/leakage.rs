use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::posterior::{log2_ratio, ratio_f64, Prior};
use crate::actions::ActionInstance;
use crate::error::Result;

/// Exact information leaked to a passive eavesdropper by one session.
#[derive(Clone, Debug, Serialize)]
pub struct LeakageReport {
    pub instance: String,
    /// `I(S; V₁V₂V₃)` in bits, from exact joint counts.
    pub mutual_information_bits: f64,
    /// `H(S)` under the prior.
    pub secret_entropy_bits: f64,
    /// Posterior equals prior, exactly, for every reachable transcript.
    pub zero_leakage: bool,
    /// Every reachable transcript's posterior is a point mass.
    pub total_break: bool,
    /// Transcripts with positive probability under the prior.
    pub transcripts_examined: u64,
    /// Sessions `(s, t, A, B)` behind them.
    pub sessions_enumerated: u64,
}

/// `I(S; transcript)` by joint enumeration of `(s, t, A, B)` with `t`, `A`,
/// `B` uniform and `s` drawn from `prior`.
///
/// The zero-leakage verdict is exact rational comparison of posterior and
/// prior on every reachable transcript; floating point only enters the MI
/// figure itself, summed in canonical transcript order.
pub fn exact_mutual_information(instance: &ActionInstance, prior: &Prior, cap: u64) -> Result<LeakageReport> {
    prior.check_against(instance)?;
    let table = instance.table()?;
    let joint = table.joint_table(cap)?;
    let ng = table.group_len() as u64;
    // P(t, A, B | s) = 1 / (#blinds(s) · |G|²)
    let per_secret: Vec<BigRational> = table
        .blinds_per_secret()
        .iter()
        .zip(prior.weights())
        .map(|(&n, w)| w / BigRational::from_integer(BigInt::from(n * ng * ng)))
        .collect();

    // Σ P(s, τ)·log₂(P(s|τ)/P(s)), grouped by the ratio so the logarithm is
    // applied once per distinct value.
    let mut by_ratio: BTreeMap<BigRational, BigRational> = BTreeMap::new();
    let mut zero_leakage = true;
    let mut total_break = true;
    let mut transcripts = 0u64;
    let mut sessions = 0u64;
    for (_, counts) in joint.iter() {
        let weights: Vec<BigRational> = counts
            .iter()
            .zip(&per_secret)
            .map(|(&c, w)| w * BigRational::from_integer(BigInt::from(c)))
            .collect();
        let p_transcript: BigRational = weights.iter().sum();
        if p_transcript.is_zero() {
            // Only secrets the prior rules out produce this transcript.
            continue;
        }
        transcripts += 1;
        sessions += counts.iter().sum::<u64>();
        let mut support = 0;
        for (i, w) in weights.iter().enumerate() {
            let posterior = w / &p_transcript;
            if posterior != *prior.weight(i) {
                zero_leakage = false;
            }
            if w.is_zero() {
                continue;
            }
            support += 1;
            *by_ratio
                .entry(posterior / prior.weight(i))
                .or_insert_with(BigRational::zero) += w;
        }
        if support != 1 {
            total_break = false;
        }
    }
    let mi: f64 = by_ratio.iter().map(|(r, w)| ratio_f64(w) * log2_ratio(r)).sum();
    if zero_leakage {
        debug_assert_eq!(mi, 0.0);
    }
    Ok(LeakageReport {
        instance: instance.name().to_string(),
        mutual_information_bits: mi.max(0.0),
        secret_entropy_bits: prior.entropy_bits(),
        zero_leakage,
        total_break,
        transcripts_examined: transcripts,
        sessions_enumerated: sessions,
    })
}
