//! The passive eavesdropper, made exact: witness enumeration, posteriors,
//! mutual information, a quotient attack, and a bounded instance search.

mod attack;
mod leakage;
mod posterior;
mod search;
mod witness;

pub use attack::{quotient_attack, QuotientEstimate};
pub use leakage::{exact_mutual_information, LeakageReport};
pub use posterior::{posterior_from_transcript, Mass, PosteriorReport, Prior};
pub use search::{search_instances, InstanceOutcome, SearchConfig, SearchReport, SubgroupEntry, Variant};
pub use witness::{enumerate_consistent, find_witness, WitnessSet};
