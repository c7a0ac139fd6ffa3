//! The four-pass exchange: state machines for both parties, an eavesdropper
//! tap, transcripts, and the round-trip success predicate.

mod roundtrip;
mod session;
mod transcript;

pub use roundtrip::roundtrip_success_iff_comm_fixed;
pub use session::{
    alice_mask, alice_unmask, bob_mask, bob_unmask, encode_secret, run_session, run_session_with, Alice, Bob, Message,
    Role, SecretEncoding, SessionOutcome, Tap,
};
pub use transcript::{read_transcripts, GroundTruth, Transcript};
