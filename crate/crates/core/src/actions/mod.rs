//! Group-action instances, comm-fixed predicates, and exhaustive condition
//! checkers.

mod conditions;
mod instance;
mod point;
mod table;

pub use conditions::{
    check_comm_fixed_set, check_conditions, check_masking_coverage, check_transcript_equivalence, is_comm_fixed_point,
    is_comm_fixed_point_in, is_comm_fixed_set, masking_witness, transcript_witness, CommFixedMode, CommFixedOracle,
    ConditionId, ConditionReport, Counterexample, Verdict, Witness,
};
pub use instance::{
    build_instance, comm_fixed_nonzero_points, fixed_line_embedding, sample_bounded_rational, sample_rational_gl2,
    ActionInstance, Embedding, EmbeddingEntry, GroupSpec, InstanceDescriptor, InstanceKind, RATIONAL_DEN_BOUND,
    RATIONAL_NUM_BOUND,
};
pub use point::{act, Point};
pub use table::{ensure_within_cap, EncodingIdx, FiniteAction, JointTable, TranscriptKey, DEFAULT_WORK_CAP};
