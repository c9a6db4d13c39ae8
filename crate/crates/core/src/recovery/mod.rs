//! Recovery sets, query serving and exact verifiers for the (t, w, μ)-PIR
//! and t-batch properties.
//!
//! A position set `I` recovers data bit `j` when the restriction of every
//! codeword to `I` determines bit `j`. For linear encoders this is decided by
//! checking whether `e_j` lies in the span of the generator columns indexed
//! by `I`; explicit encoders are checked by partitioning the table on the
//! restriction and testing that each class agrees on bit `j`. No model of
//! decoding cost is imposed: recoverability is purely informational.

mod encoder;
mod serve;
mod sets;
mod verify;

pub use encoder::{data_bit, Encoder, ExplicitTable, MAX_EXPLICIT_DIMENSION, MAX_EXPLICIT_LENGTH};
pub use serve::{serve_query, Query, ServeOutcome, ServingPlan};
pub(crate) use sets::next_combination;
pub use sets::{
    find_disjoint_family, is_recovery_set, minimal_recovery_sets, FamilySearch, MinimalSets,
    RecoveryDecoder, RecoveryFamily, RecoverySet,
};
pub use verify::{
    multisets, verify_batch, verify_pir, Parameters, Property, QueryEntry, QueryResult,
    SearchStats, Verdict, VerificationReport,
};
