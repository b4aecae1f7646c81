//! Exact arithmetic for the multiplicative group of degree-2 linear
//! recurrence sequences (the Laxton group): the group law on seed vectors,
//! shift-and-scale equivalence classes, reduction mod p, rank of apparition,
//! and machinery for cross-checking closed-form structure predictions
//! against brute-force enumeration.
//!
//! See the book under `book/` for a guided tour. Everything is exact: big
//! rationals, big integers, and p-adic valuations with on-demand precision;
//! floating point only ever proposes candidates that are verified exactly.

pub mod arith;
pub mod classify;
pub mod equivalence;
pub mod error;
pub mod finite;
pub mod recurrence;
pub mod report;

pub use arith::{
    splitting_of_disc, valuations_above, PadicCtx, PrimeP, QuadElem, Rat, SplittingType,
    Valuations,
};
pub use classify::{
    crosscheck_structure, membership, predict_structure, reduce_p, sample_classes,
    star_divisor_membership, verify_exact_sequence, ExactSequenceReport, MembershipReport,
    StructurePrediction, StructureReport, Verdict,
};
pub use equivalence::{
    class_mul, decide_equiv, decide_star_equiv, normalize, psi_image, psi_map, GClass, GStarClass,
    StarDecision, StarObstruction,
};
pub use error::{Error, Result};
pub use finite::{
    abelian_invariants, direct_sum_invariants, enumerate_g, enumerate_g_star, expected_g_order,
    rank, rational_unit_group, unit_quotient, FiniteGroupTable, FpPoint, RankResult,
};
pub use recurrence::{lucas_pair, ClassVector, RecurrenceParams, RingCtx, Scalar, SeqWindow};
pub use report::{InstanceKey, PredictedView, ReportRecord, SCHEMA_VERSION};
