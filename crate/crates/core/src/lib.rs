//! Decision procedures for online coalitional manipulation of sequential
//! elections.
//!
//! A coalition of manipulators votes one at a time, interleaved with
//! nonmanipulators, and each manipulator sees every vote cast before hers.
//! The question is whether the coalition can force a winner it likes at
//! least as much as a distinguished candidate (or, destructively, keep every
//! disliked candidate out).
//!
//! * [`election`]: data model and validation.
//! * [`rules`]: scoring rules and the tiered-formula rule.
//! * [`oracle`]: exact alternating game-tree search, the ground truth.
//! * [`poly`]: polynomial-time procedures for plurality, scoring rules,
//!   k-approval and k-veto.
//! * [`veto`]: threshold algorithms for weighted veto, backed by an exact
//!   covering search.
//! * [`reductions`]: hardness-instance generators with brute-force checkers.

pub mod election;
pub mod oracle;
pub mod poly;
pub mod reductions;
pub mod rules;
pub mod veto;

pub use election::{
    goal_set, Ballot, CandidateId, Direction, ModelError, Name, Oms, ProblemVariant, Role,
    ScheduleFreeState, Snapshot, Target, Voter, Weighting, WinnerModel,
};
pub use oracle::{GameOracle, OracleConfig, OracleError, ScheduleMethod};
pub use rules::{RuleError, RuleId, ScoringVector};
