//! Winner determination: scoring rules and the tiered-formula rule.

mod tiered;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::election::{Ballot, CandidateId, Name, Voter};

pub use tiered::{decode_bits, tiered_winners, Formula, FormulaError, TieredFormula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule needs at least {needed} candidates, got {got}")]
    MTooSmall { needed: usize, got: usize },
    #[error("scoring vector has length {len}, expected {m}")]
    LengthMismatch { len: usize, m: usize },
    #[error("scoring vector is not nonincreasing")]
    NotNonincreasing,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("empty candidate set")]
    EmptyCandidateSet,
    #[error("ballot ranks too few candidates to decode {width} bits")]
    TooFewCandidates { width: usize },
    #[error("the tiered rule has no scoring vector")]
    NotScoring,
}

/// A nonincreasing vector of nonnegative points by rank position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScoringVector(Vec<u64>);

impl ScoringVector {
    pub fn new(alpha: Vec<u64>) -> Result<Self, RuleError> {
        if alpha.windows(2).any(|w| w[0] < w[1]) {
            return Err(RuleError::NotNonincreasing);
        }
        Ok(ScoringVector(alpha))
    }

    pub fn points(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RuleId {
    Scoring(ScoringVector),
    KApproval(usize),
    KVeto(usize),
    Tiered,
}

impl RuleId {
    pub fn plurality() -> Self {
        RuleId::KApproval(1)
    }

    pub fn veto() -> Self {
        RuleId::KVeto(1)
    }

    pub fn is_plurality(&self) -> bool {
        *self == RuleId::KApproval(1)
    }

    pub fn is_veto(&self) -> bool {
        *self == RuleId::KVeto(1)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleId::KApproval(1) => f.write_str("plurality"),
            RuleId::KVeto(1) => f.write_str("veto"),
            RuleId::KApproval(k) => write!(f, "approval {k}"),
            RuleId::KVeto(k) => write!(f, "kveto {k}"),
            RuleId::Scoring(a) => {
                f.write_str("scoring")?;
                for x in a.points() {
                    write!(f, " {x}")?;
                }
                Ok(())
            }
            RuleId::Tiered => f.write_str("tiered"),
        }
    }
}

/// The `m`-candidate scoring vector of a rule.
pub fn scoring_vector(rule: &RuleId, m: usize) -> Result<ScoringVector, RuleError> {
    match rule {
        RuleId::KApproval(0) | RuleId::KVeto(0) => Err(RuleError::ZeroK),
        RuleId::KApproval(k) | RuleId::KVeto(k) if *k > m => {
            Err(RuleError::MTooSmall { needed: *k, got: m })
        }
        RuleId::KApproval(k) => Ok(ScoringVector(
            (0..m).map(|i| u64::from(i < *k)).collect(),
        )),
        RuleId::KVeto(k) => Ok(ScoringVector(
            (0..m).map(|i| u64::from(i < m - k)).collect(),
        )),
        RuleId::Scoring(a) if a.len() != m => Err(RuleError::LengthMismatch { len: a.len(), m }),
        RuleId::Scoring(a) => Ok(a.clone()),
        RuleId::Tiered => Err(RuleError::NotScoring),
    }
}

/// Total points of every candidate.
pub fn scores(alpha: &ScoringVector, ballots: &[(Ballot, BigUint)]) -> Vec<BigUint> {
    let mut s = vec![BigUint::default(); alpha.len()];
    for (b, w) in ballots {
        for (pos, &c) in b.ranking().iter().enumerate() {
            s[c] += w * alpha.0[pos];
        }
    }
    s
}

/// All candidates with the maximum score.
pub fn winners(
    alpha: &ScoringVector,
    num_candidates: usize,
    ballots: &[(Ballot, BigUint)],
) -> Result<BTreeSet<CandidateId>, RuleError> {
    if num_candidates == 0 {
        return Err(RuleError::EmptyCandidateSet);
    }
    if alpha.len() != num_candidates {
        return Err(RuleError::LengthMismatch {
            len: alpha.len(),
            m: num_candidates,
        });
    }
    let s = scores(alpha, ballots);
    let best = s.iter().max().expect("nonempty");
    Ok((0..num_candidates).filter(|&c| &s[c] == best).collect())
}

/// Winner set of a complete election under any supported rule.
pub fn election_winners(
    rule: &RuleId,
    candidates: &[Name],
    cast: &[(Voter, Ballot)],
) -> Result<BTreeSet<CandidateId>, RuleError> {
    match rule {
        RuleId::Tiered => {
            let named: Vec<(Name, Ballot)> =
                cast.iter().map(|(v, b)| (v.name.clone(), b.clone())).collect();
            Ok(tiered_winners(candidates, &named))
        }
        _ => {
            let alpha = scoring_vector(rule, candidates.len())?;
            let weighted: Vec<(Ballot, BigUint)> =
                cast.iter().map(|(v, b)| (b.clone(), v.weight.clone())).collect();
            winners(&alpha, candidates.len(), &weighted)
        }
    }
}
