//! Polynomial-time procedures for plurality, scoring rules, k-approval and
//! k-veto. Each one answers exactly what the game oracle answers on its
//! precondition domain and refuses everything else with
//! [`SolverError::WrongVariant`].

use num_bigint::BigUint;
use thiserror::Error;

use crate::election::{CandidateId, Direction, ModelError, Oms, ProblemVariant, Weighting, WinnerModel};
use crate::rules::{scoring_vector, RuleError, RuleId, ScoringVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("solver does not apply: {0}")]
    WrongVariant(&'static str),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Aggregates of a setting under a fixed scoring vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoreState {
    /// Points from ballots already cast.
    pub current: Vec<BigUint>,
    /// Total weight of the manipulators from the current voter onward.
    pub manip_weight: BigUint,
    /// Total weight of the nonmanipulators from the current voter onward.
    pub nonmanip_weight: BigUint,
    pub manipulators: usize,
    pub nonmanipulators: usize,
    /// Points a candidate ends with if every remaining voter gives her the
    /// top score.
    pub maxscore: Vec<BigUint>,
}

impl ScoreState {
    pub fn new(oms: &Oms, alpha: &ScoringVector) -> Self {
        let cast: Vec<_> = oms
            .snapshot
            .past
            .iter()
            .map(|(v, b)| (b.clone(), v.weight.clone()))
            .collect();
        let current = crate::rules::scores(alpha, &cast);
        let mut s = ScoreState {
            current,
            manip_weight: BigUint::default(),
            nonmanip_weight: BigUint::default(),
            manipulators: 0,
            nonmanipulators: 0,
            maxscore: Vec::new(),
        };
        for v in oms.snapshot.remaining() {
            if v.is_manipulator() {
                s.manip_weight += &v.weight;
                s.manipulators += 1;
            } else {
                s.nonmanip_weight += &v.weight;
                s.nonmanipulators += 1;
            }
        }
        let top = alpha.points().first().copied().unwrap_or(0);
        let remaining = &s.manip_weight + &s.nonmanip_weight;
        s.maxscore = s.current.iter().map(|c| c + &remaining * top).collect();
        s
    }
}

fn require_nonfreeform_nuw(oms: &Oms, variant: &ProblemVariant) -> Result<(), SolverError> {
    oms.check(variant)?;
    if variant.freeform {
        return Err(SolverError::WrongVariant("freeform instances need the oracle"));
    }
    if variant.winner_model != WinnerModel::Nonunique {
        return Err(SolverError::WrongVariant("unique-winner model"));
    }
    Ok(())
}

fn require_constructive_segment(oms: &Oms, variant: &ProblemVariant) -> Result<(), SolverError> {
    require_nonfreeform_nuw(oms, variant)?;
    if !variant.is_standard_constructive() {
        return Err(SolverError::WrongVariant("needs constructive segment target"));
    }
    Ok(())
}

fn split_by_sigma(oms: &Oms) -> (Vec<CandidateId>, Vec<CandidateId>) {
    let r = oms.sigma.ranking();
    let pos = oms.sigma.position(oms.distinguished).expect("validated");
    (r[..=pos].to_vec(), r[pos + 1..].to_vec())
}

fn max_over(values: &[BigUint], ids: &[CandidateId]) -> BigUint {
    ids.iter().map(|&c| &values[c]).max().cloned().unwrap_or_default()
}

/// Weighted plurality, constructive: can some liked candidate be kept among
/// the winners?
pub fn decide_plurality_constructive_weighted(
    oms: &Oms,
    variant: &ProblemVariant,
) -> Result<bool, SolverError> {
    require_constructive_segment(oms, variant)?;
    let state = ScoreState::new(oms, &scoring_vector(&RuleId::plurality(), oms.num_candidates())?);
    let (liked, hated) = split_by_sigma(oms);
    if hated.is_empty() {
        return Ok(true);
    }
    let best_liked = max_over(&state.current, &liked);
    let best_hated = max_over(&state.current, &hated);
    Ok(best_liked + &state.manip_weight >= &state.nonmanip_weight + best_hated)
}

/// Weighted plurality, destructive: can every candidate ranked at or below
/// the distinguished one be kept out of the winner set?
pub fn decide_plurality_destructive_weighted(
    oms: &Oms,
    variant: &ProblemVariant,
) -> Result<bool, SolverError> {
    require_nonfreeform_nuw(oms, variant)?;
    if variant.direction != Direction::Destructive {
        return Err(SolverError::WrongVariant("needs destructive direction"));
    }
    if oms.sigma.top() == Some(oms.distinguished) {
        return Ok(false);
    }
    let state = ScoreState::new(oms, &scoring_vector(&RuleId::plurality(), oms.num_candidates())?);
    let r = oms.sigma.ranking();
    let pos = oms.sigma.position(oms.distinguished).expect("validated");
    let g = max_over(&state.current, &r[..pos]);
    let l = max_over(&state.current, &r[pos..]);
    Ok(g + &state.manip_weight > l + &state.nonmanip_weight)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScoringOutcome {
    Decided(bool),
    /// The vector has `α2 > αm`; only the oracle applies.
    NotPolynomialCase,
}

/// Weighted scoring rules, constructive: dispatch on the shape of the vector.
pub fn decide_scoring_weighted(
    alpha: &ScoringVector,
    oms: &Oms,
    variant: &ProblemVariant,
) -> Result<ScoringOutcome, SolverError> {
    require_constructive_segment(oms, variant)?;
    let a = alpha.points();
    if a.len() != oms.num_candidates() {
        return Err(RuleError::LengthMismatch {
            len: a.len(),
            m: oms.num_candidates(),
        }
        .into());
    }
    let (first, last) = (a[0], a[a.len() - 1]);
    if first == last {
        return Ok(ScoringOutcome::Decided(true));
    }
    if a[1] == last {
        // an affine image of plurality scores
        return decide_plurality_constructive_weighted(oms, variant).map(ScoringOutcome::Decided);
    }
    Ok(ScoringOutcome::NotPolynomialCase)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Approval,
    Veto,
}

impl Family {
    pub fn rule(self, k: usize) -> RuleId {
        match self {
            Family::Approval => RuleId::KApproval(k),
            Family::Veto => RuleId::KVeto(k),
        }
    }
}

/// How equal approval counts are ordered in the greedy simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    NameAscending,
    NameDescending,
}

/// Unweighted k-approval / k-veto, constructive.
pub fn decide_kapproval_kveto_unweighted(
    oms: &Oms,
    variant: &ProblemVariant,
    family: Family,
    k: usize,
) -> Result<bool, SolverError> {
    decide_greedy_with(oms, variant, family, k, TieBreak::NameAscending)
}

/// The greedy simulation with an explicit tie-break.
///
/// Each remaining voter in turn sees the candidates ordered as: liked ones by
/// approvals descending, then the others by approvals ascending. A
/// manipulator approves the first `l` of them, a nonmanipulator the last `l`.
pub fn decide_greedy_with(
    oms: &Oms,
    variant: &ProblemVariant,
    family: Family,
    k: usize,
    tie: TieBreak,
) -> Result<bool, SolverError> {
    require_constructive_segment(oms, variant)?;
    if variant.weighting != Weighting::Unweighted {
        return Err(SolverError::WrongVariant("needs unweighted voters"));
    }
    let m = oms.num_candidates();
    let alpha = scoring_vector(&family.rule(k), m)?;
    let mut approvals: Vec<u64> = oms.snapshot.past.iter().fold(vec![0; m], |mut acc, (_, b)| {
        for (pos, &c) in b.ranking().iter().enumerate() {
            acc[c] += alpha.points()[pos];
        }
        acc
    });
    let l = match family {
        Family::Approval => k,
        Family::Veto => m - k,
    };
    let (liked, hated) = split_by_sigma(oms);
    let by_name = |a: &CandidateId, b: &CandidateId| {
        let o = oms.candidates[*a].cmp(&oms.candidates[*b]);
        match tie {
            TieBreak::NameAscending => o,
            TieBreak::NameDescending => o.reverse(),
        }
    };
    for voter in oms.snapshot.remaining() {
        let mut front = liked.clone();
        front.sort_by(|a, b| approvals[*b].cmp(&approvals[*a]).then_with(|| by_name(a, b)));
        let mut back = hated.clone();
        back.sort_by(|a, b| approvals[*a].cmp(&approvals[*b]).then_with(|| by_name(a, b)));
        front.extend(back);
        let chosen = if voter.is_manipulator() {
            &front[..l]
        } else {
            &front[m - l..]
        };
        for &c in chosen {
            approvals[c] += 1;
        }
    }
    let best = approvals.iter().max().copied().unwrap_or(0);
    Ok(liked.iter().any(|&c| approvals[c] == best))
}

/// Unweighted 1-veto, constructive, via a threshold scan.
///
/// Success iff the distinguished candidate is the coalition's last choice,
/// or some `t` lets the manipulators hold every disliked candidate to at
/// most `t` points while the nonmanipulators cannot push every liked one
/// below `t`.
pub fn decide_1veto_threshold(oms: &Oms, variant: &ProblemVariant) -> Result<bool, SolverError> {
    require_constructive_segment(oms, variant)?;
    if variant.weighting != Weighting::Unweighted {
        return Err(SolverError::WrongVariant("needs unweighted voters"));
    }
    let (liked, hated) = split_by_sigma(oms);
    if hated.is_empty() {
        return Ok(true);
    }
    let m = oms.num_candidates();
    let remaining: Vec<_> = oms.snapshot.remaining().collect();
    let n1 = remaining.iter().filter(|v| v.is_manipulator()).count() as i64;
    let n0 = remaining.len() as i64 - n1;
    let mut maxscore = vec![n1 + n0; m];
    for (_, b) in &oms.snapshot.past {
        for &c in &b.ranking()[..m - 1] {
            maxscore[c] += 1;
        }
    }
    let excess = |ids: &[CandidateId], t: i64| -> i64 {
        ids.iter().map(|&c| (maxscore[c] - t).max(0)).sum()
    };
    let voters = oms.snapshot.past.len() as i64 + n1 + n0;
    Ok((0..=voters).any(|t| excess(&hated, t) <= n1 && excess(&liked, t - 1) > n0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::{Ballot, Name, Snapshot, Voter};
    use crate::oracle::decide_online;

    fn names(ns: &[&str]) -> Vec<Name> {
        ns.iter().map(|&n| Name::from(n)).collect()
    }

    /// Two candidates a > b; past plurality points given per candidate.
    fn two(a_pts: u32, b_pts: u32, d: usize, manip: u32, future: Vec<Voter>) -> Oms {
        let mut past = Vec::new();
        if a_pts > 0 {
            past.push((Voter::nonmanipulator("pa", a_pts), Ballot::new(vec![0, 1])));
        }
        if b_pts > 0 {
            past.push((Voter::nonmanipulator("pb", b_pts), Ballot::new(vec![1, 0])));
        }
        Oms {
            candidates: names(&["a", "b"]),
            snapshot: Snapshot::new(past, Voter::manipulator("u", manip), future),
            sigma: Ballot::new(vec![0, 1]),
            distinguished: d,
        }
    }

    #[test]
    fn plurality_constructive_examples() {
        let v = ProblemVariant::default();
        let rule = RuleId::plurality();
        // d = sigma-bottom
        let oms = two(0, 5, 1, 1, vec![Voter::nonmanipulator("n", 9u32)]);
        assert!(decide_plurality_constructive_weighted(&oms, &v).unwrap());

        let oms = two(0, 0, 0, 1, vec![Voter::nonmanipulator("n", 2u32)]);
        assert!(!decide_plurality_constructive_weighted(&oms, &v).unwrap());
        assert!(!decide_online(&oms, &rule, &v).unwrap());

        let oms = two(2, 0, 0, 1, vec![Voter::nonmanipulator("n", 2u32)]);
        assert!(decide_plurality_constructive_weighted(&oms, &v).unwrap());
        assert!(decide_online(&oms, &rule, &v).unwrap());
    }

    #[test]
    fn plurality_destructive_examples() {
        let v = ProblemVariant::default().destructive();
        let rule = RuleId::plurality();
        let oms = two(0, 0, 0, 1, vec![]);
        assert!(!decide_plurality_destructive_weighted(&oms, &v).unwrap());

        let oms = two(0, 0, 1, 1, vec![]);
        assert!(decide_plurality_destructive_weighted(&oms, &v).unwrap());
        assert!(decide_online(&oms, &rule, &v).unwrap());

        let oms = two(0, 2, 1, 1, vec![Voter::nonmanipulator("n", 1u32)]);
        assert!(!decide_plurality_destructive_weighted(&oms, &v).unwrap());
        assert!(!decide_online(&oms, &rule, &v).unwrap());
    }

    #[test]
    fn refuses_other_variants() {
        let oms = two(0, 0, 0, 1, vec![]);
        for v in [
            ProblemVariant::default().unique(),
            ProblemVariant::default().pinpoint(),
            ProblemVariant::default().destructive(),
        ] {
            assert!(matches!(
                decide_plurality_constructive_weighted(&oms, &v),
                Err(SolverError::WrongVariant(_))
            ));
        }
        assert!(matches!(
            decide_plurality_destructive_weighted(&oms, &ProblemVariant::default().destructive().unique()),
            Err(SolverError::WrongVariant(_))
        ));
        assert!(matches!(
            decide_kapproval_kveto_unweighted(&oms, &ProblemVariant::default(), Family::Approval, 1),
            Err(SolverError::WrongVariant(_))
        ));
    }

    #[test]
    fn plurality_condition_monotone_in_weights() {
        let v = ProblemVariant::default();
        for a in 0..4u32 {
            for b in 0..4u32 {
                for wm in 0..4u32 {
                    for wn in 0..4u32 {
                        let base = decide_plurality_constructive_weighted(
                            &two(a, b, 0, wm, vec![Voter::nonmanipulator("n", wn)]),
                            &v,
                        )
                        .unwrap();
                        let more_m = decide_plurality_constructive_weighted(
                            &two(a, b, 0, wm + 1, vec![Voter::nonmanipulator("n", wn)]),
                            &v,
                        )
                        .unwrap();
                        let more_n = decide_plurality_constructive_weighted(
                            &two(a, b, 0, wm, vec![Voter::nonmanipulator("n", wn + 1)]),
                            &v,
                        )
                        .unwrap();
                        assert!(!base || more_m);
                        assert!(base || !more_n);
                    }
                }
            }
        }
    }

    #[test]
    fn scoring_dispatch() {
        let v = ProblemVariant::default();
        let oms = Oms {
            candidates: names(&["a", "b", "c"]),
            snapshot: Snapshot::new(
                vec![(Voter::nonmanipulator("p", 3u32), Ballot::new(vec![2, 1, 0]))],
                Voter::manipulator("u", 1u32),
                vec![Voter::nonmanipulator("n", 1u32)],
            ),
            sigma: Ballot::new(vec![0, 1, 2]),
            distinguished: 0,
        };
        let flat = ScoringVector::new(vec![1, 1, 1]).unwrap();
        assert_eq!(decide_scoring_weighted(&flat, &oms, &v).unwrap(), ScoringOutcome::Decided(true));
        let steep = ScoringVector::new(vec![3, 1, 1]).unwrap();
        let plur = decide_plurality_constructive_weighted(&oms, &v).unwrap();
        assert_eq!(decide_scoring_weighted(&steep, &oms, &v).unwrap(), ScoringOutcome::Decided(plur));
        assert_eq!(
            decide_online(&oms, &RuleId::Scoring(steep), &v).unwrap(),
            plur
        );
        let borda = ScoringVector::new(vec![2, 1, 0]).unwrap();
        assert_eq!(
            decide_scoring_weighted(&borda, &oms, &v).unwrap(),
            ScoringOutcome::NotPolynomialCase
        );
    }

    /// Four candidates, 2-approval, sigma c1 > c2 > c3 > c4, d = c1; v1 approved
    /// {c3, c4}, then u, a nonmanipulator, and a final manipulator.
    fn chain() -> Oms {
        Oms {
            candidates: names(&["c1", "c2", "c3", "c4"]),
            snapshot: Snapshot::new(
                vec![(Voter::nonmanipulator("v1", 1u32), Ballot::new(vec![2, 3, 0, 1]))],
                Voter::manipulator("v2", 1u32),
                vec![Voter::nonmanipulator("v3", 1u32), Voter::manipulator("v4", 1u32)],
            ),
            sigma: Ballot::new(vec![0, 1, 2, 3]),
            distinguished: 0,
        }
    }

    #[test]
    fn greedy_on_chain_instance() {
        let v = ProblemVariant::default().unweighted();
        let oms = chain();
        assert!(decide_kapproval_kveto_unweighted(&oms, &v, Family::Approval, 2).unwrap());
        assert!(decide_online(&oms, &RuleId::KApproval(2), &v).unwrap());
    }

    #[test]
    fn greedy_far_ahead() {
        let v = ProblemVariant::default().unweighted();
        let mut oms = chain();
        oms.snapshot.past = (0..5)
            .map(|i| (Voter::nonmanipulator(format!("p{i}"), 1u32), Ballot::new(vec![0, 1, 2, 3])))
            .collect();
        oms.snapshot.future = vec![Voter::manipulator("w", 1u32)];
        assert!(decide_kapproval_kveto_unweighted(&oms, &v, Family::Approval, 1).unwrap());
        assert!(decide_kapproval_kveto_unweighted(&oms, &v, Family::Veto, 1).unwrap());
    }

    #[test]
    fn one_veto_threshold_examples() {
        let v = ProblemVariant::default().unweighted();
        let oms = Oms {
            candidates: names(&["a", "b", "c"]),
            snapshot: Snapshot::new(
                vec![],
                Voter::manipulator("u", 1u32),
                vec![Voter::nonmanipulator("n", 1u32)],
            ),
            sigma: Ballot::new(vec![0, 1, 2]),
            distinguished: 1,
        };
        // t = 1: c holds 2 - 1 = 1 <= 1 excess; a, b have 2 + 2 = 4 > 1
        assert!(decide_1veto_threshold(&oms, &v).unwrap());
        assert!(decide_online(&oms, &RuleId::veto(), &v).unwrap());
        assert!(decide_1veto_threshold(&oms.with_distinguished(2), &v).unwrap());
    }
}
