//! Data model for sequential elections and online manipulation settings.
//!
//! Candidates are referred to by their index in declaration order
//! ([`CandidateId`]); names are raw byte strings and their bytewise order is
//! meaningful to some rules. Weights are arbitrary-precision.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

/// Index of a candidate in declaration order.
pub type CandidateId = usize;

/// A candidate or voter name. Compared bytewise.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Vec<u8>);

impl Name {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Self {
        Name(bytes.into())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl AsRef<[u8]> for Name {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name(s.as_bytes().to_vec())
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name(s.into_bytes())
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.0))
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", String::from_utf8_lossy(&self.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Manipulator,
    Nonmanipulator,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Voter {
    pub name: Name,
    pub weight: BigUint,
    pub role: Role,
}

impl Voter {
    pub fn new(name: impl Into<Name>, weight: impl Into<BigUint>, role: Role) -> Self {
        Voter {
            name: name.into(),
            weight: weight.into(),
            role,
        }
    }

    pub fn manipulator(name: impl Into<Name>, weight: impl Into<BigUint>) -> Self {
        Self::new(name, weight, Role::Manipulator)
    }

    pub fn nonmanipulator(name: impl Into<Name>, weight: impl Into<BigUint>) -> Self {
        Self::new(name, weight, Role::Nonmanipulator)
    }

    pub fn is_manipulator(&self) -> bool {
        self.role == Role::Manipulator
    }
}

/// A total strict order over the candidates, most preferred first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ballot(Vec<CandidateId>);

impl Ballot {
    pub fn new(ranking: Vec<CandidateId>) -> Self {
        Ballot(ranking)
    }

    /// The identity order `0 > 1 > ... > m-1`.
    pub fn identity(m: usize) -> Self {
        Ballot((0..m).collect())
    }

    pub fn ranking(&self) -> &[CandidateId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn top(&self) -> Option<CandidateId> {
        self.0.first().copied()
    }

    pub fn bottom(&self) -> Option<CandidateId> {
        self.0.last().copied()
    }

    /// Zero-based rank of `c` (0 = top).
    pub fn position(&self, c: CandidateId) -> Option<usize> {
        self.0.iter().position(|&x| x == c)
    }

    /// Rank of every candidate, indexed by candidate id. Assumes completeness.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (i, &c) in self.0.iter().enumerate() {
            pos[c] = i;
        }
        pos
    }

    /// True iff this ranks every candidate in `0..m` exactly once.
    pub fn is_complete_over(&self, m: usize) -> bool {
        if self.0.len() != m {
            return false;
        }
        let mut seen = vec![false; m];
        for &c in &self.0 {
            if c >= m || seen[c] {
                return false;
            }
            seen[c] = true;
        }
        true
    }

    /// Builds a ballot from candidate names.
    pub fn from_names<S: AsRef<[u8]>>(candidates: &[Name], order: &[S]) -> Result<Self, ModelError> {
        let mut ranking = Vec::with_capacity(order.len());
        for n in order {
            let n = n.as_ref();
            let id = candidates
                .iter()
                .position(|c| c.as_bytes() == n)
                .ok_or_else(|| ModelError::UnknownCandidateInBallot(Name::new(n)))?;
            ranking.push(id);
        }
        let b = Ballot(ranking);
        if !b.is_complete_over(candidates.len()) {
            return Err(ModelError::IncompleteBallot);
        }
        Ok(b)
    }

    /// All `m!` total orders over `0..m`, in lexicographic order of rankings.
    pub fn all(m: usize) -> Vec<Ballot> {
        let mut out = Vec::new();
        let mut cur: Vec<CandidateId> = (0..m).collect();
        loop {
            out.push(Ballot(cur.clone()));
            // next permutation
            let Some(i) = (1..m).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..m).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

/// The voters of a sequential election as seen at the current voter's turn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    /// Voters who already voted, in voting order.
    pub past: Vec<(Voter, Ballot)>,
    /// The voter whose turn it is.
    pub current: Voter,
    /// Freeform only: a fixed ballot for a nonmanipulating current voter.
    pub current_ballot: Option<Ballot>,
    /// Voters still to come, in voting order.
    pub future: Vec<Voter>,
}

impl Snapshot {
    pub fn new(past: Vec<(Voter, Ballot)>, current: Voter, future: Vec<Voter>) -> Self {
        Snapshot {
            past,
            current,
            current_ballot: None,
            future,
        }
    }

    /// The current voter followed by all future voters.
    pub fn remaining(&self) -> impl Iterator<Item = &Voter> {
        std::iter::once(&self.current).chain(self.future.iter())
    }

    /// The snapshot after the current voter casts `ballot`, or `None` if
    /// nobody is left to vote.
    pub fn advance(&self, ballot: Ballot) -> Option<Snapshot> {
        let mut future = self.future.clone();
        if future.is_empty() {
            return None;
        }
        let current = future.remove(0);
        let mut past = self.past.clone();
        past.push((self.current.clone(), ballot));
        Some(Snapshot {
            past,
            current,
            current_ballot: None,
            future,
        })
    }

    fn all_voters(&self) -> impl Iterator<Item = &Voter> {
        self.past.iter().map(|(v, _)| v).chain(self.remaining())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Constructive,
    Destructive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Segment,
    Pinpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Weighting {
    Weighted,
    Unweighted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WinnerModel {
    Nonunique,
    Unique,
}

/// Which online manipulation problem is being asked.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProblemVariant {
    pub direction: Direction,
    pub target: Target,
    pub weighting: Weighting,
    pub winner_model: WinnerModel,
    pub freeform: bool,
    /// Maximum number of manipulators from the current voter onward.
    pub coalition_bound: Option<usize>,
}

impl Default for ProblemVariant {
    fn default() -> Self {
        ProblemVariant {
            direction: Direction::Constructive,
            target: Target::Segment,
            weighting: Weighting::Weighted,
            winner_model: WinnerModel::Nonunique,
            freeform: false,
            coalition_bound: None,
        }
    }
}

impl ProblemVariant {
    pub fn unweighted(mut self) -> Self {
        self.weighting = Weighting::Unweighted;
        self
    }

    pub fn destructive(mut self) -> Self {
        self.direction = Direction::Destructive;
        self
    }

    pub fn pinpoint(mut self) -> Self {
        self.target = Target::Pinpoint;
        self
    }

    pub fn unique(mut self) -> Self {
        self.winner_model = WinnerModel::Unique;
        self
    }

    pub fn freeform(mut self) -> Self {
        self.freeform = true;
        self
    }

    /// Constructive, segment target, nonunique-winner model.
    pub fn is_standard_constructive(&self) -> bool {
        self.direction == Direction::Constructive
            && self.target == Target::Segment
            && self.winner_model == WinnerModel::Nonunique
    }
}

/// An online manipulation setting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Oms {
    pub candidates: Vec<Name>,
    pub snapshot: Snapshot,
    /// The coalition's preference order.
    pub sigma: Ballot,
    pub distinguished: CandidateId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate name {0}")]
    DuplicateName(Name),
    #[error("empty name")]
    EmptyName,
    #[error("unknown candidate {0} in ballot")]
    UnknownCandidateInBallot(Name),
    #[error("ballot does not rank every candidate exactly once")]
    IncompleteBallot,
    #[error("distinguished candidate is not a candidate")]
    DistinguishedNotCandidate,
    #[error("current voter is not a manipulator")]
    CurrentVoterNotManipulator,
    #[error("coalition bound {bound} below the {actual} manipulators from the current voter onward")]
    BadCoalitionBound { bound: usize, actual: usize },
    #[error("voter {0} has non-unit weight in an unweighted problem")]
    NonUnitWeightInUnweighted(Name),
    #[error("a fixed current ballot is only allowed for a freeform nonmanipulator")]
    UnexpectedCurrentBallot,
    #[error("no candidates")]
    NoCandidates,
}

fn check_names<'a>(names: impl Iterator<Item = &'a Name>) -> Result<(), ModelError> {
    let mut seen = HashSet::new();
    for n in names {
        if n.is_empty() {
            return Err(ModelError::EmptyName);
        }
        if !seen.insert(n) {
            return Err(ModelError::DuplicateName(n.clone()));
        }
    }
    Ok(())
}

fn check_ballot(b: &Ballot, m: usize) -> Result<(), ModelError> {
    if let Some(&bad) = b.ranking().iter().find(|&&c| c >= m) {
        return Err(ModelError::UnknownCandidateInBallot(Name::from(format!("#{bad}"))));
    }
    if !b.is_complete_over(m) {
        return Err(ModelError::IncompleteBallot);
    }
    Ok(())
}

fn check_weights<'a>(
    voters: impl Iterator<Item = &'a Voter>,
    variant: &ProblemVariant,
) -> Result<(), ModelError> {
    if variant.weighting == Weighting::Unweighted {
        for v in voters {
            if !v.weight.is_one() {
                return Err(ModelError::NonUnitWeightInUnweighted(v.name.clone()));
            }
        }
    }
    Ok(())
}

fn check_bound<'a>(
    remaining: impl Iterator<Item = &'a Voter>,
    variant: &ProblemVariant,
) -> Result<(), ModelError> {
    if let Some(bound) = variant.coalition_bound {
        let actual = remaining.filter(|v| v.is_manipulator()).count();
        if actual > bound {
            return Err(ModelError::BadCoalitionBound { bound, actual });
        }
    }
    Ok(())
}

impl Oms {
    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }

    pub fn candidate_id(&self, name: &[u8]) -> Option<CandidateId> {
        self.candidates.iter().position(|c| c.as_bytes() == name)
    }

    pub fn with_distinguished(&self, d: CandidateId) -> Oms {
        Oms {
            distinguished: d,
            ..self.clone()
        }
    }

    /// Checks every structural invariant and returns the setting unchanged.
    pub fn validate(self, variant: &ProblemVariant) -> Result<Oms, ModelError> {
        self.check(variant)?;
        Ok(self)
    }

    pub fn check(&self, variant: &ProblemVariant) -> Result<(), ModelError> {
        let m = self.candidates.len();
        if m == 0 {
            return Err(ModelError::NoCandidates);
        }
        check_names(self.candidates.iter())?;
        check_names(self.snapshot.all_voters().map(|v| &v.name))?;
        check_ballot(&self.sigma, m)?;
        for (_, b) in &self.snapshot.past {
            check_ballot(b, m)?;
        }
        if self.distinguished >= m {
            return Err(ModelError::DistinguishedNotCandidate);
        }
        let current = &self.snapshot.current;
        if !variant.freeform && !current.is_manipulator() {
            return Err(ModelError::CurrentVoterNotManipulator);
        }
        if let Some(b) = &self.snapshot.current_ballot {
            if !variant.freeform || current.is_manipulator() {
                return Err(ModelError::UnexpectedCurrentBallot);
            }
            check_ballot(b, m)?;
        }
        check_bound(self.snapshot.remaining(), variant)?;
        check_weights(self.snapshot.all_voters(), variant)?;
        Ok(())
    }

    /// Candidates the coalition likes at least as much as the distinguished one.
    pub fn liked(&self) -> Vec<CandidateId> {
        goal_set(&self.sigma, self.distinguished, Direction::Constructive, Target::Segment)
            .into_iter()
            .collect()
    }
}

/// Online manipulation when the order of the remaining voters is unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleFreeState {
    pub candidates: Vec<Name>,
    pub past: Vec<(Voter, Ballot)>,
    /// Remaining voters; their order carries no meaning.
    pub remaining: Vec<Voter>,
    pub sigma: Ballot,
    pub distinguished: CandidateId,
}

impl ScheduleFreeState {
    pub fn validate(self, variant: &ProblemVariant) -> Result<Self, ModelError> {
        let m = self.candidates.len();
        if m == 0 {
            return Err(ModelError::NoCandidates);
        }
        check_names(self.candidates.iter())?;
        let voters = || self.past.iter().map(|(v, _)| v).chain(self.remaining.iter());
        check_names(voters().map(|v| &v.name))?;
        check_ballot(&self.sigma, m)?;
        for (_, b) in &self.past {
            check_ballot(b, m)?;
        }
        if self.distinguished >= m {
            return Err(ModelError::DistinguishedNotCandidate);
        }
        check_bound(self.remaining.iter(), variant)?;
        check_weights(voters(), variant)?;
        Ok(self)
    }
}

/// The set of candidates a goal refers to.
///
/// Constructive segment: `{c : c >=σ d}`; constructive pinpoint: `{d}`;
/// destructive (either target): the forbidden set `{c : d >=σ c}`.
pub fn goal_set(
    sigma: &Ballot,
    d: CandidateId,
    direction: Direction,
    target: Target,
) -> BTreeSet<CandidateId> {
    let pos = sigma
        .position(d)
        .expect("distinguished candidate must be ranked in sigma");
    let r = sigma.ranking();
    match (direction, target) {
        (Direction::Constructive, Target::Segment) => r[..=pos].iter().copied().collect(),
        (Direction::Constructive, Target::Pinpoint) => BTreeSet::from([d]),
        (Direction::Destructive, _) => r[pos..].iter().copied().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(ns: &[&str]) -> Vec<Name> {
        ns.iter().map(|&n| Name::from(n)).collect()
    }

    fn minimal() -> Oms {
        let c = names(&["a", "b"]);
        Oms {
            snapshot: Snapshot::new(
                vec![(Voter::nonmanipulator("v1", 1u32), Ballot::new(vec![0, 1]))],
                Voter::manipulator("u", 1u32),
                vec![],
            ),
            sigma: Ballot::new(vec![0, 1]),
            distinguished: 0,
            candidates: c,
        }
    }

    #[test]
    fn minimal_instance_is_valid() {
        let oms = minimal();
        assert_eq!(oms.clone().validate(&ProblemVariant::default()), Ok(oms));
    }

    #[test]
    fn validation_is_idempotent() {
        let v = ProblemVariant::default().unweighted();
        let once = minimal().validate(&v).unwrap();
        assert_eq!(once.clone().validate(&v).unwrap(), once);
    }

    #[test]
    fn distinguished_outside_candidates() {
        let mut oms = minimal();
        oms.distinguished = 7;
        assert_eq!(
            oms.check(&ProblemVariant::default()),
            Err(ModelError::DistinguishedNotCandidate)
        );
        // by name
        assert_eq!(minimal().candidate_id(b"z"), None);
    }

    #[test]
    fn repeated_candidate_in_ballot() {
        let mut oms = minimal();
        oms.snapshot.past[0].1 = Ballot::new(vec![0, 0]);
        assert_eq!(oms.check(&ProblemVariant::default()), Err(ModelError::IncompleteBallot));
        let c = names(&["a", "b"]);
        assert_eq!(Ballot::from_names(&c, &["a", "a"]), Err(ModelError::IncompleteBallot));
        assert_eq!(
            Ballot::from_names(&c, &["a", "z"]),
            Err(ModelError::UnknownCandidateInBallot(Name::from("z")))
        );
    }

    #[test]
    fn other_validation_errors() {
        let v = ProblemVariant::default();
        let mut oms = minimal();
        oms.snapshot.current.name = Name::from("v1");
        assert_eq!(oms.check(&v), Err(ModelError::DuplicateName(Name::from("v1"))));

        let mut oms = minimal();
        oms.snapshot.current.role = Role::Nonmanipulator;
        assert_eq!(oms.check(&v), Err(ModelError::CurrentVoterNotManipulator));
        assert_eq!(oms.check(&v.clone().freeform()), Ok(()));

        let mut oms = minimal();
        oms.snapshot.future.push(Voter::manipulator("w", 1u32));
        let bounded = ProblemVariant {
            coalition_bound: Some(1),
            ..v.clone()
        };
        assert_eq!(
            oms.check(&bounded),
            Err(ModelError::BadCoalitionBound { bound: 1, actual: 2 })
        );

        let mut oms = minimal();
        oms.snapshot.current.weight = BigUint::from(2u32);
        assert_eq!(
            oms.check(&v.clone().unweighted()),
            Err(ModelError::NonUnitWeightInUnweighted(Name::from("u")))
        );
        assert_eq!(oms.check(&v), Ok(()));
    }

    #[test]
    fn goal_sets() {
        let sigma = Ballot::new(vec![0, 1, 2]);
        use Direction::*;
        use Target::*;
        assert_eq!(goal_set(&sigma, 1, Constructive, Segment), BTreeSet::from([0, 1]));
        assert_eq!(goal_set(&sigma, 1, Constructive, Pinpoint), BTreeSet::from([1]));
        assert_eq!(goal_set(&sigma, 1, Destructive, Segment), BTreeSet::from([1, 2]));
        assert_eq!(goal_set(&sigma, 1, Destructive, Pinpoint), BTreeSet::from([1, 2]));
        // sigma-top
        assert_eq!(goal_set(&sigma, 0, Constructive, Segment), BTreeSet::from([0]));
        assert_eq!(goal_set(&sigma, 0, Destructive, Segment), BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn goal_sets_partition_candidates_at_successor() {
        for sigma in Ballot::all(4) {
            for w in sigma.ranking().windows(2) {
                let liked = goal_set(&sigma, w[0], Direction::Constructive, Target::Segment);
                let forbidden = goal_set(&sigma, w[1], Direction::Destructive, Target::Segment);
                assert!(liked.is_disjoint(&forbidden));
                assert_eq!(liked.len() + forbidden.len(), 4);
            }
        }
    }

    #[test]
    fn all_ballots() {
        let all = Ballot::all(3);
        assert_eq!(all.len(), 6);
        assert!(all.iter().all(|b| b.is_complete_over(3)));
        assert_eq!(Ballot::all(1), vec![Ballot::new(vec![0])]);
        assert_eq!(Ballot::all(4).len(), 24);
    }

    #[test]
    fn advance_moves_current_into_past() {
        let mut oms = minimal();
        oms.snapshot.future.push(Voter::nonmanipulator("w", 1u32));
        let next = oms.snapshot.advance(Ballot::new(vec![1, 0])).unwrap();
        assert_eq!(next.past.len(), 2);
        assert_eq!(next.current.name, Name::from("w"));
        assert!(next.advance(Ballot::new(vec![0, 1])).is_none());
    }
}
