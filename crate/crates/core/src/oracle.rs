//! Exact evaluation of online manipulation problems by exhaustive
//! alternating game-tree search.
//!
//! Remaining voters are processed in voting order. A manipulator's ply is an
//! existential choice among all `m!` ballots, a nonmanipulator's ply a
//! universal one. Leaves are judged by the winner set of the full election.
//! This is the ground truth every other solver is checked against.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::election::{
    goal_set, Ballot, CandidateId, Direction, ModelError, Name, Oms, ProblemVariant,
    ScheduleFreeState, Voter, WinnerModel,
};
use crate::rules::{scoring_vector, tiered_winners, RuleError, RuleId};

pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search budget of {cap} nodes exceeded")]
    SearchBudgetExceeded { cap: u64 },
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug)]
pub struct OracleConfig {
    /// Maximum number of game-tree nodes visited per query.
    pub node_cap: u64,
    /// Evaluate the root moves on the rayon pool.
    pub parallel: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            node_cap: DEFAULT_NODE_CAP,
            parallel: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleMethod {
    /// Every ordering of the remaining voters must be won.
    Exhaustive,
    /// Only the ordering with all manipulators first is checked.
    ManipulatorsFirst,
}

/// Success test applied to a final winner set.
#[derive(Clone, Debug)]
pub(crate) struct Criterion {
    members: Vec<bool>,
    direction: Direction,
    model: WinnerModel,
}

impl Criterion {
    pub(crate) fn new(sigma: &Ballot, d: CandidateId, variant: &ProblemVariant) -> Self {
        let set = goal_set(sigma, d, variant.direction, variant.target);
        let mut members = vec![false; sigma.len()];
        for c in set {
            members[c] = true;
        }
        Criterion {
            members,
            direction: variant.direction,
            model: variant.winner_model,
        }
    }

    pub(crate) fn met(&self, winners: impl IntoIterator<Item = CandidateId>) -> bool {
        let mut count = 0usize;
        let mut hits = 0usize;
        for c in winners {
            count += 1;
            hits += usize::from(self.members[c]);
        }
        let unique_hit = count == 1 && hits == 1;
        match (self.direction, self.model) {
            (Direction::Constructive, WinnerModel::Nonunique) => hits > 0,
            (Direction::Constructive, WinnerModel::Unique) => unique_hit,
            (Direction::Destructive, WinnerModel::Nonunique) => hits == 0,
            // no forbidden candidate may end up as the one and only winner
            (Direction::Destructive, WinnerModel::Unique) => !unique_hit,
        }
    }
}

#[derive(Clone, Debug)]
enum Mover {
    Exists,
    Forall,
    Fixed(Ballot),
}

#[derive(Clone, Debug)]
struct Ply {
    mover: Mover,
    voter: Voter,
}

impl Ply {
    fn of(voter: &Voter) -> Ply {
        Ply {
            mover: if voter.is_manipulator() {
                Mover::Exists
            } else {
                Mover::Forall
            },
            voter: voter.clone(),
        }
    }
}

struct Budget {
    used: AtomicU64,
    cap: u64,
}

impl Budget {
    fn new(cap: u64) -> Self {
        Budget {
            used: AtomicU64::new(0),
            cap,
        }
    }

    fn tick(&self) -> Result<(), OracleError> {
        if self.used.fetch_add(1, Ordering::Relaxed) >= self.cap {
            Err(OracleError::SearchBudgetExceeded { cap: self.cap })
        } else {
            Ok(())
        }
    }
}

/// Score arithmetic used inside the search. `u64` when every reachable
/// score fits, arbitrary precision otherwise.
trait Tally: Clone + Eq + Hash + Ord + Send + Sync {
    fn zero() -> Self;
    fn from_big(w: &BigUint) -> Self;
    fn add_scaled(&mut self, w: &Self, points: u64);
}

impl Tally for u64 {
    fn zero() -> Self {
        0
    }
    fn from_big(w: &BigUint) -> Self {
        w.to_u64().expect("range checked before search")
    }
    fn add_scaled(&mut self, w: &Self, points: u64) {
        *self += w * points;
    }
}

impl Tally for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_big(w: &BigUint) -> Self {
        w.clone()
    }
    fn add_scaled(&mut self, w: &Self, points: u64) {
        if points != 0 {
            *self += w * points;
        }
    }
}

/// A fully specified game: everything needed to evaluate it.
struct Game<'a> {
    candidates: &'a [Name],
    past: &'a [(Voter, Ballot)],
    plies: Vec<Ply>,
    criterion: Criterion,
    rule: &'a RuleId,
}

struct ScoringSearch<'a, T: Tally> {
    alpha: &'a [u64],
    plies: Vec<(Mover, T)>,
    ballots: &'a [Ballot],
    criterion: &'a Criterion,
    budget: &'a Budget,
    memo: HashMap<(usize, Vec<T>), bool>,
}

impl<T: Tally> ScoringSearch<'_, T> {
    fn child(&self, scores: &[T], ballot: &Ballot, w: &T) -> Vec<T> {
        let mut next = scores.to_vec();
        for (pos, &c) in ballot.ranking().iter().enumerate() {
            next[c].add_scaled(w, self.alpha[pos]);
        }
        next
    }

    fn leaf(&self, scores: &[T]) -> bool {
        let best = scores.iter().max().expect("nonempty candidate set");
        self.criterion
            .met((0..scores.len()).filter(|&c| &scores[c] == best))
    }

    fn value(&mut self, depth: usize, scores: Vec<T>) -> Result<bool, OracleError> {
        self.budget.tick()?;
        if depth == self.plies.len() {
            return Ok(self.leaf(&scores));
        }
        let key = (depth, scores);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let scores = &key.1;
        let (mover, w) = self.plies[depth].clone();
        let v = match mover {
            Mover::Fixed(b) => self.value(depth + 1, self.child(scores, &b, &w))?,
            Mover::Exists => {
                let mut any = false;
                for b in self.ballots {
                    if self.value(depth + 1, self.child(scores, b, &w))? {
                        any = true;
                        break;
                    }
                }
                any
            }
            Mover::Forall => {
                let mut all = true;
                for b in self.ballots {
                    if !self.value(depth + 1, self.child(scores, b, &w))? {
                        all = false;
                        break;
                    }
                }
                all
            }
        };
        self.memo.insert(key, v);
        Ok(v)
    }
}

struct TieredSearch<'a> {
    candidates: &'a [Name],
    plies: &'a [Ply],
    ballots: &'a [Ballot],
    criterion: &'a Criterion,
    budget: &'a Budget,
}

impl TieredSearch<'_> {
    fn value(&self, depth: usize, cast: &mut Vec<(Name, Ballot)>) -> Result<bool, OracleError> {
        self.budget.tick()?;
        if depth == self.plies.len() {
            return Ok(self.criterion.met(tiered_winners(self.candidates, cast)));
        }
        let ply = &self.plies[depth];
        let try_move = |b: &Ballot, cast: &mut Vec<(Name, Ballot)>| {
            cast.push((ply.voter.name.clone(), b.clone()));
            let v = self.value(depth + 1, cast);
            cast.pop();
            v
        };
        match &ply.mover {
            Mover::Fixed(b) => try_move(b, cast),
            Mover::Exists => {
                for b in self.ballots {
                    if try_move(b, cast)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Mover::Forall => {
                for b in self.ballots {
                    if !try_move(b, cast)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

impl Game<'_> {
    fn m(&self) -> usize {
        self.candidates.len()
    }

    /// Values of the subgames after each candidate root move, or `None` when
    /// there is no ply left to play.
    fn root_values(
        &self,
        config: &OracleConfig,
        budget: &Budget,
    ) -> Result<Option<Vec<(Ballot, bool)>>, OracleError> {
        let Some(first) = self.plies.first() else {
            return Ok(None);
        };
        let all = Ballot::all(self.m());
        let moves: Vec<Ballot> = match &first.mover {
            Mover::Fixed(b) => vec![b.clone()],
            _ => all.clone(),
        };
        let eval = |b: &Ballot| -> Result<(Ballot, bool), OracleError> {
            let mut past = self.past.to_vec();
            past.push((first.voter.clone(), b.clone()));
            let sub = Game {
                candidates: self.candidates,
                past: &past,
                plies: self.plies[1..].to_vec(),
                criterion: self.criterion.clone(),
                rule: self.rule,
            };
            Ok((b.clone(), sub.evaluate_with(&all, budget)?))
        };
        let results: Vec<Result<(Ballot, bool), OracleError>> = if config.parallel {
            moves.par_iter().map(eval).collect()
        } else {
            moves.iter().map(eval).collect()
        };
        results.into_iter().collect::<Result<Vec<_>, _>>().map(Some)
    }

    fn evaluate(&self, config: &OracleConfig) -> Result<bool, OracleError> {
        let budget = Budget::new(config.node_cap);
        if config.parallel && self.plies.len() > 1 {
            let values = self.root_values(config, &budget)?.expect("plies nonempty");
            let mut it = values.into_iter().map(|(_, v)| v);
            return Ok(match self.plies[0].mover {
                Mover::Forall => it.all(|v| v),
                _ => it.any(|v| v),
            });
        }
        self.evaluate_with(&Ballot::all(self.m()), &budget)
    }

    fn evaluate_with(&self, ballots: &[Ballot], budget: &Budget) -> Result<bool, OracleError> {
        match self.rule {
            RuleId::Tiered => {
                let search = TieredSearch {
                    candidates: self.candidates,
                    plies: &self.plies,
                    ballots,
                    criterion: &self.criterion,
                    budget,
                };
                let mut cast: Vec<(Name, Ballot)> = self
                    .past
                    .iter()
                    .map(|(v, b)| (v.name.clone(), b.clone()))
                    .collect();
                search.value(0, &mut cast)
            }
            rule => {
                let alpha = scoring_vector(rule, self.m())?;
                let total: BigUint = self
                    .past
                    .iter()
                    .map(|(v, _)| &v.weight)
                    .chain(self.plies.iter().map(|p| &p.voter.weight))
                    .sum();
                let top = alpha.points().first().copied().unwrap_or(0);
                if (total * top).to_u64().is_some() {
                    self.scoring_search::<u64>(alpha.points(), ballots, budget)
                } else {
                    self.scoring_search::<BigUint>(alpha.points(), ballots, budget)
                }
            }
        }
    }

    fn scoring_search<T: Tally>(
        &self,
        alpha: &[u64],
        ballots: &[Ballot],
        budget: &Budget,
    ) -> Result<bool, OracleError> {
        let mut search = ScoringSearch::<T> {
            alpha,
            plies: self
                .plies
                .iter()
                .map(|p| (p.mover.clone(), T::from_big(&p.voter.weight)))
                .collect(),
            ballots,
            criterion: &self.criterion,
            budget,
            memo: HashMap::new(),
        };
        let mut scores = vec![T::zero(); self.m()];
        for (v, b) in self.past {
            let w = T::from_big(&v.weight);
            for (pos, &c) in b.ranking().iter().enumerate() {
                scores[c].add_scaled(&w, alpha[pos]);
            }
        }
        search.value(0, scores)
    }
}

/// Exact game-tree oracle.
#[derive(Clone, Debug, Default)]
pub struct GameOracle {
    pub config: OracleConfig,
}

impl GameOracle {
    pub fn new(config: OracleConfig) -> Self {
        GameOracle { config }
    }

    fn game<'a>(&self, oms: &'a Oms, rule: &'a RuleId, variant: &ProblemVariant) -> Game<'a> {
        let snap = &oms.snapshot;
        let mut plies = Vec::with_capacity(1 + snap.future.len());
        let mut first = Ply::of(&snap.current);
        if let Some(b) = &snap.current_ballot {
            first.mover = Mover::Fixed(b.clone());
        }
        plies.push(first);
        plies.extend(snap.future.iter().map(Ply::of));
        Game {
            candidates: &oms.candidates,
            past: &snap.past,
            plies,
            criterion: Criterion::new(&oms.sigma, oms.distinguished, variant),
            rule,
        }
    }

    /// Can the coalition force success from this setting?
    pub fn decide_online(
        &self,
        oms: &Oms,
        rule: &RuleId,
        variant: &ProblemVariant,
    ) -> Result<bool, OracleError> {
        oms.check(variant)?;
        self.game(oms, rule, variant).evaluate(&self.config)
    }

    /// The current voter's ballots after which success can still be forced.
    pub fn winning_moves(
        &self,
        oms: &Oms,
        rule: &RuleId,
        variant: &ProblemVariant,
    ) -> Result<Vec<Ballot>, OracleError> {
        oms.check(variant)?;
        let budget = Budget::new(self.config.node_cap);
        let values = self
            .game(oms, rule, variant)
            .root_values(&self.config, &budget)?
            .expect("current voter always present");
        Ok(values.into_iter().filter(|(_, v)| *v).map(|(b, _)| b).collect())
    }

    /// One bit per candidate in declaration order: the answer with that
    /// candidate as the distinguished one.
    pub fn full_profile(
        &self,
        oms: &Oms,
        rule: &RuleId,
        variant: &ProblemVariant,
    ) -> Result<Vec<bool>, OracleError> {
        (0..oms.num_candidates())
            .map(|d| self.decide_online(&oms.with_distinguished(d), rule, variant))
            .collect()
    }

    /// Can the coalition force success whatever order the remaining voters
    /// come in?
    pub fn decide_schedule_robust(
        &self,
        state: &ScheduleFreeState,
        rule: &RuleId,
        variant: &ProblemVariant,
        method: ScheduleMethod,
    ) -> Result<bool, OracleError> {
        let state = state.clone().validate(variant)?;
        let criterion = Criterion::new(&state.sigma, state.distinguished, variant);
        let run = |order: &[&Voter]| {
            Game {
                candidates: &state.candidates,
                past: &state.past,
                plies: order.iter().map(|v| Ply::of(v)).collect(),
                criterion: criterion.clone(),
                rule,
            }
            .evaluate(&self.config)
        };
        match method {
            ScheduleMethod::ManipulatorsFirst => {
                let (mut order, rest): (Vec<&Voter>, Vec<&Voter>) =
                    state.remaining.iter().partition(|v| v.is_manipulator());
                order.extend(rest);
                run(&order)
            }
            ScheduleMethod::Exhaustive => {
                for perm in permutations(state.remaining.len()) {
                    let order: Vec<&Voter> = perm.iter().map(|&i| &state.remaining[i]).collect();
                    if !run(&order)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    Ballot::all(n).into_iter().map(|b| b.ranking().to_vec()).collect()
}

/// [`GameOracle::decide_online`] with the default configuration.
pub fn decide_online(oms: &Oms, rule: &RuleId, variant: &ProblemVariant) -> Result<bool, OracleError> {
    GameOracle::default().decide_online(oms, rule, variant)
}

/// [`GameOracle::full_profile`] with the default configuration.
pub fn full_profile(
    oms: &Oms,
    rule: &RuleId,
    variant: &ProblemVariant,
) -> Result<Vec<bool>, OracleError> {
    GameOracle::default().full_profile(oms, rule, variant)
}

/// [`GameOracle::decide_schedule_robust`] with the default configuration.
pub fn decide_schedule_robust(
    state: &ScheduleFreeState,
    rule: &RuleId,
    variant: &ProblemVariant,
    method: ScheduleMethod,
) -> Result<bool, OracleError> {
    GameOracle::default().decide_schedule_robust(state, rule, variant, method)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::{Snapshot, Target};
    use crate::rules::{election_winners, ScoringVector};

    fn names(ns: &[&str]) -> Vec<Name> {
        ns.iter().map(|&n| Name::from(n)).collect()
    }

    /// Plurality over {a, b}, sigma a > b, d = a, one past vote each.
    fn ab(future: Vec<Voter>) -> Oms {
        Oms {
            candidates: names(&["a", "b"]),
            snapshot: Snapshot::new(
                vec![
                    (Voter::nonmanipulator("p1", 1u32), Ballot::new(vec![0, 1])),
                    (Voter::nonmanipulator("p2", 1u32), Ballot::new(vec![1, 0])),
                ],
                Voter::manipulator("u", 1u32),
                future,
            ),
            sigma: Ballot::new(vec![0, 1]),
            distinguished: 0,
        }
    }

    #[test]
    fn last_manipulator_wins_outright() {
        let v = ProblemVariant::default();
        assert!(decide_online(&ab(vec![]), &RuleId::plurality(), &v).unwrap());
    }

    #[test]
    fn heavier_nonmanipulator_afterwards_defeats_it() {
        let v = ProblemVariant::default();
        let oms = ab(vec![Voter::nonmanipulator("n", 2u32)]);
        assert!(!decide_online(&oms, &RuleId::plurality(), &v).unwrap());
    }

    #[test]
    fn everyone_wins_profile() {
        let oms = ab(vec![]);
        let flat = RuleId::Scoring(ScoringVector::new(vec![1, 1]).unwrap());
        assert_eq!(
            full_profile(&oms, &flat, &ProblemVariant::default()).unwrap(),
            vec![true, true]
        );
    }

    #[test]
    fn budget_is_enforced() {
        let oracle = GameOracle::new(OracleConfig {
            node_cap: 5,
            parallel: false,
        });
        let oms = ab(vec![Voter::nonmanipulator("n", 2u32), Voter::manipulator("w", 1u32)]);
        assert_eq!(
            oracle.decide_online(&oms, &RuleId::plurality(), &ProblemVariant::default()),
            Err(OracleError::SearchBudgetExceeded { cap: 5 })
        );
    }

    #[test]
    fn freeform_fixed_and_universal_current_voter() {
        let v = ProblemVariant::default().freeform();
        let mut oms = ab(vec![Voter::manipulator("w", 1u32)]);
        oms.snapshot.current.role = crate::election::Role::Nonmanipulator;
        // the nonmanipulator may vote b; w then votes a to tie 2:2
        assert!(decide_online(&oms, &RuleId::plurality(), &v).unwrap());
        // pinpoint for b after a fixed vote for a: 2:1, w can only tie at best
        let mut fixed = oms.clone();
        fixed.snapshot.current_ballot = Some(Ballot::new(vec![0, 1]));
        fixed.distinguished = 1;
        let pin = v.clone().pinpoint();
        assert!(decide_online(&fixed, &RuleId::plurality(), &pin).unwrap());
        let mut heavy = fixed.clone();
        heavy.snapshot.current.weight = BigUint::from(2u32);
        assert!(!decide_online(&heavy, &RuleId::plurality(), &pin).unwrap());
    }

    #[test]
    fn empty_winner_sets() {
        let c = Criterion::new(&Ballot::new(vec![0, 1]), 0, &ProblemVariant::default());
        assert!(!c.met([]));
        let c = Criterion::new(
            &Ballot::new(vec![0, 1]),
            1,
            &ProblemVariant::default().destructive(),
        );
        assert!(c.met([]));
        assert!(c.met([0]));
        assert!(!c.met([0, 1]));
        let uw = Criterion::new(
            &Ballot::new(vec![0, 1]),
            0,
            &ProblemVariant::default().destructive().unique(),
        );
        assert!(uw.met([0, 1]));
        assert!(!uw.met([1]));
    }

    #[test]
    fn parallel_root_agrees() {
        let par = GameOracle::new(OracleConfig {
            parallel: true,
            ..Default::default()
        });
        let seq = GameOracle::default();
        let oms = Oms {
            candidates: names(&["a", "b", "c"]),
            snapshot: Snapshot::new(
                vec![(Voter::nonmanipulator("p", 2u32), Ballot::new(vec![2, 1, 0]))],
                Voter::manipulator("u", 1u32),
                vec![Voter::nonmanipulator("n", 1u32), Voter::manipulator("w", 1u32)],
            ),
            sigma: Ballot::new(vec![0, 1, 2]),
            distinguished: 1,
        };
        for rule in [RuleId::plurality(), RuleId::veto(), RuleId::KApproval(2)] {
            for v in [ProblemVariant::default(), ProblemVariant::default().unique()] {
                for d in 0..3 {
                    let o = oms.with_distinguished(d);
                    let a = seq.decide_online(&o, &rule, &v).unwrap();
                    for _ in 0..3 {
                        assert_eq!(par.decide_online(&o, &rule, &v).unwrap(), a);
                    }
                }
            }
        }
    }

    #[test]
    fn single_last_manipulator_is_classic_manipulation() {
        // direct check: does some ballot of the last voter make d a winner?
        let c = names(&["a", "b", "c"]);
        let past = vec![
            (Voter::nonmanipulator("p1", 2u32), Ballot::new(vec![1, 0, 2])),
            (Voter::nonmanipulator("p2", 1u32), Ballot::new(vec![2, 0, 1])),
        ];
        for rule in [RuleId::plurality(), RuleId::veto()] {
            for top in 0..3 {
                let sigma = Ballot::new(
                    std::iter::once(top).chain((0..3).filter(|&x| x != top)).collect(),
                );
                for w in 0u32..4 {
                    let u = Voter::manipulator("u", w);
                    let oms = Oms {
                        candidates: c.clone(),
                        snapshot: Snapshot::new(past.clone(), u.clone(), vec![]),
                        sigma: sigma.clone(),
                        distinguished: top,
                    };
                    let direct = Ballot::all(3).into_iter().any(|b| {
                        let mut cast = past.clone();
                        cast.push((u.clone(), b));
                        election_winners(&rule, &c, &cast).unwrap().contains(&top)
                    });
                    let v = ProblemVariant {
                        target: Target::Pinpoint,
                        ..Default::default()
                    };
                    assert_eq!(decide_online(&oms, &rule, &v).unwrap(), direct);
                }
            }
        }
    }
}
