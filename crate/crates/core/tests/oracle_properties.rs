use omanip::oracle::decide_online;
use omanip::rules::election_winners;
use omanip::{
    Ballot, GameOracle, Name, Oms, OracleConfig, OracleError, ProblemVariant, RuleId, Snapshot,
    Voter,
};
use proptest::prelude::*;

fn rule_strategy() -> impl Strategy<Value = RuleId> {
    prop_oneof![
        Just(RuleId::plurality()),
        Just(RuleId::veto()),
        Just(RuleId::KApproval(2)),
    ]
}

prop_compose! {
    fn setting(max_m: usize, max_past: usize, max_rem: usize)
        (m in 2..=max_m, past in 0..=max_past, rem in 1..=max_rem)
        (past in prop::collection::vec((0..24usize, 0..4u32), past),
         rem in prop::collection::vec((any::<bool>(), 0..4u32), rem),
         sigma in 0..24usize,
         d in 0..m,
         m in Just(m))
        -> Oms
    {
        let ballots = Ballot::all(m);
        let pick = |i: usize| ballots[i % ballots.len()].clone();
        let mut voters = rem.iter().enumerate().map(|(i, &(manip, w))| {
            if manip || i == 0 {
                Voter::manipulator(format!("r{i}"), w)
            } else {
                Voter::nonmanipulator(format!("r{i}"), w)
            }
        });
        let current = voters.next().unwrap();
        Oms {
            candidates: (0..m).map(|i| Name::from(format!("c{i}"))).collect(),
            snapshot: Snapshot::new(
                past.iter()
                    .enumerate()
                    .map(|(i, &(b, w))| (Voter::nonmanipulator(format!("p{i}"), w), pick(b)))
                    .collect(),
                current,
                voters.collect(),
            ),
            sigma: pick(sigma),
            distinguished: d,
        }
    }
}

/// Does some joint ballot assignment of the remaining voters make `d` a winner?
fn some_assignment_wins(oms: &Oms, rule: &RuleId) -> bool {
    let ballots = Ballot::all(oms.num_candidates());
    let remaining: Vec<&Voter> = oms.snapshot.remaining().collect();
    let mut idx = vec![0usize; remaining.len()];
    loop {
        let mut cast = oms.snapshot.past.clone();
        cast.extend(remaining.iter().zip(&idx).map(|(v, &i)| ((*v).clone(), ballots[i].clone())));
        if election_winners(rule, &oms.candidates, &cast).unwrap().contains(&oms.distinguished) {
            return true;
        }
        let Some(pos) = idx.iter().rposition(|&i| i + 1 < ballots.len()) else {
            return false;
        };
        idx[pos] += 1;
        idx[pos + 1..].iter_mut().for_each(|i| *i = 0);
    }
}

proptest! {
    #[test]
    fn goal_sets_nest(oms in setting(4, 2, 3), rule in rule_strategy()) {
        let v = ProblemVariant::default();
        let r = oms.sigma.ranking().to_vec();
        let bits: Vec<bool> = r
            .iter()
            .map(|&d| decide_online(&oms.with_distinguished(d), &rule, &v).unwrap())
            .collect();
        for w in bits.windows(2) {
            prop_assert!(!w[0] || w[1]);
        }
    }

    #[test]
    fn all_manipulators_means_existential(mut oms in setting(3, 2, 3), rule in rule_strategy()) {
        oms.snapshot.future.iter_mut().for_each(|v| *v = Voter::manipulator(v.name.clone(), v.weight.clone()));
        oms.distinguished = oms.sigma.top().unwrap();
        let v = ProblemVariant::default().pinpoint();
        prop_assert_eq!(decide_online(&oms, &rule, &v).unwrap(), some_assignment_wins(&oms, &rule));
    }

    #[test]
    fn parallel_search_is_deterministic(oms in setting(3, 1, 4), rule in rule_strategy()) {
        let v = ProblemVariant::default();
        let seq = GameOracle::default().decide_online(&oms, &rule, &v).unwrap();
        let par = GameOracle::new(OracleConfig { parallel: true, ..OracleConfig::default() });
        for _ in 0..3 {
            prop_assert_eq!(par.decide_online(&oms, &rule, &v).unwrap(), seq);
        }
    }
}

#[test]
fn node_cap_is_reported() {
    let oms = Oms {
        candidates: (0..4).map(|i| Name::from(format!("c{i}"))).collect(),
        snapshot: Snapshot::new(
            vec![],
            Voter::manipulator("a", 1u32),
            vec![Voter::nonmanipulator("b", 1u32), Voter::manipulator("c", 1u32)],
        ),
        sigma: Ballot::identity(4),
        distinguished: 0,
    };
    let tiny = GameOracle::new(OracleConfig { node_cap: 5, parallel: false });
    let err = tiny.decide_online(&oms, &RuleId::Tiered, &ProblemVariant::default());
    assert_eq!(err, Err(OracleError::SearchBudgetExceeded { cap: 5 }));
}
