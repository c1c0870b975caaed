//! Instance generators for the hard cases, each paired with a brute-force
//! checker for the source problem.

mod cnf;
mod maxsat;
mod partition;
mod qbf;
mod wagner;

use num_bigint::BigUint;
use thiserror::Error;

use crate::election::{Ballot, CandidateId, Direction, Name, Oms, ProblemVariant, Snapshot, Voter};
use crate::rules::RuleId;

pub use cnf::{Clause, CnfFormula, Literal, ThreeCnfFormula};
pub use maxsat::{
    assignment_value, build_hat_formulas, gen_maxsatasg_veto_oms, in_maxsatasg_eq,
    maxsatasg_brute, to_three_cnf,
};
pub use partition::{gen_partition_plurality_uw, gen_partition_veto3, partition_brute, Flavor};
pub use qbf::{gen_qbf_oms, qbf_eval, QbfInstance};
pub use wagner::{wagner_subset_sum, SubsetSumInstance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("the coalition must not be empty")]
    EmptyCoalition,
    #[error("malformed QBF: {0}")]
    MalformedQbf(String),
    #[error("{what} exceeds the brute-force limit of {limit}")]
    TooLarge { what: &'static str, limit: usize },
    #[error("bad partition input: {0}")]
    BadPartitionInput(&'static str),
    #[error("weights have an odd sum")]
    OddSum,
    #[error("not a 3cnf formula: {0}")]
    NotThreeCnf(String),
    #[error("variable x_1 must not occur in the input formulas")]
    VariableX1Used,
    #[error("derived past-voter weight for {0} is negative")]
    NegativeDerivedWeight(&'static str),
}

/// A generated setting together with the problem it is meant to be read as.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedInstance {
    pub oms: Oms,
    pub variant: ProblemVariant,
    pub rule: RuleId,
}

fn numbered(prefix: &str, i: usize, count: usize) -> Name {
    let width = count.to_string().len();
    Name::from(format!("{prefix}{i:0width$}"))
}

/// Casts a standard coalitional manipulation instance (manipulators vote
/// last, all at once) as an online one: the fixed ballots become the past,
/// the manipulators vote in the given order, and `c` sits on top of the
/// coalition's order (constructive) or at the bottom (destructive), with
/// `d = c` either way.
pub fn embed_standard_wcm(
    candidates: Vec<Name>,
    fixed: &[(Ballot, BigUint)],
    manipulators: &[BigUint],
    c: CandidateId,
    direction: Direction,
) -> Result<Oms, ReductionError> {
    let Some((first, rest)) = manipulators.split_first() else {
        return Err(ReductionError::EmptyCoalition);
    };
    let past = fixed
        .iter()
        .enumerate()
        .map(|(i, (b, w))| {
            let name = numbered("s", i + 1, fixed.len());
            (Voter::nonmanipulator(name, w.clone()), b.clone())
        })
        .collect();
    let manip = |i: usize, w: &BigUint| Voter::manipulator(numbered("t", i, manipulators.len()), w.clone());
    let future = rest.iter().enumerate().map(|(i, w)| manip(i + 2, w)).collect();
    let others = (0..candidates.len()).filter(|&x| x != c);
    let sigma = match direction {
        Direction::Constructive => std::iter::once(c).chain(others).collect(),
        Direction::Destructive => others.chain(std::iter::once(c)).collect(),
    };
    Ok(Oms {
        candidates,
        snapshot: Snapshot::new(past, manip(1, first), future),
        sigma: Ballot::new(sigma),
        distinguished: c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::goal_set;
    use crate::oracle::decide_online;
    use std::collections::BTreeSet;

    #[test]
    fn embedding_shapes() {
        let names: Vec<Name> = ["a", "b", "c"].into_iter().map(Name::from).collect();
        assert_eq!(
            embed_standard_wcm(names.clone(), &[], &[], 0, Direction::Constructive),
            Err(ReductionError::EmptyCoalition)
        );
        let oms = embed_standard_wcm(
            names.clone(),
            &[(Ballot::new(vec![1, 0, 2]), BigUint::from(2u32))],
            &[BigUint::from(1u32), BigUint::from(1u32)],
            0,
            Direction::Constructive,
        )
        .unwrap();
        assert_eq!(oms.sigma.top(), Some(0));
        assert_eq!(oms.snapshot.future.len(), 1);
        // two unit manipulators tie b's 2 points
        assert!(decide_online(&oms, &RuleId::plurality(), &ProblemVariant::default()).unwrap());

        let oms = embed_standard_wcm(names, &[], &[BigUint::from(1u32)], 1, Direction::Destructive)
            .unwrap();
        assert_eq!(oms.sigma.bottom(), Some(1));
        assert_eq!(
            goal_set(&oms.sigma, 1, Direction::Destructive, crate::election::Target::Segment),
            BTreeSet::from([1])
        );
    }
}
