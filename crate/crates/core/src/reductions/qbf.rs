use super::{numbered, GeneratedInstance, ReductionError};
use crate::election::{Ballot, Name, Oms, ProblemVariant, Snapshot, Voter};
use crate::rules::{Formula, RuleId};

const MAX_VARS: usize = 24;

/// `∃ x_{1,*} ∀ x_{2,*} ∃ ... [matrix]`; block `i` binds
/// `x_{i,1} .. x_{i,block_sizes[i-1]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QbfInstance {
    pub block_sizes: Vec<usize>,
    pub matrix: Formula,
}

impl QbfInstance {
    /// Checks that every matrix variable is bound and every block occurs.
    pub fn new(block_sizes: Vec<usize>, matrix: Formula) -> Result<Self, ReductionError> {
        let vars = matrix.vars();
        if block_sizes.is_empty() {
            return Err(ReductionError::MalformedQbf("no quantifier blocks".into()));
        }
        for &(i, j) in &vars {
            if i == 0 || i > block_sizes.len() || j == 0 || j > block_sizes[i - 1] {
                return Err(ReductionError::MalformedQbf(format!("x_{{{i},{j}}} is not bound")));
            }
        }
        if let Some(i) = (1..=block_sizes.len()).find(|&i| !vars.iter().any(|v| v.0 == i)) {
            return Err(ReductionError::MalformedQbf(format!("block {i} does not occur")));
        }
        Ok(QbfInstance { block_sizes, matrix })
    }

    pub fn num_vars(&self) -> usize {
        self.block_sizes.iter().sum()
    }
}

/// Truth of a QBF by expanding every quantifier.
pub fn qbf_eval(q: &QbfInstance) -> Result<bool, ReductionError> {
    if q.num_vars() > MAX_VARS {
        return Err(ReductionError::TooLarge {
            what: "number of QBF variables",
            limit: MAX_VARS,
        });
    }
    let mut values: Vec<Vec<bool>> = q.block_sizes.iter().map(|&k| vec![false; k]).collect();
    Ok(expand(q, 0, 0, &mut values))
}

fn expand(q: &QbfInstance, block: usize, j: usize, values: &mut Vec<Vec<bool>>) -> bool {
    if block == q.block_sizes.len() {
        return q.matrix.eval(&|i, j| values[i - 1][j - 1]);
    }
    if j == q.block_sizes[block] {
        return expand(q, block + 1, 0, values);
    }
    let exists = block.is_multiple_of(2);
    let branch = |v: bool, values: &mut Vec<Vec<bool>>| {
        values[block][j] = v;
        expand(q, block, j + 1, values)
    };
    if exists {
        branch(false, values) || branch(true, values)
    } else {
        branch(false, values) && branch(true, values)
    }
}

/// The tiered-rule instance whose least candidate spells the matrix.
///
/// Dummy candidates are the matrix name followed by `~` and a zero-padded
/// index, so they all sort after it. Voter `i` owns block `i`; odd voters
/// manipulate. The coalition prefers smaller names, so the matrix candidate is on top.
pub fn gen_qbf_oms(q: &QbfInstance) -> Result<GeneratedInstance, ReductionError> {
    let q = QbfInstance::new(q.block_sizes.clone(), q.matrix.clone())?;
    let c = q.matrix.to_string();
    let dummies = 2 * q.block_sizes.iter().copied().max().unwrap_or(0);
    let mut candidates = vec![Name::from(c.clone())];
    candidates.extend((1..=dummies).map(|i| numbered(&format!("{c}~"), i, dummies)));
    let blocks = q.block_sizes.len();
    let mut voters = (1..=blocks).map(|i| {
        let name = numbered("v", i, blocks);
        if i % 2 == 1 {
            Voter::manipulator(name, 1u32)
        } else {
            Voter::nonmanipulator(name, 1u32)
        }
    });
    let current = voters.next().expect("at least one block");
    let mut sigma: Vec<usize> = (0..candidates.len()).collect();
    sigma.sort_by(|&a, &b| candidates[a].cmp(&candidates[b]));
    let oms = Oms {
        candidates,
        snapshot: Snapshot::new(vec![], current, voters.collect()),
        sigma: Ballot::new(sigma),
        distinguished: 0,
    };
    Ok(GeneratedInstance {
        oms,
        variant: ProblemVariant::default().unweighted(),
        rule: RuleId::Tiered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::decide_online;

    fn q(blocks: Vec<usize>, s: &str) -> QbfInstance {
        QbfInstance::new(blocks, Formula::parse(s.as_bytes()).unwrap()).unwrap()
    }

    fn both(q: &QbfInstance) -> (bool, bool) {
        let g = gen_qbf_oms(q).unwrap();
        (qbf_eval(q).unwrap(), decide_online(&g.oms, &g.rule, &g.variant).unwrap())
    }

    #[test]
    fn evaluator() {
        assert!(qbf_eval(&q(vec![1], "x_{1,1}")).unwrap());
        assert!(!qbf_eval(&q(vec![1], "x_{1,1}&!x_{1,1}")).unwrap());
        assert!(qbf_eval(&q(vec![1, 1], "x_{1,1}|x_{2,1}")).unwrap());
        assert!(!qbf_eval(&q(vec![1, 1], "x_{1,1}&x_{2,1}")).unwrap());
        assert!(qbf_eval(&q(vec![1, 1], "x_{1,1}|!x_{2,1}&x_{2,1}")).unwrap());
    }

    #[test]
    fn malformed() {
        let f = Formula::parse(b"x_{2,1}").unwrap();
        assert!(matches!(QbfInstance::new(vec![1, 1], f.clone()), Err(ReductionError::MalformedQbf(_))));
        assert!(matches!(QbfInstance::new(vec![1], f), Err(ReductionError::MalformedQbf(_))));
        let f = Formula::parse(b"x_{1,3}").unwrap();
        assert!(QbfInstance::new(vec![2], f).is_err());
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(both(&q(vec![1], "x_{1,1}")), (true, true));
        assert_eq!(both(&q(vec![1, 1], "x_{1,1}&x_{2,1}")), (false, false));
        assert_eq!(both(&q(vec![1, 1], "x_{1,1}|x_{2,1}")), (true, true));
        assert_eq!(both(&q(vec![2, 1], "(x_{1,1}|x_{1,2})&!x_{2,1}")), (false, false));
        assert_eq!(both(&q(vec![1, 1], "x_{1,1}|!x_{2,1}|x_{2,1}")), (true, true));
    }

    #[test]
    fn generated_shape() {
        let g = gen_qbf_oms(&q(vec![2, 1, 1], "x_{1,2}&x_{2,1}&x_{3,1}")).unwrap();
        assert_eq!(g.oms.candidates.len(), 5);
        assert_eq!(g.oms.sigma.top(), Some(0));
        assert!(g.oms.candidates[1..].iter().all(|n| n > &g.oms.candidates[0]));
        assert_eq!(g.oms.snapshot.future.len(), 2);
        assert!(g.oms.snapshot.current.is_manipulator());
        assert!(!g.oms.snapshot.future[0].is_manipulator());
        assert!(g.oms.snapshot.future[1].is_manipulator());
    }
}
