//! Equality of lexicographically largest satisfying assignments, reduced to
//! four-candidate weighted veto.
//!
//! Assignments are bit strings with `x_1` as the most significant bit.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed};

use super::cnf::{Clause, CnfFormula, Literal, ThreeCnfFormula};
use super::wagner::wagner_subset_sum;
use super::{GeneratedInstance, ReductionError};
use crate::election::{Ballot, Name, Oms, ProblemVariant, Snapshot, Voter};
use crate::rules::RuleId;

const MAX_VARS: usize = 22;

/// Binary value of an assignment, first variable most significant.
pub fn assignment_value(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| acc << 1 | u64::from(b))
}

/// The largest satisfying assignment, scanning from all-true downward.
pub fn maxsatasg_brute(f: &CnfFormula) -> Result<Option<Vec<bool>>, ReductionError> {
    let n = f.num_vars;
    if n > MAX_VARS {
        return Err(ReductionError::TooLarge {
            what: "number of variables",
            limit: MAX_VARS,
        });
    }
    Ok((0..1u64 << n).rev().find_map(|a| {
        let bits: Vec<bool> = (0..n).map(|i| a >> (n - 1 - i) & 1 == 1).collect();
        f.eval(&bits).then_some(bits)
    }))
}

fn with_horizon(f: &ThreeCnfFormula, n: usize) -> CnfFormula {
    CnfFormula {
        num_vars: n,
        clauses: f.clauses().to_vec(),
    }
}

/// Are both formulas satisfiable with the same largest assignment over the
/// common variable range?
pub fn in_maxsatasg_eq(phi: &ThreeCnfFormula, psi: &ThreeCnfFormula) -> Result<bool, ReductionError> {
    let n = phi.num_vars().max(psi.num_vars());
    let a = maxsatasg_brute(&with_horizon(phi, n))?;
    let b = maxsatasg_brute(&with_horizon(psi, n))?;
    Ok(a.is_some() && a == b)
}

/// Clause-by-clause conversion to 3cnf.
///
/// Repeated literals are merged and tautologies dropped. Short clauses are
/// padded by repeating a literal; a clause `l_1 .. l_k` with `k > 3` becomes
/// `(l_1 l_2 y_1) (!y_1 l_3 y_2) .. (!y_{k-3} l_{k-1} l_k)` with fresh
/// variables numbered from `num_vars + 1` in clause order. The result keeps
/// `xi`'s satisfying assignments exactly as projections.
pub fn to_three_cnf(xi: &CnfFormula) -> ThreeCnfFormula {
    let mut next = xi.num_vars + 1;
    let mut out = Vec::new();
    for cl in &xi.clauses {
        let mut seen = BTreeSet::new();
        let lits: Vec<Literal> = cl.0.iter().copied().filter(|l| seen.insert(*l)).collect();
        if lits.iter().any(|l| seen.contains(&l.negated())) {
            continue;
        }
        match lits.len() {
            0 => {
                // unsatisfiable: (y) & (!y)
                let y = Literal::pos(next);
                next += 1;
                out.push(Clause(vec![y; 3]));
                out.push(Clause(vec![y.negated(); 3]));
            }
            1 => out.push(Clause(vec![lits[0]; 3])),
            2 => out.push(Clause(vec![lits[0], lits[1], lits[1]])),
            3 => out.push(Clause(lits)),
            k => {
                let mut y = Literal::pos(next);
                next += 1;
                out.push(Clause(vec![lits[0], lits[1], y]));
                for &l in &lits[2..k - 2] {
                    let fresh = Literal::pos(next);
                    next += 1;
                    out.push(Clause(vec![y.negated(), l, fresh]));
                    y = fresh;
                }
                out.push(Clause(vec![y.negated(), lits[k - 2], lits[k - 1]]));
            }
        }
    }
    ThreeCnfFormula::new(CnfFormula {
        num_vars: next - 1,
        clauses: out,
    })
    .expect("every clause has three literals")
}

/// `(phi_hat, psi_hat)`: `psi_hat = g(phi | psi | !x_1)` and
/// `phi_hat = phi & psi & (x_1) & (x_N | !x_N)` with `N` the variable count of
/// `psi_hat`, which is forced above the input's.
pub fn build_hat_formulas(
    phi: &ThreeCnfFormula,
    psi: &ThreeCnfFormula,
) -> Result<(ThreeCnfFormula, ThreeCnfFormula), ReductionError> {
    if phi.cnf().uses_var(1) || psi.cnf().uses_var(1) {
        return Err(ReductionError::VariableX1Used);
    }
    let n = phi.num_vars().max(psi.num_vars()).max(1);
    let mut disjunction = Vec::new();
    for a in phi.clauses() {
        for b in psi.clauses() {
            let mut lits = a.0.clone();
            lits.extend(&b.0);
            lits.push(Literal::neg(1));
            disjunction.push(Clause(lits));
        }
    }
    let psi_hat = to_three_cnf(&CnfFormula {
        num_vars: n,
        clauses: disjunction,
    });
    let n_hat = psi_hat.num_vars().max(n + 1);
    let psi_hat = ThreeCnfFormula::new(CnfFormula {
        num_vars: n_hat,
        clauses: psi_hat.clauses().to_vec(),
    })?;
    let mut clauses: Vec<Clause> = phi.clauses().to_vec();
    clauses.extend(psi.clauses().iter().cloned());
    clauses.push(Clause(vec![Literal::pos(1); 3]));
    let top = Literal::pos(n_hat);
    clauses.push(Clause(vec![top, top, top.negated()]));
    let phi_hat = ThreeCnfFormula::new(CnfFormula {
        num_vars: n_hat,
        clauses,
    })?;
    Ok((phi_hat, psi_hat))
}

/// Four candidates `a > b > c > d`, distinguished `b`. The manipulators
/// carry the subset-sum items of `phi_hat`, the nonmanipulators after them
/// those of `psi_hat`; four past voters set the veto offsets.
pub fn gen_maxsatasg_veto_oms(
    phi: &ThreeCnfFormula,
    psi: &ThreeCnfFormula,
) -> Result<GeneratedInstance, ReductionError> {
    let (phi_hat, psi_hat) = build_hat_formulas(phi, psi)?;
    let n_hat = phi_hat.num_vars();
    let mine = wagner_subset_sum(&phi_hat);
    let theirs = wagner_subset_sum(&psi_hat);
    let int = |x: &BigUint| BigInt::from(x.clone());
    let (l, l2) = (int(&mine.base), int(&theirs.base));
    let slack = BigInt::from(2u32) * ((BigInt::one() << n_hat) - 1);
    let sum = |items: &[BigUint]| items.iter().map(int).sum::<BigInt>();
    let veto_b = &l + BigInt::from(2u32) * &l2 + &slack - sum(&theirs.items);
    let veto_d = &l2 + BigInt::from(2u32) * &l + &slack - sum(&mine.items);
    let nonneg = |x: BigInt, who: &'static str| {
        if x.is_negative() {
            Err(ReductionError::NegativeDerivedWeight(who))
        } else {
            Ok(x.magnitude().clone())
        }
    };
    let candidates: Vec<Name> = ["a", "b", "c", "d"].into_iter().map(Name::from).collect();
    let vetoing = |c: usize| {
        let mut r: Vec<usize> = (0..4).filter(|&x| x != c).collect();
        r.push(c);
        Ballot::new(r)
    };
    let past = vec![
        (Voter::nonmanipulator("p1", mine.base.clone()), vetoing(0)),
        (Voter::nonmanipulator("p2", nonneg(veto_b, "the voter vetoing b")?), vetoing(1)),
        (Voter::nonmanipulator("p3", theirs.base.clone()), vetoing(2)),
        (Voter::nonmanipulator("p4", nonneg(veto_d, "the voter vetoing d")?), vetoing(3)),
    ];
    let mut pending: Vec<Voter> = mine
        .items
        .iter()
        .enumerate()
        .map(|(i, k)| Voter::manipulator(format!("u{}", i + 1), k.clone()))
        .collect();
    pending.extend(
        theirs
            .items
            .iter()
            .enumerate()
            .map(|(i, k)| Voter::nonmanipulator(format!("w{}", i + 1), k.clone())),
    );
    let current = pending.remove(0);
    Ok(GeneratedInstance {
        oms: Oms {
            candidates,
            snapshot: Snapshot::new(past, current, pending),
            sigma: Ballot::identity(4),
            distinguished: 1,
        },
        variant: ProblemVariant::default(),
        rule: RuleId::veto(),
    })
}
