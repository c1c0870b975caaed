//! Weighted veto: threshold algorithms over an exact covering search.
//!
//! A candidate's *maxscore* is her score if no voter from the current one
//! onward vetoes her. A group of voters holds a candidate to at most `t`
//! points when the weight vetoing her is at least `maxscore - t`.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::election::{Oms, ProblemVariant, WinnerModel};
use crate::poly::SolverError;

/// Weights to be split into disjoint groups, one per demand; group `j`
/// must sum to at least `demands[j]`. Weights may be left unused.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringInstance {
    pub weights: Vec<BigUint>,
    pub demands: Vec<BigUint>,
}

impl CoveringInstance {
    pub fn feasible(&self) -> bool {
        partition_feasible(&self.weights, &self.demands)
    }
}

fn subset_sums(ws: &[BigUint]) -> Vec<BigUint> {
    let mut sums = vec![BigUint::zero()];
    for w in ws {
        let more: Vec<BigUint> = sums.iter().map(|s| s + w).collect();
        sums.extend(more);
    }
    sums.sort();
    sums.dedup();
    sums
}

/// Is there a sub-multiset of `weights` whose sum lies in `[lo, hi]`?
pub fn subset_sum_in_range(weights: &[BigUint], lo: &BigInt, hi: &BigInt) -> bool {
    let lo = if lo.sign() == num_bigint::Sign::Minus {
        BigUint::zero()
    } else {
        lo.magnitude().clone()
    };
    if hi.sign() == num_bigint::Sign::Minus {
        return false;
    }
    let hi = hi.magnitude();
    if &lo > hi {
        return false;
    }
    let (left, right) = weights.split_at(weights.len() / 2);
    let right = subset_sums(right);
    subset_sums(left).into_iter().any(|l| {
        if &l > hi {
            return false;
        }
        let need = if l >= lo { BigUint::zero() } else { &lo - &l };
        let i = right.partition_point(|r| r < &need);
        i < right.len() && &(&right[i] + &l) <= hi
    })
}

/// Can the weights be split into disjoint groups, group `j` summing to at
/// least `demands[j]`?
pub fn partition_feasible(weights: &[BigUint], demands: &[BigUint]) -> bool {
    let mut demands: Vec<BigUint> = demands.iter().filter(|d| !d.is_zero()).cloned().collect();
    let total: BigUint = weights.iter().sum();
    let need: BigUint = demands.iter().sum();
    if need > total {
        return false;
    }
    match demands.len() {
        0 | 1 => true,
        2 => {
            let hi = BigInt::from(total) - BigInt::from(demands[1].clone());
            subset_sum_in_range(weights, &BigInt::from(demands[0].clone()), &hi)
        }
        _ => {
            let mut ws = weights.to_vec();
            ws.sort_unstable_by(|a, b| b.cmp(a));
            demands.sort_unstable_by(|a, b| b.cmp(a));
            let mut suffix = vec![BigUint::zero(); ws.len() + 1];
            for i in (0..ws.len()).rev() {
                suffix[i] = &suffix[i + 1] + &ws[i];
            }
            cover(&ws, &suffix, 0, &mut demands, need)
        }
    }
}

fn cover(
    ws: &[BigUint],
    suffix: &[BigUint],
    i: usize,
    open: &mut [BigUint],
    need: BigUint,
) -> bool {
    if need.is_zero() {
        return true;
    }
    if i == ws.len() || suffix[i] < need {
        return false;
    }
    let w = &ws[i];
    for j in 0..open.len() {
        if open[j].is_zero() || open[..j].contains(&open[j]) {
            continue;
        }
        let before = open[j].clone();
        let used = std::cmp::min(&before, w).clone();
        open[j] = &before - &used;
        let ok = cover(ws, suffix, i + 1, open, &need - &used);
        open[j] = before;
        if ok {
            return true;
        }
    }
    cover(ws, suffix, i + 1, open, need)
}

/// Least `t` such that the weights can hold every target to `t` points.
pub fn min_threshold(weights: &[BigUint], maxscores: &[BigUint]) -> BigUint {
    let feasible = |t: &BigUint| {
        let demands: Vec<BigUint> = maxscores
            .iter()
            .map(|s| if s > t { s - t } else { BigUint::zero() })
            .collect();
        partition_feasible(weights, &demands)
    };
    let mut lo = BigUint::zero();
    let mut hi = maxscores.iter().max().cloned().unwrap_or_default();
    debug_assert!(feasible(&hi));
    while lo < hi {
        let mid = (&lo + &hi) >> 1u32;
        if feasible(&mid) {
            hi = mid;
        } else {
            lo = mid + 1u32;
        }
    }
    lo
}

fn require(oms: &Oms, variant: &ProblemVariant) -> Result<(), SolverError> {
    oms.check(variant)?;
    if variant.freeform {
        return Err(SolverError::WrongVariant("freeform instances need the oracle"));
    }
    if variant.winner_model != WinnerModel::Nonunique {
        return Err(SolverError::WrongVariant("unique-winner veto needs the oracle"));
    }
    if !variant.is_standard_constructive() {
        return Err(SolverError::WrongVariant("needs constructive segment target"));
    }
    Ok(())
}

/// Per-candidate maxscores plus the remaining weights split by role.
fn veto_state(oms: &Oms) -> (Vec<BigUint>, Vec<BigUint>, Vec<BigUint>) {
    let m = oms.num_candidates();
    let manip: Vec<BigUint> = oms
        .snapshot
        .remaining()
        .filter(|v| v.is_manipulator())
        .map(|v| v.weight.clone())
        .collect();
    let nonmanip: Vec<BigUint> = oms
        .snapshot
        .remaining()
        .filter(|v| !v.is_manipulator())
        .map(|v| v.weight.clone())
        .collect();
    let remaining: BigUint = manip.iter().chain(&nonmanip).sum();
    let mut maxscore = vec![remaining; m];
    for (v, b) in &oms.snapshot.past {
        for &c in &b.ranking()[..m - 1] {
            maxscore[c] += &v.weight;
        }
    }
    (maxscore, manip, nonmanip)
}

/// Weighted veto, constructive, by comparing two covering thresholds: how
/// low the manipulators can hold the disliked candidates against how low
/// the nonmanipulators can hold the liked ones.
pub fn decide_veto_weighted(oms: &Oms, variant: &ProblemVariant) -> Result<bool, SolverError> {
    require(oms, variant)?;
    let (maxscore, manip, nonmanip) = veto_state(oms);
    let pos = oms.sigma.position(oms.distinguished).expect("validated");
    let r = oms.sigma.ranking();
    let pick = |ids: &[usize]| ids.iter().map(|&c| maxscore[c].clone()).collect::<Vec<_>>();
    let t1 = min_threshold(&manip, &pick(&r[pos + 1..]));
    let t2 = min_threshold(&nonmanip, &pick(&r[..=pos]));
    Ok(t1 <= t2)
}

/// Weighted veto with exactly three candidates, by a case split on the
/// position of the distinguished candidate.
pub fn decide_veto3_weighted(oms: &Oms, variant: &ProblemVariant) -> Result<bool, SolverError> {
    require(oms, variant)?;
    if oms.num_candidates() != 3 {
        return Err(SolverError::WrongVariant("needs exactly three candidates"));
    }
    let (maxscore, manip, nonmanip) = veto_state(oms);
    let r = oms.sigma.ranking();
    let (a, b, c) = (r[0], r[1], r[2]);
    let pos = oms.sigma.position(oms.distinguished).expect("validated");
    let big = |x: &BigUint| BigInt::from(x.clone());
    let m_total: BigInt = manip.iter().map(big).sum();
    let n_total: BigInt = nonmanip.iter().map(big).sum();
    let (pa, pb, pc) = (big(&maxscore[a]), big(&maxscore[b]), big(&maxscore[c]));
    Ok(match pos {
        2 => true,
        // manipulators split between vetoing b and c, nonmanipulators veto a
        0 => {
            let lo = &pb - &pa + &n_total;
            let hi = &pa - &n_total - &pc + &m_total;
            subset_sum_in_range(&manip, &lo, &hi)
        }
        // nonmanipulators split between vetoing a and b, manipulators veto c;
        // lost iff c can end up the unique winner
        _ => {
            let lo = &pa - &pc + &m_total + 1;
            let hi = &pc - &m_total - &pb + &n_total - 1;
            !subset_sum_in_range(&nonmanip, &lo, &hi)
        }
    })
}
