//! 3SAT to subset sum, with the assignment readable from the sum.
//!
//! Numbers are written in base 6 with `m` clause digits, then `n` variable
//! digits, then a low part worth less than `6^n`. Choosing `x_i` true takes
//! item `y_i`, false takes `z_i`; both put 1 in variable digit `i` and count
//! their literal's occurrences in each clause digit, and `y_i` adds
//! `2^(n-i)` to the low part. Two slack items per clause top its digit up to
//! 3 whenever at least one of its literals is true. No digit can carry, so a
//! subset sums to `L + a` (with `L = 3..3 1..1 0..0`) exactly when it encodes
//! a satisfying assignment whose binary value is `a`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::cnf::ThreeCnfFormula;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetSumInstance {
    pub items: Vec<BigUint>,
    pub base: BigUint,
}

pub fn wagner_subset_sum(f: &ThreeCnfFormula) -> SubsetSumInstance {
    let n = f.num_vars();
    let m = f.clauses().len();
    let six = BigUint::from(6u32);
    let low = six.pow(n as u32);
    // weight of variable digit i (1-based) and clause digit j (0-based)
    let var_digit = |i: usize| &low * six.pow((n - i) as u32);
    let clause_digit = |j: usize| &low * six.pow((n + m - 1 - j) as u32);

    let mut items = Vec::with_capacity(2 * n + 2 * m);
    for i in 1..=n {
        for positive in [true, false] {
            let mut k = var_digit(i);
            for (j, cl) in f.clauses().iter().enumerate() {
                let hits = cl.0.iter().filter(|l| l.var == i && l.positive == positive).count();
                k += clause_digit(j) * hits;
            }
            if positive {
                k += BigUint::one() << (n - i);
            }
            items.push(k);
        }
    }
    for j in 0..m {
        items.push(clause_digit(j));
        items.push(clause_digit(j));
    }
    let mut base = BigUint::zero();
    for i in 1..=n {
        base += var_digit(i);
    }
    for j in 0..m {
        base += clause_digit(j) * 3u32;
    }
    SubsetSumInstance { items, base }
}
