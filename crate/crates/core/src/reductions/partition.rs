use num_bigint::BigUint;

use super::{GeneratedInstance, ReductionError};
use crate::election::{Ballot, Name, Oms, ProblemVariant, Snapshot, Voter};
use crate::rules::RuleId;

const MAX_ITEMS: usize = 24;

fn half(ws: &[u64]) -> Result<u64, ReductionError> {
    if ws.is_empty() {
        return Err(ReductionError::BadPartitionInput("empty sequence"));
    }
    if ws.contains(&0) {
        return Err(ReductionError::BadPartitionInput("weights must be positive"));
    }
    let sum: u64 = ws.iter().sum();
    if sum % 2 == 1 {
        return Err(ReductionError::OddSum);
    }
    Ok(sum / 2)
}

/// Can the weights be split into two halves of equal sum?
pub fn partition_brute(ws: &[u64]) -> Result<bool, ReductionError> {
    let target = half(ws)?;
    if ws.len() > MAX_ITEMS {
        return Err(ReductionError::TooLarge {
            what: "partition size",
            limit: MAX_ITEMS,
        });
    }
    Ok((0u32..1 << ws.len()).any(|mask| {
        ws.iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, w)| w)
            .sum::<u64>()
            == target
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// Yes iff the weights can be split evenly.
    Destructive,
    /// Yes iff they cannot.
    ConstructiveComplement,
}

/// Weighted plurality under the unique-winner model.
///
/// With `2W` the total, past voter `v_i` (`i <= m-2`) votes for `c_i` with
/// weight `(m-1)W - i`, and voter `u_i` has weight `(m-1)w_i`. The
/// destructive flavor makes the `u_i` manipulators aiming for no unique
/// winner; the complement flavor puts a weight-0 manipulator first and
/// makes the `u_i` nonmanipulators.
pub fn gen_partition_plurality_uw(
    ws: &[u64],
    m: usize,
    flavor: Flavor,
) -> Result<GeneratedInstance, ReductionError> {
    let w = half(ws)?;
    if m < 2 {
        return Err(ReductionError::BadPartitionInput("needs at least two candidates"));
    }
    let candidates: Vec<Name> = (1..=m).map(|i| Name::from(format!("c{i}"))).collect();
    let scale = (m - 1) as u64;
    let past = (1..=m - 2)
        .map(|i| {
            let mut r: Vec<usize> = (0..m).collect();
            r.swap(0, i - 1);
            let weight = BigUint::from(scale * w - i as u64);
            (Voter::nonmanipulator(format!("v{i}"), weight), Ballot::new(r))
        })
        .collect();
    let voter = |i: usize, wi: u64| {
        let name = format!("u{i}");
        let weight = BigUint::from(scale * wi);
        match flavor {
            Flavor::Destructive => Voter::manipulator(name, weight),
            Flavor::ConstructiveComplement => Voter::nonmanipulator(name, weight),
        }
    };
    let mut pending: Vec<Voter> = ws.iter().enumerate().map(|(i, &wi)| voter(i + 1, wi)).collect();
    let (distinguished, variant) = match flavor {
        Flavor::Destructive => (0, ProblemVariant::default().destructive().unique()),
        Flavor::ConstructiveComplement => {
            pending.insert(0, Voter::manipulator("u0", 0u32));
            (m - 1, ProblemVariant::default().unique())
        }
    };
    let current = pending.remove(0);
    Ok(GeneratedInstance {
        oms: Oms {
            candidates,
            snapshot: Snapshot::new(past, current, pending),
            sigma: Ballot::identity(m),
            distinguished,
        },
        variant,
        rule: RuleId::plurality(),
    })
}

/// Three-candidate weighted veto, `a > b > c`, `d = b`: a past voter of
/// weight `W - 1` vetoes `c`, a weight-0 manipulator moves, then one
/// nonmanipulator per weight. Yes iff the weights cannot be split evenly.
pub fn gen_partition_veto3(ws: &[u64]) -> Result<GeneratedInstance, ReductionError> {
    let w = half(ws)?;
    let candidates: Vec<Name> = ["a", "b", "c"].into_iter().map(Name::from).collect();
    let past = vec![(Voter::nonmanipulator("p", w - 1), Ballot::identity(3))];
    let future = ws
        .iter()
        .enumerate()
        .map(|(i, &wi)| Voter::nonmanipulator(format!("n{}", i + 1), wi))
        .collect();
    Ok(GeneratedInstance {
        oms: Oms {
            candidates,
            snapshot: Snapshot::new(past, Voter::manipulator("u", 0u32), future),
            sigma: Ballot::identity(3),
            distinguished: 1,
        },
        variant: ProblemVariant::default(),
        rule: RuleId::veto(),
    })
}
