//! Randomized agreement check between every applicable solver and the
//! game oracle.

use num_bigint::BigUint;
use omanip::oracle::decide_online;
use omanip::poly::{self, Family, ScoreState, ScoringOutcome, TieBreak};
use omanip::rules::scoring_vector;
use omanip::{
    veto, Ballot, Name, Oms, ProblemVariant, RuleId, Snapshot, Voter, Weighting,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::InstanceFile;
use crate::solve::CliError;

#[derive(Clone, Debug)]
pub struct CrosscheckConfig {
    pub max_candidates: usize,
    pub max_voters: usize,
    pub max_weight: u64,
    pub rules: Vec<RuleId>,
    pub seed: u64,
    pub samples: usize,
    /// Swap in a deliberately wrong plurality solver to test the harness.
    pub mutant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Report {
    Agreed(usize),
    Counterexample {
        solver: &'static str,
        oracle: bool,
        solver_said: bool,
        file: InstanceFile,
    },
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let yn = |b: &bool| if *b { "YES" } else { "NO" };
        match self {
            Report::Agreed(n) => writeln!(f, "OK {n}"),
            Report::Counterexample {
                solver,
                oracle,
                solver_said,
                file,
            } => {
                writeln!(
                    f,
                    "# counterexample: {solver} says {}, oracle says {}",
                    yn(solver_said),
                    yn(oracle)
                )?;
                write!(f, "{file}")
            }
        }
    }
}

/// Smallest candidate count the rule is defined for.
fn min_candidates(rule: &RuleId) -> usize {
    match rule {
        RuleId::KApproval(k) | RuleId::KVeto(k) => (*k + 1).max(2),
        RuleId::Scoring(a) => a.len(),
        RuleId::Tiered => 1,
    }
}

fn random_instance(
    rng: &mut ChaCha8Rng,
    cfg: &CrosscheckConfig,
    rule: &RuleId,
) -> Option<(Oms, ProblemVariant)> {
    let lo = min_candidates(rule);
    let m = match rule {
        RuleId::Scoring(a) => a.len(),
        _ => rng.gen_range(lo..=cfg.max_candidates.max(lo)),
    };
    if m > cfg.max_candidates {
        return None;
    }
    let unweighted = rng.gen_bool(0.5);
    let mut variant = ProblemVariant::default();
    if unweighted {
        variant = variant.unweighted();
    }
    if rule.is_plurality() && rng.gen_bool(0.3) {
        variant = variant.destructive();
    }
    let weight = |rng: &mut ChaCha8Rng| {
        if unweighted {
            BigUint::from(1u32)
        } else {
            BigUint::from(rng.gen_range(0..=cfg.max_weight))
        }
    };
    let total = rng.gen_range(1..=cfg.max_voters.max(1));
    let past_count = rng.gen_range(0..total);
    let mut order: Vec<usize> = (0..m).collect();
    let past = (0..past_count)
        .map(|i| {
            order.shuffle(rng);
            let w = weight(rng);
            (Voter::nonmanipulator(format!("p{i}"), w), Ballot::new(order.clone()))
        })
        .collect();
    let current = Voter::manipulator("u", weight(rng));
    let future = (past_count + 1..total)
        .map(|i| {
            let w = weight(rng);
            if rng.gen_bool(0.5) {
                Voter::manipulator(format!("m{i}"), w)
            } else {
                Voter::nonmanipulator(format!("n{i}"), w)
            }
        })
        .collect();
    order.shuffle(rng);
    let oms = Oms {
        candidates: (0..m).map(|i| Name::from(format!("c{i}"))).collect(),
        snapshot: Snapshot::new(past, current, future),
        sigma: Ballot::new(order),
        distinguished: rng.gen_range(0..m),
    };
    Some((oms, variant))
}

fn mutant_plurality(oms: &Oms) -> bool {
    let alpha = scoring_vector(&RuleId::plurality(), oms.num_candidates()).expect("m >= 1");
    let s = ScoreState::new(oms, &alpha);
    let pos = oms.sigma.position(oms.distinguished).expect("validated");
    let r = oms.sigma.ranking();
    let best = |ids: &[usize]| ids.iter().map(|&c| s.current[c].clone()).max().unwrap_or_default();
    // strict where it should not be
    best(&r[..=pos]) + &s.manip_weight > &s.nonmanip_weight + best(&r[pos + 1..])
}

type Verdicts = Vec<(&'static str, bool)>;

fn solver_verdicts(
    oms: &Oms,
    rule: &RuleId,
    variant: &ProblemVariant,
    mutant: bool,
) -> Result<Verdicts, CliError> {
    let mut out: Verdicts = Vec::new();
    let constructive = variant.is_standard_constructive();
    let unweighted = variant.weighting == Weighting::Unweighted;
    if rule.is_plurality() {
        if constructive {
            let v = if mutant {
                mutant_plurality(oms)
            } else {
                poly::decide_plurality_constructive_weighted(oms, variant)?
            };
            out.push(("plurality-constructive", v));
        } else {
            out.push(("plurality-destructive", poly::decide_plurality_destructive_weighted(oms, variant)?));
        }
    }
    if !constructive {
        return Ok(out);
    }
    if let RuleId::KApproval(k) | RuleId::KVeto(k) = rule {
        if unweighted {
            let family = if matches!(rule, RuleId::KApproval(_)) { Family::Approval } else { Family::Veto };
            out.push(("greedy", poly::decide_kapproval_kveto_unweighted(oms, variant, family, *k)?));
            out.push((
                "greedy-reversed-ties",
                poly::decide_greedy_with(oms, variant, family, *k, TieBreak::NameDescending)?,
            ));
        }
    }
    if rule.is_veto() {
        out.push(("veto-pnp", veto::decide_veto_weighted(oms, variant)?));
        if oms.num_candidates() == 3 {
            out.push(("veto3", veto::decide_veto3_weighted(oms, variant)?));
        }
        if unweighted {
            out.push(("veto-threshold", poly::decide_1veto_threshold(oms, variant)?));
        }
    }
    if *rule != RuleId::Tiered {
        let alpha = scoring_vector(rule, oms.num_candidates())?;
        if let ScoringOutcome::Decided(v) = poly::decide_scoring_weighted(&alpha, oms, variant)? {
            out.push(("scoring", v));
        }
    }
    Ok(out)
}

pub fn crosscheck(cfg: &CrosscheckConfig) -> Result<Report, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut compared = 0;
    for i in 0..cfg.samples {
        if cfg.rules.is_empty() {
            break;
        }
        let rule = &cfg.rules[i % cfg.rules.len()];
        let Some((oms, variant)) = random_instance(&mut rng, cfg, rule) else {
            continue;
        };
        let want = decide_online(&oms, rule, &variant)?;
        for (solver, got) in solver_verdicts(&oms, rule, &variant, cfg.mutant)? {
            compared += 1;
            if got != want {
                return Ok(Report::Counterexample {
                    solver,
                    oracle: want,
                    solver_said: got,
                    file: InstanceFile::from_oms(&oms, rule, &variant),
                });
            }
        }
    }
    Ok(Report::Agreed(compared))
}
