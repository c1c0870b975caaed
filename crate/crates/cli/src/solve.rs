//! Solver selection and dispatch.

use std::fmt;

use omanip::oracle::{OracleConfig, OracleError};
use omanip::poly::{self, Family, ScoringOutcome, SolverError};
use omanip::rules::scoring_vector;
use omanip::{
    veto, Direction, GameOracle, Oms, ProblemVariant, RuleError, RuleId, ScheduleMethod,
    Target, Weighting, WinnerModel,
};
use thiserror::Error;

use crate::instance::{InstanceFile, ValidationError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverChoice {
    Auto,
    Oracle,
    Poly,
    VetoPnp,
    Veto3,
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Oracle,
    ScheduleOracle,
    PluralityConstructive,
    PluralityDestructive,
    Scoring,
    Greedy,
    VetoPnp,
    Veto3,
}

impl Solver {
    fn is_poly(self) -> bool {
        matches!(
            self,
            Solver::PluralityConstructive | Solver::PluralityDestructive | Solver::Scoring | Solver::Greedy
        )
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::Oracle => "oracle",
            Solver::ScheduleOracle => "oracle-schedule",
            Solver::PluralityConstructive => "plurality-constructive",
            Solver::PluralityDestructive => "plurality-destructive",
            Solver::Scoring => "scoring",
            Solver::Greedy => "greedy",
            Solver::VetoPnp => "veto-pnp",
            Solver::Veto3 => "veto3",
        })
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] crate::instance::ParseError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("solver {solver} does not apply: {why}")]
    NotApplicable { solver: &'static str, why: &'static str },
    #[error(transparent)]
    Solver(SolverError),
    #[error("search budget of {0} nodes exceeded")]
    Budget(u64),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Budget(_) => 3,
            _ => 2,
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::SearchBudgetExceeded { cap } => CliError::Budget(cap),
            OracleError::Rule(r) => CliError::Rule(r),
            OracleError::Model(m) => CliError::Validation(m.into()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Rule(r) => CliError::Rule(r),
            SolverError::Model(m) => CliError::Validation(m.into()),
            other => CliError::Solver(other),
        }
    }
}

/// The `auto` routing table, first matching row wins.
pub const ROUTING_TABLE: &[(&str, &str)] = &[
    ("freeform or unique-winner", "oracle"),
    ("plurality, destructive", "plurality-destructive"),
    ("destructive or pinpoint (other rules)", "oracle"),
    ("unweighted k-approval / k-veto", "greedy"),
    ("plurality", "plurality-constructive"),
    ("weighted veto", "veto-pnp"),
    ("scoring vector with a2 = am", "scoring"),
    ("anything else", "oracle"),
];

fn flat_or_plurality_like(rule: &RuleId, m: usize) -> Result<bool, RuleError> {
    let a = scoring_vector(rule, m)?;
    let a = a.points();
    Ok(a.len() < 2 || a[1] == a[a.len() - 1])
}

/// The solver `auto` picks; never changes the question being asked.
pub fn route(oms: &Oms, rule: &RuleId, variant: &ProblemVariant) -> Result<Solver, CliError> {
    if variant.freeform || variant.winner_model == WinnerModel::Unique {
        return Ok(Solver::Oracle);
    }
    if rule.is_plurality() && variant.direction == Direction::Destructive {
        return Ok(Solver::PluralityDestructive);
    }
    if variant.direction == Direction::Destructive || variant.target == Target::Pinpoint {
        return Ok(Solver::Oracle);
    }
    let approval_family = matches!(rule, RuleId::KApproval(_) | RuleId::KVeto(_));
    if approval_family && variant.weighting == Weighting::Unweighted {
        return Ok(Solver::Greedy);
    }
    if rule.is_plurality() {
        return Ok(Solver::PluralityConstructive);
    }
    if rule.is_veto() {
        return Ok(Solver::VetoPnp);
    }
    if *rule != RuleId::Tiered && flat_or_plurality_like(rule, oms.num_candidates())? {
        return Ok(Solver::Scoring);
    }
    Ok(Solver::Oracle)
}

fn run(
    solver: Solver,
    oms: &Oms,
    rule: &RuleId,
    variant: &ProblemVariant,
    config: &OracleConfig,
) -> Result<bool, CliError> {
    let not = |solver, why| CliError::NotApplicable { solver, why };
    Ok(match solver {
        Solver::Oracle => GameOracle::new(config.clone()).decide_online(oms, rule, variant)?,
        Solver::ScheduleOracle => unreachable!("schedule-free files are handled separately"),
        Solver::PluralityConstructive => {
            if !rule.is_plurality() {
                return Err(not("poly", "rule is not plurality"));
            }
            poly::decide_plurality_constructive_weighted(oms, variant)?
        }
        Solver::PluralityDestructive => {
            if !rule.is_plurality() {
                return Err(not("poly", "rule is not plurality"));
            }
            poly::decide_plurality_destructive_weighted(oms, variant)?
        }
        Solver::Scoring => {
            let alpha = scoring_vector(rule, oms.num_candidates())?;
            match poly::decide_scoring_weighted(&alpha, oms, variant)? {
                ScoringOutcome::Decided(b) => b,
                ScoringOutcome::NotPolynomialCase => {
                    return Err(not("poly", "scoring vector has a2 > am"))
                }
            }
        }
        Solver::Greedy => {
            let (family, k) = match rule {
                RuleId::KApproval(k) => (Family::Approval, *k),
                RuleId::KVeto(k) => (Family::Veto, *k),
                _ => return Err(not("greedy", "rule is not k-approval or k-veto")),
            };
            poly::decide_kapproval_kveto_unweighted(oms, variant, family, k)?
        }
        Solver::VetoPnp => {
            if !rule.is_veto() {
                return Err(not("veto-pnp", "rule is not veto"));
            }
            veto::decide_veto_weighted(oms, variant)?
        }
        Solver::Veto3 => {
            if !rule.is_veto() {
                return Err(not("veto3", "rule is not veto"));
            }
            veto::decide_veto3_weighted(oms, variant)?
        }
    })
}

/// Decide a setting with the requested solver; returns the verdict and the
/// solver that produced it.
pub fn decide_oms(
    oms: &Oms,
    rule: &RuleId,
    variant: &ProblemVariant,
    choice: SolverChoice,
    config: &OracleConfig,
) -> Result<(bool, Solver), CliError> {
    let solver = match choice {
        SolverChoice::Auto => route(oms, rule, variant)?,
        SolverChoice::Oracle => Solver::Oracle,
        SolverChoice::Poly => {
            let s = route(oms, rule, variant)?;
            if !s.is_poly() {
                return Err(CliError::NotApplicable {
                    solver: "poly",
                    why: "no polynomial-time procedure covers this variant and rule",
                });
            }
            s
        }
        SolverChoice::VetoPnp => Solver::VetoPnp,
        SolverChoice::Veto3 => Solver::Veto3,
        SolverChoice::Greedy => Solver::Greedy,
    };
    Ok((run(solver, oms, rule, variant, config)?, solver))
}

pub fn decide_file(
    file: &InstanceFile,
    choice: SolverChoice,
    config: &OracleConfig,
) -> Result<(bool, Solver), CliError> {
    if file.is_schedule_free() {
        if !matches!(choice, SolverChoice::Auto | SolverChoice::Oracle) {
            return Err(CliError::NotApplicable {
                solver: "requested",
                why: "schedule-free files need the oracle",
            });
        }
        let state = file.to_schedule_free()?;
        let yes = GameOracle::new(config.clone()).decide_schedule_robust(
            &state,
            &file.rule,
            &file.variant,
            ScheduleMethod::Exhaustive,
        )?;
        return Ok((yes, Solver::ScheduleOracle));
    }
    let oms = file.to_oms()?;
    decide_oms(&oms, &file.rule, &file.variant, choice, config)
}

/// One verdict per candidate, in declaration order, each with the
/// candidate as the distinguished one.
pub fn profile_file(file: &InstanceFile, config: &OracleConfig) -> Result<Vec<bool>, CliError> {
    if file.candidates.is_empty() {
        return Err(ValidationError::Model(omanip::ModelError::NoCandidates).into());
    }
    (0..file.candidates.len())
        .map(|d| {
            let oms = file.to_oms_with(d)?;
            decide_oms(&oms, &file.rule, &file.variant, SolverChoice::Auto, config).map(|r| r.0)
        })
        .collect()
}

/// Human-readable routing explanation for `--explain`.
pub fn explain(chosen: Solver) -> String {
    let mut s = String::from("auto routing (first match wins):\n");
    for (cond, solver) in ROUTING_TABLE {
        s.push_str(&format!("  {cond:<40} -> {solver}\n"));
    }
    s.push_str(&format!("chosen: {chosen}\n"));
    s
}
