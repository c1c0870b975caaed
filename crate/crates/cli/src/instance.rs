//! The line-oriented instance file.
//!
//! ```text
//! # comments start with '#'
//! candidates: a b c
//! sigma: a > b > c
//! d: b
//! rule: plurality
//! variant: constructive segment weighted nonunique
//! voters:
//! p1 nonmanip w=2 vote: c > a > b
//! u manip w=1 pending
//! n1 nonmanip w=1 pending
//! ```
//!
//! Voters are listed in voting order: cast ballots first, then the pending
//! voters, the first of which is the current voter. In freeform files the
//! current voter may be a nonmanipulator with a known ballot, written
//! `pending vote: <order>`. Schedule-free files mark the remaining voters
//! `unordered` instead of `pending`.

use std::fmt;

use num_bigint::BigUint;
use omanip::{
    Ballot, CandidateId, Direction, ModelError, Name, Oms, ProblemVariant, Role, RuleId,
    ScheduleFreeState, ScoringVector, Snapshot, Target, Voter, Weighting, WinnerModel,
};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("no distinguished candidate given (d:)")]
    MissingDistinguished,
    #[error("unknown candidate {0}")]
    UnknownCandidate(String),
    #[error("no pending voter")]
    NoPendingVoter,
    #[error("this file is schedule-free")]
    ScheduleFree,
    #[error("this file has a fixed voting order")]
    NotScheduleFree,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VoteState {
    Cast(Vec<Name>),
    Pending,
    /// Current voter of a freeform file whose ballot is known.
    PendingWith(Vec<Name>),
    Unordered,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoterLine {
    pub name: Name,
    pub role: Role,
    pub weight: BigUint,
    pub state: VoteState,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceFile {
    pub candidates: Vec<Name>,
    pub sigma: Vec<Name>,
    pub d: Option<Name>,
    pub rule: RuleId,
    pub variant: ProblemVariant,
    pub voters: Vec<VoterLine>,
}

struct Line<'a> {
    no: usize,
    text: &'a str,
}

impl Line<'_> {
    fn err(&self, at: &str, msg: impl Into<String>) -> ParseError {
        // `at` is always a subslice of `text`
        let col = at.as_ptr() as usize - self.text.as_ptr() as usize + 1;
        ParseError {
            line: self.no,
            col,
            msg: msg.into(),
        }
    }
}

/// Whitespace-separated tokens of `s` as subslices.
fn tokens(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c.is_ascii_whitespace()).filter(|t| !t.is_empty())
}

fn parse_order<'a>(line: &Line<'a>, s: &'a str) -> Result<Vec<Name>, ParseError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut rest = s;
    loop {
        let (part, tail) = match rest.find('>') {
            Some(i) => (&rest[..i], Some(&rest[i + 1..])),
            None => (rest, None),
        };
        let mut toks = tokens(part);
        match (toks.next(), toks.next()) {
            (Some(name), None) => out.push(Name::from(name)),
            (None, _) => return Err(line.err(part, "expected a candidate name")),
            (Some(_), Some(extra)) => return Err(line.err(extra, "expected '>'")),
        }
        match tail {
            Some(t) => rest = t,
            None => return Ok(out),
        }
    }
}

fn parse_uint(line: &Line, tok: &str) -> Result<u64, ParseError> {
    tok.parse().map_err(|_| line.err(tok, "expected a nonnegative integer"))
}

fn parse_rule(line: &Line, s: &str) -> Result<RuleId, ParseError> {
    let toks: Vec<&str> = tokens(s).collect();
    let Some(&head) = toks.first() else {
        return Err(line.err(s, "expected a rule"));
    };
    let one_arg = |toks: &[&str]| -> Result<usize, ParseError> {
        match toks {
            [_, k] => Ok(parse_uint(line, k)? as usize),
            [_] => Err(line.err(head, "expected k")),
            [_, _, extra, ..] => Err(line.err(extra, "unexpected token")),
            [] => unreachable!(),
        }
    };
    let no_arg = |toks: &[&str], r: RuleId| match toks {
        [_, extra, ..] => Err(line.err(extra, "unexpected token")),
        _ => Ok(r),
    };
    match head {
        "plurality" => no_arg(&toks, RuleId::plurality()),
        "veto" => no_arg(&toks, RuleId::veto()),
        "tiered" => no_arg(&toks, RuleId::Tiered),
        "approval" => Ok(RuleId::KApproval(one_arg(&toks)?)),
        "kveto" => Ok(RuleId::KVeto(one_arg(&toks)?)),
        "scoring" => {
            let alpha = toks[1..]
                .iter()
                .map(|t| parse_uint(line, t))
                .collect::<Result<Vec<_>, _>>()?;
            ScoringVector::new(alpha)
                .map(RuleId::Scoring)
                .map_err(|e| line.err(head, e.to_string()))
        }
        other => Err(line.err(other, format!("unknown rule '{other}'"))),
    }
}

fn parse_variant(line: &Line, s: &str) -> Result<ProblemVariant, ParseError> {
    let mut v = ProblemVariant::default();
    for tok in tokens(s) {
        match tok {
            "constructive" => v.direction = Direction::Constructive,
            "destructive" => v.direction = Direction::Destructive,
            "segment" => v.target = Target::Segment,
            "pinpoint" => v.target = Target::Pinpoint,
            "weighted" => v.weighting = Weighting::Weighted,
            "unweighted" => v.weighting = Weighting::Unweighted,
            "nonunique" => v.winner_model = WinnerModel::Nonunique,
            "unique" => v.winner_model = WinnerModel::Unique,
            "freeform" => v.freeform = true,
            _ => match tok.strip_prefix("bound=") {
                Some(k) => v.coalition_bound = Some(parse_uint(line, k)? as usize),
                None => return Err(line.err(tok, format!("unknown variant token '{tok}'"))),
            },
        }
    }
    Ok(v)
}

fn parse_voter(line: &Line) -> Result<VoterLine, ParseError> {
    let text = line.text;
    let mut toks = tokens(text);
    let name = toks.next().expect("caller skips blank lines");
    let role = match toks.next() {
        Some("manip") => Role::Manipulator,
        Some("nonmanip") => Role::Nonmanipulator,
        Some(t) => return Err(line.err(t, "expected 'manip' or 'nonmanip'")),
        None => return Err(line.err(&text[text.len()..], "expected a role")),
    };
    let weight = match toks.next() {
        Some(t) => match t.strip_prefix("w=") {
            Some(w) => w
                .parse::<BigUint>()
                .map_err(|_| line.err(w, "expected a nonnegative integer weight"))?,
            None => return Err(line.err(t, "expected w=<weight>")),
        },
        None => return Err(line.err(&text[text.len()..], "expected w=<weight>")),
    };
    let rest_at = |tok: &str| {
        let start = tok.as_ptr() as usize - text.as_ptr() as usize + tok.len();
        &text[start..]
    };
    let state = match toks.next() {
        Some("pending") => match toks.next() {
            None => VoteState::Pending,
            Some(t @ "vote:") => VoteState::PendingWith(parse_order(line, rest_at(t))?),
            Some(t) => return Err(line.err(t, "unexpected token after 'pending'")),
        },
        Some("unordered") => match toks.next() {
            None => VoteState::Unordered,
            Some(t) => return Err(line.err(t, "unexpected token after 'unordered'")),
        },
        Some(t @ "vote:") => VoteState::Cast(parse_order(line, rest_at(t))?),
        Some(t) => return Err(line.err(t, "expected 'vote:', 'pending' or 'unordered'")),
        None => return Err(line.err(&text[text.len()..], "expected 'vote:', 'pending' or 'unordered'")),
    };
    Ok(VoterLine {
        name: Name::from(name),
        role,
        weight,
        state,
    })
}

impl InstanceFile {
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        let mut candidates = None;
        let mut sigma = None;
        let mut d = None;
        let mut rule = None;
        let mut variant = None;
        let mut voters: Option<Vec<VoterLine>> = None;
        let mut last_line = 0;
        for (i, text) in src.lines().enumerate() {
            let line = Line { no: i + 1, text };
            last_line = line.no;
            let trimmed = text.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(vs) = voters.as_mut() {
                vs.push(parse_voter(&line)?);
                continue;
            }
            let Some((key, value)) = trimmed.split_once(':') else {
                return Err(line.err(trimmed, "expected '<key>:'"));
            };
            let dup = |present: bool| {
                if present {
                    Err(line.err(key, format!("duplicate '{key}:' line")))
                } else {
                    Ok(())
                }
            };
            match key.trim_end() {
                "candidates" => {
                    dup(candidates.is_some())?;
                    candidates = Some(tokens(value).map(Name::from).collect::<Vec<_>>());
                }
                "sigma" => {
                    dup(sigma.is_some())?;
                    sigma = Some(parse_order(&line, value)?);
                }
                "d" => {
                    dup(d.is_some())?;
                    let mut toks = tokens(value);
                    match (toks.next(), toks.next()) {
                        (Some(n), None) => d = Some(Name::from(n)),
                        (None, _) => return Err(line.err(value, "expected a candidate name")),
                        (Some(_), Some(x)) => return Err(line.err(x, "unexpected token")),
                    }
                }
                "rule" => {
                    dup(rule.is_some())?;
                    rule = Some(parse_rule(&line, value)?);
                }
                "variant" => {
                    dup(variant.is_some())?;
                    variant = Some(parse_variant(&line, value)?);
                }
                "voters" => {
                    if !value.trim().is_empty() {
                        return Err(line.err(value.trim_start(), "voters go on the following lines"));
                    }
                    voters = Some(Vec::new());
                }
                _ => return Err(line.err(key, format!("unknown key '{}'", key.trim_end()))),
            }
        }
        let missing = |what: &str| ParseError {
            line: last_line + 1,
            col: 1,
            msg: format!("missing '{what}:' section"),
        };
        Ok(InstanceFile {
            candidates: candidates.ok_or_else(|| missing("candidates"))?,
            sigma: sigma.ok_or_else(|| missing("sigma"))?,
            d,
            rule: rule.ok_or_else(|| missing("rule"))?,
            variant: variant.unwrap_or_default(),
            voters: voters.ok_or_else(|| missing("voters"))?,
        })
    }

    pub fn is_schedule_free(&self) -> bool {
        self.voters.iter().any(|v| v.state == VoteState::Unordered)
    }

    fn id(&self, name: &Name) -> Result<CandidateId, ValidationError> {
        self.candidates
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| ValidationError::UnknownCandidate(name.to_string()))
    }

    fn ballot(&self, order: &[Name]) -> Result<Ballot, ValidationError> {
        Ok(Ballot::from_names(&self.candidates, order)?)
    }

    fn voter(line: &VoterLine) -> Voter {
        Voter::new(line.name.clone(), line.weight.clone(), line.role)
    }

    pub fn distinguished(&self) -> Result<CandidateId, ValidationError> {
        self.id(self.d.as_ref().ok_or(ValidationError::MissingDistinguished)?)
    }

    /// The setting with `d` as distinguished candidate, validated against
    /// the file's variant.
    pub fn to_oms_with(&self, d: CandidateId) -> Result<Oms, ValidationError> {
        if self.is_schedule_free() {
            return Err(ValidationError::ScheduleFree);
        }
        if self.candidates.is_empty() {
            return Err(ModelError::NoCandidates.into());
        }
        let mut past = Vec::new();
        let mut pending = Vec::new();
        let mut current_ballot = None;
        for line in &self.voters {
            match &line.state {
                VoteState::Cast(order) if pending.is_empty() => {
                    past.push((Self::voter(line), self.ballot(order)?));
                }
                VoteState::Cast(_) => {
                    return Err(ModelError::UnexpectedCurrentBallot.into());
                }
                VoteState::Pending => pending.push(Self::voter(line)),
                VoteState::PendingWith(order) if pending.is_empty() => {
                    current_ballot = Some(self.ballot(order)?);
                    pending.push(Self::voter(line));
                }
                VoteState::PendingWith(_) => return Err(ModelError::UnexpectedCurrentBallot.into()),
                VoteState::Unordered => unreachable!(),
            }
        }
        if pending.is_empty() {
            return Err(ValidationError::NoPendingVoter);
        }
        let current = pending.remove(0);
        let mut snapshot = Snapshot::new(past, current, pending);
        snapshot.current_ballot = current_ballot;
        let oms = Oms {
            sigma: self.ballot(&self.sigma)?,
            candidates: self.candidates.clone(),
            snapshot,
            distinguished: d,
        };
        Ok(oms.validate(&self.variant)?)
    }

    pub fn to_oms(&self) -> Result<Oms, ValidationError> {
        if self.candidates.is_empty() {
            return Err(ModelError::NoCandidates.into());
        }
        self.to_oms_with(self.distinguished()?)
    }

    pub fn to_schedule_free(&self) -> Result<ScheduleFreeState, ValidationError> {
        if !self.is_schedule_free() {
            return Err(ValidationError::NotScheduleFree);
        }
        let mut past = Vec::new();
        let mut remaining = Vec::new();
        for line in &self.voters {
            match &line.state {
                VoteState::Cast(order) if remaining.is_empty() => {
                    past.push((Self::voter(line), self.ballot(order)?));
                }
                VoteState::Unordered => remaining.push(Self::voter(line)),
                _ => return Err(ValidationError::NotScheduleFree),
            }
        }
        let state = ScheduleFreeState {
            sigma: self.ballot(&self.sigma)?,
            distinguished: self.distinguished()?,
            candidates: self.candidates.clone(),
            past,
            remaining,
        };
        Ok(state.validate(&self.variant)?)
    }

    /// The file describing a setting.
    pub fn from_oms(oms: &Oms, rule: &RuleId, variant: &ProblemVariant) -> Self {
        let names = |b: &Ballot| b.ranking().iter().map(|&c| oms.candidates[c].clone()).collect();
        let line = |v: &Voter, state| VoterLine {
            name: v.name.clone(),
            role: v.role,
            weight: v.weight.clone(),
            state,
        };
        let snap = &oms.snapshot;
        let mut voters: Vec<VoterLine> = snap
            .past
            .iter()
            .map(|(v, b)| line(v, VoteState::Cast(names(b))))
            .collect();
        let first = match &snap.current_ballot {
            Some(b) => VoteState::PendingWith(names(b)),
            None => VoteState::Pending,
        };
        voters.push(line(&snap.current, first));
        voters.extend(snap.future.iter().map(|v| line(v, VoteState::Pending)));
        InstanceFile {
            candidates: oms.candidates.clone(),
            sigma: names(&oms.sigma),
            d: Some(oms.candidates[oms.distinguished].clone()),
            rule: rule.clone(),
            variant: variant.clone(),
            voters,
        }
    }
}

fn write_order(f: &mut fmt::Formatter<'_>, order: &[Name]) -> fmt::Result {
    for (i, n) in order.iter().enumerate() {
        if i > 0 {
            f.write_str(" > ")?;
        }
        write!(f, "{n}")?;
    }
    Ok(())
}

impl fmt::Display for InstanceFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("candidates:")?;
        for c in &self.candidates {
            write!(f, " {c}")?;
        }
        f.write_str("\nsigma: ")?;
        write_order(f, &self.sigma)?;
        f.write_str("\n")?;
        if let Some(d) = &self.d {
            writeln!(f, "d: {d}")?;
        }
        writeln!(f, "rule: {}", self.rule)?;
        let v = &self.variant;
        write!(
            f,
            "variant: {} {} {} {}",
            match v.direction {
                Direction::Constructive => "constructive",
                Direction::Destructive => "destructive",
            },
            match v.target {
                Target::Segment => "segment",
                Target::Pinpoint => "pinpoint",
            },
            match v.weighting {
                Weighting::Weighted => "weighted",
                Weighting::Unweighted => "unweighted",
            },
            match v.winner_model {
                WinnerModel::Nonunique => "nonunique",
                WinnerModel::Unique => "unique",
            },
        )?;
        if v.freeform {
            f.write_str(" freeform")?;
        }
        if let Some(k) = v.coalition_bound {
            write!(f, " bound={k}")?;
        }
        f.write_str("\nvoters:\n")?;
        for line in &self.voters {
            let role = match line.role {
                Role::Manipulator => "manip",
                Role::Nonmanipulator => "nonmanip",
            };
            write!(f, "{} {} w={} ", line.name, role, line.weight)?;
            match &line.state {
                VoteState::Cast(order) => {
                    f.write_str("vote: ")?;
                    write_order(f, order)?;
                }
                VoteState::Pending => f.write_str("pending")?,
                VoteState::PendingWith(order) => {
                    f.write_str("pending vote: ")?;
                    write_order(f, order)?;
                }
                VoteState::Unordered => f.write_str("unordered")?,
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}
