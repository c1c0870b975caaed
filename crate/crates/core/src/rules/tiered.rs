//! The tiered-formula election system.
//!
//! The lexicographically least candidate name is read as a boolean formula
//! over variables `x_{i,j}`. Voter `i` (in name order) sets block `i` of the
//! variables through the bottom of her ballot. Everyone wins if the formula
//! comes out true, nobody otherwise.
//!
//! Names use this grammar, with no whitespace:
//!
//! ```text
//! expr  := conj ('|' conj)*
//! conj  := unary ('&' unary)*
//! unary := '!' unary | '(' expr ')' | var
//! var   := 'x_{' int ',' int '}'      (positive, no leading zeros)
//! ```

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::RuleError;
use crate::election::{Ballot, CandidateId, Name};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(usize, usize),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed formula at byte {pos}: {msg}")]
pub struct FormulaError {
    pub pos: usize,
    pub msg: &'static str,
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &'static str) -> Result<T, FormulaError> {
        Err(FormulaError { pos: self.pos, msg })
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &[u8], msg: &'static str) -> Result<(), FormulaError> {
        if self.s[self.pos..].starts_with(lit) {
            self.pos += lit.len();
            Ok(())
        } else {
            self.err(msg)
        }
    }

    fn expr(&mut self) -> Result<Formula, FormulaError> {
        let mut parts = vec![self.conj()?];
        while self.eat(b'|') {
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        })
    }

    fn conj(&mut self) -> Result<Formula, FormulaError> {
        let mut parts = vec![self.unary()?];
        while self.eat(b'&') {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        if self.eat(b'!') {
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if self.eat(b'(') {
            let f = self.expr()?;
            if !self.eat(b')') {
                return self.err("expected ')'");
            }
            return Ok(f);
        }
        self.expect(b"x_{", "expected variable, '!' or '('")?;
        let i = self.int()?;
        self.expect(b",", "expected ','")?;
        let j = self.int()?;
        self.expect(b"}", "expected '}'")?;
        Ok(Formula::Var(i, j))
    }

    fn int(&mut self) -> Result<usize, FormulaError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        let digits = &self.s[start..self.pos];
        if digits.is_empty() || digits[0] == b'0' {
            self.pos = start;
            return self.err("expected positive integer");
        }
        std::str::from_utf8(digits)
            .unwrap()
            .parse()
            .or_else(|_| self.err("index out of range"))
    }
}

impl Formula {
    pub fn parse(s: &[u8]) -> Result<Formula, FormulaError> {
        let mut p = Parser { s, pos: 0 };
        let f = p.expr()?;
        if p.pos != s.len() {
            return p.err("trailing input");
        }
        Ok(f)
    }

    pub fn var(i: usize, j: usize) -> Formula {
        Formula::Var(i, j)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn eval(&self, value: &impl Fn(usize, usize) -> bool) -> bool {
        match self {
            Formula::Var(i, j) => value(*i, *j),
            Formula::Not(f) => !f.eval(value),
            Formula::And(fs) => fs.iter().all(|f| f.eval(value)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(value)),
        }
    }

    pub fn vars(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<(usize, usize)>) {
        match self {
            Formula::Var(i, j) => {
                out.insert((*i, *j));
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, parent_and: bool) -> fmt::Result {
        // Same-operator children keep their grouping so parse(print(f)) == f.
        let wrap = match self {
            Formula::Or(_) => true,
            Formula::And(_) => parent_and,
            _ => false,
        };
        if wrap {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(i, j) => write!(f, "x_{{{i},{j}}}"),
            Formula::Not(g) => match **g {
                Formula::Var(..) | Formula::Not(_) => write!(f, "!{g}"),
                _ => write!(f, "!({g})"),
            },
            Formula::And(fs) => {
                for (k, g) in fs.iter().enumerate() {
                    if k > 0 {
                        f.write_str("&")?;
                    }
                    g.fmt_child(f, true)?;
                }
                Ok(())
            }
            Formula::Or(fs) => {
                for (k, g) in fs.iter().enumerate() {
                    if k > 0 {
                        f.write_str("|")?;
                    }
                    // conjunctions bind tighter; only nested ors need parentheses
                    match g {
                        Formula::Or(_) => write!(f, "({g})")?,
                        _ => write!(f, "{g}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

/// A formula read as a tiered formula: `blocks` is the largest first index,
/// `width` the largest second index, and every block up to `blocks` occurs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TieredFormula {
    pub formula: Formula,
    pub blocks: usize,
    pub width: usize,
}

impl TieredFormula {
    /// Shape of a formula, without the block-inhabitation requirement.
    fn shape(formula: Formula) -> (TieredFormula, bool) {
        let vars = formula.vars();
        let blocks = vars.iter().map(|v| v.0).max().unwrap_or(0);
        let width = vars.iter().map(|v| v.1).max().unwrap_or(0);
        let inhabited = (1..=blocks).all(|i| vars.iter().any(|v| v.0 == i));
        (
            TieredFormula {
                formula,
                blocks,
                width,
            },
            inhabited,
        )
    }

    pub fn new(formula: Formula) -> Option<TieredFormula> {
        match Self::shape(formula) {
            (t, true) => Some(t),
            _ => None,
        }
    }

    pub fn parse(name: &[u8]) -> Option<TieredFormula> {
        Self::new(Formula::parse(name).ok()?)
    }
}

/// Reads `width` bits from the bottom of `ballot` with `c` removed.
///
/// Bit `l` (1-based) is 0 iff the name of the `(2l-1)`-th least preferred
/// remaining candidate is bytewise less than that of the `2l`-th.
pub fn decode_bits(
    ballot: &Ballot,
    c: CandidateId,
    width: usize,
    names: &[Name],
) -> Result<Vec<bool>, RuleError> {
    let rest: Vec<CandidateId> = ballot.ranking().iter().copied().filter(|&x| x != c).collect();
    if rest.len() < 2 * width {
        return Err(RuleError::TooFewCandidates { width });
    }
    // from_bottom[0] is the least preferred
    let from_bottom = |k: usize| rest[rest.len() - 1 - k];
    Ok((0..width)
        .map(|l| names[from_bottom(2 * l)] >= names[from_bottom(2 * l + 1)])
        .collect())
}

/// Winners under the tiered-formula rule: everyone or nobody.
///
/// Voter weights play no role; `voters` are the cast ballots with their
/// voters' names.
pub fn tiered_winners(candidates: &[Name], voters: &[(Name, Ballot)]) -> BTreeSet<CandidateId> {
    let none = BTreeSet::new();
    let Some(c) = (0..candidates.len()).min_by(|&a, &b| candidates[a].cmp(&candidates[b])) else {
        return none;
    };
    let Ok(formula) = Formula::parse(candidates[c].as_bytes()) else {
        return none;
    };
    let (t, inhabited) = TieredFormula::shape(formula);
    if voters.len() < t.blocks || candidates.len() < 1 + 2 * t.width || !inhabited {
        return none;
    }
    let mut order: Vec<&(Name, Ballot)> = voters.iter().collect();
    order.sort_by(|x, y| {
        x.0.cmp(&y.0).then_with(|| {
            let a = x.1.ranking().iter().map(|&i| &candidates[i]);
            let b = y.1.ranking().iter().map(|&i| &candidates[i]);
            a.cmp(b)
        })
    });
    let mut bits = Vec::with_capacity(t.blocks);
    for (_, b) in order.iter().take(t.blocks) {
        match decode_bits(b, c, t.width, candidates) {
            Ok(v) => bits.push(v),
            Err(_) => return none,
        }
    }
    if t.formula.eval(&|i, j| bits[i - 1][j - 1]) {
        (0..candidates.len()).collect()
    } else {
        none
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(ns: &[&str]) -> Vec<Name> {
        ns.iter().map(|&n| Name::from(n)).collect()
    }

    #[test]
    fn parse_and_print() {
        let f = Formula::parse(b"x_{1,1}&!(x_{2,1}|x_{1,2})").unwrap();
        assert_eq!(
            f,
            Formula::And(vec![
                Formula::var(1, 1),
                Formula::not(Formula::Or(vec![Formula::var(2, 1), Formula::var(1, 2)])),
            ])
        );
        assert_eq!(f.to_string(), "x_{1,1}&!(x_{2,1}|x_{1,2})");
        assert!(Formula::parse(b"x_{0,1}").is_err());
        assert!(Formula::parse(b"x_{1,01}").is_err());
        assert!(Formula::parse(b"x_{1,1} ").is_err());
        assert!(Formula::parse(b"a").is_err());
        assert!(Formula::parse(b"(x_{1,1}").is_err());
        assert!(Formula::parse(b"").is_err());
    }

    #[test]
    fn tiered_shape() {
        let t = TieredFormula::parse(b"x_{1,3}|x_{2,1}").unwrap();
        assert_eq!((t.blocks, t.width), (2, 3));
        assert!(TieredFormula::parse(b"x_{2,1}").is_none());
    }

    #[test]
    fn decode_examples() {
        // candidates: c, m, n ; ballot c > n > m  (m is last, n above it)
        let c = names(&["c", "m", "n"]);
        assert_eq!(decode_bits(&Ballot::new(vec![0, 2, 1]), 0, 1, &c).unwrap(), vec![false]);
        assert_eq!(decode_bits(&Ballot::new(vec![0, 1, 2]), 0, 1, &c).unwrap(), vec![true]);
        // c is skipped wherever it sits
        assert_eq!(decode_bits(&Ballot::new(vec![2, 1, 0]), 0, 1, &c).unwrap(), vec![false]);
        // width 2: bottom four, from last upward, are p, q, r, s
        let c = names(&["c", "p", "q", "r", "s"]);
        let b = Ballot::new(vec![0, 4, 3, 2, 1]);
        assert_eq!(decode_bits(&b, 0, 2, &c).unwrap(), vec![false, false]);
        assert_eq!(
            decode_bits(&b, 0, 3, &c),
            Err(RuleError::TooFewCandidates { width: 3 })
        );
    }

    #[test]
    fn tiered_examples() {
        // x_{1,1}; bottom pair decodes to 1 when the last candidate has the larger name
        let c = names(&["x_{1,1}", "y", "z"]);
        let yes = vec![(Name::from("v"), Ballot::new(vec![0, 1, 2]))];
        assert_eq!(tiered_winners(&c, &yes), BTreeSet::from([0, 1, 2]));
        let no = vec![(Name::from("v"), Ballot::new(vec![0, 2, 1]))];
        assert!(tiered_winners(&c, &no).is_empty());

        let bad = names(&["abc", "y", "z"]);
        assert!(tiered_winners(&bad, &yes).is_empty());

        let two_blocks = names(&["x_{1,1}&x_{2,1}", "y", "z"]);
        assert!(tiered_winners(&two_blocks, &yes).is_empty());

        // too few candidates for width 2
        let wide = names(&["x_{1,2}", "y", "z"]);
        assert!(tiered_winners(&wide, &yes).is_empty());

        // uninhabited block 1
        let gap = names(&["x_{2,1}", "y", "z"]);
        let both = vec![
            (Name::from("a"), Ballot::new(vec![0, 1, 2])),
            (Name::from("b"), Ballot::new(vec![0, 1, 2])),
        ];
        assert!(tiered_winners(&gap, &both).is_empty());
    }

    #[test]
    fn voters_are_taken_in_name_order() {
        let c = names(&["x_{1,1}&!x_{2,1}", "y", "z"]);
        let t = Ballot::new(vec![0, 1, 2]); // bit 1
        let f = Ballot::new(vec![0, 2, 1]); // bit 0
        let v = vec![(Name::from("b"), f.clone()), (Name::from("a"), t.clone())];
        assert_eq!(tiered_winners(&c, &v).len(), 3);
        let v = vec![(Name::from("a"), f), (Name::from("b"), t)];
        assert!(tiered_winners(&c, &v).is_empty());
    }

    fn formula() -> impl Strategy<Value = Formula> {
        let leaf = (1usize..4, 1usize..4).prop_map(|(i, j)| Formula::var(i, j));
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                proptest::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
                proptest::collection::vec(inner, 2..4).prop_map(Formula::Or),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip(f in formula()) {
            prop_assert_eq!(Formula::parse(f.to_string().as_bytes()).unwrap(), f);
        }

        #[test]
        fn decode_ignores_the_top_of_the_ballot(
            perm in Just((0..7).collect::<Vec<usize>>()).prop_shuffle(),
            c in 0usize..7, width in 0usize..4, swap in (0usize..7, 0usize..7)
        ) {
            let names: Vec<Name> = ["a", "b", "c", "d", "e", "f", "g"].iter().map(|&n| Name::from(n)).collect();
            let b = Ballot::new(perm);
            let bits = decode_bits(&b, c, width, &names).unwrap();
            // mutate among the top |C|-1-2w entries of the ballot with c removed
            let mut rest: Vec<usize> = b.ranking().iter().copied().filter(|&x| x != c).collect();
            let free = rest.len() - 2 * width;
            if free > 0 {
                rest.swap(swap.0 % free, swap.1 % free);
            }
            let mut mutated = vec![c];
            mutated.extend(rest);
            prop_assert_eq!(decode_bits(&Ballot::new(mutated), c, width, &names).unwrap(), bits);
        }
    }
}
