use std::fmt;

use super::ReductionError;

/// `x_var` or its negation; variables are numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, positive: false }
    }

    pub fn negated(self) -> Self {
        Literal {
            positive: !self.positive,
            ..self
        }
    }

    /// Value under an assignment where `assignment[i]` belongs to `x_{i+1}`.
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var - 1] == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.var)
        } else {
            write!(f, "-{}", self.var)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause(pub Vec<Literal>);

impl Clause {
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.0.iter().any(|l| l.eval(assignment))
    }
}

/// A conjunction of clauses over `x_1 .. x_{num_vars}`. Variables beyond
/// the highest one used may still count toward the assignment length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self, ReductionError> {
        for cl in &clauses {
            if let Some(l) = cl.0.iter().find(|l| l.var == 0 || l.var > num_vars) {
                return Err(ReductionError::NotThreeCnf(format!(
                    "literal {l} outside x_1..x_{num_vars}"
                )));
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.eval(assignment))
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.clauses.iter().flat_map(|c| &c.0).any(|l| l.var == var)
    }
}

/// A CNF formula with exactly three literals in every clause.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThreeCnfFormula(CnfFormula);

impl ThreeCnfFormula {
    pub fn new(f: CnfFormula) -> Result<Self, ReductionError> {
        if let Some(c) = f.clauses.iter().find(|c| c.0.len() != 3) {
            return Err(ReductionError::NotThreeCnf(format!(
                "clause with {} literals",
                c.0.len()
            )));
        }
        Ok(ThreeCnfFormula(f))
    }

    pub fn from_clauses(num_vars: usize, clauses: Vec<[Literal; 3]>) -> Result<Self, ReductionError> {
        let clauses = clauses.into_iter().map(|c| Clause(c.to_vec())).collect();
        Self::new(CnfFormula::new(num_vars, clauses)?)
    }

    pub fn cnf(&self) -> &CnfFormula {
        &self.0
    }

    pub fn num_vars(&self) -> usize {
        self.0.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.0.clauses
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.0.eval(assignment)
    }
}
