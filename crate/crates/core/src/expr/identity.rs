use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;

use super::parse::parse_sides;
use super::{prove_binet, AffineIndex, Assignment, FibExpr, ProofOutcome};
use crate::error::{Error, Result};

/// Grid for unconstrained variables.
pub const DEFAULT_SPAN: (i64, i64) = (-12, 12);
/// Number of values tried for a variable bounded below (`r >= 1` gives `1..=8`).
pub const PARAM_SPAN: i64 = 8;

pub type GridRanges = BTreeMap<String, (i64, i64)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predicate {
    Any,
    Even,
    Odd,
    AtLeast(i64),
    NonZero,
}

impl Predicate {
    pub fn admits(self, v: i64) -> bool {
        match self {
            Predicate::Any => true,
            Predicate::Even => v.rem_euclid(2) == 0,
            Predicate::Odd => v.rem_euclid(2) == 1,
            Predicate::AtLeast(k) => v >= k,
            Predicate::NonZero => v != 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub var: String,
    pub pred: Predicate,
}

impl Constraint {
    pub fn new(var: &str, pred: Predicate) -> Self {
        Self {
            var: var.to_string(),
            pred,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pred {
            Predicate::Any => write!(f, "{} any", self.var),
            Predicate::Even => write!(f, "{} even", self.var),
            Predicate::Odd => write!(f, "{} odd", self.var),
            Predicate::AtLeast(k) => write!(f, "{} >= {k}", self.var),
            Predicate::NonZero => write!(f, "{} != 0", self.var),
        }
    }
}

/// Accepts `n any`, `n even`, `n odd`, `r >= 1`, `m != 0`.
impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            pos: 0,
            msg: format!("bad constraint `{}`", s.trim()),
        };
        let words: Vec<&str> = s.split_whitespace().collect();
        let (var, pred) = match words.as_slice() {
            [v, "any"] => (v, Predicate::Any),
            [v, "even"] => (v, Predicate::Even),
            [v, "odd"] => (v, Predicate::Odd),
            [v, ">=", k] => (v, Predicate::AtLeast(k.parse().map_err(|_| bad())?)),
            [v, "!=", "0"] => (v, Predicate::NonZero),
            _ => return Err(bad()),
        };
        if !var.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(bad());
        }
        Ok(Constraint::new(var, pred))
    }
}

/// Range a variable is checked over when no override is given.
pub fn default_range(constraints: &[Constraint], var: &str) -> (i64, i64) {
    constraints
        .iter()
        .filter(|c| c.var == var)
        .find_map(|c| match c.pred {
            Predicate::AtLeast(k) => Some((k, k + PARAM_SPAN - 1)),
            _ => None,
        })
        .unwrap_or(DEFAULT_SPAN)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub assignment: Assignment,
    pub lhs: BigRational,
    pub rhs: BigRational,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub total: usize,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `lhs = rhs` over the declared integer variables, restricted by
/// `constraints`.
#[derive(Debug, Clone, PartialEq)]
pub struct Identity {
    pub label: String,
    pub lhs: FibExpr,
    pub rhs: FibExpr,
    pub variables: Vec<String>,
    pub constraints: Vec<Constraint>,
}

impl Identity {
    pub fn new(label: &str, lhs: FibExpr, rhs: FibExpr) -> Self {
        let mut vars = lhs.variables();
        vars.extend(rhs.variables());
        Self {
            label: label.to_string(),
            lhs,
            rhs,
            variables: vars.into_iter().collect(),
            constraints: Vec::new(),
        }
    }

    /// Parses `text` and checks every variable it uses against `declared`.
    pub fn parse_declared(label: &str, text: &str, declared: &[&str]) -> Result<Self> {
        let (lhs, rhs) = parse_sides(text)?;
        let mut id = Self::new(label, lhs, rhs);
        if let Some(v) = id.variables.iter().find(|v| !declared.contains(&v.as_str())) {
            return Err(Error::UnknownVariable(v.clone()));
        }
        id.variables = declared.iter().map(|s| s.to_string()).collect();
        id.variables.sort();
        id.variables.dedup();
        Ok(id)
    }

    pub fn parse(label: &str, text: &str) -> Result<Self> {
        let (lhs, rhs) = parse_sides(text)?;
        Ok(Self::new(label, lhs, rhs))
    }

    pub fn with_constraints(mut self, constraints: Vec<Constraint>) -> Result<Self> {
        if let Some(c) = constraints.iter().find(|c| !self.variables.contains(&c.var)) {
            return Err(Error::UnknownVariable(c.var.clone()));
        }
        self.constraints = constraints;
        Ok(self)
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    /// `lhs - rhs`
    pub fn difference(&self) -> FibExpr {
        &self.lhs - &self.rhs
    }

    pub fn admits(&self, assignment: &Assignment) -> bool {
        self.constraints
            .iter()
            .all(|c| assignment.get(&c.var).is_none_or(|&v| c.pred.admits(v)))
    }

    /// Substitutes inside both sides. Constraints on `var` are dropped since
    /// the variable no longer means the same thing.
    pub fn substitute(&self, var: &str, replacement: &AffineIndex) -> Self {
        let mut out = Self::new(
            &self.label,
            self.lhs.substitute(var, replacement),
            self.rhs.substitute(var, replacement),
        );
        out.constraints = self
            .constraints
            .iter()
            .filter(|c| c.var != var && out.variables.contains(&c.var))
            .cloned()
            .collect();
        out
    }

    pub fn grid(&self, overrides: &GridRanges) -> GridRanges {
        self.variables
            .iter()
            .map(|v| {
                let r = overrides
                    .get(v)
                    .copied()
                    .unwrap_or_else(|| default_range(&self.constraints, v));
                (v.clone(), r)
            })
            .collect()
    }

    fn check(&self, a: &Assignment) -> Option<Failure> {
        let lhs = self.lhs.eval(a).expect("all variables bound");
        let rhs = self.rhs.eval(a).expect("all variables bound");
        (lhs != rhs).then(|| Failure {
            assignment: a.clone(),
            lhs,
            rhs,
        })
    }

    fn for_each_point(&self, overrides: &GridRanges, mut visit: impl FnMut(&Assignment) -> bool) -> usize {
        let grid: Vec<(String, (i64, i64))> = self.grid(overrides).into_iter().collect();
        if grid.iter().any(|(_, (lo, hi))| lo > hi) {
            return 0;
        }
        let mut point: Assignment = grid.iter().map(|(v, (lo, _))| (v.clone(), *lo)).collect();
        let mut visited = 0;
        loop {
            if self.admits(&point) {
                visited += 1;
                if !visit(&point) {
                    return visited;
                }
            }
            // odometer step
            let mut carried = true;
            for (v, (lo, hi)) in grid.iter().rev() {
                let slot = point.get_mut(v).expect("grid variable");
                if *slot < *hi {
                    *slot += 1;
                    carried = false;
                    break;
                }
                *slot = *lo;
            }
            if carried {
                return visited;
            }
        }
    }

    /// Evaluates both sides at every admissible grid point. Variables missing
    /// from `overrides` use [`default_range`].
    pub fn verify_grid(&self, overrides: &GridRanges) -> VerifyReport {
        let mut failures = Vec::new();
        let total = self.for_each_point(overrides, |a| {
            failures.extend(self.check(a));
            true
        });
        VerifyReport { total, failures }
    }

    /// First failing grid point, if any.
    pub fn find_counterexample(&self, overrides: &GridRanges) -> Option<Failure> {
        let mut found = None;
        self.for_each_point(overrides, |a| {
            found = self.check(a);
            found.is_none()
        });
        found
    }

    pub fn prove(&self) -> Result<ProofOutcome> {
        prove_binet(self)
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}
