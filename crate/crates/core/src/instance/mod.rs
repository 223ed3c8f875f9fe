//! Integer program instances, their classification, generators and file format.

mod generate;
mod io;

pub use generate::*;
pub use io::{from_json, read_instance, to_json, write_instance};

use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{dot, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "LE")]
    Le,
    #[serde(rename = "GE")]
    Ge,
    #[serde(rename = "EQ")]
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

/// One row `coeffs . x  rel  rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        LinearConstraint {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn le(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Le, rhs)
    }

    pub fn ge(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Ge, rhs)
    }

    pub fn eq(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Eq, rhs)
    }

    /// Convenience constructor from small integers.
    pub fn from_ints(coeffs: &[i64], relation: Relation, rhs: i64) -> Self {
        Self::new(
            coeffs.iter().map(|&v| Rational::from_int(v)).collect(),
            relation,
            Rational::from_int(rhs),
        )
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn activity(&self, x: &[Rational]) -> Rational {
        dot(&self.coeffs, x)
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        let a = self.activity(x);
        match self.relation {
            Relation::Le => a <= self.rhs,
            Relation::Ge => a >= self.rhs,
            Relation::Eq => a == self.rhs,
        }
    }

    /// Amount by which `x` violates the row (zero when satisfied).
    pub fn violation(&self, x: &[Rational]) -> Rational {
        let a = self.activity(x);
        let v = match self.relation {
            Relation::Le => &a - &self.rhs,
            Relation::Ge => &self.rhs - &a,
            Relation::Eq => (&a - &self.rhs).abs(),
        };
        v.max(Rational::zero())
    }

    pub fn negated(&self) -> LinearConstraint {
        let relation = match self.relation {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        };
        LinearConstraint::new(
            self.coeffs.iter().map(|c| -c).collect(),
            relation,
            -&self.rhs,
        )
    }

    /// The row as one or two `<=` rows.
    pub fn to_le_rows(&self) -> Vec<LinearConstraint> {
        match self.relation {
            Relation::Le => vec![self.clone()],
            Relation::Ge => vec![self.negated()],
            Relation::Eq => {
                let mut le = self.clone();
                le.relation = Relation::Le;
                vec![le.clone(), le.negated()]
            }
        }
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len())
            .filter(|&j| !self.coeffs[j].is_zero())
            .collect()
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sep = if first { "" } else { " " };
            let (sign, mag) = if c.is_negative() {
                ("-", -c)
            } else if first {
                ("", c.clone())
            } else {
                ("+", c.clone())
            };
            let space = if first { "" } else { " " };
            if mag.is_one() {
                write!(f, "{sep}{sign}{space}x{}", j + 1)?;
            } else {
                write!(f, "{sep}{sign}{space}{mag} x{}", j + 1)?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " {} {}", self.relation.symbol(), self.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "MAX")]
    Max,
    #[serde(rename = "MIN")]
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceClass {
    Packing,
    Covering,
    CoveringWithBounds,
    General,
}

impl InstanceClass {
    pub fn is_covering(self) -> bool {
        matches!(self, InstanceClass::Covering | InstanceClass::CoveringWithBounds)
    }

    pub fn name(self) -> &'static str {
        match self {
            InstanceClass::Packing => "packing",
            InstanceClass::Covering => "covering",
            InstanceClass::CoveringWithBounds => "covering-with-bounds",
            InstanceClass::General => "general",
        }
    }
}

impl fmt::Display for InstanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `sense c.x` subject to `rows`, `0 <= x <= upper`, `x` integer.
/// `None` in `upper` means no upper bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpInstance {
    pub name: String,
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub rows: Vec<LinearConstraint>,
    pub upper: Vec<Option<BigInt>>,
}

impl IlpInstance {
    /// Builds and validates an instance.
    pub fn new(
        name: impl Into<String>,
        sense: Sense,
        objective: Vec<Rational>,
        rows: Vec<LinearConstraint>,
        upper: Vec<Option<BigInt>>,
    ) -> Result<Self> {
        let inst = IlpInstance {
            name: name.into(),
            sense,
            objective,
            rows,
            upper,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.objective.len()
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::validation("instance has no variables"));
        }
        if self.rows.is_empty() {
            return Err(Error::validation("instance has no rows"));
        }
        if self.upper.len() != n {
            return Err(Error::validation(format!(
                "upper has length {}, expected {n}",
                self.upper.len()
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.dim() != n {
                return Err(Error::validation(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.dim()
                )));
            }
        }
        for (j, u) in self.upper.iter().enumerate() {
            if let Some(u) = u {
                if u.is_negative() {
                    return Err(Error::validation(format!("upper[{j}] = {u} is negative")));
                }
            }
        }
        Ok(())
    }

    pub fn classify(&self) -> Result<InstanceClass> {
        self.validate()?;
        let nonneg = self.rows.iter().all(|r| {
            !r.rhs.is_negative() && r.coeffs.iter().all(|c| !c.is_negative())
        }) && self.objective.iter().all(|c| !c.is_negative());
        let all = |rel: Relation| self.rows.iter().all(|r| r.relation == rel);
        let unbounded = self.upper.iter().all(|u| u.is_none());
        Ok(if nonneg && all(Relation::Le) && unbounded && self.sense == Sense::Max {
            InstanceClass::Packing
        } else if nonneg && all(Relation::Ge) && self.sense == Sense::Min {
            if unbounded {
                InstanceClass::Covering
            } else {
                InstanceClass::CoveringWithBounds
            }
        } else {
            InstanceClass::General
        })
    }

    pub fn upper_rational(&self, j: usize) -> Option<Rational> {
        self.upper[j].as_ref().map(Rational::from_integer)
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    /// Feasibility for the continuous relaxation (rows and bounds).
    pub fn is_lp_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.n()
            && x.iter().enumerate().all(|(j, v)| {
                !v.is_negative()
                    && self.upper[j]
                        .as_ref()
                        .map_or(true, |u| *v <= Rational::from_integer(u))
            })
            && self.rows.iter().all(|r| r.is_satisfied(x))
    }

    pub fn is_integer_feasible(&self, x: &[Rational]) -> bool {
        x.iter().all(Rational::is_integer) && self.is_lp_feasible(x)
    }

    /// True when `a` is at least as good as `b` in this instance's sense.
    pub fn at_least_as_good(&self, a: &Rational, b: &Rational) -> bool {
        match self.sense {
            Sense::Max => a >= b,
            Sense::Min => a <= b,
        }
    }
}
