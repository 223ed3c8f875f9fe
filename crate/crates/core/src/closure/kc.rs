//! Knapsack-cover inequalities and the KC closure of covering instances.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::instance::{IlpInstance, LinearConstraint, Relation};
use crate::lp::{LpModel, LpStatus};
use crate::rational::Rational;

use super::ClosureValue;

/// Exhaustive subset enumeration is limited to this many variables.
pub const KC_MAX_VARS: usize = 22;

/// `sum_{j not in S} min(A_j, r) x_j >= r` with `r = b - sum_{j in S} u_j A_j`;
/// when `r <= 0` the result is the trivial `0 >= r`.
pub fn kc_inequality(
    row: &LinearConstraint,
    upper: &[Option<BigInt>],
    s: &[usize],
) -> Result<LinearConstraint> {
    if row.relation != Relation::Ge {
        return Err(Error::validation(format!("KC inequalities need a >= row: {row}")));
    }
    let mut r = row.rhs.clone();
    let mut in_s = vec![false; row.dim()];
    for &j in s {
        let u = upper[j]
            .as_ref()
            .ok_or_else(|| Error::validation(format!("x{} has no finite bound", j + 1)))?;
        r -= &row.coeffs[j] * &Rational::from_integer(u);
        in_s[j] = true;
    }
    let coeffs = if r.is_positive() {
        (0..row.dim())
            .map(|j| {
                if in_s[j] {
                    Rational::zero()
                } else {
                    row.coeffs[j].clone().min(r.clone())
                }
            })
            .collect()
    } else {
        vec![Rational::zero(); row.dim()]
    };
    Ok(LinearConstraint::ge(coeffs, r))
}

/// The most violated KC inequality of one row at `x`, if any.
pub fn separate_kc(
    row: &LinearConstraint,
    upper: &[Option<BigInt>],
    x: &[Rational],
) -> Result<Option<LinearConstraint>> {
    let cand: Vec<usize> = (0..row.dim())
        .filter(|&j| !row.coeffs[j].is_zero() && upper[j].is_some())
        .collect();
    let mut best: Option<(Rational, LinearConstraint)> = None;
    let mut s = Vec::with_capacity(cand.len());
    for mask in 0u64..(1u64 << cand.len()) {
        s.clear();
        s.extend((0..cand.len()).filter(|&t| mask >> t & 1 == 1).map(|t| cand[t]));
        let kc = kc_inequality(row, upper, &s)?;
        let v = kc.violation(x);
        if v.is_positive() && best.as_ref().map_or(true, |(b, _)| v > *b) {
            best = Some((v, kc));
        }
    }
    Ok(best.map(|(_, kc)| kc))
}

#[derive(Debug, Clone)]
pub struct KcResult {
    pub value: ClosureValue,
    pub cuts: Vec<LinearConstraint>,
}

/// Optimum over the KC closure of a covering instance.
pub fn z_kc(inst: &IlpInstance) -> Result<KcResult> {
    let class = inst.classify()?;
    if !class.is_covering() {
        return Err(Error::Class(format!("KC closure needs a covering instance, got {class}")));
    }
    if inst.n() > KC_MAX_VARS {
        return Err(Error::Resource(format!(
            "KC separation enumerates subsets; n = {} exceeds {KC_MAX_VARS}",
            inst.n()
        )));
    }
    let mut lp = LpModel::from_instance(inst);
    let mut cuts = Vec::new();
    loop {
        let res = lp.solve();
        match res.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Ok(KcResult { value: ClosureValue::Infeasible, cuts }),
            LpStatus::Unbounded => return Ok(KcResult { value: ClosureValue::Unbounded, cuts }),
        }
        let x = res.point.unwrap();
        let mut added = false;
        for row in &inst.rows {
            if let Some(kc) = separate_kc(row, &inst.upper, &x)? {
                lp.add_constraint(&kc);
                cuts.push(kc);
                added = true;
            }
        }
        if !added {
            return Ok(KcResult {
                value: ClosureValue::Value(res.value.unwrap()),
                cuts,
            });
        }
    }
}
