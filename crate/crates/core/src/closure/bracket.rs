//! Brackets on the aggregation-closure optimum from sampled aggregations.

use crate::error::{Error, Result};
use crate::hull::{kind_for, lattice_cap, optimize_over_hulls, row_hull_with_cap, Hull};
use crate::instance::{IlpInstance, InstanceClass, LinearConstraint, Sense};
use crate::lp::LpStatus;
use crate::mip::{solve_mip, MipStatus};
use crate::rational::{qi, Rational};
use crate::rng::Stream;

use super::kc::z_kc;
use super::lpstar::lp_star;
use super::ClosureValue;

pub const RANDOM_LAMBDAS: usize = 20;
pub const LAMBDA_MAX_ENTRY: i64 = 4;

/// Unit vectors, pairwise sums and seeded random vectors with entries in
/// `0..=4`, deduplicated.
pub fn default_lambdas(m: usize, seed: u64) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    let unit = |i: usize| -> Vec<Rational> { (0..m).map(|k| qi((k == i) as i64)).collect() };
    for i in 0..m {
        out.push(unit(i));
    }
    for i in 0..m {
        for k in i + 1..m {
            out.push((0..m).map(|t| qi((t == i || t == k) as i64)).collect());
        }
    }
    let mut rng = Stream::new("lambda", &[m as u64], seed);
    let mut drawn = 0;
    while drawn < RANDOM_LAMBDAS && m > 0 {
        let v: Vec<Rational> = (0..m).map(|_| qi(rng.int(0, LAMBDA_MAX_ENTRY))).collect();
        if v.iter().all(Rational::is_zero) {
            continue;
        }
        drawn += 1;
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// `lambda^T (A x <relation> b)` for rows sharing one relation.
pub fn aggregate(rows: &[LinearConstraint], lambda: &[Rational]) -> Result<LinearConstraint> {
    if lambda.len() != rows.len() {
        return Err(Error::validation(format!(
            "multiplier has {} entries for {} rows",
            lambda.len(),
            rows.len()
        )));
    }
    if lambda.iter().any(Rational::is_negative) {
        return Err(Error::validation("aggregation multipliers must be non-negative"));
    }
    let n = rows.first().map_or(0, LinearConstraint::dim);
    let rel = rows[0].relation;
    let mut coeffs = vec![Rational::zero(); n];
    let mut rhs = Rational::zero();
    for (r, l) in rows.iter().zip(lambda) {
        if l.is_zero() {
            continue;
        }
        for (c, a) in coeffs.iter_mut().zip(&r.coeffs) {
            *c += l * a;
        }
        rhs += l * &r.rhs;
    }
    Ok(LinearConstraint::new(coeffs, rel, rhs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggBracket {
    pub lo: Rational,
    pub hi: Rational,
    /// optimum over the intersection of the sampled aggregated-row hulls
    pub sampled: Rational,
    pub lambdas_used: usize,
    /// multipliers whose hull exceeded the enumeration cap
    pub lambdas_skipped: usize,
}

/// Optimum over the LP relaxation cut by the integer hulls of the sampled
/// aggregations, with the count of skipped multipliers.
pub fn sampled_value(
    inst: &IlpInstance,
    lambdas: &[Vec<Rational>],
) -> Result<(ClosureValue, usize, usize)> {
    let class = inst.classify()?;
    if class == InstanceClass::General {
        return Err(Error::Class("aggregation brackets need packing or covering data".into()));
    }
    let cap = lattice_cap();
    let mut hulls: Vec<Hull> = Vec::new();
    let mut skipped = 0;
    for l in lambdas {
        if l.iter().all(Rational::is_zero) {
            continue;
        }
        let row = aggregate(&inst.rows, l)?;
        match row_hull_with_cap(&row, &inst.upper, kind_for(class), cap) {
            Ok(h) => hulls.push(h),
            Err(Error::Resource(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let used = hulls.len();
    let opt = optimize_over_hulls(inst, &hulls);
    let v = match opt.status {
        LpStatus::Optimal => ClosureValue::Value(opt.value.unwrap()),
        LpStatus::Infeasible => ClosureValue::Infeasible,
        LpStatus::Unbounded => ClosureValue::Unbounded,
    };
    Ok((v, used, skipped))
}

/// Bracket given the integer optimum and, for packing, `z^LP*`, for
/// covering, `z^KC`.
pub fn agg_bracket_from(
    inst: &IlpInstance,
    lambdas: &[Vec<Rational>],
    z_ip: &Rational,
    z_aux: &Rational,
) -> Result<AggBracket> {
    let (v, used, skipped) = sampled_value(inst, lambdas)?;
    let v = v
        .value()
        .cloned()
        .ok_or_else(|| Error::precondition(format!("sampled aggregation optimum is {v}")))?;
    let (lo, hi) = match inst.sense {
        Sense::Max => (z_ip.clone().max(z_aux / &qi(2)), v.clone()),
        Sense::Min => (v.clone(), z_ip.clone().min(z_aux * &qi(2))),
    };
    Ok(AggBracket {
        lo,
        hi,
        sampled: v,
        lambdas_used: used,
        lambdas_skipped: skipped,
    })
}

/// Computes `z^I` and the approximation-side value itself.
pub fn agg_bracket(inst: &IlpInstance, lambdas: &[Vec<Rational>]) -> Result<AggBracket> {
    let class = inst.classify()?;
    let ip = solve_mip(inst, &[])?;
    if ip.status != MipStatus::Optimal {
        return Err(Error::precondition("instance has no integer point"));
    }
    let z_ip = ip.value.unwrap();
    let aux = match class {
        InstanceClass::Packing => lp_star(inst)?
            .value
            .ok_or_else(|| Error::precondition("pre-processed LP has no optimum"))?,
        InstanceClass::General => {
            return Err(Error::Class("aggregation brackets need packing or covering data".into()))
        }
        _ => z_kc(inst)?
            .value
            .value()
            .cloned()
            .ok_or_else(|| Error::precondition("KC closure has no optimum"))?,
    };
    agg_bracket_from(inst, lambdas, &z_ip, &aux)
}
