//! Chvátal-Gomory cut separation by mixed-integer programming.
//!
//! Rows are brought to `<=` form with integer data. For a point `x*` the
//! separation problem chooses multipliers `mu` on the enabled rows and
//! `lambda` on the upper-bound rows `x_j <= u_j`, integer `alpha` on the
//! support of `x*` and integer `beta`, such that the fractional parts
//! `mu.A_j + lambda_j - alpha_j` and `mu.b + lambda.u - beta` lie in
//! `[0, 1 - eps]`, maximizing `alpha.x* - beta`. Coordinates with
//! `x*_j = 0` do not affect the violation and are rounded afterwards.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use std::time::Instant;


use crate::error::{Error, Result};
use crate::hull::integer_row;
use crate::instance::{IlpInstance, LinearConstraint, Relation, Sense};
use crate::lp::LpModel;
use crate::mip::{solve_model_hooked, MipOptions, MipStatus};
use crate::rational::Rational;

/// Multiplier box tolerances tried in order by the closure loops.
pub fn eps_ladder() -> [Rational; 4] {
    [
        Rational::from_ratio(1, 4),
        Rational::from_ratio(1, 64),
        Rational::from_ratio(1, 1024),
        Rational::from_ratio(1, 65536),
    ]
}

/// A CG cut `alpha.x <= beta` (or `>=` when presented in covering form).
#[derive(Debug, Clone, PartialEq)]
pub struct CgCut {
    pub alpha: Vec<BigInt>,
    pub beta: BigInt,
    pub relation: Relation,
    /// weight on the `<=` form of each row (`>=` rows negated); zero for
    /// rows outside the mask
    pub row_multipliers: Vec<Rational>,
    /// weight on each bound row `x_j <= u_j`
    pub bound_multipliers: Vec<Rational>,
    pub violation: Rational,
    /// `alpha.x* - beta` of the rounded aggregate before dividing out the
    /// content; this is the quantity the separation problem maximizes
    pub raw_violation: Rational,
}

impl CgCut {
    pub fn to_constraint(&self) -> LinearConstraint {
        LinearConstraint::new(
            self.alpha.iter().map(Rational::from_integer).collect(),
            self.relation,
            Rational::from_integer(&self.beta),
        )
    }
}

/// Which rows may receive a nonzero multiplier. Bound rows are always
/// available.
pub type RowMask = Vec<bool>;

pub fn full_mask(inst: &IlpInstance) -> RowMask {
    vec![true; inst.m()]
}

/// One mask per row, enabling that row alone.
pub fn one_row_masks(inst: &IlpInstance) -> Vec<RowMask> {
    (0..inst.m())
        .map(|i| (0..inst.m()).map(|k| k == i).collect())
        .collect()
}

/// `<=` form of row `i` with integer data, and the factor applied to the
/// original row.
fn le_form(row: &LinearConstraint) -> (LinearConstraint, Rational) {
    let ir = integer_row(row);
    let scale = if row.coeffs.iter().chain(std::iter::once(&row.rhs)).any(|v| !v.is_zero()) {
        // recover the factor from the first nonzero entry
        let (o, s) = row
            .coeffs
            .iter()
            .zip(&ir.coeffs)
            .chain(std::iter::once((&row.rhs, &ir.rhs)))
            .find(|(o, _)| !o.is_zero())
            .unwrap();
        s / o
    } else {
        Rational::one()
    };
    match row.relation {
        Relation::Ge => {
            let mut le = ir.negated();
            le.relation = Relation::Le;
            (le, -scale)
        }
        _ => (ir, scale),
    }
}

/// Builds the cut obtained from the given multipliers by rounding down the
/// aggregated `<=` row, then divides out the content of the coefficients.
/// `row_multipliers` weight the `<=` form of each original row.
pub fn cut_from_multipliers(
    rows: &[LinearConstraint],
    upper: &[Option<BigInt>],
    row_multipliers: &[Rational],
    bound_multipliers: &[Rational],
    x_star: &[Rational],
) -> CgCut {
    let (mut alpha, mut beta) = round_aggregate(rows, upper, row_multipliers, bound_multipliers);
    let raw = LinearConstraint::new(
        alpha.iter().map(Rational::from_integer).collect(),
        Relation::Le,
        Rational::from_integer(&beta),
    );
    let raw_violation = &raw.activity(x_star) - &raw.rhs;
    let g = alpha.iter().fold(BigInt::zero(), |g, a| g.gcd(a));
    if !g.is_zero() && !g.is_one() {
        for a in alpha.iter_mut() {
            *a = &*a / &g;
        }
        beta = beta.div_floor(&g);
    }
    let mut cut = CgCut {
        alpha,
        beta,
        relation: Relation::Le,
        row_multipliers: row_multipliers.to_vec(),
        bound_multipliers: bound_multipliers.to_vec(),
        violation: Rational::zero(),
        raw_violation,
    };
    if cut.alpha.iter().all(|a| !a.is_positive()) && cut.alpha.iter().any(|a| a.is_negative()) {
        for a in cut.alpha.iter_mut() {
            *a = -&*a;
        }
        cut.beta = -&cut.beta;
        cut.relation = Relation::Ge;
    }
    cut.violation = cut.to_constraint().violation(x_star);
    cut
}

/// Floors of the aggregated `<=` row `sum_i w_i (A_i x <= b_i) + lambda (x <= u)`.
fn round_aggregate(
    rows: &[LinearConstraint],
    upper: &[Option<BigInt>],
    row_multipliers: &[Rational],
    bound_multipliers: &[Rational],
) -> (Vec<BigInt>, BigInt) {
    let n = upper.len();
    let mut agg = vec![Rational::zero(); n];
    let mut rhs = Rational::zero();
    for (row, w) in rows.iter().zip(row_multipliers) {
        if w.is_zero() {
            continue;
        }
        let f = if row.relation == Relation::Ge { -w } else { w.clone() };
        for j in 0..n {
            if !row.coeffs[j].is_zero() {
                agg[j] += &f * &row.coeffs[j];
            }
        }
        rhs += &f * &row.rhs;
    }
    for j in 0..n {
        let l = &bound_multipliers[j];
        if !l.is_zero() {
            let u = upper[j].as_ref().expect("bound multiplier on an unbounded variable");
            agg[j] += l;
            rhs += l * &Rational::from_integer(u);
        }
    }
    (agg.iter().map(Rational::floor).collect(), rhs.floor())
}

/// Most violated CG cut at `x_star` using multipliers on the masked rows
/// and all bound rows, or `None` if no cut in the multiplier box is
/// violated.
pub fn separate_cg(
    rows: &[LinearConstraint],
    upper: &[Option<BigInt>],
    x_star: &[Rational],
    mask: &[bool],
    eps: &Rational,
) -> Result<Option<CgCut>> {
    Ok(separate_cg_pool(rows, upper, x_star, mask, eps, &SepOptions::default())?.into_iter().next())
}

/// Search controls for [`separate_cg_pool`].
#[derive(Debug, Clone, Default)]
pub struct SepOptions {
    /// stop at the first cut whose undivided violation reaches this
    pub good_enough: Option<Rational>,
    /// also return the other violated cuts met during the search
    pub keep_pool: bool,
    /// give up with a resource error after this instant
    pub deadline: Option<Instant>,
    /// with `good_enough`, stop once this many distinct cuts reach it
    /// (0 counts as 1)
    pub good_cuts: usize,
}

/// As [`separate_cg`], but the search may stop early and return several
/// cuts, see [`SepOptions`]. The best cut comes
/// first; an empty result still means no violated cut exists in the
/// multiplier box.
pub fn separate_cg_pool(
    rows: &[LinearConstraint],
    upper: &[Option<BigInt>],
    x_star: &[Rational],
    mask: &[bool],
    eps: &Rational,
    sep: &SepOptions,
) -> Result<Vec<CgCut>> {
    let good_enough = sep.good_enough.as_ref();
    let keep_pool = sep.keep_pool;
    let n = upper.len();
    if x_star.len() != n || mask.len() != rows.len() || rows.iter().any(|r| r.dim() != n) {
        return Err(Error::validation("dimension mismatch in CG separation"));
    }
    if !eps.is_positive() || *eps >= Rational::one() {
        return Err(Error::validation(format!("eps {eps} must lie in (0, 1)")));
    }
    if x_star.iter().any(Rational::is_negative) {
        return Err(Error::validation("x_star must be non-negative"));
    }
    let one_minus = &Rational::one() - eps;
    let support: Vec<usize> = (0..n).filter(|&j| x_star[j].is_positive()).collect();
    if support.is_empty() {
        // alpha.x* = 0 and beta >= floor of a combination that 0 satisfies
        return Ok(Vec::new());
    }
    let active: Vec<usize> = (0..rows.len()).filter(|&i| mask[i]).collect();
    let forms: Vec<(LinearConstraint, Rational)> = active.iter().map(|&i| le_form(&rows[i])).collect();
    let bounded: Vec<usize> = support.iter().copied().filter(|&j| upper[j].is_some()).collect();

    // columns: mu (active) | lambda (bounded) | alpha (support) | beta
    let nmu = active.len();
    let nl = bounded.len();
    let ns = support.len();
    let ncols = nmu + nl + ns + 1;
    let col_alpha = nmu + nl;
    let col_beta = ncols - 1;
    let mut cost = vec![Rational::zero(); ncols];
    for (k, &j) in support.iter().enumerate() {
        cost[col_alpha + k] = x_star[j].clone();
    }
    cost[col_beta] = -Rational::one();
    let mut lp = LpModel::new(Sense::Max, cost);
    // equality rows also take mu in [0, 1): shifting mu by an integer adds
    // integer copies of the equation, which leaves the cut unchanged on
    // the affine hull and its violation at x_star unchanged
    for k in 0..nmu {
        lp.set_var_bounds(k, Some(Rational::zero()), Some(one_minus.clone()));
    }
    for k in 0..nl {
        lp.set_var_bounds(nmu + k, Some(Rational::zero()), Some(one_minus.clone()));
    }
    for (k, &j) in support.iter().enumerate() {
        let mut lo = -Rational::one();
        let mut hi = Rational::one();
        for f in &forms {
            let a = &f.0.coeffs[j];
            if a.is_positive() {
                hi += a;
            } else {
                lo += a;
            }
        }
        if upper[j].is_some() {
            hi += Rational::one();
        }
        lp.set_var_bounds(col_alpha + k, Some(lo.floor_r()), Some(hi.ceil_r()));
    }
    let mut blo = -Rational::one();
    let mut bhi = Rational::one();
    for f in &forms {
        let b = &f.0.rhs;
        if b.is_positive() {
            bhi += b;
        } else {
            blo += b;
        }
    }
    for &j in &bounded {
        bhi += Rational::from_integer(upper[j].as_ref().unwrap());
    }
    lp.set_var_bounds(col_beta, Some(blo.floor_r()), Some(bhi.ceil_r()));

    for (k, &j) in support.iter().enumerate() {
        let mut row = vec![Rational::zero(); ncols];
        for (t, f) in forms.iter().enumerate() {
            row[t] = f.0.coeffs[j].clone();
        }
        if let Some(p) = bounded.iter().position(|&b| b == j) {
            row[nmu + p] = Rational::one();
        }
        row[col_alpha + k] = -Rational::one();
        lp.add_row(row, Some(Rational::zero()), Some(one_minus.clone()));
    }
    let mut row = vec![Rational::zero(); ncols];
    for (t, f) in forms.iter().enumerate() {
        row[t] = f.0.rhs.clone();
    }
    for (p, &j) in bounded.iter().enumerate() {
        row[nmu + p] = Rational::from_integer(upper[j].as_ref().unwrap());
    }
    row[col_beta] = -Rational::one();
    lp.add_row(row, Some(Rational::zero()), Some(one_minus.clone()));

    let mut integer = vec![false; ncols];
    for v in integer.iter_mut().skip(col_alpha) {
        *v = true;
    }
    let opts = MipOptions {
        cutoff: Some(Rational::zero()),
        node_limit: None,
        target: good_enough.cloned(),
        keep_pool,
        deadline: sep.deadline,
    };
    // every node LP optimum gives multipliers whose rounding is a valid
    // CG cut; collect the violated ones
    let mut found: Vec<CgCut> = Vec::new();
    let mut stopped = false;
    let mut hits = 0usize;
    let collect = keep_pool || good_enough.is_some();
    let mut hook = |sol: &[Rational]| -> bool {
        if !collect {
            return false;
        }
        let (rm, bm) = multipliers_of(rows.len(), n, &active, &forms, &bounded, sol);
        let cut = cut_from_multipliers(rows, upper, &rm, &bm, x_star);
        if !cut.violation.is_positive() {
            return false;
        }
        let good = good_enough.map_or(false, |g| cut.raw_violation >= *g);
        if !found.iter().any(|c| c.alpha == cut.alpha && c.beta == cut.beta) {
            found.push(cut);
            hits += good as usize;
        }
        stopped |= hits >= sep.good_cuts.max(1);
        stopped
    };
    let res = solve_model_hooked(lp, &integer, &opts, &mut hook)?;
    let mut out: Vec<CgCut> = Vec::new();
    if res.status == MipStatus::Optimal {
        let best = res.point.unwrap();
        for sol in std::iter::once(&best).chain(res.pool.iter().rev()) {
            out.push(cut_from_solution(rows, upper, x_star, &active, &forms, &bounded, &support, sol));
        }
        if !stopped {
            debug_assert_eq!(out.first().map(|c| &c.raw_violation), res.value.as_ref());
        }
    }
    out.extend(found);
    if stopped {
        out.sort_by(|a, b| b.violation.cmp(&a.violation));
    }
    let mut uniq: Vec<CgCut> = Vec::new();
    for cut in out {
        if cut.violation.is_positive() && !uniq.iter().any(|c| c.alpha == cut.alpha && c.beta == cut.beta) {
            uniq.push(cut);
        }
    }
    Ok(uniq)
}

/// Row and bound multipliers encoded in a separation LP point.
fn multipliers_of(
    m: usize,
    n: usize,
    active: &[usize],
    forms: &[(LinearConstraint, Rational)],
    bounded: &[usize],
    sol: &[Rational],
) -> (Vec<Rational>, Vec<Rational>) {
    let nmu = active.len();
    let mut row_mult = vec![Rational::zero(); m];
    for (t, &i) in active.iter().enumerate() {
        // weight on the <= form of the original row
        row_mult[i] = &sol[t] * &forms[t].1.abs();
    }
    let mut bound_mult = vec![Rational::zero(); n];
    for (p, &j) in bounded.iter().enumerate() {
        bound_mult[j] = sol[nmu + p].clone();
    }
    (row_mult, bound_mult)
}

/// Reads the multipliers off a separation solution and rebuilds the cut,
/// checking that rounding reproduces the solution's integer part.
#[allow(clippy::too_many_arguments)]
fn cut_from_solution(
    rows: &[LinearConstraint],
    upper: &[Option<BigInt>],
    x_star: &[Rational],
    active: &[usize],
    forms: &[(LinearConstraint, Rational)],
    bounded: &[usize],
    support: &[usize],
    sol: &[Rational],
) -> CgCut {
    let nmu = active.len();
    let col_alpha = nmu + bounded.len();
    let col_beta = col_alpha + support.len();
    let (row_mult, bound_mult) = multipliers_of(rows.len(), upper.len(), active, forms, bounded, sol);
    // rounding the multipliers must reproduce the integer part of the MIP
    let (alpha0, beta0) = round_aggregate(rows, upper, &row_mult, &bound_mult);
    for (k, &j) in support.iter().enumerate() {
        assert_eq!(Rational::from_integer(&alpha0[j]), sol[col_alpha + k], "alpha mismatch");
    }
    assert_eq!(Rational::from_integer(&beta0), sol[col_beta], "beta mismatch");
    cut_from_multipliers(rows, upper, &row_mult, &bound_mult, x_star)
}

/// Tries the eps ladder in order; returns the most violated cut at the
/// first tolerance that yields one, and the tolerance.
pub fn separate_cg_ladder(
    rows: &[LinearConstraint],
    upper: &[Option<BigInt>],
    x_star: &[Rational],
    mask: &[bool],
) -> Result<Option<(CgCut, Rational)>> {
    for eps in eps_ladder() {
        if let Some(cut) = separate_cg(rows, upper, x_star, mask, &eps)? {
            return Ok(Some((cut, eps)));
        }
    }
    Ok(None)
}

/// Ladder variant of [`separate_cg_pool`]: all cuts from the first
/// tolerance that yields any. `sep.keep_pool` is honored as given.
pub fn separate_cg_ladder_pool(
    rows: &[LinearConstraint],
    upper: &[Option<BigInt>],
    x_star: &[Rational],
    mask: &[bool],
    sep: &SepOptions,
) -> Result<Vec<CgCut>> {
    for eps in eps_ladder() {
        let cuts = separate_cg_pool(rows, upper, x_star, mask, &eps, sep)?;
        if !cuts.is_empty() {
            return Ok(cuts);
        }
    }
    Ok(Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::enumerate_lattice;
    use crate::instance::{gen_family, gen_random_boxed, Family};
    use crate::rational::{q, qi};
    use proptest::prelude::*;

    fn eps() -> Rational {
        q(1, 64)
    }

    #[test]
    fn packing_tight_cut() {
        let inst = gen_family(Family::PackingTight, 3).unwrap();
        let x = [q(3, 4), q(3, 4)];
        // halving both rows gives 2x1 + 2x2 <= 3, i.e. x1 + x2 <= 1
        let half = cut_from_multipliers(&inst.rows, &inst.upper, &[q(1, 4), q(1, 4)], &[qi(0), qi(0)], &x);
        assert_eq!(half.to_constraint(), LinearConstraint::from_ints(&[1, 1], Relation::Le, 1));
        assert_eq!(half.violation, q(1, 2));
        // the most violated cut is 3x1 + 2x2 <= 3 from mu = (3/8, 7/8)
        let cut = separate_cg(&inst.rows, &inst.upper, &x, &full_mask(&inst), &eps())
            .unwrap()
            .unwrap();
        assert_eq!(cut.to_constraint(), LinearConstraint::from_ints(&[3, 2], Relation::Le, 3));
        assert_eq!(cut.violation, q(3, 4));
        // no cut is more violated
        let best = cut_from_multipliers(&inst.rows, &inst.upper, &[q(3, 8), q(7, 8)], &[qi(0), qi(0)], &x);
        assert_eq!(best.to_constraint(), cut.to_constraint());
    }

    #[test]
    fn covering_tight_cut() {
        let inst = gen_family(Family::CoveringTight, 2).unwrap();
        let x = [q(2, 3), q(2, 3)];
        let cut = separate_cg(&inst.rows, &inst.upper, &x, &full_mask(&inst), &eps())
            .unwrap()
            .unwrap();
        assert_eq!(cut.to_constraint(), LinearConstraint::from_ints(&[1, 1], Relation::Ge, 2));
        assert_eq!(cut.violation, q(2, 3));
    }

    #[test]
    fn noncover_cut_x1_le_1() {
        let inst = gen_family(Family::Noncover, 5).unwrap();
        let lp = crate::lp::solve_lp(&inst, &[]);
        let x = lp.point.unwrap();
        assert_eq!(x, vec![q(9, 5), qi(5)]);
        let cut = separate_cg(&inst.rows, &inst.upper, &x, &full_mask(&inst), &eps())
            .unwrap()
            .unwrap();
        assert!(cut.violation.is_positive());
    }

    #[test]
    fn integer_points_are_never_cut() {
        let inst = gen_family(Family::PackingTight, 3).unwrap();
        for x in [[qi(1), qi(0)], [qi(0), qi(0)], [qi(0), qi(1)]] {
            assert!(separate_cg(&inst.rows, &inst.upper, &x, &full_mask(&inst), &eps())
                .unwrap()
                .is_none());
        }
    }

    #[test]
    fn masks() {
        let inst = gen_family(Family::PackingTight, 3).unwrap();
        assert_eq!(one_row_masks(&inst), vec![vec![true, false], vec![false, true]]);
        assert_eq!(one_row_masks(&gen_family(Family::CoveringTight, 3).unwrap()).len(), 3);
        assert_eq!(one_row_masks(&crate::instance::gen_random_general(10, 1)).len(), 5);
    }

    #[test]
    fn one_row_cut_kills_oversized_coefficient() {
        // 3 x1 + x2 <= 2: the single row already implies x1 <= 0
        let row = LinearConstraint::from_ints(&[3, 1], Relation::Le, 2);
        let x = [q(1, 3), qi(1)];
        let cut = separate_cg(&[row], &[None, None], &x, &[true], &eps()).unwrap().unwrap();
        // dominates x1 <= 0 at x: coefficient on x1 positive, violation at least 1/3
        assert!(cut.violation >= q(1, 3));
    }

    #[test]
    fn bad_arguments() {
        let inst = gen_family(Family::PackingTight, 3).unwrap();
        let x = [q(3, 4), q(3, 4)];
        assert!(separate_cg(&inst.rows, &inst.upper, &x, &[true], &eps()).is_err());
        assert!(separate_cg(&inst.rows, &inst.upper, &x, &[true, true], &qi(1)).is_err());
    }

    fn boxed_with_lp_point(seed: u64) -> Option<(IlpInstance, Vec<Rational>)> {
        let inst = gen_random_boxed(seed);
        let res = crate::lp::solve_lp(&inst, &[]);
        res.point.map(|x| (inst, x))
    }

    fn lattice(inst: &IlpInstance, mask: &[bool]) -> Vec<Vec<Rational>> {
        let rows: Vec<LinearConstraint> = inst
            .rows
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(r, _)| r.clone())
            .collect();
        let bx: Vec<(i64, i64)> = inst
            .upper
            .iter()
            .map(|u| (0, i64::try_from(u.as_ref().unwrap()).unwrap()))
            .collect();
        enumerate_lattice(&rows, &bx)
            .unwrap()
            .into_iter()
            .map(|p| p.into_iter().map(qi).collect())
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]

        #[test]
        fn cuts_are_valid_and_violation_exact(seed in 0u64..5000, row_pick in 0usize..4) {
            let Some((inst, x)) = boxed_with_lp_point(seed) else { return Ok(()) };
            let masks = [full_mask(&inst), one_row_masks(&inst)[row_pick % inst.m()].clone()];
            for mask in masks {
                if let Some(cut) = separate_cg(&inst.rows, &inst.upper, &x, &mask, &q(1, 16)).unwrap() {
                    let c = cut.to_constraint();
                    for p in lattice(&inst, &mask) {
                        prop_assert!(c.is_satisfied(&p), "cut {} cuts off {:?}", c, p);
                    }
                    let act = c.activity(&x);
                    let expect = match c.relation {
                        Relation::Le => &act - &c.rhs,
                        _ => &c.rhs - &act,
                    };
                    prop_assert_eq!(&cut.violation, &expect);
                    prop_assert!(cut.violation.is_positive());
                    // rounding the reported multipliers reproduces the cut
                    let again = cut_from_multipliers(&inst.rows, &inst.upper, &cut.row_multipliers, &cut.bound_multipliers, &x);
                    prop_assert_eq!(again.to_constraint(), c);
                }
            }
        }

        #[test]
        fn smaller_mask_is_weaker(seed in 0u64..5000, row_pick in 0usize..4) {
            let Some((inst, x)) = boxed_with_lp_point(seed) else { return Ok(()) };
            let e = q(1, 16);
            let full = separate_cg(&inst.rows, &inst.upper, &x, &full_mask(&inst), &e).unwrap();
            let one = separate_cg(&inst.rows, &inst.upper, &x, &one_row_masks(&inst)[row_pick % inst.m()], &e).unwrap();
            // compare the raw MIP optimum through the cut before content division
            let raw = |c: Option<CgCut>| c.map(|c| c.raw_violation).unwrap_or_else(Rational::zero);
            prop_assert!(raw(one) <= raw(full));
        }
    }
}
