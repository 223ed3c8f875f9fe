//! Integer hulls of single rows, by lattice enumeration.
//!
//! A hull is stored as generators plus integer recession rays. Packing
//! rows give down-closed hulls (kept as their maximal lattice points),
//! covering rows give hulls that are up-closed inside the variable box
//! (kept as minimal lattice points). Other rows keep every lattice point
//! in a box large enough to contain one representative of each point
//! modulo the integer rays.
//!
//! Separation solves the L1 projection of the query point onto the hull;
//! the optimal dual is a valid inequality whose violation equals the
//! distance.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::instance::{IlpInstance, InstanceClass, LinearConstraint, Relation, Sense};
use crate::lp::{Certificate, LpModel, LpStatus};
use crate::rational::{lcm_denominators, Rational};

pub const DEFAULT_CAP: u64 = 10_000_000;

/// Enumeration cap: `CLOSURELAB_CAP` if set and valid, else [`DEFAULT_CAP`].
pub fn lattice_cap() -> u64 {
    std::env::var("CLOSURELAB_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

/// Row scaled to integer data.
struct IntRow {
    a: Vec<i128>,
    rel: Relation,
    b: i128,
}

fn to_i128(v: &BigInt) -> Result<i128> {
    v.to_i128()
        .ok_or_else(|| Error::Resource(format!("coefficient {v} too large for enumeration")))
}

/// Multiplies a row by the lcm of its denominators.
pub fn integer_row(row: &LinearConstraint) -> LinearConstraint {
    let l = lcm_denominators(row.coeffs.iter().chain(std::iter::once(&row.rhs)));
    let s = Rational::from_integer(&l);
    LinearConstraint::new(
        row.coeffs.iter().map(|c| c * &s).collect(),
        row.relation,
        &row.rhs * &s,
    )
}

fn int_row(row: &LinearConstraint) -> Result<IntRow> {
    let r = integer_row(row);
    Ok(IntRow {
        a: r
            .coeffs
            .iter()
            .map(|c| to_i128(&c.numer()))
            .collect::<Result<_>>()?,
        rel: r.relation,
        b: to_i128(&r.rhs.numer())?,
    })
}

/// All integer points of the box `lo_j <= x_j <= hi_j` satisfying `rows`.
pub fn enumerate_lattice(rows: &[LinearConstraint], bx: &[(i64, i64)]) -> Result<Vec<Vec<i64>>> {
    enumerate_with_cap(rows, bx, lattice_cap())
}

pub fn enumerate_with_cap(
    rows: &[LinearConstraint],
    bx: &[(i64, i64)],
    cap: u64,
) -> Result<Vec<Vec<i64>>> {
    let n = bx.len();
    if bx.iter().any(|(l, h)| l > h) {
        return Ok(Vec::new());
    }
    let size = bx
        .iter()
        .fold(1u128, |acc, (l, h)| acc.saturating_mul((h - l + 1) as u128));
    if size > cap as u128 {
        return Err(Error::Resource(format!(
            "lattice box has {size} points, cap is {cap}"
        )));
    }
    let rows: Vec<IntRow> = rows.iter().map(int_row).collect::<Result<_>>()?;
    // suffix ranges of each row's activity
    let mut min_rest = vec![vec![0i128; n + 1]; rows.len()];
    let mut max_rest = vec![vec![0i128; n + 1]; rows.len()];
    for (r, row) in rows.iter().enumerate() {
        for j in (0..n).rev() {
            let (l, h) = (bx[j].0 as i128 * row.a[j], bx[j].1 as i128 * row.a[j]);
            min_rest[r][j] = min_rest[r][j + 1] + l.min(h);
            max_rest[r][j] = max_rest[r][j + 1] + l.max(h);
        }
    }
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    let mut act = vec![0i128; rows.len()];
    fn rec(
        j: usize,
        n: usize,
        bx: &[(i64, i64)],
        rows: &[IntRow],
        min_rest: &[Vec<i128>],
        max_rest: &[Vec<i128>],
        x: &mut Vec<i64>,
        act: &mut Vec<i128>,
        out: &mut Vec<Vec<i64>>,
    ) {
        for (r, row) in rows.iter().enumerate() {
            let lo = act[r] + min_rest[r][j];
            let hi = act[r] + max_rest[r][j];
            let ok = match row.rel {
                Relation::Le => lo <= row.b,
                Relation::Ge => hi >= row.b,
                Relation::Eq => lo <= row.b && row.b <= hi,
            };
            if !ok {
                return;
            }
        }
        if j == n {
            out.push(x.clone());
            return;
        }
        for v in bx[j].0..=bx[j].1 {
            x[j] = v;
            for (r, row) in rows.iter().enumerate() {
                act[r] += row.a[j] * v as i128;
            }
            rec(j + 1, n, bx, rows, min_rest, max_rest, x, act, out);
            for (r, row) in rows.iter().enumerate() {
                act[r] -= row.a[j] * v as i128;
            }
        }
    }
    rec(0, n, bx, &rows, &min_rest, &max_rest, &mut x, &mut act, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullKind {
    /// down-closed in the non-negative orthant
    Down,
    /// up-closed inside the variable box
    Up,
    /// no monotone structure
    General,
}

#[derive(Debug, Clone)]
pub struct Hull {
    pub n: usize,
    pub kind: HullKind,
    /// generators: the hull is conv(points) + cone(rays), closed downward
    /// or upward according to `kind`
    pub points: Vec<Vec<i64>>,
    pub rays: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Separation {
    Inside,
    Cut {
        cut: LinearConstraint,
        violation: Rational,
    },
    /// the hull has no points
    Empty,
}

fn cap_i64(v: &BigInt) -> i64 {
    v.to_i64().unwrap_or(i64::MAX / 4).min(i64::MAX / 4)
}

fn unit(n: usize, j: usize) -> Vec<i64> {
    let mut e = vec![0; n];
    e[j] = 1;
    e
}

impl Hull {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn point_r(p: &[i64]) -> Vec<Rational> {
        p.iter().map(|&v| Rational::from_int(v)).collect()
    }

    /// Membership of `x`; for `Down` hulls `x >= 0` and for `Up` hulls
    /// `0 <= x <= u` are assumed.
    pub fn contains(&self, x: &[Rational]) -> bool {
        matches!(self.separate(x), Separation::Inside)
    }

    /// Separates `x` from the hull by L1 projection.
    pub fn separate(&self, x: &[Rational]) -> Separation {
        if self.is_empty() {
            return Separation::Empty;
        }
        let n = self.n;
        let slacks = match self.kind {
            HullKind::General => 0,
            _ => n,
        };
        let cols = self.points.len() + self.rays.len() + slacks + 2 * n;
        let mut cost = vec![Rational::zero(); cols];
        let err0 = cols - 2 * n;
        for c in cost.iter_mut().skip(err0) {
            *c = Rational::from_int(-1);
        }
        let mut lp = LpModel::new(Sense::Max, cost);
        for j in 0..n {
            let mut row = vec![Rational::zero(); cols];
            let mut c = 0;
            for p in &self.points {
                row[c] = Rational::from_int(p[j]);
                c += 1;
            }
            for r in &self.rays {
                row[c] = Rational::from_int(r[j]);
                c += 1;
            }
            if slacks > 0 {
                row[c + j] = Rational::from_int(if self.kind == HullKind::Down { -1 } else { 1 });
            }
            row[err0 + 2 * j] = Rational::one();
            row[err0 + 2 * j + 1] = Rational::from_int(-1);
            lp.add_row(row, Some(x[j].clone()), Some(x[j].clone()));
        }
        let mut conv = vec![Rational::zero(); cols];
        for c in conv.iter_mut().take(self.points.len()) {
            *c = Rational::one();
        }
        lp.add_row(conv, Some(Rational::one()), Some(Rational::one()));
        let res = lp.solve();
        assert_eq!(res.status, LpStatus::Optimal, "projection LP is always feasible");
        let dist = -res.value.clone().unwrap();
        if dist.is_zero() {
            return Separation::Inside;
        }
        let Certificate::Dual(y) = res.certificate else {
            unreachable!("optimal results carry duals")
        };
        // pi = -y over coordinates, sigma = -y over the convexity row
        let pi: Vec<Rational> = y[..n].iter().map(|v| -v).collect();
        let sigma = -&y[n];
        let cut = self.normalized_cut(pi, -sigma);
        let violation = cut.violation(x);
        debug_assert!(violation.is_positive());
        debug_assert!(self.is_valid(&cut));
        Separation::Cut { cut, violation }
    }

    /// `pi . x <= rhs`, scaled to coprime integers; `>=` form with
    /// non-negative coefficients for up-closed hulls.
    fn normalized_cut(&self, pi: Vec<Rational>, rhs: Rational) -> LinearConstraint {
        let l = Rational::from_integer(&lcm_denominators(pi.iter().chain(std::iter::once(&rhs))));
        let mut coeffs: Vec<Rational> = pi.iter().map(|c| c * &l).collect();
        let mut b = &rhs * &l;
        let g = coeffs
            .iter()
            .chain(std::iter::once(&b))
            .fold(BigInt::zero(), |g, v| g.gcd(&v.numer()));
        if !g.is_zero() && !g.is_one() {
            let gr = Rational::from_integer(&g);
            for c in coeffs.iter_mut() {
                *c = &*c / &gr;
            }
            b = &b / &gr;
        }
        let cut = LinearConstraint::le(coeffs, b);
        if self.kind == HullKind::Up {
            cut.negated()
        } else {
            cut
        }
    }

    /// Checks an inequality against every generator, ray and closure
    /// direction.
    pub fn is_valid(&self, cut: &LinearConstraint) -> bool {
        let le = match cut.relation {
            Relation::Le => cut.clone(),
            Relation::Ge => cut.negated(),
            Relation::Eq => return false,
        };
        self.points.iter().all(|p| le.is_satisfied(&Self::point_r(p)))
            && self
                .rays
                .iter()
                .all(|r| !le.activity(&Self::point_r(r)).is_positive())
            && match self.kind {
                HullKind::Down => le.coeffs.iter().all(|c| !c.is_negative()),
                HullKind::Up => le.coeffs.iter().all(|c| !c.is_positive()),
                HullKind::General => true,
            }
    }

    /// Extreme points among the generators.
    pub fn vertices(&self) -> Vec<Vec<i64>> {
        (0..self.points.len())
            .filter(|&i| {
                let others = Hull {
                    n: self.n,
                    kind: self.kind,
                    points: self
                        .points
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != i)
                        .map(|(_, p)| p.clone())
                        .collect(),
                    rays: self.rays.clone(),
                };
                others.is_empty() || !others.contains(&Self::point_r(&self.points[i]))
            })
            .map(|i| self.points[i].clone())
            .collect()
    }
}

/// Keeps maximal (Down) or minimal (Up) points of a lattice set that is
/// closed in that direction.
fn extremal(points: Vec<Vec<i64>>, kind: HullKind) -> Vec<Vec<i64>> {
    let step = match kind {
        HullKind::Down => 1,
        HullKind::Up => -1,
        HullKind::General => return points,
    };
    let set: HashSet<Vec<i64>> = points.iter().cloned().collect();
    points
        .into_iter()
        .filter(|p| {
            (0..p.len()).all(|j| {
                let mut q = p.clone();
                q[j] += step;
                !set.contains(&q)
            })
        })
        .collect()
}

/// Hull kind used for rows of an instance of the given class.
pub fn kind_for(class: InstanceClass) -> HullKind {
    match class {
        InstanceClass::Packing => HullKind::Down,
        InstanceClass::Covering | InstanceClass::CoveringWithBounds => HullKind::Up,
        InstanceClass::General => HullKind::General,
    }
}

/// Integer hull of `{x in Z^n : row, 0 <= x <= u}`.
pub fn row_integer_hull(
    row: &LinearConstraint,
    upper: &[Option<BigInt>],
    class: InstanceClass,
) -> Result<Hull> {
    row_hull_with_cap(row, upper, kind_for(class), lattice_cap())
}

pub fn row_hull_with_cap(
    row: &LinearConstraint,
    upper: &[Option<BigInt>],
    kind: HullKind,
    cap: u64,
) -> Result<Hull> {
    let n = row.dim();
    assert_eq!(upper.len(), n);
    let nonneg = row.coeffs.iter().all(|c| !c.is_negative()) && !row.rhs.is_negative();
    match kind {
        HullKind::Down => {
            if row.relation != Relation::Le || !nonneg || upper.iter().any(Option::is_some) {
                return Err(Error::precondition(format!(
                    "packing hull needs a non-negative <= row without bounds: {row}"
                )));
            }
            let mut rays = Vec::new();
            let mut bx = Vec::with_capacity(n);
            for j in 0..n {
                if row.coeffs[j].is_zero() {
                    rays.push(unit(n, j));
                    bx.push((0, 0));
                } else {
                    bx.push((0, cap_i64(&(&row.rhs / &row.coeffs[j]).floor())));
                }
            }
            let pts = enumerate_with_cap(std::slice::from_ref(row), &bx, cap)?;
            Ok(Hull {
                n,
                kind,
                points: extremal(pts, kind),
                rays,
            })
        }
        HullKind::Up => {
            if row.relation != Relation::Ge || !nonneg {
                return Err(Error::precondition(format!(
                    "covering hull needs a non-negative >= row: {row}"
                )));
            }
            let mut rays = Vec::new();
            let mut bx = Vec::with_capacity(n);
            for j in 0..n {
                if upper[j].is_none() {
                    rays.push(unit(n, j));
                }
                if row.coeffs[j].is_zero() {
                    bx.push((0, 0));
                } else {
                    let c = (&row.rhs / &row.coeffs[j]).ceil();
                    let c = match &upper[j] {
                        Some(u) if *u < c => u.clone(),
                        _ => c,
                    };
                    bx.push((0, cap_i64(&c)));
                }
            }
            let pts = enumerate_with_cap(std::slice::from_ref(row), &bx, cap)?;
            Ok(Hull {
                n,
                kind,
                points: extremal(pts, kind),
                rays,
            })
        }
        HullKind::General => general_row_hull(row, upper, cap),
    }
}

fn general_row_hull(row: &LinearConstraint, upper: &[Option<BigInt>], cap: u64) -> Result<Hull> {
    let n = row.dim();
    let ir = integer_row(row);
    let a: Vec<BigInt> = ir.coeffs.iter().map(|c| c.numer()).collect();
    let b = ir.rhs.numer();
    // canonical orientation a.d <= 0 for recession directions
    let sign: i32 = if row.relation == Relation::Ge { -1 } else { 1 };
    let free: Vec<usize> = (0..n).filter(|&j| upper[j].is_none()).collect();
    let mut rays: Vec<Vec<BigInt>> = Vec::new();
    for &j in &free {
        let aj = &a[j] * sign;
        let ok = match row.relation {
            Relation::Eq => aj.is_zero(),
            _ => !aj.is_positive(),
        };
        if ok {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::one();
            rays.push(e);
        }
    }
    for &j in &free {
        for &k in &free {
            let (aj, ak) = (&a[j] * sign, &a[k] * sign);
            if aj.is_positive() && ak.is_negative() {
                let mut r = vec![BigInt::zero(); n];
                let g = aj.gcd(&ak);
                r[j] = -&ak / &g;
                r[k] = &aj / &g;
                rays.push(r);
            }
        }
    }
    // vertex coordinate bound, plus one copy of every ray
    let fixed_mass: BigInt = (0..n)
        .filter_map(|k| upper[k].as_ref().map(|u| a[k].abs() * u))
        .sum();
    let mut bx = Vec::with_capacity(n);
    for j in 0..n {
        let vertex = if a[j].is_zero() {
            upper[j].clone().unwrap_or_default()
        } else {
            let v = Rational::new(b.abs() + &fixed_mass, a[j].abs()).floor();
            match &upper[j] {
                Some(u) if *u < v => u.clone(),
                _ => v,
            }
        };
        let ray_mass: BigInt = rays.iter().map(|r| r[j].clone()).sum();
        let mut hi = vertex + ray_mass;
        if let Some(u) = &upper[j] {
            if *u < hi {
                hi = u.clone();
            }
        }
        bx.push((0, cap_i64(&hi)));
    }
    let pts = enumerate_with_cap(std::slice::from_ref(row), &bx, cap)?;
    let rays = rays
        .into_iter()
        .map(|r| r.iter().map(cap_i64).collect())
        .collect();
    Ok(Hull {
        n,
        kind: HullKind::General,
        points: pts,
        rays,
    })
}

#[derive(Debug, Clone)]
pub struct HullOptimum {
    pub status: LpStatus,
    pub value: Option<Rational>,
    pub point: Option<Vec<Rational>>,
    pub cuts: Vec<LinearConstraint>,
}

/// Optimizes the instance objective over the LP relaxation intersected
/// with the given hulls, by separating LP optima until none is cut off.
pub fn optimize_over_hulls(inst: &IlpInstance, hulls: &[Hull]) -> HullOptimum {
    let mut lp = LpModel::from_instance(inst);
    let mut cuts = Vec::new();
    if hulls.iter().any(Hull::is_empty) {
        return HullOptimum {
            status: LpStatus::Infeasible,
            value: None,
            point: None,
            cuts,
        };
    }
    loop {
        let res = lp.solve();
        if res.status != LpStatus::Optimal {
            return HullOptimum {
                status: res.status,
                value: None,
                point: res.point,
                cuts,
            };
        }
        let x = res.point.unwrap();
        let mut added = false;
        for h in hulls {
            if let Separation::Cut { cut, .. } = h.separate(&x) {
                lp.add_constraint(&cut);
                cuts.push(cut);
                added = true;
            }
        }
        if !added {
            return HullOptimum {
                status: LpStatus::Optimal,
                value: res.value,
                point: Some(x),
                cuts,
            };
        }
    }
}

/// Optimum over the intersection of the single-row integer hulls.
pub fn optimize_over_hull_intersection(inst: &IlpInstance) -> Result<HullOptimum> {
    let class = inst.classify()?;
    let hulls = inst
        .rows
        .iter()
        .map(|r| row_integer_hull(r, &inst.upper, class))
        .collect::<Result<Vec<_>>>()?;
    Ok(optimize_over_hulls(inst, &hulls))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_family, Family};
    use crate::rational::{q, qi};
    use proptest::prelude::*;

    fn sorted(mut v: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
        v.sort();
        v
    }

    #[test]
    fn enumerate_examples() {
        let row = LinearConstraint::from_ints(&[1, 1], Relation::Le, 1);
        assert_eq!(
            sorted(enumerate_lattice(&[row], &[(0, 1), (0, 1)]).unwrap()),
            vec![vec![0, 0], vec![0, 1], vec![1, 0]]
        );
        let rows = [
            LinearConstraint::from_ints(&[1, 2], Relation::Ge, 2),
            LinearConstraint::from_ints(&[2, 1], Relation::Ge, 2),
        ];
        assert_eq!(
            sorted(enumerate_lattice(&rows, &[(0, 2), (0, 2)]).unwrap()),
            sorted(vec![
                vec![2, 0],
                vec![0, 2],
                vec![1, 1],
                vec![2, 1],
                vec![1, 2],
                vec![2, 2]
            ])
        );
        assert_eq!(enumerate_lattice(&[], &[(0, 0); 3]).unwrap(), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn enumerate_cap_is_explicit() {
        let r = enumerate_with_cap(&[], &[(0, 9); 4], 1000);
        assert!(matches!(r, Err(Error::Resource(_))));
        assert_eq!(enumerate_with_cap(&[], &[(0, 9); 3], 1000).unwrap().len(), 1000);
    }

    #[test]
    fn packing_row_hull() {
        let row = LinearConstraint::from_ints(&[1, 3], Relation::Le, 3);
        let h = row_integer_hull(&row, &[None, None], InstanceClass::Packing).unwrap();
        let mut v = h.vertices();
        v.push(vec![0, 0]); // origin is implied by down-closure
        assert_eq!(sorted(v), vec![vec![0, 0], vec![0, 1], vec![3, 0]]);
        assert!(h.rays.is_empty());
        // the row is integral: its LP corner is inside
        assert!(h.contains(&[qi(0), qi(1)]));
        assert!(h.contains(&[q(3, 2), q(1, 2)]));
    }

    #[test]
    fn covering_row_with_bounds_hull() {
        let row = LinearConstraint::from_ints(&[1, 1, 3], Relation::Ge, 3);
        let u = vec![Some(BigInt::from(1)); 3];
        let h = row_integer_hull(&row, &u, InstanceClass::CoveringWithBounds).unwrap();
        assert!(h.points.iter().all(|p| p[2] == 1));
        let x = [qi(1), qi(1), q(1, 3)];
        match h.separate(&x) {
            Separation::Cut { cut, .. } => {
                assert_eq!(cut, LinearConstraint::from_ints(&[0, 0, 1], Relation::Ge, 1))
            }
            other => panic!("unexpected {other:?}"),
        }
        // the box point u is in the hull
        assert!(h.contains(&[qi(1), qi(1), qi(1)]));
    }

    #[test]
    fn covering_row_without_bounds_hull() {
        let row = LinearConstraint::from_ints(&[2, 1], Relation::Ge, 2);
        let h = row_integer_hull(&row, &[None, None], InstanceClass::Covering).unwrap();
        assert_eq!(sorted(h.vertices()), vec![vec![0, 2], vec![1, 0]]);
        assert_eq!(sorted(h.rays.clone()), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn separation_examples() {
        let row = LinearConstraint::from_ints(&[1, 1], Relation::Le, 1);
        let h = row_integer_hull(&row, &[None, None], InstanceClass::Packing).unwrap();
        assert_eq!(h.separate(&[q(1, 2), q(1, 2)]), Separation::Inside);
        assert_eq!(
            h.separate(&[qi(2), qi(2)]),
            Separation::Cut {
                cut: row.clone(),
                violation: qi(3)
            }
        );
        let with_ray = LinearConstraint::from_ints(&[0, 1], Relation::Le, 1);
        let h = row_integer_hull(&with_ray, &[None, None], InstanceClass::Packing).unwrap();
        assert_eq!(h.separate(&[qi(1_000_000), qi(0)]), Separation::Inside);
    }

    #[test]
    fn empty_hull_is_distinct() {
        let row = LinearConstraint::from_ints(&[0, 0], Relation::Ge, 1);
        let h = row_integer_hull(&row, &[None, None], InstanceClass::Covering).unwrap();
        assert!(h.is_empty());
        assert_eq!(h.separate(&[qi(0), qi(0)]), Separation::Empty);
        let row = LinearConstraint::from_ints(&[2, 2], Relation::Eq, 1);
        let h = row_integer_hull(&row, &[None, None], InstanceClass::General).unwrap();
        assert!(h.is_empty());
    }

    #[test]
    fn general_rays() {
        // 25 x1 - 4 x2 <= 25: recession cone spanned by e2 and (4, 25)
        let row = LinearConstraint::from_ints(&[25, -4], Relation::Le, 25);
        let h = row_integer_hull(&row, &[None, None], InstanceClass::General).unwrap();
        assert_eq!(sorted(h.rays.clone()), vec![vec![0, 1], vec![4, 25]]);
        assert!(h.contains(&[qi(1), qi(0)]));
        assert!(h.contains(&[qi(5), qi(25)]));
        assert!(!h.contains(&[q(6, 5), qi(1)]));
    }

    #[test]
    fn hull_intersection_examples() {
        let pt = gen_family(Family::PackingTight, 3).unwrap();
        assert_eq!(optimize_over_hull_intersection(&pt).unwrap().value.unwrap(), q(3, 2));
        let ct = gen_family(Family::CoveringTight, 2).unwrap();
        assert_eq!(optimize_over_hull_intersection(&ct).unwrap().value.unwrap(), q(4, 3));
        let nc = gen_family(Family::Noncover, 5).unwrap();
        let v = optimize_over_hull_intersection(&nc).unwrap().value.unwrap();
        assert!(v >= q(34, 5), "{v}");
    }

    #[test]
    fn unbounded_over_rays() {
        // max x1 + x2 over x2 <= 1: x1 is a ray direction
        let inst = IlpInstance::new(
            "r",
            Sense::Max,
            vec![qi(1), qi(1)],
            vec![LinearConstraint::from_ints(&[0, 1], Relation::Le, 1)],
            vec![None, None],
        )
        .unwrap();
        assert_eq!(
            optimize_over_hull_intersection(&inst).unwrap().status,
            LpStatus::Unbounded
        );
    }

    /// Brute-force membership in conv of a 2D point set, via all triangles.
    fn in_triangle_hull(points: &[Vec<i64>], x: &[Rational]) -> bool {
        let pr: Vec<Vec<Rational>> = points.iter().map(|p| Hull::point_r(p)).collect();
        let cross = |o: &[Rational], a: &[Rational], b: &[Rational]| {
            (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
        };
        for i in 0..pr.len() {
            for j in i..pr.len() {
                for k in j..pr.len() {
                    let (a, b, c) = (&pr[i], &pr[j], &pr[k]);
                    let d1 = cross(a, b, x);
                    let d2 = cross(b, c, x);
                    let d3 = cross(c, a, x);
                    let neg = d1.is_negative() || d2.is_negative() || d3.is_negative();
                    let pos = d1.is_positive() || d2.is_positive() || d3.is_positive();
                    if !(neg && pos) {
                        // inside or on the boundary; degenerate triangles need a segment check
                        let on_seg = |p: &[Rational], q: &[Rational]| {
                            cross(p, q, x).is_zero()
                                && (0..2).all(|t| {
                                    x[t] >= p[t].clone().min(q[t].clone())
                                        && x[t] <= p[t].clone().max(q[t].clone())
                                })
                        };
                        let area = cross(a, b, c);
                        if !area.is_zero() || on_seg(a, b) || on_seg(b, c) || on_seg(a, c) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn packing_cuts_are_nonnegative(
            a in prop::collection::vec(0i64..=6, 1..=4),
            b in 0i64..=12,
            x in prop::collection::vec((0i64..=12, 1i64..=4), 4),
        ) {
            let n = a.len();
            let row = LinearConstraint::from_ints(&a, Relation::Le, b);
            let h = row_integer_hull(&row, &vec![None; n], InstanceClass::Packing).unwrap();
            let xs: Vec<Rational> = x[..n].iter().map(|&(p, d)| q(p, d)).collect();
            if let Separation::Cut { cut, violation } = h.separate(&xs) {
                prop_assert!(cut.coeffs.iter().all(|c| !c.is_negative()));
                prop_assert!(!cut.rhs.is_negative());
                prop_assert!(violation.is_positive());
                prop_assert_eq!(violation, cut.violation(&xs));
                prop_assert!(h.is_valid(&cut));
            }
        }

        #[test]
        fn covering_bounded_hull_contains_u(
            a in prop::collection::vec(0i64..=6, 1..=4),
            b in 0i64..=12,
            u in prop::collection::vec(0i64..=3, 4),
        ) {
            let n = a.len();
            let row = LinearConstraint::from_ints(&a, Relation::Ge, b);
            let ub: Vec<Option<BigInt>> = u[..n].iter().map(|&v| Some(BigInt::from(v))).collect();
            let h = row_integer_hull(&row, &ub, InstanceClass::CoveringWithBounds).unwrap();
            let ur: Vec<Rational> = u[..n].iter().map(|&v| qi(v)).collect();
            prop_assert_eq!(h.is_empty(), !row.is_satisfied(&ur));
            if !h.is_empty() {
                prop_assert!(h.contains(&ur));
            }
        }

        #[test]
        fn general_membership_matches_2d_enumeration(
            a in prop::collection::vec(-5i64..=5, 2),
            b in -6i64..=8,
            rel in 0u8..3,
            u in prop::collection::vec(1i64..=6, 2),
            x in prop::collection::vec((0i64..=12, 1i64..=3), 2),
        ) {
            let rel = [Relation::Le, Relation::Ge, Relation::Eq][rel as usize];
            let row = LinearConstraint::from_ints(&a, rel, b);
            let ub: Vec<Option<BigInt>> = u.iter().map(|&v| Some(BigInt::from(v))).collect();
            let h = row_integer_hull(&row, &ub, InstanceClass::General).unwrap();
            let xs: Vec<Rational> = x.iter().map(|&(p, d)| q(p, d)).collect();
            // independent oracle: every lattice point of the full box
            let all: Vec<Vec<i64>> = (0..=u[0])
                .flat_map(|i| (0..=u[1]).map(move |j| vec![i, j]))
                .filter(|p| row.is_satisfied(&Hull::point_r(p)))
                .collect();
            prop_assert_eq!(h.contains(&xs) && !h.is_empty(), !all.is_empty() && in_triangle_hull(&all, &xs));
        }
    }
}
