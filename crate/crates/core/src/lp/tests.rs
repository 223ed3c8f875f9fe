use super::*;
use crate::instance::{gen_family, Family};
use crate::rational::{q, qi};
use proptest::prelude::*;

#[test]
fn packing_tight_vertex() {
    let inst = gen_family(Family::PackingTight, 3).unwrap();
    let res = solve_lp(&inst, &[]);
    assert_eq!(res.status, LpStatus::Optimal);
    assert_eq!(res.point.clone().unwrap(), vec![q(3, 4), q(3, 4)]);
    assert_eq!(res.value.clone().unwrap(), q(3, 2));
    assert!(LpModel::from_instance(&inst).verify(&res));
}

#[test]
fn fstab_value() {
    let inst = gen_family(Family::Fstab, 4).unwrap();
    assert_eq!(solve_lp(&inst, &[]).value.unwrap(), qi(2));
}

#[test]
fn infeasible_with_certificate() {
    let mut lp = LpModel::new(Sense::Max, vec![qi(1), qi(1)]);
    lp.add_constraint(&LinearConstraint::from_ints(&[1, 0], Relation::Le, -1));
    let res = lp.solve();
    assert_eq!(res.status, LpStatus::Infeasible);
    assert!(matches!(res.certificate, Certificate::Farkas(_)));
    assert!(lp.verify(&res));
    // a forged certificate is rejected
    let forged = LpResult {
        certificate: Certificate::Farkas(vec![qi(0)]),
        ..res
    };
    assert!(!lp.verify(&forged));
}

#[test]
fn unbounded_with_ray() {
    let mut lp = LpModel::new(Sense::Max, vec![qi(1), qi(0)]);
    lp.add_constraint(&LinearConstraint::from_ints(&[1, -1], Relation::Le, 2));
    let res = lp.solve();
    assert_eq!(res.status, LpStatus::Unbounded);
    assert!(lp.verify(&res));
}

#[test]
fn min_sense_and_ge_rows() {
    let inst = gen_family(Family::CoveringTight, 2).unwrap();
    let mut lp = LpModel::from_instance(&inst);
    let res = lp.solve();
    assert_eq!(res.value.clone().unwrap(), q(4, 3));
    assert!(lp.verify(&res));
}

#[test]
fn warm_start_matches_cold_solve() {
    let inst = gen_family(Family::PackingTight, 3).unwrap();
    let mut lp = LpModel::from_instance(&inst);
    lp.solve();
    let cut = LinearConstraint::from_ints(&[1, 1], Relation::Le, 1);
    lp.add_constraint(&cut);
    let warm = lp.solve();
    assert!(lp.verify(&warm));
    assert_eq!(warm.value, solve_lp(&inst, &[cut]).value);
    assert_eq!(warm.value.unwrap(), qi(1));
    lp.set_var_bounds(0, Some(qi(0)), Some(qi(0)));
    let res = lp.solve();
    assert!(lp.verify(&res));
    assert_eq!(res.value.unwrap(), qi(1));
    lp.set_var_bounds(1, Some(q(3, 2)), None);
    let res = lp.solve();
    assert_eq!(res.status, LpStatus::Infeasible);
    assert!(lp.verify(&res));
}

#[test]
fn range_rows() {
    // max x s.t. 1 <= x + y <= 3, y >= 1/2
    let mut lp = LpModel::new(Sense::Max, vec![qi(1), qi(0)]);
    lp.add_row(vec![qi(1), qi(1)], Some(qi(1)), Some(qi(3)));
    lp.set_var_bounds(1, Some(q(1, 2)), None);
    let res = lp.solve();
    assert_eq!(res.value.clone().unwrap(), q(5, 2));
    assert!(lp.verify(&res));
}

#[test]
fn free_variables() {
    // min x + y, x free, y free, x + y >= -2, x - y <= 1, x <= 4
    let mut lp = LpModel::new(Sense::Min, vec![qi(1), qi(1)]);
    lp.set_var_bounds(0, None, Some(qi(4)));
    lp.set_var_bounds(1, None, None);
    lp.add_constraint(&LinearConstraint::from_ints(&[1, 1], Relation::Ge, -2));
    lp.add_constraint(&LinearConstraint::from_ints(&[1, -1], Relation::Le, 1));
    let res = lp.solve();
    assert_eq!(res.value.clone().unwrap(), qi(-2));
    assert!(lp.verify(&res));
}

/// Solves `M z = v` by Gaussian elimination; `None` unless unique.
fn solve_square(mut m: Vec<Vec<Rational>>, mut v: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = v.len();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        v.swap(col, p);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for c in col..n {
                    let sub = &f * &m[col][c];
                    m[r][c] -= sub;
                }
                let sub = &f * &v[col];
                v[r] -= sub;
            }
        }
    }
    Some((0..n).map(|i| &v[i] / &m[i][i]).collect())
}

/// Best vertex by enumerating all n-subsets of tight constraints.
fn vertex_oracle(
    cost: &[Rational],
    rows: &[(Vec<Rational>, Option<Rational>, Option<Rational>)],
    box_hi: &Rational,
) -> Option<Rational> {
    let n = cost.len();
    let mut planes: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for j in 0..n {
        let mut e = vec![qi(0); n];
        e[j] = qi(1);
        planes.push((e.clone(), qi(0)));
        planes.push((e, box_hi.clone()));
    }
    for (a, lo, hi) in rows {
        for b in [lo, hi].into_iter().flatten() {
            planes.push((a.clone(), b.clone()));
        }
    }
    let feasible = |x: &[Rational]| {
        x.iter().all(|v| !v.is_negative() && v <= box_hi)
            && rows.iter().all(|(a, lo, hi)| {
                let act = dot(a, x);
                lo.as_ref().map_or(true, |l| act >= *l) && hi.as_ref().map_or(true, |h| act <= *h)
            })
    };
    let mut best: Option<Rational> = None;
    let k = planes.len();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let m: Vec<Vec<Rational>> = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let v: Vec<Rational> = idx.iter().map(|&i| planes[i].1.clone()).collect();
        if let Some(x) = solve_square(m, v) {
            if feasible(&x) {
                let val = dot(cost, &x);
                if best.as_ref().map_or(true, |b| val > *b) {
                    best = Some(val);
                }
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < k - n + i {
                idx[i] += 1;
                for t in i + 1..n {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn small() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=3).prop_map(|(a, b)| q(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_vertex_oracle(
        n in 1usize..=3,
        raw in prop::collection::vec(
            (prop::collection::vec(small(), 3), small(), 0u8..4),
            1..=4),
        cost in prop::collection::vec(small(), 3),
    ) {
        let cost = cost[..n].to_vec();
        let hi = qi(5);
        let rows: Vec<(Vec<Rational>, Option<Rational>, Option<Rational>)> = raw
            .into_iter()
            .map(|(a, b, kind)| {
                let a = a[..n].to_vec();
                match kind {
                    0 => (a, None, Some(b)),
                    1 => (a, Some(b), None),
                    2 => (a, Some(b.clone()), Some(b)),
                    _ => (a, Some(b.clone()), Some(&b + &qi(2))),
                }
            })
            .collect();
        let mut lp = LpModel::new(Sense::Max, cost.clone());
        for j in 0..n {
            lp.set_var_bounds(j, Some(qi(0)), Some(hi.clone()));
        }
        for (a, lo, h) in &rows {
            lp.add_row(a.clone(), lo.clone(), h.clone());
        }
        let res = lp.solve();
        prop_assert!(lp.verify(&res));
        let oracle = vertex_oracle(&cost, &rows, &hi);
        match res.status {
            LpStatus::Optimal => prop_assert_eq!(res.value, oracle),
            LpStatus::Infeasible => prop_assert!(oracle.is_none()),
            LpStatus::Unbounded => prop_assert!(false, "bounded box reported unbounded"),
        }
    }

    #[test]
    fn row_permutation_keeps_value(seed in 0u64..200) {
        let inst = crate::instance::gen_random_boxed(seed);
        let mut rev = inst.clone();
        rev.rows.reverse();
        let a = solve_lp(&inst, &[]);
        let b = solve_lp(&rev, &[]);
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.value, b.value);
    }

    #[test]
    fn adding_rows_is_monotone(seed in 0u64..100, extra in prop::collection::vec(-3i64..=3, 6), rhs in 0i64..6) {
        let inst = crate::instance::gen_random_boxed(seed);
        let cut = LinearConstraint::from_ints(&extra[..inst.n()], Relation::Le, rhs);
        let mut lp = LpModel::from_instance(&inst);
        let before = lp.solve();
        lp.add_constraint(&cut);
        let after = lp.solve();
        prop_assert!(lp.verify(&after));
        prop_assert_eq!(&after.value, &solve_lp(&inst, &[cut]).value);
        if let (Some(b), Some(a)) = (before.value, after.value) {
            match inst.sense {
                Sense::Max => prop_assert!(a <= b),
                Sense::Min => prop_assert!(a >= b),
            }
        }
    }
}
