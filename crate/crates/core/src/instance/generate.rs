//! Instance generators. Every generator is a pure function of its arguments.

use num_bigint::BigInt;

use super::{IlpInstance, LinearConstraint, Relation, Sense};
use crate::error::{Error, Result};
use crate::rational::{qi, Rational};
use crate::rng::Stream;

/// Named structured families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `max x1+x2 : x1+Mx2 <= M, Mx1+x2 <= M`
    PackingTight,
    /// `max x1+x2 : k^2 x1-(k-1)x2 <= k^2, -k x1+x2 <= 1-k`
    Noncover,
    /// `min sum x : x_i + 2 sum_{j!=i} x_j >= 2`
    CoveringTight,
    /// `min x_n : x_1+..+x_{n-1} + n x_n >= n, x binary`
    CgVsKc,
    /// edge relaxation of the stable set polytope of the complete graph
    Fstab,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::PackingTight,
        Family::Noncover,
        Family::CoveringTight,
        Family::CgVsKc,
        Family::Fstab,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::PackingTight => "packing_tight",
            Family::Noncover => "noncover",
            Family::CoveringTight => "covering_tight",
            Family::CgVsKc => "cg_vs_kc",
            Family::Fstab => "fstab",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }

    fn min_param(self) -> u64 {
        match self {
            Family::PackingTight => 1,
            Family::Noncover | Family::CoveringTight | Family::CgVsKc => 2,
            Family::Fstab => 3,
        }
    }
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| qi(x)).collect()
}

pub fn gen_family(family: Family, param: u64) -> Result<IlpInstance> {
    if param < family.min_param() {
        return Err(Error::validation(format!(
            "{} requires parameter >= {}, got {param}",
            family.name(),
            family.min_param()
        )));
    }
    let name = format!("{}-{param}", family.name());
    let p = param as i64;
    match family {
        Family::PackingTight => IlpInstance::new(
            name,
            Sense::Max,
            ints(&[1, 1]),
            vec![
                LinearConstraint::from_ints(&[1, p], Relation::Le, p),
                LinearConstraint::from_ints(&[p, 1], Relation::Le, p),
            ],
            vec![None, None],
        ),
        Family::Noncover => {
            let k = p;
            IlpInstance::new(
                name,
                Sense::Max,
                ints(&[1, 1]),
                vec![
                    LinearConstraint::from_ints(&[k * k, -(k - 1)], Relation::Le, k * k),
                    LinearConstraint::from_ints(&[-k, 1], Relation::Le, 1 - k),
                ],
                vec![None, None],
            )
        }
        Family::CoveringTight => {
            let n = param as usize;
            let rows = (0..n)
                .map(|i| {
                    let c: Vec<i64> = (0..n).map(|j| if i == j { 1 } else { 2 }).collect();
                    LinearConstraint::from_ints(&c, Relation::Ge, 2)
                })
                .collect();
            IlpInstance::new(name, Sense::Min, ints(&vec![1; n]), rows, vec![None; n])
        }
        Family::CgVsKc => {
            let n = param as usize;
            let mut c = vec![1; n];
            c[n - 1] = p;
            let mut obj = vec![0; n];
            obj[n - 1] = 1;
            IlpInstance::new(
                name,
                Sense::Min,
                ints(&obj),
                vec![LinearConstraint::from_ints(&c, Relation::Ge, p)],
                vec![Some(BigInt::from(1)); n],
            )
        }
        Family::Fstab => {
            let n = param as usize;
            let mut rows = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let mut c = vec![0; n];
                    c[i] = 1;
                    c[j] = 1;
                    rows.push(LinearConstraint::from_ints(&c, Relation::Le, 1));
                }
            }
            IlpInstance::new(name, Sense::Max, ints(&vec![1; n]), rows, vec![None; n])
        }
    }
}

/// Random general instance: `floor(n/2)` equality rows, entries zero with
/// probability 1/2 and otherwise uniform on `-50..=50` (all 101 values, so
/// zero can also arise from the second branch), `u = 25`, `b = A xhat` for
/// a uniform binary `xhat`, maximize the all-ones objective.
pub fn gen_random_general(n: usize, seed: u64) -> IlpInstance {
    assert!(n >= 2, "random general instances need n >= 2");
    let m = n / 2;
    let mut s = Stream::new("random-general", &[n as u64], seed);
    let mut a = vec![vec![0i64; n]; m];
    for row in a.iter_mut() {
        for v in row.iter_mut() {
            *v = if s.coin() { 0 } else { s.int(-50, 50) };
        }
    }
    let xhat: Vec<i64> = (0..n).map(|_| s.int(0, 1)).collect();
    let rows = a
        .iter()
        .map(|r| {
            let b: i64 = r.iter().zip(&xhat).map(|(x, y)| x * y).sum();
            LinearConstraint::from_ints(r, Relation::Eq, b)
        })
        .collect();
    IlpInstance::new(
        format!("random-general-n{n}-s{seed}"),
        Sense::Max,
        ints(&vec![1; n]),
        rows,
        vec![Some(BigInt::from(25)); n],
    )
    .expect("generated instance is valid")
}

/// Market split feasibility instance with `m` rows and `10(m-1)` binaries.
pub fn gen_market_split(m: usize, seed: u64) -> IlpInstance {
    assert!(m >= 2, "market split needs m >= 2");
    let n = 10 * (m - 1);
    let mut s = Stream::new("market-split", &[m as u64], seed);
    let rows = (0..m)
        .map(|_| {
            let r: Vec<i64> = (0..n).map(|_| s.int(0, 49)).collect();
            let b = r.iter().sum::<i64>() / 2;
            LinearConstraint::from_ints(&r, Relation::Eq, b)
        })
        .collect();
    IlpInstance::new(
        format!("market-split-m{m}-s{seed}"),
        Sense::Min,
        vec![Rational::zero(); n],
        rows,
        vec![Some(BigInt::from(1)); n],
    )
    .expect("generated instance is valid")
}

/// Product over coordinates of `floor(b/a_j) + 1` for a packing row, over
/// the row support.
fn packing_box(row: &[i64], b: i64) -> f64 {
    row.iter()
        .filter(|&&a| a > 0)
        .map(|&a| (b / a + 1) as f64)
        .product()
}

/// Random packing instance with `n <= 8`, `m <= 4` and entries in `0..=10`.
/// Coefficients may exceed the right-hand side. Every column has a positive
/// entry so the relaxation is bounded, and every row box stays below `cap`.
pub fn gen_random_packing(seed: u64, cap: u64) -> IlpInstance {
    let mut s = Stream::new("random-packing", &[], seed);
    loop {
        let n = s.int(2, 8) as usize;
        let m = s.int(1, 4) as usize;
        let mut a = vec![vec![0i64; n]; m];
        let mut b = vec![0i64; m];
        for i in 0..m {
            b[i] = s.int(1, 10);
            for j in 0..n {
                a[i][j] = if s.int(0, 2) == 0 { 0 } else { s.int(1, 10) };
            }
        }
        let covered = (0..n).all(|j| (0..m).any(|i| a[i][j] > 0));
        let boxes_ok = (0..m).all(|i| packing_box(&a[i], b[i]) <= cap as f64);
        if !covered || !boxes_ok {
            continue;
        }
        let c: Vec<i64> = (0..n).map(|_| s.int(1, 10)).collect();
        let rows = (0..m)
            .map(|i| LinearConstraint::from_ints(&a[i], Relation::Le, b[i]))
            .collect();
        return IlpInstance::new(
            format!("random-packing-s{seed}"),
            Sense::Max,
            ints(&c),
            rows,
            vec![None; n],
        )
        .expect("generated instance is valid");
    }
}

/// Random covering instance with finite bounds `u_j` in `1..=3`, `n <= 8`,
/// `m <= 4`, entries in `0..=10`, resampled until the box point `u` is
/// feasible.
pub fn gen_random_covering_bounds(seed: u64) -> IlpInstance {
    let mut s = Stream::new("random-covering", &[], seed);
    loop {
        let n = s.int(2, 8) as usize;
        let m = s.int(1, 4) as usize;
        let u: Vec<i64> = (0..n).map(|_| s.int(1, 3)).collect();
        let mut rows = Vec::with_capacity(m);
        let mut feasible = true;
        for _ in 0..m {
            let r: Vec<i64> = (0..n)
                .map(|_| if s.int(0, 2) == 0 { 0 } else { s.int(1, 10) })
                .collect();
            let b = s.int(1, 10);
            let top: i64 = r.iter().zip(&u).map(|(a, u)| a * u).sum();
            feasible &= top >= b;
            rows.push(LinearConstraint::from_ints(&r, Relation::Ge, b));
        }
        if !feasible {
            continue;
        }
        let c: Vec<i64> = (0..n).map(|_| s.int(1, 10)).collect();
        return IlpInstance::new(
            format!("random-covering-s{seed}"),
            Sense::Min,
            ints(&c),
            rows,
            u.iter().map(|&v| Some(BigInt::from(v))).collect(),
        )
        .expect("generated instance is valid");
    }
}

/// Random mixed-sign instance with every variable boxed in `0..=u_j`,
/// `u_j <= 4`, `n <= 6`. May be infeasible.
pub fn gen_random_boxed(seed: u64) -> IlpInstance {
    let mut s = Stream::new("random-boxed", &[], seed);
    let n = s.int(1, 6) as usize;
    let m = s.int(1, 4) as usize;
    let u: Vec<i64> = (0..n).map(|_| s.int(0, 4)).collect();
    let rows = (0..m)
        .map(|_| {
            let r: Vec<i64> = (0..n).map(|_| s.int(-5, 5)).collect();
            let rel = match s.int(0, 4) {
                0 | 1 => Relation::Le,
                2 | 3 => Relation::Ge,
                _ => Relation::Eq,
            };
            let rhs = s.int(-6, 12);
            LinearConstraint::from_ints(&r, rel, rhs)
        })
        .collect();
    let c: Vec<i64> = (0..n).map(|_| s.int(-5, 5)).collect();
    let sense = if s.coin() { Sense::Max } else { Sense::Min };
    IlpInstance::new(
        format!("random-boxed-s{seed}"),
        sense,
        ints(&c),
        rows,
        u.iter().map(|&v| Some(BigInt::from(v))).collect(),
    )
    .expect("generated instance is valid")
}

/// Random single-row packing instance with integer data and `a_j <= b`.
pub fn gen_random_single_row_packing(seed: u64) -> IlpInstance {
    let mut s = Stream::new("random-single-row", &[], seed);
    let n = s.int(1, 8) as usize;
    let b = s.int(1, 30);
    let a: Vec<i64> = (0..n).map(|_| s.int(1, b)).collect();
    let c: Vec<i64> = (0..n).map(|_| s.int(0, 10)).collect();
    IlpInstance::new(
        format!("random-single-row-s{seed}"),
        Sense::Max,
        ints(&c),
        vec![LinearConstraint::from_ints(&a, Relation::Le, b)],
        vec![None; n],
    )
    .expect("generated instance is valid")
}
