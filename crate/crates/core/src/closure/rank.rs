//! Rank lower bounds for the k-aggregation closures, with exact logarithm
//! enclosures.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::instance::{IlpInstance, InstanceClass};
use crate::lp::solve_lp;
use crate::mip::{solve_mip, MipStatus};
use crate::rational::{qi, Rational};

/// Enclosure widths tried before giving up on an ambiguous ceiling.
const ENCLOSURE_BITS: [u32; 4] = [8, 16, 24, 30];

#[derive(Debug, Clone, PartialEq)]
pub struct RankBound {
    pub k: u64,
    pub bound: u64,
    /// `z^LP / z^I` for packing, `z^I / z^LP` for covering
    pub gap: Rational,
}

fn pow2(e: i64) -> Rational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(&p)
    } else {
        Rational::new(1, p)
    }
}

fn round_down(x: &Rational, prec: u32) -> Rational {
    let s = pow2(prec as i64);
    Rational::new((x * &s).floor(), BigInt::one() << prec)
}

fn round_up(x: &Rational, prec: u32) -> Rational {
    let s = pow2(prec as i64);
    Rational::new((x * &s).ceil(), BigInt::one() << prec)
}

/// `[lo, hi]` containing `log2(x)` with `hi - lo <= 2^-bits`; a point
/// interval exactly when `x` is a power of two.
pub fn log2_enclosure(x: &Rational, bits: u32) -> (Rational, Rational) {
    assert!(x.is_positive(), "log2 of a non-positive number");
    let mut e = x.numer().bits() as i64 - x.denom().bits() as i64;
    let mut y = x * &pow2(-e);
    let two = qi(2);
    while y >= two {
        y = &y / &two;
        e += 1;
    }
    while y < Rational::one() {
        y = &y * &two;
        e -= 1;
    }
    let base = qi(e);
    if y.is_one() {
        return (base.clone(), base);
    }
    let prec = bits + 16;
    let (mut lo, mut hi) = (y.clone(), y);
    let mut f = Rational::zero();
    for i in 1..=bits {
        lo = round_down(&(&lo * &lo), prec);
        hi = round_up(&(&hi * &hi), prec);
        if lo >= two {
            f += pow2(-(i as i64));
            lo = &lo / &two;
            hi = &hi / &two;
        } else if hi >= two {
            let l = &base + &f;
            let h = &l + &pow2(-(i as i64 - 1));
            return (l, h);
        }
    }
    let l = &base + &f;
    let h = &l + &pow2(-(bits as i64));
    (l, h)
}

/// Smallest `t >= 0` with `(k+1)^t >= gap`.
fn packing_bound(gap: &Rational, k: u64) -> u64 {
    let (p, q) = (gap.numer(), gap.denom());
    let base = BigInt::from(k + 1);
    let mut acc = q;
    let mut t = 0;
    while acc < p {
        acc *= &base;
        t += 1;
    }
    t
}

/// Smallest `t >= 0` with `t (3 + log2 log2 2k) >= log2 gap`.
fn covering_bound(gap: &Rational, k: u64) -> Result<u64> {
    if *gap <= Rational::one() {
        return Ok(0);
    }
    let two_k = qi(2) * Rational::from(k as i64);
    for bits in ENCLOSURE_BITS {
        let (a, b) = log2_enclosure(&two_k, bits);
        let (d_lo, d_hi) = if a == b {
            let (l, h) = log2_enclosure(&a, bits);
            (l, h)
        } else {
            (log2_enclosure(&a, bits).0, log2_enclosure(&b, bits).1)
        };
        let (d_lo, d_hi) = (&d_lo + &qi(3), &d_hi + &qi(3));
        let (g_lo, g_hi) = log2_enclosure(gap, bits);
        let t_lo = (&g_lo / &d_hi).ceil();
        let t_hi = (&g_hi / &d_lo).ceil();
        if t_lo == t_hi {
            return u64::try_from(t_lo)
                .map_err(|_| Error::Resource("rank bound does not fit in 64 bits".into()));
        }
    }
    Err(Error::precondition(format!(
        "rank bound ceiling for gap {gap}, k = {k} is ambiguous at width 2^-30"
    )))
}

/// Rank lower bound from the two optima. `class` selects the packing or
/// covering formula.
pub fn rank_lower_bound(z_lp: &Rational, z_i: &Rational, k: u64, class: InstanceClass) -> Result<RankBound> {
    if k == 0 {
        return Err(Error::validation("k must be at least 1"));
    }
    if !z_lp.is_positive() || !z_i.is_positive() {
        return Err(Error::precondition(format!(
            "rank bounds need positive optima, got z^LP = {z_lp}, z^I = {z_i}"
        )));
    }
    match class {
        InstanceClass::Packing => {
            let gap = z_lp / z_i;
            Ok(RankBound { k, bound: packing_bound(&gap, k), gap })
        }
        InstanceClass::Covering | InstanceClass::CoveringWithBounds => {
            let gap = z_i / z_lp;
            Ok(RankBound { k, bound: covering_bound(&gap, k)?, gap })
        }
        InstanceClass::General => Err(Error::Class("rank bounds need packing or covering data".into())),
    }
}

/// Checks `A_ij <= b_i` on every row.
pub fn check_rank_hypothesis(inst: &IlpInstance) -> Result<()> {
    for (i, r) in inst.rows.iter().enumerate() {
        if let Some(j) = r.coeffs.iter().position(|a| *a > r.rhs) {
            return Err(Error::precondition(format!(
                "row {} has A[{}][{}] = {} > b = {}",
                i + 1,
                i + 1,
                j + 1,
                r.coeffs[j],
                r.rhs
            )));
        }
    }
    Ok(())
}

/// Solves the LP and the IP, checks the hypothesis, and applies the bound.
pub fn rank_lower_bound_for(inst: &IlpInstance, k: u64) -> Result<RankBound> {
    let class = inst.classify()?;
    check_rank_hypothesis(inst)?;
    let lp = solve_lp(inst, &[]);
    let z_lp = lp
        .value
        .ok_or_else(|| Error::precondition(format!("LP relaxation is {:?}", lp.status)))?;
    let ip = solve_mip(inst, &[])?;
    if ip.status != MipStatus::Optimal {
        return Err(Error::precondition("instance has no integer point"));
    }
    let z_i = ip.value.unwrap();
    debug_assert!(!z_i.numer().is_negative());
    rank_lower_bound(&z_lp, &z_i, k, class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_family, Family};
    use crate::rational::q;

    #[test]
    fn fstab_rank() {
        let inst = gen_family(Family::Fstab, 16).unwrap();
        let r = rank_lower_bound_for(&inst, 1).unwrap();
        assert_eq!(r.gap, qi(8));
        assert_eq!(r.bound, 3);
    }

    #[test]
    fn formula_examples() {
        let p = rank_lower_bound(&qi(8), &qi(1), 3, InstanceClass::Packing).unwrap();
        assert_eq!(p.bound, 2);
        let c = rank_lower_bound(&qi(1), &qi(8), 1, InstanceClass::Covering).unwrap();
        assert_eq!(c.bound, 1);
        let none = rank_lower_bound(&qi(1), &qi(1), 1, InstanceClass::Packing).unwrap();
        assert_eq!(none.bound, 0);
        assert!(rank_lower_bound(&qi(0), &qi(1), 1, InstanceClass::Packing).is_err());
    }

    #[test]
    fn bound_positive_when_gap_exceeds_one() {
        for k in 1..6u64 {
            for (n, d) in [(9, 8), (3, 2), (17, 1), (1000, 3)] {
                let g = q(n, d);
                for class in [InstanceClass::Packing, InstanceClass::Covering] {
                    let (zl, zi) = if class == InstanceClass::Packing { (g.clone(), qi(1)) } else { (qi(1), g.clone()) };
                    assert!(rank_lower_bound(&zl, &zi, k, class).unwrap().bound >= 1);
                }
            }
        }
    }

    // float oracle, far from integer boundaries
    #[test]
    fn covering_matches_float_formula() {
        for k in [1u64, 2, 3, 5, 8, 100] {
            for g in [2i64, 10, 100, 1000, 1 << 20] {
                let d = 3.0 + ((2.0 * k as f64).log2()).log2();
                let t = (g as f64).log2() / d;
                if (t - t.round()).abs() < 1e-6 {
                    continue;
                }
                let b = rank_lower_bound(&qi(1), &qi(g), k, InstanceClass::Covering).unwrap();
                assert_eq!(b.bound, t.ceil() as u64, "k={k} g={g}");
            }
        }
    }

    #[test]
    fn enclosures_contain_float_log() {
        for (n, d) in [(3, 1), (5, 7), (1000, 3), (1, 1024), (99, 98)] {
            let x = q(n, d);
            let (lo, hi) = log2_enclosure(&x, 30);
            let f = (n as f64 / d as f64).log2();
            assert!(lo.to_f64() <= f + 1e-12 && f - 1e-12 <= hi.to_f64());
            assert!(&hi - &lo <= pow2(-30));
        }
        assert_eq!(log2_enclosure(&q(1, 8), 10), (qi(-3), qi(-3)));
    }

    #[test]
    fn hypothesis_checked() {
        let inst = IlpInstance::new(
            "h",
            crate::instance::Sense::Max,
            vec![qi(1), qi(1)],
            vec![crate::instance::LinearConstraint::from_ints(&[3, 1], crate::instance::Relation::Le, 2)],
            vec![None, None],
        )
        .unwrap();
        assert!(matches!(rank_lower_bound_for(&inst, 1), Err(Error::Precondition(_))));
        let ok = gen_family(Family::PackingTight, 3).unwrap();
        assert!(check_rank_hypothesis(&ok).is_ok());
    }
}
